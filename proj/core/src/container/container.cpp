#include "abe/container/container.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <memory>

#include "abe/digest.hpp"
#include "abe/errors.hpp"

namespace abe::container {

using scheme::SchemeId;

namespace {

constexpr std::string_view kMagic = "ABEH";
constexpr std::string_view kKdfTag = "abe-dem-v1";

struct Parsed {
  Info info;
  std::span<const std::uint8_t> abe;
  std::span<const std::uint8_t> nonce;
  std::span<const std::uint8_t> aad;
  std::span<const std::uint8_t> dem;
};

Parsed parse(std::span<const std::uint8_t> in) {
  try {
    ByteReader r(in);
    auto magic = r.raw(kMagic.size());
    if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) throw FormatError("bad magic");
    if (r.u8() != kVersion) throw FormatError("unsupported container version");
    const std::uint8_t scheme = r.u8();
    if (scheme > 1) throw FormatError("bad scheme id");
    const SecurityLevel level = level_from_byte(r.u8());
    std::string policy = r.str();
    auto abe = r.blob();
    auto nonce = r.raw(kNonceLen);
    const std::uint64_t dem_len = r.u64();
    const std::size_t aad_len = r.offset();
    if (dem_len < kTagLen || dem_len != r.remaining()) throw FormatError("bad payload length");
    auto dem = r.raw(static_cast<std::size_t>(dem_len));
    return {{static_cast<SchemeId>(scheme), level, std::move(policy), abe.size(), dem.size()},
            abe,
            nonce,
            in.first(aad_len),
            dem};
  } catch (const Error& e) {
    throw AuthenticationFailure(std::string("malformed container: ") + e.what());
  }
}

struct CipherCtx {
  EVP_CIPHER_CTX* p = EVP_CIPHER_CTX_new();
  ~CipherCtx() { EVP_CIPHER_CTX_free(p); }
};

const EVP_CIPHER* cipher_for(std::size_t key_len) {
  return key_len == 16 ? EVP_aes_128_gcm() : EVP_aes_256_gcm();
}

Bytes gcm_seal(const Bytes& key, std::span<const std::uint8_t> nonce, std::span<const std::uint8_t> aad,
               std::span<const std::uint8_t> pt) {
  CipherCtx ctx;
  int len = 0;
  Bytes out(pt.size() + kTagLen);
  bool ok = ctx.p != nullptr && EVP_EncryptInit_ex(ctx.p, cipher_for(key.size()), nullptr, nullptr, nullptr) == 1 &&
            EVP_CIPHER_CTX_ctrl(ctx.p, EVP_CTRL_GCM_SET_IVLEN, static_cast<int>(nonce.size()), nullptr) == 1 &&
            EVP_EncryptInit_ex(ctx.p, nullptr, nullptr, key.data(), nonce.data()) == 1 &&
            EVP_EncryptUpdate(ctx.p, nullptr, &len, aad.data(), static_cast<int>(aad.size())) == 1;
  std::size_t done = 0;
  // chunked so payloads above INT_MAX still work
  constexpr std::size_t kStep = std::size_t{1} << 30;
  while (ok && done < pt.size()) {
    const std::size_t n = std::min(kStep, pt.size() - done);
    ok = EVP_EncryptUpdate(ctx.p, out.data() + done, &len, pt.data() + done, static_cast<int>(n)) == 1;
    done += static_cast<std::size_t>(len);
  }
  ok = ok && EVP_EncryptFinal_ex(ctx.p, out.data() + done, &len) == 1 &&
       EVP_CIPHER_CTX_ctrl(ctx.p, EVP_CTRL_GCM_GET_TAG, static_cast<int>(kTagLen), out.data() + pt.size()) == 1;
  if (!ok) throw std::runtime_error("AES-GCM encryption failed");
  return out;
}

Bytes gcm_open(const Bytes& key, std::span<const std::uint8_t> nonce, std::span<const std::uint8_t> aad,
               std::span<const std::uint8_t> dem) {
  const std::size_t n_ct = dem.size() - kTagLen;
  Bytes tag(dem.end() - static_cast<std::ptrdiff_t>(kTagLen), dem.end());
  Bytes out(n_ct);
  CipherCtx ctx;
  int len = 0;
  bool ok = ctx.p != nullptr && EVP_DecryptInit_ex(ctx.p, cipher_for(key.size()), nullptr, nullptr, nullptr) == 1 &&
            EVP_CIPHER_CTX_ctrl(ctx.p, EVP_CTRL_GCM_SET_IVLEN, static_cast<int>(nonce.size()), nullptr) == 1 &&
            EVP_DecryptInit_ex(ctx.p, nullptr, nullptr, key.data(), nonce.data()) == 1 &&
            EVP_DecryptUpdate(ctx.p, nullptr, &len, aad.data(), static_cast<int>(aad.size())) == 1;
  std::size_t done = 0;
  constexpr std::size_t kStep = std::size_t{1} << 30;
  while (ok && done < n_ct) {
    const std::size_t n = std::min(kStep, n_ct - done);
    ok = EVP_DecryptUpdate(ctx.p, out.data() + done, &len, dem.data() + done, static_cast<int>(n)) == 1;
    done += static_cast<std::size_t>(len);
  }
  ok = ok && EVP_CIPHER_CTX_ctrl(ctx.p, EVP_CTRL_GCM_SET_TAG, static_cast<int>(kTagLen), tag.data()) == 1 &&
       EVP_DecryptFinal_ex(ctx.p, out.data() + done, &len) == 1;
  if (!ok) {
    std::fill(out.begin(), out.end(), 0);
    throw AuthenticationFailure("container failed authentication");
  }
  return out;
}

Bytes assemble(const PairingSuite& s, SchemeId scheme, std::string_view policy, const Bytes& abe, const GT& k,
               std::span<const std::uint8_t> payload, Rng& rng) {
  std::array<std::uint8_t, kNonceLen> nonce{};
  rng.fill(nonce);
  ByteWriter w;
  w.raw(kMagic);
  w.u8(kVersion);
  w.u8(static_cast<std::uint8_t>(scheme));
  w.u8(static_cast<std::uint8_t>(s.level()));
  w.str(policy);
  w.blob(abe);
  w.raw(nonce);
  w.u64(payload.size() + kTagLen);
  Bytes dem = gcm_seal(derive_key(s, k), nonce, w.bytes(), payload);
  w.raw(dem);
  return w.take();
}

Parsed parse_for(const PairingSuite& s, SchemeId scheme, std::span<const std::uint8_t> in) {
  Parsed p = parse(in);
  if (p.info.scheme != scheme) throw AuthenticationFailure("container holds a different scheme");
  if (p.info.level != s.level()) throw AuthenticationFailure("container security level does not match");
  return p;
}

std::string join(const std::set<std::string>& attrs) {
  std::string out;
  for (const auto& a : attrs) {
    if (!out.empty()) out += ',';
    out += a;
  }
  return out;
}

}  // namespace

Info inspect(std::span<const std::uint8_t> container) { return parse(container).info; }

Bytes derive_key(const PairingSuite& s, const GT& k) {
  Sha256 h;
  h.update(kKdfTag);
  h.update(s.gt_bytes(k));
  Digest d = h.finish();
  const std::size_t len = s.level() == SecurityLevel::S80 ? 16 : 32;
  return Bytes(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(len));
}

Bytes seal_cp(PairingSuite& s, const scheme::CpPublicParams& pp, std::string_view policy,
              std::span<const std::uint8_t> payload, Rng& rng) {
  tree::AccessTree t = tree::compile(policy);
  auto [ct, k] = scheme::cp_encrypt(s, pp, t, rng);
  return assemble(s, SchemeId::CP, policy, ct.to_bytes(s), k, payload, rng);
}

Bytes seal_kp(PairingSuite& s, const scheme::KpPublicParams& pp, const scheme::KpUniverse& universe,
              const std::set<std::string>& attrs, std::span<const std::uint8_t> payload, Rng& rng) {
  for (const auto& a : attrs) {
    if (a.find(',') != std::string::npos) throw InvalidArgument("attribute contains ','");
  }
  auto [ct, k] = scheme::kp_encrypt(s, pp, universe, attrs, rng);
  return assemble(s, SchemeId::KP, join(attrs), ct.to_bytes(s), k, payload, rng);
}

Bytes open_cp(PairingSuite& s, const scheme::CpPublicParams& pp, const scheme::CpSecretKey& key,
              std::span<const std::uint8_t> container) {
  Parsed p = parse_for(s, SchemeId::CP, container);
  scheme::CpCiphertext ct = [&] {
    try {
      auto c = scheme::CpCiphertext::from_bytes(s, p.abe);
      if (!(tree::compile(p.info.policy) == c.tree)) throw FormatError("policy does not match ciphertext");
      return c;
    } catch (const Error& e) {
      throw AuthenticationFailure(std::string("malformed container: ") + e.what());
    }
  }();
  GT k = scheme::cp_decrypt(s, pp, key, ct);
  return gcm_open(derive_key(s, k), p.nonce, p.aad, p.dem);
}

Bytes open_kp(PairingSuite& s, const scheme::KpPublicParams& pp, const scheme::KpKey& key,
              std::span<const std::uint8_t> container) {
  Parsed p = parse_for(s, SchemeId::KP, container);
  scheme::KpCiphertext ct = [&] {
    try {
      auto c = scheme::KpCiphertext::from_bytes(s, p.abe);
      if (join({c.attrs.begin(), c.attrs.end()}) != p.info.policy) throw FormatError("attribute list mismatch");
      return c;
    } catch (const Error& e) {
      throw AuthenticationFailure(std::string("malformed container: ") + e.what());
    }
  }();
  GT k = scheme::kp_decrypt(s, pp, key, ct);
  return gcm_open(derive_key(s, k), p.nonce, p.aad, p.dem);
}

}  // namespace abe::container
