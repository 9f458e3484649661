#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>

#include "abe/scheme/cp_abe.hpp"
#include "abe/scheme/kp_abe.hpp"

// Sealed file format:
//   "ABEH" | version u8 | scheme u8 | level u8 | policy_len u32 | policy
//   | abe_len u32 | abe ciphertext | nonce[12] | dem_len u64 | AES-GCM ct+tag
// Integers are little-endian. Everything before the DEM ciphertext is bound
// as associated data. For key-policy containers the policy field holds the
// comma-joined attribute list.
namespace abe::container {

inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kNonceLen = 12;
inline constexpr std::size_t kTagLen = 16;

struct Info {
  scheme::SchemeId scheme;
  SecurityLevel level;
  std::string policy;
  std::size_t abe_len;
  std::size_t dem_len;
};

// Header fields of a container; malformed input throws AuthenticationFailure.
Info inspect(std::span<const std::uint8_t> container);

// 16-byte key at S80, 32 bytes otherwise: SHA-256("abe-dem-v1" | GT bytes).
Bytes derive_key(const PairingSuite& s, const GT& k);

Bytes seal_cp(PairingSuite& s, const scheme::CpPublicParams& pp, std::string_view policy,
              std::span<const std::uint8_t> payload, Rng& rng);
Bytes seal_kp(PairingSuite& s, const scheme::KpPublicParams& pp, const scheme::KpUniverse& universe,
              const std::set<std::string>& attrs, std::span<const std::uint8_t> payload, Rng& rng);

// PolicyNotSatisfied is raised before the payload is touched; any tampering
// raises AuthenticationFailure. No plaintext is returned on failure.
Bytes open_cp(PairingSuite& s, const scheme::CpPublicParams& pp, const scheme::CpSecretKey& key,
              std::span<const std::uint8_t> container);
Bytes open_kp(PairingSuite& s, const scheme::KpPublicParams& pp, const scheme::KpKey& key,
              std::span<const std::uint8_t> container);

}  // namespace abe::container
