#include "abe/scheme/common.hpp"

#include <algorithm>
#include <string_view>

#include "abe/errors.hpp"

namespace abe::scheme {

namespace {
constexpr std::string_view kMagic = "ABE1";
}

const char* to_string(SchemeId id) { return id == SchemeId::CP ? "cp" : "kp"; }

const char* to_string(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::PublicParams:
      return "public parameters";
    case ObjectKind::MasterKey:
      return "master key";
    case ObjectKind::SecretKey:
      return "secret key";
    case ObjectKind::Ciphertext:
      return "ciphertext";
  }
  return "object";
}

ObjectHeader peek_header(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  auto magic = r.raw(kMagic.size());
  if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) throw FormatError("not an ABE1 object");
  const std::uint8_t scheme = r.u8();
  if (scheme > 1) throw FormatError("unknown scheme id");
  const SecurityLevel level = level_from_byte(r.u8());
  const std::uint8_t kind = r.u8();
  if (kind > 3) throw FormatError("unknown object kind");
  return {static_cast<SchemeId>(scheme), level, static_cast<ObjectKind>(kind)};
}

void write_header(ByteWriter& w, const ObjectHeader& h) {
  w.raw(kMagic);
  w.u8(static_cast<std::uint8_t>(h.scheme));
  w.u8(static_cast<std::uint8_t>(h.level));
  w.u8(static_cast<std::uint8_t>(h.kind));
}

void read_header(ByteReader& r, const ObjectHeader& expected) {
  ObjectHeader h = peek_header(r.raw(kMagic.size() + 3));
  if (h.scheme != expected.scheme) throw FormatError(std::string("expected a ") + to_string(expected.scheme) + " object");
  if (h.kind != expected.kind) throw FormatError(std::string("expected ") + to_string(expected.kind));
  if (h.level != expected.level) throw FormatError("security level does not match");
}

}  // namespace abe::scheme
