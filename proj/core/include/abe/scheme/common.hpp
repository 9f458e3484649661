#pragma once

#include <cstdint>
#include <span>

#include "abe/bytes.hpp"
#include "abe/pairing/suite.hpp"

namespace abe::scheme {

enum class SchemeId : std::uint8_t { CP = 0, KP = 1 };
enum class ObjectKind : std::uint8_t { PublicParams = 0, MasterKey = 1, SecretKey = 2, Ciphertext = 3 };

const char* to_string(SchemeId id);
const char* to_string(ObjectKind kind);

// Leading bytes of every serialized object: "ABE1", scheme, level, kind.
struct ObjectHeader {
  SchemeId scheme;
  SecurityLevel level;
  ObjectKind kind;
};

ObjectHeader peek_header(std::span<const std::uint8_t> bytes);

void write_header(ByteWriter& w, const ObjectHeader& h);
// Reads and checks the header against the expected values.
void read_header(ByteReader& r, const ObjectHeader& expected);

}  // namespace abe::scheme
