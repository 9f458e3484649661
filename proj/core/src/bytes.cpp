#include "abe/bytes.hpp"

#include <limits>

namespace abe {

void ByteWriter::str(std::string_view s) {
  if (s.size() > std::numeric_limits<std::uint32_t>::max()) throw InvalidArgument("string too long");
  u32(static_cast<std::uint32_t>(s.size()));
  raw(s);
}

void ByteWriter::blob(std::span<const std::uint8_t> b) {
  if (b.size() > std::numeric_limits<std::uint32_t>::max()) throw InvalidArgument("blob too long");
  u32(static_cast<std::uint32_t>(b.size()));
  raw(b);
}

std::uint64_t ByteReader::get(int n) {
  if (remaining() < static_cast<std::size_t>(n)) throw FormatError("truncated input");
  std::uint64_t v = 0;
  for (int i = n - 1; i >= 0; --i) v = (v << 8) | in_[pos_ + static_cast<std::size_t>(i)];
  pos_ += static_cast<std::size_t>(n);
  return v;
}

std::span<const std::uint8_t> ByteReader::raw(std::size_t n) {
  if (remaining() < n) throw FormatError("truncated input");
  auto out = in_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::string ByteReader::str() {
  auto b = blob();
  return std::string(b.begin(), b.end());
}

std::span<const std::uint8_t> ByteReader::blob() { return raw(u32()); }

void ByteReader::expect_done() const {
  if (!done()) throw FormatError("trailing bytes");
}

}  // namespace abe
