#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "abe/bytes.hpp"
#include "abe/digest.hpp"

namespace abe::health {

enum class StreamType : std::uint8_t { HeartRate = 0, Respiration = 1, SpO2 = 2, BodyTemp = 3, Ecg = 4 };
inline constexpr std::size_t kStreamCount = 5;
inline constexpr std::uint8_t kSidecarType = 0xFF;

struct SensorSpec {
  StreamType type;
  const char* name;
  std::uint32_t interval_ms;
  std::uint32_t sample_bytes;
};

const std::array<SensorSpec, kStreamCount>& sensor_table();
const SensorSpec& sensor(StreamType type);
// Throws InvalidArgument.
StreamType parse_stream(std::string_view name);

// Microsecond clock shared by every stage. sleep_until may return early only
// if the target is already in the past.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_us() = 0;
  virtual void sleep_until(std::int64_t t_us) = 0;
  void sleep_for_ms(std::int64_t ms) { sleep_until(now_us() + ms * 1000); }
};

// Realtime microseconds, comparable across processes on one host.
class WallClock final : public Clock {
 public:
  std::int64_t now_us() override;
  void sleep_until(std::int64_t t_us) override;
};

// Jumps forward on sleep; for deterministic single-threaded tests.
class SimulatedClock final : public Clock {
 public:
  explicit SimulatedClock(std::int64_t start_us = 0) : now_(start_us) {}
  std::int64_t now_us() override { return now_.load(); }
  void sleep_until(std::int64_t t_us) override;
  void advance_us(std::int64_t d) { now_ += d; }

 private:
  std::atomic<std::int64_t> now_;
};

// "<type>-<cycle>.bin"
std::string file_name(StreamType type, std::uint32_t cycle);
std::optional<std::pair<StreamType, std::uint32_t>> parse_file_name(std::string_view name);
inline constexpr const char* kDoneMarker = "generator.done";

struct GeneratorConfig {
  std::filesystem::path dir;
  std::uint32_t duration_s = 0;
  std::uint64_t seed = 1;
  std::int64_t epoch_us = 0;  // start of cycle 0 on the clock
};

struct GeneratorStats {
  std::uint32_t cycles = 0;
  std::array<std::uint32_t, kStreamCount> files{};
  std::array<std::uint64_t, kStreamCount> bytes{};
};

// Cycle c covers [epoch + c s, epoch + (c+1) s). Files of a cycle appear,
// each renamed into place, once the cycle has closed. A done marker follows
// the last cycle. Stops early when *stop becomes true.
GeneratorStats generate_streams(const GeneratorConfig& config, Clock& clock, const std::atomic<bool>* stop = nullptr);

// Close time of a cycle on the shared clock.
inline std::int64_t cycle_close_us(std::int64_t epoch_us, std::uint32_t cycle) {
  return epoch_us + static_cast<std::int64_t>(cycle + 1) * 1'000'000;
}

inline constexpr std::uint8_t kDatagramVersion = 1;
inline constexpr std::size_t kDatagramHeaderLen = 24;
inline constexpr std::size_t kMaxChunk = 1400;

// Little-endian, fields in declaration order.
struct Datagram {
  std::uint8_t version = kDatagramVersion;
  std::uint8_t stream_type = 0;
  std::uint32_t file_id = 0;
  std::uint32_t seq = 0;
  std::uint32_t total_chunks = 0;
  std::uint64_t timestamp_us = 0;
  Bytes chunk;
};

Bytes encode_datagram(const Datagram& d);
// Throws FormatError.
Datagram decode_datagram(std::span<const std::uint8_t> in);

inline std::uint32_t make_file_id(std::uint32_t cycle, StreamType type) {
  return cycle * 8 + static_cast<std::uint32_t>(type);
}
inline std::uint32_t file_cycle(std::uint32_t file_id) { return file_id / 8; }
inline StreamType file_stream(std::uint32_t file_id) { return static_cast<StreamType>(file_id % 8); }

std::vector<Datagram> chunk_container(StreamType type, std::uint32_t file_id, std::uint64_t timestamp_us,
                                      std::span<const std::uint8_t> container);

// Verification sidecar: payload SHA-256 plus the sender's seal and send times.
struct Sidecar {
  Digest payload_hash{};
  std::uint32_t seal_us = 0;
  std::uint32_t send_us = 0;
};
Datagram make_sidecar(std::uint32_t file_id, std::uint64_t timestamp_us, const Sidecar& s);
Sidecar read_sidecar(const Datagram& d);

}  // namespace abe::health
