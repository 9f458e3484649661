#include "abe/health/telemetry.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include "abe/errors.hpp"
#include "abe/io.hpp"
#include "abe/rng.hpp"

namespace abe::health {

namespace fs = std::filesystem;

const std::array<SensorSpec, kStreamCount>& sensor_table() {
  static const std::array<SensorSpec, kStreamCount> table{{
      {StreamType::HeartRate, "heartrate", 5000, 1},
      {StreamType::Respiration, "respiration", 10000, 1},
      {StreamType::SpO2, "spo2", 1000, 3},
      {StreamType::BodyTemp, "bodytemp", 60000, 3},
      {StreamType::Ecg, "ecg", 2, 3},
  }};
  return table;
}

const SensorSpec& sensor(StreamType type) {
  auto i = static_cast<std::size_t>(type);
  if (i >= kStreamCount) throw InvalidArgument("unknown stream type " + std::to_string(i));
  return sensor_table()[i];
}

StreamType parse_stream(std::string_view name) {
  for (const auto& s : sensor_table())
    if (name == s.name) return s.type;
  throw InvalidArgument("unknown stream '" + std::string(name) + "'");
}

std::int64_t WallClock::now_us() {
  using namespace std::chrono;
  return duration_cast<microseconds>(system_clock::now().time_since_epoch()).count();
}

void WallClock::sleep_until(std::int64_t t_us) {
  for (;;) {
    std::int64_t d = t_us - now_us();
    if (d <= 0) return;
    std::this_thread::sleep_for(std::chrono::microseconds(d));
  }
}

void SimulatedClock::sleep_until(std::int64_t t_us) {
  std::int64_t cur = now_.load();
  while (cur < t_us && !now_.compare_exchange_weak(cur, t_us)) {
  }
}

std::string file_name(StreamType type, std::uint32_t cycle) {
  return std::string(sensor(type).name) + "-" + std::to_string(cycle) + ".bin";
}

std::optional<std::pair<StreamType, std::uint32_t>> parse_file_name(std::string_view name) {
  auto dash = name.rfind('-');
  if (dash == std::string_view::npos || name.size() < 5 || name.substr(name.size() - 4) != ".bin") return std::nullopt;
  auto digits = name.substr(dash + 1, name.size() - 4 - dash - 1);
  if (digits.empty() || digits.size() > 9) return std::nullopt;
  std::uint32_t cycle = 0;
  for (char c : digits) {
    if (c < '0' || c > '9') return std::nullopt;
    cycle = cycle * 10 + static_cast<std::uint32_t>(c - '0');
  }
  for (const auto& s : sensor_table())
    if (name.substr(0, dash) == s.name) return std::make_pair(s.type, cycle);
  return std::nullopt;
}

namespace {

// Plausible sample values; only the byte counts matter downstream.
void append_sample(Bytes& out, StreamType type, std::uint64_t k, Rng& rng) {
  std::uint64_t noise = rng.next_u64();
  switch (type) {
    case StreamType::HeartRate:
      out.push_back(static_cast<std::uint8_t>(60 + noise % 40));
      break;
    case StreamType::Respiration:
      out.push_back(static_cast<std::uint8_t>(12 + noise % 8));
      break;
    case StreamType::SpO2:
    case StreamType::BodyTemp:
    case StreamType::Ecg: {
      std::uint32_t v;
      if (type == StreamType::SpO2)
        v = 9500 + noise % 500;
      else if (type == StreamType::BodyTemp)
        v = 3650 + noise % 100;
      else
        v = static_cast<std::uint32_t>(8'388'608 + 2'000'000 * std::sin(2 * M_PI * static_cast<double>(k % 500) / 500) +
                                       static_cast<double>(noise % 20'000));
      out.push_back(static_cast<std::uint8_t>(v));
      out.push_back(static_cast<std::uint8_t>(v >> 8));
      out.push_back(static_cast<std::uint8_t>(v >> 16));
      break;
    }
  }
}

}  // namespace

GeneratorStats generate_streams(const GeneratorConfig& config, Clock& clock, const std::atomic<bool>* stop) {
  fs::create_directories(config.dir);
  GeneratorStats stats;
  DeterministicRng rng(config.seed);
  for (std::uint32_t c = 0; c < config.duration_s; ++c) {
    if (stop && stop->load()) break;
    clock.sleep_until(cycle_close_us(config.epoch_us, c));
    std::uint64_t lo = std::uint64_t{c} * 1000, hi = lo + 1000;
    for (const auto& s : sensor_table()) {
      // Samples fire at k * interval; those inside this cycle go to its file.
      std::uint64_t first = (lo + s.interval_ms - 1) / s.interval_ms;
      Bytes data;
      for (std::uint64_t k = first; k * s.interval_ms < hi; ++k) append_sample(data, s.type, k, rng);
      if (data.empty()) continue;
      write_file_atomic(config.dir / file_name(s.type, c), data);
      auto i = static_cast<std::size_t>(s.type);
      stats.files[i]++;
      stats.bytes[i] += data.size();
    }
    stats.cycles++;
  }
  write_file_atomic(config.dir / kDoneMarker, std::string_view());
  return stats;
}

Bytes encode_datagram(const Datagram& d) {
  if (d.chunk.size() > kMaxChunk) throw InvalidArgument("chunk exceeds " + std::to_string(kMaxChunk) + " bytes");
  ByteWriter w;
  w.u8(d.version);
  w.u8(d.stream_type);
  w.u32(d.file_id);
  w.u32(d.seq);
  w.u32(d.total_chunks);
  w.u64(d.timestamp_us);
  w.u16(static_cast<std::uint16_t>(d.chunk.size()));
  w.raw(d.chunk);
  return w.take();
}

Datagram decode_datagram(std::span<const std::uint8_t> in) {
  ByteReader r(in);
  Datagram d;
  d.version = r.u8();
  if (d.version != kDatagramVersion) throw FormatError("unsupported datagram version");
  d.stream_type = r.u8();
  d.file_id = r.u32();
  d.seq = r.u32();
  d.total_chunks = r.u32();
  d.timestamp_us = r.u64();
  std::uint16_t len = r.u16();
  if (len > kMaxChunk) throw FormatError("chunk too long");
  auto body = r.raw(len);
  d.chunk.assign(body.begin(), body.end());
  r.expect_done();
  if (d.total_chunks == 0 || d.seq >= d.total_chunks) throw FormatError("bad chunk numbering");
  bool known = d.stream_type == kSidecarType || d.stream_type < kStreamCount;
  if (!known) throw FormatError("unknown stream type");
  if (d.stream_type != kSidecarType && file_stream(d.file_id) != static_cast<StreamType>(d.stream_type))
    throw FormatError("stream type does not match file id");
  return d;
}

std::vector<Datagram> chunk_container(StreamType type, std::uint32_t file_id, std::uint64_t timestamp_us,
                                      std::span<const std::uint8_t> container) {
  std::size_t total = std::max<std::size_t>(1, (container.size() + kMaxChunk - 1) / kMaxChunk);
  std::vector<Datagram> out;
  for (std::size_t i = 0; i < total; ++i) {
    Datagram d;
    d.stream_type = static_cast<std::uint8_t>(type);
    d.file_id = file_id;
    d.seq = static_cast<std::uint32_t>(i);
    d.total_chunks = static_cast<std::uint32_t>(total);
    d.timestamp_us = timestamp_us;
    auto part = container.subspan(i * kMaxChunk, std::min(kMaxChunk, container.size() - i * kMaxChunk));
    d.chunk.assign(part.begin(), part.end());
    out.push_back(std::move(d));
  }
  return out;
}

Datagram make_sidecar(std::uint32_t file_id, std::uint64_t timestamp_us, const Sidecar& s) {
  ByteWriter w;
  w.raw(s.payload_hash);
  w.u32(s.seal_us);
  w.u32(s.send_us);
  Datagram d;
  d.stream_type = kSidecarType;
  d.file_id = file_id;
  d.seq = 0;
  d.total_chunks = 1;
  d.timestamp_us = timestamp_us;
  d.chunk = w.take();
  return d;
}

Sidecar read_sidecar(const Datagram& d) {
  if (d.stream_type != kSidecarType) throw FormatError("not a sidecar datagram");
  ByteReader r(d.chunk);
  Sidecar s;
  auto h = r.raw(s.payload_hash.size());
  std::copy(h.begin(), h.end(), s.payload_hash.begin());
  s.seal_us = r.u32();
  s.send_us = r.u32();
  r.expect_done();
  return s;
}

}  // namespace abe::health
