#include <gtest/gtest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "abe/container/container.hpp"
#include "abe/errors.hpp"
#include "abe/health/pipeline.hpp"
#include "abe/rng.hpp"

using namespace abe;
using namespace abe::health;
namespace fs = std::filesystem;

namespace {

const char* kPolicy = "a0 and a1 and a2 and a3 and a4";
const std::set<std::string> kAllAttrs{"a0", "a1", "a2", "a3", "a4"};

fs::path fresh_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("abe_health_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::map<StreamType, std::pair<int, std::uint64_t>> census(const fs::path& dir) {
  std::map<StreamType, std::pair<int, std::uint64_t>> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    auto parsed = parse_file_name(e.path().filename().string());
    if (!parsed) continue;
    out[parsed->first].first++;
    out[parsed->first].second += fs::file_size(e.path());
  }
  return out;
}

void send_raw(std::uint16_t port, const Bytes& wire) {
  int fd = ::socket(AF_INET, SOCK_DGRAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  ::sendto(fd, wire.data(), wire.size(), 0, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  ::close(fd);
}

PipelineConfig pipeline_config(const std::string& name, std::uint32_t seconds) {
  PipelineConfig c;
  c.work_dir = fresh_dir(name);
  c.duration_s = seconds;
  c.policy = kPolicy;
  c.key_attrs = kAllAttrs;
  return c;
}

}  // namespace

TEST(Sensors, Table) {
  EXPECT_EQ(sensor(StreamType::HeartRate).interval_ms, 5000u);
  EXPECT_EQ(sensor(StreamType::Respiration).interval_ms, 10000u);
  EXPECT_EQ(sensor(StreamType::SpO2).sample_bytes, 3u);
  EXPECT_EQ(sensor(StreamType::BodyTemp).interval_ms, 60000u);
  EXPECT_EQ(1000 / sensor(StreamType::Ecg).interval_ms * sensor(StreamType::Ecg).sample_bytes, 1500u);
  EXPECT_EQ(parse_stream("ecg"), StreamType::Ecg);
  EXPECT_THROW(parse_stream("eeg"), InvalidArgument);
}

TEST(Files, NamesRoundTrip) {
  for (const auto& s : sensor_table()) {
    auto parsed = parse_file_name(file_name(s.type, 42));
    ASSERT_TRUE(parsed);
    EXPECT_EQ(parsed->first, s.type);
    EXPECT_EQ(parsed->second, 42u);
  }
  EXPECT_EQ(file_name(StreamType::Ecg, 7), "ecg-7.bin");
  for (const char* bad : {"ecg-7.bin.tmp", "ecg-.bin", "foo-1.bin", "ecg-x.bin", "generator.done"})
    EXPECT_FALSE(parse_file_name(bad)) << bad;
}

TEST(Generator, TenSecondsOfEcg) {
  auto dir = fresh_dir("gen10");
  SimulatedClock clock;
  auto stats = generate_streams({dir, 10, 1, 0}, clock);
  auto c = census(dir);
  EXPECT_EQ(stats.cycles, 10u);
  EXPECT_EQ(c[StreamType::Ecg].first, 10);
  EXPECT_EQ(c[StreamType::Ecg].second, 15000u);
  EXPECT_EQ(c[StreamType::SpO2].second, 30u);
  EXPECT_EQ(c[StreamType::HeartRate].first, 2);
  EXPECT_EQ(c[StreamType::Respiration].first, 1);
  EXPECT_TRUE(fs::exists(dir / kDoneMarker));
  EXPECT_EQ(clock.now_us(), 10'000'000);
  fs::remove_all(dir);
}

TEST(Generator, OneMinute) {
  auto dir = fresh_dir("gen60");
  SimulatedClock clock;
  generate_streams({dir, 60, 1, 0}, clock);
  auto c = census(dir);
  EXPECT_EQ(c[StreamType::BodyTemp].first, 1);
  EXPECT_EQ(c[StreamType::BodyTemp].second, 3u);
  EXPECT_EQ(c[StreamType::HeartRate].first, 12);
  EXPECT_EQ(c[StreamType::Respiration].first, 6);
  EXPECT_EQ(c[StreamType::Ecg].second, 90000u);
  for (const auto& e : fs::directory_iterator(dir)) EXPECT_NE(e.path().extension(), ".tmp");
  fs::remove_all(dir);
}

TEST(Generator, ZeroDuration) {
  auto dir = fresh_dir("gen0");
  SimulatedClock clock;
  auto stats = generate_streams({dir, 0, 1, 0}, clock);
  EXPECT_EQ(stats.cycles, 0u);
  EXPECT_TRUE(census(dir).empty());
  fs::remove_all(dir);
}

TEST(Datagram, RoundTripAndLayout) {
  Datagram d;
  d.stream_type = static_cast<std::uint8_t>(StreamType::SpO2);
  d.file_id = make_file_id(9, StreamType::SpO2);
  d.seq = 1;
  d.total_chunks = 3;
  d.timestamp_us = 0x0102030405060708ULL;
  d.chunk = {1, 2, 3};
  Bytes wire = encode_datagram(d);
  ASSERT_EQ(wire.size(), kDatagramHeaderLen + 3);
  EXPECT_EQ(wire[0], 1);
  EXPECT_EQ(wire[1], 2);
  EXPECT_EQ(wire[2], 74);  // 9 * 8 + 2, little-endian
  EXPECT_EQ(wire[14], 0x08);
  EXPECT_EQ(wire[22], 3);
  auto back = decode_datagram(wire);
  EXPECT_EQ(back.file_id, d.file_id);
  EXPECT_EQ(back.seq, 1u);
  EXPECT_EQ(back.total_chunks, 3u);
  EXPECT_EQ(back.timestamp_us, d.timestamp_us);
  EXPECT_EQ(back.chunk, d.chunk);
  EXPECT_EQ(file_cycle(back.file_id), 9u);
  EXPECT_EQ(file_stream(back.file_id), StreamType::SpO2);
}

TEST(Datagram, RejectsMalformed) {
  Datagram d;
  d.stream_type = 4;
  d.file_id = make_file_id(0, StreamType::Ecg);
  d.total_chunks = 1;
  d.chunk = Bytes(10, 7);
  Bytes good = encode_datagram(d);

  Bytes v = good;
  v[0] = 2;
  EXPECT_THROW(decode_datagram(v), FormatError);
  Bytes trunc(good.begin(), good.end() - 1);
  EXPECT_THROW(decode_datagram(trunc), FormatError);
  Bytes extra = good;
  extra.push_back(0);
  EXPECT_THROW(decode_datagram(extra), FormatError);

  auto bad = d;
  bad.seq = 1;
  EXPECT_THROW(decode_datagram(encode_datagram(bad)), FormatError);
  bad = d;
  bad.stream_type = 2;
  EXPECT_THROW(decode_datagram(encode_datagram(bad)), FormatError);
  bad = d;
  bad.chunk = Bytes(kMaxChunk + 1);
  EXPECT_THROW(encode_datagram(bad), InvalidArgument);
}

TEST(Datagram, EcgFileNeedsSeveralChunks) {
  PairingSuite s(SecurityLevel::S80);
  DeterministicRng rng(5);
  auto [pp, mk] = scheme::cp_setup(s, rng);
  Bytes payload(1500, 0x5a);
  Bytes sealed = container::seal_cp(s, pp, kPolicy, payload, rng);
  auto chunks = chunk_container(StreamType::Ecg, make_file_id(3, StreamType::Ecg), 77, sealed);
  EXPECT_GE(chunks.size(), 2u);
  EXPECT_EQ(chunks.size(), (sealed.size() + kMaxChunk - 1) / kMaxChunk);
  Bytes joined;
  for (const auto& c : chunks) {
    EXPECT_LE(c.chunk.size(), kMaxChunk);
    EXPECT_EQ(c.total_chunks, chunks.size());
    joined.insert(joined.end(), c.chunk.begin(), c.chunk.end());
  }
  EXPECT_EQ(joined, sealed);
}

TEST(Datagram, SidecarRoundTrip) {
  Sidecar sc{sha256(Bytes{1, 2, 3}), 1234, 56};
  auto d = decode_datagram(encode_datagram(make_sidecar(17, 5, sc)));
  auto back = read_sidecar(d);
  EXPECT_EQ(back.payload_hash, sc.payload_hash);
  EXPECT_EQ(back.seal_us, 1234u);
  EXPECT_EQ(back.send_us, 56u);
}

TEST(Report, CsvAndSummary) {
  std::vector<LatencyRow> rows{{0, StreamType::Ecg, 3, 1, 40, "ok"},
                               {0, StreamType::SpO2, 2, 0.5, 20, "ok"},
                               {1, StreamType::Ecg, 3, 1, -1, "dropped"}};
  std::ostringstream os;
  write_latency_csv(os, rows);
  std::string csv = os.str();
  EXPECT_EQ(csv.rfind("cycle,stream_type,seal_ms,send_ms,end_to_end_ms,status\n", 0), 0u);
  EXPECT_NE(csv.find("0,ecg,3.000,1.000,40.000,ok"), std::string::npos);
  EXPECT_NE(csv.find("1,ecg,3.000,1.000,,dropped"), std::string::npos);
  auto s = summarize_latency(rows);
  EXPECT_EQ(s.delivered, 2u);
  EXPECT_DOUBLE_EQ(s.mean_ms, 30);
  EXPECT_DOUBLE_EQ(s.p95_ms, 40);
  EXPECT_DOUBLE_EQ(s.max_ms, 40);
}

TEST(Collector, CountsMalformedAndTimesOutPartials) {
  PairingSuite s(SecurityLevel::S80);
  DeterministicRng rng(8);
  auto [pp, mk] = scheme::cp_setup(s, rng);
  auto key = scheme::cp_keygen(s, pp, mk, kAllAttrs, rng);
  WallClock clock;
  CollectorConfig cc;
  cc.reassembly_timeout_ms = 100;
  Collector collector(cc, pp, key, clock);
  std::atomic<bool> stop{false};
  std::thread t([&] { collector.run(stop); });

  send_raw(collector.port(), Bytes{1, 2, 3});
  Bytes sealed = container::seal_cp(s, pp, kPolicy, Bytes(2000, 1), rng);
  auto chunks = chunk_container(StreamType::Ecg, make_file_id(0, StreamType::Ecg), clock.now_us(), sealed);
  ASSERT_GE(chunks.size(), 2u);
  send_raw(collector.port(), encode_datagram(chunks[0]));
  std::this_thread::sleep_for(std::chrono::milliseconds(400));
  stop = true;
  t.join();
  EXPECT_EQ(collector.stats().malformed, 1u);
  EXPECT_EQ(collector.stats().dropped, 1u);
  EXPECT_EQ(collector.stats().files.at(make_file_id(0, StreamType::Ecg)).status, FileStatus::Dropped);
}

TEST(Pipeline, LoopbackDeliversIdenticalFiles) {
  auto cfg = pipeline_config("ok", 3);
  WallClock clock;
  auto r = run_pipeline(cfg, clock);
  std::uint32_t generated = 0;
  for (auto n : r.generated.files) generated += n;
  EXPECT_EQ(r.cycles, 3u);
  EXPECT_EQ(r.sent.files_sent, generated);
  EXPECT_EQ(r.collected.files_ok, generated);
  EXPECT_EQ(r.identical_files, generated);
  EXPECT_EQ(r.ecg_bytes_delivered, 4500u);
  for (const auto& [id, f] : r.collected.files) EXPECT_TRUE(f.verified) << id;
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.status, "ok");
    EXPECT_GE(row.end_to_end_ms, row.seal_ms + row.send_ms);
  }
  EXPECT_EQ(r.cycles_within_budget, 3u);
  fs::remove_all(cfg.work_dir);
}

TEST(Pipeline, WrongKeyDecryptsNothing) {
  auto cfg = pipeline_config("wrongkey", 2);
  cfg.key_attrs = {"a0", "a1", "a2", "a3"};
  WallClock clock;
  auto r = run_pipeline(cfg, clock);
  EXPECT_GT(r.sent.files_sent, 0u);
  EXPECT_EQ(r.collected.files_ok, 0u);
  EXPECT_EQ(r.collected.policy_failures, r.sent.files_sent);
  EXPECT_EQ(r.identical_files, 0u);
  fs::remove_all(cfg.work_dir);
}

TEST(Pipeline, DroppedDatagramsOnlyAffectTheirFiles) {
  auto cfg = pipeline_config("drops", 3);
  cfg.drop_every_n = 5;
  cfg.reassembly_timeout_ms = 300;
  WallClock clock;
  auto r = run_pipeline(cfg, clock);
  EXPECT_GT(r.sent.datagrams_dropped, 0u);
  std::uint32_t hit = 0;
  for (const auto& rec : r.sent.records) {
    ASSERT_TRUE(rec.ok);
    auto it = r.collected.files.find(rec.file_id);
    if (rec.had_drop) {
      ++hit;
      if (it != r.collected.files.end()) EXPECT_EQ(it->second.status, FileStatus::Dropped);
    } else {
      ASSERT_NE(it, r.collected.files.end());
      EXPECT_EQ(it->second.status, FileStatus::Ok);
    }
  }
  EXPECT_GT(hit, 0u);
  EXPECT_EQ(r.collected.files_ok + hit, r.sent.files_sent);
  fs::remove_all(cfg.work_dir);
}

TEST(Sender, UnreachableServerFailsCyclesWithoutCrashing) {
  auto dir = fresh_dir("unreachable");
  SimulatedClock gen_clock;
  generate_streams({dir, 3, 1, 0}, gen_clock);
  PairingSuite s(SecurityLevel::S80);
  DeterministicRng rng(3);
  auto [pp, mk] = scheme::cp_setup(s, rng);

  // Bind then close to get a port nobody listens on.
  int fd = ::socket(AF_INET, SOCK_DGRAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  ::close(fd);

  SenderConfig sc;
  sc.dir = dir;
  sc.server = "127.0.0.1:" + std::to_string(ntohs(addr.sin_port));
  sc.policy = kPolicy;
  sc.seed = 4;
  WallClock clock;
  auto stats = run_sender(sc, pp, clock);
  EXPECT_EQ(stats.files_sent + stats.files_failed, stats.records.size());
  EXPECT_GT(stats.files_failed, 0u);

  generate_streams({dir, 1, 1, 0}, gen_clock);
  sc.server = "not-an-address";
  auto bad = run_sender(sc, pp, clock);
  EXPECT_EQ(bad.files_sent, 0u);
  EXPECT_EQ(bad.files_failed, bad.records.size());
  EXPECT_GT(bad.records.size(), 0u);
  fs::remove_all(dir);
}
