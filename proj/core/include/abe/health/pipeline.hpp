#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "abe/health/telemetry.hpp"
#include "abe/scheme/cp_abe.hpp"

namespace abe::health {

using Logger = std::function<void(const std::string&)>;

struct SenderConfig {
  std::filesystem::path dir;
  std::string server = "127.0.0.1:9000";
  std::string policy;
  SecurityLevel level = SecurityLevel::S80;
  std::optional<std::uint64_t> seed;  // system randomness when unset
  std::int64_t epoch_us = 0;
  std::uint32_t drop_every_n = 0;  // fault injection on data datagrams
  bool sidecar = true;
  std::optional<std::filesystem::path> sent_dir;  // keep sealed inputs here instead of deleting
  std::uint32_t poll_ms = 5;
  Logger log;
};

struct SendRecord {
  std::uint32_t cycle;
  StreamType type;
  std::uint32_t file_id;
  std::size_t payload_bytes;
  std::size_t datagrams;
  double seal_ms;
  double send_ms;
  bool ok;
  bool had_drop;
  std::string error;
};

struct SenderStats {
  std::vector<SendRecord> records;
  std::uint32_t files_sent = 0;
  std::uint32_t files_failed = 0;
  std::uint64_t datagrams_sent = 0;
  std::uint64_t datagrams_dropped = 0;
  std::size_t max_backlog = 0;
};

// Seals and ships every file that appears in config.dir until the generator's
// done marker is seen and the directory is drained, or *stop is set. Socket
// errors fail the affected file only.
SenderStats run_sender(const SenderConfig& config, const scheme::CpPublicParams& pp, Clock& clock,
                       const std::atomic<bool>* stop = nullptr);

enum class FileStatus : std::uint8_t { Ok, PolicyNotSatisfied, AuthFailed, Dropped, HashMismatch, SendFailed };
const char* to_string(FileStatus s);

struct CollectorConfig {
  std::string bind = "127.0.0.1:0";
  std::uint32_t reassembly_timeout_ms = 2000;
  std::uint32_t idle_exit_ms = 0;  // 0 waits for the stop flag only
  std::optional<std::filesystem::path> out_dir;
  bool keep_payloads = false;
  Logger log;
};

struct FileResult {
  std::uint32_t file_id = 0;
  FileStatus status = FileStatus::Ok;
  double end_to_end_ms = -1;
  std::optional<Sidecar> sidecar;
  bool verified = false;
  Bytes payload;  // only with keep_payloads
};

struct CollectorStats {
  std::uint64_t datagrams = 0;
  std::uint64_t malformed = 0;
  std::uint32_t files_ok = 0;
  std::uint32_t policy_failures = 0;
  std::uint32_t auth_failures = 0;
  std::uint32_t dropped = 0;
  std::uint32_t hash_mismatches = 0;
  std::map<std::uint32_t, FileResult> files;
};

class Collector {
 public:
  // Binds immediately; throws IoError.
  Collector(CollectorConfig config, scheme::CpPublicParams pp, scheme::CpSecretKey key, Clock& clock);
  ~Collector();
  Collector(const Collector&) = delete;
  Collector& operator=(const Collector&) = delete;

  std::uint16_t port() const;
  // Receives until *stop (or idle exit), then drops whatever is incomplete.
  void run(const std::atomic<bool>& stop);
  // Not synchronized; read after run() returns.
  const CollectorStats& stats() const;
  // Finished or dropped files so far; safe from any thread.
  std::size_t files_accounted() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct LatencyRow {
  std::uint32_t cycle;
  StreamType type;
  double seal_ms;
  double send_ms;
  double end_to_end_ms;  // negative when not delivered
  std::string status;
};

std::vector<LatencyRow> join_report(const SenderStats& sent, const CollectorStats& got);
std::vector<LatencyRow> collector_report(const CollectorStats& got);
void write_latency_csv(std::ostream& os, const std::vector<LatencyRow>& rows);

struct LatencySummary {
  std::size_t delivered = 0;
  double mean_ms = 0;
  double p95_ms = 0;
  double max_ms = 0;
};
LatencySummary summarize_latency(const std::vector<LatencyRow>& rows);

struct PipelineConfig {
  std::filesystem::path work_dir;
  std::uint32_t duration_s = 10;
  std::string policy;
  std::set<std::string> key_attrs;
  SecurityLevel level = SecurityLevel::S80;
  std::uint64_t seed = 1;
  std::uint32_t drop_every_n = 0;
  std::uint32_t budget_ms = 1000;
  std::uint32_t reassembly_timeout_ms = 2000;
  Logger log;
};

struct PipelineResult {
  GeneratorStats generated;
  SenderStats sent;
  CollectorStats collected;
  std::vector<LatencyRow> rows;
  std::uint32_t cycles = 0;
  std::uint32_t cycles_within_budget = 0;
  double max_cycle_ms = 0;
  std::uint64_t ecg_bytes_delivered = 0;
  std::uint32_t identical_files = 0;  // delivered payloads equal to the generated file
};

// Generator, sender and collector on three threads over loopback, each with
// its own suite. The collector's key is issued for key_attrs.
PipelineResult run_pipeline(const PipelineConfig& config, Clock& clock);

}  // namespace abe::health
