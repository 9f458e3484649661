#include "abe/health/pipeline.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <ostream>
#include <thread>

#include "abe/container/container.hpp"
#include "abe/errors.hpp"
#include "abe/io.hpp"
#include "abe/rng.hpp"

namespace abe::health {

namespace fs = std::filesystem;
using Steady = std::chrono::steady_clock;

namespace {

class Socket {
 public:
  Socket() : fd_(::socket(AF_INET, SOCK_DGRAM, 0)) {
    if (fd_ < 0) throw IoError(std::string("socket: ") + std::strerror(errno));
  }
  ~Socket() { ::close(fd_); }
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  int fd() const { return fd_; }

 private:
  int fd_;
};

sockaddr_in resolve(const std::string& hostport) {
  auto colon = hostport.rfind(':');
  if (colon == std::string::npos) throw InvalidArgument("address must be host:port, got '" + hostport + "'");
  std::string host = hostport.substr(0, colon), port = hostport.substr(colon + 1);
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_DGRAM;
  addrinfo* res = nullptr;
  int rc = ::getaddrinfo(host.empty() ? nullptr : host.c_str(), port.c_str(), &hints, &res);
  if (rc != 0 || !res) throw InvalidArgument("cannot resolve '" + hostport + "': " + ::gai_strerror(rc));
  sockaddr_in out;
  std::memcpy(&out, res->ai_addr, sizeof out);
  ::freeaddrinfo(res);
  return out;
}

void log_to(const Logger& log, const std::string& msg) {
  if (log) log(msg);
}

double ms_between(Steady::time_point a, Steady::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

struct Pending {
  fs::path path;
  StreamType type;
  std::uint32_t cycle;
};

std::vector<Pending> scan(const fs::path& dir) {
  std::vector<Pending> out;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(dir, ec)) {
    if (!e.is_regular_file()) continue;
    if (auto parsed = parse_file_name(e.path().filename().string()))
      out.push_back({e.path(), parsed->first, parsed->second});
  }
  std::sort(out.begin(), out.end(), [](const Pending& a, const Pending& b) {
    return std::tie(a.cycle, a.type) < std::tie(b.cycle, b.type);
  });
  return out;
}

}  // namespace

SenderStats run_sender(const SenderConfig& config, const scheme::CpPublicParams& pp, Clock& clock,
                       const std::atomic<bool>* stop) {
  PairingSuite suite(config.level);
  std::unique_ptr<Rng> rng;
  if (config.seed)
    rng = std::make_unique<DeterministicRng>(*config.seed);
  else
    rng = std::make_unique<SystemRng>();
  if (config.sent_dir) fs::create_directories(*config.sent_dir);

  SenderStats stats;
  std::optional<Socket> sock;
  std::string setup_error;
  try {
    sockaddr_in addr = resolve(config.server);
    sock.emplace();
    if (::connect(sock->fd(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0)
      throw IoError(std::string("connect: ") + std::strerror(errno));
  } catch (const Error& e) {
    setup_error = e.what();
    sock.reset();
    log_to(config.log, std::string("sender: ") + setup_error);
  }

  std::uint64_t data_count = 0;
  auto send_one = [&](const Datagram& d) -> std::string {
    if (!sock) return setup_error;
    Bytes wire = encode_datagram(d);
    if (::send(sock->fd(), wire.data(), wire.size(), 0) < 0) return std::string("send: ") + std::strerror(errno);
    stats.datagrams_sent++;
    return {};
  };

  for (;;) {
    if (stop && stop->load()) break;
    bool done = fs::exists(config.dir / kDoneMarker);
    auto pending = scan(config.dir);
    stats.max_backlog = std::max(stats.max_backlog, pending.size());
    if (pending.empty()) {
      if (done) break;
      clock.sleep_for_ms(config.poll_ms);
      continue;
    }
    for (const auto& p : pending) {
      if (stop && stop->load()) break;
      SendRecord rec{p.cycle, p.type, make_file_id(p.cycle, p.type), 0, 0, 0, 0, false, false, {}};
      try {
        Bytes payload = read_file(p.path);
        rec.payload_bytes = payload.size();
        auto t0 = Steady::now();
        Bytes sealed = container::seal_cp(suite, pp, config.policy, payload, *rng);
        auto t1 = Steady::now();
        rec.seal_ms = ms_between(t0, t1);
        auto ts = static_cast<std::uint64_t>(cycle_close_us(config.epoch_us, p.cycle));
        auto chunks = chunk_container(p.type, rec.file_id, ts, sealed);
        rec.datagrams = chunks.size();
        for (const auto& d : chunks) {
          ++data_count;
          if (config.drop_every_n && data_count % config.drop_every_n == 0) {
            stats.datagrams_dropped++;
            rec.had_drop = true;
            continue;
          }
          if (auto err = send_one(d); !err.empty() && rec.error.empty()) rec.error = err;
        }
        rec.send_ms = ms_between(t1, Steady::now());
        if (config.sidecar && rec.error.empty()) {
          Sidecar sc{sha256(payload), static_cast<std::uint32_t>(rec.seal_ms * 1000),
                     static_cast<std::uint32_t>(rec.send_ms * 1000)};
          if (auto err = send_one(make_sidecar(rec.file_id, ts, sc)); !err.empty()) rec.error = err;
        }
        rec.ok = rec.error.empty();
      } catch (const Error& e) {
        rec.error = e.what();
      }
      if (rec.ok) {
        stats.files_sent++;
      } else {
        stats.files_failed++;
        log_to(config.log, "sender: " + p.path.filename().string() + ": " + rec.error);
      }
      std::error_code ec;
      if (config.sent_dir)
        fs::rename(p.path, *config.sent_dir / p.path.filename(), ec);
      else
        fs::remove(p.path, ec);
      stats.records.push_back(std::move(rec));
    }
  }
  return stats;
}

const char* to_string(FileStatus s) {
  switch (s) {
    case FileStatus::Ok:
      return "ok";
    case FileStatus::PolicyNotSatisfied:
      return "policy_not_satisfied";
    case FileStatus::AuthFailed:
      return "auth_failed";
    case FileStatus::Dropped:
      return "dropped";
    case FileStatus::HashMismatch:
      return "hash_mismatch";
    case FileStatus::SendFailed:
      return "send_failed";
  }
  return "?";
}

struct Collector::Impl {
  struct Partial {
    std::uint32_t total;
    std::uint64_t timestamp_us;
    std::map<std::uint32_t, Bytes> chunks;
    std::int64_t first_seen_us;
  };

  CollectorConfig config;
  scheme::CpPublicParams pp;
  scheme::CpSecretKey key;
  Clock& clock;
  PairingSuite suite;
  Socket sock;
  std::uint16_t port = 0;
  CollectorStats stats;
  std::map<std::uint32_t, Partial> partial;
  std::map<std::uint32_t, Digest> delivered_hash;
  std::map<std::uint32_t, Sidecar> early_sidecars;
  std::atomic<std::size_t> accounted{0};

  Impl(CollectorConfig c, scheme::CpPublicParams p, scheme::CpSecretKey k, Clock& clk)
      : config(std::move(c)), pp(std::move(p)), key(std::move(k)), clock(clk), suite(pp.level) {
    sockaddr_in addr = resolve(config.bind);
    if (::bind(sock.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0)
      throw IoError("bind " + config.bind + ": " + std::strerror(errno));
    socklen_t len = sizeof addr;
    ::getsockname(sock.fd(), reinterpret_cast<sockaddr*>(&addr), &len);
    port = ntohs(addr.sin_port);
    int buf = 4 << 20;
    ::setsockopt(sock.fd(), SOL_SOCKET, SO_RCVBUF, &buf, sizeof buf);
    if (config.out_dir) fs::create_directories(*config.out_dir);
  }

  void apply_sidecar(std::uint32_t id, const Sidecar& sc) {
    auto it = stats.files.find(id);
    if (it == stats.files.end()) {
      early_sidecars[id] = sc;
      return;
    }
    FileResult& r = it->second;
    r.sidecar = sc;
    if (r.status != FileStatus::Ok) return;
    if (delivered_hash[id] == sc.payload_hash) {
      r.verified = true;
    } else {
      r.status = FileStatus::HashMismatch;
      stats.files_ok--;
      stats.hash_mismatches++;
    }
  }

  void finish(std::uint32_t id, Partial& p) {
    Bytes sealed;
    for (auto& [seq, c] : p.chunks) sealed.insert(sealed.end(), c.begin(), c.end());
    FileResult r;
    r.file_id = id;
    try {
      Bytes payload = container::open_cp(suite, pp, key, sealed);
      delivered_hash[id] = sha256(payload);
      r.end_to_end_ms = static_cast<double>(clock.now_us() - static_cast<std::int64_t>(p.timestamp_us)) / 1000.0;
      stats.files_ok++;
      if (config.out_dir) write_file_atomic(*config.out_dir / file_name(file_stream(id), file_cycle(id)), payload);
      if (config.keep_payloads) r.payload = std::move(payload);
    } catch (const PolicyNotSatisfied&) {
      r.status = FileStatus::PolicyNotSatisfied;
      stats.policy_failures++;
    } catch (const Error& e) {
      r.status = FileStatus::AuthFailed;
      stats.auth_failures++;
      log_to(config.log, "collector: file " + std::to_string(id) + ": " + e.what());
    }
    stats.files[id] = std::move(r);
    accounted++;
    if (auto it = early_sidecars.find(id); it != early_sidecars.end()) {
      apply_sidecar(id, it->second);
      early_sidecars.erase(it);
    }
  }

  void on_datagram(std::span<const std::uint8_t> wire) {
    stats.datagrams++;
    Datagram d;
    try {
      d = decode_datagram(wire);
    } catch (const Error&) {
      stats.malformed++;
      return;
    }
    if (d.stream_type == kSidecarType) {
      try {
        apply_sidecar(d.file_id, read_sidecar(d));
      } catch (const Error&) {
        stats.malformed++;
      }
      return;
    }
    if (stats.files.count(d.file_id)) return;  // duplicate of a finished file
    auto [it, fresh] = partial.try_emplace(d.file_id, Partial{d.total_chunks, d.timestamp_us, {}, clock.now_us()});
    Partial& p = it->second;
    if (!fresh && (p.total != d.total_chunks || p.timestamp_us != d.timestamp_us)) {
      stats.malformed++;
      return;
    }
    p.chunks.emplace(d.seq, std::move(d.chunk));
    if (p.chunks.size() == p.total) {
      finish(it->first, p);
      partial.erase(it);
    }
  }

  void drop(std::map<std::uint32_t, Partial>::iterator it) {
    FileResult& r = stats.files[it->first];
    r.file_id = it->first;
    r.status = FileStatus::Dropped;
    stats.dropped++;
    accounted++;
    partial.erase(it);
  }

  void expire(bool all) {
    std::int64_t now = clock.now_us();
    for (auto it = partial.begin(); it != partial.end();) {
      auto next = std::next(it);
      if (all || now - it->second.first_seen_us > std::int64_t{config.reassembly_timeout_ms} * 1000) drop(it);
      it = next;
    }
  }

  // Returns false on timeout.
  bool receive_one(int timeout_ms) {
    pollfd pfd{sock.fd(), POLLIN, 0};
    if (::poll(&pfd, 1, timeout_ms) <= 0) return false;
    std::uint8_t buf[kDatagramHeaderLen + kMaxChunk + 64];
    ssize_t n = ::recv(sock.fd(), buf, sizeof buf, 0);
    if (n < 0) return false;
    on_datagram({buf, static_cast<std::size_t>(n)});
    return true;
  }

  void run(const std::atomic<bool>& stop) {
    auto last_traffic = Steady::now();
    bool seen = false;
    while (!stop.load()) {
      if (receive_one(20)) {
        last_traffic = Steady::now();
        seen = true;
      } else if (config.idle_exit_ms && seen && ms_between(last_traffic, Steady::now()) > config.idle_exit_ms) {
        break;
      }
      expire(false);
    }
    while (receive_one(0)) {
    }
    expire(true);
  }
};

Collector::Collector(CollectorConfig config, scheme::CpPublicParams pp, scheme::CpSecretKey key, Clock& clock)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(pp), std::move(key), clock)) {}
Collector::~Collector() = default;
std::uint16_t Collector::port() const { return impl_->port; }
void Collector::run(const std::atomic<bool>& stop) { impl_->run(stop); }
const CollectorStats& Collector::stats() const { return impl_->stats; }
std::size_t Collector::files_accounted() const { return impl_->accounted.load(); }

std::vector<LatencyRow> join_report(const SenderStats& sent, const CollectorStats& got) {
  std::vector<LatencyRow> rows;
  for (const auto& s : sent.records) {
    LatencyRow row{s.cycle, s.type, s.seal_ms, s.send_ms, -1, to_string(FileStatus::SendFailed)};
    if (s.ok) {
      auto it = got.files.find(s.file_id);
      if (it == got.files.end()) {
        row.status = to_string(FileStatus::Dropped);
      } else {
        row.status = to_string(it->second.status);
        if (it->second.status == FileStatus::Ok) row.end_to_end_ms = it->second.end_to_end_ms;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<LatencyRow> collector_report(const CollectorStats& got) {
  std::vector<LatencyRow> rows;
  for (const auto& [id, f] : got.files) {
    double seal = f.sidecar ? f.sidecar->seal_us / 1000.0 : 0;
    double send = f.sidecar ? f.sidecar->send_us / 1000.0 : 0;
    rows.push_back({file_cycle(id), file_stream(id), seal, send,
                    f.status == FileStatus::Ok ? f.end_to_end_ms : -1, to_string(f.status)});
  }
  return rows;
}

void write_latency_csv(std::ostream& os, const std::vector<LatencyRow>& rows) {
  os << "cycle,stream_type,seal_ms,send_ms,end_to_end_ms,status\n";
  char buf[96];
  for (const auto& r : rows) {
    if (r.end_to_end_ms >= 0)
      std::snprintf(buf, sizeof buf, "%.3f,%.3f,%.3f", r.seal_ms, r.send_ms, r.end_to_end_ms);
    else
      std::snprintf(buf, sizeof buf, "%.3f,%.3f,", r.seal_ms, r.send_ms);
    os << r.cycle << ',' << sensor(r.type).name << ',' << buf << ',' << r.status << '\n';
  }
}

LatencySummary summarize_latency(const std::vector<LatencyRow>& rows) {
  std::vector<double> xs;
  for (const auto& r : rows)
    if (r.end_to_end_ms >= 0) xs.push_back(r.end_to_end_ms);
  LatencySummary s;
  s.delivered = xs.size();
  if (xs.empty()) return s;
  std::sort(xs.begin(), xs.end());
  double sum = 0;
  for (double x : xs) sum += x;
  s.mean_ms = sum / static_cast<double>(xs.size());
  std::size_t rank = (95 * xs.size() + 99) / 100;  // nearest-rank
  s.p95_ms = xs[std::max<std::size_t>(rank, 1) - 1];
  s.max_ms = xs.back();
  return s;
}

PipelineResult run_pipeline(const PipelineConfig& config, Clock& clock) {
  fs::path gen_dir = config.work_dir / "outbox";
  fs::path sent_dir = config.work_dir / "sent";
  fs::remove_all(gen_dir);
  fs::remove_all(sent_dir);
  fs::create_directories(gen_dir);

  PairingSuite suite(config.level);
  DeterministicRng rng(config.seed);
  auto [pp, mk] = scheme::cp_setup(suite, rng);
  auto key = scheme::cp_keygen(suite, pp, mk, config.key_attrs, rng);

  CollectorConfig cc;
  cc.reassembly_timeout_ms = config.reassembly_timeout_ms;
  cc.keep_payloads = true;
  cc.log = config.log;
  Collector collector(cc, pp, key, clock);

  PipelineResult result;
  std::atomic<bool> stop_collector{false};
  std::thread collect_thread([&] { collector.run(stop_collector); });

  // Small lead so the first cycle is not already late when threads start.
  std::int64_t epoch = clock.now_us() + 50'000;
  GeneratorConfig gc{gen_dir, config.duration_s, config.seed + 1, epoch};
  std::thread gen_thread([&] { result.generated = generate_streams(gc, clock); });

  SenderConfig sc;
  sc.dir = gen_dir;
  sc.server = "127.0.0.1:" + std::to_string(collector.port());
  sc.policy = config.policy;
  sc.level = config.level;
  sc.seed = config.seed + 2;
  sc.epoch_us = epoch;
  sc.drop_every_n = config.drop_every_n;
  sc.sent_dir = sent_dir;
  sc.log = config.log;
  std::thread send_thread([&] {
    try {
      result.sent = run_sender(sc, pp, clock);
    } catch (const std::exception& e) {
      log_to(config.log, std::string("sender stopped: ") + e.what());
    }
  });

  gen_thread.join();
  send_thread.join();
  // Let in-flight datagrams land before closing the collector.
  std::int64_t deadline = clock.now_us() + 500'000;
  while (clock.now_us() < deadline) {
    if (collector.files_accounted() >= result.sent.files_sent) break;
    clock.sleep_for_ms(10);
  }
  stop_collector = true;
  collect_thread.join();

  result.collected = collector.stats();
  result.rows = join_report(result.sent, result.collected);

  std::map<std::uint32_t, double> cycle_max;
  std::set<std::uint32_t> cycle_failed;
  for (const auto& r : result.rows) {
    if (r.end_to_end_ms < 0) {
      cycle_failed.insert(r.cycle);
      continue;
    }
    cycle_max[r.cycle] = std::max(cycle_max[r.cycle], r.end_to_end_ms);
  }
  result.cycles = result.generated.cycles;
  for (std::uint32_t c = 0; c < result.cycles; ++c) {
    auto it = cycle_max.find(c);
    if (it == cycle_max.end() || cycle_failed.count(c)) continue;
    result.max_cycle_ms = std::max(result.max_cycle_ms, it->second);
    if (it->second <= config.budget_ms) result.cycles_within_budget++;
  }

  for (const auto& [id, f] : result.collected.files) {
    if (f.status != FileStatus::Ok) continue;
    if (file_stream(id) == StreamType::Ecg) result.ecg_bytes_delivered += f.payload.size();
    std::error_code ec;
    fs::path original = sent_dir / file_name(file_stream(id), file_cycle(id));
    if (fs::exists(original, ec) && read_file(original) == f.payload) result.identical_files++;
  }
  return result;
}

}  // namespace abe::health
