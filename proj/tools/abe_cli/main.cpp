#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "abe/bench/harness.hpp"
#include "abe/container/container.hpp"
#include "abe/errors.hpp"
#include "abe/health/pipeline.hpp"
#include "abe/io.hpp"
#include "abe/policy/ast.hpp"
#include "abe/rng.hpp"
#include "abe/scheme/cp_abe.hpp"
#include "abe/scheme/kp_abe.hpp"
#include "abe/tree/access_tree.hpp"

namespace fs = std::filesystem;
using namespace abe;
using scheme::SchemeId;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr const char* kParams = "params.pub";
constexpr const char* kMaster = "master.key";
constexpr const char* kUniversePub = "universe.pub";
constexpr const char* kUniverseKey = "universe.key";

fs::path default_key_dir() {
  if (const char* h = std::getenv("ABE_HOME"); h && *h) return h;
  if (const char* home = std::getenv("HOME"); home && *home) return fs::path(home) / ".abe";
  return ".abe";
}

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string keys;

  fs::path key_dir() const { return keys.empty() ? default_key_dir() : fs::path(keys); }
  std::unique_ptr<Rng> rng() const {
    if (seed) return std::make_unique<DeterministicRng>(*seed);
    return std::make_unique<SystemRng>();
  }
};

SchemeId parse_scheme(const std::string& s) {
  if (s == "cp") return SchemeId::CP;
  if (s == "kp") return SchemeId::KP;
  throw UsageError("scheme must be cp or kp");
}

void write_out(const fs::path& path, std::span<const std::uint8_t> data) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_file_atomic(path, data);
}

// Public parameters plus the scheme/level they were made for.
struct ParamsFile {
  scheme::ObjectHeader header;
  Bytes bytes;
};

ParamsFile load_params(const fs::path& dir, std::optional<SchemeId> expect = std::nullopt) {
  Bytes b = read_file(dir / kParams);
  auto h = scheme::peek_header(b);
  if (h.kind != scheme::ObjectKind::PublicParams) throw FormatError((dir / kParams).string() + " is not a parameter file");
  if (expect && h.scheme != *expect)
    throw UsageError(std::string("key directory holds ") + scheme::to_string(h.scheme) + " parameters");
  return {h, std::move(b)};
}

// Numeric expansions the universe has never seen cannot occur in any key, so
// they are left out; an unknown plain attribute is an error.
std::set<std::string> kp_ciphertext_attrs(const tree::AttributeBag& bag, const scheme::KpUniverse& universe) {
  std::set<std::string> derived;
  for (const auto& [name, n] : bag.numeric()) {
    auto e = tree::expand_numeric(name, n.value);
    derived.insert(e.begin(), e.end());
  }
  std::set<std::string> out;
  for (const auto& a : bag.attrs()) {
    if (universe.contains(a))
      out.insert(a);
    else if (!derived.count(a))
      throw UnknownAttribute("attribute '" + a + "' is not registered; issue a key that mentions it first");
  }
  return out;
}

// --- setup ---------------------------------------------------------------

struct SetupArgs {
  std::string scheme;
  int level = 80;
  std::string out;
  std::string attrs;
};

int cmd_setup(const Globals& g, const SetupArgs& a) {
  SchemeId id = parse_scheme(a.scheme);
  if (id == SchemeId::CP && !a.attrs.empty()) throw UsageError("--attrs at setup only applies to kp");
  tree::AttributeBag pre;
  if (!a.attrs.empty()) pre = tree::AttributeBag::parse(a.attrs);
  fs::path dir = a.out.empty() ? g.key_dir() : fs::path(a.out);
  PairingSuite s(level_from_bits(a.level));
  auto rng = g.rng();
  fs::create_directories(dir);
  if (id == SchemeId::CP) {
    auto [pp, mk] = scheme::cp_setup(s, *rng);
    write_out(dir / kMaster, mk.to_bytes(s));
    write_out(dir / kParams, pp.to_bytes(s));
  } else {
    auto [pp, mk] = scheme::kp_setup(s, *rng);
    scheme::KpUniverse universe(s.level());
    for (const auto& attr : pre.attrs()) universe.register_attribute(s, attr, *rng);
    write_out(dir / kMaster, mk.to_bytes(s));
    write_out(dir / kUniverseKey, universe.to_bytes(s));
    write_out(dir / kUniversePub, universe.public_view().to_bytes(s));
    write_out(dir / kParams, pp.to_bytes(s));
  }
  std::cout << "wrote " << a.scheme << " parameters (" << a.level << " bits) to " << dir.string() << "\n";
  return 0;
}

// --- keygen --------------------------------------------------------------

struct KeygenArgs {
  std::string scheme;
  std::string attrs;
  std::string policy;
  std::string out;
};

int cmd_keygen(const Globals& g, const KeygenArgs& a) {
  fs::path dir = g.key_dir();
  std::optional<SchemeId> want;
  if (!a.scheme.empty()) want = parse_scheme(a.scheme);
  auto params = load_params(dir, want);
  SchemeId id = params.header.scheme;
  PairingSuite s(params.header.level);
  auto rng = g.rng();

  if (id == SchemeId::CP) {
    if (a.attrs.empty()) throw UsageError("cp keys need --attrs");
    if (!a.policy.empty()) throw UsageError("cp keys take --attrs, not --policy");
    auto bag = tree::AttributeBag::parse(a.attrs);
    auto pp = scheme::CpPublicParams::from_bytes(s, params.bytes);
    auto mk = scheme::CpMasterKey::from_bytes(s, read_file(dir / kMaster));
    auto key = scheme::cp_keygen(s, pp, mk, bag, *rng);
    write_out(a.out, key.to_bytes(s));
    std::cout << "wrote cp key with " << bag.size() << " attributes to " << a.out << "\n";
    return 0;
  }

  if (a.policy.empty()) throw UsageError("kp keys need --policy");
  if (!a.attrs.empty()) throw UsageError("kp keys take --policy, not --attrs");
  auto tree = tree::compile(a.policy);
  auto pp = scheme::KpPublicParams::from_bytes(s, params.bytes);
  auto mk = scheme::KpMasterKey::from_bytes(s, read_file(dir / kMaster));
  auto universe = scheme::KpUniverse::from_bytes(s, read_file(dir / kUniverseKey));
  std::size_t before = universe.size();
  for (auto leaf : tree.leaves()) universe.register_attribute(s, tree.node(leaf).attr, *rng);
  auto key = scheme::kp_keygen(s, pp, mk, universe, tree, *rng);
  if (universe.size() != before) {
    write_out(dir / kUniverseKey, universe.to_bytes(s));
    write_out(dir / kUniversePub, universe.public_view().to_bytes(s));
  }
  write_out(a.out, key.to_bytes(s));
  std::cout << "wrote kp key with " << tree.leaf_count() << " leaves to " << a.out;
  if (universe.size() != before) std::cout << " (registered " << universe.size() - before << " attributes)";
  std::cout << "\n";
  return 0;
}

// --- encrypt / decrypt ---------------------------------------------------

struct EncryptArgs {
  std::string scheme;
  std::string policy;
  std::string attrs;
  std::string in;
  std::string out;
};

int cmd_encrypt(const Globals& g, const EncryptArgs& a) {
  std::optional<SchemeId> want;
  if (!a.scheme.empty()) want = parse_scheme(a.scheme);
  fs::path dir = g.key_dir();
  auto params = load_params(dir, want);
  SchemeId id = params.header.scheme;
  if (id == SchemeId::CP) {
    if (a.policy.empty() || !a.attrs.empty()) throw UsageError("cp encryption takes --policy");
    tree::compile(a.policy);
  } else {
    if (a.attrs.empty() || !a.policy.empty()) throw UsageError("kp encryption takes --attrs");
  }
  Bytes payload = read_file(a.in);
  PairingSuite s(params.header.level);
  auto rng = g.rng();
  Bytes sealed;
  if (id == SchemeId::CP) {
    auto pp = scheme::CpPublicParams::from_bytes(s, params.bytes);
    sealed = container::seal_cp(s, pp, a.policy, payload, *rng);
  } else {
    auto bag = tree::AttributeBag::parse(a.attrs);
    auto pp = scheme::KpPublicParams::from_bytes(s, params.bytes);
    auto universe = scheme::KpUniverse::from_bytes(s, read_file(dir / kUniversePub));
    sealed = container::seal_kp(s, pp, universe, kp_ciphertext_attrs(bag, universe), payload, *rng);
  }
  write_out(a.out, sealed);
  std::cout << "wrote " << sealed.size() << " bytes to " << a.out << "\n";
  return 0;
}

struct DecryptArgs {
  std::string key;
  std::string in;
  std::string out;
};

int cmd_decrypt(const Globals& g, const DecryptArgs& a) {
  Bytes sealed = read_file(a.in);
  auto info = container::inspect(sealed);
  auto params = load_params(g.key_dir(), info.scheme);
  if (params.header.level != info.level) throw FormatError("container and parameters use different security levels");
  PairingSuite s(info.level);
  Bytes key = read_file(a.key);
  Bytes plain;
  if (info.scheme == SchemeId::CP) {
    auto pp = scheme::CpPublicParams::from_bytes(s, params.bytes);
    plain = container::open_cp(s, pp, scheme::CpSecretKey::from_bytes(s, key), sealed);
  } else {
    auto pp = scheme::KpPublicParams::from_bytes(s, params.bytes);
    plain = container::open_kp(s, pp, scheme::KpKey::from_bytes(s, key), sealed);
  }
  write_out(a.out, plain);
  std::cout << "wrote " << plain.size() << " bytes to " << a.out << "\n";
  return 0;
}

// --- policy --------------------------------------------------------------

int cmd_policy(const std::string& text, bool explain) {
  auto ast = policy::parse_policy(text);
  if (!explain) {
    std::cout << policy::print_policy(ast) << "\n";
    return 0;
  }
  auto tree = tree::compile(ast);
  std::size_t gates = tree.gate_count(), ands = tree.and_gate_count(), ors = tree.or_gate_count();
  std::cout << "policy: " << policy::print_policy(ast) << "\n"
            << "leaves: " << tree.leaf_count() << "\n"
            << "gates: " << gates << " (and " << ands << ", or " << ors << ", threshold " << gates - ands - ors << ")\n"
            << "depth: " << tree.depth() << "\n"
            << tree.outline();
  return 0;
}

// --- bench ---------------------------------------------------------------

template <typename T, typename F>
std::vector<T> split_list(const std::string& text, F convert) {
  std::vector<T> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    if (item.empty()) throw UsageError("empty list item in '" + text + "'");
    out.push_back(convert(item));
  }
  return out;
}

std::uint32_t parse_count(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos || s.size() > 9)
    throw UsageError("not a count: '" + s + "'");
  return static_cast<std::uint32_t>(std::stoul(s));
}

// "1..30", "1,2,5" or a mix such as "1..5,10".
std::vector<std::uint32_t> parse_counts(const std::string& text) {
  std::vector<std::uint32_t> out;
  for (const auto& part : split_list<std::string>(text, [](const std::string& x) { return x; })) {
    auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_count(part));
      continue;
    }
    auto lo = parse_count(part.substr(0, dots)), hi = parse_count(part.substr(dots + 2));
    if (lo > hi) throw UsageError("empty range '" + part + "'");
    for (auto n = lo; n <= hi; ++n) out.push_back(n);
  }
  return out;
}

struct BenchArgs {
  std::string schemes = "cp";
  std::string levels = "80,112,128";
  std::string attrs = "1..30";
  std::string ops = "encrypt,decrypt";
  std::string shape = "and";
  std::string device = "edison";
  std::uint32_t trials = 5;
  std::uint32_t warmup = 1;
  std::string csv = "bench.csv";
  std::string summary;
  std::string svg_dir;
  bool profile = false;
  bool quiet = false;
};

int cmd_bench(const Globals& g, const BenchArgs& a) {
  bench::BenchConfig c;
  try {
    c.schemes = split_list<SchemeId>(a.schemes, parse_scheme);
    c.levels = split_list<SecurityLevel>(a.levels, [](const std::string& x) { return level_from_bits(std::stoi(x)); });
    c.attr_counts = parse_counts(a.attrs);
    c.ops = split_list<bench::Op>(a.ops, [](const std::string& x) { return bench::parse_op(x); });
    c.shape = bench::parse_shape(a.shape);
    c.device = a.device;
    c.trials = a.trials;
    c.warmup = a.warmup;
    if (g.seed) c.seed = *g.seed;
    bench::validate(c);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  } catch (const std::logic_error& e) {
    throw UsageError(std::string("bad number: ") + e.what());
  }

  const std::size_t per_round = c.schemes.size() * c.levels.size() * c.attr_counts.size() * c.ops.size();
  std::size_t done = 0;
  auto records = bench::run_bench(c, [&](const bench::BenchRecord& r) {
    if (!a.quiet && ++done % per_round == 0) std::cerr << "trial " << r.trial << "/" << c.trials << " done\n";
  });
  auto cells = bench::summarize(records);

  std::ostringstream csv, sum;
  bench::write_csv(csv, records);
  bench::write_summary_csv(sum, cells);
  fs::path csv_path(a.csv);
  fs::path sum_path = a.summary.empty() ? fs::path(csv_path).replace_extension(".summary.csv") : fs::path(a.summary);
  for (const auto& p : {csv_path, sum_path})
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
  write_file_atomic(csv_path, csv.str());
  write_file_atomic(sum_path, sum.str());
  std::cout << "wrote " << records.size() << " records to " << csv_path.string() << " and summary to "
            << sum_path.string() << "\n";

  if (!a.svg_dir.empty()) {
    fs::create_directories(a.svg_dir);
    for (auto sid : c.schemes)
      for (auto op : c.ops) {
        fs::path p = fs::path(a.svg_dir) / (std::string(scheme::to_string(sid)) + "_" + bench::to_string(op) + ".svg");
        write_file_atomic(p, bench::svg_plot(cells, sid, op));
        std::cout << "wrote " << p.string() << "\n";
      }
  }

  std::printf("%-3s %-8s %5s %6s %12s %10s %12s\n", "", "op", "level", "attrs", "mean_ms", "ci95_ms", "median_ms");
  for (const auto& cell : cells)
    std::printf("%-3s %-8s %5d %6u %12.3f %10.3f %12.3f\n", scheme::to_string(cell.scheme), bench::to_string(cell.op),
                level_bits(cell.level), cell.n_attrs, cell.mean_ms, cell.ci95_ms, cell.median_ms);

  if (a.profile) {
    std::uint32_t n = *std::max_element(c.attr_counts.begin(), c.attr_counts.end());
    std::printf("\nprofile at %u attributes (fraction of wall time)\n", n);
    std::printf("%-3s %-8s %5s %8s %8s %8s %8s\n", "", "op", "level", "hash", "exp", "pairing", "other");
    for (auto sid : c.schemes)
      for (auto lvl : c.levels)
        for (auto op : c.ops) {
          auto b = bench::profile_breakdown(sid, op, n, lvl, c.shape, 3, c.seed);
          std::printf("%-3s %-8s %5d %8.3f %8.3f %8.3f %8.3f\n", scheme::to_string(sid), bench::to_string(op),
                      level_bits(lvl), b.hash_to_group, b.exponentiation, b.pairing, b.other);
        }
  }
  return 0;
}

// --- simulator -----------------------------------------------------------

std::atomic<bool> g_interrupted{false};
extern "C" void on_signal(int) { g_interrupted = true; }

health::Logger stderr_logger() {
  return [](const std::string& msg) { std::cerr << "warn: " << msg << "\n"; };
}

struct SimSendArgs {
  std::string policy;
  std::string server = "127.0.0.1:9000";
  std::uint32_t duration = 60;
  std::string work_dir;
  std::uint32_t drop_every = 0;
  std::string report;
};

int cmd_sim_send(const Globals& g, const SimSendArgs& a) {
  tree::compile(a.policy);
  auto params = load_params(g.key_dir(), SchemeId::CP);
  PairingSuite s(params.header.level);
  auto pp = scheme::CpPublicParams::from_bytes(s, params.bytes);

  fs::path dir = a.work_dir.empty() ? fs::temp_directory_path() / ("abe-sim-" + std::to_string(::getpid()))
                                    : fs::path(a.work_dir);
  fs::path outbox = dir / "outbox";
  fs::remove_all(outbox);
  fs::create_directories(outbox);

  health::WallClock clock;
  std::int64_t epoch = clock.now_us() + 50'000;
  health::GeneratorStats gen;
  std::thread gen_thread(
      [&] { gen = health::generate_streams({outbox, a.duration, g.seed.value_or(1), epoch}, clock, &g_interrupted); });

  health::SenderConfig sc;
  sc.dir = outbox;
  sc.server = a.server;
  sc.policy = a.policy;
  sc.level = params.header.level;
  sc.seed = g.seed;
  sc.epoch_us = epoch;
  sc.drop_every_n = a.drop_every;
  sc.log = stderr_logger();
  auto stats = health::run_sender(sc, pp, clock, &g_interrupted);
  gen_thread.join();

  std::vector<health::LatencyRow> rows;
  for (const auto& r : stats.records)
    rows.push_back({r.cycle, r.type, r.seal_ms, r.send_ms, -1, r.ok ? "sent" : "send_failed"});
  if (!a.report.empty()) {
    std::ostringstream os;
    health::write_latency_csv(os, rows);
    write_file_atomic(a.report, os.str());
  }
  std::cout << "cycles " << gen.cycles << ", files sent " << stats.files_sent << ", failed " << stats.files_failed
            << ", datagrams " << stats.datagrams_sent << ", dropped " << stats.datagrams_dropped << ", max backlog "
            << stats.max_backlog << "\n";
  return 0;
}

struct SimCollectArgs {
  std::string key;
  std::string bind = "127.0.0.1:9000";
  std::uint32_t duration = 0;
  std::uint32_t idle_exit_ms = 3000;
  std::string out_dir;
  std::string report;
};

int cmd_sim_collect(const Globals& g, const SimCollectArgs& a) {
  auto params = load_params(g.key_dir(), SchemeId::CP);
  PairingSuite s(params.header.level);
  auto pp = scheme::CpPublicParams::from_bytes(s, params.bytes);
  auto key = scheme::CpSecretKey::from_bytes(s, read_file(a.key));

  health::WallClock clock;
  health::CollectorConfig cc;
  cc.bind = a.bind;
  cc.idle_exit_ms = a.idle_exit_ms;
  if (!a.out_dir.empty()) cc.out_dir = fs::path(a.out_dir);
  cc.log = stderr_logger();
  health::Collector collector(cc, pp, key, clock);
  std::cerr << "listening on port " << collector.port() << "\n";

  std::atomic<bool> stop{false};
  std::thread timer([&] {
    auto end = std::chrono::steady_clock::now() + std::chrono::seconds(a.duration);
    while (!stop && !g_interrupted) {
      if (a.duration && std::chrono::steady_clock::now() >= end) break;
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    stop = true;
  });
  collector.run(stop);
  stop = true;
  timer.join();

  const auto& st = collector.stats();
  auto rows = health::collector_report(st);
  if (!a.report.empty()) {
    std::ostringstream os;
    health::write_latency_csv(os, rows);
    write_file_atomic(a.report, os.str());
  }
  auto sum = health::summarize_latency(rows);
  std::cout << "datagrams " << st.datagrams << ", files ok " << st.files_ok << ", policy failures "
            << st.policy_failures << ", auth failures " << st.auth_failures << ", dropped " << st.dropped
            << ", hash mismatches " << st.hash_mismatches << ", malformed " << st.malformed << "\n";
  std::printf("latency ms: mean %.1f, p95 %.1f, max %.1f over %zu files\n", sum.mean_ms, sum.p95_ms, sum.max_ms,
              sum.delivered);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attribute-based encryption toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Deterministic randomness (reproducible output)");
  app.add_option("--keys", g.keys, "Key directory (default $ABE_HOME, then ~/.abe)");
  const auto levels = CLI::IsMember({80, 112, 128});

  SetupArgs setup;
  auto* c_setup = app.add_subcommand("setup", "Generate public parameters and a master key");
  c_setup->add_option("--scheme", setup.scheme, "cp or kp")->required()->check(CLI::IsMember({"cp", "kp"}));
  c_setup->add_option("--level", setup.level, "Security level in bits")->check(levels);
  c_setup->add_option("--out", setup.out, "Output directory (default: key directory)");
  c_setup->add_option("--attrs", setup.attrs, "kp: attributes to register up front");

  KeygenArgs keygen;
  auto* c_keygen = app.add_subcommand("keygen", "Issue a secret key");
  c_keygen->add_option("--scheme", keygen.scheme)->check(CLI::IsMember({"cp", "kp"}));
  c_keygen->add_option("--attrs", keygen.attrs, "cp: attribute list, e.g. \"doctor, age=42\"");
  c_keygen->add_option("--policy", keygen.policy, "kp: access policy of the key");
  c_keygen->add_option("--out", keygen.out, "Key file")->required();

  EncryptArgs enc;
  auto* c_enc = app.add_subcommand("encrypt", "Seal a file");
  c_enc->add_option("--scheme", enc.scheme)->check(CLI::IsMember({"cp", "kp"}));
  c_enc->add_option("--policy", enc.policy, "cp: access policy");
  c_enc->add_option("--attrs", enc.attrs, "kp: ciphertext attributes");
  c_enc->add_option("--in", enc.in)->required();
  c_enc->add_option("--out", enc.out)->required();

  DecryptArgs dec;
  auto* c_dec = app.add_subcommand("decrypt", "Open a sealed file");
  c_dec->add_option("--key", dec.key)->required();
  c_dec->add_option("--in", dec.in)->required();
  c_dec->add_option("--out", dec.out)->required();

  std::string policy_text;
  bool explain = false;
  auto* c_policy = app.add_subcommand("policy", "Normalize or explain a policy");
  c_policy->add_flag("--explain", explain, "Print the compiled access tree and its size");
  c_policy->add_option("policy", policy_text)->required();

  BenchArgs bench_args;
  auto* c_bench = app.add_subcommand("bench", "Measure encryption and decryption cost");
  c_bench->add_option("--scheme", bench_args.schemes, "cp, kp or cp,kp")->capture_default_str();
  c_bench->add_option("--levels", bench_args.levels)->capture_default_str();
  c_bench->add_option("--attrs", bench_args.attrs, "Attribute counts, e.g. 1..30 or 1,5,10")->capture_default_str();
  c_bench->add_option("--ops", bench_args.ops)->capture_default_str();
  c_bench->add_option("--shape", bench_args.shape, "and, or or random")->capture_default_str();
  c_bench->add_option("--device", bench_args.device, "Energy profile: edison, galileo, rpi1, rpizero")
      ->capture_default_str();
  c_bench->add_option("--trials", bench_args.trials)->capture_default_str();
  c_bench->add_option("--warmup", bench_args.warmup)->capture_default_str();
  c_bench->add_option("--csv", bench_args.csv)->capture_default_str();
  c_bench->add_option("--summary", bench_args.summary, "Summary CSV (default: <csv>.summary.csv)");
  c_bench->add_option("--svg-dir", bench_args.svg_dir, "Write one plot per scheme and operation");
  c_bench->add_flag("--profile", bench_args.profile, "Report time per operation class");
  c_bench->add_flag("--quiet", bench_args.quiet);

  SimSendArgs send;
  auto* c_send = app.add_subcommand("sim-send", "Generate sensor files, seal and send them");
  c_send->add_option("--policy", send.policy)->required();
  c_send->add_option("--server", send.server)->capture_default_str();
  c_send->add_option("--duration", send.duration, "Seconds")->capture_default_str();
  c_send->add_option("--work-dir", send.work_dir);
  c_send->add_option("--drop-every", send.drop_every, "Drop every n-th data datagram");
  c_send->add_option("--report", send.report, "Latency CSV");

  SimCollectArgs collect;
  auto* c_collect = app.add_subcommand("sim-collect", "Receive, decrypt and verify sensor files");
  c_collect->add_option("--key", collect.key)->required();
  c_collect->add_option("--bind", collect.bind)->capture_default_str();
  c_collect->add_option("--duration", collect.duration, "Stop after this many seconds (0: no limit)");
  c_collect->add_option("--idle-exit", collect.idle_exit_ms, "Stop after this many ms without traffic")
      ->capture_default_str();
  c_collect->add_option("--out-dir", collect.out_dir, "Write decrypted files here");
  c_collect->add_option("--report", collect.report, "Latency CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: UsageError: " << e.what() << "\n";
    return 2;
  }

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  try {
    if (*c_setup) return cmd_setup(g, setup);
    if (*c_keygen) return cmd_keygen(g, keygen);
    if (*c_enc) return cmd_encrypt(g, enc);
    if (*c_dec) return cmd_decrypt(g, dec);
    if (*c_policy) return cmd_policy(policy_text, explain);
    if (*c_bench) return cmd_bench(g, bench_args);
    if (*c_send) return cmd_sim_send(g, send);
    if (*c_collect) return cmd_sim_collect(g, collect);
  } catch (const UsageError& e) {
    std::cerr << "error: UsageError: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: Error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
