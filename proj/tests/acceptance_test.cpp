#include <gtest/gtest.h>

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <random>

#include "abe/bench/harness.hpp"
#include "abe/container/container.hpp"
#include "abe/errors.hpp"
#include "abe/health/pipeline.hpp"
#include "abe/rng.hpp"
#include "abe/scheme/cp_abe.hpp"
#include "abe/scheme/kp_abe.hpp"
#include "abe/tree/access_tree.hpp"
#include "support/generators.hpp"

using namespace abe;
using abe::policy::CmpOp;
using abe::scheme::SchemeId;
using abe::tree::AccessTree;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void report(const char* id, bool ok, const std::string& detail) {
  std::printf("%s %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  EXPECT_TRUE(ok) << id << ": " << detail;
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const SecurityLevel kLevels[] = {SecurityLevel::S80, SecurityLevel::S112, SecurityLevel::S128};

AccessTree chain(std::uint32_t n, bool all) {
  if (n == 1) return AccessTree::leaf("a0");
  std::vector<AccessTree> kids;
  for (std::uint32_t i = 0; i < n; ++i) kids.push_back(AccessTree::leaf("a" + std::to_string(i)));
  return AccessTree::threshold(all ? n : 1, std::move(kids));
}

std::set<std::string> pool_attrs(std::size_t n) {
  std::set<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.insert("a" + std::to_string(i));
  return out;
}

bool predicate(CmpOp op, std::uint64_t v, std::uint64_t n) {
  switch (op) {
    case CmpOp::Lt:
      return v < n;
    case CmpOp::Gt:
      return v > n;
    case CmpOp::Le:
      return v <= n;
    case CmpOp::Ge:
      return v >= n;
    case CmpOp::Eq:
      return v == n;
  }
  return false;
}

// Lagrange basis at zero, written out independently of the library helper.
Scalar basis_at_zero(const PairingSuite& s, std::uint32_t i, const std::vector<std::uint32_t>& set) {
  Scalar num = s.scalar(1), den = s.scalar(1);
  for (auto j : set) {
    if (j == i) continue;
    num = num * (-s.scalar(j));
    den = den * (s.scalar(i) - s.scalar(j));
  }
  return num * den.inverse();
}

// Folds shares bottom-up through an arbitrary choice of k true children per gate.
std::optional<Scalar> fold(const PairingSuite& s, const AccessTree& t, const std::vector<Scalar>& shares,
                           const std::set<std::uint32_t>& on, std::mt19937_64& rng, std::uint32_t id = 0) {
  const auto& n = t.node(id);
  if (n.kind == AccessTree::Kind::Leaf) {
    if (!on.count(id)) return std::nullopt;
    return shares[id];
  }
  std::vector<std::pair<std::uint32_t, Scalar>> good;
  for (std::uint32_t pos = 0; pos < n.children.size(); ++pos)
    if (auto v = fold(s, t, shares, on, rng, n.children[pos])) good.emplace_back(pos + 1, *v);
  if (good.size() < n.k) return std::nullopt;
  std::shuffle(good.begin(), good.end(), rng);
  good.resize(n.k);
  std::vector<std::uint32_t> set;
  for (const auto& g : good) set.push_back(g.first);
  Scalar acc = s.scalar(0);
  for (const auto& [pos, v] : good) acc = acc + basis_at_zero(s, pos, set) * v;
  return acc;
}

}  // namespace

TEST(Acceptance, AC1_NumericOracleExhaustive8Bit) {
  auto t0 = Clock::now();
  const CmpOp ops[] = {CmpOp::Lt, CmpOp::Gt, CmpOp::Le, CmpOp::Ge, CmpOp::Eq};
  std::vector<std::set<std::string>> bags(256);
  for (std::uint64_t v = 0; v < 256; ++v) {
    tree::AttributeBag b;
    b.add_numeric("A", v);
    bags[v] = b.attrs();
  }
  std::uint64_t checks = 0, agree = 0;
  for (auto op : ops)
    for (std::uint64_t n = 0; n < 256; ++n) {
      // A refused comparison (e.g. A < 0) must be one that no value satisfies.
      std::optional<AccessTree> t;
      try {
        t = tree::compile_cmp("A", op, n);
      } catch (const UnsatisfiablePolicy&) {
      }
      for (std::uint64_t v = 0; v < 256; ++v) {
        ++checks;
        bool got = t && tree::satisfies(*t, bags[v]).has_value();
        if (got == predicate(op, v, n)) ++agree;
      }
    }
  double secs = seconds_since(t0);
  report("AC1", checks == 327680 && agree == checks && secs < 60,
         fmt("8-bit numeric oracle: %llu/%llu agree in %.1f s (limit 60 s)", static_cast<unsigned long long>(agree),
             static_cast<unsigned long long>(checks), secs));
}

TEST(Acceptance, AC2_SchemeRoundTripMatchesSatisfaction) {
  auto t0 = Clock::now();
  const std::size_t kPool = 20, kCases = 1000;
  PairingSuite s(SecurityLevel::S80);
  DeterministicRng rng(2024);
  std::mt19937_64 mt(77);

  auto [cp_pp, cp_mk] = scheme::cp_setup(s, rng);
  auto [kp_pp, kp_mk] = scheme::kp_setup(s, rng);
  scheme::KpUniverse universe(s.level());
  for (const auto& a : pool_attrs(kPool)) universe.register_attribute(s, a, rng);

  std::string detail;
  bool ok = true;
  for (auto id : {SchemeId::CP, SchemeId::KP}) {
    std::size_t sat = 0, unsat = 0, sat_ok = 0, unsat_ok = 0, mismatches = 0;
    while (sat < kCases || unsat < kCases) {
      auto t = gen::random_tree(mt, 4, 1 + mt() % 15, kPool);
      auto attrs = gen::random_attrs(mt, kPool, (sat < unsat) ? 0.75 : 0.3);
      if (attrs.empty()) attrs.insert("a" + std::to_string(mt() % kPool));
      bool expect = gen::evaluate(t, attrs);
      if ((expect && sat >= kCases) || (!expect && unsat >= kCases)) continue;
      (expect ? sat : unsat)++;

      std::optional<GT> got;
      GT want;
      try {
        if (id == SchemeId::CP) {
          auto key = scheme::cp_keygen(s, cp_pp, cp_mk, attrs, rng);
          auto [ct, k] = scheme::cp_encrypt(s, cp_pp, t, rng);
          want = k;
          got = scheme::cp_decrypt(s, cp_pp, key, ct);
        } else {
          auto key = scheme::kp_keygen(s, kp_pp, kp_mk, universe, t, rng);
          auto [ct, k] = scheme::kp_encrypt(s, kp_pp, universe, attrs, rng);
          want = k;
          got = scheme::kp_decrypt(s, kp_pp, key, ct);
        }
      } catch (const PolicyNotSatisfied&) {
      }
      if (expect && got && *got == want) ++sat_ok;
      if (!expect && !got) ++unsat_ok;
      if (got.has_value() != expect) ++mismatches;
    }
    bool this_ok = sat_ok == kCases && unsat_ok == kCases && mismatches == 0;
    ok = ok && this_ok;
    detail += fmt("%s: %zu/%zu satisfying decrypt exactly, %zu/%zu non-satisfying refused; ",
                  scheme::to_string(id), sat_ok, kCases, unsat_ok, kCases);
  }
  double secs = seconds_since(t0);
  report("AC2", ok && secs < 600, detail + fmt("%.1f s (limit 600 s)", secs));
}

TEST(Acceptance, AC3_OperationCountLaws) {
  std::mt19937_64 mt(3);
  std::optional<std::int64_t> c;
  bool c_frozen = true, cp_dec = true, and_exact = true, kp_dec = true;
  std::size_t samples = 0;
  for (auto level : kLevels) {
    PairingSuite s(level);
    DeterministicRng rng(31);
    auto [pp, mk] = scheme::cp_setup(s, rng);
    auto key = scheme::cp_keygen(s, pp, mk, pool_attrs(30), rng);
    for (std::uint32_t L = 1; L <= 30; ++L) {
      for (int shape = 0; shape < 3; ++shape) {
        AccessTree t = shape == 0 ? chain(L, true) : shape == 1 ? chain(L, false) : gen::random_tree(mt, 4, L, 30);
        std::uint32_t leaves = static_cast<std::uint32_t>(t.leaf_count());
        auto before = s.counters();
        auto [ct, k] = scheme::cp_encrypt(s, pp, t, rng);
        auto enc = s.counters() - before;
        std::int64_t this_c = static_cast<std::int64_t>(enc.exponentiations()) - 2 * static_cast<std::int64_t>(leaves);
        if (!c) c = this_c;
        c_frozen = c_frozen && this_c == *c;
        ++samples;

        before = s.counters();
        scheme::cp_decrypt(s, pp, key, ct);
        auto dec = s.counters() - before;
        cp_dec = cp_dec && dec.pairings <= 2 * leaves + 1;
        if (shape == 0) and_exact = and_exact && dec.pairings == 2 * leaves + 1;
      }
    }
  }

  PairingSuite s(SecurityLevel::S80);
  DeterministicRng rng(32);
  auto [pp, mk] = scheme::kp_setup(s, rng);
  scheme::KpUniverse universe(s.level());
  for (const auto& a : pool_attrs(30)) universe.register_attribute(s, a, rng);
  std::size_t kp_cases = 0;
  for (int i = 0; i < 200; ++i) {
    auto t = gen::random_tree(mt, 4, 1 + mt() % 30, 30);
    auto key = scheme::kp_keygen(s, pp, mk, universe, t, rng);
    auto [ct, k] = scheme::kp_encrypt(s, pp, universe, pool_attrs(30), rng);
    auto before = s.counters();
    scheme::kp_decrypt(s, pp, key, ct);
    kp_dec = kp_dec && (s.counters() - before).pairings <= t.leaf_count();
    ++kp_cases;
  }
  report("AC3", c_frozen && cp_dec && and_exact && kp_dec,
         fmt("cp encrypt exp = 2L + %lld over %zu trees, L 1..30, 3 levels (frozen: %s); cp decrypt <= 2l+1: %s, "
             "= on AND: %s; kp decrypt <= l over %zu keys: %s",
             static_cast<long long>(c.value_or(-1)), samples, c_frozen ? "yes" : "no", cp_dec ? "yes" : "no",
             and_exact ? "yes" : "no", kp_cases, kp_dec ? "yes" : "no"));
}

TEST(Acceptance, AC4_ThresholdSharingReconstructs) {
  PairingSuite s(SecurityLevel::S80);
  DeterministicRng rng(4);
  std::mt19937_64 mt(44);
  std::size_t trees = 0, witnesses = 0, exact = 0;
  for (; trees < 1000; ++trees) {
    auto t = gen::random_tree(mt, 4, 2 + mt() % 20, 12);
    Scalar secret = s.random_scalar(rng);
    auto shares = tree::share_secret(s, t, secret, rng);
    auto leaves = t.leaves();

    // Library witness for the full attribute set and a few random ones.
    for (int trial = 0; trial < 4; ++trial) {
      auto attrs = trial == 0 ? pool_attrs(12) : gen::random_attrs(mt, 12, 0.6);
      auto w = tree::satisfies(t, attrs);
      if (!w) continue;
      ++witnesses;
      Scalar acc = s.scalar(0);
      for (const auto& [leaf, coeff] : tree::witness_coefficients(s, t, *w)) acc = acc + coeff * shares[leaf];
      if (acc == secret) ++exact;
    }
    // Arbitrary satisfying leaf subsets folded with random child choices.
    for (int trial = 0; trial < 4; ++trial) {
      std::set<std::uint32_t> on;
      for (auto l : leaves)
        if (trial == 0 || mt() % 3 != 0) on.insert(l);
      if (!gen::evaluate_leaves(t, on)) continue;
      ++witnesses;
      auto v = fold(s, t, shares, on, mt);
      if (v && *v == secret) ++exact;
    }
  }
  report("AC4", trees == 1000 && witnesses > 0 && exact == witnesses,
         fmt("%zu random trees (depth <= 4): %zu/%zu witnesses reconstruct the root secret exactly", trees, exact,
             witnesses));
}

TEST(Acceptance, AC5_ContainerIntegrity) {
  PairingSuite s(SecurityLevel::S80);
  DeterministicRng rng(5);
  std::mt19937_64 mt(55);
  auto [pp, mk] = scheme::cp_setup(s, rng);
  auto key = scheme::cp_keygen(s, pp, mk, std::set<std::string>{"A"}, rng);

  std::size_t round_ok = 0;
  for (int i = 0; i < 1000; ++i) {
    Bytes payload(mt() % 2048);
    for (auto& b : payload) b = static_cast<std::uint8_t>(mt());
    Bytes sealed = container::seal_cp(s, pp, "A or B", payload, rng);
    if (container::open_cp(s, pp, key, sealed) == payload) ++round_ok;
  }

  auto [kpp, kmk] = scheme::kp_setup(s, rng);
  scheme::KpUniverse universe(s.level());
  for (const auto& a : {"A", "B"}) universe.register_attribute(s, a, rng);
  auto kkey = scheme::kp_keygen(s, kpp, kmk, universe, tree::compile("A or B"), rng);

  Bytes payload{'v', 'i', 't', 'a', 'l', 's', ' ', '7', '2', ' ', 'b', 'p', 'm'};
  std::size_t flips = 0, rejected = 0, wrong_plaintext = 0;
  std::map<std::string, std::size_t> kinds;
  for (auto id : {SchemeId::CP, SchemeId::KP}) {
    Bytes sealed = id == SchemeId::CP ? container::seal_cp(s, pp, "A or B", payload, rng)
                                      : container::seal_kp(s, kpp, universe, {"A"}, payload, rng);
    for (std::size_t bit = 0; bit < sealed.size() * 8; ++bit) {
      Bytes bad = sealed;
      bad[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
      ++flips;
      try {
        Bytes out = id == SchemeId::CP ? container::open_cp(s, pp, key, bad) : container::open_kp(s, kpp, kkey, bad);
        ++wrong_plaintext;
        kinds["accepted"]++;
      } catch (const AuthenticationFailure& e) {
        ++rejected;
        kinds[e.kind()]++;
      } catch (const PolicyNotSatisfied& e) {
        ++rejected;
        kinds[e.kind()]++;
      } catch (const Error& e) {
        kinds[e.kind()]++;
      }
    }
  }
  std::string by_kind;
  for (const auto& [k, n] : kinds) by_kind += fmt(" %s=%zu", k.c_str(), n);
  report("AC5", round_ok == 1000 && rejected == flips && wrong_plaintext == 0,
         fmt("%zu/1000 round trips; %zu/%zu single-bit flips rejected (", round_ok, rejected, flips) + by_kind +
             " )");
}

TEST(Acceptance, AC6_NumericTreeStructure) {
  auto t = tree::compile("A < 32768");
  bool example = t.leaf_count() == 3 && t.and_gate_count() == 1;

  std::mt19937_64 mt(6);
  std::vector<std::size_t> class_max;
  bool constant = true, pow2_below = true, bounded = true;
  for (auto w : tree::kWidths) {
    // Smallest value whose minimal width is w.
    std::uint64_t lo = w == 8 ? 1 : std::uint64_t{1} << (w - 8);
    std::uint64_t hi = w == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << w) - 1;
    auto leaves_of = [](std::uint64_t n) { return tree::compile_cmp("A", CmpOp::Lt, n).leaf_count(); };

    std::vector<std::uint64_t> odd;
    if (w <= 16) {
      for (std::uint64_t n = lo | 1; n <= hi; n += 2) odd.push_back(n);
    } else {
      for (int i = 0; i < 2000; ++i) odd.push_back((lo + mt() % (hi - lo)) | 1);
      odd.push_back(hi);
    }
    std::size_t m = leaves_of(odd.front());
    for (auto n : odd) constant = constant && leaves_of(n) == m;
    class_max.push_back(m);

    // 2^k with k >= 1; the bound 1 = 2^0 has no zero bits to drop.
    for (std::uint64_t p = std::max<std::uint64_t>(lo, 2); p != 0 && p <= hi; p <<= 1)
      pow2_below = pow2_below && leaves_of(p) < m;
    for (int i = 0; i < 2000; ++i) bounded = bounded && leaves_of(lo + mt() % (hi - lo)) <= m;
  }
  bool increasing = std::is_sorted(class_max.begin(), class_max.end()) &&
                    std::adjacent_find(class_max.begin(), class_max.end()) == class_max.end();
  std::string maxima;
  for (auto m : class_max) maxima += (maxima.empty() ? "" : "/") + std::to_string(m);
  report("AC6", example && constant && increasing && pow2_below && bounded,
         fmt("A < 32768: %zu leaves, %zu AND gate(s); class maxima for 1..8 byte widths = ", t.leaf_count(),
             t.and_gate_count()) +
             maxima +
             fmt(" leaves (constant over odd bounds: %s, increasing: %s, all bounds <= max: %s); powers of two below "
                 "class max: %s",
                 constant ? "yes" : "no", increasing ? "yes" : "no", bounded ? "yes" : "no",
                 pow2_below ? "yes" : "no"));
}

namespace {

std::vector<bench::CellSummary> encrypt_cells() {
  static std::vector<bench::CellSummary> cells = [] {
    bench::BenchConfig c;
    c.schemes = {SchemeId::CP};
    c.ops = {bench::Op::Encrypt};
    for (std::uint32_t n = 1; n <= 30; ++n) c.attr_counts.push_back(n);
    c.trials = 15;
    c.warmup = 2;
    return bench::summarize(bench::run_bench(c));
  }();
  return cells;
}

double mean_of(const std::vector<bench::CellSummary>& cells, SecurityLevel level, std::uint32_t n) {
  for (const auto& c : cells)
    if (c.level == level && c.n_attrs == n) return c.mean_ms;
  return -1;
}

}  // namespace

TEST(Acceptance, AC7_ScalingLaws) {
  auto cells = encrypt_cells();
  bool linear = true, monotone = true;
  std::string fits;
  for (auto level : kLevels) {
    std::vector<double> xs, ys;
    for (std::uint32_t n = 1; n <= 30; ++n) {
      xs.push_back(n);
      ys.push_back(mean_of(cells, level, n));
    }
    auto f = bench::fit_line(xs, ys);
    linear = linear && f.r2 >= 0.98;
    fits += fmt("%d-bit R2=%.4f ", level_bits(level), f.r2);
  }
  std::uint32_t violations = 0;
  for (std::uint32_t n = 1; n <= 30; ++n) {
    double a = mean_of(cells, SecurityLevel::S80, n), b = mean_of(cells, SecurityLevel::S112, n),
           c = mean_of(cells, SecurityLevel::S128, n);
    if (!(a < b && b < c)) ++violations;
  }
  monotone = violations == 0;
  auto prof = bench::profile_breakdown(SchemeId::CP, bench::Op::Decrypt, 30, SecurityLevel::S80);
  report("AC7", linear && monotone && prof.pairing >= 0.8,
         fits + fmt("(min 0.98); level-monotone at %u/30 counts; cp decrypt pairing fraction at 30 attrs = %.3f "
                    "(min 0.80)",
                    30 - violations, prof.pairing));
}

TEST(Acceptance, AC8_SecurityVersusPolicySizeTradeoff) {
  auto cells = encrypt_cells();
  double a = mean_of(cells, SecurityLevel::S128, 5), b = mean_of(cells, SecurityLevel::S112, 15);
  report("AC8", a > 0 && b > 0 && a <= b,
         fmt("mean cp encrypt: 128-bit/5 attrs = %.3f ms, 112-bit/15 attrs = %.3f ms", a, b));
}

TEST(Acceptance, AC9_TelemetryPipelineLoopback) {
  health::PipelineConfig cfg;
  cfg.work_dir = std::filesystem::temp_directory_path() / ("abe_ac9_" + std::to_string(::getpid()));
  cfg.duration_s = 60;
  cfg.policy = "a0 and a1 and a2 and a3 and a4";
  cfg.key_attrs = pool_attrs(5);
  cfg.level = SecurityLevel::S80;
  health::WallClock clock;
  auto r = health::run_pipeline(cfg, clock);
  std::filesystem::remove_all(cfg.work_dir);

  std::uint32_t generated = 0;
  for (auto n : r.generated.files) generated += n;
  std::uint32_t delivered = r.collected.files_ok;
  // Two cycles' worth of files is the most that may be waiting at once.
  bool no_growth = r.sent.max_backlog <= 2 * health::kStreamCount;
  bool identical = delivered > 0 && r.identical_files == delivered && delivered == generated;
  bool budget = r.cycles == 60 && r.cycles_within_budget == r.cycles;
  bool ecg = r.ecg_bytes_delivered == 1500ull * 60;
  auto lat = health::summarize_latency(r.rows);
  report("AC9", identical && budget && ecg && no_growth,
         fmt("60 s run: %u/%u files delivered byte-identical; %u/%u cycles within 1000 ms (worst %.1f ms, mean "
             "%.1f, p95 %.1f); ECG %llu B = %.0f B/s; max backlog %zu files",
             r.identical_files, generated, r.cycles_within_budget, r.cycles, r.max_cycle_ms, lat.mean_ms, lat.p95_ms,
             static_cast<unsigned long long>(r.ecg_bytes_delivered),
             static_cast<double>(r.ecg_bytes_delivered) / 60.0, r.sent.max_backlog));
}
