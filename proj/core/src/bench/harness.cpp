#include "abe/bench/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <tuple>

#include <boost/math/distributions/students_t.hpp>

#include "abe/errors.hpp"
#include "abe/rng.hpp"
#include "abe/scheme/cp_abe.hpp"
#include "abe/scheme/kp_abe.hpp"
#include "abe/tree/access_tree.hpp"

namespace abe::bench {

using scheme::SchemeId;
using tree::AccessTree;
using Clock = std::chrono::steady_clock;

const char* to_string(Op op) { return op == Op::Encrypt ? "encrypt" : "decrypt"; }

const char* to_string(PolicyShape shape) {
  switch (shape) {
    case PolicyShape::AndChain:
      return "and";
    case PolicyShape::OrChain:
      return "or";
    case PolicyShape::Random:
      return "random";
  }
  return "?";
}

Op parse_op(std::string_view s) {
  if (s == "encrypt") return Op::Encrypt;
  if (s == "decrypt") return Op::Decrypt;
  throw InvalidArgument("unknown operation '" + std::string(s) + "'");
}

PolicyShape parse_shape(std::string_view s) {
  if (s == "and") return PolicyShape::AndChain;
  if (s == "or") return PolicyShape::OrChain;
  if (s == "random") return PolicyShape::Random;
  throw InvalidArgument("unknown policy shape '" + std::string(s) + "'");
}

const std::vector<DeviceProfile>& device_profiles() {
  static const std::vector<DeviceProfile> profiles{
      {"edison", 1335.84, 1750.0 / 9.68},
      {"galileo", 7021.44, 4300.0 / 15.0},
      {"rpi1", 2358.4, 800.0 / 5.0},
      {"rpizero", 1504.0, 800.0 / 5.0},
  };
  return profiles;
}

const DeviceProfile& device_profile(std::string_view name) {
  for (const auto& p : device_profiles())
    if (p.name == name) return p;
  throw InvalidArgument("unknown device profile '" + std::string(name) + "'");
}

double estimate_energy(const DeviceProfile& profile, double wall_time_ms) {
  return profile.active_delta_mw * wall_time_ms * 1e-6;
}

void validate(const BenchConfig& c) {
  if (c.schemes.empty()) throw InvalidArgument("no scheme selected");
  if (c.levels.empty()) throw InvalidArgument("no security level selected");
  if (c.ops.empty()) throw InvalidArgument("no operation selected");
  if (c.attr_counts.empty()) throw InvalidArgument("no attribute counts given");
  for (auto n : c.attr_counts)
    if (n < 1 || n > 64) throw InvalidArgument("attribute count " + std::to_string(n) + " outside [1, 64]");
  if (c.trials < 3) throw InvalidArgument("at least 3 trials per cell are required");
  device_profile(c.device);
}

namespace {

std::string attr_name(std::uint32_t i) { return "attr" + std::to_string(i); }

std::vector<AccessTree> leaves_for(std::uint32_t first, std::uint32_t count) {
  std::vector<AccessTree> out;
  for (std::uint32_t i = 0; i < count; ++i) out.push_back(AccessTree::leaf(attr_name(first + i)));
  return out;
}

AccessTree random_subtree(Rng& rng, std::uint32_t first, std::uint32_t n) {
  if (n == 1) return AccessTree::leaf(attr_name(first));
  std::uint32_t arity = 2 + static_cast<std::uint32_t>(rng.next_u64() % std::min<std::uint32_t>(n - 1, 3));
  // Random composition of n into arity positive parts.
  std::vector<std::uint32_t> parts(arity, 1);
  for (std::uint32_t left = n - arity; left > 0; --left) parts[rng.next_u64() % arity]++;
  std::vector<AccessTree> children;
  std::uint32_t at = first;
  for (auto p : parts) {
    children.push_back(random_subtree(rng, at, p));
    at += p;
  }
  std::uint32_t k = 1 + static_cast<std::uint32_t>(rng.next_u64() % arity);
  return AccessTree::threshold(k, std::move(children));
}

AccessTree make_policy(PolicyShape shape, std::uint32_t n, Rng& rng) {
  if (n == 1) return AccessTree::leaf(attr_name(0));
  switch (shape) {
    case PolicyShape::AndChain:
      return AccessTree::threshold(n, leaves_for(0, n));
    case PolicyShape::OrChain:
      return AccessTree::threshold(1, leaves_for(0, n));
    case PolicyShape::Random:
      return random_subtree(rng, 0, n);
  }
  throw InvalidArgument("bad policy shape");
}

std::set<std::string> all_attrs(std::uint32_t n) {
  std::set<std::string> out;
  for (std::uint32_t i = 0; i < n; ++i) out.insert(attr_name(i));
  return out;
}

// Prepared state for one (scheme, level, n) cell; run() performs one measured call.
class Cell {
 public:
  Cell(PairingSuite& s, SchemeId scheme, std::uint32_t n, PolicyShape shape, std::uint64_t seed)
      : s_(s), scheme_(scheme), rng_(seed), policy_(make_policy(shape, n, rng_)), attrs_(all_attrs(n)) {
    if (scheme == SchemeId::CP) {
      auto [pp, mk] = scheme::cp_setup(s, rng_);
      cp_pp_ = std::move(pp);
      cp_key_ = scheme::cp_keygen(s, cp_pp_, mk, attrs_, rng_);
      cp_ct_.emplace(scheme::cp_encrypt(s, cp_pp_, policy_, rng_).first);
    } else {
      auto [pp, mk] = scheme::kp_setup(s, rng_);
      kp_pp_ = std::move(pp);
      kp_universe_.emplace(s.level());
      for (const auto& a : attrs_) kp_universe_->register_attribute(s, a, rng_);
      kp_key_.emplace(scheme::kp_keygen(s, kp_pp_, mk, *kp_universe_, policy_, rng_));
      kp_ct_.emplace(scheme::kp_encrypt(s, kp_pp_, *kp_universe_, attrs_, rng_).first);
    }
  }

  void run(Op op) {
    if (scheme_ == SchemeId::CP) {
      if (op == Op::Encrypt)
        scheme::cp_encrypt(s_, cp_pp_, policy_, rng_);
      else
        scheme::cp_decrypt(s_, cp_pp_, cp_key_, *cp_ct_);
    } else {
      if (op == Op::Encrypt)
        scheme::kp_encrypt(s_, kp_pp_, *kp_universe_, attrs_, rng_);
      else
        scheme::kp_decrypt(s_, kp_pp_, *kp_key_, *kp_ct_);
    }
  }

 private:
  PairingSuite& s_;
  SchemeId scheme_;
  DeterministicRng rng_;
  AccessTree policy_;
  std::set<std::string> attrs_;
  scheme::CpPublicParams cp_pp_{};
  scheme::CpSecretKey cp_key_{};
  std::optional<scheme::CpCiphertext> cp_ct_;
  scheme::KpPublicParams kp_pp_{};
  std::optional<scheme::KpUniverse> kp_universe_;
  std::optional<scheme::KpKey> kp_key_;
  std::optional<scheme::KpCiphertext> kp_ct_;
};

std::uint64_t cell_seed(std::uint64_t seed, SchemeId scheme, SecurityLevel level, std::uint32_t n) {
  return seed * 1000003ULL + static_cast<std::uint64_t>(scheme) * 10007ULL + level_bits(level) * 101ULL + n;
}

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::uint64_t status_kib(const char* key) {
  std::ifstream in("/proc/self/status");
  std::string line;
  std::size_t len = std::char_traits<char>::length(key);
  while (std::getline(in, line)) {
    if (line.compare(0, len, key) == 0) return std::stoull(line.substr(len + 1));
  }
  return 0;
}

}  // namespace

std::uint64_t peak_memory_delta(const std::function<void()>& fn) {
  // Writing 5 resets the high-water mark on Linux; without it the delta is
  // against the process-lifetime peak and may read as zero.
  {
    std::ofstream clear("/proc/self/clear_refs");
    if (clear) clear << "5";
  }
  std::uint64_t before = status_kib("VmRSS:");
  fn();
  std::uint64_t peak = status_kib("VmHWM:");
  return peak > before ? (peak - before) * 1024 : 0;
}

std::vector<BenchRecord> run_bench(const BenchConfig& config, const Progress& progress) {
  validate(config);
  const DeviceProfile& device = device_profile(config.device);

  struct Slot {
    SchemeId scheme;
    SecurityLevel level;
    std::uint32_t n;
    PairingSuite* suite;
    std::unique_ptr<Cell> cell;
  };
  std::vector<std::unique_ptr<PairingSuite>> suites;
  std::vector<Slot> slots;
  for (auto level : config.levels) {
    suites.push_back(std::make_unique<PairingSuite>(level));
    for (auto scheme_id : config.schemes)
      for (auto n : config.attr_counts)
        slots.push_back({scheme_id, level, n, suites.back().get(),
                         std::make_unique<Cell>(*suites.back(), scheme_id, n, config.shape,
                                                cell_seed(config.seed, scheme_id, level, n))});
  }

  // Trials run round-robin over all cells so slow drift in machine speed
  // spreads evenly instead of bending one part of the curve.
  for (std::uint32_t w = 0; w < config.warmup; ++w)
    for (auto& slot : slots)
      for (auto op : config.ops) slot.cell->run(op);
  std::vector<BenchRecord> records;
  for (std::uint32_t t = 0; t < config.trials; ++t) {
    for (auto& slot : slots) {
      for (auto op : config.ops) {
        OpCounters before = slot.suite->counters();
        double ms = 0;
        std::uint64_t mem = peak_memory_delta([&] {
          auto t0 = Clock::now();
          slot.cell->run(op);
          ms = ms_since(t0);
        });
        BenchRecord r{slot.scheme, op, slot.level, slot.n, t + 1, ms, mem, slot.suite->counters() - before,
                      estimate_energy(device, ms)};
        records.push_back(r);
        if (progress) progress(r);
      }
    }
  }

  auto rank = [&](const BenchRecord& r) {
    auto pos = [](const auto& v, const auto& x) { return std::find(v.begin(), v.end(), x) - v.begin(); };
    return std::make_tuple(pos(config.schemes, r.scheme), pos(config.levels, r.level), pos(config.attr_counts, r.n_attrs),
                           pos(config.ops, r.op), r.trial);
  };
  std::stable_sort(records.begin(), records.end(),
                   [&](const BenchRecord& a, const BenchRecord& b) { return rank(a) < rank(b); });
  return records;
}

double median(std::vector<double> xs) {
  if (xs.empty()) return 0;
  std::sort(xs.begin(), xs.end());
  std::size_t m = xs.size() / 2;
  return xs.size() % 2 ? xs[m] : (xs[m - 1] + xs[m]) / 2;
}

double ci95_half_width(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0;
  double n = static_cast<double>(xs.size());
  double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  double sd = std::sqrt(ss / (n - 1));
  boost::math::students_t dist(n - 1);
  return boost::math::quantile(boost::math::complement(dist, 0.025)) * sd / std::sqrt(n);
}

std::vector<CellSummary> summarize(const std::vector<BenchRecord>& records) {
  using Key = std::tuple<int, int, int, std::uint32_t>;
  std::map<Key, std::vector<double>> groups;
  std::vector<Key> order;
  for (const auto& r : records) {
    Key k{static_cast<int>(r.scheme), static_cast<int>(r.op), level_bits(r.level), r.n_attrs};
    auto [it, fresh] = groups.try_emplace(k);
    if (fresh) order.push_back(k);
    it->second.push_back(r.wall_time_ms);
  }
  std::vector<CellSummary> out;
  for (const auto& k : order) {
    const auto& xs = groups[k];
    double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    out.push_back({static_cast<SchemeId>(std::get<0>(k)), static_cast<Op>(std::get<1>(k)),
                   level_from_bits(std::get<2>(k)), std::get<3>(k), xs.size(), mean, ci95_half_width(xs),
                   median(xs)});
  }
  return out;
}

LinearFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw InvalidArgument("fit needs at least two paired points");
  double n = static_cast<double>(xs.size());
  double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0) throw InvalidArgument("fit needs distinct x values");
  double slope = sxy / sxx;
  double intercept = my - slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double e = ys[i] - (slope * xs[i] + intercept);
    ss_res += e * e;
  }
  double r2 = syy == 0 ? 1.0 : 1.0 - ss_res / syy;
  return {slope, intercept, r2};
}

void write_csv(std::ostream& os, const std::vector<BenchRecord>& records) {
  os << "scheme,op,level,n_attrs,trial,wall_time_ms,peak_mem_bytes,exp_g1,exp_g2,exp_gt,pairings,hash_to_group,"
        "energy_est_j\n";
  char buf[64];
  for (const auto& r : records) {
    os << scheme::to_string(r.scheme) << ',' << to_string(r.op) << ',' << level_bits(r.level) << ',' << r.n_attrs
       << ',' << r.trial << ',';
    std::snprintf(buf, sizeof buf, "%.4f", r.wall_time_ms);
    os << buf << ',' << r.peak_mem_bytes << ',' << r.ops.exp_g1 << ',' << r.ops.exp_g2 << ',' << r.ops.exp_gt << ','
       << r.ops.pairings << ',' << r.ops.hash_to_group << ',';
    std::snprintf(buf, sizeof buf, "%.6g", r.energy_j);
    os << buf << '\n';
  }
}

void write_summary_csv(std::ostream& os, const std::vector<CellSummary>& cells) {
  os << "scheme,op,level,n_attrs,trials,mean_ms,ci95_ms,median_ms\n";
  char buf[128];
  for (const auto& c : cells) {
    std::snprintf(buf, sizeof buf, "%.4f,%.4f,%.4f", c.mean_ms, c.ci95_ms, c.median_ms);
    os << scheme::to_string(c.scheme) << ',' << to_string(c.op) << ',' << level_bits(c.level) << ',' << c.n_attrs
       << ',' << c.trials << ',' << buf << '\n';
  }
}

std::string svg_plot(const std::vector<CellSummary>& cells, SchemeId scheme_id, Op op) {
  std::map<int, std::vector<std::pair<double, double>>> series;
  double max_x = 1, max_y = 0;
  for (const auto& c : cells) {
    if (c.scheme != scheme_id || c.op != op) continue;
    series[level_bits(c.level)].emplace_back(c.n_attrs, c.mean_ms);
    max_x = std::max(max_x, static_cast<double>(c.n_attrs));
    max_y = std::max(max_y, c.mean_ms);
  }
  if (max_y <= 0) max_y = 1;
  const double w = 640, h = 400, left = 60, right = 20, top = 30, bottom = 50;
  auto px = [&](double x) { return left + x / max_x * (w - left - right); };
  auto py = [&](double y) { return h - bottom - y / max_y * (h - top - bottom); };
  static const char* colors[] = {"#1b9e77", "#d95f02", "#7570b3"};

  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(1);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << scheme::to_string(scheme_id)
     << ' ' << to_string(op) << "</text>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << py(0) << "\" x2=\"" << w - right << "\" y2=\"" << py(0)
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << py(0)
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"" << h - 10 << "\" text-anchor=\"middle\" font-size=\"12\">attributes</text>\n";
  os << "<text x=\"15\" y=\"" << h / 2 << "\" font-size=\"12\" transform=\"rotate(-90 15 " << h / 2
     << ")\" text-anchor=\"middle\">mean time (ms)</text>\n";
  for (int i = 0; i <= 4; ++i) {
    double y = max_y * i / 4;
    os << "<text x=\"" << left - 5 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\" font-size=\"10\">" << y
       << "</text>\n";
  }
  os << "<text x=\"" << px(max_x) << "\" y=\"" << py(0) + 15 << "\" text-anchor=\"middle\" font-size=\"10\">"
     << max_x << "</text>\n";
  std::size_t idx = 0;
  for (auto& [bits, pts] : series) {
    std::sort(pts.begin(), pts.end());
    const char* color = colors[idx % 3];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : pts) os << px(x) << ',' << py(y) << ' ';
    os << "\"/>\n";
    os << "<text x=\"" << w - right - 60 << "\" y=\"" << top + 15 * (idx + 1) << "\" fill=\"" << color
       << "\" font-size=\"12\">" << bits << " bits</text>\n";
    ++idx;
  }
  os << "</svg>\n";
  return os.str();
}

Breakdown profile_breakdown(SchemeId scheme_id, Op op, std::uint32_t n_attrs, SecurityLevel level,
                            PolicyShape shape, std::uint32_t reps, std::uint64_t seed) {
  if (n_attrs < 1 || n_attrs > 64) throw InvalidArgument("attribute count outside [1, 64]");
  if (reps == 0) throw InvalidArgument("reps must be positive");
  PairingSuite suite(level);
  Cell cell(suite, scheme_id, n_attrs, shape, cell_seed(seed, scheme_id, level, n_attrs));
  cell.run(op);
  suite.set_timing(true);
  OpTimes before = suite.times();
  auto t0 = Clock::now();
  for (std::uint32_t i = 0; i < reps; ++i) cell.run(op);
  double wall = ms_since(t0);
  OpTimes d = suite.times() - before;
  suite.set_timing(false);

  auto frac = [&](std::chrono::nanoseconds ns) {
    return std::clamp(std::chrono::duration<double, std::milli>(ns).count() / wall, 0.0, 1.0);
  };
  Breakdown b{frac(d.hash), frac(d.exp), frac(d.pairing), 0, wall / reps};
  double used = b.hash_to_group + b.exponentiation + b.pairing;
  if (used > 1) {
    b.hash_to_group /= used;
    b.exponentiation /= used;
    b.pairing /= used;
    used = 1;
  }
  b.other = 1 - used;
  return b;
}

}  // namespace abe::bench
