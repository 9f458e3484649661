#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "abe/pairing/suite.hpp"
#include "abe/scheme/common.hpp"

namespace abe::bench {

enum class Op : std::uint8_t { Encrypt, Decrypt };
enum class PolicyShape : std::uint8_t { AndChain, OrChain, Random };

const char* to_string(Op op);
const char* to_string(PolicyShape shape);
Op parse_op(std::string_view s);
PolicyShape parse_shape(std::string_view s);

struct DeviceProfile {
  std::string name;
  double baseline_mw;
  // Extra draw while computing; energy is modelled as delta x time.
  double active_delta_mw;
};

// Built-in boards. Deltas are calibrated from published (time, energy) pairs.
const std::vector<DeviceProfile>& device_profiles();
const DeviceProfile& device_profile(std::string_view name);

double estimate_energy(const DeviceProfile& profile, double wall_time_ms);

struct BenchConfig {
  std::vector<scheme::SchemeId> schemes{scheme::SchemeId::CP};
  std::vector<SecurityLevel> levels{SecurityLevel::S80, SecurityLevel::S112, SecurityLevel::S128};
  std::vector<std::uint32_t> attr_counts;
  std::vector<Op> ops{Op::Encrypt, Op::Decrypt};
  std::uint32_t trials = 5;
  std::uint32_t warmup = 1;
  PolicyShape shape = PolicyShape::AndChain;
  std::string device = "edison";
  std::uint64_t seed = 1;
};

// Throws InvalidArgument.
void validate(const BenchConfig& config);

struct BenchRecord {
  scheme::SchemeId scheme;
  Op op;
  SecurityLevel level;
  std::uint32_t n_attrs;
  std::uint32_t trial;
  double wall_time_ms;
  std::uint64_t peak_mem_bytes;
  OpCounters ops;
  double energy_j;
};

struct CellSummary {
  scheme::SchemeId scheme;
  Op op;
  SecurityLevel level;
  std::uint32_t n_attrs;
  std::size_t trials;
  double mean_ms;
  double ci95_ms;  // half width, Student t
  double median_ms;
};

using Progress = std::function<void(const BenchRecord&)>;

std::vector<BenchRecord> run_bench(const BenchConfig& config, const Progress& progress = {});
std::vector<CellSummary> summarize(const std::vector<BenchRecord>& records);

// Half width of the 95% confidence interval of the mean.
double ci95_half_width(const std::vector<double>& xs);
double median(std::vector<double> xs);

struct LinearFit {
  double slope;
  double intercept;
  double r2;
};
LinearFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

void write_csv(std::ostream& os, const std::vector<BenchRecord>& records);
void write_summary_csv(std::ostream& os, const std::vector<CellSummary>& cells);
// Mean time against attribute count, one line per level, for one scheme/op.
std::string svg_plot(const std::vector<CellSummary>& cells, scheme::SchemeId scheme, Op op);

struct Breakdown {
  double hash_to_group;
  double exponentiation;
  double pairing;
  double other;
  double wall_ms;
};

// Share of wall time per operation class for one call, averaged over reps.
Breakdown profile_breakdown(scheme::SchemeId scheme, Op op, std::uint32_t n_attrs, SecurityLevel level,
                            PolicyShape shape = PolicyShape::AndChain, std::uint32_t reps = 3,
                            std::uint64_t seed = 1);

// Resident set growth while fn runs, best effort (0 where unsupported).
std::uint64_t peak_memory_delta(const std::function<void()>& fn);

}  // namespace abe::bench
