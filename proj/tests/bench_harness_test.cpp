#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "abe/bench/harness.hpp"
#include "abe/errors.hpp"
#include "abe/io.hpp"

using namespace abe;
using namespace abe::bench;
using abe::scheme::SchemeId;

namespace {

BenchConfig small_config() {
  BenchConfig c;
  c.levels = {SecurityLevel::S80};
  c.attr_counts = {1, 2, 3, 4, 5};
  c.ops = {Op::Encrypt};
  c.trials = 3;
  c.warmup = 0;
  return c;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Energy, ProductOfDeltaAndTime) {
  DeviceProfile p{"x", 1000, 160};
  EXPECT_NEAR(estimate_energy(p, 5000), 0.8, 1e-12);
  p.active_delta_mw = 0;
  EXPECT_EQ(estimate_energy(p, 5000), 0.0);
}

TEST(Energy, EdisonCalibration) {
  const auto& e = device_profile("edison");
  EXPECT_NEAR(e.active_delta_mw, 180.8, 0.05);
  EXPECT_NEAR(estimate_energy(e, 9680), 1.75, 1e-9);
  EXPECT_DOUBLE_EQ(e.baseline_mw, 1335.84);
}

TEST(Energy, AllProfilesPositive) {
  EXPECT_EQ(device_profiles().size(), 4u);
  for (const auto& p : device_profiles()) {
    EXPECT_GT(p.baseline_mw, 0);
    EXPECT_GT(p.active_delta_mw, 0);
  }
  EXPECT_THROW(device_profile("pdp11"), InvalidArgument);
}

TEST(Config, Validation) {
  auto c = small_config();
  EXPECT_NO_THROW(validate(c));
  c.attr_counts = {0};
  EXPECT_THROW(validate(c), InvalidArgument);
  c.attr_counts = {65};
  EXPECT_THROW(validate(c), InvalidArgument);
  c = small_config();
  c.trials = 2;
  EXPECT_THROW(validate(c), InvalidArgument);
  c = small_config();
  c.device = "nope";
  EXPECT_THROW(validate(c), InvalidArgument);
  c = small_config();
  c.levels.clear();
  EXPECT_THROW(validate(c), InvalidArgument);
}

TEST(Stats, MedianAndInterval) {
  EXPECT_DOUBLE_EQ(median({3, 1, 2}), 2);
  EXPECT_DOUBLE_EQ(median({4, 1, 2, 3}), 2.5);
  EXPECT_DOUBLE_EQ(ci95_half_width({5, 5, 5}), 0);
  // sd = 1, n = 3, t(0.975, 2) = 4.302653
  EXPECT_NEAR(ci95_half_width({1, 2, 3}), 4.302653 / std::sqrt(3.0), 1e-5);
}

TEST(Stats, LinearFit) {
  auto f = fit_line({1, 2, 3, 4}, {3, 5, 7, 9});
  EXPECT_NEAR(f.slope, 2, 1e-12);
  EXPECT_NEAR(f.intercept, 1, 1e-12);
  EXPECT_NEAR(f.r2, 1, 1e-12);
  auto g = fit_line({1, 2, 3, 4}, {1, 3, 2, 4});
  EXPECT_LT(g.r2, 0.9);
  EXPECT_THROW(fit_line({1}, {1}), InvalidArgument);
  EXPECT_THROW(fit_line({1, 1}, {1, 2}), InvalidArgument);
}

TEST(Run, CpEncryptCountsFollowLaw) {
  auto records = run_bench(small_config());
  ASSERT_EQ(records.size(), 15u);
  for (const auto& r : records) {
    EXPECT_EQ(r.ops.exponentiations(), 2 * r.n_attrs + 2) << r.n_attrs;
    EXPECT_EQ(r.ops.hash_to_group, r.n_attrs);
    EXPECT_EQ(r.ops.pairings, 0u);
    EXPECT_GT(r.wall_time_ms, 0);
    EXPECT_NEAR(r.energy_j, estimate_energy(device_profile("edison"), r.wall_time_ms), 1e-12);
  }
  auto cells = summarize(records);
  ASSERT_EQ(cells.size(), 5u);
  for (const auto& c : cells) {
    EXPECT_EQ(c.trials, 3u);
    EXPECT_GE(c.ci95_ms, 0);
  }
}

TEST(Run, DecryptCountsAcrossShapesAndSchemes) {
  BenchConfig c;
  c.schemes = {SchemeId::CP, SchemeId::KP};
  c.levels = {SecurityLevel::S80};
  c.attr_counts = {4};
  c.ops = {Op::Encrypt, Op::Decrypt};
  c.trials = 3;
  c.warmup = 0;
  auto records = run_bench(c);
  ASSERT_EQ(records.size(), 12u);
  for (const auto& r : records) {
    if (r.scheme == SchemeId::CP && r.op == Op::Decrypt) {
      EXPECT_EQ(r.ops.pairings, 2u * 4 + 1);
      EXPECT_EQ(r.ops.exp_gt, 4u);
    }
    if (r.scheme == SchemeId::KP && r.op == Op::Encrypt) EXPECT_EQ(r.ops.exponentiations(), 5u);
    if (r.scheme == SchemeId::KP && r.op == Op::Decrypt) EXPECT_EQ(r.ops.pairings, 4u);
  }

  c.shape = PolicyShape::OrChain;
  for (const auto& r : run_bench(c))
    if (r.scheme == SchemeId::CP && r.op == Op::Decrypt) EXPECT_EQ(r.ops.pairings, 3u);
}

TEST(Run, CountersIdenticalAcrossTrialsAndRuns) {
  auto c = small_config();
  c.shape = PolicyShape::Random;
  c.ops = {Op::Encrypt, Op::Decrypt};
  auto a = run_bench(c);
  auto b = run_bench(c);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].ops, b[i].ops);
    if (a[i].trial > 1) EXPECT_EQ(a[i].ops, a[i - 1].ops);
  }
}

TEST(Output, CsvShape) {
  auto c = small_config();
  c.trials = 5;
  c.attr_counts = {2};
  std::int64_t seen = 0;
  auto records = run_bench(c, [&](const BenchRecord&) { ++seen; });
  EXPECT_EQ(seen, 5);
  std::ostringstream csv;
  write_csv(csv, records);
  auto rows = lines(csv.str());
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0],
            "scheme,op,level,n_attrs,trial,wall_time_ms,peak_mem_bytes,exp_g1,exp_g2,exp_gt,pairings,hash_to_group,"
            "energy_est_j");
  EXPECT_EQ(rows[1].rfind("cp,encrypt,80,2,1,", 0), 0u);

  std::ostringstream sum;
  write_summary_csv(sum, summarize(records));
  auto srows = lines(sum.str());
  ASSERT_EQ(srows.size(), 2u);
  EXPECT_NE(srows[0].find("mean_ms,ci95_ms"), std::string::npos);
  EXPECT_EQ(srows[1].rfind("cp,encrypt,80,2,5,", 0), 0u);
}

TEST(Output, SvgAndAtomicWrite) {
  auto cells = summarize(run_bench(small_config()));
  auto svg = svg_plot(cells, SchemeId::CP, Op::Encrypt);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("80 bits"), std::string::npos);
  EXPECT_NE(svg.find("<polyline"), std::string::npos);

  auto dir = std::filesystem::temp_directory_path() / "abe_bench_test";
  std::filesystem::create_directories(dir);
  auto path = (dir / "plot.svg").string();
  write_file_atomic(path, std::string_view(svg));
  std::ifstream in(path);
  std::stringstream back;
  back << in.rdbuf();
  EXPECT_EQ(back.str(), svg);
  EXPECT_FALSE(std::filesystem::exists(path + ".tmp"));
  EXPECT_THROW(write_file_atomic(dir / "missing" / "x.csv", std::string_view("x")), IoError);
  std::filesystem::remove_all(dir);
}

TEST(Profile, FractionsBounded) {
  for (auto op : {Op::Encrypt, Op::Decrypt}) {
    for (std::uint32_t n : {1u, 8u}) {
      auto b = profile_breakdown(SchemeId::CP, op, n, SecurityLevel::S80, PolicyShape::AndChain, 2);
      for (double f : {b.hash_to_group, b.exponentiation, b.pairing, b.other}) {
        EXPECT_GE(f, 0);
        EXPECT_LE(f, 1);
      }
      EXPECT_LE(b.hash_to_group + b.exponentiation + b.pairing, 1 + 1e-9);
      EXPECT_GT(b.wall_ms, 0);
    }
  }
  auto enc = profile_breakdown(SchemeId::CP, Op::Encrypt, 8, SecurityLevel::S80);
  EXPECT_GT(enc.hash_to_group + enc.exponentiation, 0.5);
  auto dec = profile_breakdown(SchemeId::CP, Op::Decrypt, 8, SecurityLevel::S80);
  EXPECT_GT(dec.pairing, 0.5);
}

TEST(Memory, DeltaIsBestEffort) {
  std::uint64_t d = peak_memory_delta([] {
    std::vector<char> big(32 << 20, 1);
    volatile char sink = big[big.size() / 2];
    (void)sink;
  });
  // Zero is allowed where the kernel refuses to reset the high-water mark.
  if (d != 0) EXPECT_GE(d, 16u << 20);
}
