#include <benchmark/benchmark.h>

#include "abe/container/container.hpp"
#include "abe/rng.hpp"
#include "abe/scheme/cp_abe.hpp"
#include "abe/scheme/kp_abe.hpp"
#include "abe/tree/access_tree.hpp"

namespace {

using namespace abe;

// Args: security bits, attribute count.
SecurityLevel level_of(const benchmark::State& state) { return level_from_bits(static_cast<int>(state.range(0))); }

std::set<std::string> attrs(std::int64_t n) {
  std::set<std::string> out;
  for (std::int64_t i = 0; i < n; ++i) out.insert("a" + std::to_string(i));
  return out;
}

tree::AccessTree and_chain(std::int64_t n) {
  if (n == 1) return tree::AccessTree::leaf("a0");
  std::vector<tree::AccessTree> kids;
  for (std::int64_t i = 0; i < n; ++i) kids.push_back(tree::AccessTree::leaf("a" + std::to_string(i)));
  return tree::AccessTree::threshold(static_cast<std::uint32_t>(n), std::move(kids));
}

void BM_CpEncrypt(benchmark::State& state) {
  PairingSuite s(level_of(state));
  DeterministicRng rng(1);
  auto [pp, mk] = scheme::cp_setup(s, rng);
  auto t = and_chain(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(scheme::cp_encrypt(s, pp, t, rng));
}

void BM_CpDecrypt(benchmark::State& state) {
  PairingSuite s(level_of(state));
  DeterministicRng rng(2);
  auto [pp, mk] = scheme::cp_setup(s, rng);
  auto key = scheme::cp_keygen(s, pp, mk, attrs(state.range(1)), rng);
  auto ct = scheme::cp_encrypt(s, pp, and_chain(state.range(1)), rng).first;
  for (auto _ : state) benchmark::DoNotOptimize(scheme::cp_decrypt(s, pp, key, ct));
}

void BM_CpKeygen(benchmark::State& state) {
  PairingSuite s(level_of(state));
  DeterministicRng rng(3);
  auto [pp, mk] = scheme::cp_setup(s, rng);
  auto bag = attrs(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(scheme::cp_keygen(s, pp, mk, bag, rng));
}

void BM_KpEncrypt(benchmark::State& state) {
  PairingSuite s(level_of(state));
  DeterministicRng rng(4);
  auto [pp, mk] = scheme::kp_setup(s, rng);
  scheme::KpUniverse u(s.level());
  auto bag = attrs(state.range(1));
  for (const auto& a : bag) u.register_attribute(s, a, rng);
  for (auto _ : state) benchmark::DoNotOptimize(scheme::kp_encrypt(s, pp, u, bag, rng));
}

void BM_KpDecrypt(benchmark::State& state) {
  PairingSuite s(level_of(state));
  DeterministicRng rng(5);
  auto [pp, mk] = scheme::kp_setup(s, rng);
  scheme::KpUniverse u(s.level());
  auto bag = attrs(state.range(1));
  for (const auto& a : bag) u.register_attribute(s, a, rng);
  auto key = scheme::kp_keygen(s, pp, mk, u, and_chain(state.range(1)), rng);
  auto ct = scheme::kp_encrypt(s, pp, u, bag, rng).first;
  for (auto _ : state) benchmark::DoNotOptimize(scheme::kp_decrypt(s, pp, key, ct));
}

// Args: security bits, payload bytes. Policy is a 5-attribute AND.
void BM_SealOpen(benchmark::State& state) {
  PairingSuite s(level_of(state));
  DeterministicRng rng(6);
  auto [pp, mk] = scheme::cp_setup(s, rng);
  auto key = scheme::cp_keygen(s, pp, mk, attrs(5), rng);
  Bytes payload(static_cast<std::size_t>(state.range(1)), 0x42);
  for (auto _ : state) {
    Bytes sealed = container::seal_cp(s, pp, "a0 and a1 and a2 and a3 and a4", payload, rng);
    benchmark::DoNotOptimize(container::open_cp(s, pp, key, sealed));
  }
  state.SetBytesProcessed(state.iterations() * state.range(1));
}

void BM_CompileNumeric(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(tree::compile("(role=nurse and age >= 21) or level > 1000000"));
}

void scheme_args(benchmark::internal::Benchmark* b) {
  for (int bits : {80, 112, 128})
    for (int n : {1, 5, 10, 20, 30}) b->Args({bits, n});
  b->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_CpEncrypt)->Apply(scheme_args);
BENCHMARK(BM_CpDecrypt)->Apply(scheme_args);
BENCHMARK(BM_CpKeygen)->Apply(scheme_args);
BENCHMARK(BM_KpEncrypt)->Apply(scheme_args);
BENCHMARK(BM_KpDecrypt)->Apply(scheme_args);
BENCHMARK(BM_SealOpen)->Args({80, 1500})->Args({112, 1500})->Args({128, 1500})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CompileNumeric);

BENCHMARK_MAIN();
