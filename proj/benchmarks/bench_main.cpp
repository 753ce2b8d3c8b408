#include <cmath>

#include <benchmark/benchmark.h>

#include "fdom/holonomy.hpp"
#include "fdom/spectrum.hpp"
#include "fdom/wolf.hpp"

using namespace fdom;

static void BM_HarmonicFlow(benchmark::State& state) {
  const FundamentalDomainMesh m = build_regular_domain(2, static_cast<int>(state.range(0)));
  const Representation j0 = m.base_holonomy();
  for (auto _ : state) {
    EquivariantVertexMap f = random_map(m, j0, 1, 0.3);
    benchmark::DoNotOptimize(harmonic_flow(m, f).energy);
  }
  state.counters["vertices"] = static_cast<double>(m.vertex_count());
}
BENCHMARK(BM_HarmonicFlow)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

static void BM_Wolf(benchmark::State& state) {
  const FundamentalDomainMesh m = build_regular_domain(2, static_cast<int>(state.range(0)));
  const auto n = static_cast<Eigen::Index>(m.vertex_count());
  ScalarField q(n);
  for (Eigen::Index i = 0; i < n; ++i) q[i] = 0.2 + 0.1 * std::sin(0.37 * static_cast<double>(i));
  for (auto _ : state) benchmark::DoNotOptimize(solve_wolf_at_vertices(m, q).residual);
}
BENCHMARK(BM_Wolf)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

static void BM_Uniformize(benchmark::State& state) {
  const FundamentalDomainMesh m = build_regular_domain(2, static_cast<int>(state.range(0)));
  EdgeLengths l(m.face_count());
  for (std::size_t f = 0; f < m.face_count(); ++f)
    for (int k = 0; k < 3; ++k) {
      const auto [g, kg] = m.twin(f, k);
      l[f][static_cast<std::size_t>(k)] = m.edge_length(f, k) * (1.0 + 0.01 * std::sin(static_cast<double>(std::min(f, g))));
    }
  for (auto _ : state) benchmark::DoNotOptimize(uniformize_lengths(m, l).max_angle_defect);
}
BENCHMARK(BM_Uniformize)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

static void BM_Spectrum(benchmark::State& state) {
  const Representation j0 = build_regular_domain(2, 1).base_holonomy();
  const auto words = enumerate_conjugacy_words(j0.presentation, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(length_spectrum(j0, words).size());
  state.counters["words"] = static_cast<double>(words.size());
}
BENCHMARK(BM_Spectrum)->DenseRange(4, 7)->Unit(benchmark::kMillisecond);

static void BM_CriticalExponent(benchmark::State& state) {
  const Representation j0 = build_regular_domain(2, 1).base_holonomy();
  for (auto _ : state) benchmark::DoNotOptimize(critical_exponent_estimate(j0, static_cast<double>(state.range(0))).delta);
}
BENCHMARK(BM_CriticalExponent)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
