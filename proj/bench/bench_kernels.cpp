// Serial reference against the OpenMP kernels. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <numbers>

#include "topo1d/chi.hpp"
#include "topo1d/monodromy.hpp"
#include "topo1d/phase_diagram.hpp"
#include "topo1d/scattering.hpp"

using namespace topo1d;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const UnitCell kA = symmetric_two_layer_cell(3.8, 0.42, 1.0);
const UnitCell kB = symmetric_two_layer_cell(4.2, 0.38, 1.0);
const std::vector<double> kGrid = uniform_grid(5e-4 * kTwoPi, 4.0 * kTwoPi, 5e-4 * kTwoPi);
const ScanRect kRect{0.1, 4.0 * kTwoPi, -2.0, 2.0};

SweepParams small_sweep() {
  SweepParams s;
  s.eps1Steps = 12;
  s.h1Steps = 12;
  return s;
}

void BM_band_structure_serial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(serial::band_structure(kA, Polarization::Epar, kGrid));
}
void BM_band_structure_omp(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(band_structure(kA, Polarization::Epar, kGrid));
}
void BM_chi_scan_serial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(serial::chi_scan(kA, Polarization::Epar, kRect, 200, 100));
}
void BM_chi_scan_omp(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(chi_scan(kA, Polarization::Epar, kRect, 200, 100));
}
void BM_transmission_serial(benchmark::State& st) {
  const StackConfig stack(kA, kB, 10, 10);
  for (auto _ : st) benchmark::DoNotOptimize(serial::transmission_spectrum(stack, Polarization::Epar, kGrid));
}
void BM_transmission_omp(benchmark::State& st) {
  const StackConfig stack(kA, kB, 10, 10);
  for (auto _ : st) benchmark::DoNotOptimize(transmission_spectrum(stack, Polarization::Epar, kGrid));
}
void BM_sweep_serial(benchmark::State& st) {
  const SweepParams s = small_sweep();
  for (auto _ : st) benchmark::DoNotOptimize(serial::sweep(s));
}
void BM_sweep_omp(benchmark::State& st) {
  const SweepParams s = small_sweep();
  for (auto _ : st) benchmark::DoNotOptimize(sweep(s));
}

}  // namespace

BENCHMARK(BM_band_structure_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_band_structure_omp)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_chi_scan_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_chi_scan_omp)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_transmission_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_transmission_omp)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sweep_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sweep_omp)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
