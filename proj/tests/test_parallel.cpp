// The OpenMP kernels must reproduce their serial references bit for bit.

#include <cstring>
#include <numbers>

#include "doctest.h"
#include "topo1d/chi.hpp"
#include "topo1d/parallel.hpp"
#include "topo1d/phase_diagram.hpp"
#include "topo1d/scattering.hpp"

using namespace topo1d;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
const UnitCell kA = symmetric_two_layer_cell(cplx{3.8, 0.05}, 0.42, 1.0);
const UnitCell kB = symmetric_two_layer_cell(4.2, 0.38, 1.0);

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }
bool same_bits(cplx a, cplx b) { return same_bits(a.real(), b.real()) && same_bits(a.imag(), b.imag()); }
}  // namespace

TEST_CASE("band structure") {
  const auto grid = uniform_grid(0.001, 4.0 * kTwoPi, 0.01);
  for (int threads : {1, 2, 4}) {
    set_max_threads(threads);
    const auto a = band_structure(kB, Polarization::Epar, grid);
    const auto b = serial::band_structure(kB, Polarization::Epar, grid);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      CHECK(same_bits(a.points[i].cls.trace, b.points[i].cls.trace));
      CHECK(a.points[i].branch == b.points[i].branch);
      CHECK(a.points[i].theta.has_value() == b.points[i].theta.has_value());
      if (a.points[i].theta) CHECK(same_bits(*a.points[i].theta, *b.points[i].theta));
    }
  }
  set_max_threads(0);
}

TEST_CASE("chi scan") {
  const ScanRect rect{2.0 * kTwoPi, 3.0 * kTwoPi, -0.5, 0.5};
  set_max_threads(3);
  const ChiScan a = chi_scan(kA, Polarization::Hpar, rect, 37, 19);
  set_max_threads(0);
  const ChiScan b = serial::chi_scan(kA, Polarization::Hpar, rect, 37, 19);
  REQUIRE(a.grid.size() == b.grid.size());
  for (std::size_t i = 0; i < a.grid.size(); ++i) {
    CHECK(a.grid[i].status == b.grid[i].status);
    REQUIRE(a.grid[i].chi.has_value() == b.grid[i].chi.has_value());
    if (a.grid[i].chi) {
      CHECK(same_bits(a.grid[i].chi->num(), b.grid[i].chi->num()));
      CHECK(same_bits(a.grid[i].chi->den(), b.grid[i].chi->den()));
    }
  }
}

TEST_CASE("transmission spectrum") {
  const StackConfig st(kA, kB, 10, 10);
  const auto grid = uniform_grid(0.01, 4.0 * kTwoPi, 0.003);
  set_max_threads(4);
  const Spectrum a = transmission_spectrum(st, Polarization::Epar, grid);
  set_max_threads(0);
  const Spectrum b = serial::transmission_spectrum(st, Polarization::Epar, grid);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(same_bits(a.points[i].r, b.points[i].r));
    CHECK(same_bits(a.points[i].t, b.points[i].t));
  }
  CHECK(same_bits(a.maxDetDrift, b.maxDetDrift));
}

TEST_CASE("phase sweep") {
  SweepParams s;
  s.eps1Steps = 7;
  s.h1Steps = 6;
  set_max_threads(2);
  const PhaseGrid a = sweep(s);
  set_max_threads(0);
  const PhaseGrid b = serial::sweep(s);
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].index == b.points[i].index);
    CHECK(same_bits(a.points[i].gapWidth, b.points[i].gapWidth));
  }
}

TEST_CASE("exceptions propagate out of the parallel region") {
  CHECK_THROWS_AS(parallel_for(100, [](std::size_t i) {
                    if (i == 42) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
}

TEST_CASE("thread cap") {
  set_max_threads(2);
  CHECK(max_threads() <= 2);
  set_max_threads(0);
  CHECK(max_threads() >= 1);
}
