#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "doctest.h"
#include "topo1d/interface.hpp"
#include "topo1d/scattering.hpp"

using namespace topo1d;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
const UnitCell kA = symmetric_two_layer_cell(3.8, 0.42, 1.0);
const UnitCell kB = symmetric_two_layer_cell(4.2, 0.38, 1.0);

UnitCell mirrored(const UnitCell& c) {
  std::vector<Layer> l(c.layers().rbegin(), c.layers().rend());
  return UnitCell(l);
}
}  // namespace

TEST_CASE("total transfer") {
  CHECK(total_transfer(StackConfig(kA, kB, 0, 0), 5.0, Polarization::Epar).value.max_abs() == 1.0);
  const Matrix2 m = cell_monodromy(kA, 5.0, Polarization::Epar);
  const Matrix2 t = total_transfer(StackConfig(kA, kB, 2, 0), 5.0, Polarization::Epar).value;
  CHECK((t - m * m).max_abs() < 1e-12);
}

TEST_CASE("determinant drift of the 10 + 10 stack") {
  const StackConfig st(kA, kB, 10, 10);
  const Spectrum s = transmission_spectrum(st, Polarization::Epar, uniform_grid(5e-4 * kTwoPi, 4.0 * kTwoPi, 5e-4 * kTwoPi));
  CHECK(s.maxDetDrift < 1e-9);
}

TEST_CASE("trivial stacks") {
  const RT empty = rt_coefficients(StackConfig(kA, kB, 0, 0), 3.0, Polarization::Epar);
  CHECK(std::abs(empty.r) < 1e-15);
  CHECK(std::abs(empty.t - 1.0) < 1e-15);
  const UnitCell vac({{1.0, 1.0, 1.0}});
  for (double k : {0.5, 4.0, 19.0}) {
    const RT rt = rt_coefficients(StackConfig(vac, vac, 1, 0), k, Polarization::Epar);
    CHECK(std::abs(rt.r) < 1e-14);
    CHECK(std::abs(std::abs(rt.t) - 1.0) < 1e-14);
    CHECK(std::abs(rt.t - 1.0) < 1e-13);
  }
  CHECK_THROWS_AS(rt_coefficients(StackConfig(kA, kB, 1, 1), 0.0, Polarization::Epar), std::invalid_argument);
}

TEST_CASE("single slab against the Fabry-Perot formula") {
  // Slab of index n and thickness d in vacuum: t = 1 / (cos(nkd) - i (n + 1/n)/2 sin(nkd)) e^{-ikd}.
  const UnitCell slab({{2.25, 1.0, 1.0}});
  for (double k : {0.9, 3.3, 10.0}) {
    const RT rt = rt_coefficients(StackConfig(slab, slab, 1, 0), k, Polarization::Epar);
    const double n = 1.5, phi = n * k;
    const cplx t_ref = std::exp(cplx{0.0, -k}) / cplx{std::cos(phi), -0.5 * (n + 1.0 / n) * std::sin(phi)};
    CHECK(std::abs(rt.t - t_ref) < 1e-13);
  }
}

TEST_CASE("energy conservation and passivity") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> k(0.01, 4.0 * kTwoPi);
  const StackConfig lossless(kA, kB, 10, 10);
  const StackConfig lossy(symmetric_two_layer_cell(cplx{3.8, 0.05}, 0.42, 1.0), kB, 10, 10);
  for (int n = 0; n < 500; ++n) {
    const double k0 = k(rng);
    for (auto pol : {Polarization::Epar, Polarization::Hpar}) {
      const RT a = rt_coefficients(lossless, k0, pol);
      CHECK(std::abs(std::norm(a.r) + std::norm(a.t) - 1.0) < 1e-10);
      const RT b = rt_coefficients(lossy, k0, pol);
      CHECK(std::norm(b.r) + std::norm(b.t) <= 1.0 + 1e-10);
    }
  }
}

TEST_CASE("reciprocity under reversal of the stack") {
  const UnitCell a_asym = two_layer_cell(cplx{3.8, 0.05}, 0.42, 1.0);
  const UnitCell b_asym = two_layer_cell(4.2, 0.38, 1.5);
  const StackConfig fwd(a_asym, b_asym, 7, 9);
  const StackConfig rev(mirrored(b_asym), mirrored(a_asym), 9, 7);
  for (double k : {1.1, 6.0, 15.72, 22.0}) {
    const double t1 = std::norm(rt_coefficients(fwd, k, Polarization::Epar).t);
    const double t2 = std::norm(rt_coefficients(rev, k, Polarization::Epar).t);
    CHECK(std::abs(t1 - t2) < 1e-10);
  }
}

TEST_CASE("transmission decays geometrically with N inside a shared gap") {
  const Interval gap = common_gaps(kA, kB, Polarization::Epar, 0.2 * kTwoPi, 0.5 * kTwoPi)[0].range;
  const double k = gap.lo + 0.3 * gap.width();
  std::vector<double> x, y;
  for (int n = 2; n <= 14; n += 2) {
    x.push_back(n);
    y.push_back(std::log(std::norm(rt_coefficients(StackConfig(kA, kB, n, n), k, Polarization::Epar).t)));
  }
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double r2 = sxy * sxy / (sxx * syy);
  CHECK(sxy < 0.0);
  CHECK(r2 > 0.99);
}

TEST_CASE("edge-mode peak converges to the semi-infinite root as N grows") {
  Interval gap;
  for (const auto& g : common_gaps(kA, kB, Polarization::Epar, 2.4 * kTwoPi, 2.6 * kTwoPi)) gap = g.range;
  const auto modes = edge_mode_search(kA, kB, Polarization::Epar, gap);
  REQUIRE(modes.size() == 1);
  const double k0star = modes[0].k0star.real();
  const auto grid = uniform_grid(2.49 * kTwoPi, 2.515 * kTwoPi, 1e-6 * kTwoPi);
  double prev_diff = 1e300, prev_fwhm = 1e300;
  for (int n : {5, 10, 15}) {
    const auto peaks = peak_detect(transmission_spectrum(StackConfig(kA, kB, n, n), Polarization::Epar, grid), {gap});
    REQUIRE(peaks.size() == 1);
    const double diff = std::abs(peaks[0].k0peak - k0star);
    CHECK(diff < prev_diff);
    CHECK(peaks[0].fwhm < prev_fwhm);
    prev_diff = diff;
    prev_fwhm = peaks[0].fwhm;
  }
  CHECK(prev_diff < 2e-5 * kTwoPi);
}

TEST_CASE("peak detection") {
  const auto grid = uniform_grid(2.4 * kTwoPi, 2.6 * kTwoPi, 1e-5 * kTwoPi);
  std::vector<Interval> gaps;
  for (const auto& g : common_gaps(kA, kB, Polarization::Epar, grid.front(), grid.back())) gaps.push_back(g.range);
  REQUIRE(gaps.size() == 1);
  const auto peaks = peak_detect(transmission_spectrum(StackConfig(kA, kB, 10, 10), Polarization::Epar, grid), gaps);
  REQUIRE(peaks.size() == 1);
  CHECK(gaps[0].contains_strictly(peaks[0].k0peak));
  CHECK_FALSE(peaks[0].underResolved);
  CHECK(peaks[0].height > 0.5);
  CHECK(peaks[0].fwhm > 0.0);

  std::vector<Interval> own;
  for (const auto& g : gaps_in(kA, Polarization::Epar, grid.front(), grid.back())) own.push_back({g.lower, g.upper});
  CHECK(peak_detect(transmission_spectrum(StackConfig(kA, kA, 10, 10), Polarization::Epar, grid), own).empty());

  std::ostringstream os;
  write_peaks_json(os, peaks);
  CHECK(os.str().find("\"k0peak\"") != std::string::npos);
}

TEST_CASE("peak refinement on a synthetic parabola") {
  Spectrum s;
  for (int i = 0; i <= 100; ++i) {
    const double k = 1.0 + 0.01 * i;
    const double T = std::max(0.01, 1.0 - 400.0 * (k - 1.5031) * (k - 1.5031));
    s.points.push_back({k, 0.0, 0.0, T, 1.0 - T});
  }
  const auto peaks = peak_detect(s, {{1.0, 2.0}});
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].k0peak == doctest::Approx(1.5031).epsilon(1e-10));
  CHECK(peaks[0].height == doctest::Approx(1.0).epsilon(1e-10));
  // Half maximum at |k - k*| = sqrt(1/800); linear interpolation on the parabola widens it slightly.
  CHECK(peaks[0].fwhm == doctest::Approx(2.0 * std::sqrt(1.0 / 800.0)).epsilon(2e-2));
}

TEST_CASE("spectrum CSV and grids") {
  const Spectrum s = transmission_spectrum(StackConfig(kA, kB, 1, 1), Polarization::Epar, {1.0, 2.0});
  std::ostringstream os;
  write_spectrum_csv(os, s);
  CHECK(os.str().rfind("k0,T,R,r_re,r_im,t_re,t_im\n1.0000000000000000e+00,", 0) == 0);
  const auto g = uniform_grid(0.0, 1.0, 0.25);
  CHECK(g.size() == 5);
  CHECK(g.back() == 1.0);
  CHECK_THROWS_AS(uniform_grid(0.0, 1.0, 0.0), std::invalid_argument);
}
