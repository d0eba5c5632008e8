#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "topo1d/chi.hpp"

using namespace topo1d;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TEST_CASE("homogeneous medium: chi = -i / (k0 n)") {
  const UnitCell c({{2.25, 1.0, 1.0}});
  for (double k : {0.7, 3.0, 11.0}) {
    const ChiSample s = chi_continued(c, k, Polarization::Epar, 1e-9);
    REQUIRE(s.status == ChiStatus::Regular);
    REQUIRE(s.chi);
    const cplx expected{0.0, -1.0 / (k * 1.5)};
    CHECK(std::abs(s.chi->value() - expected) < 1e-7 * std::abs(expected));
  }
}

TEST_CASE("projective values") {
  const ChiValue zero = ChiValue::finite(0.0), inf = ChiValue::infinity();
  CHECK(chordal_distance(zero, inf) == doctest::Approx(1.0));
  CHECK(chordal_distance(inf, inf) == 0.0);
  CHECK(inf.magnitude() == std::numeric_limits<double>::infinity());
  CHECK(zero.sphere().z == doctest::Approx(1.0));
  CHECK(inf.sphere().z == doctest::Approx(-1.0));
  CHECK_THROWS_AS(ChiValue(0.0, 0.0), std::invalid_argument);
  const ChiValue a = ChiValue::finite({1.0, 2.0}), b = ChiValue({2.0, 4.0}, 2.0);
  CHECK(chordal_distance(a, b) < 1e-16);
  CHECK(chordal_distance(a, ChiValue::finite(3.0)) == doctest::Approx(chordal_distance(ChiValue::finite(3.0), a)));
}

TEST_CASE("status at degenerate monodromies") {
  CHECK(chi_value(Matrix2::identity()).status == ChiStatus::Transition);
  CHECK_FALSE(chi_value(-1.0 * Matrix2::identity()).chi);
  const ChiSample pole = chi_value({1.0, 2.0, 0.0, 1.0});
  CHECK(pole.status == ChiStatus::Ramification);
  REQUIRE(pole.chi);
  CHECK(pole.chi->is_infinite());
  const ChiSample zero = chi_value({1.0, 0.0, 2.0, 1.0});
  REQUIRE(zero.chi);
  CHECK(zero.chi->magnitude() == 0.0);
}

TEST_CASE("chi pair relation holds only in a symmetric gauge") {
  const UnitCell sym = symmetric_two_layer_cell(3.8, 0.42, 1.0);
  const UnitCell asym = two_layer_cell(3.8, 0.42, 1.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> kr(0.2, 25.0), ki(-0.3, 0.3);
  int asym_broken = 0;
  for (int n = 0; n < 100; ++n) {
    const cplx k{kr(rng), ki(rng)};
    const auto s = chi_pair_relation_check(sym, Polarization::Epar, k);
    REQUIRE(s);
    CHECK(*s < 1e-9);
    const auto a = chi_pair_relation_check(asym, Polarization::Epar, k);
    if (a && *a > 1e-3) ++asym_broken;
  }
  CHECK(asym_broken > 90);
}

TEST_CASE("scan grid layout and file formats") {
  const UnitCell c = symmetric_two_layer_cell(3.8, 0.42, 1.0);
  const ScanRect rect{2.4 * kTwoPi, 2.6 * kTwoPi, -0.2, 0.2};
  const ChiScan scan = chi_scan(c, Polarization::Epar, rect, 21, 5);
  CHECK(scan.grid.size() == 105u);
  CHECK(scan.k0_at(0, 0) == cplx{rect.reMin, rect.imMin});
  CHECK(scan.k0_at(20, 4) == cplx{rect.reMax, rect.imMax});
  const cplx k = scan.k0_at(7, 3);
  const ChiSample direct = chi_value(cell_monodromy(c, k, Polarization::Epar));
  REQUIRE(scan.at(7, 3).chi);
  CHECK(chordal_distance(*scan.at(7, 3).chi, *direct.chi) == 0.0);

  std::stringstream bin;
  write_scan_binary(bin, scan);
  const ScanGridFile f = read_scan_binary(bin);
  CHECK(f.nx == 21);
  CHECK(f.ny == 5);
  CHECK(f.rect.imMax == rect.imMax);
  REQUIRE(f.magnitudes.size() == scan.grid.size());
  for (std::size_t i = 0; i < f.magnitudes.size(); ++i) CHECK(f.magnitudes[i] == scan.grid[i].chi->magnitude());

  std::stringstream bad("NOTASCAN");
  CHECK_THROWS(read_scan_binary(bad));

  std::ostringstream csv;
  write_scan_csv(csv, scan);
  const std::string text = csv.str();
  CHECK(text.rfind("k0_re,k0_im,abs_chi,arg_chi,flag\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 106);
  CHECK_THROWS_AS(chi_scan(c, Polarization::Epar, rect, 1, 5), std::invalid_argument);
}

TEST_CASE("limiting absorption needs a positive offset") {
  const UnitCell c = symmetric_two_layer_cell(3.8, 0.42, 1.0);
  CHECK_THROWS_AS(chi_continued(c, 1.0, Polarization::Epar, 0.0), std::invalid_argument);
}
