#include <cmath>
#include <random>

#include "doctest.h"
#include "topo1d/monodromy.hpp"
#include "topo1d/structure.hpp"

using namespace topo1d;

TEST_CASE("unit cell validation") {
  CHECK_THROWS_AS(UnitCell({}), std::invalid_argument);
  CHECK_THROWS_AS(UnitCell({{2.0, 1.0, 0.5}, {1.0, 1.0, 0.4}}), std::invalid_argument);
  CHECK_THROWS_AS(UnitCell({{2.0, 1.0, -0.5}, {1.0, 1.0, 1.5}}), std::invalid_argument);
  CHECK_THROWS_AS(UnitCell({{cplx{NAN, 0.0}, 1.0, 1.0}}), std::invalid_argument);
  CHECK_NOTHROW(UnitCell({{2.0, 1.0, 0.3}, {1.0, 1.0, 0.7}}));
  CHECK_THROWS_AS(two_layer_cell(3.8, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("lossless and passive flags") {
  const UnitCell lossy = two_layer_cell(cplx{3.8, 0.05}, 0.42, 1.0);
  CHECK_FALSE(lossy.lossless());
  CHECK(lossy.passive());
  CHECK(lossy.lossless_part().lossless());
  CHECK_FALSE(two_layer_cell(cplx{3.8, -0.05}, 0.42, 1.0).passive());
}

TEST_CASE("polarization names") {
  CHECK(polarization_from_string("Epar") == Polarization::Epar);
  CHECK(polarization_from_string("TM") == Polarization::Hpar);
  CHECK_THROWS_AS(polarization_from_string("X"), std::invalid_argument);
  CHECK(std::string(to_string(Polarization::Hpar)) == "Hpar");
}

TEST_CASE("symmetric gauges of a two-slab cell") {
  const UnitCell raw = two_layer_cell(3.8, 0.42, 1.0);
  CHECK_FALSE(is_inversion_symmetric(raw));
  const auto origins = symmetric_origins(raw);
  REQUIRE(origins.size() == 2);
  CHECK(origins[0] == doctest::Approx(0.21).epsilon(1e-12));
  CHECK(origins[1] == doctest::Approx(0.71).epsilon(1e-12));
  const UnitCell centred = recenter(raw, origins[0]);
  CHECK(is_inversion_symmetric(centred));
  CHECK(is_inversion_symmetric(recenter(raw, origins[1])));

  const UnitCell sym = symmetric_two_layer_cell(3.8, 0.42, 1.0);
  REQUIRE(sym.size() == 3);
  CHECK(sym.layers()[0].width == doctest::Approx(0.21));
  CHECK(sym.layers()[1].width == doctest::Approx(0.58));
  CHECK(is_inversion_symmetric(sym));
  const auto so = symmetric_origins(sym);
  REQUIRE(so.size() == 2);
  CHECK(so[0] == 0.0);
  CHECK(so[1] == doctest::Approx(0.5));
}

TEST_CASE("homogeneous cell has the two default origins") {
  const UnitCell vac({{1.0, 1.0, 0.5}, {1.0, 1.0, 0.5}});
  CHECK(is_inversion_symmetric(vac));
  const auto o = symmetric_origins(vac);
  REQUIRE(o.size() == 2);
  CHECK(o[0] == 0.0);
  CHECK(o[1] == 0.5);
}

TEST_CASE("three-slab cell without a symmetric origin") {
  const UnitCell c({{2.0, 1.0, 0.2}, {3.0, 1.0, 0.3}, {1.0, 1.0, 0.5}});
  CHECK(symmetric_origins(c).empty());
}

TEST_CASE("recentering keeps the trace: random cells") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> eps(1.0, 8.0), w(0.05, 1.0), x(0.0, 1.0), k(0.1, 25.0);
  for (int n = 0; n < 200; ++n) {
    std::vector<Layer> layers;
    double total = 0.0;
    for (int j = 0; j < 3; ++j) {
      layers.push_back({eps(rng), 1.0, w(rng)});
      total += layers.back().width;
    }
    for (auto& l : layers) l.width /= total;
    layers.back().width = 1.0 - layers[0].width - layers[1].width;
    const UnitCell c(layers);
    const double x0 = x(rng), k0 = k(rng);
    const UnitCell r = recenter(c, x0);
    const cplx t0 = cell_monodromy(c, k0, Polarization::Epar).trace();
    const cplx t1 = cell_monodromy(r, k0, Polarization::Epar).trace();
    CHECK(std::abs(t0 - t1) < 1e-10 * (1.0 + std::abs(t0)));
  }
}

TEST_CASE("stack config") {
  const UnitCell a = symmetric_two_layer_cell(3.8, 0.42, 1.0);
  const StackConfig s(a, a, 3, 4);
  CHECK(s.length() == 7.0);
  CHECK_THROWS_AS(StackConfig(a, a, -1, 1), std::invalid_argument);
  CHECK_THROWS_AS(StackConfig(a, a, 1, 1, 0.0), std::invalid_argument);
}
