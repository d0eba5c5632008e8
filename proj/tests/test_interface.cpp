#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "topo1d/interface.hpp"

using namespace topo1d;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
const UnitCell kA = symmetric_two_layer_cell(3.8, 0.42, 1.0);
const UnitCell kB = symmetric_two_layer_cell(4.2, 0.38, 1.0);

Interval shared_gap_near(double center) {
  for (const auto& g : common_gaps(kA, kB, Polarization::Epar, 0.0, 4.0 * kTwoPi))
    if (g.range.lo < center && g.range.hi > center) return g.range;
  FAIL("no common gap");
  return {};
}
}  // namespace

TEST_CASE("common gaps") {
  const auto self = common_gaps(kA, kA, Polarization::Epar, 0.0, 4.0 * kTwoPi);
  const auto own = gaps_in(kA, Polarization::Epar, 0.0, 4.0 * kTwoPi);
  REQUIRE(self.size() == own.size());
  for (std::size_t i = 0; i < own.size(); ++i) {
    CHECK(self[i].range.lo == own[i].lower);
    CHECK(self[i].range.hi == std::min(own[i].upper, 4.0 * kTwoPi));
  }
  const UnitCell vac({{1.0, 1.0, 1.0}});
  CHECK(common_gaps(vac, kA, Polarization::Epar, 0.0, 4.0 * kTwoPi).empty());
  const Interval g = shared_gap_near(2.5 * kTwoPi);
  CHECK(g.lo > 2.4 * kTwoPi);
  CHECK(g.hi < 2.6 * kTwoPi);
}

TEST_CASE("commutator norms") {
  CHECK(commutator_norm(kA, kA, Polarization::Epar, 7.3) < 1e-13);
  const Interval g = shared_gap_near(2.5 * kTwoPi);
  const auto modes = edge_mode_search(kA, kB, Polarization::Epar, g);
  REQUIRE(modes.size() == 1);
  CHECK(normalized_commutator_norm(kA, kB, Polarization::Epar, modes[0].k0star) < 1e-6);
  CHECK(normalized_commutator_norm(kA, kB, Polarization::Epar, g.lo + 0.1 * g.width()) > 1e-3);
}

TEST_CASE("edge mode of the two-crystal junction") {
  const Interval g = shared_gap_near(2.5 * kTwoPi);
  const auto modes = edge_mode_search(kA, kB, Polarization::Epar, g);
  REQUIRE(modes.size() == 1);
  const EdgeModeReport& m = modes[0];
  CHECK_FALSE(m.spurious);
  CHECK(g.contains_strictly(m.k0star.real()));
  CHECK(m.k0star.imag() == 0.0);
  CHECK(m.chiResidual <= 1e-8);
  CHECK(m.decayRight < 1.0);
  CHECK(m.decayLeft < 1.0);
  CHECK(m.eigenResidual < 1e-6);
  CHECK(std::abs(cell_monodromy(kA, m.k0star, Polarization::Epar).trace()) > 2.0);
  CHECK(std::abs(cell_monodromy(kB, m.k0star, Polarization::Epar).trace()) > 2.0);
  CHECK(m.k0star.real() / kTwoPi == doctest::Approx(2.50257).epsilon(2e-6));

  std::ostringstream os;
  write_edge_reports_json(os, modes);
  const auto j = nlohmann::json::parse(os.str());
  CHECK(j[0]["spurious"] == false);
  CHECK(j[0]["decay_rates"].size() == 2);
}

TEST_CASE("same crystal on both sides has no edge mode") {
  for (const auto& g : common_gaps(kA, kA, Polarization::Epar, 0.0, 4.0 * kTwoPi))
    CHECK(edge_mode_search(kA, kA, Polarization::Epar, g.range).empty());
}

TEST_CASE("a mode exists exactly where the two gaps carry opposite patterns") {
  const auto ga = gaps_in(kA, Polarization::Epar, 0.0, 4.0 * kTwoPi);
  const auto gb = gaps_in(kB, Polarization::Epar, 0.0, 4.0 * kTwoPi);
  for (const auto& c : common_gaps(kA, kB, Polarization::Epar, 0.0, 4.0 * kTwoPi)) {
    const int ia = ga[c.orderA - 1].index(), ib = gb[c.orderB - 1].index();
    const auto modes = edge_mode_search(kA, kB, Polarization::Epar, c.range);
    if (c.orderA == c.orderB && ia == -ib) {
      CHECK(modes.size() == 1);
    } else if (c.orderA == c.orderB) {
      CHECK(modes.empty());
    }
  }
}

TEST_CASE("asymmetric cells are refused") {
  const Interval g = shared_gap_near(2.5 * kTwoPi);
  CHECK_THROWS_AS(edge_mode_search(two_layer_cell(3.8, 0.42, 1.0), kB, Polarization::Epar, g), std::invalid_argument);
}

TEST_CASE("crossing trace") {
  const Interval g = shared_gap_near(2.5 * kTwoPi);
  const auto modes = edge_mode_search(kA, kB, Polarization::Epar, g);
  REQUIRE(modes.size() == 1);
  const auto rows = chi_crossing_trace(kA, kB, Polarization::Epar, 2.4 * kTwoPi, 2.6 * kTwoPi, 2001);
  REQUIRE(rows.size() == 2001);
  std::vector<double> crossings;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (!r.inGap) continue;
    REQUIRE(r.chiA);
    REQUIRE(r.negChiB);
    const cplx a = r.chiA->value(), b = r.negChiB->value();
    // The delta-continued value picks up an imaginary part ~ delta / sqrt(distance) near the edges.
    if (r.k0 > g.lo + 1e-3 * kTwoPi && r.k0 < g.hi - 1e-3 * kTwoPi) {
      CHECK(std::abs(a.imag()) < 1e-5 * std::abs(a));
      CHECK(std::abs(b.imag()) < 1e-5 * std::abs(b));
    }
    if (i > 0 && rows[i - 1].inGap) {
      const double d0 = rows[i - 1].chiA->value().real() - rows[i - 1].negChiB->value().real();
      const double d1 = a.real() - b.real();
      if ((d0 > 0) != (d1 > 0)) crossings.push_back(0.5 * (rows[i - 1].k0 + r.k0));
    }
  }
  REQUIRE(crossings.size() == 1);
  CHECK(std::abs(crossings[0] - modes[0].k0star.real()) < (rows[1].k0 - rows[0].k0));

  std::ostringstream os;
  write_crossing_csv(os, rows);
  CHECK(os.str().rfind("k0,chi1_im,chi1_re,neg_chi2_im,neg_chi2_re,commutator,gap_flag\n", 0) == 0);
}

TEST_CASE("both symmetric origins of each crystal are tried") {
  const Interval g = shared_gap_near(2.5 * kTwoPi);
  const auto pairs = gauge_pairings(kA, kB, Polarization::Epar, g);
  REQUIRE(pairs.size() == 4);
  CHECK(pairs[0].originA == 0.0);
  CHECK(pairs[0].originB == 0.0);
  REQUIRE(pairs[0].modes.size() == 1);
  CHECK(std::abs(pairs[0].modes[0].k0star - edge_mode_search(kA, kB, Polarization::Epar, g)[0].k0star) < 1e-9);
}

TEST_CASE("lossy junction: complex edge-mode wavenumber") {
  const UnitCell lossy = symmetric_two_layer_cell(cplx{3.8, 0.05}, 0.42, 1.0);
  const Interval g = shared_gap_near(2.5 * kTwoPi);
  const auto lossless = edge_mode_search(kA, kB, Polarization::Epar, g);
  const auto modes = edge_mode_search(lossy, kB, Polarization::Epar, g);
  REQUIRE(modes.size() == 1);
  CHECK(modes[0].chiResidual <= 1e-8);
  CHECK(modes[0].k0star.imag() < 0.0);
  CHECK(std::abs(modes[0].k0star.real() - lossless[0].k0star.real()) < 0.05);
}
