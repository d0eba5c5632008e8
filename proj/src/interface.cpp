#include "topo1d/interface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"
#include "topo1d/io.hpp"
#include "topo1d/parallel.hpp"

namespace topo1d {

std::vector<CommonGap> common_gaps(const UnitCell& cellA, const UnitCell& cellB, Polarization pol, double kmin,
                                   double kmax, const EdgeSearchOptions& opts) {
  const UnitCell refA = cellA.lossless_part(), refB = cellB.lossless_part();
  const auto ga = gaps_in(refA, pol, kmin, kmax, opts);
  const auto gb = gaps_in(refB, pol, kmin, kmax, opts);
  std::vector<CommonGap> out;
  for (const auto& a : ga) {
    if (a.closed) continue;
    for (const auto& b : gb) {
      if (b.closed) continue;
      const double lo = std::max({a.lower, b.lower, kmin});
      const double hi = std::min({a.upper, b.upper, kmax});
      if (hi > lo) out.push_back({{lo, hi}, a.order, b.order});
    }
  }
  std::sort(out.begin(), out.end(), [](const CommonGap& x, const CommonGap& y) { return x.range.lo < y.range.lo; });
  return out;
}

double commutator_norm(const UnitCell& cellA, const UnitCell& cellB, Polarization pol, cplx k0) {
  return commutator(cell_monodromy(cellA, k0, pol), cell_monodromy(cellB, k0, pol)).frobenius();
}

double normalized_commutator_norm(const UnitCell& cellA, const UnitCell& cellB, Polarization pol, cplx k0) {
  const Matrix2 ma = cell_monodromy(cellA, k0, pol), mb = cell_monodromy(cellB, k0, pol);
  return commutator(ma, mb).frobenius() / (ma.frobenius() * mb.frobenius());
}

namespace {

// Decaying eigenvector (|z| < 1) of M(k0), regularized by i delta at degeneracies.
std::optional<Eigenpair> decaying(const UnitCell& cell, cplx k0, Polarization pol, double delta) {
  EigenResult r = eigenpairs(cell_monodromy(cell, k0, pol));
  if (!std::holds_alternative<std::pair<Eigenpair, Eigenpair>>(r))
    r = eigenpairs(cell_monodromy(cell, k0 + cplx{0.0, delta}, pol));
  if (const auto* p = std::get_if<std::pair<Eigenpair, Eigenpair>>(&r)) return p->first;
  return std::nullopt;
}

cplx chi_sum(const UnitCell& a, const UnitCell& b, cplx k0, Polarization pol, double delta) {
  const auto ea = decaying(a, k0, pol, delta), eb = decaying(b, k0, pol, delta);
  if (!ea || !eb) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
  return ea->U.u / ea->U.w + eb->U.u / eb->U.w;
}

EdgeModeReport assemble(const UnitCell& a, const UnitCell& b, Polarization pol, cplx k0, const Interval& gap,
                        double delta) {
  EdgeModeReport rep;
  rep.k0star = k0;
  rep.gap = gap;
  rep.chiResidual = std::abs(chi_sum(a, b, k0, pol, delta));
  rep.commutatorNorm = normalized_commutator_norm(a, b, pol, k0);
  const auto eb = decaying(b, k0, pol, delta);
  if (!eb) {
    rep.spurious = true;
    rep.diagnostic = "monodromy of B is degenerate at the root";
    return rep;
  }
  const Vec2 U = eb->U;
  rep.boundaryVector = U;
  rep.decayRight = std::abs(eb->z);
  const Vec2 AU = cell_monodromy(a, k0, pol) * U;
  const double n2 = std::norm(U.u) + std::norm(U.w);
  const cplx zp = (std::conj(U.u) * AU.u + std::conj(U.w) * AU.w) / n2;
  rep.eigenResidual = (AU - zp * U).norm() / std::sqrt(n2);
  rep.decayLeft = 1.0 / std::abs(zp);

  std::vector<std::string> problems;
  if (!(rep.chiResidual <= kChiResidualTol)) problems.push_back("chi residual above tolerance");
  if (!(rep.commutatorNorm <= kCommutatorTol)) problems.push_back("monodromies do not commute");
  if (!(rep.eigenResidual <= kCommutatorTol)) problems.push_back("U is not an eigenvector of M_A");
  if (!(rep.decayRight < 1.0)) problems.push_back("no decay into x > 0");
  if (!(rep.decayLeft < 1.0)) problems.push_back("no decay into x < 0");
  rep.spurious = !problems.empty();
  for (std::size_t i = 0; i < problems.size(); ++i) rep.diagnostic += (i ? "; " : "") + problems[i];
  return rep;
}

std::vector<double> real_roots(const UnitCell& a, const UnitCell& b, Polarization pol, const Interval& gap) {
  auto g = [&](double k) { return chi_sum(a, b, k, pol, 0.0).real(); };
  std::vector<double> ks(kEdgeSamples), gs(kEdgeSamples);
  for (int i = 0; i < kEdgeSamples; ++i) {
    ks[i] = gap.lo + gap.width() * (i + 1.0) / (kEdgeSamples + 1.0);
    gs[i] = g(ks[i]);
  }
  std::vector<double> roots;
  for (int i = 0; i + 1 < kEdgeSamples; ++i) {
    if (!std::isfinite(gs[i]) || !std::isfinite(gs[i + 1])) continue;
    if (gs[i] == 0.0) {
      roots.push_back(ks[i]);
      continue;
    }
    if ((gs[i] > 0.0) == (gs[i + 1] > 0.0) || gs[i + 1] == 0.0) continue;
    double lo = ks[i], hi = ks[i + 1], g_lo = gs[i];
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double gm = g(mid);
      if (gm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((gm > 0.0) == (g_lo > 0.0)) {
        lo = mid;
        g_lo = gm;
      } else {
        hi = mid;
      }
    }
    const double k = std::abs(g(lo)) <= std::abs(g(hi)) ? lo : hi;
    // A sign change through a pole of chi leaves a large residual; those are not roots.
    if (std::abs(g(k)) <= 1e3 * kChiResidualTol) roots.push_back(k);
  }
  if (!gs.empty() && gs.back() == 0.0) roots.push_back(ks.back());
  return roots;
}

std::optional<cplx> secant(const UnitCell& a, const UnitCell& b, Polarization pol, cplx seed, double delta) {
  auto g = [&](cplx k) { return chi_sum(a, b, k, pol, delta); };
  cplx k0 = seed, k1 = seed + cplx{1e-6, -1e-6};
  cplx g0 = g(k0), g1 = g(k1);
  for (int it = 0; it < 100; ++it) {
    if (!std::isfinite(g1.real()) || !std::isfinite(g1.imag())) return std::nullopt;
    if (std::abs(g1) < 1e-13) return k1;
    const cplx den = g1 - g0;
    if (den == cplx{0.0}) break;
    const cplx k2 = k1 - g1 * (k1 - k0) / den;
    k0 = k1;
    g0 = g1;
    k1 = k2;
    g1 = g(k1);
    if (std::abs(k1 - k0) < 1e-15 * std::max(1.0, std::abs(k1))) break;
  }
  if (std::abs(g1) <= kChiResidualTol) return k1;
  return std::nullopt;
}

}  // namespace

std::vector<EdgeModeReport> edge_mode_search(const UnitCell& cellA, const UnitCell& cellB, Polarization pol,
                                             const Interval& gap, double delta) {
  if (!is_inversion_symmetric(cellA) || !is_inversion_symmetric(cellB))
    throw std::invalid_argument("edge_mode_search requires both cells in an inversion-symmetric gauge");
  if (!(gap.hi > gap.lo)) throw std::invalid_argument("edge_mode_search: empty gap interval");
  const bool lossy = !cellA.lossless() || !cellB.lossless();
  std::vector<EdgeModeReport> out;
  if (!lossy) {
    for (double k : real_roots(cellA, cellB, pol, gap)) out.push_back(assemble(cellA, cellB, pol, k, gap, delta));
    return out;
  }
  for (double seed : real_roots(cellA.lossless_part(), cellB.lossless_part(), pol, gap)) {
    if (auto k = secant(cellA, cellB, pol, seed, delta)) out.push_back(assemble(cellA, cellB, pol, *k, gap, delta));
  }
  return out;
}

std::vector<CrossingRow> chi_crossing_trace(const UnitCell& cellA, const UnitCell& cellB, Polarization pol,
                                            double kmin, double kmax, int samples, double delta) {
  if (samples < 2) throw std::invalid_argument("chi_crossing_trace needs at least 2 samples");
  if (!(kmax > kmin)) throw std::invalid_argument("chi_crossing_trace: empty interval");
  std::vector<CrossingRow> rows(static_cast<std::size_t>(samples));
  parallel_for(rows.size(), [&](std::size_t i) {
    const double k = kmin + (kmax - kmin) * static_cast<double>(i) / (samples - 1);
    CrossingRow row;
    row.k0 = k;
    const cplx kc{k, delta};
    row.chiA = chi_value(cell_monodromy(cellA, kc, pol)).chi;
    if (auto cb = chi_value(cell_monodromy(cellB, kc, pol)).chi) row.negChiB = cb->negated();
    row.commutator = normalized_commutator_norm(cellA, cellB, pol, k);
    row.inGap = classify(cellA.lossless_part(), k, pol).kind == SpectralKind::Gap &&
                classify(cellB.lossless_part(), k, pol).kind == SpectralKind::Gap;
    rows[i] = row;
  });
  return rows;
}

void write_crossing_csv(std::ostream& os, const std::vector<CrossingRow>& rows) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto parts = [&](const std::optional<ChiValue>& c) -> std::pair<double, double> {
    if (!c) return {nan, nan};
    if (c->is_infinite()) return {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    const cplx v = c->value();
    return {v.imag(), v.real()};
  };
  os << "k0,chi1_im,chi1_re,neg_chi2_im,neg_chi2_re,commutator,gap_flag\n";
  for (const auto& r : rows) {
    const auto [a_im, a_re] = parts(r.chiA);
    const auto [b_im, b_re] = parts(r.negChiB);
    os << fmt(r.k0) << ',' << fmt(a_im) << ',' << fmt(a_re) << ',' << fmt(b_im) << ',' << fmt(b_re) << ','
       << fmt(r.commutator) << ',' << (r.inGap ? 1 : 0) << '\n';
  }
}

namespace {
nlohmann::json to_json(const EdgeModeReport& r) {
  return {{"k0star_re", r.k0star.real()},
          {"k0star_im", r.k0star.imag()},
          {"gap", {r.gap.lo, r.gap.hi}},
          {"chi_residual", r.chiResidual},
          {"commutator_norm", r.commutatorNorm},
          {"decay_rates", {r.decayRight, r.decayLeft}},
          {"eigen_residual", r.eigenResidual},
          {"boundary_vector",
           {{r.boundaryVector.u.real(), r.boundaryVector.u.imag()},
            {r.boundaryVector.w.real(), r.boundaryVector.w.imag()}}},
          {"spurious", r.spurious},
          {"diagnostic", r.diagnostic}};
}
}  // namespace

void write_edge_reports_json(std::ostream& os, const std::vector<EdgeModeReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  os << arr.dump(2) << '\n';
}

std::vector<GaugePairing> gauge_pairings(const UnitCell& cellA, const UnitCell& cellB, Polarization pol,
                                         const Interval& gap, double delta) {
  std::vector<GaugePairing> out;
  for (double xa : symmetric_origins(cellA))
    for (double xb : symmetric_origins(cellB))
      out.push_back({xa, xb, edge_mode_search(recenter(cellA, xa), recenter(cellB, xb), pol, gap, delta)});
  return out;
}

}  // namespace topo1d
