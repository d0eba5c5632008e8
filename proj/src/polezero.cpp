#include "topo1d/polezero.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "quadrature.hpp"
#include "topo1d/errors.hpp"
#include "topo1d/io.hpp"

namespace topo1d {

const char* to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::Pole: return "Pole";
    case EdgeKind::Zero: return "Zero";
    case EdgeKind::Transition: return "Transition";
  }
  return "?";
}

int GapInfo::index() const {
  if (closed) return 0;
  if (lowerKind == EdgeKind::Pole && upperKind == EdgeKind::Zero) return 1;
  if (lowerKind == EdgeKind::Zero && upperKind == EdgeKind::Pole) return -1;
  return 0;
}

BandEdge classify_edge_matrix(const Matrix2& m, double tolTransition) {
  BandEdge e;
  const double tr = m.trace().real();
  e.traceSign = tr >= 0.0 ? 1 : -1;
  e.traceResidual = std::abs(m.trace() - 2.0 * e.traceSign);
  e.m12Abs = std::abs(m.m12);
  e.m21Abs = std::abs(m.m21);
  e.residualNorm = std::min(e.m12Abs, e.m21Abs);
  if (e.m12Abs < tolTransition && e.m21Abs < tolTransition) {
    e.kind = EdgeKind::Transition;
    return e;
  }
  e.kind = e.m12Abs >= e.m21Abs ? EdgeKind::Pole : EdgeKind::Zero;
  const double big = std::max(e.m12Abs, e.m21Abs);
  e.lowConfidence = !(big > kConfidenceRatio * e.residualNorm);
  return e;
}

BandEdge classify_edge(const UnitCell& cell, Polarization pol, cplx k0, double tolTransition) {
  const Matrix2 m = cell_monodromy(cell, k0, pol);
  BandEdge e = classify_edge_matrix(m, tolTransition);
  if (e.traceResidual > 1e-6)
    throw std::invalid_argument("classify_edge: |tr M -+ 2| = " + std::to_string(e.traceResidual) +
                                " is not at a band edge");
  e.k0 = k0;
  return e;
}

namespace {

double real_trace(const UnitCell& cell, double k, Polarization pol) {
  return cell_monodromy(cell, k, pol).trace().real();
}

// Extrema of tr M with at least `beyond` of them past kmax.
std::vector<TraceExtremum> scan_extrema(const UnitCell& cell, Polarization pol, double kmax, double step,
                                        std::size_t minCount = 0, int beyond = 2) {
  double kend = std::max(kmax, 0.0) + std::numbers::pi;
  for (;;) {
    auto ext = trace_extrema(cell, pol, kend, step);
    const auto past = std::count_if(ext.begin(), ext.end(), [&](const TraceExtremum& e) { return e.k0 > kmax; });
    if ((past >= beyond && ext.size() >= minCount) || kend > 1e5) return ext;
    kend = 1.5 * kend + std::numbers::pi;
  }
}

// Root of sign * tr(k) - 2 in [lo, hi], where the function changes sign.
double bisect_edge(const UnitCell& cell, Polarization pol, double lo, double hi, int sign) {
  auto h = [&](double k) { return sign * real_trace(cell, k, pol) - 2.0; };
  double h_lo = h(lo);
  const double h_hi = h(hi);
  if (h_lo == 0.0) return lo;
  if (h_hi == 0.0) return hi;
  if ((h_lo > 0.0) == (h_hi > 0.0)) throw NumericalError("band edge bracket has no sign change");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double h_mid = h(mid);
    if (h_mid == 0.0) return mid;
    if ((h_mid > 0.0) == (h_lo > 0.0)) {
      lo = mid;
      h_lo = h_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

GapInfo make_gap(const UnitCell& cell, Polarization pol, const std::vector<TraceExtremum>& ext, std::size_t idx,
                 double tolTangent, double tolTransition) {
  const TraceExtremum& e = ext[idx];
  GapInfo g;
  g.order = e.order;
  g.extremumK = e.k0;
  g.extremumTrace = e.trace;
  g.traceSign = e.trace >= 0.0 ? 1 : -1;
  const double excess = std::abs(e.trace) - 2.0;
  if (excess <= tolTangent) {
    g.closed = true;
    g.lower = g.upper = e.k0;
    return g;
  }
  const double left = idx == 0 ? 0.0 : ext[idx - 1].k0;
  if (idx + 1 >= ext.size()) throw NumericalError("extremum scan too short to bracket a gap");
  const double right = ext[idx + 1].k0;
  g.lower = bisect_edge(cell, pol, left, e.k0, g.traceSign);
  g.upper = bisect_edge(cell, pol, e.k0, right, g.traceSign);
  const BandEdge lo = classify_edge(cell, pol, g.lower, tolTransition);
  const BandEdge hi = classify_edge(cell, pol, g.upper, tolTransition);
  g.lowerKind = lo.kind;
  g.upperKind = hi.kind;
  g.lowConfidence = lo.lowConfidence || hi.lowConfidence;
  return g;
}

BandEdge edge_at(const UnitCell& cell, Polarization pol, double k, int order, bool lower, double tolTransition) {
  BandEdge b = classify_edge(cell, pol, k, tolTransition);
  b.gapOrder = order;
  b.lowerSide = lower;
  return b;
}

std::vector<BandEdge> lossless_edges(const UnitCell& cell, Polarization pol, double kmin, double kmax,
                                     const EdgeSearchOptions& opts) {
  const auto ext = scan_extrema(cell, pol, kmax, opts.step);
  std::vector<BandEdge> out;
  auto in_range = [&](double k) { return k >= kmin && k <= kmax; };
  for (std::size_t i = 0; i < ext.size(); ++i) {
    const double excess = std::abs(ext[i].trace) - 2.0;
    if (excess < -opts.tolTangent) continue;  // not a gap; impossible for lossless cells
    if (excess <= opts.tolTangent) {
      if (in_range(ext[i].k0)) {
        BandEdge b = classify_edge_matrix(cell_monodromy(cell, ext[i].k0, pol), opts.tolTransition);
        b.k0 = ext[i].k0;
        b.generic = false;
        b.gapOrder = ext[i].order;
        out.push_back(b);
      }
      continue;
    }
    const double left = i == 0 ? 0.0 : ext[i - 1].k0;
    const double right = i + 1 < ext.size() ? ext[i + 1].k0 : ext[i].k0;
    if (right < kmin || left > kmax) continue;
    const GapInfo g = make_gap(cell, pol, ext, i, opts.tolTangent, opts.tolTransition);
    if (in_range(g.lower)) out.push_back(edge_at(cell, pol, g.lower, g.order, true, opts.tolTransition));
    if (in_range(g.upper)) out.push_back(edge_at(cell, pol, g.upper, g.order, false, opts.tolTransition));
  }
  return out;
}

BandEdge refine_complex(const UnitCell& cell, Polarization pol, const BandEdge& seed, const EdgeSearchOptions& opts) {
  const double target = 2.0 * seed.traceSign;
  auto f = [&](cplx k) {
    const auto md = cell_monodromy_with_derivative(cell, k, pol);
    return std::pair{md.value.trace() - target, md.derivative.trace()};
  };
  cplx k = seed.k0;
  auto [fk, dfk] = f(k);
  bool converged = std::abs(fk) < opts.newtonTol;
  for (int it = 0; it < opts.maxNewton && !converged; ++it) {
    if (dfk == cplx{0.0}) break;
    cplx stepv = -fk / dfk;
    cplx trial = k + stepv;
    auto [ft, dft] = f(trial);
    for (int halve = 0; halve < 40 && std::abs(ft) > std::abs(fk); ++halve) {
      stepv *= 0.5;
      trial = k + stepv;
      std::tie(ft, dft) = f(trial);
    }
    k = trial;
    fk = ft;
    dfk = dft;
    converged = std::abs(fk) < opts.newtonTol;
  }
  BandEdge b = classify_edge_matrix(cell_monodromy(cell, k, pol), opts.tolTransition);
  b.k0 = k;
  b.traceSign = seed.traceSign;
  b.traceResidual = std::abs(fk);
  b.gapOrder = seed.gapOrder;
  b.lowerSide = seed.lowerSide;
  b.resolved = converged;
  return b;
}

void sort_edges(std::vector<BandEdge>& edges) {
  std::stable_sort(edges.begin(), edges.end(),
                   [](const BandEdge& a, const BandEdge& b) { return a.k0.real() < b.k0.real(); });
}

}  // namespace

std::vector<BandEdge> band_edges(const UnitCell& cell, Polarization pol, double kmin, double kmax, bool lossy,
                                 const EdgeSearchOptions& opts) {
  if (!(kmax > kmin) || kmin < 0.0) throw std::invalid_argument("band_edges: interval must satisfy 0 <= kmin < kmax");
  std::vector<BandEdge> out;
  if (!lossy) {
    out = lossless_edges(cell, pol, kmin, kmax, opts);
  } else {
    const auto seeds = lossless_edges(cell.lossless_part(), pol, kmin, kmax, opts);
    for (const auto& s : seeds)
      if (s.generic) out.push_back(refine_complex(cell, pol, s, opts));
  }
  sort_edges(out);
  return out;
}

std::vector<GapInfo> gaps_in(const UnitCell& cell, Polarization pol, double kmin, double kmax,
                             const EdgeSearchOptions& opts) {
  const auto ext = scan_extrema(cell, pol, kmax, opts.step);
  std::vector<GapInfo> out;
  for (std::size_t i = 0; i + 1 < ext.size(); ++i) {
    const double left = i == 0 ? 0.0 : ext[i - 1].k0;
    if (ext[i + 1].k0 < kmin || left > kmax) continue;
    if (std::abs(ext[i].trace) - 2.0 < -opts.tolTangent) continue;
    GapInfo g = make_gap(cell, pol, ext, i, opts.tolTangent, opts.tolTransition);
    if (g.upper >= kmin && g.lower <= kmax) out.push_back(g);
  }
  return out;
}

GapInfo gap_of_order(const UnitCell& cell, Polarization pol, int order, const EdgeSearchOptions& opts) {
  if (order < 1) throw std::invalid_argument("gap order must be >= 1");
  double kmax = std::numbers::pi * order;
  std::vector<TraceExtremum> ext;
  for (;;) {
    ext = scan_extrema(cell, pol, kmax, opts.step, static_cast<std::size_t>(order) + 1, 1);
    if (ext.size() > static_cast<std::size_t>(order) || kmax > 1e5) break;
    kmax *= 1.5;
  }
  if (ext.size() <= static_cast<std::size_t>(order)) throw NumericalError("gap order beyond scan range");
  return make_gap(cell, pol, ext, static_cast<std::size_t>(order) - 1, 0.0, opts.tolTransition);
}

std::optional<GapInfo> tracked_gap(const UnitCell& cell, Polarization pol, double targetMin, double targetMax,
                                   double minFraction, const EdgeSearchOptions& opts) {
  std::optional<GapInfo> best;
  double best_overlap = minFraction * (targetMax - targetMin);
  for (const auto& g : gaps_in(cell, pol, targetMin, targetMax, opts)) {
    if (g.closed) continue;
    const double overlap = std::min(g.upper, targetMax) - std::max(g.lower, targetMin);
    if (overlap > best_overlap) {
      best_overlap = overlap;
      best = g;
    }
  }
  return best;
}

const BandEdge* PoleZeroPattern::find(int gapOrder, bool lowerSide) const {
  for (const auto& e : edges)
    if (e.gapOrder == gapOrder && e.lowerSide == lowerSide && e.generic) return &e;
  return nullptr;
}

std::vector<int> PoleZeroPattern::complete_gaps() const {
  std::vector<int> out;
  for (const auto& e : edges)
    if (e.generic && e.gapOrder > 0 && e.lowerSide && find(e.gapOrder, false)) out.push_back(e.gapOrder);
  return out;
}

PoleZeroPattern pattern(const UnitCell& cell, Polarization pol, double kmin, double kmax, bool lossy,
                        const EdgeSearchOptions& opts) {
  PoleZeroPattern p;
  p.kmin = kmin;
  p.kmax = kmax;
  p.lossy = lossy;
  p.edges = band_edges(cell, pol, std::max(kmin, 0.0), kmax, lossy, opts);
  if (kmin <= 0.0) {
    BandEdge origin = classify_edge_matrix(cell_monodromy(cell, 0.0, pol), opts.tolTransition);
    origin.k0 = 0.0;
    origin.gapOrder = 0;
    origin.lowerSide = false;
    p.edges.insert(p.edges.begin(), origin);
  }
  // Between the two edges of a gap the reference (lossless) cell must be in a gap, and in a
  // band between consecutive gaps.
  const UnitCell ref = cell.lossless_part();
  std::vector<const BandEdge*> generic;
  for (const auto& e : p.edges)
    if (e.generic) generic.push_back(&e);
  for (std::size_t i = 0; i + 1 < generic.size(); ++i) {
    const double mid = 0.5 * (generic[i]->k0.real() + generic[i + 1]->k0.real());
    const bool expect_gap = generic[i]->lowerSide && !generic[i + 1]->lowerSide &&
                            generic[i]->gapOrder == generic[i + 1]->gapOrder;
    const SpectralKind k = classify(ref, mid, pol).kind;
    if ((k == SpectralKind::Gap) != expect_gap) p.consistent = false;
  }
  return p;
}

void write_pattern_json(std::ostream& os, const PoleZeroPattern& p) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : p.edges) {
    arr.push_back({{"k0_re", e.k0.real()},
                   {"k0_im", e.k0.imag()},
                   {"trace_sign", e.traceSign},
                   {"kind", to_string(e.kind)},
                   {"residual", e.residualNorm},
                   {"gap_order", e.gapOrder},
                   {"side", e.lowerSide ? "lower" : "upper"},
                   {"generic", e.generic},
                   {"low_confidence", e.lowConfidence},
                   {"resolved", e.resolved}});
  }
  os << arr.dump(2) << '\n';
}

ZakPhase zak_from_pattern(const PoleZeroPattern& p, int band) {
  if (band < 1) throw std::out_of_range("band index must be >= 1");
  const BandEdge* lo = p.find(band - 1, false);
  const BandEdge* hi = p.find(band, true);
  if (!lo || !hi) throw std::out_of_range("pattern does not bound band " + std::to_string(band));
  ZakPhase z;
  z.band = band;
  z.lower = lo->kind;
  z.upper = hi->kind;
  if (lo->kind == EdgeKind::Transition || hi->kind == EdgeKind::Transition) return z;
  z.defined = true;
  z.phase = lo->kind == hi->kind ? 0.0 : std::numbers::pi;
  return z;
}

WilsonResult zak_wilson_oracle(const UnitCell& cell, Polarization pol, int band, int gridN) {
  if (band < 1) throw std::invalid_argument("band index must be >= 1");
  if (gridN < 64) throw std::invalid_argument("Wilson loop needs gridN >= 64");
  if (!cell.lossless()) throw std::invalid_argument("Wilson loop oracle requires a lossless cell");

  double k_lo = 0.0;
  if (band > 1) {
    const GapInfo below = gap_of_order(cell, pol, band - 1);
    if (below.closed) throw NumericalError("band " + std::to_string(band) + " touches the band below (closed gap)");
    k_lo = below.upper;
  }
  const GapInfo above = gap_of_order(cell, pol, band);
  if (above.closed) throw NumericalError("band " + std::to_string(band) + " touches the band above (closed gap)");
  const double k_hi = above.lower;

  auto invert = [&](double target) {
    auto h = [&](double k) { return real_trace(cell, k, pol) - target; };
    double lo = k_lo, hi = k_hi;
    double h_lo = h(lo);
    if ((h_lo > 0.0) == (h(hi) > 0.0)) throw NumericalError("dispersion is not invertible on this band");
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double h_mid = h(mid);
      if ((h_mid > 0.0) == (h_lo > 0.0)) {
        lo = mid;
        h_lo = h_mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };

  // Quadrature nodes fixed for the whole band so every overlap uses the same rule.
  struct Node {
    std::size_t layer;
    double x;       // absolute position in [0, 1]
    double offset;  // position inside the layer
    double weight;
  };
  std::vector<Node> nodes;
  std::vector<double> starts;
  {
    double start = 0.0;
    for (std::size_t li = 0; li < cell.size(); ++li) {
      const Layer& L = cell.layers()[li];
      starts.push_back(start);
      const double phase = std::abs(k_hi * std::sqrt(L.eps * L.mu)) * L.width;
      const int n = 16 + static_cast<int>(std::ceil(2.0 * phase));
      const auto rule = detail::gauss_legendre(n);
      for (int q = 0; q < n; ++q) {
        const double off = 0.5 * L.width * (rule.nodes[q] + 1.0);
        nodes.push_back({li, start + off, off, 0.5 * L.width * rule.weights[q]});
      }
      start += L.width;
    }
  }
  std::vector<cplx> weights_p(nodes.size());
  for (std::size_t n = 0; n < nodes.size(); ++n)
    weights_p[n] = nodes[n].weight * pq_of_layer(cell.layers()[nodes[n].layer], pol).p;

  auto bloch = [&](double theta) {
    const double k = invert(2.0 * std::cos(std::abs(theta)));
    const Matrix2 m = cell_monodromy(cell, k, pol);
    const EigenResult er = eigenpairs(m);
    const auto* pair = std::get_if<std::pair<Eigenpair, Eigenpair>>(&er);
    if (!pair) throw NumericalError("degenerate monodromy inside a band");
    const Eigenpair& ep = ((pair->first.z.imag() > 0.0) == (theta > 0.0)) ? pair->first : pair->second;
    std::vector<cplx> u(nodes.size());
    Vec2 at_start = ep.U;
    std::size_t current = 0;
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      while (current < nodes[n].layer) {
        at_start = layer_matrix(cell.layers()[current], k, pol) * at_start;
        ++current;
      }
      const Vec2 U = partial_layer_matrix(cell.layers()[current], nodes[n].offset, k, pol) * at_start;
      u[n] = U.u * std::exp(cplx{0.0, -theta * nodes[n].x});
    }
    return u;
  };

  auto overlap = [&](const std::vector<cplx>& a, const std::vector<cplx>& b, bool wrap) {
    cplx s = 0.0;
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      cplx bn = b[n];
      if (wrap) bn *= std::exp(cplx{0.0, -2.0 * std::numbers::pi * nodes[n].x});
      s += weights_p[n] * std::conj(a[n]) * bn;
    }
    return s;
  };

  const double h = 2.0 * std::numbers::pi / gridN;
  const auto first = bloch(-std::numbers::pi + 0.5 * h);
  auto prev = first;
  double phase = 0.0;
  for (int n = 1; n < gridN; ++n) {
    auto cur = bloch(-std::numbers::pi + (n + 0.5) * h);
    phase -= std::arg(overlap(prev, cur, false));
    prev = std::move(cur);
  }
  phase -= std::arg(overlap(prev, first, true));

  WilsonResult r;
  const double two_pi = 2.0 * std::numbers::pi;
  r.raw = phase - two_pi * std::floor(phase / two_pi);
  const double d0 = std::min(r.raw, two_pi - r.raw);
  const double dpi = std::abs(r.raw - std::numbers::pi);
  if (d0 <= kZakSnap)
    r.snapped = 0.0;
  else if (dpi <= kZakSnap)
    r.snapped = std::numbers::pi;
  return r;
}

void write_zak_csv(std::ostream& os, const std::vector<ZakPhase>& zak,
                   const std::vector<std::optional<WilsonResult>>& wilson) {
  os << "band,phase,lower_kind,upper_kind,wilson_value\n";
  for (std::size_t i = 0; i < zak.size(); ++i) {
    const auto& z = zak[i];
    os << z.band << ',' << (z.defined ? fmt(z.phase) : std::string()) << ',' << to_string(z.lower) << ','
       << to_string(z.upper) << ',' << (i < wilson.size() && wilson[i] ? fmt(wilson[i]->raw) : std::string())
       << '\n';
  }
}

namespace {

int index_of(const UnitCell& cell, Polarization pol, int order, const EdgeSearchOptions& opts, GapInfo* out = nullptr) {
  const GapInfo g = gap_of_order(cell, pol, order, opts);
  if (out) *out = g;
  return g.index();
}

}  // namespace

std::vector<TransitionPoint> transition_detect(const CellFamily& family, Polarization pol, double t0, double t1,
                                               int steps, int gapOrder, const EdgeSearchOptions& opts) {
  if (steps < 1) throw std::invalid_argument("transition_detect needs at least one step");
  std::vector<double> ts(static_cast<std::size_t>(steps) + 1);
  std::vector<int> idx(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    ts[i] = t0 + (t1 - t0) * static_cast<double>(i) / steps;
    idx[i] = index_of(family(ts[i]), pol, gapOrder, opts);
  }
  // Inside the bracket the kinds are decided by |m12| against |m21| alone, so the bisection
  // runs down to the closing instead of stopping at the transition tolerance.
  EdgeSearchOptions strict = opts;
  strict.tolTransition = 0.0;
  std::vector<TransitionPoint> out;
  // Flips are taken between consecutive non-zero samples; a sample sitting on the closing
  // itself (index 0) is the hit.
  std::size_t prev = ts.size();
  for (std::size_t j = 0; j < ts.size(); ++j) {
    if (idx[j] == 0) continue;
    const std::size_t i = prev;
    prev = j;
    if (i == ts.size() || idx[i] != -idx[j]) continue;
    double lo = ts[i], hi = ts[j];
    const int s_lo = idx[i];
    double hit = std::numeric_limits<double>::quiet_NaN();
    double narrowest = std::numeric_limits<double>::infinity();
    for (std::size_t m = i + 1; m < j; ++m) {
      GapInfo g;
      index_of(family(ts[m]), pol, gapOrder, strict, &g);
      if (g.width() < narrowest) {
        narrowest = g.width();
        hit = ts[m];
      }
    }
    for (int it = 0; it < 200 && std::isnan(hit); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      const int s = index_of(family(mid), pol, gapOrder, strict);
      if (s == 0) {
        hit = mid;
        break;
      }
      (s == s_lo ? lo : hi) = mid;
    }
    GapInfo best;
    double param = hit;
    if (std::isnan(hit)) {
      GapInfo g_lo, g_hi;
      index_of(family(lo), pol, gapOrder, strict, &g_lo);
      index_of(family(hi), pol, gapOrder, strict, &g_hi);
      const bool take_lo = g_lo.width() <= g_hi.width();
      best = take_lo ? g_lo : g_hi;
      param = take_lo ? lo : hi;
    } else {
      index_of(family(hit), pol, gapOrder, strict, &best);
    }
    const UnitCell c = family(param);
    const double kc = best.closed ? best.extremumK : 0.5 * (best.lower + best.upper);
    out.push_back({param, kc, best.width(), distance_to_plus_minus_identity(cell_monodromy(c, kc, pol)), idx[i],
                   idx[j]});
  }
  return out;
}

std::vector<TransitionPoint> transition_detect(const CellFamily& family, Polarization pol, double t0, double t1,
                                               int steps, double targetMin, double targetMax,
                                               const EdgeSearchOptions& opts) {
  const auto g = tracked_gap(family(t0), pol, targetMin, targetMax, 0.0, opts);
  if (!g) return {};
  return transition_detect(family, pol, t0, t1, steps, g->order, opts);
}

}  // namespace topo1d
