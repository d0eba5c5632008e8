#include "topo1d/phase_diagram.hpp"

#include <stdexcept>

#include "topo1d/io.hpp"
#include "topo1d/parallel.hpp"

namespace topo1d {

double PhaseGrid::eps1_at(int i) const {
  return params.eps1Min + (params.eps1Max - params.eps1Min) * i / (params.eps1Steps - 1);
}
double PhaseGrid::h1_at(int j) const { return params.h1Min + (params.h1Max - params.h1Min) * j / (params.h1Steps - 1); }

PhasePoint phase_point(const SweepParams& params, double eps1, double h1) {
  PhasePoint p;
  p.eps1 = eps1;
  p.h1 = h1;
  const UnitCell cell = symmetric_two_layer_cell(eps1, h1, params.eps2);
  const auto g = tracked_gap(cell, params.pol, params.targetMin, params.targetMax, params.minFraction, params.edge);
  if (!g) return p;
  p.index = g->index();
  p.gapWidth = g->width();
  p.gapOrder = g->order;
  p.lowConfidence = g->lowConfidence;
  return p;
}

namespace {
void check_params(const SweepParams& s) {
  if (s.eps1Steps < 2 || s.h1Steps < 2) throw std::invalid_argument("phase sweep needs at least 2 points per axis");
  if (!(s.h1Min > 0.0) || !(s.h1Max < 1.0) || !(s.h1Max >= s.h1Min))
    throw std::invalid_argument("phase sweep h1 range must lie inside (0, 1)");
  if (!(s.eps1Max >= s.eps1Min)) throw std::invalid_argument("phase sweep eps1 range is reversed");
  if (!(s.targetMax > s.targetMin)) throw std::invalid_argument("phase sweep target interval is empty");
}
}  // namespace

PhaseGrid sweep(const SweepParams& params, const std::function<void(int)>& progress) {
  check_params(params);
  PhaseGrid grid;
  grid.params = params;
  grid.points.resize(static_cast<std::size_t>(params.eps1Steps) * params.h1Steps);
  for (int j = 0; j < params.h1Steps; ++j) {
    const double h1 = grid.h1_at(j);
    parallel_for(static_cast<std::size_t>(params.eps1Steps), [&](std::size_t i) {
      grid.points[static_cast<std::size_t>(j) * params.eps1Steps + i] =
          phase_point(params, grid.eps1_at(static_cast<int>(i)), h1);
    });
    if (progress) progress(j);
  }
  return grid;
}

namespace serial {
PhaseGrid sweep(const SweepParams& params) {
  check_params(params);
  PhaseGrid grid;
  grid.params = params;
  grid.points.reserve(static_cast<std::size_t>(params.eps1Steps) * params.h1Steps);
  for (int j = 0; j < params.h1Steps; ++j)
    for (int i = 0; i < params.eps1Steps; ++i) grid.points.push_back(phase_point(params, grid.eps1_at(i), grid.h1_at(j)));
  return grid;
}
}  // namespace serial

std::vector<BoundaryCheck> verify_boundaries(const PhaseGrid& grid) {
  const SweepParams& s = grid.params;
  std::vector<BoundaryCheck> out;
  auto consider = [&](int i1, int j1, int i2, int j2) {
    const PhasePoint& a = grid.at(i1, j1);
    const PhasePoint& b = grid.at(i2, j2);
    if (a.index == b.index) return;
    BoundaryCheck c{i1, j1, i2, j2, a.index, b.index};
    c.sameGap = a.index * b.index == -1 && a.gapOrder == b.gapOrder;
    if (c.sameGap) {
      EdgeSearchOptions strict = s.edge;
      strict.tolTransition = 0.0;
      // Index of the same-order gap along the segment; 0 marks an unresolvable closing.
      auto at = [&](double t, GapInfo* info) {
        const double e = a.eps1 + t * (b.eps1 - a.eps1), h = a.h1 + t * (b.h1 - a.h1);
        const GapInfo g = gap_of_order(symmetric_two_layer_cell(e, h, s.eps2), s.pol, a.gapOrder, strict);
        if (info) *info = g;
        return g.index();
      };
      double lo = 0.0, hi = 1.0;
      double hit = -1.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const int ix = at(mid, nullptr);
        if (ix == 0) {
          hit = mid;
          break;
        }
        (ix == a.index ? lo : hi) = mid;
      }
      GapInfo g;
      double t = hit;
      if (hit < 0.0) {
        GapInfo gl, gh;
        at(lo, &gl);
        at(hi, &gh);
        const bool take_lo = gl.width() <= gh.width();
        g = take_lo ? gl : gh;
        t = take_lo ? lo : hi;
      } else {
        at(hit, &g);
      }
      c.closingEps1 = a.eps1 + t * (b.eps1 - a.eps1);
      c.closingH1 = a.h1 + t * (b.h1 - a.h1);
      c.closingWidth = g.width();
      c.colocated = c.closingWidth < kClosingWidth;
    }
    out.push_back(c);
  };
  for (int j = 0; j < s.h1Steps; ++j)
    for (int i = 0; i < s.eps1Steps; ++i) {
      if (i + 1 < s.eps1Steps) consider(i, j, i + 1, j);
      if (j + 1 < s.h1Steps) consider(i, j, i, j + 1);
    }
  return out;
}

void write_phase_csv(std::ostream& os, const PhaseGrid& grid) {
  os << "eps1,h1,index,gap_width\n";
  for (const auto& p : grid.points) os << fmt(p.eps1) << ',' << fmt(p.h1) << ',' << p.index << ',' << fmt(p.gapWidth) << '\n';
}

void write_phase_pgm(std::ostream& os, const PhaseGrid& grid) {
  const SweepParams& s = grid.params;
  os << "P2\n" << s.eps1Steps << ' ' << s.h1Steps << "\n255\n";
  for (int j = s.h1Steps - 1; j >= 0; --j) {
    for (int i = 0; i < s.eps1Steps; ++i) {
      const int ix = grid.at(i, j).index;
      os << (ix > 0 ? 255 : ix < 0 ? 0 : 128) << (i + 1 < s.eps1Steps ? ' ' : '\n');
    }
  }
}

}  // namespace topo1d
