#pragma once

#include <cstddef>
#include <functional>
#include <numbers>
#include <ostream>
#include <vector>

#include "topo1d/polezero.hpp"

namespace topo1d {

struct SweepParams {
  double eps1Min{1.0}, eps1Max{6.0};
  int eps1Steps{60};
  double h1Min{0.02}, h1Max{0.98};
  int h1Steps{60};
  double eps2{1.0};
  Polarization pol{Polarization::Epar};
  double targetMin{2.4 * 2.0 * std::numbers::pi};
  double targetMax{2.6 * 2.0 * std::numbers::pi};
  double minFraction{0.1};  // overlap with the target, as a fraction of its length
  EdgeSearchOptions edge{};
};

struct PhasePoint {
  double eps1{0.0};
  double h1{0.0};
  int index{0};        // +1 Pole-Zero, -1 Zero-Pole, 0 no gap in the target interval
  double gapWidth{0.0};
  int gapOrder{0};     // 0 when index is 0
  bool lowConfidence{false};
};

struct PhaseGrid {
  SweepParams params;
  std::vector<PhasePoint> points;  // index = j * eps1Steps + i, i along eps1, j along h1

  const PhasePoint& at(int i, int j) const { return points[static_cast<std::size_t>(j) * params.eps1Steps + i]; }
  double eps1_at(int i) const;
  double h1_at(int j) const;
};

/// Index of the gap of the symmetric two-slab cell (eps1, h1, eps2) overlapping the
/// target interval most.
PhasePoint phase_point(const SweepParams& params, double eps1, double h1);

/// Row-by-row parallel sweep. `progress(row)` is called from the calling thread once per
/// finished row when supplied.
PhaseGrid sweep(const SweepParams& params, const std::function<void(int)>& progress = {});
namespace serial {
PhaseGrid sweep(const SweepParams& params);
}

/// An index change between two neighbouring grid points.
struct BoundaryCheck {
  int i1, j1, i2, j2;
  int index1, index2;
  bool sameGap{false};          // +1 <-> -1 with equal gap order: a gap closing must lie between
  bool colocated{false};        // sameGap and a closing (width < kClosingWidth) was found by bisection
  double closingEps1{0.0}, closingH1{0.0};
  double closingWidth{0.0};
};

inline constexpr double kClosingWidth = 1e-6;

/// Bisects every +1 <-> -1 change of the same gap along the segment joining the two grid
/// points. Changes to or from 0 (the gap leaving the target window) and changes between
/// different gap orders are listed with sameGap = false.
std::vector<BoundaryCheck> verify_boundaries(const PhaseGrid& grid);

/// Columns eps1, h1, index, gap_width.
void write_phase_csv(std::ostream& os, const PhaseGrid& grid);
/// Plain-text portable grey map (P2): 0 for index -1, 128 for 0, 255 for +1; first row is
/// the largest h1.
void write_phase_pgm(std::ostream& os, const PhaseGrid& grid);

}  // namespace topo1d
