#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "topo1d/chi.hpp"
#include "topo1d/polezero.hpp"

namespace topo1d {

struct Interval {
  double lo{0.0};
  double hi{0.0};

  double width() const { return hi - lo; }
  bool contains_strictly(double k) const { return k > lo && k < hi; }
};

/// Intersections of the open gaps of both lossless cells meeting [kmin, kmax], clipped
/// to that interval. Each entry keeps the gap orders it came from.
struct CommonGap {
  Interval range;
  int orderA{0};
  int orderB{0};
};
std::vector<CommonGap> common_gaps(const UnitCell& cellA, const UnitCell& cellB, Polarization pol, double kmin,
                                   double kmax, const EdgeSearchOptions& opts = {});

/// Frobenius norm of M_A M_B - M_B M_A.
double commutator_norm(const UnitCell& cellA, const UnitCell& cellB, Polarization pol, cplx k0);
/// The same divided by |M_A|_F |M_B|_F.
double normalized_commutator_norm(const UnitCell& cellA, const UnitCell& cellB, Polarization pol, cplx k0);

inline constexpr double kChiResidualTol = 1e-8;
inline constexpr double kCommutatorTol = 1e-6;
inline constexpr int kEdgeSamples = 2001;

/// An interface state between crystal A filling x < 0 and crystal B filling x > 0.
struct EdgeModeReport {
  cplx k0star;
  Interval gap;
  double chiResidual{0.0};     // |chi_A + chi_B| at k0star
  double commutatorNorm{0.0};  // normalized
  double decayRight{0.0};      // |z| of M_B on U, < 1 for decay into x > 0
  double decayLeft{0.0};       // 1/|z'| of M_A on U, < 1 for decay into x < 0
  double eigenResidual{0.0};   // |M_A U - z' U| / |U|
  Vec2 boundaryVector;
  bool spurious{false};
  std::string diagnostic;
};

/// Roots of chi_A + chi_B inside gap, each chi taken on the |z| < 1 branch of its own cell.
/// Lossless cells: sign-change bracketing on kEdgeSamples interior points and bisection to
/// machine precision. Lossy cells: complex secant started from the roots of the lossless
/// parts, with chi evaluated at k0 + i delta where the monodromy is degenerate.
/// Throws std::invalid_argument unless both cells are inversion symmetric.
std::vector<EdgeModeReport> edge_mode_search(const UnitCell& cellA, const UnitCell& cellB, Polarization pol,
                                             const Interval& gap, double delta = 1e-8);

struct CrossingRow {
  double k0;
  std::optional<ChiValue> chiA;
  std::optional<ChiValue> negChiB;
  double commutator;  // normalized
  bool inGap;         // both cells in a gap
};

/// chi_A and -chi_B on a uniform grid over [kmin, kmax], evaluated at k0 + i delta.
std::vector<CrossingRow> chi_crossing_trace(const UnitCell& cellA, const UnitCell& cellB, Polarization pol,
                                            double kmin, double kmax, int samples, double delta = 1e-8);

/// Columns k0, chi1_im, chi1_re, neg_chi2_im, neg_chi2_re, commutator, gap_flag.
void write_crossing_csv(std::ostream& os, const std::vector<CrossingRow>& rows);
void write_edge_reports_json(std::ostream& os, const std::vector<EdgeModeReport>& reports);

/// Edge-mode roots for every pairing of the two symmetric origins of each cell.
struct GaugePairing {
  double originA;
  double originB;
  std::vector<EdgeModeReport> modes;
};
std::vector<GaugePairing> gauge_pairings(const UnitCell& cellA, const UnitCell& cellB, Polarization pol,
                                         const Interval& gap, double delta = 1e-8);

}  // namespace topo1d
