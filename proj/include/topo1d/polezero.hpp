#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "topo1d/monodromy.hpp"

namespace topo1d {

enum class EdgeKind { Pole, Zero, Transition };
const char* to_string(EdgeKind k);

inline constexpr double kDefaultTolTransition = 1e-6;  // on |m12|, |m21|
inline constexpr double kConfidenceRatio = 1e3;

struct BandEdge {
  cplx k0;
  int traceSign{1};  // tr M(k0) = 2 * traceSign
  EdgeKind kind{EdgeKind::Pole};
  double residualNorm{0.0};  // the smaller off-diagonal magnitude
  double m12Abs{0.0};
  double m21Abs{0.0};
  double traceResidual{0.0};  // |tr M - 2 traceSign|
  bool generic{true};         // false for a tangential touching (closed gap)
  bool lowConfidence{false};  // off-diagonal ratio below kConfidenceRatio
  bool resolved{true};        // false when complex refinement did not converge
  int gapOrder{0};            // gap bounded by this edge; 0 for the k0 = 0 edge of band 1
  bool lowerSide{true};       // lower or upper edge of that gap
};

struct EdgeSearchOptions {
  double step{kDefaultScanStep};   // extremum scan spacing
  double tolTangent{1e-8};         // |(|tr| - 2)| at an extremum below which the gap is closed
  double tolTransition{kDefaultTolTransition};
  int maxNewton{100};
  double newtonTol{1e-10};
};

/// Edges with Re k0 in [kmin, kmax], sorted. Lossless: real roots of tr M -+ 2, bracketed
/// between consecutive extrema of tr M and bisected to machine precision; closed gaps are
/// reported as non-generic edges. Lossy: complex roots polished by damped Newton from the
/// edges of lossless_part().
std::vector<BandEdge> band_edges(const UnitCell& cell, Polarization pol, double kmin, double kmax,
                                 bool lossy, const EdgeSearchOptions& opts = {});

/// Pole when |m21| << |m12| (eigenvector (1,0)), Zero when |m12| << |m21| (eigenvector
/// (0,1)), Transition when both are below tolTransition. Throws std::invalid_argument when
/// |tr M -+ 2| > 1e-6 at k0.
BandEdge classify_edge(const UnitCell& cell, Polarization pol, cplx k0,
                       double tolTransition = kDefaultTolTransition);
BandEdge classify_edge_matrix(const Matrix2& m, double tolTransition = kDefaultTolTransition);

/// One gap of a lossless cell, identified by its order (number of bands below).
struct GapInfo {
  int order{0};
  int traceSign{1};
  double extremumK{0.0};
  double extremumTrace{0.0};
  bool closed{false};  // tangential: | |tr| - 2 | <= tolTangent at the extremum
  double lower{0.0};
  double upper{0.0};
  EdgeKind lowerKind{EdgeKind::Transition};
  EdgeKind upperKind{EdgeKind::Transition};
  bool lowConfidence{false};

  double width() const { return closed ? 0.0 : upper - lower; }
  /// +1 for Pole-Zero, -1 for Zero-Pole, 0 otherwise.
  int index() const;
};

/// Gaps whose closure meets [kmin, kmax], in order.
std::vector<GapInfo> gaps_in(const UnitCell& cell, Polarization pol, double kmin, double kmax,
                             const EdgeSearchOptions& opts = {});

/// The gap of a given order, however narrow. An open gap is any positive |tr| - 2 at the
/// extremum, so the tolTangent option is ignored here.
GapInfo gap_of_order(const UnitCell& cell, Polarization pol, int order, const EdgeSearchOptions& opts = {});

struct PoleZeroPattern {
  double kmin{0.0}, kmax{0.0};
  bool lossy{false};
  std::vector<BandEdge> edges;  // sorted by Re k0
  bool consistent{true};        // spectral classes alternate as the edges imply

  const BandEdge* find(int gapOrder, bool lowerSide) const;
  /// Orders of gaps with both edges present and generic.
  std::vector<int> complete_gaps() const;
};

/// band_edges + classify_edge. When kmin <= 0 the k0 = 0 edge of band 1 (M = [[1, sum q d],
/// [0, 1]], a Pole) is included with gapOrder 0.
PoleZeroPattern pattern(const UnitCell& cell, Polarization pol, double kmin, double kmax, bool lossy,
                        const EdgeSearchOptions& opts = {});

void write_pattern_json(std::ostream& os, const PoleZeroPattern& p);

struct ZakPhase {
  int band{0};
  bool defined{false};
  double phase{0.0};  // 0 or pi when defined
  EdgeKind lower{EdgeKind::Transition};
  EdgeKind upper{EdgeKind::Transition};
};

/// Band j lies between the upper edge of gap j-1 and the lower edge of gap j.
/// Equal kinds give 0, different kinds pi; a Transition edge leaves the phase undefined.
/// Throws std::out_of_range when the pattern does not contain both edges.
ZakPhase zak_from_pattern(const PoleZeroPattern& p, int band);

struct WilsonResult {
  double raw{0.0};                // Berry phase mod 2pi in [0, 2pi)
  std::optional<double> snapped;  // 0 or pi when raw is within kZakSnap of one of them
};
inline constexpr double kZakSnap = 0.15;

/// Discrete Berry phase of band j from periodic Bloch functions on a midpoint grid of the
/// Brillouin zone, inner product weighted by p(x). Throws NumericalError when a band edge
/// is a closed gap or the dispersion cannot be inverted.
WilsonResult zak_wilson_oracle(const UnitCell& cell, Polarization pol, int band, int gridN);

void write_zak_csv(std::ostream& os, const std::vector<ZakPhase>& zak,
                   const std::vector<std::optional<WilsonResult>>& wilson);

struct TransitionPoint {
  double param;
  double k0;
  double gapWidth;
  double distanceToIdentity;  // entrywise max |M -+ I| at the gap centre
  int indexBefore;
  int indexAfter;
};

using CellFamily = std::function<UnitCell(double)>;

/// Tracks one gap (by order) along family(t), t in [t0, t1] sampled at steps+1 points, and
/// bisects every sign flip of its Pole-Zero index down to the closing point.
std::vector<TransitionPoint> transition_detect(const CellFamily& family, Polarization pol, double t0, double t1,
                                               int steps, int gapOrder, const EdgeSearchOptions& opts = {});

/// Same, with the tracked gap chosen at t0 as the one overlapping [targetMin, targetMax] most.
std::vector<TransitionPoint> transition_detect(const CellFamily& family, Polarization pol, double t0, double t1,
                                               int steps, double targetMin, double targetMax,
                                               const EdgeSearchOptions& opts = {});

/// Order of the gap overlapping [targetMin, targetMax] the most, if the overlap exceeds
/// minFraction of the interval length.
std::optional<GapInfo> tracked_gap(const UnitCell& cell, Polarization pol, double targetMin, double targetMax,
                                   double minFraction = 0.0, const EdgeSearchOptions& opts = {});

}  // namespace topo1d
