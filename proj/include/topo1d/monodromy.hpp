#pragma once

#include <optional>
#include <ostream>
#include <utility>
#include <variant>
#include <vector>

#include "topo1d/matrix2.hpp"
#include "topo1d/structure.hpp"

namespace topo1d {

inline constexpr double kDefaultTolEdge = 1e-9;
inline constexpr double kDefaultTolDegen = 1e-9;

/// Transfer matrix of one homogeneous layer: U(d) = M U(0) with U = (u, q^{-1} du/dx).
Matrix2 layer_matrix(const Layer& layer, cplx k0, Polarization pol);

/// Transfer matrix over the first `width` of a layer (0 <= width <= layer.width).
Matrix2 partial_layer_matrix(const Layer& layer, double width, cplx k0, Polarization pol);

/// dM/dk0 of a single layer.
Matrix2 layer_matrix_derivative(const Layer& layer, cplx k0, Polarization pol);

/// Product M_n ... M_1 over the layers of one period.
Matrix2 cell_monodromy(const UnitCell& cell, cplx k0, Polarization pol);

struct MatrixWithDerivative {
  Matrix2 value;
  Matrix2 derivative;
};
MatrixWithDerivative cell_monodromy_with_derivative(const UnitCell& cell, cplx k0, Polarization pol);

/// R(x, 0): propagates U from 0 to x in [0, 1].
Matrix2 resolvent(const UnitCell& cell, double x, cplx k0, Polarization pol);

enum class SpectralKind { Band, Gap, Edge, FullDegeneracy };
const char* to_string(SpectralKind kind);

struct SpectralClass {
  SpectralKind kind;
  cplx trace;
};

/// Classification by |Re tr M| against 2 with half-width tolEdge.
SpectralClass classify(const UnitCell& cell, double k0, Polarization pol,
                       double tolEdge = kDefaultTolEdge);
SpectralClass classify_matrix(const Matrix2& m, double tolEdge = kDefaultTolEdge);

struct Eigenpair {
  cplx z;
  Vec2 U;  // normalized so the larger component equals 1
};

struct DegenerateReport {
  cplx z;                          // the double eigenvalue (tr/2)
  bool fullDegeneracy;             // M ~ +-I: every vector is an eigenvector
  std::optional<Vec2> eigenvector; // unique eigenvector at a ramification point
};

/// (small, large) eigenpairs ordered so |first.z| <= 1, or a degeneracy report when
/// |z - 1/z| < tolDegen. Exact modulus ties are broken by Im z >= 0 for the first.
using EigenResult = std::variant<std::pair<Eigenpair, Eigenpair>, DegenerateReport>;
EigenResult eigenpairs(const Matrix2& m, double tolDegen = kDefaultTolDegen);

/// Eigenvector for eigenvalue z of a unimodular M, max-component normalized.
Vec2 eigenvector_for(const Matrix2& m, cplx z);

struct BandPoint {
  double k0;
  SpectralClass cls;
  std::optional<double> theta;  // present only inside bands
  int branch;                   // band index for Band/Edge points, gap order for Gap points
};

struct BandStructure {
  std::vector<BandPoint> points;
};

/// Per-point classification over a strictly increasing grid. Band index j counts the
/// extrema of tr M in (0, k0) plus one; theta = +-acos(tr/2) with the sign chosen so
/// theta increases across each band.
BandStructure band_structure(const UnitCell& cell, Polarization pol, const std::vector<double>& grid,
                             double tolEdge = kDefaultTolEdge);

namespace serial {
BandStructure band_structure(const UnitCell& cell, Polarization pol, const std::vector<double>& grid,
                             double tolEdge = kDefaultTolEdge);
}

void write_band_csv(std::ostream& os, const BandStructure& bs);

struct FieldSample {
  double x;
  cplx u;
  cplx du;  // q-weighted derivative u'
};

/// U(x) = R(x, 0) U(0) at `samples` uniformly spaced points of [0, 1].
std::vector<FieldSample> field_profile(const UnitCell& cell, cplx k0, Polarization pol,
                                       const Vec2& U0, int samples);

/// Real-valued trace and its k0-derivative for lossless use on the real axis.
struct TraceSample {
  double k0;
  double trace;
  double slope;
};
TraceSample trace_sample(const UnitCell& cell, double k0, Polarization pol);

/// Local extremum of Re tr M on the positive real axis. For a lossless cell every
/// extremum sits inside a gap (open, or closed when |trace| = 2), so `order` is also the
/// gap order: the number of bands below it.
struct TraceExtremum {
  int order;
  double k0;
  double trace;
};

inline constexpr double kDefaultScanStep = 2.0 * 3.14159265358979323846 * 1e-3;

/// All extrema in (0, kmax], found by sign changes of the slope on a grid of spacing
/// `step` and polished by bisection. Two extrema closer than `step` may be missed.
std::vector<TraceExtremum> trace_extrema(const UnitCell& cell, Polarization pol, double kmax,
                                         double step = kDefaultScanStep);

}  // namespace topo1d
