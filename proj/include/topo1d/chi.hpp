#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "topo1d/monodromy.hpp"

namespace topo1d {

/// Point of the Riemann sphere stored as the projective pair [num : den].
/// The pair is never (0, 0); den == 0 is the point at infinity.
class ChiValue {
 public:
  ChiValue(cplx num, cplx den);
  static ChiValue infinity() { return {1.0, 0.0}; }
  static ChiValue finite(cplx v) { return {v, 1.0}; }

  cplx num() const { return num_; }
  cplx den() const { return den_; }
  bool is_infinite() const { return den_ == cplx{0.0}; }
  /// num/den; infinite when den == 0.
  cplx value() const;
  /// |chi|, +inf at the point at infinity.
  double magnitude() const;
  ChiValue negated() const { return {-num_, den_}; }

  /// Stereographic coordinates with chi = 0 at the north pole (0, 0, 1) and infinity
  /// at the south pole.
  struct SpherePoint {
    double x, y, z;
  };
  SpherePoint sphere() const;

 private:
  cplx num_, den_;
};

/// Chordal metric |a - b| / sqrt((1+|a|^2)(1+|b|^2)), extended projectively to infinity.
double chordal_distance(const ChiValue& a, const ChiValue& b);

enum class ChiStatus { Regular, Ramification, Transition };
const char* to_string(ChiStatus s);

struct ChiSample {
  ChiStatus status;
  std::optional<ChiValue> chi;  // absent at a Transition (M ~ +-I)
};

/// chi = u(0)/u'(0) of the eigenvector whose eigenvalue has |z| < 1.
ChiSample chi_value(const Matrix2& m, double tolDegen = kDefaultTolDegen);

/// chi_value of M(k0 + i delta): the branch that continues |z| < 1 through band edges.
ChiSample chi_continued(const UnitCell& cell, double k0, Polarization pol, double delta,
                        double tolDegen = kDefaultTolDegen);

struct ScanRect {
  double reMin, reMax, imMin, imMax;
};

struct ChiScan {
  ScanRect rect;
  int nx{0}, ny{0};
  std::vector<ChiSample> grid;  // row-major: index = j * nx + i, i along Re k0, j along Im k0

  cplx k0_at(int i, int j) const;
  const ChiSample& at(int i, int j) const { return grid[static_cast<std::size_t>(j) * nx + i]; }
};

ChiScan chi_scan(const UnitCell& cell, Polarization pol, const ScanRect& rect, int nx, int ny,
                 double tolDegen = kDefaultTolDegen);
namespace serial {
ChiScan chi_scan(const UnitCell& cell, Polarization pol, const ScanRect& rect, int nx, int ny,
                 double tolDegen = kDefaultTolDegen);
}

/// CSV columns k0_re, k0_im, abs_chi, arg_chi, flag (0 regular, 1 ramification, 2 transition).
void write_scan_csv(std::ostream& os, const ChiScan& scan);

/// Binary grid: magic "CHISCAN1", int32 nx, int32 ny, 4 float64 (reMin reMax imMin imMax),
/// then nx*ny float64 |chi| row-major (j outer); +inf at poles, NaN at transitions.
/// Little-endian host byte order.
void write_scan_binary(std::ostream& os, const ChiScan& scan);

struct ScanGridFile {
  ScanRect rect;
  int nx{0}, ny{0};
  std::vector<double> magnitudes;
};
ScanGridFile read_scan_binary(std::istream& is);

/// Chordal distance between chi^+ (eigenvalue z) and -chi^- (eigenvalue 1/z), the two
/// eigenvectors computed independently. Zero for inversion-symmetric cells. Empty at
/// degenerate points.
std::optional<double> chi_pair_relation_check(const UnitCell& cell, Polarization pol, cplx k0,
                                              double tolDegen = kDefaultTolDegen);

}  // namespace topo1d
