#pragma once

#include <string>
#include <utility>
#include <vector>

#include "topo1d/matrix2.hpp"

namespace topo1d {

enum class Polarization { Epar, Hpar };

const char* to_string(Polarization pol);
Polarization polarization_from_string(const std::string& s);

/// Homogeneous slab. Width is in units of the period.
struct Layer {
  cplx eps{1.0};
  cplx mu{1.0};
  double width{1.0};

  bool lossless() const { return eps.imag() == 0.0 && mu.imag() == 0.0; }
  bool passive() const { return eps.imag() >= 0.0 && mu.imag() >= 0.0; }
};

/// Coefficients in H = -p^{-1} d/dx (q^{-1} d/dx .).
struct PQ {
  cplx p;
  cplx q;
};

PQ pq_of_layer(const Layer& layer, Polarization pol);

inline constexpr double kWidthSumTol = 1e-12;
inline constexpr double kSliverWidth = 1e-12;
inline constexpr double kDefaultSymmetryTol = 1e-9;

/// One period of a layered medium. Construction rejects empty cells, non-positive
/// or non-finite widths, and widths that do not sum to 1 within kWidthSumTol.
class UnitCell {
 public:
  UnitCell(std::vector<Layer> layers, std::string label = {});

  const std::vector<Layer>& layers() const { return layers_; }
  const std::string& label() const { return label_; }
  std::size_t size() const { return layers_.size(); }

  bool lossless() const;
  bool passive() const;

  /// Same geometry with Re(eps), Re(mu).
  UnitCell lossless_part() const;
  UnitCell with_label(std::string label) const;

 private:
  std::vector<Layer> layers_;
  std::string label_;
};

/// Two-slab cell [eps1 over h1][eps2 over 1-h1], mu = 1, origin at the start of slab 1.
UnitCell two_layer_cell(cplx eps1, double h1, cplx eps2, std::string label = {});

/// Same medium in the gauge centred on slab 1: layers (h1/2, 1-h1, h1/2).
UnitCell symmetric_two_layer_cell(cplx eps1, double h1, cplx eps2, std::string label = {});

/// Cell describing the same infinite medium with origin moved to x0 in [0, 1).
UnitCell recenter(const UnitCell& cell, double x0);

bool is_inversion_symmetric(const UnitCell& cell, double tol = kDefaultSymmetryTol);

/// Origins x0 in [0,1) for which recenter(cell, x0) is inversion symmetric, sorted.
/// Homogeneous cells return {0, 0.5}. Empty when no symmetric gauge exists.
std::vector<double> symmetric_origins(const UnitCell& cell, double tol = kDefaultSymmetryTol);

/// Adjacent equal-material layers merged, including across the period boundary
/// when the cell starts and ends with the same material. Returns (start, layer)
/// pairs on the circle; start may be negative for a slab straddling x = 0.
std::vector<std::pair<double, Layer>> circular_slabs(const UnitCell& cell,
                                                     double tol = kDefaultSymmetryTol);

bool same_material(const Layer& a, const Layer& b, double tol);

/// Finite stack: periodsA copies of cellA on the incidence side, then periodsB of cellB.
struct StackConfig {
  UnitCell cellA;
  UnitCell cellB;
  int periodsA{0};
  int periodsB{0};
  double ambientIndex{1.0};

  StackConfig(UnitCell a, UnitCell b, int na, int nb, double ambient = 1.0);
  double length() const { return static_cast<double>(periodsA + periodsB); }
};

}  // namespace topo1d
