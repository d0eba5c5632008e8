#pragma once

#include <ostream>
#include <vector>

#include "topo1d/interface.hpp"

namespace topo1d {

struct StackTransfer {
  Matrix2 value;
  double detDrift{0.0};  // |det - 1| of the quad-precision product
};

/// M_B^{periodsB} M_A^{periodsA}: crystal A on the incidence side.
StackTransfer total_transfer(const StackConfig& stack, cplx k0, Polarization pol);

struct RT {
  cplx r;
  cplx t;
};

/// Plane wave e^{i k0 n0 x} incident from the left in the ambient medium, which fills
/// both x < 0 and x > L. Throws NumericalError when the matching system is singular.
RT rt_coefficients(const StackConfig& stack, double k0, Polarization pol);

struct SpectrumPoint {
  double k0;
  cplx r;
  cplx t;
  double T;
  double R;
};

struct Spectrum {
  std::vector<SpectrumPoint> points;
  double maxDetDrift{0.0};
};

Spectrum transmission_spectrum(const StackConfig& stack, Polarization pol, const std::vector<double>& grid);
namespace serial {
Spectrum transmission_spectrum(const StackConfig& stack, Polarization pol, const std::vector<double>& grid);
}

/// Columns k0, T, R, r_re, r_im, t_re, t_im.
void write_spectrum_csv(std::ostream& os, const Spectrum& s);

inline constexpr double kPeakProminence = 2.0;

struct PeakReport {
  double k0peak;
  double height;
  double fwhm;
  Interval gap;
  bool underResolved{false};  // grid step above fwhm / 5, or a half-maximum crossing outside the gap
};

/// Local maxima of T at grid points strictly inside each gap whose height is at least
/// kPeakProminence times the larger of the two in-gap minima flanking it. Position and
/// height are refined by a parabola through the three samples; FWHM by linear
/// interpolation of the half-maximum crossings.
std::vector<PeakReport> peak_detect(const Spectrum& s, const std::vector<Interval>& gaps);

void write_peaks_json(std::ostream& os, const std::vector<PeakReport>& peaks);

/// Uniform grid kmin, kmin + step, ..., up to kmax (inclusive within step/2).
std::vector<double> uniform_grid(double kmin, double kmax, double step);

}  // namespace topo1d
