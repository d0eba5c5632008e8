#include "topo1d/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "topo1d/errors.hpp"
#include "topo1d/io.hpp"
#include "topo1d/parallel.hpp"

namespace topo1d {

namespace {

// Quad-precision 2x2 complex product: at N = 10 per side |T| reaches 1e6 in deep gaps and
// the double-precision determinant would be dominated by eps |T|^2.
using quad = __float128;

struct QComplex {
  quad re{0}, im{0};
};
QComplex operator*(QComplex a, QComplex b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
QComplex operator+(QComplex a, QComplex b) { return {a.re + b.re, a.im + b.im}; }
QComplex operator-(QComplex a, QComplex b) { return {a.re - b.re, a.im - b.im}; }

struct QMatrix {
  QComplex a{1, 0}, b{}, c{}, d{1, 0};
};
QMatrix operator*(const QMatrix& x, const QMatrix& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}
QComplex widen(cplx z) { return {static_cast<quad>(z.real()), static_cast<quad>(z.imag())}; }
QMatrix widen(const Matrix2& m) { return {widen(m.m11), widen(m.m12), widen(m.m21), widen(m.m22)}; }
cplx narrow(QComplex z) { return {static_cast<double>(z.re), static_cast<double>(z.im)}; }

}  // namespace

StackTransfer total_transfer(const StackConfig& stack, cplx k0, Polarization pol) {
  QMatrix t;
  if (stack.periodsA > 0) {
    const QMatrix ma = widen(cell_monodromy(stack.cellA, k0, pol));
    for (int i = 0; i < stack.periodsA; ++i) t = ma * t;
  }
  if (stack.periodsB > 0) {
    const QMatrix mb = widen(cell_monodromy(stack.cellB, k0, pol));
    for (int i = 0; i < stack.periodsB; ++i) t = mb * t;
  }
  const QComplex det = t.a * t.d - t.b * t.c;
  const quad dr = det.re - 1, di = det.im;
  const double drift = std::hypot(static_cast<double>(dr), static_cast<double>(di));
  return {{narrow(t.a), narrow(t.b), narrow(t.c), narrow(t.d)}, drift};
}

namespace {

RT solve(const Matrix2& t, double k0, double n0, double L, Polarization pol) {
  const Layer ambient{cplx{n0 * n0}, 1.0, 1.0};
  const cplx q0 = pq_of_layer(ambient, pol).q;
  const cplx kappa = cplx{0.0, k0 * n0} / q0;
  const cplx num = kappa * t.m11 + t.m12 * kappa * kappa - t.m21 - t.m22 * kappa;
  const cplx den = kappa * t.m11 - t.m12 * kappa * kappa - t.m21 + t.m22 * kappa;
  if (std::abs(den) <= 1e-300 * (std::abs(num) + 1.0) || !std::isfinite(std::abs(den)))
    throw NumericalError("singular plane-wave matching system at k0 = " + fmt(k0));
  const cplx r = -num / den;
  const cplx tau = (t.m11 + t.m12 * kappa) + r * (t.m11 - t.m12 * kappa);
  const cplx t_out = tau * std::exp(cplx{0.0, -k0 * n0 * L});
  return {r, t_out};
}

SpectrumPoint point_at(const StackConfig& stack, double k0, Polarization pol, double& drift) {
  if (!(k0 > 0.0)) throw std::invalid_argument("rt_coefficients requires k0 > 0");
  const StackTransfer tr = total_transfer(stack, k0, pol);
  drift = tr.detDrift;
  const RT rt = solve(tr.value, k0, stack.ambientIndex, stack.length(), pol);
  return {k0, rt.r, rt.t, std::norm(rt.t), std::norm(rt.r)};
}

}  // namespace

RT rt_coefficients(const StackConfig& stack, double k0, Polarization pol) {
  double drift = 0.0;
  const SpectrumPoint p = point_at(stack, k0, pol, drift);
  return {p.r, p.t};
}

Spectrum transmission_spectrum(const StackConfig& stack, Polarization pol, const std::vector<double>& grid) {
  Spectrum s;
  s.points.resize(grid.size());
  std::vector<double> drift(grid.size(), 0.0);
  parallel_for(grid.size(), [&](std::size_t i) { s.points[i] = point_at(stack, grid[i], pol, drift[i]); });
  for (double d : drift) s.maxDetDrift = std::max(s.maxDetDrift, d);
  return s;
}

namespace serial {
Spectrum transmission_spectrum(const StackConfig& stack, Polarization pol, const std::vector<double>& grid) {
  Spectrum s;
  s.points.reserve(grid.size());
  for (double k : grid) {
    double d = 0.0;
    s.points.push_back(point_at(stack, k, pol, d));
    s.maxDetDrift = std::max(s.maxDetDrift, d);
  }
  return s;
}
}  // namespace serial

void write_spectrum_csv(std::ostream& os, const Spectrum& s) {
  os << "k0,T,R,r_re,r_im,t_re,t_im\n";
  for (const auto& p : s.points)
    os << fmt(p.k0) << ',' << fmt(p.T) << ',' << fmt(p.R) << ',' << fmt(p.r.real()) << ',' << fmt(p.r.imag())
       << ',' << fmt(p.t.real()) << ',' << fmt(p.t.imag()) << '\n';
}

std::vector<PeakReport> peak_detect(const Spectrum& s, const std::vector<Interval>& gaps) {
  std::vector<PeakReport> out;
  const auto& pts = s.points;
  for (const auto& gap : gaps) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (gap.contains_strictly(pts[i].k0)) idx.push_back(i);
    if (idx.size() < 3) continue;
    for (std::size_t m = 1; m + 1 < idx.size(); ++m) {
      const double T0 = pts[idx[m - 1]].T, T1 = pts[idx[m]].T, T2 = pts[idx[m + 1]].T;
      if (!(T1 > T0 && T1 >= T2)) continue;
      double left_min = T1, right_min = T1;
      for (std::size_t l = 0; l < m; ++l) left_min = std::min(left_min, pts[idx[l]].T);
      for (std::size_t r = m + 1; r < idx.size(); ++r) right_min = std::min(right_min, pts[idx[r]].T);
      if (T1 < kPeakProminence * std::max(left_min, right_min)) continue;

      PeakReport p;
      p.gap = gap;
      const double k0 = pts[idx[m - 1]].k0, k1 = pts[idx[m]].k0, k2 = pts[idx[m + 1]].k0;
      // Parabola through three samples (possibly non-uniform).
      const double d0 = (T1 - T0) / (k1 - k0), d1 = (T2 - T1) / (k2 - k1);
      const double a = (d1 - d0) / (k2 - k0);
      p.k0peak = k1;
      p.height = T1;
      if (a < 0.0) {
        const double kv = 0.5 * (k0 + k1) - d0 / (2.0 * a);
        if (kv > k0 && kv < k2) {
          p.k0peak = kv;
          p.height = std::max(T1, T0 + (kv - k0) * (d0 + a * (kv - k1)));
        }
      }
      const double half = 0.5 * p.height;
      bool clipped = false;
      double kl = pts[idx.front()].k0, kr = pts[idx.back()].k0;
      std::size_t l = m;
      while (l > 0 && pts[idx[l - 1]].T > half) --l;
      if (l == 0) {
        clipped = true;
      } else {
        const auto& a0 = pts[idx[l - 1]];
        const auto& a1 = pts[idx[l]];
        kl = a0.k0 + (half - a0.T) * (a1.k0 - a0.k0) / (a1.T - a0.T);
      }
      std::size_t r = m;
      while (r + 1 < idx.size() && pts[idx[r + 1]].T > half) ++r;
      if (r + 1 == idx.size()) {
        clipped = true;
      } else {
        const auto& b0 = pts[idx[r]];
        const auto& b1 = pts[idx[r + 1]];
        kr = b0.k0 + (half - b0.T) * (b1.k0 - b0.k0) / (b1.T - b0.T);
      }
      p.fwhm = kr - kl;
      const double step = std::max(k1 - k0, k2 - k1);
      p.underResolved = clipped || step > p.fwhm / 5.0;
      out.push_back(p);
    }
  }
  return out;
}

void write_peaks_json(std::ostream& os, const std::vector<PeakReport>& peaks) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : peaks)
    arr.push_back({{"k0peak", p.k0peak},
                   {"height", p.height},
                   {"fwhm", p.fwhm},
                   {"gap", {p.gap.lo, p.gap.hi}},
                   {"under_resolved", p.underResolved}});
  os << arr.dump(2) << '\n';
}

std::vector<double> uniform_grid(double kmin, double kmax, double step) {
  if (!(step > 0.0) || !(kmax >= kmin)) throw std::invalid_argument("uniform_grid: bad range or step");
  const auto n = static_cast<std::size_t>(std::floor((kmax - kmin) / step + 0.5)) + 1;
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = kmin + step * static_cast<double>(i);
  return g;
}

}  // namespace topo1d
