#include "topo1d/monodromy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "topo1d/io.hpp"
#include "topo1d/parallel.hpp"

namespace topo1d {

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// sin(phi)/phi
cplx sinc(cplx phi) {
  if (std::abs(phi) < 1e-3) {
    const cplx p2 = phi * phi;
    return 1.0 - p2 / 6.0 + p2 * p2 / 120.0 - p2 * p2 * p2 / 5040.0;
  }
  return std::sin(phi) / phi;
}

// (phi cos(phi) - sin(phi)) / phi^3, so that d sinc(phi)/dphi = phi * g(phi).
cplx sinc_slope(cplx phi) {
  if (std::abs(phi) < 1e-2) {
    const cplx p2 = phi * phi;
    return -1.0 / 3.0 + p2 / 30.0 - p2 * p2 / 840.0 + p2 * p2 * p2 / 45360.0;
  }
  return (phi * std::cos(phi) - std::sin(phi)) / (phi * phi * phi);
}

void check_inputs(cplx k0, double width) {
  if (!finite(k0)) throw std::invalid_argument("wavenumber must be finite");
  if (!std::isfinite(width) || width < 0.0) throw std::invalid_argument("layer width must be finite");
}

Matrix2 slab_matrix(const Layer& layer, double d, cplx k0, Polarization pol) {
  check_inputs(k0, d);
  const auto [p, q] = pq_of_layer(layer, pol);
  // nu^2 = eps mu = p q; cos and sinc are even in nu, so no branch choice enters M.
  const cplx nu = std::sqrt(layer.eps * layer.mu);
  const cplx phi = k0 * nu * d;
  const cplx c = std::cos(phi);
  const cplx sc = sinc(phi);
  return {c, q * d * sc, -k0 * k0 * p * d * sc, c};
}

}  // namespace

Matrix2 layer_matrix(const Layer& layer, cplx k0, Polarization pol) {
  return slab_matrix(layer, layer.width, k0, pol);
}

Matrix2 partial_layer_matrix(const Layer& layer, double width, cplx k0, Polarization pol) {
  if (width > layer.width * (1.0 + 1e-12)) throw std::invalid_argument("partial width exceeds layer");
  return slab_matrix(layer, width, k0, pol);
}

Matrix2 layer_matrix_derivative(const Layer& layer, cplx k0, Polarization pol) {
  const double d = layer.width;
  check_inputs(k0, d);
  const auto [p, q] = pq_of_layer(layer, pol);
  const cplx nu2 = layer.eps * layer.mu;
  const cplx phi = k0 * std::sqrt(nu2) * d;
  const cplx sc = sinc(phi);
  const cplx g = sinc_slope(phi);
  // d phi / dk0 = nu d; d sinc/dk0 = phi g nu d = k0 nu^2 d^2 g.
  const cplx dsc = k0 * nu2 * d * d * g;
  const cplx dc = -k0 * nu2 * d * d * sc;
  return {dc, q * d * dsc, -p * d * (2.0 * k0 * sc + k0 * k0 * dsc), dc};
}

Matrix2 cell_monodromy(const UnitCell& cell, cplx k0, Polarization pol) {
  Matrix2 m = Matrix2::identity();
  for (const auto& layer : cell.layers()) m = layer_matrix(layer, k0, pol) * m;
  return m;
}

MatrixWithDerivative cell_monodromy_with_derivative(const UnitCell& cell, cplx k0, Polarization pol) {
  Matrix2 m = Matrix2::identity();
  Matrix2 dm{0.0, 0.0, 0.0, 0.0};
  for (const auto& layer : cell.layers()) {
    const Matrix2 lm = layer_matrix(layer, k0, pol);
    const Matrix2 dlm = layer_matrix_derivative(layer, k0, pol);
    dm = dlm * m + lm * dm;
    m = lm * m;
  }
  return {m, dm};
}

Matrix2 resolvent(const UnitCell& cell, double x, cplx k0, Polarization pol) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("resolvent position must lie in [0, 1]");
  Matrix2 r = Matrix2::identity();
  double start = 0.0;
  const auto& layers = cell.layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const double end = (i + 1 == layers.size()) ? 1.0 : start + layers[i].width;
    if (x >= end) {
      r = layer_matrix(layers[i], k0, pol) * r;
    } else {
      if (x > start) r = partial_layer_matrix(layers[i], std::min(x - start, layers[i].width), k0, pol) * r;
      break;
    }
    start = end;
  }
  return r;
}

const char* to_string(SpectralKind kind) {
  switch (kind) {
    case SpectralKind::Band: return "band";
    case SpectralKind::Gap: return "gap";
    case SpectralKind::Edge: return "edge";
    case SpectralKind::FullDegeneracy: return "full_degeneracy";
  }
  return "?";
}

SpectralClass classify_matrix(const Matrix2& m, double tolEdge) {
  if (!(tolEdge > 0.0)) throw std::invalid_argument("edge tolerance must be positive");
  const cplx tr = m.trace();
  const double a = std::abs(tr.real());
  if (a > 2.0 + tolEdge) return {SpectralKind::Gap, tr};
  if (a < 2.0 - tolEdge) return {SpectralKind::Band, tr};
  if (std::abs(m.m12) < tolEdge && std::abs(m.m21) < tolEdge) return {SpectralKind::FullDegeneracy, tr};
  return {SpectralKind::Edge, tr};
}

SpectralClass classify(const UnitCell& cell, double k0, Polarization pol, double tolEdge) {
  if (k0 < 0.0) throw std::invalid_argument("classification requires k0 >= 0");
  return classify_matrix(cell_monodromy(cell, k0, pol), tolEdge);
}

Vec2 eigenvector_for(const Matrix2& m, cplx z) {
  const Vec2 v1{m.m12, z - m.m11};
  const Vec2 v2{z - m.m22, m.m21};
  const Vec2 v = v1.norm() >= v2.norm() ? v1 : v2;
  if (v.norm() == 0.0) return {1.0, 0.0};
  const cplx scale = std::abs(v.u) >= std::abs(v.w) ? v.u : v.w;
  return {v.u / scale, v.w / scale};
}

EigenResult eigenpairs(const Matrix2& m, double tolDegen) {
  const cplx tr = m.trace();
  const cplx s = std::sqrt(tr * tr - 4.0);
  if (std::abs(s) < tolDegen) {
    const cplx z = 0.5 * tr;
    if (std::abs(m.m12) < tolDegen && std::abs(m.m21) < tolDegen && std::abs(m.m11 - m.m22) < tolDegen)
      return DegenerateReport{z, true, std::nullopt};
    return DegenerateReport{z, false, eigenvector_for(m, z)};
  }
  const cplx r1 = 0.5 * (tr + s);
  const cplx r2 = 0.5 * (tr - s);
  const cplx big = std::abs(r1) >= std::abs(r2) ? r1 : r2;
  cplx small = 1.0 / big;
  cplx large = big;
  if (std::abs(std::abs(small) - std::abs(large)) <= 1e-14 * std::abs(large) && small.imag() < 0.0)
    std::swap(small, large);
  return std::pair{Eigenpair{small, eigenvector_for(m, small)}, Eigenpair{large, eigenvector_for(m, large)}};
}

TraceSample trace_sample(const UnitCell& cell, double k0, Polarization pol) {
  const auto md = cell_monodromy_with_derivative(cell, k0, pol);
  return {k0, md.value.trace().real(), md.derivative.trace().real()};
}

std::vector<TraceExtremum> trace_extrema(const UnitCell& cell, Polarization pol, double kmax, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("scan step must be positive");
  std::vector<TraceExtremum> out;
  if (!(kmax > 0.0)) return out;
  const auto n = static_cast<std::size_t>(std::ceil(kmax / step));
  auto at = [&](std::size_t i) { return i == n ? kmax : static_cast<double>(i) * step; };

  TraceSample prev = trace_sample(cell, at(1), pol);
  for (std::size_t i = 2; i <= n; ++i) {
    const TraceSample cur = trace_sample(cell, at(i), pol);
    if (prev.slope == 0.0 || (prev.slope > 0.0) != (cur.slope > 0.0)) {
      double lo = prev.k0, hi = cur.k0;
      double s_lo = prev.slope;
      if (prev.slope != 0.0) {
        for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double s_mid = trace_sample(cell, mid, pol).slope;
          if (s_mid == 0.0) {
            lo = hi = mid;
            break;
          }
          if ((s_mid > 0.0) == (s_lo > 0.0)) {
            lo = mid;
            s_lo = s_mid;
          } else {
            hi = mid;
          }
        }
      }
      const double ke = 0.5 * (lo + hi);
      if (out.empty() || ke - out.back().k0 > 0.5 * step)
        out.push_back({static_cast<int>(out.size()) + 1, ke, trace_sample(cell, ke, pol).trace});
    }
    prev = cur;
  }
  return out;
}

namespace {

struct RawBandPoint {
  SpectralClass cls;
};

BandStructure assemble_bands(const std::vector<double>& grid, const std::vector<RawBandPoint>& raw,
                             const std::vector<TraceExtremum>& extrema) {
  BandStructure bs;
  bs.points.reserve(grid.size());
  std::size_t below = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double k = grid[i];
    while (below < extrema.size() && extrema[below].k0 < k) ++below;
    const SpectralClass cls = raw[i].cls;
    BandPoint p{k, cls, std::nullopt, static_cast<int>(below) + 1};
    if (cls.kind == SpectralKind::Gap) {
      const bool same_side =
          below >= 1 && (extrema[below - 1].trace > 0.0) == (cls.trace.real() > 0.0);
      p.branch = same_side ? static_cast<int>(below) : static_cast<int>(below) + 1;
    } else if (cls.kind == SpectralKind::Band) {
      const double half = std::clamp(0.5 * cls.trace.real(), -1.0, 1.0);
      const double theta = std::acos(half);
      p.theta = (p.branch % 2 == 1) ? theta : -theta;
    }
    bs.points.push_back(p);
  }
  return bs;
}

void check_grid(const std::vector<double>& grid) {
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("k0 grid must be strictly increasing");
  if (!grid.empty() && grid.front() < 0.0) throw std::invalid_argument("k0 grid must be non-negative");
}

double extrema_step(const std::vector<double>& grid) {
  double step = kDefaultScanStep;
  for (std::size_t i = 1; i < grid.size(); ++i) step = std::min(step, grid[i] - grid[i - 1]);
  return step;
}

}  // namespace

BandStructure band_structure(const UnitCell& cell, Polarization pol, const std::vector<double>& grid,
                             double tolEdge) {
  check_grid(grid);
  if (grid.empty()) return {};
  std::vector<RawBandPoint> raw(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    raw[i].cls = classify_matrix(cell_monodromy(cell, grid[i], pol), tolEdge);
  });
  return assemble_bands(grid, raw, trace_extrema(cell, pol, grid.back(), extrema_step(grid)));
}

namespace serial {
BandStructure band_structure(const UnitCell& cell, Polarization pol, const std::vector<double>& grid,
                             double tolEdge) {
  check_grid(grid);
  if (grid.empty()) return {};
  std::vector<RawBandPoint> raw(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    raw[i].cls = classify_matrix(cell_monodromy(cell, grid[i], pol), tolEdge);
  return assemble_bands(grid, raw, trace_extrema(cell, pol, grid.back(), extrema_step(grid)));
}
}  // namespace serial

void write_band_csv(std::ostream& os, const BandStructure& bs) {
  os << "k0,trace_re,trace_im,class,theta,branch\n";
  for (const auto& p : bs.points) {
    os << fmt(p.k0) << ',' << fmt(p.cls.trace.real()) << ',' << fmt(p.cls.trace.imag()) << ','
       << to_string(p.cls.kind) << ',' << (p.theta ? fmt(*p.theta) : std::string()) << ',' << p.branch
       << '\n';
  }
}

std::vector<FieldSample> field_profile(const UnitCell& cell, cplx k0, Polarization pol, const Vec2& U0,
                                       int samples) {
  if (samples < 2) throw std::invalid_argument("field profile needs at least 2 samples");
  std::vector<FieldSample> out;
  out.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    const double x = (i + 1 == samples) ? 1.0 : static_cast<double>(i) / (samples - 1);
    const Vec2 U = resolvent(cell, x, k0, pol) * U0;
    out.push_back({x, U.u, U.w});
  }
  return out;
}

}  // namespace topo1d
