#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

namespace topo1d {

using cplx = std::complex<double>;

/// 2x2 complex matrix acting on (u, u') pairs.
struct Matrix2 {
  cplx m11{1.0}, m12{0.0}, m21{0.0}, m22{1.0};

  static constexpr Matrix2 identity() { return {}; }

  cplx trace() const { return m11 + m22; }
  cplx det() const { return m11 * m22 - m12 * m21; }

  /// Inverse assuming det = 1 (adjugate).
  Matrix2 unimodular_inverse() const { return {m22, -m12, -m21, m11}; }

  /// sigma_z M sigma_z with sigma_z = diag(1, -1).
  Matrix2 sigma_z_conjugate() const { return {m11, -m12, -m21, m22}; }

  double frobenius() const {
    return std::sqrt(std::norm(m11) + std::norm(m12) + std::norm(m21) + std::norm(m22));
  }
  double max_abs() const {
    return std::max({std::abs(m11), std::abs(m12), std::abs(m21), std::abs(m22)});
  }
};

inline Matrix2 operator*(const Matrix2& a, const Matrix2& b) {
  return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
          a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
}
inline Matrix2 operator+(const Matrix2& a, const Matrix2& b) {
  return {a.m11 + b.m11, a.m12 + b.m12, a.m21 + b.m21, a.m22 + b.m22};
}
inline Matrix2 operator-(const Matrix2& a, const Matrix2& b) {
  return {a.m11 - b.m11, a.m12 - b.m12, a.m21 - b.m21, a.m22 - b.m22};
}
inline Matrix2 operator*(cplx s, const Matrix2& a) {
  return {s * a.m11, s * a.m12, s * a.m21, s * a.m22};
}

struct Vec2 {
  cplx u{0.0}, w{0.0};  // (u, u')

  double norm() const { return std::sqrt(std::norm(u) + std::norm(w)); }
};

inline Vec2 operator*(const Matrix2& m, const Vec2& v) {
  return {m.m11 * v.u + m.m12 * v.w, m.m21 * v.u + m.m22 * v.w};
}
inline Vec2 operator*(cplx s, const Vec2& v) { return {s * v.u, s * v.w}; }
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.u - b.u, a.w - b.w}; }

inline Matrix2 commutator(const Matrix2& a, const Matrix2& b) { return a * b - b * a; }

/// Largest entrywise distance |M - s I| for s = +1 or -1, whichever is smaller.
inline double distance_to_plus_minus_identity(const Matrix2& m) {
  auto dist = [&](double s) {
    return std::max({std::abs(m.m11 - s), std::abs(m.m12), std::abs(m.m21), std::abs(m.m22 - s)});
  };
  return std::min(dist(1.0), dist(-1.0));
}

}  // namespace topo1d
