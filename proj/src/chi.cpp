#include "topo1d/chi.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <stdexcept>

#include "topo1d/io.hpp"
#include "topo1d/parallel.hpp"

namespace topo1d {

ChiValue::ChiValue(cplx num, cplx den) : num_(num), den_(den) {
  if (num == cplx{0.0} && den == cplx{0.0}) throw std::invalid_argument("projective pair (0, 0)");
}

cplx ChiValue::value() const {
  if (is_infinite()) return {std::numeric_limits<double>::infinity(), 0.0};
  return num_ / den_;
}

double ChiValue::magnitude() const {
  if (is_infinite()) return std::numeric_limits<double>::infinity();
  return std::abs(num_) / std::abs(den_);
}

ChiValue::SpherePoint ChiValue::sphere() const {
  const double a2 = std::norm(num_), b2 = std::norm(den_);
  const double s = a2 + b2;
  const cplx ab = num_ * std::conj(den_);
  return {2.0 * ab.real() / s, 2.0 * ab.imag() / s, (b2 - a2) / s};
}

double chordal_distance(const ChiValue& a, const ChiValue& b) {
  const double na = std::sqrt(std::norm(a.num()) + std::norm(a.den()));
  const double nb = std::sqrt(std::norm(b.num()) + std::norm(b.den()));
  return std::abs(a.num() * b.den() - b.num() * a.den()) / (na * nb);
}

const char* to_string(ChiStatus s) {
  switch (s) {
    case ChiStatus::Regular: return "regular";
    case ChiStatus::Ramification: return "ramification";
    case ChiStatus::Transition: return "transition";
  }
  return "?";
}

ChiSample chi_value(const Matrix2& m, double tolDegen) {
  const EigenResult r = eigenpairs(m, tolDegen);
  if (const auto* pair = std::get_if<std::pair<Eigenpair, Eigenpair>>(&r)) {
    const Vec2& U = pair->first.U;
    return {ChiStatus::Regular, ChiValue(U.u, U.w)};
  }
  const auto& deg = std::get<DegenerateReport>(r);
  if (deg.fullDegeneracy) return {ChiStatus::Transition, std::nullopt};
  return {ChiStatus::Ramification, ChiValue(deg.eigenvector->u, deg.eigenvector->w)};
}

ChiSample chi_continued(const UnitCell& cell, double k0, Polarization pol, double delta, double tolDegen) {
  if (!(delta > 0.0)) throw std::invalid_argument("limiting-absorption delta must be positive");
  return chi_value(cell_monodromy(cell, cplx{k0, delta}, pol), tolDegen);
}

cplx ChiScan::k0_at(int i, int j) const {
  const double re = nx > 1 ? rect.reMin + (rect.reMax - rect.reMin) * i / (nx - 1) : rect.reMin;
  const double im = ny > 1 ? rect.imMin + (rect.imMax - rect.imMin) * j / (ny - 1) : rect.imMin;
  return {re, im};
}

namespace {

ChiScan empty_scan(const ScanRect& rect, int nx, int ny) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("chi scan resolution must be at least 2x2");
  if (!(rect.reMax > rect.reMin) || !(rect.imMax > rect.imMin))
    throw std::invalid_argument("chi scan rectangle is empty");
  ChiScan scan;
  scan.rect = rect;
  scan.nx = nx;
  scan.ny = ny;
  scan.grid.assign(static_cast<std::size_t>(nx) * ny, ChiSample{ChiStatus::Transition, std::nullopt});
  return scan;
}

}  // namespace

ChiScan chi_scan(const UnitCell& cell, Polarization pol, const ScanRect& rect, int nx, int ny,
                 double tolDegen) {
  ChiScan scan = empty_scan(rect, nx, ny);
  parallel_for(static_cast<std::size_t>(ny), [&](std::size_t j) {
    for (int i = 0; i < nx; ++i)
      scan.grid[j * nx + i] = chi_value(cell_monodromy(cell, scan.k0_at(i, static_cast<int>(j)), pol), tolDegen);
  });
  return scan;
}

namespace serial {
ChiScan chi_scan(const UnitCell& cell, Polarization pol, const ScanRect& rect, int nx, int ny,
                 double tolDegen) {
  ChiScan scan = empty_scan(rect, nx, ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      scan.grid[static_cast<std::size_t>(j) * nx + i] = chi_value(cell_monodromy(cell, scan.k0_at(i, j), pol), tolDegen);
  return scan;
}
}  // namespace serial

namespace {

int flag_of(const ChiSample& s) {
  switch (s.status) {
    case ChiStatus::Regular: return 0;
    case ChiStatus::Ramification: return 1;
    case ChiStatus::Transition: return 2;
  }
  return 2;
}

}  // namespace

void write_scan_csv(std::ostream& os, const ChiScan& scan) {
  os << "k0_re,k0_im,abs_chi,arg_chi,flag\n";
  for (int j = 0; j < scan.ny; ++j) {
    for (int i = 0; i < scan.nx; ++i) {
      const cplx k = scan.k0_at(i, j);
      const ChiSample& s = scan.at(i, j);
      double mag = std::numeric_limits<double>::quiet_NaN(), arg = mag;
      if (s.chi) {
        mag = s.chi->magnitude();
        arg = s.chi->is_infinite() ? 0.0 : std::arg(s.chi->value());
      }
      os << fmt(k.real()) << ',' << fmt(k.imag()) << ',' << fmt(mag) << ',' << fmt(arg) << ',' << flag_of(s)
         << '\n';
    }
  }
}

namespace {
constexpr char kMagic[8] = {'C', 'H', 'I', 'S', 'C', 'A', 'N', '1'};

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw std::runtime_error("truncated chi scan file");
  return v;
}
}  // namespace

void write_scan_binary(std::ostream& os, const ChiScan& scan) {
  os.write(kMagic, sizeof kMagic);
  put<std::int32_t>(os, scan.nx);
  put<std::int32_t>(os, scan.ny);
  put(os, scan.rect.reMin);
  put(os, scan.rect.reMax);
  put(os, scan.rect.imMin);
  put(os, scan.rect.imMax);
  for (const auto& s : scan.grid)
    put(os, s.chi ? s.chi->magnitude() : std::numeric_limits<double>::quiet_NaN());
}

ScanGridFile read_scan_binary(std::istream& is) {
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof magic) != 0) throw std::runtime_error("not a chi scan file");
  ScanGridFile f;
  f.nx = get<std::int32_t>(is);
  f.ny = get<std::int32_t>(is);
  if (f.nx < 0 || f.ny < 0) throw std::runtime_error("bad chi scan dimensions");
  f.rect.reMin = get<double>(is);
  f.rect.reMax = get<double>(is);
  f.rect.imMin = get<double>(is);
  f.rect.imMax = get<double>(is);
  f.magnitudes.resize(static_cast<std::size_t>(f.nx) * f.ny);
  for (auto& v : f.magnitudes) v = get<double>(is);
  return f;
}

std::optional<double> chi_pair_relation_check(const UnitCell& cell, Polarization pol, cplx k0, double tolDegen) {
  const Matrix2 m = cell_monodromy(cell, k0, pol);
  const EigenResult r = eigenpairs(m, tolDegen);
  const auto* pair = std::get_if<std::pair<Eigenpair, Eigenpair>>(&r);
  if (!pair) return std::nullopt;
  const ChiValue plus(pair->first.U.u, pair->first.U.w);
  const ChiValue minus(pair->second.U.u, pair->second.U.w);
  return chordal_distance(plus, minus.negated());
}

}  // namespace topo1d
