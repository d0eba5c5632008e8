#include "topo1d/structure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace topo1d {

const char* to_string(Polarization pol) { return pol == Polarization::Epar ? "Epar" : "Hpar"; }

Polarization polarization_from_string(const std::string& s) {
  if (s == "Epar" || s == "E" || s == "TE") return Polarization::Epar;
  if (s == "Hpar" || s == "H" || s == "TM") return Polarization::Hpar;
  throw std::invalid_argument("unknown polarization '" + s + "' (expected Epar or Hpar)");
}

PQ pq_of_layer(const Layer& layer, Polarization pol) {
  if (pol == Polarization::Epar) return {layer.eps, layer.mu};
  return {layer.mu, layer.eps};
}

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

bool close_rel(cplx a, cplx b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

bool same_material(const Layer& a, const Layer& b, double tol) {
  return close_rel(a.eps, b.eps, tol) && close_rel(a.mu, b.mu, tol);
}

UnitCell::UnitCell(std::vector<Layer> layers, std::string label)
    : layers_(std::move(layers)), label_(std::move(label)) {
  if (layers_.empty()) throw std::invalid_argument("unit cell has no layers");
  double sum = 0.0;
  for (const auto& l : layers_) {
    if (!(l.width > 0.0) || !std::isfinite(l.width))
      throw std::invalid_argument("layer width must be positive and finite");
    if (!finite(l.eps) || !finite(l.mu))
      throw std::invalid_argument("layer material parameters must be finite");
    sum += l.width;
  }
  if (std::abs(sum - 1.0) > kWidthSumTol)
    throw std::invalid_argument("layer widths must sum to 1 (got " + std::to_string(sum) + ")");
}

bool UnitCell::lossless() const {
  return std::all_of(layers_.begin(), layers_.end(), [](const Layer& l) { return l.lossless(); });
}

bool UnitCell::passive() const {
  return std::all_of(layers_.begin(), layers_.end(), [](const Layer& l) { return l.passive(); });
}

UnitCell UnitCell::lossless_part() const {
  auto layers = layers_;
  for (auto& l : layers) {
    l.eps = l.eps.real();
    l.mu = l.mu.real();
  }
  return UnitCell(std::move(layers), label_);
}

UnitCell UnitCell::with_label(std::string label) const { return UnitCell(layers_, std::move(label)); }

UnitCell two_layer_cell(cplx eps1, double h1, cplx eps2, std::string label) {
  if (!(h1 > 0.0 && h1 < 1.0)) throw std::invalid_argument("h1 must lie in (0, 1)");
  return UnitCell({{eps1, 1.0, h1}, {eps2, 1.0, 1.0 - h1}}, std::move(label));
}

UnitCell symmetric_two_layer_cell(cplx eps1, double h1, cplx eps2, std::string label) {
  if (!(h1 > 0.0 && h1 < 1.0)) throw std::invalid_argument("h1 must lie in (0, 1)");
  const double half = 0.5 * h1;
  const double mid = 1.0 - h1;
  return UnitCell({{eps1, 1.0, half}, {eps2, 1.0, mid}, {eps1, 1.0, 1.0 - half - mid}},
                  std::move(label));
}

namespace {

// Drops slivers and rescales so widths sum to exactly 1 in floating point as far as possible.
UnitCell normalized(std::vector<Layer> raw, const std::string& label) {
  std::vector<Layer> kept;
  kept.reserve(raw.size());
  for (const auto& l : raw)
    if (l.width >= kSliverWidth) kept.push_back(l);
  const double sum =
      std::accumulate(kept.begin(), kept.end(), 0.0, [](double s, const Layer& l) { return s + l.width; });
  for (auto& l : kept) l.width /= sum;
  return UnitCell(std::move(kept), label);
}

}  // namespace

UnitCell recenter(const UnitCell& cell, double x0) {
  if (!(x0 >= 0.0 && x0 < 1.0)) throw std::invalid_argument("origin shift must lie in [0, 1)");
  if (x0 == 0.0) return cell;
  std::vector<Layer> head;  // from x0 to 1
  std::vector<Layer> tail;  // from 0 to x0
  double start = 0.0;
  for (const auto& l : cell.layers()) {
    const double end = start + l.width;
    if (end <= x0) {
      tail.push_back(l);
    } else if (start >= x0) {
      head.push_back(l);
    } else {
      Layer before = l, after = l;
      before.width = x0 - start;
      after.width = end - x0;
      head.push_back(after);
      tail.push_back(before);
    }
    start = end;
  }
  head.insert(head.end(), tail.begin(), tail.end());
  return normalized(std::move(head), cell.label());
}

namespace {

std::vector<Layer> merged_linear(const UnitCell& cell, double tol) {
  std::vector<Layer> out;
  for (const auto& l : cell.layers()) {
    if (!out.empty() && same_material(out.back(), l, tol))
      out.back().width += l.width;
    else
      out.push_back(l);
  }
  return out;
}

}  // namespace

bool is_inversion_symmetric(const UnitCell& cell, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("symmetry tolerance must be positive");
  const auto seq = merged_linear(cell, tol);
  const std::size_t n = seq.size();
  for (std::size_t i = 0; i < n / 2 + 1 && i < n; ++i) {
    const Layer& a = seq[i];
    const Layer& b = seq[n - 1 - i];
    if (!same_material(a, b, tol) || std::abs(a.width - b.width) > tol) return false;
  }
  return true;
}

std::vector<std::pair<double, Layer>> circular_slabs(const UnitCell& cell, double tol) {
  std::vector<std::pair<double, Layer>> slabs;
  double start = 0.0;
  for (const auto& l : merged_linear(cell, tol)) {
    slabs.emplace_back(start, l);
    start += l.width;
  }
  if (slabs.size() > 1 && same_material(slabs.front().second, slabs.back().second, tol)) {
    Layer wrap = slabs.back().second;
    wrap.width += slabs.front().second.width;
    const double wrap_start = slabs.back().first - 1.0;
    slabs.pop_back();
    slabs.front() = {wrap_start, wrap};
  }
  return slabs;
}

std::vector<double> symmetric_origins(const UnitCell& cell, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("symmetry tolerance must be positive");
  const auto slabs = circular_slabs(cell, tol);
  if (slabs.size() == 1) return {0.0, 0.5};

  std::vector<double> origins;
  for (const auto& [start, layer] : slabs) {
    double mid = start + 0.5 * layer.width;
    mid -= std::floor(mid);
    if (mid >= 1.0 - kSliverWidth || mid <= kSliverWidth) mid = 0.0;
    if (is_inversion_symmetric(recenter(cell, mid), tol)) origins.push_back(mid);
  }
  std::sort(origins.begin(), origins.end());
  origins.erase(std::unique(origins.begin(), origins.end(),
                            [tol](double a, double b) { return std::abs(a - b) <= tol; }),
                origins.end());
  return origins;
}

StackConfig::StackConfig(UnitCell a, UnitCell b, int na, int nb, double ambient)
    : cellA(std::move(a)), cellB(std::move(b)), periodsA(na), periodsB(nb), ambientIndex(ambient) {
  if (na < 0 || nb < 0) throw std::invalid_argument("period counts must be non-negative");
  if (!(ambient > 0.0) || !std::isfinite(ambient))
    throw std::invalid_argument("ambient index must be positive and finite");
}

}  // namespace topo1d
