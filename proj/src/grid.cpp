#include "srlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <string>

#include "srlab/error.hpp"

namespace srlab {

GridSpec::GridSpec(std::vector<double> lo_, std::vector<double> hi_, std::vector<int> n_)
    : lo(std::move(lo_)), hi(std::move(hi_)), n(std::move(n_)) {
  if (lo.size() != hi.size() || lo.size() != n.size() || n.empty())
    throw ConfigError("grid: lo, hi and n must have the same nonzero length");
  for (int k = 0; k < dim(); ++k) {
    if (!(hi[k] > lo[k])) throw ConfigError("grid: empty box on axis " + std::to_string(k));
    if (n[k] < 2) throw ConfigError("grid: at least two nodes per axis");
  }
}

GridSpec GridSpec::withSpacing(const std::vector<double>& lo, const std::vector<double>& hi,
                               const std::vector<double>& h) {
  std::vector<int> n(lo.size());
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (!(h[k] > 0)) throw ConfigError("grid: spacing must be positive");
    n[k] = static_cast<int>(std::ceil((hi[k] - lo[k]) / h[k] - 1e-9)) + 1;
  }
  return GridSpec(lo, hi, n);
}

std::size_t GridSpec::size() const {
  std::size_t s = 1;
  for (int v : n) s *= static_cast<std::size_t>(v);
  return s;
}

std::size_t GridSpec::stride(int k) const {
  std::size_t s = 1;
  for (int j = dim() - 1; j > k; --j) s *= static_cast<std::size_t>(n[j]);
  return s;
}

double GridSpec::cellVolume() const {
  double v = 1.0;
  for (int k = 0; k < dim(); ++k) v *= spacing(k);
  return v;
}

void GridSpec::unravel(std::size_t idx, int* ijk) const {
  for (int k = dim() - 1; k >= 0; --k) {
    ijk[k] = static_cast<int>(idx % n[k]);
    idx /= n[k];
  }
}

std::size_t GridSpec::ravel(const int* ijk) const {
  std::size_t idx = 0;
  for (int k = 0; k < dim(); ++k) idx = idx * n[k] + ijk[k];
  return idx;
}

Point GridSpec::node(std::size_t idx) const {
  int ijk[8];
  unravel(idx, ijk);
  Point p(dim());
  for (int k = 0; k < dim(); ++k) p[k] = lo[k] + ijk[k] * spacing(k);
  return p;
}

bool GridSpec::isBoundary(std::size_t idx) const {
  int ijk[8];
  unravel(idx, ijk);
  for (int k = 0; k < dim(); ++k)
    if (ijk[k] == 0 || ijk[k] == n[k] - 1) return true;
  return false;
}

bool GridSpec::contains(const Point& p) const {
  if (static_cast<int>(p.size()) != dim()) return false;
  for (int k = 0; k < dim(); ++k)
    if (!(p[k] >= lo[k] && p[k] <= hi[k])) return false;
  return true;
}

double GridSpec::faceDistance(const Point& p, int axis) const {
  return std::min(p[axis] - lo[axis], hi[axis] - p[axis]);
}

std::size_t GridSpec::nearest(const Point& p) const {
  int ijk[8];
  for (int k = 0; k < dim(); ++k) {
    const int i = static_cast<int>(std::lround((p[k] - lo[k]) / spacing(k)));
    ijk[k] = std::clamp(i, 0, n[k] - 1);
  }
  return ravel(ijk);
}

GridSpec GridSpec::refined() const {
  std::vector<int> m(n);
  for (auto& v : m) v = 2 * v - 1;
  return GridSpec(lo, hi, m);
}

GridSpec GridSpec::coarsened() const {
  std::vector<int> m(n);
  for (auto& v : m) {
    if (v % 2 == 0 || v < 3) throw ConfigError("grid: coarsening needs odd node counts >= 3");
    v = (v + 1) / 2;
  }
  return GridSpec(lo, hi, m);
}

nlohmann::json GridSpec::toJson() const { return {{"lo", lo}, {"hi", hi}, {"n", n}}; }

GridSpec GridSpec::fromJson(const nlohmann::json& j) {
  try {
    if (j.contains("h"))
      return withSpacing(j.at("lo").get<std::vector<double>>(), j.at("hi").get<std::vector<double>>(),
                         j.at("h").get<std::vector<double>>());
    return GridSpec(j.at("lo").get<std::vector<double>>(), j.at("hi").get<std::vector<double>>(),
                    j.at("n").get<std::vector<int>>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
}

std::size_t maxGridCells() {
  if (const char* s = std::getenv("SRLAB_MAX_CELLS")) {
    char* end = nullptr;
    const double v = std::strtod(s, &end);
    if (end != s && v >= 1) return static_cast<std::size_t>(v);
  }
  return 20'000'000;
}

void requireCellBudget(const GridSpec& g) {
  if (g.size() > maxGridCells())
    throw ResourceError("grid of " + std::to_string(g.size()) + " nodes exceeds the cap of " +
                        std::to_string(maxGridCells()) + " (SRLAB_MAX_CELLS)");
}

GridField::GridField(GridSpec g, double fill) : grid(std::move(g)) {
  requireCellBudget(grid);
  values.assign(grid.size(), fill);
}

GridField GridField::sample(const GridSpec& g, const ScalarField& f) {
  GridField out(g);
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = f.value(g.node(i));
  return out;
}

double GridField::interpolate(const Point& p) const {
  const int n = grid.dim();
  if (!grid.contains(p)) throw DomainError("interpolation point outside the grid box");
  int base[8];
  double frac[8];
  for (int k = 0; k < n; ++k) {
    const double s = (p[k] - grid.lo[k]) / grid.spacing(k);
    int i = static_cast<int>(std::floor(s));
    i = std::clamp(i, 0, grid.n[k] - 2);
    base[k] = i;
    frac[k] = s - i;
  }
  double acc = 0.0;
  int corner[8];
  for (int c = 0; c < (1 << n); ++c) {
    double w = 1.0;
    for (int k = 0; k < n; ++k) {
      const int bit = (c >> k) & 1;
      corner[k] = base[k] + bit;
      w *= bit ? frac[k] : 1.0 - frac[k];
    }
    if (w != 0.0) acc += w * values[grid.ravel(corner)];
  }
  return acc;
}

double GridField::minValue() const { return *std::min_element(values.begin(), values.end()); }
double GridField::maxValue() const { return *std::max_element(values.begin(), values.end()); }

double GridField::integrate(const std::vector<double>* weight) const {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * (weight ? (*weight)[i] : 1.0);
  return s * grid.cellVolume();
}

void GridField::writeCsv(std::ostream& out) const {
  const int n = grid.dim();
  for (int k = 0; k < n; ++k) out << 'x' << k << ',';
  out << "value\n";
  out.precision(17);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Point p = grid.node(i);
    for (int k = 0; k < n; ++k) out << p[k] << ',';
    out << values[i] << '\n';
  }
}

}  // namespace srlab
