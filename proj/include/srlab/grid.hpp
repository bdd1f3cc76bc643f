#pragma once

// Rectilinear node grids on a chart box and scalar fields sampled on them.
// Nodes are stored row-major with the last axis fastest.

#include <cstddef>
#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "srlab/field.hpp"

namespace srlab {

struct GridSpec {
  std::vector<double> lo, hi;
  std::vector<int> n;  // nodes per axis, >= 2

  GridSpec() = default;
  GridSpec(std::vector<double> lo, std::vector<double> hi, std::vector<int> n);
  // Nodes spaced by (at most) h[k] on [lo, hi]; the box is kept exactly.
  static GridSpec withSpacing(const std::vector<double>& lo, const std::vector<double>& hi,
                              const std::vector<double>& h);

  int dim() const { return static_cast<int>(n.size()); }
  double spacing(int k) const { return (hi[k] - lo[k]) / (n[k] - 1); }
  std::size_t size() const;
  std::size_t stride(int k) const;
  double cellVolume() const;

  void unravel(std::size_t idx, int* ijk) const;
  std::size_t ravel(const int* ijk) const;
  Point node(std::size_t idx) const;
  bool isBoundary(std::size_t idx) const;
  bool contains(const Point& p) const;
  // Chart distance from p to the nearer of the two faces normal to axis.
  double faceDistance(const Point& p, int axis) const;
  std::size_t nearest(const Point& p) const;

  // Halved spacing; every node of *this is a node of the result.
  GridSpec refined() const;
  // Doubled spacing; requires odd node counts.
  GridSpec coarsened() const;

  nlohmann::json toJson() const;
  static GridSpec fromJson(const nlohmann::json& j);
};

// Upper bound on grid nodes, from SRLAB_MAX_CELLS (default 2e7).
std::size_t maxGridCells();
// Throws ResourceError when the grid exceeds maxGridCells().
void requireCellBudget(const GridSpec& g);

struct GridField {
  GridSpec grid;
  std::vector<double> values;
  double time = 0.0;

  GridField() = default;
  explicit GridField(GridSpec g, double fill = 0.0);
  static GridField sample(const GridSpec& g, const ScalarField& f);

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  // Multilinear interpolation; DomainError outside the box.
  double interpolate(const Point& p) const;
  double minValue() const;
  double maxValue() const;
  // Sum of values * weight * cell volume (midpoint rule over nodes).
  double integrate(const std::vector<double>* weight = nullptr) const;

  // Header x0,..,x{n-1},value then one row per node.
  void writeCsv(std::ostream& out) const;
};

}  // namespace srlab
