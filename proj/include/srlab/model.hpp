#pragma once

// Sub-Riemannian model spaces: a horizontal frame X_1..X_d, a vertical frame
// Z_1..Z_h, a measure density, and (when available) the group law used to
// exploit left invariance.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "srlab/field.hpp"
#include "srlab/random.hpp"

namespace srlab {

struct ModelTraits {
  bool isGroup = false;
  bool isCompact = false;
  bool hasGlobalChart = false;
};

// [F_a, F_b] = sum_c coeffs[c] F_c over the combined frame (X..., Z...).
struct BracketRelation {
  int a = 0, b = 0;
  std::vector<double> coeffs;
};

struct GroupOps {
  std::function<Point(const Point&, const Point&)> multiply;
  std::function<Point(const Point&)> inverse;
  Point identity;
  // g * exp(sum_i c_i F_i) for frame coordinates c (length d + h).
  std::function<Point(const Point&, std::span<const double>)> rightExp;
};

struct CarnotSpec {
  int d = 0;
  int h = 0;
  // B[k][i][j] = B^k_{ij}
  std::vector<std::vector<std::vector<double>>> B;
};

class Model {
 public:
  std::string name;
  std::string family;  // euclidean | heisenberg | carnot2 | sasakian | sasakian-chart | custom
  int dim = 0;         // manifold dimension
  int coordDim = 0;    // length of a Point (ambient or chart)
  std::vector<VectorField> horizontal;
  std::vector<VectorField> vertical;
  ScalarField density;
  ModelTraits traits;
  std::vector<BracketRelation> brackets;
  std::optional<GroupOps> group;
  double homogeneousDim = 0.0;  // 0 when the model has no dilations
  double rho1 = 0.0;            // Sasakian curvature parameter where meaningful
  std::string normalization;    // measure normalization statement
  // Half-widths of the chart region where the frame is trusted (empty = all).
  std::vector<double> chartBox;
  std::function<Point(Rng&, double box)> sampler;
  // Closed-form distance when one is known exactly (Euclidean only).
  std::function<double(const Point&, const Point&)> exactDistance;
  // Construction parameters, as accepted by modelFromJson.
  nlohmann::json spec;

  int d() const { return static_cast<int>(horizontal.size()); }
  int h() const { return static_cast<int>(vertical.size()); }
  int frameSize() const { return d() + h(); }
  const VectorField& frame(int i) const { return i < d() ? horizontal[i] : vertical[i - d()]; }

  // Row-major (d + h) x coordDim matrix of frame coefficients at x.
  void frameValues(const Point& x, double* out) const;
  Point samplePoint(Rng& rng, double box) const;
  // Same structure with Z_j replaced by sqrt(a) Z_j, so Gamma^Z becomes a Gamma^Z.
  Model withVerticalScale(double a) const;
};

Model euclidean(int n);
Model heisenberg();
Model sasakian(double rho1);
// Exponential-coordinate chart of G(rho1) around the identity.
Model sasakianChart(double rho1);
Model carnotStep2(const CarnotSpec& spec);

// Max-norm residual of one declared bracket relation at x.
double bracketResidual(const Model& m, const BracketRelation& rel, const Point& x);
// Rank of span{X_i, [X_i, X_j]} at x (numerical, relative tolerance 1e-9).
int hormanderRank(const Model& m, const Point& x);

struct ValidationReport {
  bool ok = true;
  double maxBracketResidual = 0.0;
  int minRank = 0;
  double minDensity = 0.0;
  std::vector<std::string> problems;
  nlohmann::json toJson() const;
};
ValidationReport validateModel(const Model& m, int samples, std::uint64_t seed);

Model modelFromJson(const nlohmann::json& j);
nlohmann::json modelToJson(const Model& m);
// "heisenberg", "euclidean(3)", "sasakian(-1)", "sasakian-chart(-1)", or a path
// to a JSON model file.
Model modelFromRef(const std::string& ref);
CarnotSpec carnotSpecFromJson(const nlohmann::json& j);

// Series data used by the exponential chart (exposed for tests).
// beta(mu) = sum_{n>=1} B_{2n} mu^{n-1} / (2n)!, density S(mu)^2 with
// S(mu) = sinh(sqrt(mu)/2)/(sqrt(mu)/2).
std::vector<double> chartBetaDerivatives(double mu, int order);
std::vector<double> chartSincDerivatives(double mu, int order);

}  // namespace srlab
