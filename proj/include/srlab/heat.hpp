#pragma once

// The heat semigroup P_t = exp(tL): an explicit finite-difference solver on
// chart models, a Monte-Carlo path sampler on every model, and the deficit
// evaluators for the Li-Yau, Harnack, ball-hitting and Poincare inequalities.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "srlab/gamma.hpp"
#include "srlab/grid.hpp"
#include "srlab/model.hpp"

namespace srlab {

using DistanceFn = std::function<double(const Point&, const Point&)>;
using PointFn = std::function<double(const Point&)>;

// Discrete sub-Laplacian on a chart grid.  With D_i^{+/-} the frame fields
// composed with one-sided differences, L_h = -(1/2)(D^+* D^+ + D^-* D^-) where
// * is the adjoint for the density-weighted inner product.  L_h is symmetric
// and nonpositive under homogeneous Dirichlet data and second-order
// consistent for divergence-free (w.r.t. the density) frames.
class GridOperator {
 public:
  GridOperator(const Model& m, GridSpec grid);

  const GridSpec& grid() const { return grid_; }
  // out = L_h u on interior nodes, 0 on boundary nodes.
  void apply(const std::vector<double>& u, std::vector<double>& out) const;
  // Largest stable explicit Euler step scaled by cfl: cfl * 2 / sum_i (sum_k |a_ik| / h_k)^2.
  // cfl <= 0.25 keeps dt below 2 / rho(L_h).
  double stepBound(double cfl) const;
  // (L_h u) at one interior node.
  double applyAt(const std::vector<double>& u, std::size_t node) const;
  // Centered difference of frame field `field` (0..d+h-1) applied to u, or to
  // ln u when logOf is set, at an interior node.
  double derivative(const std::vector<double>& u, int field, std::size_t node, bool logOf = false) const;
  int fieldCount() const { return static_cast<int>(terms_.size()); }
  int horizontalCount() const { return d_; }
  bool isInterior(std::size_t node) const { return faces_[node] == 0; }
  double density(std::size_t node) const { return rho_[node]; }
  const std::vector<double>& densities() const { return rho_; }

 private:
  struct Term {
    int axis;
    std::vector<double> a;   // a_ik at nodes
    std::vector<double> ra;  // rho * a_ik
  };
  GridSpec grid_;
  int d_ = 0;
  std::vector<std::vector<Term>> terms_;  // per frame field, nonzero axes only
  std::vector<double> rho_;
  std::vector<std::uint8_t> faces_;  // bit k: lower face of axis k; bit 4+k: upper face
  std::vector<std::size_t> stride_;
  std::vector<double> h_;
  double lambdaBound_ = 0.0;
};

struct HeatConfig {
  double cfl = 0.25;
  // Snapshot times in (0, T]; T is always stored, t = 0 is the initial data.
  std::vector<double> times;

  nlohmann::json toJson() const;
  static HeatConfig fromJson(const nlohmann::json& j);
};

struct HeatSolution {
  GridSpec grid;
  std::vector<GridField> snapshots;  // increasing times, snapshots[0] at t = 0
  double dt = 0.0;
  std::size_t steps = 0;
  double minValue = 0.0;  // over all snapshots with t > 0
  std::vector<double> supNorm;

  // Snapshot at time t (matched to 1e-12); DomainError when absent.
  const GridField& at(double t) const;
};

// Solves u_t = L u with homogeneous Dirichlet data on the box of f0.
HeatSolution solveHeat(const Model& m, const GridField& f0, double T, const HeatConfig& cfg = {});

// C-infinity bump exp(1 - 1/(1 - q)) with q = sum_k ((x_k - c_k) / r_k)^2 < 1.
ScalarField bumpField(const Point& center, const std::vector<double>& radii);

struct SampleSet {
  std::vector<Point> endpoints;
  Point x0;
  double t = 0.0;
  std::size_t stepCount = 0;
  std::uint64_t seed = 0;
  std::string stepperId;
  std::size_t flagged = 0;  // paths clipped to the chart box or non-finite
};

// Simulates d xi = sqrt(2) sum_i X_i(xi) o dB^i.  Group models step
// g <- g exp(sqrt(2 dt) sum_i eta_i X_i); chart models use Stratonovich-Heun.
// Path k draws from Rng(seed, k), so results do not depend on threads.
SampleSet samplePaths(const Model& m, const Point& x0, double t, std::size_t n, double dt, std::uint64_t seed);
// One simulation observed at several increasing times.  The step is dt
// rounded down so each interval holds a whole number of steps.
std::vector<SampleSet> samplePathsAt(const Model& m, const Point& x0, const std::vector<double>& times,
                                     std::size_t n, double dt, std::uint64_t seed);

struct CI {
  double mean = 0.0;
  double halfWidth = 0.0;  // 1.96 sigma / sqrt(n)
  nlohmann::json toJson() const { return {{"mean", mean}, {"halfWidth", halfWidth}}; }
};

CI estimateSemigroup(const SampleSet& s, const ScalarField& f);
CI estimateSemigroup(const SampleSet& s, const PointFn& f);
// P_t f(x) = E f(x . xi_t) for a group model, from paths started at the identity.
CI estimateTranslated(const Model& m, const SampleSet& fromIdentity, const Point& x, const PointFn& f);

struct LiYauValue {
  double lhs = 0.0;          // Gamma(ln u) + (2 rho2 / 3) t Gamma^Z(ln u)
  double rhs = 0.0;          // full right-hand side with rho1
  double deficit = 0.0;      // rhs - lhs
  double deficitZero = 0.0;  // same with rho1 = 0, for rho1 >= 0
};
// From grid differences of ln u and L_h u on the snapshot at time t, at the node nearest x.
LiYauValue liYauDeficit(const GridOperator& op, const HeatSolution& u, const CDParams& p, const Point& x, double t);
// For an explicit positive solution u(., t) given as a field (L u from jets).
LiYauValue liYauDeficitAnalytic(const Model& m, const ScalarField& u, const CDParams& p, const Point& x, double t);

struct HarnackValue {
  double lhs = 0.0;        // P_s f(x)
  double rhs = 0.0;        // P_t f(y) (t/s)^{D/2} exp((D/d) dist^2 / (4(t - s)))
  double deficit = 0.0;    // rhs - lhs
  double halfWidth = 0.0;  // combined statistical half-width of the deficit
};
double harnackFactor(const CDParams& p, double s, double t, double dist);
HarnackValue harnackDeficit(const CI& psfx, const CI& ptfy, double s, double t, const CDParams& p, double dist);

// Estimate of P_{A r^2}(1_{B(x, r)})(x) from paths started at x and observed at A r^2.
CI ballHittingProbability(const SampleSet& atTime, const Point& x, double r, const DistanceFn& dist);

struct BallHittingScan {
  std::vector<double> A;
  std::vector<CI> probability;
  double bestA = 0.0;  // largest A with probability >= 1/2 - halfWidth; 0 when none
};
BallHittingScan ballHittingScan(const Model& m, const Point& x, double r, const std::vector<double>& As,
                                std::size_t paths, double dt, std::uint64_t seed,
                                const DistanceFn& dist);

struct PoincareValue {
  bool defined = false;  // false when the Gamma integral vanishes
  double ratio = 0.0;
  double numerator = 0.0;    // int_B |f - f_r|^2 dmu
  double denominator = 0.0;  // r^2 int_B Gamma(f) dmu
  std::size_t nodes = 0;
};
// Quadrature over grid nodes whose distance (field `dist`, from the ball center) is below r.
PoincareValue poincareRatio(const Model& m, const ScalarField& f, const GridField& dist, double r);

struct CylinderParams {
  double beta = 0.25, gamma = 0.5, delta = 0.75, alpha = 1.0, eta = 0.5;
  nlohmann::json toJson() const;
  static CylinderParams fromJson(const nlohmann::json& j);
};
struct ParabolicHarnackValue {
  double supMinus = 0.0;
  double infPlus = 0.0;
  double ratio = 0.0;
  std::size_t samplesMinus = 0, samplesPlus = 0;
};
// sup over Q- of u / inf over Q+ of u using the stored snapshots inside each
// time window and nodes with dist < eta r.
ParabolicHarnackValue parabolicHarnack(const HeatSolution& u, const GridField& dist, double s, double r,
                                       const CylinderParams& c);

}  // namespace srlab
