#pragma once

// Sub-Riemannian distances d = d_0 and the penalized family d_tau: eikonal
// sweeping on chart grids, normal-geodesic shooting on every model, and the
// ball-volume / diameter / comparison experiments built on them.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "srlab/grid.hpp"
#include "srlab/model.hpp"

namespace srlab {

struct EikonalConfig {
  // "semi-lagrangian": u(x) = min over unit controls c of s + u(flow_s^c(x)),
  // s the step (or the shorter step that passes closest to the source), with
  // multilinear interpolation.  "lax-friedrichs": centered Hamiltonian with
  // artificial viscosity sigma_k = local sup of sqrt(A_kk).
  std::string scheme = "semi-lagrangian";
  int directions = 32;     // control directions on the unit circle (sphere: 4x)
  double stepCells = 2.0;  // base step in units of max_k h_k / speed_k
  // Every candidate is tried with each multiple of the base step: short
  // steps follow curved geodesics, long ones average out interpolation.
  std::vector<double> stepMults{0.5, 1.0, 2.0};
  double tol = 1e-8;       // stop when a full sweep changes no value by more than tol
  int maxSweeps = 4000;
  // Nested solves on boxes shrunk by sourceScale around the source, used to
  // seed the values near it.
  int sourceLevels = 2;
  double sourceScale = 0.4;

  nlohmann::json toJson() const;
  static EikonalConfig fromJson(const nlohmann::json& j);
};

struct DistanceField {
  Point source;
  double tau = 0.0;
  GridField field;
  int sweeps = 0;
  double lastChange = 0.0;
  // 2 h * speed bound: max_k h_k * sup sqrt(A_kk) over the grid, doubled.
  double tolerance = 0.0;

  double value(const Point& p) const { return field.interpolate(p); }
};

// Viscosity solution of sum_i (X_i u)^2 + tau^2 sum_j (Z_j u)^2 = 1 with
// u(x0) = 0 (x0 snapped to the nearest node) by Gauss-Seidel sweeping in the
// 2^n axis orderings.
DistanceField distanceField(const Model& m, const Point& x0, double tau, const GridSpec& grid,
                            const EikonalConfig& cfg = {});
// Fields for increasing tau on one grid.  Each field is capped by the previous
// one, the discrete form of "subunit for tau implies subunit for tau' > tau",
// so the family is pointwise nonincreasing in tau exactly.
std::vector<DistanceField> distanceFamily(const Model& m, const Point& x0, std::vector<double> taus,
                                          const GridSpec& grid, const EikonalConfig& cfg = {});

// Chart box around `center` holding B(center, R) with a margin: horizontal
// half-width 1.3 R, vertical half-width 1.5 * 0.1592 R^2 (0.1592 R^2 is the
// height of the Heisenberg ball), with `nodes` (odd) nodes per horizontal
// axis and `verticalNodes` (default: nodes) per vertical one.
GridSpec ballGrid(const Model& m, const Point& center, double R, int nodes, int verticalNodes = 0);

struct BallVolumeTable {
  Point center;
  std::vector<double> radii;
  std::vector<double> volumes;
  std::vector<std::size_t> cells;
  nlohmann::json toJson() const;
};

// Sum of density * cell volume over nodes with df < r.  DomainError when a
// boundary node lies inside the ball.
double ballVolume(const DistanceField& df, const ScalarField& density, double r, std::size_t* cells = nullptr);
BallVolumeTable ballVolumes(const DistanceField& df, const ScalarField& density, const std::vector<double>& radii);

// V(x, R) on ballGrid(x, R, nodes); the vertical extent is widened (up to
// four times) while the ball touches the box.
double ballVolumeAt(const Model& m, const Point& x, double R, int nodes = 81, const EikonalConfig& cfg = {},
                    std::size_t* cells = nullptr);

struct DoublingValue {
  double r = 0.0;
  double ratio = 0.0;
  double small = 0.0, large = 0.0;
  std::size_t cellsSmall = 0, cellsLarge = 0;
};
// V(x, 2r) / V(x, r), each ball on its own ballGrid with `nodes` per axis so
// both are resolved alike.  DomainError when B(x, r) holds fewer than 100
// nodes.
DoublingValue doublingRatio(const Model& m, const Point& x, double r, int nodes = 81,
                            const EikonalConfig& cfg = {});

struct ExpDoublingFit {
  double C1 = 0.0;  // exp(intercept)
  double C2 = 0.0;  // slope of ln ratio against r^2
  std::vector<DoublingValue> ratios;
  nlohmann::json toJson() const;
};
ExpDoublingFit expDoublingFit(const Model& m, const Point& x, const std::vector<double>& radii, int nodes = 81,
                              const EikonalConfig& cfg = {});

struct ShootConfig {
  double rtol = 1e-11;
  double atol = 1e-13;
  std::size_t maxSteps = 200000;
};

struct Geodesic {
  Point endpoint;
  std::vector<double> h;  // final frame momenta <p, F_a>
  double length = 0.0;    // T * sqrt(2 H)
  double energyDrift = 0.0;  // |H(T) - H(0)| / H(0)
  std::size_t steps = 0;
};

// Normal geodesic for H(x, p) = 1/2 sum_i <p, X_i(x)>^2 from a coordinate
// covector p0, integrated to time T by adaptive Dormand-Prince.
Geodesic geodesicShoot(const Model& m, const Point& x0, const std::vector<double>& p0, double T,
                       const ShootConfig& cfg = {});
// Same geodesic from frame momenta h0[a] = <p0, F_a(x0)> (length d + h).
// Group models are integrated in the left trivialization.
Geodesic geodesicShootFrame(const Model& m, const Point& x0, const std::vector<double>& h0, double T,
                            const ShootConfig& cfg = {});

struct ShootingConfig {
  int fan = 64;
  int refine = 8;        // fan members handed to Levenberg-Marquardt
  double residualTol = 1e-9;
  int maxIterations = 60;
  ShootConfig ode;
};

struct ShootingResult {
  bool converged = false;
  double distance = 0.0;  // shortest converged geodesic; an upper bound on d
  std::vector<double> h0;
  double residual = 0.0;
  int convergedStarts = 0;
};
// Shortest normal geodesic from x to y found by a covector fan refined with
// Levenberg-Marquardt on the endpoint map (T = 1, so length = |h_H|).
ShootingResult shootingDistance(const Model& m, const Point& x, const Point& y, const ShootingConfig& cfg = {});

struct CrossValidation {
  double eikonal = 0.0;
  double shooting = 0.0;
  double gap = 0.0;  // |eikonal - shooting| / shooting
  bool shootingConverged = false;
};
CrossValidation crossValidateDistance(const Model& m, const DistanceField& df, const Point& y,
                                      const ShootingConfig& cfg = {});

struct DiameterEstimate {
  double estimate = 0.0;  // max over sampled targets of d(e, g)
  Point worst;
  std::size_t targets = 0;
  std::size_t unresolved = 0;  // targets where shooting failed
};
// Compact group models only.  Targets: the center element -e (when the
// model is a matrix group), exp(s Z) for a few s, and Haar samples.
DiameterEstimate diameterEstimate(const Model& m, std::size_t samples, std::uint64_t seed,
                                  const ShootingConfig& cfg = {});

struct DistanceComparison {
  double Chat = 0.0;  // max d / max(sqrt(d_tau), d_tau)
  std::pair<Point, Point> worstPair;
  std::size_t pairs = 0;
  std::size_t skipped = 0;
  bool monotone = false;  // d_tau <= d at every grid node
};
// Pairs uniform in [-box, box]^n; d(x, y) = d(0, x^{-1} y) read from eikonal
// fields on `grid` centered at the identity.
DistanceComparison distanceComparisonCheck(const Model& m, double tau, std::size_t samples, std::uint64_t seed,
                                           const GridSpec& grid, double box = 1.0, const EikonalConfig& cfg = {});

}  // namespace srlab
