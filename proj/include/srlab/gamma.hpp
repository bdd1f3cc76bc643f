#pragma once

// Carre du champ calculus: Gamma, Gamma^Z, L, Gamma_2, Gamma_2^Z evaluated
// pointwise from Taylor jets, and the curvature-dimension residual.

#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "srlab/model.hpp"
#include "srlab/testfn.hpp"

namespace srlab {

struct CDParams {
  double rho1 = 0.0;
  double rho2 = 0.5;
  double kappa = 1.0;
  double d = 2.0;  // +infinity allowed

  static constexpr double kInfiniteDimension = std::numeric_limits<double>::infinity();

  // D = d (1 + 3 kappa / (2 rho2))
  double D() const { return d * (1.0 + 3.0 * kappa / (2.0 * rho2)); }
  void validate() const;
  nlohmann::json toJson() const;
  static CDParams fromJson(const nlohmann::json& j);
};

struct GammaValues {
  double gamma = 0.0;
  double gammaZ = 0.0;
  double Lf = 0.0;
  double gamma2 = 0.0;
  double gamma2Z = 0.0;
};

// Coefficient jets of the frame at a point.
struct FrameJets {
  std::vector<std::vector<TaylorJet>> X, Z;
};
FrameJets frameJets(const Model& m, const Point& x, int order);

// All five quantities from the order-3 jet of f.
GammaValues gammaValues(const Model& m, const ScalarField& f, const Point& x);
GammaValues gammaValues(const FrameJets& frame, const TaylorJet& f3);

double gammaForm(const Model& m, const ScalarField& f, const ScalarField& g, const Point& x);
double gammaZForm(const Model& m, const ScalarField& f, const ScalarField& g, const Point& x);
double applyL(const Model& m, const ScalarField& f, const Point& x);
double gamma2Form(const Model& m, const ScalarField& f, const Point& x);
double gamma2ZForm(const Model& m, const ScalarField& f, const Point& x);
// L as a field, for polarization tests.
ScalarField sublaplacian(const Model& m, const ScalarField& f);

struct SasakianDecomposition {
  double hessNormSq = 0.0;
  double crossTerm = 0.0;
  double gamma2Reconstructed = 0.0;
  double gamma2 = 0.0;
};
SasakianDecomposition sasakianGamma2Decomposition(const Model& m, const ScalarField& f, const Point& x);

// A choice of nu > 0, or one of the two limits of the infimum.
struct Nu {
  enum class Kind { Finite, LimitInf, LimitZero };
  Kind kind = Kind::Finite;
  double value = 1.0;

  static Nu finite(double v) { return {Kind::Finite, v}; }
  std::string toString() const;
  nlohmann::json toJson() const;
  static Nu fromJson(const nlohmann::json& j);
};
inline const Nu NU_LIMIT_INF{Nu::Kind::LimitInf, std::numeric_limits<double>::infinity()};
inline const Nu NU_LIMIT_ZERO{Nu::Kind::LimitZero, 0.0};

// Minimizer of nu Gamma_2^Z + (kappa/nu) Gamma over nu > 0.
Nu optimalNu(double gamma, double gamma2Z, double kappa);
// nu Gamma_2^Z + (kappa / nu) Gamma at nu (limits taken for sentinels).
double nuPart(double gamma, double gamma2Z, double kappa, const Nu& nu);

double cdResidual(const GammaValues& g, const CDParams& p, const Nu& nu);
double cdResidual(const Model& m, const CDParams& p, double nu, const ScalarField& f, const Point& x);
double cdResidual(const Model& m, const CDParams& p, const Nu& nu, const ScalarField& f, const Point& x);
// Residual at the optimal nu (the infimum over nu > 0).
double cdResidualOptimal(const GammaValues& g, const CDParams& p, Nu* chosen = nullptr);

// |Gamma(f, Gamma^Z f) - Gamma^Z(f, Gamma f)|
double checkCommutation(const Model& m, const ScalarField& f, const Point& x);
// max_j |L Z_j f - Z_j L f|
double checkLZCommutator(const Model& m, const ScalarField& f, const Point& x);

struct SamplerSpec {
  int degree = 4;
  int count = 500;   // test functions
  int points = 100;  // points per function
  double box = 2.0;
  std::uint64_t seed = 42;
  std::string family = "polynomial";
  // Fixed functions/points replace the random ones when non-empty.
  std::vector<TestFunction> functions;
  std::vector<Point> fixedPoints;

  nlohmann::json toJson() const;
  static SamplerSpec fromJson(const nlohmann::json& j);
  TestFunction function(const Model& m, std::size_t i) const;
  Point point(const Model& m, std::size_t i, std::size_t k) const;
  std::size_t functionCount() const { return functions.empty() ? count : functions.size(); }
  std::size_t pointCount() const { return fixedPoints.empty() ? points : fixedPoints.size(); }
};

struct Witness {
  TestFunction f;
  Point x;
  Nu nu;
  double value = 0.0;
  nlohmann::json toJson() const;
};

struct CDScan {
  double minResidual = std::numeric_limits<double>::infinity();
  std::size_t samples = 0;
  Witness witness;
};
// Minimum over sampled (f, x) of the residual at the optimal nu.
CDScan scanCD(const Model& m, const CDParams& p, const SamplerSpec& s);

struct Rho1Estimate {
  double rho1Hat = std::numeric_limits<double>::infinity();
  std::size_t samples = 0;
  std::size_t degenerate = 0;  // Gamma(f)(x) = 0
  double minDegenerateResidual = std::numeric_limits<double>::infinity();
  Witness witness;
};
// min over samples with Gamma > 0 of
//   [Gamma_2 - (1/d)(Lf)^2 - rho2 Gamma^Z + inf_nu (nu Gamma_2^Z + kappa Gamma / nu)] / Gamma.
Rho1Estimate estimateSharpRho1(const Model& m, double rho2, double kappa, double d, const SamplerSpec& s);

}  // namespace srlab
