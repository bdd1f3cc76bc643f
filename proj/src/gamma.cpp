#include "srlab/gamma.hpp"

#include <cmath>
#include <sstream>

#include "srlab/error.hpp"
#include "srlab/parallel.hpp"

namespace srlab {

using nlohmann::json;

void CDParams::validate() const {
  if (!std::isfinite(rho1)) throw DomainError("rho1 must be finite");
  if (!(rho2 > 0.0) || !std::isfinite(rho2)) throw DomainError("rho2 must be positive");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw DomainError("kappa must be nonnegative");
  if (!(d > 0.0)) throw DomainError("d must be positive (or infinite)");
}

json CDParams::toJson() const {
  json j = {{"rho1", rho1}, {"rho2", rho2}, {"kappa", kappa}};
  if (std::isinf(d)) j["d"] = "inf";
  else j["d"] = d;
  j["D"] = std::isinf(d) ? json("inf") : json(D());
  return j;
}

CDParams CDParams::fromJson(const json& j) {
  CDParams p;
  p.rho1 = j.value("rho1", p.rho1);
  p.rho2 = j.value("rho2", p.rho2);
  p.kappa = j.value("kappa", p.kappa);
  if (j.contains("d")) {
    if (j["d"].is_string()) {
      if (j["d"].get<std::string>() != "inf") throw ConfigError("d must be a number or \"inf\"");
      p.d = kInfiniteDimension;
    } else {
      p.d = j["d"].get<double>();
    }
  }
  p.validate();
  return p;
}

FrameJets frameJets(const Model& m, const Point& x, int order) {
  FrameJets fj;
  for (const auto& X : m.horizontal) fj.X.push_back(X.jets(x, order));
  for (const auto& Z : m.vertical) fj.Z.push_back(Z.jets(x, order));
  return fj;
}

namespace {

// Gamma_2-type combination for one frame family given the family's first
// derivatives of f (order 2) and Lf (order 1).
double secondOrderForm(const FrameJets& frame, const std::vector<std::vector<TaylorJet>>& family,
                       const std::vector<TaylorJet>& Ff, const TaylorJet& Lf, double* first) {
  const int n = Lf.nvars();
  TaylorJet G(n, 2);
  for (const auto& v : Ff) G += v * v;
  if (first) *first = G.value();
  double LG = 0.0;
  for (const auto& X : frame.X) LG += applyJet(X, applyJet(X, G)).value();
  double cross = 0.0;
  for (std::size_t j = 0; j < family.size(); ++j) cross += Ff[j].value() * applyJet(family[j], Lf).value();
  return 0.5 * LG - cross;
}

}  // namespace

GammaValues gammaValues(const FrameJets& frame, const TaylorJet& f3) {
  if (f3.order() < 3) throw DomainError("Gamma_2 needs the order-3 jet of f");
  GammaValues g;
  std::vector<TaylorJet> Xf, Zf;
  for (const auto& X : frame.X) Xf.push_back(applyJet(X, f3));
  for (const auto& Z : frame.Z) Zf.push_back(applyJet(Z, f3));
  TaylorJet Lf(f3.nvars(), 1);
  for (std::size_t i = 0; i < frame.X.size(); ++i) Lf += applyJet(frame.X[i], Xf[i]);
  g.Lf = Lf.value();
  g.gamma2 = secondOrderForm(frame, frame.X, Xf, Lf, &g.gamma);
  if (!frame.Z.empty()) g.gamma2Z = secondOrderForm(frame, frame.Z, Zf, Lf, &g.gammaZ);
  return g;
}

GammaValues gammaValues(const Model& m, const ScalarField& f, const Point& x) {
  return gammaValues(frameJets(m, x, 2), f.jet(x, 3));
}

namespace {
double bilinear(const std::vector<VectorField>& family, const ScalarField& f, const ScalarField& g,
                const Point& x) {
  TaylorJet fj = f.jet(x, 1), gj = g.jet(x, 1);
  double s = 0.0;
  for (const auto& V : family) {
    auto a = V.jets(x, 0);
    s += applyJet(a, fj).value() * applyJet(a, gj).value();
  }
  return s;
}
}  // namespace

double gammaForm(const Model& m, const ScalarField& f, const ScalarField& g, const Point& x) {
  return bilinear(m.horizontal, f, g, x);
}

double gammaZForm(const Model& m, const ScalarField& f, const ScalarField& g, const Point& x) {
  return bilinear(m.vertical, f, g, x);
}

double applyL(const Model& m, const ScalarField& f, const Point& x) {
  auto fr = frameJets(m, x, 1);
  TaylorJet fj = f.jet(x, 2);
  double s = 0.0;
  for (const auto& X : fr.X) s += applyJet(X, applyJet(X, fj)).value();
  return s;
}

double gamma2Form(const Model& m, const ScalarField& f, const Point& x) { return gammaValues(m, f, x).gamma2; }
double gamma2ZForm(const Model& m, const ScalarField& f, const Point& x) { return gammaValues(m, f, x).gamma2Z; }

ScalarField sublaplacian(const Model& m, const ScalarField& f) {
  ScalarField out = constantField(f.nvars(), 0.0);
  for (const auto& X : m.horizontal) out = out + applyField(X, applyField(X, f));
  return out;
}

SasakianDecomposition sasakianGamma2Decomposition(const Model& m, const ScalarField& f, const Point& x) {
  if (!(m.family == "heisenberg" || m.family == "sasakian" || m.family == "sasakian-chart") || m.d() != 2 ||
      m.h() != 1) {
    throw DomainError("Sasakian decomposition requires a member of the G(rho1) family");
  }
  auto fr = frameJets(m, x, 2);
  TaylorJet f3 = f.jet(x, 3);
  TaylorJet Xf = applyJet(fr.X[0], f3), Yf = applyJet(fr.X[1], f3), Zf = applyJet(fr.Z[0], f3);
  const double XX = applyJet(fr.X[0], Xf).value(), YY = applyJet(fr.X[1], Yf).value();
  const double XY = applyJet(fr.X[0], Yf).value(), YX = applyJet(fr.X[1], Xf).value();
  const double XZ = applyJet(fr.X[0], Zf).value(), YZ = applyJet(fr.X[1], Zf).value();
  const double sym = 0.5 * (XY + YX);
  SasakianDecomposition d;
  d.hessNormSq = XX * XX + 2.0 * sym * sym + YY * YY;
  d.crossTerm = 2.0 * (Yf.value() * XZ - Xf.value() * YZ);
  const double G = Xf.value() * Xf.value() + Yf.value() * Yf.value();
  const double GZ = Zf.value() * Zf.value();
  d.gamma2Reconstructed = d.hessNormSq + m.rho1 * G + 0.5 * GZ + d.crossTerm;
  d.gamma2 = gammaValues(fr, f3).gamma2;
  return d;
}

// ---------------------------------------------------------------------------

std::string Nu::toString() const {
  switch (kind) {
    case Kind::LimitInf: return "NU_LIMIT_INF";
    case Kind::LimitZero: return "NU_LIMIT_ZERO";
    default: {
      std::ostringstream os;
      os.precision(17);
      os << value;
      return os.str();
    }
  }
}

json Nu::toJson() const {
  if (kind == Kind::Finite) return value;
  return toString();
}

Nu Nu::fromJson(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "NU_LIMIT_INF") return NU_LIMIT_INF;
    if (s == "NU_LIMIT_ZERO") return NU_LIMIT_ZERO;
    throw ConfigError("unknown nu sentinel '" + s + "'");
  }
  return finite(j.get<double>());
}

Nu optimalNu(double gamma, double gamma2Z, double kappa) {
  if (gamma < 0.0 || gamma2Z < 0.0 || kappa < 0.0) throw DomainError("optimalNu: inputs must be nonnegative");
  const double kg = kappa * gamma;
  if (kg > 0.0 && gamma2Z > 0.0) return Nu::finite(std::sqrt(kg / gamma2Z));
  if (kg > 0.0) return NU_LIMIT_INF;
  return NU_LIMIT_ZERO;
}

double nuPart(double gamma, double gamma2Z, double kappa, const Nu& nu) {
  const double kg = kappa * gamma;
  switch (nu.kind) {
    case Nu::Kind::LimitInf:
      return gamma2Z == 0.0 ? 0.0 : (gamma2Z > 0 ? std::numeric_limits<double>::infinity()
                                                    : -std::numeric_limits<double>::infinity());
    case Nu::Kind::LimitZero: return kg == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    default: return nu.value * gamma2Z + kg / nu.value;
  }
}

double cdResidual(const GammaValues& g, const CDParams& p, const Nu& nu) {
  if (nu.kind == Nu::Kind::Finite && !(nu.value > 0.0 && std::isfinite(nu.value)))
    throw DomainError("nu must be a positive finite number");
  const double dimTerm = std::isinf(p.d) ? 0.0 : g.Lf * g.Lf / p.d;
  return g.gamma2 + nuPart(g.gamma, g.gamma2Z, p.kappa, nu) - dimTerm - p.rho1 * g.gamma - p.rho2 * g.gammaZ;
}

double cdResidual(const Model& m, const CDParams& p, double nu, const ScalarField& f, const Point& x) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw DomainError("nu must be a positive finite number");
  return cdResidual(gammaValues(m, f, x), p, Nu::finite(nu));
}

double cdResidual(const Model& m, const CDParams& p, const Nu& nu, const ScalarField& f, const Point& x) {
  return cdResidual(gammaValues(m, f, x), p, nu);
}

namespace {
// Rounding can leave Gamma_2^Z a few ulps below zero; anything larger is
// a genuine negative value and makes the infimum over nu equal to -infinity.
double cleanNonnegative(double v, double scale) {
  if (v < 0.0 && v > -1e-12 * std::max(1.0, scale)) return 0.0;
  return v;
}
}  // namespace

double cdResidualOptimal(const GammaValues& g, const CDParams& p, Nu* chosen) {
  const double g2z = cleanNonnegative(g.gamma2Z, std::abs(g.gamma2) + g.gamma);
  if (g2z < 0.0) {
    if (chosen) *chosen = NU_LIMIT_INF;
    return -std::numeric_limits<double>::infinity();
  }
  GammaValues gc = g;
  gc.gamma2Z = g2z;
  const Nu nu = optimalNu(std::max(0.0, g.gamma), g2z, p.kappa);
  if (chosen) *chosen = nu;
  return cdResidual(gc, p, nu);
}

double checkCommutation(const Model& m, const ScalarField& f, const Point& x) {
  auto fr = frameJets(m, x, 2);
  TaylorJet f3 = f.jet(x, 3);
  const int n = f3.nvars();
  std::vector<TaylorJet> Xf, Zf;
  TaylorJet G(n, 2), GZ(n, 2);
  for (const auto& X : fr.X) {
    Xf.push_back(applyJet(X, f3));
    G += Xf.back() * Xf.back();
  }
  for (const auto& Z : fr.Z) {
    Zf.push_back(applyJet(Z, f3));
    GZ += Zf.back() * Zf.back();
  }
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < fr.X.size(); ++i) lhs += Xf[i].value() * applyJet(fr.X[i], GZ).value();
  for (std::size_t j = 0; j < fr.Z.size(); ++j) rhs += Zf[j].value() * applyJet(fr.Z[j], G).value();
  return std::abs(lhs - rhs);
}

double checkLZCommutator(const Model& m, const ScalarField& f, const Point& x) {
  auto fr = frameJets(m, x, 2);
  TaylorJet f3 = f.jet(x, 3);
  TaylorJet Lf(f3.nvars(), 1);
  for (const auto& X : fr.X) Lf += applyJet(X, applyJet(X, f3));
  double worst = 0.0;
  for (const auto& Z : fr.Z) {
    TaylorJet Zf = applyJet(Z, f3);
    double LZ = 0.0;
    for (const auto& X : fr.X) LZ += applyJet(X, applyJet(X, Zf)).value();
    worst = std::max(worst, std::abs(LZ - applyJet(Z, Lf).value()));
  }
  return worst;
}

// ---------------------------------------------------------------------------

json SamplerSpec::toJson() const {
  json j = {{"degree", degree}, {"count", count}, {"points", points},
            {"box", box},       {"seed", seed},   {"family", family}};
  if (!functions.empty()) {
    json fs = json::array();
    for (const auto& f : functions) fs.push_back(f.toJson());
    j["functions"] = fs;
  }
  if (!fixedPoints.empty()) j["fixedPoints"] = fixedPoints;
  return j;
}

SamplerSpec SamplerSpec::fromJson(const json& j) {
  SamplerSpec s;
  try {
    s.degree = j.value("degree", s.degree);
    s.count = j.value("count", s.count);
    s.points = j.value("points", s.points);
    s.box = j.value("box", s.box);
    s.seed = j.value("seed", s.seed);
    s.family = j.value("family", s.family);
    if (j.contains("functions"))
      for (const auto& f : j.at("functions")) s.functions.push_back(TestFunction::fromJson(f));
    if (j.contains("fixedPoints")) s.fixedPoints = j.at("fixedPoints").get<std::vector<Point>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed sampler: ") + e.what());
  }
  if (s.degree < 0 || s.degree > kMaxJetOrder) throw ConfigError("sampler degree must be in [0, 4]");
  if (s.count < 0 || s.points < 0 || !(s.box > 0)) throw ConfigError("sampler counts/box invalid");
  return s;
}

TestFunction SamplerSpec::function(const Model& m, std::size_t i) const {
  if (!functions.empty()) return functions[i];
  Rng rng(seed, 2 * i);
  return randomTestFunction(family, m.coordDim, degree, rng, i);
}

Point SamplerSpec::point(const Model& m, std::size_t i, std::size_t k) const {
  if (!fixedPoints.empty()) return fixedPoints[k];
  Rng rng(seed ^ 0xA5A5A5A55A5A5A5AULL, i * 1000003ULL + k);
  return m.samplePoint(rng, box);
}

json Witness::toJson() const {
  return {{"function", f.toJson()}, {"point", x}, {"nu", nu.toJson()}, {"value", value}};
}

CDScan scanCD(const Model& m, const CDParams& p, const SamplerSpec& s) {
  p.validate();
  const std::size_t nf = s.functionCount(), np = s.pointCount();
  struct Best {
    double r = std::numeric_limits<double>::infinity();
    std::size_t k = 0;
    Nu nu;
  };
  std::vector<Best> best(nf);
  parallelFor(nf, [&](std::size_t i) {
    const ScalarField f = s.function(m, i).field();
    for (std::size_t k = 0; k < np; ++k) {
      const Point x = s.point(m, i, k);
      Nu nu;
      const double r = cdResidualOptimal(gammaValues(m, f, x), p, &nu);
      if (r < best[i].r) best[i] = {r, k, nu};
    }
  });
  CDScan out;
  out.samples = nf * np;
  for (std::size_t i = 0; i < nf; ++i) {
    if (best[i].r < out.minResidual) {
      out.minResidual = best[i].r;
      out.witness = {s.function(m, i), s.point(m, i, best[i].k), best[i].nu, best[i].r};
    }
  }
  return out;
}

Rho1Estimate estimateSharpRho1(const Model& m, double rho2, double kappa, double d, const SamplerSpec& s) {
  CDParams p{0.0, rho2, kappa, d};
  p.validate();
  const std::size_t nf = s.functionCount(), np = s.pointCount();
  struct Best {
    double ratio = std::numeric_limits<double>::infinity();
    std::size_t k = 0;
    Nu nu;
    std::size_t degenerate = 0;
    double degenerateMin = std::numeric_limits<double>::infinity();
  };
  std::vector<Best> best(nf);
  parallelFor(nf, [&](std::size_t i) {
    const ScalarField f = s.function(m, i).field();
    for (std::size_t k = 0; k < np; ++k) {
      const Point x = s.point(m, i, k);
      const GammaValues g = gammaValues(m, f, x);
      Nu nu;
      // With rho1 = 0 the residual is the numerator of the ratio.
      const double num = cdResidualOptimal(g, p, &nu);
      if (g.gamma > 1e-12) {
        const double ratio = num / g.gamma;
        if (ratio < best[i].ratio) {
          best[i].ratio = ratio;
          best[i].k = k;
          best[i].nu = nu;
        }
      } else {
        ++best[i].degenerate;
        best[i].degenerateMin = std::min(best[i].degenerateMin, num);
      }
    }
  });
  Rho1Estimate out;
  out.samples = nf * np;
  for (std::size_t i = 0; i < nf; ++i) {
    out.degenerate += best[i].degenerate;
    out.minDegenerateResidual = std::min(out.minDegenerateResidual, best[i].degenerateMin);
    if (best[i].ratio < out.rho1Hat) {
      out.rho1Hat = best[i].ratio;
      out.witness = {s.function(m, i), s.point(m, i, best[i].k), best[i].nu, best[i].ratio};
    }
  }
  if (out.degenerate == out.samples) throw DomainError("rho1 estimation: every sample had Gamma(f) = 0");
  return out;
}

}  // namespace srlab
