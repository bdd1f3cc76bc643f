#include "srlab/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "srlab/error.hpp"
#include "srlab/heat.hpp"
#include "srlab/parallel.hpp"
#include "srlab/random.hpp"

namespace srlab {

using json = nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> linspaceTimes(double step, int count) {
  std::vector<double> t;
  for (int k = 1; k <= count; ++k) t.push_back(std::round(step * k * 1e12) / 1e12);
  return t;
}

// Grid settings shared by the heat checks.
json heatOptions() {
  return {{"h", 0.25}, {"halfWidths", {5.0, 5.0, 4.0}}, {"bumpRadius", 1.5}, {"refinementFactor", 5.0}};
}

json merged(json a, const json& b) {
  for (auto it = b.begin(); it != b.end(); ++it) a[it.key()] = it.value();
  return a;
}

std::vector<CheckInfo> buildRegistry() {
  std::vector<CheckInfo> r;
  r.push_back({"ball-hitting", "P_{A r^2}(1_B(x,r))(x) >= 1/2 for some A in (0, 1)", true, false, false,
               {{"radii", {0.5, 1.0}},
                {"A", {0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9}},
                {"paths", 100000},
                {"dt", 0.0025},
                {"nodes", 25},
                {"point", nullptr}}});
  r.push_back({"bonnet-myers", "diameter bound for rho1 > 0", false, true, true,
               {{"samples", 10}, {"stability", 0.05}, {"slack", 0.02}}});
  r.push_back({"cd", "curvature-dimension residual over random test functions", false, false, false,
               {{"tol", 1e-9}}});
  r.push_back({"distance-compare", "d <= C max(sqrt(d_tau), d_tau) and d_tau <= d", true, true, false,
               {{"tau", 1.0},
                {"samples", 50},
                {"nodes", {15, 15, 15}},
                {"halfWidths", {2.2, 2.2, 3.2}},
                {"box", 1.0},
                {"stability", 0.1}}});
  r.push_back({"doubling", "V(x, 2r) / V(x, r) bounded (2^Q on graded groups)", true, false, false,
               {{"radii", {0.25, 0.5, 1.0}}, {"nodes", 17}, {"tol", 0.05}, {"point", nullptr}}});
  r.push_back({"exp-doubling", "V(x, 2r) / V(x, r) <= C1 exp(C2 r^2)", true, false, false,
               {{"radii", {0.25, 0.5, 0.75, 1.0}}, {"nodes", 21}, {"tol", 0.05}, {"point", nullptr}}});
  json gauss = merged(heatOptions(), {{"times", {0.25, 0.5, 1.0}},
                                      {"samples", 200},
                                      {"sampleBox", {2.5, 2.5, 1.4}},
                                      {"maxDistance", 2.3},
                                      {"epsilon", 0.5},
                                      {"distanceNodes", 33},
                                      {"volumeNodes", 25},
                                      {"minValueRatio", 1e-3},
                                      {"point", nullptr}});
  gauss.erase("bumpRadius");
  r.push_back({"gaussian-two-sided", "ln p + ln V(x, sqrt t) between -d^2/(4 -+ eps) t bands", true, false, false,
               gauss});
  r.push_back({"gaussian-upper", "ln p + ln V(x, sqrt t) <= C - d^2/(4 + eps) t", true, false, false, gauss});
  r.push_back({"harnack", "P_s f(x) <= P_t f(y) (t/s)^{D/2} exp(D d^2 / 4d(t - s))", false, true, false,
               merged(heatOptions(), {{"mode", "semigroup"},
                                      {"pairs", 20},
                                      {"paths", 100000},
                                      {"dt", 0.005},
                                      {"times", {0.25, 0.5, 1.0}},
                                      {"box", 1.0},
                                      {"offset", 0.5},
                                      {"ciFactor", 3.0},
                                      {"cylinder", CylinderParams{}.toJson()},
                                      {"r", 1.0},
                                      {"snapshots", 20}})});
  r.push_back({"hypotheses", "Gamma(f, Gamma^Z f) = Gamma^Z(f, Gamma f) and [L, Z] = 0", false, false, false,
               {{"tol", 1e-9}}});
  r.push_back({"liyau", "Li-Yau gradient bound on a grid heat solution", true, false, false,
               merged(heatOptions(), {{"times", linspaceTimes(0.1, 10)},
                                      {"samples", 50},
                                      {"sampleBox", {1.5, 1.5, 1.5}},
                                      {"minValueRatio", 1e-3}})});
  r.push_back({"ondiag", "t^{D/2} u(x, t) nondecreasing", true, false, false,
               merged(heatOptions(), {{"times", linspaceTimes(0.1, 10)}, {"point", nullptr}})});
  r.push_back({"poincare", "int_B |f - f_B|^2 <= C r^2 int_B Gamma(f)", true, false, false,
               {{"r", 1.0}, {"nodes", 17}, {"stability", 0.1}, {"point", nullptr}}});
  std::sort(r.begin(), r.end(), [](const CheckInfo& a, const CheckInfo& b) { return a.id < b.id; });
  return r;
}

Model resolveModel(const json& ref) {
  if (ref.is_string()) return modelFromRef(ref.get<std::string>());
  if (ref.is_object()) return modelFromJson(ref);
  throw ConfigError("model must be a reference string or a model object");
}

SamplerSpec defaultSampler(const std::string& id) {
  SamplerSpec s;
  if (id == "hypotheses") {
    s.count = 50;
    s.points = 20;
    s.box = 1.0;
  }
  return s;
}

template <class T>
T get(const json& o, const char* key) {
  try {
    return o.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("option '") + key + "': " + e.what());
  }
}

Point pointOption(const Model& m, const json& o) {
  if (!o.contains("point") || o["point"].is_null()) {
    if (m.group) return m.group->identity;
    return Point(m.coordDim, 0.0);
  }
  Point p = get<Point>(o, "point");
  if (static_cast<int>(p.size()) != m.coordDim) throw ConfigError("option 'point' has the wrong dimension");
  return p;
}

std::size_t countOption(const json& o, const char* key) {
  const long long v = get<long long>(o, key);
  if (v <= 0) throw ConfigError(std::string("option '") + key + "' must be positive");
  return static_cast<std::size_t>(v);
}

void requirePaths(std::size_t n) {
  if (n > maxPaths())
    throw ResourceError("path count " + std::to_string(n) + " exceeds the cap " + std::to_string(maxPaths()) +
                        " (SRLAB_MAX_PATHS)");
}

// Coarse heat grid: +-halfWidths (clipped to the chart box), spacing h on
// horizontal axes and 2h on the others.
GridSpec heatGrid(const Model& m, const json& o, const Point& center) {
  const auto hw = get<std::vector<double>>(o, "halfWidths");
  const double h = get<double>(o, "h");
  if (static_cast<int>(hw.size()) != m.coordDim) throw ConfigError("option 'halfWidths' has the wrong dimension");
  if (!(h > 0)) throw ConfigError("option 'h' must be positive");
  std::vector<double> lo(hw.size()), hi(hw.size()), sp(hw.size());
  for (std::size_t k = 0; k < hw.size(); ++k) {
    double w = hw[k];
    if (!m.chartBox.empty()) w = std::min(w, m.chartBox[k]);
    lo[k] = center[k] - w;
    hi[k] = center[k] + w;
    sp[k] = static_cast<int>(k) < m.d() ? h : 2 * h;
  }
  return GridSpec::withSpacing(lo, hi, sp);
}

struct HeatPair {
  GridSpec coarse, fine;
  HeatSolution uc, uf;
};

HeatPair solvePair(const Model& m, const json& o, const Point& center, const ScalarField& f0,
                   const std::vector<double>& times) {
  HeatPair p;
  p.coarse = heatGrid(m, o, center);
  p.fine = p.coarse.refined();
  requireCellBudget(p.fine);
  HeatConfig cfg;
  cfg.times = times;
  const double T = times.back();
  p.uc = solveHeat(m, GridField::sample(p.coarse, f0), T, cfg);
  p.uf = solveHeat(m, GridField::sample(p.fine, f0), T, cfg);
  return p;
}

std::vector<double> sortedTimes(const json& o) {
  auto t = get<std::vector<double>>(o, "times");
  if (t.empty()) throw ConfigError("option 'times' is empty");
  std::sort(t.begin(), t.end());
  if (!(t.front() > 0)) throw ConfigError("option 'times' must be positive");
  return t;
}

ScalarField bumpAround(const Model& m, const Point& c, double radius) {
  return bumpField(c, std::vector<double>(m.coordDim, radius));
}

json finite(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// ---------------------------------------------------------------- checks

void checkCD(const Model& m, const CheckSpec& s, const json& o, CheckReport& r) {
  const double tol = get<double>(o, "tol");
  const CDScan scan = scanCD(m, s.params, s.sampler);
  r.statistics = {{"minResidual", finite(scan.minResidual)}, {"samples", scan.samples}};
  r.witness = scan.witness.toJson();
  if (scan.samples == 0) {
    r.verdict = Verdict::Inconclusive;
    r.message = "no samples";
  } else if (scan.minResidual < -tol) {
    r.verdict = Verdict::Fail;
    r.message = "residual below -" + json(tol).dump();
  } else {
    r.verdict = Verdict::Pass;
  }
}

void checkHypotheses(const Model& m, const CheckSpec& s, const json& o, CheckReport& r) {
  const double tol = get<double>(o, "tol");
  const std::size_t nf = s.sampler.functionCount(), np = s.sampler.pointCount();
  std::vector<double> comm(nf * np), lz(nf * np);
  std::vector<TestFunction> fs(nf);
  for (std::size_t i = 0; i < nf; ++i) fs[i] = s.sampler.function(m, i);
  parallelFor(nf, [&](std::size_t i) {
    const ScalarField f = fs[i].field();
    for (std::size_t k = 0; k < np; ++k) {
      const Point x = s.sampler.point(m, i, k);
      comm[i * np + k] = checkCommutation(m, f, x);
      lz[i * np + k] = checkLZCommutator(m, f, x);
    }
  });
  const auto ic = std::max_element(comm.begin(), comm.end()) - comm.begin();
  const auto il = std::max_element(lz.begin(), lz.end()) - lz.begin();
  const bool any = nf * np > 0;
  const double mc = any ? comm[ic] : 0.0, ml = any ? lz[il] : 0.0;
  r.statistics = {{"maxCommutation", mc}, {"maxLZ", ml}, {"samples", nf * np}};
  const bool lzWorse = ml > mc;
  const std::size_t w = lzWorse ? il : ic;
  if (nf * np > 0)
    r.witness = {{"kind", lzWorse ? "lz" : "commutation"},
                 {"function", fs[w / np].toJson()},
                 {"point", s.sampler.point(m, w / np, w % np)},
                 {"value", lzWorse ? ml : mc}};
  if (nf * np == 0) {
    r.verdict = Verdict::Inconclusive;
    r.message = "no samples";
  } else {
    r.verdict = std::max(mc, ml) <= tol ? Verdict::Pass : Verdict::Fail;
  }
}

void checkLiYau(const Model& m, const CheckSpec& s, const json& o, CheckReport& r) {
  const auto times = sortedTimes(o);
  const Point c = pointOption(m, json::object());
  const auto box = get<std::vector<double>>(o, "sampleBox");
  if (static_cast<int>(box.size()) != m.coordDim) throw ConfigError("option 'sampleBox' has the wrong dimension");
  const double factor = get<double>(o, "refinementFactor"), ratio = get<double>(o, "minValueRatio");
  const std::size_t samples = countOption(o, "samples");
  HeatPair hp = solvePair(m, o, c, bumpAround(m, c, get<double>(o, "bumpRadius")), times);
  GridOperator oc(m, hp.coarse), of(m, hp.fine);

  Rng rng(s.seed, 101);
  double minDef = kInf, minRel = kInf, maxErr = 0.0, worstMargin = kInf;
  json worst;
  std::size_t taken = 0, attempts = 0;
  while (taken < samples && attempts < 50 * samples) {
    ++attempts;
    const double t = times[taken % times.size()];
    Point x(m.coordDim);
    for (int k = 0; k < m.coordDim; ++k) x[k] = c[k] + rng.uniform(-box[k], box[k]);
    const std::size_t node = hp.coarse.nearest(x);
    if (hp.coarse.isBoundary(node)) continue;
    x = hp.coarse.node(node);
    const GridField& sf = hp.uf.at(t);
    const GridField& sc = hp.uc.at(t);
    const double uf = sf.interpolate(x), uc = sc.interpolate(x);
    if (!(uf > ratio * sf.maxValue() && uc > ratio * sc.maxValue())) continue;
    LiYauValue vf, vc;
    try {
      vf = liYauDeficit(of, hp.uf, s.params, x, t);
      vc = liYauDeficit(oc, hp.uc, s.params, x, t);
    } catch (const DomainError&) {
      continue;  // u not positive on the whole stencil
    }
    const double err = std::abs(vf.deficit - vc.deficit);
    const double margin = vf.deficit + factor * err;
    minDef = std::min(minDef, vf.deficit);
    minRel = std::min(minRel, vf.deficit / vf.rhs);
    maxErr = std::max(maxErr, err);
    if (margin < worstMargin) {
      worstMargin = margin;
      worst = {{"x", x}, {"t", t}, {"deficit", vf.deficit}, {"refinementError", err}, {"lhs", vf.lhs},
               {"rhs", vf.rhs}};
    }
    ++taken;
  }
  r.statistics = {{"samples", taken},
                  {"minDeficit", finite(minDef)},
                  {"minRelativeDeficit", finite(minRel)},
                  {"maxRefinementError", maxErr},
                  {"minMargin", finite(worstMargin)}};
  r.witness = worst;
  r.provenance["grid"] = {{"coarse", hp.coarse.toJson()}, {"fine", hp.fine.toJson()}};
  if (taken < samples) {
    r.verdict = Verdict::Inconclusive;
    r.message = "only " + std::to_string(taken) + " samples where u is resolved";
  } else {
    r.verdict = worstMargin >= 0 ? Verdict::Pass : Verdict::Fail;
  }
}

void checkOnDiag(const Model& m, const CheckSpec& s, const json& o, CheckReport& r) {
  if (!std::isfinite(s.params.d)) throw ConfigError("ondiag needs a finite dimension d");
  const auto times = sortedTimes(o);
  const Point x = pointOption(m, o);
  const double factor = get<double>(o, "refinementFactor");
  const double e = s.params.D() / 2;
  HeatPair hp = solvePair(m, o, x, bumpAround(m, x, get<double>(o, "bumpRadius")), times);
  std::vector<double> gf, gc;
  for (double t : times) {
    gf.push_back(std::pow(t, e) * hp.uf.at(t).interpolate(x));
    gc.push_back(std::pow(t, e) * hp.uc.at(t).interpolate(x));
  }
  double worstMargin = kInf, minStep = kInf;
  json worst;
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double df = gf[k + 1] - gf[k], dc = gc[k + 1] - gc[k];
    const double err = std::abs(df - dc);
    const double margin = df + factor * err;
    minStep = std::min(minStep, df / std::max(std::abs(gf[k]), 1e-300));
    if (margin < worstMargin) {
      worstMargin = margin;
      worst = {{"x", x}, {"t0", times[k]}, {"t1", times[k + 1]}, {"increment", df}, {"refinementError", err}};
    }
  }
  r.statistics = {{"exponent", e}, {"values", gf}, {"minRelativeIncrement", finite(minStep)},
                  {"minMargin", finite(worstMargin)}};
  r.witness = worst;
  r.provenance["grid"] = {{"coarse", hp.coarse.toJson()}, {"fine", hp.fine.toJson()}};
  if (times.size() < 2) {
    r.verdict = Verdict::Inconclusive;
    r.message = "needs at least two times";
  } else {
    r.verdict = worstMargin >= 0 ? Verdict::Pass : Verdict::Fail;
  }
}

void checkGaussian(const Model& m, const CheckSpec& s, const json& o, CheckReport& r, bool twoSided) {
  const auto times = sortedTimes(o);
  const Point x = pointOption(m, o);
  const auto box = get<std::vector<double>>(o, "sampleBox");
  if (static_cast<int>(box.size()) != m.coordDim) throw ConfigError("option 'sampleBox' has the wrong dimension");
  const double eps = get<double>(o, "epsilon"), dmax = get<double>(o, "maxDistance");
  const double ratio = get<double>(o, "minValueRatio"), factor = get<double>(o, "refinementFactor");
  if (!(eps > 0 && eps < 4)) throw ConfigError("option 'epsilon' must lie in (0, 4)");
  if (!(dmax > 0)) throw ConfigError("option 'maxDistance' must be positive");
  const std::size_t samples = countOption(o, "samples");

  // Approximate delta at x: bump of width 3 spacings, unit mass.
  const GridSpec coarse = heatGrid(m, o, x);
  const GridSpec fine = coarse.refined();
  requireCellBudget(fine);
  HeatConfig cfg;
  cfg.times = times;
  auto kernel = [&](const GridSpec& g) {
    std::vector<double> radii(m.coordDim);
    for (int k = 0; k < m.coordDim; ++k) radii[k] = 3 * g.spacing(k);
    GridField f0 = GridField::sample(g, bumpField(x, radii));
    const GridField dens = GridField::sample(g, m.density);
    const double mass = f0.integrate(&dens.values);
    for (double& v : f0.values) v /= mass;
    return solveHeat(m, f0, times.back(), cfg);
  };
  const HeatSolution uc = kernel(coarse), uf = kernel(fine);
  const DistanceField df =
      distanceField(m, x, 0.0, ballGrid(m, x, dmax + 0.2, static_cast<int>(countOption(o, "distanceNodes"))),
                    s.eikonal);
  std::vector<double> lnV;
  for (double t : times)
    lnV.push_back(std::log(ballVolumeAt(m, x, std::sqrt(t), static_cast<int>(countOption(o, "volumeNodes")),
                                        s.eikonal)));

  struct Sample {
    double X, qf, qc;
    Point y;
    double t;
  };
  std::vector<Sample> pts;
  Rng rng(s.seed, 202);
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    const double t = times[ti];
    const GridField& sf = uf.at(t);
    const GridField& sc = uc.at(t);
    const double mf = sf.maxValue(), mc = sc.maxValue();
    for (std::size_t k = 0; k < samples; ++k) {
      Point y(m.coordDim);
      for (int a = 0; a < m.coordDim; ++a) y[a] = x[a] + rng.uniform(-box[a], box[a]);
      if (!df.field.grid.contains(y) || !coarse.contains(y)) continue;
      const double d = df.value(y);
      if (!(d <= dmax)) continue;
      const double vf = sf.interpolate(y), vc = sc.interpolate(y);
      if (!(vf > ratio * mf && vc > ratio * mc)) continue;
      pts.push_back({d * d / t, std::log(vf) + lnV[ti], std::log(vc) + lnV[ti], y, t});
    }
  }
  auto slope = [&](bool fineGrid) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : pts) {
      const double q = fineGrid ? p.qf : p.qc;
      sx += p.X;
      sy += q;
      sxx += p.X * p.X;
      sxy += p.X * q;
    }
    const double n = static_cast<double>(pts.size());
    const double den = n * sxx - sx * sx;
    return den > 0 ? (n * sxy - sx * sy) / den : std::numeric_limits<double>::quiet_NaN();
  };
  const double sf = slope(true), sc = slope(false);
  const double slack = factor * std::abs(sf - sc);
  const double upperExp = -1.0 / (4 + eps), lowerExp = -1.0 / (4 - eps);
  double lnC = -kInf, lnc = kInf;
  for (const auto& p : pts) {
    lnC = std::max(lnC, p.qf + p.X / (4 + eps));
    lnc = std::min(lnc, p.qf + p.X / (4 - eps));
  }
  r.statistics = {{"samples", pts.size()},
                  {"slope", finite(sf)},
                  {"slopeCoarse", finite(sc)},
                  {"slack", finite(slack)},
                  {"upperExponent", upperExp},
                  {"lowerExponent", lowerExp},
                  {"lnUpperConstant", finite(lnC)},
                  {"lnLowerConstant", finite(lnc)}};
  if (twoSided) r.statistics["band"] = finite(lnC - lnc);
  r.provenance["grid"] = {{"coarse", coarse.toJson()}, {"fine", fine.toJson()}, {"distance", df.field.grid.toJson()}};
  r.witness = {{"x", x}, {"slope", finite(sf)}};
  if (pts.size() < 10 || !std::isfinite(sf)) {
    r.verdict = Verdict::Inconclusive;
    r.message = "too few resolved samples";
    return;
  }
  const bool upperOk = sf <= upperExp + slack;
  const bool lowerOk = !twoSided || sf >= lowerExp - slack;
  r.verdict = upperOk && lowerOk ? Verdict::Pass : Verdict::Fail;
  if (!upperOk) r.message = "decay slower than the upper exponent";
  if (!lowerOk) r.message = "decay faster than the lower exponent";
}

void checkHarnackSemigroup(const Model& m, const CheckSpec& s, const json& o, CheckReport& r) {
  const auto times = sortedTimes(o);
  if (times.size() < 2) throw ConfigError("harnack needs at least two times");
  const std::size_t pairs = countOption(o, "pairs"), paths = countOption(o, "paths");
  requirePaths(paths);
  const double dt = get<double>(o, "dt"), box = get<double>(o, "box"), offset = get<double>(o, "offset");
  const double ciFactor = get<double>(o, "ciFactor");
  const ScalarField f = bumpAround(m, m.group->identity, get<double>(o, "bumpRadius"));
  const PointFn fv = [&](const Point& p) { return f.value(p); };
  const auto sets = samplePathsAt(m, m.group->identity, times, paths, dt, s.seed);
  std::vector<std::pair<std::size_t, std::size_t>> st;
  for (std::size_t a = 0; a < times.size(); ++a)
    for (std::size_t b = a + 1; b < times.size(); ++b) st.push_back({a, b});

  Rng rng(s.seed, 303);
  double worstMargin = kInf, minRatio = kInf;
  json worst, rows = json::array();
  std::size_t unresolved = 0;
  for (std::size_t k = 0; k < pairs; ++k) {
    const Point x = m.samplePoint(rng, box);
    const Point y = m.group->multiply(x, m.samplePoint(rng, offset));
    const auto [a, b] = st[k % st.size()];
    const ShootingResult sh = shootingDistance(m, x, y);
    if (!sh.converged) ++unresolved;
    const CI ps = estimateTranslated(m, sets[a], x, fv);
    const CI pt = estimateTranslated(m, sets[b], y, fv);
    const HarnackValue v = harnackDeficit(ps, pt, times[a], times[b], s.params, sh.distance);
    const double margin = v.deficit + ciFactor * v.halfWidth;
    minRatio = std::min(minRatio, v.rhs / v.lhs);
    if (margin < worstMargin) {
      worstMargin = margin;
      worst = {{"x", x}, {"y", y}, {"s", times[a]}, {"t", times[b]}, {"distance", sh.distance},
               {"lhs", ps.toJson()}, {"rhsSemigroup", pt.toJson()}, {"deficit", v.deficit},
               {"halfWidth", v.halfWidth}};
    }
  }
  r.statistics = {{"pairs", pairs},
                  {"paths", paths},
                  {"minMargin", finite(worstMargin)},
                  {"minRatio", finite(minRatio)},
                  {"unresolvedDistances", unresolved},
                  {"flaggedPaths", sets.back().flagged}};
  r.witness = worst;
  if (unresolved > 0) {
    r.verdict = Verdict::Inconclusive;
    r.message = "shooting did not converge for some pairs";
  } else {
    r.verdict = worstMargin >= 0 ? Verdict::Pass : Verdict::Fail;
  }
}

void checkHarnackParabolic(const Model& m, const CheckSpec& s, const json& o, CheckReport& r) {
  if (!m.traits.hasGlobalChart) throw ConfigError("parabolic harnack needs a chart model");
  const CylinderParams c = CylinderParams::fromJson(o.at("cylinder"));
  const double rad = get<double>(o, "r");
  const int snaps = static_cast<int>(countOption(o, "snapshots"));
  const Point x = pointOption(m, json::object());
  const double T = c.alpha * rad * rad;
  HeatConfig cfg;
  cfg.times = linspaceTimes(T / snaps, snaps);
  const GridSpec g = heatGrid(m, o, x);
  const HeatSolution u = solveHeat(m, GridField::sample(g, bumpAround(m, x, get<double>(o, "bumpRadius"))), T, cfg);
  const DistanceField df = distanceField(m, x, 0.0, g, s.eikonal);
  const ParabolicHarnackValue v = parabolicHarnack(u, df.field, 0.0, rad, c);
  r.statistics = {{"supMinus", v.supMinus},
                  {"infPlus", v.infPlus},
                  {"ratio", finite(v.ratio)},
                  {"samplesMinus", v.samplesMinus},
                  {"samplesPlus", v.samplesPlus}};
  r.witness = {{"x", x}, {"r", rad}, {"cylinder", c.toJson()}};
  r.provenance["grid"] = g.toJson();
  r.verdict = std::isfinite(v.ratio) && v.ratio > 0 ? Verdict::Pass : Verdict::Fail;
  if (r.verdict == Verdict::Fail) r.message = "inf over the upper cylinder is not positive";
}

void checkHarnack(const Model& m, const CheckSpec& s, const json& o, CheckReport& r) {
  const std::string mode = get<std::string>(o, "mode");
  if (mode == "semigroup") checkHarnackSemigroup(m, s, o, r);
  else if (mode == "parabolic") checkHarnackParabolic(m, s, o, r);
  else throw ConfigError("harnack mode must be 'semigroup' or 'parabolic'");
}

void checkDoubling(const Model& m, const CheckSpec& s, const json& o, CheckReport& r) {
  const auto radii = get<std::vector<double>>(o, "radii");
  const Point x = pointOption(m, o);
  const int nodes = static_cast<int>(countOption(o, "nodes"));
  const double tol = get<double>(o, "tol");
  const bool graded = m.homogeneousDim > 0;
  const double expected = graded ? std::pow(2.0, m.homogeneousDim) : 0.0;
  json rows = json::array();
  double maxRel = 0.0, maxRatio = 0.0;
  json worst;
  for (double rad : radii) {
    const DoublingValue v = doublingRatio(m, x, rad, nodes, s.eikonal);
    rows.push_back({{"r", rad}, {"ratio", v.ratio}, {"small", v.small}, {"large", v.large}});
    maxRatio = std::max(maxRatio, v.ratio);
    if (graded) {
      const double rel = std::abs(v.ratio / expected - 1);
      if (rel >= maxRel) {
        maxRel = rel;
        worst = {{"x", x}, {"r", rad}, {"ratio", v.ratio}};
      }
    }
  }
  r.statistics = {{"ratios", rows}, {"maxRatio", maxRatio}};
  if (graded) {
    r.statistics["expected"] = expected;
    r.statistics["maxRelativeError"] = maxRel;
    r.witness = worst;
    r.verdict = maxRel <= tol ? Verdict::Pass : Verdict::Fail;
  } else {
    r.verdict = std::isfinite(maxRatio) && maxRatio > 0 ? Verdict::Pass : Verdict::Fail;
  }
}

void checkExpDoubling(const Model& m, const CheckSpec& s, const json& o, CheckReport& r) {
  const auto radii = get<std::vector<double>>(o, "radii");
  const ExpDoublingFit fit =
      expDoublingFit(m, pointOption(m, o), radii, static_cast<int>(countOption(o, "nodes")), s.eikonal);
  const double tol = get<double>(o, "tol");
  r.statistics = fit.toJson();
  r.witness = {{"x", pointOption(m, o)}, {"C2", fit.C2}};
  if (!std::isfinite(fit.C1) || !std::isfinite(fit.C2)) {
    r.verdict = Verdict::Fail;
    r.message = "fit is not finite";
  } else if (s.params.rho1 >= 0 && fit.C2 > tol) {
    r.verdict = Verdict::Fail;
    r.message = "C2 > 0 with rho1 >= 0";
  } else {
    r.verdict = Verdict::Pass;
  }
}

void checkBallHitting(const Model& m, const CheckSpec& s, const json& o, CheckReport& r) {
  const auto radii = get<std::vector<double>>(o, "radii");
  const auto As = get<std::vector<double>>(o, "A");
  const std::size_t paths = countOption(o, "paths");
  requirePaths(paths);
  const double dt = get<double>(o, "dt");
  const int nodes = static_cast<int>(countOption(o, "nodes"));
  const Point x = pointOption(m, o);
  json rows = json::array();
  bool all = true;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double rad = radii[i];
    const DistanceField df = distanceField(m, x, 0.0, ballGrid(m, x, rad, nodes), s.eikonal);
    const DistanceFn dist = [&](const Point&, const Point& y) {
      return df.field.grid.contains(y) ? df.value(y) : kInf;
    };
    const BallHittingScan scan = ballHittingScan(m, x, rad, As, paths, dt, s.seed + i, dist);
    json probs = json::array();
    for (std::size_t k = 0; k < scan.A.size(); ++k)
      probs.push_back({{"A", scan.A[k]}, {"p", scan.probability[k].toJson()}});
    rows.push_back({{"r", rad}, {"bestA", scan.bestA}, {"probabilities", probs}});
    all = all && scan.bestA > 0;
  }
  r.statistics = {{"radii", rows}, {"paths", paths}};
  r.witness = {{"x", x}};
  r.verdict = all ? Verdict::Pass : Verdict::Inconclusive;
  if (!all) r.message = "no A in the scanned set reaches 1/2 for some radius";
}

// Monomials of degree 1 and 2 in the chart coordinates.
std::vector<std::pair<std::string, ScalarField>> poincareFunctions(int n) {
  std::vector<std::pair<std::string, ScalarField>> fs;
  for (int i = 0; i < n; ++i) fs.push_back({"x" + std::to_string(i), variableField(n, i)});
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      fs.push_back({"x" + std::to_string(i) + "*x" + std::to_string(j), variableField(n, i) * variableField(n, j)});
  return fs;
}

void checkPoincare(const Model& m, const CheckSpec& s, const json& o, CheckReport& r) {
  const double rad = get<double>(o, "r"), tol = get<double>(o, "stability");
  const int nodes = static_cast<int>(countOption(o, "nodes"));
  const Point x = pointOption(m, o);
  const GridSpec g = ballGrid(m, x, rad, nodes, 2 * nodes - 1);
  const auto fs = poincareFunctions(m.coordDim);
  double C[2] = {0, 0};
  std::string arg[2];
  for (int lev = 0; lev < 2; ++lev) {
    const GridSpec gl = lev ? g.refined() : g;
    const DistanceField df = distanceField(m, x, 0.0, gl, s.eikonal);
    for (const auto& [name, f] : fs) {
      const PoincareValue v = poincareRatio(m, f, df.field, rad);
      if (v.defined && v.ratio > C[lev]) {
        C[lev] = v.ratio;
        arg[lev] = name;
      }
    }
  }
  const double change = C[0] > 0 ? std::abs(C[1] / C[0] - 1) : kInf;
  r.statistics = {{"Cstar", C[1]}, {"CstarCoarse", C[0]}, {"relativeChange", finite(change)}};
  r.witness = {{"x", x}, {"r", rad}, {"function", arg[1]}};
  r.provenance["grid"] = {{"coarse", g.toJson()}, {"fine", g.refined().toJson()}};
  if (!(C[1] > 0) || !std::isfinite(C[1])) {
    r.verdict = Verdict::Fail;
    r.message = "C* is not finite";
  } else if (change > tol) {
    r.verdict = Verdict::Inconclusive;
    r.message = "C* not stable under refinement";
  } else {
    r.verdict = Verdict::Pass;
  }
}

double bonnetMyersBound(const CDParams& p) {
  if (!(p.rho1 > 0)) throw ConfigError("bonnet-myers needs rho1 > 0");
  if (!std::isfinite(p.d)) throw ConfigError("bonnet-myers needs a finite dimension d");
  return 2 * std::sqrt(3.0) * std::numbers::pi *
         std::sqrt((p.rho2 + p.kappa) / (p.rho1 * p.rho2) * (1 + 3 * p.kappa / (2 * p.rho2)) * p.d);
}

void checkBonnetMyers(const Model& m, const CheckSpec& s, const json& o, CheckReport& r) {
  const double bound = bonnetMyersBound(s.params);
  const std::size_t n = countOption(o, "samples");
  const double slack = get<double>(o, "slack"), tol = get<double>(o, "stability");
  const DiameterEstimate a = diameterEstimate(m, n, s.seed);
  const DiameterEstimate b = diameterEstimate(m, 2 * n, s.seed);
  const double est = std::max(a.estimate, b.estimate);
  const double change = std::abs(b.estimate - a.estimate) / std::max(b.estimate, 1e-300);
  r.statistics = {{"bound", bound},
                  {"estimate", a.estimate},
                  {"estimateDoubled", b.estimate},
                  {"relativeChange", change},
                  {"targets", a.targets + b.targets},
                  {"unresolved", a.unresolved + b.unresolved}};
  r.witness = {{"target", b.estimate >= a.estimate ? b.worst : a.worst}, {"distance", est}};
  if (est > bound + slack) {
    r.verdict = Verdict::Fail;
    r.message = "diameter estimate exceeds the bound";
  } else if (change > tol) {
    r.verdict = Verdict::Inconclusive;
    r.message = "estimate not stable under doubled sampling";
  } else {
    r.verdict = Verdict::Pass;
  }
}

void checkDistanceCompare(const Model& m, const CheckSpec& s, const json& o, CheckReport& r) {
  const auto nodes = get<std::vector<int>>(o, "nodes");
  const auto hw = get<std::vector<double>>(o, "halfWidths");
  if (static_cast<int>(nodes.size()) != m.coordDim || static_cast<int>(hw.size()) != m.coordDim)
    throw ConfigError("options 'nodes'/'halfWidths' have the wrong dimension");
  std::vector<double> lo(hw.size()), hi(hw.size());
  for (std::size_t k = 0; k < hw.size(); ++k) {
    lo[k] = -hw[k];
    hi[k] = hw[k];
  }
  const GridSpec g(lo, hi, nodes);
  const double tau = get<double>(o, "tau"), box = get<double>(o, "box"), tol = get<double>(o, "stability");
  const std::size_t n = countOption(o, "samples");
  const DistanceComparison a = distanceComparisonCheck(m, tau, n, s.seed, g, box, s.eikonal);
  const DistanceComparison b = distanceComparisonCheck(m, tau, 2 * n, s.seed, g, box, s.eikonal);
  const double change = std::abs(b.Chat - a.Chat) / std::max(b.Chat, 1e-300);
  r.statistics = {{"Chat", a.Chat},
                  {"ChatDoubled", b.Chat},
                  {"relativeChange", change},
                  {"monotone", a.monotone && b.monotone},
                  {"pairs", a.pairs + b.pairs},
                  {"skipped", a.skipped + b.skipped}};
  const auto& wp = b.Chat >= a.Chat ? b.worstPair : a.worstPair;
  r.witness = {{"x", wp.first}, {"y", wp.second}, {"tau", tau}};
  r.provenance["grid"] = g.toJson();
  if (!(a.monotone && b.monotone)) {
    r.verdict = Verdict::Fail;
    r.message = "d_tau > d at some node";
  } else if (!std::isfinite(b.Chat) || !(b.Chat > 0)) {
    r.verdict = Verdict::Fail;
    r.message = "Chat is not finite";
  } else if (change > tol) {
    r.verdict = Verdict::Inconclusive;
    r.message = "Chat not stable under doubled sampling";
  } else {
    r.verdict = Verdict::Pass;
  }
}

using CheckFn = std::function<void(const Model&, const CheckSpec&, const json&, CheckReport&)>;

const std::map<std::string, CheckFn>& dispatch() {
  static const std::map<std::string, CheckFn> table = {
      {"ball-hitting", checkBallHitting},
      {"bonnet-myers", checkBonnetMyers},
      {"cd", checkCD},
      {"distance-compare", checkDistanceCompare},
      {"doubling", checkDoubling},
      {"exp-doubling", checkExpDoubling},
      {"gaussian-two-sided",
       [](const Model& m, const CheckSpec& s, const json& o, CheckReport& r) { checkGaussian(m, s, o, r, true); }},
      {"gaussian-upper",
       [](const Model& m, const CheckSpec& s, const json& o, CheckReport& r) { checkGaussian(m, s, o, r, false); }},
      {"harnack", checkHarnack},
      {"hypotheses", checkHypotheses},
      {"liyau", checkLiYau},
      {"ondiag", checkOnDiag},
      {"poincare", checkPoincare},
  };
  return table;
}

bool usesSampler(const std::string& id) { return id == "cd" || id == "hypotheses"; }
bool usesEikonal(const std::string& id) {
  return id != "cd" && id != "hypotheses" && id != "liyau" && id != "ondiag" && id != "bonnet-myers";
}

void checkOptionKeys(const CheckInfo& info, const json& options) {
  if (!options.is_object()) throw ConfigError("options must be an object");
  for (auto it = options.begin(); it != options.end(); ++it)
    if (!info.options.contains(it.key()))
      throw ConfigError("check '" + info.id + "' has no option '" + it.key() + "'");
}

std::string csvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), out);
  } else if (j.is_string()) {
    out.push_back({prefix, j.get<std::string>()});
  } else {
    out.push_back({prefix, j.dump()});
  }
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

std::string verdictName(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Verdict verdictFromName(const std::string& s) {
  if (s == "pass") return Verdict::Pass;
  if (s == "fail") return Verdict::Fail;
  if (s == "inconclusive") return Verdict::Inconclusive;
  throw ConfigError("unknown verdict '" + s + "'");
}

const std::vector<CheckInfo>& checkRegistry() {
  static const std::vector<CheckInfo> r = buildRegistry();
  return r;
}

const CheckInfo& checkInfo(const std::string& id) {
  for (const auto& c : checkRegistry())
    if (c.id == id) return c;
  throw ConfigError("unknown check '" + id + "'");
}

std::size_t maxPaths() {
  if (const char* v = std::getenv("SRLAB_MAX_PATHS")) {
    char* end = nullptr;
    const double x = std::strtod(v, &end);
    if (end != v && x > 0) return static_cast<std::size_t>(x);
  }
  return 10000000;
}

json CheckSpec::toJson() const {
  json j = {{"checkId", checkId}, {"model", model}, {"params", params.toJson()}, {"seed", seed}};
  j["params"].erase("D");
  if (usesSampler(checkId)) j["sampler"] = sampler.toJson();
  if (usesEikonal(checkId)) j["eikonal"] = eikonal.toJson();
  j["options"] = options;
  return j;
}

CheckSpec CheckSpec::fromJson(const json& j) {
  if (!j.is_object()) throw ConfigError("check spec must be an object");
  CheckSpec s;
  try {
    s.checkId = j.at("checkId").get<std::string>();
    const CheckInfo& info = checkInfo(s.checkId);
    if (j.contains("model")) s.model = j["model"];
    s.seed = j.value("seed", s.seed);
    if (j.contains("params")) {
      json p = j["params"];
      p.erase("D");
      s.params = CDParams::fromJson(p);
    }
    s.sampler = defaultSampler(s.checkId);
    if (j.contains("sampler")) s.sampler = SamplerSpec::fromJson(merged(s.sampler.toJson(), j["sampler"]));
    if (!(j.contains("sampler") && j["sampler"].contains("seed"))) s.sampler.seed = s.seed;
    if (j.contains("eikonal")) s.eikonal = EikonalConfig::fromJson(j["eikonal"]);
    if (j.contains("options")) s.options = j["options"];
    checkOptionKeys(info, s.options);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed check spec: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid check parameters: ") + e.what());
  }
  return s;
}

json CheckReport::toJson() const {
  json j = {{"checkId", checkId},   {"model", model},        {"params", params},
            {"verdict", verdictName(verdict)}, {"statistics", statistics}, {"witness", witness},
            {"message", message},   {"provenance", provenance}};
  if (!error.empty()) j["error"] = error;
  return j;
}

CheckReport CheckReport::fromJson(const json& j) {
  CheckReport r;
  try {
    r.checkId = j.at("checkId").get<std::string>();
    r.model = j.at("model").get<std::string>();
    r.params = j.at("params");
    r.verdict = verdictFromName(j.at("verdict").get<std::string>());
    r.statistics = j.at("statistics");
    r.witness = j.at("witness");
    r.message = j.value("message", std::string());
    r.error = j.value("error", std::string());
    r.provenance = j.at("provenance");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed check report: ") + e.what());
  }
  return r;
}

CheckReport runCheck(const CheckSpec& spec) {
  const CheckInfo& info = checkInfo(spec.checkId);
  checkOptionKeys(info, spec.options);
  const Model m = resolveModel(spec.model);
  if (info.needsChart && !m.traits.hasGlobalChart)
    throw ConfigError("check '" + info.id + "' needs a chart model; '" + m.name + "' has none");
  if (info.needsGroup && !m.group)
    throw ConfigError("check '" + info.id + "' needs a group model; '" + m.name + "' is not one");
  if (info.needsCompact && !m.traits.isCompact)
    throw ConfigError("check '" + info.id + "' needs a compact model; '" + m.name + "' is not compact");
  spec.params.validate();
  const json o = merged(info.options, spec.options);

  CheckReport r;
  r.checkId = spec.checkId;
  r.model = m.name;
  r.params = spec.params.toJson();
  r.provenance = {{"seed", spec.seed}, {"model", spec.model}, {"options", o}, {"version", kLibraryVersion}};
  if (usesSampler(spec.checkId)) r.provenance["sampler"] = spec.sampler.toJson();
  if (usesEikonal(spec.checkId)) r.provenance["eikonal"] = spec.eikonal.toJson();
  const auto t0 = std::chrono::steady_clock::now();
  dispatch().at(spec.checkId)(m, spec, o, r);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

double replayWitness(const CheckReport& r) {
  if (r.checkId != "cd" && r.checkId != "hypotheses")
    throw ConfigError("witness replay is defined for cd and hypotheses reports");
  if (r.witness.is_null()) throw ConfigError("report has no witness");
  try {
    const Model m = resolveModel(r.provenance.at("model"));
    const TestFunction f = TestFunction::fromJson(r.witness.at("function"));
    const Point x = r.witness.at("point").get<Point>();
    const ScalarField field = f.field();
    if (r.checkId == "hypotheses")
      return r.witness.at("kind").get<std::string>() == "lz" ? checkLZCommutator(m, field, x)
                                                              : checkCommutation(m, field, x);
    json p = r.params;
    p.erase("D");
    return cdResidual(m, CDParams::fromJson(p), Nu::fromJson(r.witness.at("nu")), field, x);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed witness: ") + e.what());
  }
}

json SuiteSummary::toJson() const {
  return {{"pass", pass}, {"fail", fail}, {"inconclusive", inconclusive}, {"errors", errors},
          {"exitCode", exitCode()}};
}

SuiteResult runSuite(const std::vector<CheckSpec>& specs, int threads) {
  SuiteResult out;
  out.reports.resize(specs.size());
  const int total = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const int workers = static_cast<int>(std::min<std::size_t>(total, specs.size()));
  auto runOne = [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      out.reports[i] = runCheck(specs[i]);
    } catch (const std::exception& e) {
      CheckReport& r = out.reports[i];
      r = CheckReport{};
      r.checkId = specs[i].checkId;
      r.model = specs[i].model.is_string() ? specs[i].model.get<std::string>()
                                           : specs[i].model.value("name", std::string("custom"));
      r.params = specs[i].params.toJson();
      r.verdict = Verdict::Inconclusive;
      r.error = e.what();
      r.message = "check could not run";
      r.provenance = {{"seed", specs[i].seed}, {"model", specs[i].model}, {"version", kLibraryVersion}};
      r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  if (workers <= 1) {
    if (threads > 0) setThreadCount(threads);
    for (std::size_t i = 0; i < specs.size(); ++i) runOne(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int inner = std::max(1, total / workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        setLocalThreadCount(inner);
        for (std::size_t i = next++; i < specs.size(); i = next++) runOne(i);
      });
    for (auto& t : pool) t.join();
  }
  std::stable_sort(out.reports.begin(), out.reports.end(),
                   [](const CheckReport& a, const CheckReport& b) { return a.checkId < b.checkId; });
  for (const auto& r : out.reports) {
    if (!r.error.empty()) ++out.summary.errors;
    else if (r.verdict == Verdict::Pass) ++out.summary.pass;
    else if (r.verdict == Verdict::Fail) ++out.summary.fail;
    else ++out.summary.inconclusive;
  }
  return out;
}

CheckSpec makeCheck(const std::string& id, json model, CDParams params, std::uint64_t seed) {
  json j = {{"checkId", id}, {"model", std::move(model)}, {"seed", seed}, {"params", params.toJson()}};
  return CheckSpec::fromJson(j);
}

std::vector<CheckSpec> defaultSuite(std::uint64_t seed) {
  std::vector<CheckSpec> s;
  const CDParams heis{0.0, 0.5, 1.0, 2.0};
  for (const auto& c : checkRegistry()) {
    if (c.id == "bonnet-myers") continue;
    s.push_back(makeCheck(c.id, "heisenberg", heis, seed));
  }
  s.push_back(makeCheck("cd", "sasakian(1)", {1.0, 0.5, 1.0, 2.0}, seed));
  s.push_back(makeCheck("cd", "sasakian(-1)", {-1.0, 0.5, 1.0, 2.0}, seed));
  s.push_back(makeCheck("bonnet-myers", "sasakian(1)", {1.0, 0.5, 1.0, 2.0}, seed));
  return s;
}

std::vector<CheckSpec> suiteFromJson(const json& j, const std::uint64_t* seedOverride) {
  const json* list = &j;
  std::uint64_t seed = 42;
  if (j.is_object()) {
    if (!j.contains("checks")) throw ConfigError("suite document needs a 'checks' array");
    list = &j["checks"];
    if (j.contains("seed")) {
      if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0)
        throw ConfigError("suite seed must be a nonnegative integer");
      seed = j["seed"].get<std::uint64_t>();
    }
  }
  if (seedOverride) seed = *seedOverride;
  if (!list->is_array()) throw ConfigError("suite checks must be an array");
  std::vector<CheckSpec> out;
  for (json c : *list) {
    if (c.is_object() && (seedOverride || !c.contains("seed"))) c["seed"] = seed;
    out.push_back(CheckSpec::fromJson(c));
  }
  return out;
}

ReportFormat reportFormatFromName(const std::string& s) {
  if (s == "json") return ReportFormat::Json;
  if (s == "csv") return ReportFormat::Csv;
  if (s == "text") return ReportFormat::Text;
  throw ConfigError("unknown report format '" + s + "' (json, csv, text)");
}

json reportDocument(const SuiteResult& r, const std::string& timestamp) {
  json checks = json::array();
  for (const auto& c : r.reports) checks.push_back(c.toJson());
  json doc = {{"version", kReportVersion}, {"checks", checks}, {"summary", r.summary.toJson()}};
  if (!timestamp.empty()) doc["timestamp"] = timestamp;
  return doc;
}

void emitReport(const SuiteResult& r, ReportFormat format, std::ostream& out, const std::string& timestamp) {
  switch (format) {
    case ReportFormat::Json:
      out << reportDocument(r, timestamp).dump(2) << "\n";
      break;
    case ReportFormat::Csv: {
      out << "check,model,verdict,statistic,value\n";
      for (const auto& c : r.reports) {
        std::vector<std::pair<std::string, std::string>> rows;
        flatten(c.statistics, "", rows);
        if (!c.error.empty()) rows.push_back({"error", c.error});
        for (const auto& [k, v] : rows)
          out << csvField(c.checkId) << ',' << csvField(c.model) << ',' << verdictName(c.verdict) << ','
              << csvField(k) << ',' << csvField(v) << "\n";
      }
      break;
    }
    case ReportFormat::Text: {
      for (const auto& c : r.reports) {
        out << upper(verdictName(c.verdict)) << ' ' << c.checkId << ' ' << c.model;
        if (!c.error.empty()) out << "  error: " << c.error;
        else if (!c.message.empty()) out << "  (" << c.message << ")";
        std::ostringstream sec;
        sec.precision(3);
        sec << c.seconds;
        out << "  [" << sec.str() << " s]\n";
      }
      out << "summary: " << r.summary.pass << " pass, " << r.summary.fail << " fail, " << r.summary.inconclusive
          << " inconclusive, " << r.summary.errors << " errors\n";
      if (!timestamp.empty()) out << "generated " << timestamp << "\n";
      break;
    }
  }
  if (!out) throw Error("report output failed");
}

void emitReport(const SuiteResult& r, ReportFormat format, const std::string& path, const std::string& timestamp) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  emitReport(r, format, f, timestamp);
  f.close();
  if (!f) throw Error("writing '" + path + "' failed");
}

}  // namespace srlab
