// Acceptance run: one PASS/FAIL line per criterion, exit status 1 when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "srlab/gamma.hpp"
#include "srlab/heat.hpp"
#include "srlab/metric.hpp"
#include "srlab/random.hpp"
#include "srlab/verify.hpp"

using namespace srlab;
using json = nlohmann::json;

namespace {

// Tolerances.
constexpr double kCDTol = 1e-9;
constexpr double kEqualityTol = 1e-12;
constexpr double kRho1Tol = 1e-6;
constexpr double kHypTol = 1e-9;
constexpr double kGaussianIdentityTol = 1e-10;
constexpr double kDoublingTol = 0.05;
constexpr double kBallHitCI = 3.0;
constexpr double kPoincare1DTol = 0.02;
constexpr double kBonnetMyers = 53.31;
constexpr double kBonnetMyersSlack = 0.02;
constexpr double kC2Flat = 0.05;
constexpr double kCrossCI = 3.0;
constexpr double kCrossDistance = 0.02;
// Time limits (seconds).
constexpr double kCDSeconds = 30, kRho1Seconds = 120, kHarnackSeconds = 300, kSuiteSeconds = 1200;

constexpr double kPi = 3.14159265358979323846;

int failures = 0;

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s %2d %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string cat(std::initializer_list<std::string> parts) {
  std::string s;
  for (const auto& p : parts) s += (s.empty() ? "" : ", ") + p;
  return s;
}

const CDParams kHeis{0.0, 0.5, 1.0, 2.0};

CheckReport runDefault(const std::string& id, const std::string& model = "heisenberg", CDParams p = kHeis) {
  return runCheck(makeCheck(id, model, p, 42));
}

void guarded(int id, const std::string& name, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, name, false, std::string("exception: ") + e.what());
  }
}

ScalarField gaussianKernel(int n, double t) {
  ScalarField r2 = constantField(n, 0.0);
  for (int i = 0; i < n; ++i) r2 = r2 + variableField(n, i) * variableField(n, i);
  return std::pow(4.0 * kPi * t, -n / 2.0) * exp((-1.0 / (4.0 * t)) * r2);
}

}  // namespace

int main() {
  const auto start = Clock::now();

  guarded(1, "cd heisenberg", [] {
    const Model H = heisenberg();
    SamplerSpec s;  // 500 degree-4 polynomials x 100 points in [-2, 2]^3
    const auto t0 = Clock::now();
    const CDScan scan = scanCD(H, kHeis, s);
    const double secs = since(t0);
    const GammaValues g = gammaValues(H, variableField(3, 2), {0, 0, 0});
    const double eq = std::abs(cdResidualOptimal(g, kHeis));
    report(1, "cd heisenberg", scan.minResidual >= -kCDTol && secs < kCDSeconds && eq <= kEqualityTol,
           cat({fmt("min residual %.3e", scan.minResidual), fmt("samples %.0f", scan.samples),
                fmt("%.1f s", secs), fmt("residual of z at 0: %.1e", eq)}));
  });

  guarded(2, "sharp rho1", [] {
    SamplerSpec s;
    const auto t0 = Clock::now();
    const Rho1Estimate p = estimateSharpRho1(sasakian(1.0), 0.5, 1.0, 2.0, s);
    const double s1 = since(t0);
    const auto t1 = Clock::now();
    const Rho1Estimate n = estimateSharpRho1(sasakian(-1.0), 0.5, 1.0, 2.0, s);
    const double s2 = since(t1);
    report(2, "sharp rho1",
           p.rho1Hat >= 1 - kRho1Tol && n.rho1Hat >= -1 - kRho1Tol && s1 < kRho1Seconds && s2 < kRho1Seconds,
           cat({fmt("sasakian(1) %.9f", p.rho1Hat), fmt("%.1f s", s1), fmt("sasakian(-1) %.9f", n.rho1Hat),
                fmt("%.1f s", s2)}));
  });

  guarded(3, "hypotheses", [] {
    bool ok = true;
    double worst = 0;
    for (const char* m : {"heisenberg", "sasakian(1)", "sasakian(-1)"}) {
      const CheckReport r = runDefault("hypotheses", m);
      worst = std::max({worst, r.statistics["maxCommutation"].get<double>(), r.statistics["maxLZ"].get<double>()});
      ok = ok && r.verdict == Verdict::Pass && r.statistics["samples"] == 1000;
    }
    report(3, "hypotheses", ok && worst <= kHypTol, fmt("max residual %.2e over 3 models x 50 x 20", worst));
  });

  guarded(4, "li-yau", [] {
    const CheckReport r = runDefault("liyau");
    double gauss = 0;
    CDParams flat{0.0, 1.0, 0.0, 1.0};
    for (int n = 1; n <= 3; ++n) {
      flat.d = n;
      Point x(n);
      for (int i = 0; i < n; ++i) x[i] = 0.3 * (i + 1) - 0.2;
      for (double t : {0.1, 0.7, 2.0})
        gauss = std::max(gauss, std::abs(liYauDeficitAnalytic(euclidean(n), gaussianKernel(n, t), flat, x, t).deficit));
    }
    report(4, "li-yau", r.verdict == Verdict::Pass && r.statistics["samples"] == 50 && gauss <= kGaussianIdentityTol,
           cat({fmt("min deficit %.3f", r.statistics["minDeficit"].get<double>()),
                fmt("max refinement error %.3f", r.statistics["maxRefinementError"].get<double>()),
                fmt("gaussian identity error %.1e", gauss)}));
  });

  guarded(5, "harnack", [] {
    const auto t0 = Clock::now();
    const CheckReport r = runDefault("harnack");
    const double secs = since(t0);
    report(5, "harnack",
           r.verdict == Verdict::Pass && r.statistics["pairs"] == 20 && r.statistics["paths"] == 100000 &&
               secs < kHarnackSeconds,
           cat({fmt("min deficit + 3 CI %.4f", r.statistics["minMargin"].get<double>()), fmt("%.1f s", secs)}));
  });

  guarded(6, "on-diagonal", [] {
    const CheckReport r = runDefault("ondiag");
    report(6, "on-diagonal", r.verdict == Verdict::Pass && r.statistics["exponent"] == 4.0,
           cat({fmt("min increment + slack %.3e", r.statistics["minMargin"].get<double>()),
                fmt("t^4 u at t = 1: %.4f", r.statistics["values"].back().get<double>())}));
  });

  guarded(7, "doubling", [] {
    const CheckReport r = runDefault("doubling");
    const DoublingValue e = doublingRatio(euclidean(3), {0, 0, 0}, 0.5, 17);
    bool ok = r.verdict == Verdict::Pass && r.statistics["ratios"].size() == 3;
    std::string d;
    for (const auto& v : r.statistics["ratios"]) {
      ok = ok && std::abs(v["ratio"].get<double>() / 16 - 1) <= kDoublingTol;
      d += fmt("r=%.2f: ", v["r"].get<double>()) + fmt("%.4f; ", v["ratio"].get<double>());
    }
    ok = ok && std::abs(e.ratio / 8 - 1) <= kDoublingTol;
    report(7, "doubling", ok, "heisenberg " + d + fmt("euclidean(3) %.4f", e.ratio));
  });

  guarded(8, "ball hitting", [] {
    const CheckReport r = runDefault("ball-hitting");
    std::string d;
    bool ok = r.verdict == Verdict::Pass;
    for (const auto& row : r.statistics["radii"]) {
      ok = ok && row["bestA"].get<double>() > 0;
      d += fmt("r=%.1f ", row["r"].get<double>()) + fmt("A=%.2f; ", row["bestA"].get<double>());
    }
    auto dist = [](const Point& a, const Point& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); };
    const BallHittingScan e = ballHittingScan(euclidean(2), {0, 0}, 1.0, {0.1}, 100000, 1e-3, 42, dist);
    const double exact = 1 - std::exp(-2.5);
    const double dev = std::abs(e.probability[0].mean - exact);
    ok = ok && dev <= kBallHitCI * e.probability[0].halfWidth;
    report(8, "ball hitting", ok,
           "heisenberg " + d + fmt("euclidean(2) A=0.1: %.4f", e.probability[0].mean) + fmt(" vs %.4f", exact) +
               fmt(" (%.2f CI)", dev / e.probability[0].halfWidth));
  });

  guarded(9, "poincare", [] {
    const CheckReport r = runDefault("poincare");
    const GridSpec g({-2.0}, {2.0}, {4001});
    const GridField dist = GridField::sample(g, sqrt(variableField(1, 0) * variableField(1, 0) + 1e-300));
    const PoincareValue v = poincareRatio(euclidean(1), variableField(1, 0), dist, 1.0);
    const double rel = std::abs(v.ratio * 3 - 1);
    report(9, "poincare", r.verdict == Verdict::Pass && v.defined && rel <= kPoincare1DTol,
           cat({fmt("heisenberg C* %.4f", r.statistics["Cstar"].get<double>()),
                fmt("coarse %.4f", r.statistics["CstarCoarse"].get<double>()),
                fmt("euclidean(1) %.5f vs 1/3", v.ratio)}));
  });

  guarded(10, "bonnet-myers", [] {
    const CheckReport r = runDefault("bonnet-myers", "sasakian(1)", {1.0, 0.5, 1.0, 2.0});
    const double a = r.statistics["estimate"].get<double>(), b = r.statistics["estimateDoubled"].get<double>();
    const double bound = r.statistics["bound"].get<double>();
    const bool ok = r.verdict == Verdict::Pass && std::max(a, b) <= kBonnetMyers + kBonnetMyersSlack &&
                    std::abs(bound - 12 * std::sqrt(2.0) * kPi) < 1e-9 && std::abs(b - a) <= 0.05 * b;
    report(10, "bonnet-myers", ok, cat({fmt("estimate %.6f", a), fmt("doubled %.6f", b), fmt("bound %.4f", bound)}));
  });

  guarded(11, "exp doubling", [] {
    const CheckReport flat = runDefault("exp-doubling");
    const CheckReport neg = runDefault("exp-doubling", "sasakian-chart(-1)", {-1.0, 0.5, 1.0, 2.0});
    const double c0 = flat.statistics["C2"].get<double>(), c1 = neg.statistics["C2"].get<double>();
    report(11, "exp doubling",
           flat.verdict == Verdict::Pass && neg.verdict == Verdict::Pass && std::abs(c0) <= kC2Flat && c1 > 0,
           cat({fmt("heisenberg C2 %.2e", c0), fmt("sasakian-chart(-1) C2 %.4f", c1)}));
  });

  guarded(12, "distance comparison", [] {
    const CheckReport r = runDefault("distance-compare");
    report(12, "distance comparison", r.verdict == Verdict::Pass && r.statistics["monotone"].get<bool>(),
           cat({fmt("Chat %.4f", r.statistics["Chat"].get<double>()),
                fmt("doubled %.4f", r.statistics["ChatDoubled"].get<double>()),
                fmt("change %.3f", r.statistics["relativeChange"].get<double>())}));
  });

  guarded(13, "cross-oracle", [] {
    const Model H = heisenberg();
    // Semigroup: Richardson FD value at coarse nodes vs Monte Carlo.
    const ScalarField b = bumpField({0, 0, 0}, {1.5, 1.5, 1.5});
    const GridSpec coarse = GridSpec::withSpacing({-5, -5, -4}, {5, 5, 4}, {0.25, 0.25, 0.5});
    HeatConfig cfg;
    cfg.times = {0.25, 0.5};
    const HeatSolution uc = solveHeat(H, GridField::sample(coarse, b), 0.5, cfg);
    const HeatSolution uf = solveHeat(H, GridField::sample(coarse.refined(), b), 0.5, cfg);
    const auto sets = samplePathsAt(H, {0, 0, 0}, {0.25, 0.5}, 100000, 1.0 / 400, 42);
    Rng rng(42, 13);
    double worstCI = 0;
    for (int k = 0; k < 20; ++k) {
      Point x = coarse.node(coarse.nearest({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}));
      const int ti = k % 2;
      const double t = cfg.times[ti];
      const CI mc = estimateTranslated(H, sets[ti], x, [&](const Point& p) { return b.value(p); });
      const double fd = (4 * uf.at(t).interpolate(x) - uc.at(t).interpolate(x)) / 3;
      worstCI = std::max(worstCI, std::abs(fd - mc.mean) / mc.halfWidth);
    }
    // Distances: one eikonal field from the identity, d(x, x w) = d(0, w).
    const DistanceField df = distanceField(H, {0, 0, 0}, 0.0, ballGrid(H, {0, 0, 0}, 1.0, 61, 121));
    double worstGap = 0;
    int pairs = 0, unconverged = 0;
    while (pairs < 20) {
      const Point x = H.samplePoint(rng, 1.0);
      const Point w = H.samplePoint(rng, 1.0);
      if (!df.field.grid.contains(w)) continue;
      const double de = df.value(w);
      if (de < 0.4 || de > 0.95) continue;
      const ShootingResult sh = shootingDistance(H, x, H.group->multiply(x, w));
      if (!sh.converged) ++unconverged;
      worstGap = std::max(worstGap, std::abs(de - sh.distance) / sh.distance);
      ++pairs;
    }
    report(13, "cross-oracle", worstCI <= kCrossCI && worstGap <= kCrossDistance && unconverged == 0,
           cat({fmt("FD vs MC worst %.2f CI over 20 triples", worstCI),
                fmt("eikonal vs shooting worst gap %.4f over 20 pairs", worstGap)}));
  });

  guarded(14, "determinism", [] {
    const auto t0 = Clock::now();
    const SuiteResult a = runSuite(defaultSuite(42));
    const double s1 = since(t0);
    const auto t1 = Clock::now();
    const SuiteResult b = runSuite(defaultSuite(42));
    const double s2 = since(t1);
    const std::string ja = reportDocument(a).dump(), jb = reportDocument(b).dump();
    bool allPass = a.summary.pass == a.reports.size();
    std::string notPassing;
    for (const auto& r : a.reports)
      if (r.verdict != Verdict::Pass || !r.error.empty()) notPassing += " " + r.checkId + "/" + r.model;
    report(14, "determinism", ja == jb && allPass && s1 < kSuiteSeconds && s2 < kSuiteSeconds,
           cat({std::string(ja == jb ? "byte-identical" : "reports differ"),
                fmt("%.0f checks", static_cast<double>(a.reports.size())),
                fmt("%.0f pass", static_cast<double>(a.summary.pass)), fmt("%.1f s", s1), fmt("%.1f s", s2)}) +
               (notPassing.empty() ? "" : ", not passing:" + notPassing));
  });

  std::printf("%d criteria failed, %.0f s total\n", failures, since(start));
  return failures == 0 ? 0 : 1;
}
