#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "srlab/error.hpp"
#include "srlab/heat.hpp"
#include "srlab/parallel.hpp"

using namespace srlab;

namespace {

constexpr double kPi = std::numbers::pi;

// (4 pi t)^{-n/2} exp(-|x|^2 / 4t) as a field.
ScalarField gaussianKernel(int n, double t) {
  ScalarField r2 = constantField(n, 0.0);
  for (int i = 0; i < n; ++i) r2 = r2 + variableField(n, i) * variableField(n, i);
  return std::pow(4.0 * kPi * t, -n / 2.0) * exp((-1.0 / (4.0 * t)) * r2);
}

double euclideanDist(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

GridSpec heisenbergBox(double h) { return GridSpec::withSpacing({-5, -5, -4}, {5, 5, 4}, {h, h, 2 * h}); }

}  // namespace

TEST_CASE("euclidean(1) narrow Gaussian follows the exact kernel") {
  Model E1 = euclidean(1);
  const double t0 = 0.05, T = 0.5;
  GridSpec g({-8.0}, {8.0}, {1025});
  CHECK(g.spacing(0) == doctest::Approx(1.0 / 64));
  HeatSolution sol = solveHeat(E1, GridField::sample(g, gaussianKernel(1, t0)), T);
  const GridField& u = sol.at(T);
  ScalarField exact = gaussianKernel(1, t0 + T);
  double err = 0.0, peak = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double e = exact.value(g.node(j));
    err = std::max(err, std::abs(u[j] - e));
    peak = std::max(peak, e);
  }
  CHECK(err / peak < 0.01);
  CHECK(sol.snapshots.front().time == 0.0);
  CHECK(sol.minValue >= -1e-12);
}

TEST_CASE("P_t 1 = 1 away from the boundary") {
  Model E2 = euclidean(2);
  GridSpec g = GridSpec::withSpacing({-6, -6}, {6, 6}, {0.1, 0.1});
  HeatSolution sol = solveHeat(E2, GridField(g, 1.0), 0.5);
  const GridField& u = sol.at(0.5);
  for (double x : {-2.0, -0.5, 0.0, 1.3, 2.0})
    for (double y : {-2.0, 0.0, 1.7}) CHECK(u.interpolate({x, y}) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(u.maxValue() <= 1.0 + 1e-12);
}

TEST_CASE("heisenberg bump: mass conservation and sign") {
  Model H = heisenberg();
  GridSpec g = heisenbergBox(0.25);
  HeatConfig cfg;
  cfg.times = {0.125};
  HeatSolution sol = solveHeat(H, GridField::sample(g, bumpField({0, 0, 0}, {1, 1, 1})), 0.25, cfg);
  REQUIRE(sol.snapshots.size() == 3);
  const double m0 = sol.snapshots[0].integrate();
  for (const auto& s : sol.snapshots) CHECK(std::abs(s.integrate() - m0) <= 0.005 * m0);
  CHECK(sol.minValue > -1e-3 * sol.snapshots[0].maxValue());
  for (std::size_t k = 1; k < sol.supNorm.size(); ++k) CHECK(sol.supNorm[k] <= sol.supNorm[k - 1] * (1 + 1e-3));
}

TEST_CASE("comparison and contraction (euclidean)") {
  Model E2 = euclidean(2);
  GridSpec g = GridSpec::withSpacing({-4, -4}, {4, 4}, {0.125, 0.125});
  ScalarField f = bumpField({0.5, 0}, {1.5, 1});
  ScalarField gf = f + 0.5 * bumpField({-0.5, 0.3}, {1, 2});
  HeatConfig cfg;
  cfg.times = {0.1, 0.2};
  HeatSolution a = solveHeat(E2, GridField::sample(g, f), 0.4, cfg);
  HeatSolution b = solveHeat(E2, GridField::sample(g, gf), 0.4, cfg);
  REQUIRE(a.snapshots.size() == b.snapshots.size());
  const double sup0 = a.snapshots[0].maxValue();
  for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
    double worst = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j)
      worst = std::min(worst, b.snapshots[k][j] - a.snapshots[k][j]);
    CHECK(worst >= -1e-10);
    CHECK(a.snapshots[k].maxValue() <= sup0 + 1e-10);
    CHECK(a.snapshots[k].minValue() >= -1e-10);
  }
}

TEST_CASE("solver configuration errors") {
  Model E1 = euclidean(1);
  GridField f(GridSpec({-1.0}, {1.0}, {21}), 1.0);
  HeatConfig cfg;
  cfg.cfl = 0.3;
  CHECK_THROWS_AS(solveHeat(E1, f, 0.1, cfg), ConfigError);
  cfg.cfl = 0.0;
  CHECK_THROWS_AS(solveHeat(E1, f, 0.1, cfg), ConfigError);
  cfg.cfl = 0.25;
  cfg.times = {0.5};
  CHECK_THROWS_AS(solveHeat(E1, f, 0.1, cfg), ConfigError);
  HeatSolution sol = solveHeat(E1, f, 0.1);
  CHECK_THROWS_AS(sol.at(0.05), DomainError);
  CHECK_THROWS_AS(GridOperator(euclidean(2), GridSpec({-1.0}, {1.0}, {5})), DomainError);
  HeatConfig back = HeatConfig::fromJson(HeatConfig{0.2, {0.1, 0.3}}.toJson());
  CHECK(back.cfl == 0.2);
  CHECK(back.times.size() == 2);
}

TEST_CASE("bump field") {
  ScalarField b = bumpField({1, 0}, {1, 2});
  CHECK(b.value({1, 0}) == doctest::Approx(1.0));
  CHECK(b.value({2.01, 0}) == 0.0);
  CHECK(b.value({1, 2.5}) == 0.0);
  const Point p{1.3, 0.4};
  const double h = 1e-5;
  TaylorJet j = evalJet(b, p, 1);
  const double dx = (b.value({1.3 + h, 0.4}) - b.value({1.3 - h, 0.4})) / (2 * h);
  const double dy = (b.value({1.3, 0.4 + h}) - b.value({1.3, 0.4 - h})) / (2 * h);
  CHECK(j.partial({1, 0}) == doctest::Approx(dx).epsilon(1e-7));
  CHECK(j.partial({0, 1}) == doctest::Approx(dy).epsilon(1e-7));
}

TEST_CASE("Monte Carlo moments") {
  Model E2 = euclidean(2);
  SampleSet s = samplePaths(E2, {0, 0}, 1.0, 100000, 1.0 / 400, 11);
  CHECK(s.endpoints.size() == 100000);
  for (int i = 0; i < 2; ++i) {
    CI v = estimateSemigroup(s, PointFn([i](const Point& x) { return x[i] * x[i]; }));
    CHECK(std::abs(v.mean - 2.0) <= 3 * v.halfWidth);
  }

  Model E1 = euclidean(1);
  SampleSet s1 = samplePaths(E1, {0.7}, 0.3, 40000, 0.3 / 400, 5);
  CI m2 = estimateSemigroup(s1, variableField(1, 0) * variableField(1, 0));
  CHECK(std::abs(m2.mean - (0.49 + 0.6)) <= 3 * m2.halfWidth);

  CI c = estimateSemigroup(s1, constantField(1, 2.5));
  CHECK(c.mean == doctest::Approx(2.5));
  CHECK(c.halfWidth == 0.0);

  Model H = heisenberg();
  SampleSet sh = samplePaths(H, {0, 0, 0}, 1.0, 40000, 1.0 / 400, 3);
  CHECK(sh.stepperId == "group-exp");
  CI z = estimateSemigroup(sh, variableField(3, 2));
  CHECK(std::abs(z.mean) <= 3 * z.halfWidth);
  CHECK(sh.flagged == 0);

  CHECK_THROWS_AS(samplePaths(H, {0, 0, 0}, 0.1, 10, 0.2, 1), ConfigError);
  CHECK_THROWS_AS(samplePaths(H, {0, 0, 0}, 0.1, 0, 0.01, 1), ConfigError);
}

TEST_CASE("models without group structure use the Heun stepper") {
  Model C = heisenberg();
  C.group.reset();
  SampleSet s = samplePaths(C, {0, 0, 0}, 0.5, 20000, 0.5 / 200, 9);
  CHECK(s.stepperId == "stratonovich-heun");
  CHECK(s.endpoints.size() == 20000);
  CI x2 = estimateSemigroup(s, variableField(3, 0) * variableField(3, 0));
  CHECK(std::abs(x2.mean - 1.0) <= 3 * x2.halfWidth);
  CI z = estimateSemigroup(s, variableField(3, 2));
  CHECK(std::abs(z.mean) <= 3 * z.halfWidth);
}

TEST_CASE("sampling does not depend on the thread count") {
  Model H = heisenberg();
  setThreadCount(1);
  SampleSet a = samplePaths(H, {0.1, 0, 0}, 0.5, 3000, 0.5 / 50, 77);
  setThreadCount(3);
  SampleSet b = samplePaths(H, {0.1, 0, 0}, 0.5, 3000, 0.5 / 50, 77);
  setThreadCount(0);
  REQUIRE(a.endpoints.size() == b.endpoints.size());
  bool same = true;
  for (std::size_t k = 0; k < a.endpoints.size(); ++k) same = same && a.endpoints[k] == b.endpoints[k];
  CHECK(same);
  SampleSet c = samplePaths(H, {0.1, 0, 0}, 0.5, 3000, 0.5 / 50, 78);
  CHECK(c.endpoints[0] != a.endpoints[0]);
}

TEST_CASE("finite differences agree with Monte Carlo on the heisenberg group") {
  Model H = heisenberg();
  ScalarField b = bumpField({0, 0, 0}, {1.5, 1.5, 1.5});
  HeatConfig cfg;
  cfg.times = {0.25};
  HeatSolution coarse = solveHeat(H, GridField::sample(heisenbergBox(0.25), b), 0.5, cfg);
  HeatSolution fine = solveHeat(H, GridField::sample(heisenbergBox(0.125), b), 0.5, cfg);
  auto sets = samplePathsAt(H, {0, 0, 0}, {0.25, 0.5}, 40000, 1.0 / 400, 21);
  const Point xs[] = {{0, 0, 0}, {0.5, -0.25, 0.5}, {1, 0.5, -0.5}};
  for (int k = 0; k < 2; ++k)
    for (const Point& x : xs) {
      const double t = k == 0 ? 0.25 : 0.5;
      CI mc = estimateTranslated(H, sets[k], x, [&](const Point& p) { return b.value(p); });
      const double fd = (4 * fine.at(t).interpolate(x) - coarse.at(t).interpolate(x)) / 3;
      CHECK(std::abs(fd - mc.mean) <= 3 * mc.halfWidth);
    }
}

TEST_CASE("Li-Yau: Gaussian equality and constant data") {
  CDParams flat{0.0, 1.0, 0.0, 1.0};
  for (int n = 1; n <= 3; ++n) {
    flat.d = n;
    for (double t : {0.1, 0.7, 2.0}) {
      ScalarField u = gaussianKernel(n, t);
      Point x(n, 0.0);
      for (int i = 0; i < n; ++i) x[i] = 0.3 * (i + 1) - 0.2;
      LiYauValue v = liYauDeficitAnalytic(euclidean(n), u, flat, x, t);
      CHECK(std::abs(v.deficit) <= 1e-10);
      CHECK(v.lhs - v.rhs + n / (2 * t) == doctest::Approx(n / (2 * t)));
    }
  }
  CDParams hp{0.0, 0.5, 1.0, 2.0};
  for (double t : {0.1, 0.5, 1.0}) {
    LiYauValue v = liYauDeficitAnalytic(heisenberg(), constantField(3, 0.4), hp, {0.2, 0.1, -0.3}, t);
    CHECK(v.lhs == 0.0);
    CHECK(v.deficit == doctest::Approx(16.0 / t));
    CHECK(v.deficitZero == doctest::Approx(16.0 / t));
  }
  CHECK_THROWS_AS(liYauDeficitAnalytic(heisenberg(), constantField(3, -1.0), hp, {0, 0, 0}, 1.0), DomainError);
}

TEST_CASE("Li-Yau on the grid solution, constant data") {
  Model E1 = euclidean(1);
  GridSpec g({-3.0}, {3.0}, {61});
  HeatSolution sol = solveHeat(E1, GridField(g, 1.0), 0.1);
  GridOperator op(E1, g);
  CDParams p{0.0, 1.0, 0.0, 1.0};
  LiYauValue v = liYauDeficit(op, sol, p, {0.0}, 0.1);
  CHECK(v.lhs == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(v.deficit == doctest::Approx(1.0 / (2 * 0.1)).epsilon(1e-6));
  CHECK_THROWS_AS(liYauDeficit(op, sol, p, {3.0}, 0.1), DomainError);
}

TEST_CASE("Harnack factor and trivial deficits") {
  CDParams hp{0.0, 0.5, 1.0, 2.0};
  CHECK(harnackFactor(hp, 0.25, 0.5, 0.0) == doctest::Approx(16.0));
  CHECK(harnackFactor(hp, 0.25, 0.5, 0.5) == doctest::Approx(16.0 * std::exp(0.25 / 0.25)));
  CI one{1.0, 0.0};
  HarnackValue v = harnackDeficit(one, one, 0.3, 0.6, hp, 0.0);
  CHECK(v.deficit == doctest::Approx(std::pow(2.0, 4) - 1));
  CHECK(v.halfWidth == 0.0);
  HarnackValue near = harnackDeficit(one, one, 0.5, 0.5 + 1e-9, hp, 0.0);
  CHECK(std::abs(near.deficit) < 1e-6);
  CHECK_THROWS_AS(harnackFactor(hp, 0.5, 0.5, 0.0), DomainError);
  CHECK_THROWS_AS(harnackFactor(hp, 0.6, 0.5, 0.0), DomainError);
}

TEST_CASE("ball hitting") {
  Model E2 = euclidean(2);
  BallHittingScan scan = ballHittingScan(E2, {0, 0}, 1.0, {0.1, 0.01, 0.3}, 60000, 1e-3, 4, euclideanDist);
  REQUIRE(scan.A.size() == 3);
  CHECK(scan.A[0] == 0.01);
  const double exact = 1.0 - std::exp(-2.5);
  CHECK(exact == doctest::Approx(0.917915).epsilon(1e-6));
  CHECK(std::abs(scan.probability[1].mean - exact) <= 3 * scan.probability[1].halfWidth);
  CHECK(scan.probability[0].mean > 0.999);
  CHECK(scan.bestA == 0.3);
  CHECK_THROWS_AS(ballHittingScan(E2, {0, 0}, 1.0, {1.5}, 10, 0.1, 4, euclideanDist), ConfigError);
}

TEST_CASE("Poincare ratio") {
  Model E1 = euclidean(1);
  GridSpec g({-2.0}, {2.0}, {4001});
  GridField dist = GridField::sample(g, sqrt(variableField(1, 0) * variableField(1, 0) + 1e-300));
  PoincareValue v = poincareRatio(E1, variableField(1, 0), dist, 1.0);
  REQUIRE(v.defined);
  CHECK(v.ratio == doctest::Approx(1.0 / 3).epsilon(0.02));
  PoincareValue c = poincareRatio(E1, constantField(1, 3.0), dist, 1.0);
  CHECK_FALSE(c.defined);
  CHECK_THROWS_AS(poincareRatio(E1, variableField(1, 0), dist, 2.5), DomainError);
}

TEST_CASE("parabolic Harnack cylinders") {
  Model E1 = euclidean(1);
  GridSpec g({-6.0}, {6.0}, {241});
  HeatConfig cfg;
  for (int k = 1; k <= 20; ++k) cfg.times.push_back(0.05 * k);
  HeatSolution sol = solveHeat(E1, GridField::sample(g, bumpField({0}, {1})), 1.0, cfg);
  GridField dist = GridField::sample(g, sqrt(variableField(1, 0) * variableField(1, 0) + 1e-300));
  CylinderParams c;
  ParabolicHarnackValue v = parabolicHarnack(sol, dist, 0.0, 1.0, c);
  CHECK(v.samplesMinus > 0);
  CHECK(v.samplesPlus > 0);
  CHECK(v.ratio > 0);
  CHECK(std::isfinite(v.ratio));
  CylinderParams bad;
  bad.gamma = 0.1;
  CHECK_THROWS_AS(parabolicHarnack(sol, dist, 0.0, 1.0, bad), ConfigError);
  CylinderParams back = CylinderParams::fromJson(c.toJson());
  CHECK(back.delta == c.delta);
}
