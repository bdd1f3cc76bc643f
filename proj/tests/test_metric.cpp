#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "srlab/error.hpp"
#include "srlab/metric.hpp"

using namespace srlab;

namespace {

constexpr double kPi = std::numbers::pi;

double horizontalNorm(const Point& p) { return std::hypot(p[0], p[1]); }

// Left-invariant Heisenberg distance read from a field centered at 0.
double pairDistance(const Model& H, const DistanceField& df, const Point& x, const Point& y) {
  return df.value(H.group->multiply(H.group->inverse(x), y));
}

}  // namespace

TEST_CASE("euclidean(2) eikonal reproduces |x - x0| within 2h") {
  Model E = euclidean(2);
  GridSpec g({-1, -1}, {1, 1}, {41, 41});
  const double h = g.spacing(0);
  DistanceField df = distanceField(E, {0.2, -0.1}, 0.0, g);
  double err = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const Point p = g.node(j);
    err = std::max(err, std::abs(df.field[j] - std::hypot(p[0] - 0.2, p[1] + 0.1)));
  }
  CHECK(err < 2 * h);
  CHECK(df.lastChange < 1e-8);
  CHECK(df.sweeps >= 4);
}

TEST_CASE("lax-friedrichs scheme is selectable and converges to an upper approximation") {
  Model E = euclidean(2);
  GridSpec g({-1, -1}, {1, 1}, {41, 41});
  EikonalConfig cfg;
  cfg.scheme = "lax-friedrichs";
  DistanceField df = distanceField(E, {0, 0}, 0.0, g, cfg);
  const double h = g.spacing(0);
  for (const Point& p : std::vector<Point>{{0.5, 0.0}, {0.3, 0.4}, {-0.6, 0.2}}) {
    const double exact = std::hypot(p[0], p[1]);
    CHECK(df.value(p) > exact - h);
    CHECK(df.value(p) < exact + 5 * h);
  }
}

TEST_CASE("heisenberg distance: horizontal axis and the sandwich bounds") {
  Model H = heisenberg();
  GridSpec g = ballGrid(H, {0, 0, 0}, 1.0, 25, 49);
  const double h = g.spacing(0);
  DistanceField df = distanceField(H, {0, 0, 0}, 0.0, g);
  for (double a : {0.25, 0.5, 0.75, 1.0}) CHECK(df.value({a, 0, 0}) == doctest::Approx(a).epsilon(0.02));
  // |x_H| <= d(0, x) <= |x_H| + 2 sqrt(pi |z|)
  std::size_t checked = 0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (g.isBoundary(j)) continue;
    const Point p = g.node(j);
    const double r = horizontalNorm(p), u = df.field[j];
    if (r + 2 * std::sqrt(kPi * std::abs(p[2])) > 1.0) continue;
    CHECK(u >= r - 1e-9);
    CHECK(u <= (r + 2 * std::sqrt(kPi * std::abs(p[2]))) * 1.04 + h);
    ++checked;
  }
  CHECK(checked > 500);
}

TEST_CASE("d_tau is nonincreasing in tau with zero slack") {
  Model H = heisenberg();
  GridSpec g({-1.2, -1.2, -1.2}, {1.2, 1.2, 1.2}, {17, 17, 17});
  auto fam = distanceFamily(H, {0, 0, 0}, {1.0, 0.0, 0.5}, g);
  REQUIRE(fam.size() == 3);
  CHECK(fam[0].tau == 0.0);
  CHECK(fam[2].tau == 1.0);
  std::size_t strict = 0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    CHECK(fam[1].field[j] <= fam[0].field[j]);
    CHECK(fam[2].field[j] <= fam[1].field[j]);
    if (fam[2].field[j] < fam[0].field[j] - 0.05) ++strict;
  }
  // The vertical direction is much cheaper once tau > 0.
  CHECK(fam[2].value({0, 0, 1.0}) < 0.5 * fam[0].value({0, 0, 1.0}));
  CHECK(strict > 100);
}

TEST_CASE("heisenberg distance: symmetry, triangle inequality, horizontal Lipschitz bound") {
  Model H = heisenberg();
  GridSpec g = ballGrid(H, {0, 0, 0}, 1.6, 25, 49);
  const double h = g.spacing(0);
  DistanceField df = distanceField(H, {0, 0, 0}, 0.0, g);
  const std::vector<Point> pts{{0.2, 0.1, 0.05}, {-0.3, 0.2, -0.04}, {0.1, -0.35, 0.02}, {0.0, 0.0, 0.06}};
  for (const Point& x : pts)
    for (const Point& y : pts) {
      const double dxy = pairDistance(H, df, x, y), dyx = pairDistance(H, df, y, x);
      CHECK(std::abs(dxy - dyx) <= 2 * h);
      for (const Point& z : pts) CHECK(dxy <= pairDistance(H, df, x, z) + pairDistance(H, df, z, y) + 2 * h);
    }
  // Moving along X or Y for time s changes d by at most s.
  const double s = 0.1;
  for (const Point& x : pts)
    for (int i = 0; i < 2; ++i) {
      std::vector<double> c(3, 0.0);
      c[i] = s;
      const Point y = H.group->rightExp(x, c);
      CHECK(std::abs(df.value(y) - df.value(x)) <= s + h);
      CHECK(pairDistance(H, df, x, y) == doctest::Approx(s).epsilon(0.05));
    }
}

TEST_CASE("euclidean(2) unit disk area") {
  Model E = euclidean(2);
  DistanceField df = distanceField(E, {0, 0}, 0.0, ballGrid(E, {0, 0}, 1.0, 81));
  std::size_t cells = 0;
  CHECK(ballVolume(df, E.density, 1.0, &cells) == doctest::Approx(kPi).epsilon(0.02));
  CHECK(cells > 2500);
  BallVolumeTable t = ballVolumes(df, E.density, {0.25, 0.5, 0.75, 1.0});
  for (std::size_t k = 1; k < t.volumes.size(); ++k) CHECK(t.volumes[k] > t.volumes[k - 1]);
  CHECK(t.toJson()["volumes"].size() == 4);
  CHECK_THROWS_AS(ballVolume(df, E.density, 1.5), DomainError);
}

TEST_CASE("doubling ratios: heisenberg 2^4, euclidean(3) 2^3") {
  Model H = heisenberg();
  for (double r : {0.25, 0.5, 1.0}) {
    DoublingValue v = doublingRatio(H, {0, 0, 0}, r, 17);
    CHECK(v.ratio == doctest::Approx(16.0).epsilon(0.05));
    CHECK(v.large > v.small);
  }
  DoublingValue e = doublingRatio(euclidean(3), {0, 0, 0}, 0.5, 17);
  CHECK(e.ratio == doctest::Approx(8.0).epsilon(0.05));
  CHECK_THROWS_AS(doublingRatio(H, {0, 0, 0}, 0.5, 7), DomainError);
}

TEST_CASE("exp-doubling slope: zero on heisenberg, positive for rho1 < 0") {
  const std::vector<double> radii{0.25, 0.5, 0.75, 1.0};
  ExpDoublingFit flat = expDoublingFit(heisenberg(), {0, 0, 0}, radii, 17);
  CHECK(std::abs(flat.C2) <= 0.05);
  ExpDoublingFit neg = expDoublingFit(sasakianChart(-1.0), {0, 0, 0}, radii, 17);
  CHECK(neg.C2 > 0.0);
  CHECK(neg.C1 == doctest::Approx(16.0).epsilon(0.1));
  CHECK(neg.toJson()["ratios"].size() == 4);
  CHECK_THROWS_AS(expDoublingFit(heisenberg(), {0, 0, 0}, {0.5}, 17), ConfigError);
}

TEST_CASE("geodesic shooting: euclidean lines, heisenberg p_z = 0, energy drift") {
  Geodesic line = geodesicShoot(euclidean(2), {0, 0}, {0.6, 0.8}, 2.0);
  CHECK(line.endpoint[0] == doctest::Approx(1.2).epsilon(1e-10));
  CHECK(line.endpoint[1] == doctest::Approx(1.6).epsilon(1e-10));
  CHECK(line.length == doctest::Approx(2.0).epsilon(1e-12));
  Model H = heisenberg();
  // p_z = 0: a straight line in (x, y) and, by the area rule,
  // z = z0 + (x0 (y - y0) - y0 (x - x0)) / 2.
  const Point x0{0.2, 0.4, 0.1};
  Geodesic g = geodesicShoot(H, x0, {0.6, 0.7, 0.0}, 1.5);
  const double dx = g.endpoint[0] - x0[0], dy = g.endpoint[1] - x0[1];
  CHECK(dx == doctest::Approx(1.5 * 0.6).epsilon(1e-10));
  CHECK(dy == doctest::Approx(1.5 * 0.7).epsilon(1e-10));
  CHECK(g.endpoint[2] == doctest::Approx(x0[2] + 0.5 * (x0[0] * dy - x0[1] * dx)).epsilon(1e-9));
  CHECK(g.energyDrift < 1e-10);
  Geodesic flat = geodesicShootFrame(H, {0, 0, 0}, {1, 0, 0}, 1.5);
  CHECK(flat.endpoint[0] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(std::abs(flat.endpoint[2]) < 1e-12);
  Geodesic longRun = geodesicShootFrame(H, {0, 0, 0}, {1, 0.5, 3}, 10.0);
  CHECK(longRun.energyDrift <= 1e-8);
  Geodesic coords = geodesicShoot(H, {0.3, -0.2, 0.1}, {1, 0.5, 3}, 10.0);
  CHECK(coords.energyDrift <= 1e-8);
  CHECK_THROWS_AS(geodesicShoot(H, {0, 0}, {1, 0, 0}, 1.0), ConfigError);
}

TEST_CASE("shooting distance on heisenberg and left invariance") {
  Model H = heisenberg();
  ShootingResult a = shootingDistance(H, {0, 0, 0}, {1, 0, 0});
  REQUIRE(a.converged);
  CHECK(a.distance == doctest::Approx(1.0).epsilon(1e-8));
  ShootingResult v = shootingDistance(H, {0, 0, 0}, {0, 0, 1});
  REQUIRE(v.converged);
  CHECK(v.distance == doctest::Approx(2 * std::sqrt(kPi)).epsilon(1e-8));
  const Point x{0.5, -0.3, 0.2}, y{-0.2, 0.4, 0.6};
  ShootingResult p = shootingDistance(H, x, y);
  ShootingResult q = shootingDistance(H, {0, 0, 0}, H.group->multiply(H.group->inverse(x), y));
  REQUIRE(p.converged);
  CHECK(p.distance == doctest::Approx(q.distance).epsilon(1e-9));
  CHECK(shootingDistance(H, x, x).distance == 0.0);
}

TEST_CASE("eikonal and shooting agree within 2% on heisenberg") {
  Model H = heisenberg();
  DistanceField near = distanceField(H, {0, 0, 0}, 0.0, ballGrid(H, {0, 0, 0}, 1.2, 25, 49));
  CrossValidation cx = crossValidateDistance(H, near, {1, 0, 0});
  CHECK(cx.shootingConverged);
  CHECK(cx.gap <= 0.02);
  DistanceField far = distanceField(H, {0, 0, 0}, 0.0, ballGrid(H, {0, 0, 0}, 4.0, 33));
  CrossValidation cz = crossValidateDistance(H, far, {0, 0, 1});
  CHECK(cz.shooting == doctest::Approx(2 * std::sqrt(kPi)).epsilon(1e-8));
  CHECK(cz.gap <= 0.02);
}

TEST_CASE("sasakian(1) diameter: below the Bonnet-Myers bound and stable") {
  Model S = sasakian(1.0);
  DiameterEstimate small = diameterEstimate(S, 10, 3);
  DiameterEstimate large = diameterEstimate(S, 20, 3);
  CHECK(small.unresolved == 0);
  CHECK(large.estimate <= 53.32);
  CHECK(large.estimate == doctest::Approx(small.estimate).epsilon(0.05));
  // -e is reached by a horizontal line of length 2 pi.
  CHECK(large.estimate >= 2 * kPi - 1e-6);
  CHECK_THROWS_AS(diameterEstimate(heisenberg(), 5, 1), DomainError);
}

TEST_CASE("distance comparison on heisenberg") {
  Model H = heisenberg();
  GridSpec g({-2.2, -2.2, -3.2}, {2.2, 2.2, 3.2}, {15, 15, 15});
  DistanceComparison a = distanceComparisonCheck(H, 1.0, 50, 11, g);
  DistanceComparison b = distanceComparisonCheck(H, 1.0, 100, 11, g);
  CHECK(a.monotone);
  CHECK(std::isfinite(a.Chat));
  CHECK(a.Chat >= 1.0);
  CHECK(b.Chat == doctest::Approx(a.Chat).epsilon(0.1));
  CHECK(a.pairs + a.skipped == 50);
  CHECK_THROWS_AS(distanceComparisonCheck(H, 0.0, 10, 1, g), ConfigError);
  CHECK_THROWS_AS(distanceComparisonCheck(H, 1.0, 10, 1, g, 3.0), DomainError);
}

TEST_CASE("eikonal configuration and domain errors") {
  EikonalConfig c;
  c.directions = 40;
  c.stepMults = {1.0, 3.0};
  EikonalConfig back = EikonalConfig::fromJson(c.toJson());
  CHECK(back.directions == 40);
  CHECK(back.stepMults == std::vector<double>{1.0, 3.0});
  CHECK_THROWS_AS(EikonalConfig::fromJson({{"scheme", "semi-lagrangian"}, {"tol", -1.0}}), ConfigError);
  CHECK_THROWS_AS(EikonalConfig::fromJson({{"stepMults", std::vector<double>{}}}), ConfigError);
  CHECK_THROWS_AS(EikonalConfig::fromJson({{"sourceScale", 1.5}}), ConfigError);
  Model H = heisenberg();
  GridSpec g({-1, -1, -1}, {1, 1, 1}, {9, 9, 9});
  EikonalConfig bad;
  bad.scheme = "fast-marching";
  CHECK_THROWS_AS(distanceField(H, {0, 0, 0}, 0.0, g, bad), ConfigError);
  CHECK_THROWS_AS(distanceField(H, {3, 0, 0}, 0.0, g), DomainError);
  CHECK_THROWS_AS(distanceField(H, {0, 0}, 0.0, g), ConfigError);
  CHECK_THROWS_AS(distanceField(sasakian(1.0), {1, 0, 0, 0}, 0.0, GridSpec({-1, -1, -1, -1}, {1, 1, 1, 1}, {5, 5, 5, 5})),
                  DomainError);
  CHECK_THROWS_AS(ballGrid(sasakian(1.0), {1, 0, 0, 0}, 1.0, 9), DomainError);
  CHECK_THROWS_AS(ballGrid(H, {0, 0, 0}, 1.0, 8), ConfigError);
  CHECK_THROWS_AS(ballGrid(H, {0, 0, 0}, -1.0, 9), ConfigError);
  EikonalConfig tight;
  tight.maxSweeps = 2;
  CHECK_THROWS_AS(distanceField(H, {0, 0, 0}, 0.0, g, tight), ConvergenceError);
}
