#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "srlab/error.hpp"
#include "srlab/gamma.hpp"
#include "srlab/model.hpp"

using namespace srlab;

TEST_CASE("euclidean frames") {
  CHECK_THROWS_AS(euclidean(0), DomainError);
  Model e2 = euclidean(2);
  ScalarField x = variableField(2, 0), y = variableField(2, 1);
  ScalarField f = x * x * y + y * y * y;
  const Point p = {0.5, -1.5};
  const double fx = 2 * 0.5 * -1.5, fy = 0.25 + 3 * 2.25;
  CHECK(gammaForm(e2, f, f, p) == doctest::Approx(fx * fx + fy * fy));
  Model e1 = euclidean(1);
  ScalarField s = sin(variableField(1, 0));
  CHECK(applyL(e1, s, {0.3}) == doctest::Approx(-std::sin(0.3)));
  Model e3 = euclidean(3);
  CHECK(e3.brackets.size() == 3);
  for (const auto& rel : e3.brackets) CHECK(bracketResidual(e3, rel, {0.1, 0.2, 0.3}) == 0.0);
}

TEST_CASE("bundled models satisfy their bracket tables and the rank condition") {
  std::vector<Model> models = {euclidean(3), heisenberg(), sasakian(1.0), sasakian(-1.0), sasakian(2.5),
                               sasakianChart(-1.0), sasakianChart(1.0), sasakianChart(0.0)};
  CarnotSpec free3{3, 3, {}};
  free3.B.assign(3, std::vector<std::vector<double>>(3, std::vector<double>(3, 0.0)));
  // Layer k carries the bracket [X_i, X_j] for (i, j) = (1,2), (1,3), (2,3).
  const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (int k = 0; k < 3; ++k) {
    free3.B[k][pairs[k][0]][pairs[k][1]] = 1.0;
    free3.B[k][pairs[k][1]][pairs[k][0]] = -1.0;
  }
  models.push_back(carnotStep2(free3));
  for (const auto& m : models) {
    CAPTURE(m.name);
    ValidationReport r = validateModel(m, 100, 2024);
    CHECK(r.ok);
    CHECK(r.maxBracketResidual <= 1e-10);
    CHECK(r.minRank == m.dim);
  }
  CHECK(hormanderRank(models.back(), Point(6, 0.0)) == 6);
}

TEST_CASE("heisenberg chart matches the stated frame") {
  Model H = heisenberg();
  CHECK(H.dim == 3);
  CHECK(H.homogeneousDim == 4.0);
  const Point p = {0.7, -0.4, 1.1};
  double F[9];
  H.frameValues(p, F);
  CHECK(F[0] == 1.0);
  CHECK(F[1] == 0.0);
  CHECK(F[2] == doctest::Approx(0.2));
  CHECK(F[3] == 0.0);
  CHECK(F[4] == 1.0);
  CHECK(F[5] == doctest::Approx(0.35));
  CHECK(F[8] == 1.0);
}

TEST_CASE("carnot constructor validation and Heisenberg reproduction") {
  CarnotSpec bad{2, 1, {{{0.0, 1.0}, {1.0, 0.0}}}};
  CHECK_THROWS_AS(carnotStep2(bad), DomainError);
  CarnotSpec degenerate{3, 2, {}};
  degenerate.B.assign(2, std::vector<std::vector<double>>(3, std::vector<double>(3, 0.0)));
  degenerate.B[0][0][1] = 1;
  degenerate.B[0][1][0] = -1;
  degenerate.B[1][0][1] = 2;
  degenerate.B[1][1][0] = -2;
  CHECK_THROWS_AS(carnotStep2(degenerate), DomainError);

  Model C = carnotStep2({2, 1, {{{0.0, 1.0}, {-1.0, 0.0}}}});
  Model H = heisenberg();
  CHECK(C.homogeneousDim == 4.0);
  Rng rng(8, 0);
  for (int k = 0; k < 50; ++k) {
    ScalarField f = polynomialField(randomPolynomial(3, 4, rng));
    const Point p = H.samplePoint(rng, 2.0);
    GammaValues a = gammaValues(C, f, p), b = gammaValues(H, f, p);
    CHECK(a.gamma == b.gamma);
    CHECK(a.Lf == b.Lf);
    CHECK(a.gamma2 == b.gamma2);
    CHECK(a.gamma2Z == b.gamma2Z);
  }
}

TEST_CASE("sasakian(0) is the Heisenberg group") {
  Model S = sasakian(0.0), H = heisenberg();
  CHECK(S.name == "heisenberg");
  Rng rng(21, 0);
  for (int k = 0; k < 50; ++k) {
    ScalarField f = polynomialField(randomPolynomial(3, 4, rng));
    const Point p = H.samplePoint(rng, 2.0);
    CHECK(gamma2Form(S, f, p) == gamma2Form(H, f, p));
    CHECK(applyL(S, f, p) == applyL(H, f, p));
  }
}

TEST_CASE("matrix realizations: brackets via matrix commutators") {
  for (double rho : {1.0, -1.0, 0.3, -2.0}) {
    Model m = sasakian(rho);
    CAPTURE(rho);
    CHECK(m.traits.isCompact == (rho > 0));
    CHECK(m.coordDim == 4);
    Rng rng(4, 0);
    for (int k = 0; k < 100; ++k) {
      const Point g = m.samplePoint(rng, 1.0);
      for (const auto& rel : m.brackets) CHECK(bracketResidual(m, rel, g) <= 1e-12 * (1 + std::abs(rho)) * 4);
    }
  }
  // [Y, Z] = rho1 X with rho1 = -1, componentwise.
  Model m = sasakian(-1.0);
  VectorField yz = lieBracket(m.horizontal[1], m.vertical[0]);
  const Point g = m.group->rightExp(m.group->identity, std::vector<double>{0.3, -0.2, 0.5});
  double F[12];
  m.frameValues(g, F);
  for (int i = 0; i < 4; ++i) CHECK(yz[i].value(g) == doctest::Approx(-F[i]).epsilon(1e-12));
}

TEST_CASE("group operations") {
  for (const auto& m : {heisenberg(), sasakian(1.0), sasakian(-1.0), sasakianChart(-1.0)}) {
    CAPTURE(m.name);
    Rng rng(31, 0);
    const auto& G = *m.group;
    for (int k = 0; k < 20; ++k) {
      const Point a = m.samplePoint(rng, 0.8), b = m.samplePoint(rng, 0.8);
      const Point e = G.multiply(G.inverse(a), a);
      for (std::size_t i = 0; i < e.size(); ++i) CHECK(e[i] == doctest::Approx(G.identity[i]).scale(1.0));
      // Left invariance of the frame: X(a*b) = dL_a X(b), checked along curves.
      const double t = 1e-6;
      std::vector<double> c(m.frameSize(), 0.0);
      c[0] = t;
      const Point ab = G.multiply(a, b);
      const Point moved = G.rightExp(ab, c);
      std::vector<double> F(m.frameSize() * m.coordDim);
      m.frameValues(ab, F.data());
      for (int i = 0; i < m.coordDim; ++i)
        CHECK((moved[i] - ab[i]) / t == doctest::Approx(F[i]).epsilon(1e-5).scale(1.0));
    }
  }
}

TEST_CASE("exponential chart series") {
  // beta(mu) = (chi(mu) - 1)/mu with chi = (r/2) coth(r/2), r = sqrt(mu).
  for (double mu : {-30.0, -5.0, -1.0, 0.0, 0.5, 3.9, 4.1, 25.0}) {
    CAPTURE(mu);
    auto beta = chartBetaDerivatives(mu, 2);
    double ref;
    if (mu == 0.0) ref = 1.0 / 12.0;
    else if (mu > 0) {
      const double h = std::sqrt(mu) / 2;
      ref = (h / std::tanh(h) - 1.0) / mu;
    } else {
      const double h = std::sqrt(-mu) / 2;
      ref = (h / std::tan(h) - 1.0) / mu;
    }
    CHECK(beta[0] == doctest::Approx(ref).epsilon(1e-12));
    auto bp = chartBetaDerivatives(mu + 1e-5, 0), bm = chartBetaDerivatives(mu - 1e-5, 0);
    CHECK(beta[1] == doctest::Approx((bp[0] - bm[0]) / 2e-5).epsilon(1e-6));
    auto s = chartSincDerivatives(mu, 0);
    double sref = 1.0;
    if (mu > 0) sref = std::sinh(std::sqrt(mu) / 2) / (std::sqrt(mu) / 2);
    if (mu < 0) sref = std::sin(std::sqrt(-mu) / 2) / (std::sqrt(-mu) / 2);
    CHECK(s[0] == doctest::Approx(sref).epsilon(1e-12));
  }
  Model chart = sasakianChart(-1.0);
  CHECK(chart.density.value({0, 0, 0}) == doctest::Approx(1.0));
}

TEST_CASE("[L, Z] = 0 on the Sasakian family") {
  for (const auto& m : {heisenberg(), sasakian(1.0), sasakian(-1.0)}) {
    Rng rng(41, 0);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      ScalarField f = polynomialField(randomPolynomial(m.coordDim, 4, rng));
      worst = std::max(worst, checkLZCommutator(m, f, m.samplePoint(rng, 2.0)));
    }
    CAPTURE(m.name);
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("model JSON and references") {
  using nlohmann::json;
  CHECK(modelFromJson(json{{"type", "heisenberg"}}).name == "heisenberg");
  CHECK(modelFromJson(json{{"type", "euclidean"}, {"n", 3}}).dim == 3);
  CHECK(modelFromJson(json{{"type", "sasakian"}, {"rho1", -1.0}, {"chart", true}}).traits.hasGlobalChart);
  json carnot = {{"type", "carnot2"}, {"d", 2}, {"h", 1}, {"entries", {{1, 1, 2, 1.0}, {1, 2, 1, -1.0}}}};
  CHECK(modelFromJson(carnot).homogeneousDim == 4.0);
  json skew = {{"type", "carnot2"}, {"d", 2}, {"h", 1}, {"entries", {{1, 1, 2, 1.0}, {1, 2, 1, 1.0}}}};
  CHECK_THROWS_AS(modelFromJson(skew), ConfigError);
  json custom = {{"type", "custom"},
                 {"variables", {"x", "y", "z"}},
                 {"horizontal", {{"1", "0", "-y/2"}, {"0", "1", "x/2"}}},
                 {"vertical", {{"0", "0", "1"}}},
                 {"brackets", {{{"a", 0}, {"b", 1}, {"coeffs", {0, 0, 1}}}}}};
  Model cm = modelFromJson(custom);
  CHECK(validateModel(cm, 20, 1).ok);
  ScalarField f = polynomialField(Polynomial(3, {{1.0, {1, 1, 1}}, {0.5, {0, 2, 1}}}));
  CHECK(gamma2Form(cm, f, {0.3, 0.2, 0.1}) == doctest::Approx(gamma2Form(heisenberg(), f, {0.3, 0.2, 0.1})));
  CHECK(modelFromRef("sasakian(-1)").rho1 == -1.0);
  CHECK(modelFromRef("euclidean(2)").dim == 2);
  CHECK_THROWS_AS(modelFromRef("nonsense-model"), ConfigError);
  CHECK_THROWS_AS(modelFromJson(json{{"type", "torus"}}), ConfigError);
}
