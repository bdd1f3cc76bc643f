#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "srlab/error.hpp"
#include "srlab/field.hpp"
#include "srlab/model.hpp"
#include "srlab/testfn.hpp"

using namespace srlab;

namespace {

Point randomPoint(Rng& rng, int n, double box) {
  Point p(n);
  for (auto& v : p) v = rng.uniform(-box, box);
  return p;
}

// Symbolic oracle helpers for the Heisenberg chart: X = dx - y/2 dz, Y = dy + x/2 dz.
double heisX(const TaylorJet& f, const Point& p) {
  return f.partial({1, 0, 0}) - 0.5 * p[1] * f.partial({0, 0, 1});
}

}  // namespace

TEST_CASE("evalJet: constants, products, sine series") {
  ScalarField seven = constantField(3, 7.0);
  TaylorJet j = evalJet(seven, {0.3, -1.0, 2.0}, 3);
  CHECK(j.value() == 7.0);
  for (std::size_t i = 1; i < j.coeffs().size(); ++i) CHECK(j.coeff(i) == 0.0);

  ScalarField x = variableField(2, 0), y = variableField(2, 1);
  TaylorJet xy = evalJet(x * y, {1.0, 2.0}, 2);
  CHECK(xy.value() == 2.0);
  CHECK(xy.partial({1, 0}) == 2.0);
  CHECK(xy.partial({0, 1}) == 1.0);
  CHECK(xy.partial({1, 1}) == 1.0);
  CHECK(xy.partial({2, 0}) == 0.0);
  CHECK(xy.partial({0, 2}) == 0.0);

  TaylorJet s = evalJet(sin(variableField(1, 0)), {0.0}, 3);
  CHECK(s.coeff(std::size_t{0}) == doctest::Approx(0.0));
  CHECK(s.coeff(std::size_t{1}) == doctest::Approx(1.0));
  CHECK(s.coeff(std::size_t{2}) == doctest::Approx(0.0));
  CHECK(s.coeff(std::size_t{3}) == doctest::Approx(-1.0 / 6.0));
}

TEST_CASE("jet primitives match closed forms") {
  const double a = 0.7;
  TaylorJet t = TaylorJet::variable(1, 4, 0, a);
  TaylorJet e = exp(t), l = log(t), r = sqrt(t), p = pow(t, 2.5), q = reciprocal(t);
  for (int m = 0; m <= 4; ++m) {
    double fall = 1.0, fallHalf = 1.0, fallRecip = 1.0;
    for (int i = 0; i < m; ++i) {
      fall *= 2.5 - i;
      fallHalf *= 0.5 - i;
      fallRecip *= -1.0 - i;
    }
    CHECK(e.partial({m}) == doctest::Approx(std::exp(a)).epsilon(1e-13));
    CHECK(p.partial({m}) == doctest::Approx(fall * std::pow(a, 2.5 - m)).epsilon(1e-12));
    CHECK(r.partial({m}) == doctest::Approx(fallHalf * std::pow(a, 0.5 - m)).epsilon(1e-12));
    CHECK(q.partial({m}) == doctest::Approx(fallRecip * std::pow(a, -1.0 - m)).epsilon(1e-12));
  }
  CHECK(l.partial({3}) == doctest::Approx(2.0 / (a * a * a)).epsilon(1e-12));
  CHECK(cos(t).partial({2}) == doctest::Approx(-std::cos(a)).epsilon(1e-13));
}

TEST_CASE("domain errors") {
  ScalarField x = variableField(1, 0);
  CHECK_THROWS_AS(evalJet(log(x), {-1.0}, 2), DomainError);
  CHECK_THROWS_AS(evalJet(log(x), {0.0}, 0), DomainError);
  CHECK_THROWS_AS(evalJet(sqrt(x), {-0.5}, 1), DomainError);
  CHECK_THROWS_AS(evalJet(x / (x - x), {1.0}, 1), DomainError);
  CHECK_THROWS_AS(evalJet(x, {1.0}, kMaxJetOrder + 1), DomainError);
  CHECK_THROWS_AS(evalJet(x, {1.0, 2.0}, 1), DomainError);
}

TEST_CASE("polynomial jets are exact Taylor shifts") {
  Rng rng(7, 0);
  for (int trial = 0; trial < 20; ++trial) {
    Polynomial p = randomPolynomial(3, 4, rng);
    const Point x0 = randomPoint(rng, 3, 1.5);
    TaylorJet viaShift = p.jet(x0, 4);
    // Same polynomial through generic jet arithmetic.
    TaylorJet viaArith(3, 4);
    for (const auto& t : p.terms()) {
      TaylorJet m = TaylorJet::constant(3, 4, t.coef);
      for (int i = 0; i < 3; ++i) m = m * powi(TaylorJet::variable(3, 4, i, x0[i]), t.exps[i]);
      viaArith += m;
    }
    for (std::size_t i = 0; i < viaShift.coeffs().size(); ++i)
      CHECK(viaShift.coeff(i) == doctest::Approx(viaArith.coeff(i)).epsilon(1e-12).scale(1.0));
    CHECK(p.value(x0) == doctest::Approx(viaShift.value()).epsilon(1e-14));
  }
}

TEST_CASE("mixed partials agree with central differences") {
  ScalarField x = variableField(3, 0), y = variableField(3, 1), z = variableField(3, 2);
  ScalarField f = exp(0.3 * x * y) * sin(y + z) + log(x * x + 2.0 * (y * y) + 1.0 * (z * z) + 1.5);
  const double h = 1e-4;
  Rng rng(11, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const Point p = randomPoint(rng, 3, 1.0);
    TaylorJet j = f.jet(p, 2);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        if (a == b) continue;
        auto shifted = [&](double sa, double sb) {
          Point q = p;
          q[a] += sa;
          q[b] += sb;
          return f.value(q);
        };
        const double fd = (shifted(h, h) - shifted(h, -h) - shifted(-h, h) + shifted(-h, -h)) / (4 * h * h);
        std::vector<int> alpha(3, 0);
        alpha[a] += 1;
        alpha[b] += 1;
        CHECK(j.partial(std::span<const int>(alpha)) == doctest::Approx(fd).epsilon(1e-5));
      }
  }
}

TEST_CASE("applyField on the Heisenberg frame") {
  Model H = heisenberg();
  const VectorField& X = H.horizontal[0];
  const VectorField& Y = H.horizontal[1];
  ScalarField x = variableField(3, 0), z = variableField(3, 2);
  Rng rng(3, 0);
  for (int k = 0; k < 20; ++k) {
    const Point p = randomPoint(rng, 3, 2.0);
    CHECK(applyField(X, x).value(p) == doctest::Approx(1.0));
    CHECK(applyField(X, z).value(p) == doctest::Approx(-p[1] / 2.0));
    const double comm = applyField(X, applyField(Y, z)).value(p) - applyField(Y, applyField(X, z)).value(p);
    CHECK(comm == doctest::Approx(1.0));
  }
}

TEST_CASE("Leibniz rule holds to machine precision") {
  std::vector<Model> models = {heisenberg(), sasakian(1.0), sasakian(-1.0), euclidean(3)};
  for (const auto& m : models) {
    Rng rng(99, 1);
    for (int k = 0; k < 100; ++k) {
      ScalarField f = polynomialField(randomPolynomial(m.coordDim, 3, rng));
      ScalarField g = polynomialField(randomPolynomial(m.coordDim, 3, rng));
      const Point p = m.samplePoint(rng, 1.5);
      for (int i = 0; i < m.frameSize(); ++i) {
        const VectorField& V = m.frame(i);
        const double lhs = applyField(V, f * g).value(p);
        const double rhs = f.value(p) * applyField(V, g).value(p) + g.value(p) * applyField(V, f).value(p);
        CHECK(std::abs(lhs - rhs) <= 1e-11 * (1.0 + std::abs(lhs)));
      }
    }
  }
}

TEST_CASE("Lie brackets: examples, antisymmetry, Jacobi") {
  Model E = euclidean(2);
  VectorField b = lieBracket(E.horizontal[0], E.horizontal[1]);
  for (int i = 0; i < 2; ++i) CHECK(b[i].value({0.3, 0.4}) == 0.0);

  Model H = heisenberg();
  const auto &X = H.horizontal[0], &Y = H.horizontal[1], &Z = H.vertical[0];
  Rng rng(5, 0);
  for (int k = 0; k < 50; ++k) {
    const Point p = randomPoint(rng, 3, 2.0);
    VectorField xy = lieBracket(X, Y), xz = lieBracket(X, Z), yz = lieBracket(Y, Z);
    for (int i = 0; i < 3; ++i) {
      CHECK(xy[i].value(p) == doctest::Approx(i == 2 ? 1.0 : 0.0));
      CHECK(xz[i].value(p) == doctest::Approx(0.0));
      CHECK(yz[i].value(p) == doctest::Approx(0.0));
    }
  }

  for (const auto& m : {sasakian(1.0), sasakian(-1.0), sasakianChart(-1.0)}) {
    Rng r2(17, 0);
    for (int k = 0; k < 20; ++k) {
      const Point p = m.samplePoint(r2, 1.0);
      const auto &A = m.frame(0), &B = m.frame(1), &C = m.frame(2);
      VectorField ab = lieBracket(A, B), ba = lieBracket(B, A);
      VectorField jac = lieBracket(A, lieBracket(B, C)) + lieBracket(B, lieBracket(C, A)) +
                        lieBracket(C, lieBracket(A, B));
      for (int i = 0; i < m.coordDim; ++i) {
        CHECK(std::abs(ab[i].value(p) + ba[i].value(p)) <= 1e-12);
        CHECK(std::abs(jac[i].value(p)) <= 1e-9);
      }
    }
  }
}

TEST_CASE("expression parser") {
  std::vector<std::string> vars = {"x", "y", "z"};
  ScalarField f = parseExpression("-y/2 + x^2*sin(z) - 3*exp(0.5*x) + sqrt(pi)", vars);
  const Point p = {0.4, -1.2, 0.9};
  const double expect = 0.6 + 0.16 * std::sin(0.9) - 3 * std::exp(0.2) + std::sqrt(std::acos(-1.0));
  CHECK(f.value(p) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(f.jet(p, 2).partial({2, 0, 0}) == doctest::Approx(2 * std::sin(0.9) - 0.75 * std::exp(0.2)));
  CHECK_THROWS_AS(parseExpression("x + w", vars), ConfigError);
  CHECK_THROWS_AS(parseExpression("x + (y", vars), ConfigError);
  CHECK_THROWS_AS(parseExpression("foo(x)", vars), ConfigError);
}

TEST_CASE("test functions round-trip through JSON") {
  Rng rng(123, 0);
  for (const std::string fam : {"polynomial", "trig"}) {
    TestFunction t = randomTestFunction(fam, 3, 4, rng, 0);
    TestFunction back = TestFunction::fromJson(nlohmann::json::parse(t.toJson().dump()));
    const Point p = {0.1, -0.7, 1.3};
    CHECK(t.field().value(p) == back.field().value(p));
    CHECK(t.field().jet(p, 3).coeffs()[7] == back.field().jet(p, 3).coeffs()[7]);
  }
  TestFunction e = TestFunction::expression("x*y + z", {"x", "y", "z"});
  TestFunction eb = TestFunction::fromJson(e.toJson());
  CHECK(eb.field().value({1, 2, 3}) == 5.0);
}
