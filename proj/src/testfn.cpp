#include "srlab/testfn.hpp"

#include <cmath>

#include "srlab/error.hpp"

namespace srlab {

using nlohmann::json;

ScalarField TestFunction::field() const {
  if (kind == "polynomial") return polynomialField(poly);
  if (kind == "trig") {
    ScalarField f = constantField(nvars, 0.0);
    for (const auto& t : trig) {
      ScalarField arg = constantField(nvars, t.phase);
      for (int i = 0; i < nvars; ++i)
        if (t.frequency[i] != 0.0) arg = arg + t.frequency[i] * variableField(nvars, i);
      f = f + t.amplitude * sin(arg);
    }
    return f;
  }
  if (kind == "expr") return parseExpression(expr, variables);
  throw ConfigError("unknown test function kind '" + kind + "'");
}

json TestFunction::toJson() const {
  json j;
  j["kind"] = kind;
  j["nvars"] = nvars;
  if (kind == "polynomial") {
    json terms = json::array();
    for (const auto& t : poly.terms()) terms.push_back(json::array({t.coef, t.exps}));
    j["terms"] = terms;
  } else if (kind == "trig") {
    json terms = json::array();
    for (const auto& t : trig) terms.push_back(json::array({t.amplitude, t.frequency, t.phase}));
    j["terms"] = terms;
  } else {
    j["expr"] = expr;
    j["variables"] = variables;
  }
  return j;
}

TestFunction TestFunction::fromJson(const json& j) {
  TestFunction f;
  try {
    f.kind = j.at("kind").get<std::string>();
    f.nvars = j.at("nvars").get<int>();
    if (f.kind == "polynomial") {
      f.poly = Polynomial(f.nvars);
      for (const auto& t : j.at("terms")) f.poly.addTerm(t.at(0).get<double>(), t.at(1).get<std::vector<int>>());
    } else if (f.kind == "trig") {
      for (const auto& t : j.at("terms"))
        f.trig.push_back({t.at(0).get<double>(), t.at(1).get<std::vector<double>>(), t.at(2).get<double>()});
    } else if (f.kind == "expr") {
      f.expr = j.at("expr").get<std::string>();
      f.variables = j.at("variables").get<std::vector<std::string>>();
    } else {
      throw ConfigError("unknown test function kind '" + f.kind + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed test function: ") + e.what());
  }
  return f;
}

TestFunction TestFunction::polynomial(Polynomial p) {
  TestFunction f;
  f.kind = "polynomial";
  f.nvars = p.nvars();
  f.poly = std::move(p);
  return f;
}

TestFunction TestFunction::expression(std::string text, std::vector<std::string> vars) {
  TestFunction f;
  f.kind = "expr";
  f.nvars = static_cast<int>(vars.size());
  f.expr = std::move(text);
  f.variables = std::move(vars);
  return f;
}

Polynomial randomPolynomial(int nvars, int degree, Rng& rng) {
  Polynomial p(nvars);
  const auto& space = JetSpace::get(nvars);
  if (degree > kMaxJetOrder) throw DomainError("random polynomial degree above the jet limit");
  for (std::size_t idx = 0; idx < space.size(degree); ++idx) {
    auto e = space.exponents(idx);
    p.addTerm(rng.uniform(-1.0, 1.0), std::vector<int>(e.begin(), e.end()));
  }
  return p;
}

TestFunction randomTrig(int nvars, Rng& rng) {
  TestFunction f;
  f.kind = "trig";
  f.nvars = nvars;
  for (int m = 0; m < 3; ++m) {
    TrigTerm t;
    t.amplitude = rng.uniform(-1.0, 1.0);
    t.frequency.resize(nvars);
    for (auto& k : t.frequency) k = std::round(rng.uniform(-2.0, 2.0) * 2.0) / 2.0;
    t.phase = rng.uniform(0.0, 6.283185307179586);
    f.trig.push_back(std::move(t));
  }
  return f;
}

TestFunction randomTestFunction(const std::string& family, int nvars, int degree, Rng& rng,
                                std::size_t index) {
  if (family == "polynomial") return TestFunction::polynomial(randomPolynomial(nvars, degree, rng));
  if (family == "trig") return randomTrig(nvars, rng);
  if (family == "mixed") {
    return index % 2 == 0 ? TestFunction::polynomial(randomPolynomial(nvars, degree, rng))
                          : randomTrig(nvars, rng);
  }
  throw ConfigError("unknown test-function family '" + family + "'");
}

}  // namespace srlab
