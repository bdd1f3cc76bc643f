#pragma once

// Serializable test functions: random polynomials, low-frequency trigonometric
// sums and parsed expressions.  Every witness in a report is stored in this
// form so that it can be rebuilt and re-evaluated exactly.

#include <string>
#include <vector>

#include <json.hpp>

#include "srlab/field.hpp"
#include "srlab/random.hpp"

namespace srlab {

struct TrigTerm {
  double amplitude;
  std::vector<double> frequency;
  double phase;
};

struct TestFunction {
  std::string kind = "polynomial";  // polynomial | trig | expr
  int nvars = 0;
  Polynomial poly;
  std::vector<TrigTerm> trig;
  std::string expr;
  std::vector<std::string> variables;

  ScalarField field() const;
  nlohmann::json toJson() const;
  static TestFunction fromJson(const nlohmann::json& j);
  static TestFunction polynomial(Polynomial p);
  static TestFunction expression(std::string text, std::vector<std::string> vars);
};

// Dense random polynomial of total degree <= degree with U[-1,1] coefficients.
Polynomial randomPolynomial(int nvars, int degree, Rng& rng);
// Sum of three sin(k.x + phase) terms with integer-ish frequencies |k_i| <= 2.
TestFunction randomTrig(int nvars, Rng& rng);
// family: polynomial | trig | mixed (alternates by index)
TestFunction randomTestFunction(const std::string& family, int nvars, int degree, Rng& rng,
                                std::size_t index);

}  // namespace srlab
