#pragma once

// Scalar and vector fields on a chart.  A ScalarField is an immutable
// expression node that can produce its Taylor jet at any point; vector fields
// are lists of coefficient fields acting as first-order operators.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "srlab/jet.hpp"

namespace srlab {

class FieldNode {
 public:
  explicit FieldNode(int nvars) : nvars_(nvars) {}
  virtual ~FieldNode() = default;

  int nvars() const { return nvars_; }
  virtual TaylorJet jet(const Point& x, int order) const = 0;
  virtual double value(const Point& x) const { return jet(x, 0).value(); }
  virtual std::string describe() const = 0;
  virtual std::optional<double> constantValue() const { return std::nullopt; }

 private:
  int nvars_;
};

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(std::shared_ptr<const FieldNode> node) : node_(std::move(node)) {}

  bool valid() const { return node_ != nullptr; }
  int nvars() const { return node_->nvars(); }
  TaylorJet jet(const Point& x, int order) const;
  double value(const Point& x) const;
  double operator()(const Point& x) const { return value(x); }
  std::string describe() const { return node_->describe(); }
  std::optional<double> constantValue() const { return node_->constantValue(); }
  const std::shared_ptr<const FieldNode>& node() const { return node_; }

 private:
  std::shared_ptr<const FieldNode> node_;
};

// All partials of f at x through order k.
TaylorJet evalJet(const ScalarField& f, const Point& x, int k);

struct Monomial {
  double coef;
  std::vector<int> exps;
};

class Polynomial {
 public:
  explicit Polynomial(int nvars = 1) : nvars_(nvars) {}
  Polynomial(int nvars, std::vector<Monomial> terms);

  int nvars() const { return nvars_; }
  int degree() const;
  const std::vector<Monomial>& terms() const { return terms_; }
  void addTerm(double coef, std::vector<int> exps);

  double value(const Point& x) const;
  // Exact Taylor shift to the base point x.
  TaylorJet jet(const Point& x, int order) const;

 private:
  int nvars_;
  std::vector<Monomial> terms_;
};

ScalarField constantField(int nvars, double c);
ScalarField variableField(int nvars, int var);
ScalarField polynomialField(Polynomial p);
// Opaque field given by a jet rule (and optionally a faster value rule).
ScalarField opaqueField(int nvars, std::function<TaylorJet(const Point&, int)> jetRule,
                        std::string name, std::function<double(const Point&)> valueRule = {});

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(const ScalarField& a, const ScalarField& b);
ScalarField operator/(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a);
ScalarField operator+(const ScalarField& a, double c);
ScalarField operator*(double c, const ScalarField& a);
ScalarField exp(const ScalarField& f);
ScalarField log(const ScalarField& f);
ScalarField sin(const ScalarField& f);
ScalarField cos(const ScalarField& f);
ScalarField sqrt(const ScalarField& f);
ScalarField pow(const ScalarField& f, double p);

// Arithmetic expressions over named chart variables: + - * / ^, unary minus,
// exp log sin cos sqrt, the constant pi.
ScalarField parseExpression(const std::string& text, const std::vector<std::string>& variables);

class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(std::vector<ScalarField> components, std::string name = "")
      : comps_(std::move(components)), name_(std::move(name)) {}

  int dim() const { return static_cast<int>(comps_.size()); }
  const ScalarField& operator[](int i) const { return comps_[i]; }
  const std::vector<ScalarField>& components() const { return comps_; }
  const std::string& name() const { return name_; }

  void values(const Point& x, double* out) const;
  std::vector<TaylorJet> jets(const Point& x, int order) const;

 private:
  std::vector<ScalarField> comps_;
  std::string name_;
};

// sum_k a_k * d_k f, truncated to min(order(a), order(f) - 1).
TaylorJet applyJet(const std::vector<TaylorJet>& coeffJets, const TaylorJet& f);

ScalarField applyField(const VectorField& V, const ScalarField& f);
VectorField lieBracket(const VectorField& V, const VectorField& W);
VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(double c, const VectorField& a);

}  // namespace srlab
