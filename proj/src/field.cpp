#include "srlab/field.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "srlab/error.hpp"

namespace srlab {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

class ConstantNode final : public FieldNode {
 public:
  ConstantNode(int n, double c) : FieldNode(n), c_(c) {}
  TaylorJet jet(const Point&, int order) const override {
    return TaylorJet::constant(nvars(), order, c_);
  }
  double value(const Point&) const override { return c_; }
  std::string describe() const override { return fmt(c_); }
  std::optional<double> constantValue() const override { return c_; }

 private:
  double c_;
};

class PolynomialNode final : public FieldNode {
 public:
  explicit PolynomialNode(Polynomial p) : FieldNode(p.nvars()), p_(std::move(p)) {}
  TaylorJet jet(const Point& x, int order) const override { return p_.jet(x, order); }
  double value(const Point& x) const override { return p_.value(x); }
  std::string describe() const override {
    std::ostringstream os;
    bool first = true;
    for (const auto& t : p_.terms()) {
      if (!first) os << " + ";
      first = false;
      os << fmt(t.coef);
      for (std::size_t i = 0; i < t.exps.size(); ++i) {
        if (t.exps[i] == 0) continue;
        os << "*x" << i;
        if (t.exps[i] > 1) os << "^" << t.exps[i];
      }
    }
    return first ? "0" : os.str();
  }
  std::optional<double> constantValue() const override {
    double c = 0.0;
    for (const auto& t : p_.terms()) {
      if (t.coef == 0.0) continue;
      if (std::any_of(t.exps.begin(), t.exps.end(), [](int e) { return e != 0; })) return std::nullopt;
      c += t.coef;
    }
    return c;
  }

 private:
  Polynomial p_;
};

enum class BinOp { Add, Sub, Mul, Div };

class BinaryNode final : public FieldNode {
 public:
  BinaryNode(BinOp op, ScalarField a, ScalarField b)
      : FieldNode(a.nvars()), op_(op), a_(std::move(a)), b_(std::move(b)) {}
  TaylorJet jet(const Point& x, int order) const override {
    TaylorJet ja = a_.jet(x, order), jb = b_.jet(x, order);
    switch (op_) {
      case BinOp::Add: return ja + jb;
      case BinOp::Sub: return ja - jb;
      case BinOp::Mul: return ja * jb;
      case BinOp::Div: return ja / jb;
    }
    return ja;
  }
  double value(const Point& x) const override {
    const double va = a_.value(x), vb = b_.value(x);
    switch (op_) {
      case BinOp::Add: return va + vb;
      case BinOp::Sub: return va - vb;
      case BinOp::Mul: return va * vb;
      case BinOp::Div:
        if (vb == 0.0) throw DomainError("division by zero in " + describe());
        return va / vb;
    }
    return va;
  }
  std::string describe() const override {
    static const char* sym[] = {" + ", " - ", " * ", " / "};
    return "(" + a_.describe() + sym[static_cast<int>(op_)] + b_.describe() + ")";
  }

 private:
  BinOp op_;
  ScalarField a_, b_;
};

enum class UnOp { Neg, Exp, Log, Sin, Cos, Sqrt, Pow };

class UnaryNode final : public FieldNode {
 public:
  UnaryNode(UnOp op, ScalarField a, double p = 0.0)
      : FieldNode(a.nvars()), op_(op), a_(std::move(a)), p_(p) {}
  TaylorJet jet(const Point& x, int order) const override {
    TaylorJet j = a_.jet(x, order);
    switch (op_) {
      case UnOp::Neg: return -j;
      case UnOp::Exp: return srlab::exp(j);
      case UnOp::Log: return srlab::log(j);
      case UnOp::Sin: return srlab::sin(j);
      case UnOp::Cos: return srlab::cos(j);
      case UnOp::Sqrt: return srlab::sqrt(j);
      case UnOp::Pow: return srlab::pow(j, p_);
    }
    return j;
  }
  double value(const Point& x) const override {
    const double v = a_.value(x);
    switch (op_) {
      case UnOp::Neg: return -v;
      case UnOp::Exp: return std::exp(v);
      case UnOp::Log:
        if (!(v > 0.0)) throw DomainError("log of a non-positive value in " + describe());
        return std::log(v);
      case UnOp::Sin: return std::sin(v);
      case UnOp::Cos: return std::cos(v);
      case UnOp::Sqrt:
        if (v < 0.0) throw DomainError("sqrt of a negative value in " + describe());
        return std::sqrt(v);
      case UnOp::Pow:
        if (v <= 0.0 && p_ != std::round(p_)) throw DomainError("non-integer power of non-positive value");
        return std::pow(v, p_);
    }
    return v;
  }
  std::string describe() const override {
    static const char* name[] = {"-", "exp", "log", "sin", "cos", "sqrt", "pow"};
    if (op_ == UnOp::Pow) return "pow(" + a_.describe() + ", " + fmt(p_) + ")";
    return std::string(name[static_cast<int>(op_)]) + "(" + a_.describe() + ")";
  }

 private:
  UnOp op_;
  ScalarField a_;
  double p_;
};

class OpaqueNode final : public FieldNode {
 public:
  OpaqueNode(int n, std::function<TaylorJet(const Point&, int)> jetRule, std::string name,
             std::function<double(const Point&)> valueRule)
      : FieldNode(n), jet_(std::move(jetRule)), value_(std::move(valueRule)), name_(std::move(name)) {}
  TaylorJet jet(const Point& x, int order) const override { return jet_(x, order); }
  double value(const Point& x) const override { return value_ ? value_(x) : jet_(x, 0).value(); }
  std::string describe() const override { return name_; }

 private:
  std::function<TaylorJet(const Point&, int)> jet_;
  std::function<double(const Point&)> value_;
  std::string name_;
};

class AppliedNode final : public FieldNode {
 public:
  AppliedNode(VectorField v, ScalarField f) : FieldNode(f.nvars()), v_(std::move(v)), f_(std::move(f)) {}
  TaylorJet jet(const Point& x, int order) const override {
    if (order + 1 > kMaxJetOrder) {
      throw DomainError("applying a vector field needs jet order " + std::to_string(order + 1) +
                        " beyond the supported maximum");
    }
    return applyJet(v_.jets(x, order), f_.jet(x, order + 1));
  }
  double value(const Point& x) const override { return jet(x, 0).value(); }
  std::string describe() const override {
    return (v_.name().empty() ? std::string("V") : v_.name()) + "[" + f_.describe() + "]";
  }

 private:
  VectorField v_;
  ScalarField f_;
};

void requireSameVars(const ScalarField& a, const ScalarField& b) {
  if (!a.valid() || !b.valid()) throw DomainError("operation on an empty field");
  if (a.nvars() != b.nvars()) throw DomainError("fields over different charts combined");
}

}  // namespace

// ---------------------------------------------------------------------------

TaylorJet ScalarField::jet(const Point& x, int order) const {
  if (!node_) throw DomainError("evaluating an empty field");
  if (static_cast<int>(x.size()) != node_->nvars()) {
    throw DomainError("point dimension " + std::to_string(x.size()) + " does not match field over " +
                      std::to_string(node_->nvars()) + " variables");
  }
  if (order < 0 || order > kMaxJetOrder) {
    throw DomainError("jet order " + std::to_string(order) + " outside [0, " +
                      std::to_string(kMaxJetOrder) + "]");
  }
  return node_->jet(x, order);
}

double ScalarField::value(const Point& x) const {
  if (!node_) throw DomainError("evaluating an empty field");
  if (static_cast<int>(x.size()) != node_->nvars()) throw DomainError("point dimension mismatch");
  return node_->value(x);
}

TaylorJet evalJet(const ScalarField& f, const Point& x, int k) { return f.jet(x, k); }

// ---------------------------------------------------------------------------

Polynomial::Polynomial(int nvars, std::vector<Monomial> terms) : nvars_(nvars) {
  for (auto& t : terms) addTerm(t.coef, std::move(t.exps));
}

void Polynomial::addTerm(double coef, std::vector<int> exps) {
  if (static_cast<int>(exps.size()) != nvars_) throw DomainError("monomial arity mismatch");
  for (int e : exps)
    if (e < 0) throw DomainError("negative exponent in polynomial");
  terms_.push_back({coef, std::move(exps)});
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& t : terms_) {
    int s = 0;
    for (int e : t.exps) s += e;
    d = std::max(d, s);
  }
  return d;
}

double Polynomial::value(const Point& x) const {
  double v = 0.0;
  for (const auto& t : terms_) {
    double m = t.coef;
    for (int i = 0; i < nvars_; ++i)
      for (int e = 0; e < t.exps[i]; ++e) m *= x[i];
    v += m;
  }
  return v;
}

TaylorJet Polynomial::jet(const Point& x, int order) const {
  TaylorJet out(nvars_, order);
  const auto& space = out.space();
  const std::size_t m = space.size(order);
  auto c = out.coeffs();
  const int deg = degree();
  // powers[i][p] = x_i^p, binom[n][k]
  std::vector<std::vector<double>> powers(nvars_, std::vector<double>(deg + 1, 1.0));
  for (int i = 0; i < nvars_; ++i)
    for (int p = 1; p <= deg; ++p) powers[i][p] = powers[i][p - 1] * x[i];
  std::vector<std::vector<double>> binom(deg + 1, std::vector<double>(deg + 1, 0.0));
  for (int n = 0; n <= deg; ++n) {
    binom[n][0] = 1.0;
    for (int k = 1; k <= n; ++k) binom[n][k] = binom[n - 1][k - 1] + (k <= n - 1 ? binom[n - 1][k] : 0.0);
  }
  for (const auto& t : terms_) {
    for (std::size_t idx = 0; idx < m; ++idx) {
      auto a = space.exponents(idx);
      double v = t.coef;
      for (int i = 0; i < nvars_ && v != 0.0; ++i) {
        const int e = t.exps[i];
        if (a[i] > e) {
          v = 0.0;
          break;
        }
        v *= binom[e][a[i]] * powers[i][e - a[i]];
      }
      c[idx] += v;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

ScalarField constantField(int nvars, double c) {
  return ScalarField(std::make_shared<ConstantNode>(nvars, c));
}

ScalarField variableField(int nvars, int var) {
  if (var < 0 || var >= nvars) throw DomainError("variable index out of range");
  std::vector<int> e(nvars, 0);
  e[var] = 1;
  return polynomialField(Polynomial(nvars, {{1.0, e}}));
}

ScalarField polynomialField(Polynomial p) {
  return ScalarField(std::make_shared<PolynomialNode>(std::move(p)));
}

ScalarField opaqueField(int nvars, std::function<TaylorJet(const Point&, int)> jetRule, std::string name,
                        std::function<double(const Point&)> valueRule) {
  return ScalarField(
      std::make_shared<OpaqueNode>(nvars, std::move(jetRule), std::move(name), std::move(valueRule)));
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  requireSameVars(a, b);
  return ScalarField(std::make_shared<BinaryNode>(BinOp::Add, a, b));
}
ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  requireSameVars(a, b);
  return ScalarField(std::make_shared<BinaryNode>(BinOp::Sub, a, b));
}
ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  requireSameVars(a, b);
  return ScalarField(std::make_shared<BinaryNode>(BinOp::Mul, a, b));
}
ScalarField operator/(const ScalarField& a, const ScalarField& b) {
  requireSameVars(a, b);
  return ScalarField(std::make_shared<BinaryNode>(BinOp::Div, a, b));
}
ScalarField operator-(const ScalarField& a) { return ScalarField(std::make_shared<UnaryNode>(UnOp::Neg, a)); }
ScalarField operator+(const ScalarField& a, double c) { return a + constantField(a.nvars(), c); }
ScalarField operator*(double c, const ScalarField& a) { return constantField(a.nvars(), c) * a; }
ScalarField exp(const ScalarField& f) { return ScalarField(std::make_shared<UnaryNode>(UnOp::Exp, f)); }
ScalarField log(const ScalarField& f) { return ScalarField(std::make_shared<UnaryNode>(UnOp::Log, f)); }
ScalarField sin(const ScalarField& f) { return ScalarField(std::make_shared<UnaryNode>(UnOp::Sin, f)); }
ScalarField cos(const ScalarField& f) { return ScalarField(std::make_shared<UnaryNode>(UnOp::Cos, f)); }
ScalarField sqrt(const ScalarField& f) { return ScalarField(std::make_shared<UnaryNode>(UnOp::Sqrt, f)); }
ScalarField pow(const ScalarField& f, double p) {
  return ScalarField(std::make_shared<UnaryNode>(UnOp::Pow, f, p));
}

// ---------------------------------------------------------------------------
// Expression parser

namespace {

class Parser {
 public:
  Parser(const std::string& text, const std::vector<std::string>& vars) : s_(text), vars_(vars) {}

  ScalarField parse() {
    ScalarField f = expression();
    skipSpace();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("expression \"" + s_ + "\": " + msg + " at offset " + std::to_string(pos_));
  }
  void skipSpace() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skipSpace();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  int n() const { return static_cast<int>(vars_.size()); }

  ScalarField expression() {
    ScalarField f = term();
    for (;;) {
      if (accept('+')) f = f + term();
      else if (accept('-')) f = f - term();
      else return f;
    }
  }
  ScalarField term() {
    ScalarField f = unary();
    for (;;) {
      if (accept('*')) f = f * unary();
      else if (accept('/')) f = f / unary();
      else return f;
    }
  }
  ScalarField unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }
  ScalarField power() {
    ScalarField base = primary();
    if (accept('^')) {
      ScalarField e = unary();
      if (auto c = e.constantValue()) return pow(base, *c);
      return exp(e * log(base));
    }
    return base;
  }
  ScalarField primary() {
    skipSpace();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (accept('(')) {
      ScalarField f = expression();
      if (!accept(')')) fail("missing ')'");
      return f;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return constantField(n(), v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      const std::string id = s_.substr(start, pos_ - start);
      if (accept('(')) {
        ScalarField arg = expression();
        if (!accept(')')) fail("missing ')' after " + id);
        if (id == "exp") return exp(arg);
        if (id == "log") return log(arg);
        if (id == "sin") return sin(arg);
        if (id == "cos") return cos(arg);
        if (id == "sqrt") return sqrt(arg);
        fail("unknown function " + id);
      }
      if (id == "pi") return constantField(n(), std::numbers::pi);
      for (int i = 0; i < n(); ++i)
        if (vars_[i] == id) return variableField(n(), i);
      fail("unknown variable " + id);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

}  // namespace

ScalarField parseExpression(const std::string& text, const std::vector<std::string>& variables) {
  if (variables.empty()) throw ConfigError("expression needs at least one chart variable");
  return Parser(text, variables).parse();
}

// ---------------------------------------------------------------------------

void VectorField::values(const Point& x, double* out) const {
  for (int i = 0; i < dim(); ++i) out[i] = comps_[i].value(x);
}

std::vector<TaylorJet> VectorField::jets(const Point& x, int order) const {
  std::vector<TaylorJet> out;
  out.reserve(comps_.size());
  for (const auto& c : comps_) out.push_back(c.jet(x, order));
  return out;
}

TaylorJet applyJet(const std::vector<TaylorJet>& a, const TaylorJet& f) {
  if (static_cast<int>(a.size()) != f.nvars()) throw DomainError("vector field arity mismatch");
  const int order = std::min(a.empty() ? f.order() - 1 : a[0].order(), f.order() - 1);
  TaylorJet out(f.nvars(), order);
  for (int k = 0; k < f.nvars(); ++k) {
    const TaylorJet& ak = a[k];
    auto c = ak.coeffs();
    if (std::all_of(c.begin(), c.begin() + ak.space().size(std::min(order, ak.order())),
                    [](double v) { return v == 0.0; }))
      continue;
    out += ak.truncated(order) * f.derivative(k).truncated(order);
  }
  return out;
}

ScalarField applyField(const VectorField& V, const ScalarField& f) {
  if (V.dim() != f.nvars()) throw DomainError("vector field arity mismatch");
  return ScalarField(std::make_shared<AppliedNode>(V, f));
}

VectorField lieBracket(const VectorField& V, const VectorField& W) {
  if (V.dim() != W.dim()) throw DomainError("bracket of fields on different charts");
  std::vector<ScalarField> c;
  c.reserve(V.dim());
  for (int i = 0; i < V.dim(); ++i) c.push_back(applyField(V, W[i]) - applyField(W, V[i]));
  return VectorField(std::move(c), "[" + V.name() + "," + W.name() + "]");
}

VectorField operator+(const VectorField& a, const VectorField& b) {
  std::vector<ScalarField> c;
  for (int i = 0; i < a.dim(); ++i) c.push_back(a[i] + b[i]);
  return VectorField(std::move(c), "(" + a.name() + "+" + b.name() + ")");
}

VectorField operator-(const VectorField& a, const VectorField& b) {
  std::vector<ScalarField> c;
  for (int i = 0; i < a.dim(); ++i) c.push_back(a[i] - b[i]);
  return VectorField(std::move(c), "(" + a.name() + "-" + b.name() + ")");
}

VectorField operator*(double s, const VectorField& a) {
  std::vector<ScalarField> c;
  for (int i = 0; i < a.dim(); ++i) c.push_back(s * a[i]);
  return VectorField(std::move(c), fmt(s) + a.name());
}

}  // namespace srlab
