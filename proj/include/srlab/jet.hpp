#pragma once

// Truncated multivariate Taylor jets.
//
// A TaylorJet of order k in n variables stores the Taylor coefficients
// d^a f(x0) / a!  for every multi-index a with |a| <= k.  Monomials are kept in
// a graded order (all degree-0, then all degree-1, ...) so that the jet of
// order k-1 is a prefix of the jet of order k; differentiation therefore maps
// index ranges onto index ranges without any remapping.
//
// Mixed partials are stored once per multi-index, so symmetry of mixed
// derivatives is structural.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace srlab {

using Point = std::vector<double>;

inline constexpr int kMaxJetOrder = 4;
inline constexpr int kMaxJetVars = 12;

class JetSpace {
 public:
  struct Product {
    std::uint32_t a, b, out;
  };
  struct Shift {
    std::uint32_t src, dst;
    double factor;
  };

  // Monomials in `nvars` variables up to kMaxJetOrder.  Built once per nvars,
  // immutable afterwards; safe to share across threads.
  static const JetSpace& get(int nvars);

  int nvars() const { return nvars_; }
  std::size_t size(int order) const { return sizeByOrder_[order]; }
  int degree(std::size_t idx) const { return degree_[idx]; }
  std::span<const std::uint8_t> exponents(std::size_t idx) const {
    return {exps_.data() + idx * nvars_, static_cast<std::size_t>(nvars_)};
  }
  std::size_t index(std::span<const int> alpha) const;

  // Coefficient products whose output degree is <= order.
  std::span<const Product> products(int order) const {
    return {products_.data(), productEnd_[order]};
  }
  // d/dx_var restricted to outputs of degree <= resultOrder.
  std::span<const Shift> derivative(int var, int resultOrder) const {
    return {deriv_[var].data(), derivEnd_[var][resultOrder]};
  }

 private:
  explicit JetSpace(int nvars);

  int nvars_;
  std::vector<std::size_t> sizeByOrder_;
  std::vector<std::uint8_t> exps_;
  std::vector<int> degree_;
  std::vector<std::uint64_t> keys_;  // sorted encoded exponents
  std::vector<std::uint32_t> keyToIndex_;
  std::vector<Product> products_;
  std::vector<std::size_t> productEnd_;
  std::vector<std::vector<Shift>> deriv_;
  std::vector<std::vector<std::size_t>> derivEnd_;
};

class TaylorJet {
 public:
  TaylorJet() = default;
  // Zero jet.
  TaylorJet(int nvars, int order);

  static TaylorJet constant(int nvars, int order, double value);
  // The coordinate function x_var expanded at a point whose var-th
  // coordinate is `at`.
  static TaylorJet variable(int nvars, int order, int var, double at);

  int nvars() const { return space_ ? space_->nvars() : 0; }
  int order() const { return order_; }
  const JetSpace& space() const { return *space_; }
  bool empty() const { return space_ == nullptr; }

  double value() const { return c_[0]; }
  std::span<const double> coeffs() const { return c_; }
  std::span<double> coeffs() { return c_; }
  double coeff(std::size_t idx) const { return c_[idx]; }
  double coeff(std::span<const int> alpha) const;
  // The partial derivative d^alpha f at the base point (= coeff * alpha!).
  double partial(std::span<const int> alpha) const;
  double partial(std::initializer_list<int> alpha) const {
    return partial(std::span<const int>(alpha.begin(), alpha.size()));
  }

  // d/dx_var; the result has order one lower.  Order-0 jets cannot be
  // differentiated.
  TaylorJet derivative(int var) const;
  TaylorJet truncated(int order) const;

  TaylorJet& operator+=(const TaylorJet& o);
  TaylorJet& operator-=(const TaylorJet& o);
  TaylorJet& operator*=(const TaylorJet& o);
  TaylorJet& operator+=(double s) { c_[0] += s; return *this; }
  TaylorJet& operator-=(double s) { c_[0] -= s; return *this; }
  TaylorJet& operator*=(double s);

  // this += s * o  (orders truncated to the smaller one)
  void addScaled(const TaylorJet& o, double s);

 private:
  const JetSpace* space_ = nullptr;
  int order_ = 0;
  std::vector<double> c_;
};

TaylorJet operator+(TaylorJet a, const TaylorJet& b);
TaylorJet operator-(TaylorJet a, const TaylorJet& b);
TaylorJet operator*(const TaylorJet& a, const TaylorJet& b);
TaylorJet operator/(const TaylorJet& a, const TaylorJet& b);
TaylorJet operator-(TaylorJet a);
TaylorJet operator+(TaylorJet a, double s);
TaylorJet operator+(double s, TaylorJet a);
TaylorJet operator-(TaylorJet a, double s);
TaylorJet operator-(double s, const TaylorJet& a);
TaylorJet operator*(TaylorJet a, double s);
TaylorJet operator*(double s, TaylorJet a);
TaylorJet operator/(TaylorJet a, double s);

// g(f) for a univariate g given its derivatives g^(m)(f(x0)), m = 0..order.
TaylorJet compose(const TaylorJet& f, std::span<const double> outerDerivatives);

TaylorJet reciprocal(const TaylorJet& f);
TaylorJet exp(const TaylorJet& f);
TaylorJet log(const TaylorJet& f);
TaylorJet sin(const TaylorJet& f);
TaylorJet cos(const TaylorJet& f);
TaylorJet sqrt(const TaylorJet& f);
TaylorJet pow(const TaylorJet& f, double p);
TaylorJet powi(const TaylorJet& f, int p);

}  // namespace srlab
