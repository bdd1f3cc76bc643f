#include "srlab/jet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>

#include "srlab/error.hpp"

namespace srlab {

namespace {

std::uint64_t encode(std::span<const std::uint8_t> e) {
  std::uint64_t key = 0;
  for (std::size_t i = e.size(); i-- > 0;) key = key * (kMaxJetOrder + 1) + e[i];
  return key;
}

std::uint64_t encode(std::span<const int> e) {
  std::uint64_t key = 0;
  for (std::size_t i = e.size(); i-- > 0;) key = key * (kMaxJetOrder + 1) + e[i];
  return key;
}

// All exponent vectors of total degree `deg` in n variables, lexicographically
// descending (x0^deg first).
void enumerateDegree(int n, int deg, std::vector<std::uint8_t>& out) {
  std::vector<std::uint8_t> cur(n, 0);
  auto rec = [&](auto& self, int var, int remaining) -> void {
    if (var == n - 1) {
      cur[var] = static_cast<std::uint8_t>(remaining);
      out.insert(out.end(), cur.begin(), cur.end());
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      cur[var] = static_cast<std::uint8_t>(e);
      self(self, var + 1, remaining - e);
    }
  };
  rec(rec, 0, deg);
}

}  // namespace

JetSpace::JetSpace(int nvars) : nvars_(nvars) {
  for (int deg = 0; deg <= kMaxJetOrder; ++deg) {
    enumerateDegree(nvars, deg, exps_);
    sizeByOrder_.push_back(exps_.size() / nvars);
  }
  const std::size_t m = sizeByOrder_.back();
  degree_.resize(m);
  std::vector<std::pair<std::uint64_t, std::uint32_t>> keyed(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto e = exponents(i);
    degree_[i] = std::accumulate(e.begin(), e.end(), 0);
    keyed[i] = {encode(e), static_cast<std::uint32_t>(i)};
  }
  std::sort(keyed.begin(), keyed.end());
  for (const auto& [k, i] : keyed) {
    keys_.push_back(k);
    keyToIndex_.push_back(i);
  }

  std::vector<int> sum(nvars);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      if (degree_[a] + degree_[b] > kMaxJetOrder) continue;
      auto ea = exponents(a);
      auto eb = exponents(b);
      for (int i = 0; i < nvars; ++i) sum[i] = ea[i] + eb[i];
      products_.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                           static_cast<std::uint32_t>(index(sum))});
    }
  }
  std::stable_sort(products_.begin(), products_.end(), [&](const Product& p, const Product& q) {
    return degree_[p.out] < degree_[q.out];
  });
  productEnd_.assign(kMaxJetOrder + 1, 0);
  for (int k = 0; k <= kMaxJetOrder; ++k) {
    productEnd_[k] = static_cast<std::size_t>(
        std::count_if(products_.begin(), products_.end(),
                      [&](const Product& p) { return degree_[p.out] <= k; }));
  }

  deriv_.resize(nvars);
  derivEnd_.resize(nvars);
  for (int v = 0; v < nvars; ++v) {
    for (std::size_t s = 0; s < m; ++s) {
      auto e = exponents(s);
      if (e[v] == 0) continue;
      for (int i = 0; i < nvars; ++i) sum[i] = e[i];
      sum[v] -= 1;
      deriv_[v].push_back({static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(index(sum)),
                           static_cast<double>(e[v])});
    }
    std::stable_sort(deriv_[v].begin(), deriv_[v].end(), [&](const Shift& p, const Shift& q) {
      return degree_[p.dst] < degree_[q.dst];
    });
    derivEnd_[v].assign(kMaxJetOrder + 1, 0);
    for (int k = 0; k <= kMaxJetOrder; ++k) {
      derivEnd_[v][k] = static_cast<std::size_t>(std::count_if(
          deriv_[v].begin(), deriv_[v].end(), [&](const Shift& p) { return degree_[p.dst] <= k; }));
    }
  }
}

const JetSpace& JetSpace::get(int nvars) {
  if (nvars < 1 || nvars > kMaxJetVars) {
    throw DomainError("jet space: unsupported number of variables " + std::to_string(nvars));
  }
  static std::array<std::unique_ptr<JetSpace>, kMaxJetVars + 1> spaces;
  static std::array<std::once_flag, kMaxJetVars + 1> flags;
  std::call_once(flags[nvars], [&] { spaces[nvars].reset(new JetSpace(nvars)); });
  return *spaces[nvars];
}

std::size_t JetSpace::index(std::span<const int> alpha) const {
  int deg = 0;
  for (int a : alpha) {
    if (a < 0) throw DomainError("jet space: negative exponent");
    deg += a;
  }
  if (static_cast<int>(alpha.size()) != nvars_ || deg > kMaxJetOrder) {
    throw DomainError("jet space: multi-index out of range");
  }
  const auto key = encode(alpha);
  auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  return keyToIndex_[static_cast<std::size_t>(it - keys_.begin())];
}

// ---------------------------------------------------------------------------

TaylorJet::TaylorJet(int nvars, int order) : space_(&JetSpace::get(nvars)), order_(order) {
  if (order < 0 || order > kMaxJetOrder) {
    throw DomainError("jet order " + std::to_string(order) + " exceeds the supported maximum " +
                      std::to_string(kMaxJetOrder));
  }
  c_.assign(space_->size(order), 0.0);
}

TaylorJet TaylorJet::constant(int nvars, int order, double value) {
  TaylorJet j(nvars, order);
  j.c_[0] = value;
  return j;
}

TaylorJet TaylorJet::variable(int nvars, int order, int var, double at) {
  TaylorJet j(nvars, order);
  j.c_[0] = at;
  if (order >= 1) j.c_[1 + var] = 1.0;  // degree-1 block is e_0, e_1, ... in order
  return j;
}

double TaylorJet::coeff(std::span<const int> alpha) const {
  const std::size_t idx = space_->index(alpha);
  return idx < c_.size() ? c_[idx] : 0.0;
}

double TaylorJet::partial(std::span<const int> alpha) const {
  double fact = 1.0;
  for (int a : alpha)
    for (int i = 2; i <= a; ++i) fact *= i;
  return coeff(alpha) * fact;
}

TaylorJet TaylorJet::derivative(int var) const {
  if (order_ == 0) throw DomainError("cannot differentiate an order-0 jet");
  TaylorJet out(nvars(), order_ - 1);
  for (const auto& s : space_->derivative(var, order_ - 1)) out.c_[s.dst] = s.factor * c_[s.src];
  return out;
}

TaylorJet TaylorJet::truncated(int order) const {
  if (order >= order_) return *this;
  TaylorJet out(nvars(), order);
  std::copy_n(c_.begin(), out.c_.size(), out.c_.begin());
  return out;
}

namespace {
void requireCompatible(const TaylorJet& a, const TaylorJet& b) {
  if (a.empty() || b.empty() || a.nvars() != b.nvars()) {
    throw DomainError("jet arithmetic on incompatible jets");
  }
}
}  // namespace

TaylorJet& TaylorJet::operator+=(const TaylorJet& o) {
  requireCompatible(*this, o);
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

TaylorJet& TaylorJet::operator-=(const TaylorJet& o) {
  requireCompatible(*this, o);
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

void TaylorJet::addScaled(const TaylorJet& o, double s) {
  requireCompatible(*this, o);
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += s * o.c_[i];
}

TaylorJet& TaylorJet::operator*=(const TaylorJet& o) {
  *this = *this * o;
  return *this;
}

TaylorJet& TaylorJet::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

TaylorJet operator+(TaylorJet a, const TaylorJet& b) { return a += b; }
TaylorJet operator-(TaylorJet a, const TaylorJet& b) { return a -= b; }

TaylorJet operator*(const TaylorJet& a, const TaylorJet& b) {
  requireCompatible(a, b);
  const int order = std::min(a.order(), b.order());
  TaylorJet out(a.nvars(), order);
  auto ca = a.coeffs();
  auto cb = b.coeffs();
  auto co = out.coeffs();
  for (const auto& p : a.space().products(order)) co[p.out] += ca[p.a] * cb[p.b];
  return out;
}

TaylorJet operator/(const TaylorJet& a, const TaylorJet& b) { return a * reciprocal(b); }
TaylorJet operator-(TaylorJet a) { return a *= -1.0; }
TaylorJet operator+(TaylorJet a, double s) { return a += s; }
TaylorJet operator+(double s, TaylorJet a) { return a += s; }
TaylorJet operator-(TaylorJet a, double s) { return a -= s; }
TaylorJet operator-(double s, const TaylorJet& a) { return (-a) += s; }
TaylorJet operator*(TaylorJet a, double s) { return a *= s; }
TaylorJet operator*(double s, TaylorJet a) { return a *= s; }
TaylorJet operator/(TaylorJet a, double s) { return a *= (1.0 / s); }

TaylorJet compose(const TaylorJet& f, std::span<const double> d) {
  const int k = f.order();
  if (static_cast<int>(d.size()) < k + 1) throw DomainError("compose: too few outer derivatives");
  // Horner in h = f - f(x0), which has no constant term.
  TaylorJet h = f;
  h.coeffs()[0] = 0.0;
  double fact = 1.0;
  for (int m = 2; m <= k; ++m) fact *= m;
  TaylorJet acc = TaylorJet::constant(f.nvars(), k, d[k] / fact);
  for (int m = k - 1; m >= 0; --m) {
    fact /= (m + 1);
    acc = acc * h;
    acc += d[m] / fact;
  }
  return acc;
}

namespace {
// Derivatives of x -> x^p at a.
std::array<double, kMaxJetOrder + 1> powerDerivatives(double a, double p, int k) {
  std::array<double, kMaxJetOrder + 1> d{};
  double coef = 1.0;
  for (int m = 0; m <= k; ++m) {
    d[m] = coef * std::pow(a, p - m);
    coef *= (p - m);
  }
  return d;
}
}  // namespace

TaylorJet reciprocal(const TaylorJet& f) {
  const double a = f.value();
  if (a == 0.0) throw DomainError("division by a jet with zero value");
  return compose(f, std::span(powerDerivatives(a, -1.0, f.order()).data(), f.order() + 1));
}

TaylorJet exp(const TaylorJet& f) {
  std::array<double, kMaxJetOrder + 1> d{};
  d.fill(std::exp(f.value()));
  return compose(f, std::span(d.data(), f.order() + 1));
}

TaylorJet log(const TaylorJet& f) {
  const double a = f.value();
  if (!(a > 0.0)) throw DomainError("log of a non-positive value");
  std::array<double, kMaxJetOrder + 1> d{};
  d[0] = std::log(a);
  double coef = 1.0;  // (-1)^(m-1) (m-1)!
  for (int m = 1; m <= f.order(); ++m) {
    d[m] = coef / std::pow(a, m);
    coef *= -static_cast<double>(m);
  }
  return compose(f, std::span(d.data(), f.order() + 1));
}

TaylorJet sin(const TaylorJet& f) {
  const double s = std::sin(f.value()), c = std::cos(f.value());
  const std::array<double, 4> cyc{s, c, -s, -c};
  std::array<double, kMaxJetOrder + 1> d{};
  for (int m = 0; m <= f.order(); ++m) d[m] = cyc[m % 4];
  return compose(f, std::span(d.data(), f.order() + 1));
}

TaylorJet cos(const TaylorJet& f) {
  const double s = std::sin(f.value()), c = std::cos(f.value());
  const std::array<double, 4> cyc{c, -s, -c, s};
  std::array<double, kMaxJetOrder + 1> d{};
  for (int m = 0; m <= f.order(); ++m) d[m] = cyc[m % 4];
  return compose(f, std::span(d.data(), f.order() + 1));
}

TaylorJet sqrt(const TaylorJet& f) {
  const double a = f.value();
  if (a < 0.0 || (a == 0.0 && f.order() > 0)) throw DomainError("sqrt outside its smooth domain");
  return compose(f, std::span(powerDerivatives(a, 0.5, f.order()).data(), f.order() + 1));
}

TaylorJet pow(const TaylorJet& f, double p) {
  const double a = f.value();
  if (p == std::round(p) && std::abs(p) <= 64) return powi(f, static_cast<int>(p));
  if (!(a > 0.0)) throw DomainError("non-integer power of a non-positive value");
  return compose(f, std::span(powerDerivatives(a, p, f.order()).data(), f.order() + 1));
}

TaylorJet powi(const TaylorJet& f, int p) {
  if (p < 0) return reciprocal(powi(f, -p));
  TaylorJet result = TaylorJet::constant(f.nvars(), f.order(), 1.0);
  TaylorJet base = f;
  while (p > 0) {
    if (p & 1) result = result * base;
    p >>= 1;
    if (p) base = base * base;
  }
  return result;
}

}  // namespace srlab
