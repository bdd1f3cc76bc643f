#include "srlab/model.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <regex>
#include <sstream>

#include <Eigen/Dense>

#include "srlab/error.hpp"

namespace srlab {

using nlohmann::json;
using cplx = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

std::string numStr(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

ScalarField linearField(int n, const std::vector<double>& coef, double c0 = 0.0) {
  Polynomial p(n);
  if (c0 != 0.0) p.addTerm(c0, std::vector<int>(n, 0));
  for (int i = 0; i < n; ++i) {
    if (coef[i] == 0.0) continue;
    std::vector<int> e(n, 0);
    e[i] = 1;
    p.addTerm(coef[i], e);
  }
  if (p.terms().empty()) return constantField(n, 0.0);
  return polynomialField(std::move(p));
}

VectorField coordinateField(int n, int i, std::string name) {
  std::vector<ScalarField> c;
  for (int k = 0; k < n; ++k) c.push_back(constantField(n, k == i ? 1.0 : 0.0));
  return VectorField(std::move(c), std::move(name));
}

Point uniformBox(Rng& rng, int n, double box) {
  Point p(n);
  for (auto& v : p) v = rng.uniform(-box, box);
  return p;
}

// d^m/dx^m of sum_n c[n] x^n at x, m = 0..order.
std::vector<double> seriesDerivatives(const std::vector<double>& c, double x, int order) {
  std::vector<double> out(order + 1, 0.0);
  for (int m = 0; m <= order; ++m) {
    double acc = 0.0;
    for (std::size_t n = c.size(); n-- > static_cast<std::size_t>(m);) {
      double falling = 1.0;
      for (int q = 0; q < m; ++q) falling *= static_cast<double>(n - q);
      acc = acc * x + c[n] * falling;
    }
    out[m] = acc;
  }
  return out;
}

double zetaEven(int m2) {
  if (m2 == 2) return kPi * kPi / 6.0;
  if (m2 == 4) return std::pow(kPi, 4) / 90.0;
  double s = 0.0;
  for (int k = 200; k >= 1; --k) s += std::pow(static_cast<double>(k), -m2);
  return s + std::pow(200.5, 1 - m2) / (m2 - 1);
}

const std::vector<double>& betaSeries() {
  static const std::vector<double> c = [] {
    std::vector<double> v;
    for (int n = 0; n < 40; ++n) {
      const double sign = n % 2 == 0 ? 1.0 : -1.0;
      v.push_back(sign * 2.0 * zetaEven(2 * n + 2) / std::pow(2.0 * kPi, 2 * n + 2));
    }
    return v;
  }();
  return c;
}

const std::vector<double>& sincSeries() {
  static const std::vector<double> c = [] {
    std::vector<double> v;
    double fact = 1.0;  // (2n+1)!
    double p4 = 1.0;
    for (int n = 0; n < 90; ++n) {
      if (n > 0) fact *= (2.0 * n) * (2.0 * n + 1.0);
      v.push_back(1.0 / (p4 * fact));
      p4 *= 4.0;
    }
    return v;
  }();
  return c;
}

std::vector<double> jetDerivatives(const TaylorJet& j, int order) {
  std::vector<double> out(order + 1);
  for (int m = 0; m <= order; ++m) out[m] = j.partial({m});
  return out;
}

// ---------------------------------------------------------------------------
// 2x2 complex matrices, row-major.

using Mat2 = std::array<cplx, 4>;

Mat2 mul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
          a[2] * b[1] + a[3] * b[3]};
}

Mat2 scale(const Mat2& a, cplx s) { return {a[0] * s, a[1] * s, a[2] * s, a[3] * s}; }
Mat2 add(const Mat2& a, const Mat2& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]}; }

// exp of a traceless 2x2 matrix: M^2 = delta I.
Mat2 expTraceless(const Mat2& m) {
  const cplx delta = m[0] * m[0] + m[1] * m[2];
  cplx c, s;
  if (std::abs(delta) < 1e-4) {
    c = 1.0 + delta / 2.0 + delta * delta / 24.0 + delta * delta * delta / 720.0;
    s = 1.0 + delta / 6.0 + delta * delta / 120.0 + delta * delta * delta / 5040.0;
  } else {
    const cplx w = std::sqrt(delta);
    c = std::cosh(w);
    s = std::sinh(w) / w;
  }
  return {c + s * m[0], s * m[1], s * m[2], c + s * m[3]};
}

// Principal log of g with det g = 1 near the identity, as a traceless matrix.
Mat2 logUnimodular(const Mat2& g) {
  const cplx half = (g[0] + g[3]) / 2.0;
  const cplx w = std::acosh(half);
  cplx s;
  if (std::abs(w) < 1e-4) s = 1.0 + w * w / 6.0 + w * w * w * w / 120.0;
  else s = std::sinh(w) / w;
  if (std::abs(s) < 1e-12) throw DomainError("matrix logarithm undefined (antipodal point)");
  return {(g[0] - half) / s, g[1] / s, g[2] / s, (g[3] - half) / s};
}

struct MatrixRealization {
  bool compact = false;
  std::array<Mat2, 3> gens;  // X, Y, Z as 2x2 matrices

  Mat2 toMatrix(const Point& q) const {
    if (compact) return {cplx(q[0], q[1]), cplx(q[2], q[3]), cplx(-q[2], q[3]), cplx(q[0], -q[1])};
    return {q[0], q[1], q[2], q[3]};
  }
  Point fromMatrix(const Mat2& m) const {
    if (compact) return {m[0].real(), m[0].imag(), m[1].real(), m[1].imag()};
    return {m[0].real(), m[1].real(), m[2].real(), m[3].real()};
  }
  Mat2 algebra(std::span<const double> c) const {
    Mat2 m{};
    for (int i = 0; i < 3; ++i) m = add(m, scale(gens[i], c[i]));
    return m;
  }
  // Coordinates of a traceless matrix in the basis gens.
  std::vector<double> algebraCoords(const Mat2& m) const {
    Eigen::Matrix<double, 8, 3> A;
    Eigen::Matrix<double, 8, 1> b;
    for (int k = 0; k < 4; ++k) {
      for (int i = 0; i < 3; ++i) {
        A(2 * k, i) = gens[i][k].real();
        A(2 * k + 1, i) = gens[i][k].imag();
      }
      b(2 * k) = m[k].real();
      b(2 * k + 1) = m[k].imag();
    }
    Eigen::Vector3d s = A.colPivHouseholderQr().solve(b);
    return {s(0), s(1), s(2)};
  }
};

MatrixRealization realization(double rho) {
  MatrixRealization r;
  const cplx I(0.0, 1.0);
  if (rho > 0) {
    r.compact = true;
    const double a = std::sqrt(rho);
    const Mat2 e1{0.0, -I / 2.0, -I / 2.0, 0.0};
    const Mat2 e2{0.0, -0.5, 0.5, 0.0};
    const Mat2 e3{-I / 2.0, 0.0, 0.0, I / 2.0};
    r.gens = {scale(e1, a), scale(e2, a), scale(e3, rho)};
  } else {
    const double a = std::sqrt(-rho);
    const Mat2 A{0.5, 0.0, 0.0, -0.5};
    const Mat2 B{0.0, 0.5, 0.5, 0.0};
    const Mat2 C{0.0, 0.5, -0.5, 0.0};
    r.gens = {scale(A, a), scale(B, a), scale(C, -rho)};
  }
  return r;
}

std::vector<BracketRelation> sasakianBrackets(double rho) {
  return {{0, 1, {0.0, 0.0, 1.0}}, {0, 2, {0.0, -rho, 0.0}}, {1, 2, {rho, 0.0, 0.0}}};
}

// ad_s in the basis (X, Y, Z) for the bracket table of G(rho).
std::array<std::array<double, 3>, 3> adMatrix(double rho, const double* s) {
  return {{{0.0, -rho * s[2], rho * s[1]}, {rho * s[2], 0.0, -rho * s[0]}, {-s[1], s[0], 0.0}}};
}

double chartBetaValue(double mu) { return chartBetaDerivatives(mu, 0)[0]; }

}  // namespace

// ---------------------------------------------------------------------------

std::vector<double> chartBetaDerivatives(double mu, int order) {
  if (std::abs(mu) <= 4.0) return seriesDerivatives(betaSeries(), mu, order);
  TaylorJet m = TaylorJet::variable(1, order, 0, mu);
  TaylorJet chi;
  if (mu > 0) {
    TaylorJet half = sqrt(m) * 0.5;
    TaylorJet e = exp(half), em = exp(-half);
    chi = half * (e + em) / (e - em);
  } else {
    TaylorJet half = sqrt(-m) * 0.5;
    chi = half * cos(half) / sin(half);
  }
  return jetDerivatives((chi - 1.0) / m, order);
}

std::vector<double> chartSincDerivatives(double mu, int order) {
  if (std::abs(mu) <= 100.0) return seriesDerivatives(sincSeries(), mu, order);
  TaylorJet m = TaylorJet::variable(1, order, 0, mu);
  TaylorJet half = (mu > 0 ? sqrt(m) : sqrt(-m)) * 0.5;
  TaylorJet s = mu > 0 ? (exp(half) - exp(-half)) * 0.5 : sin(half);
  return jetDerivatives(s / half, order);
}

void Model::frameValues(const Point& x, double* out) const {
  const int n = coordDim;
  for (int i = 0; i < d(); ++i) horizontal[i].values(x, out + i * n);
  for (int j = 0; j < h(); ++j) vertical[j].values(x, out + (d() + j) * n);
}

Point Model::samplePoint(Rng& rng, double box) const {
  if (sampler) return sampler(rng, box);
  return uniformBox(rng, coordDim, box);
}

Model Model::withVerticalScale(double a) const {
  if (!(a > 0.0)) throw DomainError("vertical scale must be positive");
  Model m = *this;
  const double s = std::sqrt(a);
  for (auto& Z : m.vertical) Z = s * Z;
  m.name = name + "[vertical*" + numStr(a) + "]";
  m.brackets.clear();
  return m;
}

Model euclidean(int n) {
  if (n < 1) throw DomainError("euclidean dimension must be at least 1");
  Model m;
  m.name = "euclidean(" + std::to_string(n) + ")";
  m.family = "euclidean";
  m.dim = m.coordDim = n;
  for (int i = 0; i < n; ++i) m.horizontal.push_back(coordinateField(n, i, "d" + std::to_string(i)));
  m.density = constantField(n, 1.0);
  m.traits = {true, false, true};
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) m.brackets.push_back({i, j, std::vector<double>(n, 0.0)});
  GroupOps g;
  g.identity = Point(n, 0.0);
  g.multiply = [](const Point& a, const Point& b) {
    Point c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
    return c;
  };
  g.inverse = [](const Point& a) {
    Point c(a);
    for (auto& v : c) v = -v;
    return c;
  };
  g.rightExp = [](const Point& a, std::span<const double> c) {
    Point r(a);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += c[i];
    return r;
  };
  m.group = g;
  m.homogeneousDim = n;
  m.normalization = "Lebesgue measure";
  m.exactDistance = [](const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
  };
  m.spec = {{"type", "euclidean"}, {"n", n}};
  return m;
}

Model carnotStep2(const CarnotSpec& spec) {
  const int d = spec.d, h = spec.h, n = spec.d + spec.h;
  if (d < 2 || h < 1) throw DomainError("step-2 Carnot group needs d >= 2 and h >= 1");
  if (static_cast<int>(spec.B.size()) != h) throw DomainError("structure constants: expected h layers");
  for (const auto& layer : spec.B) {
    if (static_cast<int>(layer.size()) != d) throw DomainError("structure constants: expected d x d layers");
    for (const auto& row : layer)
      if (static_cast<int>(row.size()) != d) throw DomainError("structure constants: expected d x d layers");
  }
  for (int k = 0; k < h; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (std::abs(spec.B[k][i][j] + spec.B[k][j][i]) > 1e-12) {
          throw DomainError("structure constants not skew: B^" + std::to_string(k + 1) + "_" +
                            std::to_string(i + 1) + std::to_string(j + 1) + " + B^" + std::to_string(k + 1) +
                            "_" + std::to_string(j + 1) + std::to_string(i + 1) + " != 0");
        }
  {
    Eigen::MatrixXd S(d * (d - 1) / 2, h);
    int r = 0;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j, ++r)
        for (int k = 0; k < h; ++k) S(r, k) = spec.B[k][i][j];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
    lu.setThreshold(1e-10);
    if (lu.rank() != h) throw DomainError("structure constants do not generate the second layer");
  }

  Model m;
  m.name = "carnot2(d=" + std::to_string(d) + ",h=" + std::to_string(h) + ")";
  m.family = "carnot2";
  m.dim = m.coordDim = n;
  for (int i = 0; i < d; ++i) {
    std::vector<ScalarField> c;
    for (int q = 0; q < d; ++q) c.push_back(constantField(n, q == i ? 1.0 : 0.0));
    for (int k = 0; k < h; ++k) {
      std::vector<double> lin(n, 0.0);
      for (int j = 0; j < d; ++j) lin[j] = -0.5 * spec.B[k][i][j];
      c.push_back(linearField(n, lin));
    }
    m.horizontal.emplace_back(std::move(c), "X" + std::to_string(i + 1));
  }
  for (int k = 0; k < h; ++k) m.vertical.push_back(coordinateField(n, d + k, "Z" + std::to_string(k + 1)));
  m.density = constantField(n, 1.0);
  m.traits = {true, false, true};
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      std::vector<double> c(n, 0.0);
      for (int k = 0; k < h; ++k) c[d + k] = spec.B[k][i][j];
      m.brackets.push_back({i, j, c});
    }
  for (int i = 0; i < n; ++i)
    for (int k = std::max(i + 1, d); k < n; ++k) m.brackets.push_back({i, k, std::vector<double>(n, 0.0)});

  auto B = spec.B;
  GroupOps g;
  g.identity = Point(n, 0.0);
  g.multiply = [B, d, h](const Point& a, const Point& b) {
    Point c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
    for (int k = 0; k < h; ++k) {
      double s = 0.0;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) s += B[k][i][j] * a[i] * b[j];
      c[d + k] += 0.5 * s;
    }
    return c;
  };
  g.inverse = [](const Point& a) {
    Point c(a);
    for (auto& v : c) v = -v;
    return c;
  };
  auto mult = g.multiply;
  g.rightExp = [mult](const Point& a, std::span<const double> c) { return mult(a, Point(c.begin(), c.end())); };
  m.group = g;
  m.homogeneousDim = d + 2.0 * h;
  m.normalization = "Lebesgue measure in exponential coordinates (Haar)";
  m.sampler = [d, h](Rng& rng, double box) {
    Point p(d + h);
    for (int i = 0; i < d + h; ++i) p[i] = rng.uniform(-box, box);
    return p;
  };
  json Bj = spec.B;
  m.spec = {{"type", "carnot2"}, {"d", d}, {"h", h}, {"B", Bj}};
  return m;
}

Model heisenberg() {
  CarnotSpec s{2, 1, {{{0.0, 1.0}, {-1.0, 0.0}}}};
  Model m = carnotStep2(s);
  m.name = "heisenberg";
  m.family = "heisenberg";
  m.horizontal[0] = VectorField(m.horizontal[0].components(), "X");
  m.horizontal[1] = VectorField(m.horizontal[1].components(), "Y");
  m.vertical[0] = VectorField(m.vertical[0].components(), "Z");
  m.brackets = sasakianBrackets(0.0);
  m.rho1 = 0.0;
  m.spec = {{"type", "heisenberg"}};
  return m;
}

Model sasakian(double rho) {
  if (!std::isfinite(rho)) throw DomainError("rho1 must be finite");
  if (rho == 0.0) return heisenberg();
  const MatrixRealization R = realization(rho);
  Model m;
  m.name = "sasakian(" + numStr(rho) + ")";
  m.family = "sasakian";
  m.dim = 3;
  m.coordDim = 4;
  m.rho1 = rho;
  static const char* names[] = {"X", "Y", "Z"};
  for (int f = 0; f < 3; ++f) {
    // V_E(q) = coords(M(q) E), linear in q.
    std::vector<std::vector<double>> A(4, std::vector<double>(4, 0.0));
    for (int col = 0; col < 4; ++col) {
      Point e(4, 0.0);
      e[col] = 1.0;
      Point img = R.fromMatrix(mul(R.toMatrix(e), R.gens[f]));
      for (int row = 0; row < 4; ++row) A[row][col] = img[row];
    }
    std::vector<ScalarField> comps;
    for (int row = 0; row < 4; ++row) comps.push_back(linearField(4, A[row]));
    VectorField V(std::move(comps), names[f]);
    if (f < 2) m.horizontal.push_back(V);
    else m.vertical.push_back(V);
  }
  m.density = constantField(4, 1.0);
  m.traits = {true, rho > 0, false};
  m.brackets = sasakianBrackets(rho);
  GroupOps g;
  g.identity = R.fromMatrix({1.0, 0.0, 0.0, 1.0});
  g.multiply = [R](const Point& a, const Point& b) { return R.fromMatrix(mul(R.toMatrix(a), R.toMatrix(b))); };
  g.inverse = [R](const Point& a) {
    const Mat2 q = R.toMatrix(a);
    const cplx det = q[0] * q[3] - q[1] * q[2];
    return R.fromMatrix({q[3] / det, -q[1] / det, -q[2] / det, q[0] / det});
  };
  g.rightExp = [R](const Point& a, std::span<const double> c) {
    return R.fromMatrix(mul(R.toMatrix(a), expTraceless(R.algebra(c))));
  };
  m.group = g;
  m.normalization = rho > 0 ? "ambient matrix coordinates; Haar measure not normalized (no volumes computed)"
                            : "ambient matrix coordinates; Haar measure not normalized (volumes use the chart model)";
  m.sampler = [R, rho](Rng& rng, double box) {
    if (rho > 0) {
      Point q(4);
      double n2 = 0.0;
      for (auto& v : q) {
        v = rng.normal();
        n2 += v * v;
      }
      for (auto& v : q) v /= std::sqrt(n2);
      return q;
    }
    std::array<double, 3> c{};
    for (auto& v : c) v = rng.uniform(-box, box);
    return R.fromMatrix(expTraceless(R.algebra(c)));
  };
  m.spec = {{"type", "sasakian"}, {"rho1", rho}};
  return m;
}

Model sasakianChart(double rho) {
  if (!std::isfinite(rho)) throw DomainError("rho1 must be finite");
  Model m;
  m.name = "sasakian-chart(" + numStr(rho) + ")";
  m.family = "sasakian-chart";
  m.dim = m.coordDim = 3;
  m.rho1 = rho;
  // Chart vector of the left-invariant field F_col: column col of
  // Psi(s) = I + M/2 + beta(mu) M^2, M = ad_s, mu = tr(M^2)/2.
  auto entryJet = [rho](int row, int col) {
    return [rho, row, col](const Point& s, int order) {
      std::array<TaylorJet, 3> sj;
      for (int i = 0; i < 3; ++i) sj[i] = TaylorJet::variable(3, order, i, s[i]);
      std::array<std::array<TaylorJet, 3>, 3> M;
      const TaylorJet zero(3, order);
      M[0] = {zero, -rho * sj[2], rho * sj[1]};
      M[1] = {rho * sj[2], zero, -rho * sj[0]};
      M[2] = {-sj[1], sj[0], zero};
      TaylorJet mu = -rho * (sj[0] * sj[0] + sj[1] * sj[1]) - rho * rho * (sj[2] * sj[2]);
      TaylorJet beta = compose(mu, chartBetaDerivatives(mu.value(), order));
      TaylorJet m2(3, order);
      for (int k = 0; k < 3; ++k) m2 += M[row][k] * M[k][col];
      TaylorJet out = beta * m2;
      out.addScaled(M[row][col], 0.5);
      if (row == col) out += 1.0;
      return out;
    };
  };
  auto entryValue = [rho](int row, int col) {
    return [rho, row, col](const Point& s) {
      const auto M = adMatrix(rho, s.data());
      const double mu = -rho * (s[0] * s[0] + s[1] * s[1]) - rho * rho * s[2] * s[2];
      double m2 = 0.0;
      for (int k = 0; k < 3; ++k) m2 += M[row][k] * M[k][col];
      return (row == col ? 1.0 : 0.0) + 0.5 * M[row][col] + chartBetaValue(mu) * m2;
    };
  };
  static const char* names[] = {"X", "Y", "Z"};
  for (int col = 0; col < 3; ++col) {
    std::vector<ScalarField> comps;
    for (int row = 0; row < 3; ++row) {
      comps.push_back(opaqueField(3, entryJet(row, col),
                                  "psi" + std::to_string(row) + std::to_string(col), entryValue(row, col)));
    }
    VectorField V(std::move(comps), names[col]);
    if (col < 2) m.horizontal.push_back(V);
    else m.vertical.push_back(V);
  }
  m.density = opaqueField(
      3,
      [rho](const Point& s, int order) {
        std::array<TaylorJet, 3> sj;
        for (int i = 0; i < 3; ++i) sj[i] = TaylorJet::variable(3, order, i, s[i]);
        TaylorJet mu = -rho * (sj[0] * sj[0] + sj[1] * sj[1]) - rho * rho * (sj[2] * sj[2]);
        TaylorJet S = compose(mu, chartSincDerivatives(mu.value(), order));
        return S * S;
      },
      "haar-density",
      [rho](const Point& s) {
        const double mu = -rho * (s[0] * s[0] + s[1] * s[1]) - rho * rho * s[2] * s[2];
        const double S = chartSincDerivatives(mu, 0)[0];
        return S * S;
      });
  m.traits = {true, false, true};
  m.brackets = sasakianBrackets(rho);
  if (rho != 0.0) {
    const MatrixRealization R = realization(rho);
    auto toGroup = [R](const Point& s) { return expTraceless(R.algebra(s)); };
    auto toChart = [R](const Mat2& g) { return R.algebraCoords(logUnimodular(g)); };
    GroupOps g;
    g.identity = Point(3, 0.0);
    g.multiply = [toGroup, toChart](const Point& a, const Point& b) {
      return toChart(mul(toGroup(a), toGroup(b)));
    };
    g.inverse = [](const Point& a) {
      Point c(a);
      for (auto& v : c) v = -v;
      return c;
    };
    g.rightExp = [toGroup, toChart](const Point& a, std::span<const double> c) {
      return toChart(mul(toGroup(a), toGroup(Point(c.begin(), c.end()))));
    };
    m.group = g;
    const double r = std::abs(rho);
    // Keep |mu| away from the first pole at -4 pi^2.
    m.chartBox = rho < 0 ? std::vector<double>{8.0 / std::sqrt(r), 8.0 / std::sqrt(r), 0.8 * 2 * kPi / r}
                         : std::vector<double>{0.45 * 2 * kPi / std::sqrt(r), 0.45 * 2 * kPi / std::sqrt(r),
                                               0.45 * 2 * kPi / r};
  } else {
    m.group = heisenberg().group;
    m.homogeneousDim = 4.0;
  }
  m.normalization = "Haar measure in exponential coordinates, equal to Lebesgue measure at the identity";
  auto box = m.chartBox;
  m.sampler = [box](Rng& rng, double b) {
    Point p(3);
    for (int i = 0; i < 3; ++i) {
      const double lim = box.empty() ? b : std::min(b, box[i]);
      p[i] = rng.uniform(-lim, lim);
    }
    return p;
  };
  m.spec = {{"type", "sasakian"}, {"rho1", rho}, {"chart", true}};
  return m;
}

// ---------------------------------------------------------------------------

namespace {
// Values of [V, W] at x.
std::vector<double> bracketValues(const VectorField& V, const VectorField& W, const Point& x) {
  const int n = V.dim();
  std::vector<double> out(n, 0.0);
  std::vector<TaylorJet> vj = V.jets(x, 1), wj = W.jets(x, 1);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
      s += vj[k].value() * wj[i].coeff(1 + k) - wj[k].value() * vj[i].coeff(1 + k);
    }
    out[i] = s;
  }
  return out;
}
}  // namespace

double bracketResidual(const Model& m, const BracketRelation& rel, const Point& x) {
  const int n = m.coordDim;
  std::vector<double> lhs = bracketValues(m.frame(rel.a), m.frame(rel.b), x);
  std::vector<double> frame(m.frameSize() * n);
  m.frameValues(x, frame.data());
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    double rhs = 0.0;
    for (int c = 0; c < m.frameSize(); ++c) rhs += rel.coeffs[c] * frame[c * n + i];
    worst = std::max(worst, std::abs(lhs[i] - rhs));
  }
  return worst;
}

int hormanderRank(const Model& m, const Point& x) {
  const int n = m.coordDim;
  std::vector<std::vector<double>> vecs;
  std::vector<double> buf(n);
  for (const auto& X : m.horizontal) {
    X.values(x, buf.data());
    vecs.push_back(buf);
  }
  for (int i = 0; i < m.d(); ++i)
    for (int j = i + 1; j < m.d(); ++j) vecs.push_back(bracketValues(m.horizontal[i], m.horizontal[j], x));
  Eigen::MatrixXd A(n, vecs.size());
  for (std::size_t c = 0; c < vecs.size(); ++c)
    for (int r = 0; r < n; ++r) A(r, c) = vecs[c][r];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-9 * sv(0)) ++rank;
  return rank;
}

json ValidationReport::toJson() const {
  return {{"ok", ok},
          {"maxBracketResidual", maxBracketResidual},
          {"minRank", minRank},
          {"minDensity", minDensity},
          {"problems", problems}};
}

ValidationReport validateModel(const Model& m, int samples, std::uint64_t seed) {
  ValidationReport r;
  r.minRank = m.dim;
  r.minDensity = std::numeric_limits<double>::infinity();
  if (m.d() < 1) {
    r.ok = false;
    r.problems.push_back("horizontal frame is empty");
  }
  for (const auto& F : m.horizontal)
    if (F.dim() != m.coordDim) r.problems.push_back("frame field " + F.name() + " has wrong arity");
  for (const auto& F : m.vertical)
    if (F.dim() != m.coordDim) r.problems.push_back("frame field " + F.name() + " has wrong arity");
  if (!r.problems.empty()) {
    r.ok = false;
    return r;
  }
  for (int s = 0; s < samples; ++s) {
    Rng rng(seed, static_cast<std::uint64_t>(s));
    const Point x = m.samplePoint(rng, 1.0);
    for (const auto& rel : m.brackets) r.maxBracketResidual = std::max(r.maxBracketResidual, bracketResidual(m, rel, x));
    r.minRank = std::min(r.minRank, hormanderRank(m, x));
    r.minDensity = std::min(r.minDensity, m.density.value(x));
  }
  if (r.maxBracketResidual > 1e-10) {
    r.ok = false;
    r.problems.push_back("declared bracket relations violated (residual " + numStr(r.maxBracketResidual) + ")");
  }
  if (r.minRank < m.dim) {
    r.ok = false;
    r.problems.push_back("bracket-generating condition fails (rank " + std::to_string(r.minRank) + ")");
  }
  if (!(r.minDensity > 0.0)) {
    r.ok = false;
    r.problems.push_back("density not strictly positive");
  }
  return r;
}

// ---------------------------------------------------------------------------

CarnotSpec carnotSpecFromJson(const json& j) {
  CarnotSpec s;
  s.d = j.at("d").get<int>();
  s.h = j.at("h").get<int>();
  if (s.d < 1 || s.h < 1) throw ConfigError("carnot2: d and h must be positive");
  s.B.assign(s.h, std::vector<std::vector<double>>(s.d, std::vector<double>(s.d, 0.0)));
  if (j.contains("B")) {
    s.B = j.at("B").get<std::vector<std::vector<std::vector<double>>>>();
  }
  if (j.contains("entries")) {
    for (const auto& e : j.at("entries")) {
      const int k = e.at(0).get<int>() - 1, i = e.at(1).get<int>() - 1, l = e.at(2).get<int>() - 1;
      if (k < 0 || k >= s.h || i < 0 || i >= s.d || l < 0 || l >= s.d) {
        throw ConfigError("carnot2: structure-constant index out of range");
      }
      s.B[k][i][l] = e.at(3).get<double>();
    }
  }
  return s;
}

namespace {

Model customModel(const json& j) {
  const auto vars = j.at("variables").get<std::vector<std::string>>();
  const int n = static_cast<int>(vars.size());
  Model m;
  m.name = j.value("name", std::string("custom"));
  m.family = "custom";
  m.coordDim = n;
  m.dim = j.value("dim", n);
  auto fields = [&](const char* key, const char* prefix) {
    std::vector<VectorField> out;
    if (!j.contains(key)) return out;
    int idx = 0;
    for (const auto& f : j.at(key)) {
      const auto comps = f.get<std::vector<std::string>>();
      if (static_cast<int>(comps.size()) != n) throw ConfigError(std::string(key) + " field has wrong arity");
      std::vector<ScalarField> c;
      for (const auto& e : comps) c.push_back(parseExpression(e, vars));
      out.emplace_back(std::move(c), prefix + std::to_string(++idx));
    }
    return out;
  };
  m.horizontal = fields("horizontal", "X");
  m.vertical = fields("vertical", "Z");
  if (m.horizontal.empty()) throw ConfigError("custom model needs a horizontal frame");
  m.density = parseExpression(j.value("density", std::string("1")), vars);
  m.traits = {false, j.value("compact", false), j.value("globalChart", true)};
  if (j.contains("brackets")) {
    for (const auto& b : j.at("brackets")) {
      BracketRelation rel{b.at("a").get<int>(), b.at("b").get<int>(), b.at("coeffs").get<std::vector<double>>()};
      if (static_cast<int>(rel.coeffs.size()) != m.frameSize())
        throw ConfigError("bracket coefficients must cover the whole frame");
      m.brackets.push_back(rel);
    }
  }
  m.normalization = "density as supplied";
  m.spec = j;
  return m;
}

}  // namespace

Model modelFromJson(const json& j) {
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "euclidean") return euclidean(j.value("n", 2));
    if (type == "heisenberg") return heisenberg();
    if (type == "sasakian") {
      const double rho = j.at("rho1").get<double>();
      return j.value("chart", false) ? sasakianChart(rho) : sasakian(rho);
    }
    if (type == "carnot2") return carnotStep2(carnotSpecFromJson(j));
    if (type == "custom") return customModel(j);
    throw ConfigError("unknown model type '" + type + "'");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed model definition: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

json modelToJson(const Model& m) { return m.spec; }

Model modelFromRef(const std::string& ref) {
  static const std::regex call(R"(^\s*([a-z0-9\-]+)\s*(?:\(\s*([^)]*)\s*\))?\s*$)");
  std::smatch mt;
  if (std::regex_match(ref, mt, call)) {
    const std::string name = mt[1];
    const std::string arg = mt[2];
    auto num = [&](double dflt) {
      if (arg.empty()) return dflt;
      try {
        return std::stod(arg);
      } catch (...) {
        throw ConfigError("bad model argument in '" + ref + "'");
      }
    };
    if (name == "heisenberg") return heisenberg();
    if (name == "euclidean") return euclidean(static_cast<int>(num(2)));
    if (name == "sasakian") return sasakian(num(1));
    if (name == "sasakian-chart") return sasakianChart(num(-1));
  }
  std::ifstream in(ref);
  if (!in) throw ConfigError("unknown model reference '" + ref + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse model file '" + ref + "': " + e.what());
  }
  return modelFromJson(j);
}

}  // namespace srlab
