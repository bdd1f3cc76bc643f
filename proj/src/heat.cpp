#include "srlab/heat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "srlab/error.hpp"
#include "srlab/parallel.hpp"

namespace srlab {

namespace {

constexpr std::size_t kBlock = 8192;

template <class F>
void forBlocks(std::size_t n, F&& body) {
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  parallelFor(blocks, [&](std::size_t b) {
    const std::size_t lo = b * kBlock, hi = std::min(n, lo + kBlock);
    for (std::size_t j = lo; j < hi; ++j) body(j);
  });
}

std::uint8_t lowerBits(int dim) { return static_cast<std::uint8_t>((1u << dim) - 1u); }
std::uint8_t upperBits(int dim) { return static_cast<std::uint8_t>(((1u << dim) - 1u) << 4); }

}  // namespace

GridOperator::GridOperator(const Model& m, GridSpec grid) : grid_(std::move(grid)), d_(m.d()) {
  const int n = grid_.dim();
  if (m.coordDim != n || m.dim != n)
    throw DomainError("grid operator needs a chart model of dimension " + std::to_string(n));
  if (n > 4) throw DomainError("grid operator supports at most 4 chart dimensions");
  if (!m.chartBox.empty())
    for (int k = 0; k < n; ++k)
      if (grid_.lo[k] < -m.chartBox[k] || grid_.hi[k] > m.chartBox[k])
        throw DomainError("grid box leaves the trusted chart region of " + m.name);
  requireCellBudget(grid_);

  const std::size_t N = grid_.size();
  for (int k = 0; k < n; ++k) {
    stride_.push_back(grid_.stride(k));
    h_.push_back(grid_.spacing(k));
  }
  faces_.assign(N, 0);
  rho_.assign(N, 1.0);
  const int F = m.frameSize();
  std::vector<std::vector<double>> coef(static_cast<std::size_t>(F) * n, std::vector<double>(N));
  std::vector<double> buf(static_cast<std::size_t>(F) * n);
  for (std::size_t j = 0; j < N; ++j) {
    int ijk[8];
    grid_.unravel(j, ijk);
    for (int k = 0; k < n; ++k) {
      if (ijk[k] == 0) faces_[j] |= static_cast<std::uint8_t>(1u << k);
      if (ijk[k] == grid_.n[k] - 1) faces_[j] |= static_cast<std::uint8_t>(1u << (4 + k));
    }
    const Point p = grid_.node(j);
    m.frameValues(p, buf.data());
    for (std::size_t c = 0; c < buf.size(); ++c) coef[c][j] = buf[c];
    rho_[j] = m.density.value(p);
    if (!(rho_[j] > 0)) throw DomainError("density is not positive on the grid of " + m.name);
  }

  double rhoRatio = 1.0;
  for (std::size_t j = 0; j < N; ++j)
    for (int k = 0; k < n; ++k)
      if (!(faces_[j] & (1u << (4 + k)))) {
        const double a = rho_[j], b = rho_[j + stride_[k]];
        rhoRatio = std::max(rhoRatio, std::max(a / b, b / a));
      }

  terms_.resize(F);
  for (int i = 0; i < F; ++i) {
    double rowBound = 0.0;
    for (int k = 0; k < n; ++k) {
      auto& a = coef[static_cast<std::size_t>(i) * n + k];
      double amax = 0.0;
      for (double v : a) amax = std::max(amax, std::abs(v));
      if (amax == 0.0) continue;
      rowBound += amax / h_[k];
      Term t{k, std::move(a), {}};
      t.ra.resize(N);
      for (std::size_t j = 0; j < N; ++j) t.ra[j] = rho_[j] * t.a[j];
      terms_[i].push_back(std::move(t));
    }
    if (i < d_) lambdaBound_ += rowBound * rowBound;
  }
  lambdaBound_ *= rhoRatio;
}

double GridOperator::stepBound(double cfl) const {
  if (lambdaBound_ == 0.0) return std::numeric_limits<double>::infinity();
  return cfl * 2.0 / lambdaBound_;
}

void GridOperator::apply(const std::vector<double>& u, std::vector<double>& out) const {
  const std::size_t N = grid_.size();
  const int n = grid_.dim();
  const std::uint8_t lowMask = lowerBits(n), upMask = upperBits(n);
  thread_local std::vector<double> wpStore, wmStore;
  auto& wp = wpStore;
  auto& wm = wmStore;
  wp.resize(N);
  wm.resize(N);
  out.assign(N, 0.0);
  for (int i = 0; i < d_; ++i) {
    const auto& terms = terms_[i];
    forBlocks(N, [&](std::size_t j) {
      double p = 0.0, q = 0.0;
      const std::uint8_t f = faces_[j];
      if (!(f & upMask))
        for (const auto& t : terms) p += t.a[j] * (u[j + stride_[t.axis]] - u[j]) / h_[t.axis];
      if (!(f & lowMask))
        for (const auto& t : terms) q += t.a[j] * (u[j] - u[j - stride_[t.axis]]) / h_[t.axis];
      wp[j] = p;
      wm[j] = q;
    });
    forBlocks(N, [&](std::size_t j) {
      if (faces_[j]) return;
      double acc = 0.0;
      for (const auto& t : terms) {
        const std::size_t s = stride_[t.axis];
        acc += (t.ra[j] * wp[j] - t.ra[j - s] * wp[j - s] + t.ra[j + s] * wm[j + s] - t.ra[j] * wm[j]) / h_[t.axis];
      }
      out[j] += acc;
    });
  }
  forBlocks(N, [&](std::size_t j) { out[j] *= 0.5 / rho_[j]; });
}

double GridOperator::applyAt(const std::vector<double>& u, std::size_t j) const {
  if (faces_[j]) throw DomainError("applyAt needs an interior node");
  double acc = 0.0;
  for (int i = 0; i < d_; ++i) {
    const auto& terms = terms_[i];
    auto fwd = [&](std::size_t jj) {
      double p = 0.0;
      for (const auto& t : terms) p += t.a[jj] * (u[jj + stride_[t.axis]] - u[jj]) / h_[t.axis];
      return p;
    };
    auto bwd = [&](std::size_t jj) {
      double q = 0.0;
      for (const auto& t : terms) q += t.a[jj] * (u[jj] - u[jj - stride_[t.axis]]) / h_[t.axis];
      return q;
    };
    const double wpj = fwd(j), wmj = bwd(j);
    for (const auto& t : terms) {
      const std::size_t s = stride_[t.axis];
      acc += (t.ra[j] * wpj - t.ra[j - s] * fwd(j - s) + t.ra[j + s] * bwd(j + s) - t.ra[j] * wmj) / h_[t.axis];
    }
  }
  return 0.5 * acc / rho_[j];
}

double GridOperator::derivative(const std::vector<double>& u, int field, std::size_t j, bool logOf) const {
  if (faces_[j]) throw DomainError("derivative needs an interior node");
  double acc = 0.0;
  for (const auto& t : terms_.at(field)) {
    const std::size_t s = stride_[t.axis];
    double up = u[j + s], dn = u[j - s];
    if (logOf) {
      if (!(up > 0 && dn > 0)) throw DomainError("ln u needs u > 0 on the stencil");
      up = std::log(up);
      dn = std::log(dn);
    }
    acc += t.a[j] * (up - dn) / (2.0 * h_[t.axis]);
  }
  return acc;
}

nlohmann::json HeatConfig::toJson() const { return {{"cfl", cfl}, {"times", times}}; }

HeatConfig HeatConfig::fromJson(const nlohmann::json& j) {
  HeatConfig c;
  c.cfl = j.value("cfl", c.cfl);
  if (j.contains("times")) c.times = j.at("times").get<std::vector<double>>();
  return c;
}

const GridField& HeatSolution::at(double t) const {
  for (const auto& s : snapshots)
    if (std::abs(s.time - t) <= 1e-12 * std::max(1.0, std::abs(t))) return s;
  throw DomainError("no heat snapshot stored at t = " + std::to_string(t));
}

HeatSolution solveHeat(const Model& m, const GridField& f0, double T, const HeatConfig& cfg) {
  if (!(cfg.cfl > 0.0 && cfg.cfl <= 0.25))
    throw ConfigError("CFL violation: the explicit scheme needs 0 < cfl <= 0.25, got " + std::to_string(cfg.cfl));
  if (!(T > 0)) throw ConfigError("heat: final time must be positive");
  std::vector<double> times;
  for (double t : cfg.times) {
    if (!(t > 0 && t <= T)) throw ConfigError("heat: snapshot times must lie in (0, T]");
    times.push_back(t);
  }
  times.push_back(T);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end(), [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
              times.end());

  GridOperator op(m, f0.grid);
  const double dtMax = op.stepBound(cfg.cfl);
  HeatSolution sol;
  sol.grid = f0.grid;
  std::vector<double> u = f0.values, Lu;
  const std::size_t N = u.size();
  for (std::size_t j = 0; j < N; ++j)
    if (!op.isInterior(j)) u[j] = 0.0;
  GridField snap(f0.grid);
  snap.values = u;
  snap.time = 0.0;
  sol.snapshots.push_back(snap);
  sol.supNorm.push_back(snap.maxValue());
  sol.minValue = std::numeric_limits<double>::infinity();

  double now = 0.0;
  for (double target : times) {
    const double seg = target - now;
    const auto steps = static_cast<std::size_t>(std::ceil(seg / dtMax - 1e-12));
    const double dt = seg / static_cast<double>(std::max<std::size_t>(steps, 1));
    for (std::size_t s = 0; s < steps; ++s) {
      op.apply(u, Lu);
      for (std::size_t j = 0; j < N; ++j) u[j] += dt * Lu[j];
    }
    sol.steps += steps;
    sol.dt = std::max(sol.dt, dt);
    now = target;
    for (std::size_t j = 0; j < N; ++j)
      if (!std::isfinite(u[j]))
        throw ConvergenceError("heat solver produced a non-finite value at node " + std::to_string(j) +
                               " before t = " + std::to_string(target) + " (dt = " + std::to_string(dt) + ")");
    snap.values = u;
    snap.time = target;
    sol.snapshots.push_back(snap);
    sol.supNorm.push_back(snap.maxValue());
    sol.minValue = std::min(sol.minValue, snap.minValue());
  }
  return sol;
}

ScalarField bumpField(const Point& center, const std::vector<double>& radii) {
  const int n = static_cast<int>(center.size());
  if (radii.size() != center.size()) throw ConfigError("bump: radii and center differ in length");
  auto value = [center, radii, n](const Point& x) {
    double q = 0.0;
    for (int k = 0; k < n; ++k) q += ((x[k] - center[k]) / radii[k]) * ((x[k] - center[k]) / radii[k]);
    return q < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - q)) : 0.0;
  };
  auto jet = [center, radii, n](const Point& x, int order) {
    TaylorJet q = TaylorJet::constant(n, order, 0.0);
    for (int k = 0; k < n; ++k) {
      TaylorJet s = (TaylorJet::variable(n, order, k, x[k]) - TaylorJet::constant(n, order, center[k])) *
                    TaylorJet::constant(n, order, 1.0 / radii[k]);
      q += s * s;
    }
    if (q.value() >= 1.0) return TaylorJet(n, order);
    return exp(TaylorJet::constant(n, order, 1.0) - reciprocal(TaylorJet::constant(n, order, 1.0) - q));
  };
  return opaqueField(n, jet, "bump", value);
}

namespace {

bool clipToBox(const Model& m, Point& x) {
  bool clipped = false;
  for (std::size_t k = 0; k < m.chartBox.size() && k < x.size(); ++k) {
    const double b = m.chartBox[k];
    if (x[k] > b) { x[k] = b; clipped = true; }
    if (x[k] < -b) { x[k] = -b; clipped = true; }
  }
  return clipped;
}

}  // namespace

std::vector<SampleSet> samplePathsAt(const Model& m, const Point& x0, const std::vector<double>& times,
                                     std::size_t n, double dt, std::uint64_t seed) {
  if (times.empty()) throw ConfigError("samplePaths: no observation times");
  if (n == 0) throw ConfigError("samplePaths: need at least one path");
  if (static_cast<int>(x0.size()) != m.coordDim) throw ConfigError("samplePaths: start point has the wrong length");
  std::vector<std::size_t> steps;
  double prev = 0.0;
  for (double t : times) {
    if (!(t > prev)) throw ConfigError("samplePaths: times must be positive and increasing");
    if (!(dt > 0 && dt <= t)) throw ConfigError("samplePaths: need 0 < dt <= t");
    steps.push_back(static_cast<std::size_t>(std::ceil((t - prev) / dt - 1e-9)));
    prev = t;
  }
  const bool useGroup = m.group.has_value();
  const int d = m.d(), F = m.frameSize(), N = m.coordDim;
  std::vector<SampleSet> out(times.size());
  std::size_t cumulative = 0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    cumulative += steps[k];
    out[k].endpoints.resize(n);
    out[k].x0 = x0;
    out[k].t = times[k];
    out[k].stepCount = cumulative;
    out[k].seed = seed;
    out[k].stepperId = useGroup ? "group-exp" : "stratonovich-heun";
  }
  std::vector<std::uint8_t> flags(n, 0);
  parallelFor(n, [&](std::size_t path) {
    Rng rng(seed, path);
    Point x = x0;
    std::vector<double> c(F, 0.0), dW(d), A(static_cast<std::size_t>(F) * N), B(A.size());
    Point tilde(N);
    double prevT = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double h = (times[k] - prevT) / static_cast<double>(steps[k]);
      const double scale = std::sqrt(2.0 * h);
      for (std::size_t s = 0; s < steps[k]; ++s) {
        for (int i = 0; i < d; ++i) dW[i] = scale * rng.normal();
        if (useGroup) {
          for (int i = 0; i < d; ++i) c[i] = dW[i];
          x = m.group->rightExp(x, c);
        } else {
          m.frameValues(x, A.data());
          for (int a = 0; a < N; ++a) {
            double v = x[a];
            for (int i = 0; i < d; ++i) v += A[static_cast<std::size_t>(i) * N + a] * dW[i];
            tilde[a] = v;
          }
          m.frameValues(tilde, B.data());
          for (int a = 0; a < N; ++a)
            for (int i = 0; i < d; ++i)
              x[a] += 0.5 * (A[static_cast<std::size_t>(i) * N + a] + B[static_cast<std::size_t>(i) * N + a]) * dW[i];
        }
        if (!m.chartBox.empty() && clipToBox(m, x)) flags[path] = 1;
      }
      for (double v : x)
        if (!std::isfinite(v)) flags[path] = 1;
      out[k].endpoints[path] = x;
      prevT = times[k];
    }
  });
  std::size_t flagged = 0;
  for (auto f : flags) flagged += f;
  for (auto& s : out) s.flagged = flagged;
  return out;
}

SampleSet samplePaths(const Model& m, const Point& x0, double t, std::size_t n, double dt, std::uint64_t seed) {
  return samplePathsAt(m, x0, {t}, n, dt, seed).front();
}

CI estimateSemigroup(const SampleSet& s, const PointFn& f) {
  const std::size_t n = s.endpoints.size();
  if (n == 0) throw DomainError("estimateSemigroup: empty sample set");
  std::vector<double> v(n);
  parallelFor(n, [&](std::size_t i) { v[i] = f(s.endpoints[i]); });
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var = n > 1 ? var / static_cast<double>(n - 1) : 0.0;
  return {mean, 1.96 * std::sqrt(var / static_cast<double>(n))};
}

CI estimateSemigroup(const SampleSet& s, const ScalarField& f) {
  return estimateSemigroup(s, PointFn([&f](const Point& p) { return f.value(p); }));
}

CI estimateTranslated(const Model& m, const SampleSet& fromIdentity, const Point& x, const PointFn& f) {
  if (!m.group) throw DomainError("estimateTranslated needs a group model");
  const auto& G = *m.group;
  return estimateSemigroup(fromIdentity, PointFn([&](const Point& xi) { return f(G.multiply(x, xi)); }));
}

namespace {

LiYauValue liYauFromPieces(double gammaLn, double gammaZLn, double luOverU, const CDParams& p, double t) {
  if (!(t > 0)) throw DomainError("Li-Yau needs t > 0");
  if (!std::isfinite(p.d)) throw DomainError("Li-Yau needs a finite dimension d");
  const double c = 1.0 + 3.0 * p.kappa / (2.0 * p.rho2);
  LiYauValue v;
  v.lhs = gammaLn + (2.0 * p.rho2 / 3.0) * t * gammaZLn;
  v.rhs = (c - 2.0 * p.rho1 / 3.0 * t) * luOverU + p.d * p.rho1 * p.rho1 * t / 6.0 - p.rho1 * p.d / 2.0 * c +
          p.d * c * c / (2.0 * t);
  v.deficit = v.rhs - v.lhs;
  v.deficitZero = c * luOverU + p.d * c * c / (2.0 * t) - v.lhs;
  return v;
}

}  // namespace

LiYauValue liYauDeficit(const GridOperator& op, const HeatSolution& u, const CDParams& p, const Point& x, double t) {
  const GridField& snap = u.at(t);
  const std::size_t j = op.grid().nearest(x);
  if (!op.isInterior(j)) throw DomainError("Li-Yau sample is on the grid boundary");
  const auto& v = snap.values;
  if (!(v[j] > 0)) throw DomainError("Li-Yau needs u > 0 at the sample node");
  double G = 0.0, GZ = 0.0;
  for (int i = 0; i < op.fieldCount(); ++i) {
    const double g = op.derivative(v, i, j, true);
    (i < op.horizontalCount() ? G : GZ) += g * g;
  }
  return liYauFromPieces(G, GZ, op.applyAt(v, j) / v[j], p, t);
}

LiYauValue liYauDeficitAnalytic(const Model& m, const ScalarField& u, const CDParams& p, const Point& x, double t) {
  const double val = u.value(x);
  if (!(val > 0)) throw DomainError("Li-Yau needs u > 0");
  return liYauFromPieces(gammaForm(m, u, u, x) / (val * val), gammaZForm(m, u, u, x) / (val * val),
                         applyL(m, u, x) / val, p, t);
}

double harnackFactor(const CDParams& p, double s, double t, double dist) {
  if (!(s > 0 && s < t)) throw DomainError("Harnack needs 0 < s < t");
  if (!std::isfinite(p.d)) throw DomainError("Harnack needs a finite dimension d");
  const double D = p.D();
  return std::pow(t / s, D / 2.0) * std::exp(D / p.d * dist * dist / (4.0 * (t - s)));
}

HarnackValue harnackDeficit(const CI& psfx, const CI& ptfy, double s, double t, const CDParams& p, double dist) {
  const double F = harnackFactor(p, s, t, dist);
  HarnackValue v;
  v.lhs = psfx.mean;
  v.rhs = ptfy.mean * F;
  v.deficit = v.rhs - v.lhs;
  v.halfWidth = psfx.halfWidth + F * ptfy.halfWidth;
  return v;
}

CI ballHittingProbability(const SampleSet& atTime, const Point& x, double r, const DistanceFn& dist) {
  return estimateSemigroup(atTime, PointFn([&](const Point& y) { return dist(x, y) < r ? 1.0 : 0.0; }));
}

BallHittingScan ballHittingScan(const Model& m, const Point& x, double r, const std::vector<double>& As,
                                std::size_t paths, double dt, std::uint64_t seed, const DistanceFn& dist) {
  std::vector<double> A = As;
  std::sort(A.begin(), A.end());
  for (double a : A)
    if (!(a > 0 && a < 1)) throw ConfigError("ball hitting: A must lie in (0, 1)");
  std::vector<double> times;
  for (double a : A) times.push_back(a * r * r);
  auto sets = samplePathsAt(m, x, times, paths, dt, seed);
  BallHittingScan out;
  out.A = A;
  for (std::size_t k = 0; k < A.size(); ++k) {
    out.probability.push_back(ballHittingProbability(sets[k], x, r, dist));
    if (out.probability.back().mean >= 0.5 - out.probability.back().halfWidth) out.bestA = A[k];
  }
  return out;
}

PoincareValue poincareRatio(const Model& m, const ScalarField& f, const GridField& dist, double r) {
  const GridSpec& g = dist.grid;
  if (m.coordDim != g.dim()) throw DomainError("Poincare: grid and model dimensions differ");
  std::vector<std::size_t> nodes;
  for (std::size_t j = 0; j < g.size(); ++j)
    if (dist.values[j] < r) {
      if (g.isBoundary(j)) throw DomainError("Poincare: the ball touches the grid boundary");
      nodes.push_back(j);
    }
  PoincareValue out;
  out.nodes = nodes.size();
  if (nodes.empty()) throw DomainError("Poincare: the ball contains no grid nodes");
  std::vector<double> w(nodes.size()), fv(nodes.size()), gv(nodes.size());
  const int n = m.coordDim, F = m.d();
  parallelFor(nodes.size(), [&](std::size_t i) {
    const Point p = g.node(nodes[i]);
    std::vector<double> A(static_cast<std::size_t>(m.frameSize()) * n);
    m.frameValues(p, A.data());
    const TaylorJet jet = f.jet(p, 1);
    double G = 0.0;
    for (int a = 0; a < F; ++a) {
      double xf = 0.0;
      for (int k = 0; k < n; ++k) xf += A[static_cast<std::size_t>(a) * n + k] * jet.coeff(static_cast<std::size_t>(1 + k));
      G += xf * xf;
    }
    w[i] = m.density.value(p);
    fv[i] = jet.value();
    gv[i] = G;
  });
  double W = 0.0, mean = 0.0, gam = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    W += w[i];
    mean += w[i] * fv[i];
    gam += w[i] * gv[i];
  }
  mean /= W;
  double num = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) num += w[i] * (fv[i] - mean) * (fv[i] - mean);
  const double cell = g.cellVolume();
  out.numerator = num * cell;
  out.denominator = r * r * gam * cell;
  out.defined = out.denominator > 0.0;
  out.ratio = out.defined ? out.numerator / out.denominator : 0.0;
  return out;
}

nlohmann::json CylinderParams::toJson() const {
  return {{"beta", beta}, {"gamma", gamma}, {"delta", delta}, {"alpha", alpha}, {"eta", eta}};
}

CylinderParams CylinderParams::fromJson(const nlohmann::json& j) {
  CylinderParams c;
  c.beta = j.value("beta", c.beta);
  c.gamma = j.value("gamma", c.gamma);
  c.delta = j.value("delta", c.delta);
  c.alpha = j.value("alpha", c.alpha);
  c.eta = j.value("eta", c.eta);
  return c;
}

ParabolicHarnackValue parabolicHarnack(const HeatSolution& u, const GridField& dist, double s, double r,
                                       const CylinderParams& c) {
  if (!(0 < c.beta && c.beta < c.gamma && c.gamma < c.delta && c.delta < c.alpha))
    throw ConfigError("parabolic Harnack needs 0 < beta < gamma < delta < alpha");
  if (!(c.eta > 0 && c.eta < 1)) throw ConfigError("parabolic Harnack needs eta in (0, 1)");
  const double r2 = r * r, eps = 1e-12;
  ParabolicHarnackValue v;
  v.supMinus = -std::numeric_limits<double>::infinity();
  v.infPlus = std::numeric_limits<double>::infinity();
  for (const auto& snap : u.snapshots) {
    const bool minus = snap.time >= s + c.beta * r2 - eps && snap.time <= s + c.gamma * r2 + eps;
    const bool plus = snap.time >= s + c.delta * r2 - eps && snap.time <= s + c.alpha * r2 + eps;
    if (!minus && !plus) continue;
    for (std::size_t j = 0; j < snap.values.size(); ++j) {
      if (!(dist.values[j] < c.eta * r)) continue;
      if (minus) {
        v.supMinus = std::max(v.supMinus, snap.values[j]);
        ++v.samplesMinus;
      }
      if (plus) {
        v.infPlus = std::min(v.infPlus, snap.values[j]);
        ++v.samplesPlus;
      }
    }
  }
  if (v.samplesMinus == 0 || v.samplesPlus == 0)
    throw DomainError("parabolic Harnack: no stored snapshot inside one of the cylinder windows");
  v.ratio = v.infPlus > 0 ? v.supMinus / v.infPlus : std::numeric_limits<double>::infinity();
  return v;
}

}  // namespace srlab
