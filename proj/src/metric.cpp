#include "srlab/metric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "srlab/error.hpp"
#include "srlab/parallel.hpp"
#include "srlab/random.hpp"

namespace srlab {


nlohmann::json EikonalConfig::toJson() const {
  return {{"scheme", scheme}, {"directions", directions}, {"stepCells", stepCells}, {"tol", tol},
          {"maxSweeps", maxSweeps}, {"stepMults", stepMults}, {"sourceLevels", sourceLevels},
          {"sourceScale", sourceScale}};
}

EikonalConfig EikonalConfig::fromJson(const nlohmann::json& j) {
  EikonalConfig c;
  c.scheme = j.value("scheme", c.scheme);
  c.directions = j.value("directions", c.directions);
  c.stepCells = j.value("stepCells", c.stepCells);
  c.tol = j.value("tol", c.tol);
  c.maxSweeps = j.value("maxSweeps", c.maxSweeps);
  c.stepMults = j.value("stepMults", c.stepMults);
  c.sourceLevels = j.value("sourceLevels", c.sourceLevels);
  c.sourceScale = j.value("sourceScale", c.sourceScale);
  if (c.sourceLevels < 0 || c.sourceLevels > 6 || !(c.sourceScale > 0 && c.sourceScale < 1))
    throw ConfigError("eikonal: sourceLevels must be in [0, 6] and sourceScale in (0, 1)");
  if (c.stepMults.empty()) throw ConfigError("eikonal: stepMults must not be empty");
  for (double v : c.stepMults)
    if (!(v > 0) || !std::isfinite(v)) throw ConfigError("eikonal: stepMults must be positive");
  if (!(c.tol > 0) || c.maxSweeps < 1) throw ConfigError("eikonal: tol must be positive and maxSweeps >= 1");
  if (c.directions < 4 || !(c.stepCells > 0)) throw ConfigError("eikonal: need >= 4 directions and stepCells > 0");
  if (c.scheme != "semi-lagrangian" && c.scheme != "lax-friedrichs")
    throw ConfigError("eikonal: unknown scheme " + c.scheme);
  return c;
}

namespace {

constexpr double kFar = 1e6;
// Largest |z| on the unit Heisenberg ball, max over theta of
// (theta - sin theta) / (2 theta^2), reached off the vertical axis.
constexpr double kBallHeight = 0.1592;

struct Eikonal {
  GridSpec g;
  int n = 0;
  std::size_t N = 0;
  std::vector<double> A;      // N * n * n
  std::vector<double> sigma;  // N * n, local sup of sqrt(A_kk)
  std::vector<double> invS;   // 1 / sum_k sigma_k / h_k
  std::vector<std::size_t> stride;
  std::vector<double> h;
  double tolerance = 0.0;
};

Eikonal prepare(const Model& m, double tau, const GridSpec& g) {
  const int n = g.dim();
  if (m.coordDim != n || m.dim != n) throw DomainError("eikonal needs a chart model matching the grid dimension");
  if (!(tau >= 0) || !std::isfinite(tau)) throw ConfigError("eikonal: tau must be finite and >= 0");
  if (n > 4) throw DomainError("eikonal supports at most 4 chart dimensions");
  for (int k = 0; k < n; ++k) {
    if (g.n[k] < 3) throw ConfigError("eikonal: need at least 3 nodes per axis");
    if (!m.chartBox.empty() && (g.lo[k] < -m.chartBox[k] - 1e-12 || g.hi[k] > m.chartBox[k] + 1e-12))
      throw DomainError("grid box leaves the trusted chart region of " + m.name);
  }
  requireCellBudget(g);
  Eikonal e;
  e.g = g;
  e.n = n;
  e.N = g.size();
  for (int k = 0; k < n; ++k) {
    e.stride.push_back(g.stride(k));
    e.h.push_back(g.spacing(k));
  }
  e.A.assign(e.N * n * n, 0.0);
  const int F = m.frameSize(), d = m.d();
  std::vector<double> diag(e.N * n);
  parallelFor(e.N, [&](std::size_t j) {
    std::vector<double> fv(static_cast<std::size_t>(F) * n);
    m.frameValues(g.node(j), fv.data());
    double* a = &e.A[j * n * n];
    for (int i = 0; i < F; ++i) {
      const double w = i < d ? 1.0 : tau * tau;
      if (w == 0.0) continue;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) a[k * n + l] += w * fv[i * n + k] * fv[i * n + l];
    }
    for (int k = 0; k < n; ++k) diag[j * n + k] = std::sqrt(std::max(a[k * n + k], 0.0));
  });
  e.sigma.assign(e.N * n, 0.0);
  e.invS.assign(e.N, 0.0);
  double speed[4] = {0, 0, 0, 0};
  for (std::size_t j = 0; j < e.N; ++j) {
    int ijk[8];
    g.unravel(j, ijk);
    double S = 0.0;
    for (int k = 0; k < n; ++k) {
      double s = diag[j * n + k];
      for (int a = 0; a < n; ++a) {
        if (ijk[a] > 0) s = std::max(s, diag[(j - e.stride[a]) * n + k]);
        if (ijk[a] < g.n[a] - 1) s = std::max(s, diag[(j + e.stride[a]) * n + k]);
      }
      e.sigma[j * n + k] = s;
      S += s / e.h[k];
      speed[k] = std::max(speed[k], s);
    }
    e.invS[j] = S > 0 ? 1.0 / S : 0.0;
  }
  for (int k = 0; k < n; ++k) e.tolerance = std::max(e.tolerance, 2.0 * e.h[k] * speed[k]);
  return e;
}

// One Gauss-Seidel pass over interior nodes in the axis directions encoded by
// `order`, followed by boundary extrapolation.  Returns the largest decrease.
double sweep(const Eikonal& e, std::vector<double>& u, const std::vector<double>* cap, std::size_t source,
             int order) {
  const int n = e.n;
  const GridSpec& g = e.g;
  double change = 0.0;
  int idx[4], lo[4], hi[4], step[4];
  for (int k = 0; k < n; ++k) {
    const bool rev = (order >> k) & 1;
    lo[k] = rev ? g.n[k] - 2 : 1;
    hi[k] = rev ? 0 : g.n[k] - 1;
    step[k] = rev ? -1 : 1;
    idx[k] = lo[k];
  }
  double p[4];
  while (true) {
    std::size_t j = 0;
    for (int k = 0; k < n; ++k) j += idx[k] * e.stride[k];
    if (j != source && e.invS[j] > 0) {
      const double* sg = &e.sigma[j * n];
      double acc = 1.0;
      for (int k = 0; k < n; ++k) {
        const double up = u[j + e.stride[k]], dn = u[j - e.stride[k]];
        p[k] = (up - dn) / (2.0 * e.h[k]);
        acc += sg[k] * (up + dn) / (2.0 * e.h[k]);
      }
      const double* a = &e.A[j * n * n];
      double q = 0.0;
      for (int k = 0; k < n; ++k) {
        double r = 0.0;
        for (int l = 0; l < n; ++l) r += a[k * n + l] * p[l];
        q += p[k] * r;
      }
      double v = (acc - std::sqrt(std::max(q, 0.0))) * e.invS[j];
      if (cap) v = std::min(v, (*cap)[j]);
      if (v < u[j]) {
        change = std::max(change, u[j] - v);
        u[j] = v;
      }
    }
    int k = n - 1;
    for (; k >= 0; --k) {
      idx[k] += step[k];
      if (idx[k] != hi[k]) break;
      idx[k] = lo[k];
    }
    if (k < 0) break;
  }
  // Boundary: u_b = min(u_b, max(2 u_1 - u_2, u_2)) along each face normal.
  for (int k = 0; k < n; ++k) {
    const std::size_t s = e.stride[k];
    const std::size_t outer = e.N / (s * g.n[k]);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t in = 0; in < s; ++in) {
        const std::size_t base = o * s * g.n[k] + in;
        const std::size_t last = base + (g.n[k] - 1) * s;
        const std::pair<std::size_t, long> ends[2] = {{base, static_cast<long>(s)},
                                                      {last, -static_cast<long>(s)}};
        for (const auto& [b, dir] : ends) {
          if (b == source) continue;
          const double u1 = u[b + dir], u2 = u[b + 2 * dir];
          double v = std::max(2.0 * u1 - u2, u2);
          if (cap) v = std::min(v, (*cap)[b]);
          if (v < u[b]) {
            change = std::max(change, u[b] - v);
            u[b] = v;
          }
        }
      }
  }
  return change;
}

// Semi-Lagrangian data: per node the scaled frame rows V_i (i < F', rows
// beyond d scaled by tau) and the symmetrized second-order flow terms
// S_il = ((DV_i) V_l + (DV_l) V_i) / 2.
struct SemiLagrangian {
  GridSpec g;
  int n = 0, Fp = 0, nsym = 0;
  std::size_t N = 0;
  std::vector<double> V, S;
  std::vector<std::vector<double>> dirs;
  std::vector<std::vector<int>> nbr;  // nearest directions by angle, self first
  int coarse = 1;                     // stride of the coarse direction scan
  std::vector<double> stepMults;
  double step = 0.0;
  double tolerance = 0.0;
  std::vector<std::size_t> stride;
  std::vector<double> h, lo;
};

std::vector<std::vector<double>> controlDirections(int Fp, int K) {
  std::vector<std::vector<double>> out;
  if (Fp == 1) return {{1.0}, {-1.0}};
  if (Fp == 2) {
    for (int k = 0; k < K; ++k) {
      const double a = 2.0 * std::numbers::pi * k / K;
      out.push_back({std::cos(a), std::sin(a)});
    }
    return out;
  }
  const int M = 4 * K;
  if (Fp == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < M; ++k) {
      const double z = 1.0 - (2.0 * k + 1.0) / M, r = std::sqrt(1.0 - z * z);
      out.push_back({r * std::cos(golden * k), r * std::sin(golden * k), z});
    }
    return out;
  }
  Rng rng(0xd1ec, static_cast<std::uint64_t>(Fp));
  for (int k = 0; k < M; ++k) {
    std::vector<double> c(Fp);
    double s = 0.0;
    for (auto& v : c) {
      v = rng.normal();
      s += v * v;
    }
    for (auto& v : c) v /= std::sqrt(s);
    out.push_back(c);
  }
  return out;
}

SemiLagrangian prepareSL(const Model& m, double tau, const GridSpec& g, const EikonalConfig& cfg) {
  const int n = g.dim();
  if (m.coordDim != n || m.dim != n) throw DomainError("eikonal needs a chart model matching the grid dimension");
  if (!(tau >= 0) || !std::isfinite(tau)) throw ConfigError("eikonal: tau must be finite and >= 0");
  for (int k = 0; k < n; ++k) {
    if (g.n[k] < 3) throw ConfigError("eikonal: need at least 3 nodes per axis");
    if (!m.chartBox.empty() && (g.lo[k] < -m.chartBox[k] - 1e-12 || g.hi[k] > m.chartBox[k] + 1e-12))
      throw DomainError("grid box leaves the trusted chart region of " + m.name);
  }
  requireCellBudget(g);
  SemiLagrangian e;
  e.g = g;
  e.n = n;
  e.N = g.size();
  e.Fp = tau > 0 ? m.frameSize() : m.d();
  e.nsym = e.Fp * (e.Fp + 1) / 2;
  for (int k = 0; k < n; ++k) {
    e.stride.push_back(g.stride(k));
    e.h.push_back(g.spacing(k));
    e.lo.push_back(g.lo[k]);
  }
  const int F = m.frameSize(), Fp = e.Fp;
  e.V.assign(e.N * Fp * n, 0.0);
  parallelFor(e.N, [&](std::size_t j) {
    std::vector<double> fv(static_cast<std::size_t>(F) * n);
    m.frameValues(g.node(j), fv.data());
    for (int i = 0; i < Fp; ++i) {
      const double w = i < m.d() ? 1.0 : tau;
      for (int k = 0; k < n; ++k) e.V[(j * Fp + i) * n + k] = w * fv[i * n + k];
    }
  });
  e.S.assign(e.N * e.nsym * n, 0.0);
  parallelFor(e.N, [&](std::size_t j) {
    int ijk[8];
    g.unravel(j, ijk);
    // dV[i][k][c] = d_k V_i^c by grid differences (second order inside).
    double dV[16][4][4];
    for (int k = 0; k < n; ++k) {
      std::size_t a = j, b = j;
      double span = 0.0;
      if (ijk[k] > 0) {
        a -= e.stride[k];
        span += e.h[k];
      }
      if (ijk[k] < g.n[k] - 1) {
        b += e.stride[k];
        span += e.h[k];
      }
      for (int i = 0; i < Fp; ++i)
        for (int c = 0; c < n; ++c) dV[i][k][c] = (e.V[(b * Fp + i) * n + c] - e.V[(a * Fp + i) * n + c]) / span;
    }
    int q = 0;
    for (int i = 0; i < Fp; ++i)
      for (int l = i; l < Fp; ++l, ++q)
        for (int c = 0; c < n; ++c) {
          double w = 0.0;
          for (int k = 0; k < n; ++k)
            w += dV[i][k][c] * e.V[(j * Fp + l) * n + k] + dV[l][k][c] * e.V[(j * Fp + i) * n + k];
          e.S[(j * e.nsym + q) * n + c] = 0.5 * w;
        }
  });
  std::vector<double> speed(n, 0.0);
  for (std::size_t j = 0; j < e.N; ++j)
    for (int k = 0; k < n; ++k) {
      double a = 0.0;
      for (int i = 0; i < Fp; ++i) a += e.V[(j * Fp + i) * n + k] * e.V[(j * Fp + i) * n + k];
      speed[k] = std::max(speed[k], std::sqrt(a));
    }
  double ratio = 0.0;
  for (int k = 0; k < n; ++k) {
    if (speed[k] > 0) ratio = std::max(ratio, e.h[k] / speed[k]);
    e.tolerance = std::max(e.tolerance, 2.0 * e.h[k] * speed[k]);
  }
  if (!(ratio > 0)) throw DomainError("eikonal: the frame vanishes on the whole grid");
  e.step = cfg.stepCells * ratio;
  e.stepMults = cfg.stepMults;
  e.dirs = controlDirections(Fp, cfg.directions);
  const int D = static_cast<int>(e.dirs.size());
  const int keep = std::min(D, Fp == 1 ? 2 : Fp == 2 ? 5 : 4 * Fp + 1);
  e.coarse = Fp == 1 ? 1 : 4;
  for (int a = 0; a < D; ++a) {
    std::vector<std::pair<double, int>> by;
    for (int b = 0; b < D; ++b) {
      double dot = 0.0;
      for (int i = 0; i < Fp; ++i) dot += e.dirs[a][i] * e.dirs[b][i];
      by.push_back({-dot, b});
    }
    std::partial_sort(by.begin(), by.begin() + keep, by.end());
    std::vector<int> nb;
    for (int t = 0; t < keep; ++t) nb.push_back(by[t].second);
    e.nbr.push_back(nb);
  }
  return e;
}

// Multilinear interpolation of u at x.  The weight on node `self` is returned
// separately so the caller can solve its own fixed point exactly.
template <int n>
inline double interpolateRaw(const SemiLagrangian& e, const std::vector<double>& u, const double* x, std::size_t self,
                             double& wSelf) {
  std::size_t base = 0;
  double frac[4];
  wSelf = 0.0;
  for (int k = 0; k < n; ++k) {
    const double s = (x[k] - e.lo[k]) / e.h[k];
    // Feet up to one cell outside are pulled back onto the box, so boundary
    // nodes whose every control leaves the box still get a value.
    if (!(s >= -1.0 && s <= e.g.n[k])) return std::numeric_limits<double>::infinity();
    int i = static_cast<int>(s);
    i = std::clamp(i, 0, e.g.n[k] - 2);
    frac[k] = std::clamp(s - i, 0.0, 1.0);
    base += i * e.stride[k];
  }
  double acc = 0.0;
  for (int c = 0; c < (1 << n); ++c) {
    double w = 1.0;
    std::size_t j = base;
    for (int k = 0; k < n; ++k) {
      if ((c >> k) & 1) {
        w *= frac[k];
        j += e.stride[k];
      } else {
        w *= 1.0 - frac[k];
      }
    }
    if (w == 0.0) continue;
    if (j == self) wSelf += w;
    else acc += w * u[j];
  }
  return acc;
}

// cost + I[u](foot) with the self weight solved: u = (cost + rest) / (1 - w).
template <int n>
inline double candidate(const SemiLagrangian& e, const std::vector<double>& u, const double* foot, std::size_t self,
                        double cost) {
  double w = 0.0;
  const double rest = interpolateRaw<n>(e, u, foot, self, w);
  if (w >= 1.0 - 1e-12) return std::numeric_limits<double>::infinity();
  return (cost + rest) / (1.0 - w);
}

// One Gauss-Seidel pass.  With `full` every control direction is tried;
// otherwise a hill climb over neighboring directions starts from the node's
// previous minimizer.
template <int n>
double sweepSLn(const SemiLagrangian& e, std::vector<double>& u, std::vector<int>& bestDir,
                const std::vector<double>* cap, std::size_t source, const Point& src, int order, bool full) {
  const int Fp = e.Fp;
  const GridSpec& g = e.g;
  double change = 0.0;
  int idx[4], lo[4], hi[4], step[4];
  for (int k = 0; k < n; ++k) {
    const bool rev = (order >> k) & 1;
    lo[k] = rev ? g.n[k] - 1 : 0;
    hi[k] = rev ? -1 : g.n[k];
    step[k] = rev ? -1 : 1;
    idx[k] = lo[k];
  }
  const double d = e.step;
  double x[4], rel[4];
  std::vector<char> seen(e.dirs.size(), 0);
  std::vector<int> touched;
  while (true) {
    std::size_t j = 0;
    for (int k = 0; k < n; ++k) {
      j += idx[k] * e.stride[k];
      x[k] = e.lo[k] + idx[k] * e.h[k];
      rel[k] = (x[k] - src[k]) / (e.h[k] * e.h[k]);
    }
    if (j != source) {
      const double* V = &e.V[j * Fp * n];
      const double* S = &e.S[j * e.nsym * n];
      double best = u[j];
      int arg = -1;
      double bestSeen = std::numeric_limits<double>::infinity();
      auto tryDir = [&](int di) {
        const auto& c = e.dirs[di];
        double Y[4], Q[4], foot[4];
        double yy = 0.0, xy = 0.0;
        for (int k = 0; k < n; ++k) {
          double y = 0.0;
          for (int i = 0; i < Fp; ++i) y += c[i] * V[i * n + k];
          Y[k] = y;
          yy += y * y / (e.h[k] * e.h[k]);
          xy += rel[k] * y;
        }
        if (yy == 0.0) return std::numeric_limits<double>::infinity();
        for (int k = 0; k < n; ++k) Q[k] = 0.0;
        int q = 0;
        for (int i = 0; i < Fp; ++i)
          for (int l = i; l < Fp; ++l, ++q) {
            const double w = (i == l ? 1.0 : 2.0) * c[i] * c[l];
            if (w == 0.0) continue;
            for (int k = 0; k < n; ++k) Q[k] += w * S[q * n + k];
          }
        double v = std::numeric_limits<double>::infinity();
        for (double mult : e.stepMults) {
          const double sd = d * mult;
          for (int k = 0; k < n; ++k) foot[k] = x[k] + sd * Y[k] + 0.5 * sd * sd * Q[k];
          v = std::min(v, candidate<n>(e, u, foot, j, sd));
        }
        const double sStar = -xy / yy;
        if (sStar > 0 && sStar < d) {
          for (int k = 0; k < n; ++k) foot[k] = x[k] + sStar * Y[k] + 0.5 * sStar * sStar * Q[k];
          v = std::min(v, candidate<n>(e, u, foot, j, sStar));
        }
        return v;
      };
      if (full || bestDir[j] < 0 || !(u[j] < kFar)) {
        for (int di = 0; di < static_cast<int>(e.dirs.size()); ++di) {
          const double v = tryDir(di);
          if (v < bestSeen) {
            bestSeen = v;
            arg = di;
          }
        }
      } else {
        // Coarse scan plus the previous minimizer, then climb.
        int at = bestDir[j];
        const int D = static_cast<int>(e.dirs.size());
        auto visit = [&](int di) {
          if (seen[di]) return false;
          seen[di] = 1;
          touched.push_back(di);
          const double v = tryDir(di);
          if (v < bestSeen) {
            bestSeen = v;
            arg = di;
            return true;
          }
          return false;
        };
        visit(at);
        for (int di = 0; di < D; di += e.coarse) visit(di);
        at = arg;
        for (int hop = 0; hop < 16 && at >= 0; ++hop) {
          for (int di : e.nbr[at]) visit(di);
          if (arg == at) break;
          at = arg;
        }
        for (int di : touched) seen[di] = 0;
        touched.clear();
      }
      if (arg >= 0) bestDir[j] = arg;
      best = std::min(best, bestSeen);
      if (cap) best = std::min(best, (*cap)[j]);
      if (best < u[j]) {
        change = std::max(change, u[j] - best);
        u[j] = best;
      }
    }
    int k = n - 1;
    for (; k >= 0; --k) {
      idx[k] += step[k];
      if (idx[k] != hi[k]) break;
      idx[k] = lo[k];
    }
    if (k < 0) break;
  }
  return change;
}

double sweepSL(const SemiLagrangian& e, std::vector<double>& u, std::vector<int>& bestDir,
               const std::vector<double>* cap, std::size_t source, const Point& src, int order, bool full) {
  switch (e.n) {
    case 1: return sweepSLn<1>(e, u, bestDir, cap, source, src, order, full);
    case 2: return sweepSLn<2>(e, u, bestDir, cap, source, src, order, full);
    case 3: return sweepSLn<3>(e, u, bestDir, cap, source, src, order, full);
    default: return sweepSLn<4>(e, u, bestDir, cap, source, src, order, full);
  }
}

DistanceField solve(const Model& m, const Point& x0, double tau, const GridSpec& g, const EikonalConfig& cfg,
                    const std::vector<double>* cap);

// The first-order error made next to the source is carried unchanged to every
// node.  Solve again on a box shrunk around the source by the anisotropic
// dilation (f on horizontal axes, f^2 on the rest) with the same node counts,
// and take its values on the nodes well inside that box.
void seedFromRefinement(const Model& m, double tau, const GridSpec& g, const Point& srcNode, const EikonalConfig& cfg,
                        const std::vector<double>* cap, std::vector<double>& u) {
  const int n = g.dim(), d = m.d();
  const double f = cfg.sourceScale;
  std::vector<double> lo(n), hi(n);
  for (int k = 0; k < n; ++k) {
    const double sk = k < d ? f : f * f;
    lo[k] = srcNode[k] + sk * (g.lo[k] - srcNode[k]);
    hi[k] = srcNode[k] + sk * (g.hi[k] - srcNode[k]);
    if (!(hi[k] - lo[k] > 0)) return;
  }
  GridSpec inner(lo, hi, g.n);
  EikonalConfig c = cfg;
  c.sourceLevels = cfg.sourceLevels - 1;
  const DistanceField sub = solve(m, srcNode, tau, inner, c, nullptr);
  double edge = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < inner.size(); ++j)
    if (inner.isBoundary(j)) edge = std::min(edge, sub.field.values[j]);
  const double trust = 0.8 * edge;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const Point p = g.node(j);
    if (!inner.contains(p)) continue;
    double v = sub.field.interpolate(p);
    if (!(v < trust)) continue;
    if (cap) v = std::min(v, (*cap)[j]);
    u[j] = std::min(u[j], v);
  }
}

DistanceField solve(const Model& m, const Point& x0, double tau, const GridSpec& g, const EikonalConfig& cfg,
                    const std::vector<double>* cap) {
  if (static_cast<int>(x0.size()) != g.dim()) throw ConfigError("eikonal: source has the wrong length");
  if (!g.contains(x0)) throw DomainError("eikonal: source outside the grid");
  if (g.dim() > 4) throw DomainError("eikonal supports at most 4 chart dimensions");
  DistanceField df;
  df.source = x0;
  df.tau = tau;
  const bool lf = cfg.scheme == "lax-friedrichs";
  if (!lf && cfg.scheme != "semi-lagrangian") throw ConfigError("eikonal: unknown scheme " + cfg.scheme);
  std::optional<Eikonal> E;
  std::optional<SemiLagrangian> SL;
  if (lf) {
    E = prepare(m, tau, g);
    df.tolerance = E->tolerance;
  } else {
    SL = prepareSL(m, tau, g, cfg);
    df.tolerance = SL->tolerance;
  }
  df.field = GridField(g, kFar);
  auto& u = df.field.values;
  const std::size_t src = g.nearest(x0);
  const Point srcNode = g.node(src);
  u[src] = 0.0;
  if (!lf && cfg.sourceLevels > 0) seedFromRefinement(m, tau, g, srcNode, cfg, cap, u);
  const int orders = 1 << g.dim();
  double change = kFar;
  int s = 0;
  if (lf) {
    for (; s < cfg.maxSweeps; ++s) {
      change = sweep(*E, u, cap, src, s % orders);
      if (change < cfg.tol && s >= orders) break;
    }
  } else {
    // Hill-climbing passes; a full direction scan confirms convergence.
    std::vector<int> bestDir(u.size(), -1);
    bool full = false;
    for (; s < cfg.maxSweeps; ++s) {
      const bool wasFull = full || s < orders;
      change = sweepSL(*SL, u, bestDir, cap, src, srcNode, s % orders, wasFull);
      if (change < cfg.tol && s >= orders) {
        if (wasFull) break;
        full = true;
      } else {
        full = false;
      }
    }
  }
  df.sweeps = std::min(s + 1, cfg.maxSweeps);
  df.lastChange = change;
  if (!(change < cfg.tol))
    throw ConvergenceError("eikonal sweeping did not converge: last change " + std::to_string(change) + " after " +
                           std::to_string(cfg.maxSweeps) + " sweeps");
  std::size_t unreached = 0, first = 0;
  for (std::size_t j = u.size(); j-- > 0;)
    if (!(u[j] < kFar)) {
      ++unreached;
      first = j;
    }
  if (unreached > 0) {
    std::string at;
    for (double c : g.node(first)) at += " " + std::to_string(c);
    throw ConvergenceError("eikonal: " + std::to_string(unreached) + " nodes never reached, first at" + at);
  }
  return df;
}

}  // namespace

DistanceField distanceField(const Model& m, const Point& x0, double tau, const GridSpec& grid,
                            const EikonalConfig& cfg) {
  return solve(m, x0, tau, grid, cfg, nullptr);
}

std::vector<DistanceField> distanceFamily(const Model& m, const Point& x0, std::vector<double> taus,
                                          const GridSpec& grid, const EikonalConfig& cfg) {
  std::sort(taus.begin(), taus.end());
  std::vector<DistanceField> out;
  for (double t : taus) out.push_back(solve(m, x0, t, grid, cfg, out.empty() ? nullptr : &out.back().field.values));
  return out;
}

GridSpec ballGrid(const Model& m, const Point& center, double R, int nodes, int verticalNodes) {
  if (m.coordDim != m.dim) throw DomainError("ballGrid needs a chart model");
  if (!(R > 0)) throw ConfigError("ballGrid: radius must be positive");
  if (nodes < 5 || nodes % 2 == 0) throw ConfigError("ballGrid: node count must be odd and >= 5");
  if (verticalNodes == 0) verticalNodes = nodes;
  if (verticalNodes < 5 || verticalNodes % 2 == 0) throw ConfigError("ballGrid: vertical node count must be odd and >= 5");
  const int n = m.coordDim, d = m.d();
  std::vector<double> lo(n), hi(n);
  const double hw = 1.3 * R;
  for (int k = 0; k < n; ++k) {
    const double w = k < d ? hw : 1.5 * kBallHeight * R * R;
    lo[k] = center[k] - w;
    hi[k] = center[k] + w;
    if (!m.chartBox.empty()) {
      lo[k] = std::max(lo[k], -m.chartBox[k]);
      hi[k] = std::min(hi[k], m.chartBox[k]);
    }
  }
  std::vector<int> counts(n, verticalNodes);
  for (int k = 0; k < d; ++k) counts[k] = nodes;
  return GridSpec(lo, hi, counts);
}

nlohmann::json BallVolumeTable::toJson() const {
  return {{"center", center}, {"radii", radii}, {"volumes", volumes}, {"cells", cells}};
}

double ballVolume(const DistanceField& df, const ScalarField& density, double r, std::size_t* cells) {
  const GridSpec& g = df.field.grid;
  double v = 0.0;
  std::size_t c = 0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (!(df.field.values[j] < r)) continue;
    if (g.isBoundary(j)) throw DomainError("ball of radius " + std::to_string(r) + " touches the grid boundary");
    v += density.value(g.node(j));
    ++c;
  }
  if (cells) *cells = c;
  return v * g.cellVolume();
}

BallVolumeTable ballVolumes(const DistanceField& df, const ScalarField& density, const std::vector<double>& radii) {
  BallVolumeTable t;
  t.center = df.source;
  t.radii = radii;
  for (double r : radii) {
    std::size_t c = 0;
    t.volumes.push_back(ballVolume(df, density, r, &c));
    t.cells.push_back(c);
  }
  return t;
}

// The vertical extent of a ball is only known for Heisenberg; the box is
// widened when the ball reaches it.
double ballVolumeAt(const Model& m, const Point& x, double R, int nodes, const EikonalConfig& cfg, std::size_t* cells) {
  if (!(R > 0)) throw ConfigError("ball volume: radius must be positive");
  GridSpec g = ballGrid(m, x, R, nodes);
  for (int attempt = 0;; ++attempt) {
    const DistanceField df = distanceField(m, x, 0.0, g, cfg);
    try {
      return ballVolume(df, m.density, R, cells);
    } catch (const DomainError&) {
      bool widened = false;
      for (int k = m.d(); k < g.dim(); ++k) {
        const double c = 0.5 * (g.lo[k] + g.hi[k]), w = 0.75 * (g.hi[k] - g.lo[k]);
        double lo = c - w, hi = c + w;
        if (!m.chartBox.empty()) {
          lo = std::max(lo, -m.chartBox[k]);
          hi = std::min(hi, m.chartBox[k]);
        }
        widened = widened || lo < g.lo[k] || hi > g.hi[k];
        g.lo[k] = lo;
        g.hi[k] = hi;
      }
      if (!widened || attempt >= 4) throw;
    }
  }
}

DoublingValue doublingRatio(const Model& m, const Point& x, double r, int nodes, const EikonalConfig& cfg) {
  if (!(r > 0)) throw ConfigError("doubling: radius must be positive");
  DoublingValue v;
  v.r = r;
  v.large = ballVolumeAt(m, x, 2.0 * r, nodes, cfg, &v.cellsLarge);
  v.small = ballVolumeAt(m, x, r, nodes, cfg, &v.cellsSmall);
  if (v.cellsSmall < 100)
    throw DomainError("doubling: B(x, r) holds only " + std::to_string(v.cellsSmall) + " nodes (need 100)");
  v.ratio = v.large / v.small;
  return v;
}

nlohmann::json ExpDoublingFit::toJson() const {
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& v : ratios) rs.push_back({{"r", v.r}, {"ratio", v.ratio}});
  return {{"C1", C1}, {"C2", C2}, {"ratios", rs}};
}

ExpDoublingFit expDoublingFit(const Model& m, const Point& x, const std::vector<double>& radii, int nodes,
                              const EikonalConfig& cfg) {
  if (radii.size() < 2) throw ConfigError("expDoublingFit needs at least two radii");
  ExpDoublingFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double r : radii) {
    fit.ratios.push_back(doublingRatio(m, x, r, nodes, cfg));
    const double X = r * r, Y = std::log(fit.ratios.back().ratio);
    sx += X;
    sy += Y;
    sxx += X * X;
    sxy += X * Y;
  }
  const double k = static_cast<double>(radii.size());
  const double den = k * sxx - sx * sx;
  if (!(std::abs(den) > 0)) throw ConfigError("expDoublingFit needs distinct radii");
  fit.C2 = (k * sxy - sx * sy) / den;
  fit.C1 = std::exp((sy - fit.C2 * sx) / k);
  return fit;
}

// ---------------------------------------------------------------------------
// Geodesic shooting

namespace {

using Vec = std::vector<double>;

// Dormand-Prince 5(4) with standard step control; integrates y' = f(y) on [0, T].
template <class F>
std::size_t dopri(F&& f, Vec& y, double T, const ShootConfig& cfg) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
  (void)c2, (void)c3, (void)c4, (void)c5;
  const std::size_t n = y.size();
  Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y5(n);
  double t = 0.0, h = std::min(T, 1e-2);
  f(y, k1);
  std::size_t steps = 0;
  while (t < T) {
    if (steps++ > cfg.maxSteps) throw ConvergenceError("geodesic integration exceeded the step budget");
    if (t + h > T) h = T - t;
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    f(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(tmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    f(tmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    f(y5, k7);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
      err = std::max(err, std::abs(ei) / sc);
    }
    if (!std::isfinite(err)) throw ConvergenceError("geodesic integration produced a non-finite state");
    if (err <= 1.0) {
      t += h;
      y.swap(y5);
      k1.swap(k7);
    }
    const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h *= fac;
    if (h < 1e-14 * std::max(1.0, T)) throw ConvergenceError("geodesic integration: step size underflow");
  }
  return steps;
}

// C[(i * F + a) * F + c] with [F_i, F_a] = sum_c C F_c, from bracket values at
// the identity (exact for left-invariant frames).
Vec structureConstants(const Model& m) {
  const int F = m.frameSize(), n = m.coordDim;
  const Point& e = m.group->identity;
  Eigen::MatrixXd B(n, F);
  {
    Vec fv(static_cast<std::size_t>(F) * n);
    m.frameValues(e, fv.data());
    for (int a = 0; a < F; ++a)
      for (int k = 0; k < n; ++k) B(k, a) = fv[a * n + k];
  }
  auto qr = B.colPivHouseholderQr();
  Vec C(static_cast<std::size_t>(F) * F * F, 0.0);
  for (int i = 0; i < F; ++i)
    for (int a = 0; a < F; ++a) {
      if (i == a) continue;
      VectorField br = lieBracket(m.frame(i), m.frame(a));
      Eigen::VectorXd v(n);
      Vec tmp(n);
      br.values(e, tmp.data());
      for (int k = 0; k < n; ++k) v(k) = tmp[k];
      Eigen::VectorXd c = qr.solve(v);
      for (int cc = 0; cc < F; ++cc) C[(i * F + a) * F + cc] = std::abs(c(cc)) < 1e-13 ? 0.0 : c(cc);
    }
  return C;
}

struct FrameShooter {
  const Model& m;
  int F, d, n;
  Vec C;
  explicit FrameShooter(const Model& model)
      : m(model), F(model.frameSize()), d(model.d()), n(model.coordDim), C(structureConstants(model)) {}

  Geodesic shoot(const Point& x0, const Vec& h0, double T, const ShootConfig& cfg) const {
    Vec y(n + F);
    std::copy(x0.begin(), x0.end(), y.begin());
    std::copy(h0.begin(), h0.end(), y.begin() + n);
    Vec fv(static_cast<std::size_t>(F) * n);
    Point x(n);
    auto rhs = [&](const Vec& s, Vec& ds) {
      for (int k = 0; k < n; ++k) x[k] = s[k];
      m.frameValues(x, fv.data());
      const double* h = &s[n];
      for (int k = 0; k < n; ++k) {
        double v = 0.0;
        for (int i = 0; i < d; ++i) v += h[i] * fv[i * n + k];
        ds[k] = v;
      }
      for (int a = 0; a < F; ++a) {
        double v = 0.0;
        for (int i = 0; i < d; ++i) {
          if (h[i] == 0.0) continue;
          const double* c = &C[(i * F + a) * F];
          double w = 0.0;
          for (int cc = 0; cc < F; ++cc) w += c[cc] * h[cc];
          v += h[i] * w;
        }
        ds[n + a] = v;
      }
    };
    Geodesic g;
    g.steps = dopri(rhs, y, T, cfg);
    g.endpoint.assign(y.begin(), y.begin() + n);
    g.h.assign(y.begin() + n, y.end());
    double H0 = 0.0, H1 = 0.0;
    for (int i = 0; i < d; ++i) {
      H0 += 0.5 * h0[i] * h0[i];
      H1 += 0.5 * g.h[i] * g.h[i];
    }
    g.length = T * std::sqrt(2.0 * H0);
    g.energyDrift = H0 > 0 ? std::abs(H1 - H0) / H0 : std::abs(H1);
    return g;
  }
};

// Hamilton's equations in coordinates for chart models without group law.
Geodesic shootCoordinates(const Model& m, const Point& x0, const Vec& p0, double T, const ShootConfig& cfg) {
  const int n = m.coordDim, d = m.d();
  Vec y(2 * n);
  std::copy(x0.begin(), x0.end(), y.begin());
  std::copy(p0.begin(), p0.end(), y.begin() + n);
  Point x(n);
  std::vector<int> alpha(n, 0);
  auto hamiltonian = [&](const Vec& s) {
    for (int k = 0; k < n; ++k) x[k] = s[k];
    Vec fv(static_cast<std::size_t>(m.frameSize()) * n);
    m.frameValues(x, fv.data());
    double H = 0.0;
    for (int i = 0; i < d; ++i) {
      double hi = 0.0;
      for (int k = 0; k < n; ++k) hi += s[n + k] * fv[i * n + k];
      H += 0.5 * hi * hi;
    }
    return H;
  };
  auto rhs = [&](const Vec& s, Vec& ds) {
    for (int k = 0; k < n; ++k) x[k] = s[k];
    std::fill(ds.begin(), ds.end(), 0.0);
    for (int i = 0; i < d; ++i) {
      std::vector<TaylorJet> jets = m.horizontal[i].jets(x, 1);
      double hi = 0.0;
      for (int k = 0; k < n; ++k) hi += s[n + k] * jets[k].value();
      for (int k = 0; k < n; ++k) ds[k] += hi * jets[k].value();
      for (int l = 0; l < n; ++l) {
        alpha[l] = 1;
        double dl = 0.0;
        for (int k = 0; k < n; ++k) dl += s[n + k] * jets[k].partial(std::span<const int>(alpha));
        alpha[l] = 0;
        ds[n + l] -= hi * dl;
      }
    }
  };
  const double H0 = hamiltonian(y);
  Geodesic g;
  g.steps = dopri(rhs, y, T, cfg);
  g.endpoint.assign(y.begin(), y.begin() + n);
  const double H1 = hamiltonian(y);
  Vec fv(static_cast<std::size_t>(m.frameSize()) * n);
  m.frameValues(g.endpoint, fv.data());
  g.h.assign(m.frameSize(), 0.0);
  for (int a = 0; a < m.frameSize(); ++a)
    for (int k = 0; k < n; ++k) g.h[a] += y[n + k] * fv[a * n + k];
  g.length = T * std::sqrt(2.0 * H0);
  g.energyDrift = H0 > 0 ? std::abs(H1 - H0) / H0 : std::abs(H1);
  return g;
}

Eigen::MatrixXd frameMatrix(const Model& m, const Point& x) {
  const int F = m.frameSize(), n = m.coordDim;
  Vec fv(static_cast<std::size_t>(F) * n);
  m.frameValues(x, fv.data());
  Eigen::MatrixXd B(F, n);
  for (int a = 0; a < F; ++a)
    for (int k = 0; k < n; ++k) B(a, k) = fv[a * n + k];
  return B;
}

}  // namespace

Geodesic geodesicShootFrame(const Model& m, const Point& x0, const std::vector<double>& h0, double T,
                            const ShootConfig& cfg) {
  if (static_cast<int>(h0.size()) != m.frameSize()) throw ConfigError("geodesicShoot: need d + h frame momenta");
  if (static_cast<int>(x0.size()) != m.coordDim) throw ConfigError("geodesicShoot: start point has the wrong length");
  if (!(T >= 0)) throw ConfigError("geodesicShoot: T must be >= 0");
  if (m.group) return FrameShooter(m).shoot(x0, h0, T, cfg);
  if (m.coordDim != m.frameSize()) throw DomainError("geodesicShoot: non-group models need a chart frame");
  // p0 with <p0, F_a(x0)> = h0[a].
  Eigen::MatrixXd B = frameMatrix(m, x0);
  Eigen::VectorXd p = B.colPivHouseholderQr().solve(Eigen::Map<const Eigen::VectorXd>(h0.data(), h0.size()));
  return shootCoordinates(m, x0, Vec(p.data(), p.data() + p.size()), T, cfg);
}

Geodesic geodesicShoot(const Model& m, const Point& x0, const std::vector<double>& p0, double T,
                       const ShootConfig& cfg) {
  if (static_cast<int>(p0.size()) != m.coordDim) throw ConfigError("geodesicShoot: covector has the wrong length");
  if (static_cast<int>(x0.size()) != m.coordDim) throw ConfigError("geodesicShoot: start point has the wrong length");
  if (!m.group) return shootCoordinates(m, x0, p0, T, cfg);
  Eigen::MatrixXd B = frameMatrix(m, x0);
  Eigen::VectorXd h = B * Eigen::Map<const Eigen::VectorXd>(p0.data(), p0.size());
  return FrameShooter(m).shoot(x0, Vec(h.data(), h.data() + h.size()), T, cfg);
}

namespace {

class EndpointMap {
 public:
  EndpointMap(const Model& m, const Point& x0, const ShootConfig& cfg) : m_(m), x0_(x0), cfg_(cfg) {
    if (m.group) shooter_.emplace(m);
  }
  Point operator()(const Vec& h) const {
    return shooter_ ? shooter_->shoot(x0_, h, 1.0, cfg_).endpoint : geodesicShootFrame(m_, x0_, h, 1.0, cfg_).endpoint;
  }

 private:
  const Model& m_;
  Point x0_;
  ShootConfig cfg_;
  std::optional<FrameShooter> shooter_;
};

double residualNorm(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

struct LMResult {
  Vec h;
  double residual;
};

LMResult levenbergMarquardt(const EndpointMap& end, const Point& target, Vec h, const ShootingConfig& cfg) {
  const int F = static_cast<int>(h.size()), n = static_cast<int>(target.size());
  Point e = end(h);
  double r = residualNorm(e, target);
  double lambda = 1e-3;
  for (int it = 0; it < cfg.maxIterations && r > cfg.residualTol; ++it) {
    Eigen::MatrixXd J(n, F);
    for (int a = 0; a < F; ++a) {
      Vec hp = h;
      const double step = 1e-7 * std::max(1.0, std::abs(h[a]));
      hp[a] += step;
      const Point ep = end(hp);
      for (int k = 0; k < n; ++k) J(k, a) = (ep[k] - e[k]) / step;
    }
    Eigen::VectorXd res(n);
    for (int k = 0; k < n; ++k) res(k) = e[k] - target[k];
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * res;
    bool improved = false;
    for (int tries = 0; tries < 12 && !improved; ++tries) {
      Eigen::MatrixXd M = JtJ;
      for (int a = 0; a < F; ++a) M(a, a) += lambda * (JtJ(a, a) + 1e-12);
      const Eigen::VectorXd delta = M.ldlt().solve(-g);
      Vec hn = h;
      for (int a = 0; a < F; ++a) hn[a] += delta(a);
      Point en;
      try {
        en = end(hn);
      } catch (const ConvergenceError&) {
        lambda *= 4;
        continue;
      }
      const double rn = residualNorm(en, target);
      if (rn < r) {
        h = hn;
        e = en;
        r = rn;
        lambda = std::max(lambda / 3, 1e-12);
        improved = true;
      } else {
        lambda *= 4;
      }
    }
    if (!improved) break;
  }
  return {h, r};
}

}  // namespace

ShootingResult shootingDistance(const Model& m, const Point& x, const Point& y, const ShootingConfig& cfg) {
  if (static_cast<int>(x.size()) != m.coordDim || static_cast<int>(y.size()) != m.coordDim)
    throw ConfigError("shootingDistance: points have the wrong length");
  // Left invariance moves the problem to the identity.
  Point start = x, target = y;
  if (m.group) {
    target = m.group->multiply(m.group->inverse(x), y);
    start = m.group->identity;
  }
  const int F = m.frameSize(), d = m.d(), h = m.h();
  ShootingResult out;
  if (residualNorm(start, target) == 0.0) {
    out.converged = true;
    out.h0.assign(F, 0.0);
    return out;
  }
  EndpointMap end(m, start, cfg.ode);
  // Frame coordinates of the displacement give the scale of the fan.
  Eigen::MatrixXd B = frameMatrix(m, start);
  Eigen::VectorXd disp(m.coordDim);
  for (int k = 0; k < m.coordDim; ++k) disp(k) = target[k] - start[k];
  Eigen::VectorXd w = B.transpose().colPivHouseholderQr().solve(disp);
  double wH = 0.0, wV = 0.0;
  for (int a = 0; a < d; ++a) wH += w(a) * w(a);
  for (int a = d; a < F; ++a) wV += w(a) * w(a);
  // Far targets (e.g. antipodal points of a compact group) can be invisible
  // to the linearization; the coordinate chord keeps the scale honest.
  const double L0 = std::max(std::sqrt(wH) + 2.0 * std::sqrt(std::numbers::pi * std::sqrt(wV)),
                             residualNorm(start, target));

  std::vector<Vec> fan;
  fan.emplace_back(w.data(), w.data() + F);
  for (int a = d; a < F; ++a) fan.back()[a] = 0.0;
  if (d == 2 && h == 1) {
    const int na = 8, nv = std::max(1, (cfg.fan - 1) / na);
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < nv; ++j) {
        const double ang = 2.0 * std::numbers::pi * (i + 0.5 * (j % 2)) / na;
        const double v = 2.0 * std::numbers::pi * (-1.0 + (2.0 * j + 1.0) / nv) * 0.95;
        fan.push_back({L0 * std::cos(ang), L0 * std::sin(ang), v});
      }
  } else {
    Rng rng(0x5eed, static_cast<std::uint64_t>(F));
    for (int k = 1; k < cfg.fan; ++k) {
      Vec c(F);
      double nh = 0.0;
      for (int a = 0; a < d; ++a) {
        c[a] = rng.normal();
        nh += c[a] * c[a];
      }
      nh = std::sqrt(nh);
      for (int a = 0; a < d; ++a) c[a] *= L0 / nh;
      for (int a = d; a < F; ++a) c[a] = 2.0 * std::numbers::pi * rng.uniform(-0.95, 0.95);
      fan.push_back(c);
    }
  }
  std::vector<double> res(fan.size(), std::numeric_limits<double>::infinity());
  parallelFor(fan.size(), [&](std::size_t k) {
    try {
      res[k] = residualNorm(end(fan[k]), target);
    } catch (const ConvergenceError&) {
    }
  });
  std::vector<std::size_t> order(fan.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return res[a] < res[b]; });
  const std::size_t nref = std::min<std::size_t>(static_cast<std::size_t>(cfg.refine), order.size());
  std::vector<LMResult> refined(nref);
  parallelFor(nref, [&](std::size_t k) { refined[k] = levenbergMarquardt(end, target, fan[order[k]], cfg); });
  out.distance = std::numeric_limits<double>::infinity();
  out.residual = std::numeric_limits<double>::infinity();
  const double tol = cfg.residualTol * std::max(1.0, residualNorm(target, Point(target.size(), 0.0)));
  for (const auto& r : refined) {
    double len = 0.0;
    for (int a = 0; a < d; ++a) len += r.h[a] * r.h[a];
    len = std::sqrt(len);
    if (r.residual <= tol) {
      ++out.convergedStarts;
      if (len < out.distance) {
        out.distance = len;
        out.h0 = r.h;
        out.residual = r.residual;
        out.converged = true;
      }
    } else if (!out.converged && r.residual < out.residual) {
      out.residual = r.residual;
      out.h0 = r.h;
    }
  }
  if (!out.converged) out.distance = std::numeric_limits<double>::quiet_NaN();
  return out;
}

CrossValidation crossValidateDistance(const Model& m, const DistanceField& df, const Point& y,
                                      const ShootingConfig& cfg) {
  CrossValidation cv;
  cv.eikonal = df.value(y);
  ShootingResult s = shootingDistance(m, df.source, y, cfg);
  cv.shootingConverged = s.converged;
  cv.shooting = s.distance;
  cv.gap = s.converged && s.distance > 0 ? std::abs(cv.eikonal - s.distance) / s.distance
                                         : std::numeric_limits<double>::quiet_NaN();
  return cv;
}

DiameterEstimate diameterEstimate(const Model& m, std::size_t samples, std::uint64_t seed, const ShootingConfig& cfg) {
  if (!m.traits.isCompact) throw DomainError("diameterEstimate needs a compact model; " + m.name + " is not");
  if (!m.group) throw DomainError("diameterEstimate needs the group law of " + m.name);
  const Point& e = m.group->identity;
  std::vector<Point> targets;
  if (m.family == "sasakian") {
    Point c = e;
    for (auto& v : c) v = -v;
    targets.push_back(c);
  }
  for (double s : {1.0, 2.0, 3.0, 4.0, 5.0, 6.0}) {
    Vec c(m.frameSize(), 0.0);
    c[m.d()] = s;
    targets.push_back(m.group->rightExp(e, c));
  }
  for (std::size_t k = 0; k < samples; ++k) {
    Rng rng(seed, k);
    targets.push_back(m.samplePoint(rng, 1.0));
  }
  std::vector<ShootingResult> res(targets.size());
  ShootingConfig inner = cfg;
  for (std::size_t k = 0; k < targets.size(); ++k) res[k] = shootingDistance(m, e, targets[k], inner);
  DiameterEstimate out;
  out.targets = targets.size();
  for (std::size_t k = 0; k < targets.size(); ++k) {
    if (!res[k].converged) {
      ++out.unresolved;
      continue;
    }
    if (res[k].distance > out.estimate) {
      out.estimate = res[k].distance;
      out.worst = targets[k];
    }
  }
  return out;
}

DistanceComparison distanceComparisonCheck(const Model& m, double tau, std::size_t samples, std::uint64_t seed,
                                           const GridSpec& grid, double box, const EikonalConfig& cfg) {
  if (!(tau > 0)) throw ConfigError("distance comparison needs tau > 0");
  if (!m.group) throw DomainError("distance comparison uses left translation; " + m.name + " has no group law");
  auto fam = distanceFamily(m, m.group->identity, {0.0, tau}, grid, cfg);
  DistanceComparison out;
  out.monotone = true;
  for (std::size_t j = 0; j < grid.size(); ++j)
    if (fam[1].field.values[j] > fam[0].field.values[j]) out.monotone = false;
  for (std::size_t k = 0; k < samples; ++k) {
    Rng rng(seed, k);
    Point x(m.coordDim), y(m.coordDim);
    for (auto& v : x) v = rng.uniform(-box, box);
    for (auto& v : y) v = rng.uniform(-box, box);
    const Point g = m.group->multiply(m.group->inverse(x), y);
    if (!grid.contains(g)) throw DomainError("distance comparison: x^{-1} y leaves the grid");
    const double d0 = fam[0].value(g), dt = fam[1].value(g);
    if (!(dt > 0) || d0 == 0.0) {
      ++out.skipped;
      continue;
    }
    ++out.pairs;
    const double ratio = d0 / std::max(std::sqrt(dt), dt);
    if (ratio > out.Chat) {
      out.Chat = ratio;
      out.worstPair = {x, y};
    }
  }
  return out;
}

}  // namespace srlab
