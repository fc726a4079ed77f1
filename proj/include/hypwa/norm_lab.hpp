#pragma once

// Norms of Schur multipliers on finite kernel sections.
//
// The cb norm of m_K is the least t for which [[A, K], [K*, B]] is positive
// semidefinite with every diagonal entry of A and B at most t. The solver
// bisects on t with alternating reflections between the PSD cone and
// the affine box, and brackets the answer with two
// certificates that hold for any iterate:
//   upper: a PSD matrix X with off-diagonal block X12 gives a feasible point
//          after adding [[s I, D], [D*, s I]], D = K - X12, s = ||D||;
//   lower: ||D_a K D_b||_1 for unit non-negative a, b (rank-one inputs in the
//          trace class), realized by an operator-norm witness.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hypwa/error.hpp"
#include "hypwa/kernel_matrix.hpp"

namespace hypwa {

inline constexpr Eigen::Index kDenseSvdCap = 64;
inline constexpr Eigen::Index kSdpDimCap = 64;

inline double spectral_norm(const Matrix& a, double rel_tol = 1e-10, int max_iter = 100000) {
  if (a.size() == 0) return 0.0;
  if (!a.allFinite()) throw InputError("matrix has non-finite entries");
  if (std::max(a.rows(), a.cols()) <= kDenseSvdCap) {
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues()(0);
  }
  // power iteration on A*A from a fixed start, restarted once from e_k of
  // the largest column if the start is (nearly) orthogonal
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(a.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) += Complex(0.0, 1e-3 * static_cast<double>(i % 7));
  v.normalize();
  double sigma = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXcd w = a.adjoint() * (a * v);
    const double nw = w.norm();
    if (nw == 0.0) {
      if (it > 0) return 0.0;
      Eigen::Index col = 0;
      a.colwise().norm().maxCoeff(&col);
      v.setZero();
      v(col) = 1.0;
      continue;
    }
    const double next = std::sqrt(nw);
    v = w / nw;
    if (std::abs(next - sigma) <= rel_tol * next) return std::max(next, (a * v).norm());
    sigma = next;
  }
  throw ConvergenceError("power iteration did not converge", std::abs(sigma - std::sqrt((a.adjoint() * (a * v)).norm())));
}

inline double trace_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues().sum();
}

inline Matrix schur_apply(const KernelMatrix& k, const Matrix& a) {
  if (k.values.rows() != a.rows() || k.values.cols() != a.cols()) {
    throw InputError("kernel is " + std::to_string(k.values.rows()) + "x" + std::to_string(k.values.cols()) +
                     " but the matrix is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  return k.values.cwiseProduct(a);
}

inline double psd_min_eig(const Matrix& k, double herm_tol = 1e-12) {
  if (k.rows() != k.cols()) throw InputError("kernel is not square");
  const double scale = std::max(1.0, k.cwiseAbs().maxCoeff());
  if ((k - k.adjoint()).cwiseAbs().maxCoeff() > herm_tol * scale) throw InputError("kernel is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(k, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

struct LowerBoundResult {
  double value = 0;
  std::string strategy;
  Matrix witness;  // value = ||m_k(witness)|| / ||witness||
  std::uint64_t seed = 0;
};

namespace detail {

inline double ratio(const KernelMatrix& k, const Matrix& a) {
  const double na = spectral_norm(a);
  return na == 0.0 ? 0.0 : spectral_norm(schur_apply(k, a)) / na;
}

struct DualPoint {
  Eigen::VectorXd a, b;
  double value = 0;  // ||D_a K D_b||_1
  Matrix W;          // polar part of D_a K D_b
};

inline DualPoint dual_eval(const Matrix& k, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  DualPoint p{a, b, 0.0, {}};
  const Matrix m = a.asDiagonal() * k * b.asDiagonal();
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  p.value = svd.singularValues().sum();
  const auto r = svd.singularValues().size();
  p.W = svd.matrixU().leftCols(r) * svd.matrixV().leftCols(r).adjoint();
  return p;
}

// Minorize-maximize on a, b: for fixed W the trace norm is bounded below by
// Re tr(W* D_a K D_b), which is linear in a (resp. b).
inline DualPoint dual_ascent(const Matrix& k, Eigen::VectorXd a, Eigen::VectorXd b, int iters, double tol) {
  a.normalize();
  b.normalize();
  DualPoint best = dual_eval(k, a, b);
  DualPoint cur = best;
  for (int it = 0; it < iters; ++it) {
    Eigen::VectorXd ca = (cur.W.conjugate().cwiseProduct(k) * cur.b.cast<Complex>()).real().cwiseMax(0.0);
    if (ca.norm() == 0.0) break;
    cur = dual_eval(k, ca.normalized(), cur.b);
    Eigen::VectorXd cb = (cur.W.conjugate().cwiseProduct(k).transpose() * cur.a.cast<Complex>()).real().cwiseMax(0.0);
    if (cb.norm() == 0.0) break;
    cur = dual_eval(k, cur.a, cb.normalized());
    const double gain = cur.value - best.value;
    if (cur.value > best.value) best = cur;
    if (gain <= tol * std::max(1.0, best.value)) break;
  }
  return best;
}

// Uniform start, the largest entry's row/column, and a few fixed
// pseudo-random positive starts; the best local maximum wins.
inline DualPoint dual_multistart(const Matrix& k, int iters, int random_starts = 8) {
  const Eigen::Index n = k.rows(), m = k.cols();
  DualPoint best = dual_ascent(k, Eigen::VectorXd::Ones(n), Eigen::VectorXd::Ones(m), iters, 1e-15);
  Eigen::Index bi = 0, bj = 0;
  k.cwiseAbs().maxCoeff(&bi, &bj);
  Eigen::VectorXd a = Eigen::VectorXd::Constant(n, 0.05), b = Eigen::VectorXd::Constant(m, 0.05);
  a(bi) = 1.0;
  b(bj) = 1.0;
  auto try_start = [&](const Eigen::VectorXd& sa, const Eigen::VectorXd& sb) {
    auto p = dual_ascent(k, sa, sb, iters, 1e-15);
    if (p.value > best.value) best = p;
  };
  try_start(a, b);
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int s = 0; s < random_starts; ++s) {
    for (auto& v : a) v = u(rng);
    for (auto& v : b) v = u(rng);
    try_start(a, b);
  }
  return best;
}

// Operator-norm witness conj(W): <m_K(conj W) b, a> = ||D_a K D_b||_1.
inline double dual_witness_ratio(const KernelMatrix& k, const DualPoint& p, Matrix* witness) {
  Matrix x = p.W.conjugate();
  if (witness) *witness = x;
  return ratio(k, x);
}

}  // namespace detail

enum class LowerStrategy { basis, rank_one_signs, random_gaussian, dual_trace };

inline std::string to_string(LowerStrategy s) {
  switch (s) {
    case LowerStrategy::basis: return "basis";
    case LowerStrategy::rank_one_signs: return "rank_one_signs";
    case LowerStrategy::random_gaussian: return "random_gaussian";
    default: return "dual_trace";
  }
}

inline LowerBoundResult lower_bound(const KernelMatrix& k, const std::vector<LowerStrategy>& strategies,
                                    std::uint64_t seed = 0, int samples = 64) {
  if (strategies.empty()) throw InputError("no lower-bound strategy selected");
  const Eigen::Index n = k.values.rows(), m = k.values.cols();
  LowerBoundResult best;
  best.seed = seed;
  auto consider = [&](const Matrix& a, const std::string& tag) {
    const double v = detail::ratio(k, a);
    if (v > best.value || best.strategy.empty()) {
      best.value = v;
      best.strategy = tag;
      best.witness = a;
    }
  };
  std::mt19937_64 rng(seed);
  for (auto s : strategies) {
    switch (s) {
      case LowerStrategy::basis: {
        if (n == m) consider(Matrix::Identity(n, m), "basis");
        Eigen::Index bi = 0, bj = 0;
        if (k.values.size()) k.values.cwiseAbs().maxCoeff(&bi, &bj);
        Matrix e = Matrix::Zero(n, m);
        if (e.size()) e(bi, bj) = 1.0;
        consider(e, "basis");
        break;
      }
      case LowerStrategy::rank_one_signs: {
        std::bernoulli_distribution coin(0.5);
        consider(Matrix::Ones(n, m), "rank_one_signs");
        for (int t = 0; t < samples; ++t) {
          Eigen::VectorXcd u(n), v(m);
          for (auto& x : u) x = coin(rng) ? 1.0 : -1.0;
          for (auto& x : v) x = coin(rng) ? 1.0 : -1.0;
          consider(u * v.transpose(), "rank_one_signs");
        }
        break;
      }
      case LowerStrategy::random_gaussian: {
        std::normal_distribution<double> g;
        for (int t = 0; t < samples; ++t) {
          Matrix a(n, m);
          for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = Complex(g(rng), g(rng));
          consider(a, "random_gaussian");
        }
        break;
      }
      case LowerStrategy::dual_trace: {
        const auto p = detail::dual_multistart(k.values, 2000);
        Matrix w;
        detail::dual_witness_ratio(k, p, &w);
        consider(w, "dual_trace");
        break;
      }
    }
  }
  return best;
}

struct CbNormResult {
  double value = 0;          // midpoint of the certified bracket
  double lower = 0;          // certified lower bound
  double upper = 0;          // certified upper bound
  double tol = 0;
  int iterations = 0;        // bisection steps
  int projections = 0;       // alternating-projection sweeps in total
  double feasibility_residual = 0;
  bool inconclusive = false;
  std::string method = "bisection+douglas_rachford";
  double initial_lower = 0;  // max |k|
  double initial_upper = 0;  // dim * max |k|
};

namespace detail {

// Feasible t read off from a PSD matrix X of size (n+m).
inline double certified_upper(const Matrix& x, const Matrix& k) {
  const Eigen::Index n = k.rows(), m = k.cols();
  const double s = spectral_norm(k - x.topRightCorner(n, m));
  const double da = x.topLeftCorner(n, n).diagonal().real().maxCoeff() + s;
  const double db = x.bottomRightCorner(m, m).diagonal().real().maxCoeff() + s;
  return std::sqrt(std::max(da, 0.0) * std::max(db, 0.0));
}

inline Matrix psd_part(const Matrix& y) {
  Eigen::SelfAdjointEigenSolver<Matrix> es((y + y.adjoint()) * 0.5);
  const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lam.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

// Nearest point with off-diagonal block K and diagonal entries at most t.
inline Matrix affine_part(Matrix y, const Matrix& k, double t) {
  const Eigen::Index n = k.rows(), m = k.cols();
  y.topRightCorner(n, m) = k;
  y.bottomLeftCorner(m, n) = k.adjoint();
  for (Eigen::Index i = 0; i < y.rows(); ++i) y(i, i) = Complex(std::min(y(i, i).real(), t), 0.0);
  return y;
}

// Upper bound from a dual point: with M = D_a K D_b,
// [[D_a^-1 |M*| D_a^-1, K], [K*, D_b^-1 |M| D_b^-1]] is PSD.
inline std::optional<double> scaled_polar_upper(const Matrix& k, Eigen::VectorXd a, Eigen::VectorXd b) {
  const double floor = 1e-9;
  a = a.cwiseMax(floor * a.maxCoeff());
  b = b.cwiseMax(floor * b.maxCoeff());
  if (!(a.maxCoeff() > 0 && b.maxCoeff() > 0)) return std::nullopt;
  const Matrix m = a.asDiagonal() * k * b.asDiagonal();
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto r = svd.singularValues().size();
  const Matrix left = svd.matrixU().leftCols(r) * svd.singularValues().cast<Complex>().asDiagonal() *
                      svd.matrixU().leftCols(r).adjoint();
  const Matrix right = svd.matrixV().leftCols(r) * svd.singularValues().cast<Complex>().asDiagonal() *
                       svd.matrixV().leftCols(r).adjoint();
  const Eigen::Index n = k.rows(), mm = k.cols();
  Matrix x(n + mm, n + mm);
  x.topLeftCorner(n, n) = a.cwiseInverse().asDiagonal() * left * a.cwiseInverse().asDiagonal();
  x.bottomRightCorner(mm, mm) = b.cwiseInverse().asDiagonal() * right * b.cwiseInverse().asDiagonal();
  x.topRightCorner(n, mm) = k;
  x.bottomLeftCorner(mm, n) = k.adjoint();
  // rounding: charge the smallest eigenvalue of the assembled matrix
  Eigen::SelfAdjointEigenSolver<Matrix> es((x + x.adjoint()) * 0.5, Eigen::EigenvaluesOnly);
  const double slack = std::max(0.0, -es.eigenvalues().minCoeff());
  const double da = x.topLeftCorner(n, n).diagonal().real().maxCoeff() + slack;
  const double db = x.bottomRightCorner(mm, mm).diagonal().real().maxCoeff() + slack;
  return std::sqrt(da * db);
}

// Euclidean projection onto the probability simplex.
inline Eigen::VectorXd simplex_projection(const Eigen::VectorXd& v) {
  Eigen::VectorXd u = v;
  std::sort(u.data(), u.data() + u.size(), std::greater<>());
  double cum = 0, theta = 0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    cum += u(i);
    const double th = (cum - 1.0) / static_cast<double>(i + 1);
    if (u(i) - th > 0) theta = th;
  }
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

// ADMM on  min max_i Re Z_ii  s.t. Z12 = K, Z = X, X PSD.  Improves hi
// through certified_upper of the PSD iterates; returns sweeps used.
inline int admm_polish(const Matrix& k, Matrix x, double lo, double& hi, Matrix& best, double tol, int max_iter) {
  const Eigen::Index n = k.rows(), m = k.cols(), N = n + m;
  Matrix u = Matrix::Zero(N, N);
  double rho = 1.0 / std::max(1.0, hi);
  int it = 0;
  for (; it < max_iter && hi - lo > tol; ++it) {
    Matrix z = x - u;
    z.topRightCorner(n, m) = k;
    z.bottomLeftCorner(m, n) = k.adjoint();
    const double lambda = 1.0 / rho;
    const Eigen::VectorXd d = z.diagonal().real();
    const Eigen::VectorXd pd = d - lambda * simplex_projection(d / lambda);
    for (Eigen::Index i = 0; i < N; ++i) z(i, i) = pd(i);
    const Matrix prev = x;
    x = psd_part(z + u);
    const double up = certified_upper(x, k);
    if (up < hi) {
      hi = up;
      best = x;
    }
    u += z - x;
    if (it % 50 == 49) {
      // residual balancing
      const double r = (z - x).norm(), s = rho * (x - prev).norm();
      if (r > 10 * s) {
        rho *= 2;
        u /= 2;
      } else if (s > 10 * r) {
        rho /= 2;
        u *= 2;
      }
    }
  }
  return it;
}

}  // namespace detail

/// Completely bounded norm of m_K by bisection on t; every bracket update is
/// backed by a certificate, so an unfinished run reports its gap instead of
/// a guess.
inline CbNormResult cb_norm_sdp(const KernelMatrix& kernel, double tol = 1e-6, int max_bisections = 200,
                                int max_sweeps = 4000) {
  const Matrix& k = kernel.values;
  if (k.rows() == 0 || k.cols() == 0) throw InputError("empty kernel");
  if (std::max(k.rows(), k.cols()) > kSdpDimCap)
    throw InputError("kernel section exceeds the cb-norm dimension cap of " + std::to_string(kSdpDimCap));
  if (!(tol > 0)) throw InputError("tolerance must be positive");
  const Eigen::Index n = k.rows(), m = k.cols();
  CbNormResult res;
  res.tol = tol;
  const double maxabs = k.cwiseAbs().maxCoeff();
  res.initial_lower = maxabs;
  res.initial_upper = static_cast<double>(std::max(n, m)) * maxabs;
  if (maxabs == 0.0) return res;

  double lo = maxabs, hi = res.initial_upper;

  auto dual = detail::dual_multistart(k, 5000);
  lo = std::max(lo, dual.value);
  if (auto up = detail::scaled_polar_upper(k, dual.a, dual.b)) hi = std::min(hi, *up);

  // primal warm start at the polar factorization
  Matrix x = Matrix::Zero(n + m, n + m);
  {
    Eigen::JacobiSVD<Matrix> svd(k, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto r = svd.singularValues().size();
    const auto s = svd.singularValues().cast<Complex>().asDiagonal();
    x.topLeftCorner(n, n) = svd.matrixU().leftCols(r) * s * svd.matrixU().leftCols(r).adjoint();
    x.bottomRightCorner(m, m) = svd.matrixV().leftCols(r) * s * svd.matrixV().leftCols(r).adjoint();
    x.topRightCorner(n, m) = k;
    x.bottomLeftCorner(m, n) = k.adjoint();
    hi = std::min(hi, detail::certified_upper(detail::psd_part(x), k));
  }

  double steer_lo = lo;  // uncertified: where the reflections stalled
  while (hi - lo > tol && res.iterations < max_bisections) {
    ++res.iterations;
    const double t = 0.5 * (std::max(lo, steer_lo) + hi);
    if (!(t < hi)) break;
    bool feasible = false;
    // Douglas-Rachford on (affine box, PSD cone); the shadow sequence
    // P_psd(2 P_aff(y) - y) carries the certificates
    double window_start = std::numeric_limits<double>::infinity();
    Matrix y = x;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      ++res.projections;
      const Matrix b = detail::affine_part(y, k, t);
      const Matrix a = detail::psd_part(2.0 * b - y);
      const double up = detail::certified_upper(a, k);
      if (up < hi) {
        hi = up;
        x = a;
      }
      if (up <= t) {
        feasible = true;
        break;
      }
      const double resid = (a - b).norm();
      res.feasibility_residual = resid;
      if (sweep % 200 == 0) {
        if (resid > 0.999 * window_start) break;
        window_start = resid;
      }
      y += a - b;
    }
    if (!feasible) {
      steer_lo = t;
      // a stall is not a proof; ask the dual side before moving lo
      auto d2 = detail::dual_ascent(k, dual.a.cwiseMax(1e-6), dual.b.cwiseMax(1e-6), 2000, 1e-15);
      if (d2.value > dual.value) dual = d2;
      lo = std::max(lo, dual.value);
      if (steer_lo >= hi - tol) break;
    }
  }
  if (hi - lo > tol) {
    res.projections += detail::admm_polish(k, x, lo, hi, x, tol, 20 * max_sweeps);
    res.method += "+admm";
  }
  // both bounds carry rounding; they may cross by a few ulps at a tight optimum
  res.lower = std::min(lo, hi);
  res.upper = hi;
  res.value = 0.5 * (lo + hi);
  res.inconclusive = hi - lo > tol;
  return res;
}

struct SandwichReport {
  double lower = 0;
  double cb = 0;
  double cb_gap = 0;
  bool cb_inconclusive = false;
  std::optional<double> certificate;
  bool ordered = true;  // lower <= cb + tol <= certificate + tol
  std::string lower_strategy;
  double tol = 1e-6;
};

inline SandwichReport sandwich_report(const KernelMatrix& k, std::optional<double> certificate, double tol = 1e-6,
                                      std::uint64_t seed = 0) {
  SandwichReport r;
  r.tol = tol;
  const auto lb = lower_bound(k, {LowerStrategy::basis, LowerStrategy::rank_one_signs, LowerStrategy::random_gaussian,
                                  LowerStrategy::dual_trace},
                              seed);
  r.lower = lb.value;
  r.lower_strategy = lb.strategy;
  const auto cb = cb_norm_sdp(k, tol);
  r.cb = cb.value;
  r.cb_gap = cb.upper - cb.lower;
  r.cb_inconclusive = cb.inconclusive;
  r.certificate = certificate;
  r.ordered = r.lower <= r.cb + tol;
  if (certificate) r.ordered = r.ordered && r.cb <= *certificate + tol;
  return r;
}

}  // namespace hypwa
