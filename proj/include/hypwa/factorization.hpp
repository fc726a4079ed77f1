#pragma once

// eta and zeta vectors over the corridor model, the kernel they factor, and
// the norm certificates read off from their Gram data.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hypwa/corridor.hpp"
#include "hypwa/error.hpp"
#include "hypwa/subset_vector.hpp"

namespace hypwa {

using Complex = std::complex<double>;

/// C1 = max |T(w,m)|, C0 = 2^{C1 (1 + R1)}, C = 2 C0. C0 is kept as a base-2
/// logarithm as well since it overflows doubles in paper mode.
struct FactorizationConstants {
  std::size_t C1 = 0;
  int R1 = 0;
  double log2_C0 = 0;
  double C0 = 1;
  double C = 2;

  static FactorizationConstants from(std::size_t c1, int r1) {
    FactorizationConstants k;
    k.C1 = c1;
    k.R1 = r1;
    k.log2_C0 = static_cast<double>(c1) * (1.0 + r1);
    k.C0 = std::exp2(k.log2_C0);
    k.C = 2.0 * k.C0;
    return k;
  }
};

inline FactorizationConstants constants(const CorridorModel& m) {
  return FactorizationConstants::from(m.max_corridor_size(), m.params().R1);
}

/// eta+_k(x) = xi+_{T(x,k)} (x) xi~+_{T(x,k+1)} (x) ... (x) xi~+_{T(x,k+R1)};
/// eta-_l(y) uses levels l, l-1, ..., l-R1 with the minus vectors.
inline TensorVector eta(const CorridorModel& m, VertexId w, int level, XiSign sign) {
  const std::size_t i = m.table().index_of(w);
  const int step = sign == XiSign::plus ? 1 : -1;
  TensorVector t;
  t.factors.reserve(m.params().R1 + 1);
  for (int s = 0; s <= m.params().R1; ++s) {
    t.factors.push_back({SubsetKey(m.members(i, level + step * s)), sign, s > 0});
  }
  return t;
}

/// <eta-_l(y), eta+_k(x)> as the product of the factor inner products.
inline std::int64_t eta_inner(const CorridorModel& m, VertexId x, int k, VertexId y, int l) {
  const auto plus = eta(m, x, k, XiSign::plus);
  const auto minus = eta(m, y, l, XiSign::minus);
  std::int64_t acc = 1;
  for (std::size_t s = 0; s < plus.factors.size() && acc != 0; ++s) acc *= xi_inner_exact(minus.factors[s], plus.factors[s]);
  return acc;
}

namespace detail {

// Same product without building the subset keys; core indices.
inline int eta_inner_indexed(const CorridorModel& m, std::size_t i, int k, std::size_t j, int l) {
  for (int s = 0; s <= m.params().R1; ++s) {
    const auto common = m.intersection_size(i, k + s, j, l - s);
    if (xi_inner_closed(XiSign::minus, s > 0, XiSign::plus, s > 0, common) == 0.0) return 0;
  }
  return 1;
}

// <eta_a(w), eta_b(w)> for one sign, from intersection sizes only.
inline double eta_gram_indexed(const CorridorModel& m, std::size_t i, int a, int b, XiSign sign) {
  const int step = sign == XiSign::plus ? 1 : -1;
  double acc = 1.0;
  for (int s = 0; s <= m.params().R1 && acc != 0.0; ++s) {
    const auto common = m.intersection_size(i, a + step * s, i, b + step * s);
    acc *= xi_inner_closed(sign, s > 0, sign, s > 0, common);
  }
  return acc;
}

}  // namespace detail

/// <eta_a(w), eta_b(w)> for the given sign.
inline double eta_gram(const CorridorModel& m, VertexId w, int a, int b, XiSign sign) {
  return detail::eta_gram_indexed(m, m.table().index_of(w), a, b, sign);
}

/// Smallest K with sqrt(C0) |1-z|^{1/2} |z|^{K+1} / (1-|z|) <= tol.
inline int truncation_level(Complex z, double tol, double log2_C0) {
  const double r = std::abs(z);
  if (!(r < 1.0)) throw InputError("|z| must be < 1");
  if (!(tol > 0.0)) throw InputError("tolerance must be positive");
  if (r == 0.0) return 0;
  const double log_lead = 0.5 * log2_C0 * std::log(2.0) + 0.5 * std::log(std::abs(1.0 - z)) - std::log(1.0 - r);
  // log_lead + (K+1) log r <= log tol
  double k = std::ceil((std::log(tol) - log_lead) / std::log(r)) - 1.0;
  k = std::max(0.0, k);
  if (k > 1e7) throw InputError("truncation level exceeds 10^7; |z| too close to 1 for this tolerance");
  int K = static_cast<int>(k);
  auto tail = [&](int kk) { return std::exp(log_lead + (kk + 1) * std::log(r)); };
  while (K > 0 && tail(K - 1) <= tol) --K;
  while (tail(K) > tol) ++K;
  return K;
}

/// Norm bound on the part of zeta discarded by truncating at K.
inline double truncation_tail(Complex z, int K, double log2_C0) {
  const double r = std::abs(z);
  if (r == 0.0) return 0.0;
  return std::exp(0.5 * log2_C0 * std::log(2.0) + 0.5 * std::log(std::abs(1.0 - z)) - std::log(1.0 - r) +
                  (K + 1) * std::log(r));
}

struct ZetaTerm {
  Complex coefficient;
  int level = 0;
  TensorVector vector;
};

/// zeta+_z(x) = conj(sqrt(1-z)) sum_k conj(z)^k eta+_k(x),
/// zeta-_z(y) = sqrt(1-z) sum_l z^l eta-_l(y), truncated at K_max.
struct ZetaVector {
  Complex z;
  XiSign sign = XiSign::plus;
  Complex prefactor;
  int K_max = 0;
  std::vector<ZetaTerm> terms;
};

inline Complex zeta_prefactor(Complex z, XiSign sign) {
  const Complex root = std::sqrt(1.0 - z);  // principal branch
  return sign == XiSign::plus ? std::conj(root) : root;
}

inline ZetaVector zeta(const CorridorModel& m, VertexId w, Complex z, XiSign sign, int K_max) {
  if (!(std::abs(z) < 1.0)) throw InputError("|z| must be < 1");
  ZetaVector v{z, sign, zeta_prefactor(z, sign), K_max, {}};
  const Complex base = sign == XiSign::plus ? std::conj(z) : z;
  Complex c = 1.0;
  for (int k = 0; k <= K_max; ++k) {
    v.terms.push_back({c, k, eta(m, w, k, sign)});
    c *= base;
  }
  return v;
}

inline ZetaVector zeta(const CorridorModel& m, VertexId w, Complex z, XiSign sign, double tol) {
  return zeta(m, w, z, sign, truncation_level(z, tol, constants(m).log2_C0));
}

/// Direct expansion of the inner product (conjugate-linear in the first slot).
inline Complex inner(const ZetaVector& a, const ZetaVector& b) {
  Complex acc = 0.0;
  for (const auto& s : a.terms)
    for (const auto& t : b.terms) {
      const double g = inner(s.vector, t.vector);
      if (g != 0.0) acc += std::conj(s.coefficient) * t.coefficient * g;
    }
  return std::conj(a.prefactor) * b.prefactor * acc;
}

namespace detail {

// ||zeta_K||^2 through the tridiagonal Gram matrix of the eta's.
inline double zeta_norm2_indexed(const CorridorModel& m, std::size_t i, Complex z, XiSign sign, int K) {
  const double r2 = std::norm(z);
  double diag = 0.0, off = 0.0, weight = 1.0;
  for (int k = 0; k <= K; ++k) {
    diag += weight * eta_gram_indexed(m, i, k, k, sign);
    if (k < K) off += weight * eta_gram_indexed(m, i, k, k + 1, sign);
    weight *= r2;
  }
  return std::abs(1.0 - z) * (diag + 2.0 * z.real() * off);
}

}  // namespace detail

inline double zeta_norm2(const CorridorModel& m, VertexId w, Complex z, XiSign sign, int K) {
  return detail::zeta_norm2_indexed(m, m.table().index_of(w), z, sign, K);
}

struct KernelEntry {
  Complex value;
  double bound = 0;  // |value - exact kernel| <= bound
  int K_max = 0;
};

/// Evaluates <zeta-_z(y), zeta+_z(x)> = (1-z) sum_{k,l<=K} z^{k+l} <eta-_l(y), eta+_k(x)>
/// for many pairs with one truncation level; norms are cached per vertex.
class ZetaKernel {
 public:
  ZetaKernel(const CorridorModel& m, Complex z, double tol)
      : m_(m), z_(z), consts_(constants(m)), K_(truncation_level(z, tol, consts_.log2_C0)),
        eps_(truncation_tail(z, K_, consts_.log2_C0)),
        norm_plus_(m.core_size(), -1.0), norm_minus_(m.core_size(), -1.0) {
    powers_.resize(2 * K_ + 1);
    Complex p = 1.0;
    for (auto& v : powers_) {
      v = p;
      p *= z;
    }
  }

  int K() const { return K_; }
  double epsilon() const { return eps_; }
  const FactorizationConstants& consts() const { return consts_; }

  double norm_plus(std::size_t i) {
    if (norm_plus_[i] < 0) norm_plus_[i] = std::sqrt(detail::zeta_norm2_indexed(m_, i, z_, XiSign::plus, K_));
    return norm_plus_[i];
  }
  double norm_minus(std::size_t j) {
    if (norm_minus_[j] < 0) norm_minus_[j] = std::sqrt(detail::zeta_norm2_indexed(m_, j, z_, XiSign::minus, K_));
    return norm_minus_[j];
  }

  /// Core indices.
  KernelEntry at(std::size_t i, std::size_t j) {
    // (k,l) with T(x,k) and T(y,l) sharing a point w: k in {a,a+1}, l in {b,b+1}
    candidates_.clear();
    auto add = [&](int a, int b) {
      for (int k = a; k <= a + 1 && k <= K_; ++k)
        for (int l = b; l <= b + 1 && l <= K_; ++l) candidates_.push_back({k, l});
    };
    const auto& t = m_.table();
    const auto& dy = t.dist(j);
    for (int a = 0; a <= std::min(K_, t.max_level(i)); ++a) {
      // snapshot members at distance a from x: T(x,a) minus the a-1 layer
      m_.for_each_member(i, a, [&](VertexId w) {
        if (is_virtual(w, t.snapshot_vertices()) || m_.level_of(i, w) != a || !m_.in_corridor(j, w)) return;
        add(a, dy[w]);
      });
    }
    const int dx = t.end_distance(i), dye = t.end_distance(j);
    for (int s = 1; dx + s <= K_ && dye + s <= K_; ++s) add(dx + s, dye + s);
    std::sort(candidates_.begin(), candidates_.end());
    candidates_.erase(std::unique(candidates_.begin(), candidates_.end()), candidates_.end());

    Complex sum = 0.0;
    for (const auto& [k, l] : candidates_) {
      if (detail::eta_inner_indexed(m_, i, k, j, l)) sum += powers_[k + l];
    }
    KernelEntry e;
    e.value = (1.0 - z_) * sum;
    e.K_max = K_;
    // |<u,v> - <u_K,v_K>| <= eps (||v_K|| + eps) + ||u_K|| eps
    e.bound = eps_ * (norm_minus(j) + eps_) + norm_plus(i) * eps_;
    return e;
  }

 private:
  const CorridorModel& m_;
  Complex z_;
  FactorizationConstants consts_;
  int K_;
  double eps_;
  std::vector<double> norm_plus_, norm_minus_;
  std::vector<Complex> powers_;
  std::vector<std::pair<int, int>> candidates_;
};

inline KernelEntry zeta_kernel(const CorridorModel& m, VertexId x, VertexId y, Complex z, double tol) {
  ZetaKernel k(m, z, tol);
  return k.at(m.table().index_of(x), m.table().index_of(y));
}

/// A multiplier norm bound together with the data that produced it. For
/// certificates assembled from several factorizations the sup norms are
/// those of the balanced direct sum, sqrt(bound) each.
struct NormCertificate {
  std::string kind;  // theta | sphere | ball | radial
  double bound = 0;
  double sup_norm_plus = 0;
  double sup_norm_minus = 0;
  double analytic_bound = 0;
  bool within_analytic = true;
  FactorizationConstants consts;
  CorridorParams params;
  std::optional<Complex> z;
  std::optional<int> n;
  double tol = 0;
  int K_max = 0;
};

namespace detail {

inline NormCertificate certificate_base(const CorridorModel& m, std::string kind) {
  NormCertificate c;
  c.kind = std::move(kind);
  c.consts = constants(m);
  c.params = m.params();
  return c;
}

}  // namespace detail

/// Certificate for theta_z = z^d: sup of the Gram norms of zeta+ and zeta-,
/// each enlarged by the truncation tail.
inline NormCertificate theta_certificate(const CorridorModel& m, Complex z, double tol) {
  auto c = detail::certificate_base(m, "theta");
  const int K = truncation_level(z, tol, c.consts.log2_C0);
  const double eps = truncation_tail(z, K, c.consts.log2_C0);
  double np = 0, nm = 0;
  for (std::size_t i = 0; i < m.core_size(); ++i) {
    np = std::max(np, std::sqrt(detail::zeta_norm2_indexed(m, i, z, XiSign::plus, K)));
    nm = std::max(nm, std::sqrt(detail::zeta_norm2_indexed(m, i, z, XiSign::minus, K)));
  }
  c.sup_norm_plus = np + eps;
  c.sup_norm_minus = nm + eps;
  c.bound = c.sup_norm_plus * c.sup_norm_minus;
  c.analytic_bound = c.consts.C * std::abs(1.0 - z) / (1.0 - std::abs(z));
  c.within_analytic = c.bound <= c.analytic_bound;
  c.z = z;
  c.tol = tol;
  c.K_max = K;
  return c;
}

/// Per-level sup norms of eta+_k and eta-_k over the core, k = 0..n.
struct EtaSupTable {
  std::vector<double> plus, minus;
};

inline EtaSupTable eta_sup_table(const CorridorModel& m, int n) {
  EtaSupTable t;
  t.plus.assign(std::max(0, n + 1), 0.0);
  t.minus.assign(std::max(0, n + 1), 0.0);
  for (std::size_t i = 0; i < m.core_size(); ++i)
    for (int k = 0; k <= n; ++k) {
      t.plus[k] = std::max(t.plus[k], std::sqrt(detail::eta_gram_indexed(m, i, k, k, XiSign::plus)));
      t.minus[k] = std::max(t.minus[k], std::sqrt(detail::eta_gram_indexed(m, i, k, k, XiSign::minus)));
    }
  return t;
}

namespace detail {

inline double ball_bound(const EtaSupTable& t, int n) {
  double b = 0;
  for (int k = 0; k <= n; ++k) b += t.plus[k] * t.minus[n - k];
  return b;
}

}  // namespace detail

/// chi_E(n) = sum_k chi_Z(k,n-k), each term bounded by sup||eta+_k|| sup||eta-_{n-k}||.
inline NormCertificate ball_certificate(const CorridorModel& m, int n) {
  if (n < 0) throw InputError("n must be non-negative");
  auto c = detail::certificate_base(m, "ball");
  const auto t = eta_sup_table(m, n);
  c.bound = detail::ball_bound(t, n);
  c.sup_norm_plus = c.sup_norm_minus = std::sqrt(c.bound);
  c.analytic_bound = c.consts.C0 * (n + 1);
  c.within_analytic = c.bound <= c.analytic_bound;
  c.n = n;
  return c;
}

/// chi_{d=n} = chi_E(n) - chi_E(n-1).
inline NormCertificate sphere_certificate(const CorridorModel& m, int n) {
  if (n < 0) throw InputError("n must be non-negative");
  auto c = detail::certificate_base(m, "sphere");
  const auto t = eta_sup_table(m, n);
  c.bound = detail::ball_bound(t, n) + (n > 0 ? detail::ball_bound(t, n - 1) : 0.0);
  c.sup_norm_plus = c.sup_norm_minus = std::sqrt(c.bound);
  c.analytic_bound = 2.0 * c.consts.C0 * (n + 1);
  c.within_analytic = c.bound <= c.analytic_bound;
  c.n = n;
  return c;
}

/// f(m) = r^m for m <= K, else 0.
struct RadialFunction {
  double r = 0.5;
  int K = 0;

  double operator()(int m) const { return m >= 0 && m <= K ? std::pow(r, m) : 0.0; }
};

/// C sum_{m>K} (m+1) r^m, the sphere-by-sphere tail of theta_r - f.
inline double radial_tail_infinite(double C, double r, int K) {
  return C * ((K + 2) * std::pow(r, K + 1) - (K + 1) * std::pow(r, K + 2)) / ((1 - r) * (1 - r));
}

/// Largest distance between two core vertices.
inline int core_diameter(const RayTable& t) {
  int d = 0;
  const auto core = t.core();
  for (std::size_t i = 0; i < t.core_size(); ++i) {
    const auto& row = t.dist(i);
    for (VertexId y : core) d = std::max(d, row[y]);
  }
  return d;
}

struct RadialResult {
  RadialFunction f;
  NormCertificate certificate;
  double theta_bound = 0;
  double tail_core = 0;      // sum over spheres present in the core
  double tail_infinite = 0;  // closed form over all m > K
};

/// ||f o d|| <= ||theta_r|| + sum_{m>K} r^m ||chi_{d=m}||, with the analytic
/// sphere bound C (m+1) in the tail.
inline RadialResult radial_multiplier(const CorridorModel& m, double r, int K, double tol) {
  if (!(r > 0.0 && r < 1.0)) throw InputError("radial base must lie in (0,1)");
  if (K < 0) throw InputError("cutoff must be non-negative");
  RadialResult res;
  res.f = {r, K};
  const auto theta = theta_certificate(m, r, tol);
  res.theta_bound = theta.bound;
  const double C = theta.consts.C;
  const int D = core_diameter(m.table());
  for (int s = K + 1; s <= D; ++s) res.tail_core += std::pow(r, s) * C * (s + 1);
  res.tail_infinite = radial_tail_infinite(C, r, K);

  auto& c = res.certificate;
  c = detail::certificate_base(m, "radial");
  c.bound = theta.bound + res.tail_core;
  c.sup_norm_plus = c.sup_norm_minus = std::sqrt(c.bound);
  c.analytic_bound = C + res.tail_infinite;
  c.within_analytic = c.bound <= c.analytic_bound;
  c.z = Complex(r, 0.0);
  c.tol = tol;
  c.K_max = theta.K_max;
  return res;
}

struct ScheduleStep {
  int n = 1;
  double r = 0.5;
  int K = 0;
};

/// r_n = 1 - 1/(n+1) and the least K_n with an infinite tail <= 1.
inline ScheduleStep schedule_step(int n, double C) {
  if (n < 1) throw InputError("schedule index must be >= 1");
  ScheduleStep s{n, 1.0 - 1.0 / (n + 1), 0};
  while (radial_tail_infinite(C, s.r, s.K) > 1.0) {
    if (++s.K > 10'000'000) throw InputError("schedule cutoff diverged");
  }
  return s;
}

struct WitnessTable {
  ScheduleStep step;
  std::vector<VertexId> vertices;
  std::vector<int> depth;
  std::vector<double> phi;
  std::size_t support_size = 0;
  RadialResult radial;
  std::vector<std::string> warnings;
};

/// phi_n(x) = f_n(d(o,x)) over the core.
inline WitnessTable weak_amenability_witness(const CorridorModel& m, int n, double tol) {
  WitnessTable w;
  const auto consts = constants(m);
  w.step = schedule_step(n, consts.C);
  w.radial = radial_multiplier(m, w.step.r, w.step.K, tol);
  const Graph& g = m.table().graph();
  if (!g.cayley()) w.warnings.push_back("provider " + g.provider() + " is not a group; phi_n is a radial function only");
  for (VertexId v : g.core()) {
    w.vertices.push_back(v);
    w.depth.push_back(g.depth(v));
    w.phi.push_back(w.radial.f(g.depth(v)));
    w.support_size += w.phi.back() != 0.0;
  }
  return w;
}

}  // namespace hypwa
