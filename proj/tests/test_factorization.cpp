#include <gtest/gtest.h>

#include <map>

#include "hypwa/factorization.hpp"
#include "hypwa/providers.hpp"

using namespace hypwa;

namespace {

std::shared_ptr<const RayTable> table_of(Graph g) { return std::make_shared<const RayTable>(std::move(g)); }

CorridorParams manual(double rho, int R1) {
  CorridorParams p;
  p.rho = rho;
  p.R0 = 1;
  p.R1 = R1;
  return p;
}

// Fully materialized tensor: tuple of subsets -> coefficient.
using Tensor = std::map<std::vector<SubsetKey>, Complex>;

Tensor materialize(const TensorVector& t, Complex scale) {
  Tensor out{{{}, scale}};
  for (const auto& f : t.factors) {
    const auto v = xi_vector(f);
    Tensor next;
    for (const auto& [key, c] : out)
      for (const auto& [s, x] : v.entries()) {
        auto k = key;
        k.push_back(s);
        next[k] += c * static_cast<double>(x);
      }
    out = std::move(next);
  }
  return out;
}

Tensor materialize(const ZetaVector& z) {
  Tensor out;
  for (const auto& term : z.terms)
    for (const auto& [k, c] : materialize(term.vector, z.prefactor * term.coefficient)) out[k] += c;
  return out;
}

Complex tensor_inner(const Tensor& a, const Tensor& b) {
  Complex acc = 0;
  for (const auto& [k, c] : a) {
    auto it = b.find(k);
    if (it != b.end()) acc += std::conj(c) * it->second;
  }
  return acc;
}

}  // namespace

TEST(Constants, Formula) {
  const auto c = FactorizationConstants::from(2, 1);
  EXPECT_EQ(c.log2_C0, 4.0);
  EXPECT_EQ(c.C0, 16.0);
  EXPECT_EQ(c.C, 32.0);
  const auto big = FactorizationConstants::from(40, 400);
  EXPECT_EQ(big.log2_C0, 40.0 * 401);
  EXPECT_FALSE(std::isfinite(big.C0));
}

TEST(Eta, DegenerateTensorWhenR1Zero) {
  auto t = table_of(gen_line(8));
  CorridorModel m(t, manual(0.5, 0));
  const auto e = eta(m, 4, 2, XiSign::plus);
  ASSERT_EQ(e.rank(), 1u);
  EXPECT_FALSE(e.factors[0].tilde);
  EXPECT_EQ(e.factors[0].set, SubsetKey(m.members(t->index_of(4), 2)));
}

TEST(Eta, FactorLevels) {
  auto t = table_of(gen_line(8));
  CorridorModel m(t, manual(0.5, 2));
  const auto i = t->index_of(3);
  const auto p = eta(m, 3, 4, XiSign::plus), q = eta(m, 3, 4, XiSign::minus);
  ASSERT_EQ(p.rank(), 3u);
  for (int s = 0; s <= 2; ++s) {
    EXPECT_EQ(p.factors[s].set, SubsetKey(m.members(i, 4 + s)));
    EXPECT_EQ(q.factors[s].set, SubsetKey(m.members(i, 4 - s)));
    EXPECT_EQ(p.factors[s].tilde, s > 0);
  }
}

TEST(Eta, NormsAndOrthogonality) {
  for (auto g : {gen_cycle(8), gen_free_group_ball(2, 3)}) {
    auto t = table_of(std::move(g));
    const auto p = calibrate_empirical(t, HalfInt(1));
    CorridorModel m(t, p);
    const double C0 = constants(m).C0;
    for (VertexId w : t->core())
      for (auto sign : {XiSign::plus, XiSign::minus})
        for (int a = 0; a <= 10; ++a) {
          const auto ea = eta(m, w, a, sign);
          EXPECT_LE(norm2(ea), C0);
          EXPECT_EQ(norm2(ea), eta_gram(m, w, a, a, sign));
          for (int b = a + 2; b <= 12; ++b) ASSERT_EQ(inner(ea, eta(m, w, b, sign)), 0.0) << w << " " << a << " " << b;
        }
  }
}

TEST(Eta, InnerOnDiagonalOfTree) {
  auto t = table_of(gen_regular_tree(3, 3));
  CorridorModel m(t, manual(0.5, 1));
  for (VertexId x : t->core())
    EXPECT_EQ(eta_inner(m, x, 0, x, 0), m.in_Z(t->index_of(x), t->index_of(x), 0, 0) ? 1 : 0);
}

TEST(Eta, InnerTableEqualsZ) {
  struct Case {
    Graph g;
    int n_max;
  };
  std::vector<Case> cases;
  cases.push_back({gen_free_group_ball(2, 4), 6});
  cases.push_back({gen_cycle(8), 11});
  for (auto& c : cases) {
    auto t = table_of(std::move(c.g));
    CorridorModel m(t, calibrate_empirical(t, HalfInt(1)));
    for (std::size_t i = 0; i < m.core_size(); ++i)
      for (std::size_t j = 0; j < m.core_size(); ++j)
        for (int n = 0; n <= c.n_max; ++n)
          for (int k = 0; k <= n; ++k) {
            const int z = m.in_Z(i, j, k, n - k);
            ASSERT_EQ(detail::eta_inner_indexed(m, i, k, j, n - k), z);
            if ((i + j + n) % 13 == 0) {
              ASSERT_EQ(eta_inner(m, t->core()[i], k, t->core()[j], n - k), z);
            }
          }
  }
}

TEST(Truncation, LevelIsMinimal) {
  for (Complex z : {Complex(0.5), Complex(-0.7), std::polar(0.9, 0.7), Complex(0.99)}) {
    for (double log2_C0 : {0.0, 4.0, 12.0}) {
      const int K = truncation_level(z, 1e-9, log2_C0);
      EXPECT_LE(truncation_tail(z, K, log2_C0), 1e-9);
      if (K > 0) {
        EXPECT_GT(truncation_tail(z, K - 1, log2_C0), 1e-9);
      }
    }
  }
  EXPECT_EQ(truncation_level(0.0, 1e-9, 4.0), 0);
  EXPECT_THROW(truncation_level(1.0, 1e-9, 4.0), InputError);
  EXPECT_THROW(truncation_level(0.5, 0.0, 4.0), InputError);
  EXPECT_THROW(truncation_level(1.0 - 1e-12, 1e-12, 4.0), InputError);
}

TEST(Zeta, AtZero) {
  auto t = table_of(gen_line(6));
  CorridorModel m(t, manual(0.5, 1));
  const auto z = zeta(m, 3, 0.0, XiSign::plus, 1e-9);
  ASSERT_EQ(z.terms.size(), 1u);
  EXPECT_EQ(z.prefactor, Complex(1.0));
  EXPECT_EQ(z.terms[0].coefficient, Complex(1.0));
  EXPECT_EQ(z.terms[0].level, 0);
}

TEST(Zeta, GramNormMatchesExpansion) {
  struct Case {
    Graph g;
    CorridorParams p;
  };
  std::vector<Case> cases;
  cases.push_back({gen_line(4), manual(0.5, 1)});
  cases.push_back({gen_cycle(8), manual(1.5, 2)});
  for (auto& c : cases) {
    auto t = table_of(std::move(c.g));
    CorridorModel m(t, c.p);
    for (VertexId w : t->core())
      for (Complex z : {Complex(0.4), Complex(-0.6), Complex(0.3, 0.5)})
        for (auto sign : {XiSign::plus, XiSign::minus}) {
          const auto v = zeta(m, w, z, sign, 3);
          const auto full = materialize(v);
          const double direct = tensor_inner(full, full).real();
          EXPECT_NEAR(zeta_norm2(m, w, z, sign, 3), direct, 1e-10 * (1 + direct));
          EXPECT_NEAR(inner(v, v).real(), direct, 1e-10 * (1 + direct));
        }
  }
}

TEST(Zeta, RealNormBelowC) {
  auto t = table_of(gen_free_group_ball(2, 3));
  CorridorModel m(t, calibrate_empirical(t, HalfInt(1)));
  const double C = constants(m).C;
  for (double r : {0.1, 0.5, 0.9, 0.99})
    for (VertexId w : t->core()) {
      const int K = truncation_level(r, 1e-9, constants(m).log2_C0);
      EXPECT_LT(zeta_norm2(m, w, r, XiSign::plus, K), C);
      EXPECT_LT(zeta_norm2(m, w, r, XiSign::minus, K), C);
    }
}

TEST(Kernel, DiagonalAndTreeValue) {
  auto t = table_of(gen_regular_tree(3, 4));
  CorridorModel m(t, calibrate_empirical(t, HalfInt(1)));
  for (VertexId x : t->core()) {
    const auto e = zeta_kernel(m, x, x, 0.5, 1e-9);
    EXPECT_LE(std::abs(e.value - 1.0), e.bound);
  }
  // vertices 4 and 1: 4 is a child of 1, 1 a child of the root; pick a pair at distance 3
  const auto& d = t->oracle();
  VertexId x = 0, y = 0;
  for (VertexId a : t->core())
    for (VertexId b : t->core())
      if (d(a, b) == 3) {
        x = a;
        y = b;
      }
  ASSERT_EQ(d(x, y), 3);
  const auto e = zeta_kernel(m, x, y, 0.5, 1e-9);
  EXPECT_NEAR(e.value.real(), 0.125, 1e-9);
  EXPECT_NEAR(e.value.imag(), 0.0, 1e-9);
}

TEST(Kernel, AllPairsWithinBound) {
  for (auto g : {gen_free_group_ball(2, 3), gen_cycle(10)}) {
    auto t = table_of(std::move(g));
    CorridorModel m(t, calibrate_empirical(t, HalfInt(1)));
    for (Complex z : {Complex(0.5), Complex(-0.7), std::polar(0.9, M_PI / 4)}) {
      ZetaKernel zk(m, z, 1e-9);
      for (std::size_t i = 0; i < m.core_size(); ++i)
        for (std::size_t j = 0; j < m.core_size(); ++j) {
          const auto e = zk.at(i, j);
          const double dev = std::abs(e.value - std::pow(z, t->dist(i)[t->core()[j]]));
          ASSERT_LE(dev, e.bound);
          ASSERT_LE(dev, 1e-8);
        }
    }
  }
}

TEST(Kernel, Holomorphic) {
  auto t = table_of(gen_cycle(8));
  CorridorModel m(t, calibrate_empirical(t, HalfInt(1)));
  const Complex z0(0.2, 0.3);
  const double h = 1e-3;
  auto f = [&](Complex z) { return zeta_kernel(m, 0, 3, z, 1e-12).value; };
  const Complex dx = (f(z0 + h) - f(z0 - h)) / (2 * h);
  const Complex dy = (f(z0 + Complex(0, h)) - f(z0 - Complex(0, h))) / (2 * h);
  // Cauchy-Riemann: df/dy = i df/dx
  EXPECT_LT(std::abs(dy - Complex(0, 1) * dx), 1e-5);
  EXPECT_LT(std::abs(dx - 3.0 * z0 * z0), 1e-5);
}

TEST(Certificates, ThetaWithinAnalytic) {
  auto t = table_of(gen_free_group_ball(2, 3));
  CorridorModel m(t, calibrate_empirical(t, HalfInt(1)));
  for (Complex z : {Complex(0.1), Complex(0.9), Complex(-0.5), std::polar(0.8, 2.0)}) {
    const auto c = theta_certificate(m, z, 1e-9);
    EXPECT_TRUE(c.within_analytic);
    EXPECT_NEAR(c.bound, c.sup_norm_plus * c.sup_norm_minus, 1e-12 * c.bound);
    EXPECT_EQ(c.kind, "theta");
  }
}

TEST(Certificates, SphereIsTwoBalls) {
  auto t = table_of(gen_free_group_ball(2, 3));
  CorridorModel m(t, calibrate_empirical(t, HalfInt(1)));
  // ||eta+_0|| = 1 * 2, ||eta-_0|| = 1
  EXPECT_EQ(sphere_certificate(m, 0).bound, 2.0);
  for (int n = 1; n <= 5; ++n) {
    const auto s = sphere_certificate(m, n);
    EXPECT_NEAR(s.bound, ball_certificate(m, n).bound + ball_certificate(m, n - 1).bound, 1e-12);
    EXPECT_TRUE(s.within_analytic);
    EXPECT_LE(ball_certificate(m, n).bound, constants(m).C0 * (n + 1));
  }
  EXPECT_THROW(sphere_certificate(m, -1), InputError);
}

TEST(Radial, TailClosedForm) {
  for (double r : {0.3, 0.8})
    for (int K : {0, 3, 10}) {
      double direct = 0;
      for (int s = K + 1; s < 4000; ++s) direct += (s + 1) * std::pow(r, s);
      EXPECT_NEAR(radial_tail_infinite(1.0, r, K), direct, 1e-10);
    }
}

TEST(Radial, Multiplier) {
  auto t = table_of(gen_free_group_ball(2, 3));
  CorridorModel m(t, calibrate_empirical(t, HalfInt(1)));
  const auto r = radial_multiplier(m, 0.5, 2, 1e-9);
  EXPECT_EQ(r.f(0), 1.0);
  EXPECT_EQ(r.f(2), 0.25);
  EXPECT_EQ(r.f(3), 0.0);
  EXPECT_LE(r.tail_core, r.tail_infinite);
  EXPECT_TRUE(r.certificate.within_analytic);
  EXPECT_THROW(radial_multiplier(m, 1.0, 2, 1e-9), InputError);
}

TEST(Schedule, Steps) {
  const auto s = schedule_step(3, 32.0);
  EXPECT_EQ(s.r, 0.75);
  EXPECT_LE(radial_tail_infinite(32.0, s.r, s.K), 1.0);
  EXPECT_GT(radial_tail_infinite(32.0, s.r, s.K - 1), 1.0);
  EXPECT_THROW(schedule_step(0, 32.0), InputError);
}

TEST(Witness, MonotoneToOne) {
  auto t = table_of(gen_free_group_ball(2, 3));
  CorridorModel m(t, calibrate_empirical(t, HalfInt(1)));
  std::vector<double> prev;
  for (int n = 1; n <= 4; ++n) {
    const auto w = weak_amenability_witness(m, n, 1e-9);
    EXPECT_TRUE(w.warnings.empty());
    EXPECT_EQ(w.phi[0], 1.0);
    EXPECT_LE(w.radial.certificate.bound, 2 * constants(m).C0 + 1);
    for (std::size_t i = 0; i < w.phi.size(); ++i) {
      if (!prev.empty()) {
        EXPECT_GE(w.phi[i], prev[i]);
      }
      if (w.depth[i] > w.step.K) {
        EXPECT_EQ(w.phi[i], 0.0);
      }
    }
    prev = w.phi;
  }
}
