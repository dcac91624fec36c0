#include <gtest/gtest.h>

#include <cmath>

#include "bispec/discrete.hpp"

using namespace bispec;

namespace {

// Random sequence on |n_i| <= radius with sum zero, so its transform vanishes at xi = 0.
LatticeSequence zero_mean_sequence(int dim, int radius, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LatticeSequence::Entry> e;
  cplx total = 0.0;
  int r2 = dim == 2 ? radius : 0;
  for (int a = -radius; a <= radius; ++a)
    for (int b = -r2; b <= r2; ++b) {
      cplx v = rng.complex_normal();
      total += v;
      e.push_back({{a, b}, v});
    }
  e.push_back({{0, 0}, -total});
  return LatticeSequence(dim, e);
}

double rel_l2(const LatticeSequence& a, const LatticeSequence& b) {
  return lp_norm(a - b, 2) / lp_norm(b, 2);
}

// Rectangle-rule double sum over the N-grid, d = 1, evaluated on the output window.
LatticeSequence brute_bilinear(const Symbol2D& m, const LatticeSequence& f1,
                               const LatticeSequence& f2, int N) {
  std::vector<double> xi(N), lam(N);
  std::vector<cplx> F1(N, 0.0), F2(N, 0.0);
  for (int j = 0; j < N; ++j) {
    xi[j] = -0.5 + double(j + 1) / N;
    lam[j] = 2.0 * std::fabs(std::sin(kPi * xi[j]));
    for (const auto& [n, v] : f1.entries()) F1[j] += v * std::polar(1.0, 2 * kPi * n[0] * xi[j]);
    for (const auto& [n, v] : f2.entries()) F2[j] += v * std::polar(1.0, 2 * kPi * n[0] * xi[j]);
  }
  std::vector<LatticeSequence::Entry> out;
  for (int x = -N / 2; x < N / 2; ++x) {
    cplx s = 0.0;
    for (int a = 0; a < N; ++a) {
      if (lam[a] == 0.0) continue;
      for (int b = 0; b < N; ++b) {
        if (lam[b] == 0.0) continue;
        s += m(lam[a], lam[b]) * F1[a] * F2[b] * std::polar(1.0, -2 * kPi * x * (xi[a] + xi[b]));
      }
    }
    out.push_back({{x, 0}, s / double(N) / double(N)});
  }
  return LatticeSequence(1, out);
}

LatticeSequence stencil_laplacian(const LatticeSequence& f) {
  std::vector<LatticeSequence::Entry> e;
  for (const auto& [n, v] : f.entries()) {
    e.push_back({n, 2.0 * f.dim() * v});
    for (int j = 0; j < f.dim(); ++j)
      for (int s : {-1, 1}) {
        Point q = n;
        q[j] += s;
        e.push_back({q, -v});
      }
  }
  return LatticeSequence(f.dim(), e);
}

}  // namespace

TEST(Bilinear, ConstantSymbolGivesPointwiseProduct) {
  for (int dim : {1, 2}) {
    auto f = zero_mean_sequence(dim, 6, 1);
    auto g = zero_mean_sequence(dim, 6, 2);
    auto B = bilinear_apply(builtin_symbol("one", {}), f, g, 32);
    EXPECT_LT(rel_l2(B, pointwise(f, g)), 1e-13);
  }
}

TEST(Bilinear, MatchesBruteForceDoubleSum) {
  const int N = 32;
  std::vector<Symbol2D> syms = {parse_symbol("l1^2 / (1 + l1 * l2)"),
                                builtin_symbol("abs_power", {{"v", 1.5}}),
                                builtin_symbol("m11", {{"z", 0.5}}),
                                parse_symbol("sin(3*l1) * cos(l2)")};
  int seed = 10;
  for (const auto& m : syms) {
    auto f = zero_mean_sequence(1, 7, seed++);
    auto g = zero_mean_sequence(1, 7, seed++);
    auto fast = bilinear_apply(m, f, g, N);
    auto slow = brute_bilinear(m, f, g, N);
    EXPECT_LT(lp_norm(fast - slow, 2), 1e-12 * std::max(1.0, lp_norm(slow, 2))) << m.name;
  }
}

TEST(Bilinear, SeparableSymbolFactorsThroughLinearMultiplier) {
  auto f = zero_mean_sequence(1, 8, 3);
  auto g = zero_mean_sequence(1, 8, 4);
  auto B = bilinear_apply(parse_symbol("exp(-l1) * l1"), f, g, 64);
  auto mf = apply_linear_multiplier(parse_univariate("exp(-l1) * l1"), f, 64);
  EXPECT_LT(rel_l2(B, pointwise(mf, g)), 1e-13);
}

TEST(Bilinear, PlanReuseIsIdentical) {
  auto m = builtin_symbol("abs_power", {{"v", 2.0}});
  DiscreteMultiplierPlan plan(m, 1, 64);
  auto f = zero_mean_sequence(1, 5, 5);
  auto g = zero_mean_sequence(1, 5, 6);
  auto a = bilinear_apply(plan, f, g);
  auto b = bilinear_apply(m, f, g, 64);
  EXPECT_LT(lp_norm(a - b, 2), 1e-15 * lp_norm(b, 2));
}

TEST(Bilinear, RejectsUnresolvedInput) {
  auto f = zero_mean_sequence(1, 20, 7);
  EXPECT_THROW(bilinear_apply(builtin_symbol("one", {}), f, f, 32), ValidationError);
  EXPECT_THROW(bilinear_apply(builtin_symbol("one", {}), f, f, 48), ValidationError);
}

TEST(Bilinear, BoundaryValueConvention) {
  EXPECT_EQ(boundary_value(parse_symbol("1 / l1"), 0.0, 1.0), cplx(0.0));
  EXPECT_EQ(boundary_value(parse_symbol("2 + l1"), 0.0, 1.0), cplx(2.0));
}

TEST(FractionalLaplacian, FirstPowerEqualsStencil) {
  for (int dim : {1, 2}) {
    for (int t = 0; t < 5; ++t) {
      auto f = zero_mean_sequence(dim, 5, 100 + t);
      auto a = fractional_laplacian(f, 1.0, 32);
      auto b = stencil_laplacian(f);
      EXPECT_LT(lp_norm(a - b, 2), 1e-12 * lp_norm(b, 2));
    }
  }
}

TEST(FractionalLaplacian, SemigroupAndIdentity) {
  auto f = zero_mean_sequence(1, 4, 9);
  auto id = fractional_laplacian(f, 0.0, 64);
  EXPECT_LT(rel_l2(id, f), 1e-14);
  auto half = fractional_laplacian(fractional_laplacian(f, 0.25, 64), 0.25, 64);
  auto direct = fractional_laplacian(f, 0.5, 64);
  EXPECT_LT(lp_norm(half - direct, 2), 1e-13 * lp_norm(direct, 2));
  EXPECT_THROW(fractional_laplacian(f, -0.5, 64), ValidationError);
}

TEST(FractionalLaplacian, ImaginaryPowerIsUnitaryOnZeroMeanData) {
  auto f = zero_mean_sequence(1, 4, 11);
  const int N = 64;
  // Energy on the grid is preserved exactly when the transform vanishes at 0.
  auto F = torus_transform(f, N);
  std::vector<cplx> G = F.values;
  apply_linear_multiplier_grid(laplacian_power_symbol(cplx(0.0, 1.0)), G, 1, N);
  double e0 = 0.0, e1 = 0.0;
  for (std::size_t i = 0; i < G.size(); ++i) {
    e0 += std::norm(F.values[i]);
    e1 += std::norm(G[i]);
  }
  EXPECT_NEAR(e1 / e0, 1.0, 1e-12);
}

TEST(Riesz, WeightsConvention) {
  const int N = 16;
  auto w = riesz_weights(N);
  for (int j = 0; j < N; ++j) {
    double xi = TorusGrid::node(j, N);
    double want = xi < 0 ? 1.0 : (xi == 0.0 || xi == 0.5 ? 0.5 : 0.0);
    EXPECT_EQ(w[j], want) << xi;
  }
}

TEST(Riesz, ProjectsPositiveModes) {
  // f(n) = e^{2 pi i t n} on a window: positive-frequency modes are kept.
  const int N = 64;
  TorusGrid g(1, N);
  for (int j = 0; j < N; ++j) {
    double xi = TorusGrid::node(j, N);
    if (xi > -0.45 && xi < -0.05) g.values[j] = cplx(std::cos(7 * xi), std::sin(3 * xi));
  }
  auto f = inverse_transform(g);
  EXPECT_LT(rel_l2(riesz_projection(f, N), f), 1e-13);
  EXPECT_LT(lp_norm(riesz_complement(f, N), 2), 1e-13 * lp_norm(f, 2));
  auto h = zero_mean_sequence(1, 6, 12);
  auto sum = riesz_projection(h, N) + riesz_complement(h, N);
  EXPECT_LT(rel_l2(sum, h), 1e-14);
  EXPECT_THROW(riesz_projection(zero_mean_sequence(2, 2, 1), N), ValidationError);
}
