#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "bispec/jacobi.hpp"
#include "bispec/paradiff.hpp"

using namespace bispec;

namespace {

const std::vector<std::pair<double, double>> kParams = {{0.3, 0.5}, {0.5, 0.5}, {1.0, 0.3}};

// Generalized binomial coefficient C(n, k) for integer k >= 0, by the product formula.
double gbinom(double n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c *= (n - k + i) / i;
  return c;
}

// Explicit sum form of the classical Jacobi polynomial, obtained from the Rodrigues formula
// by the Leibniz rule for the n-th derivative.
// Also returns the sum of absolute terms, which bounds the rounding error of the oracle.
double jacobi_by_sum(int n, double a, double b, double x, double* scale) {
  double s = 0.0;
  *scale = 0.0;
  for (int k = 0; k <= n; ++k) {
    double t = gbinom(n + a, n - k) * gbinom(n + b, k) * std::pow((x - 1) / 2, k) * std::pow((x + 1) / 2, n - k);
    s += t;
    *scale += std::fabs(t);
  }
  return s;
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  double h = (b - a) / n, s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST(Jacobi, ClassicalMatchesExplicitSum) {
  for (auto [a, b] : kParams)
    for (int n = 0; n <= 12; ++n)
      for (double x : {-0.93, -0.4, 0.0, 0.37, 0.88}) {
        double scale = 0.0;
        double want = jacobi_by_sum(n, a, b, x, &scale);
        EXPECT_NEAR(jacobi_classical(n, a, b, x), want, 1e-14 * std::max(1.0, scale));
      }
}

TEST(Jacobi, QuadratureIntegratesWeight) {
  for (auto [a, b] : kParams) {
    std::vector<double> x, w;
    gauss_jacobi(20, a, b, x, w);
    double m0 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      m0 += w[i];
      m2 += w[i] * x[i] * x[i];
    }
    // Moments of (1-x)^a (1+x)^b on [-1, 1].
    double B = std::exp(std::lgamma(a + 1) + std::lgamma(b + 1) - std::lgamma(a + b + 2));
    EXPECT_NEAR(m0, std::exp2(a + b + 1) * B, 1e-13);
    double want2 = simpson([&](double t) {
      double xx = std::cos(t);
      return xx * xx * std::pow(1 - xx, a) * std::pow(1 + xx, b) * std::sin(t);
    }, 0.0, kPi, 1 << 18);
    EXPECT_NEAR(m2, want2, 1e-6);
  }
}

TEST(Jacobi, GramIdentity) {
  for (auto [a, b] : kParams) {
    JacobiBasis B(a, b, 50);
    double err = 0.0;
    for (int n = 0; n <= 50; ++n)
      for (int m = 0; m <= n; ++m) {
        double s = 0.0;
        for (std::size_t i = 0; i < B.nodes().size(); ++i) s += B.weights()[i] * B.table(n, i) * B.table(m, i);
        err = std::max(err, std::fabs(s - (n == m)));
      }
    EXPECT_LT(err, 1e-10);
  }
}

TEST(Jacobi, NormAgainstIndependentQuadrature) {
  // (1, 0.5): the density sin^3(t/2) cos^2(t/2) is smooth, so Simpson is accurate.
  JacobiBasis B(1.0, 0.5, 6);
  for (int n = 0; n <= 6; ++n) {
    double s = simpson([&](double t) {
      double p = B.eval(n, t);
      return p * p * std::pow(std::sin(t / 2), 3) * std::pow(std::cos(t / 2), 2);
    }, 0.0, kPi, 1 << 14);
    EXPECT_NEAR(s, 1.0, 1e-10) << n;
  }
  EXPECT_NEAR(B.total_mass(), std::tgamma(2.0) * std::tgamma(1.5) / std::tgamma(3.5), 1e-14);
}

TEST(Jacobi, EigenRelation) {
  for (auto [a, b] : kParams) {
    JacobiBasis B(a, b, 20);
    double g = B.gamma();
    for (int n : {0, 1, 2, 5, 10, 20})
      for (double t : {0.3, 1.1, 1.9, 2.8}) {
        double lhs = apply_J_fd([&](double s) { return B.eval(n, s); }, a, b, t);
        double rhs = (n + g) * (n + g) * B.eval(n, t);
        EXPECT_NEAR(lhs, rhs, 1e-6 * std::max(1.0, (n + g) * (n + g))) << n << " " << t;
      }
  }
}

TEST(Jacobi, AnalyzeSynthesizeRoundTrip) {
  JacobiBasis B(0.3, 0.5, 30);
  Rng rng(5);
  SpectralCoefficients c{0.3, 0.5, {}};
  for (int n = 0; n <= 30; ++n) c.coeffs.push_back(rng.complex_normal());
  auto back = analyze(B, synthesize_nodes(B, c));
  for (int n = 0; n <= 30; ++n) EXPECT_NEAR(std::abs(back.coeffs[n] - c.coeffs[n]), 0.0, 1e-12);
  auto vals = synthesize(B, c, {0.7});
  cplx direct = 0.0;
  for (int n = 0; n <= 30; ++n) direct += c.coeffs[n] * B.eval(n, 0.7);
  EXPECT_NEAR(std::abs(vals[0] - direct), 0.0, 1e-12);
}

TEST(Jacobi, MultiplierActsOnSpectralVariable) {
  JacobiBasis B(0.5, 0.5, 10);
  SpectralCoefficients c{0.5, 0.5, std::vector<cplx>(11, 1.0)};
  auto out = apply_J_multiplier(B, parse_univariate("l1^2"), c);
  // gamma = (alpha + beta + 1) / 2 = 1.
  for (int n = 0; n <= 10; ++n) EXPECT_NEAR(out.coeffs[n].real(), std::pow(n + 1.0, 2), 1e-12);
}

TEST(Jacobi, BilinearConstantSymbolIsProduct) {
  JacobiBasis B(1.0, 0.3, 24);
  Rng rng(8);
  SpectralCoefficients c1{1.0, 0.3, {}}, c2{1.0, 0.3, {}};
  for (int n = 0; n <= 12; ++n) {
    c1.coeffs.push_back(rng.complex_normal());
    c2.coeffs.push_back(rng.complex_normal());
  }
  std::vector<double> th = {0.2, 1.0, 2.2, 3.0};
  auto out = bilinear_jacobi(B, builtin_symbol("one", {}), c1, c2, th);
  auto a = synthesize(B, c1, th), b = synthesize(B, c2, th);
  for (std::size_t i = 0; i < th.size(); ++i) EXPECT_NEAR(std::abs(out[i] - a[i] * b[i]), 0.0, 1e-11);
}

TEST(Jacobi, LinearizationWindowAndReproduction) {
  for (auto [a, b] : kParams) {
    JacobiBasis B(a, b, 40);
    double worst = 0.0;
    for (int n1 = 0; n1 <= 20; ++n1)
      for (int n2 = 0; n2 <= 20; ++n2) {
        auto c = linearization_coeffs(B, n1, n2);
        double tot = 0.0, out = 0.0;
        for (int j = 0; j < static_cast<int>(c.size()); ++j) {
          tot += c[j] * c[j];
          if (j < std::abs(n1 - n2) || j > n1 + n2) out += c[j] * c[j];
        }
        worst = std::max(worst, out / tot);
      }
    EXPECT_LT(worst, 1e-10);
    auto c = linearization_coeffs(B, 7, 11);
    for (double t : {0.4, 1.7, 2.9}) {
      double s = 0.0;
      for (int j = 0; j < static_cast<int>(c.size()); ++j) s += c[j] * B.eval(j, t);
      EXPECT_NEAR(s, B.eval(7, t) * B.eval(11, t), 1e-10);
    }
  }
}

TEST(Jacobi, SupportPropertyAtAdmissibleScales) {
  for (auto [a, b] : kParams) {
    const double g = (a + b + 1) / 2;
    for (int k = 0; k <= 6; ++k) {
      if (std::exp2(k - 3) < g) continue;  // empty low band
      JacobiBasis B(a, b, pf_degree_needed(g, k));
      for (int t = 0; t < 3; ++t) {
        auto [c1, c2] = random_pf_pair(B, k, 11, t);
        auto r = check_pf_jacobi(k, c1, c2, B);
        EXPECT_TRUE(r.pass);
        EXPECT_LT(r.leaked_energy, 1e-10);
        EXPECT_GT(r.total_energy, 0.0);
      }
    }
  }
}

TEST(Jacobi, SupportPropertyEdgeCases) {
  JacobiBasis B(0.5, 0.5, pf_degree_needed(1.5, 4));
  auto [c1, c2] = random_pf_pair(B, 4, 3, 0);
  SpectralCoefficients zero{0.5, 0.5, std::vector<cplx>(c1.coeffs.size(), 0.0)};
  auto r = check_pf_jacobi(4, zero, c2, B);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.total_energy, 0.0);
  // c2 used as the low factor violates the low-band precondition.
  EXPECT_THROW(check_pf_jacobi(4, c2, c2, B), ValidationError);
}

TEST(Jacobi, DegreeNeededIsNonNegative) {
  EXPECT_EQ(pf_degree_needed(1.15, 0), 0);  // (1, 0.3): the raw bound is -1
  EXPECT_EQ(pf_degree_needed(1.0, 4), 1 + 31 + 1);
}

TEST(Jacobi, RejectsBadParameters) {
  EXPECT_THROW(JacobiBasis(-0.6, 0.5, 4), ValidationError);
  EXPECT_THROW(JacobiBasis(0.5, 0.5, -1), ValidationError);
}

TEST(Jacobi, CoefficientJsonRoundTrip) {
  SpectralCoefficients c{0.3, 0.5, {{1.0, 2.0}, {-0.5, 0.25}}};
  auto path = std::filesystem::temp_directory_path() / "bispec_jacobi_rt.json";
  write_atomic(path.string(), coefficients_to_json(c));
  auto d = read_coefficients_json(path.string());
  EXPECT_EQ(d.alpha, 0.3);
  EXPECT_EQ(d.beta, 0.5);
  ASSERT_EQ(d.coeffs.size(), 2u);
  EXPECT_EQ(d.coeffs[1], cplx(-0.5, 0.25));
  std::filesystem::remove(path);
}
