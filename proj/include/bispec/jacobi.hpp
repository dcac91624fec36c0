#pragma once

#include "bispec/symbols.hpp"

namespace bispec {

/// Gauss-Jacobi rule for the weight (1-x)^a (1+x)^b on [-1, 1] (Golub-Welsch).
void gauss_jacobi(int n, double a, double b, std::vector<double>& x, std::vector<double>& w);

/// Orthonormal trigonometric Jacobi polynomials on [0, pi] for the measure
/// (sin t/2)^{2a+1} (cos t/2)^{2b+1} dt. Immutable after construction.
class JacobiBasis {
public:
  JacobiBasis(double alpha, double beta, int n_max, int quad_size = 0);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double gamma() const { return gamma_; }
  int n_max() const { return n_max_; }
  /// mu([0, pi]) = B(a+1, b+1).
  double total_mass() const { return mass_; }

  const std::vector<double>& nodes() const { return theta_; }      // theta_i
  const std::vector<double>& weights() const { return weight_; }   // mu-weights
  /// P_n(theta_i), row n.
  double table(int n, std::size_t i) const { return table_[static_cast<std::size_t>(n) * theta_.size() + i]; }

  /// P_n(theta) by the recurrence in x = cos theta and the closed-form norm.
  double eval(int n, double theta) const;
  /// P_0..P_{n_max} at theta.
  std::vector<double> eval_all(double theta) const;
  /// Squared mu-norm of the classical P_n^{(a,b)}(cos .).
  double classical_norm_sq(int n) const;

private:
  double alpha_, beta_, gamma_, mass_;
  int n_max_;
  std::vector<double> theta_, weight_, table_;
  std::vector<double> norm_;  // 1 / ||P_n^{(a,b)}(cos .)||
};

/// Classical P_n^{(a,b)}(x) by the three-term recurrence.
double jacobi_classical(int n, double a, double b, double x);

struct SpectralCoefficients {
  double alpha = 0.0, beta = 0.0;
  std::vector<cplx> coeffs;  // index n = 0..
};

SpectralCoefficients analyze(const JacobiBasis& basis, const std::vector<cplx>& samples);
/// Samples at the given angles.
std::vector<cplx> synthesize(const JacobiBasis& basis, const SpectralCoefficients& c,
                             const std::vector<double>& theta);
/// Samples at the quadrature nodes.
std::vector<cplx> synthesize_nodes(const JacobiBasis& basis, const SpectralCoefficients& c);

SpectralCoefficients apply_J_multiplier(const JacobiBasis& basis, const Symbol1D& mu,
                                        const SpectralCoefficients& c);

std::vector<cplx> bilinear_jacobi(const JacobiBasis& basis, const Symbol2D& m,
                                  const SpectralCoefficients& c1, const SpectralCoefficients& c2,
                                  const std::vector<double>& theta);

/// c_{n1,n2}(j) = <P_n1 P_n2, P_j> for j = 0..n_max.
std::vector<double> linearization_coeffs(const JacobiBasis& basis, int n1, int n2);

struct JacobiPFResult {
  bool pass = false;
  double leaked_energy = 0.0;  // relative coefficient mass outside the band
  double total_energy = 0.0;
};

/// Product of an admissible low/band pair expanded via linearization; mass of
/// degrees j with j + gamma outside [2^{k-2}, 2^{k+2}].
JacobiPFResult check_pf_jacobi(int k, const SpectralCoefficients& c1,
                               const SpectralCoefficients& c2, const JacobiBasis& basis,
                               double tol = 1e-10);

/// Random admissible pair for check_pf_jacobi at scale k: Gaussian
/// coefficients on n + gamma <= 2^{k-3} and on 2^{k-1} <= n + gamma <= 2^{k+1}.
std::pair<SpectralCoefficients, SpectralCoefficients> random_pf_pair(const JacobiBasis& basis, int k,
                                                                     std::uint64_t seed,
                                                                     std::uint64_t stream);
/// Basis degree needed for the products at scale k.
int pf_degree_needed(double gamma, int k);

/// J f by finite differences in theta (8th order), f given as a callable.
double apply_J_fd(const std::function<double(double)>& f, double alpha, double beta, double theta,
                  double h = 1e-3);

SpectralCoefficients read_coefficients_json(const std::string& path);
std::string coefficients_to_json(const SpectralCoefficients& c);

}  // namespace bispec
