#pragma once

#include "bispec/lattice.hpp"
#include "bispec/symbols.hpp"

namespace bispec {

/// Bivariate symbol m(|Sin xi1|, |Sin xi2|) tabulated on the distinct
/// spectral values of an N-grid. Immutable; reusable across applications.
class DiscreteMultiplierPlan {
public:
  DiscreteMultiplierPlan(const Symbol2D& m, int dim, int N);

  int dim() const { return dim_; }
  int N() const { return N_; }
  const std::string& name() const { return name_; }

  /// Grid transform of B_m(f1, f2) from the grid transforms of f1, f2.
  std::vector<cplx> apply_grid(const std::vector<cplx>& F1, const std::vector<cplx>& F2) const;

private:
  int dim_, N_;
  std::string name_;
  std::size_t U_ = 0;                   // distinct spectral values
  std::vector<std::uint32_t> q_to_u_;   // DFT-ordered node -> distinct value index
  std::vector<cplx> table_;             // U x U
};

struct BilinearInfo {
  /// l2 mass in the outer eighth of the output window, relative to the total.
  /// Proxy for the mass lost to the |n| <= N/2 truncation.
  double edge_mass = 0.0;
};

/// Value of a symbol at a point with a zero coordinate: the symbol's own value
/// when finite, otherwise 0.
cplx boundary_value(const Symbol2D& m, double l1, double l2);

LatticeSequence apply_linear_multiplier(const Symbol1D& mu, const LatticeSequence& f, int N);
/// Grid-level variant used by harnesses: multiplies grid values by mu(|Sin xi|).
void apply_linear_multiplier_grid(const Symbol1D& mu, std::vector<cplx>& F, int dim, int N);

/// mu(l) = l^{2z} on the principal branch; mu(0) = 1 if z = 0, else 0.
Symbol1D laplacian_power_symbol(cplx z);
LatticeSequence fractional_laplacian(const LatticeSequence& f, cplx z, int N);

LatticeSequence bilinear_apply(const Symbol2D& m, const LatticeSequence& f1,
                               const LatticeSequence& f2, int N, BilinearInfo* info = nullptr);
LatticeSequence bilinear_apply(const DiscreteMultiplierPlan& plan, const LatticeSequence& f1,
                               const LatticeSequence& f2, BilinearInfo* info = nullptr);

/// Grid weights of the positive-frequency projection (d = 1): 1 on modes
/// e^{2 pi i t n} with t in (0, 1/2), 0 on t in (-1/2, 0), 1/2 at t = 0, 1/2.
std::vector<double> riesz_weights(int N);
LatticeSequence riesz_projection(const LatticeSequence& f, int N);
/// Complementary projection I - H.
LatticeSequence riesz_complement(const LatticeSequence& f, int N);

}  // namespace bispec
