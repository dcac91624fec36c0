#pragma once

#include <array>
#include <optional>

#include "bispec/discrete.hpp"

namespace bispec {

/// Littlewood-Paley partition: psi supported in [1/2, 2], sum_k psi(2^{-k} l) = 1.
struct DyadicPartition {
  CutoffFunction psi;
  int k_lo = 0;
  int k_hi = 0;

  double psi_k(int k, double lambda) const { return psi(std::exp2(-k) * lambda); }
  double sum(double lambda) const;
};

DyadicPartition make_dyadic_partition(int k_lo = -10, int k_hi = 10);

/// Scales whose dyadic band [2^{k-1}, 2^{k+1}] meets [lambda_min, 2 sqrt(d)]
/// for the positive spectral values of an N-grid.
std::pair<int, int> k_range_for_grid(int dim, int N);

// Localized symbols ----------------------------------------------------------

enum class ExpandMode { Diagonal, LowHigh };

ExpandMode parse_mode(const std::string& s);
std::string mode_name(ExpandMode m);

struct ExpandOptions {
  double b = 1.0;            // split parameter; sets phi and the box
  double tol = 1e-12;        // panel doubling stops below this change
  int max_refinements = 4;   // number of doublings
};

struct DyadicPiece {
  int k = 0;
  ExpandMode mode = ExpandMode::Diagonal;
  double b = 0.0;
  double box_halfwidth_a = 0.0;
  int n_max = 0;
  std::vector<cplx> coeffs;  // (2 n_max + 1)^2, row-major in (n1, n2)
  double quad_change = 0.0;  // change at the last doubling
  bool converged = false;
  int refinement = 0;

  cplx coeff(int n1, int n2) const {
    int w = 2 * n_max + 1;
    return coeffs[static_cast<std::size_t>(n1 + n_max) * w + (n2 + n_max)];
  }
  /// Truncated Fourier series of M_k at a point of the box.
  cplx reconstruct(double l1, double l2) const;
};

/// M_k(l) = psi(l1) phi(l2) m(2^k l), phi chosen by the mode.
cplx localized_symbol(const Symbol2D& m, int k, ExpandMode mode, double b, double l1, double l2);
double low_cutoff(ExpandMode mode, double b, double lambda);

DyadicPiece localize_and_expand(const Symbol2D& m, int k, ExpandMode mode, int n_max,
                                ExpandOptions opt = {});

struct DecayReport {
  double weighted_sup = 0.0;  // max over pieces and |n_i| <= limit of |c|(1+|n|)^s
  double slope = 0.0;         // fitted exponent of the shell envelope (negative = decay)
  double constant = 0.0;      // envelope ~ constant * (1+r)^slope
};

DecayReport decay_report(const std::vector<DyadicPiece>& pieces, double s, int limit);
/// Bound on the dropped tail of the series implied by a decay fit; +inf when
/// the fitted exponent does not beat the 2D shell growth.
double tail_bound(const DecayReport& fit, int n_max);

// Square and maximal functions -------------------------------------------------

LatticeSequence square_function_sequence(const LatticeSequence& f, const CutoffFunction& psi,
                                         int k_lo, int k_hi, int N);
double square_function(const LatticeSequence& f, const CutoffFunction& psi, int k_lo, int k_hi,
                       double p, int N);
LatticeSequence maximal_function(const LatticeSequence& f, const CutoffFunction& phi, int k_lo,
                                 int k_hi, int N);

// Split and support property ----------------------------------------------------

struct SplitResult {
  LatticeSequence t1, t2, t3;
  int k_lo = 0, k_hi = 0;
};

/// Region weights of the split, as functions of (l1, l2).
Symbol2D split_weight(int region, double b, int k_lo, int k_hi);
/// Frequency mass of f at lambda = 0 relative to its l1 norm.
double zero_frequency_mass(const LatticeSequence& f, int N);

SplitResult paradiff_split(const Symbol2D& m, const LatticeSequence& f1,
                           const LatticeSequence& f2, double b, int N);

enum class Setting { Discrete, Jacobi, Dunkl };

struct PFConfig {
  double b = 7.0;
  double rho = 1.0;
  Setting setting = Setting::Discrete;
  int dim = 1;
};

/// b = 7 + log2(d)/2 (discrete), 3 (Jacobi), 2 (Dunkl).
PFConfig pf_config_for(Setting s, int dim = 1);

struct PFResult {
  bool pass = false;
  double leaked_energy = 0.0;  // fraction of the spectral energy outside the band
  double total_energy = 0.0;
};

/// Low-pass phi_k of the support property: supported in [0, 2^{k-b}].
double pf_low(double k, double b, double lambda);
/// Band psi_k of the support property: the dyadic psi, supported in [2^{k-1}, 2^{k+1}].
double pf_band(double k, double lambda);

/// Scales k at which phi_k(L) keeps a positive grid frequency, up to the
/// largest k with a nonzero band, floor(2 + log2(d)/2).
std::pair<int, int> pf_admissible_k(int dim, int N, double b);

PFResult check_pf_support(const LatticeSequence& f1, const LatticeSequence& f2, int k,
                          const PFConfig& cfg, int N, double tol = 1e-10);

}  // namespace bispec
