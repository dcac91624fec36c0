#pragma once

#include <map>

#include "bispec/discrete.hpp"

namespace bispec {

/// Smooth annulus cutoff: 0 for l <= eps and l >= 1/eps, 1 on [2 eps, 1/(2 eps)].
double annulus_cutoff(double eps, double lambda);

struct ClassAOptions {
  int dim = 1;
  /// Gaussian source coefficients live on |n_i| <= source_radius. The filtered
  /// sequence is computed on a fixed generation grid, so it does not depend on N.
  int source_radius = 4;
  /// Instead draw i.i.d. coefficients at every annulus node of the N-grid itself;
  /// the result fills the window and is not truncated.
  bool full_window = false;
  std::uint64_t stream = 0;
};

struct ClassASample {
  LatticeSequence f;
  double truncation_l2 = 0.0;  // relative l2 mass removed by the truncation
};

/// Deterministic in (seed, stream); l2-normalized; sum_n f(n) = 0.
ClassASample random_class_A_sample(double eps, int radius, std::uint64_t seed, int N,
                                   ClassAOptions opt = {});
LatticeSequence random_class_A(double eps, int radius, std::uint64_t seed, int N,
                               ClassAOptions opt = {});

struct TrialReport {
  int trial_id = 0;
  std::uint64_t seed = 0;
  double s = 0.0, p = 0.0, p1 = 0.0, p2 = 0.0;
  double lhs = 0.0, rhs = 0.0, ratio = 0.0;
  /// Coifman-Meyer only: ratio without the MH normalization.
  double raw_ratio = 0.0;
  int grid_N = 0;
  bool degenerate = false;
  double truncation_l2 = 0.0;  // harness only: larger truncation mass of the pair
};

/// ||(-Delta)^s(fg)||_p over ||(-Delta)^s f||_p1 ||g||_p2 + ||(-Delta)^s g||_p2 ||f||_p1.
TrialReport leibniz_ratio(const LatticeSequence& f, const LatticeSequence& g, double s, double p,
                          double p1, double p2, int N);

/// ||B_m(f1,f2)||_p over mh_norm ||f1||_p1 ||f2||_p2.
TrialReport coifman_meyer_ratio(const Symbol2D& m, const LatticeSequence& f1,
                                const LatticeSequence& f2, double p, double p1, double p2, int N,
                                double mh_norm = 1.0);
TrialReport coifman_meyer_ratio(const DiscreteMultiplierPlan& plan, const LatticeSequence& f1,
                                const LatticeSequence& f2, double p, double p1, double p2,
                                double mh_norm = 1.0);

/// h = h0 + h1 with h_i = eta_i(L) h (d = 1).
std::pair<LatticeSequence, LatticeSequence> eta_split(const LatticeSequence& h, int N);

/// Quadrant terms T_eps(f, g), keyed by (eps1, eps2); they sum to (-Delta)^s(f0 g0),
/// f0 and g0 being the eta0 parts (d = 1).
std::map<std::pair<int, int>, LatticeSequence> t_epsilon_decompose(const LatticeSequence& f,
                                                                   const LatticeSequence& g,
                                                                   double s, int N);
/// Symbol of T_eps for eps1 * eps2 = sign.
Symbol2D t_epsilon_symbol(double s, int sign);

// Harness -----------------------------------------------------------------------

struct HarnessConfig {
  int trials = 200;
  std::uint64_t seed = 1;
  int N = 64;
  int radius = 16;
  int dim = 1;
  double eps = 0.5;
  double s = 0.5;
  double p = 2.0, p1 = 4.0, p2 = 4.0;
  int source_radius = 4;
};

struct HarnessSummary {
  double max_ratio = 0.0;
  double p95_ratio = 0.0;
  double max_truncation = 0.0;
  int degenerate = 0;
};

/// Trial i draws f, g from streams 2i and 2i+1 of the seed.
std::pair<LatticeSequence, LatticeSequence> trial_pair(const HarnessConfig& cfg, int trial,
                                                       double* truncation = nullptr);

std::vector<TrialReport> run_leibniz(const HarnessConfig& cfg);
std::vector<TrialReport> run_coifman_meyer(const Symbol2D& m, const HarnessConfig& cfg,
                                           double mh_norm = 1.0);
HarnessSummary summarize(const std::vector<TrialReport>& reports, bool raw = false);

std::string reports_to_csv(const std::vector<TrialReport>& reports);

/// Range check for exponents: [1.1, 16] or infinity.
void validate_exponents(double p, double p1, double p2);

}  // namespace bispec
