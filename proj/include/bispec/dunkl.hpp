#pragma once

#include "bispec/symbols.hpp"

namespace bispec {

/// Normalized Bessel function j_a(t) = Gamma(a+1) (2/t)^a J_a(t), j_a(0) = 1.
double normalized_bessel(double a, double t);

/// Rank-one kernel E_kappa(i lambda, x).
cplx dunkl_kernel(double kappa, double lambda, double x);

struct DunklOptions {
  double R = 12.0;         // truncation radius, same on both sides
  int nodes_per_side = 512;  // multiple of 16
};

/// Symmetric composite rule on [-R, R] for the weight |x|^{2 kappa}: the panel
/// next to 0 is Gauss-Jacobi, the others Gauss-Legendre with 16 nodes each.
/// The same rule serves as the frequency grid. Immutable after construction.
class DunklContext {
public:
  explicit DunklContext(double kappa, DunklOptions opt = {});

  double kappa() const { return kappa_; }
  double R() const { return opt_.R; }
  int size() const { return static_cast<int>(x_.size()); }
  const std::vector<double>& nodes() const { return x_; }
  /// Quadrature weights including |x|^{2 kappa}.
  const std::vector<double>& weights() const { return w_; }
  /// Index of -x_i.
  int mirror(int i) const { return size() - 1 - i; }
  /// 1 / int exp(-x^2/2) |x|^{2 kappa} dx, evaluated by the rule.
  double c_kappa() const { return c_; }
  /// Closed form 1 / (2^{kappa+1/2} Gamma(kappa+1/2)).
  double c_kappa_exact() const;
  /// E(i xi_j, x_i), row-major over (i, j).
  cplx kernel(int i, int j) const { return K_[static_cast<std::size_t>(i) * x_.size() + j]; }

  /// Spectral differentiation on each panel.
  std::vector<cplx> derivative(const std::vector<cplx>& f) const;

private:
  double kappa_, c_;
  DunklOptions opt_;
  std::vector<double> x_, w_;
  std::vector<int> panel_start_;     // index of the first node of each panel
  std::vector<std::vector<double>> diff_;  // per-panel 16x16 differentiation matrix
  std::vector<cplx> K_;
};

using Samples = std::vector<cplx>;

Samples sample(const DunklContext& ctx, const std::function<cplx(double)>& f);
double weighted_l2(const DunklContext& ctx, const Samples& f);
double weighted_lp(const DunklContext& ctx, const Samples& f, double p);

/// Df(x) = f'(x) + kappa (f(x) - f(-x)) / x.
Samples dunkl_operator(const DunklContext& ctx, const Samples& f);

enum class Direction { Forward, Inverse };

/// Forward: c_kappa int E(-i xi, x) f(x) w(x) dx. Inverse uses E(i xi, x).
Samples dunkl_transform(const DunklContext& ctx, const Samples& f, Direction dir = Direction::Forward);
/// Largest |f| on the outer panel relative to max |f|.
double boundary_fraction(const DunklContext& ctx, const Samples& f);

/// tau^y f at the points xs.
Samples dunkl_translation(const DunklContext& ctx, double y, const Samples& f,
                          const std::vector<double>& xs);

/// c_kappa^2 double integral of m(|xi1|, |xi2|) Df1 Df2 E E w w at the nodes.
Samples bilinear_dunkl(const DunklContext& ctx, const Symbol2D& m, const Samples& f1,
                       const Samples& f2, double drop_tol = 1e-16);

/// mu(|xi|) applied through the transform.
Samples apply_dunkl_multiplier(const DunklContext& ctx, const Symbol1D& mu, const Samples& f);

struct DunklPFResult {
  bool pass = false;
  double leaked_energy = 0.0;
  double total_energy = 0.0;
};

/// Product of a low/band pair given on the frequency side; mass of its transform
/// outside [2^{k-5}, 2^{k+5}].
DunklPFResult check_pf_dunkl(int k, const Samples& F1, const Samples& F2, const DunklContext& ctx,
                             double tol = 1e-4);

/// Random frequency profiles: the first supported in |xi| <= 2^{k-2}, the
/// second in 2^{k-1} <= |xi| <= 2^{k+1}; smooth cutoffs times random quadratics.
std::pair<Samples, Samples> random_band_pair(const DunklContext& ctx, int k, std::uint64_t seed,
                                             std::uint64_t stream);

/// Relative residual of D(fg) = D(f) g + f D(g) in the weighted L2 norm.
double dunkl_leibniz_residual(const DunklContext& ctx, const Samples& f, const Samples& g);

/// ||(-Delta_k)^s (fg)||_p over ||(-Delta_k)^s f||_p1 ||g||_p2 + ||(-Delta_k)^s g||_p2 ||f||_p1.
double dunkl_fractional_leibniz_ratio(const DunklContext& ctx, const Samples& f, const Samples& g,
                                      double s, double p, double p1, double p2);

std::string samples_to_json(const DunklContext& ctx, const Samples& f);
Samples read_samples_json(const std::string& path, const DunklContext& ctx);

}  // namespace bispec
