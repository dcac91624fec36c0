#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "bispec/util.hpp"

namespace bispec {

struct MultiIndex {
  int a1 = 0;
  int a2 = 0;
  int order() const { return a1 + a2; }
};

/// Bivariate multiplier symbol m(l1, l2) of two positive spectral variables.
struct Symbol2D {
  std::function<cplx(double, double)> evaluator;
  /// Optional exact partial derivatives; finite differences are used if empty.
  std::function<cplx(MultiIndex, double, double)> derivative_evaluator;
  std::string name;
  std::map<std::string, double> params;

  cplx operator()(double l1, double l2) const { return evaluator(l1, l2); }
};

/// Univariate symbol mu(l) for linear multipliers mu(L).
struct Symbol1D {
  std::function<cplx(double)> evaluator;
  std::string name;

  cplx operator()(double l) const { return evaluator(l); }
};

/// Smooth cutoff on [0, inf) that vanishes exactly outside [support_lo, support_hi].
struct CutoffFunction {
  std::function<double(double)> evaluator;
  double support_lo = 0.0;
  double support_hi = 0.0;
  int smoothness_order = kSmooth;
  double sup_bound = 1.0;

  static constexpr int kSmooth = 1 << 30;

  double operator()(double t) const { return evaluator(t); }
  /// Dyadic dilate: t -> f(2^{-k} t).
  CutoffFunction dilate(double k) const;
};

struct DyadicGridSpec {
  int K = 10;           // lambda in [2^-K, 2^K]
  int per_octave = 8;   // nodes 2^{j / per_octave}
};

struct MHReport {
  int order_s = 0;
  double norm_estimate = 0.0;
  DyadicGridSpec grid;
  std::vector<std::pair<int, double>> per_order_sups;
};

// Expression symbols -------------------------------------------------------

/// Compiled expression over the variables l1, l2 (see parse_symbol for the grammar).
class Expression {
public:
  struct Node;
  explicit Expression(std::shared_ptr<const Node> root, std::string source);
  double eval(double l1, double l2) const;
  bool uses_l2() const;
  const std::string& source() const { return source_; }

private:
  std::shared_ptr<const Node> root_;
  std::string source_;
};

/// Grammar: literals, l1, l2, + - * / ^, parentheses and the functions
/// sin cos exp abs sqrt (one argument), min max pow (two arguments).
/// Throws ValidationError naming the position, identifier or arity.
Expression parse_expression(const std::string& expr);
Symbol2D parse_symbol(const std::string& expr);
/// Univariate variant: the expression may only use l1.
Symbol1D parse_univariate(const std::string& expr);

/// Evaluates and rejects non-finite values (NumericalError).
cplx eval_symbol(const Symbol2D& sym, double l1, double l2);

MHReport estimate_mh_norm(const Symbol2D& sym, int s, DyadicGridSpec grid = {});

/// Partial derivative by central differences (exact evaluator used when present).
cplx symbol_derivative(const Symbol2D& sym, MultiIndex alpha, double l1, double l2);

// Built-ins -----------------------------------------------------------------

/// Registry: one, m11, m11t, m1m1, m1m1t (params z, zim), dunkl_mz (z, zim,
/// sign), abs_power (v), product_power (v), psi_psi (k1, k2), eta_eta (i1, i2).
Symbol2D builtin_symbol(const std::string& name,
                        const std::map<std::string, double>& params);
std::vector<std::string> builtin_names();

/// `expr:<expression>` or `builtin:<name>[:key=value,...]`.
Symbol2D symbol_from_spec(const std::string& spec);

Symbol2D constant_symbol(cplx c);
Symbol2D product_symbol(const Symbol2D& a, const Symbol2D& b);

// Cutoffs -------------------------------------------------------------------

namespace cutoffs {
/// rho(t) = exp(-1/t) for t > 0, else 0.
double rho(double t);
/// 0 for t <= a, 1 for t >= b, smooth in between.
double smooth_step(double t, double a, double b);
/// 1 on [0,1], 0 on [2,inf).
double phi0(double t);
/// phi0(t) - phi0(2t): supported in [1/2, 2], dyadic sums equal 1.
double psi(double t);
/// Ratio cutoff: 1 on [0,1/8], 0 on [1/4, inf).
double phi_ratio(double t);
/// 1 - phi_ratio(t) - phi_ratio(1/t): supported in [1/8, 8].
double phi_middle(double t);
/// eta0: 1 on [0,1/8], supported in [0,1/4].
double eta0(double t);
/// eta1: supported in [1/8,10], eta0 + eta1 = 1 on [0,4].
double eta1(double t);
}  // namespace cutoffs

CutoffFunction make_psi();
CutoffFunction make_phi0();
CutoffFunction make_phi_ratio();
CutoffFunction make_eta0();
CutoffFunction make_eta1();
/// psi-tilde: equals 1 on [2^{-3-b}, 2^{3+b}], supported in [2^{-4-b}, 2^{4+b}].
CutoffFunction make_psi_tilde(double b);
/// Cutoff equal to 1 on [lo, hi] and supported in [lo - w, hi + w].
CutoffFunction make_plateau(double lo, double hi, double w);

}  // namespace bispec
