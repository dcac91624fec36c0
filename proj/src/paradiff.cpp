#include "bispec/paradiff.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace bispec {

double DyadicPartition::sum(double lambda) const {
  if (lambda <= 0.0) return 0.0;
  int c = static_cast<int>(std::floor(std::log2(lambda)));
  double s = 0.0;
  for (int k = c - 2; k <= c + 2; ++k) s += psi_k(k, lambda);
  return s;
}

DyadicPartition make_dyadic_partition(int k_lo, int k_hi) {
  return {make_psi(), k_lo, k_hi};
}

std::pair<int, int> k_range_for_grid(int dim, int N) {
  auto lam = sin_symbol_grid(dim, N);
  double lmin = std::numeric_limits<double>::infinity();
  for (double l : lam)
    if (l > 0.0) lmin = std::min(lmin, l);
  int lo = static_cast<int>(std::ceil(std::log2(lmin))) - 1;
  int hi = static_cast<int>(std::floor(std::log2(2.0 * std::sqrt(dim)))) + 1;
  return {lo, hi};
}

ExpandMode parse_mode(const std::string& s) {
  if (s == "diagonal") return ExpandMode::Diagonal;
  if (s == "lowhigh") return ExpandMode::LowHigh;
  throw ValidationError("mode must be 'diagonal' or 'lowhigh', got '" + s + "'");
}

std::string mode_name(ExpandMode m) {
  return m == ExpandMode::Diagonal ? "diagonal" : "lowhigh";
}

namespace {

// Integer scale bounds of the second-variable cutoff.
// Diagonal: sum of psi_j over |j| <= b + 2. LowHigh: sum over j < -b - 2.
struct LowBounds {
  int j_lo, j_hi;
};

LowBounds low_bounds(ExpandMode mode, double b) {
  if (mode == ExpandMode::Diagonal)
    return {static_cast<int>(std::ceil(-b - 2.0)), static_cast<int>(std::floor(b + 2.0))};
  return {std::numeric_limits<int>::min(), static_cast<int>(std::ceil(-b - 2.0)) - 1};
}

double box_halfwidth(ExpandMode mode, double b) {
  return mode == ExpandMode::Diagonal ? std::exp2(b + 4.0) : 2.0;
}

struct AxisRule {
  std::vector<double> x, w;
};

void add_panels(AxisRule& r, double lo, double hi, int panels) {
  std::vector<double> x, w;
  for (int p = 0; p < panels; ++p) {
    double a = lo + (hi - lo) * p / panels, b = lo + (hi - lo) * (p + 1) / panels;
    gauss_legendre(16, a, b, x, w);
    r.x.insert(r.x.end(), x.begin(), x.end());
    r.w.insert(r.w.end(), w.begin(), w.end());
  }
}

// Panels per octave: ramps get 4r, flat parts r, and no panel spans more than
// 8 radians of the highest retained Fourier mode.
int panel_count(double lo, double hi, bool ramp, int r, double omega) {
  int base = ramp ? 4 * r : r;
  int phase = static_cast<int>(std::ceil(omega * (hi - lo) / 8.0));
  return std::max(base, phase * r);
}

AxisRule high_axis(int r, double omega) {
  AxisRule ax;
  add_panels(ax, 0.5, 1.0, panel_count(0.5, 1.0, true, r, omega));
  add_panels(ax, 1.0, 2.0, panel_count(1.0, 2.0, true, r, omega));
  return ax;
}

AxisRule low_axis(ExpandMode mode, double b, int r, double omega) {
  AxisRule ax;
  LowBounds lb = low_bounds(mode, b);
  if (mode == ExpandMode::Diagonal) {
    double lo = std::exp2(lb.j_lo - 1), hi = std::exp2(lb.j_hi + 1);
    for (double e = lo; e < hi * 0.999; e *= 2.0) {
      bool ramp = e < std::exp2(lb.j_lo) || e >= std::exp2(lb.j_hi);
      add_panels(ax, e, 2.0 * e, panel_count(e, 2.0 * e, ramp, r, omega));
    }
    return ax;
  }
  double top = std::exp2(lb.j_hi + 1);
  add_panels(ax, top / 2.0, top, panel_count(top / 2.0, top, true, r, omega));
  constexpr int kDepth = 40;
  double e = top / 2.0;
  for (int i = 0; i < kDepth; ++i, e /= 2.0)
    add_panels(ax, e / 2.0, e, panel_count(e / 2.0, e, false, r, omega));
  add_panels(ax, 0.0, e, 1);
  return ax;
}

Eigen::MatrixXcd coefficient_matrix(const Symbol2D& m, int k, ExpandMode mode, double b,
                                    int n_max, int r) {
  double a = box_halfwidth(mode, b);
  double omega = kPi * n_max / a;
  AxisRule ax1 = high_axis(r, omega);
  AxisRule ax2 = low_axis(mode, b, r, omega);
  const std::size_t n1 = ax1.x.size(), n2 = ax2.x.size();
  Eigen::MatrixXcd G(n1, n2);
  std::vector<double> c1(n1), c2(n2);
  for (std::size_t i = 0; i < n1; ++i) c1[i] = cutoffs::psi(ax1.x[i]) * ax1.w[i];
  for (std::size_t j = 0; j < n2; ++j) c2[j] = low_cutoff(mode, b, ax2.x[j]) * ax2.w[j];
  double sk = std::exp2(k);
  parallel_for(0, n1, [&](std::size_t i) {
    for (std::size_t j = 0; j < n2; ++j) {
      double c = c1[i] * c2[j];
      G(i, j) = c == 0.0 ? cplx(0.0) : c * eval_symbol(m, sk * ax1.x[i], sk * ax2.x[j]);
    }
  });
  const int W = 2 * n_max + 1;
  Eigen::MatrixXcd E1(W, n1), E2(W, n2);
  for (int n = -n_max; n <= n_max; ++n) {
    for (std::size_t i = 0; i < n1; ++i)
      E1(n + n_max, i) = std::polar(1.0, kPi * n * ax1.x[i] / a);
    for (std::size_t j = 0; j < n2; ++j) {
      double ph = kPi * n * ax2.x[j] / a;
      // LowHigh uses the even extension in the second variable.
      E2(n + n_max, j) = mode == ExpandMode::LowHigh ? cplx(2.0 * std::cos(ph))
                                                     : std::polar(1.0, ph);
    }
  }
  Eigen::MatrixXcd C = E1 * G * E2.transpose();
  C /= 4.0 * a * a;
  return C;
}

}  // namespace

double low_cutoff(ExpandMode mode, double b, double lambda) {
  lambda = std::fabs(lambda);
  LowBounds lb = low_bounds(mode, b);
  if (mode == ExpandMode::LowHigh) return cutoffs::phi0(std::exp2(-lb.j_hi) * lambda);
  return cutoffs::phi0(std::exp2(-lb.j_hi) * lambda) -
         cutoffs::phi0(std::exp2(-lb.j_lo + 1) * lambda);
}

cplx localized_symbol(const Symbol2D& m, int k, ExpandMode mode, double b, double l1, double l2) {
  double c = cutoffs::psi(l1) * low_cutoff(mode, b, l2);
  if (mode == ExpandMode::Diagonal && l2 < 0.0) return 0.0;
  if (l1 < 0.0) return 0.0;
  if (c == 0.0) return 0.0;
  return c * eval_symbol(m, std::exp2(k) * l1, std::exp2(k) * std::fabs(l2));
}

cplx DyadicPiece::reconstruct(double l1, double l2) const {
  double a = box_halfwidth_a;
  cplx s = 0.0;
  for (int n1 = -n_max; n1 <= n_max; ++n1)
    for (int n2 = -n_max; n2 <= n_max; ++n2)
      s += coeff(n1, n2) * std::polar(1.0, -kPi * (n1 * l1 + n2 * l2) / a);
  return s;
}

DyadicPiece localize_and_expand(const Symbol2D& m, int k, ExpandMode mode, int n_max,
                                ExpandOptions opt) {
  if (n_max < 1) throw ValidationError("n_max must be >= 1");
  if (!(opt.b > 0.0)) throw ValidationError("split parameter b must be positive");
  DyadicPiece piece;
  piece.k = k;
  piece.mode = mode;
  piece.b = opt.b;
  piece.box_halfwidth_a = box_halfwidth(mode, opt.b);
  piece.n_max = n_max;
  Eigen::MatrixXcd prev = coefficient_matrix(m, k, mode, opt.b, n_max, 1);
  int r = 1;
  double change = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opt.max_refinements; ++it) {
    r *= 2;
    Eigen::MatrixXcd next = coefficient_matrix(m, k, mode, opt.b, n_max, r);
    change = (next - prev).cwiseAbs().maxCoeff();
    prev = std::move(next);
    if (change < opt.tol) break;
  }
  piece.quad_change = change;
  piece.converged = change < opt.tol;
  piece.refinement = r;
  piece.coeffs.assign(prev.data(), prev.data() + prev.size());
  // Eigen is column-major: transpose into row-major (n1, n2).
  const int W = 2 * n_max + 1;
  for (int i = 0; i < W; ++i)
    for (int j = 0; j < W; ++j) piece.coeffs[static_cast<std::size_t>(i) * W + j] = prev(i, j);
  return piece;
}

DecayReport decay_report(const std::vector<DyadicPiece>& pieces, double s, int limit) {
  DecayReport rep;
  if (pieces.empty()) return rep;
  int rmax = limit;
  for (const auto& p : pieces) rmax = std::min(rmax, p.n_max);
  std::vector<double> env(rmax + 1, 0.0);
  for (const auto& p : pieces) {
    for (int n1 = -rmax; n1 <= rmax; ++n1)
      for (int n2 = -rmax; n2 <= rmax; ++n2) {
        double c = std::abs(p.coeff(n1, n2));
        double nn = std::hypot(n1, n2);
        rep.weighted_sup = std::max(rep.weighted_sup, c * std::pow(1.0 + nn, s));
        int r = std::max(std::abs(n1), std::abs(n2));
        env[r] = std::max(env[r], c);
      }
  }
  std::vector<double> x, y;
  for (int r = 4; r <= rmax; ++r)
    if (env[r] > 0.0) {
      x.push_back(std::log(1.0 + r));
      y.push_back(std::log(env[r]));
    }
  if (x.size() >= 2) {
    rep.slope = fit_slope(x, y);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      mx += x[i];
      my += y[i];
    }
    mx /= x.size();
    my /= x.size();
    rep.constant = std::exp(my - rep.slope * mx);
  }
  return rep;
}

double tail_bound(const DecayReport& fit, int n_max) {
  double sigma = -fit.slope;
  if (sigma <= 2.0) return std::numeric_limits<double>::infinity();
  return 8.0 * fit.constant / (sigma - 2.0) * std::pow(1.0 + n_max, 2.0 - sigma);
}

// Square and maximal functions -------------------------------------------------

namespace {

void require_resolved(const LatticeSequence& f, int N) {
  if (!resolves(f, N))
    throw ValidationError("grid N = " + std::to_string(N) + " does not resolve the input support");
}

template <class Fn>
void for_each_band(const LatticeSequence& f, int k_lo, int k_hi, int N,
                   const std::function<double(int, double)>& cut, Fn&& fn) {
  require_resolved(f, N);
  const int d = f.dim();
  auto F = periodic_to_grid(to_periodic(f, N), d, N);
  auto lam = sin_symbol_grid(d, N);
  std::vector<cplx> G(F.size());
  for (int k = k_lo; k <= k_hi; ++k) {
    for (std::size_t i = 0; i < F.size(); ++i) G[i] = F[i] * cut(k, lam[i]);
    fn(grid_to_periodic(G, d, N));
  }
}

}  // namespace

LatticeSequence square_function_sequence(const LatticeSequence& f, const CutoffFunction& psi,
                                         int k_lo, int k_hi, int N) {
  std::vector<cplx> acc(static_cast<std::size_t>(f.dim() == 1 ? N : N * N), 0.0);
  for_each_band(f, k_lo, k_hi, N,
                [&](int k, double l) { return psi(std::exp2(-k) * l); },
                [&](const std::vector<cplx>& g) {
                  for (std::size_t i = 0; i < g.size(); ++i) acc[i] += std::norm(g[i]);
                });
  for (auto& v : acc) v = std::sqrt(v.real());
  return from_periodic(acc, f.dim(), N);
}

double square_function(const LatticeSequence& f, const CutoffFunction& psi, int k_lo, int k_hi,
                       double p, int N) {
  return lp_norm(square_function_sequence(f, psi, k_lo, k_hi, N), p);
}

LatticeSequence maximal_function(const LatticeSequence& f, const CutoffFunction& phi, int k_lo,
                                 int k_hi, int N) {
  std::vector<cplx> acc(static_cast<std::size_t>(f.dim() == 1 ? N : N * N), 0.0);
  for_each_band(f, k_lo, k_hi, N,
                [&](int k, double l) { return phi(std::exp2(-k) * l); },
                [&](const std::vector<cplx>& g) {
                  for (std::size_t i = 0; i < g.size(); ++i)
                    acc[i] = std::max(acc[i].real(), std::abs(g[i]));
                });
  return from_periodic(acc, f.dim(), N);
}

// Split -------------------------------------------------------------------------

Symbol2D split_weight(int region, double b, int k_lo, int k_hi) {
  if (region < 1 || region > 3) throw ValidationError("split region must be 1, 2 or 3");
  Symbol2D s;
  s.name = "T" + std::to_string(region);
  s.evaluator = [region, b, k_lo, k_hi](double l1, double l2) -> cplx {
    if (l1 <= 0.0 || l2 <= 0.0) return 0.0;
    double w = 0.0;
    for (int k1 = k_lo; k1 <= k_hi; ++k1) {
      double p1 = cutoffs::psi(std::exp2(-k1) * l1);
      if (p1 == 0.0) continue;
      for (int k2 = k_lo; k2 <= k_hi; ++k2) {
        double p2 = cutoffs::psi(std::exp2(-k2) * l2);
        if (p2 == 0.0) continue;
        bool in = region == 1 ? std::abs(k1 - k2) <= b + 2.0
                  : region == 2 ? k1 > k2 + b + 2.0
                                : k2 > k1 + b + 2.0;
        if (in) w += p1 * p2;
      }
    }
    return w;
  };
  return s;
}

double zero_frequency_mass(const LatticeSequence& f, int N) {
  (void)N;
  cplx s = 0.0;
  double l1 = 0.0;
  for (const auto& [n, v] : f.entries()) {
    s += v;
    l1 += std::abs(v);
  }
  return l1 == 0.0 ? 0.0 : std::abs(s) / l1;
}

SplitResult paradiff_split(const Symbol2D& m, const LatticeSequence& f1,
                           const LatticeSequence& f2, double b, int N) {
  if (!(b > 0.0)) throw ValidationError("split parameter b must be positive");
  if (f1.dim() != f2.dim()) throw ValidationError("inputs have different dimensions");
  for (const auto* f : {&f1, &f2})
    if (zero_frequency_mass(*f, N) > 1e-12)
      throw ValidationError("input is not in class A: nonzero mass at frequency 0");
  SplitResult out;
  std::tie(out.k_lo, out.k_hi) = k_range_for_grid(f1.dim(), N);
  LatticeSequence* dst[3] = {&out.t1, &out.t2, &out.t3};
  for (int r = 1; r <= 3; ++r) {
    Symbol2D w = product_symbol(split_weight(r, b, out.k_lo, out.k_hi), m);
    *dst[r - 1] = bilinear_apply(w, f1, f2, N);
  }
  return out;
}

// Support property ------------------------------------------------------------------

PFConfig pf_config_for(Setting s, int dim) {
  PFConfig c;
  c.setting = s;
  c.dim = dim;
  switch (s) {
    case Setting::Discrete:
      c.b = 7.0 + 0.5 * std::log2(static_cast<double>(dim));
      c.rho = std::floor(dim / 2.0) + 1.0;
      break;
    case Setting::Jacobi:
      c.b = 3.0;
      break;
    case Setting::Dunkl:
      c.b = 2.0;
      break;
  }
  return c;
}

double pf_low(double k, double b, double lambda) {
  return cutoffs::phi0(std::exp2(b + 1.0 - k) * std::fabs(lambda));
}

double pf_band(double k, double lambda) { return cutoffs::psi(std::exp2(-k) * std::fabs(lambda)); }

std::pair<int, int> pf_admissible_k(int dim, int N, double b) {
  auto lam = sin_symbol_grid(dim, N);
  double lmin = std::numeric_limits<double>::infinity();
  for (double l : lam)
    if (l > 0.0) lmin = std::min(lmin, l);
  int lo = static_cast<int>(std::floor(std::log2(lmin) + b)) + 1;
  int hi = static_cast<int>(std::floor(2.0 + 0.5 * std::log2(static_cast<double>(dim))));
  return {lo, hi};
}

PFResult check_pf_support(const LatticeSequence& f1, const LatticeSequence& f2, int k,
                          const PFConfig& cfg, int N, double tol) {
  if (cfg.setting != Setting::Discrete)
    throw ValidationError("check_pf_support handles the discrete setting");
  if (f1.dim() != f2.dim()) throw ValidationError("inputs have different dimensions");
  require_resolved(f1, N);
  require_resolved(f2, N);
  const int d = f1.dim();
  auto lam = sin_symbol_grid(d, N);
  auto A = periodic_to_grid(to_periodic(f1, N), d, N);
  auto B = periodic_to_grid(to_periodic(f2, N), d, N);
  for (std::size_t i = 0; i < A.size(); ++i) {
    A[i] *= pf_low(k, cfg.b, lam[i]);
    B[i] *= pf_band(k, lam[i]);
  }
  auto a = grid_to_periodic(A, d, N);
  auto bb = grid_to_periodic(B, d, N);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= bb[i];
  auto G = periodic_to_grid(a, d, N);
  double lo = std::exp2(k - 3.0 - cfg.b), hi = std::exp2(k + 3.0 + cfg.b);
  PFResult res;
  double leak = 0.0;
  for (std::size_t i = 0; i < G.size(); ++i) {
    double e = std::norm(G[i]);
    res.total_energy += e;
    if (lam[i] < lo || lam[i] > hi) leak += e;
  }
  res.leaked_energy = res.total_energy > 0.0 ? leak / res.total_energy : 0.0;
  res.pass = res.leaked_energy < tol;
  return res;
}

}  // namespace bispec
