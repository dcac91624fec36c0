#include "bispec/leibniz.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace bispec {

double annulus_cutoff(double eps, double lambda) {
  return cutoffs::smooth_step(lambda, eps, 2.0 * eps) *
         (1.0 - cutoffs::smooth_step(lambda, 0.5 / eps, 1.0 / eps));
}

namespace {

int generation_grid(int dim, int radius) {
  int ng = dim == 1 ? 256 : 128;
  while (ng < 4 * radius) ng *= 2;
  return ng;
}

double l2(const LatticeSequence& f) { return lp_norm(f, 2.0); }

LatticeSequence normalized(const LatticeSequence& f) {
  double n = l2(f);
  if (n == 0.0) throw NumericalError("class-A sample vanished");
  return cplx(1.0 / n) * f;
}

}  // namespace

ClassASample random_class_A_sample(double eps, int radius, std::uint64_t seed, int N,
                                   ClassAOptions opt) {
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("class A needs 0 < eps < 1");
  if (opt.dim != 1 && opt.dim != 2) throw ValidationError("dimension must be 1 or 2");
  Rng rng(seed, opt.stream);
  const int d = opt.dim;
  ClassASample out;

  if (opt.full_window) {
    auto lam = sin_symbol_grid(d, N);
    std::vector<cplx> F(lam.size());
    std::size_t active = 0;
    for (std::size_t i = 0; i < lam.size(); ++i) {
      double a = annulus_cutoff(eps, lam[i]);
      cplx z = rng.complex_normal();
      F[i] = a * z;
      if (a > 0.0) ++active;
    }
    if (active == 0) throw ValidationError("annulus is empty on the grid");
    out.f = normalized(from_periodic(grid_to_periodic(F, d, N), d, N));
    return out;
  }

  if (radius < 1) throw ValidationError("radius must be >= 1");
  if (N <= 2 * radius)
    throw ValidationError("grid N=" + std::to_string(N) + " does not resolve radius " +
                          std::to_string(radius));
  const int ng = generation_grid(d, std::max(radius, opt.source_radius));
  const int sr = opt.source_radius;
  std::vector<LatticeSequence::Entry> src;
  for (int n1 = -sr; n1 <= sr; ++n1) {
    if (d == 1) {
      src.push_back({{n1, 0}, rng.complex_normal()});
      continue;
    }
    for (int n2 = -sr; n2 <= sr; ++n2) src.push_back({{n1, n2}, rng.complex_normal()});
  }
  LatticeSequence p(d, std::move(src));
  auto lam = sin_symbol_grid(d, ng);
  auto F = periodic_to_grid(to_periodic(p, ng), d, ng);
  std::size_t active = 0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    double a = annulus_cutoff(eps, lam[i]);
    F[i] *= a;
    if (a > 0.0) ++active;
  }
  if (active == 0) throw ValidationError("annulus is empty on the generation grid");
  LatticeSequence full = from_periodic(grid_to_periodic(F, d, ng), d, ng);
  double total = l2(full);
  if (total == 0.0) throw NumericalError("class-A sample vanished");
  double removed = 0.0;
  LatticeSequence t = truncate(full, radius, &removed);
  // Restore the zero mean lost in the truncation, spread over the support box.
  cplx mean = 0.0;
  for (const auto& e : t.entries()) mean += e.second;
  long box = d == 1 ? 2L * radius + 1 : (2L * radius + 1) * (2L * radius + 1);
  mean /= static_cast<double>(box);
  std::vector<LatticeSequence::Entry> fixed;
  fixed.reserve(box);
  for (int n1 = -radius; n1 <= radius; ++n1) {
    if (d == 1) {
      fixed.push_back({{n1, 0}, t.at({n1, 0}) - mean});
      continue;
    }
    for (int n2 = -radius; n2 <= radius; ++n2)
      fixed.push_back({{n1, n2}, t.at({n1, n2}) - mean});
  }
  out.f = normalized(LatticeSequence(d, std::move(fixed)));
  out.truncation_l2 = removed / total;
  return out;
}

LatticeSequence random_class_A(double eps, int radius, std::uint64_t seed, int N,
                               ClassAOptions opt) {
  return random_class_A_sample(eps, radius, seed, N, opt).f;
}

// Ratios ------------------------------------------------------------------------

void validate_exponents(double p, double p1, double p2) {
  for (double q : {p, p1, p2})
    if (!(std::isinf(q) || (q >= 1.1 && q <= 16.0)))
      throw ValidationError("exponents must lie in [1.1, 16] or be inf");
  double lhs = std::isinf(p) ? 0.0 : 1.0 / p;
  double rhs = (std::isinf(p1) ? 0.0 : 1.0 / p1) + (std::isinf(p2) ? 0.0 : 1.0 / p2);
  if (std::fabs(lhs - rhs) > 1e-12) throw ValidationError("exponents must satisfy 1/p = 1/p1 + 1/p2");
}

TrialReport leibniz_ratio(const LatticeSequence& f, const LatticeSequence& g, double s, double p,
                          double p1, double p2, int N) {
  if (!(s > 0.0)) throw ValidationError("Leibniz rule needs s > 0");
  validate_exponents(p, p1, p2);
  TrialReport r;
  r.s = s;
  r.p = p;
  r.p1 = p1;
  r.p2 = p2;
  r.grid_N = N;
  r.lhs = lp_norm(fractional_laplacian(pointwise(f, g), s, N), p);
  r.rhs = lp_norm(fractional_laplacian(f, s, N), p1) * lp_norm(g, p2) +
          lp_norm(fractional_laplacian(g, s, N), p2) * lp_norm(f, p1);
  r.degenerate = !(r.rhs > 0.0);
  r.ratio = r.degenerate ? 0.0 : r.lhs / r.rhs;
  return r;
}

TrialReport coifman_meyer_ratio(const DiscreteMultiplierPlan& plan, const LatticeSequence& f1,
                                const LatticeSequence& f2, double p, double p1, double p2,
                                double mh_norm) {
  validate_exponents(p, p1, p2);
  TrialReport r;
  r.p = p;
  r.p1 = p1;
  r.p2 = p2;
  r.grid_N = plan.N();
  double n12 = lp_norm(f1, p1) * lp_norm(f2, p2);
  r.degenerate = !(n12 > 0.0) || !(mh_norm > 0.0);
  if (r.degenerate) return r;
  r.lhs = lp_norm(bilinear_apply(plan, f1, f2), p);
  r.rhs = mh_norm * n12;
  r.ratio = r.lhs / r.rhs;
  r.raw_ratio = r.lhs / n12;
  return r;
}

TrialReport coifman_meyer_ratio(const Symbol2D& m, const LatticeSequence& f1,
                                const LatticeSequence& f2, double p, double p1, double p2, int N,
                                double mh_norm) {
  if (f1.dim() != f2.dim()) throw ValidationError("dimension mismatch");
  return coifman_meyer_ratio(DiscreteMultiplierPlan(m, f1.dim(), N), f1, f2, p, p1, p2, mh_norm);
}

// eta split and quadrant terms ------------------------------------------------------

std::pair<LatticeSequence, LatticeSequence> eta_split(const LatticeSequence& h, int N) {
  if (h.dim() != 1) throw ValidationError("eta_split is defined for d = 1");
  if (!resolves(h, N)) throw ValidationError("grid does not resolve the input");
  TorusGrid F = torus_transform(h, N);
  TorusGrid F0 = F, F1 = F;
  auto lam = sin_symbol_grid(1, N);
  for (int j = 0; j < N; ++j) {
    F0.values[j] *= cutoffs::eta0(lam[j]);
    F1.values[j] *= cutoffs::eta1(lam[j]);
  }
  return {inverse_transform(F0), inverse_transform(F1)};
}

Symbol2D t_epsilon_symbol(double s, int sign) {
  Symbol2D m;
  m.name = sign > 0 ? "T_eps(+)" : "T_eps(-)";
  m.params = {{"s", s}, {"sign", static_cast<double>(sign)}};
  double sg = sign > 0 ? 1.0 : -1.0;
  m.evaluator = [s, sg](double l1, double l2) -> cplx {
    double c1 = std::sqrt(std::max(0.0, 1.0 - l1 * l1 / 4.0));
    double c2 = std::sqrt(std::max(0.0, 1.0 - l2 * l2 / 4.0));
    double v = std::fabs(l1 * c2 + sg * l2 * c1);
    return v == 0.0 ? 0.0 : std::pow(v, 2.0 * s);
  };
  return m;
}

std::map<std::pair<int, int>, LatticeSequence> t_epsilon_decompose(const LatticeSequence& f,
                                                                   const LatticeSequence& g,
                                                                   double s, int N) {
  if (f.dim() != 1 || g.dim() != 1) throw ValidationError("T_eps is defined for d = 1");
  if (!(s > 0.0)) throw ValidationError("T_eps needs s > 0");
  if (!resolves(f, N) || !resolves(g, N)) throw ValidationError("grid does not resolve the inputs");
  auto lam = sin_symbol_grid(1, N);
  auto w = riesz_weights(N);
  auto F = torus_transform(f, N).values;
  auto G = torus_transform(g, N).values;
  std::vector<cplx> Fp(N), Fm(N), Gp(N), Gm(N);
  for (int j = 0; j < N; ++j) {
    double e = cutoffs::eta0(lam[j]);
    Fp[j] = F[j] * e * w[j];
    Fm[j] = F[j] * e * (1.0 - w[j]);
    Gp[j] = G[j] * e * w[j];
    Gm[j] = G[j] * e * (1.0 - w[j]);
  }
  DiscreteMultiplierPlan same(t_epsilon_symbol(s, +1), 1, N);
  DiscreteMultiplierPlan opposite(t_epsilon_symbol(s, -1), 1, N);
  std::map<std::pair<int, int>, LatticeSequence> out;
  auto term = [&](const DiscreteMultiplierPlan& plan, const std::vector<cplx>& A,
                  const std::vector<cplx>& B) {
    TorusGrid T(1, N);
    T.values = plan.apply_grid(A, B);
    return inverse_transform(T);
  };
  out[{1, 1}] = term(same, Fp, Gp);
  out[{-1, -1}] = term(same, Fm, Gm);
  out[{1, -1}] = term(opposite, Fp, Gm);
  out[{-1, 1}] = term(opposite, Fm, Gp);
  return out;
}

// Harness -------------------------------------------------------------------------

std::pair<LatticeSequence, LatticeSequence> trial_pair(const HarnessConfig& cfg, int trial,
                                                       double* truncation) {
  ClassAOptions o;
  o.dim = cfg.dim;
  o.source_radius = cfg.source_radius;
  o.stream = 2ULL * static_cast<std::uint64_t>(trial);
  auto a = random_class_A_sample(cfg.eps, cfg.radius, cfg.seed, cfg.N, o);
  o.stream += 1;
  auto b = random_class_A_sample(cfg.eps, cfg.radius, cfg.seed, cfg.N, o);
  if (truncation) *truncation = std::max(a.truncation_l2, b.truncation_l2);
  return {a.f, b.f};
}

namespace {

std::vector<TrialReport> run_trials(const HarnessConfig& cfg,
                                    const std::function<TrialReport(const LatticeSequence&,
                                                                    const LatticeSequence&)>& fn) {
  if (cfg.trials < 1) throw ValidationError("trials must be >= 1");
  std::vector<TrialReport> out(cfg.trials);
  parallel_for(0, static_cast<std::size_t>(cfg.trials), [&](std::size_t i) {
    double trunc = 0.0;
    auto [f, g] = trial_pair(cfg, static_cast<int>(i), &trunc);
    TrialReport r = fn(f, g);
    r.truncation_l2 = trunc;
    r.trial_id = static_cast<int>(i);
    r.seed = cfg.seed;
    out[i] = r;
  });
  return out;
}

}  // namespace

std::vector<TrialReport> run_leibniz(const HarnessConfig& cfg) {
  validate_exponents(cfg.p, cfg.p1, cfg.p2);
  return run_trials(cfg, [&](const LatticeSequence& f, const LatticeSequence& g) {
    return leibniz_ratio(f, g, cfg.s, cfg.p, cfg.p1, cfg.p2, cfg.N);
  });
}

std::vector<TrialReport> run_coifman_meyer(const Symbol2D& m, const HarnessConfig& cfg,
                                           double mh_norm) {
  validate_exponents(cfg.p, cfg.p1, cfg.p2);
  DiscreteMultiplierPlan plan(m, cfg.dim, cfg.N);
  return run_trials(cfg, [&](const LatticeSequence& f, const LatticeSequence& g) {
    return coifman_meyer_ratio(plan, f, g, cfg.p, cfg.p1, cfg.p2, mh_norm);
  });
}

HarnessSummary summarize(const std::vector<TrialReport>& reports, bool raw) {
  HarnessSummary s;
  std::vector<double> v;
  for (const auto& r : reports) {
    s.max_truncation = std::max(s.max_truncation, r.truncation_l2);
    if (r.degenerate) {
      ++s.degenerate;
      continue;
    }
    v.push_back(raw ? r.raw_ratio : r.ratio);
  }
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  s.max_ratio = v.back();
  s.p95_ratio = v[static_cast<std::size_t>(std::floor(0.95 * (v.size() - 1)))];
  return s;
}

std::string reports_to_csv(const std::vector<TrialReport>& reports) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "trial_id,seed,lhs,rhs,ratio\n";
  for (const auto& r : reports)
    os << r.trial_id << ',' << r.seed << ',' << r.lhs << ',' << r.rhs << ',' << r.ratio << '\n';
  return os.str();
}

}  // namespace bispec
