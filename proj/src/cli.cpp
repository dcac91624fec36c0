#include "bispec/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include "bispec/discrete.hpp"
#include "bispec/dunkl.hpp"
#include "bispec/jacobi.hpp"
#include "bispec/leibniz.hpp"
#include "bispec/paradiff.hpp"
#include "json.hpp"

namespace bispec {

namespace {

constexpr const char* kVersion = "0.1.0";

using json = nlohmann::json;

struct Globals {
  std::uint64_t seed = 1;
  int threads = 0;
  bool deterministic = false;
  double tol = 0.0;  // 0: command default
  std::string out;
  bool dry_run = false;
};

struct Output {
  const Globals& g;
  std::string command;
  json config;

  double tol_or(double def) const { return g.tol > 0.0 ? g.tol : def; }

  /// Prints the resolved plan; true when the command should stop here.
  bool dry() const {
    if (!g.dry_run) return false;
    json plan = {{"command", command}, {"config", config}, {"seed", g.seed},
                 {"threads", num_threads()}, {"deterministic", g.deterministic},
                 {"out", g.out.empty() ? "-" : g.out}};
    std::cout << plan.dump() << "\n";
    return true;
  }

  void emit(const std::string& text, const json& extra = json::object()) const {
    if (g.out.empty()) {
      std::cout << text;
      return;
    }
    write_atomic(g.out, text);
    json meta = {{"tool", "bispec"}, {"version", kVersion}, {"command", command},
                 {"config", config}, {"seed", g.seed}, {"deterministic", g.deterministic}};
    for (auto it = extra.begin(); it != extra.end(); ++it) meta[it.key()] = it.value();
    write_atomic(g.out + ".meta.json", meta.dump(2) + "\n");
  }

  void summary(const std::string& line) const { std::cout << command << ": " << line << "\n"; }
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void check_exponent(const std::string& name, double v) {
  if (!(v > 1.0))
    throw ValidationError(name + " must satisfy " + name + " > 1 (allowed: [1.1, 16] or inf), got " +
                          fmt(v));
  if (!(std::isinf(v) || (v >= 1.1 && v <= 16.0)))
    throw ValidationError(name + " must lie in [1.1, 16] or be inf, got " + fmt(v));
}

void check_exponents(double p, double p1, double p2) {
  check_exponent("p", p);
  check_exponent("p1", p1);
  check_exponent("p2", p2);
  validate_exponents(p, p1, p2);
}

void check_grid(int N) {
  if (N < 2 || !is_power_of_two(N)) throw ValidationError("grid must be a power of two >= 2, got " + std::to_string(N));
}

std::string sequence_csv(const LatticeSequence& f) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << (f.dim() == 1 ? "n,re,im\n" : "n1,n2,re,im\n");
  for (const auto& [n, v] : f.entries()) {
    os << n[0];
    if (f.dim() == 2) os << ',' << n[1];
    os << ',' << v.real() << ',' << v.imag() << '\n';
  }
  return os.str();
}

// discrete ---------------------------------------------------------------------

void add_discrete(CLI::App& app, Globals& g, std::function<int()>& action) {
  auto* d = app.add_subcommand("discrete", "lattice multipliers");
  d->require_subcommand(1);

  auto* ap = d->add_subcommand("apply", "bilinear multiplier B_m(f1, f2)");
  // Option storage is static so callbacks can outlive this function; it is reset
  // here so every run() starts from the defaults.
  static std::string symbol, f1, f2, f;
  symbol = {}; f1 = {}; f2 = {}; f = {};
  static int N;
  N = 64;
  ap->add_option("--symbol", symbol, "symbol spec (expr:... or builtin:...)")->required();
  ap->add_option("--f1", f1, "first sequence (JSON)")->required();
  ap->add_option("--f2", f2, "second sequence (JSON)")->required();
  ap->add_option("--grid", N, "grid size N");
  ap->callback([=, &g, &action] {
    action = [=, &g] {
      Output o{g, "discrete apply", {{"symbol", symbol}, {"f1", f1}, {"f2", f2}, {"grid", N}}};
      check_grid(N);
      Symbol2D m = symbol_from_spec(symbol);
      auto a = read_sequence_json(f1), b = read_sequence_json(f2);
      if (o.dry()) return 0;
      BilinearInfo info;
      auto out = bilinear_apply(m, a, b, N, &info);
      o.emit(sequence_to_json(out) + "\n", {{"edge_mass", info.edge_mass}});
      o.summary("entries=" + std::to_string(out.size()) + " edge_mass=" + fmt(info.edge_mass));
      return 0;
    };
  });

  static double zre, zim;
  zre = 1.0; zim = 0.0;
  auto* fr = d->add_subcommand("frac", "fractional Laplacian (-Delta)^z");
  fr->add_option("--f", f, "sequence (JSON)")->required();
  fr->add_option("--z", zre, "real part of z");
  fr->add_option("--zim", zim, "imaginary part of z");
  fr->add_option("--grid", N, "grid size N");
  fr->callback([=, &g, &action] {
    action = [=, &g] {
      Output o{g, "discrete frac", {{"f", f}, {"z", zre}, {"zim", zim}, {"grid", N}}};
      check_grid(N);
      auto a = read_sequence_json(f);
      if (zre < 0.0) throw ValidationError("z must have nonnegative real part");
      if (o.dry()) return 0;
      auto out = fractional_laplacian(a, cplx(zre, zim), N);
      o.emit(sequence_to_json(out) + "\n");
      o.summary("l2=" + fmt(lp_norm(out, 2.0)));
      return 0;
    };
  });

  static bool complement;
  complement = false;
  auto* rz = d->add_subcommand("riesz", "positive-frequency projection (d = 1)");
  rz->add_option("--f", f, "sequence (JSON)")->required();
  rz->add_option("--grid", N, "grid size N");
  rz->add_flag("--complement", complement, "apply I - H instead");
  rz->callback([=, &g, &action] {
    action = [=, &g] {
      Output o{g, "discrete riesz", {{"f", f}, {"grid", N}, {"complement", complement}}};
      check_grid(N);
      auto a = read_sequence_json(f);
      if (o.dry()) return 0;
      auto out = complement ? riesz_complement(a, N) : riesz_projection(a, N);
      o.emit(sequence_to_json(out) + "\n");
      o.summary("l2=" + fmt(lp_norm(out, 2.0)));
      return 0;
    };
  });
}

// paradiff ---------------------------------------------------------------------

void add_paradiff(CLI::App& app, Globals& g, std::function<int()>& action) {
  auto* pd = app.add_subcommand("paradiff", "proof machinery: pieces, split, support property");
  pd->require_subcommand(1);

  static std::string symbol, mode, f1, f2, f, setting;
  symbol = {}; mode = "diagonal"; f1 = {}; f2 = {}; f = {}; setting = "discrete";
  static int k, nmax, N, dim, trials, klo, khi;
  k = 0; nmax = 32; N = 64; dim = 1; trials = 20; klo = -8; khi = 3;
  static double b, s, eps, p, alpha, beta, kappa;
  b = 1.0; s = 6.0; eps = std::exp2(-12.0); p = 2.0; alpha = 0.5; beta = 0.5; kappa = 0.5;
  static bool k_given;
  k_given = false;
  auto* cnk = pd->add_subcommand("cnk", "Fourier coefficients of a localized symbol");
  cnk->add_option("--symbol", symbol, "symbol spec")->required();
  cnk->add_option("--k", k, "scale");
  cnk->add_option("--mode", mode, "diagonal|lowhigh");
  cnk->add_option("--nmax", nmax, "coefficient truncation");
  cnk->add_option("--b", b, "split parameter");
  cnk->add_option("--s", s, "decay weight exponent for the last column");
  cnk->callback([=, &g, &action] {
    action = [=, &g] {
      Output o{g, "paradiff cnk",
               {{"symbol", symbol}, {"k", k}, {"mode", mode}, {"nmax", nmax}, {"b", b}, {"s", s}}};
      Symbol2D m = symbol_from_spec(symbol);
      ExpandMode md = parse_mode(mode);
      if (nmax < 1) throw ValidationError("nmax must be >= 1");
      if (o.dry()) return 0;
      ExpandOptions opt;
      opt.b = b;
      opt.tol = o.tol_or(opt.tol);
      auto piece = localize_and_expand(m, k, md, nmax, opt);
      std::ostringstream os;
      os << std::setprecision(17) << "n1,n2,re,im,weighted\n";
      for (int n1 = -nmax; n1 <= nmax; ++n1)
        for (int n2 = -nmax; n2 <= nmax; ++n2) {
          cplx c = piece.coeff(n1, n2);
          os << n1 << ',' << n2 << ',' << c.real() << ',' << c.imag() << ','
             << std::abs(c) * std::pow(1.0 + std::hypot(n1, n2), s) << '\n';
        }
      auto rep = decay_report({piece}, s, nmax);
      o.emit(os.str(), {{"box_halfwidth_a", piece.box_halfwidth_a},
                        {"quadrature_change", piece.quad_change},
                        {"converged", piece.converged},
                        {"weighted_sup", rep.weighted_sup},
                        {"decay_slope", rep.slope}});
      o.summary("weighted_sup=" + fmt(rep.weighted_sup) + " slope=" + fmt(rep.slope) +
                " quad_change=" + fmt(piece.quad_change));
      return piece.converged ? 0 : 2;
    };
  });

  auto* pf = pd->add_subcommand("pf-check", "spectral support property");
  pf->add_option("--setting", setting, "discrete|jacobi|dunkl");
  pf->add_option("--d", dim, "lattice dimension (discrete)");
  pf->add_option("--k", k, "scale (default: every admissible k)")->each([&](const std::string&) {
    k_given = true;
  });
  pf->add_option("--trials", trials, "random pairs per k");
  pf->add_option("--grid", N, "grid size N (discrete; default 4096 for d=1, 1024 for d=2)");
  pf->add_option("--eps", eps, "class-A annulus parameter (discrete)");
  pf->add_option("--alpha", alpha, "Jacobi alpha");
  pf->add_option("--beta", beta, "Jacobi beta");
  pf->add_option("--kappa", kappa, "Dunkl multiplicity");
  pf->callback([=, &g, &action] {
    action = [=, &g] {
      Setting st = setting == "discrete" ? Setting::Discrete
                   : setting == "jacobi" ? Setting::Jacobi
                   : setting == "dunkl"  ? Setting::Dunkl
                                         : throw ValidationError("setting must be discrete, jacobi or dunkl");
      if (trials < 1) throw ValidationError("trials must be >= 1");
      int grid = N;
      if (st == Setting::Discrete) {
        if (dim != 1 && dim != 2) throw ValidationError("d must be 1 or 2");
        if (pf->count("--grid") == 0) grid = dim == 1 ? 4096 : 1024;
        check_grid(grid);
      }
      PFConfig cfg = pf_config_for(st, dim);
      Output o{g, "paradiff pf-check",
               {{"setting", setting}, {"d", dim}, {"trials", trials}, {"b", cfg.b}}};
      std::vector<int> ks;
      if (k_given) {
        ks = {k};
      } else if (st == Setting::Discrete) {
        auto [lo, hi] = pf_admissible_k(dim, grid, cfg.b);
        for (int kk = lo; kk <= hi + 1; ++kk) ks.push_back(kk);
      } else if (st == Setting::Jacobi) {
        for (int kk = 3; kk <= 6; ++kk)
          if (std::exp2(kk - 3.0) >= (alpha + beta + 1.0) / 2.0) ks.push_back(kk);
      } else {
        ks = {0, 1, 2};
      }
      o.config["k"] = ks;
      if (st == Setting::Discrete) o.config["grid"] = grid;
      if (st == Setting::Jacobi) o.config["alpha"] = alpha, o.config["beta"] = beta;
      if (st == Setting::Dunkl) o.config["kappa"] = kappa;
      if (o.dry()) return 0;
      double tol = o.tol_or(st == Setting::Dunkl ? 1e-4 : 1e-10);
      std::ostringstream os;
      os << std::setprecision(17) << "k,trial,leaked_energy,total_energy,pass\n";
      double worst = 0.0;
      bool all = true;
      std::unique_ptr<DunklContext> ctx;
      if (st == Setting::Dunkl) ctx = std::make_unique<DunklContext>(kappa);
      for (int kk : ks) {
        std::unique_ptr<JacobiBasis> basis;
        if (st == Setting::Jacobi)
          basis = std::make_unique<JacobiBasis>(alpha, beta,
                                                pf_degree_needed((alpha + beta + 1.0) / 2.0, kk));
        for (int t = 0; t < trials; ++t) {
          double leak = 0.0, total = 0.0;
          bool pass = false;
          if (st == Setting::Discrete) {
            ClassAOptions ca;
            ca.dim = dim;
            ca.full_window = true;
            ca.stream = 2ULL * t;
            auto a = random_class_A(eps, grid / 2 - 1, g.seed, grid, ca);
            ca.stream += 1;
            auto c = random_class_A(eps, grid / 2 - 1, g.seed, grid, ca);
            auto r = check_pf_support(a, c, kk, cfg, grid, tol);
            leak = r.leaked_energy, total = r.total_energy, pass = r.pass;
          } else if (st == Setting::Jacobi) {
            auto [c1, c2] = random_pf_pair(*basis, kk, g.seed, t);
            auto r = check_pf_jacobi(kk, c1, c2, *basis, tol);
            leak = r.leaked_energy, total = r.total_energy, pass = r.pass;
          } else {
            auto [F1, F2] = random_band_pair(*ctx, kk, g.seed, t);
            auto r = check_pf_dunkl(kk, F1, F2, *ctx, tol);
            leak = r.leaked_energy, total = r.total_energy, pass = r.pass;
          }
          worst = std::max(worst, leak);
          all = all && pass;
          os << kk << ',' << t << ',' << leak << ',' << total << ',' << (pass ? 1 : 0) << '\n';
        }
      }
      o.emit(os.str(), {{"max_leaked_energy", worst}, {"tolerance", tol}});
      o.summary(std::string(all ? "pass" : "FAIL") + " max_leaked_energy=" + fmt(worst));
      return 0;
    };
  });

  auto* sp = pd->add_subcommand("split", "T1 + T2 + T3 decomposition");
  sp->add_option("--symbol", symbol, "symbol spec")->required();
  sp->add_option("--f1", f1, "first sequence (JSON)")->required();
  sp->add_option("--f2", f2, "second sequence (JSON)")->required();
  sp->add_option("--grid", N, "grid size N");
  sp->add_option("--b", b, "split parameter");
  sp->callback([=, &g, &action] {
    action = [=, &g] {
      Output o{g, "paradiff split",
               {{"symbol", symbol}, {"f1", f1}, {"f2", f2}, {"grid", N}, {"b", b}}};
      check_grid(N);
      Symbol2D m = symbol_from_spec(symbol);
      auto a = read_sequence_json(f1), c = read_sequence_json(f2);
      if (o.dry()) return 0;
      auto res = paradiff_split(m, a, c, b, N);
      auto full = bilinear_apply(m, a, c, N);
      double err = lp_norm(res.t1 + res.t2 + res.t3 - full, 2.0);
      double rel = err / std::max(lp_norm(full, 2.0), std::numeric_limits<double>::min());
      json j = {{"T1", json::parse(sequence_to_json(res.t1))},
                {"T2", json::parse(sequence_to_json(res.t2))},
                {"T3", json::parse(sequence_to_json(res.t3))},
                {"k_range", {res.k_lo, res.k_hi}},
                {"relative_residual", rel}};
      o.emit(j.dump() + "\n", {{"relative_residual", rel}});
      o.summary("relative_residual=" + fmt(rel));
      return 0;
    };
  });

  auto* sq = pd->add_subcommand("square", "Littlewood-Paley square function");
  sq->add_option("--f", f, "sequence (JSON)")->required();
  sq->add_option("--grid", N, "grid size N");
  sq->add_option("--p", p, "norm exponent");
  sq->add_option("--klo", klo, "lowest scale (default: from the grid)");
  sq->add_option("--khi", khi, "highest scale (default: from the grid)");
  sq->callback([=, &g, &action] {
    action = [=, &g] {
      check_grid(N);
      auto a = read_sequence_json(f);
      auto [lo, hi] = k_range_for_grid(a.dim(), N);
      if (sq->count("--klo")) lo = klo;
      if (sq->count("--khi")) hi = khi;
      Output o{g, "paradiff square", {{"f", f}, {"grid", N}, {"p", p}, {"k_range", {lo, hi}}}};
      if (o.dry()) return 0;
      auto S = square_function_sequence(a, make_psi(), lo, hi, N);
      double norm = lp_norm(S, p);
      o.emit(sequence_csv(S), {{"lp_norm", norm}});
      o.summary("lp_norm=" + fmt(norm));
      return 0;
    };
  });

  auto* mx = pd->add_subcommand("maximal", "maximal function sup_k |phi_k(L) f|");
  mx->add_option("--f", f, "sequence (JSON)")->required();
  mx->add_option("--grid", N, "grid size N");
  mx->add_option("--klo", klo, "lowest scale");
  mx->add_option("--khi", khi, "highest scale");
  mx->callback([=, &g, &action] {
    action = [=, &g] {
      check_grid(N);
      auto a = read_sequence_json(f);
      Output o{g, "paradiff maximal", {{"f", f}, {"grid", N}, {"k_range", {klo, khi}}}};
      if (o.dry()) return 0;
      auto Mf = maximal_function(a, make_phi0(), klo, khi, N);
      o.emit(sequence_csv(Mf));
      o.summary("l2=" + fmt(lp_norm(Mf, 2.0)));
      return 0;
    };
  });
}

// leibniz / cm -----------------------------------------------------------------

struct HarnessArgs {
  HarnessConfig cfg;
  int mh_order = 2;
  std::string symbol = "builtin:one";
};

void add_harness_options(CLI::App* c, HarnessArgs& h) {
  c->add_option("--p", h.cfg.p, "target exponent");
  c->add_option("--p1", h.cfg.p1, "exponent of the first factor");
  c->add_option("--p2", h.cfg.p2, "exponent of the second factor");
  c->add_option("--trials", h.cfg.trials, "number of trials");
  c->add_option("--grid", h.cfg.N, "grid size N");
  c->add_option("--radius", h.cfg.radius, "support radius of the inputs");
  c->add_option("--eps", h.cfg.eps, "class-A annulus parameter");
  c->add_option("--dim", h.cfg.dim, "lattice dimension");
}

json harness_json(const HarnessConfig& c) {
  return {{"trials", c.trials}, {"grid", c.N},   {"radius", c.radius}, {"dim", c.dim},
          {"eps", c.eps},       {"s", c.s},      {"p", c.p},           {"p1", c.p1},
          {"p2", c.p2},         {"source_radius", c.source_radius}};
}

void add_leibniz(CLI::App& app, Globals& g, std::function<int()>& action) {
  static HarnessArgs lh, ch;
  lh = {}; ch = {};
  auto* lb = app.add_subcommand("leibniz", "fractional Leibniz rule experiments");
  lb->require_subcommand(1);
  auto* lr = lb->add_subcommand("run", "Leibniz ratio over random class-A pairs");
  lr->add_option("--s", lh.cfg.s, "Laplacian power")->required();
  add_harness_options(lr, lh);
  lr->callback([=, &g, &action] {
    action = [=, &g] {
      lh.cfg.seed = g.seed;
      Output o{g, "leibniz run", harness_json(lh.cfg)};
      if (!(lh.cfg.s > 0.0)) throw ValidationError("s must be > 0");
      check_exponents(lh.cfg.p, lh.cfg.p1, lh.cfg.p2);
      check_grid(lh.cfg.N);
      if (lh.cfg.trials < 1) throw ValidationError("trials must be >= 1");
      if (lh.cfg.N <= 2 * lh.cfg.radius) throw ValidationError("grid must exceed twice the radius");
      if (o.dry()) return 0;
      auto reps = run_leibniz(lh.cfg);
      auto sm = summarize(reps);
      o.emit(reports_to_csv(reps), {{"max_ratio", sm.max_ratio}, {"p95_ratio", sm.p95_ratio},
                                    {"max_truncation", sm.max_truncation}});
      o.summary("max_ratio=" + fmt(sm.max_ratio) + " p95_ratio=" + fmt(sm.p95_ratio));
      return 0;
    };
  });

  auto* cm = app.add_subcommand("cm", "Coifman-Meyer ratio experiments");
  cm->require_subcommand(1);
  auto* cr = cm->add_subcommand("run", "||B_m(f1,f2)||_p / (||m||_MH ||f1|| ||f2||)");
  cr->add_option("--symbol", ch.symbol, "symbol spec")->required();
  cr->add_option("--mh-order", ch.mh_order, "order s of the MH norm estimate");
  add_harness_options(cr, ch);
  cr->callback([=, &g, &action] {
    action = [=, &g] {
      ch.cfg.seed = g.seed;
      Output o{g, "cm run", harness_json(ch.cfg)};
      o.config["symbol"] = ch.symbol;
      o.config["mh_order"] = ch.mh_order;
      check_exponents(ch.cfg.p, ch.cfg.p1, ch.cfg.p2);
      check_grid(ch.cfg.N);
      if (ch.cfg.trials < 1) throw ValidationError("trials must be >= 1");
      if (ch.cfg.N <= 2 * ch.cfg.radius) throw ValidationError("grid must exceed twice the radius");
      Symbol2D m = symbol_from_spec(ch.symbol);
      if (ch.mh_order < 0) throw ValidationError("mh-order must be >= 0");
      if (o.dry()) return 0;
      double mh = estimate_mh_norm(m, ch.mh_order).norm_estimate;
      auto reps = run_coifman_meyer(m, ch.cfg, mh);
      auto sm = summarize(reps);
      o.emit(reports_to_csv(reps), {{"max_ratio", sm.max_ratio}, {"mh_norm", mh}});
      o.summary("max_ratio=" + fmt(sm.max_ratio) + " mh_norm=" + fmt(mh));
      return 0;
    };
  });
}

// jacobi -----------------------------------------------------------------------

void add_jacobi(CLI::App& app, Globals& g, std::function<int()>& action) {
  auto* jc = app.add_subcommand("jacobi", "Jacobi expansions");
  jc->require_subcommand(1);
  static double alpha, beta;
  alpha = 0.5; beta = 0.5;
  static std::string symbol, c1, c2;
  symbol = {}; c1 = {}; c2 = {};
  static int points, n1, n2, k, trials;
  points = 64; n1 = 0; n2 = 0; k = 4; trials = 20;
  auto* bl = jc->add_subcommand("bilinear", "bilinear Jacobi multiplier on a theta grid");
  bl->add_option("--alpha", alpha, "alpha > -1/2");
  bl->add_option("--beta", beta, "beta > -1/2");
  bl->add_option("--symbol", symbol, "symbol spec")->required();
  bl->add_option("--c1", c1, "coefficient file")->required();
  bl->add_option("--c2", c2, "coefficient file")->required();
  bl->add_option("--theta-points", points, "uniform interior theta points");
  bl->callback([=, &g, &action] {
    action = [=, &g] {
      Output o{g, "jacobi bilinear", {{"alpha", alpha}, {"beta", beta}, {"symbol", symbol},
                                      {"c1", c1}, {"c2", c2}, {"theta_points", points}}};
      Symbol2D m = symbol_from_spec(symbol);
      auto a = read_coefficients_json(c1), b = read_coefficients_json(c2);
      if (a.alpha != alpha || a.beta != beta || b.alpha != alpha || b.beta != beta)
        throw ValidationError("coefficient files were made for different (alpha, beta)");
      if (points < 1) throw ValidationError("theta-points must be >= 1");
      if (o.dry()) return 0;
      int deg = static_cast<int>(std::max(a.coeffs.size(), b.coeffs.size())) - 1;
      JacobiBasis basis(alpha, beta, std::max(deg, 0));
      std::vector<double> th(points);
      for (int i = 0; i < points; ++i) th[i] = kPi * (i + 0.5) / points;
      auto v = bilinear_jacobi(basis, m, a, b, th);
      std::ostringstream os;
      os << std::setprecision(17) << "theta,re,im\n";
      for (int i = 0; i < points; ++i) os << th[i] << ',' << v[i].real() << ',' << v[i].imag() << '\n';
      o.emit(os.str());
      o.summary("points=" + std::to_string(points));
      return 0;
    };
  });

  auto* ln = jc->add_subcommand("linearize", "linearization coefficients c_{n1,n2}(j)");
  ln->add_option("--alpha", alpha, "alpha > -1/2");
  ln->add_option("--beta", beta, "beta > -1/2");
  ln->add_option("--n1", n1, "first degree")->required();
  ln->add_option("--n2", n2, "second degree")->required();
  ln->callback([=, &g, &action] {
    action = [=, &g] {
      Output o{g, "jacobi linearize", {{"alpha", alpha}, {"beta", beta}, {"n1", n1}, {"n2", n2}}};
      if (n1 < 0 || n2 < 0) throw ValidationError("degrees must be nonnegative");
      if (o.dry()) return 0;
      JacobiBasis basis(alpha, beta, n1 + n2);
      auto c = linearization_coeffs(basis, n1, n2);
      std::ostringstream os;
      os << std::setprecision(17) << "j,c\n";
      double outside = 0.0;
      for (std::size_t j = 0; j < c.size(); ++j) {
        os << j << ',' << c[j] << '\n';
        if (static_cast<int>(j) < std::abs(n1 - n2)) outside = std::max(outside, std::fabs(c[j]));
      }
      o.emit(os.str(), {{"max_outside_window", outside}});
      o.summary("max_outside_window=" + fmt(outside));
      return 0;
    };
  });

  auto* pf = jc->add_subcommand("pf-check", "support property with b = 3");
  pf->add_option("--alpha", alpha, "alpha > -1/2");
  pf->add_option("--beta", beta, "beta > -1/2");
  pf->add_option("--k", k, "scale");
  pf->add_option("--trials", trials, "random pairs");
  pf->callback([=, &g, &action] {
    action = [=, &g] {
      Output o{g, "jacobi pf-check", {{"alpha", alpha}, {"beta", beta}, {"k", k}, {"trials", trials}}};
      if (trials < 1) throw ValidationError("trials must be >= 1");
      double gamma = (alpha + beta + 1.0) / 2.0;
      if (std::exp2(k - 3.0) < gamma)
        throw ValidationError("k too small: no degree n with n + gamma <= 2^{k-3}");
      if (o.dry()) return 0;
      JacobiBasis basis(alpha, beta, pf_degree_needed(gamma, k));
      double tol = o.tol_or(1e-10), worst = 0.0;
      bool all = true;
      std::ostringstream os;
      os << std::setprecision(17) << "k,trial,leaked_energy,total_energy,pass\n";
      for (int t = 0; t < trials; ++t) {
        auto [a, b] = random_pf_pair(basis, k, g.seed, t);
        auto r = check_pf_jacobi(k, a, b, basis, tol);
        worst = std::max(worst, r.leaked_energy);
        all = all && r.pass;
        os << k << ',' << t << ',' << r.leaked_energy << ',' << r.total_energy << ','
           << (r.pass ? 1 : 0) << '\n';
      }
      o.emit(os.str(), {{"max_leaked_energy", worst}, {"tolerance", tol}});
      o.summary(std::string(all ? "pass" : "FAIL") + " max_leaked_energy=" + fmt(worst));
      return 0;
    };
  });
}

// dunkl ------------------------------------------------------------------------

void add_dunkl(CLI::App& app, Globals& g, std::function<int()>& action) {
  auto* dk = app.add_subcommand("dunkl", "rank-one Dunkl setting");
  dk->require_subcommand(1);
  static double kappa, R;
  kappa = 0.5; R = 12.0;
  static int nodes, k, trials;
  nodes = 512; k = 2; trials = 10;
  static std::string f, f1, f2, symbol;
  f = {}; f1 = {}; f2 = {}; symbol = {};
  static bool inverse;
  inverse = false;
  auto ctx_opts = [] {
    DunklOptions d;
    d.R = R;
    d.nodes_per_side = nodes;
    return d;
  };
  auto add_ctx = [&](CLI::App* c) {
    c->add_option("--kappa", kappa, "multiplicity kappa >= 0");
    c->add_option("--R", R, "truncation radius");
    c->add_option("--nodes", nodes, "nodes per side (multiple of 16)");
  };
  auto ctx_json = [] { return json{{"kappa", kappa}, {"R", R}, {"nodes_per_side", nodes}}; };

  auto* tr = dk->add_subcommand("transform", "Dunkl transform of sampled data");
  add_ctx(tr);
  tr->add_option("--f", f, "samples file")->required();
  tr->add_flag("--inverse", inverse, "inverse transform");
  tr->callback([=, &g, &action] {
    action = [=, &g] {
      Output o{g, "dunkl transform", ctx_json()};
      o.config["f"] = f;
      o.config["inverse"] = inverse;
      DunklContext ctx(kappa, ctx_opts());
      auto s = read_samples_json(f, ctx);
      if (o.dry()) return 0;
      auto F = dunkl_transform(ctx, s, inverse ? Direction::Inverse : Direction::Forward);
      o.emit(samples_to_json(ctx, F) + "\n",
             {{"c_kappa", ctx.c_kappa()}, {"c_kappa_closed_form", ctx.c_kappa_exact()}});
      o.summary("l2_in=" + fmt(weighted_l2(ctx, s)) + " l2_out=" + fmt(weighted_l2(ctx, F)));
      return 0;
    };
  });

  auto* bl = dk->add_subcommand("bilinear", "bilinear Dunkl multiplier at the nodes");
  add_ctx(bl);
  bl->add_option("--symbol", symbol, "symbol spec")->required();
  bl->add_option("--f1", f1, "samples file")->required();
  bl->add_option("--f2", f2, "samples file")->required();
  bl->callback([=, &g, &action] {
    action = [=, &g] {
      Output o{g, "dunkl bilinear", ctx_json()};
      o.config["symbol"] = symbol;
      Symbol2D m = symbol_from_spec(symbol);
      DunklContext ctx(kappa, ctx_opts());
      auto a = read_samples_json(f1, ctx), b = read_samples_json(f2, ctx);
      if (o.dry()) return 0;
      auto out = bilinear_dunkl(ctx, m, a, b);
      o.emit(samples_to_json(ctx, out) + "\n", {{"c_kappa", ctx.c_kappa()}});
      o.summary("l2=" + fmt(weighted_l2(ctx, out)));
      return 0;
    };
  });

  auto* pf = dk->add_subcommand("pf-check", "support property with b = 2");
  add_ctx(pf);
  pf->add_option("--k", k, "scale");
  pf->add_option("--trials", trials, "random pairs");
  pf->callback([=, &g, &action] {
    action = [=, &g] {
      Output o{g, "dunkl pf-check", ctx_json()};
      o.config["k"] = k;
      o.config["trials"] = trials;
      if (trials < 1) throw ValidationError("trials must be >= 1");
      if (std::exp2(k + 1.0) > R) throw ValidationError("band 2^{k+1} exceeds the frequency radius R");
      if (o.dry()) return 0;
      DunklContext ctx(kappa, ctx_opts());
      double tol = o.tol_or(1e-4), worst = 0.0;
      bool all = true;
      std::ostringstream os;
      os << std::setprecision(17) << "k,trial,leaked_energy,total_energy,pass\n";
      for (int t = 0; t < trials; ++t) {
        auto [F1, F2] = random_band_pair(ctx, k, g.seed, t);
        auto r = check_pf_dunkl(k, F1, F2, ctx, tol);
        worst = std::max(worst, r.leaked_energy);
        all = all && r.pass;
        os << k << ',' << t << ',' << r.leaked_energy << ',' << r.total_energy << ','
           << (r.pass ? 1 : 0) << '\n';
      }
      o.emit(os.str(), {{"max_leaked_energy", worst}, {"tolerance", tol}});
      o.summary(std::string(all ? "pass" : "FAIL") + " max_leaked_energy=" + fmt(worst));
      return 0;
    };
  });

  auto* lb = dk->add_subcommand("leibniz", "product rule for the Dunkl operator");
  add_ctx(lb);
  lb->add_option("--trials", trials, "random pairs");
  lb->callback([=, &g, &action] {
    action = [=, &g] {
      Output o{g, "dunkl leibniz", ctx_json()};
      o.config["trials"] = trials;
      if (trials < 1) throw ValidationError("trials must be >= 1");
      if (o.dry()) return 0;
      DunklContext ctx(kappa, ctx_opts());
      std::ostringstream os;
      os << std::setprecision(17) << "trial,even_residual,odd_odd_residual\n";
      double worst_even = 0.0, min_odd = std::numeric_limits<double>::infinity();
      for (int t = 0; t < trials; ++t) {
        Rng rng(g.seed, t);
        double c1 = rng.uniform(-2, 2), c2 = rng.uniform(-2, 2), s1 = rng.uniform(0.6, 1.4),
               s2 = rng.uniform(0.6, 1.4);
        auto fa = sample(ctx, [&](double x) { return cplx(std::exp(-(x - c1) * (x - c1) / (2 * s1 * s1))); });
        auto ge = sample(ctx, [&](double x) { return cplx(std::exp(-x * x / (2 * s2 * s2)) * (1 + c2 * x * x)); });
        auto fo = sample(ctx, [&](double x) { return cplx(x * std::exp(-x * x / (2 * s1 * s1))); });
        auto go = sample(ctx, [&](double x) { return cplx((x + c2 * x * x * x) * std::exp(-x * x / (2 * s2 * s2))); });
        double re = dunkl_leibniz_residual(ctx, fa, ge);
        double ro = dunkl_leibniz_residual(ctx, fo, go);
        worst_even = std::max(worst_even, re);
        min_odd = std::min(min_odd, ro);
        os << t << ',' << re << ',' << ro << '\n';
      }
      o.emit(os.str(), {{"max_even_residual", worst_even}, {"min_odd_odd_residual", min_odd}});
      o.summary("max_even_residual=" + fmt(worst_even) + " min_odd_odd_residual=" + fmt(min_odd));
      return 0;
    };
  });
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"bispec: bilinear spectral multipliers"};
  app.fallthrough();
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--threads", g.threads, "worker threads (default: hardware)");
  app.add_flag("--deterministic", g.deterministic, "fixed reduction order");
  app.add_option("--tol", g.tol, "tolerance override");
  app.add_option("--out", g.out, "output path (default: stdout)");
  app.add_flag("--dry-run", g.dry_run, "validate and print the plan only");
  app.set_version_flag("--version", kVersion);

  std::function<int()> action;
  add_discrete(app, g, action);
  add_paradiff(app, g, action);
  add_leibniz(app, g, action);
  add_jacobi(app, g, action);
  add_dunkl(app, g, action);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    if (g.threads < 0) throw ValidationError("threads must be >= 0");
    set_num_threads(g.threads);
    set_deterministic(g.deterministic);
    if (!action) throw ValidationError("no subcommand selected");
    return action();
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace bispec
