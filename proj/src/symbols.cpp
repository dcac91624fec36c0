#include "bispec/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bispec {

// Cutoffs --------------------------------------------------------------------

namespace cutoffs {

double rho(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

double smooth_step(double t, double a, double b) {
  if (t <= a) return 0.0;
  if (t >= b) return 1.0;
  double x = rho(t - a);
  double y = rho(b - t);
  return x / (x + y);
}

double phi0(double t) {
  if (t <= 1.0) return 1.0;
  if (t >= 2.0) return 0.0;
  double x = rho(t - 1.0);
  double y = rho(2.0 - t);
  return y / (x + y);
}

double psi(double t) { return phi0(t) - phi0(2.0 * t); }

double phi_ratio(double t) {
  if (t <= 0.125) return 1.0;
  if (t >= 0.25) return 0.0;
  double x = rho(t - 0.125);
  double y = rho(0.25 - t);
  return y / (x + y);
}

double phi_middle(double t) {
  if (t <= 0.0) return 0.0;
  return 1.0 - phi_ratio(t) - phi_ratio(1.0 / t);
}

double eta0(double t) { return phi_ratio(t); }

double eta1(double t) {
  return smooth_step(t, 0.125, 0.25) * (1.0 - smooth_step(t, 4.0, 10.0));
}

}  // namespace cutoffs

CutoffFunction CutoffFunction::dilate(double k) const {
  CutoffFunction c = *this;
  double scale = std::exp2(k);
  auto f = evaluator;
  c.evaluator = [f, scale](double t) { return f(t / scale); };
  c.support_lo = support_lo * scale;
  c.support_hi = support_hi * scale;
  return c;
}

namespace {
CutoffFunction make_cutoff(std::function<double(double)> f, double lo, double hi) {
  CutoffFunction c;
  c.evaluator = std::move(f);
  c.support_lo = lo;
  c.support_hi = hi;
  return c;
}
}  // namespace

CutoffFunction make_psi() { return make_cutoff(cutoffs::psi, 0.5, 2.0); }
CutoffFunction make_phi0() { return make_cutoff(cutoffs::phi0, 0.0, 2.0); }
CutoffFunction make_phi_ratio() { return make_cutoff(cutoffs::phi_ratio, 0.0, 0.25); }
CutoffFunction make_eta0() { return make_cutoff(cutoffs::eta0, 0.0, 0.25); }
CutoffFunction make_eta1() { return make_cutoff(cutoffs::eta1, 0.125, 10.0); }

CutoffFunction make_psi_tilde(double b) {
  double lo = std::exp2(-3.0 - b);
  double hi = std::exp2(3.0 + b);
  return make_plateau(lo, hi, 0.0);
}

CutoffFunction make_plateau(double lo, double hi, double w) {
  // w = 0 means: ramps of relative width one octave on each side.
  double a = w > 0.0 ? lo - w : lo / 2.0;
  double b = w > 0.0 ? hi + w : hi * 2.0;
  return make_cutoff(
      [=](double t) {
        return cutoffs::smooth_step(t, a, lo) * (1.0 - cutoffs::smooth_step(t, hi, b));
      },
      a, b);
}

// Evaluation ----------------------------------------------------------------

cplx eval_symbol(const Symbol2D& sym, double l1, double l2) {
  if (!(l1 > 0.0) || !(l2 > 0.0))
    throw ValidationError("symbol '" + sym.name + "' evaluated outside (0,inf)^2");
  cplx v = sym.evaluator(l1, l2);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    std::ostringstream os;
    os << "symbol '" << sym.name << "' is not finite at (" << l1 << ", " << l2 << ")";
    throw NumericalError(os.str());
  }
  return v;
}

namespace {

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double fd_step(double lambda, int total_order) {
  if (total_order <= 1) return std::max(1e-5, 1e-5 * lambda);
  return lambda * std::pow(0x1.0p-52, 1.0 / (total_order + 2));
}

}  // namespace

cplx symbol_derivative(const Symbol2D& sym, MultiIndex alpha, double l1, double l2) {
  if (alpha.order() == 0) return eval_symbol(sym, l1, l2);
  if (sym.derivative_evaluator) return sym.derivative_evaluator(alpha, l1, l2);
  int tot = alpha.order();
  double h1 = fd_step(l1, tot);
  double h2 = fd_step(l2, tot);
  cplx acc = 0.0;
  for (int i = 0; i <= alpha.a1; ++i) {
    double c1 = binom(alpha.a1, i) * ((i % 2) ? -1.0 : 1.0);
    double x1 = l1 + (0.5 * alpha.a1 - i) * h1;
    for (int j = 0; j <= alpha.a2; ++j) {
      double c2 = binom(alpha.a2, j) * ((j % 2) ? -1.0 : 1.0);
      double x2 = l2 + (0.5 * alpha.a2 - j) * h2;
      acc += c1 * c2 * eval_symbol(sym, x1, x2);
    }
  }
  return acc / (std::pow(h1, alpha.a1) * std::pow(h2, alpha.a2));
}

MHReport estimate_mh_norm(const Symbol2D& sym, int s, DyadicGridSpec grid) {
  if (s < 0) throw ValidationError("MH order s must be >= 0");
  if (grid.K < 1 || grid.per_octave < 1) throw ValidationError("bad dyadic grid");
  std::vector<double> lam;
  for (int k = -grid.per_octave * grid.K; k <= grid.per_octave * grid.K; ++k)
    lam.push_back(std::exp2(static_cast<double>(k) / grid.per_octave));
  const std::size_t n = lam.size();
  std::vector<double> order_sup(s + 1, 0.0);
  std::vector<std::vector<double>> rows(n, std::vector<double>(s + 1, 0.0));
  parallel_for(0, n, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) {
      double l1 = lam[i], l2 = lam[j];
      double norm = std::hypot(l1, l2);
      for (int ord = 0; ord <= s; ++ord) {
        double w = std::pow(norm, ord);
        for (int a1 = 0; a1 <= ord; ++a1) {
          double v = w * std::abs(symbol_derivative(sym, {a1, ord - a1}, l1, l2));
          rows[i][ord] = std::max(rows[i][ord], v);
        }
      }
    }
  });
  for (auto& r : rows)
    for (int ord = 0; ord <= s; ++ord) order_sup[ord] = std::max(order_sup[ord], r[ord]);
  MHReport rep;
  rep.order_s = s;
  rep.grid = grid;
  for (int ord = 0; ord <= s; ++ord) {
    rep.per_order_sups.emplace_back(ord, order_sup[ord]);
    rep.norm_estimate = std::max(rep.norm_estimate, order_sup[ord]);
  }
  return rep;
}

// Built-ins -------------------------------------------------------------------

namespace {

double need(const std::map<std::string, double>& p, const std::string& key,
            const std::string& name) {
  auto it = p.find(key);
  if (it == p.end())
    throw ValidationError("builtin '" + name + "' requires parameter '" + key + "'");
  return it->second;
}

double opt(const std::map<std::string, double>& p, const std::string& key, double dflt) {
  auto it = p.find(key);
  return it == p.end() ? dflt : it->second;
}

cplx need_z(const std::map<std::string, double>& p, const std::string& name) {
  if (!p.count("z") && !p.count("zim"))
    throw ValidationError("builtin '" + name + "' requires parameter 'z' (and optionally 'zim')");
  return {opt(p, "z", 0.0), opt(p, "zim", 0.0)};
}

/// |num|^{2z} / den^{2z} on the principal branch; 0^{2z} = 0 unless z = 0.
cplx ratio_power(double num, double den, cplx z) {
  if (z == cplx(0.0)) return 1.0;
  if (num == 0.0) return 0.0;
  return std::exp(2.0 * z * (std::log(num) - std::log(den)));
}

/// Shared body of m_{1,1}, m~_{1,1}, m_{1,-1}, m~_{1,-1}.
Symbol2D quadrant_symbol(const std::string& name, cplx z, double sign, bool tilde) {
  Symbol2D s;
  s.name = name;
  s.params = {{"z", z.real()}, {"zim", z.imag()}};
  s.evaluator = [z, sign, tilde](double l1, double l2) -> cplx {
    double cut = cutoffs::eta0(l1) * cutoffs::eta0(l2) *
                 (tilde ? cutoffs::phi_ratio(l1 / l2) : cutoffs::phi_ratio(l2 / l1));
    if (cut == 0.0) return 0.0;
    double num = std::fabs(l1 * std::sqrt(1.0 - l2 * l2 / 4.0) +
                           sign * l2 * std::sqrt(1.0 - l1 * l1 / 4.0));
    return cut * ratio_power(num, tilde ? l2 : l1, z);
  };
  return s;
}

}  // namespace

Symbol2D constant_symbol(cplx c) {
  Symbol2D s;
  s.name = "constant";
  s.evaluator = [c](double, double) { return c; };
  s.derivative_evaluator = [c](MultiIndex a, double, double) {
    return a.order() == 0 ? c : cplx(0.0);
  };
  return s;
}

Symbol2D product_symbol(const Symbol2D& a, const Symbol2D& b) {
  Symbol2D s;
  s.name = a.name + "*" + b.name;
  auto fa = a.evaluator;
  auto fb = b.evaluator;
  s.evaluator = [fa, fb](double l1, double l2) {
    cplx x = fa(l1, l2);
    return x == cplx(0.0) ? x : x * fb(l1, l2);
  };
  return s;
}

std::vector<std::string> builtin_names() {
  return {"one", "m11", "m11t", "m1m1", "m1m1t", "dunkl_mz",
          "abs_power", "product_power", "psi_psi", "eta_eta"};
}

Symbol2D builtin_symbol(const std::string& name, const std::map<std::string, double>& p) {
  if (name == "one") {
    Symbol2D s = constant_symbol(1.0);
    s.name = "one";
    return s;
  }
  if (name == "m11") return quadrant_symbol(name, need_z(p, name), +1.0, false);
  if (name == "m11t") return quadrant_symbol(name, need_z(p, name), +1.0, true);
  if (name == "m1m1") return quadrant_symbol(name, need_z(p, name), -1.0, false);
  if (name == "m1m1t") return quadrant_symbol(name, need_z(p, name), -1.0, true);
  if (name == "dunkl_mz") {
    cplx z = need_z(p, name);
    double sign = opt(p, "sign", 1.0) >= 0 ? 1.0 : -1.0;
    Symbol2D s;
    s.name = name;
    s.params = {{"z", z.real()}, {"zim", z.imag()}, {"sign", sign}};
    s.evaluator = [z, sign](double l1, double l2) -> cplx {
      double cut = cutoffs::phi_ratio(l2 / l1);
      if (cut == 0.0) return 0.0;
      return cut * ratio_power(std::fabs(l1 + sign * l2), l1, z);
    };
    return s;
  }
  if (name == "abs_power") {
    double v = need(p, "v", name);
    Symbol2D s;
    s.name = name;
    s.params = {{"v", v}};
    s.evaluator = [v](double l1, double l2) {
      return std::exp(cplx(0.0, v * std::log(std::hypot(l1, l2))));
    };
    return s;
  }
  if (name == "product_power") {
    double v = need(p, "v", name);
    Symbol2D s;
    s.name = name;
    s.params = {{"v", v}};
    s.evaluator = [v](double l1, double l2) {
      return std::exp(cplx(0.0, v * (std::log(l1) + std::log(l2))));
    };
    return s;
  }
  if (name == "psi_psi") {
    double k1 = need(p, "k1", name), k2 = need(p, "k2", name);
    Symbol2D s;
    s.name = name;
    s.params = {{"k1", k1}, {"k2", k2}};
    s.evaluator = [k1, k2](double l1, double l2) {
      return cplx(cutoffs::psi(std::exp2(-k1) * l1) * cutoffs::psi(std::exp2(-k2) * l2), 0.0);
    };
    return s;
  }
  if (name == "eta_eta") {
    double i1 = need(p, "i1", name), i2 = need(p, "i2", name);
    auto pick = [](double i) { return i == 0.0 ? cutoffs::eta0 : cutoffs::eta1; };
    auto e1 = pick(i1), e2 = pick(i2);
    Symbol2D s;
    s.name = name;
    s.params = {{"i1", i1}, {"i2", i2}};
    s.evaluator = [e1, e2](double l1, double l2) { return cplx(e1(l1) * e2(l2), 0.0); };
    return s;
  }
  throw ValidationError("unknown builtin symbol '" + name + "'");
}

Symbol2D symbol_from_spec(const std::string& spec) {
  if (spec.rfind("expr:", 0) == 0) return parse_symbol(spec.substr(5));
  if (spec.rfind("builtin:", 0) == 0) {
    std::string rest = spec.substr(8);
    std::string name = rest.substr(0, rest.find(':'));
    std::map<std::string, double> params;
    if (rest.size() > name.size()) {
      std::stringstream ss(rest.substr(name.size() + 1));
      std::string kv;
      while (std::getline(ss, kv, ',')) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
          throw ValidationError("symbol parameter '" + kv + "' is not key=value");
        try {
          params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
        } catch (const std::exception&) {
          throw ValidationError("symbol parameter '" + kv + "' has a non-numeric value");
        }
      }
    }
    return builtin_symbol(name, params);
  }
  throw ValidationError("symbol spec must start with 'expr:' or 'builtin:': " + spec);
}

}  // namespace bispec
