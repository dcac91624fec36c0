#include "bispec/dunkl.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bispec/jacobi.hpp"
#include "json.hpp"

namespace bispec {

double normalized_bessel(double a, double t) {
  if (!(a > -1.0)) throw ValidationError("normalized Bessel order must exceed -1");
  t = std::fabs(t);
  if (t < 1.0) {
    double term = 1.0, sum = 1.0, q = -t * t / 4.0;
    for (int m = 1; m < 40; ++m) {
      term *= q / (m * (a + m));
      sum += term;
      if (std::fabs(term) < 1e-18) break;
    }
    return sum;
  }
  double j = boost::math::cyl_bessel_j(a, t);
  return std::exp(std::lgamma(a + 1.0) + a * std::log(2.0 / t)) * j;
}

cplx dunkl_kernel(double kappa, double lambda, double x) {
  if (kappa < 0.0) throw ValidationError("kappa must be >= 0");
  double t = lambda * x;
  if (kappa == 0.0) return std::polar(1.0, t);
  double even = normalized_bessel(kappa - 0.5, t);
  double odd = t / (2.0 * kappa + 1.0) * normalized_bessel(kappa + 0.5, t);
  if (!std::isfinite(even) || !std::isfinite(odd))
    throw NumericalError("Bessel evaluation failed at t = " + std::to_string(t));
  return {even, odd};
}

DunklContext::DunklContext(double kappa, DunklOptions opt) : kappa_(kappa), opt_(opt) {
  if (kappa < 0.0) throw ValidationError("kappa must be >= 0");
  if (!(opt.R > 0.0)) throw ValidationError("truncation radius must be positive");
  if (opt.nodes_per_side < 16 || opt.nodes_per_side % 16 != 0)
    throw ValidationError("nodes_per_side must be a positive multiple of 16");
  const int P = opt.nodes_per_side / 16;
  const double h = opt.R / P;
  std::vector<double> xp, wp, gx, gw;
  // Panel next to the origin carries the weight x^{2 kappa} exactly.
  gauss_jacobi(16, 0.0, 2.0 * kappa, gx, gw);
  for (int i = 0; i < 16; ++i) {
    xp.push_back(0.5 * h * (1.0 + gx[i]));
    wp.push_back(std::pow(0.5 * h, 2.0 * kappa + 1.0) * gw[i]);
  }
  for (int p = 1; p < P; ++p) {
    gauss_legendre(16, p * h, (p + 1) * h, gx, gw);
    for (int i = 0; i < 16; ++i) {
      xp.push_back(gx[i]);
      wp.push_back(gw[i] * std::pow(gx[i], 2.0 * kappa));
    }
  }
  const int half = static_cast<int>(xp.size());
  x_.resize(2 * half);
  w_.resize(2 * half);
  for (int i = 0; i < half; ++i) {
    x_[half + i] = xp[i];
    w_[half + i] = wp[i];
    x_[half - 1 - i] = -xp[i];
    w_[half - 1 - i] = wp[i];
  }
  for (int p = 0; p < 2 * P; ++p) panel_start_.push_back(16 * p);
  for (int p = 0; p < 2 * P; ++p) {
    const double* xs = &x_[16 * p];
    std::vector<double> lam(16, 1.0);
    for (int i = 0; i < 16; ++i)
      for (int j = 0; j < 16; ++j)
        if (i != j) lam[i] /= xs[i] - xs[j];
    std::vector<double> D(256, 0.0);
    for (int i = 0; i < 16; ++i) {
      double diag = 0.0;
      for (int j = 0; j < 16; ++j) {
        if (i == j) continue;
        D[i * 16 + j] = lam[j] / lam[i] / (xs[i] - xs[j]);
        diag -= D[i * 16 + j];
      }
      D[i * 16 + i] = diag;
    }
    diff_.push_back(std::move(D));
  }

  double g = 0.0;
  for (int i = 0; i < 2 * half; ++i) g += w_[i] * std::exp(-0.5 * x_[i] * x_[i]);
  c_ = 1.0 / g;

  const std::size_t M = x_.size();
  K_.resize(M * M);
  // E depends on t = xi x only, and E(-t) = conj E(t).
  parallel_for(0, half, [&](std::size_t a) {
    for (int b = 0; b < half; ++b) {
      cplx e = dunkl_kernel(kappa_, xp[b], xp[a]);
      std::size_t ip = half + a, in = half - 1 - a, jp = half + b, jn = half - 1 - b;
      K_[ip * M + jp] = e;
      K_[in * M + jn] = e;
      K_[ip * M + jn] = std::conj(e);
      K_[in * M + jp] = std::conj(e);
    }
  });
}

double DunklContext::c_kappa_exact() const {
  return std::exp(-(kappa_ + 0.5) * std::log(2.0) - std::lgamma(kappa_ + 0.5));
}

std::vector<cplx> DunklContext::derivative(const std::vector<cplx>& f) const {
  if (f.size() != x_.size()) throw ValidationError("samples do not match the context nodes");
  std::vector<cplx> d(f.size(), 0.0);
  for (std::size_t p = 0; p < panel_start_.size(); ++p) {
    const int s = panel_start_[p];
    const auto& D = diff_[p];
    for (int i = 0; i < 16; ++i) {
      cplx acc = 0.0;
      for (int j = 0; j < 16; ++j) acc += D[i * 16 + j] * f[s + j];
      d[s + i] = acc;
    }
  }
  return d;
}

Samples sample(const DunklContext& ctx, const std::function<cplx(double)>& f) {
  Samples s(ctx.size());
  for (int i = 0; i < ctx.size(); ++i) s[i] = f(ctx.nodes()[i]);
  return s;
}

double weighted_lp(const DunklContext& ctx, const Samples& f, double p) {
  if (f.size() != static_cast<std::size_t>(ctx.size()))
    throw ValidationError("samples do not match the context nodes");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : f) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += ctx.weights()[i] * std::pow(std::abs(f[i]), p);
  return std::pow(s, 1.0 / p);
}

double weighted_l2(const DunklContext& ctx, const Samples& f) { return weighted_lp(ctx, f, 2.0); }

Samples dunkl_operator(const DunklContext& ctx, const Samples& f) {
  Samples d = ctx.derivative(f);
  if (ctx.kappa() == 0.0) return d;
  for (int i = 0; i < ctx.size(); ++i)
    d[i] += ctx.kappa() * (f[i] - f[ctx.mirror(i)]) / ctx.nodes()[i];
  return d;
}

namespace {

Samples transform_raw(const DunklContext& ctx, const Samples& f, Direction dir) {
  const int M = ctx.size();
  if (f.size() != static_cast<std::size_t>(M))
    throw ValidationError("samples do not match the context nodes");
  Samples out(M);
  const bool fwd = dir == Direction::Forward;
  parallel_for(0, M, [&](std::size_t j) {
    cplx s = 0.0;
    for (int i = 0; i < M; ++i) {
      cplx e = ctx.kernel(i, static_cast<int>(j));
      s += ctx.weights()[i] * (fwd ? std::conj(e) : e) * f[i];
    }
    out[j] = ctx.c_kappa() * s;
  });
  return out;
}

}  // namespace

double boundary_fraction(const DunklContext& ctx, const Samples& f) {
  double peak = 0.0, edge = 0.0;
  const int M = ctx.size();
  for (int i = 0; i < M; ++i) {
    double a = std::abs(f[i]);
    peak = std::max(peak, a);
    if (i < 16 || i >= M - 16) edge = std::max(edge, a);
  }
  return peak == 0.0 ? 0.0 : edge / peak;
}

Samples dunkl_transform(const DunklContext& ctx, const Samples& f, Direction dir) {
  double b = boundary_fraction(ctx, f);
  if (b > 1e-6) {
    std::ostringstream os;
    os << "input does not decay at the truncation radius R=" << ctx.R()
       << ": boundary magnitude " << b << " of the peak";
    throw NumericalError(os.str());
  }
  return transform_raw(ctx, f, dir);
}

Samples dunkl_translation(const DunklContext& ctx, double y, const Samples& f,
                          const std::vector<double>& xs) {
  Samples F = transform_raw(ctx, f, Direction::Forward);
  const int M = ctx.size();
  std::vector<cplx> a(M);
  for (int j = 0; j < M; ++j)
    a[j] = ctx.weights()[j] * F[j] * dunkl_kernel(ctx.kappa(), ctx.nodes()[j], y);
  Samples out(xs.size());
  parallel_for(0, xs.size(), [&](std::size_t t) {
    cplx s = 0.0;
    for (int j = 0; j < M; ++j) s += a[j] * dunkl_kernel(ctx.kappa(), ctx.nodes()[j], xs[t]);
    out[t] = ctx.c_kappa() * s;
  });
  return out;
}

Samples bilinear_dunkl(const DunklContext& ctx, const Symbol2D& m, const Samples& f1,
                       const Samples& f2, double drop_tol) {
  Samples F1 = transform_raw(ctx, f1, Direction::Forward);
  Samples F2 = transform_raw(ctx, f2, Direction::Forward);
  auto active = [&](const Samples& F) {
    double peak = 0.0;
    for (const auto& v : F) peak = std::max(peak, std::abs(v));
    std::vector<int> idx;
    for (int j = 0; j < ctx.size(); ++j)
      if (std::abs(F[j]) > drop_tol * peak) idx.push_back(j);
    return idx;
  };
  auto J1 = active(F1), J2 = active(F2);
  const int X = ctx.size();
  Samples out(X, 0.0);
  if (J1.empty() || J2.empty()) return out;
  Eigen::MatrixXcd A1(X, J1.size()), A2(X, J2.size()), Mm(J1.size(), J2.size());
  for (int i = 0; i < X; ++i) {
    for (std::size_t a = 0; a < J1.size(); ++a)
      A1(i, a) = ctx.kernel(i, J1[a]) * ctx.weights()[J1[a]] * F1[J1[a]];
    for (std::size_t b = 0; b < J2.size(); ++b)
      A2(i, b) = ctx.kernel(i, J2[b]) * ctx.weights()[J2[b]] * F2[J2[b]];
  }
  parallel_for(0, J1.size(), [&](std::size_t a) {
    for (std::size_t b = 0; b < J2.size(); ++b)
      Mm(a, b) = eval_symbol(m, std::fabs(ctx.nodes()[J1[a]]), std::fabs(ctx.nodes()[J2[b]]));
  });
  Eigen::MatrixXcd T = A2 * Mm.transpose();
  const double c2 = ctx.c_kappa() * ctx.c_kappa();
  for (int i = 0; i < X; ++i) out[i] = c2 * A1.row(i).cwiseProduct(T.row(i)).sum();
  return out;
}

Samples apply_dunkl_multiplier(const DunklContext& ctx, const Symbol1D& mu, const Samples& f) {
  Samples F = transform_raw(ctx, f, Direction::Forward);
  for (int j = 0; j < ctx.size(); ++j) {
    cplx v = mu(std::fabs(ctx.nodes()[j]));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw NumericalError("multiplier '" + mu.name + "' is not finite on the frequency grid");
    F[j] *= v;
  }
  return transform_raw(ctx, F, Direction::Inverse);
}

DunklPFResult check_pf_dunkl(int k, const Samples& F1, const Samples& F2, const DunklContext& ctx,
                             double tol) {
  const int M = ctx.size();
  if (F1.size() != static_cast<std::size_t>(M) || F2.size() != static_cast<std::size_t>(M))
    throw ValidationError("frequency samples do not match the context nodes");
  double p1 = 0.0, p2 = 0.0;
  for (int j = 0; j < M; ++j) {
    p1 = std::max(p1, std::abs(F1[j]));
    p2 = std::max(p2, std::abs(F2[j]));
  }
  const double low = std::exp2(k - 2.0), b_lo = std::exp2(k - 1.0), b_hi = std::exp2(k + 1.0);
  for (int j = 0; j < M; ++j) {
    double xi = std::fabs(ctx.nodes()[j]);
    if (xi > low && std::abs(F1[j]) > 1e-12 * p1)
      throw ValidationError("first input is not supported in |xi| <= 2^{k-2}");
    if ((xi < b_lo || xi > b_hi) && std::abs(F2[j]) > 1e-12 * p2)
      throw ValidationError("second input is not supported in 2^{k-1} <= |xi| <= 2^{k+1}");
  }
  DunklPFResult res;
  if (p1 == 0.0 || p2 == 0.0) {
    res.pass = true;
    return res;
  }
  Samples f1 = transform_raw(ctx, F1, Direction::Inverse);
  Samples f2 = transform_raw(ctx, F2, Direction::Inverse);
  for (int i = 0; i < M; ++i) f1[i] *= f2[i];
  Samples G = transform_raw(ctx, f1, Direction::Forward);
  const double lo = std::exp2(k - 5.0), hi = std::exp2(k + 5.0);
  double leak = 0.0;
  for (int j = 0; j < M; ++j) {
    double e = ctx.weights()[j] * std::norm(G[j]);
    double xi = std::fabs(ctx.nodes()[j]);
    res.total_energy += e;
    if (xi < lo || xi > hi) leak += e;
  }
  res.leaked_energy = res.total_energy > 0.0 ? leak / res.total_energy : 0.0;
  res.pass = res.leaked_energy < tol;
  return res;
}

std::pair<Samples, Samples> random_band_pair(const DunklContext& ctx, int k, std::uint64_t seed,
                                             std::uint64_t stream) {
  Rng rng(seed, stream);
  cplx a[6];
  for (auto& c : a) c = rng.complex_normal();
  const double sc = std::exp2(-k);
  Samples F1(ctx.size()), F2(ctx.size());
  for (int j = 0; j < ctx.size(); ++j) {
    double xi = ctx.nodes()[j], t = sc * xi;
    F1[j] = cutoffs::phi0(8.0 * std::fabs(t)) * (a[0] + a[1] * t + a[2] * t * t);
    F2[j] = cutoffs::psi(std::fabs(t)) * (a[3] + a[4] * t + a[5] * t * t);
  }
  return {F1, F2};
}

double dunkl_leibniz_residual(const DunklContext& ctx, const Samples& f, const Samples& g) {
  Samples fg(f.size()), rhs(f.size());
  Samples df = dunkl_operator(ctx, f), dg = dunkl_operator(ctx, g);
  for (std::size_t i = 0; i < f.size(); ++i) fg[i] = f[i] * g[i];
  Samples dfg = dunkl_operator(ctx, fg);
  for (std::size_t i = 0; i < f.size(); ++i) rhs[i] = dfg[i] - (df[i] * g[i] + f[i] * dg[i]);
  double n = weighted_l2(ctx, dfg);
  return n == 0.0 ? weighted_l2(ctx, rhs) : weighted_l2(ctx, rhs) / n;
}

double dunkl_fractional_leibniz_ratio(const DunklContext& ctx, const Samples& f, const Samples& g,
                                      double s, double p, double p1, double p2) {
  if (!(s > 0.0)) throw ValidationError("Leibniz rule needs s > 0");
  Symbol1D mu;
  mu.name = "|xi|^(2s)";
  mu.evaluator = [s](double l) -> cplx { return std::pow(l, 2.0 * s); };
  Samples fg(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) fg[i] = f[i] * g[i];
  double lhs = weighted_lp(ctx, apply_dunkl_multiplier(ctx, mu, fg), p);
  double rhs = weighted_lp(ctx, apply_dunkl_multiplier(ctx, mu, f), p1) * weighted_lp(ctx, g, p2) +
               weighted_lp(ctx, apply_dunkl_multiplier(ctx, mu, g), p2) * weighted_lp(ctx, f, p1);
  if (!(rhs > 0.0)) throw ValidationError("degenerate right-hand side");
  return lhs / rhs;
}

std::string samples_to_json(const DunklContext& ctx, const Samples& f) {
  nlohmann::json j;
  j["R"] = ctx.R();
  j["M"] = ctx.size();
  j["kappa"] = ctx.kappa();
  j["c_kappa"] = ctx.c_kappa();
  auto arr = nlohmann::json::array();
  for (const auto& v : f) arr.push_back({v.real(), v.imag()});
  j["values"] = arr;
  return j.dump();
}

Samples read_samples_json(const std::string& path, const DunklContext& ctx) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read samples file " + path);
  try {
    nlohmann::json j;
    in >> j;
    if (std::fabs(j.at("R").get<double>() - ctx.R()) > 1e-12 || j.at("M").get<int>() != ctx.size())
      throw ValidationError("samples file R/M do not match the context");
    Samples s;
    for (const auto& e : j.at("values")) s.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
    if (s.size() != static_cast<std::size_t>(ctx.size()))
      throw ValidationError("samples file has the wrong number of values");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed samples file " + path + ": " + e.what());
  }
}

}  // namespace bispec
