#include "bispec/jacobi.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace bispec {

void gauss_jacobi(int n, double a, double b, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw ValidationError("gauss_jacobi needs n >= 1");
  if (!(a > -1.0 && b > -1.0)) throw ValidationError("gauss_jacobi needs a, b > -1");
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  const double ab = a + b;
  for (int i = 0; i < n; ++i) {
    double s = 2.0 * i + ab;
    T(i, i) = i == 0 ? (b - a) / (ab + 2.0) : (b * b - a * a) / (s * (s + 2.0));
    if (i + 1 < n) {
      int k = i + 1;
      double t = 2.0 * k + ab;
      double off = k == 1
                       ? 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab))
                       : 4.0 * k * (k + a) * (k + b) * (k + ab) / (t * t * (t + 1.0) * (t - 1.0));
      T(i, i + 1) = T(i + 1, i) = std::sqrt(off);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  if (es.info() != Eigen::Success) throw NumericalError("Golub-Welsch eigenproblem failed");
  double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                        std::lgamma(ab + 2.0));
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    x[i] = es.eigenvalues()(i);
    double v = es.eigenvectors()(0, i);
    w[i] = mu0 * v * v;
  }
}

double jacobi_classical(int n, double a, double b, double x) {
  if (n == 0) return 1.0;
  double p0 = 1.0;
  double p1 = (a + 1.0) + 0.5 * (a + b + 2.0) * (x - 1.0);
  for (int k = 2; k <= n; ++k) {
    double s = 2.0 * k + a + b;
    double c0 = 2.0 * k * (k + a + b) * (s - 2.0);
    double c1 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
    double c2 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * s;
    double p2 = (c1 * p1 - c2 * p0) / c0;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

JacobiBasis::JacobiBasis(double alpha, double beta, int n_max, int quad_size)
    : alpha_(alpha), beta_(beta), gamma_((alpha + beta + 1.0) / 2.0), n_max_(n_max) {
  if (!(alpha > -0.5 && beta > -0.5)) throw ValidationError("Jacobi basis needs alpha, beta > -1/2");
  if (n_max < 0) throw ValidationError("n_max must be >= 0");
  int q = quad_size > 0 ? quad_size : 2 * n_max + 8;
  if (q < n_max + 1) throw ValidationError("quadrature too small for the basis");
  mass_ = std::exp(std::lgamma(alpha + 1.0) + std::lgamma(beta + 1.0) - std::lgamma(alpha + beta + 2.0));
  norm_.resize(n_max + 1);
  for (int n = 0; n <= n_max; ++n) norm_[n] = 1.0 / std::sqrt(classical_norm_sq(n));
  std::vector<double> x, w;
  gauss_jacobi(q, alpha, beta, x, w);
  theta_.resize(q);
  weight_.resize(q);
  const double scale = std::exp2(-alpha - beta - 1.0);
  for (int i = 0; i < q; ++i) {
    theta_[i] = std::acos(x[i]);
    weight_[i] = w[i] * scale;
  }
  table_.resize(static_cast<std::size_t>(n_max + 1) * q);
  parallel_for(0, q, [&](std::size_t i) {
    auto v = eval_all(theta_[i]);
    for (int n = 0; n <= n_max_; ++n) table_[static_cast<std::size_t>(n) * q + i] = v[n];
  });
}

double JacobiBasis::classical_norm_sq(int n) const {
  const double a = alpha_, b = beta_;
  return std::exp(std::lgamma(n + a + 1.0) + std::lgamma(n + b + 1.0) -
                  std::lgamma(n + a + b + 1.0) - std::lgamma(n + 1.0)) /
         (2.0 * n + a + b + 1.0);
}

double JacobiBasis::eval(int n, double theta) const {
  if (n < 0 || n > n_max_) throw ValidationError("degree outside the basis");
  return norm_[n] * jacobi_classical(n, alpha_, beta_, std::cos(theta));
}

std::vector<double> JacobiBasis::eval_all(double theta) const {
  const double a = alpha_, b = beta_, x = std::cos(theta);
  std::vector<double> v(n_max_ + 1);
  double p0 = 1.0, p1 = (a + 1.0) + 0.5 * (a + b + 2.0) * (x - 1.0);
  v[0] = norm_[0];
  if (n_max_ >= 1) v[1] = norm_[1] * p1;
  for (int k = 2; k <= n_max_; ++k) {
    double s = 2.0 * k + a + b;
    double p2 = ((s - 1.0) * (s * (s - 2.0) * x + a * a - b * b) * p1 -
                 2.0 * (k + a - 1.0) * (k + b - 1.0) * s * p0) /
                (2.0 * k * (k + a + b) * (s - 2.0));
    p0 = p1;
    p1 = p2;
    v[k] = norm_[k] * p2;
  }
  return v;
}

SpectralCoefficients analyze(const JacobiBasis& basis, const std::vector<cplx>& samples) {
  const std::size_t q = basis.nodes().size();
  if (samples.size() != q) throw ValidationError("samples must be given at the quadrature nodes");
  SpectralCoefficients c;
  c.alpha = basis.alpha();
  c.beta = basis.beta();
  c.coeffs.assign(basis.n_max() + 1, 0.0);
  for (int n = 0; n <= basis.n_max(); ++n) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < q; ++i) s += basis.weights()[i] * basis.table(n, i) * samples[i];
    c.coeffs[n] = s;
  }
  return c;
}

namespace {
void check_degree(const JacobiBasis& basis, const SpectralCoefficients& c) {
  if (static_cast<int>(c.coeffs.size()) > basis.n_max() + 1)
    throw ValidationError("coefficient vector exceeds the basis degree");
}
}  // namespace

std::vector<cplx> synthesize(const JacobiBasis& basis, const SpectralCoefficients& c,
                             const std::vector<double>& theta) {
  check_degree(basis, c);
  std::vector<cplx> out(theta.size());
  parallel_for(0, theta.size(), [&](std::size_t i) {
    auto v = basis.eval_all(theta[i]);
    cplx s = 0.0;
    for (std::size_t n = 0; n < c.coeffs.size(); ++n) s += c.coeffs[n] * v[n];
    out[i] = s;
  });
  return out;
}

std::vector<cplx> synthesize_nodes(const JacobiBasis& basis, const SpectralCoefficients& c) {
  check_degree(basis, c);
  const std::size_t q = basis.nodes().size();
  std::vector<cplx> out(q, 0.0);
  for (std::size_t n = 0; n < c.coeffs.size(); ++n)
    for (std::size_t i = 0; i < q; ++i) out[i] += c.coeffs[n] * basis.table(static_cast<int>(n), i);
  return out;
}

SpectralCoefficients apply_J_multiplier(const JacobiBasis& basis, const Symbol1D& mu,
                                        const SpectralCoefficients& c) {
  check_degree(basis, c);
  SpectralCoefficients out = c;
  for (std::size_t n = 0; n < c.coeffs.size(); ++n) {
    cplx v = mu(n + basis.gamma());
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw NumericalError("multiplier '" + mu.name + "' is not finite at n = " + std::to_string(n));
    out.coeffs[n] *= v;
  }
  return out;
}

std::vector<cplx> bilinear_jacobi(const JacobiBasis& basis, const Symbol2D& m,
                                  const SpectralCoefficients& c1, const SpectralCoefficients& c2,
                                  const std::vector<double>& theta) {
  check_degree(basis, c1);
  check_degree(basis, c2);
  const std::size_t n1 = c1.coeffs.size(), n2 = c2.coeffs.size();
  const double g = basis.gamma();
  std::vector<cplx> M(n1 * n2);
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) M[i * n2 + j] = eval_symbol(m, i + g, j + g);
  std::vector<cplx> out(theta.size());
  parallel_for(0, theta.size(), [&](std::size_t t) {
    auto v = basis.eval_all(theta[t]);
    cplx s = 0.0;
    for (std::size_t i = 0; i < n1; ++i) {
      cplx u = c1.coeffs[i] * v[i];
      if (u == cplx(0.0)) continue;
      cplx inner = 0.0;
      for (std::size_t j = 0; j < n2; ++j) inner += M[i * n2 + j] * c2.coeffs[j] * v[j];
      s += u * inner;
    }
    out[t] = s;
  });
  return out;
}

std::vector<double> linearization_coeffs(const JacobiBasis& basis, int n1, int n2) {
  if (n1 < 0 || n2 < 0) throw ValidationError("degrees must be nonnegative");
  if (n1 + n2 > basis.n_max()) throw ValidationError("n1 + n2 exceeds the basis degree");
  const std::size_t q = basis.nodes().size();
  if (2 * static_cast<int>(q) - 1 < n1 + n2 + basis.n_max())
    throw ValidationError("quadrature is not exact for the product integrals");
  std::vector<double> c(basis.n_max() + 1, 0.0);
  for (int j = 0; j <= basis.n_max(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < q; ++i)
      s += basis.weights()[i] * basis.table(n1, i) * basis.table(n2, i) * basis.table(j, i);
    c[j] = s;
  }
  return c;
}

JacobiPFResult check_pf_jacobi(int k, const SpectralCoefficients& c1,
                               const SpectralCoefficients& c2, const JacobiBasis& basis,
                               double tol) {
  check_degree(basis, c1);
  check_degree(basis, c2);
  const double g = basis.gamma();
  const double lo_top = std::exp2(k - 3.0), b_lo = std::exp2(k - 1.0), b_hi = std::exp2(k + 1.0);
  int deg1 = -1, deg2 = -1;
  for (std::size_t n = 0; n < c1.coeffs.size(); ++n)
    if (c1.coeffs[n] != cplx(0.0)) {
      if (n + g > lo_top) throw ValidationError("c1 is not supported in n + gamma <= 2^{k-3}");
      deg1 = static_cast<int>(n);
    }
  for (std::size_t n = 0; n < c2.coeffs.size(); ++n)
    if (c2.coeffs[n] != cplx(0.0)) {
      if (n + g < b_lo || n + g > b_hi)
        throw ValidationError("c2 is not supported in 2^{k-1} <= n + gamma <= 2^{k+1}");
      deg2 = static_cast<int>(n);
    }
  JacobiPFResult res;
  if (deg1 < 0 || deg2 < 0) {
    res.pass = true;
    return res;
  }
  if (deg1 + deg2 > basis.n_max()) throw ValidationError("basis degree too small for the product");
  std::vector<cplx> d(basis.n_max() + 1, 0.0);
  for (int a = 0; a <= deg1; ++a) {
    if (c1.coeffs[a] == cplx(0.0)) continue;
    for (int b = 0; b <= deg2; ++b) {
      if (c2.coeffs[b] == cplx(0.0)) continue;
      auto L = linearization_coeffs(basis, a, b);
      cplx w = c1.coeffs[a] * c2.coeffs[b];
      for (std::size_t j = 0; j < L.size(); ++j) d[j] += w * L[j];
    }
  }
  const double lo = std::exp2(k - 2.0), hi = std::exp2(k + 2.0);
  double leak = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) {
    double e = std::norm(d[j]);
    res.total_energy += e;
    if (j + g < lo || j + g > hi) leak += e;
  }
  res.leaked_energy = res.total_energy > 0.0 ? leak / res.total_energy : 0.0;
  res.pass = res.leaked_energy < tol;
  return res;
}

int pf_degree_needed(double gamma, int k) {
  int n = static_cast<int>(std::floor(std::exp2(k - 3.0) - gamma) +
                           std::floor(std::exp2(k + 1.0) - gamma)) + 1;
  return std::max(n, 0);
}

std::pair<SpectralCoefficients, SpectralCoefficients> random_pf_pair(const JacobiBasis& basis, int k,
                                                                     std::uint64_t seed,
                                                                     std::uint64_t stream) {
  Rng rng(seed, stream);
  const double g = basis.gamma();
  SpectralCoefficients c1, c2;
  c1.alpha = c2.alpha = basis.alpha();
  c1.beta = c2.beta = basis.beta();
  c1.coeffs.assign(basis.n_max() + 1, 0.0);
  c2.coeffs.assign(basis.n_max() + 1, 0.0);
  for (int n = 0; n <= basis.n_max(); ++n) {
    if (n + g <= std::exp2(k - 3.0)) c1.coeffs[n] = rng.complex_normal();
    if (n + g >= std::exp2(k - 1.0) && n + g <= std::exp2(k + 1.0)) c2.coeffs[n] = rng.complex_normal();
  }
  return {c1, c2};
}

double apply_J_fd(const std::function<double(double)>& f, double alpha, double beta, double theta,
                  double h) {
  static const double d1[] = {1.0 / 280, -4.0 / 105, 1.0 / 5, -4.0 / 5, 0.0,
                              4.0 / 5,   -1.0 / 5,    4.0 / 105, -1.0 / 280};
  static const double d2[] = {-1.0 / 560, 8.0 / 315, -1.0 / 5, 8.0 / 5, -205.0 / 72,
                              8.0 / 5,    -1.0 / 5,  8.0 / 315, -1.0 / 560};
  double f1 = 0.0, f2 = 0.0, f0 = 0.0;
  for (int i = -4; i <= 4; ++i) {
    double v = f(theta + i * h);
    if (i == 0) f0 = v;
    f1 += d1[i + 4] * v;
    f2 += d2[i + 4] * v;
  }
  f1 /= h;
  f2 /= h * h;
  double g = (alpha + beta + 1.0) / 2.0;
  return -f2 - (alpha - beta + (alpha + beta + 1.0) * std::cos(theta)) / std::sin(theta) * f1 +
         g * g * f0;
}

SpectralCoefficients read_coefficients_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read coefficient file " + path);
  nlohmann::json j;
  try {
    in >> j;
    SpectralCoefficients c;
    c.alpha = j.at("alpha").get<double>();
    c.beta = j.at("beta").get<double>();
    for (const auto& e : j.at("coeffs")) {
      if (!e.is_array() || e.size() != 2) throw ValidationError("coefficient entries must be [re, im]");
      c.coeffs.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed coefficient file " + path + ": " + e.what());
  }
}

std::string coefficients_to_json(const SpectralCoefficients& c) {
  nlohmann::json j;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  auto arr = nlohmann::json::array();
  for (const auto& v : c.coeffs) arr.push_back({v.real(), v.imag()});
  j["coeffs"] = arr;
  return j.dump();
}

}  // namespace bispec
