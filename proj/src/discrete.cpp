#include "bispec/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bispec {

namespace {

int wrap(int n, int N) { return ((n % N) + N) % N; }

/// Grid index j of the node with DFT frequency q.
std::size_t grid_of_q(int q, int N) { return wrap(q - 1 + N / 2, N); }

}  // namespace

cplx boundary_value(const Symbol2D& m, double l1, double l2) {
  try {
    cplx v = m.evaluator(l1, l2);
    if (std::isfinite(v.real()) && std::isfinite(v.imag())) return v;
  } catch (const NumericalError&) {
  }
  return 0.0;
}

DiscreteMultiplierPlan::DiscreteMultiplierPlan(const Symbol2D& m, int dim, int N)
    : dim_(dim), N_(N), name_(m.name) {
  if (dim != 1 && dim != 2) throw ValidationError("dimension must be 1 or 2");
  if (!is_power_of_two(N)) throw ValidationError("grid size N must be a power of two");
  std::vector<double> lam = sin_symbol_grid(dim, N);  // grid order
  std::vector<double> distinct = lam;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  U_ = distinct.size();
  // DFT order: flat q index -> grid index -> lambda -> distinct index
  q_to_u_.resize(lam.size());
  for (std::size_t qf = 0; qf < lam.size(); ++qf) {
    std::size_t g;
    if (dim == 1) {
      g = grid_of_q(static_cast<int>(qf), N);
    } else {
      int qa = static_cast<int>(qf / N), qb = static_cast<int>(qf % N);
      g = grid_of_q(qa, N) * N + grid_of_q(qb, N);
    }
    q_to_u_[qf] = static_cast<std::uint32_t>(
        std::lower_bound(distinct.begin(), distinct.end(), lam[g]) - distinct.begin());
  }
  table_.resize(U_ * U_);
  parallel_for(0, U_, [&](std::size_t a) {
    for (std::size_t b = 0; b < U_; ++b) {
      double l1 = distinct[a], l2 = distinct[b];
      cplx v;
      if (l1 == 0.0 || l2 == 0.0) {
        v = boundary_value(m, l1, l2);
      } else {
        v = m.evaluator(l1, l2);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
          std::ostringstream os;
          os << "symbol '" << m.name << "' is not finite at spectral node pair (" << l1 << ", "
             << l2 << ")";
          throw NumericalError(os.str());
        }
      }
      table_[a * U_ + b] = v;
    }
  });
}

std::vector<cplx> DiscreteMultiplierPlan::apply_grid(const std::vector<cplx>& F1,
                                                     const std::vector<cplx>& F2) const {
  const int N = N_;
  const std::size_t total = F1.size();
  // Reorder to DFT index q so that xi1 + xi2 corresponds to q1 + q2 mod N.
  std::vector<cplx> A(total), B(total);
  if (dim_ == 1) {
    for (int q = 0; q < N; ++q) {
      A[q] = F1[grid_of_q(q, N)];
      B[q] = F2[grid_of_q(q, N)];
    }
  } else {
    for (int qa = 0; qa < N; ++qa)
      for (int qb = 0; qb < N; ++qb) {
        std::size_t g = grid_of_q(qa, N) * N + grid_of_q(qb, N);
        A[static_cast<std::size_t>(qa) * N + qb] = F1[g];
        B[static_cast<std::size_t>(qa) * N + qb] = F2[g];
      }
  }
  std::vector<cplx> G(total, 0.0);
  const double norm = 1.0 / static_cast<double>(total);
  const int mask = N - 1;
  const std::size_t U = U_;
  if (dim_ == 1) {
    parallel_for(0, N, [&](std::size_t qe) {
      cplx acc = 0.0;
      for (int q1 = 0; q1 < N; ++q1) {
        if (A[q1] == cplx(0.0)) continue;
        int q2 = (static_cast<int>(qe) - q1) & mask;
        acc += table_[q_to_u_[q1] * U + q_to_u_[q2]] * A[q1] * B[q2];
      }
      G[qe] = acc * norm;
    });
  } else {
    parallel_for(0, N, [&](std::size_t ea) {
      std::vector<cplx> row(N, 0.0);
      for (int a1 = 0; a1 < N; ++a1) {
        int a2 = (static_cast<int>(ea) - a1) & mask;
        const cplx* Arow = &A[static_cast<std::size_t>(a1) * N];
        const cplx* Brow = &B[static_cast<std::size_t>(a2) * N];
        const std::uint32_t* u1row = &q_to_u_[static_cast<std::size_t>(a1) * N];
        const std::uint32_t* u2row = &q_to_u_[static_cast<std::size_t>(a2) * N];
        for (int b1 = 0; b1 < N; ++b1) {
          cplx a = Arow[b1];
          if (a == cplx(0.0)) continue;
          const cplx* trow = &table_[static_cast<std::size_t>(u1row[b1]) * U];
          for (int eb = 0; eb < N; ++eb) {
            int b2 = (eb - b1) & mask;
            row[eb] += trow[u2row[b2]] * a * Brow[b2];
          }
        }
      }
      for (int eb = 0; eb < N; ++eb) G[ea * N + eb] = row[eb] * norm;
    });
  }
  // Back to grid order.
  std::vector<cplx> out(total);
  if (dim_ == 1) {
    for (int q = 0; q < N; ++q) out[grid_of_q(q, N)] = G[q];
  } else {
    for (int qa = 0; qa < N; ++qa)
      for (int qb = 0; qb < N; ++qb)
        out[grid_of_q(qa, N) * N + grid_of_q(qb, N)] = G[static_cast<std::size_t>(qa) * N + qb];
  }
  return out;
}

namespace {

double edge_fraction(const LatticeSequence& s, int N) {
  double total = 0.0, edge = 0.0;
  int cut = N / 2 - N / 8;
  for (auto& e : s.entries()) {
    double w = std::norm(e.second);
    total += w;
    if (std::max(std::abs(e.first[0]), std::abs(e.first[1])) >= cut) edge += w;
  }
  return total > 0 ? std::sqrt(edge / total) : 0.0;
}

}  // namespace

LatticeSequence bilinear_apply(const DiscreteMultiplierPlan& plan, const LatticeSequence& f1,
                               const LatticeSequence& f2, BilinearInfo* info) {
  if (f1.dim() != plan.dim() || f2.dim() != plan.dim())
    throw ValidationError("sequence dimension does not match the plan");
  const int N = plan.N();
  auto F1 = torus_transform(f1, N);
  auto F2 = torus_transform(f2, N);
  TorusGrid G(plan.dim(), N);
  G.values = plan.apply_grid(F1.values, F2.values);
  LatticeSequence out = inverse_transform(G);
  if (info) info->edge_mass = edge_fraction(out, N);
  return out;
}

LatticeSequence bilinear_apply(const Symbol2D& m, const LatticeSequence& f1,
                               const LatticeSequence& f2, int N, BilinearInfo* info) {
  if (f1.dim() != f2.dim()) throw ValidationError("dimension mismatch");
  // Resolution is checked before the symbol is tabulated.
  if (!resolves(f1, N) || !resolves(f2, N))
    throw ValidationError("grid N=" + std::to_string(N) + " does not resolve the inputs");
  DiscreteMultiplierPlan plan(m, f1.dim(), N);
  return bilinear_apply(plan, f1, f2, info);
}

void apply_linear_multiplier_grid(const Symbol1D& mu, std::vector<cplx>& F, int dim, int N) {
  std::vector<double> lam = sin_symbol_grid(dim, N);
  cplx at_zero = 0.0;
  bool zero_done = false;
  for (std::size_t i = 0; i < F.size(); ++i) {
    double l = lam[i];
    cplx v;
    if (l == 0.0) {
      if (!zero_done) {
        try {
          at_zero = mu.evaluator(0.0);
          if (!std::isfinite(at_zero.real()) || !std::isfinite(at_zero.imag())) at_zero = 0.0;
        } catch (const NumericalError&) {
          at_zero = 0.0;
        }
        zero_done = true;
      }
      v = at_zero;
    } else {
      v = mu.evaluator(l);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        std::ostringstream os;
        TorusGrid tmp(dim, N);
        auto xi = tmp.xi(i);
        os << "symbol '" << mu.name << "' is singular at grid node xi=(" << xi[0];
        if (dim == 2) os << ", " << xi[1];
        os << "), lambda=" << l;
        throw NumericalError(os.str());
      }
    }
    F[i] *= v;
  }
}

LatticeSequence apply_linear_multiplier(const Symbol1D& mu, const LatticeSequence& f, int N) {
  TorusGrid F = torus_transform(f, N);
  apply_linear_multiplier_grid(mu, F.values, f.dim(), N);
  return inverse_transform(F);
}

Symbol1D laplacian_power_symbol(cplx z) {
  if (z.real() < 0.0) throw ValidationError("fractional power requires Re z >= 0");
  Symbol1D mu;
  std::ostringstream os;
  os << "lambda^(2*(" << z.real() << "+" << z.imag() << "i))";
  mu.name = os.str();
  mu.evaluator = [z](double l) -> cplx {
    if (l == 0.0) return z == cplx(0.0) ? 1.0 : 0.0;
    if (z == cplx(0.0)) return 1.0;
    return std::exp(2.0 * z * std::log(l));
  };
  return mu;
}

LatticeSequence fractional_laplacian(const LatticeSequence& f, cplx z, int N) {
  return apply_linear_multiplier(laplacian_power_symbol(z), f, N);
}

std::vector<double> riesz_weights(int N) {
  // With F f(xi) = sum f(n) e^{2 pi i n xi}, the mode e^{2 pi i t n} sits at xi = -t.
  std::vector<double> w(N);
  for (int j = 0; j < N; ++j) {
    double xi = TorusGrid::node(j, N);
    if (xi == 0.0 || xi == 0.5) w[j] = 0.5;
    else w[j] = xi < 0.0 ? 1.0 : 0.0;
  }
  return w;
}

namespace {
LatticeSequence riesz_impl(const LatticeSequence& f, int N, bool complement) {
  if (f.dim() != 1) throw ValidationError("riesz projection is defined for d = 1 only");
  TorusGrid F = torus_transform(f, N);
  auto w = riesz_weights(N);
  for (int j = 0; j < N; ++j) F.values[j] *= complement ? 1.0 - w[j] : w[j];
  return inverse_transform(F);
}
}  // namespace

LatticeSequence riesz_projection(const LatticeSequence& f, int N) {
  return riesz_impl(f, N, false);
}

LatticeSequence riesz_complement(const LatticeSequence& f, int N) {
  return riesz_impl(f, N, true);
}

}  // namespace bispec
