#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace bispec {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

/// Bad input or violated precondition. The CLI maps it to exit code 1.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Non-finite value, failed convergence or similar. The CLI maps it to exit code 2.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

void set_num_threads(int n);
int num_threads();
void set_deterministic(bool on);
bool deterministic();

/// Runs fn(i) for i in [begin, end) on the worker pool. Each index is handled
/// by exactly one thread, so results written to slot i are reproducible.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn);

/// SplitMix64 mixing step; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seeded generator: stream (seed, stream_id) is fixed by the SplitMix64
/// mix of both values, so trials can be generated in any order.
class Rng {
public:
  Rng(std::uint64_t seed, std::uint64_t stream = 0);
  std::uint64_t next_u64();
  double uniform();                 // [0, 1)
  double uniform(double a, double b);
  double normal();                  // Box-Muller, standard normal
  cplx complex_normal();            // E|z|^2 = 1

private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

bool is_power_of_two(long n);

/// n-point Gauss-Legendre rule on [a, b].
void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w);

}  // namespace bispec
