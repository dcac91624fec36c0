#include "bispec/lattice.hpp"

#include <fftw3.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "json.hpp"

namespace bispec {

// LatticeSequence ------------------------------------------------------------

namespace {
void check_dim(int dim) {
  if (dim != 1 && dim != 2) throw ValidationError("dimension must be 1 or 2");
}
}  // namespace

LatticeSequence::LatticeSequence(int dim) : dim_(dim) { check_dim(dim); }

LatticeSequence::LatticeSequence(int dim, std::vector<Entry> entries) : dim_(dim) {
  check_dim(dim);
  if (dim == 1)
    for (auto& e : entries) e.first[1] = 0;
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.first < b.first; });
  for (auto& e : entries) {
    if (!entries_.empty() && entries_.back().first == e.first)
      entries_.back().second += e.second;
    else
      entries_.push_back(e);
  }
  std::erase_if(entries_, [](const Entry& e) { return e.second == cplx(0.0); });
}

LatticeSequence LatticeSequence::delta(int dim, Point n, cplx value) {
  return LatticeSequence(dim, {{n, value}});
}

cplx LatticeSequence::at(Point n) const {
  if (dim_ == 1) n[1] = 0;
  auto it = std::lower_bound(entries_.begin(), entries_.end(), n,
                             [](const Entry& e, const Point& p) { return e.first < p; });
  return (it != entries_.end() && it->first == n) ? it->second : cplx(0.0);
}

int LatticeSequence::support_radius() const {
  int r = 0;
  for (auto& e : entries_) r = std::max({r, std::abs(e.first[0]), std::abs(e.first[1])});
  return r;
}

// TorusGrid -------------------------------------------------------------------

TorusGrid::TorusGrid(int d, int n) : dim(d), N(n) {
  check_dim(d);
  if (!is_power_of_two(n)) throw ValidationError("grid size N must be a power of two");
  values.assign(d == 1 ? n : static_cast<std::size_t>(n) * n, 0.0);
}

std::array<double, 2> TorusGrid::xi(std::size_t flat) const {
  if (dim == 1) return {node(static_cast<int>(flat), N), 0.0};
  return {node(static_cast<int>(flat / N), N), node(static_cast<int>(flat % N), N)};
}

// FFT -------------------------------------------------------------------------

namespace {

std::mutex g_plan_mutex;
std::map<std::tuple<int, int, int>, fftw_plan> g_plans;

void fft_inplace(std::vector<cplx>& a, int dim, int N, int sign) {
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto key = std::make_tuple(dim, N, sign);
    auto it = g_plans.find(key);
    if (it == g_plans.end()) {
      std::vector<cplx> scratch(a.size());
      auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
      unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
      plan = dim == 1 ? fftw_plan_dft_1d(N, buf, buf, sign, flags)
                      : fftw_plan_dft_2d(N, N, buf, buf, sign, flags);
      g_plans[key] = plan;
    } else {
      plan = it->second;
    }
  }
  auto* p = reinterpret_cast<fftw_complex*>(a.data());
  fftw_execute_dft(plan, p, p);
}

int wrap(int n, int N) { return ((n % N) + N) % N; }

}  // namespace

bool resolves(const LatticeSequence& f, int N) {
  for (auto& e : f.entries())
    for (int i = 0; i < f.dim(); ++i)
      if (e.first[i] < -N / 2 || e.first[i] >= N / 2) return false;
  return true;
}

std::vector<cplx> to_periodic(const LatticeSequence& f, int N) {
  if (!is_power_of_two(N)) throw ValidationError("grid size N must be a power of two");
  if (!resolves(f, N))
    throw ValidationError("grid N=" + std::to_string(N) +
                          " does not resolve a sequence of support radius " +
                          std::to_string(f.support_radius()) + " (need N > 2*radius)");
  std::size_t total = f.dim() == 1 ? N : static_cast<std::size_t>(N) * N;
  std::vector<cplx> a(total, 0.0);
  for (auto& e : f.entries()) {
    std::size_t idx = f.dim() == 1 ? wrap(e.first[0], N)
                                   : static_cast<std::size_t>(wrap(e.first[0], N)) * N +
                                         wrap(e.first[1], N);
    a[idx] = e.second;
  }
  return a;
}

LatticeSequence from_periodic(const std::vector<cplx>& a, int dim, int N) {
  std::vector<LatticeSequence::Entry> out;
  out.reserve(a.size());
  if (dim == 1) {
    for (int n = -N / 2; n < N / 2; ++n) {
      cplx v = a[wrap(n, N)];
      if (v != cplx(0.0)) out.push_back({{n, 0}, v});
    }
  } else {
    for (int n1 = -N / 2; n1 < N / 2; ++n1)
      for (int n2 = -N / 2; n2 < N / 2; ++n2) {
        cplx v = a[static_cast<std::size_t>(wrap(n1, N)) * N + wrap(n2, N)];
        if (v != cplx(0.0)) out.push_back({{n1, n2}, v});
      }
  }
  return LatticeSequence(dim, std::move(out));
}

namespace {
// Grid index j <-> DFT frequency q = j + 1 - N/2 (mod N).
std::size_t grid_from_q(int q, int N) { return wrap(q - 1 + N / 2, N); }
std::size_t q_from_grid(int j, int N) { return wrap(j + 1 - N / 2, N); }
}  // namespace

std::vector<cplx> periodic_to_grid(const std::vector<cplx>& a, int dim, int N) {
  std::vector<cplx> y = a;
  fft_inplace(y, dim, N, FFTW_BACKWARD);  // sum_n a[n] e^{+2 pi i n q / N}
  std::vector<cplx> g(y.size());
  if (dim == 1) {
    for (int j = 0; j < N; ++j) g[j] = y[q_from_grid(j, N)];
  } else {
    for (int j1 = 0; j1 < N; ++j1)
      for (int j2 = 0; j2 < N; ++j2)
        g[static_cast<std::size_t>(j1) * N + j2] =
            y[q_from_grid(j1, N) * N + q_from_grid(j2, N)];
  }
  return g;
}

std::vector<cplx> grid_to_periodic(const std::vector<cplx>& g, int dim, int N) {
  std::vector<cplx> y(g.size());
  if (dim == 1) {
    for (int q = 0; q < N; ++q) y[q] = g[grid_from_q(q, N)];
  } else {
    for (int q1 = 0; q1 < N; ++q1)
      for (int q2 = 0; q2 < N; ++q2)
        y[static_cast<std::size_t>(q1) * N + q2] =
            g[grid_from_q(q1, N) * N + grid_from_q(q2, N)];
  }
  fft_inplace(y, dim, N, FFTW_FORWARD);
  double scale = 1.0 / static_cast<double>(y.size());
  for (auto& v : y) v *= scale;
  return y;
}

TorusGrid torus_transform(const LatticeSequence& f, int N) {
  TorusGrid g(f.dim(), N);
  g.values = periodic_to_grid(to_periodic(f, N), f.dim(), N);
  return g;
}

LatticeSequence inverse_transform(const TorusGrid& g) {
  return from_periodic(grid_to_periodic(g.values, g.dim, g.N), g.dim, g.N);
}

double sin_symbol(const std::array<double, 2>& xi, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) {
    double v = std::sin(kPi * xi[i]);
    s += 4.0 * v * v;
  }
  return std::sqrt(s);
}

std::vector<double> sin_symbol_grid(int dim, int N) {
  std::vector<double> axis(N);
  for (int j = 0; j < N; ++j) {
    double v = std::sin(kPi * TorusGrid::node(j, N));
    axis[j] = 4.0 * v * v;
  }
  if (dim == 1) {
    std::vector<double> out(N);
    for (int j = 0; j < N; ++j) out[j] = std::sqrt(axis[j]);
    return out;
  }
  std::vector<double> out(static_cast<std::size_t>(N) * N);
  for (int j1 = 0; j1 < N; ++j1)
    for (int j2 = 0; j2 < N; ++j2)
      out[static_cast<std::size_t>(j1) * N + j2] = std::sqrt(axis[j1] + axis[j2]);
  return out;
}

double lp_norm(const LatticeSequence& f, double p) {
  if (!(p > 0.0)) throw ValidationError("lp_norm requires p > 0");
  double mx = 0.0;
  for (auto& e : f.entries()) mx = std::max(mx, std::abs(e.second));
  if (std::isinf(p) || mx == 0.0) return mx;
  double acc = 0.0;
  for (auto& e : f.entries()) acc += std::pow(std::abs(e.second) / mx, p);
  return mx * std::pow(acc, 1.0 / p);
}

// Arithmetic ------------------------------------------------------------------

namespace {
LatticeSequence combine(const LatticeSequence& a, const LatticeSequence& b, double sb) {
  if (a.dim() != b.dim()) throw ValidationError("dimension mismatch");
  std::vector<LatticeSequence::Entry> out(a.entries());
  for (auto& e : b.entries()) out.push_back({e.first, sb * e.second});
  return LatticeSequence(a.dim(), std::move(out));
}
}  // namespace

LatticeSequence operator+(const LatticeSequence& a, const LatticeSequence& b) {
  return combine(a, b, 1.0);
}

LatticeSequence operator-(const LatticeSequence& a, const LatticeSequence& b) {
  return combine(a, b, -1.0);
}

LatticeSequence operator*(cplx c, const LatticeSequence& a) {
  std::vector<LatticeSequence::Entry> out(a.entries());
  for (auto& e : out) e.second *= c;
  return LatticeSequence(a.dim(), std::move(out));
}

LatticeSequence pointwise(const LatticeSequence& a, const LatticeSequence& b) {
  if (a.dim() != b.dim()) throw ValidationError("dimension mismatch");
  std::vector<LatticeSequence::Entry> out;
  auto ia = a.entries().begin(), ib = b.entries().begin();
  while (ia != a.entries().end() && ib != b.entries().end()) {
    if (ia->first < ib->first) ++ia;
    else if (ib->first < ia->first) ++ib;
    else {
      out.push_back({ia->first, ia->second * ib->second});
      ++ia;
      ++ib;
    }
  }
  return LatticeSequence(a.dim(), std::move(out));
}

LatticeSequence abs_value(const LatticeSequence& a) {
  std::vector<LatticeSequence::Entry> out(a.entries());
  for (auto& e : out) e.second = std::abs(e.second);
  return LatticeSequence(a.dim(), std::move(out));
}

LatticeSequence truncate(const LatticeSequence& a, int radius, double* removed_l2) {
  std::vector<LatticeSequence::Entry> kept;
  double removed = 0.0;
  for (auto& e : a.entries()) {
    if (std::abs(e.first[0]) <= radius && std::abs(e.first[1]) <= radius)
      kept.push_back(e);
    else
      removed += std::norm(e.second);
  }
  if (removed_l2) *removed_l2 = std::sqrt(removed);
  return LatticeSequence(a.dim(), std::move(kept));
}

// Files -------------------------------------------------------------------------

std::string sequence_to_json(const LatticeSequence& f) {
  nlohmann::json j;
  j["dim"] = f.dim();
  auto arr = nlohmann::json::array();
  for (auto& e : f.entries()) {
    auto row = nlohmann::json::array();
    row.push_back(e.first[0]);
    if (f.dim() == 2) row.push_back(e.first[1]);
    row.push_back(e.second.real());
    row.push_back(e.second.imag());
    arr.push_back(row);
  }
  j["entries"] = arr;
  return j.dump() + "\n";
}

LatticeSequence sequence_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("sequence file: invalid JSON: ") + e.what());
  }
  if (!j.contains("dim") || !j.contains("entries"))
    throw ValidationError("sequence file must contain 'dim' and 'entries'");
  int dim = j["dim"].get<int>();
  check_dim(dim);
  std::vector<LatticeSequence::Entry> out;
  for (auto& row : j["entries"]) {
    if (!row.is_array() || static_cast<int>(row.size()) != dim + 2)
      throw ValidationError("sequence entry must have dim + 2 numbers");
    Point n{row[0].get<int>(), dim == 2 ? row[1].get<int>() : 0};
    out.push_back({n, {row[dim].get<double>(), row[dim + 1].get<double>()}});
  }
  return LatticeSequence(dim, std::move(out));
}

LatticeSequence read_sequence_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open sequence file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return sequence_from_json(ss.str());
}

std::string grid_to_csv(const TorusGrid& g) {
  std::ostringstream os;
  os.precision(17);
  os << (g.dim == 1 ? "xi_1,re,im\n" : "xi_1,xi_2,re,im\n");
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    auto xi = g.xi(i);
    os << xi[0] << ',';
    if (g.dim == 2) os << xi[1] << ',';
    os << g.values[i].real() << ',' << g.values[i].imag() << '\n';
  }
  return os.str();
}

void write_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + tmp.string() + "'");
    out << text;
    if (!out) throw ValidationError("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

}  // namespace bispec
