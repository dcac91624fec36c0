#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "bispec/util.hpp"

namespace bispec {

using Point = std::array<int, 2>;  // second coordinate is 0 when dim == 1

/// Finitely supported sequence on Z^d (d = 1 or 2). Entries are kept sorted
/// by lattice point, duplicates are summed and exact zeros are pruned.
class LatticeSequence {
public:
  using Entry = std::pair<Point, cplx>;

  LatticeSequence() = default;
  explicit LatticeSequence(int dim);
  LatticeSequence(int dim, std::vector<Entry> entries);

  static LatticeSequence delta(int dim, Point n = {0, 0}, cplx value = 1.0);

  int dim() const { return dim_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  cplx at(Point n) const;
  int support_radius() const;

private:
  int dim_ = 1;
  std::vector<Entry> entries_;
};

/// Dense samples on the torus (-1/2, 1/2]^d. Axis index j in [0, N) sits at
/// node -1/2 + (j+1)/N; storage is row-major (j1 * N + j2 for d = 2).
struct TorusGrid {
  int dim = 1;
  int N = 0;
  std::vector<cplx> values;

  TorusGrid() = default;
  TorusGrid(int dim, int N);
  std::size_t size() const { return values.size(); }
  static double node(int j, int N) { return -0.5 + static_cast<double>(j + 1) / N; }
  std::array<double, 2> xi(std::size_t flat) const;
};

/// True when every entry lies in the window [-N/2, N/2)^d, so the N-point
/// transform is exact and invertible. Implied by N > 2 * support_radius.
bool resolves(const LatticeSequence& f, int N);

TorusGrid torus_transform(const LatticeSequence& f, int N);
/// Inverse transform; output lives on the window [-N/2, N/2)^d.
LatticeSequence inverse_transform(const TorusGrid& g);

/// |Sin(xi)| = (4 sum_j sin^2(pi xi_j))^{1/2}.
double sin_symbol(const std::array<double, 2>& xi, int dim);
/// |Sin| at every node of an N-grid in d dimensions.
std::vector<double> sin_symbol_grid(int dim, int N);

double lp_norm(const LatticeSequence& f, double p);

LatticeSequence operator+(const LatticeSequence& a, const LatticeSequence& b);
LatticeSequence operator-(const LatticeSequence& a, const LatticeSequence& b);
LatticeSequence operator*(cplx c, const LatticeSequence& a);
/// Pointwise product.
LatticeSequence pointwise(const LatticeSequence& a, const LatticeSequence& b);
LatticeSequence abs_value(const LatticeSequence& a);
/// Keeps entries with |n_i| <= radius; returns the l2 mass removed.
LatticeSequence truncate(const LatticeSequence& a, int radius, double* removed_l2 = nullptr);

// Dense periodic arrays -------------------------------------------------------

/// Spatial samples on the window [-N/2, N/2)^d, index (n mod N) row-major.
std::vector<cplx> to_periodic(const LatticeSequence& f, int N);
LatticeSequence from_periodic(const std::vector<cplx>& a, int dim, int N);

/// Forward/inverse grid transforms on dense periodic arrays
/// (spatial array in, grid in node order out, and back).
std::vector<cplx> periodic_to_grid(const std::vector<cplx>& a, int dim, int N);
std::vector<cplx> grid_to_periodic(const std::vector<cplx>& g, int dim, int N);

// File formats -----------------------------------------------------------------

LatticeSequence read_sequence_json(const std::string& path);
std::string sequence_to_json(const LatticeSequence& f);
LatticeSequence sequence_from_json(const std::string& text);
std::string grid_to_csv(const TorusGrid& g);
/// Writes text to path via a temporary file and rename.
void write_atomic(const std::string& path, const std::string& text);

}  // namespace bispec
