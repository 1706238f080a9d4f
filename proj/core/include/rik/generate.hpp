#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "rik/measure.hpp"
#include "rik/majorization.hpp"
#include "rik/operators.hpp"

// Deterministic corpora for certification runs and property tests.  All
// randomness flows from one mt19937_64 engine; uniforms are drawn as
// (raw >> 11) * 2^-53 so streams are reproducible for a fixed seed on any
// platform.  "Dyadic" generators emit values k * 2^-10 and dyadic grids,
// which keeps the downstream piece arithmetic exact.

namespace rik {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t raw() { return eng_(); }
  double u01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
    return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(
                                              hi - lo + 1));
  }
  // k * 2^-10 with k in [0, hi * 2^10]
  double dyadic(double hi) {
    const int k = uniform_int(0, static_cast<int>(hi * 1024.0));
    return static_cast<double>(k) * 0x1.0p-10;
  }

 private:
  std::mt19937_64 eng_;
};

// Uniform grid of `cells` cells on [0,1) (cells need not be a power of
// two).  heavy=true draws head-heavy magnitudes (approximately t^-1/2
// shaped after sorting).
StepFunction random_grid_function(Rng& rng, int cells, bool nonneg,
                                  bool heavy);

// Dyadic grid of 2^level cells with dyadic values; exact piece arithmetic.
StepFunction random_dyadic_function(Rng& rng, int level, bool nonneg);

// The 2^k-step staircase x(t) = (i+1)/2^k on cell i, approximating t -> t.
StepFunction staircase(int log2_steps);

std::vector<double> random_dyadic_vector(Rng& rng, std::size_t n,
                                         bool nonneg);

// (f, g) with f < g exactly: f arises from g by a short chain of dyadic
// T-transforms, plus a dyadic contraction when `weak` (then total(f) <
// total(g) and both vectors are nonnegative).
std::pair<std::vector<double>, std::vector<double>> random_majorizing_pair(
    Rng& rng, std::size_t n, bool weak);

TransferMatrix random_substochastic_matrix(Rng& rng, std::size_t n,
                                           bool allow_shrink);

// Disjoint runs of dyadic base cells at the given level; when
// `nonempty_residual` at least one base cell is left out.
PartitionFamily random_partition_family(Rng& rng, MeasureSpace space,
                                        int level, int max_cells,
                                        bool nonempty_residual);

// Expression tree over a common dyadic grid; every interval boundary in
// the tree is a multiple of grid.width so composed grid nodes stay
// aligned.  depth 0 yields a leaf.
OperatorExpr random_operator_tree(Rng& rng, const Grid& grid, int depth);

// Substochastic operator acting inside one cell (for family combines).
OperatorExpr random_inner_operator(Rng& rng, const Interval& cell,
                                   double grid_width, MeasureSpace space);

// Probe functions supported on the grid (dyadic values; signed unless
// nonneg).
std::vector<StepFunction> random_probes(Rng& rng, const Grid& grid,
                                        std::size_t count, bool nonneg);

}  // namespace rik
