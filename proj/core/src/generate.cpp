#include "rik/generate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rik {

StepFunction random_grid_function(Rng& rng, int cells, bool nonneg,
                                  bool heavy) {
  if (cells < 1) throw std::invalid_argument("random_grid_function: cells");
  std::vector<double> v(static_cast<std::size_t>(cells));
  for (double& x : v) {
    double mag;
    if (heavy) {
      const double u = rng.u01();
      mag = 1.0 / std::sqrt(u + 1e-4);  // occasional large head values
    } else {
      mag = 8.0 * rng.u01();
    }
    x = (!nonneg && rng.u01() < 0.5) ? -mag : mag;
  }
  return StepFunction::on_grid(unit_space, v,
                               1.0 / static_cast<double>(cells));
}

StepFunction random_dyadic_function(Rng& rng, int level, bool nonneg) {
  const int cells = 1 << level;
  std::vector<double> v(static_cast<std::size_t>(cells));
  for (double& x : v) {
    double mag = rng.dyadic(8.0);
    x = (!nonneg && rng.u01() < 0.5) ? -mag : mag;
  }
  return StepFunction::on_grid(unit_space, v, std::ldexp(1.0, -level));
}

StepFunction staircase(int log2_steps) {
  const int n = 1 << log2_steps;
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    v[static_cast<std::size_t>(i)] =
        static_cast<double>(i + 1) / static_cast<double>(n);
  return StepFunction::on_grid(unit_space, v, std::ldexp(1.0, -log2_steps));
}

std::vector<double> random_dyadic_vector(Rng& rng, std::size_t n,
                                         bool nonneg) {
  std::vector<double> v(n);
  for (double& x : v) {
    x = rng.dyadic(4.0);
    if (!nonneg && rng.u01() < 0.5) x = -x;
  }
  return v;
}

std::pair<std::vector<double>, std::vector<double>> random_majorizing_pair(
    Rng& rng, std::size_t n, bool weak) {
  std::vector<double> g = random_dyadic_vector(rng, n, /*nonneg=*/true);
  std::vector<double> f = g;
  if (n >= 2) {
    const int moves = rng.uniform_int(1, static_cast<int>(std::min<std::size_t>(
                                             8, n - 1)));
    for (int m = 0; m < moves; ++m) {
      std::size_t i = static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<int>(n) - 1));
      std::size_t j = static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<int>(n) - 1));
      if (i == j) continue;
      // lambda in {1/4, 1/2, 3/4}: two extra mantissa bits per move.
      const double lambda = 0.25 * rng.uniform_int(1, 3);
      const double fi = f[i], fj = f[j];
      f[i] = lambda * fi + (1.0 - lambda) * fj;
      f[j] = (1.0 - lambda) * fi + lambda * fj;
    }
  }
  if (weak) {
    const double c = static_cast<double>(rng.uniform_int(8, 15)) / 16.0;
    for (double& x : f) x *= c;
  }
  return {std::move(f), std::move(g)};
}

TransferMatrix random_substochastic_matrix(Rng& rng, std::size_t n,
                                           bool allow_shrink) {
  TransferMatrix m = TransferMatrix::identity(n);
  const int moves = rng.uniform_int(1, static_cast<int>(n));
  for (int k = 0; k < moves && n >= 2; ++k) {
    std::size_t i = static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<int>(n) - 1));
    std::size_t j = static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<int>(n) - 1));
    if (i == j) continue;
    m.apply_t_transform_left(i, j, rng.u01());
  }
  bool shrunk = false;
  if (allow_shrink && rng.u01() < 0.5) {
    shrunk = true;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = 0.5 + 0.5 * rng.u01();
      for (std::size_t j = 0; j < n; ++j) m.at(i, j) *= s;
    }
  }
  if (!shrunk) return m;
  TransferMatrix out(n, MatrixKind::doubly_substochastic);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out.at(i, j) = m(i, j);
  return out;
}

PartitionFamily random_partition_family(Rng& rng, MeasureSpace space,
                                        int level, int max_cells,
                                        bool nonempty_residual) {
  const int base = 1 << level;
  const double w = std::ldexp(1.0, -level);
  std::vector<Interval> cells;
  int k = 0;
  bool skipped = false;
  while (k < base && static_cast<int>(cells.size()) < max_cells) {
    if (rng.u01() < 0.3) {  // leave this base cell to the residual
      skipped = true;
      ++k;
      continue;
    }
    const int run = std::min(rng.uniform_int(1, 4), base - k);
    cells.push_back({static_cast<double>(k) * w,
                     static_cast<double>(k + run) * w});
    k += run;
  }
  if (cells.empty())
    cells.push_back({0.0, w});
  if (nonempty_residual && !skipped && k >= base) {
    // Drop the last cell into the residual.
    if (cells.size() > 1) cells.pop_back();
    else cells.back().hi = cells.back().lo + w;  // shrink to one base cell
  }
  return PartitionFamily(space, std::move(cells));
}

OperatorExpr random_inner_operator(Rng& rng, const Interval& cell,
                                   double grid_width, MeasureSpace space) {
  const int pick = rng.uniform_int(0, 3);
  if (pick == 0) return OperatorExpr::identity();
  if (pick == 1) {
    return OperatorExpr::partition_average(
        PartitionFamily(space, {cell}), /*keep_residual=*/true);
  }
  const int blocks = static_cast<int>(std::llround(cell.length() / grid_width));
  if (pick == 2 && blocks >= 2) {
    std::vector<int> perm(static_cast<std::size_t>(blocks));
    for (int i = 0; i < blocks; ++i)
      perm[static_cast<std::size_t>(i)] = i;
    for (int i = blocks - 1; i > 0; --i)
      std::swap(perm[static_cast<std::size_t>(i)],
                perm[static_cast<std::size_t>(rng.uniform_int(0, i))]);
    return OperatorExpr::measure_preserve(cell.lo, grid_width, std::move(perm));
  }
  return OperatorExpr::convex_combine(
      {OperatorExpr::identity(),
       OperatorExpr::partition_average(PartitionFamily(space, {cell}), true)},
      {0.5, 0.5});
}

namespace {

std::vector<int> random_permutation(Rng& rng, int n) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i)
    std::swap(perm[static_cast<std::size_t>(i)],
              perm[static_cast<std::size_t>(rng.uniform_int(0, i))]);
  return perm;
}

OperatorExpr random_leaf(Rng& rng, const Grid& grid) {
  const MeasureSpace space = unit_space;
  const int level = static_cast<int>(std::llround(std::log2(grid.cells)));
  switch (rng.uniform_int(0, 5)) {
    case 0:
      return OperatorExpr::identity();
    case 1:
      return OperatorExpr::partition_average(
          random_partition_family(rng, space, std::min(level, 5), 64,
                                  rng.u01() < 0.5),
          rng.u01() < 0.5);
    case 2: {
      // Block exchange over a grid-aligned window.
      const int blocks = std::min(grid.cells, 1 << rng.uniform_int(1, 3));
      const int start = rng.uniform_int(0, grid.cells - blocks);
      return OperatorExpr::measure_preserve(
          static_cast<double>(start) * grid.width, grid.width,
          random_permutation(rng, blocks));
    }
    case 3:
      return OperatorExpr::discrete_matrix(
          random_substochastic_matrix(
              rng, static_cast<std::size_t>(grid.cells), true),
          grid);
    case 4:
      return OperatorExpr::cell_permutation(
          random_permutation(rng, grid.cells), grid);
    default: {
      std::vector<double> w(static_cast<std::size_t>(grid.cells));
      double s = 0.0;
      for (double& x : w) {
        x = rng.u01() + 1e-3;
        s += x;
      }
      for (double& x : w) x /= s;
      // Repair the normalization residue on the largest weight.
      double total = 0.0;
      for (double x : w) total += x;
      auto it = std::ranges::max_element(w);
      *it += 1.0 - total;
      return OperatorExpr::circulant(std::move(w), grid);
    }
  }
}

}  // namespace

OperatorExpr random_operator_tree(Rng& rng, const Grid& grid, int depth) {
  if (grid.cells < 4)
    throw std::invalid_argument("random_operator_tree: need >= 4 grid cells");
  if (depth <= 0) return random_leaf(rng, grid);
  const MeasureSpace space = unit_space;
  const int glevel = static_cast<int>(std::llround(std::log2(grid.cells)));
  switch (rng.uniform_int(0, 4)) {
    case 0: {  // convex combination, occasionally strict (< 1 total)
      const int k = rng.uniform_int(2, 3);
      std::vector<OperatorExpr> children;
      std::vector<double> weights;
      double budget = rng.u01() < 0.3 ? 0.5 + 0.5 * rng.u01() : 1.0;
      double used = 0.0;
      for (int i = 0; i < k; ++i) {
        children.push_back(random_operator_tree(rng, grid, depth - 1));
        const double w = (i + 1 == k) ? budget - used
                                      : (budget - used) * rng.u01();
        weights.push_back(w);
        used += w;
      }
      return OperatorExpr::convex_combine(std::move(children),
                                          std::move(weights));
    }
    case 1: {
      const int k = rng.uniform_int(2, 3);
      std::vector<OperatorExpr> children;
      for (int i = 0; i < k; ++i)
        children.push_back(random_operator_tree(rng, grid, depth - 1));
      return OperatorExpr::compose(std::move(children));
    }
    case 2: {
      PartitionFamily fam = random_partition_family(
          rng, space, rng.uniform_int(2, std::min(4, glevel)), 16, true);
      std::vector<OperatorExpr> inner;
      for (const Interval& cell : fam.cells())
        inner.push_back(random_inner_operator(rng, cell, grid.width, space));
      return OperatorExpr::family_combine(std::move(fam), std::move(inner));
    }
    case 3: {
      PartitionFamily fam = random_partition_family(
          rng, space, rng.uniform_int(2, std::min(5, glevel)), 64,
          rng.u01() < 0.5);
      const auto base = OperatorExpr::partition_average(fam, rng.u01() < 0.5);
      const int rank =
          rng.uniform_int(0, static_cast<int>(fam.cells().size()));
      // Keep the residual window grid aligned for downstream grid nodes.
      const double horizon =
          static_cast<double>(rng.uniform_int(0, grid.cells)) * grid.width;
      return OperatorExpr::finite_rank_truncate(base, horizon, rank);
    }
    default:
      return random_leaf(rng, grid);
  }
}

std::vector<StepFunction> random_probes(Rng& rng, const Grid& grid,
                                        std::size_t count, bool nonneg) {
  std::vector<StepFunction> probes;
  probes.reserve(count);
  const int level = static_cast<int>(std::llround(std::log2(grid.cells)));
  for (std::size_t i = 0; i < count; ++i) {
    if (i == 0) {
      probes.push_back(StepFunction::constant(unit_space, 1.0));
    } else if (i == 1) {
      probes.push_back(
          StepFunction::indicator(unit_space, 0.0, grid.width, 1.0));
    } else {
      probes.push_back(random_dyadic_function(rng, level, nonneg));
    }
  }
  return probes;
}

}  // namespace rik
