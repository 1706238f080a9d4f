#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rik/majorization.hpp"
#include "rik/measure.hpp"
#include "rik/spaces.hpp"

// Closed algebra of substochastic operators on step functions.  Every leaf
// is substochastic by construction and the algebra is closed under convex
// combination and composition, so every expression tree is substochastic;
// certify_substochastic re-checks that property on probe functions.

namespace rik {

// Uniform grid of `cells` cells of width `width` starting at 0.
struct Grid {
  int cells = 0;
  double width = 0.0;

  double span() const { return static_cast<double>(cells) * width; }
  bool operator==(const Grid&) const = default;
};

// Finitely many pairwise disjoint intervals of positive finite length,
// sorted by left endpoint; the residual is I minus their union.  A family
// may point at the coarser family it refines, in which case every parent
// cell must be exactly tiled by cells of this family.
class PartitionFamily {
 public:
  PartitionFamily(MeasureSpace space, std::vector<Interval> cells,
                  std::shared_ptr<const PartitionFamily> parent = nullptr);

  const MeasureSpace& space() const { return space_; }
  std::span<const Interval> cells() const { return cells_; }
  const std::shared_ptr<const PartitionFamily>& parent() const {
    return parent_;
  }

  double mesh() const;            // sup over cells of the length
  double covered_length() const;  // total length of the union
  // Measure of the residual; +inf on the half line.
  double residual_measure() const;

 private:
  MeasureSpace space_;
  std::vector<Interval> cells_;
  std::shared_ptr<const PartitionFamily> parent_;
};

class OperatorExpr {
 public:
  struct Identity {};
  // x restricted to the residual (kept or dropped) plus the cell averages:
  // keep_residual selects between the residual-preserving and the
  // averages-only form.
  struct PartitionAverage {
    PartitionFamily family;
    bool keep_residual = true;
  };
  // x on the residual plus inner_j applied to x|cell_j, restricted back to
  // cell_j.
  struct FamilyCombine {
    PartitionFamily family;
    std::vector<OperatorExpr> inner;
  };
  // Interval exchange: `blocks` equal-width blocks starting at `lo` are
  // permuted; (Tx)(t) = x(sigma(t)) with sigma translating block i onto
  // block perm[i].
  struct MeasurePreserve {
    double lo = 0.0;
    double block_width = 0.0;
    std::vector<int> perm;
  };
  struct DiscreteMatrix {
    TransferMatrix matrix;
    Grid grid;
  };
  // Cell permutation of grid values: (Tx)_k = x_{perm[k]}.
  struct CellPermutation {
    std::vector<int> perm;
    Grid grid;
  };
  // Circular convolution with a probability vector: out_i = sum_j
  // weights[(i - j) mod n] * x_j.
  struct CirculantKernel {
    std::vector<double> weights;
    Grid grid;
  };
  struct ConvexCombine {
    std::vector<OperatorExpr> children;
    std::vector<double> weights;  // nonnegative, sum <= 1
  };
  struct Compose {
    std::vector<OperatorExpr> children;  // applied right to left
  };
  // Finite-rank truncation of a partition average: only the first `rank`
  // cells are averaged and the residual is additionally cut to [0, horizon].
  struct FiniteRankTruncate {
    PartitionFamily family;
    bool keep_residual = true;
    double horizon = 0.0;
    int rank = 0;
  };

  using Node = std::variant<Identity, PartitionAverage, FamilyCombine,
                            MeasurePreserve, DiscreteMatrix, CellPermutation,
                            CirculantKernel, ConvexCombine, Compose,
                            FiniteRankTruncate>;

  static OperatorExpr identity();
  static OperatorExpr partition_average(PartitionFamily family,
                                        bool keep_residual = true);
  static OperatorExpr family_combine(PartitionFamily family,
                                     std::vector<OperatorExpr> inner);
  static OperatorExpr measure_preserve(double lo, double block_width,
                                       std::vector<int> perm);
  static OperatorExpr discrete_matrix(TransferMatrix matrix, Grid grid);
  static OperatorExpr cell_permutation(std::vector<int> perm, Grid grid);
  static OperatorExpr circulant(std::vector<double> weights, Grid grid);
  static OperatorExpr convex_combine(std::vector<OperatorExpr> children,
                                     std::vector<double> weights);
  static OperatorExpr compose(std::vector<OperatorExpr> children);
  static OperatorExpr finite_rank_truncate(const OperatorExpr& base,
                                           double horizon, int rank);

  const Node& node() const { return *node_; }
  std::string kind_name() const;

 private:
  explicit OperatorExpr(Node n);
  std::shared_ptr<const Node> node_;
};

StepFunction apply(const OperatorExpr& op, const StepFunction& x);

// --- certification -------------------------------------------------------------

struct CertFailure {
  std::size_t probe_index;
  std::string check;  // "hlp", "l1", "linf", "positivity"
  double margin;
  std::optional<double> witness_t;
};

struct SubstochasticCertificate {
  bool ok = true;
  std::size_t probes_checked = 0;
  double tol = 0.0;
  double worst_margin = 0.0;
  std::vector<CertFailure> failures;
};

// Checks, for every probe x: apply(op,x) < x, the L1 and sup norms do not
// grow, and nonnegative probes stay nonnegative.  Failures are recorded,
// not thrown.
SubstochasticCertificate certify_substochastic(
    const OperatorExpr& op, std::span<const StepFunction> probes, double tol);

// --- partition sequences ---------------------------------------------------------

enum class AveragingKind { with_residual, averages_only };

// Yields the family at each level; families must refine their parent.
using PartitionGenerator = std::vector<Interval> (*)(int level,
                                                     MeasureSpace space);

// Dyadic default: level n tiles [0, min(2^n, alpha)) with cells of width
// 2^-n, so the mesh halves every level.
std::vector<Interval> dyadic_cells(int level, MeasureSpace space);

// S_1..S_levels (or the residual-dropping H_1..H_levels).
std::vector<OperatorExpr> build_partition_sequence(
    AveragingKind kind, int levels, MeasureSpace space,
    PartitionGenerator generator = dyadic_cells);

// --- power iteration --------------------------------------------------------------

struct PowerIterationStep {
  int k = 0;
  double norm_value = 0.0;    // norm(spec, A^k x)
  double delta_norm = 0.0;    // norm(spec, (A^k x)* - (A^{k-1} x)*)
  bool chain_ok = true;       // A^k x < A^{k-1} x
  double chain_margin = 0.0;
  double measure_dev = 0.0;   // mu{ |(A^k x)* - y*| >= eps } against the final y*
};

struct PowerIterationResult {
  std::vector<PowerIterationStep> steps;
  std::vector<StepFunction> iterates;  // x, Ax, A^2 x, ...
  StepFunction limit;                  // last rearranged iterate y*
  bool all_chain_ok = true;
  MajorizationCertificate limit_vs_start;  // y < x
  bool converged = false;
};

PowerIterationResult power_iterate(const OperatorExpr& A,
                                   const StepFunction& x, int n_max,
                                   double stop_tol, const NormSpec& spec,
                                   double chain_tol = 1e-10,
                                   double measure_eps = 1e-6);

}  // namespace rik
