#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rik/measure.hpp"

// The Hardy-Littlewood-Polya relation f < g (written hlp_leq) is decided on
// cumulative profiles: F_f(t) <= F_g(t) for all t > 0.  Both profiles are
// concave piecewise linear with F(0) = 0, so it is enough to compare at the
// union of their node abscissae and, on the half line, the eventual slopes.
//
// The constructive side realizes a majorizing pair by a doubly (sub)stochastic
// transfer matrix built from at most n-1 T-transforms (convex combinations of
// the identity and a transposition), with a diagonal contraction appended for
// the weak (unequal-total) case.

namespace rik {

struct MajorizationCertificate {
  bool holds = false;
  // A t with F_f(t) > F_g(t) + tol when the relation fails.
  std::optional<double> witness_t;
  // min over probed t > 0 of F_g(t) - F_f(t); 0 for identical profiles.
  double margin = 0.0;
};

MajorizationCertificate hlp_leq(const StepFunction& f, const StepFunction& g,
                                double tol = 0.0);

enum class MatrixKind { doubly_stochastic, doubly_substochastic };

class TransferMatrix {
 public:
  TransferMatrix(std::size_t n, MatrixKind kind);
  static TransferMatrix identity(std::size_t n);

  std::size_t size() const { return n_; }
  MatrixKind kind() const { return kind_; }
  double operator()(std::size_t i, std::size_t j) const {
    return a_[i * n_ + j];
  }
  double& at(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }

  double row_sum(std::size_t i) const;
  double col_sum(std::size_t j) const;
  // entries >= 0, all row/column sums <= 1 + tol; for the doubly-stochastic
  // kind the sums must also be >= 1 - tol.
  bool satisfies_invariant(double tol = 1e-12) const;

  std::vector<double> apply(std::span<const double> v) const;

  // rows i and j become l*row_i + (1-l)*row_j and (1-l)*row_i + l*row_j:
  // left-multiplication by the T-transform on (i, j).
  void apply_t_transform_left(std::size_t i, std::size_t j, double lambda);

 private:
  std::size_t n_;
  MatrixKind kind_;
  std::vector<double> a_;
};

// Thrown when the partial-sum (majorization) precondition fails; `index`
// is the first violating prefix length (1-based), or 0 for a total-sum
// violation.
class majorization_error : public std::invalid_argument {
 public:
  majorization_error(const std::string& what, std::size_t index)
      : std::invalid_argument(what), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

struct HlpConstruction {
  TransferMatrix matrix;
  int transforms_used = 0;
};

// Builds D with D g = f for vectors f < g (descending partial sums of f
// dominated by those of g).  Equal totals give a doubly stochastic D; for
// total(f) < total(g) both vectors must be nonnegative and the result is
// doubly substochastic.  ||D g - f||_inf stays below ~1e-10 for sane input.
HlpConstruction construct_doubly_stochastic(std::span<const double> f,
                                            std::span<const double> g,
                                            double tol = 1e-12);

// Vector-sense check used by the constructor and by tests: descending
// partial sums of f dominated by those of g within tol.  Returns the first
// violating prefix (1-based) or 0.
std::size_t weak_majorization_violation(std::span<const double> f,
                                        std::span<const double> g, double tol);

class OperatorExpr;  // operators.hpp

// Discrete Calderon-Ryff step: for f < g, both constant on the cells of the
// uniform grid (grid_cells cells over [0, L) with L = 1 on the unit interval
// and L = max support end on the half line), returns a matrix operator T
// with T g = f on the grid.  Throws majorization_error when f < g fails and
// invalid_argument when a breakpoint is not grid aligned.
OperatorExpr calderon_ryff_discrete(const StepFunction& f,
                                    const StepFunction& g, int grid_cells,
                                    double tol = 1e-10);

}  // namespace rik
