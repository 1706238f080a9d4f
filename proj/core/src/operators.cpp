#include "rik/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rik {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

// Disjoint sorted pieces spliced into a zero background.
StepFunction from_pieces(MeasureSpace space, std::vector<Piece> ps) {
  std::ranges::sort(ps, {}, &Piece::lo);
  std::vector<double> bp{0.0};
  std::vector<double> vals;
  for (const Piece& p : ps) {
    if (p.hi <= p.lo) continue;
    require(p.lo >= bp.back(), "from_pieces: overlapping pieces");
    if (p.lo > bp.back()) {
      bp.push_back(p.lo);
      vals.push_back(0.0);
    }
    bp.push_back(p.hi);
    vals.push_back(p.value);
  }
  return StepFunction::from_breakpoints(space, std::move(bp), std::move(vals));
}

// Pieces of x intersected with [lo, hi); beyond the explicit support the
// function is its tail (zero for the data operators act on).
std::vector<Piece> clip(const StepFunction& x, double lo, double hi) {
  std::vector<Piece> out;
  for (const Piece& p : x.pieces()) {
    const double a = std::max(p.lo, lo), b = std::min(p.hi, hi);
    if (b > a) out.push_back({a, b, p.value});
  }
  if (!x.space().finite() && hi > x.support_end() && x.tail() != 0.0) {
    const double a = std::max(lo, x.support_end());
    if (hi > a) out.push_back({a, hi, x.tail()});
  }
  return out;
}

}  // namespace

// --- PartitionFamily -----------------------------------------------------------

PartitionFamily::PartitionFamily(MeasureSpace space,
                                 std::vector<Interval> cells,
                                 std::shared_ptr<const PartitionFamily> parent)
    : space_(space), cells_(std::move(cells)), parent_(std::move(parent)) {
  require(!cells_.empty(), "PartitionFamily: need at least one cell");
  std::ranges::sort(cells_, {}, &Interval::lo);
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    require(cells_[i].lo >= 0.0 && std::isfinite(cells_[i].hi) &&
                cells_[i].length() > 0.0,
            "PartitionFamily: cells need positive finite length");
    if (i > 0)
      require(cells_[i].lo >= cells_[i - 1].hi,
              "PartitionFamily: cells must be pairwise disjoint");
    if (space_.finite())
      require(cells_[i].hi <= 1.0, "PartitionFamily: cell beyond [0,1)");
  }
  if (parent_) {
    // Every parent cell must be exactly tiled by a run of our cells.
    for (const Interval& pc : parent_->cells()) {
      auto it = std::ranges::lower_bound(cells_, pc.lo, {}, &Interval::lo);
      require(it != cells_.end() && it->lo == pc.lo,
              "PartitionFamily: refinement does not start at a parent cell");
      double cursor = pc.lo;
      while (it != cells_.end() && cursor < pc.hi && it->lo == cursor)
        cursor = (it++)->hi;
      require(cursor == pc.hi,
              "PartitionFamily: parent cell is not a union of child cells");
    }
  }
}

double PartitionFamily::mesh() const {
  double m = 0.0;
  for (const Interval& c : cells_) m = std::max(m, c.length());
  return m;
}

double PartitionFamily::covered_length() const {
  double s = 0.0;
  for (const Interval& c : cells_) s += c.length();
  return s;
}

double PartitionFamily::residual_measure() const {
  if (!space_.finite()) return kInf;
  return 1.0 - covered_length();
}

// --- OperatorExpr factories -----------------------------------------------------

OperatorExpr::OperatorExpr(Node n)
    : node_(std::make_shared<const Node>(std::move(n))) {}

OperatorExpr OperatorExpr::identity() { return OperatorExpr(Identity{}); }

OperatorExpr OperatorExpr::partition_average(PartitionFamily family,
                                             bool keep_residual) {
  return OperatorExpr(PartitionAverage{std::move(family), keep_residual});
}

OperatorExpr OperatorExpr::family_combine(PartitionFamily family,
                                          std::vector<OperatorExpr> inner) {
  require(inner.size() == family.cells().size(),
          "family_combine: one inner operator per cell");
  return OperatorExpr(FamilyCombine{std::move(family), std::move(inner)});
}

namespace {

void require_permutation(std::span<const int> perm) {
  std::vector<bool> seen(perm.size(), false);
  for (int p : perm) {
    require(p >= 0 && static_cast<std::size_t>(p) < perm.size() &&
                !seen[static_cast<std::size_t>(p)],
            "permutation: not a bijection");
    seen[static_cast<std::size_t>(p)] = true;
  }
}

void require_grid(const Grid& g) {
  require(g.cells > 0 && g.width > 0.0 && std::isfinite(g.width),
          "grid: need positive cells and width");
}

}  // namespace

OperatorExpr OperatorExpr::measure_preserve(double lo, double block_width,
                                            std::vector<int> perm) {
  require(lo >= 0.0 && block_width > 0.0, "measure_preserve: bad region");
  require(!perm.empty(), "measure_preserve: empty permutation");
  require_permutation(perm);
  return OperatorExpr(MeasurePreserve{lo, block_width, std::move(perm)});
}

OperatorExpr OperatorExpr::discrete_matrix(TransferMatrix matrix, Grid grid) {
  require_grid(grid);
  require(matrix.size() == static_cast<std::size_t>(grid.cells),
          "discrete_matrix: matrix/grid dimension mismatch");
  return OperatorExpr(DiscreteMatrix{std::move(matrix), grid});
}

OperatorExpr OperatorExpr::cell_permutation(std::vector<int> perm, Grid grid) {
  require_grid(grid);
  require(perm.size() == static_cast<std::size_t>(grid.cells),
          "cell_permutation: permutation/grid mismatch");
  require_permutation(perm);
  return OperatorExpr(CellPermutation{std::move(perm), grid});
}

OperatorExpr OperatorExpr::circulant(std::vector<double> weights, Grid grid) {
  require_grid(grid);
  require(weights.size() == static_cast<std::size_t>(grid.cells),
          "circulant: need one weight per cell");
  double s = 0.0;
  for (double w : weights) {
    require(w >= 0.0, "circulant: weights must be nonnegative");
    s += w;
  }
  require(std::abs(s - 1.0) <= 1e-12,
          "circulant: weights must form a probability vector");
  return OperatorExpr(CirculantKernel{std::move(weights), grid});
}

OperatorExpr OperatorExpr::convex_combine(std::vector<OperatorExpr> children,
                                          std::vector<double> weights) {
  require(!children.empty() && children.size() == weights.size(),
          "convex_combine: children/weights mismatch");
  double s = 0.0;
  for (double w : weights) {
    require(w >= 0.0, "convex_combine: weights must be nonnegative");
    s += w;
  }
  require(s <= 1.0 + 1e-12, "convex_combine: weights must sum to at most 1");
  return OperatorExpr(ConvexCombine{std::move(children), std::move(weights)});
}

OperatorExpr OperatorExpr::compose(std::vector<OperatorExpr> children) {
  require(!children.empty(), "compose: need at least one operator");
  return OperatorExpr(Compose{std::move(children)});
}

OperatorExpr OperatorExpr::finite_rank_truncate(const OperatorExpr& base,
                                                double horizon, int rank) {
  const auto* avg = std::get_if<PartitionAverage>(&base.node());
  require(avg != nullptr,
          "finite_rank_truncate: base must be a partition average");
  require(rank >= 0 &&
              static_cast<std::size_t>(rank) <= avg->family.cells().size(),
          "finite_rank_truncate: rank exceeds the cell count");
  require(horizon >= 0.0, "finite_rank_truncate: bad horizon");
  return OperatorExpr(FiniteRankTruncate{avg->family, avg->keep_residual,
                                         horizon, rank});
}

std::string OperatorExpr::kind_name() const {
  struct V {
    std::string operator()(const Identity&) { return "identity"; }
    std::string operator()(const PartitionAverage&) {
      return "partition_average";
    }
    std::string operator()(const FamilyCombine&) { return "family_combine"; }
    std::string operator()(const MeasurePreserve&) {
      return "measure_preserve";
    }
    std::string operator()(const DiscreteMatrix&) { return "discrete_matrix"; }
    std::string operator()(const CellPermutation&) { return "permutation"; }
    std::string operator()(const CirculantKernel&) { return "circulant"; }
    std::string operator()(const ConvexCombine&) { return "convex"; }
    std::string operator()(const Compose&) { return "compose"; }
    std::string operator()(const FiniteRankTruncate&) { return "finite_rank"; }
  };
  return std::visit(V{}, node());
}

// --- apply ----------------------------------------------------------------------

namespace {

std::vector<double> grid_values(const StepFunction& x, const Grid& g) {
  const double span = g.span();
  for (double t : x.breakpoints()) {
    const double k = std::round(t / g.width);
    if (k * g.width != t)
      throw std::invalid_argument(
          "apply: input breakpoints not aligned with the operator grid");
  }
  const bool covered =
      (x.space().finite() && span >= 1.0) ||
      (x.tail() == 0.0 && x.support_end() <= span);
  if (!covered)
    throw std::invalid_argument("apply: input extends beyond the operator grid");
  std::vector<double> v(static_cast<std::size_t>(g.cells));
  for (int k = 0; k < g.cells; ++k)
    v[static_cast<std::size_t>(k)] = x(static_cast<double>(k) * g.width);
  return v;
}

StepFunction averaged_part(const PartitionFamily& family,
                           const StepFunction& x, int rank) {
  std::vector<Piece> ps;
  auto cells = family.cells();
  const int n = rank < 0 ? static_cast<int>(cells.size()) : rank;
  const std::vector<Piece> xs = x.pieces();
  // Cells and pieces are both sorted: one sweep covers all overlaps.
  std::size_t j = 0;
  for (int c = 0; c < n; ++c) {
    const Interval& cell = cells[static_cast<std::size_t>(c)];
    while (j < xs.size() && xs[j].hi <= cell.lo) ++j;
    double acc = 0.0;
    for (std::size_t k = j; k < xs.size() && xs[k].lo < cell.hi; ++k) {
      const double a = std::max(xs[k].lo, cell.lo);
      const double b = std::min(xs[k].hi, cell.hi);
      if (b > a) acc += xs[k].value * (b - a);
    }
    ps.push_back({cell.lo, cell.hi, acc / cell.length()});
  }
  return from_pieces(x.space(), std::move(ps));
}

StepFunction apply_measure_preserve(const OperatorExpr::MeasurePreserve& mp,
                                    const StepFunction& x) {
  const double w = mp.block_width;
  const int n = static_cast<int>(mp.perm.size());
  const double lo = mp.lo, hi = lo + static_cast<double>(n) * w;
  if (x.space().finite())
    require(hi <= 1.0 + 0.0, "measure_preserve: region beyond [0,1)");
  std::vector<Piece> ps = clip(x, 0.0, lo);
  {
    auto rest = clip(x, hi, x.space().finite() ? 1.0
                                               : std::max(hi, x.support_end()));
    ps.insert(ps.end(), rest.begin(), rest.end());
  }
  for (int i = 0; i < n; ++i) {
    const int src = mp.perm[static_cast<std::size_t>(i)];
    const double src_lo = lo + static_cast<double>(src) * w;
    const double dst_lo = lo + static_cast<double>(i) * w;
    const double delta = dst_lo - src_lo;
    for (Piece p : clip(x, src_lo, src_lo + w)) {
      p.lo += delta;
      p.hi += delta;
      ps.push_back(p);
    }
  }
  return from_pieces(x.space(), std::move(ps));
}

}  // namespace

StepFunction apply(const OperatorExpr& op, const StepFunction& x) {
  if (!x.space().finite() && x.tail() != 0.0)
    throw std::invalid_argument(
        "apply: operators act on half-line data with zero tail");

  struct V {
    const StepFunction& x;

    StepFunction operator()(const OperatorExpr::Identity&) { return x; }

    StepFunction operator()(const OperatorExpr::PartitionAverage& pa) {
      require(pa.family.space() == x.space(), "apply: mismatched spaces");
      StepFunction avg = averaged_part(pa.family, x, -1);
      if (!pa.keep_residual) return avg;
      return add(avg, restrict_complement(x, pa.family.cells()));
    }

    StepFunction operator()(const OperatorExpr::FamilyCombine& fc) {
      require(fc.family.space() == x.space(), "apply: mismatched spaces");
      StepFunction out = restrict_complement(x, fc.family.cells());
      auto cells = fc.family.cells();
      for (std::size_t j = 0; j < cells.size(); ++j) {
        const Interval cell{cells[j].lo, cells[j].hi};
        StepFunction local = restrict_to(x, std::span(&cell, 1));
        StepFunction mapped = apply(fc.inner[j], local);
        out = add(out, restrict_to(mapped, std::span(&cell, 1)));
      }
      return out;
    }

    StepFunction operator()(const OperatorExpr::MeasurePreserve& mp) {
      return apply_measure_preserve(mp, x);
    }

    StepFunction operator()(const OperatorExpr::DiscreteMatrix& dm) {
      auto v = grid_values(x, dm.grid);
      auto out = dm.matrix.apply(v);
      return StepFunction::on_grid(x.space(), out, dm.grid.width);
    }

    StepFunction operator()(const OperatorExpr::CellPermutation& cp) {
      auto v = grid_values(x, cp.grid);
      std::vector<double> out(v.size());
      for (std::size_t k = 0; k < v.size(); ++k)
        out[k] = v[static_cast<std::size_t>(cp.perm[k])];
      return StepFunction::on_grid(x.space(), out, cp.grid.width);
    }

    StepFunction operator()(const OperatorExpr::CirculantKernel& ck) {
      auto v = grid_values(x, ck.grid);
      const std::size_t n = v.size();
      std::vector<double> out(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j)
          s += ck.weights[(i + n - j) % n] * v[j];
        out[i] = s;
      }
      return StepFunction::on_grid(x.space(), out, ck.grid.width);
    }

    StepFunction operator()(const OperatorExpr::ConvexCombine& cc) {
      StepFunction out = StepFunction::zero(x.space());
      for (std::size_t i = 0; i < cc.children.size(); ++i)
        out = add(out, scale(cc.weights[i], apply(cc.children[i], x)));
      return out;
    }

    StepFunction operator()(const OperatorExpr::Compose& co) {
      StepFunction cur = x;
      for (auto it = co.children.rbegin(); it != co.children.rend(); ++it)
        cur = apply(*it, cur);
      return cur;
    }

    StepFunction operator()(const OperatorExpr::FiniteRankTruncate& fr) {
      require(fr.family.space() == x.space(), "apply: mismatched spaces");
      StepFunction out = averaged_part(fr.family, x, fr.rank);
      if (fr.keep_residual && fr.horizon > 0.0) {
        StepFunction res = restrict_complement(x, fr.family.cells());
        const Interval window{0.0, fr.horizon};
        out = add(out, restrict_to(res, std::span(&window, 1)));
      }
      return out;
    }
  };
  return std::visit(V{x}, op.node());
}

// --- certification ---------------------------------------------------------------

SubstochasticCertificate certify_substochastic(
    const OperatorExpr& op, std::span<const StepFunction> probes, double tol) {
  require(!probes.empty(), "certify_substochastic: need probes");
  SubstochasticCertificate cert;
  cert.probes_checked = probes.size();
  cert.tol = tol;
  cert.worst_margin = kInf;

  const NormSpec l1 = NormSpec::l1(), linf = NormSpec::linf();
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const StepFunction& x = probes[i];
    const StepFunction tx = apply(op, x);

    const MajorizationCertificate mc = hlp_leq(tx, x, tol);
    cert.worst_margin = std::min(cert.worst_margin, mc.margin);
    if (!mc.holds) {
      cert.ok = false;
      cert.failures.push_back({i, "hlp", mc.margin, mc.witness_t});
    }

    const double d1 = norm(l1, x) - norm(l1, tx);
    cert.worst_margin = std::min(cert.worst_margin, d1);
    if (d1 < -tol) {
      cert.ok = false;
      cert.failures.push_back({i, "l1", d1, std::nullopt});
    }

    const double di = norm(linf, x) - norm(linf, tx);
    cert.worst_margin = std::min(cert.worst_margin, di);
    if (di < -tol) {
      cert.ok = false;
      cert.failures.push_back({i, "linf", di, std::nullopt});
    }

    bool x_nonneg = x.tail() >= 0.0;
    for (double v : x.values()) x_nonneg = x_nonneg && v >= 0.0;
    if (x_nonneg) {
      double mn = tx.tail();
      for (double v : tx.values()) mn = std::min(mn, v);
      cert.worst_margin = std::min(cert.worst_margin, mn + tol);
      if (mn < -tol) {
        cert.ok = false;
        cert.failures.push_back({i, "positivity", mn, std::nullopt});
      }
    }
  }
  return cert;
}

// --- partition sequences -----------------------------------------------------------

std::vector<Interval> dyadic_cells(int level, MeasureSpace space) {
  require(level >= 1, "dyadic_cells: level must be >= 1");
  require(level <= (space.finite() ? 16 : 8), "dyadic_cells: level too deep");
  const double w = std::ldexp(1.0, -level);
  const double span = space.finite() ? 1.0 : std::ldexp(1.0, level);
  const auto count = static_cast<std::size_t>(std::llround(span / w));
  std::vector<Interval> cells(count);
  for (std::size_t k = 0; k < count; ++k)
    cells[k] = {static_cast<double>(k) * w, static_cast<double>(k + 1) * w};
  return cells;
}

std::vector<OperatorExpr> build_partition_sequence(
    AveragingKind kind, int levels, MeasureSpace space,
    PartitionGenerator generator) {
  require(levels >= 1, "build_partition_sequence: need levels >= 1");
  std::vector<OperatorExpr> ops;
  std::shared_ptr<const PartitionFamily> prev;
  for (int n = 1; n <= levels; ++n) {
    auto fam = std::make_shared<const PartitionFamily>(
        space, generator(n, space), prev);
    ops.push_back(OperatorExpr::partition_average(
        *fam, kind == AveragingKind::with_residual));
    prev = fam;
  }
  return ops;
}

// --- power iteration ----------------------------------------------------------------

PowerIterationResult power_iterate(const OperatorExpr& A,
                                   const StepFunction& x, int n_max,
                                   double stop_tol, const NormSpec& spec,
                                   double chain_tol, double measure_eps) {
  require(n_max >= 0, "power_iterate: n_max must be >= 0");
  PowerIterationResult res{.steps = {},
                           .iterates = {x},
                           .limit = rearrange(x),
                           .all_chain_ok = true,
                           .limit_vs_start = {},
                           .converged = false};
  std::vector<StepFunction> rearranged{res.limit};

  StepFunction prev = x;
  for (int k = 1; k <= n_max; ++k) {
    StepFunction cur = apply(A, prev);
    StepFunction cur_r = rearrange(cur);
    const MajorizationCertificate chain = hlp_leq(cur, prev, chain_tol);
    const double delta = norm(spec, subtract(cur_r, rearranged.back()));

    PowerIterationStep step;
    step.k = k;
    step.norm_value = norm(spec, cur_r);
    step.delta_norm = delta;
    step.chain_ok = chain.holds;
    step.chain_margin = chain.margin;
    res.steps.push_back(step);
    res.all_chain_ok = res.all_chain_ok && chain.holds;

    res.iterates.push_back(cur);
    rearranged.push_back(cur_r);
    prev = std::move(cur);
    if (delta < stop_tol) {
      res.converged = true;
      break;
    }
  }
  res.limit = rearranged.back();
  for (std::size_t i = 0; i < res.steps.size(); ++i)
    res.steps[i].measure_dev = distribution(
        abs_value(subtract(rearranged[i + 1], res.limit)), measure_eps);
  res.limit_vs_start = hlp_leq(res.limit, x, chain_tol);
  return res;
}

}  // namespace rik
