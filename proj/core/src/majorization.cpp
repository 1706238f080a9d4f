#include "rik/majorization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rik/operators.hpp"

namespace rik {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::size_t> descending_order(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::ranges::stable_sort(idx, [&](std::size_t a, std::size_t b) {
    return v[a] > v[b];
  });
  return idx;
}

}  // namespace

// --- hlp_leq -----------------------------------------------------------------

MajorizationCertificate hlp_leq(const StepFunction& f, const StepFunction& g,
                                double tol) {
  if (f.space() != g.space())
    throw std::invalid_argument("hlp_leq: mismatched measure spaces");
  if (tol < 0.0) throw std::invalid_argument("hlp_leq: negative tolerance");

  const CumulativeProfile Ff = cumulative_profile(f);
  const CumulativeProfile Fg = cumulative_profile(g);

  std::vector<double> probes;
  auto push_nodes = [&](const CumulativeProfile& F) {
    for (double t : F.node_abscissae())
      if (t > 0.0) probes.push_back(t);
  };
  push_nodes(Ff);
  push_nodes(Fg);
  std::ranges::sort(probes);
  probes.erase(std::unique(probes.begin(), probes.end()), probes.end());

  MajorizationCertificate cert;
  cert.holds = true;
  cert.margin = 0.0;
  bool first = true;
  for (double t : probes) {
    const double gap = Fg(t) - Ff(t);
    if (first || gap < cert.margin) cert.margin = gap;
    first = false;
    if (gap < -tol && cert.holds) {
      cert.holds = false;
      cert.witness_t = t;
    }
  }

  // Beyond the last node both profiles are affine; a larger eventual slope
  // in f eventually overtakes any tolerance.
  const double sf = Ff.final_slope(), sg = Fg.final_slope();
  if (cert.holds && sf > sg) {
    const double T = probes.empty() ? 1.0 : probes.back();
    const double gapT = Fg(T) - Ff(T);
    // first t beyond T with F_f(t) > F_g(t) + tol
    const double cross = T + std::max(0.0, gapT + tol) / (sf - sg);
    cert.holds = false;
    cert.witness_t = cross + 1.0;
    cert.margin = -kInf;
  }
  return cert;
}

// --- TransferMatrix ----------------------------------------------------------

TransferMatrix::TransferMatrix(std::size_t n, MatrixKind kind)
    : n_(n), kind_(kind), a_(n * n, 0.0) {
  if (n == 0) throw std::invalid_argument("TransferMatrix: empty dimension");
}

TransferMatrix TransferMatrix::identity(std::size_t n) {
  TransferMatrix m(n, MatrixKind::doubly_stochastic);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

double TransferMatrix::row_sum(std::size_t i) const {
  double s = 0.0;
  for (std::size_t j = 0; j < n_; ++j) s += a_[i * n_ + j];
  return s;
}

double TransferMatrix::col_sum(std::size_t j) const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += a_[i * n_ + j];
  return s;
}

bool TransferMatrix::satisfies_invariant(double tol) const {
  for (double v : a_)
    if (!(v >= 0.0)) return false;
  for (std::size_t k = 0; k < n_; ++k) {
    const double rs = row_sum(k), cs = col_sum(k);
    if (rs > 1.0 + tol || cs > 1.0 + tol) return false;
    if (kind_ == MatrixKind::doubly_stochastic &&
        (rs < 1.0 - tol || cs < 1.0 - tol))
      return false;
  }
  return true;
}

std::vector<double> TransferMatrix::apply(std::span<const double> v) const {
  if (v.size() != n_)
    throw std::invalid_argument("TransferMatrix: dimension mismatch");
  std::vector<double> out(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += a_[i * n_ + j] * v[j];
    out[i] = s;
  }
  return out;
}

void TransferMatrix::apply_t_transform_left(std::size_t i, std::size_t j,
                                            double lambda) {
  for (std::size_t k = 0; k < n_; ++k) {
    const double ri = a_[i * n_ + k], rj = a_[j * n_ + k];
    a_[i * n_ + k] = lambda * ri + (1.0 - lambda) * rj;
    a_[j * n_ + k] = (1.0 - lambda) * ri + lambda * rj;
  }
}

// --- construction ------------------------------------------------------------

std::size_t weak_majorization_violation(std::span<const double> f,
                                        std::span<const double> g,
                                        double tol) {
  std::vector<double> fs(f.begin(), f.end()), gs(g.begin(), g.end());
  std::ranges::sort(fs, std::greater<>());
  std::ranges::sort(gs, std::greater<>());
  double pf = 0.0, pg = 0.0;
  for (std::size_t k = 0; k < fs.size(); ++k) {
    pf += fs[k];
    pg += gs[k];
    if (pf > pg + tol) return k + 1;
  }
  return 0;
}

namespace {

// T-transform chain of Marshall-Olkin type on sorted descending vectors:
// pick the largest index j with y_j > x_j, the smallest k > j with
// y_k < x_k, and move delta = min(y_j - x_j, x_k - y_k) from j to k.  Every
// step makes one more coordinate match, so at most n-1 transforms run.
int reduce_sorted(std::vector<double>& y, std::span<const double> x,
                  TransferMatrix& m, double tol) {
  const std::size_t n = y.size();
  int used = 0;
  for (std::size_t guard = 0; guard + 1 < n; ++guard) {
    std::ptrdiff_t j = -1;
    for (std::size_t i = 0; i < n; ++i)
      if (y[i] - x[i] > tol) j = static_cast<std::ptrdiff_t>(i);
    if (j < 0) break;
    std::ptrdiff_t k = -1;
    for (std::size_t i = static_cast<std::size_t>(j) + 1; i < n; ++i)
      if (x[i] - y[i] > tol) {
        k = static_cast<std::ptrdiff_t>(i);
        break;
      }
    if (k < 0) break;  // remaining deviations are below tol
    const auto ju = static_cast<std::size_t>(j), ku = static_cast<std::size_t>(k);
    const double delta = std::min(y[ju] - x[ju], x[ku] - y[ku]);
    const double lambda = 1.0 - delta / (y[ju] - y[ku]);
    m.apply_t_transform_left(ju, ku, lambda);
    const double yj = y[ju], yk = y[ku];
    y[ju] = lambda * yj + (1.0 - lambda) * yk;
    y[ku] = (1.0 - lambda) * yj + lambda * yk;
    ++used;
  }
  return used;
}

// Weak-majorization completion: the smallest level c with
// sum max(x_i, c) = sum(y) gives u = max(x, c) with x <= u < y.
std::vector<double> raise_to_level(std::span<const double> x_sorted,
                                   double total_y) {
  std::vector<double> u(x_sorted.begin(), x_sorted.end());
  const std::size_t n = u.size();
  // Scan levels downward from the largest coordinate.
  for (std::size_t k = n; k-- > 0;) {
    // Candidate: coordinates k..n-1 raised to a common level c >= x_k.
    double prefix = 0.0;
    for (std::size_t i = 0; i < k; ++i) prefix += u[i];
    const double m = static_cast<double>(n - k);
    const double c = (total_y - prefix) / m;
    if (c >= u[k] && (k == 0 || c <= u[k - 1])) {
      for (std::size_t i = k; i < n; ++i) u[i] = c;
      return u;
    }
  }
  return u;  // total_y == total_x: nothing to raise
}

}  // namespace

HlpConstruction construct_doubly_stochastic(std::span<const double> f,
                                            std::span<const double> g,
                                            double tol) {
  const std::size_t n = f.size();
  if (n == 0 || g.size() != n)
    throw std::invalid_argument(
        "construct_doubly_stochastic: vectors must share a positive length");

  if (std::size_t k = weak_majorization_violation(f, g, tol); k != 0)
    throw majorization_error(
        "construct_doubly_stochastic: partial-sum domination fails", k);

  const double total_f = std::accumulate(f.begin(), f.end(), 0.0);
  const double total_g = std::accumulate(g.begin(), g.end(), 0.0);
  const bool weak = total_f < total_g - tol;
  if (total_f > total_g + tol)
    throw majorization_error(
        "construct_doubly_stochastic: total of f exceeds total of g", 0);
  if (weak)
    for (std::size_t i = 0; i < n; ++i)
      if (f[i] < 0.0 || g[i] < 0.0)
        throw majorization_error(
            "construct_doubly_stochastic: the substochastic branch needs "
            "nonnegative vectors",
            0);

  const auto pf = descending_order(f);
  const auto pg = descending_order(g);
  std::vector<double> fs(n), gs(n);
  for (std::size_t i = 0; i < n; ++i) fs[i] = f[pf[i]];
  for (std::size_t i = 0; i < n; ++i) gs[i] = g[pg[i]];

  // Strong target in sorted coordinates: f itself, or its completion u with
  // f <= u and u < g when mass is missing.
  std::vector<double> target =
      weak ? raise_to_level(fs, total_g) : fs;

  TransferMatrix core = TransferMatrix::identity(n);
  std::vector<double> y = gs;
  const int used = reduce_sorted(y, target, core, tol);

  // Diagonal contraction mapping u back down to f (sorted coordinates).
  std::vector<double> shrink(n, 1.0);
  if (weak)
    for (std::size_t i = 0; i < n; ++i)
      shrink[i] = target[i] > 0.0 ? fs[i] / target[i] : 0.0;

  TransferMatrix D(n, weak ? MatrixKind::doubly_substochastic
                           : MatrixKind::doubly_stochastic);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      D.at(pf[i], pg[j]) = shrink[i] * core(i, j);
  return {std::move(D), used};
}

// --- discrete Calderon-Ryff ----------------------------------------------------

namespace {

std::vector<double> grid_samples(const StepFunction& x, int cells, double w) {
  for (double t : x.breakpoints()) {
    const double k = std::round(t / w);
    if (k * w != t)
      throw std::invalid_argument(
          "calderon_ryff_discrete: breakpoint not aligned with the grid");
  }
  if (x.support_end() > static_cast<double>(cells) * w + 0.0)
    throw std::invalid_argument(
        "calderon_ryff_discrete: function extends beyond the grid");
  std::vector<double> v(static_cast<std::size_t>(cells));
  for (int k = 0; k < cells; ++k)
    v[static_cast<std::size_t>(k)] = x(static_cast<double>(k) * w);
  return v;
}

}  // namespace

OperatorExpr calderon_ryff_discrete(const StepFunction& f,
                                    const StepFunction& g, int grid_cells,
                                    double tol) {
  if (f.space() != g.space())
    throw std::invalid_argument("calderon_ryff_discrete: mismatched spaces");
  if (grid_cells <= 0)
    throw std::invalid_argument("calderon_ryff_discrete: need cells > 0");

  const MajorizationCertificate cert = hlp_leq(f, g, tol);
  if (!cert.holds)
    throw majorization_error(
        "calderon_ryff_discrete: f < g fails (witness at t = " +
            std::to_string(cert.witness_t.value_or(-1.0)) + ")",
        0);

  const double L = f.space().finite()
                       ? 1.0
                       : std::max({f.support_end(), g.support_end(), 1.0});
  const double w = L / static_cast<double>(grid_cells);
  const auto vf = grid_samples(f, grid_cells, w);
  const auto vg = grid_samples(g, grid_cells, w);
  // Equal cell widths: value vectors majorize exactly when the functions do.
  auto built = construct_doubly_stochastic(vf, vg, tol);
  return OperatorExpr::discrete_matrix(std::move(built.matrix),
                                       Grid{grid_cells, w});
}

}  // namespace rik
