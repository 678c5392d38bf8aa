#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

#include "mixrec/core_data.hpp"
#include "mixrec/errors.hpp"
#include "mixrec/parallel.hpp"

namespace mixrec::signsolve {

inline double default_tol(const Eigen::VectorXd& y) { return 1e-6 * (1.0 + y.norm()); }

struct PixelSolution {
  std::vector<Eigen::VectorXd> solutions;  // deduped, canonical order
  std::vector<double> residuals;           // exact || |Wz + y_pub| - y ||_2 per solution
  Eigen::VectorXd chosen;                  // canonical representative
  double residual = std::numeric_limits<double>::infinity();
  double best_residual = std::numeric_limits<double>::infinity();
  bool rank_deficient = false;

  bool ambiguous() const { return solutions.size() > 1; }
};

namespace detail {

// |z| lexicographically smallest wins; abs ties fall back to the signed
// vector, so z and -z order deterministically. Coordinates are quantized
// before comparison: solutions reached through different sign patterns can
// share a coordinate mathematically yet differ in the last bits, and the
// order must not hinge on that noise.
inline bool canonical_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                           double quantum) {
  const auto q = [quantum](double x) { return std::llround(x / quantum); };
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const long long fa = q(std::fabs(a[i])), fb = q(std::fabs(b[i]));
    if (fa != fb) return fa < fb;
  }
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const long long sa = q(a[i]), sb = q(b[i]);
    if (sa != sb) return sa < sb;
  }
  return false;
}

}  // namespace detail

// Enumerates the 2^m hidden sign patterns of min_z || |W z + y_pub| - y ||_2
// for one pixel at a time. The pseudo-inverse is factored once (it does not
// depend on the sign pattern); the walk visits patterns in Gray-code order so
// each step is a single-coordinate flip with an O(rank) residual update, and
// only patterns whose residual reaches the tolerance pay for an exact solve
// and the sign-consistency check.
class SignEnumerator {
 public:
  SignEnumerator(const Eigen::MatrixXd& W, int enumeration_bound = 24)
      : W_(W), m_(static_cast<int>(W.rows())), n_(static_cast<int>(W.cols())) {
    if (m_ < 1 || n_ < 1)
      throw std::invalid_argument("SignEnumerator: W must be nonempty");
    if (m_ > enumeration_bound)
      throw ResourceBoundError("SignEnumerator: m exceeds the enumeration bound of " +
                               std::to_string(enumeration_bound));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(W, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double cutoff =
        std::max(m_, n_) * std::numeric_limits<double>::epsilon() * (sv.size() ? sv[0] : 0.0);
    rank_ = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv[i] > cutoff) ++rank_;
    U_ = svd.matrixU().leftCols(rank_);
    pinv_ = svd.matrixV().leftCols(rank_) * sv.head(rank_).cwiseInverse().asDiagonal() *
            U_.transpose();
    qdiag_.resize(m_);
    for (int j = 0; j < m_; ++j) qdiag_[j] = 1.0 - U_.row(j).squaredNorm();
  }

  bool rank_deficient() const { return rank_ < n_; }
  int rank() const { return rank_; }

  // zeros of W z + y_pub match either sign
  PixelSolution solve(const Eigen::VectorXd& y_pub, const Eigen::VectorXd& y,
                      double tol) const {
    if (y.size() != m_ || y_pub.size() != m_)
      throw std::invalid_argument("SignEnumerator: column length mismatch");
    if ((y.array() < 0.0).any())
      throw std::invalid_argument("SignEnumerator: y must be entrywise nonnegative");
    if (tol < 0.0) tol = default_tol(y);

    PixelSolution out;
    out.rank_deficient = rank_deficient();
    const double zero_eps = 1e-9 * (1.0 + y.cwiseAbs().maxCoeff() +
                                    y_pub.cwiseAbs().maxCoeff());
    // The incremental residual carries absolute error on the order of
    // eps * ||b||^2 per resync window, so the scan threshold needs a guard
    // band at that scale; exact re-verification decides actual acceptance.
    const double bsq_cap = std::pow(y.norm() + y_pub.norm(), 2);
    const double guard = 1e-11 * (1.0 + bsq_cap);
    const bool accept_all = std::isinf(tol);
    const double accept_sq =
        accept_all ? std::numeric_limits<double>::infinity() : tol * tol + guard;

    // sigma encoded as a bitmask, bit j set <=> sigma_j = -1; start all +1
    Eigen::VectorXd b = y - y_pub;
    Eigen::VectorXd h = U_.transpose() * b;
    double rsq = b.squaredNorm() - h.squaredNorm();

    std::vector<std::uint64_t> candidates;
    double best_rsq = rsq;
    std::uint64_t best_mask = 0;
    if (rsq <= accept_sq) candidates.push_back(0);

    const std::uint64_t total = 1ULL << m_;
    std::uint64_t mask = 0;
    for (std::uint64_t t = 1; t < total; ++t) {
      if ((t & 0xfffULL) == 0) {  // periodic exact resync against drift
        for (int j = 0; j < m_; ++j)
          b[j] = ((mask >> j) & 1 ? -y[j] : y[j]) - y_pub[j];
        h = U_.transpose() * b;
        rsq = b.squaredNorm() - h.squaredNorm();
      }
      const int j = std::countr_zero(t);
      const double sigma_old = (mask >> j) & 1 ? -1.0 : 1.0;
      const double delta = -2.0 * sigma_old * y[j];
      const double bj = sigma_old * y[j] - y_pub[j];
      const double gj = bj - U_.row(j).dot(h);
      rsq += delta * (2.0 * gj + delta * qdiag_[j]);
      h += delta * U_.row(j).transpose();
      mask ^= 1ULL << j;
      if (rsq < best_rsq) {
        best_rsq = rsq;
        best_mask = mask;
      }
      if (rsq <= accept_sq) candidates.push_back(mask);
    }

    // exact verification of every candidate sign pattern
    std::vector<Eigen::VectorXd> zs;
    std::vector<double> res;
    const auto verify = [&](std::uint64_t sigma_mask) {
      Eigen::VectorXd bb(m_);
      for (int j = 0; j < m_; ++j)
        bb[j] = ((sigma_mask >> j) & 1 ? -y[j] : y[j]) - y_pub[j];
      const Eigen::VectorXd z = pinv_ * bb;
      const Eigen::VectorXd s = W_ * z + y_pub;
      for (int j = 0; j < m_; ++j) {
        if (std::fabs(s[j]) <= zero_eps) continue;
        const double want = (sigma_mask >> j) & 1 ? -1.0 : 1.0;
        if ((s[j] > 0 ? 1.0 : -1.0) != want) return;  // sign-inconsistent
      }
      const double exact = (s.cwiseAbs() - y).norm();
      out.best_residual = std::min(out.best_residual, exact);
      if (exact > tol) return;
      zs.push_back(z);
      res.push_back(exact);
    };
    for (std::uint64_t c : candidates) verify(c);
    if (std::find(candidates.begin(), candidates.end(), best_mask) == candidates.end())
      verify(best_mask);  // keeps best_residual meaningful when nothing passed tol

    // dedupe (sign flips on zero-valued coordinates reproduce the same z)
    double value_scale = 0.0;
    for (const auto& z : zs) value_scale = std::max(value_scale, z.cwiseAbs().maxCoeff());
    const double quantum = 1e-9 * (1.0 + value_scale);
    std::vector<std::size_t> order(zs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return detail::canonical_less(zs[a], zs[b], quantum);
    });
    for (std::size_t k : order) {
      if (!out.solutions.empty() &&
          (out.solutions.back() - zs[k]).cwiseAbs().maxCoeff() <= quantum)
        continue;
      out.solutions.push_back(zs[k]);
      out.residuals.push_back(res[k]);
    }
    if (!out.solutions.empty()) {
      out.chosen = out.solutions.front();
      out.residual = out.residuals.front();
    }
    return out;
  }

 private:
  Eigen::MatrixXd W_;
  int m_ = 0;
  int n_ = 0;
  int rank_ = 0;
  Eigen::MatrixXd U_;     // m x rank
  Eigen::MatrixXd pinv_;  // n x m
  Eigen::VectorXd qdiag_;
};

inline PixelSolution solve_pixel(const Eigen::MatrixXd& W, const Eigen::VectorXd& y_pub,
                                 const Eigen::VectorXd& y, double tol,
                                 int enumeration_bound = 24) {
  return SignEnumerator(W, enumeration_bound).solve(y_pub, y, tol);
}

struct SolveOptions {
  double tol = -1.0;          // < 0: per-pixel default tol_factor * (1 + ||y||_2)
  double tol_factor = 1e-6;   // general-purpose default; the pipeline tightens it
  int enumeration_bound = 24;
  int threads = 1;
};

struct RecoveredImages {
  Eigen::MatrixXd Xtilde;      // d x n_priv, row i = chosen solution of pixel i
  std::vector<int> ambiguity;  // per-pixel solution count
  bool rank_deficient = false;

  std::map<int, int> ambiguity_histogram() const {
    std::map<int, int> h;
    for (int c : ambiguity) ++h[c];
    return h;
  }
};

// Runs the per-pixel solver over all d pixels. Inputs are scaled by
// sqrt(k_priv) so the private coefficient matrix is exactly the 0/1 W_priv
// and the recovered z holds the private pixel values themselves. Pixels are
// independent; the parallel map writes disjoint rows, so results are
// identical for every thread count.
inline RecoveredImages solve_all(const Eigen::MatrixXi& W_priv, const Eigen::MatrixXd& Y_pub,
                                 const Eigen::MatrixXd& Y, const SplitSpec& split,
                                 const SolveOptions& opts = {}) {
  split.require_pipeline();
  const Eigen::Index m = W_priv.rows();
  const Eigen::Index n_priv = W_priv.cols();
  const Eigen::Index d = Y.cols();
  if (Y.rows() != m || Y_pub.rows() != m || Y_pub.cols() != d)
    throw std::invalid_argument("solve_all: shape mismatch");
  if (n_priv != split.n_priv)
    throw std::invalid_argument("solve_all: W_priv column count != n_priv");

  RecoveredImages out;
  out.Xtilde.resize(d, n_priv);
  out.ambiguity.assign(static_cast<std::size_t>(d), 0);
  if (d == 0) return out;

  const double scale = std::sqrt(static_cast<double>(split.k_priv));
  const Eigen::MatrixXd Yp = scale * Y_pub;
  const Eigen::MatrixXd Ys = scale * Y;
  const SignEnumerator solver(W_priv.cast<double>(), opts.enumeration_bound);
  out.rank_deficient = solver.rank_deficient();

  parallel_for(static_cast<std::size_t>(d), opts.threads, [&](std::size_t i) {
    const Eigen::Index col = static_cast<Eigen::Index>(i);
    const double tol =
        opts.tol >= 0.0 ? opts.tol : opts.tol_factor * (1.0 + Ys.col(col).norm());
    const PixelSolution sol = solver.solve(Yp.col(col), Ys.col(col), tol);
    out.ambiguity[i] = static_cast<int>(sol.solutions.size());
    if (sol.solutions.empty())
      out.Xtilde.row(col).setZero();
    else
      out.Xtilde.row(col) = sol.chosen.transpose();
  });
  return out;
}

struct ColumnMatch {
  std::vector<int> perm;  // column j of A pairs with column perm[j] of B
  double max_error = 0.0;
};

// Bottleneck column matching between two matrices of absolute values:
// the permutation minimizing max_j ||A_j - B_perm(j)||_inf. Exact subset-DP
// up to 10 columns, greedy beyond.
inline ColumnMatch match_columns(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw std::invalid_argument("match_columns: shapes must agree");
  const int n = static_cast<int>(A.cols());
  ColumnMatch out;
  out.perm.assign(static_cast<std::size_t>(n), -1);
  if (n == 0) return out;

  Eigen::MatrixXd cost(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      cost(j, k) = (A.col(j) - B.col(k)).cwiseAbs().maxCoeff();

  if (n <= 10) {
    const int full = (1 << n) - 1;
    std::vector<double> dp(static_cast<std::size_t>(full) + 1,
                           std::numeric_limits<double>::infinity());
    std::vector<int> pick(static_cast<std::size_t>(full) + 1, -1);
    dp[0] = 0.0;
    for (int s = 0; s <= full; ++s) {
      if (!std::isfinite(dp[static_cast<std::size_t>(s)])) continue;
      const int j = std::popcount(static_cast<unsigned>(s));
      if (j == n) continue;
      for (int k = 0; k < n; ++k) {
        if (s & (1 << k)) continue;
        const int s2 = s | (1 << k);
        const double v = std::max(dp[static_cast<std::size_t>(s)], cost(j, k));
        if (v < dp[static_cast<std::size_t>(s2)]) {
          dp[static_cast<std::size_t>(s2)] = v;
          pick[static_cast<std::size_t>(s2)] = k;
        }
      }
    }
    int s = full;
    for (int j = n - 1; j >= 0; --j) {
      const int k = pick[static_cast<std::size_t>(s)];
      out.perm[static_cast<std::size_t>(j)] = k;
      s ^= 1 << k;
    }
    out.max_error = dp[static_cast<std::size_t>(full)];
    return out;
  }

  std::vector<char> used(static_cast<std::size_t>(n), 0);
  out.max_error = 0.0;
  for (int j = 0; j < n; ++j) {
    int best = -1;
    for (int k = 0; k < n; ++k)
      if (!used[static_cast<std::size_t>(k)] &&
          (best < 0 || cost(j, k) < cost(j, best)))
        best = k;
    used[static_cast<std::size_t>(best)] = 1;
    out.perm[static_cast<std::size_t>(j)] = best;
    out.max_error = std::max(out.max_error, cost(j, best));
  }
  return out;
}

}  // namespace mixrec::signsolve
