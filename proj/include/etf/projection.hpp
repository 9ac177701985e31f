#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "etf/error.hpp"
#include "etf/operator.hpp"

namespace etf {

/// Unit vectors x_1..x_k whose projections x_i ⊗ x_i sum to `target`.
struct ProjectionDecomposition {
  std::size_t dim = 0;
  std::vector<Vector> factors;
  SymmetricOperator target;

  SymmetricOperator sum() const {
    Matrix s = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (const Vector& x : factors) s.noalias() += x * x.transpose();
    return SymmetricOperator(s);
  }

  /// ‖Σ x_i ⊗ x_i − target‖_F
  double residual() const { return (sum().matrix() - target.matrix()).norm(); }

  double max_norm_error() const {
    double worst = 0.0;
    for (const Vector& x : factors) worst = std::max(worst, std::abs(x.norm() - 1.0));
    return worst;
  }
};

/// Q_1 + ... + Q_r = target with every Q_l a rank-k orthogonal projection.
struct RankKDecomposition {
  std::size_t dim = 0;
  std::size_t rank_k = 0;
  std::vector<SymmetricOperator> projections;
  SymmetricOperator target;
  /// slot_factors[j][l] is the unit vector of T_{jl}; Q_l = Σ_j T_{jl}.
  std::vector<std::vector<Vector>> slot_factors;
};

enum class Verdict {
  OK,
  FailNotPSD,
  FailTraceNotInteger,
  FailTraceBelowRank,
  FailNormCondition,
};

constexpr std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::OK: return "OK";
    case Verdict::FailNotPSD: return "FailNotPSD";
    case Verdict::FailTraceNotInteger: return "FailTraceNotInteger";
    case Verdict::FailTraceBelowRank: return "FailTraceBelowRank";
    case Verdict::FailNormCondition: return "FailNormCondition";
  }
  return "Unknown";
}

struct DecomposabilityReport {
  bool is_psd = false;
  long long k = 0;               // nearest integer to the trace
  double trace = 0.0;
  double trace_residual = 0.0;   // |trace − k|
  std::size_t rank = 0;
  double norm = 0.0;
  bool is_projection = false;
  Verdict verdict = Verdict::OK;

  bool ok() const noexcept { return verdict == Verdict::OK; }
};

namespace detail {

inline bool trace_matches(double tr, double k, const ToleranceConfig& cfg) {
  return std::abs(tr - k) <= cfg.tol_recon * std::max(1.0, std::abs(tr));
}

}  // namespace detail

/// Necessary conditions for a decomposition into rank-one projections.
/// The norm test runs first: a positive operator with ‖A‖ ≤ 1 that is a sum
/// of projections must itself be a projection, whatever its trace.
inline DecomposabilityReport check_decomposable(const SymmetricOperator& a, const ToleranceConfig& cfg = {}) {
  DecomposabilityReport rep;
  const EigenSystem es = eig(a);
  const double radius = spectral_radius(es);
  rep.is_psd = es.values[es.values.size() - 1] >= -cfg.tol_psd * std::max(1.0, radius);
  rep.trace = trace(a);
  rep.k = std::llround(rep.trace);
  rep.trace_residual = std::abs(rep.trace - static_cast<double>(rep.k));
  rep.rank = rank_eps(es, cfg);
  rep.norm = radius;
  rep.is_projection = is_projection(a, cfg);

  if (!rep.is_psd) {
    rep.verdict = Verdict::FailNotPSD;
  } else if (rep.rank > 0 && rep.norm <= 1.0 + cfg.tol_recon && !rep.is_projection) {
    rep.verdict = Verdict::FailNormCondition;
  } else if (!detail::trace_matches(rep.trace, static_cast<double>(rep.k), cfg)) {
    rep.verdict = Verdict::FailTraceNotInteger;
  } else if (rep.k < static_cast<long long>(rep.rank)) {
    rep.verdict = Verdict::FailTraceBelowRank;
  } else {
    rep.verdict = Verdict::OK;
  }
  return rep;
}

/// Outcome of the Case-2 angle search along y(t) = cos t·u_top + sin t·u_bot.
struct Case2Root {
  Vector y;
  double t = 0.0;
  double f_left = 0.0;   // μ_n(A − u_top ⊗ u_top)
  double f_right = 0.0;  // μ_n(A − u_bot ⊗ u_bot)
  double f_root = 0.0;   // μ_n(A − y ⊗ y)
};

namespace detail {

inline Case2Root case2_root(const SymmetricOperator& a, const EigenSystem& es, std::size_t n,
                            const ToleranceConfig& cfg) {
  const auto rank = static_cast<Eigen::Index>(n);
  const Vector top = es.vectors.col(0);
  const Vector bot = es.vectors.col(rank - 1);
  auto y_at = [&](double t) -> Vector { return std::cos(t) * top + std::sin(t) * bot; };

  // μ_n is taken on range(A). On the full space the kernel contributes zero
  // eigenvalues that would mask the sign change once A is rank deficient.
  const Matrix range = es.vectors.leftCols(rank);
  const Matrix compressed = range.transpose() * a.matrix() * range;
  auto f = [&](double t) {
    Vector yr = Vector::Zero(rank);
    yr[0] += std::cos(t);
    yr[rank - 1] += std::sin(t);
    return eig(SymmetricOperator(compressed - yr * yr.transpose())).values[rank - 1];
  };

  const double half_pi = std::numbers::pi / 2.0;
  const double ftol = cfg.tol_psd * std::max(1.0, spectral_radius(es));
  Case2Root root;
  root.f_left = f(0.0);
  root.f_right = f(half_pi);
  if (root.f_left < -ftol || root.f_right > ftol) {
    throw Error(ErrorKind::InvalidCase2State,
                "endpoint signs violated: f(0)=" + std::to_string(root.f_left) +
                    " f(pi/2)=" + std::to_string(root.f_right));
  }

  if (root.f_left <= 0.0) {
    root.t = 0.0;
  } else if (root.f_right >= 0.0) {
    root.t = half_pi;
  } else {
    double lo = 0.0;
    double hi = half_pi;
    while (hi - lo > cfg.tol_bisect) {
      const double mid = lo + 0.5 * (hi - lo);
      if (mid <= lo || mid >= hi) break;
      if (f(mid) > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    root.t = lo + 0.5 * (hi - lo);
  }
  root.y = y_at(root.t);
  root.y.normalize();
  root.f_root = f(root.t);
  return root;
}

}  // namespace detail

/// Case-2 peel for an operator with trace(A) = rank(A) = n: a unit vector y in
/// range(A) with μ_n(A − y ⊗ y) = 0, found by bisection on the circle through
/// the top and bottom eigenvectors of the range.
inline Case2Root peel_root_detail(const SymmetricOperator& a, const ToleranceConfig& cfg = {}) {
  const EigenSystem es = eig(a);
  const std::size_t n = rank_eps(es, cfg);
  if (n == 0) throw Error(ErrorKind::InvalidCase2State, "operator has rank zero");
  if (!detail::trace_matches(trace(a), static_cast<double>(n), cfg)) {
    throw Error(ErrorKind::InvalidCase2State, "trace does not equal rank");
  }
  if (n == 1) {
    Case2Root root;
    root.y = es.vectors.col(0);
    root.f_root = es.values.size() > 1 ? es.values[1] : 0.0;
    return root;
  }
  return detail::case2_root(a, es, n, cfg);
}

inline Vector peel_root(const SymmetricOperator& a, const ToleranceConfig& cfg = {}) {
  return peel_root_detail(a, cfg).y;
}

enum class PeelCase { TopEigenvector, Case2Root, Final };

/// One step of the rank-one peeling, recorded for diagnostics.
struct PeelRecord {
  PeelCase kind = PeelCase::TopEigenvector;
  std::size_t k_before = 0;
  std::size_t rank_before = 0;
  std::size_t rank_after = 0;
  double f_left = 0.0;
  double f_right = 0.0;
};

/// Split a PSD operator with integer trace k ≥ rank into k rank-one
/// projections. While k exceeds the rank the top eigenvector is peeled; once
/// they agree a Case-2 root is peeled and the remainder deflated onto its top
/// rank−1 eigenvectors.
inline ProjectionDecomposition decompose_rank_one(const SymmetricOperator& a, std::size_t k,
                                                  const ToleranceConfig& cfg = {},
                                                  std::vector<PeelRecord>* log = nullptr) {
  cfg.validate();
  if (k < 1) throw Error(ErrorKind::InvalidInput, "decomposition length must be at least 1");
  const DecomposabilityReport rep = check_decomposable(a, cfg);
  if (!rep.is_psd) throw Error(ErrorKind::NotPSD, "operator is not positive semidefinite");
  if (rep.verdict == Verdict::FailNormCondition) {
    throw Error(ErrorKind::NotDecomposable, "FailNormCondition",
                "norm is at most 1 but the operator is not a projection");
  }
  if (!detail::trace_matches(rep.trace, static_cast<double>(k), cfg)) {
    throw Error(ErrorKind::NotDecomposable, "FailTraceNotInteger",
                "trace " + std::to_string(rep.trace) + " does not equal k = " + std::to_string(k));
  }
  if (k < rep.rank) {
    throw Error(ErrorKind::NotDecomposable, "FailTraceBelowRank",
                "k = " + std::to_string(k) + " is below rank " + std::to_string(rep.rank));
  }

  ProjectionDecomposition out{a.dim(), {}, a};
  out.factors.reserve(k);
  SymmetricOperator current = psd_clamp(a, cfg);
  for (std::size_t remaining = k; remaining > 0; --remaining) {
    const EigenSystem es = eig(current);
    const std::size_t rank = rank_eps(es, cfg);
    PeelRecord rec;
    rec.k_before = remaining;
    rec.rank_before = rank;

    if (remaining == 1) {
      out.factors.push_back(es.vectors.col(0));
      rec.kind = PeelCase::Final;
      if (log) log->push_back(rec);
      break;
    }
    if (rank == 0 || remaining < rank) {
      throw Error(ErrorKind::NotDecomposable, "FailTraceBelowRank", "remainder lost the trace/rank balance");
    }

    Vector x;
    if (remaining > rank) {
      x = es.vectors.col(0);
      rec.kind = PeelCase::TopEigenvector;
    } else {
      const Case2Root root = detail::case2_root(current, es, rank, cfg);
      x = root.y;
      rec.kind = PeelCase::Case2Root;
      rec.f_left = root.f_left;
      rec.f_right = root.f_right;
    }
    out.factors.push_back(x);

    SymmetricOperator next = psd_clamp(SymmetricOperator(current.matrix() - x * x.transpose()), cfg);
    if (rec.kind == PeelCase::Case2Root) {
      const EigenSystem rest = eig(next);
      const Eigen::Index keep = static_cast<Eigen::Index>(rank - 1);
      const Matrix basis = rest.vectors.leftCols(keep);
      const Vector vals = rest.values.head(keep).cwiseMax(0.0);
      next = SymmetricOperator(basis * vals.asDiagonal() * basis.transpose());
    }
    current = next;
    rec.rank_after = rank_eps(current, cfg);
    if (log) log->push_back(rec);
  }
  return out;
}

/// Given mutually orthogonal rank-k projections P_i and weights r_i with
/// integer sum r ≥ n, write Σ r_i P_i as a sum of r rank-k projections.
inline RankKDecomposition decompose_rank_k(const std::vector<double>& weights,
                                           const std::vector<SymmetricOperator>& projections,
                                           const ToleranceConfig& cfg = {}) {
  cfg.validate();
  const std::size_t n = projections.size();
  if (n == 0 || weights.size() != n) {
    throw Error(ErrorKind::InvalidInput, "need one weight per projection and at least one projection");
  }
  const std::size_t dim = projections.front().dim();
  double r = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw Error(ErrorKind::InvalidInput, "weights must be finite and non-negative");
    r += w;
  }
  const long long rounded = std::llround(r);
  if (!detail::trace_matches(r, static_cast<double>(rounded), cfg)) {
    throw Error(ErrorKind::InvalidInput, "weights must sum to an integer");
  }
  if (rounded < static_cast<long long>(n)) {
    throw Error(ErrorKind::InvalidInput, "weight sum must be at least the number of projections");
  }
  const auto total = static_cast<std::size_t>(rounded);

  std::size_t k = 0;
  std::vector<Matrix> slots;  // columns span range(P_i)
  slots.reserve(n);
  for (const SymmetricOperator& p : projections) {
    detail::check_dims(p.dim(), dim, "decompose_rank_k");
    if (!is_projection(p, cfg)) throw Error(ErrorKind::InvalidInput, "input operator is not a projection");
    const EigenSystem es = eig(p);
    const std::size_t pk = rank_eps(es, cfg);
    if (pk == 0) throw Error(ErrorKind::InvalidInput, "projections must be nonzero");
    if (k == 0) k = pk;
    if (pk != k) throw Error(ErrorKind::InvalidInput, "projections must share the same rank");
    slots.push_back(es.vectors.leftCols(static_cast<Eigen::Index>(k)));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if ((projections[i].matrix() * projections[j].matrix()).norm() > cfg.tol_recon) {
        throw Error(ErrorKind::InvalidInput, "projections are not mutually orthogonal");
      }
    }
  }

  Matrix target = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < n; ++i) target += weights[i] * projections[i].matrix();

  RankKDecomposition out{dim, k, {}, SymmetricOperator(target), {}};
  out.slot_factors.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    Matrix aj = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < n; ++i) {
      const Vector p = slots[i].col(static_cast<Eigen::Index>(j));
      aj.noalias() += weights[i] * (p * p.transpose());
    }
    out.slot_factors.push_back(decompose_rank_one(SymmetricOperator(aj), total, cfg).factors);
  }

  out.projections.reserve(total);
  for (std::size_t l = 0; l < total; ++l) {
    Matrix q = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t j = 0; j < k; ++j) {
      const Vector& x = out.slot_factors[j][l];
      q.noalias() += x * x.transpose();
    }
    SymmetricOperator ql(q);
    if (!is_projection(ql, cfg) || rank_eps(ql, cfg) != k) {
      throw Error(ErrorKind::NotDecomposable, "assembled operator is not a rank-" + std::to_string(k) + " projection");
    }
    out.projections.push_back(std::move(ql));
  }
  return out;
}

}  // namespace etf
