#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "etf/error.hpp"

namespace etf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Numerical thresholds shared by every construction in the library.
struct ToleranceConfig {
  double tol_rank = 1e-9;    // relative to the spectral radius
  double tol_psd = 1e-9;
  double tol_recon = 1e-8;
  double tol_orth = 1e-10;
  double tol_bisect = 1e-13; // on the Case-2 angle parameter

  void validate() const {
    for (double t : {tol_rank, tol_psd, tol_recon, tol_orth, tol_bisect}) {
      if (!(t > 0.0) || !std::isfinite(t)) {
        throw Error(ErrorKind::InvalidInput, "tolerances must be finite and strictly positive");
      }
    }
  }
};

/// Dense real symmetric matrix. Input is symmetrized on construction, so
/// entries(i, j) == entries(j, i) holds bit for bit.
class SymmetricOperator {
 public:
  SymmetricOperator() : m_(Matrix::Zero(1, 1)) {}

  explicit SymmetricOperator(const Matrix& m) {
    if (m.rows() == 0 || m.rows() != m.cols()) {
      throw Error(ErrorKind::InvalidInput, "operator must be a non-empty square matrix");
    }
    m_ = (m + m.transpose()) * 0.5;
  }

  static SymmetricOperator zero(std::size_t n) {
    return SymmetricOperator(Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
  }
  static SymmetricOperator identity(std::size_t n) {
    return SymmetricOperator(Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
  }
  static SymmetricOperator diagonal(const Vector& d) { return SymmetricOperator(Matrix(d.asDiagonal())); }
  static SymmetricOperator diagonal(std::initializer_list<double> d) {
    return diagonal(Eigen::Map<const Vector>(d.begin(), static_cast<Eigen::Index>(d.size())));
  }

  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const noexcept { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  bool all_finite() const { return m_.allFinite(); }

  SymmetricOperator operator+(const SymmetricOperator& o) const { return SymmetricOperator(m_ + o.m_); }
  SymmetricOperator operator-(const SymmetricOperator& o) const { return SymmetricOperator(m_ - o.m_); }
  SymmetricOperator operator*(double s) const { return SymmetricOperator(m_ * s); }
  friend SymmetricOperator operator*(double s, const SymmetricOperator& a) { return a * s; }

 private:
  Matrix m_;
};

/// Eigenpairs in non-increasing order; column i of `vectors` pairs with values[i].
struct EigenSystem {
  Vector values;
  Matrix vectors;

  std::size_t size() const noexcept { return static_cast<std::size_t>(values.size()); }
};

namespace detail {

inline Eigen::Index dominant_index(const Eigen::Ref<const Vector>& v) {
  const double peak = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) >= peak * (1.0 - 1e-12)) return i;
  }
  return 0;
}

inline void check_dims(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw Error(ErrorKind::InvalidInput, std::string("dimension mismatch in ") + what);
}

}  // namespace detail

/// Symmetric eigendecomposition (Eigen's self-adjoint solver) normalized to a
/// deterministic form: values non-increasing, exactly equal values ordered by
/// the position of their eigenvector's dominant entry, and each eigenvector
/// signed so its dominant entry is positive (lowest index on ties).
inline EigenSystem eig(const SymmetricOperator& a) {
  if (!a.all_finite()) throw Error(ErrorKind::InvalidInput, "operator has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::InvalidInput, "eigensolver failed to converge");
  }
  const Eigen::Index n = a.matrix().rows();
  Matrix vecs = solver.eigenvectors();
  std::vector<Eigen::Index> lead(static_cast<std::size_t>(n));
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index d = detail::dominant_index(vecs.col(c));
    if (vecs(d, c) < 0) vecs.col(c) *= -1.0;
    lead[static_cast<std::size_t>(c)] = d;
  }

  const Vector& vals = solver.eigenvalues();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    if (vals[x] != vals[y]) return vals[x] > vals[y];
    return lead[static_cast<std::size_t>(x)] < lead[static_cast<std::size_t>(y)];
  });

  EigenSystem out{Vector(n), Matrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values[i] = vals[order[static_cast<std::size_t>(i)]];
    out.vectors.col(i) = vecs.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

/// n-th largest eigenvalue counting multiplicity, 1-based.
inline double mu(const SymmetricOperator& a, std::size_t n) {
  if (n < 1 || n > a.dim()) throw Error(ErrorKind::InvalidInput, "eigenvalue index out of range");
  return eig(a).values[static_cast<Eigen::Index>(n - 1)];
}

inline double spectral_radius(const EigenSystem& es) {
  return es.values.size() == 0 ? 0.0 : std::max(std::abs(es.values[0]), std::abs(es.values[es.values.size() - 1]));
}

inline std::size_t rank_eps(const EigenSystem& es, const ToleranceConfig& cfg = {}) {
  const double cut = cfg.tol_rank * std::max(1.0, spectral_radius(es));
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < es.values.size(); ++i) {
    if (std::abs(es.values[i]) > cut) ++r;
  }
  return r;
}

inline std::size_t rank_eps(const SymmetricOperator& a, const ToleranceConfig& cfg = {}) {
  return rank_eps(eig(a), cfg);
}

/// x ⊗ x. A projection when ‖x‖ = 1.
inline SymmetricOperator outer(const Vector& x) {
  if (x.size() == 0) throw Error(ErrorKind::InvalidInput, "outer product of an empty vector");
  return SymmetricOperator(x * x.transpose());
}

inline double trace(const SymmetricOperator& a) { return a.matrix().trace(); }

inline double frobenius(const SymmetricOperator& a) { return a.matrix().norm(); }

/// Largest |eigenvalue|.
inline double norm(const SymmetricOperator& a) { return spectral_radius(eig(a)); }

inline SymmetricOperator reconstruct(const EigenSystem& es) {
  return SymmetricOperator(es.vectors * es.values.asDiagonal() * es.vectors.transpose());
}

/// Rebuild with f applied to every eigenvalue.
template <class Fn>
SymmetricOperator spectral_map(const EigenSystem& es, Fn&& f) {
  Vector mapped = es.values.unaryExpr(std::forward<Fn>(f));
  return SymmetricOperator(es.vectors * mapped.asDiagonal() * es.vectors.transpose());
}

inline bool is_projection(const SymmetricOperator& a, const ToleranceConfig& cfg = {}) {
  const Matrix& m = a.matrix();
  return (m * m - m).norm() <= cfg.tol_recon * std::max(1.0, m.norm());
}

/// S^{-1/2} for positive definite S.
inline SymmetricOperator inv_sqrt(const SymmetricOperator& a, const ToleranceConfig& cfg = {}) {
  const EigenSystem es = eig(a);
  const double floor = cfg.tol_psd * std::max(1.0, spectral_radius(es));
  if (es.values[es.values.size() - 1] <= floor) {
    throw Error(ErrorKind::NotInvertible, "operator is not positive definite");
  }
  return spectral_map(es, [](double v) { return 1.0 / std::sqrt(v); });
}

/// Inverse of a positive definite operator.
inline SymmetricOperator inv_pd(const SymmetricOperator& a, const ToleranceConfig& cfg = {}) {
  const EigenSystem es = eig(a);
  const double floor = cfg.tol_psd * std::max(1.0, spectral_radius(es));
  if (es.values[es.values.size() - 1] <= floor) {
    throw Error(ErrorKind::NotInvertible, "operator is not positive definite");
  }
  return spectral_map(es, [](double v) { return 1.0 / v; });
}

/// Zero out slightly negative eigenvalues. Returns the input untouched when
/// it is already PSD so exact inputs stay exact.
inline SymmetricOperator psd_clamp(const SymmetricOperator& a, const ToleranceConfig& cfg = {}) {
  const EigenSystem es = eig(a);
  const double floor = -cfg.tol_psd * std::max(1.0, spectral_radius(es));
  const double lowest = es.values[es.values.size() - 1];
  if (lowest < floor) throw Error(ErrorKind::NotPSD, "operator has a negative eigenvalue " + std::to_string(lowest));
  if (lowest >= 0.0) return a;
  return spectral_map(es, [](double v) { return v < 0.0 ? 0.0 : v; });
}

inline bool is_psd(const SymmetricOperator& a, const ToleranceConfig& cfg = {}) {
  const EigenSystem es = eig(a);
  return es.values[es.values.size() - 1] >= -cfg.tol_psd * std::max(1.0, spectral_radius(es));
}

}  // namespace etf
