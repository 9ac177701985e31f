#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <variant>
#include <vector>

#include "etf/error.hpp"
#include "etf/frame.hpp"
#include "etf/operator.hpp"

namespace etf {

/// Surface T·S¹ for a positive definite T.
struct OperatorForm {
  SymmetricOperator shape;
};

/// Surface {x : Σ a_j ⟨x, b_j⟩² = 1} where b_j are the columns of `basis`.
/// Zero coefficients give a degenerate (unbounded) surface.
struct AxesForm {
  Vector coeffs;
  Matrix basis;
};

class Ellipsoid {
 public:
  static Ellipsoid from_operator(const SymmetricOperator& t, const ToleranceConfig& cfg = {}) {
    const EigenSystem es = eig(t);
    if (es.values[es.values.size() - 1] <= cfg.tol_psd * std::max(1.0, spectral_radius(es))) {
      throw Error(ErrorKind::NotInvertible, "ellipsoid operator must be positive definite");
    }
    return Ellipsoid(OperatorForm{t});
  }

  static Ellipsoid from_axes(const Vector& coeffs) {
    return from_axes(coeffs, Matrix::Identity(coeffs.size(), coeffs.size()));
  }

  static Ellipsoid from_axes(const Vector& coeffs, const Matrix& basis, const ToleranceConfig& cfg = {}) {
    if (coeffs.size() == 0) throw Error(ErrorKind::InvalidInput, "ellipsoid needs at least one coefficient");
    if (basis.rows() != coeffs.size() || basis.cols() != coeffs.size()) {
      throw Error(ErrorKind::InvalidInput, "basis shape does not match the coefficients");
    }
    if (!coeffs.allFinite() || (coeffs.array() < 0.0).any()) {
      throw Error(ErrorKind::InvalidInput, "axis coefficients must be finite and non-negative");
    }
    if (!(coeffs.sum() > 0.0)) throw Error(ErrorKind::InvalidInput, "axis coefficients must not all vanish");
    const Matrix gram = basis.transpose() * basis;
    if ((gram - Matrix::Identity(gram.rows(), gram.cols())).norm() > cfg.tol_recon) {
      throw Error(ErrorKind::InvalidInput, "axis basis is not orthogonal");
    }
    return Ellipsoid(AxesForm{coeffs, basis});
  }

  std::size_t dim() const {
    if (const auto* op = std::get_if<OperatorForm>(&form_)) return op->shape.dim();
    return static_cast<std::size_t>(std::get<AxesForm>(form_).coeffs.size());
  }

  bool is_operator() const noexcept { return std::holds_alternative<OperatorForm>(form_); }
  bool is_axes() const noexcept { return std::holds_alternative<AxesForm>(form_); }

  const OperatorForm& as_operator() const {
    if (!is_operator()) throw Error(ErrorKind::InvalidInput, "ellipsoid is in axis form");
    return std::get<OperatorForm>(form_);
  }
  const AxesForm& as_axes() const {
    if (!is_axes()) throw Error(ErrorKind::InvalidInput, "ellipsoid is in operator form");
    return std::get<AxesForm>(form_);
  }

 private:
  explicit Ellipsoid(std::variant<OperatorForm, AxesForm> form) : form_(std::move(form)) {}

  std::variant<OperatorForm, AxesForm> form_;
};

/// Axis coefficients are the eigenvalues of T⁻², with T's eigenvectors as axes.
inline Ellipsoid to_axes(const Ellipsoid& e, const ToleranceConfig& cfg = {}) {
  if (e.is_axes()) return e;
  const EigenSystem es = eig(e.as_operator().shape);
  const Vector coeffs = es.values.cwiseAbs2().cwiseInverse();
  return Ellipsoid::from_axes(coeffs, es.vectors, cfg);
}

inline Ellipsoid to_operator(const Ellipsoid& e, const ToleranceConfig& cfg = {}) {
  if (e.is_operator()) return e;
  const AxesForm& ax = e.as_axes();
  if ((ax.coeffs.array() <= 0.0).any()) {
    throw Error(ErrorKind::NotInvertible, "degenerate ellipsoid has no operator form");
  }
  const Vector scale = ax.coeffs.cwiseSqrt().cwiseInverse();
  return Ellipsoid::from_operator(SymmetricOperator(ax.basis * scale.asDiagonal() * ax.basis.transpose()), cfg);
}

/// Distance of y from the surface: |Σ a_j⟨y,b_j⟩² − 1| or |‖T⁻¹y‖ − 1|.
inline double membership(const Ellipsoid& e, const Vector& y) {
  if (static_cast<std::size_t>(y.size()) != e.dim()) throw Error(ErrorKind::InvalidInput, "vector dimension mismatch");
  if (e.is_axes()) {
    const AxesForm& ax = e.as_axes();
    const Vector proj = ax.basis.transpose() * y;
    return std::abs(ax.coeffs.dot(proj.cwiseAbs2()) - 1.0);
  }
  const Matrix& t = e.as_operator().shape.matrix();
  return std::abs(t.llt().solve(y).norm() - 1.0);
}

inline double max_membership(const Ellipsoid& e, const Frame& f) {
  double worst = 0.0;
  for (const Vector& y : f.vectors) worst = std::max(worst, membership(e, y));
  return worst;
}

/// One plane rotation of the basis recursion. The slot `i` vector is emitted
/// and slot `j` continues with coefficient `b`.
struct RotationStep {
  std::size_t i = 0;
  std::size_t j = 0;
  double theta = 0.0;
  double b = 0.0;
};

struct RotationPlan {
  std::vector<RotationStep> steps;
  std::size_t last = 0;  // slot left over after the final rotation
};

/// Coefficient recursion behind the orthonormal basis construction. At each
/// level the largest (≥ 1) and smallest (≤ 1) active coefficients are paired,
/// θ solves a_i cos²θ + a_j sin²θ = 1 and slot j inherits
/// b = a_i sin²θ + a_j cos²θ, so the active sum drops by exactly one.
inline RotationPlan rotation_plan(const Vector& a, const ToleranceConfig& cfg = {}) {
  const auto n = static_cast<std::size_t>(a.size());
  if (n == 0) throw Error(ErrorKind::InvalidInput, "no coefficients");
  if (!a.allFinite() || (a.array() < 0.0).any()) {
    throw Error(ErrorKind::InvalidInput, "coefficients must be finite and non-negative");
  }
  if (std::abs(a.sum() - static_cast<double>(n)) > cfg.tol_recon * std::max(1.0, static_cast<double>(n))) {
    throw Error(ErrorKind::InvalidInput, "coefficients must sum to their count");
  }

  std::vector<double> c(a.data(), a.data() + n);
  std::vector<bool> active(n, true);
  RotationPlan plan;
  plan.steps.reserve(n - 1);
  for (std::size_t level = 0; level + 1 < n; ++level) {
    std::size_t hi = n;
    std::size_t lo = n;
    for (std::size_t s = 0; s < n; ++s) {
      if (!active[s]) continue;
      if (hi == n || c[s] > c[hi]) hi = s;
      if (lo == n || c[s] < c[lo]) lo = s;
    }
    if (hi == lo) {
      for (std::size_t s = hi + 1; s < n; ++s) {
        if (active[s]) {
          lo = s;
          break;
        }
      }
    }

    double sin2 = 0.0;
    double cos2 = 1.0;
    const double spread = c[hi] - c[lo];
    if (spread > 0.0) {
      sin2 = std::clamp((c[hi] - 1.0) / spread, 0.0, 1.0);
      cos2 = std::clamp((1.0 - c[lo]) / spread, 0.0, 1.0);
    }
    RotationStep step;
    step.i = hi;
    step.j = lo;
    step.theta = std::atan2(std::sqrt(sin2), std::sqrt(cos2));
    step.b = c[hi] * sin2 + c[lo] * cos2;
    plan.steps.push_back(step);

    c[lo] = step.b;
    active[hi] = false;
  }
  for (std::size_t s = 0; s < n; ++s) {
    if (active[s]) plan.last = s;
  }
  return plan;
}

/// Orthonormal basis of ℝⁿ lying on {Σ a_j x_j² = 1}, for a ≥ 0 with Σa = n.
/// Vectors come out in extraction order.
inline Frame onb_on_ellipsoid(const Vector& a, const ToleranceConfig& cfg = {}) {
  const RotationPlan plan = rotation_plan(a, cfg);
  const auto n = static_cast<Eigen::Index>(a.size());

  // Column m starts as the slot vector emitted at level m; the rotations are
  // then unwound innermost first, v = R_1 ⋯ R_m e_{i_m}.
  Matrix v = Matrix::Zero(n, n);
  for (std::size_t m = 0; m < plan.steps.size(); ++m) {
    v(static_cast<Eigen::Index>(plan.steps[m].i), static_cast<Eigen::Index>(m)) = 1.0;
  }
  v(static_cast<Eigen::Index>(plan.last), n - 1) = 1.0;

  for (auto it = plan.steps.rbegin(); it != plan.steps.rend(); ++it) {
    const double cs = std::cos(it->theta);
    const double sn = std::sin(it->theta);
    const auto i = static_cast<Eigen::Index>(it->i);
    const auto j = static_cast<Eigen::Index>(it->j);
    for (Eigen::Index col = 0; col < n; ++col) {
      const double vi = v(i, col);
      const double vj = v(j, col);
      v(i, col) = cs * vi + sn * vj;
      v(j, col) = -sn * vi + cs * vj;
    }
  }

  Frame out{static_cast<std::size_t>(n), {}, "onb"};
  out.vectors.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index col = 0; col < n; ++col) out.vectors.push_back(v.col(col));
  return out;
}

/// k-vector tight frame on {Σ a_j x_j² = 1} with frame bound k/Σa. The
/// coefficients are padded with zeros to ℝᵏ and rescaled to sum to k; the
/// resulting basis is scaled by √(k/r) and truncated to the first n coordinates.
inline Frame tight_frame_on_ellipsoid(const Vector& a, std::size_t k, const ToleranceConfig& cfg = {}) {
  const auto n = static_cast<std::size_t>(a.size());
  if (n == 0) throw Error(ErrorKind::InvalidInput, "no coefficients");
  if (!a.allFinite() || (a.array() < 0.0).any()) {
    throw Error(ErrorKind::InvalidInput, "coefficients must be finite and non-negative");
  }
  const double r = a.sum();
  if (!(r > 0.0)) throw Error(ErrorKind::InvalidInput, "coefficient sum must be positive");
  if (k < n) throw Error(ErrorKind::InvalidInput, "frame length must be at least the dimension");

  const double ratio = static_cast<double>(k) / r;
  Vector padded = Vector::Zero(static_cast<Eigen::Index>(k));
  padded.head(a.size()) = a * ratio;
  // Absorb rounding in the rescaled sum so the basis recursion sees exactly k.
  padded.head(a.size()) *= static_cast<double>(k) / padded.sum();

  const Frame basis = onb_on_ellipsoid(padded, cfg);
  const double scale = std::sqrt(ratio);
  Frame out{n, {}, "tight-frame"};
  out.vectors.reserve(k);
  for (const Vector& v : basis.vectors) out.vectors.push_back(scale * v.head(a.size()));
  return out;
}

/// Same construction on an ellipsoid in either form; vectors are mapped back
/// through the axis basis.
inline Frame tight_frame_on_ellipsoid(const Ellipsoid& e, std::size_t k, const ToleranceConfig& cfg = {}) {
  const Ellipsoid ax = to_axes(e, cfg);
  const AxesForm& form = ax.as_axes();
  Frame local = tight_frame_on_ellipsoid(form.coeffs, k, cfg);
  for (Vector& u : local.vectors) u = form.basis * u;
  return local;
}

}  // namespace etf
