#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "etf/error.hpp"
#include "etf/operator.hpp"

namespace etf {

/// Ordered vectors in ℝ^dim.
struct Frame {
  std::size_t dim = 0;
  std::vector<Vector> vectors;
  std::string label;

  std::size_t size() const noexcept { return vectors.size(); }
};

struct FrameReport {
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  bool tight = false;
  std::optional<double> frame_bound;
  bool parseval = false;
  bool complete = false;
};

/// S = Σ x_j ⊗ x_j
inline SymmetricOperator frame_operator(const Frame& f) {
  if (f.vectors.empty() || f.dim == 0) throw Error(ErrorKind::InvalidInput, "frame is empty");
  const auto n = static_cast<Eigen::Index>(f.dim);
  Matrix s = Matrix::Zero(n, n);
  for (const Vector& x : f.vectors) {
    if (x.size() != n) throw Error(ErrorKind::InvalidInput, "frame vector has the wrong dimension");
    s.noalias() += x * x.transpose();
  }
  return SymmetricOperator(s);
}

/// Optimal frame bounds are the extreme eigenvalues of S. Tightness is judged
/// on their relative spread.
inline FrameReport frame_bounds(const Frame& f, const ToleranceConfig& cfg = {}) {
  const EigenSystem es = eig(frame_operator(f));
  FrameReport rep;
  rep.upper_bound = std::max(0.0, es.values[0]);
  rep.lower_bound = std::max(0.0, es.values[es.values.size() - 1]);
  rep.complete = rank_eps(es, cfg) == f.dim;
  rep.tight = rep.complete && (rep.upper_bound - rep.lower_bound) <= cfg.tol_recon * std::max(1.0, rep.upper_bound);
  if (rep.tight) {
    rep.frame_bound = 0.5 * (rep.lower_bound + rep.upper_bound);
    rep.parseval = std::abs(*rep.frame_bound - 1.0) <= cfg.tol_recon;
  }
  return rep;
}

/// {S^{-1/2} x_j}: the canonical Parseval frame.
inline Frame parsevalize(const Frame& f, const ToleranceConfig& cfg = {}) {
  const SymmetricOperator s = frame_operator(f);
  if (rank_eps(s, cfg) != f.dim) throw Error(ErrorKind::NotInvertible, "frame is not complete");
  const Matrix w = inv_sqrt(s, cfg).matrix();
  Frame out{f.dim, {}, f.label};
  out.vectors.reserve(f.size());
  for (const Vector& x : f.vectors) out.vectors.push_back(w * x);
  return out;
}

/// ‖S − K·I‖_F
inline double tightness_residual(const Frame& f, double k) {
  const Matrix s = frame_operator(f).matrix();
  return (s - k * Matrix::Identity(s.rows(), s.cols())).norm();
}

}  // namespace etf
