#pragma once

#include <cmath>
#include <cstddef>

#include "etf/ellipsoid.hpp"
#include "etf/error.hpp"
#include "etf/frame.hpp"
#include "etf/operator.hpp"
#include "etf/projection.hpp"

namespace etf {

struct EtfResult {
  Frame frame;
  double frame_bound = 0.0;  // k / trace(T⁻²)
};

/// Tight frame of length k on T·S¹ through a rank-one decomposition of
/// R = K·T⁻², K = k / trace(T⁻²): if R = Σ x_j ⊗ x_j then {T x_j} is tight
/// with bound K and every T x_j lies on the surface.
inline EtfResult etf_synthesize(const Ellipsoid& e, std::size_t k, const ToleranceConfig& cfg = {}) {
  const Ellipsoid op = to_operator(e, cfg);
  const SymmetricOperator& t = op.as_operator().shape;
  const std::size_t n = t.dim();
  if (k < n) throw Error(ErrorKind::InvalidInput, "frame length must be at least the dimension");

  const SymmetricOperator t_inv = inv_pd(t, cfg);
  const SymmetricOperator t_inv2(t_inv.matrix() * t_inv.matrix());
  const double bound = static_cast<double>(k) / trace(t_inv2);
  // Rescale so the trace is k to rounding before the integer-trace check.
  SymmetricOperator r = t_inv2 * bound;
  r = r * (static_cast<double>(k) / trace(r));

  const ProjectionDecomposition dec = decompose_rank_one(r, k, cfg);
  EtfResult out{Frame{n, {}, "etf"}, bound};
  out.frame.vectors.reserve(k);
  for (const Vector& x : dec.factors) out.frame.vectors.push_back(t.matrix() * x);
  return out;
}

struct SphericalResult {
  Frame frame;
  double radius = 0.0;  // √(trace(S)/k)
};

/// Equal-norm frame of length k whose frame operator is S.
inline SphericalResult spherical_frame(const SymmetricOperator& s, std::size_t k, const ToleranceConfig& cfg = {}) {
  const std::size_t n = s.dim();
  if (k < n) throw Error(ErrorKind::InvalidInput, "frame length must be at least the dimension");
  const EigenSystem es = eig(s);
  if (es.values[es.values.size() - 1] <= cfg.tol_psd * std::max(1.0, spectral_radius(es))) {
    throw Error(ErrorKind::NotInvertible, "frame operator must be positive definite");
  }

  const double c = static_cast<double>(k) / trace(s);
  SymmetricOperator scaled = s * c;
  if (norm(scaled) <= 1.0 + cfg.tol_recon && !is_projection(scaled, cfg)) {
    throw Error(ErrorKind::NotDecomposable, "FailNormCondition", "scaled operator has norm at most 1");
  }
  scaled = scaled * (static_cast<double>(k) / trace(scaled));

  const ProjectionDecomposition dec = decompose_rank_one(scaled, k, cfg);
  SphericalResult out{Frame{n, {}, "spherical"}, std::sqrt(trace(s) / static_cast<double>(k))};
  out.frame.vectors.reserve(k);
  const double shrink = 1.0 / std::sqrt(c);
  for (const Vector& x : dec.factors) out.frame.vectors.push_back(shrink * x);
  return out;
}

}  // namespace etf
