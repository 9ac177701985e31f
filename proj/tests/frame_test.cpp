#include <gtest/gtest.h>

#include <cmath>

#include "etf/ellipsoid.hpp"
#include "etf/frame.hpp"
#include "etf/synthesis.hpp"
#include "test_support.hpp"

namespace etf {
namespace {

using testing::vec;

const double kRoot3Half = std::sqrt(3.0) / 2.0;

Frame mercedes() { return Frame{2, {vec({0.0, 1.0}), vec({-kRoot3Half, -0.5}), vec({kRoot3Half, -0.5})}, ""}; }
Frame basis2() { return Frame{2, {vec({1.0, 0.0}), vec({0.0, 1.0})}, ""}; }
Frame doubled_e1() { return Frame{2, {vec({1.0, 0.0}), vec({1.0, 0.0}), vec({0.0, 1.0})}, ""}; }

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::InvalidInput;
}

TEST(FrameOperator, Examples) {
  EXPECT_LE((frame_operator(mercedes()).matrix() - 1.5 * Matrix::Identity(2, 2)).norm(), 1e-15);
  EXPECT_EQ(frame_operator(basis2()).matrix(), Matrix::Identity(2, 2));
  EXPECT_EQ(frame_operator(doubled_e1()).matrix(), SymmetricOperator::diagonal({2.0, 1.0}).matrix());
}

TEST(FrameOperator, MatchesTermwiseSum) {
  testing::Rng rng(61);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = testing::uniform_int(rng, 1, 6);
    const int m = testing::uniform_int(rng, 1, 12);
    Frame f{static_cast<std::size_t>(n), {}, ""};
    for (int j = 0; j < m; ++j) f.vectors.push_back(Vector::NullaryExpr(n, [&] { return testing::uniform(rng, -2, 2); }));
    const Matrix s = frame_operator(f).matrix();
    EXPECT_LE((s - testing::frame_operator_loops(f.vectors, n)).norm(), 1e-12);
    const Vector x = Vector::NullaryExpr(n, [&] { return testing::uniform(rng, -1, 1); });
    EXPECT_NEAR(x.dot(s * x), testing::frame_sum(f.vectors, x), 1e-11);
  }
}

TEST(FrameOperator, Rejections) {
  EXPECT_EQ(kind_of([] { frame_operator(Frame{2, {}, ""}); }), ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([] { frame_operator(Frame{2, {vec({1.0, 0.0}), vec({1.0})}, ""}); }), ErrorKind::InvalidInput);
}

TEST(FrameBounds, Examples) {
  const FrameReport m = frame_bounds(mercedes());
  EXPECT_NEAR(m.lower_bound, 1.5, 1e-15);
  EXPECT_NEAR(m.upper_bound, 1.5, 1e-15);
  EXPECT_TRUE(m.tight);
  ASSERT_TRUE(m.frame_bound.has_value());
  EXPECT_NEAR(*m.frame_bound, 1.5, 1e-15);
  EXPECT_FALSE(m.parseval);

  const FrameReport b = frame_bounds(basis2());
  EXPECT_EQ(b.lower_bound, 1.0);
  EXPECT_EQ(b.upper_bound, 1.0);
  EXPECT_TRUE(b.parseval);

  const FrameReport s = frame_bounds(Frame{2, {vec({1.0, 0.0}), vec({0.0, 2.0})}, ""});
  EXPECT_EQ(s.lower_bound, 1.0);
  EXPECT_EQ(s.upper_bound, 4.0);
  EXPECT_FALSE(s.tight);
  EXPECT_FALSE(s.frame_bound.has_value());
}

TEST(FrameBounds, IncompleteFrame) {
  const FrameReport r = frame_bounds(Frame{2, {vec({1.0, 0.0}), vec({1.0, 0.0})}, ""});
  EXPECT_FALSE(r.complete);
  EXPECT_FALSE(r.tight);
  EXPECT_EQ(r.lower_bound, 0.0);
}

TEST(FrameBounds, ReportInvariants) {
  testing::Rng rng(67);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = testing::uniform_int(rng, 1, 5);
    Frame f{static_cast<std::size_t>(n), {}, ""};
    for (int j = 0; j < n + 2; ++j) f.vectors.push_back(Vector::NullaryExpr(n, [&] { return testing::uniform(rng, -1, 1); }));
    const FrameReport r = frame_bounds(f);
    EXPECT_LE(0.0, r.lower_bound);
    EXPECT_LE(r.lower_bound, r.upper_bound);
    if (r.parseval) EXPECT_TRUE(r.tight);
  }
}

TEST(Parsevalize, Examples) {
  const Frame m = parsevalize(mercedes());
  const Frame src = mercedes();
  for (std::size_t j = 0; j < 3; ++j) EXPECT_LE((m.vectors[j] - std::sqrt(2.0 / 3.0) * src.vectors[j]).norm(), 1e-15);
  EXPECT_LE(tightness_residual(m, 1.0), 1e-14);

  const Frame b = parsevalize(basis2());
  EXPECT_EQ(b.vectors[0], vec({1.0, 0.0}));
  EXPECT_EQ(b.vectors[1], vec({0.0, 1.0}));

  const Frame d = parsevalize(doubled_e1());
  EXPECT_LE((d.vectors[0] - vec({1.0 / std::sqrt(2.0), 0.0})).norm(), 1e-15);
  EXPECT_LE((d.vectors[1] - vec({1.0 / std::sqrt(2.0), 0.0})).norm(), 1e-15);
  EXPECT_LE((d.vectors[2] - vec({0.0, 1.0})).norm(), 1e-15);
  EXPECT_TRUE(frame_bounds(d).parseval);
}

TEST(Parsevalize, IncompleteThrows) {
  EXPECT_EQ(kind_of([] { parsevalize(Frame{2, {vec({1.0, 0.0}), vec({1.0, 0.0})}, ""}); }), ErrorKind::NotInvertible);
}

TEST(Parsevalize, Idempotent) {
  testing::Rng rng(71);
  const ToleranceConfig cfg;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = testing::uniform_int(rng, 1, 6);
    Frame f{static_cast<std::size_t>(n), {}, ""};
    for (int j = 0; j < n + testing::uniform_int(rng, 0, 5); ++j)
      f.vectors.push_back(Vector::NullaryExpr(n, [&] { return testing::uniform(rng, -1, 1); }));
    if (rank_eps(frame_operator(f), cfg) < static_cast<std::size_t>(n)) continue;
    const Frame once = parsevalize(f, cfg);
    const Frame twice = parsevalize(once, cfg);
    for (std::size_t j = 0; j < f.size(); ++j) EXPECT_LE((once.vectors[j] - twice.vectors[j]).norm(), cfg.tol_recon);
    EXPECT_TRUE(frame_bounds(once, cfg).parseval);
  }
}

SymmetricOperator diag_inv_sqrt(std::initializer_list<double> a) {
  Vector v = vec(a);
  return SymmetricOperator::diagonal(v.cwiseSqrt().cwiseInverse());
}

TEST(EtfSynthesize, SphereThreeVectors) {
  const Ellipsoid e = Ellipsoid::from_operator(SymmetricOperator::identity(2));
  const EtfResult r = etf_synthesize(e, 3);
  EXPECT_NEAR(r.frame_bound, 1.5, 1e-15);
  ASSERT_EQ(r.frame.size(), 3u);
  EXPECT_LE(tightness_residual(r.frame, 1.5), 1e-12);
  EXPECT_LE(max_membership(e, r.frame), 1e-12);
}

TEST(EtfSynthesize, EllipseThreeVectors) {
  const SymmetricOperator t = diag_inv_sqrt({1.5, 0.5});
  const Ellipsoid e = Ellipsoid::from_operator(t);
  const EtfResult r = etf_synthesize(e, 3);
  EXPECT_NEAR(r.frame_bound, 1.5, 1e-15);
  EXPECT_LE(tightness_residual(r.frame, 1.5), 1e-12);
  EXPECT_LE(max_membership(e, r.frame), 1e-12);
  // The pre-images T⁻¹u_j decompose R = K·T⁻² = diag(9/4, 3/4).
  const Matrix t_inv = t.matrix().inverse();
  Matrix rsum = Matrix::Zero(2, 2);
  for (const Vector& u : r.frame.vectors) rsum += (t_inv * u) * (t_inv * u).transpose();
  EXPECT_LE((rsum - SymmetricOperator::diagonal({2.25, 0.75}).matrix()).norm(), 1e-12);
}

TEST(EtfSynthesize, EllipseParsevalBasis) {
  const Ellipsoid e = Ellipsoid::from_operator(diag_inv_sqrt({1.5, 0.5}));
  const EtfResult r = etf_synthesize(e, 2);
  EXPECT_NEAR(r.frame_bound, 1.0, 1e-15);
  ASSERT_EQ(r.frame.size(), 2u);
  EXPECT_NEAR(r.frame.vectors[0].dot(r.frame.vectors[1]), 0.0, 1e-12);
  EXPECT_TRUE(frame_bounds(r.frame).parseval);
  EXPECT_LE(max_membership(e, r.frame), 1e-12);
}

TEST(EtfSynthesize, Rejections) {
  EXPECT_EQ(kind_of([] { etf_synthesize(Ellipsoid::from_operator(SymmetricOperator::identity(2)), 1); }),
            ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([] { etf_synthesize(Ellipsoid::from_axes(vec({2.0, 0.0})), 3); }), ErrorKind::NotInvertible);
}

TEST(EtfSynthesize, RandomOperators) {
  testing::Rng rng(73);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = testing::uniform_int(rng, 1, 8);
    const SymmetricOperator t = testing::random_pd(rng, n, 1e3);
    const Ellipsoid e = Ellipsoid::from_operator(t);
    const Matrix t_inv = t.matrix().inverse();
    const double trace_inv2 = (t_inv * t_inv).trace();
    for (int k = n; k <= n + 5; ++k) {
      const EtfResult r = etf_synthesize(e, k);
      ASSERT_EQ(r.frame.size(), static_cast<std::size_t>(k));
      const double expected = k / trace_inv2;
      EXPECT_NEAR(r.frame_bound, expected, 1e-10 * expected);
      EXPECT_LE(tightness_residual(r.frame, expected), 1e-8);
      EXPECT_LE(max_membership(e, r.frame), 1e-9);
    }
  }
}

// Both constructions land on the same bound k/Σa even though the vectors differ.
TEST(EtfSynthesize, RouteEquivalence) {
  testing::Rng rng(79);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = testing::uniform_int(rng, 1, 8);
    Vector a(n);
    for (int i = 0; i < n; ++i) a[i] = testing::uniform(rng, 0.1, 4.0);
    const Ellipsoid axes = Ellipsoid::from_axes(a);
    const Ellipsoid op = to_operator(axes);
    for (int k = n; k <= n + 3; ++k) {
      const FrameReport ra = frame_bounds(tight_frame_on_ellipsoid(a, k));
      const EtfResult rb = etf_synthesize(op, k);
      const FrameReport rbm = frame_bounds(rb.frame);
      ASSERT_TRUE(ra.frame_bound && rbm.frame_bound);
      const double expected = k / a.sum();
      EXPECT_NEAR(*ra.frame_bound, expected, 1e-10 * expected);
      EXPECT_NEAR(*rbm.frame_bound, expected, 1e-10 * expected);
      EXPECT_NEAR(*ra.frame_bound, *rbm.frame_bound, 1e-10 * expected);
    }
  }
}

TEST(SphericalFrame, Diag21LengthThree) {
  const SphericalResult r = spherical_frame(SymmetricOperator::diagonal({2.0, 1.0}), 3);
  EXPECT_NEAR(r.radius, 1.0, 1e-15);
  ASSERT_EQ(r.frame.size(), 3u);
  int e1 = 0, e2 = 0;
  for (const Vector& x : r.frame.vectors) {
    if (testing::sign_free_distance(x, vec({1.0, 0.0})) < 1e-10) ++e1;
    if (testing::sign_free_distance(x, vec({0.0, 1.0})) < 1e-10) ++e2;
  }
  EXPECT_EQ(e1, 2);
  EXPECT_EQ(e2, 1);
}

TEST(SphericalFrame, IdentityGivesOrthonormalBasis) {
  for (int n = 1; n <= 5; ++n) {
    const SphericalResult r = spherical_frame(SymmetricOperator::identity(n), n);
    EXPECT_NEAR(r.radius, 1.0, 1e-15);
    for (std::size_t i = 0; i < r.frame.size(); ++i)
      for (std::size_t j = 0; j < r.frame.size(); ++j)
        EXPECT_NEAR(r.frame.vectors[i].dot(r.frame.vectors[j]), i == j ? 1.0 : 0.0, 1e-12);
  }
}

TEST(SphericalFrame, Diag21LengthSix) {
  const SymmetricOperator s = SymmetricOperator::diagonal({2.0, 1.0});
  const SphericalResult r = spherical_frame(s, 6);
  EXPECT_NEAR(r.radius, std::sqrt(0.5), 1e-15);
  ASSERT_EQ(r.frame.size(), 6u);
  for (const Vector& x : r.frame.vectors) EXPECT_NEAR(x.norm(), std::sqrt(0.5), 1e-12);
  EXPECT_LE((frame_operator(r.frame).matrix() - s.matrix()).norm(), 1e-12);
}

TEST(SphericalFrame, Rejections) {
  EXPECT_EQ(kind_of([] { spherical_frame(SymmetricOperator::identity(3), 2); }), ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([] { spherical_frame(SymmetricOperator::diagonal({1.0, 0.0}), 2); }), ErrorKind::NotInvertible);
}

TEST(SphericalFrame, RandomOperators) {
  testing::Rng rng(83);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = testing::uniform_int(rng, 1, 8);
    const SymmetricOperator s = testing::random_pd(rng, n, 1e3);
    for (int k = n; k <= 2 * n; ++k) {
      const SphericalResult r = spherical_frame(s, k);
      const double radius = std::sqrt(trace(s) / k);
      EXPECT_NEAR(r.radius, radius, 1e-15 * std::max(1.0, radius));
      for (const Vector& x : r.frame.vectors) EXPECT_NEAR(x.norm(), radius, 1e-10);
      EXPECT_LE((testing::frame_operator_loops(r.frame.vectors, n) - s.matrix()).norm(), 1e-8);
    }
  }
}

}  // namespace
}  // namespace etf
