// Copyright 2026 The obbpl Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "obbpl/error.hpp"
#include "obbpl/fixtures.hpp"
#include "obbpl/symmetry.hpp"
#include "oracles.hpp"

namespace obbpl {
namespace {

constexpr double kDeg = kPi / 180.0;

BinaryMask translated(const BinaryMask& m, int dx, int dy) {
  BinaryMask out(m.width(), m.height());
  for (int r = 0; r < m.height(); ++r) {
    for (int c = 0; c < m.width(); ++c) {
      if (m.at(c, r) && out.in_bounds(c + dx, r + dy)) out.set(c + dx, r + dy);
    }
  }
  return out;
}

TEST(SecondMoments, MirrorSymmetryKillsCrossTerm) {
  const std::vector<Point2> pts{{-1, 0}, {1, 0}, {-2, 3}, {2, 3}, {0, 5}};
  EXPECT_NEAR(second_moments(pts, {0, 2.2}).sxy, 0.0, 1e-12);
}

TEST(SecondMoments, UnitSquareCorners) {
  const std::vector<Point2> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const Moment2x2 m = second_moments(pts, {0.5, 0.5});
  EXPECT_DOUBLE_EQ(m.sxx, 1.0);
  EXPECT_DOUBLE_EQ(m.syy, 1.0);
  EXPECT_DOUBLE_EQ(m.sxy, 0.0);
}

TEST(SecondMoments, MatchesDirectSummation) {
  std::mt19937_64 rng(61);
  std::normal_distribution<double> g(0, 5);
  for (int t = 0; t < 20; ++t) {
    std::vector<Point2> pts;
    for (int i = 0; i < 50; ++i) pts.push_back({g(rng), 0.5 * g(rng) + 2});
    const Point2 c{0.3, -0.7};
    const Moment2x2 m = second_moments(pts, c);
    const auto o = oracle::direct_moments(pts, c);
    EXPECT_NEAR(m.sxx, o.sxx, 1e-9 * o.sxx);
    EXPECT_NEAR(m.sxy, o.sxy, 1e-9 * (o.sxx + o.syy));
    EXPECT_NEAR(m.syy, o.syy, 1e-9 * o.syy);
    EXPECT_GE(m.sxx * m.syy, m.sxy * m.sxy);
  }
}

TEST(SecondMoments, NeedsTwoPoints) {
  const std::vector<Point2> one{{1, 1}};
  try {
    second_moments(one, {0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateGeometry);
  }
}

TEST(PrincipalAxes, ClosedForm) {
  const PrincipalAxes a = principal_axes({3, 0, 1});
  EXPECT_DOUBLE_EQ(a.lambda_major, 3);
  EXPECT_DOUBLE_EQ(a.lambda_minor, 1);
  EXPECT_DOUBLE_EQ(a.angle, 0);
  const PrincipalAxes b = principal_axes({2, 1, 2});
  EXPECT_NEAR(b.angle, kQuarterPi, 1e-15);
  EXPECT_NEAR(b.lambda_major, 3, 1e-12);
  EXPECT_NEAR(b.lambda_minor, 1, 1e-12);
}

TEST(AxisFromMoments, IsotropyThreshold) {
  EXPECT_FALSE(axis_from_moments({1.0, 0, 1.0}).has_value());
  EXPECT_FALSE(axis_from_moments({1.05, 0, 1.0}).has_value());
  EXPECT_TRUE(axis_from_moments({1.06, 0, 1.0}).has_value());
}

TEST(SymmetryAxis, AxisAlignedRectangleIsZero) {
  const BinaryMask m = oracle::rasterized_box({150, 150, 201, 101, 0}, 300, 300);
  EXPECT_NEAR(symmetry_axis(m), 0.0, 1e-12);
}

TEST(SymmetryAxis, RotatedRectangleMatchesVarianceSweep) {
  const BinaryMask m = oracle::rasterized_box({150, 150, 201, 101, 30 * kDeg}, 300, 300);
  const double sweep = oracle::sweep_max_variance_angle(pixel_points(m));
  EXPECT_LT(oracle::axis_distance(symmetry_axis(m), 30 * kDeg, kPi), 1 * kDeg);
  EXPECT_LT(oracle::axis_distance(symmetry_axis(m), sweep, kPi), 0.1 * kDeg);
}

TEST(SymmetryAxis, DiskIsIsotropic) {
  BinaryMask m(101, 101);
  for (int r = 0; r < 101; ++r) {
    for (int c = 0; c < 101; ++c) {
      if (std::hypot(c + 0.5 - 50.5, r + 0.5 - 50.5) <= 40) m.set(c, r);
    }
  }
  try {
    symmetry_axis(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIsotropic);
  }
}

TEST(SymmetryAxis, EquivariantUnderRotation) {
  for (double phi : {0.0, 10.0, 37.0, 80.0, 125.0, 170.0}) {
    const BinaryMask m = oracle::rasterized_box({160, 160, 180, 70, (12 + phi) * kDeg}, 320, 320);
    EXPECT_LT(oracle::axis_distance(symmetry_axis(m), (12 + phi) * kDeg, kPi), 1 * kDeg) << phi;
  }
}

TEST(SymmetryAxis, TranslationInvariant) {
  std::mt19937_64 rng(67);
  for (int t = 0; t < 10; ++t) {
    BinaryMask m = oracle::random_blob(rng, 64, 64);
    // Keep the blob off the border so translation does not clip it.
    BinaryMask padded(96, 96);
    for (int r = 0; r < 64; ++r) {
      for (int c = 0; c < 64; ++c) padded.set(c + 16, r + 16, m.at(c, r));
    }
    const auto a = axis_from_moments(second_moments(pixel_points(padded), centroid(padded)));
    const BinaryMask moved = translated(padded, 7, -5);
    const auto b = axis_from_moments(second_moments(pixel_points(moved), centroid(moved)));
    ASSERT_EQ(a.has_value(), b.has_value());
    if (a) {
      EXPECT_NEAR(*a, *b, 1e-9);
    }
  }
}

TEST(ObbFromMask, AxisAlignedRectangleEitherMode) {
  const BinaryMask m = oracle::rasterized_box({50, 40, 60, 30, 0}, 100, 80);
  for (const ConversionMode& mode : {ConversionMode::minimum_only(), ConversionMode::symmetry_axis()}) {
    const MaskConversion c = obb_from_mask(m, mode);
    EXPECT_NEAR(c.box.area(), 59.0 * 29.0, 0.01 * 59 * 29);
    EXPECT_NEAR(c.box.cx, 50, 1e-9);
    EXPECT_NEAR(c.box.cy, 40, 1e-9);
    EXPECT_NEAR(oracle::axis_distance(c.box.angle, 0, kHalfPi), 0, 1e-9);
    EXPECT_FALSE(c.isotropic_fallback);
  }
}

TEST(ObbFromMask, CrossShowsMinimumRectangleAmbiguity) {
  const double axis = 20 * kDeg;
  ShapeParams cross{FixtureShape::kCross, 200, 200, 160, 152, axis, 0.2};
  const BinaryMask m = rasterize(cross, 400, 400);
  const MaskConversion sym = obb_from_mask(m, ConversionMode::symmetry_axis());
  const MaskConversion min = obb_from_mask(m, ConversionMode::minimum_only());
  EXPECT_LT(oracle::axis_distance(sym.box.angle, axis, kPi), 1 * kDeg);
  EXPECT_NEAR(oracle::axis_distance(min.box.angle, axis, kHalfPi), 45 * kDeg, 3 * kDeg);
  EXPECT_LT(min.box.area(), sym.box.area());
}

TEST(ObbFromMask, DiskFallsBackAndFlags) {
  BinaryMask m(64, 64);
  for (int r = 0; r < 64; ++r) {
    for (int c = 0; c < 64; ++c) {
      if (std::hypot(c + 0.5 - 32, r + 0.5 - 32) <= 25) m.set(c, r);
    }
  }
  const MaskConversion c = obb_from_mask(m, ConversionMode::symmetry_axis());
  EXPECT_TRUE(c.isotropic_fallback);
  EXPECT_EQ(c.requested, ConversionKind::kSymmetryAxis);
  EXPECT_EQ(c.used, ConversionKind::kMinimumOnly);
  EXPECT_EQ(c.box, obb_from_mask(m, ConversionMode::minimum_only()).box);
}

TEST(ObbFromMask, ContainmentAndAreaOrderingOnRandomBlobs) {
  std::mt19937_64 rng(71);
  for (int t = 0; t < 100; ++t) {
    const BinaryMask m = oracle::random_blob(rng, 48, 40);
    const MaskConversion sym = obb_from_mask(m, ConversionMode::symmetry_axis());
    const MaskConversion min = obb_from_mask(m, ConversionMode::minimum_only());
    EXPECT_GE(sym.box.area(), min.box.area() * (1 - 1e-9));
    for (const Point2& p : pixel_points(m)) {
      EXPECT_TRUE(oracle::box_contains(sym.box, p, 1e-6));
      EXPECT_TRUE(oracle::box_contains(min.box, p, 1e-6));
    }
  }
}

TEST(ObbFromMask, CollinearMasksAreDegenerate) {
  BinaryMask line(10, 10);
  for (int c = 2; c < 8; ++c) line.set(c, 4);
  const MaskConversion c = obb_from_mask(line, ConversionMode::minimum_only());
  EXPECT_TRUE(c.degenerate);
  EXPECT_NEAR(c.box.w, 5.0, 1e-12);
  EXPECT_NEAR(c.box.h, 1.0, 1e-12);

  BinaryMask dot(5, 5);
  dot.set(2, 2);
  const MaskConversion d = obb_from_mask(dot, ConversionMode::symmetry_axis());
  EXPECT_TRUE(d.degenerate);
  EXPECT_EQ(d.box.cx, 2.5);
}

TEST(ObbFromMask, EmptyMaskThrows) {
  EXPECT_THROW(obb_from_mask(BinaryMask(4, 4), ConversionMode::minimum_only()), Error);
}

TEST(ConversionMode, PerCategoryDispatch) {
  const ConversionMode mode = ConversionMode::default_per_category();
  EXPECT_EQ(mode.kind_for("plane"), ConversionKind::kSymmetryAxis);
  EXPECT_EQ(mode.kind_for("helicopter"), ConversionKind::kSymmetryAxis);
  EXPECT_EQ(mode.kind_for("ship"), ConversionKind::kMinimumOnly);
  EXPECT_EQ(mode.kind_for("unknown"), ConversionKind::kMinimumOnly);
}

TEST(Ambiguity, BoundaryAtSqrtTwoMinusOne) {
  const AmbiguityReport r = ambiguity_analysis(1, 1, std::sqrt(2.0) - 1);
  EXPECT_NEAR(r.diagonal_d * r.diagonal_d - 2 * r.w * r.h, 0.0, 1e-9);
  EXPECT_TRUE(r.min_rect_may_differ);
}

TEST(Ambiguity, InsideAndOutside) {
  EXPECT_TRUE(ambiguity_analysis(1, 1, 0.2).min_rect_may_differ);
  EXPECT_DOUBLE_EQ(ambiguity_analysis(1, 1, 0.2).diagonal_d, 1.2);
  EXPECT_FALSE(ambiguity_analysis(1, 1, 0.9).min_rect_may_differ);
}

TEST(Ambiguity, RejectsBadArguments) {
  EXPECT_THROW(ambiguity_analysis(0, 1, 0.1), Error);
  EXPECT_THROW(ambiguity_analysis(1, -1, 0.1), Error);
  EXPECT_THROW(ambiguity_analysis(1, 1, 1.5), Error);
}

}  // namespace
}  // namespace obbpl
