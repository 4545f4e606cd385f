// Copyright 2026 The obbpl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>

#include "obbpl/geometry.hpp"
#include "obbpl/mask.hpp"

namespace obbpl {

/// Centered second moments of a point set.
struct Moment2x2 {
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
};

Moment2x2 second_moments(std::span<const Point2> points, Point2 center);

/// Closed-form eigen-decomposition of the symmetric 2x2 moment matrix.
struct PrincipalAxes {
  double lambda_major = 0.0;
  double lambda_minor = 0.0;
  /// Direction of the major eigenvector, in [-pi/2, pi/2).
  double angle = 0.0;
};

PrincipalAxes principal_axes(const Moment2x2& m) noexcept;

/// Eigenvalue ratios at or below 1 + this are treated as isotropic.
inline constexpr double kIsotropyEpsilon = 0.05;

/// Major-axis angle, or nullopt when the moments are (near) isotropic.
std::optional<double> axis_from_moments(const Moment2x2& m,
                                        double isotropy_eps = kIsotropyEpsilon) noexcept;

/// Symmetry-axis direction of the mask pixel set: the major eigenvector of
/// its centered scatter matrix. Throws kIsotropic for near-circular shapes
/// and kEmptyMask for empty masks.
double symmetry_axis(const BinaryMask& mask, double isotropy_eps = kIsotropyEpsilon);

enum class ConversionKind { kMinimumOnly, kSymmetryAxis };

const char* to_string(ConversionKind kind) noexcept;

/// How masks become boxes. With `per_category` empty the `fallback` kind is
/// used everywhere; otherwise each listed category uses its own kind and
/// unlisted categories use `fallback`.
struct ConversionMode {
  ConversionKind fallback = ConversionKind::kMinimumOnly;
  std::map<std::string, ConversionKind> per_category;

  static ConversionMode minimum_only() { return {}; }
  static ConversionMode symmetry_axis() { return {ConversionKind::kSymmetryAxis, {}}; }
  /// Symmetry axis for plane-like and helicopter-like categories, minimum
  /// rectangle for everything else.
  static ConversionMode default_per_category();

  ConversionKind kind_for(const std::string& category) const;

  friend bool operator==(const ConversionMode&, const ConversionMode&) = default;
};

struct MaskConversion {
  OrientedBox box;
  ConversionKind requested = ConversionKind::kMinimumOnly;
  ConversionKind used = ConversionKind::kMinimumOnly;
  /// Symmetry axis was requested but the shape was isotropic.
  bool isotropic_fallback = false;
  /// Pixel centers were collinear; the thin side was set to one pixel.
  bool degenerate = false;
};

/// Circumscribed box of `points` whose `w` side runs along `angle`.
OrientedBox box_at_angle(std::span<const Point2> points, double angle);

/// Converts a mask to an oriented box covering every set pixel center.
MaskConversion obb_from_mask(const BinaryMask& mask, const ConversionMode& mode,
                             const std::string& category = {});

struct AmbiguityReport {
  double w = 0.0;
  double h = 0.0;
  double alpha_ratio = 0.0;
  double diagonal_d = 0.0;
  bool min_rect_may_differ = false;
};

/// For a symmetric object with box w x h and tangent intersection ratio
/// `alpha_ratio`, the 45-degree square with diagonal d = w + alpha*h can be
/// no larger than the oriented box exactly when d^2 <= 2wh.
AmbiguityReport ambiguity_analysis(double w, double h, double alpha_ratio);

}  // namespace obbpl
