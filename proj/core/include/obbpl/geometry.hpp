// Copyright 2026 The obbpl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <numbers>
#include <span>
#include <vector>

namespace obbpl {

/// A point in image coordinates: x to the right, y downward, pixel centers at
/// integer + 0.5.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Rotated rectangle. `angle` is in radians, measured from +x toward +y, and
/// the box's `w` side runs along (cos angle, sin angle).
struct OrientedBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
  double angle = 0.0;

  double area() const noexcept { return w * h; }

  friend bool operator==(const OrientedBox&, const OrientedBox&) = default;
};

struct AxisAlignedBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const noexcept { return x2 - x1; }
  double height() const noexcept { return y2 - y1; }
  bool contains(Point2 p) const noexcept {
    return p.x >= x1 && p.x <= x2 && p.y >= y1 && p.y <= y2;
  }

  friend bool operator==(const AxisAlignedBox&, const AxisAlignedBox&) = default;
};

/// Convex polygon with positive shoelace area and no collinear vertices.
class ConvexPolygon {
 public:
  /// Validates the invariants; throws kDegenerateGeometry otherwise.
  explicit ConvexPolygon(std::vector<Point2> vertices);

  const std::vector<Point2>& vertices() const noexcept { return vertices_; }
  std::size_t size() const noexcept { return vertices_.size(); }
  double area() const noexcept;

 private:
  std::vector<Point2> vertices_;
};

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = std::numbers::pi / 2.0;
inline constexpr double kQuarterPi = std::numbers::pi / 4.0;

/// Edge tolerance used by polygon clipping.
inline constexpr double kClipEpsilon = 1e-9;

/// Throws kInvalidInput unless every field is finite and w, h > 0.
void validate(const OrientedBox& box);

/// Wraps an angle into [-pi/2, pi/2).
double wrap_half_turn(double angle) noexcept;

/// Wraps an angle into [-pi/4, pi/4).
double wrap_quarter_turn(double angle) noexcept;

/// Smallest absolute difference between two box angles modulo pi/2.
double angle_distance_mod_quarter(double a, double b) noexcept;

/// Smallest absolute difference between two axis directions modulo pi.
double angle_distance_mod_half(double a, double b) noexcept;

/// le90 canonical form: w >= h, angle in [-pi/2, pi/2); squares get an
/// angle in [-pi/4, pi/4). Describes the same rectangle as the input.
OrientedBox canonical(const OrientedBox& box);

/// Point of the box scaled by `scale` about its center at lattice offset
/// (i, j): cx + (scale*w/2)*cos(a)*i - (scale*h/2)*sin(a)*j, and the
/// analogous y. i, j in {-1, 0, 1} give corners, edge midpoints and center.
Point2 box_point(const OrientedBox& box, int i, int j, double scale = 1.0) noexcept;

/// The four corners of `box` scaled about its center, in positive
/// shoelace order.
std::array<Point2, 4> obb_corners(const OrientedBox& box, double scale = 1.0);

/// Andrew's monotone chain. Collinear and duplicate points are dropped.
ConvexPolygon convex_hull(std::span<const Point2> points);

/// Minimum-area enclosing rectangle via rotating calipers over the hull.
/// The result is canonical; equal-area candidates resolve to the smallest
/// canonical angle.
OrientedBox min_area_rect(std::span<const Point2> points);

/// Clips `subject` against every edge of the convex `clip` polygon
/// (Sutherland-Hodgman). Both inputs must be in positive shoelace order.
std::vector<Point2> clip_convex(std::span<const Point2> subject,
                                std::span<const Point2> clip);

/// Shoelace area, positive for positive orientation.
double signed_area(std::span<const Point2> polygon) noexcept;

/// Exact intersection-over-union of two rotated rectangles.
double rotated_iou(const OrientedBox& a, const OrientedBox& b);

/// Tight axis-aligned bounds of a point set.
AxisAlignedBox bounds(std::span<const Point2> points);

}  // namespace obbpl
