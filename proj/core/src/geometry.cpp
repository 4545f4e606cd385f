// Copyright 2026 The obbpl Authors
// SPDX-License-Identifier: Apache-2.0

#include "obbpl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

#include "obbpl/error.hpp"

namespace obbpl {

namespace {

double cross(Point2 o, Point2 a, Point2 b) noexcept {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double dot(Point2 a, Point2 b) noexcept { return a.x * b.x + a.y * b.y; }

bool lex_less(Point2 a, Point2 b) noexcept {
  return a.x < b.x || (a.x == b.x && a.y < b.y);
}

// Relative tolerance under which two caliper candidates count as equal area.
constexpr double kAreaTieTolerance = 1e-10;

}  // namespace

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "invalid-input";
    case ErrorKind::kDegenerateGeometry: return "degenerate-geometry";
    case ErrorKind::kEmptyMask: return "empty-mask";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kMissingGroundTruth: return "missing-gt";
    case ErrorKind::kPairing: return "pairing";
    case ErrorKind::kIsotropic: return "isotropic";
  }
  return "unknown";
}

ConvexPolygon::ConvexPolygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) {
    throw Error(ErrorKind::kDegenerateGeometry, "convex polygon needs at least 3 vertices");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double turn = cross(vertices_[i], vertices_[(i + 1) % n], vertices_[(i + 2) % n]);
    if (!(turn > 0.0)) {
      throw Error(ErrorKind::kDegenerateGeometry,
                  "polygon is not strictly convex with positive orientation");
    }
  }
}

double ConvexPolygon::area() const noexcept { return signed_area(vertices_); }

void validate(const OrientedBox& box) {
  if (!std::isfinite(box.cx) || !std::isfinite(box.cy) || !std::isfinite(box.w) ||
      !std::isfinite(box.h) || !std::isfinite(box.angle)) {
    throw Error(ErrorKind::kInvalidInput, "oriented box has non-finite fields");
  }
  if (!(box.w > 0.0) || !(box.h > 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "oriented box must have positive width and height");
  }
}

double wrap_half_turn(double angle) noexcept {
  double r = angle - kPi * std::floor((angle + kHalfPi) / kPi);
  if (r >= kHalfPi) r -= kPi;
  if (r < -kHalfPi) r += kPi;
  return r;
}

double wrap_quarter_turn(double angle) noexcept {
  double r = angle - kHalfPi * std::floor((angle + kQuarterPi) / kHalfPi);
  if (r >= kQuarterPi) r -= kHalfPi;
  if (r < -kQuarterPi) r += kHalfPi;
  return r;
}

double angle_distance_mod_quarter(double a, double b) noexcept {
  return std::abs(wrap_quarter_turn(a - b));
}

double angle_distance_mod_half(double a, double b) noexcept {
  return std::abs(wrap_half_turn(a - b));
}

OrientedBox canonical(const OrientedBox& box) {
  validate(box);
  OrientedBox out = box;
  if (out.w < out.h) {
    std::swap(out.w, out.h);
    out.angle += kHalfPi;
  }
  if (out.w - out.h <= 1e-12 * out.w) {
    out.angle = wrap_quarter_turn(out.angle);
  } else {
    out.angle = wrap_half_turn(out.angle);
  }
  return out;
}

Point2 box_point(const OrientedBox& box, int i, int j, double scale) noexcept {
  const double c = std::cos(box.angle);
  const double s = std::sin(box.angle);
  const double hw = 0.5 * scale * box.w;
  const double hh = 0.5 * scale * box.h;
  return {box.cx + hw * c * i - hh * s * j, box.cy + hw * s * i + hh * c * j};
}

std::array<Point2, 4> obb_corners(const OrientedBox& box, double scale) {
  validate(box);
  if (!std::isfinite(scale) || !(scale > 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "corner scale must be positive and finite");
  }
  return {box_point(box, 1, 1, scale), box_point(box, -1, 1, scale),
          box_point(box, -1, -1, scale), box_point(box, 1, -1, scale)};
}

ConvexPolygon convex_hull(std::span<const Point2> points) {
  for (const Point2& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorKind::kInvalidInput, "convex hull input has non-finite coordinates");
    }
  }
  std::vector<Point2> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), lex_less);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) {
    throw Error(ErrorKind::kDegenerateGeometry, "convex hull needs 3 distinct points");
  }

  std::vector<Point2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Point2& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = pts.size() - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  if (hull.size() < 3) {
    throw Error(ErrorKind::kDegenerateGeometry, "all points are collinear");
  }
  return ConvexPolygon(std::move(hull));
}

OrientedBox min_area_rect(std::span<const Point2> points) {
  const ConvexPolygon hull = convex_hull(points);
  const std::vector<Point2>& v = hull.vertices();
  const std::size_t n = v.size();
  auto at = [&](std::size_t idx) { return v[idx % n]; };

  OrientedBox best;
  double best_area = std::numeric_limits<double>::infinity();
  std::size_t far_u = 1, far_n = 0, near_u = 0;

  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = v[i];
    const Point2 b = at(i + 1);
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const Point2 u{(b.x - a.x) / len, (b.y - a.y) / len};
    const Point2 nrm{-u.y, u.x};

    // Each caliper only ever moves forward around the hull.
    if (i == 0) far_u = 1;
    for (std::size_t guard = 0; guard < n && dot(u, at(far_u + 1)) > dot(u, at(far_u)); ++guard) {
      ++far_u;
    }
    if (i == 0) far_n = far_u;
    for (std::size_t guard = 0;
         guard < n && dot(nrm, at(far_n + 1)) > dot(nrm, at(far_n)); ++guard) {
      ++far_n;
    }
    if (i == 0) near_u = far_n;
    for (std::size_t guard = 0;
         guard < n && dot(u, at(near_u + 1)) < dot(u, at(near_u)); ++guard) {
      ++near_u;
    }

    const double umax = dot(u, at(far_u));
    const double umin = dot(u, at(near_u));
    const double nmin = dot(nrm, a);
    const double nmax = dot(nrm, at(far_n));
    const double width = umax - umin;
    const double height = nmax - nmin;
    const double area = width * height;

    const double umid = 0.5 * (umax + umin);
    const double nmid = 0.5 * (nmax + nmin);
    const OrientedBox candidate = canonical(
        {u.x * umid + nrm.x * nmid, u.y * umid + nrm.y * nmid, width, height,
         std::atan2(u.y, u.x)});

    const double tol = kAreaTieTolerance * std::max(area, 1.0);
    if (area < best_area - tol || (std::abs(area - best_area) <= tol && candidate.angle < best.angle)) {
      best = candidate;
      best_area = std::min(area, best_area);
    }
  }
  return best;
}

double signed_area(std::span<const Point2> polygon) noexcept {
  const std::size_t n = polygon.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p = polygon[i];
    const Point2 q = polygon[(i + 1) % n];
    twice += p.x * q.y - q.x * p.y;
  }
  return 0.5 * twice;
}

std::vector<Point2> clip_convex(std::span<const Point2> subject, std::span<const Point2> clip) {
  std::vector<Point2> output(subject.begin(), subject.end());
  std::vector<Point2> input;
  const std::size_t m = clip.size();
  for (std::size_t e = 0; e < m && !output.empty(); ++e) {
    const Point2 e0 = clip[e];
    const Point2 e1 = clip[(e + 1) % m];
    input.swap(output);
    output.clear();
    const std::size_t n = input.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 p = input[i];
      const Point2 q = input[(i + 1) % n];
      const double dp = cross(e0, e1, p);
      const double dq = cross(e0, e1, q);
      const bool p_in = dp >= -kClipEpsilon;
      const bool q_in = dq >= -kClipEpsilon;
      if (p_in) output.push_back(p);
      if (p_in != q_in) {
        const double t = dp / (dp - dq);
        output.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
      }
    }
  }
  return output;
}

double rotated_iou(const OrientedBox& a, const OrientedBox& b) {
  validate(a);
  validate(b);
  // Fixed argument order makes the result bit-symmetric.
  const auto key = [](const OrientedBox& x) { return std::tie(x.cx, x.cy, x.w, x.h, x.angle); };
  const OrientedBox& first = key(b) < key(a) ? b : a;
  const OrientedBox& second = key(b) < key(a) ? a : b;

  const double reach = 0.5 * (std::hypot(first.w, first.h) + std::hypot(second.w, second.h));
  if (std::hypot(first.cx - second.cx, first.cy - second.cy) >= reach) return 0.0;

  const auto pa = obb_corners(first);
  const auto pb = obb_corners(second);
  const std::vector<Point2> inter_poly = clip_convex(pa, pb);
  const double inter = std::max(0.0, signed_area(inter_poly));
  const double uni = first.area() + second.area() - inter;
  if (!(uni > 0.0)) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

AxisAlignedBox bounds(std::span<const Point2> points) {
  if (points.empty()) {
    throw Error(ErrorKind::kInvalidInput, "bounds of an empty point set");
  }
  AxisAlignedBox box{points[0].x, points[0].y, points[0].x, points[0].y};
  for (const Point2& p : points.subspan(1)) {
    box.x1 = std::min(box.x1, p.x);
    box.y1 = std::min(box.y1, p.y);
    box.x2 = std::max(box.x2, p.x);
    box.y2 = std::max(box.y2, p.y);
  }
  return box;
}

}  // namespace obbpl
