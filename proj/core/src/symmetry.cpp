// Copyright 2026 The obbpl Authors
// SPDX-License-Identifier: Apache-2.0

#include "obbpl/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "obbpl/error.hpp"

namespace obbpl {

namespace {

// Leftmost and rightmost set pixel center of every row. Their hull equals
// the hull of the whole mask.
std::vector<Point2> row_extremes(const BinaryMask& mask) {
  std::vector<Point2> out;
  for (int r = 0; r < mask.height(); ++r) {
    int first = -1, last = -1;
    for (int c = 0; c < mask.width(); ++c) {
      if (!mask.at(c, r)) continue;
      if (first < 0) first = c;
      last = c;
    }
    if (first < 0) continue;
    out.push_back({first + 0.5, r + 0.5});
    if (last != first) out.push_back({last + 0.5, r + 0.5});
  }
  return out;
}

bool all_collinear(std::span<const Point2> points) {
  if (points.size() < 3) return true;
  const Point2 a = points.front();
  std::size_t far = 0;
  double best = -1.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double d = std::hypot(points[i].x - a.x, points[i].y - a.y);
    if (d > best) {
      best = d;
      far = i;
    }
  }
  const Point2 b = points[far];
  for (const Point2& p : points) {
    if ((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) != 0.0) return false;
  }
  return true;
}

}  // namespace

Moment2x2 second_moments(std::span<const Point2> points, Point2 center) {
  if (points.size() < 2) {
    throw Error(ErrorKind::kDegenerateGeometry, "second moments need at least 2 points");
  }
  Moment2x2 m;
  for (const Point2& p : points) {
    const double dx = p.x - center.x;
    const double dy = p.y - center.y;
    m.sxx += dx * dx;
    m.sxy += dx * dy;
    m.syy += dy * dy;
  }
  return m;
}

PrincipalAxes principal_axes(const Moment2x2& m) noexcept {
  const double mean = 0.5 * (m.sxx + m.syy);
  const double half_diff = 0.5 * (m.sxx - m.syy);
  const double radius = std::hypot(half_diff, m.sxy);
  return {mean + radius, std::max(mean - radius, 0.0),
          wrap_half_turn(0.5 * std::atan2(2.0 * m.sxy, m.sxx - m.syy))};
}

std::optional<double> axis_from_moments(const Moment2x2& m, double isotropy_eps) noexcept {
  const PrincipalAxes axes = principal_axes(m);
  if (!(axes.lambda_major > 0.0)) return std::nullopt;
  if (axes.lambda_major <= (1.0 + isotropy_eps) * axes.lambda_minor) return std::nullopt;
  return axes.angle;
}

double symmetry_axis(const BinaryMask& mask, double isotropy_eps) {
  const std::vector<Point2> points = pixel_points(mask);
  if (points.size() < 2) {
    throw Error(ErrorKind::kIsotropic, "single-pixel mask has no symmetry axis");
  }
  const auto angle = axis_from_moments(second_moments(points, centroid(mask)), isotropy_eps);
  if (!angle) {
    throw Error(ErrorKind::kIsotropic, "mask moments are isotropic; symmetry axis undefined");
  }
  return *angle;
}

const char* to_string(ConversionKind kind) noexcept {
  return kind == ConversionKind::kSymmetryAxis ? "symmetry-axis" : "minimum-only";
}

ConversionMode ConversionMode::default_per_category() {
  return {ConversionKind::kMinimumOnly,
          {{"plane", ConversionKind::kSymmetryAxis},
           {"helicopter", ConversionKind::kSymmetryAxis}}};
}

ConversionKind ConversionMode::kind_for(const std::string& category) const {
  const auto it = per_category.find(category);
  return it == per_category.end() ? fallback : it->second;
}

OrientedBox box_at_angle(std::span<const Point2> points, double angle) {
  if (points.empty()) {
    throw Error(ErrorKind::kInvalidInput, "box of an empty point set");
  }
  const Point2 u{std::cos(angle), std::sin(angle)};
  const Point2 n{-u.y, u.x};
  double umin = std::numeric_limits<double>::infinity(), umax = -umin;
  double nmin = umin, nmax = -umin;
  for (const Point2& p : points) {
    const double pu = p.x * u.x + p.y * u.y;
    const double pn = p.x * n.x + p.y * n.y;
    umin = std::min(umin, pu);
    umax = std::max(umax, pu);
    nmin = std::min(nmin, pn);
    nmax = std::max(nmax, pn);
  }
  const double umid = 0.5 * (umin + umax);
  const double nmid = 0.5 * (nmin + nmax);
  return {u.x * umid + n.x * nmid, u.y * umid + n.y * nmid, umax - umin, nmax - nmin, angle};
}

MaskConversion obb_from_mask(const BinaryMask& mask, const ConversionMode& mode,
                             const std::string& category) {
  require_non_empty(mask);
  MaskConversion result;
  result.requested = mode.kind_for(category);
  result.used = result.requested;

  const std::vector<Point2> rim = row_extremes(mask);
  if (all_collinear(rim)) {
    // A single row, column or diagonal run of pixels: give the thin side one
    // pixel of extent so the box stays valid.
    const std::vector<Point2> points = pixel_points(mask);
    const double angle =
        points.size() < 2 ? 0.0 : principal_axes(second_moments(points, centroid(mask))).angle;
    OrientedBox box = box_at_angle(rim, angle);
    box.w = std::max(box.w, 1.0);
    box.h = std::max(box.h, 1.0);
    result.box = canonical(box);
    result.degenerate = true;
    return result;
  }

  if (result.requested == ConversionKind::kSymmetryAxis) {
    const std::vector<Point2> points = pixel_points(mask);
    const auto angle = axis_from_moments(second_moments(points, centroid(mask)));
    if (angle) {
      result.box = canonical(box_at_angle(rim, *angle));
      return result;
    }
    result.isotropic_fallback = true;
    result.used = ConversionKind::kMinimumOnly;
  }
  result.box = min_area_rect(rim);
  return result;
}

AmbiguityReport ambiguity_analysis(double w, double h, double alpha_ratio) {
  if (!std::isfinite(w) || !std::isfinite(h) || !(w > 0.0) || !(h > 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "ambiguity analysis needs positive finite w and h");
  }
  if (!std::isfinite(alpha_ratio) || alpha_ratio < 0.0 || alpha_ratio > 1.0) {
    throw Error(ErrorKind::kInvalidInput, "alpha ratio must lie in [0, 1]");
  }
  AmbiguityReport report{w, h, alpha_ratio, w + alpha_ratio * h, false};
  // The boundary d^2 = 2wh is inclusive; allow for rounding in d.
  const double bound = 2.0 * w * h;
  report.min_rect_may_differ = report.diagonal_d * report.diagonal_d <= bound * (1.0 + 1e-12);
  return report;
}

}  // namespace obbpl
