// Copyright 2026 The obbpl Authors
// SPDX-License-Identifier: Apache-2.0

#include "obbpl/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "obbpl/error.hpp"
#include "obbpl/random.hpp"

namespace obbpl {

namespace {

PointBag sample_from(const BinaryMask& source, int n, std::uint64_t seed, BagKind kind) {
  if (n < 1) throw Error(ErrorKind::kInvalidInput, "bag size must be >= 1");
  const std::vector<Point2> candidates = pixel_points(source);
  SeededRng rng(seed);
  PointBag bag{{}, kind};
  bag.points.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    bag.points.push_back(candidates[rng.uniform_index(candidates.size())]);
  }
  return bag;
}

void check_category(std::size_t k, std::size_t category) {
  if (k == 0) throw Error(ErrorKind::kInvalidInput, "score vectors must be non-empty");
  if (category >= k) {
    throw Error(ErrorKind::kInvalidInput, "category index " + std::to_string(category) +
                                              " out of range for " + std::to_string(k) +
                                              " classes");
  }
}

void check_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kInvalidInput, std::string(what) + " is not finite");
  }
}

// Bag-level vector if present, otherwise the per-point matrices reduced by
// bag_score, otherwise nothing.
std::optional<std::vector<double>> bag_vector(const std::optional<std::vector<double>>& vec,
                                              const std::optional<ScoreMatrix>& inst,
                                              const std::optional<ScoreMatrix>& cls) {
  if (vec) return vec;
  if (inst && cls) return bag_score(*inst, *cls);
  return std::nullopt;
}

}  // namespace

PointBag sample_positive_bag(const BinaryMask& mask, int n, std::uint64_t seed) {
  return sample_from(mask, n, seed, BagKind::kPositive);
}

PointBag sample_negative_bag(const BinaryMask& mask, int margin_px, int n, std::uint64_t seed) {
  return sample_from(inner_margin(mask, margin_px), n, seed, BagKind::kNegativeMargin);
}

std::array<Point2, 8> negative_points(const OrientedBox& box, double delta) {
  validate(box);
  if (!std::isfinite(delta) || delta < 0.0) {
    throw Error(ErrorKind::kInvalidInput, "delta must be finite and >= 0");
  }
  std::array<Point2, 8> out;
  std::size_t k = 0;
  for (int i = -1; i <= 1; ++i) {
    for (int j = -1; j <= 1; ++j) {
      if (i == 0 && j == 0) continue;
      out[k++] = box_point(box, i, j, 1.0 + delta);
    }
  }
  return out;
}

OffsetTarget gt_offset(Point2 point, const AxisAlignedBox& box) {
  if (!std::isfinite(point.x) || !std::isfinite(point.y)) {
    throw Error(ErrorKind::kInvalidInput, "annotation point is not finite");
  }
  const bool inside = point.x > box.x1 && point.x < box.x2 && point.y > box.y1 && point.y < box.y2;
  if (!inside) return {1.0, true};
  const double left = point.x - box.x1, right = box.x2 - point.x;
  const double top = point.y - box.y1, bottom = box.y2 - point.y;
  const double rx = std::min(left, right) / std::max(left, right);
  const double ry = std::min(top, bottom) / std::max(top, bottom);
  return {1.0 - std::sqrt(rx * ry), false};
}

ScoreMatrix::ScoreMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw Error(ErrorKind::kInvalidInput, "score matrix size does not match its shape");
  }
}

ScoreMatrix ScoreMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  std::vector<double> values;
  values.reserve(rows.size() * cols);
  for (const auto& row : rows) {
    if (row.size() != cols) throw Error(ErrorKind::kInvalidInput, "ragged score matrix");
    values.insert(values.end(), row.begin(), row.end());
  }
  return ScoreMatrix(rows.size(), cols, std::move(values));
}

std::vector<std::vector<double>> ScoreMatrix::to_rows() const {
  std::vector<std::vector<double>> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    out[r].assign(values_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                  values_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
  }
  return out;
}

std::vector<double> bag_score(const ScoreMatrix& instance, const ScoreMatrix& cls) {
  if (instance.rows() != cls.rows() || instance.cols() != cls.cols()) {
    throw Error(ErrorKind::kInvalidInput, "instance and class score matrices differ in shape");
  }
  std::vector<double> out(instance.cols(), 0.0);
  for (std::size_t p = 0; p < instance.rows(); ++p) {
    for (std::size_t k = 0; k < instance.cols(); ++k) out[k] += instance(p, k) * cls(p, k);
  }
  return out;
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) return {};
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double s_bmm(std::span<const double> pos_scores, std::span<const double> neg_scores,
             std::size_t category) {
  check_category(pos_scores.size(), category);
  if (neg_scores.size() != pos_scores.size()) {
    throw Error(ErrorKind::kInvalidInput, "positive and negative bag scores differ in length");
  }
  check_finite(pos_scores, "positive bag score");
  check_finite(neg_scores, "negative bag score");
  double penalty = 0.0;
  for (double v : neg_scores) penalty = std::max(penalty, sigmoid(v));
  return softmax(pos_scores)[category] - penalty;
}

double s_cgm(std::span<const double> box_cls, double offset_pred, std::size_t category) {
  check_category(box_cls.size(), category);
  check_finite(box_cls, "box class score");
  if (!std::isfinite(offset_pred) || offset_pred < 0.0 || offset_pred > 1.0) {
    throw Error(ErrorKind::kInvalidInput, "offset prediction must lie in [0, 1]");
  }
  return softmax(box_cls)[category] - offset_pred;
}

void validate(const FusionWeights& weights) {
  if (!std::isfinite(weights.alpha) || !std::isfinite(weights.beta) || weights.alpha < 0.0 ||
      weights.beta < 0.0) {
    throw Error(ErrorKind::kInvalidInput, "fusion weights must be finite and non-negative");
  }
}

FusedScore fuse_score(const ScoreBundle& bundle, const FusionWeights& weights,
                      std::size_t category) {
  validate(weights);
  if (!std::isfinite(bundle.s_sam)) throw Error(ErrorKind::kInvalidInput, "s_sam is not finite");

  FusedScore out;
  const auto pos = bag_vector(bundle.pos_bag_class_scores, bundle.per_point_instance_scores,
                              bundle.per_point_cls_scores);
  const auto neg = bag_vector(bundle.neg_bag_class_scores, bundle.neg_per_point_instance_scores,
                              bundle.neg_per_point_cls_scores);
  if (pos && neg) out.bmm = s_bmm(*pos, *neg, category);
  if (bundle.box_cls_scores && bundle.offset_pred) {
    out.cgm = s_cgm(*bundle.box_cls_scores, *bundle.offset_pred, category);
  }
  out.value = bundle.s_sam + weights.alpha * out.bmm.value_or(0.0) +
              weights.beta * out.cgm.value_or(0.0);
  return out;
}

std::vector<FusionWeights> weight_sweep_grid() {
  constexpr std::array<double, 3> kLevels{0.8, 1.0, 1.2};
  std::vector<FusionWeights> grid;
  for (double a : kLevels) {
    for (double b : kLevels) grid.push_back({a, b});
  }
  return grid;
}

}  // namespace obbpl
