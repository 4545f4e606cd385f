// Copyright 2026 The obbpl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "obbpl/geometry.hpp"
#include "obbpl/mask.hpp"

namespace obbpl {

enum class BagKind { kPositive, kNegativeMargin };

struct PointBag {
  std::vector<Point2> points;
  BagKind kind = BagKind::kPositive;
};

inline constexpr int kDefaultBagSize = 64;
inline constexpr int kDefaultMarginPx = 1;
inline constexpr double kDefaultDelta = 0.05;

/// `n` pixel centers drawn uniformly with replacement from the set pixels.
PointBag sample_positive_bag(const BinaryMask& mask, int n, std::uint64_t seed);

/// As sample_positive_bag, drawing from inner_margin(mask, margin_px).
PointBag sample_negative_bag(const BinaryMask& mask, int margin_px, int n, std::uint64_t seed);

/// The eight points of the box enlarged by (1 + delta): four corners and four
/// edge midpoints, ordered by (i, j) in {-1,0,1}^2 \ {(0,0)} row-major in i.
std::array<Point2, 8> negative_points(const OrientedBox& box, double delta = kDefaultDelta);

struct OffsetTarget {
  double value = 0.0;
  /// The point was on or outside the box; ratios were clamped at zero.
  bool clamped = false;
};

/// Centrality target of an annotated point inside a horizontal box: 0 at the
/// center, approaching 1 at any edge.
OffsetTarget gt_offset(Point2 point, const AxisAlignedBox& box);

/// Dense row-major matrix of per-point scores (rows = bag points, cols = K).
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  ScoreMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);
  static ScoreMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return values_[r * cols_ + c]; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<std::vector<double>> to_rows() const;

  friend bool operator==(const ScoreMatrix&, const ScoreMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Bag classification score: sum over points of instance * class scores.
std::vector<double> bag_score(const ScoreMatrix& instance, const ScoreMatrix& cls);

std::vector<double> softmax(std::span<const double> logits);
double sigmoid(double x) noexcept;

/// softmax(pos)[category] - max_k sigmoid(neg[k]).
double s_bmm(std::span<const double> pos_scores, std::span<const double> neg_scores,
             std::size_t category);

/// softmax(box_cls)[category] - offset_pred.
double s_cgm(std::span<const double> box_cls, double offset_pred, std::size_t category);

/// Per-proposal score fields. Only `s_sam` is mandatory; the rest are the
/// outputs of learned heads and may be absent.
struct ScoreBundle {
  double s_sam = 0.0;
  std::optional<ScoreMatrix> per_point_instance_scores;
  std::optional<ScoreMatrix> per_point_cls_scores;
  std::optional<ScoreMatrix> neg_per_point_instance_scores;
  std::optional<ScoreMatrix> neg_per_point_cls_scores;
  std::optional<std::vector<double>> pos_bag_class_scores;
  std::optional<std::vector<double>> neg_bag_class_scores;
  std::optional<std::vector<double>> box_cls_scores;
  std::optional<double> offset_pred;

  friend bool operator==(const ScoreBundle&, const ScoreBundle&) = default;
};

struct FusionWeights {
  double alpha = 1.0;
  double beta = 1.0;

  friend bool operator==(const FusionWeights&, const FusionWeights&) = default;
};

void validate(const FusionWeights& weights);

struct FusedScore {
  double value = 0.0;
  std::optional<double> bmm;
  std::optional<double> cgm;
  bool bmm_missing() const noexcept { return !bmm.has_value(); }
  bool cgm_missing() const noexcept { return !cgm.has_value(); }
};

/// s_sam + alpha * S_bmm + beta * S_cgm. A term whose inputs are absent
/// contributes zero and is reported as missing. Bag-level vectors take
/// precedence over per-point matrices.
FusedScore fuse_score(const ScoreBundle& bundle, const FusionWeights& weights,
                      std::size_t category);

/// The 3x3 grid alpha, beta in {0.8, 1.0, 1.2}, alpha-major.
std::vector<FusionWeights> weight_sweep_grid();

}  // namespace obbpl
