// Copyright 2026 The obbpl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "obbpl/geometry.hpp"
#include "obbpl/selection.hpp"
#include "obbpl/symmetry.hpp"

namespace obbpl {

/// A box with its image and category. Ground truth may be difficult;
/// pseudo-labels and detections carry a confidence.
struct LabeledBox {
  std::string image_id;
  OrientedBox box;
  std::string category;
  bool difficult = false;
  std::optional<double> confidence;

  friend bool operator==(const LabeledBox&, const LabeledBox&) = default;
};

struct Detection {
  std::string image_id;
  OrientedBox box;
  std::string category;
  double confidence = 0.0;
};

enum class MetricMode { kVoc07, kContinuous };

const char* to_string(MetricMode mode) noexcept;
MetricMode metric_mode_from_string(const std::string& name);

struct CategoryIoU {
  std::string category;
  std::size_t instances = 0;
  double mean_iou = 0.0;
};

struct MiouResult {
  std::vector<CategoryIoU> per_category;  // sorted by category name
  double mean = 0.0;                      // over categories
  std::vector<double> instance_iou;       // aligned with the ground-truth list
};

/// Mean IoU between pseudo-labels and their ground truth. Within each image
/// the k-th pseudo-label pairs with the k-th ground-truth box; a count or
/// category disagreement throws kPairing.
MiouResult miou(const std::vector<LabeledBox>& pseudo, const std::vector<LabeledBox>& gt);

struct ApResult {
  /// nullopt when there is no non-difficult ground truth to recall.
  std::optional<double> ap;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  std::size_t ground_truths = 0;
};

/// Confidence-ordered greedy matching (IoU > threshold, each ground truth
/// matched at most once, difficult ground truth ignored) followed by VOC07
/// 11-point or continuous (all-point) precision-recall integration. Matching
/// only considers boxes with equal image id and category.
ApResult average_precision(const std::vector<Detection>& dets, const std::vector<LabeledBox>& gts,
                           double iou_thresh = 0.5, MetricMode mode = MetricMode::kVoc07);

struct CategoryReport {
  std::string category;
  std::size_t instances = 0;
  std::optional<double> miou;
  std::optional<double> ap50;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
};

struct EvalReport {
  std::string label;
  MetricMode metric_mode = MetricMode::kVoc07;
  std::vector<CategoryReport> categories;
  double mean_miou = 0.0;
  double map50 = 0.0;
  std::size_t instances = 0;
  std::size_t matched = 0;
  std::size_t unmatched_gt = 0;
  std::size_t false_positives = 0;
};

/// mIoU plus AP@50 of pseudo-labels against paired ground truth. Categories
/// are reported in `category_order` first, then any others by name.
EvalReport evaluate(const std::vector<LabeledBox>& pseudo, const std::vector<LabeledBox>& gt,
                    MetricMode mode, const std::vector<std::string>& category_order = {},
                    std::string label = {});

/// Ceiling report: every set resolved with OracleIoU against gts[i], the
/// chosen IoU doubling as the pseudo-label confidence.
EvalReport oracle_report(const std::vector<ProposalSet>& sets, const std::vector<LabeledBox>& gts,
                         const ConversionMode& mode, MetricMode metric_mode,
                         const std::vector<std::string>& category_order = {});

}  // namespace obbpl
