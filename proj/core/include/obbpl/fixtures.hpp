// Copyright 2026 The obbpl Authors
// SPDX-License-Identifier: Apache-2.0

// Synthetic datasets with known ground truth: rasterized shapes, annotated
// points, and perturbed mask proposals carrying synthetic score bundles.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "obbpl/eval.hpp"
#include "obbpl/formats.hpp"
#include "obbpl/mask.hpp"
#include "obbpl/scoring.hpp"

namespace obbpl {

enum class FixtureShape { kRectangle, kEllipse, kCross, kLShape };

const char* to_string(FixtureShape shape) noexcept;
FixtureShape fixture_shape_from_string(const std::string& name);
/// rectangle -> large-vehicle, ellipse -> ship, cross -> plane, l-shape -> harbor.
const char* fixture_category(FixtureShape shape) noexcept;

/// A shape in its own frame: `length` runs along `angle`, `width` across it.
/// For a cross, `width` is the wing span and both bars are `arm_ratio * length`
/// thick. For an L-shape, both legs are `arm_ratio * width` thick.
struct ShapeParams {
  FixtureShape shape = FixtureShape::kRectangle;
  double cx = 0.0;
  double cy = 0.0;
  double length = 0.0;
  double width = 0.0;
  double angle = 0.0;
  double arm_ratio = 0.2;
};

/// Tight oriented box of the shape (length x width), canonicalised.
OrientedBox shape_box(const ShapeParams& shape);

/// Sets every pixel whose center lies inside the shape.
BinaryMask rasterize(const ShapeParams& shape, int width, int height);

struct FixtureSpec {
  int images = 25;
  int image_size = 512;
  std::vector<FixtureShape> shapes{FixtureShape::kRectangle, FixtureShape::kEllipse,
                                   FixtureShape::kCross, FixtureShape::kLShape};
  double min_length = 90.0;
  double max_length = 170.0;
  double min_width_ratio = 0.35;
  double max_width_ratio = 0.8;
  double cross_arm_ratio = 0.2;
  double cross_span_ratio = 0.95;
  double lshape_arm_ratio = 0.35;
  /// Annotated points are drawn uniformly from a disk of this radius (px)
  /// around the box center.
  double jitter = 0.0;
  /// When false, proposals carry only s_sam.
  bool learned_scores = true;
  double delta = kDefaultDelta;
  int bag_size = kDefaultBagSize;
  int margin_px = kDefaultMarginPx;
  std::vector<std::string> categories;  // empty: DOTA-v1.0 table
  std::uint64_t seed = 0;
};

/// Throws kInvalidInput naming the offending field.
void validate(const FixtureSpec& spec);

struct FixtureImage {
  std::string image_id;
  std::vector<PointAnnotation> points;
  std::vector<LabeledBox> ground_truth;  // aligned with points
  std::vector<ShapeParams> shapes;       // aligned with points
  ProposalFile proposals;
  /// Perturbation that produced each proposal, aligned with proposals.proposals.
  std::vector<std::string> variants;
};

struct FixtureDataset {
  std::vector<FixtureImage> images;

  std::vector<PointAnnotation> points() const;
  std::vector<LabeledBox> ground_truth() const;
  std::vector<ProposalFile> proposal_files() const;
};

/// Four instances per image on a 2x2 grid; deterministic for a given spec.
FixtureDataset generate_fixtures(const FixtureSpec& spec);

/// Writes points.csv, gt/<image_id>.txt and proposals/<image_id>.json.
void write_fixtures(const FixtureDataset& dataset, const std::filesystem::path& dir);

}  // namespace obbpl
