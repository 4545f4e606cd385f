// Copyright 2026 The obbpl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "obbpl/geometry.hpp"
#include "obbpl/mask.hpp"
#include "obbpl/scoring.hpp"
#include "obbpl/symmetry.hpp"

namespace obbpl {

struct PointAnnotation {
  std::string image_id;
  double x = 0.0;
  double y = 0.0;
  std::string category;

  Point2 point() const noexcept { return {x, y}; }
  friend bool operator==(const PointAnnotation&, const PointAnnotation&) = default;
};

struct Proposal {
  RleMask mask;
  ScoreBundle scores;

  friend bool operator==(const Proposal&, const Proposal&) = default;
};

/// All mask proposals generated for one annotated point.
struct ProposalSet {
  PointAnnotation annotation;
  std::vector<Proposal> proposals;
};

/// Throws kInvalidInput when empty or when masks disagree on image size.
void validate(const ProposalSet& set);

struct SamTop {};
struct Fused {
  FusionWeights weights;
};
struct OracleIoU {};

using SelectionStrategy = std::variant<SamTop, Fused, OracleIoU>;

std::string strategy_name(const SelectionStrategy& strategy);

/// Everything besides the proposals that a strategy may need.
struct SelectionContext {
  /// Index of the annotation's category in the dataset category table.
  std::size_t category_index = 0;
  /// Boxes are produced with this mode for OracleIoU and for labelling.
  ConversionMode conversion;
  /// Required for OracleIoU.
  std::optional<OrientedBox> ground_truth;
};

struct Selection {
  std::size_t index = 0;
  /// The strategy's scalar for the chosen proposal.
  double score = 0.0;
  /// The strategy's scalar for every proposal, in input order.
  std::vector<double> scores;
  /// Fused only: some proposal lacked one of the learned terms.
  bool learned_terms_missing = false;
};

/// Argmax of the strategy scalar; ties go to the lowest index.
Selection select(const ProposalSet& set, const SelectionStrategy& strategy,
                 const SelectionContext& context);

struct PseudoLabel {
  std::string image_id;
  OrientedBox box;
  std::string category;
  double confidence = 0.0;
  std::size_t chosen = 0;
  MaskConversion conversion;
};

PseudoLabel pseudo_label(const ProposalSet& set, const Selection& selection,
                         const ConversionMode& mode);

}  // namespace obbpl
