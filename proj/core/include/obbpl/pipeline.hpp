// Copyright 2026 The obbpl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "obbpl/config.hpp"
#include "obbpl/eval.hpp"
#include "obbpl/formats.hpp"
#include "obbpl/selection.hpp"

namespace obbpl {

/// Runs fn(0) .. fn(n - 1) on up to `workers` threads. Every index runs even
/// if some throw; afterwards the exception of the lowest failing index is
/// rethrown, so failures do not depend on scheduling.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

/// Proposal sets in canonical order: images by id, points in their input
/// order within each image.
struct Dataset {
  std::vector<ProposalSet> sets;
  /// Position of each set's annotation among its image's points.
  std::vector<std::size_t> point_index;
};

/// Groups proposals by their `point` field. Every point needs a proposal
/// file with at least one proposal for it; violations throw kInvalidInput.
Dataset assemble_dataset(const std::vector<PointAnnotation>& points,
                         const std::vector<ProposalFile>& files);

/// Reads `points_csv` and `<proposals_dir>/<image_id>.json` for each image.
Dataset load_dataset(const std::filesystem::path& points_csv,
                     const std::filesystem::path& proposals_dir,
                     const std::vector<std::string>& categories, int workers = 1);

/// Ground truth for a dataset: the k-th box of `<gt_dir>/<image_id>.txt`
/// pairs with the k-th point of that image. Throws kPairing when counts or
/// categories disagree.
std::vector<LabeledBox> load_paired_ground_truth(const Dataset& dataset,
                                                 const std::filesystem::path& gt_dir);

struct PipelineResult {
  std::string strategy;
  std::vector<Selection> selections;
  std::vector<PseudoLabel> labels;
};

/// Selects and converts one proposal per set. `ground_truth` must align
/// with `dataset.sets` when the strategy is oracle.
PipelineResult run_pipeline(const Dataset& dataset, const PipelineConfig& config,
                            const std::vector<LabeledBox>& ground_truth = {});

/// Pseudo-labels as confidence-carrying LabeledBoxes, in dataset order.
std::vector<LabeledBox> labeled_boxes(const PipelineResult& result);

/// One DOTA file per image in `dir`, confidence in the eleventh field.
void write_pseudo_labels(const std::filesystem::path& dir, const PipelineResult& result);

/// JSON record of every selection: chosen index, per-proposal scores, and
/// conversion metadata.
std::string selection_json(const Dataset& dataset, const PipelineResult& result);

struct PairedLabels {
  std::vector<LabeledBox> pseudo;
  std::vector<LabeledBox> ground_truth;
};

/// Reads every `*.txt` in `gt_dir` and the same-named file in `pseudo_dir`
/// (a missing pseudo file counts as no labels), images in name order. A
/// pseudo file without ground truth throws kPairing.
PairedLabels load_label_dirs(const std::filesystem::path& pseudo_dir,
                             const std::filesystem::path& gt_dir);

}  // namespace obbpl
