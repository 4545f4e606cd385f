// Copyright 2026 The obbpl Authors
// SPDX-License-Identifier: Apache-2.0

#include "obbpl/selection.hpp"

#include <string>

#include "obbpl/error.hpp"

namespace obbpl {

void validate(const ProposalSet& set) {
  if (set.proposals.empty()) {
    throw Error(ErrorKind::kInvalidInput,
                "no proposals for annotation in image '" + set.annotation.image_id + "'");
  }
  const RleMask& first = set.proposals.front().mask;
  for (const Proposal& p : set.proposals) {
    if (p.mask.width != first.width || p.mask.height != first.height) {
      throw Error(ErrorKind::kInvalidInput, "proposal masks disagree on image size in image '" +
                                                set.annotation.image_id + "'");
    }
  }
}

std::string strategy_name(const SelectionStrategy& strategy) {
  struct Visitor {
    std::string operator()(const SamTop&) const { return "sam-top"; }
    std::string operator()(const Fused&) const { return "fused"; }
    std::string operator()(const OracleIoU&) const { return "oracle"; }
  };
  return std::visit(Visitor{}, strategy);
}

Selection select(const ProposalSet& set, const SelectionStrategy& strategy,
                 const SelectionContext& context) {
  validate(set);
  Selection out;
  out.scores.reserve(set.proposals.size());

  if (std::holds_alternative<SamTop>(strategy)) {
    for (const Proposal& p : set.proposals) out.scores.push_back(p.scores.s_sam);
  } else if (const auto* fused = std::get_if<Fused>(&strategy)) {
    for (const Proposal& p : set.proposals) {
      const FusedScore s = fuse_score(p.scores, fused->weights, context.category_index);
      out.learned_terms_missing |= s.bmm_missing() || s.cgm_missing();
      out.scores.push_back(s.value);
    }
  } else {
    if (!context.ground_truth) {
      throw Error(ErrorKind::kMissingGroundTruth,
                  "oracle selection needs a ground-truth box for image '" +
                      set.annotation.image_id + "'");
    }
    for (const Proposal& p : set.proposals) {
      const MaskConversion conv =
          obb_from_mask(rle_decode(p.mask), context.conversion, set.annotation.category);
      out.scores.push_back(rotated_iou(conv.box, *context.ground_truth));
    }
  }

  for (std::size_t i = 1; i < out.scores.size(); ++i) {
    if (out.scores[i] > out.scores[out.index]) out.index = i;
  }
  out.score = out.scores[out.index];
  return out;
}

PseudoLabel pseudo_label(const ProposalSet& set, const Selection& selection,
                         const ConversionMode& mode) {
  validate(set);
  if (selection.index >= set.proposals.size()) {
    throw Error(ErrorKind::kInvalidInput, "selected proposal index out of range");
  }
  const BinaryMask mask = rle_decode(set.proposals[selection.index].mask);
  PseudoLabel label;
  label.image_id = set.annotation.image_id;
  label.category = set.annotation.category;
  label.confidence = selection.score;
  label.chosen = selection.index;
  label.conversion = obb_from_mask(mask, mode, set.annotation.category);
  label.box = label.conversion.box;
  return label;
}

}  // namespace obbpl
