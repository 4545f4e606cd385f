// Copyright 2026 The obbpl Authors
// SPDX-License-Identifier: Apache-2.0

// Text and JSON formats read and written by the pipeline.
//
// DOTA annotation lines:   x1 y1 x2 y2 x3 y3 x4 y4 category difficulty [confidence]
//   "imagesource:" and "gsd:" header lines and blank lines are skipped. The
//   optional 11th field carries pseudo-label confidence.
//
// Points CSV:              image_id,x,y,category   (optional identical header row)
//
// Proposal JSON (one document per image):
//   { "image_id": str, "width": int, "height": int,
//     "proposals": [ { "point": int,               // index of the image's annotation
//                      "rle": { "size": [height, width], "counts": [int, ...] },
//                      "s_sam": num,
//                      "pos_bag_class_scores": [num], "neg_bag_class_scores": [num],
//                      "box_cls_scores": [num], "offset_pred": num,
//                      "per_point_instance_scores": [[num]], "per_point_cls_scores": [[num]],
//                      "neg_per_point_instance_scores": [[num]],
//                      "neg_per_point_cls_scores": [[num]] } ] }
//   RLE counts are row-major run lengths starting with a (possibly empty) run
//   of zeros. Every score field other than s_sam is optional.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "obbpl/eval.hpp"
#include "obbpl/selection.hpp"

namespace obbpl {

std::vector<LabeledBox> parse_dota_annotations(std::istream& in, const std::string& image_id,
                                               const std::string& source = "<dota>");
/// The image id is the file stem.
std::vector<LabeledBox> parse_dota_annotations(const std::filesystem::path& path);

/// One line per box from its corners; confidence is appended when present.
void write_dota_annotations(std::ostream& out, const std::vector<LabeledBox>& boxes);
std::string format_dota_line(const LabeledBox& box);

/// `categories` restricts the allowed names when non-empty.
std::vector<PointAnnotation> parse_points(std::istream& in, const std::string& source = "<points>",
                                          const std::vector<std::string>& categories = {});
std::vector<PointAnnotation> parse_points(const std::filesystem::path& path,
                                          const std::vector<std::string>& categories = {});
void write_points(std::ostream& out, const std::vector<PointAnnotation>& points);

struct ProposalEntry {
  std::size_t point = 0;
  Proposal proposal;

  friend bool operator==(const ProposalEntry&, const ProposalEntry&) = default;
};

struct ProposalFile {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::vector<ProposalEntry> proposals;

  friend bool operator==(const ProposalFile&, const ProposalFile&) = default;
};

ProposalFile parse_proposals(std::istream& in, const std::string& source = "<proposals>");
ProposalFile parse_proposals(const std::filesystem::path& path);
void write_proposals(std::ostream& out, const ProposalFile& file);

/// Report JSON (schema in docs/report.schema.json).
std::string report_json(const EvalReport& report);
std::string reports_json(const std::vector<EvalReport>& reports);
/// Aligned plain-text table, one row per report, one column per category.
std::string report_table(const std::vector<EvalReport>& reports);

/// Writes `contents` to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace obbpl
