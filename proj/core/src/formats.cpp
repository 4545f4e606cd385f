// Copyright 2026 The obbpl Authors
// SPDX-License-Identifier: Apache-2.0

#include "obbpl/formats.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "obbpl/error.hpp"

namespace obbpl {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::kFormat, where + ": " + what);
}

std::string line_loc(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line);
}

bool parse_double(std::string_view token, double& out) {
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

bool is_blank(std::string_view line) {
  for (char c : line) {
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::string fixed2(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
  std::string s(buf, ptr);
  return s == "-0.00" ? "0.00" : s;
}

std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// --- proposal JSON ---------------------------------------------------------

double json_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "must be finite");
  return v;
}

std::vector<double> json_vector(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(json_number(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

ScoreMatrix json_matrix(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "must be an array of rows");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < j.size(); ++i) {
    rows.push_back(json_vector(j[i], where + "[" + std::to_string(i) + "]"));
    if (rows.back().size() != rows.front().size()) fail(where, "rows differ in length");
  }
  return ScoreMatrix::from_rows(rows);
}

RleMask json_rle(const json& j, const std::string& where, int width, int height) {
  if (!j.is_object()) fail(where, "must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key != "size" && key != "counts") fail(where + "." + key, "is not a known field");
  }
  if (!j.contains("size")) fail(where + ".size", "is required");
  if (!j.contains("counts")) fail(where + ".counts", "is required");
  const json& size = j.at("size");
  if (!size.is_array() || size.size() != 2 || !size[0].is_number_integer() ||
      !size[1].is_number_integer()) {
    fail(where + ".size", "must be [height, width]");
  }
  RleMask rle;
  rle.height = size[0].get<int>();
  rle.width = size[1].get<int>();
  if (rle.width != width || rle.height != height) {
    fail(where + ".size", "does not match the image size");
  }
  const json& counts = j.at("counts");
  if (!counts.is_array()) fail(where + ".counts", "must be an array of integers");
  rle.counts.reserve(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (!counts[i].is_number_unsigned() && !(counts[i].is_number_integer() && counts[i].get<std::int64_t>() >= 0)) {
      fail(where + ".counts[" + std::to_string(i) + "]", "must be a non-negative integer");
    }
    rle.counts.push_back(counts[i].get<std::uint64_t>());
  }
  try {
    validate(rle);
  } catch (const Error& e) {
    fail(where + ".counts", e.what());
  }
  return rle;
}

ProposalEntry json_proposal(const json& j, const std::string& where, int width, int height) {
  if (!j.is_object()) fail(where, "must be an object");
  ProposalEntry entry;
  bool have_point = false, have_rle = false, have_sam = false;
  ScoreBundle& s = entry.proposal.scores;
  for (const auto& [key, value] : j.items()) {
    const std::string field = where + "." + key;
    if (key == "point") {
      if (!value.is_number_integer() || value.get<std::int64_t>() < 0) {
        fail(field, "must be a non-negative integer");
      }
      entry.point = value.get<std::size_t>();
      have_point = true;
    } else if (key == "rle") {
      entry.proposal.mask = json_rle(value, field, width, height);
      have_rle = true;
    } else if (key == "s_sam") {
      s.s_sam = json_number(value, field);
      have_sam = true;
    } else if (key == "pos_bag_class_scores") {
      s.pos_bag_class_scores = json_vector(value, field);
    } else if (key == "neg_bag_class_scores") {
      s.neg_bag_class_scores = json_vector(value, field);
    } else if (key == "box_cls_scores") {
      s.box_cls_scores = json_vector(value, field);
    } else if (key == "offset_pred") {
      s.offset_pred = json_number(value, field);
      if (*s.offset_pred < 0.0 || *s.offset_pred > 1.0) fail(field, "must lie in [0, 1]");
    } else if (key == "per_point_instance_scores") {
      s.per_point_instance_scores = json_matrix(value, field);
    } else if (key == "per_point_cls_scores") {
      s.per_point_cls_scores = json_matrix(value, field);
    } else if (key == "neg_per_point_instance_scores") {
      s.neg_per_point_instance_scores = json_matrix(value, field);
    } else if (key == "neg_per_point_cls_scores") {
      s.neg_per_point_cls_scores = json_matrix(value, field);
    } else {
      fail(field, "is not a known field");
    }
  }
  if (!have_point) fail(where + ".point", "is required");
  if (!have_rle) fail(where + ".rle", "is required");
  if (!have_sam) fail(where + ".s_sam", "is required");
  auto same_shape = [&](const std::optional<ScoreMatrix>& a, const std::optional<ScoreMatrix>& b,
                        const char* name) {
    if (a.has_value() != b.has_value()) fail(where + "." + name, "instance and class matrices must come together");
    if (a && (a->rows() != b->rows() || a->cols() != b->cols())) {
      fail(where + "." + name, "instance and class matrices differ in shape");
    }
  };
  same_shape(s.per_point_instance_scores, s.per_point_cls_scores, "per_point_cls_scores");
  same_shape(s.neg_per_point_instance_scores, s.neg_per_point_cls_scores, "neg_per_point_cls_scores");
  return entry;
}

json matrix_json(const ScoreMatrix& m) { return m.to_rows(); }

json report_object(const EvalReport& report) {
  json categories = json::array();
  for (const CategoryReport& c : report.categories) {
    categories.push_back({
        {"category", c.category},
        {"instances", c.instances},
        {"miou", c.miou ? json(*c.miou) : json(nullptr)},
        {"ap50", c.ap50 ? json(*c.ap50) : json(nullptr)},
        {"true_positives", c.true_positives},
        {"false_positives", c.false_positives},
        {"false_negatives", c.false_negatives},
    });
  }
  return {
      {"label", report.label},
      {"metric_mode", to_string(report.metric_mode)},
      {"mean_miou", report.mean_miou},
      {"map50", report.map50},
      {"counts",
       {{"instances", report.instances},
        {"matched", report.matched},
        {"unmatched_gt", report.unmatched_gt},
        {"false_positives", report.false_positives}}},
      {"categories", categories},
  };
}

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string percent(const std::optional<double>& v) { return v ? fixed2(100.0 * *v) : "-"; }

}  // namespace

std::vector<LabeledBox> parse_dota_annotations(std::istream& in, const std::string& image_id,
                                               const std::string& source) {
  std::vector<LabeledBox> boxes;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = strip_cr(raw);
    if (is_blank(line) || line.starts_with("imagesource:") || line.starts_with("gsd:")) continue;
    const auto tokens = split_ws(line);
    const std::string where = line_loc(source, line_no);
    if (tokens.size() != 10 && tokens.size() != 11) {
      fail(where, "expected 10 or 11 fields, got " + std::to_string(tokens.size()));
    }
    std::array<Point2, 4> quad;
    for (std::size_t k = 0; k < 4; ++k) {
      if (!parse_double(tokens[2 * k], quad[k].x) || !parse_double(tokens[2 * k + 1], quad[k].y)) {
        fail(where, "corner " + std::to_string(k + 1) + " is not a pair of finite numbers");
      }
    }
    LabeledBox box;
    box.image_id = image_id;
    box.category = std::string(tokens[8]);
    if (tokens[9] == "0") {
      box.difficult = false;
    } else if (tokens[9] == "1") {
      box.difficult = true;
    } else {
      fail(where, "difficulty must be 0 or 1, got '" + std::string(tokens[9]) + "'");
    }
    if (tokens.size() == 11) {
      double conf = 0.0;
      if (!parse_double(tokens[10], conf)) fail(where, "confidence is not a finite number");
      box.confidence = conf;
    }
    try {
      box.box = min_area_rect(quad);
    } catch (const Error& e) {
      fail(where, std::string("degenerate quadrilateral: ") + e.what());
    }
    boxes.push_back(std::move(box));
  }
  return boxes;
}

std::vector<LabeledBox> parse_dota_annotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kInvalidInput, "cannot open " + path.string());
  return parse_dota_annotations(in, path.stem().string(), path.string());
}

std::string format_dota_line(const LabeledBox& box) {
  std::string line;
  for (const Point2& p : obb_corners(box.box, 1.0)) {
    line += fixed2(p.x) + " " + fixed2(p.y) + " ";
  }
  line += box.category + (box.difficult ? " 1" : " 0");
  if (box.confidence) line += " " + shortest(*box.confidence);
  return line;
}

void write_dota_annotations(std::ostream& out, const std::vector<LabeledBox>& boxes) {
  for (const LabeledBox& b : boxes) out << format_dota_line(b) << '\n';
}

std::vector<PointAnnotation> parse_points(std::istream& in, const std::string& source,
                                          const std::vector<std::string>& categories) {
  std::vector<PointAnnotation> points;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = strip_cr(raw);
    if (line.empty()) continue;
    if (line_no == 1 && line == "image_id,x,y,category") continue;
    const std::string where = line_loc(source, line_no);
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 4) fail(where, "expected 4 comma-separated fields, got " + std::to_string(fields.size()));
    PointAnnotation p;
    p.image_id = std::string(fields[0]);
    if (p.image_id.empty()) fail(where, "image_id is empty");
    if (!parse_double(fields[1], p.x)) fail(where, "x is not a finite number");
    if (!parse_double(fields[2], p.y)) fail(where, "y is not a finite number");
    p.category = std::string(fields[3]);
    if (p.category.empty()) fail(where, "category is empty");
    if (!categories.empty() &&
        std::find(categories.begin(), categories.end(), p.category) == categories.end()) {
      fail(where, "category '" + p.category + "' is not in the category table");
    }
    points.push_back(std::move(p));
  }
  return points;
}

std::vector<PointAnnotation> parse_points(const std::filesystem::path& path,
                                          const std::vector<std::string>& categories) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kInvalidInput, "cannot open " + path.string());
  return parse_points(in, path.string(), categories);
}

void write_points(std::ostream& out, const std::vector<PointAnnotation>& points) {
  out << "image_id,x,y,category\n";
  for (const PointAnnotation& p : points) {
    out << p.image_id << ',' << shortest(p.x) << ',' << shortest(p.y) << ',' << p.category << '\n';
  }
}

ProposalFile parse_proposals(std::istream& in, const std::string& source) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(source, e.what());
  }
  if (!doc.is_object()) fail(source, "proposal document must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "image_id" && key != "width" && key != "height" && key != "proposals") {
      fail(source + ": " + key, "is not a known field");
    }
  }
  ProposalFile file;
  if (!doc.contains("image_id") || !doc["image_id"].is_string() || doc["image_id"].get<std::string>().empty()) {
    fail(source + ": image_id", "must be a non-empty string");
  }
  file.image_id = doc["image_id"].get<std::string>();
  for (const char* dim : {"width", "height"}) {
    if (!doc.contains(dim) || !doc[dim].is_number_integer() || doc[dim].get<std::int64_t>() <= 0) {
      fail(source + ": " + dim, "must be a positive integer");
    }
  }
  file.width = doc["width"].get<int>();
  file.height = doc["height"].get<int>();
  if (!doc.contains("proposals") || !doc["proposals"].is_array()) {
    fail(source + ": proposals", "must be an array");
  }
  const json& proposals = doc["proposals"];
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    file.proposals.push_back(json_proposal(proposals[i], source + ": proposals[" + std::to_string(i) + "]",
                                           file.width, file.height));
  }
  return file;
}

ProposalFile parse_proposals(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kInvalidInput, "cannot open " + path.string());
  return parse_proposals(in, path.string());
}

void write_proposals(std::ostream& out, const ProposalFile& file) {
  json proposals = json::array();
  for (const ProposalEntry& e : file.proposals) {
    const Proposal& p = e.proposal;
    json j = {
        {"point", e.point},
        {"rle", {{"size", {p.mask.height, p.mask.width}}, {"counts", p.mask.counts}}},
        {"s_sam", p.scores.s_sam},
    };
    const ScoreBundle& s = p.scores;
    if (s.pos_bag_class_scores) j["pos_bag_class_scores"] = *s.pos_bag_class_scores;
    if (s.neg_bag_class_scores) j["neg_bag_class_scores"] = *s.neg_bag_class_scores;
    if (s.box_cls_scores) j["box_cls_scores"] = *s.box_cls_scores;
    if (s.offset_pred) j["offset_pred"] = *s.offset_pred;
    if (s.per_point_instance_scores) j["per_point_instance_scores"] = matrix_json(*s.per_point_instance_scores);
    if (s.per_point_cls_scores) j["per_point_cls_scores"] = matrix_json(*s.per_point_cls_scores);
    if (s.neg_per_point_instance_scores) {
      j["neg_per_point_instance_scores"] = matrix_json(*s.neg_per_point_instance_scores);
    }
    if (s.neg_per_point_cls_scores) j["neg_per_point_cls_scores"] = matrix_json(*s.neg_per_point_cls_scores);
    proposals.push_back(std::move(j));
  }
  const json doc = {{"image_id", file.image_id},
                    {"width", file.width},
                    {"height", file.height},
                    {"proposals", proposals}};
  out << doc.dump() << '\n';
}

std::string report_json(const EvalReport& report) { return report_object(report).dump(2) + "\n"; }

std::string reports_json(const std::vector<EvalReport>& reports) {
  json arr = json::array();
  for (const EvalReport& r : reports) arr.push_back(report_object(r));
  return json{{"reports", arr}}.dump(2) + "\n";
}

std::string report_table(const std::vector<EvalReport>& reports) {
  std::vector<std::string> categories;
  for (const EvalReport& r : reports) {
    for (const CategoryReport& c : r.categories) {
      if (std::find(categories.begin(), categories.end(), c.category) == categories.end()) {
        categories.push_back(c.category);
      }
    }
  }
  std::vector<std::string> header{"method", "metric"};
  header.insert(header.end(), categories.begin(), categories.end());
  header.push_back("mean");

  std::vector<std::vector<std::string>> rows;
  for (const EvalReport& r : reports) {
    for (const bool is_iou : {true, false}) {
      std::vector<std::string> row{r.label.empty() ? "-" : r.label, is_iou ? "IoU" : "AP50"};
      for (const std::string& name : categories) {
        std::optional<double> v;
        for (const CategoryReport& c : r.categories) {
          if (c.category == name) v = is_iou ? c.miou : c.ap50;
        }
        row.push_back(percent(v));
      }
      row.push_back(fixed2(100.0 * (is_iou ? r.mean_miou : r.map50)));
      rows.push_back(std::move(row));
    }
  }

  std::vector<std::size_t> widths(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    widths[c] = header[c].size();
    for (const auto& row : rows) widths[c] = std::max(widths[c], row[c].size());
  }
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out << "  ";
      out << (c < 2 ? pad_right(row[c], widths[c]) : pad_left(row[c], widths[c]));
    }
    out << '\n';
  };
  emit(header);
  for (const auto& row : rows) emit(row);
  return out.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kInvalidInput, "cannot write " + tmp.string());
    out << contents;
    if (!out) throw Error(ErrorKind::kInvalidInput, "failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace obbpl
