// Copyright 2026 The obbpl Authors
// SPDX-License-Identifier: Apache-2.0

#include "obbpl/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "obbpl/config.hpp"
#include "obbpl/error.hpp"
#include "obbpl/random.hpp"
#include "obbpl/symmetry.hpp"

namespace obbpl {

namespace {

struct LocalFrame {
  double cx, cy, c, s;

  LocalFrame(const ShapeParams& p) : cx(p.cx), cy(p.cy), c(std::cos(p.angle)), s(std::sin(p.angle)) {}

  // (u, v): coordinates along and across the shape axis.
  std::pair<double, double> to_local(double x, double y) const noexcept {
    const double dx = x - cx;
    const double dy = y - cy;
    return {dx * c + dy * s, -dx * s + dy * c};
  }
};

bool inside(const ShapeParams& p, double u, double v) noexcept {
  const double hl = 0.5 * p.length;
  const double hw = 0.5 * p.width;
  switch (p.shape) {
    case FixtureShape::kRectangle:
      return std::abs(u) <= hl && std::abs(v) <= hw;
    case FixtureShape::kEllipse:
      return (u / hl) * (u / hl) + (v / hw) * (v / hw) <= 1.0;
    case FixtureShape::kCross: {
      const double ht = 0.5 * p.arm_ratio * p.length;
      return (std::abs(u) <= hl && std::abs(v) <= ht) || (std::abs(u) <= ht && std::abs(v) <= hw);
    }
    case FixtureShape::kLShape: {
      const double t = p.arm_ratio * p.width;
      const bool top = std::abs(u) <= hl && v >= 0.5 * p.width - t && v <= hw;
      const bool side = std::abs(v) <= hw && u >= -hl && u <= -0.5 * p.length + t;
      return top || side;
    }
  }
  return false;
}

BinaryMask translate(const BinaryMask& mask, int dx, int dy) {
  BinaryMask out(mask.width(), mask.height());
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (mask.at(c, r) && out.in_bounds(c + dx, r + dy)) out.set(c + dx, r + dy);
    }
  }
  return out;
}

BinaryMask unite(const BinaryMask& a, const BinaryMask& b) {
  std::vector<std::uint8_t> bits(a.bits());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] |= b.bits()[i];
  return BinaryMask(a.width(), a.height(), std::move(bits));
}

std::size_t overlap(const BinaryMask& a, const BinaryMask& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.bits().size(); ++i) n += a.bits()[i] & b.bits()[i];
  return n;
}

template <typename Points>
double fraction_inside(const Points& points, const BinaryMask& region) {
  std::size_t n = 0;
  for (const Point2& p : points) n += region.contains(p) ? 1 : 0;
  return static_cast<double>(n) / static_cast<double>(points.size());
}

struct Variant {
  const char* name;
  double base_sam;
};

// Base SAM confidences are deliberately uninformative: oversized proposals
// tend to score highest.
constexpr Variant kVariants[] = {
    {"exact", 0.90}, {"dilated", 0.93}, {"eroded", 0.88},
    {"shifted", 0.86}, {"merged", 0.95}, {"part", 0.89},
};

BinaryMask make_variant(const std::string& name, const ShapeParams& shape, const BinaryMask& exact,
                        int size, SeededRng& rng) {
  if (name == "dilated") return dilate(exact, 3 + static_cast<int>(rng.uniform_index(6)));
  if (name == "eroded") {
    BinaryMask m = erode(exact, 3 + static_cast<int>(rng.uniform_index(4)));
    return m.empty() ? erode(exact, 1) : m;
  }
  if (name == "shifted") {
    const double mag = rng.uniform(6.0, 14.0);
    const double dir = rng.uniform(-kPi, kPi);
    BinaryMask m = translate(exact, static_cast<int>(std::lround(mag * std::cos(dir))),
                             static_cast<int>(std::lround(mag * std::sin(dir))));
    return m.empty() ? exact : m;
  }
  if (name == "merged") {
    ShapeParams neighbor = shape;
    neighbor.length *= 0.8;
    neighbor.width *= 0.8;
    const double side = rng.uniform01() < 0.5 ? -1.0 : 1.0;
    neighbor.cx += side * 0.85 * shape.length * std::cos(shape.angle);
    neighbor.cy += side * 0.85 * shape.length * std::sin(shape.angle);
    return unite(exact, rasterize(neighbor, size, size));
  }
  if (name == "part") {
    const LocalFrame frame(shape);
    const double cut = 0.25 * shape.length;
    BinaryMask m(exact.width(), exact.height());
    for (int r = 0; r < exact.height(); ++r) {
      for (int c = 0; c < exact.width(); ++c) {
        if (exact.at(c, r) && frame.to_local(c + 0.5, r + 0.5).first <= cut) m.set(c, r);
      }
    }
    return m.empty() ? exact : m;
  }
  return exact;
}

// Synthetic learned heads whose outputs track mask quality: the positive
// bag rewards pixels on the object, the negative bag and negative points
// penalise masks that stop inside the object, and the box head rewards
// precision times coverage. Offsets use the proposal's own box.
void assign_learned_scores(ScoreBundle& scores, const BinaryMask& proposal, const BinaryMask& exact,
                           const BinaryMask& deep, const PointAnnotation& point,
                           std::size_t category, std::size_t num_categories,
                           const FixtureSpec& spec, std::uint64_t seed, SeededRng& rng) {
  const PointBag pos = sample_positive_bag(proposal, spec.bag_size, mix_seed(seed, 1));
  const PointBag neg = sample_negative_bag(proposal, spec.margin_px, spec.bag_size, mix_seed(seed, 2));
  const MaskConversion conv = obb_from_mask(proposal, ConversionMode::minimum_only());
  const auto outer = negative_points(conv.box, spec.delta);

  const double f_in = fraction_inside(pos.points, exact);
  const double f_deep = fraction_inside(neg.points, deep);
  const double g_in = fraction_inside(outer, exact);

  const double inter = static_cast<double>(overlap(proposal, exact));
  const double precision = inter / static_cast<double>(proposal.count());
  const double coverage = inter / static_cast<double>(exact.count());

  std::vector<double> pos_scores(num_categories, 0.0);
  std::vector<double> neg_scores(num_categories, -4.0);
  std::vector<double> box_scores(num_categories, 0.0);
  pos_scores[category] = 4.0 * f_in - 1.0;
  neg_scores[category] = 6.0 * std::max(f_deep, g_in) - 4.0;
  box_scores[category] = 4.0 * precision * coverage - 1.0;

  scores.pos_bag_class_scores = std::move(pos_scores);
  scores.neg_bag_class_scores = std::move(neg_scores);
  scores.box_cls_scores = std::move(box_scores);
  const double offset = gt_offset(point.point(), mask_aabb(proposal)).value;
  scores.offset_pred = std::clamp(offset + rng.uniform(-0.02, 0.02), 0.0, 1.0);
}

}  // namespace

const char* to_string(FixtureShape shape) noexcept {
  switch (shape) {
    case FixtureShape::kRectangle: return "rectangle";
    case FixtureShape::kEllipse: return "ellipse";
    case FixtureShape::kCross: return "cross";
    case FixtureShape::kLShape: return "l-shape";
  }
  return "?";
}

FixtureShape fixture_shape_from_string(const std::string& name) {
  for (FixtureShape s : {FixtureShape::kRectangle, FixtureShape::kEllipse, FixtureShape::kCross,
                         FixtureShape::kLShape}) {
    if (name == to_string(s)) return s;
  }
  throw Error(ErrorKind::kInvalidInput,
              "unknown fixture shape '" + name + "' (expected rectangle, ellipse, cross or l-shape)");
}

const char* fixture_category(FixtureShape shape) noexcept {
  switch (shape) {
    case FixtureShape::kRectangle: return "large-vehicle";
    case FixtureShape::kEllipse: return "ship";
    case FixtureShape::kCross: return "plane";
    case FixtureShape::kLShape: return "harbor";
  }
  return "?";
}

OrientedBox shape_box(const ShapeParams& shape) {
  return canonical({shape.cx, shape.cy, shape.length, shape.width, shape.angle});
}

BinaryMask rasterize(const ShapeParams& shape, int width, int height) {
  if (!(shape.length > 0.0) || !(shape.width > 0.0) || !std::isfinite(shape.angle)) {
    throw Error(ErrorKind::kInvalidInput, "shape needs positive length and width and a finite angle");
  }
  BinaryMask mask(width, height);
  const LocalFrame frame(shape);
  const double reach = 0.5 * std::hypot(shape.length, shape.width) + 2.0;
  const int c0 = std::max(0, static_cast<int>(std::floor(shape.cx - reach)));
  const int c1 = std::min(width - 1, static_cast<int>(std::ceil(shape.cx + reach)));
  const int r0 = std::max(0, static_cast<int>(std::floor(shape.cy - reach)));
  const int r1 = std::min(height - 1, static_cast<int>(std::ceil(shape.cy + reach)));
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      const auto [u, v] = frame.to_local(c + 0.5, r + 0.5);
      if (inside(shape, u, v)) mask.set(c, r);
    }
  }
  return mask;
}

void validate(const FixtureSpec& spec) {
  auto bad = [](const std::string& field, const std::string& why) {
    throw Error(ErrorKind::kInvalidInput, "fixture spec: " + field + " " + why);
  };
  if (spec.images < 1) bad("images", "must be >= 1");
  if (spec.image_size < 64) bad("image_size", "must be >= 64");
  if (spec.shapes.empty()) bad("shapes", "must not be empty");
  if (!(spec.min_length > 0.0) || !(spec.max_length >= spec.min_length)) {
    bad("min_length/max_length", "must satisfy 0 < min_length <= max_length");
  }
  if (!(spec.min_width_ratio > 0.0) || !(spec.max_width_ratio >= spec.min_width_ratio) ||
      spec.max_width_ratio > 1.0) {
    bad("min_width_ratio/max_width_ratio", "must satisfy 0 < min <= max <= 1");
  }
  if (!(spec.cross_arm_ratio > 0.0 && spec.cross_arm_ratio < 1.0)) bad("cross_arm_ratio", "must lie in (0, 1)");
  if (!(spec.cross_span_ratio > 0.0 && spec.cross_span_ratio <= 1.0)) bad("cross_span_ratio", "must lie in (0, 1]");
  if (!(spec.lshape_arm_ratio > 0.0 && spec.lshape_arm_ratio < 1.0)) bad("lshape_arm_ratio", "must lie in (0, 1)");
  if (!(spec.jitter >= 0.0) || !std::isfinite(spec.jitter)) bad("jitter", "must be finite and >= 0");
  if (!(spec.delta >= 0.0) || !std::isfinite(spec.delta)) bad("delta", "must be finite and >= 0");
  if (spec.bag_size < 1) bad("bag_size", "must be >= 1");
  if (spec.margin_px < 1) bad("margin_px", "must be >= 1");
  const double widest = std::max(spec.max_width_ratio, spec.cross_span_ratio);
  if (0.5 * spec.max_length * std::hypot(1.0, widest) + 8.0 > 0.25 * spec.image_size) {
    bad("max_length", "does not fit a quarter of the image");
  }
}

std::vector<PointAnnotation> FixtureDataset::points() const {
  std::vector<PointAnnotation> out;
  for (const FixtureImage& img : images) out.insert(out.end(), img.points.begin(), img.points.end());
  return out;
}

std::vector<LabeledBox> FixtureDataset::ground_truth() const {
  std::vector<LabeledBox> out;
  for (const FixtureImage& img : images) {
    out.insert(out.end(), img.ground_truth.begin(), img.ground_truth.end());
  }
  return out;
}

std::vector<ProposalFile> FixtureDataset::proposal_files() const {
  std::vector<ProposalFile> out;
  for (const FixtureImage& img : images) out.push_back(img.proposals);
  return out;
}

FixtureDataset generate_fixtures(const FixtureSpec& spec) {
  validate(spec);
  const std::vector<std::string>& categories =
      spec.categories.empty() ? dota_v1_categories() : spec.categories;
  auto category_of = [&](FixtureShape shape) {
    const std::string name = fixture_category(shape);
    const auto it = std::find(categories.begin(), categories.end(), name);
    if (it == categories.end()) {
      throw Error(ErrorKind::kInvalidInput, "fixture category '" + name + "' is not in the category table");
    }
    return static_cast<std::size_t>(it - categories.begin());
  };

  FixtureDataset dataset;
  const int size = spec.image_size;
  const double cell = 0.5 * size;
  for (int i = 0; i < spec.images; ++i) {
    FixtureImage image;
    char id[32];
    std::snprintf(id, sizeof(id), "fx%04d", i);
    image.image_id = id;
    image.proposals.image_id = id;
    image.proposals.width = size;
    image.proposals.height = size;

    for (int k = 0; k < 4; ++k) {
      const std::uint64_t inst_seed = mix_seed(mix_seed(spec.seed, static_cast<std::uint64_t>(i)), k);
      SeededRng rng(inst_seed);

      ShapeParams shape;
      shape.shape = spec.shapes[rng.uniform_index(spec.shapes.size())];
      shape.length = rng.uniform(spec.min_length, spec.max_length);
      switch (shape.shape) {
        case FixtureShape::kCross:
          shape.width = spec.cross_span_ratio * shape.length;
          shape.arm_ratio = spec.cross_arm_ratio;
          break;
        case FixtureShape::kLShape:
          shape.width = rng.uniform(spec.min_width_ratio, spec.max_width_ratio) * shape.length;
          shape.arm_ratio = spec.lshape_arm_ratio;
          break;
        default:
          shape.width = rng.uniform(spec.min_width_ratio, spec.max_width_ratio) * shape.length;
          break;
      }
      shape.angle = rng.uniform(-kHalfPi, kHalfPi);
      shape.cx = cell * (0.5 + k % 2) + rng.uniform(-8.0, 8.0);
      shape.cy = cell * (0.5 + k / 2) + rng.uniform(-8.0, 8.0);

      const std::string category = fixture_category(shape.shape);
      const std::size_t category_index = category_of(shape.shape);
      PointAnnotation point{image.image_id, shape.cx, shape.cy, category};
      if (spec.jitter > 0.0) {
        const double radius = spec.jitter * std::sqrt(rng.uniform01());
        const double dir = rng.uniform(-kPi, kPi);
        point.x += radius * std::cos(dir);
        point.y += radius * std::sin(dir);
      }
      const std::size_t point_index = image.points.size();
      image.points.push_back(point);
      image.ground_truth.push_back({image.image_id, shape_box(shape), category, false, std::nullopt});
      image.shapes.push_back(shape);

      const BinaryMask exact = rasterize(shape, size, size);
      const BinaryMask deep = erode(exact, 3);

      std::vector<std::size_t> order(std::size(kVariants));
      for (std::size_t v = 0; v < order.size(); ++v) order[v] = v;
      for (std::size_t v = order.size() - 1; v > 0; --v) {
        std::swap(order[v], order[rng.uniform_index(v + 1)]);
      }
      for (std::size_t v : order) {
        const Variant& variant = kVariants[v];
        const BinaryMask mask = make_variant(variant.name, shape, exact, size, rng);
        ProposalEntry entry;
        entry.point = point_index;
        entry.proposal.mask = rle_encode(mask);
        entry.proposal.scores.s_sam = std::clamp(variant.base_sam + rng.uniform(-0.05, 0.05), 0.0, 1.0);
        if (spec.learned_scores) {
          assign_learned_scores(entry.proposal.scores, mask, exact, deep, point, category_index,
                                categories.size(), spec, mix_seed(inst_seed, 16 + v), rng);
        }
        image.proposals.proposals.push_back(std::move(entry));
        image.variants.push_back(variant.name);
      }
    }
    dataset.images.push_back(std::move(image));
  }
  return dataset;
}

void write_fixtures(const FixtureDataset& dataset, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "gt");
  std::filesystem::create_directories(dir / "proposals");
  std::ostringstream points;
  write_points(points, dataset.points());
  write_file_atomic(dir / "points.csv", points.str());
  for (const FixtureImage& image : dataset.images) {
    std::ostringstream gt;
    write_dota_annotations(gt, image.ground_truth);
    write_file_atomic(dir / "gt" / (image.image_id + ".txt"), gt.str());
    std::ostringstream proposals;
    write_proposals(proposals, image.proposals);
    write_file_atomic(dir / "proposals" / (image.image_id + ".json"), proposals.str());
  }
}

}  // namespace obbpl
