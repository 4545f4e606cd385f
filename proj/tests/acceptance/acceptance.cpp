// Copyright 2026 The obbpl Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "obbpl/config.hpp"
#include "obbpl/eval.hpp"
#include "obbpl/fixtures.hpp"
#include "obbpl/formats.hpp"
#include "obbpl/geometry.hpp"
#include "obbpl/pipeline.hpp"
#include "obbpl/scoring.hpp"
#include "obbpl/selection.hpp"
#include "obbpl/symmetry.hpp"
#include "oracles.hpp"

namespace {

using namespace obbpl;
namespace fs = std::filesystem;

constexpr double kDeg = kPi / 180.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void run(const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

Outcome symmetry_axis_recovery() {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int deg = 0; deg <= 75; deg += 15) {
    const BinaryMask m = oracle::rasterized_box({150.3, 149.6, 201, 101, deg * kDeg}, 300, 300);
    worst = std::max(worst, oracle::axis_distance(symmetry_axis(m), deg * kDeg, kPi));
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worst < 1 * kDeg && seconds < 1.0,
          fmt("max error %.4f deg (limit 1), runtime %.3f s (limit 1)", worst / kDeg, seconds)};
}

Outcome eigen_vs_sweep() {
  std::mt19937_64 rng(1001);
  int blobs = 0;
  double worst = 0.0;
  while (blobs < 50) {
    const BinaryMask m = oracle::random_blob(rng, 64, 48);
    const std::vector<Point2> pts = pixel_points(m);
    if (pts.size() < 3) continue;
    const auto axis = axis_from_moments(second_moments(pts, centroid(m)));
    if (!axis) continue;
    ++blobs;
    worst = std::max(worst, oracle::axis_distance(*axis, oracle::sweep_max_variance_angle(pts), kPi));
  }
  return {worst <= 0.5 * kDeg, fmt("max disagreement %.4f deg over %d blobs (limit 0.5)", worst / kDeg, blobs)};
}

Outcome min_rect_vs_sweep() {
  std::mt19937_64 rng(1002);
  std::uniform_int_distribution<int> count(3, 200);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  double worst = 0.0;
  std::size_t outside = 0;
  for (int t = 0; t < 100; ++t) {
    const double sx = 10 * u(rng), sy = 10 * u(rng), rot = u(rng);
    std::vector<Point2> pts(count(rng));
    for (Point2& p : pts) {
      const double a = sx * g(rng), b = sy * g(rng);
      p = {a * std::cos(rot) - b * std::sin(rot), a * std::sin(rot) + b * std::cos(rot)};
    }
    const OrientedBox box = min_area_rect(pts);
    const double sweep = oracle::sweep_min_area(pts).area;
    worst = std::max(worst, std::abs(box.area() - sweep) / sweep);
    if (box.area() > sweep * (1 + 1e-9)) worst = std::max(worst, 1.0);
    for (const Point2& p : pts) outside += !oracle::box_contains(box, p, 1e-6);
  }
  return {worst <= 0.005 && outside == 0,
          fmt("max relative area gap %.5f%% (limit 0.5%%), points outside %zu", 100 * worst, outside)};
}

Outcome iou_vs_raster() {
  std::mt19937_64 rng(1003);
  double worst = 0.0;
  int overlapping = 0;
  for (int t = 0; t < 100; ++t) {
    const OrientedBox a = oracle::random_box(rng, 0, 20, 2, 14);
    const OrientedBox b = oracle::random_box(rng, 0, 20, 2, 14);
    const double exact = rotated_iou(a, b);
    overlapping += exact > 0;
    worst = std::max(worst, std::abs(exact - oracle::raster_iou(a, b, 1000)));
  }
  const double third = rotated_iou({0.5, 0.5, 1, 1, 0}, {1.0, 0.5, 1, 1, 0});
  const bool exact_third = std::abs(third - 1.0 / 3.0) <= 1e-15;
  return {worst <= 0.01 && exact_third,
          fmt("max |exact - raster| %.5f over 100 pairs (%d overlapping, limit 0.01); shifted squares %.17g",
              worst, overlapping, third)};
}

Outcome gt_offset_anchors() {
  const AxisAlignedBox box{0, 0, 10, 6};
  const double center = gt_offset({5, 3}, box).value;
  const double quarter = gt_offset({2.5, 3}, box).value;
  const double quarter_expected = 1 - std::sqrt(1.0 / 3.0);
  bool monotone = true;
  const Point2 c{5, 3};
  for (int ray = 0; ray < 36; ++ray) {
    const double dx = std::cos(ray * 10 * kDeg), dy = std::sin(ray * 10 * kDeg);
    double reach = 1e9;
    if (dx > 1e-12) reach = std::min(reach, (box.x2 - c.x) / dx);
    if (dx < -1e-12) reach = std::min(reach, (box.x1 - c.x) / dx);
    if (dy > 1e-12) reach = std::min(reach, (box.y2 - c.y) / dy);
    if (dy < -1e-12) reach = std::min(reach, (box.y1 - c.y) / dy);
    double previous = -1.0;
    for (int k = 0; k < 100; ++k) {
      const double s = reach * k / 100.0;
      const double v = gt_offset({c.x + s * dx, c.y + s * dy}, box).value;
      monotone = monotone && v >= previous;
      previous = v;
    }
  }
  return {center == 0.0 && std::abs(quarter - quarter_expected) <= 1e-12 && monotone,
          fmt("center %.3g, quarter error %.3g (limit 1e-12), monotone on 36 rays x 100 steps: %s", center,
              std::abs(quarter - quarter_expected), monotone ? "yes" : "no")};
}

Outcome negative_point_checks() {
  bool ok = true;
  double worst = 0.0;
  // Hand evaluation: centre + i*(1+d)w/2 * u + j*(1+d)h/2 * v on an angle-0 box.
  const auto pts = negative_points({0, 0, 10, 4, 0}, 0.05);
  ok = ok && pts.size() == 8;
  std::vector<Point2> expected;
  for (int i = -1; i <= 1; ++i) {
    for (int j = -1; j <= 1; ++j) {
      if (i != 0 || j != 0) expected.push_back({i * 5.25, j * 2.1});
    }
  }
  for (const Point2& e : expected) {
    double best = 1e9;
    for (const Point2& p : pts) best = std::min(best, std::hypot(p.x - e.x, p.y - e.y));
    worst = std::max(worst, best);
  }
  const OrientedBox rotated{3, -2, 9, 5, 0.7};
  const auto r = negative_points(rotated);
  bool closed = true, center_excluded = true;
  for (const Point2& p : r) {
    center_excluded = center_excluded && std::hypot(p.x - rotated.cx, p.y - rotated.cy) > 1e-9;
    bool found = false;
    for (const Point2& q : r) {
      found = found || std::hypot(q.x - (2 * rotated.cx - p.x), q.y - (2 * rotated.cy - p.y)) < 1e-12;
    }
    closed = closed && found;
  }
  ok = ok && worst <= 1e-12 && closed && center_excluded;
  return {ok, fmt("8 points, center excluded: %s, half-turn closure: %s, max hand-evaluation error %.3g",
                  center_excluded ? "yes" : "no", closed ? "yes" : "no", worst)};
}

SelectionContext context(const PipelineConfig& config, const ProposalSet& set) {
  SelectionContext ctx;
  ctx.category_index = config.category_index(set.annotation.category);
  ctx.conversion = config.conversion;
  return ctx;
}

Outcome fusion_selection() {
  const PipelineConfig config;
  std::size_t sets = 0, zero_weight_mismatch = 0, invariance_mismatch = 0;
  for (const bool learned : {true, false}) {
    FixtureSpec spec;
    spec.learned_scores = learned;
    spec.seed = learned ? 7 : 8;
    const FixtureDataset f = generate_fixtures(spec);
    const Dataset d = assemble_dataset(f.points(), f.proposal_files());
    for (const ProposalSet& set : d.sets) {
      ++sets;
      const SelectionContext ctx = context(config, set);
      const std::size_t top = select(set, SamTop{}, ctx).index;
      const std::size_t fused = select(set, Fused{}, ctx).index;
      zero_weight_mismatch += select(set, Fused{{0.0, 0.0}}, ctx).index != top;

      // SamTop under strictly increasing maps of s_sam.
      for (const auto& map : std::vector<std::function<double(double)>>{
               [](double s) { return std::exp(4 * s); }, [](double s) { return 2.5 * s - 1; },
               [](double s) { return s * s * s; }}) {
        ProposalSet moved = set;
        for (Proposal& p : moved.proposals) p.scores.s_sam = map(p.scores.s_sam);
        invariance_mismatch += select(moved, SamTop{}, ctx).index != top;
      }
      // Fused scores under a common positive scale and shift.
      for (const double k : {0.5, 3.0}) {
        ProposalSet moved = set;
        for (Proposal& p : moved.proposals) p.scores.s_sam = k * p.scores.s_sam + 0.75;
        invariance_mismatch += select(moved, Fused{{k, k}}, ctx).index != fused;
      }
    }
  }
  return {zero_weight_mismatch == 0 && invariance_mismatch == 0,
          fmt("%zu sets; alpha=beta=0 vs sam-top mismatches %zu; monotone-transform argmax changes %zu", sets,
              zero_weight_mismatch, invariance_mismatch)};
}

Outcome oracle_dominance() {
  FixtureSpec spec;
  spec.images = 125;
  spec.seed = 11;
  const FixtureDataset f = generate_fixtures(spec);
  const Dataset d = assemble_dataset(f.points(), f.proposal_files());
  const std::vector<LabeledBox> truth = f.ground_truth();

  PipelineConfig config;
  const PipelineResult fused = run_pipeline(d, config);
  config.strategy = StrategyKind::kOracle;
  const PipelineResult oracle = run_pipeline(d, config, truth);
  const double fused_miou = miou(labeled_boxes(fused), truth).mean;
  const double oracle_miou = miou(labeled_boxes(oracle), truth).mean;

  std::size_t agree = 0;
  for (std::size_t i = 0; i < d.sets.size(); ++i) {
    const ProposalSet& set = d.sets[i];
    std::size_t best = 0;
    double best_iou = -1.0;
    for (std::size_t k = 0; k < set.proposals.size(); ++k) {
      const BinaryMask m = rle_decode(set.proposals[k].mask);
      const double iou = rotated_iou(obb_from_mask(m, config.conversion, set.annotation.category).box,
                                     truth[i].box);
      if (iou > best_iou) {
        best_iou = iou;
        best = k;
      }
    }
    agree += oracle.selections[i].index == best;
  }
  return {d.sets.size() == 500 && oracle_miou >= fused_miou && fused_miou >= 0.0 && agree == d.sets.size(),
          fmt("%zu sets; oracle mIoU %.4f >= fused %.4f >= 0; IoU-max index chosen %zu/%zu", d.sets.size(),
              oracle_miou, fused_miou, agree, d.sets.size())};
}

Outcome ambiguity_boundary() {
  const AmbiguityReport r = ambiguity_analysis(1, 1, std::sqrt(2.0) - 1);
  const double gap = r.diagonal_d * r.diagonal_d - 2 * r.w * r.h;
  double worst_sym = 0.0, worst_min = 0.0;
  for (const double axis_deg : {20.0, 35.0, 50.0, 70.0}) {
    const ShapeParams cross{FixtureShape::kCross, 200.4, 199.7, 160, 152, axis_deg * kDeg, 0.2};
    const BinaryMask m = rasterize(cross, 400, 400);
    const double sym = obb_from_mask(m, ConversionMode::symmetry_axis()).box.angle;
    const double min = obb_from_mask(m, ConversionMode::minimum_only()).box.angle;
    worst_sym = std::max(worst_sym, oracle::axis_distance(sym, axis_deg * kDeg, kPi));
    worst_min = std::max(worst_min, std::abs(oracle::axis_distance(min, axis_deg * kDeg, kHalfPi) - 45 * kDeg));
  }
  return {std::abs(gap) <= 1e-9 && r.min_rect_may_differ && worst_sym < 1 * kDeg && worst_min <= 3 * kDeg,
          fmt("d^2-2wh = %.3g (limit 1e-9); cross arm 0.2: symmetry-axis error %.3f deg (limit 1), "
              "minimum-only offset from 45 deg at most %.3f deg (limit 3)",
              gap, worst_sym / kDeg, worst_min / kDeg)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct EndToEnd {
  std::string bytes;
  double miou = 0.0;
};

EndToEnd end_to_end_run(const fs::path& root, const fs::path& data, StrategyKind strategy, int workers,
                        const std::string& tag) {
  PipelineConfig config;
  config.strategy = strategy;
  config.workers = workers;
  const Dataset d = load_dataset(data / "points.csv", data / "proposals", config.categories, workers);
  const PipelineResult result = run_pipeline(d, config);
  const fs::path out = root / tag;
  fs::remove_all(out);
  write_pseudo_labels(out, result);
  const PairedLabels paired = load_label_dirs(out, data / "gt");
  const EvalReport report = evaluate(paired.pseudo, paired.ground_truth, config.metric_mode, config.categories,
                                     to_string(strategy));
  EndToEnd e;
  e.bytes = selection_json(d, result) + reports_json({report});
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(out)) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const fs::path& p : files) e.bytes += p.filename().string() + "\n" + slurp(p);
  e.miou = report.mean_miou;
  return e;
}

Outcome end_to_end() {
  const fs::path root = fs::temp_directory_path() / "obbpl_acceptance_e2e";
  fs::remove_all(root);
  FixtureSpec spec;
  spec.seed = 2026;
  const FixtureDataset f = generate_fixtures(spec);
  write_fixtures(f, root / "data");
  const std::size_t instances = f.ground_truth().size();

  const EndToEnd a = end_to_end_run(root, root / "data", StrategyKind::kFused, 1, "a");
  const EndToEnd b = end_to_end_run(root, root / "data", StrategyKind::kFused, 1, "b");
  const EndToEnd c = end_to_end_run(root, root / "data", StrategyKind::kFused, 4, "c");
  const EndToEnd top = end_to_end_run(root, root / "data", StrategyKind::kSamTop, 4, "top");
  fs::remove_all(root);
  const bool identical = a.bytes == b.bytes && a.bytes == c.bytes;
  return {instances == 100 && identical && a.miou >= top.miou,
          fmt("%zu instances; byte-identical across runs and 1/4 workers: %s; fused mIoU %.4f >= sam-top %.4f",
              instances, identical ? "yes" : "no", a.miou, top.miou)};
}

Outcome ap_fixtures() {
  auto gt = [](double cx) { return LabeledBox{"a", {cx, 0, 10, 4, 0}, "ship", false, std::nullopt}; };
  auto det = [](double cx, double conf) { return Detection{"a", {cx, 0, 10, 4, 0}, "ship", conf}; };
  const std::vector<LabeledBox> two{gt(0), gt(40)};
  const std::vector<Detection> three{det(0, 0.9), det(200, 0.8), det(0.2, 0.7)};
  const double cont = *average_precision(three, two, 0.5, MetricMode::kContinuous).ap;
  const double voc = *average_precision(three, two, 0.5, MetricMode::kVoc07).ap;
  const double perfect_voc = *average_precision({det(0, 0.9)}, {gt(0)}, 0.5, MetricMode::kVoc07).ap;
  const double perfect_cont = *average_precision({det(0, 0.9)}, {gt(0)}, 0.5, MetricMode::kContinuous).ap;
  return {cont == 0.5 && voc >= 0.45 && voc <= 0.55 && perfect_voc == 1.0 && perfect_cont == 1.0,
          fmt("3-detection continuous %.6f (want 0.5), voc07 %.6f (want [0.45, 0.55]); perfect %.3f / %.3f",
              cont, voc, perfect_voc, perfect_cont)};
}

}  // namespace

int main() {
  run("symmetry-axis recovery", symmetry_axis_recovery);
  run("eigen vs sweep", eigen_vs_sweep);
  run("min-area rectangle", min_rect_vs_sweep);
  run("rotated IoU", iou_vs_raster);
  run("gt_offset anchors", gt_offset_anchors);
  run("negative points", negative_point_checks);
  run("fusion and selection", fusion_selection);
  run("oracle dominance", oracle_dominance);
  run("ambiguity boundary", ambiguity_boundary);
  run("end-to-end determinism", end_to_end);
  run("AP fixtures", ap_fixtures);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
