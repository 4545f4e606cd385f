// Copyright 2026 The obbpl Authors
// SPDX-License-Identifier: Apache-2.0

// obbpl: point annotations + mask proposals -> oriented-box pseudo-labels.
//
// Exit codes: 0 success, 1 invalid input or usage, 2 internal error.

#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "obbpl/config.hpp"
#include "obbpl/error.hpp"
#include "obbpl/eval.hpp"
#include "obbpl/fixtures.hpp"
#include "obbpl/formats.hpp"
#include "obbpl/pipeline.hpp"
#include "obbpl/symmetry.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ConfigFlags {
  std::string config_path;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> delta;
  std::optional<int> bag_size;
  std::optional<int> margin_px;
  std::optional<std::string> conversion;
  std::optional<std::string> strategy;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> metric;
  std::optional<int> workers;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app->add_option("--alpha", alpha, "weight of the bag term");
    app->add_option("--beta", beta, "weight of the centrality term");
    app->add_option("--delta", delta, "negative-point box enlargement");
    app->add_option("--bag-size", bag_size, "points per bag");
    app->add_option("--margin-px", margin_px, "margin width in pixels");
    app->add_option("--conversion", conversion, "minimum-only | symmetry-axis | per-category");
    app->add_option("--strategy", strategy, "sam-top | fused | oracle");
    app->add_option("--seed", seed, "random seed");
    app->add_option("--metric", metric, "voc07 | continuous");
    app->add_option("--workers", workers, "worker threads");
  }

  obbpl::PipelineConfig resolve() const {
    obbpl::PipelineConfig c = config_path.empty() ? obbpl::PipelineConfig{} : obbpl::load_config(config_path);
    if (alpha) c.weights.alpha = *alpha;
    if (beta) c.weights.beta = *beta;
    if (delta) c.delta = *delta;
    if (bag_size) c.bag_size = *bag_size;
    if (margin_px) c.margin_px = *margin_px;
    if (conversion) c.conversion = obbpl::conversion_mode_from_string(*conversion);
    if (strategy) c.strategy = obbpl::strategy_kind_from_string(*strategy);
    if (seed) c.seed = *seed;
    if (metric) c.metric_mode = obbpl::metric_mode_from_string(*metric);
    if (workers) c.workers = *workers;
    obbpl::validate(c);
    return c;
  }
};

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    obbpl::write_file_atomic(path, text);
  }
}

json box_json(const obbpl::OrientedBox& b) {
  return {{"cx", b.cx}, {"cy", b.cy}, {"w", b.w}, {"h", b.h}, {"angle", b.angle}};
}

std::vector<obbpl::LabeledBox> ground_truth_for(const obbpl::Dataset& dataset, const std::string& gt_dir,
                                                bool required) {
  if (gt_dir.empty()) {
    if (required) {
      throw obbpl::Error(obbpl::ErrorKind::kMissingGroundTruth, "oracle selection needs --gt");
    }
    return {};
  }
  return obbpl::load_paired_ground_truth(dataset, gt_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oriented-box pseudo-labels from point annotations and mask proposals"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "obbpl 0.1.0");

  ConfigFlags flags;
  std::string points, proposals, gt, out, selections_out, json_out, label, pseudo;
  double w = 0, h = 0, alpha_ratio = 0;
  std::size_t index = 0;
  int images = 25;
  std::vector<std::string> shapes;
  double jitter = 0.0, arm_ratio = 0.2;
  bool sam_only = false;

  auto* convert = app.add_subcommand("convert", "select a proposal per point and write DOTA pseudo-labels");
  flags.attach(convert);
  convert->add_option("--points", points, "points CSV")->required()->check(CLI::ExistingFile);
  convert->add_option("--proposals", proposals, "proposal JSON directory")->required()->check(CLI::ExistingDirectory);
  convert->add_option("--gt", gt, "ground truth directory (oracle strategy)")->check(CLI::ExistingDirectory);
  convert->add_option("--out", out, "output directory")->required();
  convert->add_option("--selections", selections_out, "also write selection JSON here");

  auto* select = app.add_subcommand("select", "write the chosen proposal index and scores per point");
  flags.attach(select);
  select->add_option("--points", points, "points CSV")->required()->check(CLI::ExistingFile);
  select->add_option("--proposals", proposals, "proposal JSON directory")->required()->check(CLI::ExistingDirectory);
  select->add_option("--gt", gt, "ground truth directory (oracle strategy)")->check(CLI::ExistingDirectory);
  select->add_option("--out", out, "output JSON file (default stdout)");

  auto* evaluate = app.add_subcommand("evaluate", "score pseudo-labels against ground truth");
  flags.attach(evaluate);
  evaluate->add_option("--pseudo", pseudo, "pseudo-label directory")->required()->check(CLI::ExistingDirectory);
  evaluate->add_option("--gt", gt, "ground truth directory")->required()->check(CLI::ExistingDirectory);
  evaluate->add_option("--json", json_out, "write the report JSON here");
  evaluate->add_option("--label", label, "report label");

  auto* oracle = app.add_subcommand("oracle", "compare sam-top, fused and oracle selection");
  flags.attach(oracle);
  oracle->add_option("--points", points, "points CSV")->required()->check(CLI::ExistingFile);
  oracle->add_option("--proposals", proposals, "proposal JSON directory")->required()->check(CLI::ExistingDirectory);
  oracle->add_option("--gt", gt, "ground truth directory")->required()->check(CLI::ExistingDirectory);
  oracle->add_option("--json", json_out, "write the reports JSON here");

  auto* analyze = app.add_subcommand("analyze-symmetry", "minimum-rectangle ambiguity for w, h, alpha or a mask");
  analyze->set_help_flag("--help", "Print this help message and exit");
  auto* w_opt = analyze->add_option("--w", w, "box width");
  auto* h_opt = analyze->add_option("--h", h, "box height");
  auto* a_opt = analyze->add_option("--alpha", alpha_ratio, "tangent intersection ratio");
  auto* file_opt = analyze->add_option("--proposals", proposals, "proposal JSON file")->check(CLI::ExistingFile);
  auto* index_opt = analyze->add_option("--index", index, "proposal index within the file");
  w_opt->needs(h_opt, a_opt)->excludes(file_opt);
  h_opt->needs(w_opt);
  a_opt->needs(w_opt);
  file_opt->needs(index_opt);
  index_opt->needs(file_opt);

  auto* gen = app.add_subcommand("gen-fixtures", "write a synthetic dataset with known ground truth");
  flags.attach(gen);
  gen->add_option("--out", out, "output directory")->required();
  gen->add_option("--images", images, "number of 512x512 images, four instances each");
  gen->add_option("--shapes", shapes, "rectangle, ellipse, cross, l-shape")->delimiter(',');
  gen->add_option("--jitter", jitter, "annotated point jitter radius in pixels");
  gen->add_option("--arm-ratio", arm_ratio, "cross bar thickness relative to its length");
  gen->add_flag("--sam-only", sam_only, "omit learned score fields");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*convert || *select) {
      const obbpl::PipelineConfig config = flags.resolve();
      const obbpl::Dataset dataset = obbpl::load_dataset(points, proposals, config.categories, config.workers);
      const auto truth = ground_truth_for(dataset, gt, config.strategy == obbpl::StrategyKind::kOracle);
      const obbpl::PipelineResult result = obbpl::run_pipeline(dataset, config, truth);
      if (*convert) {
        obbpl::write_pseudo_labels(out, result);
        if (!selections_out.empty()) emit(obbpl::selection_json(dataset, result), selections_out);
        std::cerr << "wrote " << result.labels.size() << " pseudo-labels (" << result.strategy << ") to "
                  << out << "\n";
      } else {
        emit(obbpl::selection_json(dataset, result), out);
      }
    } else if (*evaluate) {
      const obbpl::PipelineConfig config = flags.resolve();
      const obbpl::PairedLabels labels = obbpl::load_label_dirs(pseudo, gt);
      const obbpl::EvalReport report = obbpl::evaluate(labels.pseudo, labels.ground_truth, config.metric_mode,
                                                       config.categories, label);
      std::cout << obbpl::report_table({report});
      if (!json_out.empty()) emit(obbpl::report_json(report), json_out);
    } else if (*oracle) {
      obbpl::PipelineConfig config = flags.resolve();
      const obbpl::Dataset dataset = obbpl::load_dataset(points, proposals, config.categories, config.workers);
      const auto truth = ground_truth_for(dataset, gt, true);
      std::vector<obbpl::EvalReport> reports;
      for (obbpl::StrategyKind kind : {obbpl::StrategyKind::kSamTop, obbpl::StrategyKind::kFused}) {
        config.strategy = kind;
        const obbpl::PipelineResult result = obbpl::run_pipeline(dataset, config, truth);
        reports.push_back(obbpl::evaluate(obbpl::labeled_boxes(result), truth, config.metric_mode,
                                          config.categories, result.strategy));
      }
      reports.push_back(obbpl::oracle_report(dataset.sets, truth, config.conversion, config.metric_mode,
                                             config.categories));
      std::cout << obbpl::report_table(reports);
      if (!json_out.empty()) emit(obbpl::reports_json(reports), json_out);
    } else if (*analyze) {
      json doc;
      if (*w_opt) {
        const obbpl::AmbiguityReport r = obbpl::ambiguity_analysis(w, h, alpha_ratio);
        doc = {{"w", r.w},
               {"h", r.h},
               {"alpha_ratio", r.alpha_ratio},
               {"diagonal_d", r.diagonal_d},
               {"d_squared_minus_2wh", r.diagonal_d * r.diagonal_d - 2.0 * r.w * r.h},
               {"min_rect_may_differ", r.min_rect_may_differ}};
      } else if (*file_opt) {
        const obbpl::ProposalFile file = obbpl::parse_proposals(fs::path(proposals));
        if (index >= file.proposals.size()) {
          throw obbpl::Error(obbpl::ErrorKind::kInvalidInput,
                             "--index " + std::to_string(index) + " is out of range; the file has " +
                                 std::to_string(file.proposals.size()) + " proposals");
        }
        const obbpl::BinaryMask mask = obbpl::rle_decode(file.proposals[index].proposal.mask);
        const auto min_only = obbpl::obb_from_mask(mask, obbpl::ConversionMode::minimum_only());
        const auto sym = obbpl::obb_from_mask(mask, obbpl::ConversionMode::symmetry_axis());
        doc = {{"image_id", file.image_id},
               {"index", index},
               {"pixels", mask.count()},
               {"minimum_only", box_json(min_only.box)},
               {"symmetry_axis", box_json(sym.box)},
               {"isotropic", sym.isotropic_fallback},
               {"angle_difference_deg",
                obbpl::angle_distance_mod_half(min_only.box.angle, sym.box.angle) * 180.0 / obbpl::kPi},
               {"area_ratio", sym.box.area() / min_only.box.area()}};
      } else {
        throw obbpl::Error(obbpl::ErrorKind::kInvalidInput,
                           "analyze-symmetry needs --w/--h/--alpha or --proposals/--index");
      }
      std::cout << doc.dump(2) << "\n";
    } else if (*gen) {
      const obbpl::PipelineConfig config = flags.resolve();
      obbpl::FixtureSpec spec;
      spec.images = images;
      if (!shapes.empty()) {
        spec.shapes.clear();
        for (const std::string& s : shapes) spec.shapes.push_back(obbpl::fixture_shape_from_string(s));
      }
      spec.jitter = jitter;
      spec.cross_arm_ratio = arm_ratio;
      spec.learned_scores = !sam_only;
      spec.delta = config.delta;
      spec.bag_size = config.bag_size;
      spec.margin_px = config.margin_px;
      spec.categories = config.categories;
      spec.seed = config.seed;
      const obbpl::FixtureDataset dataset = obbpl::generate_fixtures(spec);
      obbpl::write_fixtures(dataset, out);
      std::cerr << "wrote " << dataset.images.size() << " images, " << dataset.points().size()
                << " instances to " << out << "\n";
    }
  } catch (const obbpl::Error& e) {
    std::cerr << "error (" << obbpl::to_string(e.kind()) << "): " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
