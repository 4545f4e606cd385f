// Copyright 2026 The obbpl Authors
// SPDX-License-Identifier: Apache-2.0

#include "obbpl/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "obbpl/error.hpp"

namespace obbpl {

using nlohmann::json;

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  std::vector<std::exception_ptr> errors(n);
  auto run = [&](std::size_t i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), n);
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    {
      std::vector<std::jthread> pool;
      pool.reserve(threads);
      for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
          for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) run(i);
        });
      }
    }
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

Dataset assemble_dataset(const std::vector<PointAnnotation>& points,
                         const std::vector<ProposalFile>& files) {
  std::map<std::string, std::vector<const PointAnnotation*>> by_image;
  for (const PointAnnotation& p : points) by_image[p.image_id].push_back(&p);
  std::map<std::string, const ProposalFile*> file_for;
  for (const ProposalFile& f : files) {
    if (!file_for.emplace(f.image_id, &f).second) {
      throw Error(ErrorKind::kInvalidInput, "duplicate proposal file for image '" + f.image_id + "'");
    }
  }

  Dataset dataset;
  for (const auto& [image_id, image_points] : by_image) {
    const auto it = file_for.find(image_id);
    if (it == file_for.end()) {
      throw Error(ErrorKind::kInvalidInput, "no proposals for image '" + image_id + "'");
    }
    const ProposalFile& file = *it->second;
    std::vector<ProposalSet> sets(image_points.size());
    for (std::size_t k = 0; k < image_points.size(); ++k) sets[k].annotation = *image_points[k];
    for (const ProposalEntry& entry : file.proposals) {
      if (entry.point >= sets.size()) {
        throw Error(ErrorKind::kInvalidInput, "image '" + image_id + "': proposal refers to point " +
                                                  std::to_string(entry.point) + " but the image has " +
                                                  std::to_string(sets.size()) + " points");
      }
      sets[entry.point].proposals.push_back(entry.proposal);
    }
    for (std::size_t k = 0; k < sets.size(); ++k) {
      if (sets[k].proposals.empty()) {
        throw Error(ErrorKind::kInvalidInput,
                    "image '" + image_id + "': point " + std::to_string(k) + " has no proposals");
      }
      dataset.sets.push_back(std::move(sets[k]));
      dataset.point_index.push_back(k);
    }
  }
  return dataset;
}

Dataset load_dataset(const std::filesystem::path& points_csv,
                     const std::filesystem::path& proposals_dir,
                     const std::vector<std::string>& categories, int workers) {
  const std::vector<PointAnnotation> points = parse_points(points_csv, categories);
  std::vector<std::string> ids;
  for (const PointAnnotation& p : points) ids.push_back(p.image_id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  std::vector<ProposalFile> files(ids.size());
  parallel_for(ids.size(), workers, [&](std::size_t i) {
    const std::filesystem::path path = proposals_dir / (ids[i] + ".json");
    if (!std::filesystem::exists(path)) {
      throw Error(ErrorKind::kInvalidInput, "missing proposal file " + path.string());
    }
    files[i] = parse_proposals(path);
    if (files[i].image_id != ids[i]) {
      throw Error(ErrorKind::kFormat, path.string() + ": image_id '" + files[i].image_id +
                                          "' does not match the file name");
    }
  });
  return assemble_dataset(points, files);
}

std::vector<LabeledBox> load_paired_ground_truth(const Dataset& dataset,
                                                 const std::filesystem::path& gt_dir) {
  std::map<std::string, std::vector<LabeledBox>> cache;
  std::vector<LabeledBox> out;
  out.reserve(dataset.sets.size());
  for (std::size_t i = 0; i < dataset.sets.size(); ++i) {
    const PointAnnotation& a = dataset.sets[i].annotation;
    auto it = cache.find(a.image_id);
    if (it == cache.end()) {
      const std::filesystem::path path = gt_dir / (a.image_id + ".txt");
      if (!std::filesystem::exists(path)) {
        throw Error(ErrorKind::kMissingGroundTruth, "missing ground truth file " + path.string());
      }
      it = cache.emplace(a.image_id, parse_dota_annotations(path)).first;
    }
    const std::vector<LabeledBox>& boxes = it->second;
    const std::size_t k = dataset.point_index[i];
    if (k >= boxes.size()) {
      throw Error(ErrorKind::kPairing, "image '" + a.image_id + "': point " + std::to_string(k) +
                                           " has no ground truth box");
    }
    if (boxes[k].category != a.category) {
      throw Error(ErrorKind::kPairing, "image '" + a.image_id + "': point " + std::to_string(k) +
                                           " is '" + a.category + "' but its ground truth is '" +
                                           boxes[k].category + "'");
    }
    out.push_back(boxes[k]);
  }
  for (const auto& [image_id, boxes] : cache) {
    const auto n = static_cast<std::size_t>(
        std::count_if(dataset.sets.begin(), dataset.sets.end(),
                      [&](const ProposalSet& s) { return s.annotation.image_id == image_id; }));
    if (n != boxes.size()) {
      throw Error(ErrorKind::kPairing, "image '" + image_id + "' has " + std::to_string(boxes.size()) +
                                           " ground truth boxes but " + std::to_string(n) + " points");
    }
  }
  return out;
}

PipelineResult run_pipeline(const Dataset& dataset, const PipelineConfig& config,
                            const std::vector<LabeledBox>& ground_truth) {
  validate(config);
  const SelectionStrategy strategy = config.selection_strategy();
  const bool oracle = std::holds_alternative<OracleIoU>(strategy);
  if (oracle && ground_truth.size() != dataset.sets.size()) {
    throw Error(ErrorKind::kMissingGroundTruth, "oracle selection needs ground truth for every point");
  }

  PipelineResult result;
  result.strategy = strategy_name(strategy);
  result.selections.resize(dataset.sets.size());
  result.labels.resize(dataset.sets.size());
  parallel_for(dataset.sets.size(), config.workers, [&](std::size_t i) {
    const ProposalSet& set = dataset.sets[i];
    SelectionContext ctx;
    ctx.category_index = config.category_index(set.annotation.category);
    ctx.conversion = config.conversion;
    if (oracle) ctx.ground_truth = ground_truth[i].box;
    result.selections[i] = select(set, strategy, ctx);
    result.labels[i] = pseudo_label(set, result.selections[i], config.conversion);
  });
  return result;
}

std::vector<LabeledBox> labeled_boxes(const PipelineResult& result) {
  std::vector<LabeledBox> out;
  out.reserve(result.labels.size());
  for (const PseudoLabel& l : result.labels) {
    out.push_back({l.image_id, l.box, l.category, false, l.confidence});
  }
  return out;
}

void write_pseudo_labels(const std::filesystem::path& dir, const PipelineResult& result) {
  std::filesystem::create_directories(dir);
  std::map<std::string, std::vector<LabeledBox>> by_image;
  for (const LabeledBox& b : labeled_boxes(result)) by_image[b.image_id].push_back(b);
  for (const auto& [image_id, boxes] : by_image) {
    std::ostringstream out;
    write_dota_annotations(out, boxes);
    write_file_atomic(dir / (image_id + ".txt"), out.str());
  }
}

std::string selection_json(const Dataset& dataset, const PipelineResult& result) {
  json selections = json::array();
  for (std::size_t i = 0; i < result.selections.size(); ++i) {
    const Selection& s = result.selections[i];
    const PseudoLabel& l = result.labels[i];
    selections.push_back({
        {"image_id", l.image_id},
        {"point", dataset.point_index[i]},
        {"category", l.category},
        {"chosen", s.index},
        {"score", s.score},
        {"scores", s.scores},
        {"learned_terms_missing", s.learned_terms_missing},
        {"conversion",
         {{"requested", to_string(l.conversion.requested)},
          {"used", to_string(l.conversion.used)},
          {"isotropic_fallback", l.conversion.isotropic_fallback},
          {"degenerate", l.conversion.degenerate}}},
        {"box", {{"cx", l.box.cx}, {"cy", l.box.cy}, {"w", l.box.w}, {"h", l.box.h}, {"angle", l.box.angle}}},
    });
  }
  return json{{"strategy", result.strategy}, {"selections", selections}}.dump(2) + "\n";
}

PairedLabels load_label_dirs(const std::filesystem::path& pseudo_dir,
                             const std::filesystem::path& gt_dir) {
  auto stems = [](const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
      throw Error(ErrorKind::kInvalidInput, "not a directory: " + dir.string());
    }
    std::vector<std::string> out;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".txt") {
        out.push_back(entry.path().stem().string());
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  const std::vector<std::string> gt_ids = stems(gt_dir);
  for (const std::string& id : stems(pseudo_dir)) {
    if (!std::binary_search(gt_ids.begin(), gt_ids.end(), id)) {
      throw Error(ErrorKind::kPairing, "pseudo-label file '" + id + ".txt' has no ground truth file");
    }
  }
  PairedLabels out;
  for (const std::string& id : gt_ids) {
    const auto gt = parse_dota_annotations(gt_dir / (id + ".txt"));
    out.ground_truth.insert(out.ground_truth.end(), gt.begin(), gt.end());
    const std::filesystem::path pseudo_path = pseudo_dir / (id + ".txt");
    if (std::filesystem::exists(pseudo_path)) {
      const auto pseudo = parse_dota_annotations(pseudo_path);
      out.pseudo.insert(out.pseudo.end(), pseudo.begin(), pseudo.end());
    }
  }
  return out;
}

}  // namespace obbpl
