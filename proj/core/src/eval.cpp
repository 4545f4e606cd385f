// Copyright 2026 The obbpl Authors
// SPDX-License-Identifier: Apache-2.0

#include "obbpl/eval.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "obbpl/error.hpp"

namespace obbpl {

namespace {

std::map<std::string, std::vector<std::size_t>> group_by_image(const std::vector<LabeledBox>& boxes) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < boxes.size(); ++i) groups[boxes[i].image_id].push_back(i);
  return groups;
}

double integrate_pr(const std::vector<double>& recall, const std::vector<double>& precision,
                    MetricMode mode) {
  if (mode == MetricMode::kVoc07) {
    double ap = 0.0;
    for (int step = 0; step <= 10; ++step) {
      const double t = step / 10.0;
      double best = 0.0;
      for (std::size_t i = 0; i < recall.size(); ++i) {
        if (recall[i] >= t) best = std::max(best, precision[i]);
      }
      ap += best;
    }
    return ap / 11.0;
  }
  std::vector<double> mrec{0.0};
  std::vector<double> mpre{0.0};
  mrec.insert(mrec.end(), recall.begin(), recall.end());
  mpre.insert(mpre.end(), precision.begin(), precision.end());
  mrec.push_back(1.0);
  mpre.push_back(0.0);
  for (std::size_t i = mpre.size() - 1; i-- > 0;) mpre[i] = std::max(mpre[i], mpre[i + 1]);
  double ap = 0.0;
  for (std::size_t i = 0; i + 1 < mrec.size(); ++i) {
    if (mrec[i + 1] != mrec[i]) ap += (mrec[i + 1] - mrec[i]) * mpre[i + 1];
  }
  return ap;
}

double mean_of(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace

const char* to_string(MetricMode mode) noexcept {
  return mode == MetricMode::kVoc07 ? "voc07" : "continuous";
}

MetricMode metric_mode_from_string(const std::string& name) {
  if (name == "voc07") return MetricMode::kVoc07;
  if (name == "continuous") return MetricMode::kContinuous;
  throw Error(ErrorKind::kInvalidInput, "unknown metric mode '" + name + "'");
}

MiouResult miou(const std::vector<LabeledBox>& pseudo, const std::vector<LabeledBox>& gt) {
  const auto pseudo_groups = group_by_image(pseudo);
  const auto gt_groups = group_by_image(gt);
  for (const auto& [image, idx] : pseudo_groups) {
    if (!gt_groups.contains(image)) {
      throw Error(ErrorKind::kPairing, "pseudo-labels for image '" + image + "' have no ground truth");
    }
  }

  MiouResult result;
  result.instance_iou.assign(gt.size(), 0.0);
  std::map<std::string, std::pair<double, std::size_t>> sums;
  for (const auto& [image, gt_idx] : gt_groups) {
    const auto it = pseudo_groups.find(image);
    const std::size_t have = it == pseudo_groups.end() ? 0 : it->second.size();
    if (have != gt_idx.size()) {
      throw Error(ErrorKind::kPairing, "image '" + image + "' has " + std::to_string(gt_idx.size()) +
                                           " ground-truth boxes but " + std::to_string(have) +
                                           " pseudo-labels");
    }
    for (std::size_t k = 0; k < gt_idx.size(); ++k) {
      const LabeledBox& g = gt[gt_idx[k]];
      const LabeledBox& p = pseudo[it->second[k]];
      if (g.category != p.category) {
        throw Error(ErrorKind::kPairing, "image '" + image + "' entry " + std::to_string(k) +
                                             ": pseudo category '" + p.category +
                                             "' vs ground truth '" + g.category + "'");
      }
      const double iou = rotated_iou(p.box, g.box);
      result.instance_iou[gt_idx[k]] = iou;
      auto& [sum, count] = sums[g.category];
      sum += iou;
      ++count;
    }
  }

  std::vector<double> means;
  for (const auto& [category, acc] : sums) {
    const double m = acc.first / static_cast<double>(acc.second);
    result.per_category.push_back({category, acc.second, m});
    means.push_back(m);
  }
  result.mean = mean_of(means);
  return result;
}

ApResult average_precision(const std::vector<Detection>& dets, const std::vector<LabeledBox>& gts,
                           double iou_thresh, MetricMode mode) {
  if (!(iou_thresh > 0.0 && iou_thresh < 1.0)) {
    throw Error(ErrorKind::kInvalidInput, "IoU threshold must lie in (0, 1)");
  }
  ApResult out;
  for (const LabeledBox& g : gts) {
    if (!g.difficult) ++out.ground_truths;
  }

  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].confidence > dets[b].confidence;
  });

  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> gt_index;
  for (std::size_t i = 0; i < gts.size(); ++i) gt_index[{gts[i].image_id, gts[i].category}].push_back(i);
  std::vector<bool> taken(gts.size(), false);

  std::vector<double> recall, precision;
  std::size_t tp = 0, fp = 0;
  for (std::size_t d : order) {
    const Detection& det = dets[d];
    double best_iou = 0.0;
    std::optional<std::size_t> best;
    if (const auto it = gt_index.find({det.image_id, det.category}); it != gt_index.end()) {
      for (std::size_t g : it->second) {
        const double iou = rotated_iou(det.box, gts[g].box);
        if (iou > best_iou) {
          best_iou = iou;
          best = g;
        }
      }
    }
    if (best && best_iou > iou_thresh) {
      if (gts[*best].difficult) continue;
      if (!taken[*best]) {
        taken[*best] = true;
        ++tp;
      } else {
        ++fp;
      }
    } else {
      ++fp;
    }
    if (out.ground_truths > 0) {
      recall.push_back(static_cast<double>(tp) / static_cast<double>(out.ground_truths));
      precision.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
    }
  }
  out.true_positives = tp;
  out.false_positives = fp;
  out.false_negatives = out.ground_truths - tp;
  if (out.ground_truths == 0) return out;
  out.ap = integrate_pr(recall, precision, mode);
  return out;
}

EvalReport evaluate(const std::vector<LabeledBox>& pseudo, const std::vector<LabeledBox>& gt,
                    MetricMode mode, const std::vector<std::string>& category_order,
                    std::string label) {
  const MiouResult iou = miou(pseudo, gt);

  std::set<std::string> present;
  for (const LabeledBox& b : gt) present.insert(b.category);
  for (const LabeledBox& b : pseudo) present.insert(b.category);
  std::vector<std::string> names;
  for (const std::string& c : category_order) {
    if (present.erase(c) > 0) names.push_back(c);
  }
  names.insert(names.end(), present.begin(), present.end());

  EvalReport report;
  report.label = std::move(label);
  report.metric_mode = mode;
  report.instances = gt.size();
  std::vector<double> mious, aps;
  for (const std::string& name : names) {
    CategoryReport cat;
    cat.category = name;
    std::vector<LabeledBox> cat_gt;
    for (const LabeledBox& g : gt) {
      if (g.category == name) cat_gt.push_back(g);
    }
    std::vector<Detection> cat_dets;
    for (const LabeledBox& p : pseudo) {
      if (p.category == name) {
        cat_dets.push_back({p.image_id, p.box, p.category, p.confidence.value_or(1.0)});
      }
    }
    cat.instances = cat_gt.size();
    for (const CategoryIoU& c : iou.per_category) {
      if (c.category == name) cat.miou = c.mean_iou;
    }
    const ApResult ap = average_precision(cat_dets, cat_gt, 0.5, mode);
    cat.ap50 = ap.ap;
    cat.true_positives = ap.true_positives;
    cat.false_positives = ap.false_positives;
    cat.false_negatives = ap.false_negatives;
    if (cat.miou) mious.push_back(*cat.miou);
    if (cat.ap50) aps.push_back(*cat.ap50);
    report.matched += ap.true_positives;
    report.unmatched_gt += ap.false_negatives;
    report.false_positives += ap.false_positives;
    report.categories.push_back(std::move(cat));
  }
  report.mean_miou = mean_of(mious);
  report.map50 = mean_of(aps);
  return report;
}

EvalReport oracle_report(const std::vector<ProposalSet>& sets, const std::vector<LabeledBox>& gts,
                         const ConversionMode& mode, MetricMode metric_mode,
                         const std::vector<std::string>& category_order) {
  if (sets.size() != gts.size()) {
    throw Error(ErrorKind::kMissingGroundTruth, "oracle report needs one ground truth per annotation");
  }
  std::vector<LabeledBox> pseudo;
  pseudo.reserve(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    SelectionContext ctx;
    ctx.conversion = mode;
    ctx.ground_truth = gts[i].box;
    const Selection sel = select(sets[i], OracleIoU{}, ctx);
    const PseudoLabel label = pseudo_label(sets[i], sel, mode);
    pseudo.push_back({label.image_id, label.box, label.category, false, label.confidence});
  }
  return evaluate(pseudo, gts, metric_mode, category_order, "oracle");
}

}  // namespace obbpl
