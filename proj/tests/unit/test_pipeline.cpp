// Copyright 2026 The obbpl Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "obbpl/error.hpp"
#include "obbpl/fixtures.hpp"
#include "obbpl/pipeline.hpp"

namespace obbpl {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

FixtureSpec small_spec(std::uint64_t seed) {
  FixtureSpec spec;
  spec.images = 3;
  spec.seed = seed;
  return spec;
}

class TempDir {
 public:
  explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / name) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

TEST(ParallelFor, RunsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(257);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  parallel_for(0, 4, [](std::size_t) { FAIL(); });
}

TEST(ParallelFor, RethrowsLowestFailingIndex) {
  for (int workers : {1, 3, 8}) {
    std::atomic<int> ran{0};
    try {
      parallel_for(50, workers, [&](std::size_t i) {
        ran++;
        if (i == 17 || i == 40) throw std::runtime_error(std::to_string(i));
      });
      FAIL();
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "17");
    }
    EXPECT_EQ(ran.load(), 50);
  }
}

TEST(Fixtures, DeterministicForSeed) {
  const FixtureDataset a = generate_fixtures(small_spec(3));
  const FixtureDataset b = generate_fixtures(small_spec(3));
  const FixtureDataset c = generate_fixtures(small_spec(4));
  EXPECT_EQ(a.proposal_files(), b.proposal_files());
  EXPECT_EQ(a.ground_truth(), b.ground_truth());
  EXPECT_NE(a.ground_truth(), c.ground_truth());
}

TEST(Fixtures, ShapeAndVariantLayout) {
  const FixtureDataset d = generate_fixtures(small_spec(5));
  ASSERT_EQ(d.images.size(), 3u);
  EXPECT_EQ(d.images[0].image_id, "fx0000");
  for (const FixtureImage& im : d.images) {
    EXPECT_EQ(im.points.size(), 4u);
    EXPECT_EQ(im.proposals.proposals.size(), 24u);
    EXPECT_EQ(im.variants.size(), 24u);
    for (std::size_t k = 0; k < im.points.size(); ++k) {
      EXPECT_EQ(im.points[k].category, fixture_category(im.shapes[k].shape));
      // Zero jitter puts the point at the box center.
      EXPECT_NEAR(im.points[k].x, im.ground_truth[k].box.cx, 1e-9);
      EXPECT_NEAR(im.points[k].y, im.ground_truth[k].box.cy, 1e-9);
    }
  }
}

TEST(Fixtures, ExactVariantCentersOffsetNearZero) {
  const FixtureDataset d = generate_fixtures(small_spec(6));
  for (const FixtureImage& im : d.images) {
    for (std::size_t i = 0; i < im.variants.size(); ++i) {
      const ProposalEntry& e = im.proposals.proposals[i];
      // An L-shape's horizontal box is not centered on its oriented box.
      if (im.variants[i] != "exact" || im.shapes[e.point].shape == FixtureShape::kLShape) continue;
      const OffsetTarget t = gt_offset(im.points[e.point].point(), mask_aabb(rle_decode(e.proposal.mask)));
      EXPECT_LT(t.value, 0.05);
    }
  }
}

TEST(Fixtures, SamOnlyHasNoLearnedFields) {
  FixtureSpec spec = small_spec(7);
  spec.learned_scores = false;
  for (const ProposalFile& f : generate_fixtures(spec).proposal_files()) {
    for (const ProposalEntry& e : f.proposals) {
      EXPECT_FALSE(e.proposal.scores.pos_bag_class_scores.has_value());
      EXPECT_FALSE(e.proposal.scores.offset_pred.has_value());
    }
  }
}

TEST(Fixtures, RejectsBadSpecs) {
  FixtureSpec spec;
  spec.images = 0;
  EXPECT_THROW(validate(spec), Error);
  spec = {};
  spec.max_length = 400;
  EXPECT_THROW(validate(spec), Error);
  spec = {};
  spec.shapes.clear();
  EXPECT_THROW(validate(spec), Error);
  EXPECT_EQ(fixture_shape_from_string("l-shape"), FixtureShape::kLShape);
  EXPECT_THROW(fixture_shape_from_string("star"), Error);
}

TEST(Rasterize, RectangleAreaAndBox) {
  const ShapeParams rect{FixtureShape::kRectangle, 50, 50, 40, 20, 0, 0.2};
  EXPECT_EQ(rasterize(rect, 100, 100).count(), 40u * 20u);
  const OrientedBox b = shape_box({FixtureShape::kCross, 0, 0, 10, 30, 0.2, 0.2});
  EXPECT_EQ(b.w, 30);
  EXPECT_EQ(b.h, 10);
}

TEST(AssembleDataset, GroupsByImageAndPoint) {
  const FixtureDataset f = generate_fixtures(small_spec(8));
  const Dataset d = assemble_dataset(f.points(), f.proposal_files());
  ASSERT_EQ(d.sets.size(), 12u);
  EXPECT_EQ(d.point_index[5], 1u);
  EXPECT_EQ(d.sets[5].annotation, f.images[1].points[1]);
  EXPECT_EQ(d.sets[5].proposals.size(), 6u);
}

TEST(AssembleDataset, MissingProposalsThrow) {
  const FixtureDataset f = generate_fixtures(small_spec(9));
  std::vector<ProposalFile> files = f.proposal_files();
  files.pop_back();
  EXPECT_THROW(assemble_dataset(f.points(), files), Error);
  files = f.proposal_files();
  std::erase_if(files[0].proposals, [](const ProposalEntry& e) { return e.point == 2; });
  EXPECT_THROW(assemble_dataset(f.points(), files), Error);
  files = f.proposal_files();
  files[0].proposals[0].point = 9;
  EXPECT_THROW(assemble_dataset(f.points(), files), Error);
}

TEST(Pipeline, FilesRoundTripAndWorkerCountsAgree) {
  TempDir dir("obbpl_pipeline_test");
  const FixtureDataset f = generate_fixtures(small_spec(10));
  write_fixtures(f, dir.path());
  const Dataset d1 = load_dataset(dir.path() / "points.csv", dir.path() / "proposals", dota_v1_categories(), 1);
  const Dataset d4 = load_dataset(dir.path() / "points.csv", dir.path() / "proposals", dota_v1_categories(), 4);
  const std::vector<LabeledBox> gt = load_paired_ground_truth(d1, dir.path() / "gt");
  ASSERT_EQ(gt.size(), d1.sets.size());

  PipelineConfig c1, c4;
  c4.workers = 4;
  const PipelineResult r1 = run_pipeline(d1, c1);
  const PipelineResult r4 = run_pipeline(d4, c4);
  EXPECT_EQ(selection_json(d1, r1), selection_json(d4, r4));

  write_pseudo_labels(dir.path() / "a", r1);
  write_pseudo_labels(dir.path() / "b", r4);
  for (const auto& entry : fs::directory_iterator(dir.path() / "a")) {
    EXPECT_EQ(slurp(entry.path()), slurp(dir.path() / "b" / entry.path().filename()));
  }
  const PairedLabels paired = load_label_dirs(dir.path() / "a", dir.path() / "gt");
  EXPECT_EQ(paired.pseudo.size(), gt.size());
  EXPECT_GE(evaluate(paired.pseudo, paired.ground_truth, MetricMode::kVoc07).mean_miou, 0.5);
}

TEST(Pipeline, OracleNeedsAlignedGroundTruth) {
  const FixtureDataset f = generate_fixtures(small_spec(11));
  const Dataset d = assemble_dataset(f.points(), f.proposal_files());
  PipelineConfig c;
  c.strategy = StrategyKind::kOracle;
  EXPECT_THROW(run_pipeline(d, c), Error);
  const PipelineResult r = run_pipeline(d, c, f.ground_truth());
  EXPECT_EQ(r.labels.size(), d.sets.size());
}

TEST(Pipeline, GroundTruthPairingErrors) {
  TempDir dir("obbpl_pairing_test");
  const FixtureDataset f = generate_fixtures(small_spec(12));
  write_fixtures(f, dir.path());
  const Dataset d = assemble_dataset(f.points(), f.proposal_files());
  std::ofstream(dir.path() / "gt" / "fx0001.txt") << "0 0 4 0 4 2 0 2 plane 0\n";
  try {
    load_paired_ground_truth(d, dir.path() / "gt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kPairing);
  }
  fs::remove(dir.path() / "gt" / "fx0001.txt");
  try {
    load_paired_ground_truth(d, dir.path() / "gt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMissingGroundTruth);
  }
  fs::create_directories(dir.path() / "pseudo");
  std::ofstream(dir.path() / "pseudo" / "stray.txt") << "";
  EXPECT_THROW(load_label_dirs(dir.path() / "pseudo", dir.path() / "gt"), Error);
}

}  // namespace
}  // namespace obbpl
