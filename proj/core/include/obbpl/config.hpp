// Copyright 2026 The obbpl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "obbpl/eval.hpp"
#include "obbpl/scoring.hpp"
#include "obbpl/selection.hpp"
#include "obbpl/symmetry.hpp"

namespace obbpl {

enum class StrategyKind { kSamTop, kFused, kOracle };

StrategyKind strategy_kind_from_string(const std::string& name);
const char* to_string(StrategyKind kind) noexcept;
ConversionKind conversion_kind_from_string(const std::string& name);
/// "minimum-only", "symmetry-axis", or "per-category" (the default map).
ConversionMode conversion_mode_from_string(const std::string& name);

/// The 15 DOTA-v1.0 categories in their conventional order.
const std::vector<std::string>& dota_v1_categories();

struct PipelineConfig {
  FusionWeights weights;
  double delta = kDefaultDelta;
  int bag_size = kDefaultBagSize;
  int margin_px = kDefaultMarginPx;
  ConversionMode conversion = ConversionMode::default_per_category();
  StrategyKind strategy = StrategyKind::kFused;
  std::uint64_t seed = 0;
  MetricMode metric_mode = MetricMode::kVoc07;
  std::vector<std::string> categories = dota_v1_categories();
  int workers = 1;

  SelectionStrategy selection_strategy() const;
  /// Position of `category` in `categories`; throws kInvalidInput if absent.
  std::size_t category_index(const std::string& category) const;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Throws kInvalidInput naming the offending field.
void validate(const PipelineConfig& config);

/// Reads a JSON object whose keys are PipelineConfig fields. Missing keys keep
/// their defaults; unknown keys and wrong types throw kFormat.
PipelineConfig parse_config(std::istream& in, const std::string& source = "<config>");
PipelineConfig load_config(const std::filesystem::path& path);

/// Serialises every field, so parse_config(write_config(c)) == c.
std::string write_config(const PipelineConfig& config);

}  // namespace obbpl
