// Copyright 2026 The obbpl Authors
// SPDX-License-Identifier: Apache-2.0

#include "obbpl/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "obbpl/error.hpp"

namespace obbpl {

using nlohmann::json;

namespace {

[[noreturn]] void bad_field(const std::string& source, const std::string& field,
                            const std::string& what) {
  throw Error(ErrorKind::kFormat, source + ": field '" + field + "' " + what);
}

double get_number(const json& j, const std::string& source, const std::string& field) {
  if (!j.is_number()) bad_field(source, field, "must be a number");
  return j.get<double>();
}

std::int64_t get_integer(const json& j, const std::string& source, const std::string& field) {
  if (!j.is_number_integer()) bad_field(source, field, "must be an integer");
  return j.get<std::int64_t>();
}

std::string get_string(const json& j, const std::string& source, const std::string& field) {
  if (!j.is_string()) bad_field(source, field, "must be a string");
  return j.get<std::string>();
}

ConversionMode parse_conversion(const json& j, const std::string& source) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    try {
      return conversion_mode_from_string(name);
    } catch (const Error&) {
      bad_field(source, "conversion", "has unknown mode '" + name + "'");
    }
  }
  if (!j.is_object()) bad_field(source, "conversion", "must be a string or an object");
  ConversionMode mode;
  for (const auto& [key, value] : j.items()) {
    if (key == "default") {
      mode.fallback = conversion_kind_from_string(get_string(value, source, "conversion.default"));
    } else if (key == "per_category") {
      if (!value.is_object()) bad_field(source, "conversion.per_category", "must be an object");
      for (const auto& [cat, kind] : value.items()) {
        mode.per_category[cat] =
            conversion_kind_from_string(get_string(kind, source, "conversion.per_category." + cat));
      }
    } else {
      bad_field(source, "conversion." + key, "is not a known field");
    }
  }
  return mode;
}

}  // namespace

StrategyKind strategy_kind_from_string(const std::string& name) {
  if (name == "sam-top") return StrategyKind::kSamTop;
  if (name == "fused") return StrategyKind::kFused;
  if (name == "oracle") return StrategyKind::kOracle;
  throw Error(ErrorKind::kInvalidInput, "unknown selection strategy '" + name + "'");
}

const char* to_string(StrategyKind kind) noexcept {
  switch (kind) {
    case StrategyKind::kSamTop: return "sam-top";
    case StrategyKind::kFused: return "fused";
    case StrategyKind::kOracle: return "oracle";
  }
  return "unknown";
}

ConversionKind conversion_kind_from_string(const std::string& name) {
  if (name == "minimum-only") return ConversionKind::kMinimumOnly;
  if (name == "symmetry-axis") return ConversionKind::kSymmetryAxis;
  throw Error(ErrorKind::kInvalidInput, "unknown conversion mode '" + name + "'");
}

ConversionMode conversion_mode_from_string(const std::string& name) {
  if (name == "per-category") return ConversionMode::default_per_category();
  return {conversion_kind_from_string(name), {}};
}

const std::vector<std::string>& dota_v1_categories() {
  static const std::vector<std::string> kCategories{
      "plane",         "baseball-diamond", "bridge",           "ground-track-field",
      "small-vehicle", "large-vehicle",    "ship",             "tennis-court",
      "basketball-court", "storage-tank",  "soccer-ball-field", "roundabout",
      "harbor",        "swimming-pool",    "helicopter"};
  return kCategories;
}

SelectionStrategy PipelineConfig::selection_strategy() const {
  switch (strategy) {
    case StrategyKind::kSamTop: return SamTop{};
    case StrategyKind::kFused: return Fused{weights};
    case StrategyKind::kOracle: return OracleIoU{};
  }
  return SamTop{};
}

std::size_t PipelineConfig::category_index(const std::string& category) const {
  const auto it = std::find(categories.begin(), categories.end(), category);
  if (it == categories.end()) {
    throw Error(ErrorKind::kInvalidInput, "category '" + category + "' is not in the category table");
  }
  return static_cast<std::size_t>(it - categories.begin());
}

void validate(const PipelineConfig& config) {
  auto fail = [](const std::string& field, const std::string& what) {
    throw Error(ErrorKind::kInvalidInput, "config field '" + field + "' " + what);
  };
  if (!std::isfinite(config.weights.alpha) || config.weights.alpha < 0.0) fail("alpha", "must be finite and >= 0");
  if (!std::isfinite(config.weights.beta) || config.weights.beta < 0.0) fail("beta", "must be finite and >= 0");
  if (!std::isfinite(config.delta) || config.delta < 0.0) fail("delta", "must be finite and >= 0");
  if (config.bag_size < 1) fail("bag_size", "must be >= 1");
  if (config.margin_px < 1) fail("margin_px", "must be >= 1");
  if (config.workers < 1) fail("workers", "must be >= 1");
  if (config.categories.empty()) fail("categories", "must not be empty");
  std::set<std::string> seen;
  for (const std::string& c : config.categories) {
    if (c.empty()) fail("categories", "must not contain empty names");
    if (!seen.insert(c).second) fail("categories", "contains duplicate '" + c + "'");
  }
}

PipelineConfig parse_config(std::istream& in, const std::string& source) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kFormat, source + ": " + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::kFormat, source + ": config must be a JSON object");

  PipelineConfig config;
  for (const auto& [key, value] : doc.items()) {
    if (key == "alpha") {
      config.weights.alpha = get_number(value, source, key);
    } else if (key == "beta") {
      config.weights.beta = get_number(value, source, key);
    } else if (key == "delta") {
      config.delta = get_number(value, source, key);
    } else if (key == "bag_size") {
      config.bag_size = static_cast<int>(get_integer(value, source, key));
    } else if (key == "margin_px") {
      config.margin_px = static_cast<int>(get_integer(value, source, key));
    } else if (key == "conversion") {
      config.conversion = parse_conversion(value, source);
    } else if (key == "strategy") {
      try {
        config.strategy = strategy_kind_from_string(get_string(value, source, key));
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::kFormat) throw;
        bad_field(source, key, "has unknown value '" + value.get<std::string>() + "'");
      }
    } else if (key == "seed") {
      const std::int64_t seed = get_integer(value, source, key);
      if (seed < 0) bad_field(source, key, "must be >= 0");
      config.seed = static_cast<std::uint64_t>(seed);
    } else if (key == "metric_mode") {
      try {
        config.metric_mode = metric_mode_from_string(get_string(value, source, key));
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::kFormat) throw;
        bad_field(source, key, "has unknown value '" + value.get<std::string>() + "'");
      }
    } else if (key == "categories") {
      if (!value.is_array()) bad_field(source, key, "must be an array of strings");
      config.categories.clear();
      for (const json& c : value) config.categories.push_back(get_string(c, source, key));
    } else if (key == "workers") {
      config.workers = static_cast<int>(get_integer(value, source, key));
    } else {
      bad_field(source, key, "is not a known field");
    }
  }
  try {
    validate(config);
  } catch (const Error& e) {
    throw Error(ErrorKind::kFormat, source + ": " + e.what());
  }
  return config;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kInvalidInput, "cannot open config file " + path.string());
  return parse_config(in, path.string());
}

std::string write_config(const PipelineConfig& config) {
  json per_category = json::object();
  for (const auto& [cat, kind] : config.conversion.per_category) per_category[cat] = to_string(kind);
  const json doc = {
      {"alpha", config.weights.alpha},
      {"beta", config.weights.beta},
      {"delta", config.delta},
      {"bag_size", config.bag_size},
      {"margin_px", config.margin_px},
      {"conversion", {{"default", to_string(config.conversion.fallback)}, {"per_category", per_category}}},
      {"strategy", to_string(config.strategy)},
      {"seed", config.seed},
      {"metric_mode", to_string(config.metric_mode)},
      {"categories", config.categories},
      {"workers", config.workers},
  };
  return doc.dump(2) + "\n";
}

}  // namespace obbpl
