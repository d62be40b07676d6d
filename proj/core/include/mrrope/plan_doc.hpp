#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mrrope/plan.hpp"

namespace mrrope {

/// Serialized form of a compiled plan. inv_freq_multipliers holds the
/// cumulative scale s_d, the divisor applied to inverse frequency d; its
/// first entry is always 1. Round-trips losslessly through JSON.
struct ScalePlanDoc {
  std::string method;
  double scale = 1.0;
  double alpha = kDefaultAlpha;
  double beta_hp = kDefaultBeta;
  int d_low = 1;
  int d_high = 1;
  std::int64_t original_max_position_embeddings = 0;
  double temperature = 1.0;
  std::vector<double> lambdas;
  std::vector<double> inv_freq_multipliers;

  bool operator==(const ScalePlanDoc&) const = default;
};

ScalePlanDoc make_plan_doc(const ScalePlan& plan, const RopeParams& params);

/// Rebuilds the plan from a document; the lambdas are taken verbatim, so a
/// saved plan recompiles to identical scaled frequencies.
ScalePlan plan_from_doc(const ScalePlanDoc& doc);

std::string to_json(const ScalePlanDoc& doc);
ScalePlanDoc plan_doc_from_json(const std::string& json_text);

void save_plan_doc(const ScalePlanDoc& doc, const std::filesystem::path& path);
ScalePlanDoc load_plan_doc(const std::filesystem::path& path);

}  // namespace mrrope
