#include "mrrope/plan_doc.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace mrrope {

ScalePlanDoc make_plan_doc(const ScalePlan& plan, const RopeParams& params) {
  ScalePlanDoc doc;
  doc.method = std::string(method_name(plan.method));
  doc.scale = plan.scale;
  doc.alpha = plan.alpha;
  doc.beta_hp = plan.beta_hp;
  doc.d_low = plan.d_low;
  doc.d_high = plan.d_high;
  doc.original_max_position_embeddings = params.trained_len;
  doc.temperature = plan.temperature;
  doc.lambdas = plan.lambdas;
  doc.inv_freq_multipliers = plan.cumulative;
  return doc;
}

ScalePlan plan_from_doc(const ScalePlanDoc& doc) {
  const auto method = parse_method(doc.method);
  if (!method) {
    throw std::invalid_argument("plan document: unknown method '" + doc.method + "'");
  }
  if (doc.lambdas.size() != doc.inv_freq_multipliers.size() || doc.lambdas.empty()) {
    throw std::invalid_argument(
        "plan document: lambdas and inv_freq_multipliers must be nonempty and equally sized");
  }
  if (doc.inv_freq_multipliers.front() != 1.0) {
    throw std::invalid_argument("plan document: inv_freq_multipliers[1] must be 1");
  }
  ScalePlan plan;
  plan.method = *method;
  plan.scale = doc.scale;
  plan.d_low = doc.d_low;
  plan.d_high = doc.d_high;
  plan.lambdas = doc.lambdas;
  plan.cumulative = doc.inv_freq_multipliers;
  plan.temperature = doc.temperature;
  plan.alpha = doc.alpha;
  plan.beta_hp = doc.beta_hp;
  return plan;
}

std::string to_json(const ScalePlanDoc& doc) {
  nlohmann::ordered_json j;
  j["method"] = doc.method;
  j["scale"] = doc.scale;
  j["alpha"] = doc.alpha;
  j["beta"] = doc.beta_hp;
  j["d_low"] = doc.d_low;
  j["d_high"] = doc.d_high;
  j["original_max_position_embeddings"] = doc.original_max_position_embeddings;
  j["temperature"] = doc.temperature;
  j["lambdas"] = doc.lambdas;
  j["inv_freq_multipliers"] = doc.inv_freq_multipliers;
  return j.dump(2) + "\n";
}

ScalePlanDoc plan_doc_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("plan document: not valid JSON: ") + e.what());
  }
  ScalePlanDoc doc;
  try {
    doc.method = j.at("method").get<std::string>();
    doc.scale = j.at("scale").get<double>();
    doc.alpha = j.at("alpha").get<double>();
    doc.beta_hp = j.at("beta").get<double>();
    doc.d_low = j.at("d_low").get<int>();
    doc.d_high = j.at("d_high").get<int>();
    doc.original_max_position_embeddings =
        j.at("original_max_position_embeddings").get<std::int64_t>();
    doc.temperature = j.at("temperature").get<double>();
    doc.lambdas = j.at("lambdas").get<std::vector<double>>();
    doc.inv_freq_multipliers = j.at("inv_freq_multipliers").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("plan document: missing or mistyped field: ") +
                                e.what());
  }
  return doc;
}

void save_plan_doc(const ScalePlanDoc& doc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("plan document: cannot write " + path.string());
  }
  out << to_json(doc);
  if (!out) {
    throw std::runtime_error("plan document: write to " + path.string() + " failed");
  }
}

ScalePlanDoc load_plan_doc(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("plan document: cannot open " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return plan_doc_from_json(buffer.str());
}

}  // namespace mrrope
