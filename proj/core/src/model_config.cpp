#include "mrrope/model_config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace mrrope {

int ModelConfigDoc::resolved_head_dim() const {
  int dim = 0;
  if (head_dim) {
    dim = *head_dim;
  } else if (hidden_size && num_attention_heads) {
    if (*num_attention_heads <= 0) {
      throw std::invalid_argument("model config: num_attention_heads must be positive");
    }
    if (*hidden_size % *num_attention_heads != 0) {
      throw std::invalid_argument(
          "model config: hidden_size is not divisible by num_attention_heads");
    }
    dim = *hidden_size / *num_attention_heads;
  } else {
    throw std::invalid_argument(
        "model config: missing head_dim (or hidden_size with num_attention_heads)");
  }
  if (dim < 2 || dim % 2 != 0) {
    throw std::invalid_argument("model config: resolved head_dim " + std::to_string(dim) +
                                " is not a positive even integer");
  }
  return dim;
}

RopeParams ModelConfigDoc::to_rope_params() const {
  if (max_position_embeddings < 1) {
    throw std::invalid_argument("model config: missing or invalid max_position_embeddings");
  }
  RopeParams params{rope_theta, resolved_head_dim(), max_position_embeddings};
  params.validate();
  return params;
}

ModelConfigDoc parse_model_config(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("model config: not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw std::invalid_argument("model config: top-level JSON value must be an object");
  }

  ModelConfigDoc out;
  if (doc.contains("rope_theta")) {
    out.rope_theta = doc["rope_theta"].get<double>();
  }
  if (doc.contains("head_dim")) {
    out.head_dim = doc["head_dim"].get<int>();
  }
  if (doc.contains("hidden_size")) {
    out.hidden_size = doc["hidden_size"].get<int>();
  }
  if (doc.contains("num_attention_heads")) {
    out.num_attention_heads = doc["num_attention_heads"].get<int>();
  }
  if (doc.contains("max_position_embeddings")) {
    out.max_position_embeddings = doc["max_position_embeddings"].get<std::int64_t>();
  } else {
    throw std::invalid_argument("model config: missing max_position_embeddings");
  }
  return out;
}

ModelConfigDoc load_model_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("model config: cannot open " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model_config(buffer.str());
}

}  // namespace mrrope
