#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "mrrope/rope.hpp"

namespace mrrope {

/// The subset of an open-model config file this tool consumes. head_dim may
/// be given directly or resolved from hidden_size / num_attention_heads.
/// Unknown fields in the source document are ignored.
struct ModelConfigDoc {
  double rope_theta = 10000.0;
  std::optional<int> head_dim;
  std::optional<int> hidden_size;
  std::optional<int> num_attention_heads;
  std::int64_t max_position_embeddings = 0;

  /// Throws std::invalid_argument naming the missing or inconsistent field.
  int resolved_head_dim() const;

  RopeParams to_rope_params() const;
};

ModelConfigDoc parse_model_config(const std::string& json_text);
ModelConfigDoc load_model_config(const std::filesystem::path& path);

}  // namespace mrrope
