#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mrrope/plan.hpp"
#include "mrrope/rope.hpp"

namespace mrrope {

/// A single attention head driven by a compiled scale plan: projection
/// weights, rotary schedule and the optional attention temperature.
struct AttentionHead {
  std::vector<double> w_q;  // row-major head_dim x head_dim
  std::vector<double> w_k;
  RopeParams params;
  ScalePlan plan;
  bool use_temperature = false;

  /// Identity projections, isolating the rotary effect.
  static AttentionHead identity(const RopeParams& params, ScalePlan plan,
                                bool use_temperature = false);

  /// Seeded i.i.d. gaussian projection weights.
  static AttentionHead gaussian(const RopeParams& params, ScalePlan plan, std::uint64_t seed,
                                bool use_temperature = false);

  void validate() const;
};

/// <rotate(W_q x_m, m'), rotate(W_k x_n, n')> / (t * sqrt(head_dim)), with
/// t = plan.temperature when use_temperature is set and m' = m / S for
/// position-interpolated plans.
double score(const AttentionHead& head, const EmbeddingVec& x_m, const EmbeddingVec& x_n,
             double m, double n);

/// Softmax over scores of the query at position m against keys at positions
/// 0..len-1. Stabilized by max subtraction; entries sum to 1.
std::vector<double> attention_row(const AttentionHead& head, const EmbeddingVec& query_x,
                                  std::span<const EmbeddingVec> keys_x, std::int64_t m);

}  // namespace mrrope
