#include "mrrope/attention.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "mrrope/rng.hpp"

namespace mrrope {

namespace {

std::vector<double> identity_matrix(int n) {
  std::vector<double> w(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    w[static_cast<std::size_t>(i) * n + i] = 1.0;
  }
  return w;
}

EmbeddingVec matvec(const std::vector<double>& w, const EmbeddingVec& x) {
  const std::size_t n = x.size();
  EmbeddingVec out(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    double acc = 0.0;
    const double* row = w.data() + r * n;
    for (std::size_t c = 0; c < n; ++c) {
      acc += row[c] * x[c];
    }
    out[r] = acc;
  }
  return out;
}

}  // namespace

AttentionHead AttentionHead::identity(const RopeParams& params, ScalePlan plan,
                                      bool use_temperature) {
  AttentionHead head{identity_matrix(params.head_dim), identity_matrix(params.head_dim), params,
                     std::move(plan), use_temperature};
  head.validate();
  return head;
}

AttentionHead AttentionHead::gaussian(const RopeParams& params, ScalePlan plan,
                                      std::uint64_t seed, bool use_temperature) {
  const auto n = static_cast<std::size_t>(params.head_dim);
  SplitMix64 rng_q = SplitMix64::stream(seed, 0);
  SplitMix64 rng_k = SplitMix64::stream(seed, 1);
  std::vector<double> w_q(n * n), w_k(n * n);
  for (auto& x : w_q) x = rng_q.next_gaussian();
  for (auto& x : w_k) x = rng_k.next_gaussian();
  AttentionHead head{std::move(w_q), std::move(w_k), params, std::move(plan), use_temperature};
  head.validate();
  return head;
}

void AttentionHead::validate() const {
  params.validate();
  const auto n = static_cast<std::size_t>(params.head_dim);
  if (w_q.size() != n * n || w_k.size() != n * n) {
    throw std::invalid_argument("AttentionHead: projection matrices must be head_dim x head_dim");
  }
  for (double x : w_q) {
    if (!std::isfinite(x)) throw std::invalid_argument("AttentionHead: w_q has non-finite entry");
  }
  for (double x : w_k) {
    if (!std::isfinite(x)) throw std::invalid_argument("AttentionHead: w_k has non-finite entry");
  }
  if (plan.pairs() != params.pairs()) {
    throw std::invalid_argument("AttentionHead: plan and params disagree on head_dim");
  }
}

double score(const AttentionHead& head, const EmbeddingVec& x_m, const EmbeddingVec& x_n,
             double m, double n) {
  if (!(m >= 0.0) || !(n >= 0.0)) {
    throw std::invalid_argument("score: positions must be nonnegative");
  }
  const FrequencySchedule sched = scaled_frequencies(head.params, head.plan);
  double pos_m = m, pos_n = n;
  if (head.plan.method == Method::PI) {
    pos_m /= head.plan.scale;
    pos_n /= head.plan.scale;
  }
  const EmbeddingVec q = apply_rotation(matvec(head.w_q, x_m), sched, pos_m);
  const EmbeddingVec k = apply_rotation(matvec(head.w_k, x_n), sched, pos_n);
  double dot = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    dot += q[i] * k[i];
  }
  const double t = head.use_temperature ? head.plan.temperature : 1.0;
  return dot / (t * std::sqrt(static_cast<double>(head.params.head_dim)));
}

std::vector<double> attention_row(const AttentionHead& head, const EmbeddingVec& query_x,
                                  std::span<const EmbeddingVec> keys_x, std::int64_t m) {
  if (keys_x.empty()) {
    throw std::invalid_argument("attention_row: key sequence is empty");
  }
  if (m < 0 || static_cast<std::size_t>(m) >= keys_x.size()) {
    throw std::invalid_argument("attention_row: query position " + std::to_string(m) +
                                " outside key range [0, " + std::to_string(keys_x.size()) + ")");
  }
  std::vector<double> logits(keys_x.size());
  for (std::size_t i = 0; i < keys_x.size(); ++i) {
    logits[i] = score(head, query_x, keys_x[i], static_cast<double>(m), static_cast<double>(i));
  }
  const double peak = *std::max_element(logits.begin(), logits.end());
  double norm = 0.0;
  for (double& l : logits) {
    l = std::exp(l - peak);
    norm += l;
  }
  for (double& l : logits) {
    l /= norm;
  }
  return logits;
}

}  // namespace mrrope
