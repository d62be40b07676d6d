#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mrrope/plan.hpp"
#include "mrrope/rope.hpp"

namespace mrrope {

/// A sampled curve ready for CSV/JSON export. xs must be strictly
/// increasing; spread, when present, carries one dispersion value per x.
struct DiagnosticSeries {
  std::string label;
  std::vector<double> xs;
  std::vector<double> ys;
  std::optional<std::vector<double>> spread;

  void validate() const;
};

/// Sampled bound function together with its first positive root, when one
/// exists inside the scanned range.
struct BoundProfile {
  DiagnosticSeries series;
  std::optional<double> root;
  double grid_step = 0.0;
};

/// Radix-style positional reconstruction from rotation angles:
/// sum_j beta^(j-1) * ((m * theta_j) mod 2pi). Linear in m to the extent the
/// schedule acts as a faithful radix encoder.
double biased_estimate(const FrequencySchedule& sched, double beta, double m);

/// Coefficient of determination of a least-squares line through (xs, ys).
/// A series with zero variance scores 0 by convention.
double linear_fit_r2(std::span<const double> xs, std::span<const double> ys);

/// R^2 of the biased estimate sampled at m = 0..len.
double linearity_score(const FrequencySchedule& sched, double beta, std::int64_t len);

/// B(m) = sum_j cos(m * theta_j). B(0) equals the number of pairs; the first
/// positive root bounds the usable context window.
double bound_function(const FrequencySchedule& sched, double m);

/// Scans B on [0, m_max] at grid_step, bisects the first sign change to a
/// relative tolerance of 1e-6. No sign change is a valid outcome (no root).
/// Requires grid_step <= m_max / 100.
BoundProfile find_bound_root(const FrequencySchedule& sched, double m_max, double grid_step);

/// Frequencies whose bound profile represents the plan: the scaled schedule,
/// except PI divides every frequency by S, which is the frequency-space view
/// of evaluating B at position m / S.
FrequencySchedule bound_schedule(const RopeParams& params, const ScalePlan& plan);

/// xs = 1..D_r, ys = cumulative scale s_d.
DiagnosticSeries cumulative_scale_curve(const ScalePlan& plan);

/// Bound function restricted to the plan's band [d_low, d_high) over the
/// scaled schedule. Requires a nonempty band.
double middle_band_bound(const ScalePlan& plan, const RopeParams& params, double m);

/// For every position in `positions`, draws `pairs` independent
/// standard-normal vector pairs (u, v), rotates u by the position under the
/// scaled schedule and accumulates the dot product over band dimensions
/// only. ys = mean over the draws, spread = sample standard deviation.
/// One RNG stream per position index, so output is reproducible regardless
/// of evaluation order.
DiagnosticSeries middle_attention_sim(const ScalePlan& plan, const RopeParams& params, int pairs,
                                      std::span<const double> positions, std::uint64_t seed);

}  // namespace mrrope
