#include "mrrope/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mrrope/rng.hpp"

namespace mrrope {

void DiagnosticSeries::validate() const {
  if (xs.size() != ys.size()) {
    throw std::invalid_argument("DiagnosticSeries: xs and ys differ in length");
  }
  if (spread && spread->size() != xs.size()) {
    throw std::invalid_argument("DiagnosticSeries: spread length does not match xs");
  }
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) {
      throw std::invalid_argument("DiagnosticSeries: xs must be strictly increasing");
    }
  }
}

double biased_estimate(const FrequencySchedule& sched, double beta, double m) {
  if (!(m >= 0.0)) {
    throw std::invalid_argument("biased_estimate: position must be nonnegative");
  }
  double sum = 0.0;
  double place = 1.0;
  for (double theta : sched.values()) {
    sum += place * std::fmod(m * theta, kTwoPi);
    place *= beta;
  }
  return sum;
}

double linear_fit_r2(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw std::invalid_argument("linear_fit_r2: needs two equally sized samples or more");
  }
  const double n = static_cast<double>(xs.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= n;
  mean_y /= n;

  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mean_x;
    const double dy = ys[i] - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (syy <= 0.0 || sxx <= 0.0) {
    return 0.0;  // zero explained variance by convention
  }
  const double slope = sxy / sxx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double fit = mean_y + slope * (xs[i] - mean_x);
    const double resid = ys[i] - fit;
    ss_res += resid * resid;
  }
  return 1.0 - ss_res / syy;
}

double linearity_score(const FrequencySchedule& sched, double beta, std::int64_t len) {
  if (len < 16) {
    throw std::invalid_argument("linearity_score: len must be >= 16");
  }
  std::vector<double> xs(static_cast<std::size_t>(len) + 1);
  std::vector<double> ys(xs.size());
  for (std::int64_t m = 0; m <= len; ++m) {
    xs[static_cast<std::size_t>(m)] = static_cast<double>(m);
    ys[static_cast<std::size_t>(m)] = biased_estimate(sched, beta, static_cast<double>(m));
  }
  return linear_fit_r2(xs, ys);
}

double bound_function(const FrequencySchedule& sched, double m) {
  double sum = 0.0;
  for (double theta : sched.values()) {
    sum += std::cos(m * theta);
  }
  return sum;
}

BoundProfile find_bound_root(const FrequencySchedule& sched, double m_max, double grid_step) {
  if (!(m_max > 0.0) || !(grid_step > 0.0)) {
    throw std::invalid_argument("find_bound_root: m_max and grid_step must be positive");
  }
  if (grid_step > m_max / 100.0) {
    throw std::invalid_argument("find_bound_root: grid_step must be <= m_max / 100");
  }

  BoundProfile profile;
  profile.grid_step = grid_step;
  profile.series.label = "bound";

  const auto steps = static_cast<std::size_t>(std::floor(m_max / grid_step));
  profile.series.xs.reserve(steps + 1);
  profile.series.ys.reserve(steps + 1);

  double prev_m = 0.0;
  double prev_b = bound_function(sched, 0.0);
  profile.series.xs.push_back(prev_m);
  profile.series.ys.push_back(prev_b);

  bool bracketed = false;
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 1; i <= steps; ++i) {
    const double m = static_cast<double>(i) * grid_step;
    const double b = bound_function(sched, m);
    profile.series.xs.push_back(m);
    profile.series.ys.push_back(b);
    if (!bracketed && prev_b > 0.0 && b <= 0.0) {
      bracketed = true;
      lo = prev_m;
      hi = m;
    }
    prev_m = m;
    prev_b = b;
  }

  if (bracketed) {
    while (hi - lo > 1e-6 * std::max(1.0, hi)) {
      const double mid = 0.5 * (lo + hi);
      if (bound_function(sched, mid) > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    profile.root = 0.5 * (lo + hi);
  }
  return profile;
}

FrequencySchedule bound_schedule(const RopeParams& params, const ScalePlan& plan) {
  if (plan.method != Method::PI) {
    return scaled_frequencies(params, plan);
  }
  std::vector<double> thetas = build_frequencies(params).values();
  for (double& t : thetas) t /= plan.scale;
  return FrequencySchedule(std::move(thetas));
}

DiagnosticSeries cumulative_scale_curve(const ScalePlan& plan) {
  DiagnosticSeries series;
  series.label = std::string(method_name(plan.method));
  series.xs.resize(static_cast<std::size_t>(plan.pairs()));
  series.ys = plan.cumulative;
  for (int j = 1; j <= plan.pairs(); ++j) {
    series.xs[static_cast<std::size_t>(j - 1)] = static_cast<double>(j);
  }
  return series;
}

namespace {

void check_band_present(const ScalePlan& plan) {
  if (!plan.has_band()) {
    throw std::invalid_argument("plan '" + std::string(method_name(plan.method)) +
                                "' has no middle band");
  }
}

}  // namespace

double middle_band_bound(const ScalePlan& plan, const RopeParams& params, double m) {
  check_band_present(plan);
  const FrequencySchedule sched = scaled_frequencies(params, plan);
  double sum = 0.0;
  for (int j = plan.d_low; j < plan.d_high && j <= plan.pairs(); ++j) {
    sum += std::cos(m * sched.theta(j));
  }
  return sum;
}

DiagnosticSeries middle_attention_sim(const ScalePlan& plan, const RopeParams& params, int pairs,
                                      std::span<const double> positions, std::uint64_t seed) {
  check_band_present(plan);
  if (pairs < 1) {
    throw std::invalid_argument("middle_attention_sim: pairs must be >= 1");
  }
  if (positions.empty()) {
    throw std::invalid_argument("middle_attention_sim: positions must be nonempty");
  }
  const FrequencySchedule sched = scaled_frequencies(params, plan);
  const int head_dim = params.head_dim;
  const int band_lo = plan.d_low;
  const int band_hi = std::min(plan.d_high, plan.pairs() + 1);

  DiagnosticSeries series;
  series.label = std::string(method_name(plan.method));
  series.xs.assign(positions.begin(), positions.end());
  series.ys.resize(positions.size());
  series.spread = std::vector<double>(positions.size());

  std::vector<double> u(static_cast<std::size_t>(head_dim));
  std::vector<double> v(static_cast<std::size_t>(head_dim));
  for (std::size_t pi = 0; pi < positions.size(); ++pi) {
    SplitMix64 rng = SplitMix64::stream(seed, pi);
    const double m = positions[pi];
    double sum = 0.0, sum_sq = 0.0;
    for (int p = 0; p < pairs; ++p) {
      for (auto& x : u) x = rng.next_gaussian();
      for (auto& x : v) x = rng.next_gaussian();
      double dot = 0.0;
      for (int j = band_lo; j < band_hi; ++j) {
        const double angle = m * sched.theta(j);
        const double c = std::cos(angle);
        const double s = std::sin(angle);
        const std::size_t k = static_cast<std::size_t>(2 * (j - 1));
        const double rx = u[k] * c - u[k + 1] * s;
        const double ry = u[k] * s + u[k + 1] * c;
        dot += rx * v[k] + ry * v[k + 1];
      }
      sum += dot;
      sum_sq += dot * dot;
    }
    const double mean = sum / pairs;
    series.ys[pi] = mean;
    double var = 0.0;
    if (pairs > 1) {
      var = (sum_sq - pairs * mean * mean) / (pairs - 1);
      var = std::max(var, 0.0);
    }
    (*series.spread)[pi] = std::sqrt(var);
  }
  series.validate();
  return series;
}

}  // namespace mrrope
