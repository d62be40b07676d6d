#include "mrrope/plan.hpp"
#include <algorithm>

#include <cmath>
#include <sstream>

namespace mrrope {

std::string_view method_name(Method method) {
  switch (method) {
    case Method::None: return "none";
    case Method::PI: return "pi";
    case Method::NTK: return "ntk";
    case Method::YaRN: return "yarn";
    case Method::MrRopeUni: return "mrrope-uni";
    case Method::MrRopePro: return "mrrope-pro";
  }
  return "none";
}

std::optional<Method> parse_method(std::string_view name) {
  if (name == "none") return Method::None;
  if (name == "pi") return Method::PI;
  if (name == "ntk") return Method::NTK;
  if (name == "yarn") return Method::YaRN;
  if (name == "mrrope-uni") return Method::MrRopeUni;
  if (name == "mrrope-pro") return Method::MrRopePro;
  return std::nullopt;
}

const std::vector<std::string>& known_method_names() {
  static const std::vector<std::string> names = {"none", "pi", "ntk", "yarn", "mrrope-uni",
                                                 "mrrope-pro"};
  return names;
}

double ScalePlan::lambda(int j) const {
  if (j < 1 || j > pairs()) {
    throw std::out_of_range("ScalePlan: dimension index out of range");
  }
  return lambdas[static_cast<std::size_t>(j - 1)];
}

double ScalePlan::cumulative_at(int j) const {
  if (j < 1 || j > pairs()) {
    throw std::out_of_range("ScalePlan: dimension index out of range");
  }
  return cumulative[static_cast<std::size_t>(j - 1)];
}

namespace {

void check_scale(double scale) {
  if (!(scale >= 1.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("scale must be >= 1, got " + std::to_string(scale));
  }
}

std::vector<double> prefix_products(const std::vector<double>& lambdas) {
  std::vector<double> cum(lambdas.size());
  double acc = 1.0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    cum[i] = acc;
    acc *= lambdas[i];
  }
  return cum;
}

ScalePlan finish_plan(Method method, const RopeParams& params, double scale, Boundaries band,
                      std::vector<double> lambdas, double temp, double alpha, double beta_hp) {
  ScalePlan plan;
  plan.method = method;
  plan.scale = scale;
  plan.d_low = band.d_low;
  plan.d_high = band.d_high;
  plan.cumulative = prefix_products(lambdas);
  plan.lambdas = std::move(lambdas);
  plan.temperature = temp;
  plan.alpha = alpha;
  plan.beta_hp = beta_hp;
  (void)params;
  return plan;
}

void check_band(const RopeParams& params, Boundaries band) {
  const int dr = params.pairs();
  if (band.d_low < 1 || band.d_high > dr + 1 || band.d_low >= band.d_high) {
    std::ostringstream msg;
    msg << "invalid dimension band [" << band.d_low << ", " << band.d_high
        << ") for " << dr << " pairs";
    throw std::invalid_argument(msg.str());
  }
}

// Rotation progress of dimension j over the trained window, defined by the
// frequency formula directly so the sentinel index D_r + 1 is admissible.
double progress_at(const RopeParams& params, int j) {
  const double theta = std::pow(params.base, -2.0 * (j - 1) / params.head_dim);
  return static_cast<double>(params.trained_len) * theta / kTwoPi;
}

}  // namespace

Boundaries compute_boundaries(const RopeParams& params, double alpha, double beta_hp) {
  params.validate();
  if (!(alpha > 0.0) || !(beta_hp > alpha)) {
    throw std::invalid_argument("compute_boundaries: requires 0 < alpha < beta");
  }
  const int dr = params.pairs();
  const FrequencySchedule sched = build_frequencies(params);

  Boundaries band;
  band.d_low = 1;
  for (int i = 1; i <= dr; ++i) {
    if (rotation_progress(sched, i, params.trained_len) > beta_hp) band.d_low = i;
  }
  band.d_high = dr + 1;
  for (int i = dr; i >= 1; --i) {
    if (rotation_progress(sched, i, params.trained_len) < alpha) band.d_high = i;
  }
  if (band.d_low >= band.d_high) {
    std::ostringstream msg;
    msg << "degenerate dimension partition: d_low=" << band.d_low << " >= d_high=" << band.d_high
        << " for alpha=" << alpha << ", beta=" << beta_hp
        << "; widen the band (for example alpha=" << kDefaultAlpha << ", beta=" << kDefaultBeta
        << ")";
    throw DegeneratePartitionError(msg.str());
  }
  return band;
}

ScalePlan plan_none(const RopeParams& params) {
  params.validate();
  const int dr = params.pairs();
  std::vector<double> lambdas(static_cast<std::size_t>(dr), 1.0);
  return finish_plan(Method::None, params, 1.0, Boundaries{dr + 1, dr + 1}, std::move(lambdas),
                     1.0, kDefaultAlpha, kDefaultBeta);
}

ScalePlan plan_pi(const RopeParams& params, double scale) {
  params.validate();
  check_scale(scale);
  const int dr = params.pairs();
  std::vector<double> lambdas(static_cast<std::size_t>(dr), 1.0);
  return finish_plan(Method::PI, params, scale, Boundaries{dr + 1, dr + 1}, std::move(lambdas),
                     1.0, kDefaultAlpha, kDefaultBeta);
}

ScalePlan plan_ntk(const RopeParams& params, double scale) {
  params.validate();
  check_scale(scale);
  const int dr = params.pairs();
  if (dr < 2) {
    throw std::invalid_argument("plan_ntk: needs at least two pairs");
  }
  const double lam = std::pow(scale, 1.0 / (dr - 1));
  std::vector<double> lambdas(static_cast<std::size_t>(dr), lam);
  return finish_plan(Method::NTK, params, scale, Boundaries{1, dr + 1}, std::move(lambdas), 1.0,
                     kDefaultAlpha, kDefaultBeta);
}

double yarn_cumulative_scale(double r, double scale, double alpha, double beta_hp) {
  return scale * (beta_hp - alpha) / (beta_hp + (scale - 1.0) * r - scale * alpha);
}

namespace {

// lambda_j on [d_low, d_high) follows the closed-form cumulative scale: the
// log of each factor is proportional to the log-ratio of yarn_cumulative_scale
// at consecutive rotation-progress values, with one shared exponent chosen so
// the band product is exactly `scale`. The progress at the closing index
// d_high is clamped into [alpha, beta]: past the band the ramp is saturated.
// This keeps every log-ratio nonnegative, every factor >= 1 and the factor
// sequence non-increasing whenever beta >= scale * alpha.
ScalePlan build_yarn(const RopeParams& params, double scale, Boundaries band, double alpha,
                     double beta_hp) {
  const int dr = params.pairs();
  std::vector<double> log_ratio(static_cast<std::size_t>(band.size()));
  double log_total = 0.0;
  for (int j = band.d_low; j < band.d_high; ++j) {
    const double r_here = progress_at(params, j);
    const double r_next = (j + 1 == band.d_high)
                              ? std::clamp(progress_at(params, band.d_high), alpha, beta_hp)
                              : progress_at(params, j + 1);
    const double num = beta_hp + (scale - 1.0) * r_here - scale * alpha;
    const double den = beta_hp + (scale - 1.0) * r_next - scale * alpha;
    const double g = std::log(num / den);
    log_ratio[static_cast<std::size_t>(j - band.d_low)] = g;
    log_total += g;
  }
  const double exponent = scale > 1.0 ? std::log(scale) / log_total : 0.0;

  std::vector<double> lambdas(static_cast<std::size_t>(dr), 1.0);
  for (int j = band.d_low; j < band.d_high; ++j) {
    lambdas[static_cast<std::size_t>(j - 1)] =
        std::exp(exponent * log_ratio[static_cast<std::size_t>(j - band.d_low)]);
  }
  return finish_plan(Method::YaRN, params, scale, band, std::move(lambdas),
                     attention_temperature(scale), alpha, beta_hp);
}

ScalePlan build_uni(const RopeParams& params, double scale, Boundaries band, double alpha,
                    double beta_hp) {
  const int dr = params.pairs();
  const double lam = std::pow(scale, 1.0 / band.size());
  std::vector<double> lambdas(static_cast<std::size_t>(dr), 1.0);
  for (int j = band.d_low; j < band.d_high; ++j) {
    lambdas[static_cast<std::size_t>(j - 1)] = lam;
  }
  return finish_plan(Method::MrRopeUni, params, scale, band, std::move(lambdas),
                     attention_temperature(scale), alpha, beta_hp);
}

ScalePlan build_pro(const RopeParams& params, double scale, Boundaries band, double alpha,
                    double beta_hp) {
  const int dr = params.pairs();
  const int n = band.size();
  std::vector<double> lambdas(static_cast<std::size_t>(dr), 1.0);
  for (int j = band.d_low; j < band.d_high; ++j) {
    const double eps = 2.0 * (1 + j - band.d_low) / (static_cast<double>(1 + n) * n);
    lambdas[static_cast<std::size_t>(j - 1)] = std::pow(scale, eps);
  }
  return finish_plan(Method::MrRopePro, params, scale, band, std::move(lambdas),
                     attention_temperature(scale), alpha, beta_hp);
}

// Effective (alpha, beta) for a band given directly: the progress values one
// step inside each edge reproduce the band through compute_boundaries.
std::pair<double, double> effective_hyperparams(const RopeParams& params, Boundaries band) {
  const int dr = params.pairs();
  const double a = progress_at(params, std::min(band.d_high - 1, dr));
  const double b = progress_at(params, std::min(band.d_low + 1, dr));
  if (a < b) return {a, b};
  return {a / 2.0, a};  // bands narrower than three dimensions
}

}  // namespace

ScalePlan plan_yarn(const RopeParams& params, double scale, double alpha, double beta_hp) {
  check_scale(scale);
  return build_yarn(params, scale, compute_boundaries(params, alpha, beta_hp), alpha, beta_hp);
}

ScalePlan plan_mrrope_uni(const RopeParams& params, double scale, double alpha, double beta_hp) {
  check_scale(scale);
  return build_uni(params, scale, compute_boundaries(params, alpha, beta_hp), alpha, beta_hp);
}

ScalePlan plan_mrrope_pro(const RopeParams& params, double scale, double alpha, double beta_hp) {
  check_scale(scale);
  return build_pro(params, scale, compute_boundaries(params, alpha, beta_hp), alpha, beta_hp);
}

ScalePlan plan_yarn_with_band(const RopeParams& params, double scale, Boundaries band) {
  params.validate();
  check_scale(scale);
  check_band(params, band);
  auto [alpha, beta_hp] = effective_hyperparams(params, band);
  return build_yarn(params, scale, band, alpha, beta_hp);
}

ScalePlan plan_mrrope_uni_with_band(const RopeParams& params, double scale, Boundaries band) {
  params.validate();
  check_scale(scale);
  check_band(params, band);
  auto [alpha, beta_hp] = effective_hyperparams(params, band);
  return build_uni(params, scale, band, alpha, beta_hp);
}

ScalePlan plan_mrrope_pro_with_band(const RopeParams& params, double scale, Boundaries band) {
  params.validate();
  check_scale(scale);
  check_band(params, band);
  auto [alpha, beta_hp] = effective_hyperparams(params, band);
  return build_pro(params, scale, band, alpha, beta_hp);
}

ScalePlan compile_plan(Method method, const RopeParams& params, double scale, double alpha,
                       double beta_hp) {
  switch (method) {
    case Method::None: return plan_none(params);
    case Method::PI: return plan_pi(params, scale);
    case Method::NTK: return plan_ntk(params, scale);
    case Method::YaRN: return plan_yarn(params, scale, alpha, beta_hp);
    case Method::MrRopeUni: return plan_mrrope_uni(params, scale, alpha, beta_hp);
    case Method::MrRopePro: return plan_mrrope_pro(params, scale, alpha, beta_hp);
  }
  throw std::invalid_argument("unknown method");
}

FrequencySchedule scaled_frequencies(const RopeParams& params, const ScalePlan& plan) {
  params.validate();
  if (plan.pairs() != params.pairs()) {
    throw std::invalid_argument("scaled_frequencies: plan was compiled for " +
                                std::to_string(plan.pairs()) + " pairs, params have " +
                                std::to_string(params.pairs()));
  }
  const FrequencySchedule base = build_frequencies(params);
  if (plan.method == Method::PI) {
    return base;
  }
  std::vector<double> thetas(base.values());
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    thetas[i] /= plan.cumulative[i];
  }
  return FrequencySchedule(std::move(thetas));
}

double attention_temperature(double scale) {
  check_scale(scale);
  const double root = 0.1 * std::log(scale) + 1.0;
  return 1.0 / (root * root);
}

}  // namespace mrrope
