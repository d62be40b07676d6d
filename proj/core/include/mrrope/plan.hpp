#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mrrope/rope.hpp"

namespace mrrope {

enum class Method { None, PI, NTK, YaRN, MrRopeUni, MrRopePro };

std::string_view method_name(Method method);
std::optional<Method> parse_method(std::string_view name);

/// All method names accepted by parse_method, in CLI order.
const std::vector<std::string>& known_method_names();

// Hyperparameter convention: alpha is the rotation-progress threshold below
// which a dimension is treated as pure interpolation, beta the threshold
// above which it is left untouched (extrapolation). Some write-ups swap the
// two names; this library keys everything on the resulting (d_low, d_high).
inline constexpr double kDefaultAlpha = 1.0;
inline constexpr double kDefaultBeta = 32.0;

/// 1-based dimension band [d_low, d_high): dimensions below d_low keep their
/// trained frequencies, dimensions at or above d_high are fully interpolated.
struct Boundaries {
  int d_low = 1;
  int d_high = 1;
  int size() const { return d_high - d_low; }
};

/// Raised when the requested (alpha, beta) leave no middle band to convert.
class DegeneratePartitionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A compiled context-extension recipe: per-dimension expansion factors
/// lambda_j and their running products s_d = prod_{j<d} lambda_j, which is
/// the divisor applied to frequency theta_d. Dimension indices are 1-based.
struct ScalePlan {
  Method method = Method::None;
  double scale = 1.0;
  int d_low = 1;
  int d_high = 1;
  std::vector<double> lambdas;     // size D_r
  std::vector<double> cumulative;  // size D_r; cumulative[0] == 1 always
  double temperature = 1.0;
  double alpha = kDefaultAlpha;
  double beta_hp = kDefaultBeta;

  int pairs() const { return static_cast<int>(lambdas.size()); }
  double lambda(int j) const;         // 1-based
  double cumulative_at(int j) const;  // 1-based
  int band_size() const { return d_high - d_low; }
  bool has_band() const { return d_high > d_low && d_low <= pairs(); }
  bool in_band(int j) const { return j >= d_low && j < d_high; }
};

/// d_low = max{ i : trained_len * theta_i > beta * 2pi },
/// d_high = min{ i : trained_len * theta_i < alpha * 2pi }; falls back to 1
/// resp. D_r + 1 when a set is empty. Throws DegeneratePartitionError when
/// the band collapses.
Boundaries compute_boundaries(const RopeParams& params, double alpha, double beta_hp);

ScalePlan plan_none(const RopeParams& params);

/// Position interpolation: frequencies untouched, consumers divide positions
/// by `scale` before rotating.
ScalePlan plan_pi(const RopeParams& params, double scale);

/// Uniform expansion lambda_j = scale^(1/(D_r - 1)) across the whole
/// spectrum; equivalent to raising the rotational base.
ScalePlan plan_ntk(const RopeParams& params, double scale);

/// Regressive band conversion: lambda ratios follow the closed form
/// yarn_cumulative_scale, normalized so the band product is exactly `scale`.
ScalePlan plan_yarn(const RopeParams& params, double scale, double alpha = kDefaultAlpha,
                    double beta_hp = kDefaultBeta);

/// Constant band conversion lambda_j = scale^(1/(d_high - d_low)).
ScalePlan plan_mrrope_uni(const RopeParams& params, double scale, double alpha = kDefaultAlpha,
                          double beta_hp = kDefaultBeta);

/// Progressive band conversion lambda_j = scale^(eps_j) with eps_j an
/// arithmetic progression summing to 1 over the band.
ScalePlan plan_mrrope_pro(const RopeParams& params, double scale, double alpha = kDefaultAlpha,
                          double beta_hp = kDefaultBeta);

// Explicit-band variants, used by hyperparameter sweeps and property tests.
// plan_yarn_with_band derives effective (alpha, beta) from the band's own
// rotation progress.
ScalePlan plan_yarn_with_band(const RopeParams& params, double scale, Boundaries band);
ScalePlan plan_mrrope_uni_with_band(const RopeParams& params, double scale, Boundaries band);
ScalePlan plan_mrrope_pro_with_band(const RopeParams& params, double scale, Boundaries band);

/// Dispatch on method; None ignores scale/alpha/beta, PI/NTK ignore alpha/beta.
ScalePlan compile_plan(Method method, const RopeParams& params, double scale,
                       double alpha = kDefaultAlpha, double beta_hp = kDefaultBeta);

/// thetas'[j] = thetas[j] / cumulative[j]. PI returns the unscaled schedule:
/// it rescales positions, not frequencies.
FrequencySchedule scaled_frequencies(const RopeParams& params, const ScalePlan& plan);

/// Attention-logit rescaling t = 1 / (0.1 ln S + 1)^2.
double attention_temperature(double scale);

/// Closed-form cumulative divisor of a dimension with rotation progress r
/// under a regressive band conversion: S(beta - alpha) / (beta + (S-1) r - S alpha).
/// Equals 1 at r = beta and S at r = alpha.
double yarn_cumulative_scale(double r, double scale, double alpha, double beta_hp);

}  // namespace mrrope
