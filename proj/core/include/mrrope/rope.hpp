#pragma once

#include <cstdint>
#include <vector>

namespace mrrope {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Positions beyond 2^40 tokens are rejected: the mod-2pi reduction of
// m * theta is done in 64-bit floating point and degrades once the product
// approaches 2^52.
inline constexpr double kMaxPosition = 1099511627776.0;  // 2^40

/// Rotary geometry of one attention head: rotational base b, head dimension
/// |D| (must be even) and the trained context length.
struct RopeParams {
  double base = 10000.0;
  int head_dim = 128;
  std::int64_t trained_len = 4096;

  /// Number of complex pairs per head, |D| / 2.
  int pairs() const { return head_dim / 2; }

  /// Throws std::invalid_argument naming the violated invariant.
  void validate() const;
};

/// Per-pair rotational frequencies in radians per token step, fastest first.
/// Dimension indices are 1-based throughout: theta(1) == 1 for an unscaled
/// schedule built from base > 1.
class FrequencySchedule {
 public:
  FrequencySchedule() = default;
  explicit FrequencySchedule(std::vector<double> thetas);

  int pairs() const { return static_cast<int>(thetas_.size()); }
  double theta(int j) const;  // 1-based, throws std::out_of_range
  const std::vector<double>& values() const { return thetas_; }

 private:
  std::vector<double> thetas_;
};

/// A head-dim sized real vector viewed as pairs (x_{2j-1}, x_{2j}); pair j
/// lives at offsets 2(j-1), 2(j-1)+1.
using EmbeddingVec = std::vector<double>;

/// theta_j = base^(-2(j-1)/head_dim) for j = 1..head_dim/2.
FrequencySchedule build_frequencies(const RopeParams& params);

/// Rotation angles (m * theta_j) mod 2pi, each in [0, 2pi).
std::vector<double> rotation_angles(const FrequencySchedule& sched, double m);

/// Rotates pair j of `vec` by angle m * theta_j. Norm of every pair is
/// preserved. Accepts fractional positions (position-interpolated plans
/// rotate at m / S).
EmbeddingVec apply_rotation(const EmbeddingVec& vec, const FrequencySchedule& sched, double m);

/// Token distance over which pair j completes one full rotation: 2pi / theta_j.
double wavelength(const FrequencySchedule& sched, int j);

/// Rotation cycles pair j completes within a context of `len` tokens:
/// len * theta_j / 2pi.
double rotation_progress(const FrequencySchedule& sched, int j, std::int64_t len);

}  // namespace mrrope
