#include "mrrope/rope.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace mrrope {

void RopeParams::validate() const {
  if (!(base > 0.0) || base == 1.0) {
    throw std::invalid_argument("RopeParams: base must be positive and not equal to 1, got " +
                                std::to_string(base));
  }
  if (head_dim < 2 || head_dim % 2 != 0) {
    throw std::invalid_argument("RopeParams: head_dim must be a positive even integer, got " +
                                std::to_string(head_dim));
  }
  if (trained_len < 1) {
    throw std::invalid_argument("RopeParams: trained_len must be >= 1, got " +
                                std::to_string(trained_len));
  }
}

FrequencySchedule::FrequencySchedule(std::vector<double> thetas) : thetas_(std::move(thetas)) {
  for (double t : thetas_) {
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw std::invalid_argument("FrequencySchedule: frequencies must be positive and finite");
    }
  }
}

double FrequencySchedule::theta(int j) const {
  if (j < 1 || j > pairs()) {
    throw std::out_of_range("FrequencySchedule: dimension index " + std::to_string(j) +
                            " outside [1, " + std::to_string(pairs()) + "]");
  }
  return thetas_[static_cast<std::size_t>(j - 1)];
}

FrequencySchedule build_frequencies(const RopeParams& params) {
  params.validate();
  const int dr = params.pairs();
  std::vector<double> thetas(static_cast<std::size_t>(dr));
  for (int j = 1; j <= dr; ++j) {
    thetas[static_cast<std::size_t>(j - 1)] =
        std::pow(params.base, -2.0 * (j - 1) / params.head_dim);
  }
  return FrequencySchedule(std::move(thetas));
}

namespace {

void check_position(double m) {
  if (!(m >= 0.0) || m > kMaxPosition) {
    throw std::invalid_argument("position must lie in [0, 2^40], got " + std::to_string(m));
  }
}

}  // namespace

std::vector<double> rotation_angles(const FrequencySchedule& sched, double m) {
  check_position(m);
  std::vector<double> angles(sched.values().size());
  for (std::size_t i = 0; i < angles.size(); ++i) {
    angles[i] = std::fmod(m * sched.values()[i], kTwoPi);
  }
  return angles;
}

EmbeddingVec apply_rotation(const EmbeddingVec& vec, const FrequencySchedule& sched, double m) {
  check_position(m);
  const std::size_t dr = sched.values().size();
  if (vec.size() != 2 * dr) {
    throw std::invalid_argument("apply_rotation: vector has " + std::to_string(vec.size()) +
                                " components, schedule expects " + std::to_string(2 * dr));
  }
  EmbeddingVec out(vec.size());
  for (std::size_t i = 0; i < dr; ++i) {
    const double angle = m * sched.values()[i];
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const double x = vec[2 * i];
    const double y = vec[2 * i + 1];
    out[2 * i] = x * c - y * s;
    out[2 * i + 1] = x * s + y * c;
  }
  return out;
}

double wavelength(const FrequencySchedule& sched, int j) {
  return kTwoPi / sched.theta(j);
}

double rotation_progress(const FrequencySchedule& sched, int j, std::int64_t len) {
  if (len < 1) {
    throw std::invalid_argument("rotation_progress: context length must be >= 1");
  }
  return static_cast<double>(len) * sched.theta(j) / kTwoPi;
}

}  // namespace mrrope
