#include "mrrope/radix.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mrrope {

MixedRadixSpec MixedRadixSpec::uniform(double beta, int num_digits) {
  MixedRadixSpec spec;
  spec.beta = beta;
  spec.num_digits = num_digits;
  spec.lambdas.assign(static_cast<std::size_t>(num_digits), 1.0);
  spec.validate();
  return spec;
}

bool MixedRadixSpec::is_uniform() const {
  for (double l : lambdas) {
    if (l != 1.0) return false;
  }
  return true;
}

void MixedRadixSpec::validate() const {
  if (!(beta > 1.0)) {
    throw std::invalid_argument("MixedRadixSpec: beta must be > 1, got " + std::to_string(beta));
  }
  if (num_digits < 1) {
    throw std::invalid_argument("MixedRadixSpec: num_digits must be >= 1");
  }
  if (lambdas.size() != static_cast<std::size_t>(num_digits)) {
    throw std::invalid_argument("MixedRadixSpec: lambdas size does not match num_digits");
  }
  for (double l : lambdas) {
    if (!(l >= 1.0)) {
      throw std::invalid_argument("MixedRadixSpec: every lambda must be >= 1");
    }
  }
}

namespace {

void check_digit_index(const MixedRadixSpec& spec, int j) {
  if (j < 1 || j > spec.num_digits) {
    throw std::out_of_range("digit index " + std::to_string(j) + " outside [1, " +
                            std::to_string(spec.num_digits) + "]");
  }
}

// beta^(j-1) * prod_{d<j} lambda_d, by repeated multiplication so that
// integer bases stay exact below 2^53.
double place_value(const MixedRadixSpec& spec, int j) {
  double pv = 1.0;
  for (int d = 1; d < j; ++d) {
    pv *= spec.beta * spec.lambdas[static_cast<std::size_t>(d - 1)];
  }
  return pv;
}

}  // namespace

double digit_at(double m, const MixedRadixSpec& spec, int j) {
  check_digit_index(spec, j);
  if (!(m >= 0.0)) {
    throw std::invalid_argument("digit_at: position must be nonnegative");
  }
  const double modulus = spec.beta * spec.lambdas[static_cast<std::size_t>(j - 1)];
  return std::fmod(std::floor(m / place_value(spec, j)), modulus);
}

RadixDigits digits_of(double m, const MixedRadixSpec& spec) {
  RadixDigits out;
  out.digits.resize(static_cast<std::size_t>(spec.num_digits));
  for (int j = 1; j <= spec.num_digits; ++j) {
    out.digits[static_cast<std::size_t>(j - 1)] = digit_at(m, spec, j);
  }
  return out;
}

double from_digits(const RadixDigits& d, const MixedRadixSpec& spec) {
  if (d.digits.size() != static_cast<std::size_t>(spec.num_digits)) {
    throw std::invalid_argument("from_digits: digit count does not match spec");
  }
  double sum = 0.0;
  double pv = 1.0;
  for (int j = 1; j <= spec.num_digits; ++j) {
    sum += d.digits[static_cast<std::size_t>(j - 1)] * pv;
    pv *= spec.beta * spec.lambdas[static_cast<std::size_t>(j - 1)];
  }
  return sum;
}

std::vector<int> incomplete_digits(std::int64_t len, const MixedRadixSpec& spec) {
  if (len < 1) {
    throw std::invalid_argument("incomplete_digits: len must be >= 1");
  }
  spec.validate();
  std::vector<int> out;
  for (int j = 1; j <= spec.num_digits; ++j) {
    const double pv = place_value(spec, j);
    const double max_quotient = std::floor(static_cast<double>(len) / pv);
    const double saturated = spec.beta * spec.lambdas[static_cast<std::size_t>(j - 1)] - 1.0;
    // covers the place-value case pv > len, where the digit is stuck at 0
    if (max_quotient < saturated) {
      out.push_back(j);
    }
  }
  return out;
}

double representable_range(const MixedRadixSpec& spec) {
  spec.validate();
  double range = 1.0;
  for (int j = 0; j < spec.num_digits; ++j) {
    range *= spec.beta * spec.lambdas[static_cast<std::size_t>(j)];
  }
  return range;
}

MixedRadixSpec rope_radix_of(const RopeParams& params) {
  params.validate();
  if (!(params.base > 1.0)) {
    throw std::invalid_argument("rope_radix_of: requires base > 1 for a radix base > 1");
  }
  return MixedRadixSpec::uniform(std::pow(params.base, 1.0 / params.pairs()), params.pairs());
}

}  // namespace mrrope
