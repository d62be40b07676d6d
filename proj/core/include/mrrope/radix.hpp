#pragma once

#include <cstdint>
#include <vector>

#include "mrrope/rope.hpp"

namespace mrrope {

/// A positional number system with base beta and a per-digit expansion
/// factor lambda_j >= 1. All lambdas equal to 1 gives the plain beta-radix
/// system. Digit indices are 1-based, least significant first.
struct MixedRadixSpec {
  double beta = 10.0;
  int num_digits = 1;
  std::vector<double> lambdas;  // size num_digits, each >= 1

  static MixedRadixSpec uniform(double beta, int num_digits);

  bool is_uniform() const;
  void validate() const;
};

/// Digit vector of one position; digit j lies in [0, beta * lambda_j).
/// Digits are real-valued in general: for non-integer beta the flooring in
/// digit_at produces fractional residues. Integer beta with lambda = 1
/// yields exact integer digits.
struct RadixDigits {
  std::vector<double> digits;  // least significant first
};

/// j-th digit of m: floor(m * beta^-(j-1) / prod_{d<j} lambda_d) mod (beta * lambda_j).
double digit_at(double m, const MixedRadixSpec& spec, int j);

/// All num_digits digits of m.
RadixDigits digits_of(double m, const MixedRadixSpec& spec);

/// Positional reconstruction: sum_j digit_j * beta^(j-1) * prod_{d<j} lambda_d.
double from_digits(const RadixDigits& d, const MixedRadixSpec& spec);

/// Digits that can never reach their maximum value for any input in [0, len]:
/// digit j saturates within the range iff floor(len / place_value_j) >=
/// beta * lambda_j - 1, where place_value_j = beta^(j-1) * prod_{d<j} lambda_d.
/// Equivalent to a brute-force scan of the maximum digit reached over all
/// m <= len. Returns 1-based indices in ascending order.
std::vector<int> incomplete_digits(std::int64_t len, const MixedRadixSpec& spec);

/// beta^num_digits * prod_j lambda_j.
double representable_range(const MixedRadixSpec& spec);

/// The radix system a rotary head implements: beta = base^(1/D_r) with one
/// digit per complex pair and no expansion.
MixedRadixSpec rope_radix_of(const RopeParams& params);

}  // namespace mrrope
