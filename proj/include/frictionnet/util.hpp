// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace frictionnet::util {

// Shortest decimal form that parses back to the same double (std::to_chars).
std::string format_double(double value);

// Fixed-point with the given number of decimals (CLI-facing output).
std::string format_fixed(double value, int decimals = 6);

double parse_double(std::string_view text);          // throws parse_error
std::int64_t parse_int(std::string_view text);       // throws parse_error

std::vector<std::string> split(std::string_view line, char sep);

// Neumaier-compensated running sum; merge order must be fixed by the caller
// for bit-reproducible totals.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double value) {
    const double t = sum + value;
    comp += std::fabs(sum) >= std::fabs(value) ? (sum - t) + value : (value - t) + sum;
    sum = t;
  }

  void merge(const CompensatedSum& other) {
    add(other.sum);
    add(other.comp);
  }

  double value() const { return sum + comp; }
};

}  // namespace frictionnet::util
