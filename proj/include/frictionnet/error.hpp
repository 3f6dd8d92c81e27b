// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace frictionnet {

enum class ErrorCode {
  // network construction
  cycle_detected,
  missing_cpt,
  row_length_mismatch,
  unnormalized_row,
  unknown_parent,
  all_zero_row,
  // queries
  unknown_variable,
  unknown_state,
  incomplete_assignment,
  query_is_evidence,
  zero_probability_evidence,
  // discretizers
  non_finite_input,
  negative_friction,
  out_of_range,
  // metrics
  dimension_mismatch,
  non_ordinal_variable,
  empty_sample_set,
  length_mismatch,
  empty_after_exclusion,
  unnormalized_scores,
  // simulation / replay
  invalid_clamp,
  zero_or_negative_speed,
  non_positive_load,
  // generic
  invalid_argument,
  parse_error,
  io_error,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // Exit-code contract: 0 success, 1 validation/domain error, 2 I/O error.
  int exit_code() const noexcept { return code_ == ErrorCode::io_error ? 2 : 1; }

 private:
  ErrorCode code_;
};

}  // namespace frictionnet
