#pragma once

#include <stdexcept>
#include <string>

namespace tpair {

enum class ErrorCode {
  invalid_argument,
  sampling_too_coarse,
  non_smooth_lambda,
  step_too_large,
  non_orthogonal_drift,
  not_closed,
  not_unit,
  g_not_holomorphic,
  input_not_certified,
  phi_not_zero,
  factory_validation_failed,
  rank_deficient,
  reduction_failed,
  io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tpair
