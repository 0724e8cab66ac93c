#include "tpair/error.hpp"

namespace tpair {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::sampling_too_coarse: return "SamplingTooCoarse";
    case ErrorCode::non_smooth_lambda: return "NonSmoothLambda";
    case ErrorCode::step_too_large: return "StepTooLarge";
    case ErrorCode::non_orthogonal_drift: return "NonOrthogonalDrift";
    case ErrorCode::not_closed: return "NotClosed";
    case ErrorCode::not_unit: return "NotUnit";
    case ErrorCode::g_not_holomorphic: return "GNotHolomorphic";
    case ErrorCode::input_not_certified: return "InputNotCertified";
    case ErrorCode::phi_not_zero: return "PhiNotZero";
    case ErrorCode::factory_validation_failed: return "FactoryValidationFailed";
    case ErrorCode::rank_deficient: return "RankDeficient";
    case ErrorCode::reduction_failed: return "ReductionFailed";
    case ErrorCode::io: return "IOError";
  }
  return "Error";
}

}  // namespace tpair
