#include "bowlerhat3d/errors.hpp"

namespace bh3d {

const char* error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::BadHeader: return "bad-header";
    case ErrorCode::BadDims: return "bad-dims";
    case ErrorCode::UnknownDtype: return "unknown-dtype";
    case ErrorCode::MissingRaw: return "missing-raw";
    case ErrorCode::RawTooSmall: return "raw-too-small";
    case ErrorCode::RawTooLarge: return "raw-too-large";
    case ErrorCode::NonFiniteData: return "non-finite-data";
    case ErrorCode::Unwritable: return "unwritable";
    case ErrorCode::BadDiameter: return "bad-diameter";
    case ErrorCode::BadDirections: return "bad-directions";
    case ErrorCode::ZeroVector: return "zero-vector";
    case ErrorCode::BadSigma: return "bad-sigma";
    case ErrorCode::BadScales: return "bad-scales";
    case ErrorCode::BadParam: return "bad-param";
    case ErrorCode::BankMismatch: return "bank-mismatch";
    case ErrorCode::BadSpec: return "bad-spec";
    case ErrorCode::OutOfBounds: return "out-of-bounds";
    case ErrorCode::BadNoise: return "bad-noise";
    case ErrorCode::DimsMismatch: return "dims-mismatch";
    case ErrorCode::DegenerateTruth: return "degenerate-truth";
    case ErrorCode::BadThresholds: return "bad-thresholds";
    case ErrorCode::BadProfile: return "bad-profile";
    case ErrorCode::NoPeak: return "no-peak";
    case ErrorCode::EmptyInput: return "empty-input";
    case ErrorCode::UnknownMethod: return "unknown-method";
    }
    return "unknown-error";
}

} // namespace bh3d
