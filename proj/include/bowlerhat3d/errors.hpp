#ifndef BH3D_ERRORS_HPP
#define BH3D_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bh3d {

/// Machine-readable failure categories. The CLI prints the slug from
/// error_code_name() on stderr, so slugs are part of the tool's interface.
enum class ErrorCode {
    BadHeader,      // malformed/incomplete volume header JSON
    BadDims,        // non-positive or inconsistent dimensions
    UnknownDtype,   // dtype outside {u8, u16, f32}
    MissingRaw,     // raw payload file absent
    RawTooSmall,    // raw payload shorter than dims product
    RawTooLarge,    // raw payload longer than dims product
    NonFiniteData,  // NaN/Inf in an f32 payload
    Unwritable,     // output path cannot be opened for writing
    BadDiameter,    // even or non-positive structuring-element diameter
    BadDirections,  // direction count < 1
    ZeroVector,     // zero-length direction vector
    BadSigma,       // non-positive Gaussian scale
    BadScales,      // empty or non-increasing scale set
    BadParam,       // parameter outside its stated domain
    BankMismatch,   // scale banks disagree in shape
    BadSpec,        // invalid phantom spec
    OutOfBounds,    // phantom geometry does not fit the volume
    BadNoise,       // invalid noise model parameters
    DimsMismatch,   // two volumes that must share dims do not
    DegenerateTruth,// ground truth has a single class
    BadThresholds,  // threshold count < 1
    BadProfile,     // invalid probe segment or sample count
    NoPeak,         // profile has no maximum above its baseline
    EmptyInput,     // empty method list or similar
    UnknownMethod,  // enhancement method name not recognized
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}
    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace bh3d

#endif
