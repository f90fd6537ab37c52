#ifndef STRATAFILL_ERRORS_HPP
#define STRATAFILL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace stratafill {

enum class ErrorCode {
    FINENESS_EXCEEDED,
    TARGET_TOO_FINE,
    SUPPORT_OUTSIDE_ANNULUS,
    SUPPORT_OUTSIDE_BALL,
    PACKING_FAILED,
    TOO_FAR,
    NO_VALID_MAP,
    WELLDEF_FAILED,
    NOT_FOUND,
    PRECONDITION_FAILED,
    FILL_FAILED,
    BAND_NOT_DISJOINT,
    TOWER_FAILED,
    UNSUPPORTED_DIMENSION,
    COMPLEX_TOO_LARGE,
    DIMENSION_MISMATCH,
    IO_ERROR,
};

const char* to_string(ErrorCode code);

/// Exception carrying a machine-readable error code alongside the message.
class OpError : public std::runtime_error {
  public:
    OpError(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace stratafill

#endif
