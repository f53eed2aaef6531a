#pragma once

#include <stdexcept>
#include <string>

namespace facekit {

/// Every failure the library can raise, one code per distinct condition.
/// Codes group into three categories that map onto CLI exit codes:
/// input/format (2), dimension/contract (3), numerical domain (4).
enum class ErrorKind {
    // input / format
    IoError,
    BadMagic,
    BadVersion,
    TruncatedFile,
    ZeroDims,
    NonFinite,
    MissingKey,
    UnsortedIndex,
    DuplicateIndex,
    BadJson,
    BadConfig,
    BadArgument,
    ConfigMismatch,
    // dimension / contract
    DimensionMismatch,
    IndexOutOfRange,
    EmptyRegion,
    TooShort,
    OrderTooLarge,
    TooFewSamples,
    // numerical domain
    ZeroNorm,
    NonFiniteValue,
};

constexpr int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::DimensionMismatch:
        case ErrorKind::IndexOutOfRange:
        case ErrorKind::EmptyRegion:
        case ErrorKind::TooShort:
        case ErrorKind::OrderTooLarge:
        case ErrorKind::TooFewSamples:
            return 3;
        case ErrorKind::ZeroNorm:
        case ErrorKind::NonFiniteValue:
            return 4;
        default:
            return 2;
    }
}

const char* error_kind_name(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return exit_code_for(kind_); }

private:
    ErrorKind kind_;
};

}  // namespace facekit
