#include "facekit/error.hpp"

namespace facekit {

const char* error_kind_name(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::IoError: return "IoError";
        case ErrorKind::BadMagic: return "BadMagic";
        case ErrorKind::BadVersion: return "BadVersion";
        case ErrorKind::TruncatedFile: return "TruncatedFile";
        case ErrorKind::ZeroDims: return "ZeroDims";
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::MissingKey: return "MissingKey";
        case ErrorKind::UnsortedIndex: return "UnsortedIndex";
        case ErrorKind::DuplicateIndex: return "DuplicateIndex";
        case ErrorKind::BadJson: return "BadJson";
        case ErrorKind::BadConfig: return "BadConfig";
        case ErrorKind::BadArgument: return "BadArgument";
        case ErrorKind::ConfigMismatch: return "ConfigMismatch";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorKind::EmptyRegion: return "EmptyRegion";
        case ErrorKind::TooShort: return "TooShort";
        case ErrorKind::OrderTooLarge: return "OrderTooLarge";
        case ErrorKind::TooFewSamples: return "TooFewSamples";
        case ErrorKind::ZeroNorm: return "ZeroNorm";
        case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    }
    return "Unknown";
}

}  // namespace facekit
