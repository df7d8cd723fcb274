#include "volmf/error.hpp"

namespace volmf {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidInput: return "InvalidInput";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorKind::ZeroDataNorm: return "ZeroDataNorm";
        case ErrorKind::EmptyComplement: return "EmptyComplement";
        case ErrorKind::DegenerateVector: return "DegenerateVector";
        case ErrorKind::RankDeficient: return "RankDeficient";
        case ErrorKind::NegativeInput: return "NegativeInput";
        case ErrorKind::ZeroResidual: return "ZeroResidual";
        case ErrorKind::InvalidBounds: return "InvalidBounds";
        case ErrorKind::EmptyMask: return "EmptyMask";
        case ErrorKind::DegenerateRow: return "DegenerateRow";
        case ErrorKind::ZeroRow: return "ZeroRow";
        case ErrorKind::UnknownFixture: return "UnknownFixture";
        case ErrorKind::MaskResampleExhausted: return "MaskResampleExhausted";
        case ErrorKind::RaggedRows: return "RaggedRows";
        case ErrorKind::UnparsableCell: return "UnparsableCell";
        case ErrorKind::AllMissing: return "AllMissing";
        case ErrorKind::ShapeMismatch: return "ShapeMismatch";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

bool is_numerical(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::NotPositiveDefinite:
        case ErrorKind::ConvergenceFailure:
        case ErrorKind::ZeroResidual:
        case ErrorKind::RankDeficient:
        case ErrorKind::DegenerateVector:
        case ErrorKind::ZeroRow:
        case ErrorKind::MaskResampleExhausted:
            return true;
        default:
            return false;
    }
}

}  // namespace volmf
