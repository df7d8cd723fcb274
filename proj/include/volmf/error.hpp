#pragma once

#include <stdexcept>
#include <string>

namespace volmf {

enum class ErrorKind {
    InvalidInput,
    DimensionMismatch,
    NotPositiveDefinite,
    ConvergenceFailure,
    ZeroDataNorm,
    EmptyComplement,
    DegenerateVector,
    RankDeficient,
    NegativeInput,
    ZeroResidual,
    InvalidBounds,
    EmptyMask,
    DegenerateRow,
    ZeroRow,
    UnknownFixture,
    MaskResampleExhausted,
    RaggedRows,
    UnparsableCell,
    AllMissing,
    ShapeMismatch,
    IoError,
};

const char* to_string(ErrorKind kind) noexcept;

// True for failures caused by the numbers rather than by the caller's input.
bool is_numerical(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace volmf
