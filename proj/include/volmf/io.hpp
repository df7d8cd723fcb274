#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "volmf/matrix.hpp"
#include "volmf/solver.hpp"

namespace volmf {

struct MatrixFile {
    Matrix data;
    std::optional<Matrix> mask;  // set only when a nan cell was read
};

/// Comma-separated, '.' decimal, one row per line. With missing_as_nan a
/// `nan` cell becomes data 0 and mask 0. Errors: RaggedRows,
/// UnparsableCell(row, col), AllMissing, IoError.
MatrixFile read_matrix_csv(const std::filesystem::path& path, bool missing_as_nan);

/// %.17g, so finite doubles round-trip exactly. Entries with mask 0 are
/// written as `nan`.
void write_matrix_csv(const Matrix& m, const std::filesystem::path& path, const Matrix* mask = nullptr);

void write_indices(std::span<const std::size_t> idx, const std::filesystem::path& path);

/// Header `iter\telapsed_s\tfit\treg\tobjective`, one row per entry.
void write_trace_tsv(const ConvergenceTrace& trace, const std::filesystem::path& path);

struct TraceRow {
    std::size_t iter = 0;
    double elapsed_s = 0.0;
    double fit = 0.0;
    double reg = 0.0;
    double objective = 0.0;
};

std::vector<TraceRow> read_trace_tsv(const std::filesystem::path& path);

/// Plain PGM (P2, maxval 255), pixel = round(255·h/max(h)), row-major.
/// Throws ShapeMismatch unless width·height = h.size().
void write_abundance_pgm(std::span<const double> h, std::size_t width, std::size_t height,
                         const std::filesystem::path& path);

/// 64-bit FNV-1a of the file bytes.
std::uint64_t fnv1a_file(const std::filesystem::path& path);
std::string hex64(std::uint64_t v);

}  // namespace volmf
