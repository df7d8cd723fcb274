#include "volmf/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "volmf/error.hpp"

namespace volmf {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool is_nan_token(std::string_view s) {
    if (s.size() != 3) return false;
    return std::tolower(static_cast<unsigned char>(s[0])) == 'n' &&
           std::tolower(static_cast<unsigned char>(s[1])) == 'a' &&
           std::tolower(static_cast<unsigned char>(s[2])) == 'n';
}

std::optional<double> parse_double(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

}  // namespace

MatrixFile read_matrix_csv(const std::filesystem::path& path, bool missing_as_nan) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());

    std::vector<double> values;
    std::vector<double> observed;
    std::size_t cols = 0;
    std::size_t rows = 0;
    bool any_missing = false;
    std::string line;
    while (std::getline(in, line)) {
        const std::string_view body = trim(line);
        if (body.empty()) continue;
        std::size_t c = 0;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = body.find(',', start);
            const std::string_view cell =
                trim(body.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
            if (missing_as_nan && is_nan_token(cell)) {
                values.push_back(0.0);
                observed.push_back(0.0);
                any_missing = true;
            } else {
                const std::optional<double> v = parse_double(cell);
                if (!v) {
                    throw Error(ErrorKind::UnparsableCell, "row " + std::to_string(rows + 1) + ", column " +
                                                               std::to_string(c + 1) + ": '" + std::string(cell) + "'");
                }
                values.push_back(*v);
                observed.push_back(1.0);
            }
            ++c;
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (rows == 0) {
            cols = c;
        } else if (c != cols) {
            throw Error(ErrorKind::RaggedRows, "row " + std::to_string(rows + 1) + " has " + std::to_string(c) +
                                                   " cells, expected " + std::to_string(cols));
        }
        ++rows;
    }
    if (rows == 0) throw Error(ErrorKind::InvalidInput, path.string() + " holds no data");
    if (std::none_of(observed.begin(), observed.end(), [](double o) { return o > 0.0; })) {
        throw Error(ErrorKind::AllMissing, path.string() + " has no observed entry");
    }
    MatrixFile out{Matrix(rows, cols, std::move(values)), std::nullopt};
    if (any_missing) out.mask = Matrix(rows, cols, std::move(observed));
    return out;
}

void write_matrix_csv(const Matrix& m, const std::filesystem::path& path, const Matrix* mask) {
    if (mask && (mask->rows() != m.rows() || mask->cols() != m.cols())) {
        throw Error(ErrorKind::ShapeMismatch, "mask and matrix differ in shape");
    }
    std::ofstream out = open_out(path);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto row = m.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out << ',';
            if (mask && (*mask)(i, j) == 0.0) {
                out << "nan";
            } else {
                out << fmt17(row[j]);
            }
        }
        out << '\n';
    }
    finish(out, path);
}

void write_indices(std::span<const std::size_t> idx, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    for (std::size_t k : idx) out << k << '\n';
    finish(out, path);
}

void write_trace_tsv(const ConvergenceTrace& trace, const std::filesystem::path& path) {
    if (trace.empty()) throw Error(ErrorKind::InvalidInput, "trace is empty");
    std::ofstream out = open_out(path);
    out << "iter\telapsed_s\tfit\treg\tobjective\n";
    for (const TraceEntry& e : trace.entries) {
        out << e.iter << '\t' << fmt17(e.elapsed_s) << '\t' << fmt17(e.fit) << '\t' << fmt17(e.reg) << '\t'
            << fmt17(e.objective) << '\n';
    }
    finish(out, path);
}

std::vector<TraceRow> read_trace_tsv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line) || trim(line) != "iter\telapsed_s\tfit\treg\tobjective") {
        throw Error(ErrorKind::InvalidInput, path.string() + " is not a trace file");
    }
    std::vector<TraceRow> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::istringstream ss(line);
        std::string cells[5];
        for (auto& c : cells) std::getline(ss, c, '\t');
        std::optional<double> v[4];
        for (int k = 0; k < 4; ++k) v[k] = parse_double(trim(cells[k + 1]));
        std::size_t it = 0;
        const auto [end, ec] = std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), it);
        if (ec != std::errc() || end != cells[0].data() + cells[0].size() || !v[0] || !v[1] || !v[2] || !v[3]) {
            throw Error(ErrorKind::UnparsableCell, "trace row " + std::to_string(rows.size() + 2));
        }
        rows.push_back({it, *v[0], *v[1], *v[2], *v[3]});
    }
    return rows;
}

void write_abundance_pgm(std::span<const double> h, std::size_t width, std::size_t height,
                         const std::filesystem::path& path) {
    if (width == 0 || height == 0 || width * height != h.size()) {
        throw Error(ErrorKind::ShapeMismatch, std::to_string(width) + "x" + std::to_string(height) +
                                                  " does not hold " + std::to_string(h.size()) + " pixels");
    }
    const double top = *std::max_element(h.begin(), h.end());
    std::ofstream out = open_out(path);
    out << "P2\n" << width << ' ' << height << "\n255\n";
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            const double v = h[y * width + x];
            long px = 0;
            if (top > 0.0) px = std::lround(255.0 * std::max(v, 0.0) / top);
            if (x) out << ' ';
            out << std::clamp(px, 0L, 255L);
        }
        out << '\n';
    }
    finish(out, path);
}

std::uint64_t fnv1a_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001b3ULL;
        }
    }
    return hash;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace volmf
