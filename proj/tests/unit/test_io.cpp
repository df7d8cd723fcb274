#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "../support.hpp"
#include "volmf/error.hpp"
#include "volmf/io.hpp"

using namespace volmf;
using namespace volmf::testing;

namespace {

ErrorKind read_error(const std::filesystem::path& p, bool nan) {
    try {
        (void)read_matrix_csv(p, nan);
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::InvalidInput;
}

std::vector<int> pgm_pixels(const std::filesystem::path& p) {
    std::istringstream in(read_text(p));
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    in >> magic >> w >> h >> maxval;
    CHECK(magic == "P2");
    CHECK(maxval == 255);
    std::vector<int> px(static_cast<std::size_t>(w * h));
    for (int& v : px) in >> v;
    return px;
}

}  // namespace

TEST_SUITE("csv") {
    TEST_CASE("plain and masked reads") {
        TempDir dir("csv");
        write_text(dir / "a.csv", "1,2\n3,4\n");
        const MatrixFile a = read_matrix_csv(dir / "a.csv", false);
        CHECK(a.data == Matrix{{1, 2}, {3, 4}});
        CHECK_FALSE(a.mask.has_value());

        write_text(dir / "b.csv", "1,nan\n3,4");
        const MatrixFile b = read_matrix_csv(dir / "b.csv", true);
        REQUIRE(b.mask.has_value());
        CHECK(*b.mask == Matrix{{1, 0}, {1, 1}});
        CHECK(b.data(0, 1) == 0.0);
    }

    TEST_CASE("errors") {
        TempDir dir("csv-err");
        write_text(dir / "ragged.csv", "1,2\n3\n");
        CHECK(read_error(dir / "ragged.csv", false) == ErrorKind::RaggedRows);
        write_text(dir / "bad.csv", "1,2\n3,x\n");
        CHECK(read_error(dir / "bad.csv", false) == ErrorKind::UnparsableCell);
        write_text(dir / "nan.csv", "1,nan\n");
        CHECK(read_error(dir / "nan.csv", false) == ErrorKind::UnparsableCell);
        write_text(dir / "missing.csv", "nan,NaN\n");
        CHECK(read_error(dir / "missing.csv", true) == ErrorKind::AllMissing);
        CHECK(read_error(dir / "absent.csv", false) == ErrorKind::IoError);
        try {
            (void)read_matrix_csv(dir / "bad.csv", false);
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("row 2, column 2") != std::string::npos);
        }
    }

    TEST_CASE("write then read is bit-identical") {
        TempDir dir("csv-rt");
        Rng rng(1, "csv");
        Matrix m = rng.normal_matrix(7, 5);
        m(0, 0) = 1e-300;
        m(1, 1) = -0.1;
        m(2, 2) = std::numeric_limits<double>::max();
        m(3, 3) = 1.0 / 3.0;
        write_matrix_csv(m, dir / "m.csv");
        CHECK(read_matrix_csv(dir / "m.csv", false).data == m);

        Matrix mask(7, 5, 1.0);
        mask(4, 2) = 0.0;
        write_matrix_csv(m, dir / "masked.csv", &mask);
        const MatrixFile back = read_matrix_csv(dir / "masked.csv", true);
        CHECK(*back.mask == mask);
        CHECK(back.data(0, 0) == m(0, 0));
    }
}

TEST_SUITE("trace tsv") {
    TraceEntry entry(std::size_t iter, double fit, double reg, double lambda, double sign) {
        TraceEntry e;
        e.iter = iter;
        e.elapsed_s = 0.125 * static_cast<double>(iter);
        e.fit = fit;
        e.reg = reg;
        e.lambda = lambda;
        e.reg_sign = sign;
        e.objective = fit + sign * lambda * reg;
        return e;
    }

    TEST_CASE("one iteration gives two lines") {
        TempDir dir("trace1");
        ConvergenceTrace t;
        t.entries.push_back(entry(1, 2.5, 0.5, 1.0, 1.0));
        write_trace_tsv(t, dir / "t.tsv");
        const std::string text = read_text(dir / "t.tsv");
        CHECK(std::count(text.begin(), text.end(), '\n') == 2);
        CHECK(text.rfind("iter\telapsed_s\tfit\treg\tobjective\n", 0) == 0);
    }

    TEST_CASE("parse back and objective identity") {
        TempDir dir("trace2");
        ConvergenceTrace t;
        Rng rng(2, "trace");
        for (std::size_t k = 1; k <= 30; ++k) {
            t.entries.push_back(entry(k, rng.uniform(), rng.normal(), 0.7, k % 2 ? 1.0 : -1.0));
        }
        write_trace_tsv(t, dir / "t.tsv");
        const std::vector<TraceRow> rows = read_trace_tsv(dir / "t.tsv");
        REQUIRE(rows.size() == 30);
        for (std::size_t k = 0; k < 30; ++k) {
            const TraceEntry& e = t.entries[k];
            CHECK(rows[k].iter == e.iter);
            CHECK(rows[k].elapsed_s == e.elapsed_s);
            CHECK(rows[k].fit == e.fit);
            CHECK(rows[k].reg == e.reg);
            CHECK(rows[k].objective == e.objective);
            CHECK(std::abs(rows[k].objective - (rows[k].fit + e.reg_sign * e.lambda * rows[k].reg)) <= 1e-12);
        }
    }
}

TEST_SUITE("pgm") {
    TEST_CASE("pixel values") {
        TempDir dir("pgm");
        const std::vector<double> constant(6, 0.3);
        write_abundance_pgm(constant, 3, 2, dir / "c.pgm");
        CHECK(pgm_pixels(dir / "c.pgm") == std::vector<int>(6, 255));

        const std::vector<double> zero(4, 0.0);
        write_abundance_pgm(zero, 2, 2, dir / "z.pgm");
        CHECK(pgm_pixels(dir / "z.pgm") == std::vector<int>(4, 0));

        const std::vector<double> ramp{0.0, 0.5, 1.0, 0.25};
        write_abundance_pgm(ramp, 2, 2, dir / "r.pgm");
        CHECK(pgm_pixels(dir / "r.pgm") == std::vector<int>{0, 128, 255, 64});
    }

    TEST_CASE("shape mismatch") {
        TempDir dir("pgm-bad");
        const std::vector<double> v(5, 1.0);
        CHECK_THROWS_AS(write_abundance_pgm(v, 2, 2, dir / "x.pgm"), Error);
    }
}

TEST_CASE("file hashes") {
    TempDir dir("hash");
    write_text(dir / "a", "");
    CHECK(hex64(fnv1a_file(dir / "a")) == "cbf29ce484222325");
    write_text(dir / "b", "a");
    CHECK(hex64(fnv1a_file(dir / "b")) == "af63dc4c8601ec8c");
}
