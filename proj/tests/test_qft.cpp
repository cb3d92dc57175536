#include <doctest.h>

#include <cmath>
#include <functional>

#include "qprep/qft.hpp"

using namespace qprep;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected a throw");
    return ErrorCode::ParseError;
}

cplx dft_entry(int n, std::size_t row, std::size_t col) {
    const std::size_t dim = std::size_t{1} << n;
    const double ang = 2.0 * M_PI * double((row * col) % dim) / double(dim);
    return std::polar(1.0 / std::sqrt(double(dim)), ang);
}

double max_matrix_diff(const DenseMatrix& a, const DenseMatrix& b) {
    REQUIRE(a.dim == b.dim);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.a.size(); ++i) {
        worst = std::max(worst, std::abs(a.a[i] - b.a[i]));
    }
    return worst;
}

} // namespace

TEST_CASE("qft_node_params closed form") {
    const QftNodeParams a = qft_node_params(1, 0);
    CHECK(a.pos == 0);
    CHECK(a.phi == 0.0);
    CHECK(a.sign == 1);
    CHECK(a.scalar_phase == 0.0);

    const QftNodeParams b = qft_node_params(2, 1);
    CHECK(b.pos == 1);
    CHECK(b.phi == doctest::Approx(M_PI / 2.0));
    CHECK(b.sign == -1);
    CHECK(b.scalar_phase == doctest::Approx(M_PI / 8.0));

    const QftNodeParams c = qft_node_params(3, 5);
    CHECK(c.pos == 5);
    CHECK(c.phi == doctest::Approx(5.0 * M_PI / 4.0));
    CHECK(c.sign == -1);
    CHECK(c.scalar_phase == doctest::Approx(5.0 * M_PI / 16.0));

    // positions repeat with period 2^level
    const QftNodeParams d = qft_node_params(2, 5);
    CHECK(d.pos == b.pos);
    CHECK(d.phi == b.phi);
    CHECK(d.sign == b.sign);

    CHECK(code_of([] { qft_node_params(-1, 0); }) == ErrorCode::IndexOutOfRange);
    CHECK(code_of([] { qft_node_params(64, 0); }) == ErrorCode::IndexOutOfRange);
}

TEST_CASE("qft_params enumerates levels then positions") {
    const auto all = qft_params(3);
    REQUIRE(all.size() == 7);
    std::size_t i = 0;
    for (int l = 0; l < 3; ++l) {
        for (std::uint64_t p = 0; p < (std::uint64_t{1} << l); ++p, ++i) {
            CHECK(all[i].level == l);
            CHECK(all[i].pos == p);
        }
    }
    CHECK(code_of([] { qft_params(0); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("leaf signs alternate") {
    CHECK(qft_leaf_sign(0) == 1);
    CHECK(qft_leaf_sign(1) == -1);
    CHECK(qft_leaf_sign(2) == 1);
    CHECK(qft_leaf_sign(7) == -1);
}

TEST_CASE("qft_node_unitary form") {
    const double h = 1.0 / std::sqrt(2.0);
    const auto u = qft_node_unitary(1, 1); // sign -1, phi = pi
    CHECK(std::abs(u[0] - cplx(-h)) < 1e-15);
    CHECK(std::abs(u[1] - cplx(h)) < 1e-15);
    CHECK(std::abs(u[2] - cplx(0.0, -h)) < 1e-15);
    CHECK(std::abs(u[3] - cplx(0.0, -h)) < 1e-15);

    for (int l = 0; l < 4; ++l) {
        for (std::uint64_t k = 0; k < (std::uint64_t{1} << l); ++k) {
            const auto m = qft_node_unitary(l, k);
            CHECK(std::abs(std::norm(m[0]) + std::norm(m[1]) - 1.0) < 1e-14);
            CHECK(std::abs(m[0] * std::conj(m[2]) + m[1] * std::conj(m[3])) <
                  1e-14);
        }
    }
}

TEST_CASE("qft_circuit census") {
    for (int n = 1; n <= 6; ++n) {
        const Circuit c = qft_circuit(n);
        CHECK(count_kind(c, GateKind::Hadamard) == std::size_t(n));
        std::size_t cp = 0;
        for (const Gate& g : c.gates) {
            if (g.kind == GateKind::PhaseShift) {
                REQUIRE(g.controls.size() == 1);
                CHECK(g.controls[0].polarity == Polarity::Down);
                ++cp;
            }
        }
        CHECK(cp == std::size_t(n) * std::size_t(n - 1) / 2);
        CHECK(count_gates(c).swaps == std::size_t(n / 2));
    }
    CHECK(code_of([] { qft_circuit(0); }) == ErrorCode::DimensionMismatch);
    CHECK(code_of([] { qft_circuit(11); }) == ErrorCode::TooLarge);
}

TEST_CASE("qft_circuit matches the transform matrix") {
    for (int n = 1; n <= 6; ++n) {
        const DenseMatrix u = circuit_unitary(qft_circuit(n));
        double worst = 0.0;
        for (std::size_t r = 0; r < u.dim; ++r) {
            for (std::size_t c = 0; c < u.dim; ++c) {
                worst = std::max(worst, std::abs(u.at(r, c) - dft_entry(n, r, c)));
            }
        }
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("branch operators reproduce transform columns") {
    for (int n = 1; n <= 6; ++n) {
        for (std::uint64_t k = 0; k < (std::uint64_t{1} << n); ++k) {
            const TargetState col = qft_branch_check(n, k);
            double worst = 0.0;
            for (std::size_t r = 0; r < col.dim(); ++r) {
                worst = std::max(worst, std::abs(col[r] - dft_entry(n, r, k)));
            }
            CHECK(worst < 1e-10);
        }
    }
    CHECK(code_of([] { qft_branch_check(0, 0); }) == ErrorCode::IndexOutOfRange);
    CHECK(code_of([] { qft_branch_check(9, 0); }) == ErrorCode::IndexOutOfRange);
    CHECK(code_of([] { qft_branch_check(2, 4); }) == ErrorCode::IndexOutOfRange);
}

TEST_CASE("level operator factors into one phase column") {
    // The 2^l controlled branch unitaries on target l collapse to
    // Ry(pi/2), one controlled PhaseShift per control qubit, and a Z that
    // accounts for the alternating branch sign.
    for (int l = 1; l <= 4; ++l) {
        const int n = l + 1;
        Circuit banked;
        banked.n = n;
        for (std::uint64_t p = 0; p < (std::uint64_t{1} << l); ++p) {
            Gate g = make_unitary(l, qft_node_unitary(l, p));
            for (int c = 0; c < l; ++c) {
                g.controls.push_back(
                    {c, ((p >> c) & 1) ? Polarity::Down : Polarity::Up});
            }
            banked.gates.push_back(std::move(g));
        }

        Circuit column;
        column.n = n;
        column.gates.push_back(make_rot_y(l, M_PI / 2.0));
        for (int c = 0; c < l; ++c) {
            Gate cp = make_phase_shift(
                l, M_PI / double(std::uint64_t{1} << (l - c)));
            cp.controls.push_back({c, Polarity::Down});
            column.gates.push_back(std::move(cp));
        }
        column.gates.push_back(make_pauli_z(0));

        CHECK(max_matrix_diff(circuit_unitary(banked), circuit_unitary(column)) <
              1e-12);
    }
}
