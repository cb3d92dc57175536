#include "qprep/qft.hpp"

#include <bit>
#include <cmath>

namespace qprep {

QftNodeParams qft_node_params(int level, std::uint64_t k) {
    if (level < 0 || level >= 64) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "no level " + std::to_string(level));
    }
    const std::uint64_t m = std::uint64_t{1} << level;
    QftNodeParams p;
    p.level = level;
    p.pos = k % m;
    p.phi = 2.0 * M_PI * double(p.pos) / double(m);
    p.sign = (p.pos & 1) ? -1 : 1;
    p.scalar_phase = p.phi / 4.0;
    return p;
}

std::vector<QftNodeParams> qft_params(int n) {
    if (n < 1) {
        throw Error(ErrorCode::DimensionMismatch, "qubit count must be >= 1");
    }
    std::vector<QftNodeParams> all;
    all.reserve((std::size_t{1} << n) - 1);
    for (int l = 0; l < n; ++l) {
        for (std::uint64_t k = 0; k < (std::uint64_t{1} << l); ++k) {
            all.push_back(qft_node_params(l, k));
        }
    }
    return all;
}

int qft_leaf_sign(std::uint64_t k) { return (k & 1) ? -1 : 1; }

std::array<cplx, 4> qft_node_unitary(int level, std::uint64_t k) {
    const QftNodeParams p = qft_node_params(level, k);
    const double r = double(p.sign) / std::sqrt(2.0);
    const cplx e = std::polar(r, p.phi / 2.0);
    return {cplx(r), cplx(-r), e, e};
}

Circuit qft_circuit(int n) {
    if (n < 1) {
        throw Error(ErrorCode::DimensionMismatch, "qubit count must be >= 1");
    }
    if (n > 10) {
        throw Error(ErrorCode::TooLarge, "qft_circuit supports n <= 10");
    }
    Circuit c;
    c.n = n;
    for (int l = 0; l < n; ++l) {
        c.gates.push_back(make_hadamard(l));
        for (int m = l + 1; m < n; ++m) {
            Gate g = make_phase_shift(l, M_PI / double(std::uint64_t{1} << (m - l)));
            g.controls.push_back({m, Polarity::Down});
            c.gates.push_back(std::move(g));
        }
    }
    for (int i = 0; i < n / 2; ++i) {
        c.gates.push_back(make_swap(i, n - 1 - i));
    }
    return c;
}

TargetState qft_branch_check(int n, std::uint64_t k) {
    if (n < 1 || n > 8) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "qft_branch_check supports 1 <= n <= 8");
    }
    if (k >= (std::uint64_t{1} << n)) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "index " + std::to_string(k) + " out of range");
    }
    std::uint64_t rev = 0;
    for (int b = 0; b < n; ++b) {
        if ((k >> b) & 1) rev |= std::uint64_t{1} << (n - 1 - b);
    }
    TargetState s(n, std::vector<cplx>(std::size_t{1} << n, 0.0));
    const int exponent = (n - 1) * int(k & 1) + std::popcount(k);
    s.amps[rev] = (exponent & 1) ? -1.0 : 1.0;
    for (int l = n - 1; l >= 0; --l) {
        Gate g = make_unitary(l, qft_node_unitary(l, k));
        for (int c = 0; c < l; ++c) {
            g.controls.push_back(
                {c, ((k >> c) & 1) ? Polarity::Down : Polarity::Up});
        }
        apply_gate(s, g, n);
    }
    return s;
}

} // namespace qprep
