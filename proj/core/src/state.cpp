#include "qprep/state.hpp"

#include <cmath>
#include <random>

namespace qprep {

int qubit_count_for(std::size_t dim) {
    if (dim == 0 || (dim & (dim - 1)) != 0) {
        throw Error(ErrorCode::DimensionMismatch,
                    "statevector length " + std::to_string(dim) +
                        " is not a power of two");
    }
    int n = 0;
    while ((std::size_t{1} << n) < dim) ++n;
    return n;
}

double norm(const TargetState& s) {
    double acc = 0.0;
    for (const cplx& a : s.amps) acc += std::norm(a);
    return std::sqrt(acc);
}

TargetState normalize(const TargetState& s, double eps) {
    double nrm = norm(s);
    if (nrm <= eps) {
        throw Error(ErrorCode::ZeroVector, "cannot normalize a zero vector");
    }
    TargetState out = s;
    for (cplx& a : out.amps) a /= nrm;
    return out;
}

FidelityReport fidelity(const TargetState& a, const TargetState& b) {
    if (a.dim() != b.dim()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "fidelity of vectors with lengths " +
                        std::to_string(a.dim()) + " and " +
                        std::to_string(b.dim()));
    }
    cplx ip = 0.0;
    for (std::size_t k = 0; k < a.dim(); ++k) {
        ip += std::conj(a[k]) * b[k];
    }
    return {ip, std::norm(ip), std::arg(ip)};
}

namespace {

// Box-Muller over explicit uniform draws; std::normal_distribution is not
// pinned by the standard, and round-trip tests freeze exact amplitudes.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = unit();
        double u2 = unit();
        while (u1 <= 1e-300) u1 = unit();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    double unit() {
        return (rng_() >> 11) * 0x1.0p-53; // 53-bit mantissa in [0, 1)
    }

    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace

TargetState random_state(int n, std::uint64_t seed) {
    if (n < 1) {
        throw Error(ErrorCode::DimensionMismatch, "qubit count must be >= 1");
    }
    GaussianStream g(seed);
    TargetState s;
    s.n = n;
    s.amps.resize(std::size_t{1} << n);
    for (cplx& a : s.amps) {
        double re = g.next();
        double im = g.next();
        a = cplx(re, im);
    }
    return normalize(s);
}

} // namespace qprep
