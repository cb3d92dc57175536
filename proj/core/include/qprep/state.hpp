#pragma once

#include <cstdint>
#include <vector>

#include "qprep/common.hpp"

namespace qprep {

/// An n-qubit statevector. Index k enumerates computational basis states with
/// qubit 0 as the most significant bit, so for n = 2 the order is
/// |00>, |01>, |10>, |11>.
struct TargetState {
    int n = 0;
    std::vector<cplx> amps;

    TargetState() = default;
    TargetState(int n_, std::vector<cplx> a) : n(n_), amps(std::move(a)) {}

    std::size_t dim() const { return amps.size(); }
    const cplx& operator[](std::size_t k) const { return amps[k]; }
    cplx& operator[](std::size_t k) { return amps[k]; }
};

struct FidelityReport {
    cplx overlap;        ///< chi = <a|b>
    double fidelity;     ///< |chi|^2
    double global_phase; ///< arg(chi)
};

/// Number of qubits for a vector of length 2^n. Throws DimensionMismatch if
/// the length is not a power of two (or is zero).
int qubit_count_for(std::size_t dim);

double norm(const TargetState& s);

/// Scales to unit norm. Throws ZeroVector when the norm is at or below eps.
TargetState normalize(const TargetState& s, double eps = kEpsZero);

/// overlap = sum_k conj(a_k) b_k on the states as given (callers normalize).
FidelityReport fidelity(const TargetState& a, const TargetState& b);

/// Haar-ish random state: i.i.d. complex Gaussian entries, then normalized.
/// Fully deterministic for a given (n, seed) across platforms: uses an
/// explicit mt19937_64 stream with a hand-rolled Box-Muller transform rather
/// than std::normal_distribution (whose output is implementation defined).
TargetState random_state(int n, std::uint64_t seed);

} // namespace qprep
