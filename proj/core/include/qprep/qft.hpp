#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qprep/circuit.hpp"
#include "qprep/state.hpp"

namespace qprep {

/// Closed-form branch parameters of the Fourier transform's state tree at
/// (level, position). Positions are periodic: (l, k) == (l, k mod 2^l).
struct QftNodeParams {
    int level = 0;
    std::uint64_t pos = 0;     ///< k mod 2^level
    double phi = 0.0;          ///< 2 pi pos / 2^level
    int sign = 1;              ///< (-1)^pos
    double scalar_phase = 0.0; ///< phi / 4
};

QftNodeParams qft_node_params(int level, std::uint64_t k);

/// All distinct entries for n qubits: levels 0..n-1, positions 0..2^l-1.
std::vector<QftNodeParams> qft_params(int n);

/// Leaf-row scalar (-1)^k.
int qft_leaf_sign(std::uint64_t k);

/// The branch unitary sign * PhaseShift(phi/2) R_y(pi/2), row-major.
std::array<cplx, 4> qft_node_unitary(int level, std::uint64_t k);

/// Exact Fourier circuit: per qubit l a Hadamard then the descending
/// controlled PhaseShift(pi/2^(m-l)) column, then the reversal swaps.
/// Throws TooLarge for n > 10.
Circuit qft_circuit(int n);

/// Builds the single branch operator selected by index k from the node
/// parameters, applies it to the digit-reversed basis state, and returns
/// the result, which must reproduce column k of the DFT matrix. Guarded to
/// n <= 8.
TargetState qft_branch_check(int n, std::uint64_t k);

} // namespace qprep
