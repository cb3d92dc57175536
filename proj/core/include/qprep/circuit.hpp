#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "qprep/common.hpp"
#include "qprep/state.hpp"

namespace qprep {

/// Control polarity. Up fires when the control qubit is |0>, Down when it
/// is |1> (a plain CNOT control is Down).
enum class Polarity { Up, Down };

struct Control {
    int qubit = 0;
    Polarity polarity = Polarity::Down;

    friend bool operator==(const Control&, const Control&) = default;
};

enum class GateKind {
    RotY,        ///< exp(-i angle Y / 2)
    RotZ,        ///< exp(-i angle Z / 2)
    PhaseShift,  ///< diag(1, e^{i angle})
    PauliX,
    PauliZ,
    Hadamard,
    GlobalPhase, ///< multiplies the state by e^{i angle}; no target, no controls
    Swap,
    Unitary2x2,  ///< explicit 2x2 matrix payload
};

const char* gate_kind_name(GateKind k);

struct Gate {
    GateKind kind = GateKind::PauliX;
    int target = -1;
    int target2 = -1;                 ///< second operand, Swap only
    double param = 0.0;               ///< angle for RotY/RotZ/PhaseShift/GlobalPhase
    std::array<cplx, 4> matrix{};     ///< row-major, Unitary2x2 only
    std::vector<Control> controls;
};

Gate make_rot_y(int target, double angle);
Gate make_rot_z(int target, double angle);
Gate make_phase_shift(int target, double angle);
Gate make_pauli_x(int target);
Gate make_pauli_z(int target);
Gate make_hadamard(int target);
Gate make_swap(int a, int b);
Gate make_global_phase(double xi);
Gate make_unitary(int target, const std::array<cplx, 4>& m);

/// 2x2 matrix of a single-qubit gate (controls ignored). Throws
/// UnloweredGate for Swap and GlobalPhase.
std::array<cplx, 4> gate_matrix(const Gate& g);

/// Gates are listed in temporal order: gates[0] acts first.
struct Circuit {
    int n = 0;
    std::vector<Gate> gates;
};

/// Structural checks: operand ranges, controls disjoint from targets, no
/// duplicate controls, Unitary2x2 payloads unitary to 1e-10, GlobalPhase
/// uncontrolled. Throws Error on the first violation.
void validate(const Circuit& c);

/// Applies one gate in place. The state must have the circuit's qubit count.
void apply_gate(TargetState& s, const Gate& g, int n);

/// Runs the whole circuit on a copy of the input state.
TargetState apply_circuit(const Circuit& c, const TargetState& in);

/// Circuit applied to |0...0>.
TargetState run_on_zero(const Circuit& c);

/// Dense unitary, row-major, dim = 2^n. Guarded: throws TooLarge for n > 10.
struct DenseMatrix {
    std::size_t dim = 0;
    std::vector<cplx> a; // row-major, dim*dim entries

    cplx& at(std::size_t r, std::size_t c) { return a[r * dim + c]; }
    const cplx& at(std::size_t r, std::size_t c) const { return a[r * dim + c]; }
};

DenseMatrix circuit_unitary(const Circuit& c);

struct GateCounts {
    std::size_t total = 0;
    std::size_t single_qubit = 0;     ///< uncontrolled one-qubit gates
    std::size_t cnot = 0;             ///< PauliX with exactly one Down control
    std::size_t controlled_total = 0; ///< gates with >= 1 control
    std::size_t multi_controlled = 0; ///< gates with >= 2 controls
    std::size_t swaps = 0;
    std::size_t global_phase = 0;
};

GateCounts count_gates(const Circuit& c);

std::size_t count_kind(const Circuit& c, GateKind k);

} // namespace qprep
