#include "qprep/circuit.hpp"

#include <cmath>
#include <utility>

namespace qprep {

const char* gate_kind_name(GateKind k) {
    switch (k) {
        case GateKind::RotY: return "RotY";
        case GateKind::RotZ: return "RotZ";
        case GateKind::PhaseShift: return "PhaseShift";
        case GateKind::PauliX: return "PauliX";
        case GateKind::PauliZ: return "PauliZ";
        case GateKind::Hadamard: return "Hadamard";
        case GateKind::GlobalPhase: return "GlobalPhase";
        case GateKind::Swap: return "Swap";
        case GateKind::Unitary2x2: return "Unitary2x2";
    }
    return "Unknown";
}

Gate make_rot_y(int target, double angle) {
    Gate g;
    g.kind = GateKind::RotY;
    g.target = target;
    g.param = angle;
    return g;
}

Gate make_rot_z(int target, double angle) {
    Gate g;
    g.kind = GateKind::RotZ;
    g.target = target;
    g.param = angle;
    return g;
}

Gate make_phase_shift(int target, double angle) {
    Gate g;
    g.kind = GateKind::PhaseShift;
    g.target = target;
    g.param = angle;
    return g;
}

Gate make_pauli_x(int target) {
    Gate g;
    g.kind = GateKind::PauliX;
    g.target = target;
    return g;
}

Gate make_pauli_z(int target) {
    Gate g;
    g.kind = GateKind::PauliZ;
    g.target = target;
    return g;
}

Gate make_hadamard(int target) {
    Gate g;
    g.kind = GateKind::Hadamard;
    g.target = target;
    return g;
}

Gate make_swap(int a, int b) {
    Gate g;
    g.kind = GateKind::Swap;
    g.target = a;
    g.target2 = b;
    return g;
}

Gate make_global_phase(double xi) {
    Gate g;
    g.kind = GateKind::GlobalPhase;
    g.param = xi;
    return g;
}

Gate make_unitary(int target, const std::array<cplx, 4>& m) {
    Gate g;
    g.kind = GateKind::Unitary2x2;
    g.target = target;
    g.matrix = m;
    return g;
}

std::array<cplx, 4> gate_matrix(const Gate& g) {
    const cplx i(0.0, 1.0);
    switch (g.kind) {
        case GateKind::RotY: {
            double c = std::cos(g.param / 2.0), s = std::sin(g.param / 2.0);
            return {cplx(c), cplx(-s), cplx(s), cplx(c)};
        }
        case GateKind::RotZ: {
            return {std::exp(-i * (g.param / 2.0)), cplx(0.0), cplx(0.0),
                    std::exp(i * (g.param / 2.0))};
        }
        case GateKind::PhaseShift:
            return {cplx(1.0), cplx(0.0), cplx(0.0), std::exp(i * g.param)};
        case GateKind::PauliX:
            return {cplx(0.0), cplx(1.0), cplx(1.0), cplx(0.0)};
        case GateKind::PauliZ:
            return {cplx(1.0), cplx(0.0), cplx(0.0), cplx(-1.0)};
        case GateKind::Hadamard: {
            double h = 1.0 / std::sqrt(2.0);
            return {cplx(h), cplx(h), cplx(h), cplx(-h)};
        }
        case GateKind::Unitary2x2:
            return g.matrix;
        case GateKind::Swap:
        case GateKind::GlobalPhase:
            break;
    }
    throw Error(ErrorCode::UnloweredGate,
                std::string("no 2x2 matrix for gate kind ") +
                    gate_kind_name(g.kind));
}

namespace {

void check_operand(int q, int n, const char* what) {
    if (q < 0 || q >= n) {
        throw Error(ErrorCode::IndexOutOfRange,
                    std::string(what) + " qubit " + std::to_string(q) +
                        " out of range for n=" + std::to_string(n));
    }
}

bool unitary_2x2(const std::array<cplx, 4>& m, double tol) {
    // rows of U form an orthonormal pair iff U U^dag = I
    cplx r00 = m[0] * std::conj(m[0]) + m[1] * std::conj(m[1]);
    cplx r01 = m[0] * std::conj(m[2]) + m[1] * std::conj(m[3]);
    cplx r11 = m[2] * std::conj(m[2]) + m[3] * std::conj(m[3]);
    return std::abs(r00 - 1.0) <= tol && std::abs(r11 - 1.0) <= tol &&
           std::abs(r01) <= tol;
}

} // namespace

void validate(const Circuit& c) {
    if (c.n < 1) {
        throw Error(ErrorCode::DimensionMismatch, "circuit has no qubits");
    }
    for (const Gate& g : c.gates) {
        if (g.kind == GateKind::GlobalPhase) {
            if (!g.controls.empty()) {
                throw Error(ErrorCode::IndexOutOfRange,
                            "GlobalPhase cannot carry controls");
            }
            continue;
        }
        check_operand(g.target, c.n, "target");
        if (g.kind == GateKind::Swap) {
            check_operand(g.target2, c.n, "swap operand");
            if (g.target2 == g.target) {
                throw Error(ErrorCode::IndexOutOfRange,
                            "swap operands must differ");
            }
        } else if (g.target2 != -1) {
            throw Error(ErrorCode::IndexOutOfRange,
                        "target2 is only valid on Swap");
        }
        std::uint64_t seen = 0;
        for (const Control& ctl : g.controls) {
            check_operand(ctl.qubit, c.n, "control");
            if (ctl.qubit == g.target ||
                (g.kind == GateKind::Swap && ctl.qubit == g.target2)) {
                throw Error(ErrorCode::IndexOutOfRange,
                            "control overlaps gate operand");
            }
            std::uint64_t bit = std::uint64_t{1} << ctl.qubit;
            if (seen & bit) {
                throw Error(ErrorCode::IndexOutOfRange,
                            "duplicate control qubit " +
                                std::to_string(ctl.qubit));
            }
            seen |= bit;
        }
        if (g.kind == GateKind::Unitary2x2 && !unitary_2x2(g.matrix, 1e-10)) {
            throw Error(ErrorCode::NotNormalized,
                        "Unitary2x2 payload is not unitary");
        }
    }
}

namespace {

struct ControlMask {
    std::uint64_t mask = 0;
    std::uint64_t value = 0;
};

ControlMask control_mask(const std::vector<Control>& controls, int n) {
    ControlMask cm;
    for (const Control& ctl : controls) {
        std::uint64_t bit = std::uint64_t{1} << (n - 1 - ctl.qubit);
        cm.mask |= bit;
        if (ctl.polarity == Polarity::Down) cm.value |= bit;
    }
    return cm;
}

} // namespace

void apply_gate(TargetState& s, const Gate& g, int n) {
    const std::size_t dim = std::size_t{1} << n;
    if (s.amps.size() != dim) {
        throw Error(ErrorCode::DimensionMismatch,
                    "state length does not match circuit width");
    }
    if (g.kind == GateKind::GlobalPhase) {
        cplx f = std::exp(cplx(0.0, g.param));
        for (cplx& a : s.amps) a *= f;
        return;
    }
    ControlMask cm = control_mask(g.controls, n);
    if (g.kind == GateKind::Swap) {
        std::uint64_t ma = std::uint64_t{1} << (n - 1 - g.target);
        std::uint64_t mb = std::uint64_t{1} << (n - 1 - g.target2);
        for (std::uint64_t k = 0; k < dim; ++k) {
            if ((k & ma) != 0 || (k & mb) == 0) continue;
            if ((k & cm.mask) != cm.value) continue;
            std::swap(s.amps[k], s.amps[k ^ ma ^ mb]);
        }
        return;
    }
    std::array<cplx, 4> m = gate_matrix(g);
    std::uint64_t tmask = std::uint64_t{1} << (n - 1 - g.target);
    for (std::uint64_t k = 0; k < dim; ++k) {
        if (k & tmask) continue;
        if ((k & cm.mask) != cm.value) continue;
        cplx a0 = s.amps[k];
        cplx a1 = s.amps[k | tmask];
        s.amps[k] = m[0] * a0 + m[1] * a1;
        s.amps[k | tmask] = m[2] * a0 + m[3] * a1;
    }
}

TargetState apply_circuit(const Circuit& c, const TargetState& in) {
    TargetState s = in;
    for (const Gate& g : c.gates) apply_gate(s, g, c.n);
    return s;
}

TargetState run_on_zero(const Circuit& c) {
    TargetState s;
    s.n = c.n;
    s.amps.assign(std::size_t{1} << c.n, cplx(0.0));
    s.amps[0] = 1.0;
    for (const Gate& g : c.gates) apply_gate(s, g, c.n);
    return s;
}

DenseMatrix circuit_unitary(const Circuit& c) {
    if (c.n > 10) {
        throw Error(ErrorCode::TooLarge,
                    "dense unitary is capped at 10 qubits, got " +
                        std::to_string(c.n));
    }
    const std::size_t dim = std::size_t{1} << c.n;
    DenseMatrix u;
    u.dim = dim;
    u.a.assign(dim * dim, cplx(0.0));
    TargetState col;
    col.n = c.n;
    for (std::size_t j = 0; j < dim; ++j) {
        col.amps.assign(dim, cplx(0.0));
        col.amps[j] = 1.0;
        for (const Gate& g : c.gates) apply_gate(col, g, c.n);
        for (std::size_t r = 0; r < dim; ++r) u.at(r, j) = col.amps[r];
    }
    return u;
}

GateCounts count_gates(const Circuit& c) {
    GateCounts gc;
    gc.total = c.gates.size();
    for (const Gate& g : c.gates) {
        if (g.kind == GateKind::GlobalPhase) {
            ++gc.global_phase;
            continue;
        }
        if (g.kind == GateKind::Swap) {
            ++gc.swaps;
        }
        if (g.controls.empty()) {
            if (g.kind != GateKind::Swap) ++gc.single_qubit;
            continue;
        }
        ++gc.controlled_total;
        if (g.controls.size() >= 2) ++gc.multi_controlled;
        if (g.kind == GateKind::PauliX && g.controls.size() == 1 &&
            g.controls[0].polarity == Polarity::Down) {
            ++gc.cnot;
        }
    }
    return gc;
}

std::size_t count_kind(const Circuit& c, GateKind k) {
    std::size_t out = 0;
    for (const Gate& g : c.gates) {
        if (g.kind == k) ++out;
    }
    return out;
}

} // namespace qprep
