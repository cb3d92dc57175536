#pragma once

#include <string>

#include "qprep/circuit.hpp"
#include "qprep/state.hpp"
#include "qprep/tree.hpp"

namespace qprep {

/// Statevector text format: line 1 = n, then 2^n lines "re im" with index k
/// ascending (qubit 0 = most significant digit of k). 17 significant digits.
std::string write_state_text(const TargetState& s);

/// Statevector JSON: {"n": int, "amplitudes": [[re, im], ...]}.
std::string write_state_json(const TargetState& s);

/// Accepts either format; JSON is detected by a leading '{'.
TargetState read_state(const std::string& text);

/// Native circuit JSON: {"format_version": 1, "n": int, "gates": [...]}.
/// Each gate: {"kind", "params", "target", "controls": [[q, "up"|"down"]]}.
/// Swap carries an extra "target2"; GlobalPhase omits "target"; Unitary2x2
/// packs its matrix row-major into params as [re, im] x 4.
std::string write_circuit_json(const Circuit& c);

Circuit read_circuit_json(const std::string& text);

/// Tree JSON: {"n": int, "global_phase": float, "nodes": [{"level", "pos",
/// "theta", "phi", "dead"}, ...]} in level order.
std::string write_tree_json(const PsiTree& t);

PsiTree read_tree_json(const std::string& text);

/// Aligned-column rendering of dump_bloch, 12 significant digits.
std::string write_tree_table(const PsiTree& t);

} // namespace qprep
