#pragma once

#include <string>

#include "qprep/circuit.hpp"

namespace qprep {

/// Serializes to OPENQASM 2.0 over the qelib1 subset
/// {h, x, z, ry, rz, u1, cx, cu1, swap}. The global phase is kept as a
/// comment since QASM 2.0 has no gphase statement. Gates outside the subset
/// (Unitary2x2, Up-polarity or multiple controls, controlled swaps) raise
/// UnloweredGate; lower the circuit first or use the native JSON format.
std::string export_qasm(const Circuit& c);

/// Parses the subset emitted by export_qasm, one statement per line,
/// including the global-phase comment. Raises ParseError on anything else.
Circuit import_qasm(const std::string& text);

} // namespace qprep
