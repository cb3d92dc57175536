#pragma once

#include <cstddef>
#include <optional>
#include <utility>

#include "qprep/circuit.hpp"
#include "qprep/tree.hpp"

namespace qprep {

struct SeparabilityVerdict {
    bool separable = true;
    /// (level, position) of the first offending node, scanning levels
    /// top-down and positions left to right. Present iff not separable.
    std::optional<std::pair<int, std::size_t>> first_violation;
};

/// Product-state test on the canonicalized tree: within each level, every
/// node on a live path must carry the same single-qubit unitary as the
/// leftmost node (compared as matrices, up to overall sign, so angle
/// wrap-around cannot produce false negatives).
SeparabilityVerdict is_separable(const PsiTree& tree, double eps = kEpsAngle);

struct SubtreeOptions {
    /// Represent the |0>-branch context with explicit X conjugation pairs
    /// instead of Up-polarity controls.
    bool literal_x = false;
};

/// Subtree-recursion backend. Temporal order: one uncontrolled unitary per
/// qubit (n-1 down to 0), then the entangling corrections, then the global
/// phase. Controlled gates whose payload is the identity, or whose firing
/// subspace carries no amplitude, are omitted; on a separable tree the
/// result is exactly n uncontrolled unitaries plus the phase.
Circuit synth_subtree(const PsiTree& tree, const SubtreeOptions& opts = {});

struct PyramidalOptions {
    /// Emit raw per-node angles, drop zero rotations, and peephole-cancel
    /// adjacent CNOT pairs instead of emitting the fixed-shape ladder.
    bool sparse = false;
};

/// Fully lowered backend: per level, a uniformly controlled RotY block then
/// a RotZ block, each a CNOT ladder whose rotation angles are the
/// Walsh-style +-average transform of the level's theta (resp. phi) array.
/// Adjacent blocks share a boundary CNOT that is cancelled, leaving
/// 2(2^l - 1) CNOTs at level l. Ends with the global phase.
Circuit synth_pyramidal(const PsiTree& tree, const PyramidalOptions& opts = {});

/// One level's y/z ladders as standalone closed blocks (no boundary
/// cancellation), mainly for equivalence and commutation checks.
struct LevelBlocks {
    Circuit y_block;
    Circuit z_block;
};

LevelBlocks pyramidal_level_blocks(const PsiTree& tree, int level,
                                   bool sparse = false);

/// Unfactored level operator: 2^level multi-controlled single-qubit
/// unitaries on target `level`, positions ascending, control polarities
/// spelling the position index. Equals the factored level as a matrix.
Circuit level_operator(const PsiTree& tree, int level);

} // namespace qprep
