#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qprep/common.hpp"
#include "qprep/state.hpp"

namespace qprep {

/// One interior node: the qubit at this node's level is rotated by
/// U = R_z(phi) R_y(theta), i.e. alpha = cos(theta/2)e^{-i phi/2},
/// beta = sin(theta/2)e^{+i phi/2}. theta in [0, pi].
struct PsiNode {
    double theta = 0.0;
    double phi = 0.0;
    bool dead = false;
};

/// Accumulated overlap value chi = magnitude * e^{i phase}.
struct ChiNode {
    double magnitude = 0.0;
    double phase = 0.0;
};

/// Complete binary tree of node parameters in heap layout: node at level j
/// (root = 0), position i sits at index 2^j - 1 + i; 2^n - 1 nodes total.
/// Leaf k of the full tree corresponds to basis index k (qubit 0 = most
/// significant digit, matching TargetState).
struct PsiTree {
    int n = 0;
    double global_phase = 0.0; ///< xi; reconstruction times e^{i xi} = input
    std::vector<PsiNode> nodes;

    static std::size_t heap_index(int level, std::size_t pos) {
        return (std::size_t{1} << level) - 1 + pos;
    }
    std::size_t level_size(int level) const {
        return std::size_t{1} << level;
    }

    PsiNode& node(int level, std::size_t pos);
    const PsiNode& node(int level, std::size_t pos) const;
};

/// All-zero tree for n qubits (represents |0...0>).
PsiTree make_tree(int n);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double x);

/// (alpha, beta) of a node. theta stored as exactly 0 or pi yields exact
/// 0.0/1.0 magnitudes, which keeps dead branches exactly dead.
std::pair<cplx, cplx> node_alpha_beta(const PsiNode& nd);

/// chi accumulation rows: row j holds 2^j values, j = 0..n; row n is the
/// leaf row (the input amplitudes), row 0 the root.
std::vector<std::vector<ChiNode>> build_chi(const TargetState& state,
                                            double eps = kEpsZero);

/// Bottom-up parameter extraction. Throws NotNormalized when the input norm
/// deviates from 1 by more than 1e-8.
PsiTree build_tree(const TargetState& state, double eps = kEpsZero);

/// Path-product reconstruction: gamma_k = prod over the root-to-leaf-k path
/// of (alpha at left steps, beta at right steps). Equals the build input
/// times e^{-i global_phase}.
TargetState tree_to_state(const PsiTree& tree);

struct CanonicalResult {
    PsiTree tree;
    std::uint64_t flip_mask = 0; ///< bit j set = qubit j was relabeled by X
};

/// Relabels qubits via X flips so the maximum-magnitude leaf moves to the
/// leftmost branch, then assigns to every dead node the (theta, phi) of the
/// leftmost live node of its level. Throws NoValidPath when the tree holds
/// no usable full-depth branch (all amplitudes below eps, or non-finite).
CanonicalResult canonicalize(const PsiTree& tree, double eps = kEpsZero);

struct BlochRecord {
    int level = 0;
    std::size_t pos = 0;
    double theta = 0.0;
    double phi = 0.0;
    bool dead = false;
};

/// Per-node Bloch angles in level order (level ascending, position ascending).
std::vector<BlochRecord> dump_bloch(const PsiTree& tree);

/// Magnitude of the branch amplitude feeding each node's subtree, heap
/// layout (root entry = 1). A node whose entry is <= eps carries no weight;
/// canonicalize and the analyzers treat such nodes as dead regardless of
/// their stored flag.
std::vector<double> path_magnitudes(const PsiTree& tree);

} // namespace qprep
