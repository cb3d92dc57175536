#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "qprep/circuit.hpp"
#include "qprep/state.hpp"
#include "qprep/tree.hpp"

namespace qprep {

struct NodeRef {
    int level = 0;
    std::size_t pos = 0;
};

/// The parameter subtree hanging off `node`, re-rooted as a standalone tree
/// on the remaining qubits (global phase zeroed). Purely structural; the
/// slice is taken whether or not the branch carries amplitude.
PsiTree extract_subtree(const PsiTree& tree, NodeRef node);

/// kappa = <Psi_a|Psi_b> of the two normalized branch states. Throws
/// LevelMismatch when the nodes sit at different levels and DeadSubtree
/// when either branch carries no amplitude.
cplx subtree_overlap(const PsiTree& tree, NodeRef a, NodeRef b);

struct PruneAnalysis {
    cplx kappa;  ///< child-branch overlap at the divergence node
    cplx alpha;  ///< divergence node amplitudes
    cplx beta;
    double lambda_plus = 1.0;  ///< kept Schmidt weight; fidelity = lambda_plus^2
    double lambda_minus = 0.0;
};

/// Cuts the divergence below `divergence`: the node's qubit is rotated onto
/// the dominant Schmidt vector of its one-qubit reduced state and the
/// discarded branch is flagged dead (its slots mirror the kept branch).
/// Throws ToleranceExceeded when 1 - |kappa| > tolerance, before touching
/// the tree.
std::pair<PsiTree, PruneAnalysis> prune(const PsiTree& tree, NodeRef divergence,
                                        double tolerance);

/// Pair form: the two subtrees must be siblings (positions differing in the
/// last branch only), otherwise NotAdjacent; rearrange first.
std::pair<PsiTree, PruneAnalysis> prune_pair(const PsiTree& tree, int level,
                                             std::size_t pos_a,
                                             std::size_t pos_b,
                                             double tolerance);

/// Swaps the two branches below `node` (negating the node's Bloch vector)
/// and returns the one-gate circuit, a branch-selected PauliX, that maps
/// the new tree's state back onto the old one.
std::pair<PsiTree, Circuit> rearrange_branches(const PsiTree& tree,
                                               NodeRef node);

/// One qubit's basis rotation, three angles per qubit.
struct QubitBasis {
    double theta = 0.0;
    double phi = 0.0;
    double chi = 0.0;
};

struct LocalBasisTransform {
    std::vector<QubitBasis> angles; ///< qubit 0 first
};

/// W(theta, phi, chi) = [[alpha, -conj(beta)], [beta, conj(alpha)]] with
/// alpha = cos(theta/2) e^{i(phi-chi)/2}, beta = sin(theta/2) e^{i(phi+chi)/2}.
std::array<cplx, 4> basis_matrix(const QubitBasis& b);

/// Applies W_j to every qubit (resp. the adjoints, undoing it).
TargetState apply_transform(const TargetState& state,
                            const LocalBasisTransform& t);
TargetState apply_inverse_transform(const TargetState& state,
                                    const LocalBasisTransform& t);

struct Schmidt2qResult {
    double theta = 0.0;               ///< 2 atan2(minor, major)
    LocalBasisTransform transform;    ///< maps the state to Schmidt form
    Circuit circuit;                  ///< RotY(theta) then CNOT, on |00>
    double global_phase = 0.0;
    /// theta's ratio convention: minor singular value over major (always
    /// true here; recorded so downstream consumers need not guess).
    bool ratio_minus_over_plus = true;
};

/// Exact two-qubit Schmidt decomposition via SVD of the 2x2 coefficient
/// matrix. transform + circuit + global_phase reconstruct the input.
Schmidt2qResult schmidt_2q(const TargetState& state);

/// Multilinear conditions for the generalized Schmidt form: equation k
/// collects the coefficients of the transformed single-excitation
/// amplitude at index 2^k.
struct MultilinearSystem {
    int m = 0;
    std::vector<std::vector<cplx>> equations; ///< equations[k][mu] = amps[2^k ^ mu]
};

MultilinearSystem build_multilinear_system(const TargetState& state);

/// The m transformed single-excitation amplitudes under t, evaluated from
/// the system's coefficients (identical to transforming the full state and
/// reading the m entries, but factored per qubit).
std::vector<cplx> evaluate_multilinear(const MultilinearSystem& sys,
                                       const LocalBasisTransform& t);

struct GeneralizedSchmidtResult {
    LocalBasisTransform transform;
    TargetState transformed;   ///< transform applied, then e^{i global_phase}
    double residual = 0.0;     ///< sqrt(sum of squared flip amplitudes)
    double global_phase = 0.0;
    int start_index = 0;       ///< which deterministic start converged
    std::vector<std::string> warnings;
};

/// Two-stage solve: minimize the single-excitation amplitudes over
/// (theta, phi) from a fixed ladder of starts, then fix (chi, global) by a
/// least-squares phase alignment that makes the surviving anchor and
/// partner amplitudes real non-negative. Degenerate partner amplitudes
/// below eps_zero are dropped with a PhaseFixDegenerate warning (the
/// all-ones amplitude then pins the remaining freedom). Throws
/// ConvergenceFailure when no start reaches residual_tol. Supports m in
/// [2, 6].
GeneralizedSchmidtResult solve_generalized_schmidt(const TargetState& state,
                                                   double residual_tol);

} // namespace qprep
