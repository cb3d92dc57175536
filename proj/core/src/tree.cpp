#include "qprep/tree.hpp"

#include <algorithm>
#include <cmath>

namespace qprep {

namespace {

void check_node_index(const PsiTree& t, int level, std::size_t pos) {
    if (level < 0 || level >= t.n || pos >= (std::size_t{1} << level)) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "no node at level " + std::to_string(level) + ", position " +
                        std::to_string(pos));
    }
}

} // namespace

double wrap_angle(double x) {
    double w = std::remainder(x, 2.0 * M_PI);
    if (w <= -M_PI) w += 2.0 * M_PI;
    return w;
}

PsiNode& PsiTree::node(int level, std::size_t pos) {
    check_node_index(*this, level, pos);
    return nodes[heap_index(level, pos)];
}

const PsiNode& PsiTree::node(int level, std::size_t pos) const {
    check_node_index(*this, level, pos);
    return nodes[heap_index(level, pos)];
}

PsiTree make_tree(int n) {
    if (n < 1) {
        throw Error(ErrorCode::DimensionMismatch, "qubit count must be >= 1");
    }
    PsiTree t;
    t.n = n;
    t.nodes.assign((std::size_t{1} << n) - 1, PsiNode{});
    return t;
}

std::pair<cplx, cplx> node_alpha_beta(const PsiNode& nd) {
    const cplx i(0.0, 1.0);
    if (nd.theta == 0.0) {
        return {std::exp(-i * (nd.phi / 2.0)), cplx(0.0)};
    }
    if (nd.theta == M_PI) {
        return {cplx(0.0), std::exp(i * (nd.phi / 2.0))};
    }
    double c = std::cos(nd.theta / 2.0), s = std::sin(nd.theta / 2.0);
    return {c * std::exp(-i * (nd.phi / 2.0)), s * std::exp(i * (nd.phi / 2.0))};
}

std::vector<std::vector<ChiNode>> build_chi(const TargetState& state,
                                            double eps) {
    const int n = qubit_count_for(state.dim());
    std::vector<std::vector<ChiNode>> rows(n + 1);
    rows[n].resize(state.dim());
    for (std::size_t k = 0; k < state.dim(); ++k) {
        double mag = std::abs(state[k]);
        rows[n][k] = {mag, mag <= eps ? 0.0 : std::arg(state[k])};
    }
    for (int j = n - 1; j >= 0; --j) {
        rows[j].resize(std::size_t{1} << j);
        for (std::size_t i = 0; i < rows[j].size(); ++i) {
            const ChiNode& l = rows[j + 1][2 * i];
            const ChiNode& r = rows[j + 1][2 * i + 1];
            double mag = std::hypot(l.magnitude, r.magnitude);
            if (l.magnitude <= eps && r.magnitude <= eps) {
                rows[j][i] = {0.0, 0.0};
                continue;
            }
            double xl = l.magnitude <= eps ? 0.0 : l.phase;
            double xr = r.magnitude <= eps ? 0.0 : r.phase;
            // phi is wrapped into (-pi, pi]; the half-turn that wrapping
            // removes is pushed into this node's own phase so that
            // chi * alpha == chi_left and chi * beta == chi_right stay exact.
            double phi = wrap_angle(xr - xl);
            double m = std::round((xr - xl - phi) / (2.0 * M_PI));
            rows[j][i] = {mag, (xl + xr) / 2.0 - M_PI * m};
        }
    }
    return rows;
}

PsiTree build_tree(const TargetState& state, double eps) {
    const int n = qubit_count_for(state.dim());
    double nrm = norm(state);
    if (std::abs(nrm - 1.0) > 1e-8) {
        throw Error(ErrorCode::NotNormalized,
                    "input norm " + std::to_string(nrm) + " is not 1");
    }
    std::vector<std::vector<ChiNode>> chi = build_chi(state, eps);
    PsiTree t = make_tree(n);
    for (int j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < t.level_size(j); ++i) {
            const ChiNode& l = chi[j + 1][2 * i];
            const ChiNode& r = chi[j + 1][2 * i + 1];
            PsiNode& nd = t.nodes[PsiTree::heap_index(j, i)];
            if (l.magnitude <= eps && r.magnitude <= eps) {
                nd = {0.0, 0.0, true};
                continue;
            }
            if (r.magnitude <= eps) {
                nd.theta = 0.0;
            } else if (l.magnitude <= eps) {
                nd.theta = M_PI;
            } else {
                nd.theta = 2.0 * std::atan2(r.magnitude, l.magnitude);
            }
            double xl = l.magnitude <= eps ? 0.0 : l.phase;
            double xr = r.magnitude <= eps ? 0.0 : r.phase;
            nd.phi = wrap_angle(xr - xl);
            nd.dead = false;
        }
    }
    t.global_phase = chi[0][0].phase;
    return t;
}

TargetState tree_to_state(const PsiTree& tree) {
    std::vector<cplx> row{cplx(1.0)};
    for (int j = 0; j < tree.n; ++j) {
        std::vector<cplx> next(row.size() * 2);
        for (std::size_t i = 0; i < row.size(); ++i) {
            auto [a, b] = node_alpha_beta(tree.nodes[PsiTree::heap_index(j, i)]);
            next[2 * i] = row[i] * a;
            next[2 * i + 1] = row[i] * b;
        }
        row = std::move(next);
    }
    return TargetState(tree.n, std::move(row));
}

std::vector<double> path_magnitudes(const PsiTree& tree) {
    std::vector<double> mags(tree.nodes.size(), 0.0);
    mags[0] = 1.0;
    for (int j = 0; j + 1 < tree.n; ++j) {
        for (std::size_t i = 0; i < tree.level_size(j); ++i) {
            std::size_t idx = PsiTree::heap_index(j, i);
            auto [a, b] = node_alpha_beta(tree.nodes[idx]);
            mags[PsiTree::heap_index(j + 1, 2 * i)] = mags[idx] * std::abs(a);
            mags[PsiTree::heap_index(j + 1, 2 * i + 1)] = mags[idx] * std::abs(b);
        }
    }
    return mags;
}

CanonicalResult canonicalize(const PsiTree& tree, double eps) {
    TargetState gamma = tree_to_state(tree);
    std::size_t best = gamma.dim();
    double best_mag = eps;
    for (std::size_t k = 0; k < gamma.dim(); ++k) {
        double m = std::abs(gamma[k]);
        if (std::isfinite(m) && m > best_mag) {
            best = k;
            best_mag = m;
        }
    }
    if (best == gamma.dim()) {
        throw Error(ErrorCode::NoValidPath,
                    "tree has no full-depth branch above the zero threshold");
    }

    CanonicalResult res;
    res.tree = tree;
    for (int j = 0; j < tree.n; ++j) {
        if (bit_of(best, j, tree.n)) res.flip_mask |= std::uint64_t{1} << j;
    }

    // Relabel qubit j by X for each set bit: every level-j node swaps its
    // children, (theta, phi) -> (pi - theta, -phi), and deeper levels permute
    // so each node keeps its subtree.
    for (int d = 0; d < tree.n; ++d) {
        std::size_t perm = 0;
        for (int j = 0; j < d; ++j) {
            if (res.flip_mask & (std::uint64_t{1} << j)) {
                perm |= std::size_t{1} << (d - 1 - j);
            }
        }
        bool flip_here = (res.flip_mask >> d) & 1;
        for (std::size_t p = 0; p < tree.level_size(d); ++p) {
            PsiNode nd = tree.nodes[PsiTree::heap_index(d, p ^ perm)];
            if (flip_here) {
                nd.theta = M_PI - nd.theta;
                nd.phi = -nd.phi;
            }
            res.tree.nodes[PsiTree::heap_index(d, p)] = nd;
        }
    }

    // Dead assignment: recompute which nodes carry weight, then give every
    // weightless node the unitary of the leftmost live node of its level.
    std::vector<double> mags = path_magnitudes(res.tree);
    for (int j = 0; j < tree.n; ++j) {
        std::size_t ref = tree.level_size(j);
        for (std::size_t i = 0; i < tree.level_size(j); ++i) {
            if (mags[PsiTree::heap_index(j, i)] > eps) {
                ref = i;
                break;
            }
        }
        if (ref == tree.level_size(j)) {
            throw Error(ErrorCode::NoValidPath,
                        "level " + std::to_string(j) + " has no live node");
        }
        const PsiNode& src = res.tree.nodes[PsiTree::heap_index(j, ref)];
        for (std::size_t i = 0; i < tree.level_size(j); ++i) {
            PsiNode& nd = res.tree.nodes[PsiTree::heap_index(j, i)];
            if (mags[PsiTree::heap_index(j, i)] <= eps) {
                nd.theta = src.theta;
                nd.phi = src.phi;
                nd.dead = true;
            } else {
                nd.dead = false;
            }
        }
    }
    return res;
}

std::vector<BlochRecord> dump_bloch(const PsiTree& tree) {
    std::vector<BlochRecord> out;
    out.reserve(tree.nodes.size());
    for (int j = 0; j < tree.n; ++j) {
        for (std::size_t i = 0; i < tree.level_size(j); ++i) {
            const PsiNode& nd = tree.nodes[PsiTree::heap_index(j, i)];
            out.push_back({j, i, nd.theta, nd.phi, nd.dead});
        }
    }
    return out;
}

} // namespace qprep
