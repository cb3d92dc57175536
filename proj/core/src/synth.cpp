#include "qprep/synth.hpp"

#include <cmath>
#include <vector>

namespace qprep {

namespace {

std::array<cplx, 4> node_unitary(const PsiNode& nd) {
    auto [a, b] = node_alpha_beta(nd);
    return {a, -std::conj(b), b, std::conj(a)};
}

// U_a adj(U_b) in closed form, as R_z(phi_a) R_y(theta_a - theta_b)
// R_z(-phi_b). Equal-angle pairs collapse to the exact identity, which the
// skip test below relies on.
std::array<cplx, 4> pair_unitary(const PsiNode& a, const PsiNode& b) {
    const double half_t = 0.5 * (a.theta - b.theta);
    const double half_diff = 0.5 * (a.phi - b.phi);
    const double half_sum = 0.5 * (a.phi + b.phi);
    const double c = std::cos(half_t), s = std::sin(half_t);
    return {c * std::polar(1.0, -half_diff), -s * std::polar(1.0, -half_sum),
            s * std::polar(1.0, half_sum), c * std::polar(1.0, half_diff)};
}

bool near_identity(const std::array<cplx, 4>& m, double tol) {
    return std::abs(m[0] - 1.0) <= tol && std::abs(m[1]) <= tol &&
           std::abs(m[2]) <= tol && std::abs(m[3] - 1.0) <= tol;
}

struct SubtreeEmitter {
    const PsiTree& t;
    const std::vector<double>& mags;
    bool literal_x;

    bool branch_dead(int level, std::size_t pos) const {
        return mags[PsiTree::heap_index(level, pos)] <= kEpsZero;
    }

    // Entangling corrections below node (level, pos), with `ctx` the control
    // word selecting that node's branch. Temporal order: the correction
    // chain for this node, then the left child's block, then the right's.
    //
    // Skipping is restricted to cases that cannot break the telescoping
    // cancellation of intermediate factors: an (exactly or nearly) identity
    // payload, or a firing subspace with no amplitude. A single dead node
    // inside a live branch must keep its chain gate, since later corrections
    // cancel against it.
    void gamma(int level, std::size_t pos, std::vector<Control>& ctx,
               std::vector<Gate>& out) const {
        if (level + 1 >= t.n) return;
        const bool right_live = !branch_dead(level + 1, 2 * pos + 1);
        if (right_live) {
            for (int k = level + 1; k < t.n; ++k) {
                const std::size_t stride = std::size_t{1} << (k - level);
                const PsiNode& b = t.node(k, pos * stride);
                const PsiNode& a = t.node(k, pos * stride + stride / 2);
                auto m = pair_unitary(a, b);
                if (near_identity(m, kEpsZero)) continue;
                Gate g = make_unitary(k, m);
                g.controls = ctx;
                g.controls.push_back({level, Polarity::Down});
                out.push_back(std::move(g));
            }
        }
        if (!branch_dead(level + 1, 2 * pos)) {
            if (literal_x) {
                std::vector<Gate> inner;
                ctx.push_back({level, Polarity::Down});
                gamma(level + 1, 2 * pos, ctx, inner);
                ctx.pop_back();
                if (!inner.empty()) {
                    Gate x = make_pauli_x(level);
                    x.controls = ctx;
                    out.push_back(x);
                    out.insert(out.end(), inner.begin(), inner.end());
                    out.push_back(std::move(x));
                }
            } else {
                ctx.push_back({level, Polarity::Up});
                gamma(level + 1, 2 * pos, ctx, out);
                ctx.pop_back();
            }
        }
        if (right_live) {
            ctx.push_back({level, Polarity::Down});
            gamma(level + 1, 2 * pos + 1, ctx, out);
            ctx.pop_back();
        }
    }
};

// Per-level angle arrays. Outside sparse mode, slots on amplitude-free
// paths take the leftmost live node's angles so uniformly controlled blocks
// stay uniform; a normalized tree always has a live node per level.
void level_angles(const PsiTree& t, int level, const std::vector<double>& mags,
                  bool raw, std::vector<double>& th, std::vector<double>& ph) {
    const std::size_t m = t.level_size(level);
    th.resize(m);
    ph.resize(m);
    std::size_t ref = m;
    for (std::size_t i = 0; i < m && ref == m; ++i) {
        if (mags[PsiTree::heap_index(level, i)] > kEpsZero) ref = i;
    }
    for (std::size_t i = 0; i < m; ++i) {
        const bool dead = mags[PsiTree::heap_index(level, i)] <= kEpsZero;
        const PsiNode& nd = t.node(level, (dead && !raw && ref < m) ? ref : i);
        th[i] = nd.theta;
        ph[i] = nd.phi;
    }
}

// In-place +-butterfly: out[s] = sum_p (-1)^{popcount(s & p)} in[p].
void walsh(std::vector<double>& a) {
    for (std::size_t h = 1; h < a.size(); h <<= 1) {
        for (std::size_t i = 0; i < a.size(); i += h << 1) {
            for (std::size_t j = i; j < i + h; ++j) {
                const double x = a[j], y = a[j + h];
                a[j] = x + y;
                a[j + h] = x - y;
            }
        }
    }
}

std::size_t gray(std::size_t s) { return s ^ (s >> 1); }

int ladder_control(int level, std::size_t step) {
    int b = 0;
    while (!((step >> b) & 1)) ++b; // step > 0
    return level - 1 - b;
}

// Closed CNOT ladder computing a uniformly controlled rotation on `target`
// from its Gray-ordered angle sequence. In sparse mode zero angles are
// dropped; when every s >= 1 coefficient vanishes the block degenerates to
// a single uncontrolled rotation (or nothing).
void emit_ladder(std::vector<Gate>& out, int level,
                 const std::vector<double>& angles, bool z_mirror, bool sparse,
                 Gate (*rot)(int, double)) {
    const std::size_t m = angles.size();
    if (level == 0) {
        if (!sparse || std::abs(angles[0]) > kEpsZero) {
            out.push_back(rot(0, angles[0]));
        }
        return;
    }
    if (sparse) {
        bool uniform = true;
        for (std::size_t s = 1; s < m && uniform; ++s) {
            uniform = std::abs(angles[s]) <= kEpsZero;
        }
        if (uniform) {
            if (std::abs(angles[0]) > kEpsZero) out.push_back(rot(level, angles[0]));
            return;
        }
    }
    auto cnot = [level](int ctrl) {
        Gate g = make_pauli_x(level);
        g.controls.push_back({ctrl, Polarity::Down});
        return g;
    };
    if (!z_mirror) {
        for (std::size_t s = 0; s < m; ++s) {
            if (!sparse || std::abs(angles[s]) > kEpsZero) {
                out.push_back(rot(level, angles[s]));
            }
            out.push_back(cnot(s + 1 < m ? ladder_control(level, s + 1) : 0));
        }
    } else {
        out.push_back(cnot(0));
        for (std::size_t s = m; s-- > 0;) {
            if (!sparse || std::abs(angles[s]) > kEpsZero) {
                out.push_back(rot(level, angles[s]));
            }
            if (s > 0) out.push_back(cnot(ladder_control(level, s)));
        }
    }
}

LevelBlocks make_level_blocks(const PsiTree& tree, int level,
                              const std::vector<double>& mags, bool sparse) {
    std::vector<double> th, ph;
    level_angles(tree, level, mags, sparse, th, ph);
    const std::size_t m = th.size();
    walsh(th);
    walsh(ph);
    std::vector<double> ay(m), az(m);
    for (std::size_t s = 0; s < m; ++s) {
        ay[s] = th[gray(s)] / double(m);
        az[s] = ph[gray(s)] / double(m);
    }
    LevelBlocks lb;
    lb.y_block.n = lb.z_block.n = tree.n;
    emit_ladder(lb.y_block.gates, level, ay, false, sparse, &make_rot_y);
    emit_ladder(lb.z_block.gates, level, az, true, sparse, &make_rot_z);
    return lb;
}

bool is_plain_cnot(const Gate& g) {
    return g.kind == GateKind::PauliX && g.controls.size() == 1 &&
           g.controls[0].polarity == Polarity::Down;
}

void cancel_adjacent_cnots(std::vector<Gate>& gs) {
    std::vector<Gate> out;
    for (auto& g : gs) {
        if (!out.empty() && is_plain_cnot(g) && is_plain_cnot(out.back()) &&
            out.back().target == g.target &&
            out.back().controls[0].qubit == g.controls[0].qubit) {
            out.pop_back();
        } else {
            out.push_back(std::move(g));
        }
    }
    gs = std::move(out);
}

} // namespace

SeparabilityVerdict is_separable(const PsiTree& tree, double eps) {
    const CanonicalResult canon = canonicalize(tree);
    const PsiTree& t = canon.tree;
    const auto mags = path_magnitudes(t);
    SeparabilityVerdict v;
    for (int j = 0; j < t.n; ++j) {
        const auto ref = node_unitary(t.node(j, 0));
        for (std::size_t i = 1; i < t.level_size(j); ++i) {
            if (mags[PsiTree::heap_index(j, i)] <= kEpsZero) continue;
            const auto u = node_unitary(t.node(j, i));
            double dm = 0.0, dp = 0.0;
            for (int e = 0; e < 4; ++e) {
                dm += std::norm(u[e] - ref[e]);
                dp += std::norm(u[e] + ref[e]);
            }
            if (std::sqrt(std::min(dm, dp)) > eps) {
                v.separable = false;
                v.first_violation = {j, i};
                return v;
            }
        }
    }
    return v;
}

Circuit synth_subtree(const PsiTree& tree, const SubtreeOptions& opts) {
    Circuit c;
    c.n = tree.n;
    for (int k = tree.n - 1; k >= 0; --k) {
        c.gates.push_back(make_unitary(k, node_unitary(tree.node(k, 0))));
    }
    const auto mags = path_magnitudes(tree);
    SubtreeEmitter em{tree, mags, opts.literal_x};
    std::vector<Control> ctx;
    em.gamma(0, 0, ctx, c.gates);
    c.gates.push_back(make_global_phase(tree.global_phase));
    return c;
}

LevelBlocks pyramidal_level_blocks(const PsiTree& tree, int level,
                                   bool sparse) {
    if (level < 0 || level >= tree.n) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "no level " + std::to_string(level));
    }
    return make_level_blocks(tree, level, path_magnitudes(tree), sparse);
}

Circuit synth_pyramidal(const PsiTree& tree, const PyramidalOptions& opts) {
    Circuit c;
    c.n = tree.n;
    const auto mags = path_magnitudes(tree);
    for (int l = 0; l < tree.n; ++l) {
        LevelBlocks lb = make_level_blocks(tree, l, mags, opts.sparse);
        auto& yg = lb.y_block.gates;
        auto& zg = lb.z_block.gates;
        // y ends and z starts with the same control-0 CNOT; drop the pair
        if (!yg.empty() && !zg.empty() && is_plain_cnot(yg.back()) &&
            is_plain_cnot(zg.front())) {
            yg.pop_back();
            zg.erase(zg.begin());
        }
        c.gates.insert(c.gates.end(), yg.begin(), yg.end());
        c.gates.insert(c.gates.end(), zg.begin(), zg.end());
    }
    if (opts.sparse) cancel_adjacent_cnots(c.gates);
    c.gates.push_back(make_global_phase(tree.global_phase));
    return c;
}

Circuit level_operator(const PsiTree& tree, int level) {
    if (level < 0 || level >= tree.n) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "no level " + std::to_string(level));
    }
    const auto mags = path_magnitudes(tree);
    std::vector<double> th, ph;
    level_angles(tree, level, mags, false, th, ph);
    Circuit c;
    c.n = tree.n;
    for (std::size_t i = 0; i < th.size(); ++i) {
        Gate g = make_unitary(level, node_unitary(PsiNode{th[i], ph[i], false}));
        for (int q = 0; q < level; ++q) {
            g.controls.push_back(
                {q, ((i >> (level - 1 - q)) & 1) ? Polarity::Down : Polarity::Up});
        }
        c.gates.push_back(std::move(g));
    }
    return c;
}

} // namespace qprep
