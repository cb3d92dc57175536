#include "qprep/compress.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <random>

#include <Eigen/Dense>

namespace qprep {

namespace {

void check_normalized(const TargetState& s) {
    if (std::abs(norm(s) - 1.0) > kEpsAngle) {
        throw Error(ErrorCode::NotNormalized, "state must be normalized");
    }
}

double path_magnitude_at(const std::vector<double>& mags, NodeRef r) {
    return mags[PsiTree::heap_index(r.level, r.pos)];
}

Gate cnot_gate(int ctrl, int target) {
    Gate g = make_pauli_x(target);
    g.controls.push_back({ctrl, Polarity::Down});
    return g;
}

QubitBasis basis_from_column(cplx alpha, cplx beta) {
    QubitBasis qb;
    const double am = std::abs(alpha), bm = std::abs(beta);
    if (bm <= 1e-14) {
        qb.theta = 0.0;
        qb.phi = 2.0 * std::arg(alpha);
    } else if (am <= 1e-14) {
        qb.theta = M_PI;
        qb.phi = 2.0 * std::arg(beta);
    } else {
        qb.theta = 2.0 * std::atan2(bm, am);
        const double a0 = std::arg(alpha), b0 = std::arg(beta);
        qb.phi = a0 + b0;
        qb.chi = b0 - a0;
    }
    return qb;
}

double vdot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double vnorm(const std::vector<double>& a) { return std::sqrt(vdot(a, a)); }

using Objective = std::function<double(const std::vector<double>&)>;

// Limited-memory BFGS with central-difference gradients and Armijo
// backtracking. Deterministic; returns true once fx <= f_target.
bool lbfgs_minimize(const Objective& f, std::vector<double>& x, double& fx,
                    double f_target, int max_iter) {
    const std::size_t dim = x.size();
    const double h = 1e-5;
    auto gradient = [&](const std::vector<double>& p, std::vector<double>& g) {
        std::vector<double> q = p;
        for (std::size_t i = 0; i < dim; ++i) {
            q[i] = p[i] + h;
            const double fp = f(q);
            q[i] = p[i] - h;
            const double fm = f(q);
            q[i] = p[i];
            g[i] = (fp - fm) / (2.0 * h);
        }
    };
    std::deque<std::pair<std::vector<double>, std::vector<double>>> hist;
    double scale = 1.0;
    fx = f(x);
    std::vector<double> g(dim);
    gradient(x, g);
    for (int it = 0; it < max_iter; ++it) {
        if (fx <= f_target) return true;
        const double gn = vnorm(g);
        if (gn < 1e-13) break;
        // two-loop recursion for the search direction
        std::vector<double> d = g;
        std::vector<double> coef(hist.size());
        for (std::size_t i = hist.size(); i-- > 0;) {
            const auto& [s, y] = hist[i];
            coef[i] = vdot(s, d) / vdot(s, y);
            for (std::size_t j = 0; j < dim; ++j) d[j] -= coef[i] * y[j];
        }
        for (auto& v : d) v *= scale;
        for (std::size_t i = 0; i < hist.size(); ++i) {
            const auto& [s, y] = hist[i];
            const double b = vdot(y, d) / vdot(s, y);
            for (std::size_t j = 0; j < dim; ++j) d[j] += (coef[i] - b) * s[j];
        }
        for (auto& v : d) v = -v;
        double dg = vdot(d, g);
        if (!(dg < 0.0)) {
            for (std::size_t j = 0; j < dim; ++j) d[j] = -g[j];
            dg = -gn * gn;
        }
        double step = 1.0, fn = fx;
        bool moved = false;
        std::vector<double> trial(dim);
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t j = 0; j < dim; ++j) trial[j] = x[j] + step * d[j];
            fn = f(trial);
            if (fn <= fx + 1e-4 * step * dg) {
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) {
            if (hist.empty()) break; // stalled at the gradient-noise floor
            hist.clear();
            scale = 1.0;
            continue;
        }
        std::vector<double> xn(dim), gn2(dim);
        for (std::size_t j = 0; j < dim; ++j) xn[j] = x[j] + step * d[j];
        gradient(xn, gn2);
        std::vector<double> s(dim), y(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            s[j] = xn[j] - x[j];
            y[j] = gn2[j] - g[j];
        }
        const double sy = vdot(s, y);
        if (sy > 1e-12 * vnorm(s) * vnorm(y)) {
            hist.emplace_back(std::move(s), std::move(y));
            if (hist.size() > 8) hist.pop_front();
            scale = sy / vdot(hist.back().second, hist.back().second);
        }
        x = std::move(xn);
        fx = fn;
        g = std::move(gn2);
    }
    return fx <= f_target;
}

} // namespace

PsiTree extract_subtree(const PsiTree& tree, NodeRef node) {
    tree.node(node.level, node.pos); // range check
    PsiTree sub = make_tree(tree.n - node.level);
    for (int d = 0; d < sub.n; ++d) {
        for (std::size_t p = 0; p < sub.level_size(d); ++p) {
            sub.node(d, p) = tree.node(node.level + d, (node.pos << d) + p);
        }
    }
    return sub;
}

cplx subtree_overlap(const PsiTree& tree, NodeRef a, NodeRef b) {
    if (a.level != b.level) {
        throw Error(ErrorCode::LevelMismatch,
                    "subtrees sit at levels " + std::to_string(a.level) +
                        " and " + std::to_string(b.level));
    }
    tree.node(a.level, a.pos);
    tree.node(b.level, b.pos);
    const auto mags = path_magnitudes(tree);
    if (path_magnitude_at(mags, a) <= kEpsZero ||
        path_magnitude_at(mags, b) <= kEpsZero) {
        throw Error(ErrorCode::DeadSubtree,
                    "subtree carries no amplitude; overlap undefined");
    }
    const TargetState sa = tree_to_state(extract_subtree(tree, a));
    const TargetState sb = tree_to_state(extract_subtree(tree, b));
    return fidelity(sa, sb).overlap;
}

std::pair<PsiTree, PruneAnalysis> prune(const PsiTree& tree, NodeRef divergence,
                                        double tolerance) {
    if (divergence.level > tree.n - 2) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "divergence node must have children");
    }
    const cplx kappa =
        subtree_overlap(tree, {divergence.level + 1, 2 * divergence.pos},
                        {divergence.level + 1, 2 * divergence.pos + 1});
    const auto [alpha, beta] = node_alpha_beta(tree.node(divergence.level,
                                                         divergence.pos));
    const double ak = std::min(std::abs(kappa), 1.0);
    const double q = std::norm(alpha) * std::norm(beta) * (1.0 - ak * ak);
    const double disc = std::sqrt(std::max(0.0, 1.0 - 4.0 * q));
    PruneAnalysis an;
    an.kappa = kappa;
    an.alpha = alpha;
    an.beta = beta;
    an.lambda_plus = 0.5 * (1.0 + disc);
    an.lambda_minus = 0.5 * (1.0 - disc);
    if (1.0 - std::abs(kappa) > tolerance) {
        throw Error(ErrorCode::ToleranceExceeded,
                    "branch overlap 1-|kappa| = " +
                        std::to_string(1.0 - std::abs(kappa)) +
                        " exceeds tolerance");
    }
    // dominant eigenvector of the node's reduced density matrix
    const cplx r01 = alpha * std::conj(beta) * std::conj(kappa);
    cplx u0 = r01, u1 = cplx(an.lambda_plus - std::norm(alpha), 0.0);
    {
        const cplx v0(an.lambda_plus - std::norm(beta), 0.0);
        const cplx v1 = std::conj(r01);
        if (std::norm(v0) + std::norm(v1) > std::norm(u0) + std::norm(u1)) {
            u0 = v0;
            u1 = v1;
        }
    }
    const double un = std::sqrt(std::norm(u0) + std::norm(u1));
    if (un <= 1e-14) {
        // fully degenerate reduced state: every vector is an eigenvector,
        // keep the left branch
        u0 = 1.0;
        u1 = 0.0;
    } else {
        u0 /= un;
        u1 /= un;
    }
    double theta, phi, delta;
    if (std::abs(u0) <= 1e-14) {
        theta = M_PI;
        phi = 0.0;
        delta = std::arg(u1);
    } else if (std::abs(u1) <= 1e-14) {
        theta = 0.0;
        phi = 0.0;
        delta = std::arg(u0);
    } else {
        theta = 2.0 * std::atan2(std::abs(u1), std::abs(u0));
        phi = wrap_angle(std::arg(u1) - std::arg(u0));
        delta = std::arg(u0) + phi / 2.0;
    }
    PsiTree out = tree;
    out.node(divergence.level, divergence.pos) = PsiNode{theta, phi, false};
    out.global_phase = wrap_angle(out.global_phase + delta);
    // the discarded branch mirrors the kept one, flagged dead
    for (int d = divergence.level + 1; d < tree.n; ++d) {
        const std::size_t half = std::size_t{1} << (d - divergence.level - 1);
        const std::size_t base = divergence.pos << (d - divergence.level);
        for (std::size_t p = 0; p < half; ++p) {
            PsiNode nd = out.node(d, base + p);
            nd.dead = true;
            out.node(d, base + half + p) = nd;
        }
    }
    return {std::move(out), an};
}

std::pair<PsiTree, PruneAnalysis> prune_pair(const PsiTree& tree, int level,
                                             std::size_t pos_a,
                                             std::size_t pos_b,
                                             double tolerance) {
    tree.node(level, pos_a);
    tree.node(level, pos_b);
    if (level < 1 || (pos_a ^ pos_b) != 1) {
        throw Error(ErrorCode::NotAdjacent,
                    "subtrees are not siblings; rearrange branches first");
    }
    return prune(tree, {level - 1, pos_a >> 1}, tolerance);
}

std::pair<PsiTree, Circuit> rearrange_branches(const PsiTree& tree,
                                               NodeRef node) {
    const PsiNode& src = tree.node(node.level, node.pos);
    const auto mags = path_magnitudes(tree);
    if (path_magnitude_at(mags, node) <= kEpsZero) {
        throw Error(ErrorCode::DeadSubtree,
                    "cannot rearrange a branch with no amplitude");
    }
    PsiTree out = tree;
    out.node(node.level, node.pos) =
        PsiNode{M_PI - src.theta, wrap_angle(-src.phi), src.dead};
    for (int d = node.level + 1; d < tree.n; ++d) {
        const std::size_t half = std::size_t{1} << (d - node.level - 1);
        const std::size_t base = node.pos << (d - node.level);
        for (std::size_t p = 0; p < half; ++p) {
            std::swap(out.node(d, base + p), out.node(d, base + half + p));
        }
    }
    Circuit c;
    c.n = tree.n;
    Gate g = make_pauli_x(node.level);
    for (int qb = 0; qb < node.level; ++qb) {
        g.controls.push_back(
            {qb, ((node.pos >> (node.level - 1 - qb)) & 1) ? Polarity::Down
                                                           : Polarity::Up});
    }
    c.gates.push_back(std::move(g));
    return {std::move(out), std::move(c)};
}

std::array<cplx, 4> basis_matrix(const QubitBasis& b) {
    const cplx alpha = std::polar(std::cos(b.theta / 2.0),
                                  0.5 * (b.phi - b.chi));
    const cplx beta = std::polar(std::sin(b.theta / 2.0),
                                 0.5 * (b.phi + b.chi));
    return {alpha, -std::conj(beta), beta, std::conj(alpha)};
}

TargetState apply_transform(const TargetState& state,
                            const LocalBasisTransform& t) {
    if (int(t.angles.size()) != state.n) {
        throw Error(ErrorCode::DimensionMismatch,
                    "transform has " + std::to_string(t.angles.size()) +
                        " qubit entries, state has " + std::to_string(state.n));
    }
    TargetState s = state;
    for (int j = 0; j < state.n; ++j) {
        apply_gate(s, make_unitary(j, basis_matrix(t.angles[j])), state.n);
    }
    return s;
}

TargetState apply_inverse_transform(const TargetState& state,
                                    const LocalBasisTransform& t) {
    if (int(t.angles.size()) != state.n) {
        throw Error(ErrorCode::DimensionMismatch,
                    "transform has " + std::to_string(t.angles.size()) +
                        " qubit entries, state has " + std::to_string(state.n));
    }
    TargetState s = state;
    for (int j = 0; j < state.n; ++j) {
        const auto w = basis_matrix(t.angles[j]);
        const std::array<cplx, 4> wd = {std::conj(w[0]), std::conj(w[2]),
                                        std::conj(w[1]), std::conj(w[3])};
        apply_gate(s, make_unitary(j, wd), state.n);
    }
    return s;
}

Schmidt2qResult schmidt_2q(const TargetState& state) {
    if (state.n != 2) {
        throw Error(ErrorCode::DimensionMismatch,
                    "schmidt_2q expects a two-qubit state");
    }
    check_normalized(state);
    Eigen::Matrix2cd coeff;
    coeff << state[0], state[1], state[2], state[3];
    Eigen::JacobiSVD<Eigen::Matrix2cd> svd(
        coeff, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Vector2d sv = svd.singularValues();
    Eigen::Matrix2cd b0 = svd.matrixU();
    Eigen::Matrix2cd b1 = svd.matrixV().conjugate();
    auto su2_fix = [](Eigen::Matrix2cd& b) {
        const cplx det = b(0, 0) * b(1, 1) - b(0, 1) * b(1, 0);
        const double mu = 0.5 * std::arg(det);
        b *= std::polar(1.0, -mu);
        return mu;
    };
    const double mu0 = su2_fix(b0);
    const double mu1 = su2_fix(b1);
    Schmidt2qResult r;
    r.theta = 2.0 * std::atan2(sv(1), sv(0));
    // the per-qubit map is the adjoint of the SVD factor: W = B^dagger
    r.transform.angles = {
        basis_from_column(std::conj(b0(0, 0)), std::conj(b0(0, 1))),
        basis_from_column(std::conj(b1(0, 0)), std::conj(b1(0, 1)))};
    r.circuit.n = 2;
    r.circuit.gates = {make_rot_y(0, r.theta), cnot_gate(0, 1)};
    r.global_phase = mu0 + mu1;
    return r;
}

MultilinearSystem build_multilinear_system(const TargetState& state) {
    if (state.n < 2) {
        throw Error(ErrorCode::DimensionMismatch,
                    "the multilinear system needs at least two qubits");
    }
    check_normalized(state);
    MultilinearSystem sys;
    sys.m = state.n;
    sys.equations.assign(state.n, {});
    for (int k = 0; k < state.n; ++k) {
        auto& eq = sys.equations[k];
        eq.resize(state.dim());
        const std::size_t a = std::size_t{1} << k;
        for (std::size_t mu = 0; mu < state.dim(); ++mu) {
            eq[mu] = state[a ^ mu];
        }
    }
    return sys;
}

std::vector<cplx> evaluate_multilinear(const MultilinearSystem& sys,
                                       const LocalBasisTransform& t) {
    const int m = sys.m;
    if (int(t.angles.size()) != m) {
        throw Error(ErrorCode::DimensionMismatch,
                    "transform does not match the system's qubit count");
    }
    std::vector<cplx> alpha(m), beta(m);
    for (int j = 0; j < m; ++j) {
        const auto w = basis_matrix(t.angles[j]);
        alpha[j] = w[0];
        beta[j] = w[2];
    }
    std::vector<cplx> out(m);
    for (int k = 0; k < m; ++k) {
        const int q = m - 1 - k; // qubit flipped by the anchor index 2^k
        cplx acc = 0.0;
        for (std::size_t mu = 0; mu < sys.equations[k].size(); ++mu) {
            cplx term = sys.equations[k][mu];
            if (term == cplx(0.0)) continue;
            for (int j = 0; j < m; ++j) {
                const bool bit = (mu >> (m - 1 - j)) & 1;
                if (j == q) {
                    term *= bit ? beta[j] : std::conj(alpha[j]);
                } else {
                    term *= bit ? -std::conj(beta[j]) : alpha[j];
                }
            }
            acc += term;
        }
        out[k] = acc;
    }
    return out;
}

GeneralizedSchmidtResult solve_generalized_schmidt(const TargetState& state,
                                                   double residual_tol) {
    const int m = state.n;
    if (m < 2 || m > 6) {
        throw Error(ErrorCode::DimensionMismatch,
                    "solve_generalized_schmidt supports 2 to 6 qubits");
    }
    check_normalized(state);
    const MultilinearSystem sys = build_multilinear_system(state);
    auto objective = [&](const std::vector<double>& v) {
        LocalBasisTransform t;
        t.angles.resize(m);
        for (int j = 0; j < m; ++j) {
            t.angles[j] = {v[j], v[m + j], 0.0};
        }
        double f = 0.0;
        for (const cplx& z : evaluate_multilinear(sys, t)) f += std::norm(z);
        return f;
    };

    // stage 1: kill the single-excitation amplitudes over (theta, phi);
    // chi only rotates their phases, so it is fixed separately below
    const double target = residual_tol * residual_tol;
    double best_f = std::numeric_limits<double>::infinity();
    std::vector<double> best_x;
    int best_start = -1;
    for (int s0 = 0; s0 < 8; ++s0) {
        std::vector<double> x(2 * m, 0.0);
        if (s0 > 0) {
            std::mt19937_64 rng(0xC0FFEEull + std::uint64_t(s0));
            auto unit = [&] { return double(rng() >> 11) * 0x1.0p-53; };
            for (int j = 0; j < m; ++j) x[j] = unit() * M_PI;
            for (int j = 0; j < m; ++j) x[m + j] = (2.0 * unit() - 1.0) * M_PI;
        }
        double fx = 0.0;
        lbfgs_minimize(objective, x, fx, 0.01 * target, 400);
        if (fx < best_f) {
            best_f = fx;
            best_x = x;
            best_start = s0;
        }
        if (fx < target) {
            best_f = fx;
            best_x = std::move(x);
            best_start = s0;
            break;
        }
    }
    if (!(best_f < target)) {
        throw Error(ErrorCode::ConvergenceFailure,
                    "no start reached the residual tolerance; best residual " +
                        std::to_string(std::sqrt(best_f)));
    }

    GeneralizedSchmidtResult r;
    r.start_index = best_start;
    r.transform.angles.resize(m);
    for (int j = 0; j < m; ++j) {
        r.transform.angles[j] = {best_x[j], best_x[m + j], 0.0};
    }

    // stage 2: least-squares phase alignment. Unknowns [omega, chi_0..],
    // one row per surviving anchor/partner amplitude, each asking its
    // transformed phase to vanish.
    const TargetState hat0 = apply_transform(state, r.transform);
    const std::size_t full = state.dim() - 1;
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    if (std::abs(hat0[0]) > kEpsZero) {
        std::vector<double> row(m + 1, -0.5);
        row[0] = 1.0;
        rows.push_back(std::move(row));
        rhs.push_back(-std::arg(hat0[0]));
    } else {
        r.warnings.push_back(
            "PhaseFixDegenerate: zero-index amplitude below eps_zero; "
            "phase row dropped");
    }
    bool any_degenerate = false;
    for (int k = 0; k < m; ++k) {
        const std::size_t partner = full ^ (std::size_t{1} << k);
        const int q = m - 1 - k;
        if (std::abs(hat0[partner]) > kEpsZero) {
            std::vector<double> row(m + 1, 0.5);
            row[0] = 1.0;
            row[1 + q] = -0.5;
            rows.push_back(std::move(row));
            rhs.push_back(-std::arg(hat0[partner]));
        } else {
            any_degenerate = true;
            r.warnings.push_back(
                "PhaseFixDegenerate: partner amplitude for qubit " +
                std::to_string(q) + " below eps_zero; phase row dropped");
        }
    }
    if (any_degenerate && std::abs(hat0[full]) > kEpsZero) {
        std::vector<double> row(m + 1, 0.5);
        row[0] = 1.0;
        rows.push_back(std::move(row));
        rhs.push_back(-std::arg(hat0[full]));
    }
    std::vector<double> sol(m + 1, 0.0);
    if (!rows.empty()) {
        Eigen::MatrixXd a(rows.size(), m + 1);
        Eigen::VectorXd b(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (int j = 0; j <= m; ++j) a(long(i), j) = rows[i][j];
            b(long(i)) = rhs[i];
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> lsq(
            a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Eigen::VectorXd u = lsq.solve(b);
        for (int j = 0; j <= m; ++j) sol[j] = u(j);
    }
    r.global_phase = sol[0];
    for (int j = 0; j < m; ++j) r.transform.angles[j].chi = sol[1 + j];

    r.transformed = apply_transform(state, r.transform);
    const cplx spin = std::polar(1.0, r.global_phase);
    for (auto& z : r.transformed.amps) z *= spin;
    double f = 0.0;
    for (int k = 0; k < m; ++k) {
        f += std::norm(r.transformed[std::size_t{1} << k]);
    }
    r.residual = std::sqrt(f);
    return r;
}

} // namespace qprep
