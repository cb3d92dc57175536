#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "qprep/state.hpp"
#include "qprep/synth.hpp"
#include "qprep/tree.hpp"

using namespace qprep;

namespace {

double max_entry_diff(const TargetState& a, const TargetState& b) {
    REQUIRE(a.dim() == b.dim());
    double worst = 0.0;
    for (std::size_t k = 0; k < a.dim(); ++k) {
        worst = std::max(worst, std::abs(a[k] - b[k]));
    }
    return worst;
}

double max_matrix_diff(const DenseMatrix& a, const DenseMatrix& b) {
    REQUIRE(a.dim == b.dim);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.a.size(); ++i) {
        worst = std::max(worst, std::abs(a.a[i] - b.a[i]));
    }
    return worst;
}

bool is_cnot(const Gate& g, int ctrl, int tgt) {
    return g.kind == GateKind::PauliX && g.target == tgt &&
           g.controls.size() == 1 && g.controls[0].qubit == ctrl &&
           g.controls[0].polarity == Polarity::Down;
}

std::array<cplx, 4> node_unitary(const PsiNode& nd) {
    auto [a, b] = node_alpha_beta(nd);
    return {a, -std::conj(b), b, std::conj(a)};
}

std::array<cplx, 4> pair_product(const PsiNode& na, const PsiNode& nb) {
    // U(a) * U(b)^dag, the correction that retargets branch b onto branch a
    auto ua = node_unitary(na);
    auto ub = node_unitary(nb);
    std::array<cplx, 4> out{};
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            out[2 * r + c] = ua[2 * r] * std::conj(ub[2 * c]) +
                             ua[2 * r + 1] * std::conj(ub[2 * c + 1]);
        }
    }
    return out;
}

TargetState product_state(const std::vector<std::array<cplx, 2>>& qubits) {
    const int n = int(qubits.size());
    TargetState s(n, std::vector<cplx>(std::size_t{1} << n, cplx(1.0)));
    for (std::size_t k = 0; k < s.dim(); ++k) {
        for (int j = 0; j < n; ++j) {
            s.amps[k] *= qubits[j][bit_of(k, j, n)];
        }
    }
    return s;
}

TargetState ghz(int n) {
    std::vector<cplx> amps(std::size_t{1} << n, cplx(0.0));
    amps.front() = amps.back() = 1.0 / std::sqrt(2.0);
    return TargetState(n, std::move(amps));
}

Circuit concat(int n, const std::vector<const Circuit*>& parts) {
    Circuit c;
    c.n = n;
    for (const Circuit* p : parts) {
        c.gates.insert(c.gates.end(), p->gates.begin(), p->gates.end());
    }
    return c;
}

} // namespace

TEST_CASE("pyramidal level-1 ladder shape") {
    const PsiTree t = build_tree(random_state(2, 40));
    const Circuit c = synth_pyramidal(t);
    REQUIRE(c.gates.size() == 9);

    const double t0 = t.node(1, 0).theta, t1 = t.node(1, 1).theta;
    const double p0 = t.node(1, 0).phi, p1 = t.node(1, 1).phi;

    CHECK(c.gates[0].kind == GateKind::RotY);
    CHECK(c.gates[0].target == 0);
    CHECK(c.gates[0].param == doctest::Approx(t.node(0, 0).theta));
    CHECK(c.gates[1].kind == GateKind::RotZ);
    CHECK(c.gates[1].target == 0);
    CHECK(c.gates[1].param == doctest::Approx(t.node(0, 0).phi));

    CHECK(c.gates[2].kind == GateKind::RotY);
    CHECK(c.gates[2].target == 1);
    CHECK(c.gates[2].param == doctest::Approx((t0 + t1) / 2.0));
    CHECK(is_cnot(c.gates[3], 0, 1));
    CHECK(c.gates[4].kind == GateKind::RotY);
    CHECK(c.gates[4].param == doctest::Approx((t0 - t1) / 2.0));
    // shared boundary CNOTs cancel, so the z ladder starts with its rotation
    CHECK(c.gates[5].kind == GateKind::RotZ);
    CHECK(c.gates[5].target == 1);
    CHECK(c.gates[5].param == doctest::Approx((p0 - p1) / 2.0));
    CHECK(is_cnot(c.gates[6], 0, 1));
    CHECK(c.gates[7].kind == GateKind::RotZ);
    CHECK(c.gates[7].param == doctest::Approx((p0 + p1) / 2.0));
    CHECK(c.gates[8].kind == GateKind::GlobalPhase);
}

TEST_CASE("pyramidal CNOT budget") {
    const std::size_t expected[] = {2, 8, 22, 52, 114, 240, 494, 1004};
    for (int n = 2; n <= 9; ++n) {
        const PsiTree t = build_tree(random_state(n, 100 + unsigned(n)));
        const GateCounts gc = count_gates(synth_pyramidal(t));
        CHECK(gc.cnot == expected[n - 2]);
        CHECK(gc.cnot == (std::size_t{1} << (n + 1)) - 2 * std::size_t(n) - 2);
        // one RotY and one RotZ per node
        CHECK(count_kind(synth_pyramidal(t), GateKind::RotY) ==
              (std::size_t{1} << n) - 1);
        CHECK(count_kind(synth_pyramidal(t), GateKind::RotZ) ==
              (std::size_t{1} << n) - 1);
    }
}

TEST_CASE("both backends prepare the target state") {
    for (int n = 1; n <= 6; ++n) {
        for (unsigned seed : {5u, 6u}) {
            const TargetState s = random_state(n, seed * 1000 + unsigned(n));
            const PsiTree t = build_tree(s);
            const TargetState py = run_on_zero(synth_pyramidal(t));
            const TargetState su = run_on_zero(synth_subtree(t));
            CHECK(max_entry_diff(py, s) < 1e-9);
            CHECK(max_entry_diff(su, s) < 1e-9);
            CHECK(max_entry_diff(py, su) < 1e-9);
        }
    }
}

TEST_CASE("sparse pyramidal is equivalent and tighter") {
    for (int n = 2; n <= 5; ++n) {
        const TargetState s = random_state(n, 300 + unsigned(n));
        const PsiTree t = build_tree(s);
        const Circuit dense = synth_pyramidal(t);
        const Circuit sparse = synth_pyramidal(t, {.sparse = true});
        CHECK(max_entry_diff(run_on_zero(dense), run_on_zero(sparse)) < 1e-12);
        CHECK(sparse.gates.size() <= dense.gates.size());
    }

    // a positive product state carries one uniform angle per level, so the
    // sparse ladder degenerates to bare rotations
    const double h = 1.0 / std::sqrt(2.0);
    const TargetState p = product_state(
        {{cplx(0.6), cplx(0.8)}, {cplx(0.8), cplx(0.6)}, {cplx(h), cplx(h)}});
    const Circuit c = synth_pyramidal(build_tree(p), {.sparse = true});
    CHECK(count_gates(c).cnot == 0);
    CHECK(count_kind(c, GateKind::RotZ) == 0);
    CHECK(max_entry_diff(run_on_zero(c), p) < 1e-12);
}

TEST_CASE("subtree backend on two qubits") {
    const PsiTree t = build_tree(random_state(2, 41));
    const Circuit c = synth_subtree(t);
    REQUIRE(c.gates.size() == 4);

    CHECK(c.gates[0].kind == GateKind::Unitary2x2);
    CHECK(c.gates[0].target == 1);
    CHECK(c.gates[0].controls.empty());
    CHECK(c.gates[1].target == 0);

    const Gate& corr = c.gates[2];
    CHECK(corr.kind == GateKind::Unitary2x2);
    CHECK(corr.target == 1);
    REQUIRE(corr.controls.size() == 1);
    CHECK(corr.controls[0].qubit == 0);
    CHECK(corr.controls[0].polarity == Polarity::Down);
    const auto want = pair_product(t.node(1, 1), t.node(1, 0));
    for (int i = 0; i < 4; ++i) CHECK(std::abs(corr.matrix[i] - want[i]) < 1e-12);

    CHECK(c.gates[3].kind == GateKind::GlobalPhase);
}

TEST_CASE("subtree backend on three qubits") {
    const PsiTree t = build_tree(random_state(3, 42));
    const Circuit c = synth_subtree(t);
    REQUIRE(c.gates.size() == 8);

    // uncontrolled node unitaries, deepest qubit first
    for (int i = 0; i < 3; ++i) {
        CHECK(c.gates[i].kind == GateKind::Unitary2x2);
        CHECK(c.gates[i].target == 2 - i);
        CHECK(c.gates[i].controls.empty());
        const auto want = node_unitary(t.node(2 - i, 0));
        for (int k = 0; k < 4; ++k) {
            CHECK(std::abs(c.gates[i].matrix[k] - want[k]) < 1e-12);
        }
    }

    struct Expect {
        int target;
        std::vector<Control> controls;
        std::array<cplx, 4> payload;
    };
    const std::vector<Expect> expect = {
        {1, {{0, Polarity::Down}}, pair_product(t.node(1, 1), t.node(1, 0))},
        {2, {{0, Polarity::Down}}, pair_product(t.node(2, 2), t.node(2, 0))},
        {2, {{0, Polarity::Up}, {1, Polarity::Down}},
         pair_product(t.node(2, 1), t.node(2, 0))},
        {2, {{0, Polarity::Down}, {1, Polarity::Down}},
         pair_product(t.node(2, 3), t.node(2, 2))},
    };
    for (std::size_t i = 0; i < expect.size(); ++i) {
        const Gate& g = c.gates[3 + i];
        CHECK(g.kind == GateKind::Unitary2x2);
        CHECK(g.target == expect[i].target);
        REQUIRE(g.controls.size() == expect[i].controls.size());
        for (std::size_t k = 0; k < g.controls.size(); ++k) {
            CHECK(g.controls[k] == expect[i].controls[k]);
        }
        for (int k = 0; k < 4; ++k) {
            CHECK(std::abs(g.matrix[k] - expect[i].payload[k]) < 1e-12);
        }
    }
    CHECK(c.gates[7].kind == GateKind::GlobalPhase);
}

TEST_CASE("subtree corrections vanish on product states") {
    const TargetState p = product_state({{cplx(0.6, 0.3), cplx(0.64, -0.36)},
                                         {cplx(1.0 / std::sqrt(2.0)),
                                          cplx(0.0, -1.0 / std::sqrt(2.0))},
                                         {cplx(0.48), cplx(0.6, 0.64)}});
    const TargetState pn = normalize(p);
    const Circuit c = synth_subtree(build_tree(pn));
    const GateCounts gc = count_gates(c);
    CHECK(gc.total == 4); // three locals plus the phase
    CHECK(gc.controlled_total == 0);
    CHECK(gc.global_phase == 1);
    CHECK(max_entry_diff(run_on_zero(c), pn) < 1e-12);
}

TEST_CASE("literal_x replaces up controls by X conjugation") {
    const PsiTree t = build_tree(random_state(3, 55));
    const Circuit plain = synth_subtree(t);
    const Circuit lit = synth_subtree(t, {.literal_x = true});
    for (const Gate& g : lit.gates) {
        for (const Control& ctl : g.controls) {
            CHECK(ctl.polarity == Polarity::Down);
        }
    }
    CHECK(count_kind(lit, GateKind::PauliX) >= 2); // the conjugation pair
    CHECK(max_entry_diff(run_on_zero(plain), run_on_zero(lit)) < 1e-12);
}

TEST_CASE("level_operator equals the factored ladder") {
    // include a state with a dead subtree to exercise the angle copying
    std::vector<TargetState> states;
    states.push_back(random_state(3, 60));
    {
        TargetState s(3, std::vector<cplx>(8, cplx(0.0)));
        s.amps[0] = 0.5;
        s.amps[1] = cplx(0.0, 0.5);
        s.amps[6] = cplx(-0.5, 0.0);
        s.amps[7] = cplx(0.0, -0.5);
        states.push_back(s);
    }
    for (const TargetState& s : states) {
        const PsiTree t = build_tree(s);
        for (int l = 0; l < 3; ++l) {
            const LevelBlocks lb = pyramidal_level_blocks(t, l);
            const Circuit ladder = concat(3, {&lb.y_block, &lb.z_block});
            const Circuit op = level_operator(t, l);
            CHECK(max_matrix_diff(circuit_unitary(ladder), circuit_unitary(op)) <
                  1e-12);
        }
    }
    CHECK_THROWS_AS((void)level_operator(build_tree(states[0]), 3), Error);
    CHECK_THROWS_AS((void)pyramidal_level_blocks(build_tree(states[0]), -1), Error);
}

TEST_CASE("level_operator positions are interchangeable") {
    const PsiTree t = build_tree(random_state(3, 61));
    Circuit fwd = level_operator(t, 2);
    Circuit rev = fwd;
    std::reverse(rev.gates.begin(), rev.gates.end());
    CHECK(max_matrix_diff(circuit_unitary(fwd), circuit_unitary(rev)) < 1e-12);
}

TEST_CASE("z blocks commute past later levels") {
    const PsiTree t = build_tree(random_state(3, 62));
    std::vector<LevelBlocks> lb;
    for (int l = 0; l < 3; ++l) lb.push_back(pyramidal_level_blocks(t, l));

    const Circuit interleaved = concat(
        3, {&lb[0].y_block, &lb[0].z_block, &lb[1].y_block, &lb[1].z_block,
            &lb[2].y_block, &lb[2].z_block});
    const Circuit hoisted = concat(
        3, {&lb[0].y_block, &lb[1].y_block, &lb[2].y_block, &lb[0].z_block,
            &lb[1].z_block, &lb[2].z_block});
    CHECK(max_matrix_diff(circuit_unitary(interleaved),
                          circuit_unitary(hoisted)) < 1e-12);
}

TEST_CASE("separability verdicts") {
    // Bell and GHZ diverge first at level 1, position 1
    const SeparabilityVerdict bellv = is_separable(build_tree(ghz(2)));
    CHECK_FALSE(bellv.separable);
    REQUIRE(bellv.first_violation.has_value());
    CHECK(bellv.first_violation->first == 1);
    CHECK(bellv.first_violation->second == 1);

    const SeparabilityVerdict ghzv = is_separable(build_tree(ghz(3)));
    CHECK_FALSE(ghzv.separable);
    CHECK(ghzv.first_violation->first == 1);
    CHECK(ghzv.first_violation->second == 1);

    std::vector<cplx> w(8, cplx(0.0));
    w[1] = w[2] = w[4] = 1.0 / std::sqrt(3.0);
    CHECK_FALSE(is_separable(build_tree(TargetState(3, std::move(w)))).separable);

    const TargetState p = normalize(product_state(
        {{cplx(0.6), cplx(-0.8)},
         {cplx(1.0 / std::sqrt(2.0)), cplx(0.0, 1.0 / std::sqrt(2.0))},
         {cplx(0.28, -0.21), cplx(0.0, 0.936)}}));
    const SeparabilityVerdict pv = is_separable(build_tree(p));
    CHECK(pv.separable);
    CHECK_FALSE(pv.first_violation.has_value());

    CHECK(is_separable(build_tree(random_state(1, 1))).separable);
    CHECK_FALSE(is_separable(build_tree(random_state(4, 2))).separable);
}
