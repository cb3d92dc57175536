#include <doctest.h>

#include <functional>
#include <string>

#include "qprep/io.hpp"
#include "qprep/state.hpp"
#include "qprep/tree.hpp"

using namespace qprep;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected a throw");
    return ErrorCode::ParseError;
}

bool same_bits(const TargetState& a, const TargetState& b) {
    if (a.n != b.n || a.dim() != b.dim()) return false;
    for (std::size_t k = 0; k < a.dim(); ++k) {
        if (a[k].real() != b[k].real() || a[k].imag() != b[k].imag()) {
            return false;
        }
    }
    return true;
}

Circuit sample_circuit() {
    Circuit c;
    c.n = 3;
    c.gates.push_back(make_hadamard(0));
    c.gates.push_back(make_rot_y(1, 0.12345678901234567));
    c.gates.push_back(make_rot_z(2, -2.5));
    Gate cx = make_pauli_x(2);
    cx.controls.push_back({0, Polarity::Down});
    cx.controls.push_back({1, Polarity::Up});
    c.gates.push_back(cx);
    Gate cp = make_phase_shift(1, 0.75);
    cp.controls.push_back({2, Polarity::Down});
    c.gates.push_back(cp);
    c.gates.push_back(make_swap(0, 2));
    std::array<cplx, 4> m = {cplx(0.6, 0.0), cplx(0.0, 0.8), cplx(0.0, 0.8),
                             cplx(0.6, 0.0)};
    c.gates.push_back(make_unitary(1, m));
    c.gates.push_back(make_pauli_z(0));
    c.gates.push_back(make_global_phase(1.25));
    return c;
}

} // namespace

TEST_CASE("statevector text round trip is exact") {
    const TargetState s = random_state(3, 5);
    const std::string text = write_state_text(s);
    CHECK(text == write_state_text(s)); // byte stable
    CHECK(text.front() == '3');
    const TargetState back = read_state(text);
    CHECK(same_bits(s, back));
}

TEST_CASE("statevector json round trip and sniffing") {
    const TargetState s = random_state(2, 11);
    const std::string j = write_state_json(s);
    CHECK(j == write_state_json(s));
    CHECK(j.front() == '{');
    const TargetState back = read_state(j); // dispatched on the brace
    CHECK(same_bits(s, back));
    CHECK(read_state("  \n" + j).n == 2); // leading whitespace is fine
}

TEST_CASE("read_state rejects malformed input") {
    CHECK(code_of([] { read_state(""); }) == ErrorCode::ParseError);
    CHECK(code_of([] { read_state("banana"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { read_state("0\n"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { read_state("1\n1 0\n"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { read_state("1\n1 0\n0 0\n0 0\n"); }) ==
          ErrorCode::ParseError);
    CHECK(code_of([] { read_state("{\"n\": 1, \"amplitudes\": [[1, 0]]}"); }) ==
          ErrorCode::ParseError);
    CHECK(code_of([] {
              read_state("{\"n\": 1, \"amplitudes\": [[1, 0], [0]]}");
          }) == ErrorCode::ParseError);
    CHECK(code_of([] { read_state("{\"amplitudes\": []}"); }) ==
          ErrorCode::ParseError);
}

TEST_CASE("circuit json round trip") {
    const Circuit c = sample_circuit();
    const std::string j = write_circuit_json(c);
    CHECK(j == write_circuit_json(c));
    CHECK(j.find("\"format_version\":1") != std::string::npos);

    const Circuit back = read_circuit_json(j);
    REQUIRE(back.n == c.n);
    REQUIRE(back.gates.size() == c.gates.size());
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        const Gate& a = c.gates[i];
        const Gate& b = back.gates[i];
        CHECK(a.kind == b.kind);
        CHECK(a.target == b.target);
        CHECK(a.target2 == b.target2);
        CHECK(a.param == b.param);
        REQUIRE(a.controls.size() == b.controls.size());
        for (std::size_t k = 0; k < a.controls.size(); ++k) {
            CHECK(a.controls[k] == b.controls[k]);
        }
        if (a.kind == GateKind::Unitary2x2) {
            for (int k = 0; k < 4; ++k) CHECK(a.matrix[k] == b.matrix[k]);
        }
    }

    const TargetState x = run_on_zero(c);
    const TargetState y = run_on_zero(back);
    CHECK(same_bits(x, y));
}

TEST_CASE("read_circuit_json rejects malformed input") {
    CHECK(code_of([] { read_circuit_json("not json"); }) ==
          ErrorCode::ParseError);
    CHECK(code_of([] { read_circuit_json("{\"n\": 1, \"gates\": []}"); }) ==
          ErrorCode::ParseError); // no format_version
    CHECK(code_of([] {
              read_circuit_json("{\"format_version\": 2, \"n\": 1, \"gates\": []}");
          }) == ErrorCode::ParseError);
    CHECK(code_of([] {
              read_circuit_json(
                  "{\"format_version\": 1, \"n\": 1, \"gates\": "
                  "[{\"kind\": \"Toffoli\", \"params\": [], \"target\": 0, "
                  "\"controls\": []}]}");
          }) == ErrorCode::ParseError);
    CHECK(code_of([] {
              read_circuit_json(
                  "{\"format_version\": 1, \"n\": 2, \"gates\": "
                  "[{\"kind\": \"PauliX\", \"params\": [], \"target\": 1, "
                  "\"controls\": [[0, \"sideways\"]]}]}");
          }) == ErrorCode::ParseError);
    // structural problems surface through validate()
    CHECK(code_of([] {
              read_circuit_json(
                  "{\"format_version\": 1, \"n\": 1, \"gates\": "
                  "[{\"kind\": \"Hadamard\", \"params\": [], \"target\": 3, "
                  "\"controls\": []}]}");
          }) == ErrorCode::IndexOutOfRange);
}

TEST_CASE("tree json round trip is exact") {
    const PsiTree t = build_tree(random_state(3, 21));
    const std::string j = write_tree_json(t);
    CHECK(j == write_tree_json(t));
    const PsiTree back = read_tree_json(j);
    CHECK(back.n == t.n);
    CHECK(back.global_phase == t.global_phase);
    REQUIRE(back.nodes.size() == t.nodes.size());
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        CHECK(back.nodes[i].theta == t.nodes[i].theta);
        CHECK(back.nodes[i].phi == t.nodes[i].phi);
        CHECK(back.nodes[i].dead == t.nodes[i].dead);
    }
}

TEST_CASE("read_tree_json rejects malformed input") {
    const PsiTree t = build_tree(random_state(2, 3));
    const std::string good = write_tree_json(t);

    CHECK(code_of([] { read_tree_json("[]"); }) == ErrorCode::ParseError);
    CHECK(code_of([] {
              read_tree_json("{\"n\": 2, \"global_phase\": 0, \"nodes\": []}");
          }) == ErrorCode::ParseError);

    // duplicate entry for the same (level, pos)
    std::string dup = good;
    std::size_t a = dup.find("\"level\":1,\"pos\":0");
    std::size_t b = dup.find("\"level\":1,\"pos\":1");
    REQUIRE(a != std::string::npos);
    REQUIRE(b != std::string::npos);
    dup.replace(b, std::string("\"level\":1,\"pos\":1").size(),
                "\"level\":1,\"pos\":0");
    CHECK(code_of([&] { read_tree_json(dup); }) == ErrorCode::ParseError);

    // out-of-range node index trips the accessor
    std::string oob = good;
    oob.replace(oob.find("\"level\":1,\"pos\":1"),
                std::string("\"level\":1,\"pos\":1").size(),
                "\"level\":1,\"pos\":7");
    CHECK(code_of([&] { read_tree_json(oob); }) == ErrorCode::IndexOutOfRange);
}

TEST_CASE("tree table rendering") {
    const PsiTree t = build_tree(random_state(2, 8));
    const std::string table = write_tree_table(t);
    CHECK(table == write_tree_table(t));
    CHECK(table.find("level") != std::string::npos);
    CHECK(table.find("theta") != std::string::npos);
    CHECK(table.find("global_phase") != std::string::npos);
    std::size_t lines = 0;
    for (char ch : table) {
        if (ch == '\n') ++lines;
    }
    CHECK(lines == t.nodes.size() + 2); // header + nodes + trailer
}
