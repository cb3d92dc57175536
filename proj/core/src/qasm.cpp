#include "qprep/qasm.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace qprep {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

[[noreturn]] void unlowered(const Gate& g, const std::string& why) {
    throw Error(ErrorCode::UnloweredGate,
                std::string(gate_kind_name(g.kind)) + ": " + why);
}

void check_plain(const Gate& g) {
    if (!g.controls.empty()) {
        unlowered(g, "controlled form not in the qelib1 subset");
    }
}

} // namespace

std::string export_qasm(const Circuit& c) {
    validate(c);
    std::ostringstream out;
    out << "// format_version: 1\n";
    out << "OPENQASM 2.0;\n";
    out << "include \"qelib1.inc\";\n";
    out << "qreg q[" << c.n << "];\n";
    for (const Gate& g : c.gates) {
        switch (g.kind) {
            case GateKind::GlobalPhase:
                out << "// global phase: " << fmt(g.param) << "\n";
                continue;
            case GateKind::Hadamard:
                check_plain(g);
                out << "h q[" << g.target << "];\n";
                continue;
            case GateKind::PauliZ:
                check_plain(g);
                out << "z q[" << g.target << "];\n";
                continue;
            case GateKind::RotY:
                check_plain(g);
                out << "ry(" << fmt(g.param) << ") q[" << g.target << "];\n";
                continue;
            case GateKind::RotZ:
                check_plain(g);
                out << "rz(" << fmt(g.param) << ") q[" << g.target << "];\n";
                continue;
            case GateKind::Swap:
                check_plain(g);
                out << "swap q[" << g.target << "],q[" << g.target2 << "];\n";
                continue;
            case GateKind::PauliX:
                if (g.controls.empty()) {
                    out << "x q[" << g.target << "];\n";
                } else if (g.controls.size() == 1 &&
                           g.controls[0].polarity == Polarity::Down) {
                    out << "cx q[" << g.controls[0].qubit << "],q["
                        << g.target << "];\n";
                } else {
                    unlowered(g, "only a single down control maps to cx");
                }
                continue;
            case GateKind::PhaseShift:
                if (g.controls.empty()) {
                    out << "u1(" << fmt(g.param) << ") q[" << g.target
                        << "];\n";
                } else if (g.controls.size() == 1 &&
                           g.controls[0].polarity == Polarity::Down) {
                    out << "cu1(" << fmt(g.param) << ") q["
                        << g.controls[0].qubit << "],q[" << g.target << "];\n";
                } else {
                    unlowered(g, "only a single down control maps to cu1");
                }
                continue;
            case GateKind::Unitary2x2:
                unlowered(g, "no qelib1 lowering implemented");
        }
    }
    return out.str();
}

namespace {

[[noreturn]] void parse_fail(std::size_t lineno, const std::string& why) {
    throw Error(ErrorCode::ParseError,
                "qasm line " + std::to_string(lineno) + ": " + why);
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Accepts plain floats plus the simple symbolic forms "pi", "-pi", "c*pi",
// "pi/d", "c*pi/d" that appear in hand-written files.
double parse_angle(const std::string& tok, std::size_t lineno) {
    std::string t = trim(tok);
    std::size_t pipos = t.find("pi");
    if (pipos == std::string::npos) {
        char* end = nullptr;
        double v = std::strtod(t.c_str(), &end);
        if (end == t.c_str() || *end != '\0') {
            parse_fail(lineno, "bad angle '" + tok + "'");
        }
        return v;
    }
    double coef = 1.0;
    std::string head = trim(t.substr(0, pipos));
    if (!head.empty()) {
        if (head == "-") {
            coef = -1.0;
        } else {
            if (head.back() == '*') head.pop_back();
            char* end = nullptr;
            coef = std::strtod(head.c_str(), &end);
            if (end == head.c_str() || *trim(end).c_str() != '\0') {
                parse_fail(lineno, "bad angle '" + tok + "'");
            }
        }
    }
    double div = 1.0;
    std::string tail = trim(t.substr(pipos + 2));
    if (!tail.empty()) {
        if (tail.front() != '/') parse_fail(lineno, "bad angle '" + tok + "'");
        std::string d = trim(tail.substr(1));
        char* end = nullptr;
        div = std::strtod(d.c_str(), &end);
        if (end == d.c_str() || *end != '\0' || div == 0.0) {
            parse_fail(lineno, "bad angle '" + tok + "'");
        }
    }
    return coef * M_PI / div;
}

struct Statement {
    std::string name;
    std::vector<double> params;
    std::vector<int> operands;
};

Statement parse_statement(const std::string& body, const std::string& reg,
                          std::size_t lineno) {
    Statement st;
    std::size_t i = 0;
    while (i < body.size() &&
           (std::isalnum(static_cast<unsigned char>(body[i])) || body[i] == '_')) {
        ++i;
    }
    st.name = body.substr(0, i);
    if (st.name.empty()) parse_fail(lineno, "missing gate name");
    std::string rest = trim(body.substr(i));
    if (!rest.empty() && rest.front() == '(') {
        std::size_t close = rest.find(')');
        if (close == std::string::npos) parse_fail(lineno, "unclosed '('");
        std::string inside = rest.substr(1, close - 1);
        std::stringstream ss(inside);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            st.params.push_back(parse_angle(tok, lineno));
        }
        rest = trim(rest.substr(close + 1));
    }
    std::stringstream ops(rest);
    std::string tok;
    while (std::getline(ops, tok, ',')) {
        tok = trim(tok);
        std::size_t lb = tok.find('[');
        if (lb == std::string::npos || tok.back() != ']') {
            parse_fail(lineno, "bad operand '" + tok + "'");
        }
        if (tok.substr(0, lb) != reg) {
            parse_fail(lineno, "unknown register '" + tok.substr(0, lb) + "'");
        }
        st.operands.push_back(
            std::stoi(tok.substr(lb + 1, tok.size() - lb - 2)));
    }
    return st;
}

} // namespace

Circuit import_qasm(const std::string& text) {
    Circuit c;
    std::string reg;
    bool saw_header = false;
    std::istringstream in(text);
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(raw);
        if (line.rfind("// global phase:", 0) == 0) {
            c.gates.push_back(
                make_global_phase(parse_angle(line.substr(16), lineno)));
            continue;
        }
        std::size_t comment = line.find("//");
        if (comment != std::string::npos) line = trim(line.substr(0, comment));
        if (line.empty()) continue;
        if (line.back() != ';') parse_fail(lineno, "missing ';'");
        line = trim(line.substr(0, line.size() - 1));
        if (line.rfind("OPENQASM", 0) == 0) {
            saw_header = true;
            continue;
        }
        if (line.rfind("include", 0) == 0) continue;
        if (line.rfind("qreg", 0) == 0) {
            if (!reg.empty()) parse_fail(lineno, "multiple qreg declarations");
            std::string decl = trim(line.substr(4));
            std::size_t lb = decl.find('[');
            if (lb == std::string::npos || decl.back() != ']') {
                parse_fail(lineno, "bad qreg declaration");
            }
            reg = trim(decl.substr(0, lb));
            c.n = std::stoi(decl.substr(lb + 1, decl.size() - lb - 2));
            continue;
        }
        if (reg.empty()) parse_fail(lineno, "gate before qreg declaration");
        Statement st = parse_statement(line, reg, lineno);
        auto want = [&](std::size_t nops, std::size_t npar) {
            if (st.operands.size() != nops || st.params.size() != npar) {
                parse_fail(lineno, "bad arity for '" + st.name + "'");
            }
        };
        if (st.name == "h") {
            want(1, 0);
            c.gates.push_back(make_hadamard(st.operands[0]));
        } else if (st.name == "x") {
            want(1, 0);
            c.gates.push_back(make_pauli_x(st.operands[0]));
        } else if (st.name == "z") {
            want(1, 0);
            c.gates.push_back(make_pauli_z(st.operands[0]));
        } else if (st.name == "ry") {
            want(1, 1);
            c.gates.push_back(make_rot_y(st.operands[0], st.params[0]));
        } else if (st.name == "rz") {
            want(1, 1);
            c.gates.push_back(make_rot_z(st.operands[0], st.params[0]));
        } else if (st.name == "u1") {
            want(1, 1);
            c.gates.push_back(make_phase_shift(st.operands[0], st.params[0]));
        } else if (st.name == "cx") {
            want(2, 0);
            Gate g = make_pauli_x(st.operands[1]);
            g.controls.push_back({st.operands[0], Polarity::Down});
            c.gates.push_back(g);
        } else if (st.name == "cu1") {
            want(2, 1);
            Gate g = make_phase_shift(st.operands[1], st.params[0]);
            g.controls.push_back({st.operands[0], Polarity::Down});
            c.gates.push_back(g);
        } else if (st.name == "swap") {
            want(2, 0);
            c.gates.push_back(make_swap(st.operands[0], st.operands[1]));
        } else {
            parse_fail(lineno, "unsupported gate '" + st.name + "'");
        }
    }
    if (!saw_header) {
        throw Error(ErrorCode::ParseError, "missing OPENQASM header");
    }
    if (reg.empty()) {
        throw Error(ErrorCode::ParseError, "missing qreg declaration");
    }
    validate(c);
    return c;
}

} // namespace qprep
