#include "qprep/io.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace qprep {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

[[noreturn]] void bad_input(const std::string& why) {
    throw Error(ErrorCode::ParseError, why);
}

ordered_json parse_json(const std::string& text, const char* what) {
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        bad_input(std::string(what) + ": " + e.what());
    }
}

} // namespace

std::string write_state_text(const TargetState& s) {
    std::ostringstream out;
    out << s.n << "\n";
    for (const cplx& a : s.amps) {
        out << fmt17(a.real()) << " " << fmt17(a.imag()) << "\n";
    }
    return out.str();
}

std::string write_state_json(const TargetState& s) {
    ordered_json j;
    j["n"] = s.n;
    auto& amps = j["amplitudes"] = ordered_json::array();
    for (const cplx& a : s.amps) {
        amps.push_back({a.real(), a.imag()});
    }
    return j.dump();
}

namespace {

TargetState read_state_json(const std::string& text) {
    ordered_json j = parse_json(text, "statevector json");
    try {
        TargetState s;
        s.n = j.at("n").get<int>();
        if (s.n < 1 || s.n > 62) bad_input("statevector json: bad qubit count");
        for (const auto& pair : j.at("amplitudes")) {
            if (!pair.is_array() || pair.size() != 2) {
                bad_input("statevector json: amplitude entries must be [re, im]");
            }
            s.amps.emplace_back(pair[0].get<double>(), pair[1].get<double>());
        }
        if (s.dim() != std::size_t{1} << s.n) {
            bad_input("statevector json: expected " +
                      std::to_string(std::size_t{1} << s.n) + " amplitudes, got " +
                      std::to_string(s.dim()));
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        bad_input(std::string("statevector json: ") + e.what());
    }
}

TargetState read_state_text(const std::string& text) {
    std::istringstream in(text);
    TargetState s;
    if (!(in >> s.n) || s.n < 1 || s.n > 62) {
        bad_input("statevector text: first token must be the qubit count");
    }
    const std::size_t dim = std::size_t{1} << s.n;
    s.amps.reserve(dim);
    double re = 0.0, im = 0.0;
    while (s.amps.size() < dim && (in >> re >> im)) {
        s.amps.emplace_back(re, im);
    }
    if (s.amps.size() != dim) {
        bad_input("statevector text: expected " + std::to_string(dim) +
                  " amplitude lines, got " + std::to_string(s.amps.size()));
    }
    std::string extra;
    if (in >> extra) bad_input("statevector text: trailing content '" + extra + "'");
    return s;
}

} // namespace

TargetState read_state(const std::string& text) {
    std::size_t i = text.find_first_not_of(" \t\r\n");
    if (i == std::string::npos) bad_input("statevector input is empty");
    return text[i] == '{' ? read_state_json(text) : read_state_text(text);
}

namespace {

const char* polarity_name(Polarity p) {
    return p == Polarity::Up ? "up" : "down";
}

Polarity polarity_from(const std::string& s) {
    if (s == "up") return Polarity::Up;
    if (s == "down") return Polarity::Down;
    bad_input("circuit json: bad polarity '" + s + "'");
}

GateKind kind_from(const std::string& s) {
    for (GateKind k :
         {GateKind::RotY, GateKind::RotZ, GateKind::PhaseShift, GateKind::PauliX,
          GateKind::PauliZ, GateKind::Hadamard, GateKind::GlobalPhase,
          GateKind::Swap, GateKind::Unitary2x2}) {
        if (s == gate_kind_name(k)) return k;
    }
    bad_input("circuit json: unknown gate kind '" + s + "'");
}

} // namespace

std::string write_circuit_json(const Circuit& c) {
    ordered_json j;
    j["format_version"] = 1;
    j["n"] = c.n;
    auto& gates = j["gates"] = ordered_json::array();
    for (const Gate& g : c.gates) {
        ordered_json jg;
        jg["kind"] = gate_kind_name(g.kind);
        auto& params = jg["params"] = ordered_json::array();
        switch (g.kind) {
            case GateKind::RotY:
            case GateKind::RotZ:
            case GateKind::PhaseShift:
            case GateKind::GlobalPhase:
                params.push_back(g.param);
                break;
            case GateKind::Unitary2x2:
                for (const cplx& m : g.matrix) {
                    params.push_back(m.real());
                    params.push_back(m.imag());
                }
                break;
            default:
                break;
        }
        if (g.kind != GateKind::GlobalPhase) jg["target"] = g.target;
        if (g.kind == GateKind::Swap) jg["target2"] = g.target2;
        auto& controls = jg["controls"] = ordered_json::array();
        for (const Control& ctl : g.controls) {
            controls.push_back({ctl.qubit, polarity_name(ctl.polarity)});
        }
        gates.push_back(std::move(jg));
    }
    return j.dump();
}

Circuit read_circuit_json(const std::string& text) {
    ordered_json j = parse_json(text, "circuit json");
    try {
        if (j.value("format_version", 0) != 1) {
            bad_input("circuit json: missing or unsupported format_version");
        }
        Circuit c;
        c.n = j.at("n").get<int>();
        for (const auto& jg : j.at("gates")) {
            Gate g;
            g.kind = kind_from(jg.at("kind").get<std::string>());
            g.target = jg.value("target", -1);
            g.target2 = jg.value("target2", -1);
            const auto& params = jg.at("params");
            switch (g.kind) {
                case GateKind::RotY:
                case GateKind::RotZ:
                case GateKind::PhaseShift:
                case GateKind::GlobalPhase:
                    if (params.size() != 1) bad_input("circuit json: expected 1 param");
                    g.param = params[0].get<double>();
                    break;
                case GateKind::Unitary2x2:
                    if (params.size() != 8) bad_input("circuit json: expected 8 params");
                    for (int i = 0; i < 4; ++i) {
                        g.matrix[i] = cplx(params[2 * i].get<double>(),
                                           params[2 * i + 1].get<double>());
                    }
                    break;
                default:
                    if (!params.empty()) bad_input("circuit json: unexpected params");
                    break;
            }
            for (const auto& jc : jg.at("controls")) {
                if (!jc.is_array() || jc.size() != 2) {
                    bad_input("circuit json: controls must be [qubit, polarity]");
                }
                g.controls.push_back({jc[0].get<int>(),
                                      polarity_from(jc[1].get<std::string>())});
            }
            c.gates.push_back(std::move(g));
        }
        validate(c);
        return c;
    } catch (const nlohmann::json::exception& e) {
        bad_input(std::string("circuit json: ") + e.what());
    }
}

std::string write_tree_json(const PsiTree& t) {
    ordered_json j;
    j["n"] = t.n;
    j["global_phase"] = t.global_phase;
    auto& nodes = j["nodes"] = ordered_json::array();
    for (const BlochRecord& r : dump_bloch(t)) {
        ordered_json jn;
        jn["level"] = r.level;
        jn["pos"] = r.pos;
        jn["theta"] = r.theta;
        jn["phi"] = r.phi;
        jn["dead"] = r.dead;
        nodes.push_back(std::move(jn));
    }
    return j.dump();
}

PsiTree read_tree_json(const std::string& text) {
    ordered_json j = parse_json(text, "tree json");
    try {
        PsiTree t = make_tree(j.at("n").get<int>());
        t.global_phase = j.at("global_phase").get<double>();
        const auto& nodes = j.at("nodes");
        if (nodes.size() != t.nodes.size()) {
            bad_input("tree json: expected " + std::to_string(t.nodes.size()) +
                      " nodes, got " + std::to_string(nodes.size()));
        }
        std::vector<bool> seen(t.nodes.size(), false);
        for (const auto& jn : nodes) {
            int level = jn.at("level").get<int>();
            std::size_t pos = jn.at("pos").get<std::size_t>();
            PsiNode& nd = t.node(level, pos); // range-checked
            nd.theta = jn.at("theta").get<double>();
            nd.phi = jn.at("phi").get<double>();
            nd.dead = jn.at("dead").get<bool>();
            std::size_t idx = PsiTree::heap_index(level, pos);
            if (seen[idx]) bad_input("tree json: duplicate node entry");
            seen[idx] = true;
        }
        return t;
    } catch (const nlohmann::json::exception& e) {
        bad_input(std::string("tree json: ") + e.what());
    }
}

std::string write_tree_table(const PsiTree& t) {
    std::ostringstream out;
    char buf[96];
    std::snprintf(buf, sizeof buf, "%5s %6s %18s %18s %5s\n", "level", "pos",
                  "theta", "phi", "dead");
    out << buf;
    for (const BlochRecord& r : dump_bloch(t)) {
        std::snprintf(buf, sizeof buf, "%5d %6zu %18.12g %18.12g %5s\n",
                      r.level, r.pos, r.theta, r.phi, r.dead ? "yes" : "no");
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "global_phase %.12g\n", t.global_phase);
    out << buf;
    return out.str();
}

} // namespace qprep
