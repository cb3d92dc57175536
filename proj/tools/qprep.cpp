// qprep: state-preparation synthesis, verification, and tree surgery.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qprep/compress.hpp"
#include "qprep/io.hpp"
#include "qprep/qasm.hpp"
#include "qprep/qft.hpp"
#include "qprep/synth.hpp"
#include "qprep/tree.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;
using namespace qprep;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::ParseError, "cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spill(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::ParseError, "cannot write " + path);
    }
    out << text;
}

void emit(const std::optional<std::string>& path, const std::string& text) {
    if (path) {
        spill(*path, text);
    } else {
        std::cout << text;
    }
}

TargetState load_state(const std::string& path) {
    return read_state(slurp(path));
}

Circuit load_circuit(const std::string& path) {
    const std::string text = slurp(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        return read_circuit_json(text);
    }
    return import_qasm(text);
}

// Accepts either a tree json ({"n":..,"nodes":..}) or a statevector.
PsiTree load_tree(const std::string& path) {
    const std::string text = slurp(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        const ordered_json j = ordered_json::parse(text, nullptr, false);
        if (!j.is_discarded() && j.contains("nodes")) {
            return read_tree_json(text);
        }
    }
    return build_tree(read_state(text));
}

ordered_json json_complex(cplx z) {
    return ordered_json{z.real(), z.imag()};
}

ordered_json json_transform(const LocalBasisTransform& t) {
    ordered_json arr = ordered_json::array();
    for (const auto& qb : t.angles) {
        ordered_json j;
        j["theta"] = qb.theta;
        j["phi"] = qb.phi;
        j["chi"] = qb.chi;
        arr.push_back(std::move(j));
    }
    return arr;
}

void parse_node_ref(const std::string& text, int& level, std::size_t& pos) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw Error(ErrorCode::ParseError,
                    "expected LEVEL:POS, got '" + text + "'");
    }
    try {
        level = std::stoi(text.substr(0, colon));
        pos = std::stoull(text.substr(colon + 1));
    } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError,
                    "expected LEVEL:POS, got '" + text + "'");
    }
}

int cmd_synth(const std::string& input, const std::string& backend,
              const std::string& format, double tolerance, bool sparse,
              bool literal_x, const std::optional<std::string>& output) {
    const TargetState target = load_state(input);
    const PsiTree tree = build_tree(target);
    Circuit circuit;
    if (backend == "subtree") {
        circuit = synth_subtree(tree, SubtreeOptions{literal_x});
    } else {
        circuit = synth_pyramidal(tree, PyramidalOptions{sparse});
    }
    const TargetState produced = run_on_zero(circuit);
    const FidelityReport rep = fidelity(target, produced);
    const GateCounts counts = count_gates(circuit);
    ordered_json report;
    report["fidelity"] = rep.fidelity;
    report["backend"] = backend;
    report["gates"] = counts.total;
    report["cnot"] = counts.cnot;
    report["controlled"] = counts.controlled_total;
    std::cout << report.dump() << "\n";
    if (rep.fidelity < 1.0 - tolerance) {
        ordered_json err;
        err["error"] = "VerificationFailed";
        err["message"] = "achieved fidelity below 1 - tolerance";
        err["fidelity"] = rep.fidelity;
        std::cerr << err.dump() << "\n";
        return 1;
    }
    const std::string text =
        format == "qasm" ? export_qasm(circuit) : write_circuit_json(circuit);
    emit(output, text);
    return 0;
}

int cmd_verify(const std::string& circuit_path, const std::string& state_path,
               double tolerance) {
    const Circuit circuit = load_circuit(circuit_path);
    const TargetState target = load_state(state_path);
    const TargetState produced = run_on_zero(circuit);
    const FidelityReport rep = fidelity(target, produced);
    ordered_json j;
    j["overlap"] = json_complex(rep.overlap);
    j["fidelity"] = rep.fidelity;
    j["global_phase"] = rep.global_phase;
    std::cout << j.dump() << "\n";
    return rep.fidelity >= 1.0 - tolerance ? 0 : 1;
}

int cmd_separability(const std::string& input) {
    const SeparabilityVerdict v = is_separable(build_tree(load_state(input)));
    ordered_json j;
    j["separable"] = v.separable;
    if (v.first_violation) {
        j["first_violation"] =
            ordered_json{v.first_violation->first, v.first_violation->second};
    }
    std::cout << j.dump() << "\n";
    return 0;
}

int cmd_qft(int n, bool check, const std::string& format, double tolerance,
            const std::optional<std::string>& output) {
    const Circuit circuit = qft_circuit(n);
    if (check) {
        const DenseMatrix u = circuit_unitary(circuit);
        const double scale = 1.0 / std::sqrt(double(u.dim));
        double dev = 0.0;
        for (std::size_t r = 0; r < u.dim; ++r) {
            for (std::size_t c = 0; c < u.dim; ++c) {
                const double ang =
                    2.0 * M_PI * double((r * c) % u.dim) / double(u.dim);
                dev = std::max(dev, std::abs(u.at(r, c) - std::polar(scale, ang)));
            }
        }
        ordered_json j;
        j["n"] = n;
        j["max_deviation"] = dev;
        std::cout << j.dump() << "\n";
        if (output) {
            emit(output, format == "json" ? write_circuit_json(circuit)
                                          : export_qasm(circuit));
        }
        return dev <= tolerance ? 0 : 1;
    }
    emit(output, format == "json" ? write_circuit_json(circuit)
                                  : export_qasm(circuit));
    return 0;
}

int cmd_prune(const std::string& input, const std::string& node_text,
              const std::string& pair_text, double tolerance,
              const std::optional<std::string>& output) {
    const PsiTree tree = load_tree(input);
    std::pair<PsiTree, PruneAnalysis> res = [&] {
        if (!pair_text.empty()) {
            const auto c1 = pair_text.find(':');
            const auto c2 = pair_text.find(':', c1 + 1);
            if (c1 == std::string::npos || c2 == std::string::npos) {
                throw Error(ErrorCode::ParseError,
                            "expected LEVEL:POSA:POSB, got '" + pair_text + "'");
            }
            int level = 0;
            std::size_t pa = 0, pb = 0;
            try {
                level = std::stoi(pair_text.substr(0, c1));
                pa = std::stoull(pair_text.substr(c1 + 1, c2 - c1 - 1));
                pb = std::stoull(pair_text.substr(c2 + 1));
            } catch (const std::exception&) {
                throw Error(ErrorCode::ParseError,
                            "expected LEVEL:POSA:POSB, got '" + pair_text + "'");
            }
            return prune_pair(tree, level, pa, pb, tolerance);
        }
        int level = 0;
        std::size_t pos = 0;
        parse_node_ref(node_text, level, pos);
        return prune(tree, NodeRef{level, pos}, tolerance);
    }();
    ordered_json j;
    j["kappa"] = json_complex(res.second.kappa);
    j["alpha"] = json_complex(res.second.alpha);
    j["beta"] = json_complex(res.second.beta);
    j["lambda_plus"] = res.second.lambda_plus;
    j["lambda_minus"] = res.second.lambda_minus;
    std::cout << j.dump() << "\n";
    emit(output, write_tree_json(res.first));
    return 0;
}

int cmd_schmidt(const std::string& input, double tolerance, bool generalized) {
    const TargetState state = load_state(input);
    ordered_json j;
    if (state.n == 2 && !generalized) {
        const Schmidt2qResult r = schmidt_2q(state);
        j["method"] = "svd";
        j["theta"] = r.theta;
        j["transform"] = json_transform(r.transform);
        j["global_phase"] = r.global_phase;
        j["residual"] = 0.0;
        j["ratio_minus_over_plus"] = r.ratio_minus_over_plus;
    } else {
        const GeneralizedSchmidtResult r =
            solve_generalized_schmidt(state, tolerance);
        j["method"] = "iterative";
        j["transform"] = json_transform(r.transform);
        j["global_phase"] = r.global_phase;
        j["residual"] = r.residual;
        j["start_index"] = r.start_index;
        j["warnings"] = r.warnings;
    }
    std::cout << j.dump() << "\n";
    return 0;
}

int cmd_tree(const std::string& input, bool dump, const std::string& format,
             const std::optional<std::string>& output) {
    const PsiTree tree = load_tree(input);
    if (dump && format != "json") {
        emit(output, write_tree_table(tree));
    } else {
        emit(output, write_tree_json(tree));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum state preparation toolkit"};
    app.require_subcommand(1);

    std::string input, circuit_path, state_path;
    std::optional<std::string> output;
    std::string backend = "pyramidal", format;
    double tolerance = 1e-9;
    bool sparse = false, literal_x = false, check = false, dump = false;
    bool generalized = false;
    int qft_n = 1;
    std::string node_text, pair_text;

    auto* synth = app.add_subcommand("synth", "synthesize a circuit");
    synth->add_option("input", input, "statevector file")->required();
    synth->add_option("--backend", backend, "subtree or pyramidal")
        ->check(CLI::IsMember({"subtree", "pyramidal"}));
    synth->add_option("--format", format, "qasm or json")
        ->check(CLI::IsMember({"qasm", "json"}));
    synth->add_option("--tolerance", tolerance, "fidelity gate");
    synth->add_flag("--sparse", sparse, "sparse pyramidal emission");
    synth->add_flag("--literal-x", literal_x, "X conjugation instead of up-controls");
    synth->add_option("--output", output, "circuit file (default stdout)");

    auto* verify = app.add_subcommand("verify", "replay a circuit against a state");
    verify->add_option("circuit", circuit_path, "circuit file")->required();
    verify->add_option("state", state_path, "statevector file")->required();
    verify->add_option("--tolerance", tolerance, "fidelity gate");

    auto* separability = app.add_subcommand("separability", "product-state test");
    separability->add_option("input", input, "statevector file")->required();

    auto* qft = app.add_subcommand("qft", "emit the Fourier circuit");
    qft->add_option("--n", qft_n, "qubit count")->required();
    qft->add_flag("--check", check, "compare against the DFT matrix");
    qft->add_option("--format", format, "qasm or json")
        ->check(CLI::IsMember({"qasm", "json"}));
    qft->add_option("--tolerance", tolerance, "deviation gate for --check");
    qft->add_option("--output", output, "circuit file (default stdout)");

    auto* prune_cmd = app.add_subcommand("prune", "cut a near-parallel divergence");
    prune_cmd->add_option("input", input, "statevector or tree file")->required();
    auto* node_opt = prune_cmd->add_option("--node", node_text, "divergence LEVEL:POS");
    prune_cmd->add_option("--pair", pair_text, "sibling pair LEVEL:POSA:POSB")
        ->excludes(node_opt);
    prune_cmd->add_option("--tolerance", tolerance, "max allowed 1-|kappa|");
    prune_cmd->add_option("--output", output, "pruned tree file (default stdout)");

    auto* schmidt = app.add_subcommand("schmidt", "Schmidt-form transform");
    schmidt->add_option("--input", input, "statevector file")->required();
    schmidt->add_option("--tolerance", tolerance, "residual tolerance");
    schmidt->add_flag("--generalized", generalized,
                      "force the iterative solver at n = 2");

    auto* tree_cmd = app.add_subcommand("tree", "decompose into branch parameters");
    tree_cmd->add_option("input", input, "statevector or tree file")->required();
    tree_cmd->add_flag("--dump", dump, "aligned per-node Bloch table");
    tree_cmd->add_option("--format", format, "table or json")
        ->check(CLI::IsMember({"table", "json"}));
    tree_cmd->add_option("--output", output, "destination (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            if (format.empty()) format = "json";
            if (backend == "subtree" && format == "qasm") {
                throw Error(ErrorCode::UnloweredGate,
                            "subtree backend emits multi-controlled gates; "
                            "qasm export is unavailable");
            }
            if (!(tolerance > 0.0)) {
                throw Error(ErrorCode::ParseError, "tolerance must be > 0");
            }
            return cmd_synth(input, backend, format, tolerance, sparse,
                             literal_x, output);
        }
        if (verify->parsed()) return cmd_verify(circuit_path, state_path, tolerance);
        if (separability->parsed()) return cmd_separability(input);
        if (qft->parsed()) {
            if (format.empty()) format = "qasm";
            return cmd_qft(qft_n, check, format, tolerance, output);
        }
        if (prune_cmd->parsed()) {
            if (node_text.empty() && pair_text.empty()) {
                throw Error(ErrorCode::ParseError,
                            "prune needs --node or --pair");
            }
            return cmd_prune(input, node_text, pair_text, tolerance, output);
        }
        if (schmidt->parsed()) return cmd_schmidt(input, tolerance, generalized);
        if (tree_cmd->parsed()) return cmd_tree(input, dump, format, output);
    } catch (const Error& e) {
        ordered_json err;
        err["error"] = error_code_name(e.code());
        err["message"] = e.what();
        std::cerr << err.dump() << "\n";
        return e.code() == ErrorCode::ConvergenceFailure ? 3 : 2;
    } catch (const std::exception& e) {
        ordered_json err;
        err["error"] = "Internal";
        err["message"] = e.what();
        std::cerr << err.dump() << "\n";
        return 2;
    }
    return 0;
}
