// bigengine: validate, simulate or fully explore a .big model.
#include "bigraph/export.hpp"
#include "bigraph/frontend.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

using namespace bigraph;

namespace {

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "Cannot write " + path);
    out << text;
    if (!out) fail(ErrorKind::Io, "Cannot write " + path);
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("BIGENGINE_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            fail(ErrorKind::TypeError, std::string("BIGENGINE_SEED is not an integer: ") + env);
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bigraphical reactive system engine"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string model;
    std::optional<std::uint64_t> seed;
    bool allow_partial = false;
    EngineOptions opts;
    app.add_option("--seed", seed, "RNG seed (falls back to BIGENGINE_SEED, then 0)");
    app.add_flag("--allow-partial", allow_partial, "Export a truncated transition system");
    app.add_flag("--check-confluence", opts.check_confluence, "Check instantaneous rules for confluence");

    auto* validate = app.add_subcommand("validate", "Parse, elaborate and validate a model");
    validate->add_option("model", model, "Model file")->required();

    std::size_t max_steps = 1000;
    std::string sim_labels;
    auto* sim = app.add_subcommand("sim", "Print one simulation trace as TSV");
    sim->add_option("-S,--steps", max_steps, "Maximum trace length")->capture_default_str();
    sim->add_option("-l,--labels", sim_labels, "Write predicate labels of trace states");
    sim->add_option("model", model, "Model file")->required();

    std::size_t max_states = 10000;
    std::string labels, tra, dot;
    auto* full = app.add_subcommand("full", "Explore the whole state space");
    full->add_option("-M,--max-states", max_states, "Maximum number of stored states")->capture_default_str();
    full->add_option("-l,--labels", labels, "Label file output");
    full->add_option("-p,--tra", tra, "Transition file output");
    full->add_option("--dot", dot, "Graphviz output of the transition system");
    full->add_option("model", model, "Model file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        const auto spec = load_model_file(model);
        if (*validate) {
            std::cout << "ok: " << to_string(spec.semantics) << ", " << spec.signature.size() << " controls\n";
        } else if (*sim) {
            const auto trace = simulate(spec, max_steps, resolve_seed(seed), opts);
            std::cout << write_trace(trace);
            if (!sim_labels.empty()) write_file(sim_labels, write_trace_labels(trace, spec));
        } else {
            const auto ts = explore(spec, max_states, opts);
            if (ts.partial && !allow_partial) {
                fail(ErrorKind::PartialSystem, "State bound " + std::to_string(max_states) +
                                                   " reached; the transition system is partial (use --allow-partial)");
            }
            if (!tra.empty()) write_file(tra, write_tra(ts, allow_partial));
            if (!labels.empty()) write_file(labels, write_labels(ts));
            if (!dot.empty()) write_file(dot, write_dot(ts));
            std::cout << "states: " << ts.states.size() << ", transitions: " << ts.transitions.size()
                      << (ts.partial ? " (partial)" : "") << '\n';
        }
    } catch (const Error& e) {
        std::cerr << "Error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
