// Times the OpenMP exploration against the serial reference and checks that
// both produce the same transition system.

#include "bigraph/engine.hpp"
#include "bigraph/export.hpp"
#include "bigraph/frontend.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <vector>

using namespace bigraph;

namespace {

double best_of(int repeats, const std::function<void()>& body) {
    double best = 1e300;
    for (int i = 0; i < repeats; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        body();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Serial vs parallel state-space exploration"};
    std::vector<std::string> models;
    std::size_t max_states = 3000;
    int repeats = 3;
    app.add_option("models", models, "Model files")->required()->check(CLI::ExistingFile);
    app.add_option("-M,--max-states", max_states, "State bound per model")->capture_default_str();
    app.add_option("-r,--repeats", repeats, "Runs per variant; the fastest counts")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    std::printf("threads: %d\n", omp_get_max_threads());
    std::printf("%-28s %8s %8s %10s %10s %8s %s\n", "model", "states", "trans", "serial s", "parallel s", "speedup",
                "same");
    for (const auto& path : models) {
        const auto spec = load_model_file(path);
        TransitionSystem serial, parallel;
        const double ts = best_of(repeats, [&] { serial = explore_serial(spec, max_states); });
        const double tp = best_of(repeats, [&] { parallel = explore(spec, max_states); });
        const bool same = write_tra(serial, true) == write_tra(parallel, true) &&
                          write_labels(serial) == write_labels(parallel);
        std::printf("%-28s %8zu %8zu %10.4f %10.4f %8.2f %s\n", std::filesystem::path(path).stem().c_str(),
                    serial.states.size(), serial.transitions.size(), ts, tp, ts / tp, same ? "yes" : "NO");
        if (!same) return 1;
    }
    return 0;
}
