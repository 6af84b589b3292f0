#pragma once

#include "bigraph/engine.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace bigraph {

// PRISM explicit transitions. brs/pbrs/sbrs: "N T" then "src dst value";
// abrs: "N C T" then "src choice dst prob action". Deadlocks get a
// probability-1 self-loop except under sbrs. Throws PartialSystem on a
// truncated system unless allow_partial.
std::string write_tra(const TransitionSystem& ts, bool allow_partial = false);

// PRISM label file: `0="init" 1="p" ...` then `state: idx ...`.
std::string write_labels(const TransitionSystem& ts);

std::string write_dot(const TransitionSystem& ts);

struct TraLine {
    int src = 0;
    int choice = -1;  // abrs only
    int dst = 0;
    double value = 0.0;
    std::string action;
};

struct TraFile {
    int states = 0;
    int choices = -1;  // abrs only
    std::vector<TraLine> lines;
};

TraFile read_tra(std::string_view text, bool with_choices);

// One TSV line per step: step, rule, label, time.
std::string write_trace(const SimTrace& trace);

// Label file over trace positions (state i is step i).
std::string write_trace_labels(const SimTrace& trace, const BrsSpec& spec);

} // namespace bigraph
