#pragma once

#include "bigraph/iso.hpp"
#include "bigraph/spec.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace bigraph {

struct EngineOptions {
    std::size_t max_reductions = 1'000'000;
    // Exhaustively compares reduction orders on states with at most this
    // many instantaneous matches (0 disables the check).
    bool check_confluence = false;
    std::size_t confluence_limit = 6;
};

struct RuleMatch {
    const ReactionRule* rule = nullptr;
    Occurrence occurrence;
};

struct EnabledClass {
    int class_index = -1;
    std::vector<RuleMatch> matches;  // rule order, then occurrence order
};

// First priority class with a constraint-passing occurrence; nullopt is a
// deadlock.
std::optional<EnabledClass> enabled_class(const Bigraph& state, const BrsSpec& spec);

// Applies instantaneous classes until the highest enabled class is not
// instantaneous. Ties are broken by the smallest canonical key among the
// results of the first enabled rule.
Bigraph reduce_instantaneous(const Bigraph& state, const BrsSpec& spec, const EngineOptions& opts = {});

struct TransitionLabel {
    enum class Kind { None, Probability, Rate };

    Kind kind = Kind::None;
    Rational probability = Rational::of(1);  // brs share and pbrs/abrs
    double rate = 0.0;                       // sbrs
    int action = -1;                         // abrs

    double value() const { return kind == Kind::Rate ? rate : probability.value(); }
};

struct Successor {
    Bigraph state;  // settled
    TransitionLabel label;
    std::set<std::string> rules;
};

// Successors of a settled state, merged up to isomorphism. Ordered by first
// appearance (per action for abrs).
std::vector<Successor> step_distribution(const Bigraph& state, const BrsSpec& spec, const EngineOptions& opts = {});

struct Transition {
    int src = 0;
    int dst = 0;
    TransitionLabel label;
    std::set<std::string> rules;
};

struct TransitionSystem {
    Semantics semantics = Semantics::Brs;
    std::vector<Bigraph> states;  // index 0 is the settled init
    std::vector<Transition> transitions;
    std::vector<std::string> predicates;
    std::vector<std::vector<bool>> labelling;  // [predicate][state]
    std::vector<std::string> actions;
    bool partial = false;
};

TransitionSystem explore(const BrsSpec& spec, std::size_t max_states, const EngineOptions& opts = {});

// Single-threaded reference implementation; produces identical output.
TransitionSystem explore_serial(const BrsSpec& spec, std::size_t max_states, const EngineOptions& opts = {});

struct SimStep {
    Bigraph state;
    std::string rule;   // "init" for the first step
    std::string label;  // "-" when unlabelled
    double time = 0.0;  // accumulated, sbrs only
};

struct SimTrace {
    std::vector<SimStep> steps;
    std::uint64_t seed = 0;
    double time = 0.0;
    bool deadlock = false;
};

SimTrace simulate(const BrsSpec& spec, std::size_t max_steps, std::uint64_t seed, const EngineOptions& opts = {});

} // namespace bigraph
