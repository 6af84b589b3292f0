#include "bigraph/engine.hpp"

#include <cmath>
#include <exception>
#include <random>
#include <unordered_map>

namespace bigraph {

std::optional<EnabledClass> enabled_class(const Bigraph& state, const BrsSpec& spec) {
    for (std::size_t c = 0; c < spec.classes.size(); ++c) {
        EnabledClass ec;
        ec.class_index = static_cast<int>(c);
        for (const auto& rule : spec.classes[c].rules) {
            for (auto& occ : enabled_occurrences(state, rule)) ec.matches.push_back({&rule, std::move(occ)});
        }
        if (!ec.matches.empty()) return ec;
    }
    return std::nullopt;
}

namespace {

// Iso-classes of bigraphs, looked up by canonical key.
class StateSet {
public:
    // Index of an iso_equal member, or -1.
    int find(const Bigraph& b, const CanonicalKey& key, const std::vector<Bigraph>& members) const {
        auto it = index_.find(key);
        if (it == index_.end()) return -1;
        for (int i : it->second) {
            if (iso_equal(members[i], b)) return i;
        }
        return -1;
    }

    void add(const CanonicalKey& key, int i) { index_[key].push_back(i); }

private:
    std::unordered_map<CanonicalKey, std::vector<int>, CanonicalKeyHash> index_;
};

bool instantaneous_enabled(const std::optional<EnabledClass>& ec, const BrsSpec& spec) {
    return ec && spec.classes[ec->class_index].instantaneous;
}

// All fixpoints reachable by any order of instantaneous reductions.
void collect_fixpoints(const Bigraph& state, const BrsSpec& spec, std::vector<Bigraph>& seen, StateSet& seen_index,
                       std::vector<Bigraph>& finals, StateSet& finals_index, std::size_t budget) {
    const auto key = canonical_key(state);
    if (seen_index.find(state, key, seen) >= 0) return;
    if (seen.size() >= budget) fail(ErrorKind::DivergentInstantaneous, "Instantaneous rules do not terminate");
    seen_index.add(key, static_cast<int>(seen.size()));
    seen.push_back(state);
    const auto ec = enabled_class(state, spec);
    if (!instantaneous_enabled(ec, spec)) {
        if (finals_index.find(state, key, finals) < 0) {
            finals_index.add(key, static_cast<int>(finals.size()));
            finals.push_back(state);
        }
        return;
    }
    for (const auto& m : ec->matches) {
        collect_fixpoints(apply_at(state, *m.rule, m.occurrence), spec, seen, seen_index, finals, finals_index, budget);
    }
}

void check_confluent(const Bigraph& state, const BrsSpec& spec, const EngineOptions& opts) {
    std::vector<Bigraph> seen, finals;
    StateSet seen_index, finals_index;
    collect_fixpoints(state, spec, seen, seen_index, finals, finals_index, opts.max_reductions);
    if (finals.size() > 1) {
        fail(ErrorKind::NonConfluence, "Instantaneous rules are not confluent: " + std::to_string(finals.size()) +
                                           " distinct results");
    }
}

} // namespace

Bigraph reduce_instantaneous(const Bigraph& state, const BrsSpec& spec, const EngineOptions& opts) {
    Bigraph cur = state;
    std::size_t steps = 0;
    for (;;) {
        auto ec = enabled_class(cur, spec);
        if (!instantaneous_enabled(ec, spec)) return cur;
        if (steps == 0 && opts.check_confluence && ec->matches.size() <= opts.confluence_limit) {
            check_confluent(cur, spec, opts);
        }
        if (++steps > opts.max_reductions) {
            fail(ErrorKind::DivergentInstantaneous,
                 "Instantaneous rules did not settle after " + std::to_string(opts.max_reductions) + " reductions");
        }
        const ReactionRule* first = ec->matches.front().rule;
        std::optional<Bigraph> best;
        CanonicalKey best_key;
        for (const auto& m : ec->matches) {
            if (m.rule != first) break;
            auto next = apply_at(cur, *m.rule, m.occurrence);
            const auto key = canonical_key(next);
            if (!best || std::tie(key.hi, key.lo) < std::tie(best_key.hi, best_key.lo)) {
                best = std::move(next);
                best_key = key;
            }
        }
        cur = std::move(*best);
    }
}

namespace {

struct Group {
    Successor succ;
    CanonicalKey key;
    Rational mass = Rational::of(0);
};

std::vector<Group> distribution(const Bigraph& state, const BrsSpec& spec, const EngineOptions& opts) {
    const auto ec = enabled_class(state, spec);
    if (!ec) return {};
    std::vector<Group> groups;
    std::unordered_map<CanonicalKey, std::vector<int>, CanonicalKeyHash> index;
    for (const auto& m : ec->matches) {
        auto next = reduce_instantaneous(apply_at(state, *m.rule, m.occurrence), spec, opts);
        const auto key = canonical_key(next);
        const int action = spec.semantics == Semantics::Abrs ? spec.action_of(m.rule->name) : -1;
        int g = -1;
        for (int i : index[key]) {
            if (groups[i].succ.label.action == action && iso_equal(groups[i].succ.state, next)) {
                g = i;
                break;
            }
        }
        if (g < 0) {
            g = static_cast<int>(groups.size());
            index[key].push_back(g);
            Group fresh;
            fresh.succ.state = std::move(next);
            fresh.succ.label.action = action;
            fresh.key = key;
            groups.push_back(std::move(fresh));
        }
        auto& grp = groups[g];
        grp.succ.rules.insert(m.rule->name);
        switch (spec.semantics) {
        case Semantics::Brs: break;
        case Semantics::Sbrs: grp.succ.label.rate += m.rule->label.rate; break;
        case Semantics::Pbrs:
        case Semantics::Abrs: grp.mass = grp.mass + m.rule->label.weight; break;
        }
    }
    switch (spec.semantics) {
    case Semantics::Brs:
        for (auto& g : groups) g.succ.label.probability = Rational::of(1, static_cast<std::int64_t>(groups.size()));
        break;
    case Semantics::Sbrs:
        for (auto& g : groups) g.succ.label.kind = TransitionLabel::Kind::Rate;
        break;
    case Semantics::Pbrs:
    case Semantics::Abrs: {
        std::map<int, Rational> total;
        for (const auto& g : groups) {
            auto [it, fresh] = total.try_emplace(g.succ.label.action, g.mass);
            if (!fresh) it->second = it->second + g.mass;
        }
        for (auto& g : groups) {
            g.succ.label.kind = TransitionLabel::Kind::Probability;
            g.succ.label.probability = g.mass / total.at(g.succ.label.action);
        }
        break;
    }
    }
    return groups;
}

TransitionSystem run_explore(const BrsSpec& spec, std::size_t max_states, const EngineOptions& opts, bool parallel) {
    if (!is_ground(spec.init)) fail(ErrorKind::InitNotGround, "Init bigraph is not ground");
    TransitionSystem ts;
    ts.semantics = spec.semantics;
    for (const auto& p : spec.preds) ts.predicates.push_back(p.name);
    for (const auto& a : spec.actions) ts.actions.push_back(a.name);

    StateSet store;
    auto init = reduce_instantaneous(spec.init, spec, opts);
    if (max_states == 0) {
        ts.partial = true;
    } else {
        store.add(canonical_key(init), 0);
        ts.states.push_back(std::move(init));
    }

    std::vector<int> frontier;
    if (!ts.states.empty()) frontier.push_back(0);
    while (!frontier.empty()) {
        const auto n = static_cast<std::ptrdiff_t>(frontier.size());
        std::vector<std::vector<Group>> succ(frontier.size());
        std::vector<std::exception_ptr> errors(frontier.size());
        // Successor computation only reads the store; insertion below is
        // serial and in frontier order, so indices match the serial run.
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            try {
                succ[i] = distribution(ts.states[frontier[i]], spec, opts);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
        for (const auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
        std::vector<int> next;
        for (std::size_t i = 0; i < frontier.size(); ++i) {
            for (auto& g : succ[i]) {
                int dst = store.find(g.succ.state, g.key, ts.states);
                if (dst < 0) {
                    if (ts.states.size() >= max_states) {
                        ts.partial = true;
                        continue;
                    }
                    dst = static_cast<int>(ts.states.size());
                    store.add(g.key, dst);
                    ts.states.push_back(std::move(g.succ.state));
                    next.push_back(dst);
                }
                ts.transitions.push_back({frontier[i], dst, g.succ.label, std::move(g.succ.rules)});
            }
        }
        frontier = std::move(next);
    }

    ts.labelling.assign(spec.preds.size(), std::vector<bool>(ts.states.size(), false));
    const auto states = static_cast<std::ptrdiff_t>(ts.states.size());
    for (std::size_t p = 0; p < spec.preds.size(); ++p) {
        std::vector<char> hit(ts.states.size(), 0);
#pragma omp parallel for schedule(dynamic, 4) if (parallel)
        for (std::ptrdiff_t s = 0; s < states; ++s) hit[s] = matches_predicate(ts.states[s], spec.preds[p].pattern);
        for (std::size_t s = 0; s < ts.states.size(); ++s) ts.labelling[p][s] = hit[s] != 0;
    }
    return ts;
}

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Index into weights, drawn proportionally.
std::size_t pick(const std::vector<double>& weights, std::mt19937_64& rng) {
    double total = 0.0;
    for (double w : weights) total += w;
    double x = uniform(rng) * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (x < weights[i]) return i;
        x -= weights[i];
    }
    return weights.size() - 1;
}

} // namespace

std::vector<Successor> step_distribution(const Bigraph& state, const BrsSpec& spec, const EngineOptions& opts) {
    std::vector<Successor> out;
    for (auto& g : distribution(state, spec, opts)) out.push_back(std::move(g.succ));
    return out;
}

TransitionSystem explore(const BrsSpec& spec, std::size_t max_states, const EngineOptions& opts) {
    return run_explore(spec, max_states, opts, true);
}

TransitionSystem explore_serial(const BrsSpec& spec, std::size_t max_states, const EngineOptions& opts) {
    return run_explore(spec, max_states, opts, false);
}

SimTrace simulate(const BrsSpec& spec, std::size_t max_steps, std::uint64_t seed, const EngineOptions& opts) {
    if (!is_ground(spec.init)) fail(ErrorKind::InitNotGround, "Init bigraph is not ground");
    SimTrace trace;
    trace.seed = seed;
    std::mt19937_64 rng(seed);
    Bigraph cur = reduce_instantaneous(spec.init, spec, opts);
    trace.steps.push_back({cur, "init", "-", 0.0});
    for (std::size_t step = 0; step < max_steps; ++step) {
        const auto ec = enabled_class(cur, spec);
        if (!ec) {
            trace.deadlock = true;
            break;
        }
        const auto& matches = ec->matches;
        std::size_t chosen = 0;
        std::string label = "-";
        switch (spec.semantics) {
        case Semantics::Brs:
            chosen = std::min(matches.size() - 1, static_cast<std::size_t>(uniform(rng) * matches.size()));
            break;
        case Semantics::Pbrs: {
            std::vector<double> w;
            for (const auto& m : matches) w.push_back(m.rule->label.weight.value());
            chosen = pick(w, rng);
            break;
        }
        case Semantics::Sbrs: {
            std::vector<double> w;
            double total = 0.0;
            for (const auto& m : matches) {
                w.push_back(m.rule->label.rate);
                total += m.rule->label.rate;
            }
            chosen = pick(w, rng);
            trace.time += -std::log(1.0 - uniform(rng)) / total;
            break;
        }
        case Semantics::Abrs: {
            std::vector<int> actions;
            for (const auto& m : matches) {
                const int a = spec.action_of(m.rule->name);
                if (std::find(actions.begin(), actions.end(), a) == actions.end()) actions.push_back(a);
            }
            std::sort(actions.begin(), actions.end());
            const int a = actions[std::min(actions.size() - 1, static_cast<std::size_t>(uniform(rng) * actions.size()))];
            std::vector<double> w;
            for (const auto& m : matches) w.push_back(spec.action_of(m.rule->name) == a ? m.rule->label.weight.value() : 0.0);
            chosen = pick(w, rng);
            label = spec.actions[a].name + ":";
            break;
        }
        }
        const auto& m = matches[chosen];
        if (m.rule->label.kind != RuleLabel::Kind::Plain) {
            label = (label == "-" ? "" : label) + m.rule->label.text;
        }
        cur = reduce_instantaneous(apply_at(cur, *m.rule, m.occurrence), spec, opts);
        trace.steps.push_back({cur, m.rule->name, label, trace.time});
    }
    return trace;
}

} // namespace bigraph
