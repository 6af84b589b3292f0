#pragma once

#include "bigraph/bigraph.hpp"
#include "bigraph/rule.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace bigraph {

enum class Semantics { Brs, Pbrs, Sbrs, Abrs };

std::string_view to_string(Semantics s);

struct Predicate {
    std::string name;
    Bigraph pattern;
};

struct Action {
    std::string name;
    std::vector<std::string> rules;
};

// An elaborated, validated model ready for execution.
struct BrsSpec {
    Signature signature;
    Semantics semantics = Semantics::Brs;
    Bigraph init;
    std::vector<PriorityClass> classes;  // highest priority first
    std::vector<Predicate> preds;
    std::vector<Action> actions;         // abrs only
    std::map<std::string, std::vector<Param>> param_domains;

    // Index into `actions` for a rule name, -1 when absent.
    int action_of(const std::string& rule) const;
};

} // namespace bigraph
