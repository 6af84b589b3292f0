#pragma once

#include "bigraph/bigraph.hpp"
#include "bigraph/matcher.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bigraph {

// Exact non-negative rational used for probabilistic weights so that
// normalised probabilities such as 4/5 and 8/9 are computed exactly before
// the final conversion to double.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Rational of(std::int64_t n, std::int64_t d = 1);
    // Parses decimal text such as "4", "0.25", "1e-2".
    static Rational parse(const std::string& text);

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool positive() const { return num > 0; }

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    bool operator==(const Rational&) const = default;
};

std::string to_string(const Rational& r);

struct InstMap {
    std::vector<int> entries;  // per RHS site, the LHS site it copies

    bool operator==(const InstMap&) const = default;
};

struct RuleLabel {
    enum class Kind { Plain, Weight, Rate };

    Kind kind = Kind::Plain;
    Rational weight = Rational::of(1);
    double rate = 0.0;
    std::string text;  // label as written, for diagnostics and traces

    static RuleLabel plain() { return {}; }
    static RuleLabel with_weight(Rational w, std::string text);
    static RuleLabel with_rate(double r, std::string text);
};

struct ReactionRule {
    std::string name;
    Bigraph lhs;
    Bigraph rhs;
    std::optional<InstMap> inst;
    std::vector<MatchConstraint> constraints;
    RuleLabel label;

    // The given map, or the identity when site counts agree.
    InstMap effective_map() const;
};

struct PriorityClass {
    std::vector<ReactionRule> rules;
    bool instantaneous = false;
};

// Throws OuterInterfaceMismatch, InnerInterfaceMismatch, InvalidInstMap or
// LhsNotSolid with the diagnostics used by the command line tool.
void validate_rule(const ReactionRule& rule);

// Rewrites the occurrence. The result is ground when the state is.
Bigraph apply_at(const Bigraph& state, const ReactionRule& rule, const Occurrence& occ);

struct Application {
    Occurrence occurrence;
    Bigraph result;
};

// One entry per constraint-passing occurrence, in occurrence order.
std::vector<Application> all_applications(const Bigraph& state, const ReactionRule& rule);

// Constraint-passing occurrences only.
std::vector<Occurrence> enabled_occurrences(const Bigraph& state, const ReactionRule& rule);

} // namespace bigraph
