#pragma once

#include "bigraph/spec.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace bigraph {

namespace ast {

struct Pos {
    int line = 1;
    int column = 1;
};

// Parameter arithmetic.
struct Num;
using NumPtr = std::shared_ptr<const Num>;
struct Num {
    enum class Kind { Int, Float, String, Var, Neg, Add, Sub, Mul, Div } kind = Kind::Int;
    std::int64_t int_value = 0;
    double float_value = 0.0;
    std::string text;  // literal spelling, variable name or string contents
    NumPtr lhs, rhs;
    Pos pos;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;
struct Expr {
    enum class Kind { One, Id, IdNames, Names, Atom, Nest, Merge, Par, Close, Share } kind = Kind::One;
    std::string name;                     // Atom identifier / Close name
    std::optional<std::vector<NumPtr>> args;
    std::optional<std::vector<std::string>> names;
    ExprPtr lhs, rhs;                     // Nest (outer, inner), Merge, Par, Close body in lhs
    ExprPtr host;                         // Share
    std::vector<std::vector<int>> placement;
    int share_sites = 0;
    Pos pos;
};

struct Condition {
    bool negated = false;
    bool in_ctx = false;
    ExprPtr pattern;
    Pos pos;
};

struct CtrlDecl {
    std::string name;
    bool atomic = false;
    bool fun = false;
    std::vector<std::string> params;
    int arity = 0;
    Pos pos;
};

struct BigDecl {
    std::string name;
    ExprPtr body;
    Pos pos;
};

struct ReactDecl {
    std::string name;
    bool fun = false;
    std::vector<std::string> params;
    ExprPtr lhs, rhs;
    std::optional<NumPtr> label;  // -[w]->
    std::optional<std::vector<int>> inst;
    std::vector<Condition> conditions;
    Pos pos;
};

struct SetDecl {
    bool is_float = false;
    std::string name;
    std::vector<NumPtr> values;
    Pos pos;
};

struct RuleRef {
    std::string name;
    std::optional<std::vector<NumPtr>> args;
    Pos pos;
};

struct RuleClass {
    bool instantaneous = false;
    std::vector<RuleRef> rules;
};

struct ActionDecl {
    std::string name;
    std::vector<RuleRef> rules;
    Pos pos;
};

struct Block {
    Semantics semantics = Semantics::Brs;
    std::vector<SetDecl> sets;
    std::optional<ExprPtr> init;
    std::vector<RuleClass> classes;
    std::vector<std::string> preds;
    std::vector<ActionDecl> actions;
    bool has_actions = false;
    Pos pos;
};

using Decl = std::variant<CtrlDecl, BigDecl, ReactDecl, SetDecl, Block>;

struct Ast {
    std::vector<Decl> decls;
};

} // namespace ast

// Syntax only; throws SyntaxError with line and column. A model must
// contain exactly one brs/pbrs/sbrs/abrs block.
ast::Ast parse(std::string_view source);

// Expands parameterised declarations, builds bigraphs and rules, and
// validates the result.
BrsSpec elaborate(const ast::Ast& tree);

BrsSpec load_model(std::string_view source);
BrsSpec load_model_file(const std::string& path);

// A single bigraph expression over an existing signature.
Bigraph parse_bigraph(std::string_view expr, const Signature& signature);

// Textual forms that parse back to iso_equal values. Bigraphs with sharing
// below the top level or with inner names other than identity links are
// rejected with Unsupported.
std::string pretty_print(const Bigraph& b);
std::string pretty_print(const ReactionRule& rule);
std::string pretty_print(const BrsSpec& spec);

} // namespace bigraph
