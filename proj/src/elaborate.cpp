#include "bigraph/format.hpp"
#include "bigraph/frontend.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace bigraph {

namespace detail {
ast::ExprPtr parse_expression(std::string_view source);
}

std::string_view to_string(Semantics s) {
    switch (s) {
    case Semantics::Brs: return "brs";
    case Semantics::Pbrs: return "pbrs";
    case Semantics::Sbrs: return "sbrs";
    case Semantics::Abrs: return "abrs";
    }
    return "brs";
}

int BrsSpec::action_of(const std::string& rule) const {
    for (std::size_t a = 0; a < actions.size(); ++a) {
        for (const auto& r : actions[a].rules) if (r == rule) return static_cast<int>(a);
    }
    return -1;
}

namespace {

using namespace ast;
using Env = std::map<std::string, Param>;

std::string where(Pos pos) {
    return "line " + std::to_string(pos.line) + ", column " + std::to_string(pos.column) + ": ";
}

[[noreturn]] void fail_at(ErrorKind kind, Pos pos, const std::string& what) { fail(kind, where(pos) + what); }

// Runs f, prefixing any library error with a source position.
template <class F>
auto located(Pos pos, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        const std::string msg = e.what();
        if (msg.rfind("line ", 0) == 0) throw;
        throw Error(e.kind(), where(pos) + msg);
    }
}

class Elaborator {
public:
    explicit Elaborator(const Signature* signature = nullptr) {
        if (signature) signature_ = *signature;
    }

    BrsSpec run(const Ast& tree) {
        for (const auto& d : tree.decls) {
            std::visit([&](const auto& decl) { declare(decl); }, d);
        }
        return std::move(spec_);
    }

    Bigraph expression(const Expr& e) { return build(e, {}); }

private:
    void claim(const std::string& name, Pos pos) {
        if (!names_.insert(name).second) fail_at(ErrorKind::DuplicateDefinition, pos, name + " is already defined");
    }

    void declare(const CtrlDecl& d) {
        claim(d.name, d.pos);
        Control c;
        c.name = d.name;
        c.arity = d.arity;
        c.atomic = d.atomic;
        c.param_sorts.assign(d.params.size(), ParamSort::Any);
        signature_.add(std::move(c));
    }

    void declare(const BigDecl& d) {
        claim(d.name, d.pos);
        bigs_.emplace(d.name, build(*d.body, {}));
    }

    void declare(const ReactDecl& d) {
        claim(d.name, d.pos);
        reacts_.emplace(d.name, &d);
    }

    void declare(const SetDecl& d) {
        claim(d.name, d.pos);
        sets_[d.name] = set_values(d);
    }

    std::vector<Param> set_values(const SetDecl& d) {
        std::vector<Param> values;
        for (const auto& v : d.values) {
            auto p = eval(*v, {});
            if (d.is_float) {
                if (auto i = std::get_if<std::int64_t>(&p)) p = static_cast<double>(*i);
                if (!std::holds_alternative<double>(p)) fail_at(ErrorKind::TypeError, v->pos, "float set holds a non-number");
            } else if (!std::holds_alternative<std::int64_t>(p)) {
                fail_at(ErrorKind::TypeError, v->pos, "int set holds a non-integer");
            }
            values.push_back(std::move(p));
        }
        return values;
    }

    // --- parameters ------------------------------------------------------

    Param eval(const Num& n, const Env& env) {
        auto numeric = [&](const Param& p, Pos pos) {
            if (std::holds_alternative<std::string>(p)) fail_at(ErrorKind::TypeError, pos, "arithmetic on a string");
            return p;
        };
        auto as_double = [](const Param& p) {
            if (auto i = std::get_if<std::int64_t>(&p)) return static_cast<double>(*i);
            return std::get<double>(p);
        };
        switch (n.kind) {
        case Num::Kind::Int: return n.int_value;
        case Num::Kind::Float: return n.float_value;
        case Num::Kind::String: return n.text;
        case Num::Kind::Var: {
            auto it = env.find(n.text);
            if (it == env.end()) fail_at(ErrorKind::UnknownIdentifier, n.pos, "unknown parameter " + n.text);
            return it->second;
        }
        case Num::Kind::Neg: {
            auto v = numeric(eval(*n.lhs, env), n.pos);
            if (auto i = std::get_if<std::int64_t>(&v)) return -*i;
            return -std::get<double>(v);
        }
        default: break;
        }
        const auto a = numeric(eval(*n.lhs, env), n.pos);
        const auto b = numeric(eval(*n.rhs, env), n.pos);
        const auto* ia = std::get_if<std::int64_t>(&a);
        const auto* ib = std::get_if<std::int64_t>(&b);
        if (ia && ib) {
            switch (n.kind) {
            case Num::Kind::Add: return *ia + *ib;
            case Num::Kind::Sub: return *ia - *ib;
            case Num::Kind::Mul: return *ia * *ib;
            default:
                if (*ib == 0) fail_at(ErrorKind::TypeError, n.pos, "division by zero");
                return *ia / *ib;
            }
        }
        const double x = as_double(a), y = as_double(b);
        switch (n.kind) {
        case Num::Kind::Add: return x + y;
        case Num::Kind::Sub: return x - y;
        case Num::Kind::Mul: return x * y;
        default: return x / y;
        }
    }

    // Weights are kept exact: literals are read as decimals, not doubles.
    Rational eval_weight(const Num& n, const Env& env) {
        switch (n.kind) {
        case Num::Kind::Int: return Rational::of(n.int_value);
        case Num::Kind::Float: return Rational::parse(n.text);
        case Num::Kind::String: fail_at(ErrorKind::TypeError, n.pos, "a weight must be numeric");
        case Num::Kind::Var: {
            const auto v = eval(n, env);
            if (auto i = std::get_if<std::int64_t>(&v)) return Rational::of(*i);
            if (auto d = std::get_if<double>(&v)) return Rational::parse(format_double(*d));
            fail_at(ErrorKind::TypeError, n.pos, "a weight must be numeric");
        }
        case Num::Kind::Neg: return Rational::of(-1) * eval_weight(*n.lhs, env);
        case Num::Kind::Add: return eval_weight(*n.lhs, env) + eval_weight(*n.rhs, env);
        case Num::Kind::Sub: return eval_weight(*n.lhs, env) + Rational::of(-1) * eval_weight(*n.rhs, env);
        case Num::Kind::Mul: return eval_weight(*n.lhs, env) * eval_weight(*n.rhs, env);
        case Num::Kind::Div: return eval_weight(*n.lhs, env) / eval_weight(*n.rhs, env);
        }
        return Rational::of(0);
    }

    double eval_rate(const Num& n, const Env& env) {
        const auto v = eval(n, env);
        if (auto i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
        if (auto d = std::get_if<double>(&v)) return *d;
        fail_at(ErrorKind::TypeError, n.pos, "a rate must be numeric");
    }

    // --- bigraphs --------------------------------------------------------

    Bigraph build(const Expr& e, const Env& env) {
        return located(e.pos, [&]() -> Bigraph {
            switch (e.kind) {
            case Expr::Kind::One: return one();
            case Expr::Kind::Id: return identity();
            case Expr::Kind::IdNames: return link_identity(*e.names);
            case Expr::Kind::Names: return idle_names(*e.names);
            case Expr::Kind::Atom: return atom(e, env);
            case Expr::Kind::Nest: return nest(build(*e.lhs, env), build(*e.rhs, env));
            case Expr::Kind::Merge: return merge(build(*e.lhs, env), build(*e.rhs, env));
            case Expr::Kind::Par: return parallel(build(*e.lhs, env), build(*e.rhs, env));
            case Expr::Kind::Close: return close(e.name, build(*e.lhs, env));
            case Expr::Kind::Share:
                return share(build(*e.lhs, env), e.placement, e.share_sites, build(*e.host, env));
            }
            return one();
        });
    }

    Bigraph atom(const Expr& e, const Env& env) {
        if (auto c = signature_.find(e.name)) {
            std::vector<Param> params;
            if (e.args) {
                if (c->param_sorts.empty()) fail(ErrorKind::TypeError, "Control " + e.name + " takes no parameters");
                for (const auto& a : *e.args) params.push_back(eval(*a, env));
            }
            if (params.size() != c->param_sorts.size()) {
                fail(ErrorKind::ArityMismatch, "Control " + e.name + " expects " + std::to_string(c->param_sorts.size()) +
                                                   " parameters");
            }
            return make_atom(c, std::move(params), e.names.value_or(std::vector<std::string>{}));
        }
        auto it = bigs_.find(e.name);
        if (it == bigs_.end()) fail(ErrorKind::UnknownIdentifier, "Unknown identifier " + e.name);
        if (e.args || e.names) fail(ErrorKind::TypeError, "Bigraph " + e.name + " takes no parameters or names");
        return it->second;
    }

    // --- rules -----------------------------------------------------------

    ReactionRule instantiate(const ReactDecl& d, const std::vector<Param>& values, Semantics sem) {
        Env env;
        std::string name = d.name;
        if (d.fun) {
            name += "(";
            for (std::size_t i = 0; i < values.size(); ++i) {
                env[d.params[i]] = values[i];
                name += (i ? "," : "") + to_string(values[i]);
            }
            name += ")";
        }
        ReactionRule r;
        r.name = name;
        r.lhs = build(*d.lhs, env);
        r.rhs = build(*d.rhs, env);
        if (d.inst) r.inst = InstMap{*d.inst};
        for (const auto& c : d.conditions) {
            MatchConstraint m;
            m.pattern = build(*c.pattern, env);
            using K = MatchConstraint::Kind;
            m.kind = c.in_ctx ? (c.negated ? K::AbsentInCtx : K::PresentInCtx)
                              : (c.negated ? K::AbsentInParam : K::PresentInParam);
            r.constraints.push_back(std::move(m));
        }
        if (d.label) {
            const auto& text = (*d.label)->text;
            if (sem == Semantics::Sbrs) {
                const double rate = eval_rate(**d.label, env);
                r.label = RuleLabel::with_rate(rate, text.empty() ? format_double(rate) : text);
            } else {
                const auto w = eval_weight(**d.label, env);
                r.label = RuleLabel::with_weight(w, text.empty() ? to_string(w) : text);
            }
        }
        located(d.pos, [&] {
            try {
                validate_rule(r);
            } catch (const Error& e) {
                throw Error(e.kind(), std::string(e.what()) + " (rule " + name + ")");
            }
            return 0;
        });
        return r;
    }

    // Expands a reference such as spawnProc(ns) over the named sets.
    std::vector<ReactionRule> expand(const RuleRef& ref, const std::map<std::string, std::vector<Param>>& sets,
                                     Semantics sem) {
        auto it = reacts_.find(ref.name);
        if (it == reacts_.end()) {
            fail_at(ErrorKind::UnknownRuleInBlock, ref.pos, "Unknown reaction rule " + ref.name);
        }
        const auto& d = *it->second;
        const std::size_t want = d.params.size();
        const std::size_t got = ref.args ? ref.args->size() : 0;
        if (want != got) {
            fail_at(ErrorKind::ArityMismatch, ref.pos,
                    "Rule " + ref.name + " expects " + std::to_string(want) + " arguments, got " + std::to_string(got));
        }
        std::vector<std::vector<Param>> domains;
        for (std::size_t i = 0; i < got; ++i) {
            const auto& a = *(*ref.args)[i];
            if (a.kind == Num::Kind::Var) {
                auto s = sets.find(a.text);
                if (s == sets.end()) fail_at(ErrorKind::UnknownIdentifier, a.pos, "Unknown set " + a.text);
                domains.push_back(s->second);
            } else {
                domains.push_back({eval(a, {})});
            }
        }
        std::vector<ReactionRule> out;
        std::vector<Param> values;
        std::function<void(std::size_t)> product = [&](std::size_t i) {
            if (i == domains.size()) {
                out.push_back(instantiate(d, values, sem));
                return;
            }
            for (const auto& v : domains[i]) {
                values.push_back(v);
                product(i + 1);
                values.pop_back();
            }
        };
        product(0);
        return out;
    }

    void declare(const Block& b) {
        auto sets = sets_;
        for (const auto& s : b.sets) {
            if (sets.count(s.name) && !sets_.count(s.name)) fail_at(ErrorKind::DuplicateDefinition, s.pos, s.name + " is already defined");
            sets[s.name] = set_values(s);
        }
        spec_.signature = signature_;
        spec_.semantics = b.semantics;
        spec_.param_domains = sets;
        if (!b.init) fail_at(ErrorKind::SyntaxError, b.pos, "system block has no init");
        spec_.init = build(**b.init, {});
        if (!is_ground(spec_.init)) fail_at(ErrorKind::InitNotGround, (*b.init)->pos, "Init bigraph is not ground");

        std::set<std::string> seen;
        for (const auto& c : b.classes) {
            PriorityClass pc;
            pc.instantaneous = c.instantaneous;
            for (const auto& ref : c.rules) {
                for (auto& r : expand(ref, sets, b.semantics)) {
                    if (!seen.insert(r.name).second) {
                        fail_at(ErrorKind::DuplicateDefinition, ref.pos, "Rule " + r.name + " appears twice in the system");
                    }
                    check_label(r, pc.instantaneous, b.semantics, ref.pos);
                    pc.rules.push_back(std::move(r));
                }
            }
            std::set<RuleLabel::Kind> kinds;
            for (const auto& r : pc.rules) kinds.insert(r.label.kind);
            if (kinds.size() > 1) fail_at(ErrorKind::MixedLabelKinds, b.pos, "A priority class mixes labelled and plain rules");
            spec_.classes.push_back(std::move(pc));
        }

        // Unreferenced reactions are still checked.
        for (const auto& [name, d] : reacts_) {
            if (!d->fun && !seen.count(name)) instantiate(*d, {}, b.semantics);
        }

        for (const auto& p : b.preds) {
            auto it = bigs_.find(p);
            if (it == bigs_.end()) fail_at(ErrorKind::UnknownIdentifier, b.pos, "Unknown predicate " + p);
            if (!is_solid(it->second)) fail_at(ErrorKind::PatternNotSolid, b.pos, "Predicate " + p + " is not solid");
            spec_.preds.push_back({p, it->second});
        }

        if (b.semantics == Semantics::Abrs) {
            if (!b.has_actions) fail_at(ErrorKind::ActionPartitionError, b.pos, "An abrs needs an actions declaration");
            std::map<std::string, int> owner;
            for (const auto& a : b.actions) {
                Action act;
                act.name = a.name;
                for (const auto& ref : a.rules) {
                    auto it = reacts_.find(ref.name);
                    if (it == reacts_.end()) fail_at(ErrorKind::UnknownRuleInBlock, ref.pos, "Unknown reaction rule " + ref.name);
                    for (auto& r : expand(ref, sets, b.semantics)) {
                        if (!seen.count(r.name)) {
                            fail_at(ErrorKind::ActionPartitionError, ref.pos, "Action " + a.name + " uses " + r.name +
                                                                                  ", which is not in the rules");
                        }
                        if (owner.count(r.name)) {
                            fail_at(ErrorKind::ActionPartitionError, ref.pos, "Rule " + r.name + " is in two actions");
                        }
                        owner[r.name] = 1;
                        act.rules.push_back(r.name);
                    }
                }
                spec_.actions.push_back(std::move(act));
            }
            for (const auto& c : spec_.classes) {
                if (c.instantaneous) continue;
                for (const auto& r : c.rules) {
                    if (!owner.count(r.name)) fail_at(ErrorKind::ActionPartitionError, b.pos, "Rule " + r.name + " has no action");
                }
            }
        } else if (b.has_actions) {
            fail_at(ErrorKind::ActionPartitionError, b.pos, "Actions are only allowed in an abrs");
        }
    }

    // Plain rules are allowed in instantaneous classes of every kind of
    // system; elsewhere the label must match the block kind.
    static void check_label(const ReactionRule& r, bool instantaneous, Semantics sem, Pos pos) {
        const auto k = r.label.kind;
        if (sem == Semantics::Brs) {
            if (k != RuleLabel::Kind::Plain) {
                fail_at(ErrorKind::MixedLabelKinds, pos, "Rule " + r.name + " is labelled but the system is a brs");
            }
            return;
        }
        if (k == RuleLabel::Kind::Plain) {
            if (!instantaneous) {
                fail_at(ErrorKind::MixedLabelKinds, pos,
                        "Rule " + r.name + " needs a " + (sem == Semantics::Sbrs ? "rate" : "weight") + " in a " +
                            std::string(to_string(sem)));
            }
            return;
        }
    }

    Signature signature_;
    std::set<std::string> names_;
    std::map<std::string, Bigraph> bigs_;
    std::map<std::string, const ReactDecl*> reacts_;
    std::map<std::string, std::vector<Param>> sets_;
    BrsSpec spec_;
};

} // namespace

BrsSpec elaborate(const ast::Ast& tree) { return Elaborator().run(tree); }

BrsSpec load_model(std::string_view source) {
    const auto tree = parse(source);
    return elaborate(tree);
}

BrsSpec load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "Cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_model(ss.str());
}

Bigraph parse_bigraph(std::string_view expr, const Signature& signature) {
    const auto tree = detail::parse_expression(expr);
    return Elaborator(&signature).expression(*tree);
}

} // namespace bigraph
