#include "bigraph/frontend.hpp"

#include <cctype>
#include <set>

namespace bigraph {

namespace {

using namespace ast;

enum class Tok {
    End, Ident, Int, Float, String,
    Dot, Bar, DBar, Slash, LParen, RParen, LBrace, RBrace, LBrack, RBrack,
    Comma, Semi, Eq, Arrow, WeightOpen, WeightClose, At, Bang, Plus, Minus, Star,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    Pos pos;
};

const std::set<std::string> kKeywords = {
    "ctrl", "atomic", "fun", "big", "react", "begin", "end", "init", "rules", "preds", "actions",
    "int", "float", "if", "in", "param", "ctx", "share", "by", "id",
};

[[noreturn]] void syntax_error(Pos pos, const std::string& what) {
    fail(ErrorKind::SyntaxError,
         "Syntax error at line " + std::to_string(pos.line) + ", column " + std::to_string(pos.column) + ": " + what);
}

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    Pos pos;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (src[i] == '\n') {
                ++pos.line;
                pos.column = 1;
            } else {
                ++pos.column;
            }
            ++i;
        }
    };
    auto at = [&](std::size_t k) { return i + k < src.size() ? src[i + k] : '\0'; };
    auto digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        Token t;
        t.pos = pos;
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t n = 0;
            while (std::isalnum(static_cast<unsigned char>(at(n))) || at(n) == '_') ++n;
            t.kind = Tok::Ident;
            t.text = std::string(src.substr(i, n));
            advance(n);
        } else if (digit(c)) {
            std::size_t n = 0;
            while (digit(at(n))) ++n;
            t.kind = Tok::Int;
            if (at(n) == '.' && digit(at(n + 1))) {
                t.kind = Tok::Float;
                ++n;
                while (digit(at(n))) ++n;
            }
            if ((at(n) == 'e' || at(n) == 'E') &&
                (digit(at(n + 1)) || ((at(n + 1) == '-' || at(n + 1) == '+') && digit(at(n + 2))))) {
                t.kind = Tok::Float;
                n += 2;
                while (digit(at(n))) ++n;
            }
            t.text = std::string(src.substr(i, n));
            advance(n);
        } else if (c == '"') {
            std::size_t n = 1;
            while (i + n < src.size() && src[i + n] != '"' && src[i + n] != '\n') ++n;
            if (at(n) != '"') syntax_error(pos, "unterminated string");
            t.kind = Tok::String;
            t.text = std::string(src.substr(i + 1, n - 1));
            advance(n + 1);
        } else {
            auto sym = [&](Tok k, std::size_t n) {
                t.kind = k;
                t.text = std::string(src.substr(i, n));
                advance(n);
            };
            switch (c) {
            case '.': sym(Tok::Dot, 1); break;
            case '|': at(1) == '|' ? sym(Tok::DBar, 2) : sym(Tok::Bar, 1); break;
            case '/': sym(Tok::Slash, 1); break;
            case '(': sym(Tok::LParen, 1); break;
            case ')': sym(Tok::RParen, 1); break;
            case '{': sym(Tok::LBrace, 1); break;
            case '}': sym(Tok::RBrace, 1); break;
            case '[': sym(Tok::LBrack, 1); break;
            case ']': (at(1) == '-' && at(2) == '>') ? sym(Tok::WeightClose, 3) : sym(Tok::RBrack, 1); break;
            case ',': sym(Tok::Comma, 1); break;
            case ';': sym(Tok::Semi, 1); break;
            case '=': sym(Tok::Eq, 1); break;
            case '@': sym(Tok::At, 1); break;
            case '!': sym(Tok::Bang, 1); break;
            case '+': sym(Tok::Plus, 1); break;
            case '*': sym(Tok::Star, 1); break;
            case '-':
                if (at(1) == '-' && at(2) == '>') sym(Tok::Arrow, 3);
                else if (at(1) == '[') sym(Tok::WeightOpen, 2);
                else sym(Tok::Minus, 1);
                break;
            default: syntax_error(pos, std::string("unexpected character '") + c + "'");
            }
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.pos = pos;
    out.push_back(end);
    return out;
}

class Parser {
public:
    explicit Parser(std::string_view src) : toks_(lex(src)) {}

    Ast parse_model() {
        Ast tree;
        int blocks = 0;
        while (peek().kind != Tok::End) {
            tree.decls.push_back(declaration());
            if (std::holds_alternative<Block>(tree.decls.back())) {
                if (++blocks > 1) syntax_error(std::get<Block>(tree.decls.back()).pos, "more than one brs block");
            }
        }
        if (blocks == 0) syntax_error(peek().pos, "missing begin brs ... end block");
        return tree;
    }

    ExprPtr parse_single_expression() {
        auto e = par();
        if (peek().kind != Tok::End) syntax_error(peek().pos, "unexpected '" + peek().text + "' after expression");
        return e;
    }

private:
    const Token& peek(std::size_t k = 0) const { return toks_[std::min(i_ + k, toks_.size() - 1)]; }

    bool is_keyword(const char* word, std::size_t k = 0) const {
        return peek(k).kind == Tok::Ident && peek(k).text == word;
    }

    Token take() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }

    Token expect(Tok kind, const char* what) {
        if (peek().kind != kind) {
            syntax_error(peek().pos, std::string("expected ") + what + ", found '" + peek().text + "'");
        }
        return take();
    }

    void expect_keyword(const char* word) {
        if (!is_keyword(word)) syntax_error(peek().pos, std::string("expected '") + word + "', found '" + peek().text + "'");
        take();
    }

    std::string identifier(const char* what) {
        const auto t = expect(Tok::Ident, what);
        if (kKeywords.count(t.text)) syntax_error(t.pos, "'" + t.text + "' is a reserved word");
        return t.text;
    }

    bool accept(Tok kind) {
        if (peek().kind != kind) return false;
        take();
        return true;
    }

    int integer(const char* what) {
        const auto t = expect(Tok::Int, what);
        try {
            return std::stoi(t.text);
        } catch (const std::exception&) {
            syntax_error(t.pos, "integer out of range");
        }
    }

    // --- declarations ----------------------------------------------------

    Decl declaration() {
        const auto pos = peek().pos;
        if (is_keyword("atomic") || is_keyword("ctrl") || (is_keyword("fun") && is_keyword("ctrl", 1)) ||
            (is_keyword("atomic") && is_keyword("fun", 1))) {
            return control();
        }
        if (is_keyword("fun") && is_keyword("react", 1)) {
            take();
            return reaction(true, pos);
        }
        if (is_keyword("react")) return reaction(false, pos);
        if (is_keyword("big")) {
            take();
            BigDecl d;
            d.pos = pos;
            d.name = identifier("a bigraph name");
            expect(Tok::Eq, "'='");
            d.body = par();
            expect(Tok::Semi, "';'");
            return d;
        }
        if (is_keyword("int") || is_keyword("float")) return set_decl();
        if (is_keyword("begin")) return block();
        syntax_error(pos, "unexpected '" + peek().text + "' at top level");
    }

    CtrlDecl control() {
        CtrlDecl d;
        d.pos = peek().pos;
        if (is_keyword("atomic")) {
            take();
            d.atomic = true;
        }
        if (is_keyword("fun")) {
            take();
            d.fun = true;
        }
        expect_keyword("ctrl");
        d.name = identifier("a control name");
        if (d.fun) {
            expect(Tok::LParen, "'('");
            if (peek().kind != Tok::RParen) {
                do d.params.push_back(identifier("a parameter name")); while (accept(Tok::Comma));
            }
            expect(Tok::RParen, "')'");
        }
        expect(Tok::Eq, "'='");
        d.arity = integer("an arity");
        expect(Tok::Semi, "';'");
        return d;
    }

    ReactDecl reaction(bool fun, Pos pos) {
        expect_keyword("react");
        ReactDecl d;
        d.pos = pos;
        d.fun = fun;
        d.name = identifier("a rule name");
        if (fun) {
            expect(Tok::LParen, "'('");
            if (peek().kind != Tok::RParen) {
                do d.params.push_back(identifier("a parameter name")); while (accept(Tok::Comma));
            }
            expect(Tok::RParen, "')'");
        }
        expect(Tok::Eq, "'='");
        d.lhs = par();
        if (accept(Tok::WeightOpen)) {
            d.label = sum();
            expect(Tok::WeightClose, "']->'");
        } else {
            expect(Tok::Arrow, "'-->' or '-[w]->'");
        }
        d.rhs = par();
        if (accept(Tok::At)) {
            expect(Tok::LBrack, "'['");
            std::vector<int> entries;
            if (peek().kind != Tok::RBrack) {
                do entries.push_back(integer("a site index")); while (accept(Tok::Comma));
            }
            expect(Tok::RBrack, "']'");
            d.inst = std::move(entries);
        }
        if (is_keyword("if")) {
            take();
            do {
                Condition c;
                c.pos = peek().pos;
                c.negated = accept(Tok::Bang);
                c.pattern = par();
                expect_keyword("in");
                if (is_keyword("param")) {
                    take();
                } else if (is_keyword("ctx")) {
                    take();
                    c.in_ctx = true;
                } else {
                    syntax_error(peek().pos, "expected 'param' or 'ctx'");
                }
                d.conditions.push_back(std::move(c));
            } while (accept(Tok::Comma));
        }
        expect(Tok::Semi, "';'");
        return d;
    }

    SetDecl set_decl() {
        SetDecl d;
        d.pos = peek().pos;
        d.is_float = take().text == "float";
        d.name = identifier("a set name");
        expect(Tok::Eq, "'='");
        expect(Tok::LBrace, "'{'");
        if (peek().kind != Tok::RBrace) {
            do d.values.push_back(sum()); while (accept(Tok::Comma));
        }
        expect(Tok::RBrace, "'}'");
        expect(Tok::Semi, "';'");
        return d;
    }

    RuleRef rule_ref() {
        RuleRef r;
        r.pos = peek().pos;
        r.name = identifier("a rule name");
        if (accept(Tok::LParen)) {
            std::vector<NumPtr> args;
            if (peek().kind != Tok::RParen) {
                do args.push_back(sum()); while (accept(Tok::Comma));
            }
            expect(Tok::RParen, "')'");
            r.args = std::move(args);
        }
        return r;
    }

    std::vector<RuleRef> rule_refs(Tok close, const char* what) {
        std::vector<RuleRef> refs;
        if (peek().kind != close) {
            do refs.push_back(rule_ref()); while (accept(Tok::Comma));
        }
        expect(close, what);
        return refs;
    }

    Block block() {
        Block b;
        b.pos = peek().pos;
        expect_keyword("begin");
        const auto kind = expect(Tok::Ident, "brs, pbrs, sbrs or abrs");
        if (kind.text == "brs") b.semantics = Semantics::Brs;
        else if (kind.text == "pbrs") b.semantics = Semantics::Pbrs;
        else if (kind.text == "sbrs") b.semantics = Semantics::Sbrs;
        else if (kind.text == "abrs") b.semantics = Semantics::Abrs;
        else syntax_error(kind.pos, "unknown system kind '" + kind.text + "'");
        bool has_rules = false;
        while (!is_keyword("end")) {
            if (peek().kind == Tok::End) syntax_error(peek().pos, "missing 'end'");
            if (is_keyword("int") || is_keyword("float")) {
                b.sets.push_back(set_decl());
            } else if (is_keyword("init")) {
                take();
                b.init = par();
                expect(Tok::Semi, "';'");
            } else if (is_keyword("rules")) {
                take();
                has_rules = true;
                expect(Tok::Eq, "'='");
                expect(Tok::LBrack, "'['");
                if (peek().kind != Tok::RBrack) {
                    do {
                        RuleClass c;
                        if (accept(Tok::LBrace)) {
                            c.rules = rule_refs(Tok::RBrace, "'}'");
                        } else if (accept(Tok::LParen)) {
                            c.instantaneous = true;
                            c.rules = rule_refs(Tok::RParen, "')'");
                        } else {
                            syntax_error(peek().pos, "expected '{' or '(' to start a priority class");
                        }
                        b.classes.push_back(std::move(c));
                    } while (accept(Tok::Comma));
                }
                expect(Tok::RBrack, "']'");
                expect(Tok::Semi, "';'");
            } else if (is_keyword("preds")) {
                take();
                expect(Tok::Eq, "'='");
                expect(Tok::LBrace, "'{'");
                if (peek().kind != Tok::RBrace) {
                    do b.preds.push_back(identifier("a predicate name")); while (accept(Tok::Comma));
                }
                expect(Tok::RBrace, "'}'");
                expect(Tok::Semi, "';'");
            } else if (is_keyword("actions")) {
                take();
                b.has_actions = true;
                expect(Tok::Eq, "'='");
                expect(Tok::LBrack, "'['");
                if (peek().kind != Tok::RBrack) {
                    do {
                        ActionDecl a;
                        a.pos = peek().pos;
                        a.name = identifier("an action name");
                        expect(Tok::Eq, "'='");
                        expect(Tok::LBrace, "'{'");
                        a.rules = rule_refs(Tok::RBrace, "'}'");
                        b.actions.push_back(std::move(a));
                    } while (accept(Tok::Comma));
                }
                expect(Tok::RBrack, "']'");
                expect(Tok::Semi, "';'");
            } else {
                syntax_error(peek().pos, "unexpected '" + peek().text + "' in system block");
            }
        }
        take();
        accept(Tok::Semi);
        if (!has_rules) syntax_error(b.pos, "system block has no rules");
        return b;
    }

    // --- bigraph expressions ---------------------------------------------

    ExprPtr make(Expr::Kind kind, Pos pos, ExprPtr lhs = nullptr, ExprPtr rhs = nullptr) {
        auto e = std::make_shared<Expr>();
        e->kind = kind;
        e->pos = pos;
        e->lhs = std::move(lhs);
        e->rhs = std::move(rhs);
        return e;
    }

    ExprPtr par() {
        auto e = merge();
        while (peek().kind == Tok::DBar) {
            const auto pos = take().pos;
            e = make(Expr::Kind::Par, pos, e, merge());
        }
        return e;
    }

    ExprPtr merge() {
        auto e = nesting();
        while (peek().kind == Tok::Bar) {
            const auto pos = take().pos;
            e = make(Expr::Kind::Merge, pos, e, nesting());
        }
        return e;
    }

    // Closure and share scope as far to the right as possible.
    ExprPtr nesting() {
        const auto pos = peek().pos;
        if (accept(Tok::Slash)) {
            auto e = std::make_shared<Expr>();
            e->kind = Expr::Kind::Close;
            e->pos = pos;
            e->name = identifier("a name to close");
            e->lhs = par();
            return e;
        }
        if (is_keyword("share")) {
            take();
            auto e = std::make_shared<Expr>();
            e->kind = Expr::Kind::Share;
            e->pos = pos;
            e->lhs = par();
            expect_keyword("by");
            expect(Tok::LParen, "'('");
            expect(Tok::LBrack, "'['");
            if (peek().kind != Tok::RBrack) {
                do {
                    expect(Tok::LBrace, "'{'");
                    std::vector<int> set;
                    if (peek().kind != Tok::RBrace) {
                        do set.push_back(integer("a site index")); while (accept(Tok::Comma));
                    }
                    expect(Tok::RBrace, "'}'");
                    e->placement.push_back(std::move(set));
                } while (accept(Tok::Comma));
            }
            expect(Tok::RBrack, "']'");
            expect(Tok::Comma, "','");
            e->share_sites = integer("a site count");
            expect(Tok::RParen, "')'");
            expect_keyword("in");
            e->host = par();
            return e;
        }
        auto a = atom();
        if (peek().kind == Tok::Dot) {
            const auto dot = take().pos;
            return make(Expr::Kind::Nest, dot, a, nesting());
        }
        return a;
    }

    std::vector<std::string> name_list() {
        expect(Tok::LBrace, "'{'");
        std::vector<std::string> names;
        if (peek().kind != Tok::RBrace) {
            do names.push_back(identifier("a name")); while (accept(Tok::Comma));
        }
        expect(Tok::RBrace, "'}'");
        return names;
    }

    ExprPtr atom() {
        const auto pos = peek().pos;
        if (accept(Tok::LParen)) {
            auto e = par();
            expect(Tok::RParen, "')'");
            return e;
        }
        if (peek().kind == Tok::Int) {
            const auto t = take();
            if (t.text != "1") syntax_error(t.pos, "only the literal 1 denotes a bigraph");
            return make(Expr::Kind::One, pos);
        }
        if (peek().kind == Tok::LBrace) {
            auto e = std::make_shared<Expr>();
            e->kind = Expr::Kind::Names;
            e->pos = pos;
            e->names = name_list();
            return e;
        }
        if (is_keyword("id")) {
            take();
            if (peek().kind == Tok::LBrace) {
                auto e = std::make_shared<Expr>();
                e->kind = Expr::Kind::IdNames;
                e->pos = pos;
                e->names = name_list();
                return e;
            }
            return make(Expr::Kind::Id, pos);
        }
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::Atom;
        e->pos = pos;
        e->name = identifier("a bigraph expression");
        if (accept(Tok::LParen)) {
            std::vector<NumPtr> args;
            if (peek().kind != Tok::RParen) {
                do args.push_back(sum()); while (accept(Tok::Comma));
            }
            expect(Tok::RParen, "')'");
            e->args = std::move(args);
        }
        if (peek().kind == Tok::LBrace) e->names = name_list();
        return e;
    }

    // --- parameter arithmetic --------------------------------------------

    NumPtr num_node(Num::Kind kind, Pos pos, NumPtr lhs = nullptr, NumPtr rhs = nullptr) {
        auto n = std::make_shared<Num>();
        n->kind = kind;
        n->pos = pos;
        n->lhs = std::move(lhs);
        n->rhs = std::move(rhs);
        return n;
    }

    NumPtr sum() {
        auto e = product();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            const auto t = take();
            e = num_node(t.kind == Tok::Plus ? Num::Kind::Add : Num::Kind::Sub, t.pos, e, product());
        }
        return e;
    }

    NumPtr product() {
        auto e = unary();
        while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
            const auto t = take();
            e = num_node(t.kind == Tok::Star ? Num::Kind::Mul : Num::Kind::Div, t.pos, e, unary());
        }
        return e;
    }

    NumPtr unary() {
        const auto pos = peek().pos;
        if (accept(Tok::Minus)) return num_node(Num::Kind::Neg, pos, unary());
        if (accept(Tok::LParen)) {
            auto e = sum();
            expect(Tok::RParen, "')'");
            return e;
        }
        auto n = std::make_shared<Num>();
        n->pos = pos;
        const auto t = take();
        n->text = t.text;
        switch (t.kind) {
        case Tok::Int:
            n->kind = Num::Kind::Int;
            try {
                n->int_value = std::stoll(t.text);
            } catch (const std::exception&) {
                syntax_error(t.pos, "integer out of range");
            }
            break;
        case Tok::Float:
            n->kind = Num::Kind::Float;
            n->float_value = std::stod(t.text);
            break;
        case Tok::String: n->kind = Num::Kind::String; break;
        case Tok::Ident:
            if (kKeywords.count(t.text)) syntax_error(t.pos, "'" + t.text + "' is a reserved word");
            n->kind = Num::Kind::Var;
            break;
        default: syntax_error(t.pos, "expected a number, found '" + t.text + "'");
        }
        return n;
    }

    std::vector<Token> toks_;
    std::size_t i_ = 0;
};

} // namespace

ast::Ast parse(std::string_view source) { return Parser(source).parse_model(); }

namespace detail {

ast::ExprPtr parse_expression(std::string_view source) { return Parser(source).parse_single_expression(); }

} // namespace detail

} // namespace bigraph
