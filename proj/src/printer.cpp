#include "bigraph/format.hpp"
#include "bigraph/frontend.hpp"

#include <algorithm>
#include <climits>
#include <set>
#include <sstream>

namespace bigraph {

namespace {

std::string param_text(const Param& p) {
    if (auto i = std::get_if<std::int64_t>(&p)) return std::to_string(*i);
    if (auto d = std::get_if<double>(&p)) {
        auto s = format_double(*d);
        if (s.find_first_of(".en") == std::string::npos) s += ".0";
        else if (s.find('.') == std::string::npos && s.find('e') != std::string::npos) s.insert(s.find('e'), ".0");
        if (s.find_first_of("ni") != std::string::npos) fail(ErrorKind::Unsupported, "non-finite parameter " + s);
        return s;
    }
    return "\"" + std::get<std::string>(p) + "\"";
}

class Printer {
public:
    explicit Printer(const Bigraph& b) : b_(b), topo_(b) {
        if (b.has_sharing()) fail(ErrorKind::Unsupported, "printing a bigraph with sharing");
        if (!b.inner_names().empty()) fail(ErrorKind::Unsupported, "printing a bigraph with inner names");
        std::set<std::string> taken;
        for (const auto& l : b.links) if (l.outer) taken.insert(*l.outer);
        link_names_.resize(b.links.size());
        int fresh = 0;
        for (std::size_t l = 0; l < b.links.size(); ++l) {
            if (b.links[l].outer) {
                link_names_[l] = *b.links[l].outer;
                continue;
            }
            std::string n;
            do n = "e" + std::to_string(fresh++); while (taken.count(n));
            taken.insert(n);
            link_names_[l] = n;
            closed_.push_back(n);
        }
        min_site_node_.assign(b.nodes.size(), -1);
    }

    std::string run() {
        std::vector<std::string> parts;
        for (int r = 0; r < b_.regions; ++r) {
            parts.push_back(children(topo_.region_child_nodes[r], topo_.region_child_sites[r], false));
        }
        std::string body;
        for (std::size_t i = 0; i < parts.size(); ++i) body += (i ? " || " : "") + parts[i];
        std::vector<std::string> idle;
        for (std::size_t l = 0; l < b_.links.size(); ++l) {
            if (b_.links[l].outer && topo_.link_ports[l].empty()) idle.push_back(*b_.links[l].outer);
        }
        if (!idle.empty() || b_.regions == 0) {
            std::string names = "{";
            for (std::size_t i = 0; i < idle.size(); ++i) names += (i ? ", " : "") + idle[i];
            names += "}";
            body = body.empty() ? names : body + " || " + names;
        }
        if (next_site_ != b_.sites) fail(ErrorKind::Unsupported, "sites cannot be printed in index order");
        if (closed_.empty()) return body;
        std::string prefix;
        for (const auto& n : closed_) prefix += "/" + n;
        return prefix + " (" + body + ")";
    }

private:
    int min_site(int n) {
        if (min_site_node_[n] != -1) return min_site_node_[n];
        int m = INT_MAX;
        for (int s : topo_.node_child_sites[n]) m = std::min(m, s);
        for (int c : topo_.node_child_nodes[n]) m = std::min(m, min_site(c));
        return min_site_node_[n] = m;
    }

    // Children are ordered so that sites appear in increasing index order,
    // which is how the parser numbers them.
    std::string children(const std::vector<int>& nodes, const std::vector<int>& sites, bool nested) {
        std::vector<std::pair<int, std::string>> items;
        std::vector<std::pair<int, int>> order;  // (min site, encoded child)
        for (int n : nodes) order.emplace_back(min_site(n), n);
        for (int s : sites) order.emplace_back(s, -1 - s);
        std::stable_sort(order.begin(), order.end());
        std::vector<std::string> parts;
        for (auto [key, c] : order) {
            if (c < 0) {
                if (-1 - c != next_site_) fail(ErrorKind::Unsupported, "sites cannot be printed in index order");
                ++next_site_;
                parts.push_back("id");
            } else {
                parts.push_back(node(c));
            }
        }
        if (parts.empty()) return "1";
        if (parts.size() == 1) return parts[0];
        std::string s;
        for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? " | " : "") + parts[i];
        return nested ? "(" + s + ")" : s;
    }

    std::string node(int n) {
        const auto& nd = b_.nodes[n];
        std::string s = nd.control->name;
        if (!nd.control->param_sorts.empty()) {
            s += "(";
            for (std::size_t i = 0; i < nd.params.size(); ++i) s += (i ? ", " : "") + param_text(nd.params[i]);
            s += ")";
        }
        if (!b_.ports[n].empty()) {
            std::vector<std::string> names;
            for (int l : b_.ports[n]) names.push_back(link_names_[l]);
            std::sort(names.begin(), names.end());
            s += "{";
            for (std::size_t i = 0; i < names.size(); ++i) s += (i ? ", " : "") + names[i];
            s += "}";
        }
        if (nd.control->atomic) return s;
        return s + "." + children(topo_.node_child_nodes[n], topo_.node_child_sites[n], true);
    }

    const Bigraph& b_;
    Topology topo_;
    std::vector<std::string> link_names_;
    std::vector<std::string> closed_;
    std::vector<int> min_site_node_;
    int next_site_ = 0;
};

std::string identifier(const std::string& name) {
    std::string s;
    for (char c : name) s += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    while (!s.empty() && s.back() == '_') s.pop_back();
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) s = "r" + s;
    return s;
}

std::string rule_text(const ReactionRule& r, const std::string& name) {
    std::string s = "react " + name + " = " + pretty_print(r.lhs);
    switch (r.label.kind) {
    case RuleLabel::Kind::Plain: s += " --> "; break;
    case RuleLabel::Kind::Weight: s += " -[" + to_string(r.label.weight) + "]-> "; break;
    case RuleLabel::Kind::Rate: {
        auto t = format_double(r.label.rate);
        if (t.find('.') == std::string::npos && t.find('e') != std::string::npos) t.insert(t.find('e'), ".0");
        s += " -[" + t + "]-> ";
        break;
    }
    }
    s += pretty_print(r.rhs);
    if (r.inst) {
        s += " @[";
        for (std::size_t i = 0; i < r.inst->entries.size(); ++i) s += (i ? ", " : "") + std::to_string(r.inst->entries[i]);
        s += "]";
    }
    for (std::size_t i = 0; i < r.constraints.size(); ++i) {
        using K = MatchConstraint::Kind;
        const auto& c = r.constraints[i];
        const bool neg = c.kind == K::AbsentInParam || c.kind == K::AbsentInCtx;
        const bool ctx = c.kind == K::PresentInCtx || c.kind == K::AbsentInCtx;
        s += i ? ", " : " if ";
        s += std::string(neg ? "!" : "") + "(" + pretty_print(c.pattern) + ") in " + (ctx ? "ctx" : "param");
    }
    return s + ";";
}

} // namespace

std::string pretty_print(const Bigraph& b) { return Printer(b).run(); }

std::string pretty_print(const ReactionRule& rule) { return rule_text(rule, identifier(rule.name)); }

std::string pretty_print(const BrsSpec& spec) {
    std::ostringstream out;
    for (const auto& [name, c] : spec.signature.controls()) {
        out << (c->atomic ? "atomic " : "") << (c->param_sorts.empty() ? "" : "fun ") << "ctrl " << name;
        if (!c->param_sorts.empty()) {
            out << "(";
            for (std::size_t i = 0; i < c->param_sorts.size(); ++i) out << (i ? ", " : "") << "p" << i;
            out << ")";
        }
        out << " = " << c->arity << ";\n";
    }
    std::map<std::string, std::string> names;
    for (const auto& cls : spec.classes) {
        for (const auto& r : cls.rules) {
            auto n = identifier(r.name);
            while (spec.signature.find(n)) n += "_";
            names[r.name] = n;
            out << rule_text(r, n) << "\n";
        }
    }
    for (const auto& p : spec.preds) out << "big " << p.name << " = " << pretty_print(p.pattern) << ";\n";
    out << "begin " << to_string(spec.semantics) << "\n";
    out << "  init " << pretty_print(spec.init) << ";\n";
    out << "  rules = [";
    for (std::size_t i = 0; i < spec.classes.size(); ++i) {
        const auto& cls = spec.classes[i];
        out << (i ? ", " : "") << (cls.instantaneous ? "(" : "{");
        for (std::size_t j = 0; j < cls.rules.size(); ++j) out << (j ? ", " : "") << names[cls.rules[j].name];
        out << (cls.instantaneous ? ")" : "}");
    }
    out << "];\n";
    if (!spec.preds.empty()) {
        out << "  preds = {";
        for (std::size_t i = 0; i < spec.preds.size(); ++i) out << (i ? ", " : "") << spec.preds[i].name;
        out << "};\n";
    }
    if (spec.semantics == Semantics::Abrs) {
        out << "  actions = [";
        for (std::size_t i = 0; i < spec.actions.size(); ++i) {
            out << (i ? ", " : "") << spec.actions[i].name << " = {";
            for (std::size_t j = 0; j < spec.actions[i].rules.size(); ++j) {
                out << (j ? ", " : "") << names[spec.actions[i].rules[j]];
            }
            out << "}";
        }
        out << "];\n";
    }
    out << "end\n";
    return out.str();
}

} // namespace bigraph
