#include "bigraph/rule.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>

namespace bigraph {

namespace {

using i128 = __int128;

Rational reduce(i128 num, i128 den) {
    if (den < 0) {
        num = -num;
        den = -den;
    }
    i128 a = num < 0 ? -num : num, b = den;
    while (b != 0) {
        const i128 t = a % b;
        a = b;
        b = t;
    }
    if (a > 1) {
        num /= a;
        den /= a;
    }
    constexpr i128 limit = INT64_MAX;
    if (num > limit || num < -limit || den > limit) fail(ErrorKind::TypeError, "Weight arithmetic overflow");
    return {static_cast<std::int64_t>(num), static_cast<std::int64_t>(den)};
}

} // namespace

Rational Rational::of(std::int64_t n, std::int64_t d) {
    if (d == 0) fail(ErrorKind::TypeError, "Zero denominator");
    return reduce(n, d);
}

Rational Rational::parse(const std::string& text) {
    i128 num = 0, den = 1;
    std::size_t i = 0;
    bool digits = false;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        num = num * 10 + (text[i++] - '0');
        digits = true;
    }
    if (i < text.size() && text[i] == '.') {
        ++i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            num = num * 10 + (text[i++] - '0');
            den *= 10;
            digits = true;
        }
    }
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        ++i;
        bool neg = false;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) neg = text[i++] == '-';
        int e = 0;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) e = e * 10 + (text[i++] - '0');
        for (int k = 0; k < e; ++k) (neg ? den : num) *= 10;
    }
    if (!digits || i != text.size()) fail(ErrorKind::TypeError, "Not a decimal number: " + text);
    return reduce(num, den);
}

Rational operator+(const Rational& a, const Rational& b) {
    return reduce(static_cast<i128>(a.num) * b.den + static_cast<i128>(b.num) * a.den, static_cast<i128>(a.den) * b.den);
}

Rational operator*(const Rational& a, const Rational& b) {
    return reduce(static_cast<i128>(a.num) * b.num, static_cast<i128>(a.den) * b.den);
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.num == 0) fail(ErrorKind::TypeError, "Division by zero weight");
    return reduce(static_cast<i128>(a.num) * b.den, static_cast<i128>(a.den) * b.num);
}

std::string to_string(const Rational& r) {
    return r.den == 1 ? std::to_string(r.num) : std::to_string(r.num) + "/" + std::to_string(r.den);
}

RuleLabel RuleLabel::with_weight(Rational w, std::string text) {
    RuleLabel l;
    l.kind = Kind::Weight;
    l.weight = w;
    l.text = std::move(text);
    return l;
}

RuleLabel RuleLabel::with_rate(double r, std::string text) {
    RuleLabel l;
    l.kind = Kind::Rate;
    l.rate = r;
    l.text = std::move(text);
    return l;
}

InstMap ReactionRule::effective_map() const {
    if (inst) return *inst;
    InstMap m;
    for (int i = 0; i < rhs.sites; ++i) m.entries.push_back(i);
    return m;
}

void validate_rule(const ReactionRule& rule) {
    const auto lo = rule.lhs.outer_face(), ro = rule.rhs.outer_face();
    if (lo != ro) {
        fail(ErrorKind::OuterInterfaceMismatch,
             "Invalid Reaction: Outer interfaces " + to_string(lo) + " and " + to_string(ro) + " do not match");
    }
    const auto li = rule.lhs.inner_face(), ri = rule.rhs.inner_face();
    if ((!rule.inst && li.width != ri.width) || li.names != ri.names) {
        fail(ErrorKind::InnerInterfaceMismatch,
             "Invalid Reaction: Inner interfaces" + to_string(li) + " and " + to_string(ri) + " do not match");
    }
    if (rule.inst) {
        const auto& e = rule.inst->entries;
        bool ok = static_cast<int>(e.size()) == rule.rhs.sites;
        for (int s : e) ok = ok && s >= 0 && s < rule.lhs.sites;
        if (!ok) fail(ErrorKind::InvalidInstMap, "Invalid Reaction: Instantiation map is not valid");
    }
    if (!is_solid(rule.lhs)) fail(ErrorKind::LhsNotSolid, "Invalid Reaction: Left hand side is not solid");
    for (const auto& c : rule.constraints) {
        if (!is_solid(c.pattern)) fail(ErrorKind::PatternNotSolid, "Invalid Reaction: Condition pattern is not solid");
    }
    if (rule.label.kind == RuleLabel::Kind::Weight && !rule.label.weight.positive()) {
        fail(ErrorKind::TypeError, "Invalid Reaction: weights must be positive");
    }
    if (rule.label.kind == RuleLabel::Kind::Rate && !(rule.label.rate > 0.0)) {
        fail(ErrorKind::TypeError, "Invalid Reaction: rates must be positive");
    }
}

namespace {

Bigraph rewrite(const Bigraph& state, const ReactionRule& rule, const Occurrence& occ) {
    const auto& lhs = rule.lhs;
    const auto& rhs = rule.rhs;
    if (!rhs.inner_names().empty()) fail(ErrorKind::Unsupported, "Reaction right hand sides with inner names");
    const auto eta = rule.effective_map().entries;
    const Topology ttopo(state), ltopo(lhs);
    const auto n = state.nodes.size();

    std::vector<bool> image(n, false), param(n, false);
    for (int t : occ.node_map) image[t] = true;
    for (int v : occ.param_nodes) param[v] = true;
    std::vector<int> lhs_site_of(n, -1);  // image node -> LHS site below its pattern node
    for (std::size_t p = 0; p < lhs.nodes.size(); ++p) {
        if (!ltopo.node_child_sites[p].empty()) lhs_site_of[occ.node_map[p]] = ltopo.node_child_sites[p].front();
    }

    Bigraph out;
    out.regions = state.regions;
    out.links = state.links;

    // Context nodes keep their parents and ports.
    std::vector<int> ctx_index(n, -1);
    for (int v : occ.context_nodes) {
        ctx_index[v] = static_cast<int>(out.nodes.size());
        out.nodes.push_back(state.nodes[v]);
        out.node_parents.emplace_back();
        out.ports.push_back(state.ports[v]);
    }
    for (int v : occ.context_nodes) {
        auto& ps = out.node_parents[ctx_index[v]];
        for (auto q : state.node_parents[v]) ps.push_back(q.is_node() ? Place::node(ctx_index[q.index]) : q);
    }
    auto context_place = [&](Place q) { return q.is_node() ? Place::node(ctx_index[q.index]) : q; };

    // Right hand side nodes.
    const int rhs_off = static_cast<int>(out.nodes.size());
    std::vector<int> lhs_name_link;  // RHS link -> result link
    for (const auto& link : rhs.links) {
        if (link.outer) {
            auto l = lhs.link_of_outer(*link.outer);
            if (!l) fail(ErrorKind::OuterInterfaceMismatch, "Name " + *link.outer + " is not on the left hand side");
            lhs_name_link.push_back(occ.link_map[*l]);
        } else {
            lhs_name_link.push_back(static_cast<int>(out.links.size()));
            out.links.push_back(Link{});
        }
    }
    auto rhs_place = [&](Place q, std::vector<Place>& into) {
        if (q.is_node()) {
            into.push_back(Place::node(rhs_off + q.index));
        } else {
            for (auto c : occ.region_loc[q.index]) into.push_back(context_place(c));
        }
    };
    for (std::size_t v = 0; v < rhs.nodes.size(); ++v) {
        out.nodes.push_back(rhs.nodes[v]);
        std::vector<Place> ps;
        for (auto q : rhs.node_parents[v]) rhs_place(q, ps);
        out.node_parents.push_back(std::move(ps));
        std::vector<int> ports;
        for (int l : rhs.ports[v]) ports.push_back(lhs_name_link[l]);
        out.ports.push_back(std::move(ports));
    }
    std::vector<std::vector<Place>> rhs_site_parents(rhs.sites);
    for (int j = 0; j < rhs.sites; ++j) {
        for (auto q : rhs.site_parents[j]) rhs_place(q, rhs_site_parents[j]);
    }

    // Parameter nodes in parent-first order, with the LHS sites they sit in.
    std::vector<int> pending(n, 0), order;
    for (int v : occ.param_nodes) {
        for (auto q : state.node_parents[v]) if (q.is_node() && param[q.index]) ++pending[v];
        if (pending[v] == 0) order.push_back(v);
    }
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (int c : ttopo.node_child_nodes[order[i]]) {
            if (param[c] && --pending[c] == 0) order.push_back(c);
        }
    }
    std::vector<std::vector<int>> sites_of(n);
    for (int v : order) {
        auto& r = sites_of[v];
        for (auto q : state.node_parents[v]) {
            if (!q.is_node()) continue;
            if (image[q.index]) r.push_back(lhs_site_of[q.index]);
            else r.insert(r.end(), sites_of[q.index].begin(), sites_of[q.index].end());
        }
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
    }
    std::vector<int> uses(lhs.sites, 0);
    for (int s : eta) ++uses[s];

    // A node sitting only in sites used at most once survives as itself;
    // otherwise it is copied once per RHS site drawing from its sites.
    std::vector<bool> unique(n, true);
    std::vector<std::map<int, int>> instance(n);  // rhs site (-1 when unique) -> result node
    std::map<std::pair<int, int>, int> clones;    // (state link, rhs site) -> result link
    auto local_closed = [&](int l) {
        if (!state.links[l].closed()) return false;
        for (int owner : ttopo.link_ports[l]) if (!param[owner]) return false;
        return true;
    };
    for (int v : order) {
        std::vector<int> js;
        for (int j = 0; j < rhs.sites; ++j) {
            if (std::binary_search(sites_of[v].begin(), sites_of[v].end(), eta[j])) js.push_back(j);
        }
        for (int s : sites_of[v]) if (uses[s] > 1) unique[v] = false;
        if (js.empty()) continue;
        std::vector<int> copies = unique[v] ? std::vector<int>{-1} : js;
        for (int j : copies) {
            std::vector<Place> ps;
            for (auto q : state.node_parents[v]) {
                if (!q.is_node()) continue;
                if (image[q.index]) {
                    for (int k : js) {
                        if ((j < 0 || k == j) && eta[k] == lhs_site_of[q.index]) {
                            ps.insert(ps.end(), rhs_site_parents[k].begin(), rhs_site_parents[k].end());
                        }
                    }
                } else {
                    const auto& inst = instance[q.index];
                    auto it = inst.find(unique[q.index] ? -1 : j);
                    if (it != inst.end()) ps.push_back(Place::node(it->second));
                }
            }
            if (ps.empty()) fail(ErrorKind::Unsupported, "Parameter instantiation left a node without parents");
            std::vector<int> ports;
            for (int l : state.ports[v]) {
                if (j >= 0 && local_closed(l)) {
                    auto it = clones.find({l, j});
                    if (it == clones.end()) {
                        it = clones.emplace(std::make_pair(l, j), static_cast<int>(out.links.size())).first;
                        out.links.push_back(Link{});
                    }
                    ports.push_back(it->second);
                } else {
                    ports.push_back(l);
                }
            }
            instance[v][j] = static_cast<int>(out.nodes.size());
            out.nodes.push_back(state.nodes[v]);
            out.node_parents.push_back(std::move(ps));
            out.ports.push_back(std::move(ports));
        }
    }
    return normalize(std::move(out));
}

} // namespace

Bigraph apply_at(const Bigraph& state, const ReactionRule& rule, const Occurrence& occ) {
    if (!check_constraints(state, occ, rule.constraints)) {
        fail(ErrorKind::ConstraintViolated, "Rule " + rule.name + " is blocked by its conditions at this occurrence");
    }
    return rewrite(state, rule, occ);
}

std::vector<Occurrence> enabled_occurrences(const Bigraph& state, const ReactionRule& rule) {
    std::vector<Occurrence> out;
    for (auto& occ : find_occurrences(state, rule.lhs)) {
        if (check_constraints(state, occ, rule.constraints)) out.push_back(std::move(occ));
    }
    return out;
}

std::vector<Application> all_applications(const Bigraph& state, const ReactionRule& rule) {
    std::vector<Application> out;
    for (auto& occ : enabled_occurrences(state, rule)) {
        auto result = rewrite(state, rule, occ);
        out.push_back({std::move(occ), std::move(result)});
    }
    return out;
}

} // namespace bigraph
