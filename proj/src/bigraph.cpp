#include "bigraph/bigraph.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <numeric>
#include <set>
#include <sstream>

namespace bigraph {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::SortMismatch: return "SortMismatch";
    case ErrorKind::WidthMismatch: return "WidthMismatch";
    case ErrorKind::AtomicViolation: return "AtomicViolation";
    case ErrorKind::UnknownName: return "UnknownName";
    case ErrorKind::EmptyClosure: return "EmptyClosure";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::NameClash: return "NameClash";
    case ErrorKind::NotGround: return "NotGround";
    case ErrorKind::PatternNotSolid: return "PatternNotSolid";
    case ErrorKind::TargetNotGround: return "TargetNotGround";
    case ErrorKind::InnerInterfaceMismatch: return "InnerInterfaceMismatch";
    case ErrorKind::OuterInterfaceMismatch: return "OuterInterfaceMismatch";
    case ErrorKind::InvalidInstMap: return "InvalidInstMap";
    case ErrorKind::LhsNotSolid: return "LhsNotSolid";
    case ErrorKind::ConstraintViolated: return "ConstraintViolated";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorKind::DuplicateDefinition: return "DuplicateDefinition";
    case ErrorKind::TypeError: return "TypeError";
    case ErrorKind::InitNotGround: return "InitNotGround";
    case ErrorKind::UnknownRuleInBlock: return "UnknownRuleInBlock";
    case ErrorKind::MixedLabelKinds: return "MixedLabelKinds";
    case ErrorKind::ActionPartitionError: return "ActionPartitionError";
    case ErrorKind::DivergentInstantaneous: return "DivergentInstantaneous";
    case ErrorKind::NonConfluence: return "NonConfluence";
    case ErrorKind::PartialSystem: return "PartialSystem";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

ParamSort sort_of(const Param& p) {
    switch (p.index()) {
    case 0: return ParamSort::Int;
    case 1: return ParamSort::Float;
    default: return ParamSort::String;
    }
}

std::string to_string(const Param& p) {
    if (auto i = std::get_if<std::int64_t>(&p)) return std::to_string(*i);
    if (auto d = std::get_if<double>(&p)) {
        std::ostringstream os;
        os.precision(17);
        os << *d;
        std::string s = os.str();
        if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
        return s;
    }
    return "\"" + std::get<std::string>(p) + "\"";
}

bool param_equal(const Param& a, const Param& b) {
    if (a.index() != b.index()) return false;
    if (auto da = std::get_if<double>(&a)) {
        return std::bit_cast<std::uint64_t>(*da) == std::bit_cast<std::uint64_t>(std::get<double>(b));
    }
    return a == b;
}

ControlPtr Signature::add(Control control) {
    auto name = control.name;
    if (controls_.count(name)) fail(ErrorKind::DuplicateDefinition, "Control " + name + " is already defined");
    auto ptr = std::make_shared<const Control>(std::move(control));
    controls_.emplace(name, ptr);
    return ptr;
}

ControlPtr Signature::find(const std::string& name) const {
    auto it = controls_.find(name);
    return it == controls_.end() ? nullptr : it->second;
}

ControlPtr Signature::at(const std::string& name) const {
    auto c = find(name);
    if (!c) fail(ErrorKind::UnknownIdentifier, "Unknown control " + name);
    return c;
}

bool same_kind(const Node& a, const Node& b) {
    if (a.control != b.control) {
        if (a.control->name != b.control->name || a.control->arity != b.control->arity) return false;
    }
    if (a.params.size() != b.params.size()) return false;
    for (std::size_t i = 0; i < a.params.size(); ++i) {
        if (!param_equal(a.params[i], b.params[i])) return false;
    }
    return true;
}

std::string to_string(const Interface& face) {
    std::string out = "<" + std::to_string(face.width) + ", {";
    for (std::size_t i = 0; i < face.names.size(); ++i) {
        if (i) out += ", ";
        out += face.names[i];
    }
    return out + "}>";
}

std::vector<std::string> Bigraph::outer_names() const {
    std::vector<std::string> names;
    for (const auto& l : links) {
        if (l.outer) names.push_back(*l.outer);
    }
    std::sort(names.begin(), names.end());
    return names;
}

std::vector<std::string> Bigraph::inner_names() const {
    std::vector<std::string> names;
    for (const auto& l : links) names.insert(names.end(), l.inner.begin(), l.inner.end());
    std::sort(names.begin(), names.end());
    return names;
}

Interface Bigraph::outer_face() const { return {regions, outer_names()}; }
Interface Bigraph::inner_face() const { return {sites, inner_names()}; }

std::optional<int> Bigraph::link_of_outer(const std::string& name) const {
    for (std::size_t i = 0; i < links.size(); ++i) {
        if (links[i].outer && *links[i].outer == name) return static_cast<int>(i);
    }
    return std::nullopt;
}

bool Bigraph::has_sharing() const {
    for (const auto& ps : node_parents) if (ps.size() > 1) return true;
    for (const auto& ps : site_parents) if (ps.size() > 1) return true;
    return false;
}

Topology::Topology(const Bigraph& b)
    : region_child_nodes(b.regions), region_child_sites(b.regions),
      node_child_nodes(b.nodes.size()), node_child_sites(b.nodes.size()),
      link_ports(b.links.size()) {
    for (std::size_t n = 0; n < b.nodes.size(); ++n) {
        for (const auto& p : b.node_parents[n]) {
            auto& list = p.is_region() ? region_child_nodes[p.index] : node_child_nodes[p.index];
            list.push_back(static_cast<int>(n));
        }
        for (int l : b.ports[n]) link_ports[l].push_back(static_cast<int>(n));
    }
    for (std::size_t s = 0; s < b.site_parents.size(); ++s) {
        for (const auto& p : b.site_parents[s]) {
            auto& list = p.is_region() ? region_child_sites[p.index] : node_child_sites[p.index];
            list.push_back(static_cast<int>(s));
        }
    }
}

Bigraph normalize(Bigraph b) {
    auto tidy = [](std::vector<Place>& ps) {
        std::sort(ps.begin(), ps.end());
        ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    };
    for (auto& ps : b.node_parents) tidy(ps);
    for (auto& ps : b.site_parents) tidy(ps);

    std::vector<int> used(b.links.size(), 0);
    for (const auto& ps : b.ports) for (int l : ps) ++used[l];
    std::vector<int> remap(b.links.size(), -1);
    std::vector<Link> kept;
    for (std::size_t l = 0; l < b.links.size(); ++l) {
        const auto& link = b.links[l];
        if (link.closed() && used[l] == 0 && link.inner.empty()) continue;
        remap[l] = static_cast<int>(kept.size());
        kept.push_back(link);
        std::sort(kept.back().inner.begin(), kept.back().inner.end());
    }
    b.links = std::move(kept);
    for (auto& ps : b.ports) {
        for (int& l : ps) l = remap[l];
        std::sort(ps.begin(), ps.end());
    }
    return b;
}

void check_well_formed(const Bigraph& b) {
    auto bad = [](const std::string& what) { fail(ErrorKind::Unsupported, "Malformed bigraph: " + what); };
    const auto n = b.nodes.size();
    if (b.node_parents.size() != n || b.ports.size() != n) bad("table sizes");
    if (static_cast<int>(b.site_parents.size()) != b.sites) bad("site table size");
    auto check_place = [&](const Place& p) {
        if (p.is_region() && (p.index < 0 || p.index >= b.regions)) bad("region index");
        if (p.is_node() && (p.index < 0 || p.index >= static_cast<int>(n))) bad("node index");
        if (p.is_node() && b.nodes[p.index].control->atomic) {
            fail(ErrorKind::AtomicViolation, "Atomic control " + b.nodes[p.index].control->name + " has children");
        }
    };
    for (const auto& ps : b.node_parents) {
        if (ps.empty()) bad("parentless node");
        for (const auto& p : ps) check_place(p);
    }
    for (const auto& ps : b.site_parents) {
        if (ps.empty()) bad("parentless site");
        for (const auto& p : ps) check_place(p);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!b.nodes[i].control) bad("node without control");
        if (static_cast<int>(b.ports[i].size()) != b.nodes[i].control->arity) bad("port count differs from arity");
        for (int l : b.ports[i]) if (l < 0 || l >= static_cast<int>(b.links.size())) bad("link index");
    }
    std::set<std::string> outer, inner;
    for (const auto& l : b.links) {
        if (l.outer && !outer.insert(*l.outer).second) bad("duplicate outer name " + *l.outer);
        for (const auto& x : l.inner) if (!inner.insert(x).second) bad("duplicate inner name " + x);
    }
    // Acyclicity: depth-first search over parent edges.
    std::vector<int> state(n, 0);
    std::vector<std::pair<int, std::size_t>> stack;
    for (std::size_t start = 0; start < n; ++start) {
        if (state[start]) continue;
        stack.push_back({static_cast<int>(start), 0});
        state[start] = 1;
        while (!stack.empty()) {
            auto& [v, i] = stack.back();
            if (i < b.node_parents[v].size()) {
                const auto p = b.node_parents[v][i++];
                if (!p.is_node()) continue;
                if (state[p.index] == 1) bad("cycle in place graph");
                if (state[p.index] == 0) {
                    state[p.index] = 1;
                    stack.push_back({p.index, 0});
                }
            } else {
                state[v] = 2;
                stack.pop_back();
            }
        }
    }
}

Bigraph empty_bigraph() { return Bigraph{}; }

Bigraph one() {
    Bigraph b;
    b.regions = 1;
    return b;
}

Bigraph identity() {
    Bigraph b;
    b.regions = 1;
    b.sites = 1;
    b.site_parents = {{Place::region(0)}};
    return b;
}

Bigraph idle_names(const std::vector<std::string>& names) {
    Bigraph b;
    std::set<std::string> seen;
    for (const auto& x : names) {
        if (!seen.insert(x).second) continue;
        b.links.push_back(Link{x, {}});
    }
    return b;
}

Bigraph link_identity(const std::vector<std::string>& names) {
    Bigraph b;
    std::set<std::string> seen;
    for (const auto& x : names) {
        if (!seen.insert(x).second) continue;
        b.links.push_back(Link{x, {x}});
    }
    return b;
}

Bigraph make_atom(const ControlPtr& control, std::vector<Param> params, const std::vector<std::string>& names) {
    if (static_cast<int>(names.size()) != control->arity) {
        fail(ErrorKind::ArityMismatch, "Control " + control->name + " has arity " + std::to_string(control->arity) +
                                           " but " + std::to_string(names.size()) + " names were given");
    }
    if (params.size() != control->param_sorts.size()) {
        fail(ErrorKind::SortMismatch, "Control " + control->name + " expects " +
                                          std::to_string(control->param_sorts.size()) + " parameters, got " +
                                          std::to_string(params.size()));
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto want = control->param_sorts[i];
        const auto got = sort_of(params[i]);
        if (want == got || want == ParamSort::Any) continue;
        if (want == ParamSort::Float && got == ParamSort::Int) {
            params[i] = static_cast<double>(std::get<std::int64_t>(params[i]));
            continue;
        }
        fail(ErrorKind::SortMismatch, "Parameter " + std::to_string(i) + " of " + control->name + " has the wrong sort");
    }
    Bigraph b;
    b.regions = 1;
    b.nodes.push_back(Node{control, std::move(params)});
    b.node_parents.push_back({Place::region(0)});
    std::vector<int> port_links;
    for (const auto& x : names) {
        auto l = b.link_of_outer(x);
        if (!l) {
            b.links.push_back(Link{x, {}});
            l = static_cast<int>(b.links.size()) - 1;
        }
        port_links.push_back(*l);
    }
    std::sort(port_links.begin(), port_links.end());
    b.ports.push_back(std::move(port_links));
    if (!control->atomic) {
        b.sites = 1;
        b.site_parents.push_back({Place::node(0)});
    }
    return b;
}

namespace {

// Appends `b` after `a` (nodes, regions, sites offset) and fuses links that
// share an outer name. Inner names must be disjoint.
Bigraph juxtapose(const Bigraph& a, const Bigraph& b) {
    Bigraph out = a;
    const int node_off = static_cast<int>(a.nodes.size());
    const int region_off = a.regions;
    auto shift = [&](Place p) {
        return p.is_region() ? Place::region(p.index + region_off) : Place::node(p.index + node_off);
    };
    out.regions = a.regions + b.regions;
    out.sites = a.sites + b.sites;
    for (std::size_t n = 0; n < b.nodes.size(); ++n) {
        out.nodes.push_back(b.nodes[n]);
        std::vector<Place> ps;
        for (auto p : b.node_parents[n]) ps.push_back(shift(p));
        out.node_parents.push_back(std::move(ps));
    }
    for (const auto& sp : b.site_parents) {
        std::vector<Place> ps;
        for (auto p : sp) ps.push_back(shift(p));
        out.site_parents.push_back(std::move(ps));
    }
    std::set<std::string> inner_a;
    for (const auto& l : a.links) inner_a.insert(l.inner.begin(), l.inner.end());
    std::vector<int> remap(b.links.size());
    for (std::size_t l = 0; l < b.links.size(); ++l) {
        const auto& link = b.links[l];
        for (const auto& x : link.inner) {
            if (inner_a.count(x)) fail(ErrorKind::NameClash, "Inner name " + x + " occurs on both sides of a product");
        }
        std::optional<int> target;
        if (link.outer) target = out.link_of_outer(*link.outer);
        if (target) {
            auto& dst = out.links[*target].inner;
            dst.insert(dst.end(), link.inner.begin(), link.inner.end());
            remap[l] = *target;
        } else {
            remap[l] = static_cast<int>(out.links.size());
            out.links.push_back(link);
        }
    }
    for (const auto& ps : b.ports) {
        std::vector<int> mapped;
        for (int l : ps) mapped.push_back(remap[l]);
        out.ports.push_back(std::move(mapped));
    }
    return normalize(std::move(out));
}

// Places region r of `inner` under the union of the parents of outer sites
// region_targets[r]. Outer sites are consumed; inner sites become the sites
// of the result. Inner outer names connect to outer inner names of the same
// identifier when present, otherwise fuse with outer names.
Bigraph graft(const Bigraph& outer, const Bigraph& inner, const std::vector<std::vector<int>>& region_targets) {
    Bigraph out;
    out.regions = outer.regions;
    out.nodes = outer.nodes;
    out.node_parents = outer.node_parents;
    out.links = outer.links;
    out.ports = outer.ports;
    const int node_off = static_cast<int>(outer.nodes.size());

    std::vector<std::vector<Place>> region_parents(inner.regions);
    for (int r = 0; r < inner.regions; ++r) {
        for (int s : region_targets[r]) {
            const auto& ps = outer.site_parents[s];
            region_parents[r].insert(region_parents[r].end(), ps.begin(), ps.end());
        }
    }
    auto map_parents = [&](const std::vector<Place>& ps) {
        std::vector<Place> mapped;
        for (auto p : ps) {
            if (p.is_node()) {
                mapped.push_back(Place::node(p.index + node_off));
            } else {
                const auto& rp = region_parents[p.index];
                mapped.insert(mapped.end(), rp.begin(), rp.end());
            }
        }
        return mapped;
    };
    for (std::size_t n = 0; n < inner.nodes.size(); ++n) {
        auto ps = map_parents(inner.node_parents[n]);
        if (ps.empty()) fail(ErrorKind::Unsupported, "Placement leaves a node without parents");
        out.nodes.push_back(inner.nodes[n]);
        out.node_parents.push_back(std::move(ps));
    }
    out.sites = inner.sites;
    for (const auto& sp : inner.site_parents) {
        auto ps = map_parents(sp);
        if (ps.empty()) fail(ErrorKind::Unsupported, "Placement leaves a site without parents");
        out.site_parents.push_back(std::move(ps));
    }
    for (const auto& ps : out.node_parents) {
        for (auto p : ps) {
            if (p.is_node() && out.nodes[p.index].control->atomic) {
                fail(ErrorKind::AtomicViolation, "Cannot place children under atomic control " +
                                                     out.nodes[p.index].control->name);
            }
        }
    }

    std::vector<int> remap(inner.links.size());
    for (std::size_t l = 0; l < inner.links.size(); ++l) {
        const auto& link = inner.links[l];
        std::optional<int> target;
        if (link.outer) {
            for (std::size_t k = 0; k < out.links.size() && !target; ++k) {
                auto& in = out.links[k].inner;
                auto it = std::find(in.begin(), in.end(), *link.outer);
                if (it != in.end()) {
                    in.erase(it);
                    target = static_cast<int>(k);
                }
            }
            if (!target) target = out.link_of_outer(*link.outer);
        }
        if (target) {
            auto& dst = out.links[*target].inner;
            dst.insert(dst.end(), link.inner.begin(), link.inner.end());
            remap[l] = *target;
        } else {
            remap[l] = static_cast<int>(out.links.size());
            out.links.push_back(link);
        }
    }
    for (const auto& ps : inner.ports) {
        std::vector<int> mapped;
        for (int l : ps) mapped.push_back(remap[l]);
        out.ports.push_back(std::move(mapped));
    }
    return normalize(std::move(out));
}

bool has_atomic_root(const Bigraph& b) {
    for (const auto& n : b.nodes) if (n.control->atomic) return true;
    return false;
}

} // namespace

Bigraph nest(const Bigraph& outer, const Bigraph& inner) {
    if (outer.sites != inner.regions) {
        if (outer.sites == 0 && has_atomic_root(outer)) {
            fail(ErrorKind::AtomicViolation, "Cannot nest inside an atomic control");
        }
        fail(ErrorKind::WidthMismatch, "Nesting requires " + std::to_string(outer.sites) +
                                           " regions but the inner bigraph has " + std::to_string(inner.regions));
    }
    std::vector<std::vector<int>> targets(inner.regions);
    for (int r = 0; r < inner.regions; ++r) targets[r] = {r};
    return graft(outer, inner, targets);
}

Bigraph merge_regions(const Bigraph& b) {
    Bigraph out = b;
    out.regions = 1;
    for (auto& ps : out.node_parents) {
        for (auto& p : ps) if (p.is_region()) p.index = 0;
    }
    for (auto& ps : out.site_parents) {
        for (auto& p : ps) if (p.is_region()) p.index = 0;
    }
    return normalize(std::move(out));
}

Bigraph merge(const Bigraph& a, const Bigraph& b) { return merge_regions(juxtapose(a, b)); }

Bigraph parallel(const Bigraph& a, const Bigraph& b) { return juxtapose(a, b); }

Bigraph close(const std::string& name, const Bigraph& b) {
    auto l = b.link_of_outer(name);
    if (!l) fail(ErrorKind::UnknownName, "Cannot close " + name + ": not an outer name");
    Bigraph out = b;
    bool has_ports = false;
    for (const auto& ps : b.ports) {
        if (std::find(ps.begin(), ps.end(), *l) != ps.end()) has_ports = true;
    }
    if (!has_ports && b.links[*l].inner.empty()) fail(ErrorKind::EmptyClosure, "Cannot close idle name " + name);
    out.links[*l].outer.reset();
    return normalize(std::move(out));
}

Bigraph share(const Bigraph& contents, const std::vector<std::vector<int>>& placement, int site_count,
              const Bigraph& host) {
    if (static_cast<int>(placement.size()) != contents.regions) {
        fail(ErrorKind::WidthMismatch, "Placement has " + std::to_string(placement.size()) + " entries but " +
                                           std::to_string(contents.regions) + " regions are shared");
    }
    for (const auto& set : placement) {
        for (int s : set) {
            if (s < 0 || s >= site_count) {
                fail(ErrorKind::IndexOutOfRange, "Site " + std::to_string(s) + " is out of range for " +
                                                     std::to_string(site_count) + " sites");
            }
        }
    }
    if (host.sites != site_count) {
        fail(ErrorKind::WidthMismatch, "Host has " + std::to_string(host.sites) + " sites, expected " +
                                           std::to_string(site_count));
    }
    std::vector<std::vector<int>> targets;
    for (const auto& set : placement) {
        std::vector<int> t(set.begin(), set.end());
        std::sort(t.begin(), t.end());
        t.erase(std::unique(t.begin(), t.end()), t.end());
        targets.push_back(std::move(t));
    }
    return graft(host, contents, targets);
}

bool is_ground(const Bigraph& b) { return b.sites == 0 && b.inner_names().empty(); }

bool is_solid(const Bigraph& b) {
    Topology topo(b);
    for (int r = 0; r < b.regions; ++r) {
        if (topo.region_child_nodes[r].empty()) return false;
        if (!topo.region_child_sites[r].empty()) return false;
    }
    for (std::size_t l = 0; l < b.links.size(); ++l) {
        const auto& link = b.links[l];
        if (link.outer && topo.link_ports[l].empty() && link.inner.empty()) return false;
        if (link.outer && !link.inner.empty()) return false;
        if (link.inner.size() > 1) return false;
    }
    for (const auto& sites : topo.node_child_sites) {
        if (sites.size() > 1) return false;
    }
    return true;
}

} // namespace bigraph
