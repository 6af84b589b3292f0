#pragma once
// Random bigraphs for property tests.

#include "bigraph/bigraph.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace testgen {

using namespace bigraph;

struct Rng {
    std::mt19937_64 eng;
    explicit Rng(std::uint64_t seed) : eng(seed) {}
    int range(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng); }
    bool coin(double p = 0.5) { return std::uniform_real_distribution<double>(0, 1)(eng) < p; }
    template <class T>
    const T& pick(const std::vector<T>& v) { return v[range(0, static_cast<int>(v.size()) - 1)]; }
};

// Up to four controls A..D, arity 0..2; at least one non-atomic.
inline Signature random_signature(Rng& rng, int max_controls = 4) {
    Signature sig;
    const int n = rng.range(1, max_controls);
    for (int i = 0; i < n; ++i) {
        Control c;
        c.name = std::string(1, static_cast<char>('A' + i));
        c.arity = rng.range(0, 2);
        c.atomic = i > 0 && rng.coin(0.3);
        sig.add(c);
    }
    return sig;
}

inline std::vector<ControlPtr> controls_of(const Signature& sig) {
    std::vector<ControlPtr> out;
    for (const auto& [name, c] : sig.controls()) out.push_back(c);
    return out;
}

struct GroundOptions {
    int max_nodes = 8;
    int max_regions = 2;
    double open_link = 0.35;   // chance a fresh link gets an outer name
    double reuse_link = 0.5;   // chance a port joins an existing link
    double idle_name = 0.1;
};

// Random ground forest. Outer names are drawn from x0, x1, ...
inline Bigraph random_ground(Rng& rng, const Signature& sig, const GroundOptions& o = {}) {
    const auto ctrls = controls_of(sig);
    Bigraph b;
    b.regions = rng.range(1, o.max_regions);
    const int n = rng.range(0, o.max_nodes);
    int names = 0;
    for (int i = 0; i < n; ++i) {
        Node node{rng.pick(ctrls), {}};
        std::vector<Place> parents;
        for (int r = 0; r < b.regions; ++r) parents.push_back(Place::region(r));
        for (int j = 0; j < i; ++j) {
            if (!b.nodes[j].control->atomic) parents.push_back(Place::node(j));
        }
        b.node_parents.push_back({rng.pick(parents)});
        std::vector<int> ports;
        for (int p = 0; p < node.control->arity; ++p) {
            if (!b.links.empty() && rng.coin(o.reuse_link)) {
                ports.push_back(rng.range(0, static_cast<int>(b.links.size()) - 1));
            } else {
                Link l;
                if (rng.coin(o.open_link)) l.outer = "x" + std::to_string(names++);
                b.links.push_back(l);
                ports.push_back(static_cast<int>(b.links.size()) - 1);
            }
        }
        b.ports.push_back(ports);
        b.nodes.push_back(node);
    }
    if (rng.coin(o.idle_name)) b.links.push_back(Link{"x" + std::to_string(names++), {}});
    return normalize(std::move(b));
}

// Renumbers sites in depth-first order of (region, node index) so that the
// printed form lists them left to right.
inline Bigraph renumber_sites(Bigraph b) {
    const Topology t(b);
    std::vector<int> order;
    std::function<void(const std::vector<int>&, const std::vector<int>&)> walk =
        [&](const std::vector<int>& nodes, const std::vector<int>& sites) {
            for (int n : nodes) walk(t.node_child_nodes[n], t.node_child_sites[n]);
            for (int s : sites) order.push_back(s);
        };
    for (int r = 0; r < b.regions; ++r) walk(t.region_child_nodes[r], t.region_child_sites[r]);
    std::vector<std::vector<Place>> parents(b.sites);
    for (int i = 0; i < b.sites; ++i) parents[i] = b.site_parents[order[i]];
    b.site_parents = parents;
    return normalize(std::move(b));
}

// Adds sites under random places of a ground bigraph.
inline Bigraph with_random_sites(Rng& rng, Bigraph b, int max_sites = 3) {
    const int k = rng.range(0, max_sites);
    std::vector<Place> places;
    for (int r = 0; r < b.regions; ++r) places.push_back(Place::region(r));
    for (std::size_t n = 0; n < b.nodes.size(); ++n) {
        if (!b.nodes[n].control->atomic) places.push_back(Place::node(static_cast<int>(n)));
    }
    for (int i = 0; i < k; ++i) b.site_parents.push_back({rng.pick(places)});
    b.sites = k;
    return renumber_sites(std::move(b));
}

// Solid pattern cut out of a target around a random node, so that most
// patterns have at least one occurrence. Returns an empty optional-like
// bigraph (0 regions) when the cut is not solid.
inline Bigraph pattern_from(Rng& rng, const Bigraph& target, int max_nodes = 4) {
    const Topology t(target);
    const int n = static_cast<int>(target.nodes.size());
    if (n == 0) return empty_bigraph();
    std::vector<int> chosen{rng.range(0, n - 1)};
    // Grow by children and siblings-of-chosen until the budget runs out.
    const int want = rng.range(1, max_nodes);
    for (int guard = 0; static_cast<int>(chosen.size()) < want && guard < 20; ++guard) {
        std::vector<int> frontier;
        for (int c : chosen) {
            for (int k : t.node_child_nodes[c]) frontier.push_back(k);
            const auto par = target.node_parents[c][0];
            const auto& sib = par.is_region() ? t.region_child_nodes[par.index] : t.node_child_nodes[par.index];
            for (int k : sib) frontier.push_back(k);
        }
        std::erase_if(frontier, [&](int k) { return std::count(chosen.begin(), chosen.end(), k) > 0; });
        if (frontier.empty()) break;
        chosen.push_back(rng.pick(frontier));
    }
    std::sort(chosen.begin(), chosen.end());
    std::vector<int> index(n, -1);
    for (std::size_t i = 0; i < chosen.size(); ++i) index[chosen[i]] = static_cast<int>(i);

    Bigraph p;
    // One region per distinct outside parent (optionally split further).
    std::vector<std::pair<Place, int>> region_of_parent;
    for (int c : chosen) {
        const auto par = target.node_parents[c][0];
        if (par.is_node() && index[par.index] >= 0) {
            p.node_parents.push_back({Place::node(index[par.index])});
            continue;
        }
        int r = -1;
        for (auto& [pl, reg] : region_of_parent) {
            if (pl == par && !rng.coin(0.25)) r = reg;
        }
        if (r < 0) {
            r = p.regions++;
            region_of_parent.emplace_back(par, r);
        }
        p.node_parents.push_back({Place::region(r)});
    }
    for (int c : chosen) {
        p.nodes.push_back(target.nodes[c]);
        bool extra = false;
        for (int k : t.node_child_nodes[c]) extra = extra || index[k] < 0;
        if (extra || (!target.nodes[c].control->atomic && rng.coin(0.3))) {
            p.site_parents.push_back({Place::node(index[c])});
            ++p.sites;
        }
    }
    // Links: closed edges stay closed when wholly inside; otherwise open
    // names, sometimes split per port.
    std::vector<int> link_index(target.links.size(), -1);
    int names = 0;
    for (int c : chosen) {
        std::vector<int> ports;
        for (int l : target.ports[c]) {
            bool inside = target.links[l].closed();
            for (int owner : t.link_ports[l]) inside = inside && index[owner] >= 0;
            if (inside && rng.coin(0.8)) {
                if (link_index[l] < 0) {
                    link_index[l] = static_cast<int>(p.links.size());
                    p.links.push_back(Link{});
                }
                ports.push_back(link_index[l]);
                continue;
            }
            if (link_index[l] < 0 || rng.coin(0.2)) {
                link_index[l] = static_cast<int>(p.links.size());
                p.links.push_back(Link{"y" + std::to_string(names++), {}});
            }
            ports.push_back(link_index[l]);
        }
        p.ports.push_back(ports);
    }
    p = renumber_sites(normalize(std::move(p)));
    return is_solid(p) ? p : empty_bigraph();
}

// Independent small pattern over the same signature.
inline Bigraph random_pattern(Rng& rng, const Signature& sig, int max_nodes = 4) {
    GroundOptions o;
    o.max_nodes = max_nodes;
    o.max_regions = 2;
    o.idle_name = 0;
    o.open_link = 0.6;
    auto b = random_ground(rng, sig, o);
    std::vector<int> eligible;
    for (std::size_t i = 0; i < b.nodes.size(); ++i) {
        if (!b.nodes[i].control->atomic && rng.coin(0.4)) eligible.push_back(static_cast<int>(i));
    }
    for (int e : eligible) b.site_parents.push_back({Place::node(e)});
    b.sites = static_cast<int>(eligible.size());
    b = renumber_sites(std::move(b));
    return is_solid(b) ? b : empty_bigraph();
}

// Copy with outer name `from` renamed to `to`.
inline Bigraph rename_outer(Bigraph b, const std::string& from, const std::string& to) {
    for (auto& l : b.links) {
        if (l.outer == from) l.outer = to;
    }
    return normalize(std::move(b));
}

// Same bigraph with nodes and links stored in a shuffled order.
inline Bigraph shuffled(Rng& rng, const Bigraph& b) {
    const int n = static_cast<int>(b.nodes.size());
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng.eng);  // old i -> new perm[i]
    std::vector<int> lperm(b.links.size());
    for (std::size_t i = 0; i < lperm.size(); ++i) lperm[i] = static_cast<int>(i);
    std::shuffle(lperm.begin(), lperm.end(), rng.eng);
    Bigraph out = b;
    auto remap = [&](const std::vector<Place>& ps) {
        std::vector<Place> r;
        for (auto p : ps) r.push_back(p.is_node() ? Place::node(perm[p.index]) : p);
        return r;
    };
    for (int i = 0; i < n; ++i) {
        out.nodes[perm[i]] = b.nodes[i];
        out.node_parents[perm[i]] = remap(b.node_parents[i]);
        std::vector<int> ports;
        for (int l : b.ports[i]) ports.push_back(lperm[l]);
        out.ports[perm[i]] = ports;
    }
    for (int s = 0; s < b.sites; ++s) out.site_parents[s] = remap(b.site_parents[s]);
    for (std::size_t l = 0; l < b.links.size(); ++l) out.links[lperm[l]] = b.links[l];
    return normalize(std::move(out));
}

} // namespace testgen
