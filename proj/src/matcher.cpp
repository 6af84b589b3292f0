#include "bigraph/matcher.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

namespace bigraph {

namespace {

// Pattern facts used by the search, precomputed once per call.
struct PatternInfo {
    std::vector<std::vector<int>> node_parents;  // node parents only
    std::vector<int> region_parent;              // -1 when none
    std::vector<int> site;                       // child site, -1 when none
    std::vector<std::vector<int>> child_nodes;
    std::vector<int> site_parent;                // pattern node owning each site
    std::vector<int> link_port_count;
    std::vector<int> outer_links;                // links carrying an outer name, by name order
    std::vector<std::vector<int>> top_nodes;     // per region
};

PatternInfo analyse_pattern(const Bigraph& p) {
    if (!is_solid(p)) fail(ErrorKind::PatternNotSolid, "Pattern is not solid");
    if (!p.inner_names().empty()) fail(ErrorKind::Unsupported, "Patterns with inner names are not supported");
    const Topology topo(p);
    PatternInfo info;
    const auto n = p.nodes.size();
    info.node_parents.resize(n);
    info.region_parent.assign(n, -1);
    info.site.assign(n, -1);
    info.child_nodes = topo.node_child_nodes;
    info.top_nodes = topo.region_child_nodes;
    for (std::size_t v = 0; v < n; ++v) {
        for (auto q : p.node_parents[v]) {
            if (q.is_node()) {
                info.node_parents[v].push_back(q.index);
            } else if (info.region_parent[v] >= 0) {
                fail(ErrorKind::Unsupported, "Pattern nodes shared between regions are not supported");
            } else {
                info.region_parent[v] = q.index;
            }
        }
        if (!topo.node_child_sites[v].empty()) info.site[v] = topo.node_child_sites[v].front();
    }
    info.site_parent.assign(p.sites, -1);
    for (int s = 0; s < p.sites; ++s) {
        const auto& ps = p.site_parents[s];
        if (ps.size() != 1 || !ps.front().is_node()) {
            fail(ErrorKind::Unsupported, "Pattern sites must have exactly one node parent");
        }
        info.site_parent[s] = ps.front().index;
    }
    for (const auto& lp : topo.link_ports) info.link_port_count.push_back(static_cast<int>(lp.size()));
    std::vector<std::pair<std::string, int>> named;
    for (std::size_t l = 0; l < p.links.size(); ++l) {
        if (p.links[l].outer) named.push_back({*p.links[l].outer, static_cast<int>(l)});
    }
    std::sort(named.begin(), named.end());
    for (const auto& [_, l] : named) info.outer_links.push_back(l);
    return info;
}

using Key = std::vector<int>;

class Matcher {
public:
    Matcher(const Bigraph& target, const Bigraph& pattern, const std::vector<bool>* allowed, bool first_only)
        : t_(target), p_(pattern), info_(analyse_pattern(pattern)), topo_(target), allowed_(allowed),
          first_only_(first_only) {
        phi_.assign(p_.nodes.size(), -1);
        inv_.assign(t_.nodes.size(), -1);
        psi_.assign(p_.links.size(), -1);
        closed_owner_.assign(t_.links.size(), -1);
        classify();
        plan();
    }

    std::vector<Occurrence> run() {
        if (p_.nodes.empty()) return {};
        if (feasible_) extend(0);
        std::vector<Occurrence> out;
        out.reserve(found_.size());
        for (auto& [_, occ] : found_) out.push_back(std::move(occ));
        return out;
    }

private:
    // Kind ids: pattern nodes get the id of their (control, params) class;
    // target nodes get the same id when they match some pattern class.
    void classify() {
        pkind_.assign(p_.nodes.size(), -1);
        std::vector<int> reps;
        for (std::size_t v = 0; v < p_.nodes.size(); ++v) {
            for (std::size_t k = 0; k < reps.size(); ++k) {
                if (same_kind(p_.nodes[v], p_.nodes[reps[k]])) {
                    pkind_[v] = static_cast<int>(k);
                    break;
                }
            }
            if (pkind_[v] < 0) {
                pkind_[v] = static_cast<int>(reps.size());
                reps.push_back(static_cast<int>(v));
            }
        }
        by_kind_.assign(reps.size(), {});
        tkind_.assign(t_.nodes.size(), -1);
        for (std::size_t u = 0; u < t_.nodes.size(); ++u) {
            if (allowed_ && !(*allowed_)[u]) continue;
            for (std::size_t k = 0; k < reps.size(); ++k) {
                if (same_kind(t_.nodes[u], p_.nodes[reps[k]])) {
                    tkind_[u] = static_cast<int>(k);
                    by_kind_[k].push_back(static_cast<int>(u));
                    break;
                }
            }
        }
    }

    // Rarest kind first, then grow along place and link adjacency so that
    // each later node has an anchor to draw candidates from.
    void plan() {
        const auto n = p_.nodes.size();
        std::vector<bool> placed(n, false);
        std::vector<std::vector<int>> link_nodes(p_.links.size());
        for (std::size_t v = 0; v < n; ++v) for (int l : p_.ports[v]) link_nodes[l].push_back(static_cast<int>(v));
        anchor_.assign(n, {});
        for (std::size_t v = 0; v < n; ++v) {
            if (by_kind_[pkind_[v]].empty()) feasible_ = false;
        }
        while (order_.size() < n) {
            int best = -1;
            int best_rank = 0;
            Anchor best_anchor;
            for (std::size_t v = 0; v < n; ++v) {
                if (placed[v]) continue;
                Anchor a;
                int rank = 3;
                for (int q : info_.node_parents[v]) {
                    if (placed[q]) { a = {Anchor::Parent, q}; rank = 0; break; }
                }
                if (rank > 1) {
                    for (int c : info_.child_nodes[v]) {
                        if (placed[c]) { a = {Anchor::Child, c}; rank = 1; break; }
                    }
                }
                if (rank > 2) {
                    for (int l : p_.ports[v]) {
                        for (int w : link_nodes[l]) {
                            if (placed[w]) { a = {Anchor::Link, l}; rank = 2; break; }
                        }
                        if (rank == 2) break;
                    }
                }
                const int score = rank * 1000000 + static_cast<int>(by_kind_[pkind_[v]].size());
                if (best < 0 || score < best_rank) {
                    best = static_cast<int>(v);
                    best_rank = score;
                    best_anchor = a;
                }
            }
            placed[best] = true;
            order_.push_back(best);
            anchor_[best] = best_anchor;
        }
    }

    struct Anchor {
        enum Kind { None, Parent, Child, Link } kind = None;
        int index = -1;
    };

    std::vector<int> candidates(int p) const {
        const auto& a = anchor_[p];
        std::vector<int> out;
        switch (a.kind) {
        case Anchor::Parent: out = topo_.node_child_nodes[phi_[a.index]]; break;
        case Anchor::Child:
            for (auto q : t_.node_parents[phi_[a.index]]) if (q.is_node()) out.push_back(q.index);
            break;
        case Anchor::Link:
            out = topo_.link_ports[psi_[a.index]];
            out.erase(std::unique(out.begin(), out.end()), out.end());
            break;
        case Anchor::None: return by_kind_[pkind_[p]];
        }
        return out;
    }

    bool place_consistent(int p, int t) const {
        const auto& tparents = t_.node_parents[t];
        std::size_t node_parents = 0;
        for (auto q : tparents) {
            if (!q.is_node()) continue;
            ++node_parents;
            const int pre = inv_[q.index];
            if (pre >= 0) {
                const auto& np = info_.node_parents[p];
                if (std::find(np.begin(), np.end(), pre) == np.end()) return false;
            }
        }
        const auto& np = info_.node_parents[p];
        if (info_.region_parent[p] < 0) {
            if (tparents.size() != np.size()) return false;
        } else if (tparents.size() <= np.size()) {
            return false;
        }
        if (node_parents < np.size()) return false;
        for (int q : np) {
            if (phi_[q] >= 0 && !std::binary_search(tparents.begin(), tparents.end(), Place::node(phi_[q]))) return false;
        }
        const auto& tchildren = topo_.node_child_nodes[t];
        const auto& pchildren = info_.child_nodes[p];
        if (info_.site[p] < 0 ? tchildren.size() != pchildren.size() : tchildren.size() < pchildren.size()) return false;
        for (int c : tchildren) {
            const int pre = inv_[c];
            if (pre >= 0 && std::find(pchildren.begin(), pchildren.end(), pre) == pchildren.end()) return false;
        }
        for (int c : pchildren) {
            if (phi_[c] >= 0) {
                const auto& cp = t_.node_parents[phi_[c]];
                if (!std::binary_search(cp.begin(), cp.end(), Place::node(t))) return false;
            }
        }
        return true;
    }

    void extend(std::size_t depth) {
        if (done_) return;
        if (depth == order_.size()) {
            finish();
            return;
        }
        const int p = order_[depth];
        for (int t : candidates(p)) {
            if (inv_[t] >= 0 || tkind_[t] != pkind_[p]) continue;
            if (!place_consistent(p, t)) continue;
            phi_[p] = t;
            inv_[t] = p;
            assign_ports(p, t, depth);
            phi_[p] = -1;
            inv_[t] = -1;
            if (done_) return;
        }
    }

    // Unordered ports: the pattern node's link multiset pushed through psi
    // must equal the target node's link multiset.
    void assign_ports(int p, int t, std::size_t depth) {
        std::map<int, int> remaining;
        for (int l : t_.ports[t]) ++remaining[l];
        std::map<int, int> pending;
        for (int l : p_.ports[p]) {
            if (psi_[l] >= 0) {
                if (--remaining[psi_[l]] < 0) return;
            } else {
                ++pending[l];
            }
        }
        std::vector<std::pair<int, int>> todo(pending.begin(), pending.end());
        assign_links(todo, 0, remaining, depth);
    }

    void assign_links(const std::vector<std::pair<int, int>>& todo, std::size_t i, std::map<int, int>& remaining,
                      std::size_t depth) {
        if (done_) return;
        if (i == todo.size()) {
            extend(depth + 1);
            return;
        }
        const auto [pl, count] = todo[i];
        const bool closed = p_.links[pl].closed();
        for (auto& [tl, left] : remaining) {
            if (left < count) continue;
            if (closed) {
                if (!t_.links[tl].closed() || closed_owner_[tl] >= 0) continue;
                if (static_cast<int>(topo_.link_ports[tl].size()) != info_.link_port_count[pl]) continue;
                closed_owner_[tl] = pl;
            }
            psi_[pl] = tl;
            left -= count;
            assign_links(todo, i + 1, remaining, depth);
            left += count;
            psi_[pl] = -1;
            if (closed) closed_owner_[tl] = -1;
            if (done_) return;
        }
    }

    void finish() {
        const auto n = t_.nodes.size();
        std::vector<bool> image(n, false);
        for (int t : phi_) image[t] = true;

        Occurrence occ;
        occ.node_map = phi_;
        occ.link_map = psi_;
        // Closed edges own exactly the imaged ports.
        for (std::size_t l = 0; l < p_.links.size(); ++l) {
            if (!p_.links[l].closed()) continue;
            for (int owner : topo_.link_ports[psi_[l]]) if (!image[owner]) return;
        }

        // Parameter: everything below image nodes that is not an image.
        std::vector<bool> param(n, false);
        std::vector<int> stack;
        for (int t : phi_) {
            for (int c : topo_.node_child_nodes[t]) {
                if (!image[c] && !param[c]) {
                    param[c] = true;
                    stack.push_back(c);
                }
            }
        }
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int c : topo_.node_child_nodes[v]) {
                if (image[c]) return;
                if (!param[c]) {
                    param[c] = true;
                    stack.push_back(c);
                }
            }
        }
        for (std::size_t v = 0; v < n; ++v) {
            if (!param[v]) continue;
            for (auto q : t_.node_parents[v]) {
                if (q.is_region() || !(image[q.index] || param[q.index])) return;
            }
        }

        // Region placement must be common to all top nodes and lie in the context.
        occ.region_loc.assign(p_.regions, {});
        for (int r = 0; r < p_.regions; ++r) {
            bool first = true;
            for (int p : info_.top_nodes[r]) {
                std::vector<Place> loc;
                for (auto q : t_.node_parents[phi_[p]]) {
                    if (q.is_node() && image[q.index]) continue;
                    if (q.is_node() && param[q.index]) return;
                    loc.push_back(q);
                }
                if (first) {
                    occ.region_loc[r] = std::move(loc);
                    first = false;
                } else if (loc != occ.region_loc[r]) {
                    return;
                }
            }
        }

        occ.site_roots.assign(p_.sites, {});
        for (int s = 0; s < p_.sites; ++s) {
            for (int c : topo_.node_child_nodes[phi_[info_.site_parent[s]]]) {
                if (!image[c]) occ.site_roots[s].push_back(c);
            }
        }
        for (std::size_t v = 0; v < n; ++v) {
            if (param[v]) occ.param_nodes.push_back(static_cast<int>(v));
            else if (!image[v]) occ.context_nodes.push_back(static_cast<int>(v));
        }

        Key key(occ.node_map.begin(), occ.node_map.end());
        std::sort(key.begin(), key.end());
        for (const auto& roots : occ.site_roots) {
            key.push_back(-1);
            key.insert(key.end(), roots.begin(), roots.end());
        }
        key.push_back(-2);
        for (int l : info_.outer_links) key.push_back(psi_[l]);
        found_.try_emplace(std::move(key), std::move(occ));
        if (first_only_) done_ = true;
    }

    const Bigraph& t_;
    const Bigraph& p_;
    PatternInfo info_;
    Topology topo_;
    const std::vector<bool>* allowed_;
    bool first_only_;
    bool feasible_ = true;
    bool done_ = false;

    std::vector<int> pkind_, tkind_;
    std::vector<std::vector<int>> by_kind_;
    std::vector<int> order_;
    std::vector<Anchor> anchor_;
    std::vector<int> phi_, inv_, psi_, closed_owner_;
    std::map<Key, Occurrence> found_;
};

void require_ground(const Bigraph& target) {
    if (!is_ground(target)) fail(ErrorKind::TargetNotGround, "Matching requires a ground target");
}

// Builds a ground width-1 bigraph over `keep` (sorted target nodes).
// Parents outside the set collapse onto the region; links keep their target
// identity as fresh names unless closed and wholly inside the set.
Bigraph restrict_to(const Bigraph& target, const std::vector<int>& keep) {
    const Topology topo(target);
    std::vector<int> index(target.nodes.size(), -1);
    for (std::size_t i = 0; i < keep.size(); ++i) index[keep[i]] = static_cast<int>(i);
    Bigraph out;
    out.regions = 1;
    std::map<int, int> link_index;
    for (int v : keep) {
        out.nodes.push_back(target.nodes[v]);
        std::vector<Place> ps;
        for (auto q : target.node_parents[v]) {
            if (q.is_node() && index[q.index] >= 0) ps.push_back(Place::node(index[q.index]));
            else ps.push_back(Place::region(0));
        }
        out.node_parents.push_back(std::move(ps));
        std::vector<int> ports;
        for (int l : target.ports[v]) {
            auto it = link_index.find(l);
            if (it == link_index.end()) {
                bool inside = target.links[l].closed();
                for (int owner : topo.link_ports[l]) if (index[owner] < 0) inside = false;
                Link link;
                if (!inside) link.outer = target.links[l].outer ? *target.links[l].outer : "~" + std::to_string(l);
                it = link_index.emplace(l, static_cast<int>(out.links.size())).first;
                out.links.push_back(std::move(link));
            }
            ports.push_back(it->second);
        }
        out.ports.push_back(std::move(ports));
    }
    return normalize(std::move(out));
}

} // namespace

std::vector<Occurrence> find_occurrences(const Bigraph& target, const Bigraph& pattern) {
    require_ground(target);
    return Matcher(target, pattern, nullptr, false).run();
}

std::vector<Occurrence> find_occurrences_within(const Bigraph& target, const Bigraph& pattern,
                                                const std::vector<bool>& allowed, bool first_only) {
    require_ground(target);
    return Matcher(target, pattern, &allowed, first_only).run();
}

std::size_t count_occurrences(const Bigraph& target, const Bigraph& pattern) {
    return find_occurrences(target, pattern).size();
}

bool matches_predicate(const Bigraph& state, const Bigraph& pattern) {
    require_ground(state);
    return !Matcher(state, pattern, nullptr, true).run().empty();
}

Bigraph parameter_of(const Bigraph& target, const Occurrence& occ, int site) {
    const Topology topo(target);
    std::set<int> seen(occ.site_roots.at(site).begin(), occ.site_roots.at(site).end());
    std::vector<int> stack(seen.begin(), seen.end());
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int c : topo.node_child_nodes[v]) if (seen.insert(c).second) stack.push_back(c);
    }
    return restrict_to(target, std::vector<int>(seen.begin(), seen.end()));
}

Bigraph merged_parameter(const Bigraph& target, const Occurrence& occ) {
    return restrict_to(target, occ.param_nodes);
}

bool check_constraints(const Bigraph& target, const Occurrence& occ, const std::vector<MatchConstraint>& constraints) {
    if (constraints.empty()) return true;
    std::optional<Bigraph> param;
    std::vector<bool> context;
    for (const auto& c : constraints) {
        bool present = false;
        switch (c.kind) {
        case MatchConstraint::Kind::PresentInParam:
        case MatchConstraint::Kind::AbsentInParam:
            if (!param) param = merged_parameter(target, occ);
            present = matches_predicate(*param, c.pattern);
            break;
        case MatchConstraint::Kind::PresentInCtx:
        case MatchConstraint::Kind::AbsentInCtx:
            if (context.empty()) {
                context.assign(target.nodes.size(), false);
                for (int v : occ.context_nodes) context[v] = true;
            }
            present = !find_occurrences_within(target, c.pattern, context, true).empty();
            break;
        }
        const bool want = c.kind == MatchConstraint::Kind::PresentInParam || c.kind == MatchConstraint::Kind::PresentInCtx;
        if (present != want) return false;
    }
    return true;
}

} // namespace bigraph
