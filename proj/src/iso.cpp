#include "bigraph/iso.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <unordered_set>

namespace bigraph {

namespace {

std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct Hasher {
    std::uint64_t h;

    explicit Hasher(std::uint64_t seed) : h(mix(seed)) {}

    Hasher& add(std::uint64_t v) {
        h = mix(h ^ mix(v + 0x632be59bd9b4e019ULL));
        return *this;
    }

    Hasher& add(const std::string& s) {
        add(s.size());
        std::uint64_t chunk = 0;
        int n = 0;
        for (unsigned char c : s) {
            chunk = (chunk << 8) | c;
            if (++n == 8) {
                add(chunk);
                chunk = 0;
                n = 0;
            }
        }
        return add(chunk);
    }

    Hasher& add_sorted(std::vector<std::uint64_t> vs) {
        std::sort(vs.begin(), vs.end());
        add(vs.size());
        for (auto v : vs) add(v);
        return *this;
    }
};

std::uint64_t param_hash(const Param& p) {
    Hasher h(p.index());
    if (auto i = std::get_if<std::int64_t>(&p)) return h.add(static_cast<std::uint64_t>(*i)).h;
    if (auto d = std::get_if<double>(&p)) return h.add(std::bit_cast<std::uint64_t>(*d)).h;
    return h.add(std::get<std::string>(p)).h;
}

constexpr std::uint64_t kRegionTag = 0x5245474eULL;
constexpr std::uint64_t kSiteTag = 0x53495445ULL;

std::size_t count_distinct(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
    std::unordered_set<std::uint64_t> s(a.begin(), a.end());
    s.insert(b.begin(), b.end());
    return s.size();
}

} // namespace

std::string CanonicalKey::bytes() const {
    std::string out(16, '\0');
    for (int i = 0; i < 8; ++i) {
        out[i] = static_cast<char>((hi >> (56 - 8 * i)) & 0xff);
        out[8 + i] = static_cast<char>((lo >> (56 - 8 * i)) & 0xff);
    }
    return out;
}

Colouring refine_colours(const Bigraph& b) {
    const Topology topo(b);
    const auto n = b.nodes.size();
    const auto m = b.links.size();
    Colouring c;
    c.node.resize(n);
    c.link.resize(m);
    for (std::size_t l = 0; l < m; ++l) {
        Hasher h(b.links[l].outer ? 1 : 2);
        if (b.links[l].outer) h.add(*b.links[l].outer);
        h.add(topo.link_ports[l].size());
        for (const auto& x : b.links[l].inner) h.add(x);
        c.link[l] = h.h;
    }
    for (std::size_t v = 0; v < n; ++v) {
        const auto& node = b.nodes[v];
        Hasher h(3);
        h.add(node.control->name).add(node.control->arity);
        for (const auto& p : node.params) h.add(param_hash(p));
        std::vector<std::uint64_t> roots, holes;
        for (auto p : b.node_parents[v]) if (p.is_region()) roots.push_back(kRegionTag + p.index);
        for (int s : topo.node_child_sites[v]) holes.push_back(kSiteTag + s);
        h.add_sorted(roots).add_sorted(holes);
        c.node[v] = h.h;
    }
    // Iterate until the partition stops growing.
    std::size_t classes = count_distinct(c.node, c.link);
    for (std::size_t round = 0; round <= n + m; ++round) {
        Colouring next = c;
        for (std::size_t v = 0; v < n; ++v) {
            std::vector<std::uint64_t> parents, children, ports;
            for (auto p : b.node_parents[v]) parents.push_back(p.is_region() ? kRegionTag + p.index : c.node[p.index]);
            for (int ch : topo.node_child_nodes[v]) children.push_back(c.node[ch]);
            for (int s : topo.node_child_sites[v]) children.push_back(kSiteTag + s);
            for (int l : b.ports[v]) ports.push_back(c.link[l]);
            next.node[v] = Hasher(c.node[v]).add_sorted(parents).add_sorted(children).add_sorted(ports).h;
        }
        for (std::size_t l = 0; l < m; ++l) {
            std::vector<std::uint64_t> owners;
            for (int v : topo.link_ports[l]) owners.push_back(c.node[v]);
            next.link[l] = Hasher(c.link[l]).add_sorted(owners).h;
        }
        c = std::move(next);
        const auto now = count_distinct(c.node, c.link);
        if (now == classes) break;
        classes = now;
    }
    return c;
}

CanonicalKey structural_key(const Bigraph& b) {
    const auto c = refine_colours(b);
    std::vector<std::uint64_t> sites;
    for (int s = 0; s < b.sites; ++s) {
        std::vector<std::uint64_t> ps;
        for (auto p : b.site_parents[s]) ps.push_back(p.is_region() ? kRegionTag + p.index : c.node[p.index]);
        sites.push_back(Hasher(kSiteTag + s).add_sorted(ps).h);
    }
    auto digest = [&](std::uint64_t seed) {
        Hasher h(seed);
        h.add(b.regions).add(b.sites).add_sorted(c.node).add_sorted(c.link).add_sorted(sites);
        return h.h;
    };
    return {digest(0x0123456789abcdefULL), digest(0xfedcba9876543210ULL)};
}

CanonicalKey canonical_key(const Bigraph& b) {
    if (!is_ground(b)) fail(ErrorKind::NotGround, "Canonical keys are only defined for ground bigraphs");
    return structural_key(b);
}

namespace {

// Link graph equality under a complete node bijection: every link is fully
// described by its name data and the multiset of nodes owning its ports.
bool links_agree(const Bigraph& a, const Bigraph& b, const std::vector<int>& to_b) {
    const Topology ta(a), tb(b);
    using Sig = std::pair<std::string, std::vector<int>>;
    auto signature = [](const Link& l, std::vector<int> owners) {
        std::string tag = l.outer ? "o:" + *l.outer : "e:";
        for (const auto& x : l.inner) tag += "|" + x;
        std::sort(owners.begin(), owners.end());
        return Sig{tag, std::move(owners)};
    };
    std::vector<Sig> sa, sb;
    for (std::size_t l = 0; l < a.links.size(); ++l) {
        std::vector<int> owners;
        for (int v : ta.link_ports[l]) owners.push_back(to_b[v]);
        sa.push_back(signature(a.links[l], std::move(owners)));
    }
    for (std::size_t l = 0; l < b.links.size(); ++l) sb.push_back(signature(b.links[l], tb.link_ports[l]));
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    return sa == sb;
}

class IsoSearch {
public:
    IsoSearch(const Bigraph& a, const Bigraph& b, const Colouring& ca, const Colouring& cb)
        : a_(a), b_(b), ca_(ca), cb_(cb), to_b_(a.nodes.size(), -1), used_(b.nodes.size(), false) {
        order_nodes();
    }

    bool run() { return extend(0); }

private:
    // Parents before children so parent-set checks are exact when a node
    // is assigned.
    void order_nodes() {
        const auto n = a_.nodes.size();
        std::vector<int> pending(n, 0);
        std::vector<std::vector<int>> children(n);
        for (std::size_t v = 0; v < n; ++v) {
            for (auto p : a_.node_parents[v]) {
                if (p.is_node()) {
                    ++pending[v];
                    children[p.index].push_back(static_cast<int>(v));
                }
            }
        }
        std::vector<int> ready;
        for (std::size_t v = 0; v < n; ++v) if (pending[v] == 0) ready.push_back(static_cast<int>(v));
        while (!ready.empty()) {
            int v = ready.front();
            ready.erase(ready.begin());
            order_.push_back(v);
            for (int c : children[v]) if (--pending[c] == 0) ready.push_back(c);
        }
    }

    bool parents_agree(int u, int v) const {
        const auto& pu = a_.node_parents[u];
        const auto& pv = b_.node_parents[v];
        if (pu.size() != pv.size()) return false;
        std::vector<Place> mapped;
        for (auto p : pu) mapped.push_back(p.is_region() ? p : Place::node(to_b_[p.index]));
        std::sort(mapped.begin(), mapped.end());
        return mapped == pv;
    }

    bool finish() const {
        for (int s = 0; s < a_.sites; ++s) {
            std::vector<Place> mapped;
            for (auto p : a_.site_parents[s]) mapped.push_back(p.is_region() ? p : Place::node(to_b_[p.index]));
            std::sort(mapped.begin(), mapped.end());
            if (mapped != b_.site_parents[s]) return false;
        }
        return links_agree(a_, b_, to_b_);
    }

    bool extend(std::size_t depth) {
        if (depth == order_.size()) return finish();
        const int u = order_[depth];
        for (std::size_t v = 0; v < b_.nodes.size(); ++v) {
            if (used_[v] || ca_.node[u] != cb_.node[v]) continue;
            if (!same_kind(a_.nodes[u], b_.nodes[v])) continue;
            to_b_[u] = static_cast<int>(v);
            if (parents_agree(u, static_cast<int>(v))) {
                used_[v] = true;
                if (extend(depth + 1)) return true;
                used_[v] = false;
            }
            to_b_[u] = -1;
        }
        return false;
    }

    const Bigraph& a_;
    const Bigraph& b_;
    const Colouring& ca_;
    const Colouring& cb_;
    std::vector<int> order_;
    std::vector<int> to_b_;
    std::vector<bool> used_;
};

} // namespace

bool iso_equal(const Bigraph& a, const Bigraph& b) {
    if (a.regions != b.regions || a.sites != b.sites) return false;
    if (a.nodes.size() != b.nodes.size() || a.links.size() != b.links.size()) return false;
    if (a.outer_names() != b.outer_names() || a.inner_names() != b.inner_names()) return false;
    const auto ca = refine_colours(a);
    const auto cb = refine_colours(b);
    auto sa = ca.node, sb = cb.node;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb) return false;
    auto la = ca.link, lb = cb.link;
    std::sort(la.begin(), la.end());
    std::sort(lb.begin(), lb.end());
    if (la != lb) return false;
    return IsoSearch(a, b, ca, cb).run();
}

} // namespace bigraph
