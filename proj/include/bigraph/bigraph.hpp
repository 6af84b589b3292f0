#pragma once

#include "bigraph/error.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace bigraph {

// Any is used for parameters declared without a sort (the modelling
// language does not annotate them); any value is accepted.
enum class ParamSort { Int, Float, String, Any };

// Parameter values of parameterised controls. Floats compare bit-exactly.
using Param = std::variant<std::int64_t, double, std::string>;

ParamSort sort_of(const Param& p);
std::string to_string(const Param& p);
bool param_equal(const Param& a, const Param& b);

struct Control {
    std::string name;
    int arity = 0;
    bool atomic = false;
    std::vector<ParamSort> param_sorts;
};

using ControlPtr = std::shared_ptr<const Control>;

class Signature {
public:
    // Throws DuplicateDefinition when the name is taken.
    ControlPtr add(Control control);

    ControlPtr find(const std::string& name) const;
    ControlPtr at(const std::string& name) const;

    const std::map<std::string, ControlPtr>& controls() const { return controls_; }
    std::size_t size() const { return controls_.size(); }

private:
    std::map<std::string, ControlPtr> controls_;
};

struct Node {
    ControlPtr control;
    std::vector<Param> params;
};

bool same_kind(const Node& a, const Node& b);

// A parent of a node or site: either a region (root) or a node.
struct Place {
    enum class Kind : std::uint8_t { Region, Node };

    Kind kind = Kind::Region;
    int index = 0;

    static Place region(int r) { return {Kind::Region, r}; }
    static Place node(int n) { return {Kind::Node, n}; }

    bool is_region() const { return kind == Kind::Region; }
    bool is_node() const { return kind == Kind::Node; }

    auto operator<=>(const Place&) const = default;
};

// A link is either a closed edge (no outer name) or attached to exactly one
// outer name. Ports reference links through Bigraph::ports.
struct Link {
    std::optional<std::string> outer;
    std::vector<std::string> inner;

    bool closed() const { return !outer.has_value(); }
};

struct Interface {
    int width = 0;
    std::vector<std::string> names;

    bool operator==(const Interface&) const = default;
};

// Renders as <width, {a, b}>.
std::string to_string(const Interface& face);

// Concrete representation of an abstract bigraph. Node, link and site
// indices are internal; equality between bigraphs is iso_equal, never
// member-wise comparison. Values are treated as immutable once built: every
// operation below returns a fresh bigraph.
//
// Place graph: each node and each site has a non-empty, sorted set of
// parents. Forests are the case where every set has one element.
// Link graph: ports[n] lists the link of each port of node n, sorted (ports
// of a node are unordered).
struct Bigraph {
    int regions = 0;
    int sites = 0;
    std::vector<Node> nodes;
    std::vector<std::vector<Place>> node_parents;
    std::vector<std::vector<Place>> site_parents;
    std::vector<Link> links;
    std::vector<std::vector<int>> ports;

    std::size_t node_count() const { return nodes.size(); }
    std::size_t link_count() const { return links.size(); }

    Interface outer_face() const;
    Interface inner_face() const;
    std::vector<std::string> outer_names() const;
    std::vector<std::string> inner_names() const;
    std::optional<int> link_of_outer(const std::string& name) const;

    // True when some node or site has more than one parent.
    bool has_sharing() const;
};

// Child/port lookup tables derived from a Bigraph.
struct Topology {
    explicit Topology(const Bigraph& b);

    std::vector<std::vector<int>> region_child_nodes;
    std::vector<std::vector<int>> region_child_sites;
    std::vector<std::vector<int>> node_child_nodes;
    std::vector<std::vector<int>> node_child_sites;
    // Per link, the node owning each port (one entry per port, sorted).
    std::vector<std::vector<int>> link_ports;
};

// Re-establishes representation invariants: sorted parent sets and port
// lists, closed edges without ports or inner names removed, links
// renumbered densely.
Bigraph normalize(Bigraph b);

// Throws on any violated structural invariant (used by tests and after
// parsing).
void check_well_formed(const Bigraph& b);

// --- elementary bigraphs -------------------------------------------------

Bigraph empty_bigraph();                                  // width 0
Bigraph one();                                            // `1`
Bigraph identity();                                       // `id`
Bigraph idle_names(const std::vector<std::string>& names);    // `{x}`
Bigraph link_identity(const std::vector<std::string>& names); // `id{x}`

Bigraph make_atom(const ControlPtr& control, std::vector<Param> params,
                  const std::vector<std::string>& names);

// --- operators -----------------------------------------------------------

Bigraph nest(const Bigraph& outer, const Bigraph& inner);
Bigraph merge(const Bigraph& a, const Bigraph& b);
Bigraph parallel(const Bigraph& a, const Bigraph& b);
Bigraph close(const std::string& name, const Bigraph& b);
Bigraph share(const Bigraph& contents, const std::vector<std::vector<int>>& placement,
              int site_count, const Bigraph& host);

// Merge every region into one; the result has width 1.
Bigraph merge_regions(const Bigraph& b);

bool is_ground(const Bigraph& b);
bool is_solid(const Bigraph& b);

} // namespace bigraph
