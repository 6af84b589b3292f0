#pragma once

#include "bigraph/bigraph.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace bigraph {

// Isomorphism-invariant digest of a bigraph. Equal bigraphs (up to iso)
// always get equal keys; equal keys do not imply isomorphism.
struct CanonicalKey {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;

    bool operator==(const CanonicalKey&) const = default;
    std::string bytes() const;
};

struct CanonicalKeyHash {
    std::size_t operator()(const CanonicalKey& k) const noexcept { return static_cast<std::size_t>(k.hi ^ (k.lo * 0x9e3779b97f4a7c15ULL)); }
};

// Requires a ground bigraph (NotGround otherwise).
CanonicalKey canonical_key(const Bigraph& b);

// Same digest without the groundness precondition.
CanonicalKey structural_key(const Bigraph& b);

// Structure-preserving bijection on nodes and closed edges respecting
// controls, parameters, parent sets, region/site indices, and outer/inner
// names by identity.
bool iso_equal(const Bigraph& a, const Bigraph& b);

// Stable colours after iterated refinement of the place+link incidence
// structure. Node colours first, then link colours.
struct Colouring {
    std::vector<std::uint64_t> node;
    std::vector<std::uint64_t> link;
};

Colouring refine_colours(const Bigraph& b);

} // namespace bigraph
