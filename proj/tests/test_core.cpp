#include "support/gen.hpp"
#include "support/oracle.hpp"

#include "bigraph/iso.hpp"

#include <doctest.h>

using namespace bigraph;

namespace {

struct Sig {
    Signature sig;
    Sig() {
        sig.add({"Room", 0, false, {}});
        sig.add({"Building", 0, false, {}});
        sig.add({"Adult", 0, true, {}});
        sig.add({"Child", 0, true, {}});
        sig.add({"Device", 1, false, {}});
        sig.add({"L", 1, true, {}});
        sig.add({"C", 1, false, {}});
        sig.add({"D", 1, false, {}});
        sig.add({"Proc", 0, true, {ParamSort::Int}});
    }
    ControlPtr operator[](const std::string& n) const { return sig.at(n); }
    Bigraph atom(const std::string& n, std::vector<std::string> names = {}) const {
        return make_atom(sig.at(n), {}, names);
    }
    Bigraph leaf(const std::string& n, std::vector<std::string> names = {}) const {
        auto a = atom(n, names);
        return sig.at(n)->atomic ? a : nest(a, one());
    }
};

} // namespace

TEST_CASE("make_atom builds one node with its names") {
    Sig s;
    auto d = s.atom("Device", {"x"});
    CHECK(d.node_count() == 1);
    CHECK(to_string(d.outer_face()) == "<1, {x}>");
    CHECK(d.sites == 1);  // non-atomic: implicit site

    auto c = s.atom("Child");
    CHECK(c.node_count() == 1);
    CHECK(c.links.empty());
    CHECK(c.sites == 0);

    CHECK_THROWS_AS(s.atom("Device", {"x", "y"}), Error);
    try {
        s.atom("Device", {"x", "y"});
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ArityMismatch);
    }
    try {
        make_atom(s["Proc"], {std::string("a")}, {});
        FAIL("expected SortMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SortMismatch);
    }
}

TEST_CASE("repeated names on one atom share a link") {
    Signature sig;
    sig.add({"P", 2, true, {}});
    auto b = make_atom(sig.at("P"), {}, {"x", "x"});
    REQUIRE(b.links.size() == 1);
    CHECK(b.ports[0] == std::vector<int>{0, 0});
}

TEST_CASE("nest fills sites and rejects atomic parents") {
    Sig s;
    auto room = nest(s.atom("Room"), merge(s.leaf("Adult"), s.leaf("Child")));
    CHECK(room.node_count() == 3);
    CHECK(is_ground(room));
    auto empty_room = nest(s.atom("Room"), one());
    CHECK(empty_room.node_count() == 1);
    CHECK(empty_room.sites == 0);
    try {
        nest(s.atom("Adult"), s.leaf("Child"));
        FAIL("expected AtomicViolation");
    } catch (const Error& e) {
        CHECK((e.kind() == ErrorKind::AtomicViolation || e.kind() == ErrorKind::WidthMismatch));
    }
    try {
        nest(s.atom("Room"), parallel(one(), one()));
        FAIL("expected WidthMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::WidthMismatch);
    }
}

TEST_CASE("merge: commutative, unit, shared names fuse") {
    Sig s;
    auto ac = merge(s.leaf("Adult"), s.leaf("Child"));
    auto ca = merge(s.leaf("Child"), s.leaf("Adult"));
    CHECK(iso_equal(ac, ca));
    CHECK(iso_equal(merge(ac, one()), ac));
    auto ll = merge(s.leaf("L", {"x"}), s.leaf("L", {"x"}));
    CHECK(ll.node_count() == 2);
    REQUIRE(ll.links.size() == 1);
    CHECK(Topology(ll).link_ports[0].size() == 2);
    CHECK(ll.regions == 1);
}

TEST_CASE("parallel concatenates regions") {
    Sig s;
    auto bb = parallel(s.leaf("Building"), s.leaf("Building"));
    CHECK(bb.regions == 2);
    auto cd = parallel(s.atom("C", {"x"}), s.atom("D", {"x"}));
    CHECK(cd.regions == 2);
    CHECK(cd.sites == 2);
    CHECK(cd.links.size() == 1);
    auto plus = parallel(bb, one());
    CHECK(plus.regions == 3);
}

TEST_CASE("close binds names; identifiers are irrelevant") {
    Sig s;
    auto xx = close("x", merge(s.leaf("Device", {"x"}), s.leaf("Device", {"x"})));
    auto yy = close("y", merge(s.leaf("Device", {"y"}), s.leaf("Device", {"y"})));
    CHECK(iso_equal(xx, yy));
    CHECK(xx.outer_names().empty());
    auto stub = close("x", s.leaf("Device", {"x"}));
    CHECK(stub.links.size() == 1);
    CHECK(stub.links[0].closed());
    try {
        close("z", s.leaf("Device", {"x"}));
        FAIL("expected UnknownName");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnknownName);
    }
    try {
        close("x", idle_names({"x"}));
        FAIL("expected EmptyClosure");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EmptyClosure);
    }
}

TEST_CASE("share places regions under several sites") {
    Sig s;
    Signature sig = s.sig;
    sig.add({"Camera", 0, false, {}});
    auto cam = nest(make_atom(sig.at("Camera"), {}, {}), identity());
    auto host = nest(s.atom("Room"), merge(cam, cam));
    auto shared = share(parallel(s.leaf("Adult"), s.leaf("Child")), {{0, 1}, {1}}, 2, host);
    CHECK(shared.has_sharing());
    CHECK(is_ground(shared));
    int adult = -1;
    for (std::size_t n = 0; n < shared.nodes.size(); ++n) {
        if (shared.nodes[n].control->name == "Adult") adult = static_cast<int>(n);
    }
    REQUIRE(adult >= 0);
    CHECK(shared.node_parents[adult].size() == 2);

    // Singleton placement is nesting.
    auto one_site = nest(s.atom("Room"), identity());
    CHECK(iso_equal(share(s.leaf("Adult"), {{0}}, 1, one_site), nest(s.atom("Room"), s.leaf("Adult"))));
    try {
        share(s.leaf("Adult"), {{0, 2}}, 2, host);
        FAIL("expected IndexOutOfRange");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::IndexOutOfRange);
    }
}

TEST_CASE("groundness and solidity") {
    Sig s;
    CHECK(is_ground(s.leaf("Room")));
    CHECK_FALSE(is_ground(s.atom("Room")));
    CHECK(is_ground(idle_names({"x"})));

    CHECK_FALSE(is_solid(one()));
    CHECK_FALSE(is_solid(merge(s.leaf("Device", {"x"}), idle_names({"y"}))));
    CHECK(is_solid(s.leaf("Device", {"x"})));
    // A region holding only a site.
    CHECK_FALSE(is_solid(merge(s.leaf("Adult"), identity())));
    // Two sibling sites.
    CHECK_FALSE(is_solid(nest(s.atom("Room"), merge(identity(), identity()))));
    // leave_room's left-hand side.
    auto lhs = parallel(nest(s.atom("Room"), merge(s.atom("L", {"x"}), identity())), s.atom("Room"));
    CHECK(is_solid(lhs));
    // An outer name joined to an inner name.
    CHECK_FALSE(is_solid(merge(s.leaf("Device", {"x"}), link_identity({"x"}))));
}

TEST_CASE("iso_equal respects names and forgets edge identifiers") {
    Sig s;
    auto rc = nest(s.atom("Room"), merge(s.leaf("Adult"), s.leaf("Child")));
    auto rc2 = nest(s.atom("Room"), merge(s.leaf("Child"), s.leaf("Adult")));
    CHECK(iso_equal(rc, rc2));
    CHECK_FALSE(iso_equal(s.leaf("Device", {"x"}), s.leaf("Device", {"y"})));
    auto xx = merge(close("x", s.leaf("L", {"x"})), close("x", s.leaf("L", {"x"})));
    auto yz = merge(close("y", s.leaf("L", {"y"})), close("z", s.leaf("L", {"z"})));
    CHECK(iso_equal(xx, yz));
    CHECK(oracle::isomorphic(xx, yz));
    auto joined = close("x", merge(s.leaf("L", {"x"}), s.leaf("L", {"x"})));
    CHECK_FALSE(iso_equal(xx, joined));
}

TEST_CASE("canonical keys") {
    Sig s;
    auto rc = nest(s.atom("Room"), merge(s.leaf("Adult"), s.leaf("Child")));
    auto rc2 = nest(s.atom("Room"), merge(s.leaf("Child"), s.leaf("Adult")));
    CHECK(canonical_key(rc) == canonical_key(rc2));
    CHECK_FALSE(canonical_key(nest(s.atom("Room"), s.leaf("Adult"))) ==
                canonical_key(nest(s.atom("Room"), s.leaf("Child"))));
    CHECK_THROWS_AS(canonical_key(s.atom("Room")), Error);
}

TEST_CASE("iso_equal agrees with a brute-force isomorphism oracle") {
    testgen::Rng rng(7);
    int iso = 0, non_iso = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto sig = testgen::random_signature(rng, 3);
        testgen::GroundOptions o;
        o.max_nodes = 6;
        auto a = testgen::random_ground(rng, sig, o);
        // Half the pairs are relabelled copies, half independent draws.
        auto b = rng.coin() ? testgen::shuffled(rng, a) : testgen::random_ground(rng, sig, o);
        const bool expect = oracle::isomorphic(a, b);
        expect ? ++iso : ++non_iso;
        CHECK(iso_equal(a, b) == expect);
        CHECK(iso_equal(b, a) == expect);
        if (expect) CHECK(canonical_key(a) == canonical_key(b));
        else if (canonical_key(a) == canonical_key(b)) CHECK_FALSE(iso_equal(a, b));
    }
    CHECK(iso > 100);
    CHECK(non_iso > 100);
}

TEST_CASE("random bigraphs stay well formed and arity-consistent") {
    testgen::Rng rng(11);
    for (int i = 0; i < 300; ++i) {
        const auto sig = testgen::random_signature(rng);
        auto b = testgen::with_random_sites(rng, testgen::random_ground(rng, sig));
        CHECK_NOTHROW(check_well_formed(b));
        for (std::size_t n = 0; n < b.nodes.size(); ++n) {
            CHECK(static_cast<int>(b.ports[n].size()) == b.nodes[n].control->arity);
        }
    }
}
