// Acceptance checks. One line per criterion; exit status 1 if any fails.

#include "support/gen.hpp"
#include "support/oracle.hpp"

#include "bigraph/engine.hpp"
#include "bigraph/export.hpp"
#include "bigraph/frontend.hpp"
#include "bigraph/iso.hpp"
#include "bigraph/matcher.hpp"
#include "bigraph/rule.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

using namespace bigraph;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

struct Run {
    int status = 0;
    std::string out;
};

Run cli(const std::string& args) {
    const std::string cmd = "\"" BIGENGINE "\" " + args + " 2>&1";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return {-1, "popen failed"};
    std::array<char, 4096> buf{};
    while (std::size_t n = fread(buf.data(), 1, buf.size(), p)) r.out.append(buf.data(), n);
    const int st = pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string shell_arg(const fs::path& p) { return "\"" + p.string() + "\""; }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir() {
    auto dir = fs::temp_directory_path() / "bigengine_acceptance";
    fs::create_directories(dir);
    return dir;
}

std::vector<fs::path> corpus() {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(MODELS_DIR)) {
        if (e.path().extension() == ".big") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

BrsSpec model(const std::string& name) { return load_model_file(std::string(MODELS_DIR "/") + name + ".big"); }

// Label file: `0="init" 1="p" ...` then `s: i j ...`. Returns states per label name.
std::map<std::string, std::set<int>> read_labels(const std::string& text) {
    std::istringstream in(text);
    std::string header;
    std::getline(in, header);
    std::map<int, std::string> names;
    std::istringstream hs(header);
    std::string tok;
    while (hs >> tok) {
        const auto eq = tok.find('=');
        names[std::stoi(tok.substr(0, eq))] = tok.substr(eq + 2, tok.size() - eq - 3);
    }
    std::map<std::string, std::set<int>> out;
    for (const auto& [i, n] : names) out[n];
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string head;
        ls >> head;
        const int s = std::stoi(head);
        int idx;
        while (ls >> idx) out[names[idx]].insert(s);
    }
    return out;
}

Outcome ac1() {
    const auto t0 = Clock::now();
    int ok = 0;
    std::string failed;
    const auto files = corpus();
    for (const auto& f : files) {
        const auto r = cli("validate " + shell_arg(f));
        if (r.status == 0) ++ok;
        else failed += " " + f.filename().string();
    }
    const double t = seconds_since(t0);
    const bool pass = ok == static_cast<int>(files.size()) && files.size() >= 20 && t < 1.0;
    return {pass, std::to_string(ok) + "/" + std::to_string(files.size()) + " models validate in " + fmt(t) + " s" +
                      (failed.empty() ? "" : "; failed:" + failed)};
}

Outcome ac2() {
    const auto t0 = Clock::now();
    const auto dir = scratch_dir();
    const auto tra = dir / "sb.tra", lab = dir / "sb.lab";
    const auto r = cli("full -p " + shell_arg(tra) + " -l " + shell_arg(lab) + " " + shell_arg(MODELS_DIR "/secure_building.big"));
    if (r.status != 0) return {false, "full exited " + std::to_string(r.status) + ": " + r.out};
    const auto file = read_tra(slurp(tra), false);
    const auto labels = read_labels(slurp(lab));

    bool ok = file.states == 4 && file.lines.size() == 10;
    for (const auto* p : {"seen", "entrance", "serverRoom"}) ok = ok && labels.count(p) && labels.at(p).size() == 1;
    if (!ok) return {false, std::to_string(file.states) + " states, " + std::to_string(file.lines.size()) + " transitions"};

    // BFS from the init state through states not labelled seen.
    const auto& seen = labels.at("seen");
    const int target = *labels.at("serverRoom").begin();
    std::map<int, int> prev{{0, -1}};
    std::deque<int> queue{0};
    while (!queue.empty()) {
        const int s = queue.front();
        queue.pop_front();
        for (const auto& l : file.lines) {
            if (l.src == s && !seen.count(l.dst) && !prev.count(l.dst)) {
                prev[l.dst] = s;
                queue.push_back(l.dst);
            }
        }
    }
    if (!prev.count(target)) return {false, "no path to serverRoom avoiding seen"};
    std::vector<int> path;
    for (int s = target; s != -1; s = prev[s]) path.insert(path.begin(), s);
    std::string p;
    for (int s : path) p += (p.empty() ? "" : " -> ") + std::to_string(s);
    const double t = seconds_since(t0);
    return {t < 1.0, "4 states, 10 transitions, one state per label, path " + p + " in " + fmt(t) + " s"};
}

// Probability of the successor reached by the named rule from the init state.
Rational rule_mass(const BrsSpec& spec, const std::string& rule) {
    Rational total = Rational::of(0);
    for (const auto& s : step_distribution(spec.init, spec)) {
        if (s.rules.count(rule)) total = total + s.label.probability;
    }
    return total;
}

Outcome ac3() {
    const auto one = rule_mass(model("detect"), "detect");
    const auto two = rule_mass(model("detect_two_cameras"), "detect");
    // The exported file agrees with the exact value.
    const auto tra = read_tra(write_tra(explore(model("detect_once"), 100)), false);
    double exported = -1;
    for (const auto& l : tra.lines) {
        if (l.src == 0 && l.dst == 1) exported = l.value;
    }
    const bool pass = std::abs(one.value() - 0.8) <= 1e-9 && std::abs(two.value() - 8.0 / 9) <= 1e-9 &&
                      std::abs(exported - 0.8) <= 1e-9;
    return {pass, "one camera: detect " + to_string(one) + ", exported " + fmt(exported) + "; two cameras: detect " +
                      to_string(two)};
}

Outcome ac4() {
    const auto spec = model("entrance_hall_bounded");
    const auto ts = explore(spec, 10000);
    if (ts.partial) return {false, "exploration truncated"};
    const auto tra = read_tra(write_tra(ts), false);

    // Expected rates from first principles: every application of every rule
    // contributes its declared rate to the edge towards its result.
    std::map<std::pair<int, int>, double> expect;
    std::map<std::string, double> declared;
    for (const auto& r : spec.classes[0].rules) declared[r.name] = r.label.rate;
    for (std::size_t s = 0; s < ts.states.size(); ++s) {
        for (const auto& rule : spec.classes[0].rules) {
            for (const auto& app : all_applications(ts.states[s], rule)) {
                int dst = -1;
                for (std::size_t d = 0; d < ts.states.size() && dst < 0; ++d) {
                    if (oracle::isomorphic(ts.states[d], app.result)) dst = static_cast<int>(d);
                }
                if (dst < 0) return {false, "successor missing from the state space"};
                expect[{static_cast<int>(s), dst}] += rule.label.rate;
            }
        }
    }
    if (expect.size() != tra.lines.size()) {
        return {false, std::to_string(tra.lines.size()) + " edges, expected " + std::to_string(expect.size())};
    }
    std::set<double> singles;
    for (const auto& l : tra.lines) {
        const double e = expect[{l.src, l.dst}];
        if (std::abs(l.value - e) > 1e-12 * std::max(1.0, e)) {
            return {false, "edge " + std::to_string(l.src) + "->" + std::to_string(l.dst) + " rate " + fmt(l.value)};
        }
        singles.insert(l.value);
    }
    const bool exact = singles.count(0.2) && singles.count(0.3) && singles.count(0.01) &&
                       declared == std::map<std::string, double>{{"enter", 0.2}, {"exit", 0.3}, {"enter_intruder", 0.01}};
    return {exact, std::to_string(ts.states.size()) + " states, " + std::to_string(tra.lines.size()) +
                       " edges; every rate equals its rules' declared sum"};
}

Outcome ac5() {
    const auto t0 = Clock::now();
    const auto two = model("vault");
    const auto ts2 = explore(two, 100000);
    const auto& open_pat = two.preds[0].pattern;  // Vault.Open
    bool some_open = false;
    for (const auto& s : ts2.states) some_open = some_open || matches_predicate(s, open_pat);

    const auto one = model("vault_one");
    const auto ts1 = explore(one, 100000);
    const auto open1 = parse_bigraph("Vault.(Open | id)", one.signature);
    const auto closed_only = parse_bigraph("Vault.Closed", one.signature);
    const auto tagged = parse_bigraph("Vault.(LoginT | id)", one.signature);
    const auto login = parse_bigraph("Vault.(Login | id)", one.signature);
    bool never_open = true, terminals_clean = true, cleanup = true;
    std::set<int> has_out;
    for (const auto& t : ts1.transitions) has_out.insert(t.src);
    int terminals = 0;
    for (std::size_t s = 0; s < ts1.states.size(); ++s) {
        const auto& st = ts1.states[s];
        never_open = never_open && !matches_predicate(st, open1);
        // LoginT tokens only sit in the Vault while a login round is live.
        cleanup = cleanup && (!matches_predicate(st, tagged) || matches_predicate(st, login));
        if (!has_out.count(static_cast<int>(s))) {
            ++terminals;
            terminals_clean = terminals_clean && matches_predicate(st, closed_only) && !matches_predicate(st, tagged);
        }
    }
    const double t = seconds_since(t0);
    const bool pass = some_open && never_open && terminals_clean && cleanup && !ts1.partial && !ts2.partial && t < 5.0;
    return {pass, "two people: " + std::string(some_open ? "opens" : "never opens") + " (" +
                      std::to_string(ts2.states.size()) + " states); one person: " +
                      (never_open ? "never opens" : "opens") + ", " + std::to_string(terminals) +
                      " terminal states, cleanup invariant " + (cleanup ? "holds" : "broken") + " (" +
                      std::to_string(ts1.states.size()) + " states) in " + fmt(t) + " s"};
}

int children_with(const Bigraph& b, const std::string& parent, const std::string& child) {
    const Topology t(b);
    for (std::size_t n = 0; n < b.nodes.size(); ++n) {
        if (b.nodes[n].control->name != parent) continue;
        int k = 0;
        for (int c : t.node_child_nodes[n]) k += b.nodes[c].control->name == child;
        return k;
    }
    return -1;
}

Outcome ac6() {
    const auto copy = model("copy");
    const auto del = model("delete");
    const auto copied = all_applications(copy.init, copy.classes[0].rules[0]);
    const auto deleted = all_applications(del.init, del.classes[0].rules[0]);
    if (copied.size() != 1 || deleted.size() != 1) return {false, "expected one occurrence each"};
    const auto& c = copied[0].result;
    const auto& d = deleted[0].result;
    const bool copy_ok = children_with(c, "Server", "Data") == 2 && children_with(c, "Database", "Data") == 1;
    const bool delete_ok = children_with(d, "Database", "Data") == 0 && children_with(d, "Server", "Data") == 1;

    // Database content linked to an outer name: both copies stay on that link.
    const auto linked = parse_bigraph("/y (/x (Adult{x} | Server{x,y}.Data) || Database{y}.(Data | Adult{z}))",
                                      copy.signature);
    const auto out = all_applications(linked, copy.classes[0].rules[0]);
    bool link_ok = out.size() == 1;
    if (link_ok) {
        const auto& b = out[0].result;
        const auto z = b.link_of_outer("z");
        link_ok = z && Topology(b).link_ports[*z].size() == 2 && children_with(b, "Server", "Adult") == 1 &&
                  children_with(b, "Database", "Adult") == 1;
    }
    return {copy_ok && delete_ok && link_ok,
            std::string("copy ") + (copy_ok ? "2+1 Data" : "wrong") + ", delete " + (delete_ok ? "empties" : "wrong") +
                ", linked copy " + (link_ok ? "shares one link of 2 ports" : "wrong")};
}

oracle::MatchKey key_of(const Bigraph& pattern, const Occurrence& occ) {
    oracle::MatchKey k;
    k.image = occ.node_map;
    std::sort(k.image.begin(), k.image.end());
    for (auto roots : occ.site_roots) {
        std::sort(roots.begin(), roots.end());
        k.site_roots.push_back(roots);
    }
    for (const auto& name : pattern.outer_names()) k.name_links.push_back(occ.link_map[*pattern.link_of_outer(name)]);
    return k;
}

Outcome ac7() {
    const auto t0 = Clock::now();
    testgen::Rng rng(7007);
    int agree = 0, with_matches = 0;
    const int cases = 500;
    for (int i = 0; i < cases; ++i) {
        const auto sig = testgen::random_signature(rng, 4);
        const auto target = testgen::random_ground(rng, sig);
        Bigraph pattern = empty_bigraph();
        while (pattern.regions == 0) {
            pattern = rng.coin(0.7) ? testgen::pattern_from(rng, target, 4) : testgen::random_pattern(rng, sig, 4);
        }
        const auto expect = oracle::occurrences(target, pattern);
        std::set<oracle::MatchKey> got;
        for (const auto& occ : find_occurrences(target, pattern)) got.insert(key_of(pattern, occ));
        agree += got == expect;
        with_matches += !expect.empty();
    }
    const double t = seconds_since(t0);
    return {agree == cases && t < 60.0, std::to_string(agree) + "/" + std::to_string(cases) + " agree (" +
                                            std::to_string(with_matches) + " with matches) in " + fmt(t) + " s"};
}

Outcome ac8() {
    testgen::Rng rng(8008);
    const int cases = 1000;
    testgen::GroundOptions single;
    single.max_nodes = 5;
    single.max_regions = 1;
    testgen::GroundOptions wide = single;
    wide.max_regions = 2;

    std::map<std::string, int> failures;
    auto prop = [&](const std::string& name, const std::function<bool()>& body) {
        int bad = 0;
        for (int i = 0; i < cases; ++i) {
            try {
                bad += !body();
            } catch (const Error&) {
                ++bad;
            }
        }
        failures[name] = bad;
    };

    prop("merge-comm", [&] {
        const auto sig = testgen::random_signature(rng);
        const auto a = testgen::random_ground(rng, sig, single), b = testgen::random_ground(rng, sig, single);
        return iso_equal(merge(a, b), merge(b, a));
    });
    prop("merge-assoc", [&] {
        const auto sig = testgen::random_signature(rng);
        const auto a = testgen::random_ground(rng, sig, single), b = testgen::random_ground(rng, sig, single),
                   c = testgen::random_ground(rng, sig, single);
        return iso_equal(merge(merge(a, b), c), merge(a, merge(b, c)));
    });
    prop("merge-unit", [&] {
        const auto sig = testgen::random_signature(rng);
        const auto a = testgen::random_ground(rng, sig, single);
        return iso_equal(merge(a, one()), a) && iso_equal(merge(one(), a), a);
    });
    prop("parallel-assoc", [&] {
        const auto sig = testgen::random_signature(rng);
        const auto a = testgen::random_ground(rng, sig, wide), b = testgen::random_ground(rng, sig, wide),
                   c = testgen::random_ground(rng, sig, wide);
        return iso_equal(parallel(parallel(a, b), c), parallel(a, parallel(b, c)));
    });
    prop("closure-comm", [&] {
        for (;;) {
            const auto sig = testgen::random_signature(rng);
            testgen::GroundOptions o = wide;
            o.open_link = 0.8;
            o.reuse_link = 0.2;
            o.idle_name = 0;
            const auto b = testgen::random_ground(rng, sig, o);
            const auto names = b.outer_names();
            if (names.size() < 2) continue;
            const auto& x = names[0];
            const auto& y = names[1];
            return iso_equal(close(x, close(y, b)), close(y, close(x, b)));
        }
    });
    prop("alpha", [&] {
        for (;;) {
            const auto sig = testgen::random_signature(rng);
            testgen::GroundOptions o = wide;
            o.open_link = 0.8;
            o.idle_name = 0;
            const auto b = testgen::random_ground(rng, sig, o);
            const auto names = b.outer_names();
            if (names.empty()) continue;
            const auto& x = names[0];
            const auto renamed = testgen::shuffled(rng, testgen::rename_outer(b, x, "fresh"));
            return iso_equal(close(x, b), close("fresh", renamed));
        }
    });
    prop("parse-print", [&] {
        const auto sig = testgen::random_signature(rng);
        auto b = testgen::random_ground(rng, sig);
        if (rng.coin()) b = testgen::with_random_sites(rng, b);
        return iso_equal(parse_bigraph(pretty_print(b), sig), b);
    });

    bool pass = true;
    std::string detail;
    for (const auto& [name, bad] : failures) {
        pass = pass && bad == 0;
        detail += (detail.empty() ? "" : ", ") + name + " " + std::to_string(cases - bad) + "/" + std::to_string(cases);
    }
    return {pass, detail};
}

Outcome ac9() {
    // Literal listing: {fix_secure} above {leave_room}.
    const auto spec = model("fix_secure");
    const auto ts = explore(spec, 10000);
    const auto leaky = parse_bigraph("/x (Room.(Person{x} | id) || Room.(CtrlPanel{x,y} | id))", spec.signature);
    int leaks = 0;
    for (const auto& s : ts.states) leaks += matches_predicate(s, leaky);

    // Instantaneous variant, and the settledness invariant over every corpus
    // model with an instantaneous class.
    const auto inst = model("fix_secure_instant");
    const auto ti = explore(inst, 10000);
    int inst_leaks = 0;
    for (const auto& s : ti.states) inst_leaks += matches_predicate(s, leaky);
    int unsettled = 0, checked = 0;
    for (const auto& f : corpus()) {
        const auto m = load_model_file(f.string());
        bool any = false;
        for (const auto& c : m.classes) any = any || c.instantaneous;
        if (!any) continue;
        for (const auto& s : explore(m, 500).states) {
            const auto ec = enabled_class(s, m);
            unsettled += ec && m.classes[ec->class_index].instantaneous;
            ++checked;
        }
    }
    return {leaks == 0 && unsettled == 0 && checked > 0,
            "literal priorities: " + std::to_string(leaks) + "/" + std::to_string(ts.states.size()) +
                " stored states leak (leave_room fires before fix_secure is enabled); instantaneous fix: " +
                std::to_string(inst_leaks) + "/" + std::to_string(ti.states.size()) + "; unsettled states " +
                std::to_string(unsettled) + "/" + std::to_string(checked)};
}

Outcome ac10() {
    const std::vector<std::pair<std::string, std::string>> cases = {
        {"init_not_ground", "Init bigraph is not ground"},
        {"inner_mismatch", "Inner interfaces"},
        {"outer_mismatch", "Outer interfaces"},
        {"bad_inst_map", "Instantiation map is not valid"}};
    int ok = 0;
    std::string detail;
    for (const auto& [file, phrase] : cases) {
        const auto r = cli("validate " + shell_arg(std::string(MODELS_DIR "/errors/") + file + ".big"));
        const bool good = r.status != 0 && r.out.find(phrase) != std::string::npos;
        ok += good;
        detail += (detail.empty() ? "" : ", ") + file + (good ? " ok" : " wrong");
    }
    return {ok == 4, detail};
}

Outcome ac11() {
    const auto dir = scratch_dir();
    int same = 0, total = 0;
    std::string differ;
    for (const auto& f : corpus()) {
        std::array<std::string, 2> outs;
        std::array<std::string, 2> traces;
        for (int k = 0; k < 2; ++k) {
            const auto base = dir / (f.stem().string() + "_" + std::to_string(k));
            cli("--allow-partial full -M 300 -p " + shell_arg(base.string() + ".tra") + " -l " +
                shell_arg(base.string() + ".lab") + " --dot " + shell_arg(base.string() + ".dot") + " " + shell_arg(f));
            outs[k] = slurp(base.string() + ".tra") + "\x1f" + slurp(base.string() + ".lab") + "\x1f" +
                      slurp(base.string() + ".dot");
            traces[k] = cli("--seed 2024 sim -S 200 " + shell_arg(f)).out;
        }
        ++total;
        const bool ok = outs[0] == outs[1] && traces[0] == traces[1] && outs[0].size() > 2 && !traces[0].empty();
        same += ok;
        if (!ok) differ += " " + f.stem().string();
    }
    return {same == total, std::to_string(same) + "/" + std::to_string(total) +
                               " models byte-identical across runs" + (differ.empty() ? "" : "; differ:" + differ)};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"AC1 corpus parse", ac1},         {"AC2 secure building", ac2},   {"AC3 probabilistic weights", ac3},
        {"AC4 stochastic rates", ac4},     {"AC5 vault protocol", ac5},    {"AC6 instantiation maps", ac6},
        {"AC7 matcher oracle", ac7},       {"AC8 algebraic laws", ac8},    {"AC9 priorities", ac9},
        {"AC10 error messages", ac10},     {"AC11 determinism", ac11}};
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria pass" << std::endl;
    return failed == 0 ? 0 : 1;
}
