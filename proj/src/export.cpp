#include "bigraph/export.hpp"

#include "bigraph/format.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <map>
#include <sstream>

namespace bigraph {

namespace {

std::string labels_file(const std::vector<std::string>& preds, std::size_t states,
                        const std::function<bool(std::size_t, std::size_t)>& holds) {
    std::ostringstream out;
    out << "0=\"init\"";
    for (std::size_t p = 0; p < preds.size(); ++p) out << ' ' << (p + 1) << "=\"" << preds[p] << '"';
    out << '\n';
    for (std::size_t s = 0; s < states; ++s) {
        std::vector<std::size_t> idx;
        if (s == 0) idx.push_back(0);
        for (std::size_t p = 0; p < preds.size(); ++p) {
            if (holds(p, s)) idx.push_back(p + 1);
        }
        if (idx.empty()) continue;
        out << s << ':';
        for (auto i : idx) out << ' ' << i;
        out << '\n';
    }
    return out.str();
}

std::vector<bool> deadlocks(const TransitionSystem& ts) {
    std::vector<bool> dead(ts.states.size(), true);
    for (const auto& t : ts.transitions) dead[t.src] = false;
    return dead;
}

} // namespace

std::string write_tra(const TransitionSystem& ts, bool allow_partial) {
    if (ts.partial && !allow_partial) {
        fail(ErrorKind::PartialSystem, "The transition system is partial (state bound reached); use --allow-partial");
    }
    const auto dead = deadlocks(ts);
    std::ostringstream out;
    if (ts.semantics != Semantics::Abrs) {
        std::vector<std::tuple<int, int, double>> rows;
        for (const auto& t : ts.transitions) rows.emplace_back(t.src, t.dst, t.label.value());
        if (ts.semantics != Semantics::Sbrs) {
            for (std::size_t s = 0; s < dead.size(); ++s) {
                if (dead[s]) rows.emplace_back(static_cast<int>(s), static_cast<int>(s), 1.0);
            }
        }
        std::sort(rows.begin(), rows.end());
        out << ts.states.size() << ' ' << rows.size() << '\n';
        for (const auto& [s, d, v] : rows) out << s << ' ' << d << ' ' << format_double(v) << '\n';
        return out.str();
    }
    // (src, action) -> choice index; the deadlock loop is choice 0 of its state.
    std::vector<std::tuple<int, int, int, double>> rows;  // src, action, dst, prob
    for (const auto& t : ts.transitions) rows.emplace_back(t.src, t.label.action, t.dst, t.label.value());
    for (std::size_t s = 0; s < dead.size(); ++s) {
        if (dead[s]) rows.emplace_back(static_cast<int>(s), -1, static_cast<int>(s), 1.0);
    }
    std::sort(rows.begin(), rows.end());
    std::ostringstream body;
    int choices = 0;
    int prev_src = -1, prev_action = -2, choice = -1;
    for (const auto& [s, a, d, p] : rows) {
        if (s != prev_src) choice = -1;
        if (s != prev_src || a != prev_action) {
            ++choice;
            ++choices;
        }
        prev_src = s;
        prev_action = a;
        body << s << ' ' << choice << ' ' << d << ' ' << format_double(p);
        if (a >= 0) body << ' ' << ts.actions[a];
        body << '\n';
    }
    out << ts.states.size() << ' ' << choices << ' ' << rows.size() << '\n' << body.str();
    return out.str();
}

std::string write_labels(const TransitionSystem& ts) {
    return labels_file(ts.predicates, ts.states.size(), [&](std::size_t p, std::size_t s) { return ts.labelling[p][s]; });
}

std::string write_dot(const TransitionSystem& ts) {
    std::ostringstream out;
    out << "digraph ts {\n";
    for (std::size_t s = 0; s < ts.states.size(); ++s) {
        std::string label = std::to_string(s);
        for (std::size_t p = 0; p < ts.predicates.size(); ++p) {
            if (ts.labelling[p][s]) label += "\\n" + ts.predicates[p];
        }
        out << "  " << s << " [label=\"" << label << "\"" << (s == 0 ? ", style=bold" : "") << "];\n";
    }
    auto rows = ts.transitions;
    std::stable_sort(rows.begin(), rows.end(), [](const Transition& a, const Transition& b) {
        return std::tie(a.src, a.label.action, a.dst) < std::tie(b.src, b.label.action, b.dst);
    });
    for (const auto& t : rows) {
        out << "  " << t.src << " -> " << t.dst;
        std::string label;
        if (t.label.kind != TransitionLabel::Kind::None) label = format_double(t.label.value());
        if (t.label.action >= 0) label = ts.actions[t.label.action] + ":" + label;
        if (!label.empty()) out << " [label=\"" << label << "\"]";
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

TraFile read_tra(std::string_view text, bool with_choices) {
    std::istringstream in{std::string(text)};
    TraFile f;
    std::string line;
    auto bad = [](const std::string& why) { fail(ErrorKind::Io, "Malformed transition file: " + why); };
    if (!std::getline(in, line)) bad("empty");
    {
        std::istringstream h(line);
        int count = 0;
        h >> f.states;
        if (with_choices) h >> f.choices;
        if (!(h >> count)) bad("header");
        f.lines.reserve(count);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream l(line);
        TraLine t;
        std::string value;
        l >> t.src;
        if (with_choices) l >> t.choice;
        if (!(l >> t.dst >> value)) bad("line '" + line + "'");
        const auto res = std::from_chars(value.data(), value.data() + value.size(), t.value);
        if (res.ec != std::errc() || res.ptr != value.data() + value.size()) bad("value '" + value + "'");
        l >> t.action;
        f.lines.push_back(std::move(t));
    }
    return f;
}

std::string write_trace(const SimTrace& trace) {
    std::ostringstream out;
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const auto& s = trace.steps[i];
        out << i << '\t' << s.rule << '\t' << s.label << '\t' << format_double(s.time) << '\n';
    }
    return out.str();
}

std::string write_trace_labels(const SimTrace& trace, const BrsSpec& spec) {
    std::vector<std::string> names;
    for (const auto& p : spec.preds) names.push_back(p.name);
    return labels_file(names, trace.steps.size(), [&](std::size_t p, std::size_t s) {
        return matches_predicate(trace.steps[s].state, spec.preds[p].pattern);
    });
}

} // namespace bigraph
