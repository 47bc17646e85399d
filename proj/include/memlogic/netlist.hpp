#pragma once

// Gate-level circuit and stimulus descriptions, their text formats and
// structural validation.
//
// Netlist (`.mlc`):
//     format memlogic/1
//     input A
//     gate 1 MOR A B        # sources are input names or gate ids
//     output S 1
//
// Stimulus (`.mls`), piecewise-constant voltages, times in ms:
//     format memlogic/1
//     A: 0..100=0.1, 100..400=0.6
//     B: 0..400=0.1; CIN: 0..400=0.1

#include "memlogic/error.hpp"
#include "memlogic/gates.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

namespace memlogic {

inline constexpr std::string_view format_tag = "memlogic/1";

/// Driver of one gate input pin: a circuit input terminal or another gate's output.
struct Source {
    enum class Kind { input, gate };
    Kind kind = Kind::input;
    std::string input;
    int gate_id = 0;

    [[nodiscard]] static Source from_input(std::string name) { return {Kind::input, std::move(name), 0}; }
    [[nodiscard]] static Source from_gate(int id) { return {Kind::gate, {}, id}; }

    bool operator==(const Source&) const = default;
};

struct Node {
    int id = 0;
    GateInstance gate{};
    std::vector<Source> sources;

    bool operator==(const Node&) const = default;
};

struct Probe {
    std::string name;
    int node_id = 0;

    bool operator==(const Probe&) const = default;
};

struct CircuitGraph {
    std::vector<std::string> inputs;
    std::vector<Node> nodes;  // declaration order
    std::vector<Probe> outputs;

    bool operator==(const CircuitGraph&) const = default;

    [[nodiscard]] std::optional<std::size_t> index_of(int id) const noexcept {
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (nodes[i].id == id) return i;
        }
        return std::nullopt;
    }
    [[nodiscard]] bool has_input(std::string_view name) const noexcept {
        return std::find(inputs.begin(), inputs.end(), name) != inputs.end();
    }
    [[nodiscard]] const Probe* probe(std::string_view name) const noexcept {
        for (const auto& p : outputs) {
            if (p.name == name) return &p;
        }
        return nullptr;
    }
};

/// Parameters stamped onto every gate created by the parser or builder.
struct GateDefaults {
    DeviceParams device{};
    MnotParams mnot{};
};

namespace detail {

/// Returns a node (declaration index) lying on a cycle, or the topological order.
struct OrderResult {
    std::vector<std::size_t> order;
    std::optional<std::size_t> cycle_member;
};

inline OrderResult order_indices(const CircuitGraph& g) {
    const std::size_t n = g.nodes.size();
    std::vector<std::vector<std::size_t>> fanout(n);
    std::vector<std::vector<std::size_t>> fanin(n);
    std::vector<std::size_t> indegree(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& src : g.nodes[i].sources) {
            if (src.kind != Source::Kind::gate) continue;
            const auto j = g.index_of(src.gate_id);
            if (!j) continue;
            fanout[*j].push_back(i);
            fanin[i].push_back(*j);
            ++indegree[i];
        }
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t i = 0; i < n; ++i) {
        if (indegree[i] == 0) ready.push(i);
    }
    OrderResult result;
    while (!ready.empty()) {
        const std::size_t i = ready.top();
        ready.pop();
        result.order.push_back(i);
        for (const std::size_t k : fanout[i]) {
            if (--indegree[k] == 0) ready.push(k);
        }
    }
    if (result.order.size() == n) return result;

    // Walk unresolved predecessors until a node repeats; that node is on a cycle.
    std::size_t cur = 0;
    while (indegree[cur] == 0) ++cur;
    std::vector<bool> seen(n, false);
    while (!seen[cur]) {
        seen[cur] = true;
        for (const std::size_t p : fanin[cur]) {
            if (indegree[p] != 0) {
                cur = p;
                break;
            }
        }
    }
    result.cycle_member = cur;
    return result;
}

inline bool is_identifier(std::string_view s) noexcept {
    if (s.empty()) return false;
    auto alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
    auto digit = [](char c) { return c >= '0' && c <= '9'; };
    if (!alpha(s.front())) return false;
    return std::all_of(s.begin(), s.end(), [&](char c) { return alpha(c) || digit(c); });
}

inline bool is_unsigned_integer(std::string_view s) noexcept {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

inline std::optional<int> to_id(std::string_view s) noexcept {
    if (!is_unsigned_integer(s)) return std::nullopt;
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || v <= 0) return std::nullopt;
    return v;
}

inline std::optional<double> to_double(std::string_view s) noexcept {
    // from_chars would accept "inf"/"nan"; only plain decimal numbers are valid here.
    if (s.empty()) return std::nullopt;
    for (const char c : s) {
        if (!((c >= '0' && c <= '9') || c == '.' || c == '-' || c == '+' || c == 'e' || c == 'E')) return std::nullopt;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

struct Token {
    std::string_view text;
    std::size_t column = 0;  // 1-based
};

struct Line {
    std::size_t number = 0;
    std::string_view content;  // comment and trailing CR stripped
};

inline std::vector<Line> split_lines(std::string_view text) {
    std::vector<Line> lines;
    std::size_t number = 1;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back({number, line});
        ++number;
        if (end == text.size()) break;
        pos = end + 1;
    }
    return lines;
}

inline bool is_space(char c) noexcept { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

inline std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && is_space(line[i])) ++i;
        const std::size_t start = i;
        while (i < line.size() && !is_space(line[i])) ++i;
        if (i > start) tokens.push_back({line.substr(start, i - start), start + 1});
    }
    return tokens;
}

inline bool blank(std::string_view s) noexcept {
    return std::all_of(s.begin(), s.end(), [](char c) { return is_space(c); });
}

/// Consumes the leading `format memlogic/1` line; returns the index of the first body line.
inline std::size_t expect_header(const std::vector<Line>& lines) {
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto tokens = tokenize(lines[i].content);
        if (tokens.empty()) continue;
        if (tokens[0].text != "format") {
            throw ParseError(ErrorKind::version, {lines[i].number, tokens[0].column},
                             "expected 'format " + std::string(format_tag) + "' header");
        }
        if (tokens.size() != 2) {
            throw ParseError(ErrorKind::syntax, {lines[i].number, tokens[0].column}, "format line takes exactly one tag");
        }
        if (tokens[1].text != format_tag) {
            throw ParseError(ErrorKind::version, {lines[i].number, tokens[1].column},
                             "unsupported format '" + std::string(tokens[1].text) + "'");
        }
        return i + 1;
    }
    const std::size_t last = lines.empty() ? 1 : lines.back().number;
    throw ParseError(ErrorKind::version, {last, 1}, "missing 'format " + std::string(format_tag) + "' header");
}

/// Shortest %g form that reads back to the same double.
inline std::string format_number(double v) {
    char buf[64];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

}  // namespace detail

/// Gate ids in evaluation order; ties broken by declaration order.
[[nodiscard]] inline std::vector<int> topological_order(const CircuitGraph& g) {
    const auto r = detail::order_indices(g);
    if (r.cycle_member) {
        throw Error(ErrorKind::cycle, "cycle through gate " + std::to_string(g.nodes[*r.cycle_member].id));
    }
    std::vector<int> ids;
    ids.reserve(r.order.size());
    for (const std::size_t i : r.order) ids.push_back(g.nodes[i].id);
    return ids;
}

/// Structural checks shared by the builder and hand-assembled graphs.
inline void validate(const CircuitGraph& g) {
    std::set<std::string, std::less<>> names;
    for (const auto& in : g.inputs) {
        if (!detail::is_identifier(in)) throw Error(ErrorKind::syntax, "invalid input name '" + in + "'");
        if (!names.insert(in).second) throw Error(ErrorKind::duplicate, "duplicate name '" + in + "'");
    }
    std::set<int> ids;
    for (const auto& node : g.nodes) {
        if (node.id <= 0) throw Error(ErrorKind::validation, "gate ids must be positive");
        if (!ids.insert(node.id).second) throw Error(ErrorKind::duplicate, "duplicate gate id " + std::to_string(node.id));
        if (node.sources.size() != arity(node.gate.kind)) {
            throw Error(ErrorKind::arity, "gate " + std::to_string(node.id) + ": " + std::string(to_string(node.gate.kind)) +
                                              " takes " + std::to_string(arity(node.gate.kind)) + " input(s)");
        }
        validate(node.gate);
    }
    for (const auto& node : g.nodes) {
        for (const auto& src : node.sources) {
            const bool ok = src.kind == Source::Kind::input ? g.has_input(src.input) : ids.count(src.gate_id) > 0;
            if (!ok) {
                throw Error(ErrorKind::dangling_net, "gate " + std::to_string(node.id) + " reads an undefined source");
            }
        }
    }
    for (const auto& p : g.outputs) {
        if (!detail::is_identifier(p.name)) throw Error(ErrorKind::syntax, "invalid output name '" + p.name + "'");
        if (!names.insert(p.name).second) throw Error(ErrorKind::duplicate, "duplicate name '" + p.name + "'");
        if (!ids.count(p.node_id)) throw Error(ErrorKind::dangling_net, "output " + p.name + " probes an undefined gate");
    }
    (void)topological_order(g);
}

/// Programmatic construction with the same validation as the parser.
class CircuitBuilder {
public:
    explicit CircuitBuilder(GateDefaults defaults = {}) : defaults_(std::move(defaults)) {}

    CircuitBuilder& input(std::string name) {
        graph_.inputs.push_back(std::move(name));
        return *this;
    }
    CircuitBuilder& gate(int id, GateKind kind, std::vector<Source> sources) {
        graph_.nodes.push_back({id, make_gate(kind, defaults_.device, defaults_.mnot), std::move(sources)});
        return *this;
    }
    CircuitBuilder& output(std::string name, int id) {
        graph_.outputs.push_back({std::move(name), id});
        return *this;
    }
    [[nodiscard]] CircuitGraph build() const {
        validate(graph_);
        return graph_;
    }

private:
    GateDefaults defaults_;
    CircuitGraph graph_;
};

[[nodiscard]] inline CircuitGraph parse_circuit(std::string_view text, const GateDefaults& defaults = {}) {
    using detail::Token;
    const auto lines = detail::split_lines(text);
    const std::size_t body = detail::expect_header(lines);

    CircuitGraph g;
    std::map<std::string, Location, std::less<>> names;
    std::map<int, Location> ids;
    struct PendingRef {
        int gate_id;
        Location where;
    };
    std::vector<PendingRef> gate_refs;  // resolved after all gates are declared
    std::vector<Location> node_lines;
    std::vector<Location> probe_at;

    auto claim_name = [&](const Token& tok, std::size_t line) {
        const Location here{line, tok.column};
        if (!detail::is_identifier(tok.text)) {
            throw ParseError(ErrorKind::syntax, here, "invalid name '" + std::string(tok.text) + "'");
        }
        if (const auto it = names.find(tok.text); it != names.end()) {
            throw ParseError(ErrorKind::duplicate, here,
                             "name '" + std::string(tok.text) + "' already declared on line " + std::to_string(it->second.line));
        }
        names.emplace(std::string(tok.text), here);
    };

    for (std::size_t li = body; li < lines.size(); ++li) {
        const auto& line = lines[li];
        const auto tokens = detail::tokenize(line.content);
        if (tokens.empty()) continue;
        const auto& head = tokens[0];
        const Location at{line.number, head.column};

        if (head.text == "input") {
            if (tokens.size() != 2) throw ParseError(ErrorKind::syntax, at, "usage: input <NAME>");
            claim_name(tokens[1], line.number);
            g.inputs.emplace_back(tokens[1].text);
        } else if (head.text == "gate") {
            if (tokens.size() < 3) throw ParseError(ErrorKind::syntax, at, "usage: gate <ID> <MOR|MAND|MNOT> <src> [<src>]");
            const Location id_at{line.number, tokens[1].column};
            const auto id = detail::to_id(tokens[1].text);
            if (!id) throw ParseError(ErrorKind::syntax, id_at, "gate id must be a positive integer");
            if (const auto it = ids.find(*id); it != ids.end()) {
                throw ParseError(ErrorKind::duplicate, id_at,
                                 "gate id " + std::to_string(*id) + " already declared on line " + std::to_string(it->second.line));
            }
            const Location kind_at{line.number, tokens[2].column};
            const auto kind = parse_gate_kind(tokens[2].text);
            if (!kind) throw ParseError(ErrorKind::syntax, kind_at, "unknown gate kind '" + std::string(tokens[2].text) + "'");
            const std::size_t n_src = tokens.size() - 3;
            if (n_src != arity(*kind)) {
                throw ParseError(ErrorKind::arity, kind_at,
                                 std::string(to_string(*kind)) + " takes " + std::to_string(arity(*kind)) + " input(s), got " +
                                     std::to_string(n_src));
            }
            Node node{*id, {}, {}};
            for (std::size_t t = 3; t < tokens.size(); ++t) {
                const Location src_at{line.number, tokens[t].column};
                if (detail::is_unsigned_integer(tokens[t].text)) {
                    const auto ref = detail::to_id(tokens[t].text);
                    if (!ref) throw ParseError(ErrorKind::syntax, src_at, "gate reference must be a positive integer");
                    node.sources.push_back(Source::from_gate(*ref));
                    gate_refs.push_back({*ref, src_at});
                } else if (detail::is_identifier(tokens[t].text)) {
                    if (!g.has_input(tokens[t].text)) {
                        throw ParseError(ErrorKind::dangling_net, src_at, "undefined input '" + std::string(tokens[t].text) + "'");
                    }
                    node.sources.push_back(Source::from_input(std::string(tokens[t].text)));
                } else {
                    throw ParseError(ErrorKind::syntax, src_at, "invalid source '" + std::string(tokens[t].text) + "'");
                }
            }
            try {
                node.gate = make_gate(*kind, defaults.device, defaults.mnot);
            } catch (const Error& e) {
                throw ParseError(e.kind(), kind_at, e.what());
            }
            ids.emplace(*id, id_at);
            node_lines.push_back(at);
            g.nodes.push_back(std::move(node));
        } else if (head.text == "output") {
            if (tokens.size() != 3) throw ParseError(ErrorKind::syntax, at, "usage: output <NAME> <ID>");
            claim_name(tokens[1], line.number);
            const Location id_at{line.number, tokens[2].column};
            const auto id = detail::to_id(tokens[2].text);
            if (!id) throw ParseError(ErrorKind::syntax, id_at, "output must reference a positive gate id");
            g.outputs.push_back({std::string(tokens[1].text), *id});
            probe_at.push_back(id_at);
        } else if (head.text == "format") {
            throw ParseError(ErrorKind::syntax, at, "duplicate format line");
        } else {
            throw ParseError(ErrorKind::syntax, at, "unknown directive '" + std::string(head.text) + "'");
        }
    }

    for (const auto& ref : gate_refs) {
        if (!ids.count(ref.gate_id)) {
            throw ParseError(ErrorKind::dangling_net, ref.where, "undefined gate " + std::to_string(ref.gate_id));
        }
    }
    for (std::size_t i = 0; i < g.outputs.size(); ++i) {
        if (!ids.count(g.outputs[i].node_id)) {
            throw ParseError(ErrorKind::dangling_net, probe_at[i], "undefined gate " + std::to_string(g.outputs[i].node_id));
        }
    }
    if (const auto r = detail::order_indices(g); r.cycle_member) {
        throw ParseError(ErrorKind::cycle, node_lines[*r.cycle_member],
                         "cycle through gate " + std::to_string(g.nodes[*r.cycle_member].id));
    }
    return g;
}

/// Inverse of parse_circuit for graphs built with uniform gate defaults.
[[nodiscard]] inline std::string serialize(const CircuitGraph& g) {
    std::string out = "format " + std::string(format_tag) + "\n";
    for (const auto& in : g.inputs) out += "input " + in + "\n";
    for (const auto& node : g.nodes) {
        out += "gate " + std::to_string(node.id) + " " + std::string(to_string(node.gate.kind));
        for (const auto& src : node.sources) {
            out += " ";
            out += src.kind == Source::Kind::input ? src.input : std::to_string(src.gate_id);
        }
        out += "\n";
    }
    for (const auto& p : g.outputs) out += "output " + p.name + " " + std::to_string(p.node_id) + "\n";
    return out;
}

struct Segment {
    double start_ms = 0.0;
    double end_ms = 0.0;
    double volts = 0.0;

    bool operator==(const Segment&) const = default;
};

struct Waveform {
    std::string terminal;
    std::vector<Segment> segments;

    bool operator==(const Waveform&) const = default;

    /// Voltage in effect at t; segments are half-open except the last, which includes its end.
    [[nodiscard]] double value_at(double t_ms) const noexcept {
        for (const auto& s : segments) {
            if (t_ms >= s.start_ms && t_ms < s.end_ms) return s.volts;
        }
        return segments.empty() ? 0.0 : segments.back().volts;
    }
};

struct Stimulus {
    std::vector<Waveform> waveforms;
    double horizon_ms = 0.0;

    bool operator==(const Stimulus&) const = default;

    [[nodiscard]] const Waveform* find(std::string_view terminal) const noexcept {
        for (const auto& w : waveforms) {
            if (w.terminal == terminal) return &w;
        }
        return nullptr;
    }
};

namespace detail {

inline void check_coverage(const Waveform& w, double horizon, Location where) {
    double cursor = 0.0;
    for (const auto& s : w.segments) {
        if (s.start_ms < cursor) {
            throw ParseError(ErrorKind::overlap, where, w.terminal + ": interval starting at " + format_number(s.start_ms) +
                                                            " overlaps the previous one");
        }
        if (s.start_ms > cursor) {
            throw ParseError(ErrorKind::gap, where,
                             w.terminal + ": no voltage between " + format_number(cursor) + " and " + format_number(s.start_ms));
        }
        cursor = s.end_ms;
    }
    if (cursor < horizon) {
        throw ParseError(ErrorKind::gap, where,
                         w.terminal + ": no voltage between " + format_number(cursor) + " and " + format_number(horizon));
    }
}

}  // namespace detail

[[nodiscard]] inline Stimulus parse_stimulus(std::string_view text) {
    const auto lines = detail::split_lines(text);
    const std::size_t body = detail::expect_header(lines);

    Stimulus stim;
    std::vector<Location> declared_at;
    for (std::size_t li = body; li < lines.size(); ++li) {
        const auto& line = lines[li];
        std::size_t entry_start = 0;
        while (entry_start <= line.content.size()) {
            const std::size_t semi = std::min(line.content.find(';', entry_start), line.content.size());
            const std::string_view entry = line.content.substr(entry_start, semi - entry_start);
            const std::size_t base_col = entry_start + 1;
            entry_start = semi + 1;
            if (detail::blank(entry)) {
                if (semi == line.content.size()) break;
                throw ParseError(ErrorKind::syntax, {line.number, base_col}, "empty stimulus entry");
            }

            const std::size_t lead = entry.find_first_not_of(" \t");
            const std::size_t colon = entry.find(':');
            const Location entry_at{line.number, base_col + lead};
            if (colon == std::string_view::npos) throw ParseError(ErrorKind::syntax, entry_at, "expected '<NAME>: <segments>'");
            std::string_view name = entry.substr(lead, colon - lead);
            while (!name.empty() && detail::is_space(name.back())) name.remove_suffix(1);
            if (!detail::is_identifier(name)) {
                throw ParseError(ErrorKind::syntax, entry_at, "invalid terminal name '" + std::string(name) + "'");
            }
            if (stim.find(name)) {
                throw ParseError(ErrorKind::duplicate, entry_at, "terminal '" + std::string(name) + "' already has a waveform");
            }

            Waveform w{std::string(name), {}};
            std::size_t seg_start = colon + 1;
            while (true) {
                const std::size_t comma = std::min(entry.find(',', seg_start), entry.size());
                std::string_view seg = entry.substr(seg_start, comma - seg_start);
                std::size_t offset = seg_start;
                while (!seg.empty() && detail::is_space(seg.front())) {
                    seg.remove_prefix(1);
                    ++offset;
                }
                while (!seg.empty() && detail::is_space(seg.back())) seg.remove_suffix(1);
                const Location seg_at{line.number, base_col + offset};
                const std::size_t dots = seg.find("..");
                const std::size_t eq = seg.find('=');
                if (dots == std::string_view::npos || eq == std::string_view::npos || eq < dots) {
                    throw ParseError(ErrorKind::syntax, seg_at, "expected '<start>..<end>=<volts>'");
                }
                const auto start = detail::to_double(seg.substr(0, dots));
                const auto end = detail::to_double(seg.substr(dots + 2, eq - dots - 2));
                const auto volts = detail::to_double(seg.substr(eq + 1));
                if (!start || !end || !volts) {
                    throw ParseError(ErrorKind::syntax, seg_at, "segment values must be finite decimal numbers");
                }
                if (*start < 0.0 || !(*end > *start)) {
                    throw ParseError(ErrorKind::validation, seg_at, "segment needs 0 <= start < end");
                }
                w.segments.push_back({*start, *end, *volts});
                if (comma == entry.size()) break;
                seg_start = comma + 1;
            }
            stim.horizon_ms = std::max(stim.horizon_ms, w.segments.back().end_ms);
            stim.waveforms.push_back(std::move(w));
            declared_at.push_back(entry_at);
            if (semi == line.content.size()) break;
        }
    }
    for (std::size_t i = 0; i < stim.waveforms.size(); ++i) {
        detail::check_coverage(stim.waveforms[i], stim.horizon_ms, declared_at[i]);
    }
    return stim;
}

/// Parses and additionally rejects terminals the circuit does not declare.
[[nodiscard]] inline Stimulus parse_stimulus(std::string_view text, const CircuitGraph& graph) {
    Stimulus stim = parse_stimulus(text);
    const auto lines = detail::split_lines(text);
    for (const auto& w : stim.waveforms) {
        if (graph.has_input(w.terminal)) continue;
        Location where{};
        for (const auto& line : lines) {
            const auto col = line.content.find(w.terminal + ":");
            if (col != std::string_view::npos) {
                where = {line.number, col + 1};
                break;
            }
        }
        throw ParseError(ErrorKind::unknown_terminal, where, "circuit has no input '" + w.terminal + "'");
    }
    return stim;
}

[[nodiscard]] inline std::string serialize(const Stimulus& s) {
    std::string out = "format " + std::string(format_tag) + "\n";
    for (const auto& w : s.waveforms) {
        out += w.terminal + ":";
        for (std::size_t i = 0; i < w.segments.size(); ++i) {
            const auto& seg = w.segments[i];
            out += (i == 0 ? " " : ", ") + detail::format_number(seg.start_ms) + ".." + detail::format_number(seg.end_ms) + "=" +
                   detail::format_number(seg.volts);
        }
        out += "\n";
    }
    return out;
}

}  // namespace memlogic
