#pragma once

// Reference experiments: the one-bit full adder under fixed input patterns,
// and single-gate characterization runs.

#include "memlogic/engine.hpp"
#include "memlogic/netlist.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace memlogic {

/// Full adder, node ids 1..12.
///   half-adder 1 (X1 = A ^ B):    1 MOR(A,B)  2 MAND(A,B)  3 MNOT(2)  4 MAND(1,3)
///   carry unit   (maj(A,B,CIN)):  5 MOR(A,B)  6 MAND(5,CIN)  8 MAND(A,B)  7 MOR(6,8) -> COUT
///   half-adder 2 (X1 ^ CIN):      9 MOR(4,CIN)  10 MAND(4,CIN)  11 MNOT(10)  12 MAND(9,11) -> SUM
[[nodiscard]] inline CircuitGraph build_full_adder(const GateDefaults& defaults = {}) {
    using S = Source;
    const auto in = [](const char* n) { return S::from_input(n); };
    return CircuitBuilder(defaults)
        .input("A")
        .input("B")
        .input("CIN")
        .gate(1, GateKind::mor, {in("A"), in("B")})
        .gate(2, GateKind::mand, {in("A"), in("B")})
        .gate(3, GateKind::mnot, {S::from_gate(2)})
        .gate(4, GateKind::mand, {S::from_gate(1), S::from_gate(3)})
        .gate(5, GateKind::mor, {in("A"), in("B")})
        .gate(6, GateKind::mand, {S::from_gate(5), in("CIN")})
        .gate(7, GateKind::mor, {S::from_gate(6), S::from_gate(8)})
        .gate(8, GateKind::mand, {in("A"), in("B")})
        .gate(9, GateKind::mor, {S::from_gate(4), in("CIN")})
        .gate(10, GateKind::mand, {S::from_gate(4), in("CIN")})
        .gate(11, GateKind::mnot, {S::from_gate(10)})
        .gate(12, GateKind::mand, {S::from_gate(9), S::from_gate(11)})
        .output("SUM", 12)
        .output("COUT", 7)
        .build();
}

struct Pattern {
    bool a = false;
    bool b = false;
    bool cin = false;

    [[nodiscard]] std::string label() const {
        return std::string{a ? '1' : '0', b ? '1' : '0', cin ? '1' : '0'};
    }
    [[nodiscard]] bool sum() const noexcept { return a != b ? !cin : cin; }
    [[nodiscard]] bool carry() const noexcept { return (a && b) || (cin && (a || b)); }

    bool operator==(const Pattern&) const = default;
};

[[nodiscard]] inline std::optional<Pattern> parse_pattern(std::string_view bits) noexcept {
    if (bits.size() != 3) return std::nullopt;
    auto bit = [](char c) -> std::optional<bool> {
        if (c == '0') return false;
        if (c == '1') return true;
        return std::nullopt;
    };
    const auto a = bit(bits[0]);
    const auto b = bit(bits[1]);
    const auto c = bit(bits[2]);
    if (!a || !b || !c) return std::nullopt;
    return Pattern{*a, *b, *c};
}

[[nodiscard]] inline std::array<Pattern, 8> all_patterns() {
    std::array<Pattern, 8> out{};
    for (int i = 0; i < 8; ++i) out[static_cast<std::size_t>(i)] = {(i & 4) != 0, (i & 2) != 0, (i & 1) != 0};
    return out;
}

inline constexpr double default_onset_ms = 100.0;

/// All inputs at logic 0 until onset, then the pattern until the horizon.
[[nodiscard]] inline Stimulus pattern_stimulus(const Pattern& p, const SimConfig& cfg, double onset_ms = default_onset_ms) {
    auto wave = [&](const char* name, bool high) {
        return Waveform{name, {{0.0, onset_ms, cfg.v_logic0}, {onset_ms, cfg.horizon, high ? cfg.v_logic1 : cfg.v_logic0}}};
    };
    return {{wave("A", p.a), wave("B", p.b), wave("CIN", p.cin)}, cfg.horizon};
}

struct Check {
    enum class Kind {
        reads,             // read_binary at t_to equals level
        settles_by,        // settle_time(level) exists and is <= t_to
        outside_band,      // value at t_to is not inside (lo, hi)
        floor_if_driven,   // if the gate's device left the fresh state, min over [t_from, t_to] lies in [lo, hi]
    };
    std::string name;
    std::string net;
    Kind kind = Kind::reads;
    Logic level = Logic::zero;
    double t_from = 0.0;
    double t_to = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

struct Experiment {
    std::string name;
    CircuitGraph circuit;
    Stimulus stimulus;
    std::vector<Check> expectations;
};

struct Verdict {
    std::string experiment;
    std::string check;
    bool pass = false;
    std::optional<double> measured;
};

[[nodiscard]] inline nlohmann::json to_json(const Verdict& v) {
    nlohmann::json j = {{"experiment", v.experiment}, {"check", v.check}, {"pass", v.pass}};
    j["measured"] = v.measured ? nlohmann::json(*v.measured) : nlohmann::json(nullptr);
    return j;
}

[[nodiscard]] inline nlohmann::json to_json(const std::vector<Verdict>& vs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& v : vs) arr.push_back(to_json(v));
    return arr;
}

struct ExperimentResult {
    Trace trace;
    std::vector<Verdict> verdicts;

    [[nodiscard]] bool passed() const noexcept {
        return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
    }
};

[[nodiscard]] inline Verdict evaluate(const Check& c, const Trace& trace, const std::string& experiment, const SimConfig& cfg,
                                      double onset_ms = default_onset_ms) {
    Verdict v{experiment, c.name, false, std::nullopt};
    const std::size_t col = trace.require_net(c.net);
    switch (c.kind) {
    case Check::Kind::reads: {
        const double volts = trace.voltage(c.net, c.t_to);
        v.measured = volts;
        v.pass = classify(volts, cfg) == c.level;
        break;
    }
    case Check::Kind::settles_by: {
        const auto t = settle_time(trace, c.net, c.level, cfg, onset_ms);
        v.measured = t;
        v.pass = t && *t <= c.t_to + 1e-9;
        break;
    }
    case Check::Kind::outside_band: {
        const double volts = trace.voltage(c.net, c.t_to);
        v.measured = volts;
        v.pass = !(volts > c.lo && volts < c.hi);
        break;
    }
    case Check::Kind::floor_if_driven: {
        double lowest = std::numeric_limits<double>::infinity();
        bool driven = false;
        const int id = std::stoi(c.net.substr(1));
        const auto gi = trace.gate_index(id);
        for (const auto& rec : trace.records) {
            if (rec.t_ms + 1e-9 < c.t_from || rec.t_ms > c.t_to + 1e-9) continue;
            lowest = std::min(lowest, rec.volts[col]);
            if (gi && rec.devices[*gi].current > 0.0) driven = true;
        }
        v.measured = lowest;
        v.pass = !driven || (lowest >= c.lo && lowest <= c.hi);
        break;
    }
    }
    return v;
}

[[nodiscard]] inline ExperimentResult run_experiment_in_place(Experiment& e, const SimConfig& cfg,
                                                              double onset_ms = default_onset_ms) {
    ExperimentResult r;
    r.trace = simulate_in_place(e.circuit, e.stimulus, cfg);
    for (const auto& c : e.expectations) r.verdicts.push_back(evaluate(c, r.trace, e.name, cfg, onset_ms));
    return r;
}

[[nodiscard]] inline ExperimentResult run_experiment(Experiment e, const SimConfig& cfg, double onset_ms = default_onset_ms) {
    return run_experiment_in_place(e, cfg, onset_ms);
}

/// Behavioral expectations for one adder pattern.
[[nodiscard]] inline std::vector<Check> adder_checks(const CircuitGraph& adder, const Pattern& p, const SimConfig& cfg,
                                                     double onset_ms = default_onset_ms) {
    const Logic sum = p.sum() ? Logic::one : Logic::zero;
    const Logic cout = p.carry() ? Logic::one : Logic::zero;
    const double end = cfg.horizon;
    const double deadline = onset_ms + 100.0;
    std::vector<Check> checks = {
        {"SUM truth value", "SUM", Check::Kind::reads, sum, end, end},
        {"COUT truth value", "COUT", Check::Kind::reads, cout, end, end},
        {"SUM settle bound", "SUM", Check::Kind::settles_by, sum, onset_ms, deadline},
        {"COUT settle bound", "COUT", Check::Kind::settles_by, cout, onset_ms, deadline},
        {"SUM not near 0.3 V", "SUM", Check::Kind::outside_band, Logic::zero, end, end, 0.25, 0.35},
        {"COUT not near 0.3 V", "COUT", Check::Kind::outside_band, Logic::zero, end, end, 0.25, 0.35},
    };
    for (const auto& n : adder.nodes) {
        if (n.gate.kind != GateKind::mnot) continue;
        checks.push_back({"MNOT floor " + gate_net(n.id), gate_net(n.id), Check::Kind::floor_if_driven, Logic::zero, 0.0, end,
                          0.07, 0.13});
    }
    return checks;
}

[[nodiscard]] inline Experiment adder_experiment(const Pattern& p, const SimConfig& cfg, const GateDefaults& defaults = {}) {
    Experiment e{"adder_" + p.label(), build_full_adder(defaults), pattern_stimulus(p, cfg), {}};
    e.expectations = adder_checks(e.circuit, p, cfg);
    return e;
}

/// Fresh adder under one pattern: 0.1 V everywhere for the onset period, then the pattern.
[[nodiscard]] inline ExperimentResult run_pattern(const Pattern& p, const SimConfig& cfg = {}, const GateDefaults& defaults = {}) {
    return run_experiment(adder_experiment(p, cfg, defaults), cfg);
}

struct PersistenceResult {
    std::optional<double> first;   // settle time of the net on the fresh circuit
    std::optional<double> second;  // same pattern, rerun on the trained circuit
    Verdict verdict;
};

/// Runs the pattern twice without resetting the devices and compares settle times on `net`.
[[nodiscard]] inline PersistenceResult learning_persistence(const Pattern& p, const std::string& net, const SimConfig& cfg = {},
                                                            const GateDefaults& defaults = {}) {
    CircuitGraph adder = build_full_adder(defaults);
    const Stimulus stim = pattern_stimulus(p, cfg);
    const Logic level = (net == "SUM" ? p.sum() : p.carry()) ? Logic::one : Logic::zero;
    const Trace first = simulate_in_place(adder, stim, cfg);
    const Trace second = simulate_in_place(adder, stim, cfg);
    PersistenceResult r;
    r.first = settle_time(first, net, level, cfg);
    r.second = settle_time(second, net, level, cfg);
    const bool faster = r.second && (!r.first || *r.second < *r.first);
    r.verdict = {"adder_" + p.label() + "_rerun", net + " settles faster when trained", faster, r.second};
    return r;
}

[[nodiscard]] inline CircuitGraph single_gate_circuit(GateKind kind, const GateDefaults& defaults = {}) {
    CircuitBuilder b(defaults);
    if (kind == GateKind::mnot) {
        b.input("IN").gate(1, kind, {Source::from_input("IN")});
    } else {
        b.input("IN1").input("IN2").gate(1, kind, {Source::from_input("IN1"), Source::from_input("IN2")});
    }
    return b.output("OUT", 1).build();
}

/// Input schedules shaped like the bench measurements of each gate.
///   MOR:  IN1 pulses at 50-100 and 150-200 ms, IN2 at 250-300 ms.
///   MAND: IN1 alone at 50-100, IN2 alone at 120-170, both at 200-300 ms.
///   MNOT: one pulse at 100-200 ms.
[[nodiscard]] inline Stimulus default_schedule(GateKind kind, const SimConfig& cfg) {
    const double lo = cfg.v_logic0;
    const double hi = cfg.v_logic1;
    const double end = cfg.horizon;
    auto pulses = [&](const char* name, std::vector<std::pair<double, double>> on) {
        Waveform w{name, {}};
        double cursor = 0.0;
        for (auto [s, e] : on) {
            s = std::min(s, end);
            e = std::min(e, end);
            if (s > cursor) w.segments.push_back({cursor, s, lo});
            if (e > s) w.segments.push_back({s, e, hi});
            cursor = std::max(cursor, e);
        }
        if (cursor < end) w.segments.push_back({cursor, end, lo});
        return w;
    };
    switch (kind) {
    case GateKind::mor: return {{pulses("IN1", {{50, 100}, {150, 200}}), pulses("IN2", {{250, 300}})}, end};
    case GateKind::mand: return {{pulses("IN1", {{50, 100}, {200, 300}}), pulses("IN2", {{120, 170}, {200, 300}})}, end};
    case GateKind::mnot: return {{pulses("IN", {{100, 200}})}, end};
    }
    return {};
}

[[nodiscard]] inline Trace characterize_gate(GateKind kind, const Stimulus& schedule, const SimConfig& cfg = {},
                                             const GateDefaults& defaults = {}) {
    return simulate(single_gate_circuit(kind, defaults), schedule, cfg);
}

}  // namespace memlogic
