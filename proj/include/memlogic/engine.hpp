#pragma once

// Fixed-step simulation of a combinational memristive gate network.
//
// Step k covers [k*dt, (k+1)*dt). Circuit inputs are sampled at the start of
// the step, gates are evaluated in topological order with zero propagation
// delay (a gate sees its drivers' outputs from the same step), and the record
// for the step is stamped with its end time (k+1)*dt. All gate-driven
// voltages in a record are therefore those after the device update.
//
// With locate_crossings set, a gate whose drivers all changed continuously
// during the step (no stimulus edge reached it this step) sees its drive as a
// linear ramp from the previous step's value, so a threshold crossing inside
// the step is placed at the interpolated time instead of the step edge.

#include "memlogic/error.hpp"
#include "memlogic/gates.hpp"
#include "memlogic/netlist.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace memlogic {

struct SimConfig {
    double dt = 1.0;         // ms
    double horizon = 400.0;  // ms
    double b = 1.5e6;        // ohm, V = I * b
    double v_logic1 = 0.6;
    double v_logic0 = 0.1;
    double threshold_low = 0.25;
    double threshold_high = 0.5;
    bool locate_crossings = true;

    bool operator==(const SimConfig&) const = default;
};

inline void validate(const SimConfig& c) {
    auto fail = [](const std::string& what) { throw Error(ErrorKind::validation, "sim config: " + what); };
    if (!(c.dt > 0.0)) fail("dt must be positive");
    if (!(c.horizon >= c.dt)) fail("horizon must be at least one step");
    if (!(c.b > 0.0)) fail("b must be positive");
    if (!(c.threshold_low < c.threshold_high)) fail("threshold_low must be below threshold_high");
    const double steps = c.horizon / c.dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * steps) fail("horizon must be a whole number of steps");
}

[[nodiscard]] inline std::size_t step_count(const SimConfig& c) noexcept {
    return static_cast<std::size_t>(std::llround(c.horizon / c.dt));
}

[[nodiscard]] constexpr double i_to_v(double amperes, const SimConfig& cfg) noexcept { return amperes * cfg.b; }

struct DeviceSample {
    double current = 0.0;  // model current at v_ref, A
    double x1 = 1.0;
    double x2 = 1.0;

    bool operator==(const DeviceSample&) const = default;
};

struct TraceRecord {
    double t_ms = 0.0;
    std::vector<double> volts;            // parallel to Trace::nets
    std::vector<DeviceSample> devices;    // parallel to Trace::gate_ids

    bool operator==(const TraceRecord&) const = default;
};

[[nodiscard]] inline std::string gate_net(int id) { return "g" + std::to_string(id); }

struct Trace {
    std::vector<std::string> nets;  // inputs, output probes, then g<id> per gate
    std::vector<int> gate_ids;      // declaration order
    std::vector<TraceRecord> records;
    double dt = 1.0;

    bool operator==(const Trace&) const = default;

    [[nodiscard]] std::optional<std::size_t> net_index(std::string_view net) const noexcept {
        for (std::size_t i = 0; i < nets.size(); ++i) {
            if (nets[i] == net) return i;
        }
        return std::nullopt;
    }
    [[nodiscard]] std::optional<std::size_t> gate_index(int id) const noexcept {
        for (std::size_t i = 0; i < gate_ids.size(); ++i) {
            if (gate_ids[i] == id) return i;
        }
        return std::nullopt;
    }
    [[nodiscard]] std::size_t require_net(std::string_view net) const {
        const auto i = net_index(net);
        if (!i) throw Error(ErrorKind::unknown_net, "trace has no net '" + std::string(net) + "'");
        return *i;
    }

    /// Index of the last record stamped at or before t (the first record for t < dt).
    [[nodiscard]] std::size_t record_at(double t_ms) const {
        if (records.empty()) throw Error(ErrorKind::validation, "empty trace");
        const double horizon = records.back().t_ms;
        const double eps = 1e-9 * std::max(1.0, horizon);
        if (t_ms < -eps || t_ms > horizon + eps) {
            throw Error(ErrorKind::validation, "time " + std::to_string(t_ms) + " ms lies outside the trace");
        }
        const double k = std::floor((t_ms + eps) / dt);
        if (k < 1.0) return 0;
        return std::min(records.size() - 1, static_cast<std::size_t>(k) - 1);
    }

    [[nodiscard]] double voltage(std::string_view net, double t_ms) const {
        return records[record_at(t_ms)].volts[require_net(net)];
    }
};

namespace detail {

struct Pin {
    bool from_input = true;
    std::size_t index = 0;  // into inputs or into node list
};

inline void check_stimulus(const CircuitGraph& g, const Stimulus& s, const SimConfig& cfg) {
    for (const auto& in : g.inputs) {
        if (!s.find(in)) throw Error(ErrorKind::uncovered_input, "stimulus has no waveform for input '" + in + "'");
    }
    if (s.horizon_ms + 1e-9 * cfg.horizon < cfg.horizon) {
        throw Error(ErrorKind::uncovered_input, "stimulus ends before the simulation horizon");
    }
}

}  // namespace detail

/// Runs the circuit, leaving the trained device states in `graph`.
inline Trace simulate_in_place(CircuitGraph& graph, const Stimulus& stimulus, const SimConfig& cfg) {
    validate(cfg);
    detail::check_stimulus(graph, stimulus, cfg);

    const auto order_ids = topological_order(graph);
    std::vector<std::size_t> order;
    order.reserve(order_ids.size());
    for (const int id : order_ids) order.push_back(*graph.index_of(id));

    std::vector<const Waveform*> waves;
    for (const auto& in : graph.inputs) waves.push_back(stimulus.find(in));

    std::vector<std::vector<detail::Pin>> pins(graph.nodes.size());
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        for (const auto& src : graph.nodes[i].sources) {
            if (src.kind == Source::Kind::input) {
                const auto it = std::find(graph.inputs.begin(), graph.inputs.end(), src.input);
                pins[i].push_back({true, static_cast<std::size_t>(it - graph.inputs.begin())});
            } else {
                pins[i].push_back({false, *graph.index_of(src.gate_id)});
            }
        }
    }

    Trace trace;
    trace.dt = cfg.dt;
    trace.nets = graph.inputs;
    for (const auto& p : graph.outputs) trace.nets.push_back(p.name);
    for (const auto& n : graph.nodes) {
        trace.nets.push_back(gate_net(n.id));
        trace.gate_ids.push_back(n.id);
    }
    std::vector<std::size_t> probe_nodes;
    for (const auto& p : graph.outputs) probe_nodes.push_back(*graph.index_of(p.node_id));

    const std::size_t steps = step_count(cfg);
    trace.records.reserve(steps);
    std::vector<double> input_v(graph.inputs.size(), 0.0);
    std::vector<double> gate_v(graph.nodes.size(), 0.0);
    std::vector<double> prev_drive(graph.nodes.size(), 0.0);
    // Whether the net changed discontinuously this step.
    std::vector<char> input_jump(graph.inputs.size(), 0);
    std::vector<char> gate_jump(graph.nodes.size(), 0);
    std::vector<double> pin_v;

    for (std::size_t k = 0; k < steps; ++k) {
        const double t0 = static_cast<double>(k) * cfg.dt;
        for (std::size_t i = 0; i < waves.size(); ++i) {
            const double v = waves[i]->value_at(t0);
            input_jump[i] = k == 0 || v != input_v[i];
            input_v[i] = v;
        }

        for (const std::size_t i : order) {
            pin_v.clear();
            bool jumped = k == 0;
            for (const auto& pin : pins[i]) {
                pin_v.push_back(pin.from_input ? input_v[pin.index] : gate_v[pin.index]);
                jumped = jumped || (pin.from_input ? input_jump[pin.index] : gate_jump[pin.index]);
            }
            auto& gate = graph.nodes[i].gate;
            const GateOutput out = cfg.locate_crossings && !jumped ? advance_ramp(gate, pin_v, prev_drive[i], cfg.dt)
                                                                   : advance(gate, pin_v, cfg.dt);
            prev_drive[i] = out.drive;
            // MNOT output depends on device state only, which is continuous in time.
            gate_jump[i] = jumped && gate.kind != GateKind::mnot;
            gate_v[i] = out.unit == OutputUnit::amperes ? i_to_v(out.value, cfg) : out.value;
        }

        TraceRecord rec;
        rec.t_ms = static_cast<double>(k + 1) * cfg.dt;
        rec.volts.reserve(trace.nets.size());
        rec.volts.insert(rec.volts.end(), input_v.begin(), input_v.end());
        for (const std::size_t i : probe_nodes) rec.volts.push_back(gate_v[i]);
        rec.volts.insert(rec.volts.end(), gate_v.begin(), gate_v.end());
        rec.devices.reserve(graph.nodes.size());
        for (const auto& n : graph.nodes) {
            rec.devices.push_back({model_current(n.gate.state, n.gate.device), n.gate.state.x1, n.gate.state.x2});
        }
        trace.records.push_back(std::move(rec));
    }
    return trace;
}

[[nodiscard]] inline Trace simulate(const CircuitGraph& graph, const Stimulus& stimulus, const SimConfig& cfg) {
    CircuitGraph working = graph;
    return simulate_in_place(working, stimulus, cfg);
}

enum class Logic { zero, one, ambiguous };

[[nodiscard]] constexpr std::string_view to_string(Logic v) noexcept {
    switch (v) {
    case Logic::zero: return "0";
    case Logic::one: return "1";
    case Logic::ambiguous: return "ambiguous";
    }
    return "?";
}

[[nodiscard]] constexpr Logic classify(double volts, const SimConfig& cfg) noexcept {
    if (volts > cfg.threshold_high) return Logic::one;
    if (volts < cfg.threshold_low) return Logic::zero;
    return Logic::ambiguous;
}

[[nodiscard]] inline Logic read_binary(const Trace& trace, std::string_view net, double t_ms, const SimConfig& cfg) {
    return classify(trace.voltage(net, t_ms), cfg);
}

/// Earliest record time >= onset from which the net reads `level` through the end of the trace.
[[nodiscard]] inline std::optional<double> settle_time(const Trace& trace, std::string_view net, Logic level,
                                                       const SimConfig& cfg, double onset_ms = 100.0) {
    const std::size_t col = trace.require_net(net);
    std::optional<double> settled;
    for (auto it = trace.records.rbegin(); it != trace.records.rend(); ++it) {
        if (it->t_ms + 1e-9 < onset_ms) break;
        if (classify(it->volts[col], cfg) != level) break;
        settled = it->t_ms;
    }
    return settled;
}

}  // namespace memlogic
