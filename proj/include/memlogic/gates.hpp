#pragma once

#include "memlogic/device.hpp"
#include "memlogic/error.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace memlogic {

enum class GateKind { mor, mand, mnot };

[[nodiscard]] constexpr std::string_view to_string(GateKind kind) noexcept {
    switch (kind) {
    case GateKind::mor: return "MOR";
    case GateKind::mand: return "MAND";
    case GateKind::mnot: return "MNOT";
    }
    return "?";
}

[[nodiscard]] inline std::optional<GateKind> parse_gate_kind(std::string_view text) noexcept {
    if (text == "MOR") return GateKind::mor;
    if (text == "MAND") return GateKind::mand;
    if (text == "MNOT") return GateKind::mnot;
    return std::nullopt;
}

[[nodiscard]] constexpr std::size_t arity(GateKind kind) noexcept { return kind == GateKind::mnot ? 1 : 2; }

/// Resistor divider and bias of the inverter. Unused by MOR and MAND.
struct MnotParams {
    double r1 = 1e6;         // ohm
    double r2 = 1e7;         // ohm
    double v_con = 0.3;      // V, constant external bias
    double v_rail = 0.6;     // V, buffered logic-high the divider ratio is scaled to
    double r_off_cap = 1e9;  // ohm, resistance reported for a non-conducting device

    bool operator==(const MnotParams&) const = default;
};

struct GateInstance {
    GateKind kind = GateKind::mor;
    MemristorState state{};
    DeviceParams device{};
    MnotParams mnot{};

    bool operator==(const GateInstance&) const = default;
};

inline void validate(const GateInstance& g) {
    validate(g.device);
    if (g.kind != GateKind::mnot) return;
    auto fail = [](const std::string& what) { throw Error(ErrorKind::validation, "MNOT: " + what); };
    const auto& m = g.mnot;
    if (!(m.r1 > 0.0 && m.r1 < m.r2)) fail("r1 must be positive and below r2");
    if (!(m.r2 > on_resistance(g.device) && m.r2 < m.r_off_cap)) {
        fail("r2 must lie strictly between the device on- and off-resistance");
    }
    if (!(m.v_con < g.device.v_ox)) fail("v_con must stay below the oxidation potential");
    if (!(m.v_rail > 0.0)) fail("v_rail must be positive");
}

[[nodiscard]] inline GateInstance make_gate(GateKind kind, const DeviceParams& device = {}, const MnotParams& mnot = {}) {
    GateInstance g{kind, new_state(1.0), device, mnot};
    validate(g);
    return g;
}

/// Both inputs drive the same electrode; either one alone is enough to potentiate.
[[nodiscard]] constexpr double mor_effective_voltage(double v_in1, double v_in2) noexcept { return std::max(v_in1, v_in2); }

/// Summator followed by a halving divider.
[[nodiscard]] constexpr double mand_effective_voltage(double v_in1, double v_in2) noexcept { return (v_in1 + v_in2) / 2.0; }

enum class OutputUnit { amperes, volts };

struct GateOutput {
    double value = 0.0;
    OutputUnit unit = OutputUnit::amperes;
    double drive = 0.0;  // voltage seen by the memristor this step
};

/// Resistance of the MNOT memristor, capped at the off-resistance.
[[nodiscard]] inline double mnot_resistance(const GateInstance& g) noexcept {
    const double gm = conductance(g.state, g.device);
    if (!(gm > 0.0)) return g.mnot.r_off_cap;
    return std::min(1.0 / gm, g.mnot.r_off_cap);
}

/// R_M / (R1 + R2 + R_M), in (0, 1].
[[nodiscard]] inline double mnot_ratio(const GateInstance& g) noexcept {
    const double rm = mnot_resistance(g);
    return rm / (g.mnot.r1 + g.mnot.r2 + rm);
}

/// Output of the gate in its current state for a given drive voltage,
/// without advancing the device.
[[nodiscard]] inline GateOutput gate_output(const GateInstance& g, double drive) noexcept {
    if (g.kind == GateKind::mnot) return {g.mnot.v_rail * mnot_ratio(g), OutputUnit::volts, drive};
    return {device_current(g.state, g.device, drive), OutputUnit::amperes, drive};
}

[[nodiscard]] inline double drive_voltage(GateKind kind, std::span<const double> inputs) {
    if (inputs.size() != arity(kind)) {
        throw Error(ErrorKind::arity, std::string(to_string(kind)) + " expects " + std::to_string(arity(kind)) +
                                          " input(s), got " + std::to_string(inputs.size()));
    }
    switch (kind) {
    case GateKind::mor: return mor_effective_voltage(inputs[0], inputs[1]);
    case GateKind::mand: return mand_effective_voltage(inputs[0], inputs[1]);
    case GateKind::mnot: return inputs[0];
    }
    return 0.0;
}

/// In-place form of gate_step used by the engine loop.
inline GateOutput advance(GateInstance& g, std::span<const double> inputs, double dt) {
    const double drive = drive_voltage(g.kind, inputs);
    g.state = step(g.state, g.device, drive, dt);
    return gate_output(g, drive);
}

/// As advance(), with the drive taken to ramp linearly from the previous step's drive.
inline GateOutput advance_ramp(GateInstance& g, std::span<const double> inputs, double previous_drive, double dt) {
    const double drive = drive_voltage(g.kind, inputs);
    g.state = step_ramp(g.state, g.device, previous_drive, drive, dt);
    return gate_output(g, drive);
}

struct GateStepResult {
    GateInstance gate;
    GateOutput output;
};

/// MOR/MAND report the device current under the drive voltage (amperes);
/// MNOT reports the rail-scaled divider voltage (volts).
[[nodiscard]] inline GateStepResult gate_step(GateInstance gate, std::span<const double> inputs, double dt) {
    const GateOutput out = advance(gate, inputs, dt);
    return {gate, out};
}

/// Output current normalized to the saturated current; in [0, 1] for valid params.
[[nodiscard]] inline double normalized_output(const GateInstance& g) {
    if (g.kind == GateKind::mnot) throw Error(ErrorKind::validation, "normalized_output is defined for MOR and MAND only");
    return model_current(g.state, g.device) / g.device.c;
}

}  // namespace memlogic
