#pragma once

// Lumped model of one organic memristive device.
//
// Under constant supra-threshold bias the device current follows a
// double-exponential relaxation toward saturation,
//
//     I(t) = a1 exp(-t/t1) + a2 exp(-t/t2) + c,
//
// which is carried here as two relaxation coordinates x1, x2 in [0, 1]
// (x_i = exp(-t/t_i) after uninterrupted potentiation from the fresh state).
// The update is the exact solution of the first-order system for one step,
// so stepping accumulates only rounding error.

#include "memlogic/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>

namespace memlogic {

struct DeviceParams {
    double a1 = -3e-7;   // A, fast term amplitude
    double a2 = -1e-7;   // A, slow term amplitude
    double t1 = 30.0;    // ms
    double t2 = 300.0;   // ms
    double c = 4e-7;     // A, saturation current at v_ref
    double v_ox = 0.5;   // V
    double v_red = -0.1; // V
    double v_ref = 0.6;  // V
    double t1_dep = 30.0;
    double t2_dep = 300.0;

    bool operator==(const DeviceParams&) const = default;
};

inline void validate(const DeviceParams& p) {
    auto fail = [](const std::string& what) { throw Error(ErrorKind::validation, "device params: " + what); };
    if (!(p.t1 > 0.0 && p.t2 > 0.0 && p.t1_dep > 0.0 && p.t2_dep > 0.0)) fail("time constants must be positive");
    if (!(p.v_red < p.v_ox)) fail("v_red must be below v_ox");
    if (!(p.c > 0.0)) fail("c must be positive");
    if (!(p.a1 <= 0.0 && p.a2 <= 0.0)) fail("a1 and a2 must be non-positive");
    if (!(p.a1 + p.a2 + p.c >= 0.0)) fail("initial current a1 + a2 + c must be non-negative");
    if (!(p.v_ref > p.v_ox)) fail("v_ref must exceed v_ox");
}

/// Nonvolatile state. (1, 1) is the fresh insulating device, (0, 0) saturation.
struct MemristorState {
    double x1 = 1.0;
    double x2 = 1.0;

    bool operator==(const MemristorState&) const = default;
};

enum class Regime { potentiation, hold, depression };

[[nodiscard]] inline MemristorState new_state(double initial = 1.0) {
    if (!(initial >= 0.0 && initial <= 1.0)) {
        throw Error(ErrorKind::validation, "initial insulation fraction must lie in [0, 1]");
    }
    return {initial, initial};
}

/// Closed regime boundaries: v == v_ox potentiates, v == v_red depresses.
[[nodiscard]] inline Regime regime(const DeviceParams& p, double v_applied) noexcept {
    if (v_applied >= p.v_ox) return Regime::potentiation;
    if (v_applied <= p.v_red) return Regime::depression;
    return Regime::hold;
}

/// Current at the reference bias.
[[nodiscard]] inline double model_current(const MemristorState& s, const DeviceParams& p) noexcept {
    return p.a1 * s.x1 + p.a2 * s.x2 + p.c;
}

[[nodiscard]] inline double conductance(const MemristorState& s, const DeviceParams& p) noexcept {
    return model_current(s, p) / p.v_ref;
}

/// Ohmic readout; never changes the state.
[[nodiscard]] inline double device_current(const MemristorState& s, const DeviceParams& p, double v_applied) noexcept {
    return conductance(s, p) * v_applied;
}

[[nodiscard]] inline MemristorState step(MemristorState s, const DeviceParams& p, double v_applied, double dt) {
    if (!(dt > 0.0)) throw Error(ErrorKind::validation, "dt must be positive");
    switch (regime(p, v_applied)) {
    case Regime::potentiation:
        s.x1 *= std::exp(-dt / p.t1);
        s.x2 *= std::exp(-dt / p.t2);
        break;
    case Regime::depression:
        s.x1 = 1.0 - (1.0 - s.x1) * std::exp(-dt / p.t1_dep);
        s.x2 = 1.0 - (1.0 - s.x2) * std::exp(-dt / p.t2_dep);
        break;
    case Regime::hold:
        break;
    }
    return s;
}

/// Step under a bias that ramps linearly from v_begin to v_end over dt.
/// The step is split where the ramp crosses v_ox or v_red and each piece is
/// advanced exactly in its own regime. With v_begin == v_end this is step().
[[nodiscard]] inline MemristorState step_ramp(MemristorState s, const DeviceParams& p, double v_begin, double v_end, double dt) {
    if (!(dt > 0.0)) throw Error(ErrorKind::validation, "dt must be positive");
    if (v_begin == v_end) return step(s, p, v_end, dt);
    std::array<double, 4> cuts{0.0, 1.0, 1.0, 1.0};
    std::size_t n = 1;
    for (const double thr : {p.v_ox, p.v_red}) {
        const double f = (thr - v_begin) / (v_end - v_begin);
        if (f > 0.0 && f < 1.0) cuts[n++] = f;
    }
    cuts[n++] = 1.0;
    std::sort(cuts.begin(), cuts.begin() + static_cast<std::ptrdiff_t>(n));
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double span = cuts[i + 1] - cuts[i];
        if (!(span > 0.0)) continue;
        const double mid = v_begin + (v_end - v_begin) * (cuts[i] + cuts[i + 1]) / 2.0;
        s = step(s, p, mid, span * dt);
    }
    return s;
}

/// Equivalent to a negative bias held for much longer than t2_dep.
[[nodiscard]] inline MemristorState reset(const MemristorState&, const DeviceParams&) noexcept {
    return {1.0, 1.0};
}

/// Saturated resistance v_ref / c.
[[nodiscard]] inline double on_resistance(const DeviceParams& p) noexcept { return p.v_ref / p.c; }

}  // namespace memlogic
