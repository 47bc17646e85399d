#include "memlogic/gates.hpp"
#include "oracle.hpp"

#include <catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <random>
#include <vector>

using namespace memlogic;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

/// Drives a gate with a per-millisecond schedule of input pairs.
GateInstance drive(GateInstance g, const std::vector<std::array<double, 2>>& schedule, double dt = 1.0) {
    for (const auto& in : schedule) g = gate_step(g, in, dt).gate;
    return g;
}

std::vector<std::array<double, 2>> repeat(std::array<double, 2> v, int n) { return std::vector<std::array<double, 2>>(n, v); }

template <typename... Parts>
std::vector<std::array<double, 2>> concat(const Parts&... parts) {
    std::vector<std::array<double, 2>> out;
    out.reserve((parts.size() + ...));
    (out.insert(out.end(), parts.begin(), parts.end()), ...);
    return out;
}

}  // namespace

TEST_CASE("gate kinds and arity", "[gates]") {
    CHECK(arity(GateKind::mor) == 2);
    CHECK(arity(GateKind::mand) == 2);
    CHECK(arity(GateKind::mnot) == 1);
    CHECK(parse_gate_kind("MAND") == GateKind::mand);
    CHECK_FALSE(parse_gate_kind("mand").has_value());
    CHECK(to_string(GateKind::mnot) == "MNOT");
}

TEST_CASE("effective input voltages", "[gates]") {
    CHECK(mor_effective_voltage(0.6, 0.1) == 0.6);
    CHECK(mor_effective_voltage(0.1, 0.1) == 0.1);
    CHECK(mor_effective_voltage(0.6, 0.6) == 0.6);
    CHECK_THAT(mand_effective_voltage(0.6, 0.6), WithinAbs(0.6, 1e-15));
    CHECK_THAT(mand_effective_voltage(0.6, 0.1), WithinAbs(0.35, 1e-15));
    CHECK_THAT(mand_effective_voltage(0.1, 0.1), WithinAbs(0.1, 1e-15));
    const DeviceParams p{};
    CHECK(regime(p, mand_effective_voltage(0.6, 0.6)) == Regime::potentiation);
    CHECK(regime(p, mand_effective_voltage(0.6, 0.1)) == Regime::hold);
}

TEST_CASE("gate_step validates arity", "[gates]") {
    const auto mor = make_gate(GateKind::mor);
    const auto mnot = make_gate(GateKind::mnot);
    const std::array<double, 1> one{0.6};
    const std::array<double, 3> three{0.6, 0.6, 0.6};
    const std::array<double, 2> two{0.6, 0.6};
    CHECK_THROWS_AS(gate_step(mor, one, 1.0), Error);
    CHECK_THROWS_AS(gate_step(mor, three, 1.0), Error);
    CHECK_THROWS_AS(gate_step(mnot, two, 1.0), Error);
    try {
        (void)gate_step(mnot, two, 1.0);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::arity);
    }
}

TEST_CASE("MOR output follows the closed form when one input is held high", "[gates]") {
    auto g = make_gate(GateKind::mor);
    GateOutput out;
    for (int i = 0; i < 300; ++i) {
        auto r = gate_step(g, std::array{0.6, 0.1}, 1.0);
        g = r.gate;
        out = r.output;
    }
    CHECK(out.unit == OutputUnit::amperes);
    CHECK_THAT(oracle::eq1_current(300.0), WithinRel(3.63198435904e-7, 1e-10));
    CHECK_THAT(out.value, WithinRel(3.63198435904e-7, 1e-12));
}

TEST_CASE("MAND with a single active input never changes", "[gates]") {
    auto g = make_gate(GateKind::mand);
    for (int i = 0; i < 1000; ++i) {
        const auto r = gate_step(g, std::array{i % 2 ? 0.6 : 0.1, i % 2 ? 0.1 : 0.6}, 1.0);
        REQUIRE_THAT(r.output.value, WithinAbs(0.0, 1e-22));
        g = r.gate;
    }
    CHECK(g.state == new_state(1.0));
}

TEST_CASE("MNOT divider output", "[gates]") {
    auto g = make_gate(GateKind::mnot);
    SECTION("fresh device sits near the rail") {
        const auto out = gate_output(g, 0.1);
        CHECK(out.unit == OutputUnit::volts);
        CHECK(mnot_resistance(g) == 1e9);
        CHECK_THAT(out.value, WithinRel(0.593471810089, 1e-10));
        CHECK(out.value >= 0.98 * g.mnot.v_rail);
    }
    SECTION("saturated device at on-resistance") {
        g.state = new_state(0.0);
        CHECK_THAT(mnot_resistance(g), WithinRel(1.5e6, 1e-12));
        CHECK_THAT(mnot_ratio(g), WithinRel(0.12, 1e-12));
        CHECK_THAT(gate_output(g, 0.1).value, WithinRel(0.072, 1e-12));
    }
    SECTION("300 ms of input lands in the reported floor band") {
        for (int i = 0; i < 300; ++i) g = gate_step(g, std::array{0.6}, 1.0).gate;
        const double v = gate_output(g, 0.1).value;
        CHECK_THAT(v, WithinRel(oracle::mnot_after(300.0), 1e-12));
        CHECK_THAT(v, WithinRel(0.0783429117110, 1e-10));
    }
}

TEST_CASE("MNOT parameter invariants", "[gates]") {
    MnotParams m;
    m.r1 = 2e7;
    CHECK_THROWS_AS(make_gate(GateKind::mnot, {}, m), Error);
    m = {};
    m.r2 = 1e6;  // below on-resistance
    m.r1 = 1e5;
    CHECK_THROWS_AS(make_gate(GateKind::mnot, {}, m), Error);
    m = {};
    m.r2 = 2e9;
    CHECK_THROWS_AS(make_gate(GateKind::mnot, {}, m), Error);
    m = {};
    m.v_con = 0.5;
    CHECK_THROWS_AS(make_gate(GateKind::mnot, {}, m), Error);
    // MOR/MAND ignore the divider parameters.
    CHECK_NOTHROW(make_gate(GateKind::mor, {}, m));
}

TEST_CASE("normalized output", "[gates]") {
    auto g = make_gate(GateKind::mor);
    CHECK_THAT(normalized_output(g), WithinAbs(0.0, 1e-15));
    g.state = new_state(0.0);
    CHECK(normalized_output(g) == 1.0);
    g.state = {std::exp(-1.0), std::exp(-0.1)};
    CHECK_THAT(normalized_output(g), WithinRel(0.497881064612, 1e-10));
    CHECK_THROWS_AS(normalized_output(make_gate(GateKind::mnot)), Error);
}

TEST_CASE("MOR duration law: only total active time matters", "[gates][property]") {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> len(1, 60);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::array<double, 2>> sched;
        int active = 0;
        for (int seg = 0; seg < 8; ++seg) {
            const int n = len(rng);
            const int which = static_cast<int>(rng() % 4);  // idle, IN1, IN2, both
            const std::array<double, 2> v{which == 1 || which == 3 ? 0.6 : 0.1, which >= 2 ? 0.6 : 0.1};
            if (which != 0) active += n;
            const auto part = repeat(v, n);
            sched.insert(sched.end(), part.begin(), part.end());
        }
        const auto split = drive(make_gate(GateKind::mor), sched);
        const auto contiguous = drive(make_gate(GateKind::mor), repeat({0.6, 0.1}, active));
        if (active == 0) {
            CHECK(split.state == contiguous.state);
        } else {
            CHECK_THAT(normalized_output(split), WithinRel(normalized_output(contiguous), 1e-12));
        }
    }
}

TEST_CASE("MAND coincidence law: only overlap time matters", "[gates][property]") {
    const auto idle = repeat({0.1, 0.1}, 20);
    const auto a_only = repeat({0.6, 0.1}, 35);
    const auto b_only = repeat({0.1, 0.6}, 40);
    const auto both = repeat({0.6, 0.6}, 50);

    const auto no_overlap = drive(make_gate(GateKind::mand), concat(a_only, idle, b_only, a_only, b_only));
    CHECK(no_overlap.state == new_state(1.0));

    const auto interleaved = drive(make_gate(GateKind::mand), concat(a_only, both, b_only, both, idle, both));
    const auto contiguous = drive(make_gate(GateKind::mand), repeat({0.6, 0.6}, 150));
    CHECK_THAT(normalized_output(interleaved), WithinRel(normalized_output(contiguous), 1e-12));
}

TEST_CASE("MNOT inversion and inhibition depth", "[gates][property]") {
    // Output strictly decreases as conductance grows.
    auto g = make_gate(GateKind::mnot);
    double prev = gate_output(g, 0.0).value;
    for (double x = 0.99; x >= 0.0; x -= 0.01) {
        g.state = new_state(std::max(x, 0.0));
        const double v = gate_output(g, 0.0).value;
        REQUIRE(v < prev);
        REQUIRE(mnot_ratio(g) > 0.0);
        REQUIRE(mnot_ratio(g) <= 1.0);
        prev = v;
    }
    // Longer pulses leave a lower output afterwards.
    double last = 1.0;
    for (int pulse : {1, 5, 20, 60, 150, 300}) {
        auto m = make_gate(GateKind::mnot);
        for (int i = 0; i < pulse; ++i) m = gate_step(m, std::array{0.6}, 1.0).gate;
        for (int i = 0; i < 50; ++i) m = gate_step(m, std::array{0.1}, 1.0).gate;
        const double v = gate_output(m, 0.1).value;
        CHECK(v < last);
        last = v;
    }
}
