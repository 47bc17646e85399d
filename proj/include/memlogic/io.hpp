#pragma once

#include "memlogic/engine.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <ostream>
#include <string>
#include <string_view>

namespace memlogic {

/// 64-bit FNV-1a, used to fingerprint fixtures in run metadata.
[[nodiscard]] constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

[[nodiscard]] inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

namespace detail {

inline void put_sci(std::string& line, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.8e", v);
    line += buf;
}

}  // namespace detail

/// Header `t_ms,<net>...,g<id>_I,g<id>_x1,g<id>_x2...`; one row per record.
inline void write_csv(const Trace& trace, std::ostream& os) {
    std::string line = "t_ms";
    for (const auto& n : trace.nets) line += "," + n;
    for (const int id : trace.gate_ids) {
        const std::string g = gate_net(id);
        line += "," + g + "_I," + g + "_x1," + g + "_x2";
    }
    os << line << '\n';
    char tbuf[32];
    for (const auto& rec : trace.records) {
        std::snprintf(tbuf, sizeof tbuf, "%.9g", rec.t_ms);
        line = tbuf;
        for (const double v : rec.volts) {
            line += ',';
            detail::put_sci(line, v);
        }
        for (const auto& d : rec.devices) {
            line += ',';
            detail::put_sci(line, d.current);
            line += ',';
            detail::put_sci(line, d.x1);
            line += ',';
            detail::put_sci(line, d.x2);
        }
        os << line << '\n';
    }
}

[[nodiscard]] inline nlohmann::json to_json(const SimConfig& c) {
    return {{"dt_ms", c.dt},
            {"horizon_ms", c.horizon},
            {"b_ohm", c.b},
            {"v_logic1", c.v_logic1},
            {"v_logic0", c.v_logic0},
            {"threshold_low", c.threshold_low},
            {"threshold_high", c.threshold_high}};
}

[[nodiscard]] inline nlohmann::json to_json(const DeviceParams& p) {
    return {{"a1", p.a1},   {"a2", p.a2},       {"t1_ms", p.t1},        {"t2_ms", p.t2},
            {"c", p.c},     {"v_ox", p.v_ox},   {"v_red", p.v_red},     {"v_ref", p.v_ref},
            {"t1_dep_ms", p.t1_dep}, {"t2_dep_ms", p.t2_dep}};
}

struct FixtureInfo {
    std::string role;  // "circuit", "stimulus"
    std::string path;
    std::string contents;
};

/// Sidecar describing a run: configuration echo and fixture fingerprints.
[[nodiscard]] inline nlohmann::json run_metadata(const SimConfig& cfg, const DeviceParams& device, const Trace& trace,
                                                 const std::vector<FixtureInfo>& fixtures) {
    nlohmann::json fx = nlohmann::json::object();
    for (const auto& f : fixtures) {
        fx[f.role] = {{"path", f.path}, {"fnv1a64", hex64(fnv1a64(f.contents))}, {"bytes", f.contents.size()}};
    }
    return {{"format", std::string(format_tag)},
            {"config", to_json(cfg)},
            {"device", to_json(device)},
            {"records", trace.records.size()},
            {"nets", trace.nets},
            {"fixtures", fx}};
}

[[nodiscard]] inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::validation, "cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace memlogic
