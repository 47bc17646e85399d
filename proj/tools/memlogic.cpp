#include "memlogic/memlogic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace memlogic;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failed_verdict = 1;
constexpr int exit_usage = 2;

/// A located failure in one input file.
struct FileError {
    std::string path;
    ParseError error;
};

std::string fixture_dir() {
    if (const char* env = std::getenv("MEMLOGIC_FIXTURES"); env && *env) return env;
    return MEMLOGIC_DEFAULT_FIXTURES;
}

/// Paths that do not exist as given are looked up in the fixture directory.
std::string resolve(const std::string& path) {
    if (fs::exists(path)) return path;
    const fs::path candidate = fs::path(fixture_dir()) / path;
    if (fs::path(path).is_relative() && fs::exists(candidate)) return candidate.string();
    return path;
}

struct Loaded {
    std::string path;
    std::string text;
};

Loaded load(const std::string& path) {
    const std::string p = resolve(path);
    return {p, read_file(p)};
}

CircuitGraph load_circuit(const Loaded& f, const GateDefaults& defaults) {
    try {
        return parse_circuit(f.text, defaults);
    } catch (const ParseError& e) {
        throw FileError{f.path, e};
    }
}

Stimulus load_stimulus(const Loaded& f, const CircuitGraph* graph) {
    try {
        return graph ? parse_stimulus(f.text, *graph) : parse_stimulus(f.text);
    } catch (const ParseError& e) {
        throw FileError{f.path, e};
    }
}

struct Options {
    SimConfig cfg;
    std::optional<double> vox;
    std::optional<double> vred;
    std::string out;

    [[nodiscard]] GateDefaults defaults() const {
        GateDefaults d;
        if (vox) d.device.v_ox = *vox;
        if (vred) d.device.v_red = *vred;
        validate(d.device);
        return d;
    }
};

void add_sim_flags(CLI::App& cmd, Options& o) {
    cmd.add_option("--dt", o.cfg.dt, "Time step in ms")->capture_default_str();
    cmd.add_option("--horizon", o.cfg.horizon, "Simulated time in ms")->capture_default_str();
    cmd.add_option("--b", o.cfg.b, "Current-to-voltage factor in ohm")->capture_default_str();
    cmd.add_option("--vox", o.vox, "Oxidation (potentiation) threshold in V");
    cmd.add_option("--vred", o.vred, "Reduction (depression) threshold in V");
}

/// Writes the trace to `out` (stdout when empty) and a metadata sidecar next to it.
void emit_trace(const Trace& trace, const Options& o, const GateDefaults& d, const std::vector<FixtureInfo>& fixtures) {
    if (o.out.empty() || o.out == "-") {
        write_csv(trace, std::cout);
        return;
    }
    {
        std::ofstream csv(o.out, std::ios::binary);
        if (!csv) throw Error(ErrorKind::validation, "cannot write '" + o.out + "'");
        write_csv(trace, csv);
    }
    std::ofstream meta(o.out + ".meta.json", std::ios::binary);
    meta << run_metadata(o.cfg, d.device, trace, fixtures).dump(2) << '\n';
}

int cmd_run(const Options& o, const std::string& circuit_path, const std::string& stimulus_path) {
    const GateDefaults d = o.defaults();
    validate(o.cfg);
    const Loaded cf = load(circuit_path);
    const Loaded sf = load(stimulus_path);
    const CircuitGraph g = load_circuit(cf, d);
    const Stimulus s = load_stimulus(sf, &g);
    const Trace trace = simulate(g, s, o.cfg);
    emit_trace(trace, o, d, {{"circuit", cf.path, cf.text}, {"stimulus", sf.path, sf.text}});
    return exit_ok;
}

int cmd_adder(const Options& o, const std::string& circuit_path) {
    const GateDefaults d = o.defaults();
    validate(o.cfg);
    const Loaded cf = load(circuit_path);
    const CircuitGraph g = load_circuit(cf, d);
    std::vector<Verdict> verdicts;
    for (const char* bits : {"010", "101"}) {
        const Pattern p = *parse_pattern(bits);
        const Loaded sf = load(std::string("pattern_") + bits + ".mls");
        Experiment e{"adder_" + p.label(), g, load_stimulus(sf, &g), adder_checks(g, p, o.cfg)};
        const auto r = run_experiment(std::move(e), o.cfg);
        verdicts.insert(verdicts.end(), r.verdicts.begin(), r.verdicts.end());
        if (!o.out.empty()) {
            Options per = o;
            const fs::path base(o.out);
            per.out = (base.parent_path() / (base.stem().string() + "_" + bits + base.extension().string())).string();
            emit_trace(r.trace, per, d, {{"circuit", cf.path, cf.text}, {"stimulus", sf.path, sf.text}});
        }
    }
    std::cout << to_json(verdicts).dump(2) << '\n';
    const bool all = std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
    return all ? exit_ok : exit_failed_verdict;
}

int cmd_characterize(const Options& o, const std::string& kind_text, const std::string& stimulus_path) {
    const GateDefaults d = o.defaults();
    validate(o.cfg);
    const auto kind = parse_gate_kind(kind_text);
    if (!kind) throw Error(ErrorKind::validation, "unknown gate kind '" + kind_text + "' (expected MOR, MAND or MNOT)");
    const CircuitGraph g = single_gate_circuit(*kind, d);
    std::vector<FixtureInfo> fixtures;
    Stimulus schedule;
    if (stimulus_path.empty()) {
        schedule = default_schedule(*kind, o.cfg);
    } else {
        const Loaded sf = load(stimulus_path);
        schedule = load_stimulus(sf, &g);
        fixtures.push_back({"stimulus", sf.path, sf.text});
    }
    emit_trace(simulate(g, schedule, o.cfg), o, d, fixtures);
    return exit_ok;
}

int cmd_check(const Options& o, const std::string& circuit_path, const std::string& stimulus_path) {
    const GateDefaults d = o.defaults();
    std::optional<CircuitGraph> g;
    if (!circuit_path.empty()) {
        const Loaded cf = load(circuit_path);
        g = load_circuit(cf, d);
        std::cout << cf.path << ": ok, " << g->inputs.size() << " inputs, " << g->nodes.size() << " gates, "
                  << g->outputs.size() << " outputs\n";
    }
    if (!stimulus_path.empty()) {
        const Loaded sf = load(stimulus_path);
        const Stimulus s = load_stimulus(sf, g ? &*g : nullptr);
        std::cout << sf.path << ": ok, " << s.waveforms.size() << " terminals, horizon " << s.horizon_ms << " ms\n";
    }
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-stepped simulator for memristive logic gates"};
    app.require_subcommand(1, 1);

    Options opt;
    std::string circuit;
    std::string stimulus;
    std::string gate;

    auto* run = app.add_subcommand("run", "Simulate a netlist under a stimulus and write the trace CSV");
    run->add_option("--circuit", circuit, "Netlist file (.mlc)")->required();
    run->add_option("--stimulus", stimulus, "Stimulus file (.mls)")->required();
    run->add_option("--out", opt.out, "Trace CSV path (stdout when omitted)");
    add_sim_flags(*run, opt);

    auto* adder = app.add_subcommand("adder", "Run the 010 and 101 full-adder experiments and print JSON verdicts");
    std::string adder_circuit = "adder.mlc";
    adder->add_option("--circuit", adder_circuit, "Adder netlist")->capture_default_str();
    adder->add_option("--out", opt.out, "Trace CSV path; the pattern is appended to the file name");
    add_sim_flags(*adder, opt);

    auto* characterize = app.add_subcommand("characterize", "Drive a single gate with a test schedule and write the trace CSV");
    characterize->add_option("--gate", gate, "MOR, MAND or MNOT")->required();
    characterize->add_option("--stimulus", stimulus, "Schedule file (built-in schedule when omitted)");
    characterize->add_option("--out", opt.out, "Trace CSV path (stdout when omitted)");
    add_sim_flags(*characterize, opt);

    auto* check = app.add_subcommand("check", "Parse and validate fixtures without simulating");
    check->add_option("--circuit", circuit, "Netlist file");
    check->add_option("--stimulus", stimulus, "Stimulus file");
    add_sim_flags(*check, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*run) return cmd_run(opt, circuit, stimulus);
        if (*adder) return cmd_adder(opt, adder_circuit);
        if (*characterize) return cmd_characterize(opt, gate, stimulus);
        if (circuit.empty() && stimulus.empty()) {
            std::cerr << "memlogic: check needs --circuit and/or --stimulus\n";
            return exit_usage;
        }
        return cmd_check(opt, circuit, stimulus);
    } catch (const FileError& f) {
        std::cerr << f.path << ":" << f.error.diagnostic() << '\n';
    } catch (const Error& e) {
        std::cerr << "memlogic: error[" << to_string(e.kind()) << "]: " << e.what() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "memlogic: error: " << e.what() << '\n';
    }
    return exit_usage;
}
