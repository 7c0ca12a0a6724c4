// Command-line front end: single-run, temptation sweep, T-L phase plane,
// snapshot dump, and the built-in selftest.
//
// Every output bundle carries a fully resolved config.json plus a
// manifest.json whose recorded command (re-run from the original working
// directory) regenerates the bundle byte for byte.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pdpa/dynamics.hpp"
#include "pdpa/experiments.hpp"
#include "pdpa/io.hpp"
#include "pdpa/selfcheck.hpp"
#include "pdpa/version.hpp"

namespace fs = std::filesystem;
using namespace pdpa;

namespace {

// Quote for /bin/sh unless the token is plainly safe.
std::string shq(const std::string& s) {
    const std::string safe = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
                             "_-./:,x=";
    bool plain = !s.empty();
    for (char c : s)
        if (safe.find(c) == std::string::npos) plain = false;
    if (plain) return s;
    std::string out = "'";
    for (char c : s) {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    out += "'";
    return out;
}

std::vector<std::int64_t> parse_step_list(const std::string& text) {
    std::vector<std::int64_t> steps;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            steps.push_back(std::stoll(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad step list entry '" + item + "'");
        }
    }
    if (steps.empty()) throw std::invalid_argument("empty step list");
    return steps;
}

nlohmann::json load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read config file: " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config file " + path + ": " + e.what());
    }
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

void write_config_json(const nlohmann::json& config, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << config.dump(2) << '\n';
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

// The reproduction command: re-reads the bundle's own resolved config, so
// it never depends on flag defaults staying put.
std::string bundle_command(const std::string& sub, const std::string& out_dir) {
    const std::string config_path = (fs::path(out_dir) / "config.json").string();
    return std::string(kArtifactName) + " " + sub + " --config " + shq(config_path) + " --out " +
           shq(out_dir);
}

void finish_bundle(const std::string& sub, const std::string& out_dir,
                   const nlohmann::json& config, std::vector<std::string> outputs) {
    write_config_json(config, fs::path(out_dir) / "config.json");
    outputs.insert(outputs.begin(), "config.json");
    Manifest manifest;
    manifest.command = bundle_command(sub, out_dir);
    manifest.config = config;
    manifest.outputs = std::move(outputs);
    write_manifest(manifest, fs::path(out_dir) / "manifest.json");
}

ProgressFn stderr_progress() {
    return [](int done, int total) {
        std::fprintf(stderr, "\rcells %d/%d", done, total);
        if (done == total) std::fprintf(stderr, "\n");
    };
}

// Flag storage shared by the run-like and sweep-like subcommands. Values
// here are only defaults for display; the resolved config is assembled in
// the handlers from config file plus explicitly passed flags.
struct Flags {
    std::string size = "102x102";
    std::int64_t steps = 100000;
    std::string rule = "sync";
    std::string scheme = "pdpa";
    std::string schemes = "pd;opd;pdpa"; // ';' so custom:w0,...,w8 entries stay whole
    std::string rules = "sync;async";
    double T = 1.4;
    double L = 0.4;
    double K = 0.1;
    double t_min = 1.0, t_max = 2.0, t_step = 0.05;
    double l_min = 0.0, l_max = 1.0, l_step = 0.05;
    int replicates = 100;
    std::uint64_t seed = 1;
    std::string sampling = "dense-early";
    std::string snapshot_steps;
    std::string out = "out";
    std::string config;
    bool strict = false;
    bool sweep_mode = false;
    bool quick = false;
};

void add_common_run_flags(CLI::App* sub, Flags& f) {
    sub->add_option("--size", f.size, "Lattice size, W or WxH")->capture_default_str();
    sub->add_option("--steps", f.steps, "Monte Carlo steps")->capture_default_str();
    sub->add_option("--rule", f.rule, "Update rule: sync or async")->capture_default_str();
    sub->add_option("--scheme", f.scheme, "Init scheme: pd, opd, pdpa, or custom:w0,...,w8")
        ->capture_default_str();
    sub->add_option("--T", f.T, "Temptation payoff")->capture_default_str();
    sub->add_option("--L", f.L, "Loner's payoff")->capture_default_str();
    sub->add_option("--K", f.K, "Fermi noise amplitude")->capture_default_str();
    sub->add_option("--seed", f.seed, "RNG seed")->capture_default_str();
    sub->add_option("--sampling", f.sampling, "Recording schedule: dense-early, every-k:<k>, all")
        ->capture_default_str();
    sub->add_option("--snapshot-steps", f.snapshot_steps, "Comma-separated snapshot steps");
    sub->add_option("--out", f.out, "Output directory")->capture_default_str();
    sub->add_option("--config", f.config, "JSON config file (flags override file values)")
        ->check(CLI::ExistingFile);
    sub->add_flag("--strict", f.strict, "Enforce open ranges 1 < T < 2, 0 < L < 1");
    sub->add_flag("--sweep-mode", f.sweep_mode, "Admit closed endpoints with a warning");
}

ValidationMode resolve_mode(const CLI::App* sub, const Flags& f, ValidationMode fallback) {
    if (f.strict && f.sweep_mode)
        throw std::invalid_argument("--strict and --sweep-mode are mutually exclusive");
    if (sub->count("--strict")) return ValidationMode::Strict;
    if (sub->count("--sweep-mode")) return ValidationMode::Sweep;
    return fallback;
}

RunConfig resolve_run_config(const CLI::App* sub, const Flags& f, ValidationMode default_mode) {
    RunConfig cfg;
    cfg.mode = default_mode;
    if (sub->count("--config")) apply_json(cfg, load_config_file(f.config));
    if (sub->count("--size")) cfg.lattice = parse_size(f.size);
    if (sub->count("--steps")) cfg.step_count = f.steps;
    if (sub->count("--rule")) cfg.rule = parse_rule(f.rule);
    if (sub->count("--scheme")) cfg.scheme = parse_scheme(f.scheme);
    if (sub->count("--T")) cfg.game.T = f.T;
    if (sub->count("--L")) cfg.game.L = f.L;
    if (sub->count("--K")) cfg.game.K = f.K;
    if (sub->count("--seed")) cfg.seed = f.seed;
    if (sub->count("--sampling")) cfg.sampling = parse_sampling(f.sampling);
    if (sub->count("--snapshot-steps")) cfg.snapshot_steps = parse_step_list(f.snapshot_steps);
    cfg.mode = resolve_mode(sub, f, cfg.mode);
    return cfg;
}

int cmd_run(const CLI::App* sub, const Flags& f) {
    RunConfig cfg = resolve_run_config(sub, f, ValidationMode::Strict);
    print_warnings(cfg.validate());

    const SimResult res = run_simulation(cfg);

    fs::create_directories(f.out);
    std::vector<std::string> outputs;
    write_timeseries(res.series, fs::path(f.out) / "timeseries.csv");
    outputs.push_back("timeseries.csv");
    for (const auto& snap : res.snapshots) {
        const std::string stem = "snapshot_" + std::to_string(snap.step);
        write_snapshot(snap, fs::path(f.out) / stem);
        for (const char* suffix : {".epsilon.csv", ".alpha.csv", ".strategy.csv"})
            outputs.push_back(stem + suffix);
    }
    finish_bundle("run", f.out, to_json(cfg), std::move(outputs));

    const auto& last = res.series.back();
    std::cout << "run complete: steps=" << cfg.step_count << " seed=" << cfg.seed
              << " mean_epsilon=" << format_real(last.mean_epsilon)
              << " mean_alpha=" << format_real(last.mean_alpha) << "\n";
    return 0;
}

int cmd_snapshot(const CLI::App* sub, const Flags& f) {
    RunConfig cfg = resolve_run_config(sub, f, ValidationMode::Strict);
    if (cfg.snapshot_steps.empty()) cfg.snapshot_steps = {0, cfg.step_count};
    print_warnings(cfg.validate());

    const SimResult res = run_simulation(cfg);

    fs::create_directories(f.out);
    std::vector<std::string> outputs;
    for (const auto& snap : res.snapshots) {
        const std::string stem = "snapshot_" + std::to_string(snap.step);
        write_snapshot(snap, fs::path(f.out) / stem);
        for (const char* suffix : {".epsilon.csv", ".alpha.csv", ".strategy.csv"})
            outputs.push_back(stem + suffix);
    }
    finish_bundle("snapshot", f.out, to_json(cfg), std::move(outputs));

    std::cout << "snapshot complete: " << res.snapshots.size() << " snapshot(s) in " << f.out
              << "\n";
    return 0;
}

void add_sweep_axis_flags(CLI::App* sub, Flags& f, bool with_l_axis) {
    sub->add_option("--t-min", f.t_min, "Temptation grid start")->capture_default_str();
    sub->add_option("--t-max", f.t_max, "Temptation grid end")->capture_default_str();
    sub->add_option("--t-step", f.t_step, "Temptation grid spacing")->capture_default_str();
    if (with_l_axis) {
        sub->add_option("--l-min", f.l_min, "Loner grid start")->capture_default_str();
        sub->add_option("--l-max", f.l_max, "Loner grid end")->capture_default_str();
        sub->add_option("--l-step", f.l_step, "Loner grid spacing")->capture_default_str();
    }
    sub->add_option("--replicates", f.replicates, "Replicates per cell")->capture_default_str();
}

SweepSpec resolve_sweep_base(const CLI::App* sub, const Flags& f) {
    SweepSpec spec;
    spec.base.mode = ValidationMode::Sweep;
    spec.base.sampling = SamplingSpec::every_k(spec.base.step_count);
    if (sub->count("--config")) apply_json(spec, load_config_file(f.config));
    if (sub->count("--size")) spec.base.lattice = parse_size(f.size);
    if (sub->count("--steps")) {
        spec.base.step_count = f.steps;
        if (!sub->count("--config") && !sub->count("--sampling"))
            spec.base.sampling = SamplingSpec::every_k(f.steps);
    }
    if (sub->count("--K")) spec.base.game.K = f.K;
    if (sub->count("--sampling")) spec.base.sampling = parse_sampling(f.sampling);
    if (sub->count("--seed")) spec.master_seed = f.seed;
    if (sub->count("--replicates")) spec.replicates = f.replicates;
    spec.base.mode = resolve_mode(sub, f, spec.base.mode);
    return spec;
}

int run_sweep_t(const CLI::App* sub, const Flags& f) {
    SweepSpec spec = resolve_sweep_base(sub, f);
    if (!sub->count("--config")) {
        spec.t_values = sweep_axis(f.t_min, f.t_max, f.t_step);
        spec.l_values = {f.L};
        spec.schemes = {InitScheme::pd(), InitScheme::opd(), InitScheme::pdpa()};
        spec.rules = {UpdateRule::Synchronous, UpdateRule::Asynchronous};
    }
    if (sub->count("--t-min") || sub->count("--t-max") || sub->count("--t-step"))
        spec.t_values = sweep_axis(f.t_min, f.t_max, f.t_step);
    if (sub->count("--L")) spec.l_values = {f.L};
    if (sub->count("--schemes")) {
        spec.schemes.clear();
        std::stringstream ss(f.schemes);
        std::string item;
        while (std::getline(ss, item, ';')) spec.schemes.push_back(parse_scheme(item));
    }
    if (sub->count("--rules")) {
        spec.rules.clear();
        std::stringstream ss(f.rules);
        std::string item;
        while (std::getline(ss, item, ';')) spec.rules.push_back(parse_rule(item));
    }
    print_warnings(spec.validate());

    const int workers = resolve_worker_count(0);
    std::cerr << "sweep-t: " << spec.t_values.size() << " T values x "
              << (spec.schemes.empty() ? 1 : spec.schemes.size()) *
                     (spec.rules.empty() ? 1 : spec.rules.size())
              << " setups x " << spec.replicates << " replicates, " << workers << " worker(s)\n";
    const auto rows = sweep_temptation(spec, workers, stderr_progress());

    fs::create_directories(f.out);
    write_sweep_table(rows, fs::path(f.out) / "sweep_t.csv");
    finish_bundle("sweep-t", f.out, to_json(spec), {"sweep_t.csv"});
    std::cout << "sweep-t complete: " << rows.size() << " rows in " << f.out << "\n";
    return 0;
}

int run_sweep_tl(const CLI::App* sub, const Flags& f) {
    SweepSpec spec = resolve_sweep_base(sub, f);
    if (!sub->count("--config")) {
        spec.t_values = sweep_axis(f.t_min, f.t_max, f.t_step);
        spec.l_values = sweep_axis(f.l_min, f.l_max, f.l_step);
    }
    if (sub->count("--t-min") || sub->count("--t-max") || sub->count("--t-step"))
        spec.t_values = sweep_axis(f.t_min, f.t_max, f.t_step);
    if (sub->count("--l-min") || sub->count("--l-max") || sub->count("--l-step"))
        spec.l_values = sweep_axis(f.l_min, f.l_max, f.l_step);
    if (sub->count("--rule")) spec.base.rule = parse_rule(f.rule);
    if (sub->count("--scheme")) spec.base.scheme = parse_scheme(f.scheme);
    spec.schemes.clear();
    spec.rules.clear();
    print_warnings(spec.validate());

    const int workers = resolve_worker_count(0);
    std::cerr << "sweep-tl: " << spec.t_values.size() << " x " << spec.l_values.size()
              << " cells x " << spec.replicates << " replicates, " << workers << " worker(s)\n";
    const auto result = sweep_tl(spec, workers, stderr_progress());

    fs::create_directories(f.out);
    write_heatmap(result, fs::path(f.out) / "heatmap.csv");
    finish_bundle("sweep-tl", f.out, to_json(spec), {"heatmap.csv"});
    std::cout << "sweep-tl complete: " << result.cells.size() << " cells in " << f.out << "\n";
    return 0;
}

int cmd_selftest(const Flags& f) {
    const auto results = run_selftest(f.quick);
    bool all_passed = true;
    for (const auto& r : results) {
        std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
        all_passed = all_passed && r.passed;
    }
    return all_passed ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spatial prisoner's dilemma with probabilistic abstention"};
    app.set_version_flag("--version", std::string(kArtifactName) + " " + kVersion);
    app.require_subcommand(1);

    Flags f;

    CLI::App* run = app.add_subcommand("run", "Single simulation, time series output");
    add_common_run_flags(run, f);

    CLI::App* snap = app.add_subcommand("snapshot", "Single simulation, lattice grid dumps");
    add_common_run_flags(snap, f);

    CLI::App* sweep_t = app.add_subcommand("sweep-t", "Temptation sweep across schemes and rules");
    add_common_run_flags(sweep_t, f);
    add_sweep_axis_flags(sweep_t, f, false);
    sweep_t->add_option("--schemes", f.schemes, "Semicolon-separated scheme list")
        ->capture_default_str();
    sweep_t->add_option("--rules", f.rules, "Semicolon-separated rule list")
        ->capture_default_str();

    CLI::App* sweep_tl = app.add_subcommand("sweep-tl", "T-L phase-plane sweep");
    add_common_run_flags(sweep_tl, f);
    add_sweep_axis_flags(sweep_tl, f, true);

    CLI::App* selftest = app.add_subcommand("selftest", "Built-in oracle checks");
    selftest->add_flag("--quick", f.quick, "Reduced trial counts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) return cmd_run(run, f);
        if (snap->parsed()) return cmd_snapshot(snap, f);
        if (sweep_t->parsed()) return run_sweep_t(sweep_t, f);
        if (sweep_tl->parsed()) return run_sweep_tl(sweep_tl, f);
        if (selftest->parsed()) return cmd_selftest(f);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
