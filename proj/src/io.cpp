#include "pdpa/io.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "pdpa/version.hpp"

namespace pdpa {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

// RFC 4180 quoting, needed only for custom:w0,...,w8 scheme fields.
std::string csv_field(const std::string& raw) {
    if (raw.find_first_of(",\"\n") == std::string::npos) return raw;
    std::string quoted = "\"";
    for (char c : raw) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::string shortest_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", v);
    return buf;
}

void write_timeseries(const std::vector<PopulationStats>& series,
                      const std::filesystem::path& path) {
    if (series.empty()) throw std::invalid_argument("write_timeseries: empty series");
    auto out = open_for_write(path);
    out << "step,mean_epsilon,mean_alpha,frac_cooperate,frac_defect";
    for (int i = 0; i < kAlphaLevelCount; ++i) out << ",alpha_hist_" << i;
    out << '\n';
    for (const auto& s : series) {
        out << s.step << ',' << format_real(s.mean_epsilon) << ',' << format_real(s.mean_alpha)
            << ',' << format_real(s.frac_cooperate) << ',' << format_real(s.frac_defect);
        for (double h : s.alpha_histogram) out << ',' << format_real(h);
        out << '\n';
    }
    finish_write(out, path);
}

void write_sweep_table(const std::vector<TemptationRow>& rows,
                       const std::filesystem::path& path) {
    auto out = open_for_write(path);
    out << "scheme,rule,T,mean_epsilon,se_epsilon,mean_alpha,se_alpha\n";
    for (const auto& row : rows) {
        out << csv_field(to_string(row.scheme)) << ',' << to_string(row.rule) << ','
            << format_real(row.cell.T) << ',' << format_real(row.cell.mean_epsilon) << ','
            << format_real(row.cell.se_epsilon) << ',' << format_real(row.cell.mean_alpha) << ','
            << format_real(row.cell.se_alpha) << '\n';
    }
    finish_write(out, path);
}

void write_heatmap(const TlSweepResult& result, const std::filesystem::path& path) {
    auto out = open_for_write(path);
    out << "T,L,mean_epsilon,se_epsilon,mean_alpha,se_alpha\n";
    // result.cells is row-major in (L, T), which is exactly the sort order.
    for (const auto& c : result.cells) {
        out << format_real(c.T) << ',' << format_real(c.L) << ',' << format_real(c.mean_epsilon)
            << ',' << format_real(c.se_epsilon) << ',' << format_real(c.mean_alpha) << ','
            << format_real(c.se_alpha) << '\n';
    }
    finish_write(out, path);
}

std::array<std::filesystem::path, 3> write_snapshot(const SnapshotSet& snap,
                                                    const std::filesystem::path& stem) {
    std::array<std::filesystem::path, 3> paths;
    paths[0] = stem;
    paths[0] += ".epsilon.csv";
    paths[1] = stem;
    paths[1] += ".alpha.csv";
    paths[2] = stem;
    paths[2] += ".strategy.csv";

    auto write_grid = [&](const std::filesystem::path& path, auto value_at) {
        auto out = open_for_write(path);
        for (int r = 0; r < snap.height; ++r) {
            for (int c = 0; c < snap.width; ++c) {
                if (c > 0) out << ',';
                out << value_at(static_cast<std::size_t>(r) * snap.width + c);
            }
            out << '\n';
        }
        finish_write(out, path);
    };
    write_grid(paths[0], [&](std::size_t i) { return format_real(snap.epsilon[i]); });
    write_grid(paths[1], [&](std::size_t i) { return format_real(snap.alpha[i]); });
    write_grid(paths[2], [&](std::size_t i) { return std::to_string(snap.strategy[i]); });
    return paths;
}

std::string to_string(UpdateRule rule) {
    return rule == UpdateRule::Synchronous ? "sync" : "async";
}

UpdateRule parse_rule(const std::string& text) {
    if (text == "sync") return UpdateRule::Synchronous;
    if (text == "async") return UpdateRule::Asynchronous;
    throw std::invalid_argument("unknown rule '" + text + "' (expected sync or async)");
}

std::string to_string(const InitScheme& scheme) {
    switch (scheme.kind) {
        case InitScheme::Kind::PD: return "pd";
        case InitScheme::Kind::OPD: return "opd";
        case InitScheme::Kind::PDPA: return "pdpa";
        case InitScheme::Kind::Custom: break;
    }
    std::string text = "custom:";
    for (std::size_t i = 0; i < scheme.weights.size(); ++i) {
        if (i > 0) text += ',';
        text += shortest_real(scheme.weights[i]);
    }
    return text;
}

InitScheme parse_scheme(const std::string& text) {
    if (text == "pd") return InitScheme::pd();
    if (text == "opd") return InitScheme::opd();
    if (text == "pdpa") return InitScheme::pdpa();
    const std::string prefix = "custom:";
    if (text.rfind(prefix, 0) == 0) {
        std::vector<double> weights;
        std::stringstream ss(text.substr(prefix.size()));
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                std::size_t used = 0;
                const double w = std::stod(item, &used);
                if (used != item.size()) throw std::invalid_argument(item);
                weights.push_back(w);
            } catch (const std::exception&) {
                throw std::invalid_argument("bad custom weight '" + item + "' in '" + text + "'");
            }
        }
        InitScheme scheme = InitScheme::custom(std::move(weights));
        scheme.validate();
        return scheme;
    }
    throw std::invalid_argument("unknown scheme '" + text +
                                "' (expected pd, opd, pdpa, or custom:w0,...,w8)");
}

std::string to_string(const SamplingSpec& spec) {
    switch (spec.mode) {
        case SamplingMode::DenseEarly: return "dense-early";
        case SamplingMode::All: return "all";
        case SamplingMode::EveryK: break;
    }
    return "every-k:" + std::to_string(spec.k);
}

SamplingSpec parse_sampling(const std::string& text) {
    if (text == "dense-early") return SamplingSpec::dense_early();
    if (text == "all") return SamplingSpec::all();
    const std::string prefix = "every-k:";
    if (text.rfind(prefix, 0) == 0) {
        const std::string num = text.substr(prefix.size());
        try {
            std::size_t used = 0;
            const long long k = std::stoll(num, &used);
            if (used != num.size() || k < 1) throw std::invalid_argument(num);
            return SamplingSpec::every_k(k);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad sampling stride in '" + text + "'");
        }
    }
    throw std::invalid_argument("unknown sampling '" + text +
                                "' (expected dense-early, every-k:<k>, or all)");
}

std::string to_string(ValidationMode mode) {
    return mode == ValidationMode::Strict ? "strict" : "sweep";
}

ValidationMode parse_mode(const std::string& text) {
    if (text == "strict") return ValidationMode::Strict;
    if (text == "sweep") return ValidationMode::Sweep;
    throw std::invalid_argument("unknown mode '" + text + "' (expected strict or sweep)");
}

LatticeConfig parse_size(const std::string& text) {
    auto parse_dim = [&](const std::string& part) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(part, &used);
            if (used != part.size()) throw std::invalid_argument(part);
            return v;
        } catch (const std::exception&) {
            throw std::invalid_argument("bad lattice size '" + text + "'");
        }
    };
    const auto sep = text.find('x');
    LatticeConfig cfg;
    if (sep == std::string::npos) {
        cfg.width = cfg.height = parse_dim(text);
    } else {
        cfg.width = parse_dim(text.substr(0, sep));
        cfg.height = parse_dim(text.substr(sep + 1));
    }
    cfg.validate();
    return cfg;
}

namespace {

void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                         const char* where) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool known = false;
        for (const char* a : allowed)
            if (key == a) known = true;
        if (!known)
            throw std::invalid_argument(std::string(where) + ": unknown key '" + key + "'");
    }
}

template <typename T>
void maybe_get(const nlohmann::json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) {
        try {
            out = it->get<T>();
        } catch (const nlohmann::json::exception&) {
            throw std::invalid_argument(std::string("bad value for key '") + key + "'");
        }
    }
}

void maybe_get_string(const nlohmann::json& j, const char* key,
                      const std::function<void(const std::string&)>& apply) {
    if (auto it = j.find(key); it != j.end()) {
        if (!it->is_string())
            throw std::invalid_argument(std::string("bad value for key '") + key + "'");
        apply(it->get<std::string>());
    }
}

} // namespace

nlohmann::json to_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["size"] = std::to_string(cfg.lattice.width) + "x" + std::to_string(cfg.lattice.height);
    j["game"] = {{"T", cfg.game.T}, {"R", cfg.game.R}, {"P", cfg.game.P}, {"S", cfg.game.S},
                 {"L", cfg.game.L}, {"K", cfg.game.K}, {"kappa", cfg.game.kappa}};
    j["scheme"] = to_string(cfg.scheme);
    j["rule"] = to_string(cfg.rule);
    j["steps"] = cfg.step_count;
    j["sampling"] = to_string(cfg.sampling);
    j["snapshot_steps"] = cfg.snapshot_steps;
    j["seed"] = cfg.seed;
    j["mode"] = to_string(cfg.mode);
    return j;
}

void apply_json(RunConfig& cfg, const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("run config: expected a JSON object");
    reject_unknown_keys(j,
                        {"size", "game", "scheme", "rule", "steps", "sampling", "snapshot_steps",
                         "seed", "mode"},
                        "run config");
    maybe_get_string(j, "size", [&](const std::string& s) { cfg.lattice = parse_size(s); });
    if (auto it = j.find("game"); it != j.end()) {
        if (!it->is_object()) throw std::invalid_argument("bad value for key 'game'");
        reject_unknown_keys(*it, {"T", "R", "P", "S", "L", "K", "kappa"}, "game");
        maybe_get(*it, "T", cfg.game.T);
        maybe_get(*it, "R", cfg.game.R);
        maybe_get(*it, "P", cfg.game.P);
        maybe_get(*it, "S", cfg.game.S);
        maybe_get(*it, "L", cfg.game.L);
        maybe_get(*it, "K", cfg.game.K);
        maybe_get(*it, "kappa", cfg.game.kappa);
    }
    maybe_get_string(j, "scheme", [&](const std::string& s) { cfg.scheme = parse_scheme(s); });
    maybe_get_string(j, "rule", [&](const std::string& s) { cfg.rule = parse_rule(s); });
    maybe_get(j, "steps", cfg.step_count);
    maybe_get_string(j, "sampling",
                     [&](const std::string& s) { cfg.sampling = parse_sampling(s); });
    maybe_get(j, "snapshot_steps", cfg.snapshot_steps);
    maybe_get(j, "seed", cfg.seed);
    maybe_get_string(j, "mode", [&](const std::string& s) { cfg.mode = parse_mode(s); });
}

nlohmann::json to_json(const SweepSpec& spec) {
    nlohmann::json j;
    j["base"] = to_json(spec.base);
    j["t_values"] = spec.t_values;
    j["l_values"] = spec.l_values;
    std::vector<std::string> schemes;
    for (const auto& s : spec.schemes) schemes.push_back(to_string(s));
    j["schemes"] = schemes;
    std::vector<std::string> rules;
    for (const auto& r : spec.rules) rules.push_back(to_string(r));
    j["rules"] = rules;
    j["replicates"] = spec.replicates;
    j["master_seed"] = spec.master_seed;
    return j;
}

void apply_json(SweepSpec& spec, const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("sweep config: expected a JSON object");
    reject_unknown_keys(
        j, {"base", "t_values", "l_values", "schemes", "rules", "replicates", "master_seed"},
        "sweep config");
    if (auto it = j.find("base"); it != j.end()) apply_json(spec.base, *it);
    maybe_get(j, "t_values", spec.t_values);
    maybe_get(j, "l_values", spec.l_values);
    if (auto it = j.find("schemes"); it != j.end()) {
        if (!it->is_array()) throw std::invalid_argument("bad value for key 'schemes'");
        spec.schemes.clear();
        for (const auto& s : *it) spec.schemes.push_back(parse_scheme(s.get<std::string>()));
    }
    if (auto it = j.find("rules"); it != j.end()) {
        if (!it->is_array()) throw std::invalid_argument("bad value for key 'rules'");
        spec.rules.clear();
        for (const auto& r : *it) spec.rules.push_back(parse_rule(r.get<std::string>()));
    }
    maybe_get(j, "replicates", spec.replicates);
    maybe_get(j, "master_seed", spec.master_seed);
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
    nlohmann::json j;
    j["artifact"] = kArtifactName;
    j["version"] = kVersion;
    j["command"] = manifest.command;
    j["config"] = manifest.config;
    j["outputs"] = manifest.outputs;
    auto out = open_for_write(path);
    out << j.dump(2) << '\n';
    finish_write(out, path);
}

} // namespace pdpa
