// CSV writers, flag-value string codecs, JSON config (de)serialization, and
// the output-bundle manifest.

#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdpa/dynamics.hpp"
#include "pdpa/experiments.hpp"
#include "pdpa/metrics.hpp"

namespace pdpa {

// Fixed 9-decimal rendering used for every real in CSV output, so files are
// byte-stable across platforms.
std::string format_real(double v);

// CSV with header step,mean_epsilon,mean_alpha,frac_cooperate,frac_defect,
// alpha_hist_0..alpha_hist_8; one row per recorded sample, ascending by
// step, LF newlines.
void write_timeseries(const std::vector<PopulationStats>& series,
                      const std::filesystem::path& path);

// Long-form CSV scheme,rule,T,mean_epsilon,se_epsilon,mean_alpha,se_alpha in
// row order (which sweep_temptation already emits as (scheme, rule, T)).
void write_sweep_table(const std::vector<TemptationRow>& rows,
                       const std::filesystem::path& path);

// Long-form CSV T,L,mean_epsilon,se_epsilon,mean_alpha,se_alpha sorted by
// (L, T).
void write_heatmap(const TlSweepResult& result, const std::filesystem::path& path);

// Three grid CSVs (<stem>.epsilon.csv, <stem>.alpha.csv, <stem>.strategy.csv),
// one value per cell, rows matching lattice rows. Returns the paths written.
std::array<std::filesystem::path, 3> write_snapshot(const SnapshotSet& snap,
                                                    const std::filesystem::path& stem);

// Flag-value codecs. Parsers throw std::invalid_argument naming the value.
std::string to_string(UpdateRule rule);
UpdateRule parse_rule(const std::string& text);

std::string to_string(const InitScheme& scheme); // pd | opd | pdpa | custom:w0,...,w8
InitScheme parse_scheme(const std::string& text);

std::string to_string(const SamplingSpec& spec); // dense-early | every-k:<k> | all
SamplingSpec parse_sampling(const std::string& text);

std::string to_string(ValidationMode mode); // strict | sweep
ValidationMode parse_mode(const std::string& text);

// "102" -> 102x102, "120x80" -> width 120, height 80.
LatticeConfig parse_size(const std::string& text);

// Full JSON forms. apply_json overlays only the keys present onto an
// existing config (flags > file > defaults layering) and throws
// std::invalid_argument naming any unknown key.
nlohmann::json to_json(const RunConfig& cfg);
void apply_json(RunConfig& cfg, const nlohmann::json& j);

nlohmann::json to_json(const SweepSpec& spec);
void apply_json(SweepSpec& spec, const nlohmann::json& j);

// Output-bundle manifest: artifact name/version, the exact command that
// reproduces the bundle, the fully resolved config, and the files written.
// Deliberately contains no timestamps so re-runs are byte-identical.
struct Manifest {
    std::string command;
    nlohmann::json config;
    std::vector<std::string> outputs; // paths relative to the manifest
};

void write_manifest(const Manifest& manifest, const std::filesystem::path& path);

} // namespace pdpa
