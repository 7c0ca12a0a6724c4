// Replicate batches, temptation sweeps, and T-L phase-plane sweeps with
// deterministic seed derivation and order-independent parallel execution.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pdpa/dynamics.hpp"

namespace pdpa {

// Stable mixing of (master_seed, t_index, l_index, replicate_index) into a
// per-run seed: three chained splitmix64-finalizer steps, one per index.
// Each step is bijective in its addend, so runs differing only in the last
// index can never collide.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t t_index,
                                 std::uint64_t l_index, std::uint64_t replicate_index) noexcept {
    std::uint64_t h = master_seed;
    h = mix64(h + 0x9E3779B97F4A7C15ull + t_index);
    h = mix64(h + 0xC2B2AE3D27D4EB4Full + l_index);
    h = mix64(h + 0x165667B19E3779F9ull + replicate_index);
    return h;
}

struct SweepSpec {
    RunConfig base;                 // T, L, and seed are overridden per cell
    std::vector<double> t_values;
    std::vector<double> l_values;
    std::vector<InitScheme> schemes; // sweep_temptation setups; empty -> {base.scheme}
    std::vector<UpdateRule> rules;   // sweep_temptation setups; empty -> {base.rule}
    int replicates = 100;
    std::uint64_t master_seed = 1;

    // Throws std::invalid_argument; returns sweep-mode endpoint warnings
    // aggregated over the whole grid.
    std::vector<std::string> validate() const;

    bool operator==(const SweepSpec&) const = default;
};

// Aggregate over one (T, L) cell. Raw per-replicate values are retained so
// the reported means and standard errors can always be recomputed.
struct CellAggregate {
    double T = 0.0;
    double L = 0.0;
    int replicates = 0;
    double mean_epsilon = 0.0;
    double se_epsilon = 0.0;
    double mean_alpha = 0.0;
    double se_alpha = 0.0;
    std::vector<double> raw_epsilon;
    std::vector<double> raw_alpha;
};

// Progress hook: (cells completed, cells total). May be called from worker
// threads; invocations are serialized by the sweep driver.
using ProgressFn = std::function<void(int, int)>;

// Resolves the effective worker count: `requested` (or hardware concurrency
// when requested <= 0), bounded by the PDPA_THREADS environment variable.
int resolve_worker_count(int requested);

// Runs `replicates` independent simulations of cfg with seeds
// derive_seed(master_seed, t_index, l_index, i) and aggregates the
// final-step mean epsilon / mean alpha. The result is independent of worker
// count. A failed replicate aborts with a diagnostic naming its seed.
CellAggregate run_replicates(const RunConfig& cfg, int replicates, std::uint64_t master_seed,
                             int workers = 1, int t_index = 0, int l_index = 0);

struct TemptationRow {
    InitScheme scheme;
    UpdateRule rule;
    CellAggregate cell; // cell.T carries the temptation value
};

// Temptation sweep: one cell per (scheme, rule, T), L fixed to the single
// l_values entry. Per-setup seeds are chained off the master seed with
// derive_seed(master, scheme_index, rule_index, 0) so no two setups share
// replicate seeds. Rows are ordered (scheme, rule, T).
std::vector<TemptationRow> sweep_temptation(const SweepSpec& spec, int workers = 1,
                                            ProgressFn progress = {});

struct TlSweepResult {
    std::vector<double> t_values;
    std::vector<double> l_values;
    std::vector<CellAggregate> cells; // row-major in (L, T)

    const CellAggregate& cell(int l_index, int t_index) const {
        return cells[static_cast<std::size_t>(l_index) * t_values.size() +
                     static_cast<std::size_t>(t_index)];
    }
    std::vector<double> epsilon_matrix() const;
    std::vector<double> alpha_matrix() const;
};

// Phase-plane sweep over the full T x L grid for the base scheme and rule.
TlSweepResult sweep_tl(const SweepSpec& spec, int workers = 1, ProgressFn progress = {});

// Evenly spaced sweep axis: first + i*step up to last (inclusive, within
// half a step of rounding).
std::vector<double> sweep_axis(double first, double last, double step);

} // namespace pdpa
