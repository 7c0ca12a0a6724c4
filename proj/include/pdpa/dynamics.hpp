// One-step evolution operators (synchronous best-neighbor imitation and
// asynchronous Fermi-rule imitation) and the full simulation loop.

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdpa/game.hpp"
#include "pdpa/metrics.hpp"
#include "pdpa/model.hpp"
#include "pdpa/rng.hpp"

namespace pdpa {

enum class UpdateRule { Synchronous, Asynchronous };

// W = 1 / (1 + exp((u_x - u_y) / (kappa * K))), evaluated on the branch that
// cannot overflow for large |u_x - u_y|.
inline double fermi_probability(double u_x, double u_y, double K, int kappa) {
    if (!(K > 0.0)) throw std::invalid_argument("fermi_probability: K must be > 0");
    if (kappa < 1) throw std::invalid_argument("fermi_probability: kappa must be >= 1");
    const double d = (u_x - u_y) / (static_cast<double>(kappa) * K);
    if (d >= 0.0) {
        const double e = std::exp(-d);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(d));
}

// Reusable buffers for sync_step; callers that step in a loop keep one
// workspace alive to avoid per-step allocation.
struct SyncWorkspace {
    std::vector<double> edge_pay_x; // payoff to the row-major origin endpoint
    std::vector<double> edge_pay_y; // payoff to the neighbor endpoint
    std::vector<double> utility;
    std::vector<AgentState> next;
};

// One synchronous step, in place. Phase 1 plays every undirected edge once
// (sites row-major, each contributing its right edge then its down edge;
// both endpoints share the outcome) and accumulates utilities in the fixed
// (up, down, left, right) incident-edge order. Phase 2 lets every agent
// adopt the pre-step state of the unique strict utility maximizer of its
// closed neighborhood; any tie at the maximum, or self being maximal, keeps
// the current state. Both phases read only pre-step states.
void sync_step(Lattice& lat, const GameParams& params, RngStream& rng, SyncWorkspace& ws);

// Copying convenience wrapper.
Lattice sync_step(const Lattice& lat, const GameParams& params, RngStream& rng);

// One asynchronous elementary update with the focal site fixed: compute the
// focal utility (fresh plays), draw one of its four neighbors, compute that
// neighbor's utility (fresh plays, including a fresh play against the focal
// agent), and if u_y > u_x copy (s, alpha) from the neighbor with the Fermi
// probability. No Fermi draw is consumed when u_y <= u_x. Returns whether
// the site's state changed.
bool async_update_site(Lattice& lat, int site, const GameParams& params, RngStream& rng);

// Draws the focal site uniformly, then runs async_update_site.
void async_elementary_update(Lattice& lat, const GameParams& params, RngStream& rng);

// One Monte Carlo step: exactly N = width*height elementary updates with
// uniform site selection (with replacement).
void async_step(Lattice& lat, const GameParams& params, RngStream& rng);

struct RunConfig {
    LatticeConfig lattice;
    GameParams game;
    InitScheme scheme = InitScheme::pdpa();
    UpdateRule rule = UpdateRule::Synchronous;
    std::int64_t step_count = 100000;
    SamplingSpec sampling = SamplingSpec::dense_early();
    std::vector<std::int64_t> snapshot_steps; // strictly increasing, within [0, step_count]
    std::uint64_t seed = 1;
    ValidationMode mode = ValidationMode::Strict;

    // Throws std::invalid_argument; returns sweep-mode endpoint warnings.
    std::vector<std::string> validate() const;

    // FNV-1a digest of the canonical text form; identifies a run in result
    // metadata.
    std::uint64_t digest() const;

    bool operator==(const RunConfig&) const = default;
};

struct SimResult {
    std::vector<PopulationStats> series; // one entry per scheduled step
    Lattice final_lattice;
    std::vector<SnapshotSet> snapshots;
    std::uint64_t seed = 0;
    std::uint64_t config_digest = 0;
    std::uint64_t rng_draws_init = 0;  // raw draws consumed by initialization
    std::uint64_t rng_draws_total = 0; // raw draws consumed by the whole run
};

// Initialize, evolve for step_count steps under the configured rule, record
// stats at every scheduled step and snapshots at the requested steps.
SimResult run_simulation(const RunConfig& cfg);

} // namespace pdpa
