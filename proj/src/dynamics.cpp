#include "pdpa/dynamics.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>

namespace pdpa {

void sync_step(Lattice& lat, const GameParams& params, RngStream& rng, SyncWorkspace& ws) {
    const int n = lat.size();
    const std::size_t edges = 2 * static_cast<std::size_t>(n);
    ws.edge_pay_x.resize(edges);
    ws.edge_pay_y.resize(edges);
    ws.utility.resize(static_cast<std::size_t>(n));
    ws.next.resize(static_cast<std::size_t>(n));

    // Phase 1: edge 2*s is s's right edge, 2*s + 1 its down edge.
    for (int s = 0; s < n; ++s) {
        const auto& nb = lat.neighbors(s);
        const EdgeOutcome right = play_edge(lat.at(s), lat.at(static_cast<int>(nb[kRight])), params, rng);
        ws.edge_pay_x[2 * static_cast<std::size_t>(s)] = right.payoff_x;
        ws.edge_pay_y[2 * static_cast<std::size_t>(s)] = right.payoff_y;
        const EdgeOutcome down = play_edge(lat.at(s), lat.at(static_cast<int>(nb[kDown])), params, rng);
        ws.edge_pay_x[2 * static_cast<std::size_t>(s) + 1] = down.payoff_x;
        ws.edge_pay_y[2 * static_cast<std::size_t>(s) + 1] = down.payoff_y;
    }

    // Utilities in (up, down, left, right) incident-edge order. The up edge
    // is the up-neighbor's down edge; the left edge is the left-neighbor's
    // right edge.
    for (int s = 0; s < n; ++s) {
        const auto& nb = lat.neighbors(s);
        const std::size_t up = nb[kUp];
        const std::size_t left = nb[kLeft];
        ws.utility[static_cast<std::size_t>(s)] =
            ws.edge_pay_y[2 * up + 1] +
            ws.edge_pay_x[2 * static_cast<std::size_t>(s) + 1] +
            ws.edge_pay_y[2 * left] +
            ws.edge_pay_x[2 * static_cast<std::size_t>(s)];
    }

    // Phase 2: unique strict maximizer of the closed neighborhood, else keep.
    for (int s = 0; s < n; ++s) {
        const auto& nb = lat.neighbors(s);
        int best = s;
        double best_u = ws.utility[static_cast<std::size_t>(s)];
        bool tied = false;
        for (int k = 0; k < 4; ++k) {
            const int j = static_cast<int>(nb[static_cast<std::size_t>(k)]);
            const double uj = ws.utility[static_cast<std::size_t>(j)];
            if (uj > best_u) {
                best_u = uj;
                best = j;
                tied = false;
            } else if (uj == best_u) {
                tied = true;
            }
        }
        ws.next[static_cast<std::size_t>(s)] = (best == s || tied) ? lat.at(s) : lat.at(best);
    }

    for (int s = 0; s < n; ++s) lat.at(s) = ws.next[static_cast<std::size_t>(s)];
}

Lattice sync_step(const Lattice& lat, const GameParams& params, RngStream& rng) {
    Lattice out = lat;
    SyncWorkspace ws;
    sync_step(out, params, rng, ws);
    return out;
}

bool async_update_site(Lattice& lat, int site, const GameParams& params, RngStream& rng) {
    const double u_x = gather_utility(lat, site, params, rng);
    const auto& nb = lat.neighbors(site);
    const int y = static_cast<int>(nb[static_cast<std::size_t>(rng.next_below(4))]);
    const double u_y = gather_utility(lat, y, params, rng);
    if (u_y > u_x && rng.next_u01() < fermi_probability(u_x, u_y, params.K, params.kappa)) {
        const bool changed = !(lat.at(site) == lat.at(y));
        lat.at(site) = lat.at(y);
        return changed;
    }
    return false;
}

void async_elementary_update(Lattice& lat, const GameParams& params, RngStream& rng) {
    const int site = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(lat.size())));
    async_update_site(lat, site, params, rng);
}

void async_step(Lattice& lat, const GameParams& params, RngStream& rng) {
    const int n = lat.size();
    for (int i = 0; i < n; ++i) async_elementary_update(lat, params, rng);
}

std::vector<std::string> RunConfig::validate() const {
    lattice.validate();
    scheme.validate();
    sampling.validate();
    auto warnings = game.validate(mode);
    if (step_count < 0) throw std::invalid_argument("RunConfig: step_count must be >= 0");
    for (std::size_t i = 0; i < snapshot_steps.size(); ++i) {
        if (snapshot_steps[i] < 0 || snapshot_steps[i] > step_count)
            throw std::invalid_argument("RunConfig: snapshot step " +
                                        std::to_string(snapshot_steps[i]) +
                                        " outside [0, step_count]");
        if (i > 0 && snapshot_steps[i] <= snapshot_steps[i - 1])
            throw std::invalid_argument("RunConfig: snapshot_steps must be strictly increasing");
    }
    return warnings;
}

namespace {

const char* scheme_tag(InitScheme::Kind k) {
    switch (k) {
        case InitScheme::Kind::PD: return "pd";
        case InitScheme::Kind::OPD: return "opd";
        case InitScheme::Kind::PDPA: return "pdpa";
        case InitScheme::Kind::Custom: return "custom";
    }
    return "?";
}

void fnv1a(std::uint64_t& h, const char* data, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 0x00000100000001B3ull;
    }
}

} // namespace

std::uint64_t RunConfig::digest() const {
    char buf[512];
    int len = std::snprintf(
        buf, sizeof buf,
        "w=%d;h=%d;T=%.17g;L=%.17g;K=%.17g;scheme=%s;rule=%s;steps=%" PRId64
        ";sampling=%d:%" PRId64 ";seed=%" PRIu64 ";mode=%d",
        lattice.width, lattice.height, game.T, game.L, game.K, scheme_tag(scheme.kind),
        rule == UpdateRule::Synchronous ? "sync" : "async", step_count,
        static_cast<int>(sampling.mode), sampling.k, seed, static_cast<int>(mode));

    std::uint64_t h = 0xCBF29CE484222325ull;
    fnv1a(h, buf, static_cast<std::size_t>(len));
    for (double w : scheme.weights) {
        len = std::snprintf(buf, sizeof buf, ";w=%.17g", w);
        fnv1a(h, buf, static_cast<std::size_t>(len));
    }
    for (std::int64_t t : snapshot_steps) {
        len = std::snprintf(buf, sizeof buf, ";snap=%" PRId64, t);
        fnv1a(h, buf, static_cast<std::size_t>(len));
    }
    return h;
}

SimResult run_simulation(const RunConfig& cfg) {
    cfg.validate();

    RngStream rng(cfg.seed);
    Lattice lat = initialize(cfg.scheme, cfg.lattice, rng);
    const std::uint64_t draws_init = rng.draws();

    const auto schedule = sampling_schedule(cfg.step_count, cfg.sampling);

    std::vector<PopulationStats> series;
    series.reserve(schedule.size());
    std::vector<SnapshotSet> snaps;
    snaps.reserve(cfg.snapshot_steps.size());

    std::size_t sched_i = 0;
    std::size_t snap_i = 0;
    const auto record = [&](std::int64_t t) {
        if (sched_i < schedule.size() && schedule[sched_i] == t) {
            series.push_back(population_stats(lat, t));
            ++sched_i;
        }
        if (snap_i < cfg.snapshot_steps.size() && cfg.snapshot_steps[snap_i] == t) {
            snaps.push_back(snapshot(lat, t));
            ++snap_i;
        }
    };

    record(0);
    SyncWorkspace ws;
    for (std::int64_t t = 1; t <= cfg.step_count; ++t) {
        if (cfg.rule == UpdateRule::Synchronous)
            sync_step(lat, cfg.game, rng, ws);
        else
            async_step(lat, cfg.game, rng);
        record(t);
    }

    SimResult res{std::move(series), std::move(lat), std::move(snaps),
                  cfg.seed,          cfg.digest(),   draws_init,
                  rng.draws()};
    return res;
}

} // namespace pdpa
