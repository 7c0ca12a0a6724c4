#include "pdpa/selfcheck.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>

#include "pdpa/dynamics.hpp"
#include "pdpa/game.hpp"
#include "pdpa/model.hpp"
#include "pdpa/rng.hpp"

namespace pdpa {

namespace {

std::string real_detail(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

} // namespace

CheckResult check_fermi_unit() {
    CheckResult res;
    res.name = "fermi-unit";
    const double tol = 1e-9;

    struct Case {
        double u_x, u_y, expected;
    };
    // At K=0.1 and kappa=4 a utility gap of 0.4 is exactly one noise unit.
    const Case cases[] = {
        {1.3, 1.3, 0.5},
        {0.0, 0.0, 0.5},
        {1.0, 1.4, 1.0 / (1.0 + std::exp(-1.0))},
        {1.4, 1.0, 1.0 / (1.0 + std::exp(+1.0))},
    };
    double worst = 0.0;
    for (const auto& c : cases) {
        const double w = fermi_probability(c.u_x, c.u_y, 0.1, 4);
        worst = std::max(worst, std::abs(w - c.expected));
        // Complementarity when the roles swap.
        worst = std::max(worst,
                         std::abs(w + fermi_probability(c.u_y, c.u_x, 0.1, 4) - 1.0));
    }
    res.passed = worst <= tol;
    res.detail = "max deviation " + real_detail(worst) + " (tolerance " + real_detail(tol) + ")";
    return res;
}

CheckResult check_edge_play_statistics(bool quick) {
    CheckResult res;
    res.name = "edge-play-statistics";

    const int cases = quick ? 12 : 50;
    const std::int64_t draws = quick ? 100000 : 1000000;

    RngStream case_rng(0xC0FFEEull);
    double worst_z = 0.0;
    int failures = 0;

    for (int c = 0; c < cases; ++c) {
        AgentState x{case_rng.next_below(2) ? Strategy::Defect : Strategy::Cooperate,
                     {static_cast<std::uint8_t>(case_rng.next_below(kAlphaLevelCount))}};
        AgentState y{case_rng.next_below(2) ? Strategy::Defect : Strategy::Cooperate,
                     {static_cast<std::uint8_t>(case_rng.next_below(kAlphaLevelCount))}};
        GameParams params;
        params.T = 1.0 + 0.01 + 0.98 * case_rng.next_u01();
        params.L = 0.01 + 0.98 * case_rng.next_u01();
        params.validate(ValidationMode::Strict);

        const auto expected = expected_edge_payoff(x, y, params);
        const double q = interaction_probability(x.alpha.value(), y.alpha.value());

        // Analytic per-draw variance: payoff is two-valued (played vs L).
        const double mx = params.payoff(x.strategy, y.strategy);
        const double my = params.payoff(y.strategy, x.strategy);
        const double var_x = q * (1.0 - q) * (mx - params.L) * (mx - params.L);
        const double var_y = q * (1.0 - q) * (my - params.L) * (my - params.L);
        const double n = static_cast<double>(draws);
        const double se_x = std::sqrt(var_x / n);
        const double se_y = std::sqrt(var_y / n);

        RngStream draw_rng(0x5EEDBA5Eull + static_cast<std::uint64_t>(c));
        KahanSum sum_x, sum_y;
        for (std::int64_t i = 0; i < draws; ++i) {
            const EdgeOutcome out = play_edge(x, y, params, draw_rng);
            sum_x.add(out.payoff_x);
            sum_y.add(out.payoff_y);
        }
        const double mean_x = sum_x.sum / n;
        const double mean_y = sum_y.sum / n;

        auto check_endpoint = [&](double mean, double exp_val, double se) {
            const double dev = std::abs(mean - exp_val);
            if (se > 0.0) {
                worst_z = std::max(worst_z, dev / se);
                if (dev > 4.0 * se) ++failures;
            } else if (dev > 1e-12) {
                ++failures;
                worst_z = std::max(worst_z, 1e9);
            }
        };
        check_endpoint(mean_x, expected.first, se_x);
        check_endpoint(mean_y, expected.second, se_y);
    }

    res.passed = failures == 0;
    std::ostringstream os;
    os << cases << " cases x " << draws << " draws, worst |z| = " << real_detail(worst_z)
       << ", failures " << failures;
    res.detail = os.str();
    return res;
}

namespace {

// The oracle below deliberately re-derives everything from scratch: its own
// torus arithmetic, its own payoff table, its own imitation rule. Only the
// frozen contracts are shared with the engine: edges play in any order with
// independent participation, utilities accumulate incident edges in
// (up, down, left, right) order, ties keep the current state.

constexpr int kOracleW = 3;
constexpr int kOracleH = 3;
constexpr int kOracleN = kOracleW * kOracleH;
constexpr int kOracleEdges = 2 * kOracleN; // right + down per site

struct OracleAgent {
    int defect; // 0 cooperate, 1 defect
    int level;  // alpha level, value level/8
};

// Fixed mixed-alpha configuration (row-major): every strategy appears next
// to every alpha class somewhere.
constexpr std::array<OracleAgent, kOracleN> kOracleGrid = {{
    {0, 0}, {1, 2}, {0, 4},
    {1, 0}, {0, 6}, {1, 4},
    {0, 2}, {1, 6}, {0, 0},
}};

constexpr double kOracleT = 1.4;
constexpr double kOracleL = 0.4;

int oracle_index(int row, int col) {
    const int r = (row % kOracleH + kOracleH) % kOracleH;
    const int c = (col % kOracleW + kOracleW) % kOracleW;
    return r * kOracleW + c;
}

double oracle_alpha(int site) { return kOracleGrid[static_cast<std::size_t>(site)].level / 8.0; }

double oracle_payoff(int mine_defect, int theirs_defect, double T) {
    if (mine_defect == 0) return theirs_defect == 0 ? 1.0 : 0.0;
    return theirs_defect == 0 ? T : 0.0;
}

// Encodes a full lattice state; used as the distribution key by both the
// enumeration and the empirical counting.
std::uint64_t encode_state(const std::array<OracleAgent, kOracleN>& grid) {
    std::uint64_t code = 0;
    for (int i = 0; i < kOracleN; ++i) {
        const auto& a = grid[static_cast<std::size_t>(i)];
        code |= static_cast<std::uint64_t>(a.defect * 16 + a.level) << (5 * i);
    }
    return code;
}

std::uint64_t encode_state(const Lattice& lat) {
    std::array<OracleAgent, kOracleN> grid{};
    for (int i = 0; i < kOracleN; ++i) {
        grid[static_cast<std::size_t>(i)] = {strategy_code(lat.at(i).strategy),
                                             static_cast<int>(lat.at(i).alpha.level)};
    }
    return encode_state(grid);
}

// Exact outcome distribution of one synchronous step from kOracleGrid.
std::map<std::uint64_t, double> oracle_distribution() {
    // Undirected edges with their endpoints and participation probability.
    std::array<std::array<int, 2>, kOracleEdges> ends{};
    std::array<double, kOracleEdges> q{};
    std::map<std::pair<int, int>, int> edge_of;
    int e = 0;
    for (int r = 0; r < kOracleH; ++r) {
        for (int c = 0; c < kOracleW; ++c) {
            const int a = oracle_index(r, c);
            for (const int b : {oracle_index(r, c + 1), oracle_index(r + 1, c)}) {
                ends[static_cast<std::size_t>(e)] = {a, b};
                q[static_cast<std::size_t>(e)] =
                    (1.0 - oracle_alpha(a)) * (1.0 - oracle_alpha(b));
                edge_of[{std::min(a, b), std::max(a, b)}] = e;
                ++e;
            }
        }
    }

    // Incident edge ids per site in the frozen (up, down, left, right) order.
    std::array<std::array<int, 4>, kOracleN> incident{};
    std::array<std::array<int, 4>, kOracleN> other{};
    for (int r = 0; r < kOracleH; ++r) {
        for (int c = 0; c < kOracleW; ++c) {
            const int s = oracle_index(r, c);
            const std::array<int, 4> nb = {oracle_index(r - 1, c), oracle_index(r + 1, c),
                                           oracle_index(r, c - 1), oracle_index(r, c + 1)};
            for (int d = 0; d < 4; ++d) {
                incident[static_cast<std::size_t>(s)][static_cast<std::size_t>(d)] =
                    edge_of.at({std::min(s, nb[static_cast<std::size_t>(d)]),
                                std::max(s, nb[static_cast<std::size_t>(d)])});
                other[static_cast<std::size_t>(s)][static_cast<std::size_t>(d)] =
                    nb[static_cast<std::size_t>(d)];
            }
        }
    }

    std::map<std::uint64_t, double> dist;
    for (std::uint32_t mask = 0; mask < (1u << kOracleEdges); ++mask) {
        double w = 1.0;
        for (int i = 0; i < kOracleEdges && w > 0.0; ++i) {
            const double qe = q[static_cast<std::size_t>(i)];
            w *= (mask >> i) & 1u ? qe : 1.0 - qe;
        }
        if (w == 0.0) continue;

        std::array<double, kOracleN> u{};
        for (int s = 0; s < kOracleN; ++s) {
            double total = 0.0;
            for (int d = 0; d < 4; ++d) {
                const int eid = incident[static_cast<std::size_t>(s)][static_cast<std::size_t>(d)];
                const int o = other[static_cast<std::size_t>(s)][static_cast<std::size_t>(d)];
                if ((mask >> eid) & 1u) {
                    total += oracle_payoff(kOracleGrid[static_cast<std::size_t>(s)].defect,
                                           kOracleGrid[static_cast<std::size_t>(o)].defect,
                                           kOracleT);
                } else {
                    total += kOracleL;
                }
            }
            u[static_cast<std::size_t>(s)] = total;
        }

        std::array<OracleAgent, kOracleN> next{};
        for (int s = 0; s < kOracleN; ++s) {
            double best = u[static_cast<std::size_t>(s)];
            int best_site = s;
            int attainers = 1;
            for (int d = 0; d < 4; ++d) {
                const int o = other[static_cast<std::size_t>(s)][static_cast<std::size_t>(d)];
                const double uo = u[static_cast<std::size_t>(o)];
                if (uo > best) {
                    best = uo;
                    best_site = o;
                    attainers = 1;
                } else if (uo == best) {
                    ++attainers;
                }
            }
            const bool keep = best_site == s || attainers > 1;
            next[static_cast<std::size_t>(s)] =
                keep ? kOracleGrid[static_cast<std::size_t>(s)]
                     : kOracleGrid[static_cast<std::size_t>(best_site)];
        }
        dist[encode_state(next)] += w;
    }
    return dist;
}

} // namespace

CheckResult check_sync3x3_bruteforce(bool quick) {
    CheckResult res;
    res.name = "sync-3x3-bruteforce";

    const auto exact = oracle_distribution();
    double total = 0.0;
    for (const auto& [state, p] : exact) total += p;
    if (std::abs(total - 1.0) > 1e-9) {
        res.passed = false;
        res.detail = "enumeration probabilities sum to " + real_detail(total);
        return res;
    }

    // Empirical side, through the engine under test.
    LatticeConfig cfg;
    cfg.width = kOracleW;
    cfg.height = kOracleH;
    std::vector<AgentState> init;
    init.reserve(kOracleN);
    for (const auto& a : kOracleGrid)
        init.push_back({a.defect ? Strategy::Defect : Strategy::Cooperate,
                        {static_cast<std::uint8_t>(a.level)}});
    GameParams params;
    params.T = kOracleT;
    params.L = kOracleL;

    const int trials = quick ? 10000 : 100000;
    Lattice lat(cfg);
    SyncWorkspace ws;
    std::map<std::uint64_t, int> counts;
    for (int t = 0; t < trials; ++t) {
        lat.set_states(init);
        RngStream rng(1000003ull + static_cast<std::uint64_t>(t));
        sync_step(lat, params, rng, ws);
        ++counts[encode_state(lat)];
    }

    const double n = static_cast<double>(trials);
    double worst_z = 0.0;
    int failures = 0;
    int tested = 0;
    double pooled_p = 0.0;
    std::int64_t pooled_count = 0;

    for (const auto& [state, count] : counts) {
        if (exact.find(state) == exact.end()) {
            ++failures; // outcome the exact enumeration says is impossible
            worst_z = std::max(worst_z, 1e9);
        }
    }
    for (const auto& [state, p] : exact) {
        const auto it = counts.find(state);
        const double count = it == counts.end() ? 0.0 : static_cast<double>(it->second);
        if (p * n >= 5.0) {
            const double se = std::sqrt(p * (1.0 - p) / n);
            const double z = std::abs(count / n - p) / se;
            worst_z = std::max(worst_z, z);
            if (z > 4.0) ++failures;
            ++tested;
        } else {
            pooled_p += p;
            pooled_count += static_cast<std::int64_t>(count);
        }
    }
    if (pooled_p > 0.0) {
        const double se = std::sqrt(pooled_p * (1.0 - pooled_p) / n);
        const double z = std::abs(static_cast<double>(pooled_count) / n - pooled_p) / se;
        worst_z = std::max(worst_z, z);
        if (z > 4.0) ++failures;
        ++tested;
    }

    res.passed = failures == 0;
    std::ostringstream os;
    os << exact.size() << " exact outcomes, " << tested << " tested buckets over " << trials
       << " trials, worst |z| = " << real_detail(worst_z) << ", failures " << failures;
    res.detail = os.str();
    return res;
}

std::vector<CheckResult> run_selftest(bool quick) {
    return {check_fermi_unit(), check_edge_play_statistics(quick),
            check_sync3x3_bruteforce(quick)};
}

} // namespace pdpa
