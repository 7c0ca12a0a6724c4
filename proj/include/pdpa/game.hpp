// Single-edge plays with probabilistic abstention, payoff assignment, the
// analytic expected-payoff oracle, and per-agent utility accumulation.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pdpa/model.hpp"
#include "pdpa/rng.hpp"

namespace pdpa {

// Strict mode enforces the open dilemma ranges 1 < T < 2 and 0 < L < 1;
// sweep mode additionally permits the closed endpoints and reports them as
// warnings instead.
enum class ValidationMode { Strict, Sweep };

struct GameParams {
    double T = 1.4;     // temptation to defect
    double R = 1.0;     // reward for mutual cooperation (fixed)
    double P = 0.0;     // punishment for mutual defection (fixed)
    double S = 0.0;     // sucker's payoff (fixed)
    double L = 0.4;     // loner's payoff
    double K = 0.1;     // Fermi noise amplitude
    int kappa = kKappa; // lattice degree (fixed)

    // Payoff to `mine` against `theirs` when the game is actually played.
    double payoff(Strategy mine, Strategy theirs) const noexcept {
        if (mine == Strategy::Cooperate) return theirs == Strategy::Cooperate ? R : S;
        return theirs == Strategy::Cooperate ? T : P;
    }

    // Throws std::invalid_argument on hard violations; returns warning
    // messages for endpoint values admitted under sweep mode.
    std::vector<std::string> validate(ValidationMode mode) const;

    bool operator==(const GameParams&) const = default;
};

struct EdgeOutcome {
    bool played = false;
    double payoff_x = 0.0;
    double payoff_y = 0.0;
};

// Probability that a pairwise play actually happens: independent Bernoulli
// participation per endpoint, so (1 - ax)(1 - ay).
inline double interaction_probability(double alpha_x, double alpha_y) noexcept {
    return (1.0 - alpha_x) * (1.0 - alpha_y);
}

namespace detail {

// Participation draw for one endpoint. Deterministic levels (alpha 0 or 1)
// consume no randomness; intermediate levels consume exactly one draw with
// success probability 1 - alpha.
inline bool participates(AlphaLevel alpha, RngStream& rng) {
    if (alpha.level == 0) return true;
    if (alpha.level == 2 * kKappa) return false;
    return rng.next_u01() < 1.0 - alpha.value();
}

} // namespace detail

// One pairwise play. Draw order: x's participation, then y's; y's draw is
// skipped once x has abstained (the outcome is already forced). If either
// endpoint abstains both receive the loner's payoff L.
inline EdgeOutcome play_edge(const AgentState& x, const AgentState& y, const GameParams& p,
                             RngStream& rng) {
    if (!detail::participates(x.alpha, rng)) return {false, p.L, p.L};
    if (!detail::participates(y.alpha, rng)) return {false, p.L, p.L};
    return {true, p.payoff(x.strategy, y.strategy), p.payoff(y.strategy, x.strategy)};
}

// Analytic expectation of play_edge payoffs:
//   E_x = q * M[s_x, s_y] + (1 - q) * L   with q = (1 - ax)(1 - ay),
// and symmetrically for y.
std::pair<double, double> expected_edge_payoff(const AgentState& x, const AgentState& y,
                                               const GameParams& p);

// Utility of the focal agent: sum of four fresh plays against its neighbors,
// visited in the fixed (up, down, left, right) order.
inline double gather_utility(const Lattice& lat, int site, const GameParams& p, RngStream& rng) {
    const AgentState& focal = lat.at(site);
    const auto& nb = lat.neighbors(site);
    double u = 0.0;
    for (int k = 0; k < 4; ++k)
        u += play_edge(focal, lat.at(static_cast<int>(nb[static_cast<std::size_t>(k)])), p, rng)
                 .payoff_x;
    return u;
}

} // namespace pdpa
