// Built-in oracle checks behind the `selftest` CLI command. They validate
// the engine against independently coded references: closed-form Fermi
// values, analytic edge-payoff statistics, and an exact brute-force
// enumeration of one synchronous step on a small toroid.

#pragma once

#include <string>
#include <vector>

namespace pdpa {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

// fermi_probability at pinned points: 0.5 at equal utilities and
// 1/(1+e^{-1}) / 1/(1+e^{+1}) at a utility gap of -/+ 0.4 with K=0.1,
// kappa=4.
CheckResult check_fermi_unit();

// Monte Carlo means of play_edge over randomized (state, state, params)
// triples versus expected_edge_payoff; each endpoint mean must fall within
// 4 analytic standard errors (1e-12 absolute when the draw is
// deterministic). Full mode: 50 cases x 10^6 draws. Quick: 12 x 10^5.
CheckResult check_edge_play_statistics(bool quick = false);

// Exact distribution of sync_step outcomes on a fixed 3x3 toroid with mixed
// intermediate alpha, enumerated over all 2^18 edge-participation patterns
// by an independent reimplementation, versus seeded empirical trials
// (full: 10^5, quick: 10^4). Outcomes with expected count >= 5 are tested
// individually at 4 standard errors; rarer outcomes are tested as one
// pooled bucket; any empirical outcome of exact probability zero fails.
CheckResult check_sync3x3_bruteforce(bool quick = false);

std::vector<CheckResult> run_selftest(bool quick = false);

} // namespace pdpa
