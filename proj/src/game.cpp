#include "pdpa/game.hpp"

#include <sstream>
#include <stdexcept>

namespace pdpa {

namespace {

std::string num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

} // namespace

std::vector<std::string> GameParams::validate(ValidationMode mode) const {
    if (R != 1.0) throw std::invalid_argument("GameParams: R is fixed at 1 (got R=" + num(R) + ")");
    if (P != 0.0) throw std::invalid_argument("GameParams: P is fixed at 0 (got P=" + num(P) + ")");
    if (S != 0.0) throw std::invalid_argument("GameParams: S is fixed at 0 (got S=" + num(S) + ")");
    if (kappa != kKappa)
        throw std::invalid_argument("GameParams: kappa is fixed at 4 (got kappa=" + num(kappa) + ")");
    if (!(K > 0.0)) throw std::invalid_argument("GameParams: K must be > 0 (got K=" + num(K) + ")");

    std::vector<std::string> warnings;
    if (mode == ValidationMode::Strict) {
        if (!(T > 1.0 && T < 2.0))
            throw std::invalid_argument("GameParams: T=" + num(T) +
                                        " violates the dilemma range 1 < T < 2 (strict mode)");
        if (!(L > 0.0 && L < 1.0))
            throw std::invalid_argument("GameParams: L=" + num(L) +
                                        " violates the dilemma range 0 < L < 1 (strict mode)");
    } else {
        if (!(T >= 1.0 && T <= 2.0))
            throw std::invalid_argument("GameParams: T=" + num(T) +
                                        " outside the closed sweep range [1, 2]");
        if (!(L >= 0.0 && L <= 1.0))
            throw std::invalid_argument("GameParams: L=" + num(L) +
                                        " outside the closed sweep range [0, 1]");
        if (!(T > 1.0 && T < 2.0))
            warnings.push_back("T=" + num(T) + " is at a closed endpoint of 1 < T < 2");
        if (!(L > 0.0 && L < 1.0))
            warnings.push_back("L=" + num(L) + " is at a closed endpoint of 0 < L < 1");
    }
    return warnings;
}

std::pair<double, double> expected_edge_payoff(const AgentState& x, const AgentState& y,
                                               const GameParams& p) {
    const double q = interaction_probability(x.alpha.value(), y.alpha.value());
    const double ex = q * p.payoff(x.strategy, y.strategy) + (1.0 - q) * p.L;
    const double ey = q * p.payoff(y.strategy, x.strategy) + (1.0 - q) * p.L;
    return {ex, ey};
}

} // namespace pdpa
