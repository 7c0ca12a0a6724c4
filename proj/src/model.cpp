#include "pdpa/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pdpa {

double alpha_value(int level, int kappa) {
    if (kappa < 1) throw std::invalid_argument("alpha_value: kappa must be >= 1");
    if (level < 0 || level > 2 * kappa)
        throw std::out_of_range("alpha_value: level " + std::to_string(level) +
                                " outside [0, " + std::to_string(2 * kappa) + "]");
    return static_cast<double>(level) / static_cast<double>(2 * kappa);
}

void LatticeConfig::validate() const {
    if (width < 3 || height < 3)
        throw std::invalid_argument("LatticeConfig: width and height must be >= 3 (got " +
                                    std::to_string(width) + "x" + std::to_string(height) + ")");
}

std::array<Site, 4> neighbor_sites(const LatticeConfig& cfg, Site site) {
    const int w = cfg.width;
    const int h = cfg.height;
    const int r = site.row;
    const int c = site.col;
    return {Site{(r + h - 1) % h, c},   // up
            Site{(r + 1) % h, c},       // down
            Site{r, (c + w - 1) % w},   // left
            Site{r, (c + 1) % w}};      // right
}

Lattice::Lattice(LatticeConfig cfg, AgentState fill) : cfg_(cfg) {
    cfg_.validate();
    const std::size_t n = static_cast<std::size_t>(cfg_.site_count());
    states_.assign(n, fill);
    nbrs_.resize(n);
    for (int r = 0; r < cfg_.height; ++r) {
        for (int c = 0; c < cfg_.width; ++c) {
            const auto ns = neighbor_sites(cfg_, Site{r, c});
            auto& entry = nbrs_[index_of(r, c)];
            for (int k = 0; k < 4; ++k)
                entry[static_cast<std::size_t>(k)] =
                    static_cast<std::uint32_t>(ns[static_cast<std::size_t>(k)].row * cfg_.width +
                                               ns[static_cast<std::size_t>(k)].col);
        }
    }
}

void Lattice::set_states(const std::vector<AgentState>& states) {
    if (states.size() != states_.size())
        throw std::invalid_argument("Lattice::set_states: size mismatch");
    states_ = states;
}

void InitScheme::validate() const {
    if (kind != Kind::Custom) {
        if (!weights.empty())
            throw std::invalid_argument("InitScheme: weights are only valid for the custom scheme");
        return;
    }
    if (weights.size() != static_cast<std::size_t>(kAlphaLevelCount))
        throw std::invalid_argument("InitScheme: custom weights need " +
                                    std::to_string(kAlphaLevelCount) + " entries, got " +
                                    std::to_string(weights.size()));
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0))
            throw std::invalid_argument("InitScheme: custom weights must be non-negative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("InitScheme: custom weights must sum to 1 (got " +
                                    std::to_string(sum) + ")");
}

namespace {

AlphaLevel draw_alpha(const InitScheme& scheme, RngStream& rng) {
    switch (scheme.kind) {
        case InitScheme::Kind::PD:
            return AlphaLevel{0};
        case InitScheme::Kind::OPD:
            return AlphaLevel{rng.next_below(2) == 0
                                  ? std::uint8_t{0}
                                  : static_cast<std::uint8_t>(2 * kKappa)};
        case InitScheme::Kind::PDPA:
            return AlphaLevel{static_cast<std::uint8_t>(
                rng.next_below(static_cast<std::uint64_t>(kAlphaLevelCount)))};
        case InitScheme::Kind::Custom: {
            const double u = rng.next_u01();
            double cum = 0.0;
            for (int lvl = 0; lvl < kAlphaLevelCount; ++lvl) {
                cum += scheme.weights[static_cast<std::size_t>(lvl)];
                if (u < cum) return AlphaLevel{static_cast<std::uint8_t>(lvl)};
            }
            // u landed beyond the accumulated sum (rounding); take the last
            // positive-weight level.
            for (int lvl = kAlphaLevelCount - 1; lvl >= 0; --lvl)
                if (scheme.weights[static_cast<std::size_t>(lvl)] > 0.0)
                    return AlphaLevel{static_cast<std::uint8_t>(lvl)};
            return AlphaLevel{static_cast<std::uint8_t>(kAlphaLevelCount - 1)};
        }
    }
    throw std::logic_error("draw_alpha: unreachable");
}

} // namespace

Lattice initialize(const InitScheme& scheme, const LatticeConfig& cfg, RngStream& rng) {
    scheme.validate();
    cfg.validate();
    Lattice lat(cfg);
    const int n = lat.size();
    for (int i = 0; i < n; ++i) {
        AgentState& a = lat.at(i);
        a.strategy = rng.next_below(2) == 0 ? Strategy::Cooperate : Strategy::Defect;
        a.alpha = draw_alpha(scheme, rng);
    }
    return lat;
}

} // namespace pdpa
