// Core domain types: strategies, the discretized abstention level, agents,
// the toroidal lattice with von Neumann adjacency, and population
// initialization.

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <vector>

#include "pdpa/rng.hpp"

namespace pdpa {

inline constexpr int kKappa = 4;                        // von Neumann degree
inline constexpr int kAlphaLevelCount = 2 * kKappa + 1; // levels 0/8 .. 8/8

// Indices into a site's neighbor array; this order is a frozen contract for
// utility accumulation and neighbor selection.
enum NeighborIndex : int { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };

enum class Strategy : std::uint8_t { Cooperate = 0, Defect = 1 };

// Numeric encoding s = 0 for cooperators, s = 1 for defectors; the
// effective-cooperation metric depends on it.
inline int strategy_code(Strategy s) noexcept {
    return s == Strategy::Defect ? 1 : 0;
}

// level/(2*kappa). General-degree helper; everything else runs at kKappa.
// Throws std::invalid_argument for kappa < 1, std::out_of_range for a level
// outside [0, 2*kappa].
double alpha_value(int level, int kappa);

// Exact binary doubles for the kKappa = 4 level set.
inline constexpr std::array<double, kAlphaLevelCount> kAlphaValues = {
    0.0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0};

struct AlphaLevel {
    std::uint8_t level = 0; // 0 .. 2*kKappa

    double value() const noexcept { return kAlphaValues[level]; }
    auto operator<=>(const AlphaLevel&) const = default;
};

struct AgentState {
    Strategy strategy = Strategy::Cooperate;
    AlphaLevel alpha = {};

    auto operator<=>(const AgentState&) const = default;
};

// epsilon = (1 - s)(1 - alpha); positive only for cooperators.
inline double effective_cooperation(const AgentState& a) noexcept {
    return a.strategy == Strategy::Defect ? 0.0 : 1.0 - a.alpha.value();
}

struct Site {
    int row = 0;
    int col = 0;
    auto operator<=>(const Site&) const = default;
};

struct LatticeConfig {
    int width = 102;
    int height = 102;

    int site_count() const noexcept { return width * height; }
    void validate() const; // throws std::invalid_argument unless both >= 3
    auto operator<=>(const LatticeConfig&) const = default;
};

// The four orthogonal neighbors with periodic wrap, in (up, down, left,
// right) order.
std::array<Site, 4> neighbor_sites(const LatticeConfig& cfg, Site site);

// Toroidal grid of agents, row-major. The neighbor index table is built once
// at construction; adjacency never changes.
class Lattice {
public:
    explicit Lattice(LatticeConfig cfg, AgentState fill = {});

    const LatticeConfig& config() const noexcept { return cfg_; }
    int size() const noexcept { return static_cast<int>(states_.size()); }

    AgentState& at(int idx) { return states_[static_cast<std::size_t>(idx)]; }
    const AgentState& at(int idx) const { return states_[static_cast<std::size_t>(idx)]; }
    AgentState& at(int row, int col) { return states_[index_of(row, col)]; }
    const AgentState& at(int row, int col) const { return states_[index_of(row, col)]; }

    const std::array<std::uint32_t, 4>& neighbors(int idx) const {
        return nbrs_[static_cast<std::size_t>(idx)];
    }

    const std::vector<AgentState>& states() const noexcept { return states_; }
    void set_states(const std::vector<AgentState>& states);

    bool operator==(const Lattice& other) const {
        return cfg_ == other.cfg_ && states_ == other.states_;
    }

private:
    std::size_t index_of(int row, int col) const noexcept {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(cfg_.width) +
               static_cast<std::size_t>(col);
    }

    LatticeConfig cfg_;
    std::vector<AgentState> states_;
    std::vector<std::array<std::uint32_t, 4>> nbrs_;
};

struct InitScheme {
    enum class Kind { PD, OPD, PDPA, Custom };

    Kind kind = Kind::PDPA;
    std::vector<double> weights; // Custom only: kAlphaLevelCount entries

    static InitScheme pd() { return {Kind::PD, {}}; }
    static InitScheme opd() { return {Kind::OPD, {}}; }
    static InitScheme pdpa() { return {Kind::PDPA, {}}; }
    static InitScheme custom(std::vector<double> w) { return {Kind::Custom, std::move(w)}; }

    // Custom weights must have one entry per level, be non-negative, and sum
    // to 1 within 1e-12.
    void validate() const;
    bool operator==(const InitScheme&) const = default;
};

// Populates a lattice. Draw order is a frozen reproducibility contract:
// sites in row-major order; per site one strategy draw (next_below(2),
// 0 = cooperate), then the alpha draw for the scheme:
//   PD     - level 0, no draw
//   OPD    - next_below(2): 0 -> level 0, 1 -> level 2*kKappa
//   PDPA   - next_below(kAlphaLevelCount) picks the level directly
//   Custom - one next_u01() against the cumulative weight table
Lattice initialize(const InitScheme& scheme, const LatticeConfig& cfg, RngStream& rng);

} // namespace pdpa
