// Population-level observables, sampling schedules, and lattice snapshots.

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "pdpa/model.hpp"

namespace pdpa {

// Kahan compensated accumulator; keeps population means exact-enough for
// lattices up to 10^6 sites.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double v) noexcept {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

struct PopulationStats {
    std::int64_t step = 0;
    double mean_epsilon = 0.0;
    double mean_alpha = 0.0;
    double frac_cooperate = 0.0;
    double frac_defect = 0.0;
    std::array<double, kAlphaLevelCount> alpha_histogram{};
    // joint_histogram[s][level]: frequency of (strategy s, alpha level).
    std::array<std::array<double, kAlphaLevelCount>, 2> joint_histogram{};

    bool operator==(const PopulationStats&) const = default;
};

PopulationStats population_stats(const Lattice& lat, std::int64_t step);

// Number of alpha levels currently present with frequency > threshold.
int alpha_support_count(const PopulationStats& stats, double threshold = 0.0);

// Aligned per-site grids (row-major) of epsilon, alpha, and strategy code.
struct SnapshotSet {
    std::int64_t step = 0;
    int width = 0;
    int height = 0;
    std::vector<double> epsilon;
    std::vector<double> alpha;
    std::vector<std::uint8_t> strategy;

    bool operator==(const SnapshotSet&) const = default;
};

SnapshotSet snapshot(const Lattice& lat, std::int64_t step);

enum class SamplingMode { DenseEarly, EveryK, All };

struct SamplingSpec {
    SamplingMode mode = SamplingMode::DenseEarly;
    std::int64_t k = 1; // EveryK stride

    static SamplingSpec dense_early() { return {SamplingMode::DenseEarly, 1}; }
    static SamplingSpec every_k(std::int64_t k) { return {SamplingMode::EveryK, k}; }
    static SamplingSpec all() { return {SamplingMode::All, 1}; }

    void validate() const;
    bool operator==(const SamplingSpec&) const = default;
};

// Strictly increasing recording steps, always containing 0 and step_count.
// DenseEarly records every step up to 10^3, then geometrically spaced points
// (about 50 per decade, built by repeated multiplication so the schedule is
// platform-independent).
std::vector<std::int64_t> sampling_schedule(std::int64_t step_count, const SamplingSpec& spec);

// Mean of the samples recorded in the trailing window (step > final_step -
// window). Analysis helper; the canonical stationary measurement is the
// final sample itself.
PopulationStats trailing_window_average(const std::vector<PopulationStats>& series,
                                        std::int64_t window);

} // namespace pdpa
