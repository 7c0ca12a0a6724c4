#include "pdpa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pdpa {

PopulationStats population_stats(const Lattice& lat, std::int64_t step) {
    PopulationStats st;
    st.step = step;

    const int n = lat.size();
    std::array<std::array<std::int64_t, kAlphaLevelCount>, 2> counts{};
    KahanSum eps_sum;
    KahanSum alpha_sum;
    for (int i = 0; i < n; ++i) {
        const AgentState& a = lat.at(i);
        counts[static_cast<std::size_t>(strategy_code(a.strategy))][a.alpha.level] += 1;
        eps_sum.add(effective_cooperation(a));
        alpha_sum.add(a.alpha.value());
    }

    const double inv_n = 1.0 / static_cast<double>(n);
    st.mean_epsilon = eps_sum.sum * inv_n;
    st.mean_alpha = alpha_sum.sum * inv_n;

    std::int64_t coop = 0;
    for (int s = 0; s < 2; ++s) {
        for (int lvl = 0; lvl < kAlphaLevelCount; ++lvl) {
            const auto c = counts[static_cast<std::size_t>(s)][static_cast<std::size_t>(lvl)];
            const double f = static_cast<double>(c) * inv_n;
            st.joint_histogram[static_cast<std::size_t>(s)][static_cast<std::size_t>(lvl)] = f;
            st.alpha_histogram[static_cast<std::size_t>(lvl)] += f;
            if (s == 0) coop += c;
        }
    }
    st.frac_cooperate = static_cast<double>(coop) * inv_n;
    st.frac_defect = static_cast<double>(n - coop) * inv_n;
    return st;
}

int alpha_support_count(const PopulationStats& stats, double threshold) {
    int count = 0;
    for (double f : stats.alpha_histogram)
        if (f > threshold) ++count;
    return count;
}

SnapshotSet snapshot(const Lattice& lat, std::int64_t step) {
    SnapshotSet s;
    s.step = step;
    s.width = lat.config().width;
    s.height = lat.config().height;
    const int n = lat.size();
    s.epsilon.resize(static_cast<std::size_t>(n));
    s.alpha.resize(static_cast<std::size_t>(n));
    s.strategy.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const AgentState& a = lat.at(i);
        s.epsilon[static_cast<std::size_t>(i)] = effective_cooperation(a);
        s.alpha[static_cast<std::size_t>(i)] = a.alpha.value();
        s.strategy[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(strategy_code(a.strategy));
    }
    return s;
}

void SamplingSpec::validate() const {
    if (mode == SamplingMode::EveryK && k < 1)
        throw std::invalid_argument("SamplingSpec: every-k stride must be >= 1");
}

std::vector<std::int64_t> sampling_schedule(std::int64_t step_count, const SamplingSpec& spec) {
    if (step_count < 0) throw std::invalid_argument("sampling_schedule: step_count must be >= 0");
    spec.validate();

    std::vector<std::int64_t> out;
    switch (spec.mode) {
        case SamplingMode::All:
            out.reserve(static_cast<std::size_t>(step_count) + 1);
            for (std::int64_t t = 0; t <= step_count; ++t) out.push_back(t);
            break;
        case SamplingMode::EveryK:
            for (std::int64_t t = 0; t <= step_count; t += spec.k) out.push_back(t);
            break;
        case SamplingMode::DenseEarly: {
            const std::int64_t dense_limit = std::min<std::int64_t>(step_count, 1000);
            out.reserve(static_cast<std::size_t>(dense_limit) + 256);
            for (std::int64_t t = 0; t <= dense_limit; ++t) out.push_back(t);
            // ~50 points per decade past 10^3. Repeated multiplication by a
            // fixed constant plus llround: IEEE-deterministic, no libm.
            constexpr double kDecadeStep = 1.0471285480508996; // 10^(1/50)
            double x = 1000.0;
            while (true) {
                x *= kDecadeStep;
                const std::int64_t t = std::llround(x);
                if (t > step_count) break;
                if (t > out.back()) out.push_back(t);
            }
            break;
        }
    }
    if (out.back() != step_count) out.push_back(step_count);
    return out;
}

PopulationStats trailing_window_average(const std::vector<PopulationStats>& series,
                                        std::int64_t window) {
    if (series.empty())
        throw std::invalid_argument("trailing_window_average: series is empty");
    if (window < 1) throw std::invalid_argument("trailing_window_average: window must be >= 1");

    const std::int64_t final_step = series.back().step;
    PopulationStats avg;
    avg.step = final_step;
    int used = 0;
    for (const auto& st : series) {
        if (st.step <= final_step - window) continue;
        ++used;
        avg.mean_epsilon += st.mean_epsilon;
        avg.mean_alpha += st.mean_alpha;
        avg.frac_cooperate += st.frac_cooperate;
        avg.frac_defect += st.frac_defect;
        for (int lvl = 0; lvl < kAlphaLevelCount; ++lvl) {
            avg.alpha_histogram[static_cast<std::size_t>(lvl)] +=
                st.alpha_histogram[static_cast<std::size_t>(lvl)];
            for (int s = 0; s < 2; ++s)
                avg.joint_histogram[static_cast<std::size_t>(s)][static_cast<std::size_t>(lvl)] +=
                    st.joint_histogram[static_cast<std::size_t>(s)][static_cast<std::size_t>(lvl)];
        }
    }
    const double inv = 1.0 / static_cast<double>(used);
    avg.mean_epsilon *= inv;
    avg.mean_alpha *= inv;
    avg.frac_cooperate *= inv;
    avg.frac_defect *= inv;
    for (int lvl = 0; lvl < kAlphaLevelCount; ++lvl) {
        avg.alpha_histogram[static_cast<std::size_t>(lvl)] *= inv;
        for (int s = 0; s < 2; ++s)
            avg.joint_histogram[static_cast<std::size_t>(s)][static_cast<std::size_t>(lvl)] *= inv;
    }
    return avg;
}

} // namespace pdpa
