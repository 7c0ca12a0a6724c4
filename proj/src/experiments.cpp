#include "pdpa/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace pdpa {

std::vector<std::string> SweepSpec::validate() const {
    if (replicates < 1) throw std::invalid_argument("SweepSpec: replicates must be >= 1");
    if (t_values.empty() || l_values.empty())
        throw std::invalid_argument("SweepSpec: T and L value lists must be non-empty");
    for (std::size_t i = 1; i < t_values.size(); ++i)
        if (!(t_values[i] > t_values[i - 1]))
            throw std::invalid_argument("SweepSpec: T values must be strictly increasing");
    for (std::size_t i = 1; i < l_values.size(); ++i)
        if (!(l_values[i] > l_values[i - 1]))
            throw std::invalid_argument("SweepSpec: L values must be strictly increasing");

    // Validate every grid cell's parameter ranges once, up front.
    std::vector<std::string> warnings;
    for (double t : t_values) {
        for (double l : l_values) {
            RunConfig cfg = base;
            cfg.game.T = t;
            cfg.game.L = l;
            for (auto& w : cfg.validate()) warnings.push_back(std::move(w));
        }
    }
    for (const auto& s : schemes) s.validate();
    return warnings;
}

int resolve_worker_count(int requested) {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    int workers = requested > 0 ? requested : hw;
    if (const char* env = std::getenv("PDPA_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0 && v < 1 << 20)
            workers = std::min(workers, static_cast<int>(v));
    }
    return std::max(1, workers);
}

namespace {

struct ReplicateOutcome {
    double eps = 0.0;
    double alpha = 0.0;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;
};

ReplicateOutcome run_one(RunConfig cfg, double T, double L, std::uint64_t seed) {
    ReplicateOutcome out;
    out.seed = seed;
    try {
        cfg.game.T = T;
        cfg.game.L = L;
        cfg.seed = seed;
        const SimResult res = run_simulation(cfg);
        out.eps = res.series.back().mean_epsilon;
        out.alpha = res.series.back().mean_alpha;
    } catch (const std::exception& e) {
        out.failed = true;
        out.error = e.what();
    }
    return out;
}

// Index-partitioned work queue; fn(i) must not throw.
template <typename Fn>
void run_task_pool(int tasks, int workers, Fn&& fn) {
    workers = std::max(1, std::min(workers, tasks));
    if (workers == 1) {
        for (int i = 0; i < tasks; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    auto work = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= tasks) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
}

// Reduces one cell's replicate outcomes in index order.
CellAggregate aggregate_cell(double T, double L, const std::vector<ReplicateOutcome>& reps) {
    for (const auto& r : reps)
        if (r.failed)
            throw std::runtime_error("replicate with seed " + std::to_string(r.seed) +
                                     " failed: " + r.error);

    CellAggregate cell;
    cell.T = T;
    cell.L = L;
    cell.replicates = static_cast<int>(reps.size());
    cell.raw_epsilon.reserve(reps.size());
    cell.raw_alpha.reserve(reps.size());
    double sum_e = 0.0, sum_a = 0.0;
    for (const auto& r : reps) {
        cell.raw_epsilon.push_back(r.eps);
        cell.raw_alpha.push_back(r.alpha);
        sum_e += r.eps;
        sum_a += r.alpha;
    }
    const double n = static_cast<double>(reps.size());
    cell.mean_epsilon = sum_e / n;
    cell.mean_alpha = sum_a / n;
    if (reps.size() > 1) {
        double ss_e = 0.0, ss_a = 0.0;
        for (const auto& r : reps) {
            ss_e += (r.eps - cell.mean_epsilon) * (r.eps - cell.mean_epsilon);
            ss_a += (r.alpha - cell.mean_alpha) * (r.alpha - cell.mean_alpha);
        }
        cell.se_epsilon = std::sqrt(ss_e / (n - 1.0) / n);
        cell.se_alpha = std::sqrt(ss_a / (n - 1.0) / n);
    }
    return cell;
}

// One sweep cell: a (config, T, L) triple plus the seed-derivation indices.
struct CellTask {
    const RunConfig* cfg;
    double T;
    double L;
    std::uint64_t master;
    int t_index;
    int l_index;
};

// Runs all cells' replicates through one flat task pool and reduces per
// cell. Progress fires once per completed cell, serialized.
std::vector<CellAggregate> run_cells(const std::vector<CellTask>& cells, int replicates,
                                     int workers, const ProgressFn& progress) {
    const int n_cells = static_cast<int>(cells.size());
    const int tasks = n_cells * replicates;
    std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(tasks));
    std::vector<std::atomic<int>> remaining(static_cast<std::size_t>(n_cells));
    for (auto& r : remaining) r.store(replicates);
    std::atomic<int> cells_done{0};
    std::mutex progress_mutex;

    run_task_pool(tasks, workers, [&](int i) {
        const int c = i / replicates;
        const int rep = i % replicates;
        const CellTask& cell = cells[static_cast<std::size_t>(c)];
        const std::uint64_t seed =
            derive_seed(cell.master, static_cast<std::uint64_t>(cell.t_index),
                        static_cast<std::uint64_t>(cell.l_index), static_cast<std::uint64_t>(rep));
        outcomes[static_cast<std::size_t>(i)] = run_one(*cell.cfg, cell.T, cell.L, seed);
        if (remaining[static_cast<std::size_t>(c)].fetch_sub(1) == 1) {
            const int done = cells_done.fetch_add(1) + 1;
            if (progress) {
                std::lock_guard<std::mutex> lock(progress_mutex);
                progress(done, n_cells);
            }
        }
    });

    std::vector<CellAggregate> result;
    result.reserve(cells.size());
    for (int c = 0; c < n_cells; ++c) {
        const auto first = outcomes.begin() + static_cast<std::ptrdiff_t>(c) * replicates;
        std::vector<ReplicateOutcome> reps(first, first + replicates);
        result.push_back(aggregate_cell(cells[static_cast<std::size_t>(c)].T,
                                        cells[static_cast<std::size_t>(c)].L, reps));
    }
    return result;
}

} // namespace

CellAggregate run_replicates(const RunConfig& cfg, int replicates, std::uint64_t master_seed,
                             int workers, int t_index, int l_index) {
    if (replicates < 1) throw std::invalid_argument("run_replicates: replicates must be >= 1");
    const std::vector<CellTask> cells{{&cfg, cfg.game.T, cfg.game.L, master_seed, t_index, l_index}};
    return run_cells(cells, replicates, workers, {}).front();
}

std::vector<TemptationRow> sweep_temptation(const SweepSpec& spec, int workers,
                                            ProgressFn progress) {
    spec.validate();
    if (spec.l_values.size() != 1)
        throw std::invalid_argument("sweep_temptation: L list must be a singleton");
    const double L = spec.l_values.front();

    const std::vector<InitScheme> schemes =
        spec.schemes.empty() ? std::vector<InitScheme>{spec.base.scheme} : spec.schemes;
    const std::vector<UpdateRule> rules =
        spec.rules.empty() ? std::vector<UpdateRule>{spec.base.rule} : spec.rules;

    // One base config per setup; cells reference them by pointer.
    std::vector<RunConfig> setup_cfgs;
    std::vector<std::uint64_t> setup_masters;
    setup_cfgs.reserve(schemes.size() * rules.size());
    for (std::size_t si = 0; si < schemes.size(); ++si) {
        for (std::size_t ri = 0; ri < rules.size(); ++ri) {
            RunConfig cfg = spec.base;
            cfg.scheme = schemes[si];
            cfg.rule = rules[ri];
            setup_cfgs.push_back(std::move(cfg));
            setup_masters.push_back(derive_seed(spec.master_seed, si, ri, 0));
        }
    }

    std::vector<CellTask> cells;
    cells.reserve(setup_cfgs.size() * spec.t_values.size());
    for (std::size_t s = 0; s < setup_cfgs.size(); ++s)
        for (std::size_t ti = 0; ti < spec.t_values.size(); ++ti)
            cells.push_back({&setup_cfgs[s], spec.t_values[ti], L, setup_masters[s],
                             static_cast<int>(ti), 0});

    auto aggregates = run_cells(cells, spec.replicates, workers, progress);

    std::vector<TemptationRow> rows;
    rows.reserve(aggregates.size());
    std::size_t c = 0;
    for (const auto& cfg : setup_cfgs)
        for (std::size_t ti = 0; ti < spec.t_values.size(); ++ti, ++c)
            rows.push_back({cfg.scheme, cfg.rule, std::move(aggregates[c])});
    return rows;
}

TlSweepResult sweep_tl(const SweepSpec& spec, int workers, ProgressFn progress) {
    spec.validate();

    std::vector<CellTask> cells;
    cells.reserve(spec.l_values.size() * spec.t_values.size());
    for (std::size_t li = 0; li < spec.l_values.size(); ++li)
        for (std::size_t ti = 0; ti < spec.t_values.size(); ++ti)
            cells.push_back({&spec.base, spec.t_values[ti], spec.l_values[li], spec.master_seed,
                             static_cast<int>(ti), static_cast<int>(li)});

    TlSweepResult result;
    result.t_values = spec.t_values;
    result.l_values = spec.l_values;
    result.cells = run_cells(cells, spec.replicates, workers, progress);
    return result;
}

std::vector<double> TlSweepResult::epsilon_matrix() const {
    std::vector<double> m;
    m.reserve(cells.size());
    for (const auto& c : cells) m.push_back(c.mean_epsilon);
    return m;
}

std::vector<double> TlSweepResult::alpha_matrix() const {
    std::vector<double> m;
    m.reserve(cells.size());
    for (const auto& c : cells) m.push_back(c.mean_alpha);
    return m;
}

std::vector<double> sweep_axis(double first, double last, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("sweep_axis: step must be > 0");
    if (!(last >= first)) throw std::invalid_argument("sweep_axis: last must be >= first");
    const int count = static_cast<int>(std::llround((last - first) / step)) + 1;
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double v = first + static_cast<double>(i) * step;
        if (v > last + step * 0.5) break;
        values.push_back(v);
    }
    return values;
}

} // namespace pdpa
