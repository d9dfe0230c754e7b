#include "chaincomm/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "chaincomm/rng.hpp"
#include "chaincomm/simulate.hpp"

namespace chaincomm {

RecoveryScore run_replica(const ModelParams& params, std::int64_t t_samples,
                          std::uint64_t replica_seed, std::int64_t burn_in) {
    const CommunityLayout layout = build_layout(params);
    const Environment env = sample_environment(params, layout, hash64(replica_seed, 1));
    SimConfig config;
    config.t_samples = t_samples;
    config.burn_in = burn_in;
    config.seed = hash64(replica_seed, 2);
    const Trajectory traj = simulate(env, config);
    const TrajectorySummary summary = summarize(traj);
    try {
        const RecoveryResult rec = recover(traj, summary);
        return score(rec.labels_hat, layout);
    } catch (const degenerate_values_error&) {
        RecoveryScore failed;
        failed.exact = false;
        failed.misclassified_fraction =
            static_cast<double>(std::min(layout.plus_count, layout.minus_count())) / params.n;
        return failed;
    }
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("CHAINCOMM_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

CellResult run_cell(const ModelParams& params, std::int64_t t_samples, int replicas,
                    std::uint64_t master_seed, std::uint64_t cell_index, int threads,
                    std::int64_t burn_in) {
    if (replicas < 1) throw std::invalid_argument("run_cell: replicas must be >= 1");
    const auto start = std::chrono::steady_clock::now();

    std::vector<RecoveryScore> scores(replicas);
    const int workers = std::min(resolve_threads(threads), replicas);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int r = next.fetch_add(1); r < replicas; r = next.fetch_add(1))
            scores[r] = run_replica(params, t_samples, hash64(master_seed, cell_index, r), burn_in);
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // Aggregate in replica-index order: identical output for any scheduling.
    CellResult cell;
    cell.params = params;
    cell.t = t_samples;
    cell.n_replicas = replicas;
    int exact_count = 0;
    double frac_sum = 0;
    for (const RecoveryScore& s : scores) {
        exact_count += s.exact ? 1 : 0;
        frac_sum += s.misclassified_fraction;
    }
    cell.per_hat = static_cast<double>(exact_count) / replicas;
    cell.per_stderr = std::sqrt(cell.per_hat * (1.0 - cell.per_hat) / replicas);
    cell.mmp_hat = frac_sum / replicas;
    if (replicas > 1) {
        double ss = 0;
        for (const RecoveryScore& s : scores) {
            const double d = s.misclassified_fraction - cell.mmp_hat;
            ss += d * d;
        }
        cell.mmp_std = std::sqrt(ss / (replicas - 1));
    }
    cell.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return cell;
}

std::vector<CellResult> run_heatmap(const ExperimentSpec& spec) {
    if (spec.n_grid.empty() || spec.t_grid.empty())
        throw std::invalid_argument("run_heatmap: n_grid and t_grid must be non-empty");
    std::vector<CellResult> cells;
    cells.reserve(spec.n_grid.size() * spec.t_grid.size());
    std::uint64_t cell_index = 0;
    for (const int n : spec.n_grid) {
        ModelParams params = spec.base;
        params.n = n;
        validate_params(params);
        for (const std::int64_t t : spec.t_grid)
            cells.push_back(run_cell(params, t, spec.n_replicas, spec.master_seed, cell_index++,
                                     spec.threads, spec.burn_in));
    }
    return cells;
}

std::vector<CellResult> run_sweep(const ExperimentSpec& spec) {
    if (spec.sweep_values.empty() || spec.t_grid.empty())
        throw std::invalid_argument("run_sweep: sweep values and t_grid must be non-empty");
    std::vector<CellResult> cells;
    cells.reserve(spec.sweep_values.size() * spec.t_grid.size());
    std::uint64_t cell_index = 0;
    for (const double value : spec.sweep_values) {
        ModelParams params = spec.base;
        if (spec.sweep_param == "n") {
            params.n = static_cast<int>(std::llround(value));
        } else if (spec.sweep_param == "r_plus") {
            params.r_plus = value;
        } else if (spec.sweep_param == "beta") {
            params.beta = value;
        } else if (spec.sweep_param == "lambda") {
            params.lambda = value;
        } else if (spec.sweep_param == "p") {
            params.p = value;
        } else {
            throw std::invalid_argument("run_sweep: unknown parameter '" + spec.sweep_param + "'");
        }
        validate_params(params);
        for (const std::int64_t t : spec.t_grid)
            cells.push_back(run_cell(params, t, spec.n_replicas, spec.master_seed, cell_index++,
                                     spec.threads, spec.burn_in));
    }
    return cells;
}

}  // namespace chaincomm
