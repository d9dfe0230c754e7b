#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chaincomm/estimate.hpp"
#include "chaincomm/model.hpp"

namespace chaincomm {

// One Monte Carlo study: a base parameter set plus at most one of
// n_grid (heatmap over N x T) or sweep (one parameter varying, per T).
struct ExperimentSpec {
    ModelParams base;
    std::vector<std::int64_t> t_grid;
    std::vector<int> n_grid;           // heatmap only
    std::string sweep_param;           // one of n, r_plus, beta, lambda, p; empty = none
    std::vector<double> sweep_values;
    int n_replicas = 1000;
    std::uint64_t master_seed = 0;
    std::int64_t burn_in = -1;         // -1 = simulator default
    int threads = 0;                   // 0 = hardware concurrency
};

struct CellResult {
    ModelParams params;
    std::int64_t t = 0;
    int n_replicas = 0;
    double per_hat = 0;     // fraction of replicas with exact recovery
    double per_stderr = 0;  // sqrt(per_hat (1-per_hat) / R)
    double mmp_hat = 0;     // mean misclassified fraction
    double mmp_std = 0;     // sample standard deviation of the fractions
    double wall_time_s = 0;
};

// One independent replica under the annealed law: a fresh environment and a
// fresh trajectory, both derived from replica_seed. A degenerate 2-means
// input (constant sigma_hat) counts as failed recovery with fraction
// min(|P+|,|P-|)/N.
RecoveryScore run_replica(const ModelParams& params, std::int64_t t_samples,
                          std::uint64_t replica_seed, std::int64_t burn_in = -1);

// R replicas with seeds hash64(master_seed, cell_index, r), scheduled across
// workers; results are stored per replica index, so aggregation does not
// depend on scheduling order.
CellResult run_cell(const ModelParams& params, std::int64_t t_samples, int replicas,
                    std::uint64_t master_seed, std::uint64_t cell_index, int threads = 0,
                    std::int64_t burn_in = -1);

// Full n_grid x t_grid Cartesian product, one CellResult per cell.
std::vector<CellResult> run_heatmap(const ExperimentSpec& spec);

// For each sweep value and each T, one CellResult. Throws on an unknown
// parameter name.
std::vector<CellResult> run_sweep(const ExperimentSpec& spec);

// Resolves the worker count: explicit > 0 wins, then the CHAINCOMM_THREADS
// environment variable, then hardware concurrency.
int resolve_threads(int requested);

}  // namespace chaincomm
