#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "chaincomm/model.hpp"
#include "chaincomm/rng.hpp"

namespace chaincomm {

struct SimConfig {
    std::int64_t t_samples = 0;  // retained steps, >= 1 (>= 2 to feed the estimator)
    std::int64_t burn_in = -1;   // discarded steps; -1 selects default_burn_in(params)
    std::uint64_t seed = 0;
};

// ceil((ln N + ln 1e6) / ln(1/(1-lambda))): the coordinatewise conditional
// law is (1-lambda)-Lipschitz in the conditioning state, so N(1-lambda)^B
// bounds the coupling distance from stationarity.
std::int64_t default_burn_in(const ModelParams& params);

// T consecutive configurations, one bit per component, rows packed in 64-bit
// words. The semantic contract is just "binary T x N array"; packing is an
// internal layout choice.
class Trajectory {
public:
    Trajectory() = default;
    Trajectory(int n, std::int64_t t_samples, std::uint64_t env_seed, std::uint64_t sim_seed);

    int n() const { return n_; }
    std::int64_t t() const { return t_; }
    int words_per_row() const { return words_per_row_; }
    std::uint64_t env_seed() const { return env_seed_; }
    std::uint64_t sim_seed() const { return sim_seed_; }

    bool at(std::int64_t t, int i) const {
        const std::uint64_t word = words_[static_cast<std::size_t>(t) * words_per_row_ + i / 64];
        return (word >> (i % 64)) & 1u;
    }
    std::span<const std::uint64_t> row(std::int64_t t) const {
        return {words_.data() + static_cast<std::size_t>(t) * words_per_row_,
                static_cast<std::size_t>(words_per_row_)};
    }
    void set_row(std::int64_t t, std::span<const std::uint8_t> state);
    int row_popcount(std::int64_t t) const;

    std::span<const std::uint64_t> raw_words() const { return words_; }
    std::uint64_t* mutable_row(std::int64_t t) {
        return words_.data() + static_cast<std::size_t>(t) * words_per_row_;
    }

private:
    int n_ = 0;
    std::int64_t t_ = 0;
    int words_per_row_ = 0;
    std::uint64_t env_seed_ = 0;
    std::uint64_t sim_seed_ = 0;
    std::vector<std::uint64_t> words_;
};

struct TrajectorySummary {
    std::vector<std::int64_t> counts;  // Z_i = sum_t X_{i,t}
    Eigen::VectorXd spatial_means;     // Xbar_t, length T
    double grand_mean = 0.0;           // (TN)^-1 sum_{i,t} X_{i,t}
};

// p_theta(x) = mu 1 + (1-lambda)(A x - A 1_{P-}); every entry lies in
// [mu, mu + (1-lambda)]. Computed through the integer drive
// sum_{j in P+} theta_ij x_j + sum_{j in P-} theta_ij (1-x_j), which equals
// the matrix form exactly.
Eigen::VectorXd transition_probs(const Environment& env, std::span<const std::uint8_t> state);

// One kernel draw: coordinates are independent Bernoulli(transition_probs).
// Coordinate i consumes the i-th draw of the stream, matching simulate().
std::vector<std::uint8_t> step(const Environment& env, std::span<const std::uint8_t> state,
                               Rng& rng);

// Counters for the throughput contract: incremental per-flip column updates,
// falling back to a full O(E) recompute when more than half the coordinates
// changed. Total drive work per step never exceeds E.
struct SimStats {
    std::int64_t edges = 0;
    std::uint64_t drive_add_ops = 0;     // column-list entries touched
    std::uint64_t full_recomputes = 0;   // steps that took the O(E) path
    std::uint64_t steps = 0;
};

// Runs burn_in discarded steps from an iid Bernoulli(m) start, then records
// t_samples steps. Deterministic in (env, config).
Trajectory simulate(const Environment& env, const SimConfig& config, SimStats* stats = nullptr);

TrajectorySummary summarize(const Trajectory& traj);

}  // namespace chaincomm
