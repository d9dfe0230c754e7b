#include "chaincomm/simulate.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace chaincomm {

std::int64_t default_burn_in(const ModelParams& params) {
    constexpr double eps = 1e-6;
    const double rate = std::log(1.0 / (1.0 - params.lambda));
    return static_cast<std::int64_t>(std::ceil((std::log(params.n) - std::log(eps)) / rate));
}

Trajectory::Trajectory(int n, std::int64_t t_samples, std::uint64_t env_seed,
                       std::uint64_t sim_seed)
    : n_(n),
      t_(t_samples),
      words_per_row_((n + 63) / 64),
      env_seed_(env_seed),
      sim_seed_(sim_seed),
      words_(static_cast<std::size_t>(t_samples) * words_per_row_, 0) {}

void Trajectory::set_row(std::int64_t t, std::span<const std::uint8_t> state) {
    std::uint64_t* row = mutable_row(t);
    for (int w = 0; w < words_per_row_; ++w) row[w] = 0;
    for (int i = 0; i < n_; ++i)
        if (state[i]) row[i / 64] |= std::uint64_t{1} << (i % 64);
}

int Trajectory::row_popcount(std::int64_t t) const {
    int count = 0;
    for (std::uint64_t word : row(t)) count += std::popcount(word);
    return count;
}

namespace {

// Column-compressed adjacency: flipping x_j touches exactly the rows i with
// theta_ij = 1, shifting the integer drive S_i by label(j) * delta_x_j.
struct DriveContext {
    int n = 0;
    double mu = 0;
    double scale = 0;  // (1-lambda)/N
    std::vector<std::int32_t> col_start;
    std::vector<std::int32_t> col_rows;
    std::int64_t edges = 0;

    explicit DriveContext(const Environment& env) {
        n = env.n();
        mu = env.params.mu();
        scale = (1.0 - env.params.lambda) / n;
        edges = env.edge_count();
        col_start.assign(n + 1, 0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (env.theta_at(i, j)) ++col_start[j + 1];
        for (int j = 0; j < n; ++j) col_start[j + 1] += col_start[j];
        col_rows.resize(static_cast<std::size_t>(edges));
        std::vector<std::int32_t> fill(col_start.begin(), col_start.end() - 1);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (env.theta_at(i, j)) col_rows[fill[j]++] = i;
    }

    // S_i = sum_{j in P+} theta_ij x_j + sum_{j in P-} theta_ij (1-x_j)
    void recompute(const Environment& env, std::span<const std::uint8_t> x,
                   std::vector<std::int32_t>& drive) const {
        drive.assign(n, 0);
        for (int j = 0; j < n; ++j) {
            const bool counts = env.layout.labels[j] > 0 ? x[j] != 0 : x[j] == 0;
            if (!counts) continue;
            for (std::int32_t k = col_start[j]; k < col_start[j + 1]; ++k) ++drive[col_rows[k]];
        }
    }
};

}  // namespace

Eigen::VectorXd transition_probs(const Environment& env, std::span<const std::uint8_t> state) {
    const int n = env.n();
    if (static_cast<int>(state.size()) != n)
        throw std::invalid_argument("transition_probs: state length does not match environment");
    const double mu = env.params.mu();
    const double scale = (1.0 - env.params.lambda) / n;
    Eigen::VectorXd probs(n);
    for (int i = 0; i < n; ++i) {
        std::int32_t s = 0;
        const std::uint8_t* row = env.theta.data() + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j)
            if (row[j]) s += env.layout.labels[j] > 0 ? state[j] : (1 - state[j]);
        probs[i] = mu + scale * s;
    }
    return probs;
}

std::vector<std::uint8_t> step(const Environment& env, std::span<const std::uint8_t> state,
                               Rng& rng) {
    const Eigen::VectorXd probs = transition_probs(env, state);
    std::vector<std::uint8_t> next(env.n());
    for (int i = 0; i < env.n(); ++i) next[i] = bernoulli(rng, probs[i]) ? 1 : 0;
    return next;
}

Trajectory simulate(const Environment& env, const SimConfig& config, SimStats* stats) {
    if (config.t_samples < 1) throw std::invalid_argument("simulate: t_samples must be >= 1");
    const int n = env.n();
    const std::int64_t burn_in =
        config.burn_in >= 0 ? config.burn_in : default_burn_in(env.params);

    const DriveContext ctx(env);
    Rng rng = make_rng(config.seed);

    // Start near stationarity: iid Bernoulli(m).
    const double m = theoretical_constants(env.params).m;
    std::vector<std::uint8_t> x(n), y(n);
    for (int i = 0; i < n; ++i) x[i] = bernoulli(rng, m) ? 1 : 0;

    std::vector<std::int32_t> drive;
    ctx.recompute(env, x, drive);

    SimStats local;
    local.edges = ctx.edges;
    std::vector<std::int32_t> flipped;
    flipped.reserve(n);

    Trajectory traj(n, config.t_samples, env.seed, config.seed);
    const std::int64_t total = burn_in + config.t_samples;
    for (std::int64_t t = 0; t < total; ++t) {
        for (int i = 0; i < n; ++i) {
            const double p_i = ctx.mu + ctx.scale * drive[i];
            y[i] = unit_double(rng) < p_i ? 1 : 0;
        }
        flipped.clear();
        for (int j = 0; j < n; ++j)
            if (y[j] != x[j]) flipped.push_back(j);

        if (flipped.size() > static_cast<std::size_t>(n) / 2) {
            x.swap(y);
            ctx.recompute(env, x, drive);
            ++local.full_recomputes;
            local.drive_add_ops += static_cast<std::uint64_t>(ctx.edges);
        } else {
            for (const int j : flipped) {
                const std::int32_t delta =
                    env.layout.labels[j] > 0 ? (y[j] ? 1 : -1) : (y[j] ? -1 : 1);
                for (std::int32_t k = ctx.col_start[j]; k < ctx.col_start[j + 1]; ++k)
                    drive[ctx.col_rows[k]] += delta;
                local.drive_add_ops +=
                    static_cast<std::uint64_t>(ctx.col_start[j + 1] - ctx.col_start[j]);
            }
            x.swap(y);
        }
        ++local.steps;
        if (t >= burn_in) traj.set_row(t - burn_in, x);
    }
    if (stats) *stats = local;
    return traj;
}

TrajectorySummary summarize(const Trajectory& traj) {
    const int n = traj.n();
    const std::int64_t t_samples = traj.t();
    TrajectorySummary summary;
    summary.counts.assign(n, 0);
    summary.spatial_means.resize(t_samples);
    std::int64_t grand = 0;
    for (std::int64_t t = 0; t < t_samples; ++t) {
        int row_count = 0;
        const auto row = traj.row(t);
        for (int w = 0; w < traj.words_per_row(); ++w) {
            std::uint64_t word = row[w];
            row_count += std::popcount(word);
            while (word) {
                const int i = w * 64 + std::countr_zero(word);
                ++summary.counts[i];
                word &= word - 1;
            }
        }
        summary.spatial_means[t] = static_cast<double>(row_count) / n;
        grand += row_count;
    }
    summary.grand_mean = static_cast<double>(grand) / (static_cast<double>(n) * t_samples);
    return summary;
}

}  // namespace chaincomm
