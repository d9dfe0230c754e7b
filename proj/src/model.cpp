#include "chaincomm/model.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "chaincomm/rng.hpp"

namespace chaincomm {

ModelParams validate_params(int n, double r_plus, double beta, double lambda, double p) {
    ModelParams params{n, r_plus, beta, lambda, p};
    validate_params(params);
    return params;
}

void validate_params(const ModelParams& params) {
    auto fail = [](const std::string& field, const std::string& constraint) {
        throw std::invalid_argument("invalid parameter " + field + ": " + constraint);
    };
    if (params.n < 1) fail("n", "must be a positive integer");
    if (!(params.r_plus > 0.0 && params.r_plus < 1.0)) fail("r_plus", "must lie in (0,1)");
    if (!(params.beta >= 0.0 && params.beta <= 1.0)) fail("beta", "must lie in [0,1]");
    if (!(params.lambda > 0.0 && params.lambda < 1.0)) fail("lambda", "must lie in (0,1)");
    if (!(params.p >= 0.0 && params.p <= 1.0)) fail("p", "must lie in [0,1]");
    // mu = lambda*beta lands in [0, lambda] by construction, so every
    // transition probability mu + (1-lambda)*s with s in [0,1] is in [0,1].
}

CommunityLayout build_layout(const ModelParams& params) {
    CommunityLayout layout;
    layout.plus_count = static_cast<int>(std::ceil(params.r_plus * params.n));
    layout.labels.assign(params.n, -1);
    for (int i = 0; i < layout.plus_count; ++i) layout.labels[i] = 1;
    return layout;
}

CommunityLayout build_layout_shuffled(const ModelParams& params, std::uint64_t shuffle_seed) {
    CommunityLayout layout = build_layout(params);
    Rng rng = make_rng(shuffle_seed);
    for (int i = params.n - 1; i > 0; --i) {
        const int j = static_cast<int>(bounded_uint(rng, static_cast<std::uint64_t>(i) + 1));
        std::swap(layout.labels[i], layout.labels[j]);
    }
    return layout;
}

std::int64_t Environment::edge_count() const {
    return std::accumulate(theta.begin(), theta.end(), std::int64_t{0});
}

Environment sample_environment(const ModelParams& params, const CommunityLayout& layout,
                               std::uint64_t seed) {
    validate_params(params);
    if (layout.n() != params.n) throw std::invalid_argument("layout size does not match params.n");
    Environment env;
    env.params = params;
    env.layout = layout;
    env.seed = seed;
    env.theta.resize(static_cast<std::size_t>(params.n) * params.n);
    Rng rng = make_rng(seed);
    for (auto& cell : env.theta) cell = bernoulli(rng, params.p) ? 1 : 0;
    return env;
}

Eigen::MatrixXd signed_matrix(const Environment& env) {
    const int n = env.n();
    const double inv_n = 1.0 / n;
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            a(i, j) = env.layout.labels[j] * inv_n * env.theta_at(i, j);
    return a;
}

RowColSums row_col_sums(const Environment& env) {
    const int n = env.n();
    RowColSums sums;
    sums.row_sums = Eigen::VectorXd::Zero(n);
    sums.col_sums = Eigen::VectorXd::Zero(n);
    sums.row_minus = Eigen::VectorXd::Zero(n);
    const double inv_n = 1.0 / n;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (!env.theta_at(i, j)) continue;
            const double a_ij = env.layout.labels[j] * inv_n;
            sums.row_sums[i] += a_ij;
            sums.col_sums[j] += a_ij;
            if (env.layout.labels[j] < 0) sums.row_minus[i] += a_ij;
        }
    }
    return sums;
}

TheoreticalConstants theoretical_constants(const ModelParams& params) {
    const double lam = params.lambda;
    const double p = params.p;
    const double diff = params.r_plus - params.r_minus();
    const double one_m_lam = 1.0 - lam;

    TheoreticalConstants c;
    // p (1-lambda) |r+ - r-| < 1 under the parameter invariants, so the
    // denominators below stay strictly positive.
    c.m = (params.mu() + one_m_lam * p * params.r_minus()) / (1.0 - p * one_m_lam * diff);
    c.c1 = one_m_lam * c.m * (1.0 - c.m);
    const double denom = 1.0 - p * p * diff * diff;
    c.c2 = c.c1 * one_m_lam * one_m_lam * p * p * p * diff / denom;
    c.sigma_plus = c.c2 + c.c1 * p;
    c.sigma_minus = c.c2 - c.c1 * p;
    c.separation = 2.0 * c.c1 * p;
    return c;
}

}  // namespace chaincomm
