#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "chaincomm/estimate.hpp"
#include "chaincomm/oracle.hpp"
#include "chaincomm/rng.hpp"

using namespace chaincomm;

namespace {

Trajectory from_bits(const std::vector<std::vector<std::uint8_t>>& rows) {
    Trajectory traj(static_cast<int>(rows[0].size()), static_cast<std::int64_t>(rows.size()), 0, 0);
    for (std::size_t t = 0; t < rows.size(); ++t) traj.set_row(static_cast<std::int64_t>(t), rows[t]);
    return traj;
}

// Direct double-sum evaluation of the estimator as exact rationals with
// common denominator (T-1) T^2; independent of the production path.
std::vector<__int128> sigma_hat_direct_numerators(const std::vector<std::vector<std::uint8_t>>& x) {
    const int t_samples = static_cast<int>(x.size());
    const int n = static_cast<int>(x[0].size());
    std::vector<std::int64_t> z(n, 0);
    for (int i = 0; i < n; ++i)
        for (int t = 0; t < t_samples; ++t) z[i] += x[t][i];
    std::vector<__int128> numerators(n, 0);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            std::int64_t cross = 0;
            for (int t = 1; t < t_samples; ++t) cross += x[t][i] * x[t - 1][j];
            numerators[j] += static_cast<__int128>(cross) * t_samples * t_samples -
                             static_cast<__int128>(z[i]) * z[j] * (t_samples - 1);
        }
    }
    return numerators;
}

// Aggregated form on the same denominator.
std::vector<__int128> sigma_hat_aggregated_numerators(
    const std::vector<std::vector<std::uint8_t>>& x) {
    const int t_samples = static_cast<int>(x.size());
    const int n = static_cast<int>(x[0].size());
    std::vector<std::int64_t> z(n, 0), row_count(t_samples, 0);
    std::int64_t z_total = 0;
    for (int t = 0; t < t_samples; ++t)
        for (int i = 0; i < n; ++i) {
            z[i] += x[t][i];
            row_count[t] += x[t][i];
            z_total += x[t][i];
        }
    std::vector<__int128> numerators(n, 0);
    for (int j = 0; j < n; ++j) {
        std::int64_t cross = 0;
        for (int t = 1; t < t_samples; ++t) cross += row_count[t] * x[t - 1][j];
        numerators[j] = static_cast<__int128>(cross) * t_samples * t_samples -
                        static_cast<__int128>(z_total) * z[j] * (t_samples - 1);
    }
    return numerators;
}

// Best threshold split of sorted values by within-cluster sum of squares.
double best_threshold_wcss(std::vector<double> values, std::vector<std::int8_t>& labels_out) {
    const int n = static_cast<int>(values.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return values[a] < values[b]; });
    auto wcss = [&](int split) {
        double lo = 0, hi = 0;
        for (int k = 0; k < split; ++k) lo += values[order[k]];
        for (int k = split; k < n; ++k) hi += values[order[k]];
        const double m_lo = lo / split, m_hi = hi / (n - split);
        double total = 0;
        for (int k = 0; k < split; ++k) total += (values[order[k]] - m_lo) * (values[order[k]] - m_lo);
        for (int k = split; k < n; ++k) total += (values[order[k]] - m_hi) * (values[order[k]] - m_hi);
        return total;
    };
    double best = 1e300;
    int best_split = 1;
    for (int split = 1; split < n; ++split) {
        const double w = wcss(split);
        if (w < best) {
            best = w;
            best_split = split;
        }
    }
    labels_out.assign(n, -1);
    for (int k = best_split; k < n; ++k) labels_out[order[k]] = 1;
    return best;
}

CommunityLayout layout_from_labels(const std::vector<std::int8_t>& labels) {
    CommunityLayout layout;
    layout.labels = labels;
    layout.plus_count = static_cast<int>(std::count(labels.begin(), labels.end(), 1));
    return layout;
}

}  // namespace

TEST_SUITE_BEGIN("estimator");

TEST_CASE("sigma_hat is zero on constant trajectories") {
    const Trajectory ones = from_bits({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
    CHECK(sigma_hat(ones, summarize(ones)).cwiseAbs().maxCoeff() == 0.0);
    const Trajectory zeros = from_bits({{0, 0}, {0, 0}});
    CHECK(sigma_hat(zeros, summarize(zeros)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sigma_hat needs at least two steps") {
    const Trajectory single = from_bits({{1, 0, 1}});
    CHECK_THROWS_AS((void)sigma_hat(single, summarize(single)), std::invalid_argument);
}

TEST_CASE("aggregated form equals the direct double sum in exact arithmetic") {
    Rng rng = make_rng(2024);
    for (int instance = 0; instance < 100; ++instance) {
        const int n = 2 + static_cast<int>(bounded_uint(rng, 3));       // 2..4
        const int t_len = 2 + static_cast<int>(bounded_uint(rng, 5));   // 2..6
        std::vector<std::vector<std::uint8_t>> bits(t_len, std::vector<std::uint8_t>(n));
        for (auto& row : bits)
            for (auto& b : row) b = bernoulli(rng, 0.5);

        const auto direct = sigma_hat_direct_numerators(bits);
        const auto aggregated = sigma_hat_aggregated_numerators(bits);
        for (int j = 0; j < n; ++j) CHECK(direct[j] == aggregated[j]);

        const Trajectory traj = from_bits(bits);
        const Eigen::VectorXd produced = sigma_hat(traj, summarize(traj));
        const double denom =
            static_cast<double>(t_len - 1) * static_cast<double>(t_len) * t_len;
        for (int j = 0; j < n; ++j)
            CHECK(produced[j] ==
                  doctest::Approx(static_cast<double>(direct[j]) / denom).epsilon(1e-12));
    }
}

TEST_CASE("kmeans2 splits an obvious pair of clusters") {
    const std::vector<double> values{1.0, 0.9, -1.0};
    const KMeans2Result r = kmeans2(values);
    CHECK(r.labels == std::vector<std::int8_t>{1, 1, -1});
    CHECK(r.c_high == doctest::Approx(0.95));
    CHECK(r.c_low == doctest::Approx(-1.0));
}

TEST_CASE("kmeans2 isolates a single outlier") {
    std::vector<double> values(9, 0.2);
    values.push_back(0.7);
    const KMeans2Result r = kmeans2(values);
    for (int j = 0; j < 9; ++j) CHECK(r.labels[j] == -1);
    CHECK(r.labels[9] == 1);
}

TEST_CASE("kmeans2 rejects constant input") {
    const std::vector<double> values(5, 0.3);
    CHECK_THROWS_AS((void)kmeans2(values), degenerate_values_error);
}

TEST_CASE("kmeans2 recovers a planted split in one iteration and minimizes WCSS") {
    Rng rng = make_rng(99);
    const TheoreticalConstants c = theoretical_constants(validate_params(10, 0.5, 0.5, 0.5, 0.5));
    std::vector<double> values;
    std::vector<std::int8_t> truth;
    for (int j = 0; j < 5; ++j) {
        values.push_back(c.sigma_plus + 0.01 * (unit_double(rng) - 0.5));
        truth.push_back(1);
    }
    for (int j = 0; j < 5; ++j) {
        values.push_back(c.sigma_minus + 0.01 * (unit_double(rng) - 0.5));
        truth.push_back(-1);
    }
    const KMeans2Result r = kmeans2(values);
    CHECK(r.iters == 1);
    CHECK(r.labels == truth);
    std::vector<std::int8_t> best_labels;
    best_threshold_wcss(values, best_labels);
    CHECK(r.labels == best_labels);
}

TEST_CASE("kmeans2 is permutation invariant") {
    Rng rng = make_rng(7);
    std::vector<double> values;
    for (int j = 0; j < 12; ++j) values.push_back(unit_double(rng));
    const KMeans2Result base = kmeans2(values);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<int> perm(values.size());
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = static_cast<int>(perm.size()) - 1; i > 0; --i)
            std::swap(perm[i], perm[bounded_uint(rng, i + 1)]);
        std::vector<double> shuffled(values.size());
        for (std::size_t k = 0; k < perm.size(); ++k) shuffled[k] = values[perm[k]];
        const KMeans2Result r = kmeans2(shuffled);
        CHECK(r.c_low == doctest::Approx(base.c_low).epsilon(1e-14));
        CHECK(r.c_high == doctest::Approx(base.c_high).epsilon(1e-14));
        for (std::size_t k = 0; k < perm.size(); ++k) CHECK(r.labels[k] == base.labels[perm[k]]);
    }
}

TEST_CASE("kmeans2 always returns a contiguous threshold split") {
    Rng rng = make_rng(11);
    for (int rep = 0; rep < 200; ++rep) {
        const int n = 2 + static_cast<int>(bounded_uint(rng, 11));
        std::vector<double> values;
        for (int j = 0; j < n; ++j) values.push_back(unit_double(rng));
        KMeans2Result r;
        try {
            r = kmeans2(values);
        } catch (const degenerate_values_error&) {
            continue;
        }
        // sorted by value, labels must be a block of -1 then a block of +1
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return values[a] < values[b]; });
        bool seen_plus = false;
        for (const int idx : order) {
            if (r.labels[idx] > 0) seen_plus = true;
            if (seen_plus) CHECK(r.labels[idx] > 0);
        }
        CHECK(r.c_low <= r.c_high);
    }
}

TEST_CASE("score measures the labeled symmetric difference") {
    const ModelParams params = validate_params(50, 0.5, 0.5, 0.5, 0.5);
    const CommunityLayout layout = build_layout(params);
    CHECK(score(layout.labels, layout).exact);
    CHECK(score(layout.labels, layout).misclassified_fraction == 0.0);

    std::vector<std::int8_t> one_flip = layout.labels;
    one_flip[3] = -one_flip[3];
    const RecoveryScore s = score(one_flip, layout);
    CHECK_FALSE(s.exact);
    CHECK(s.misclassified_fraction == doctest::Approx(0.02));

    std::vector<std::int8_t> flipped = layout.labels;
    for (auto& l : flipped) l = -l;
    CHECK(score(flipped, layout).misclassified_fraction == doctest::Approx(1.0));
}

TEST_CASE("score mismatch fraction satisfies the triangle inequality") {
    Rng rng = make_rng(13);
    for (int rep = 0; rep < 50; ++rep) {
        const int n = 3 + static_cast<int>(bounded_uint(rng, 10));
        auto random_labels = [&] {
            std::vector<std::int8_t> l(n);
            for (auto& v : l) v = bernoulli(rng, 0.5) ? 1 : -1;
            return l;
        };
        const auto a = random_labels(), b = random_labels(), c = random_labels();
        const double ab = score(a, layout_from_labels(b)).misclassified_fraction;
        const double bc = score(b, layout_from_labels(c)).misclassified_fraction;
        const double ac = score(a, layout_from_labels(c)).misclassified_fraction;
        CHECK(ac <= ab + bc + 1e-15);
    }
}

TEST_CASE("separation_stats on labeled and constant values") {
    CommunityLayout layout = layout_from_labels({1, 1, -1, -1});
    const std::vector<double> pm{1.0, 1.0, -1.0, -1.0};
    const SeparationStats s = separation_stats(pm, layout);
    CHECK(s.max_intra_gap == 0.0);
    CHECK(s.min_inter_gap == 2.0);

    const std::vector<double> constant{0.5, 0.5, 0.5, 0.5};
    const SeparationStats s0 = separation_stats(constant, layout);
    CHECK(s0.max_intra_gap == 0.0);
    CHECK(s0.min_inter_gap == 0.0);
}

TEST_CASE("oracle column sums yield a clean separation at N=100") {
    const ModelParams params = validate_params(100, 0.5, 0.5, 0.5, 0.5);
    const Environment env = sample_environment(params, build_layout(params), 777);
    const OracleQuantities q = compute_oracle(env);
    const std::vector<double> values(q.sigma_vec.data(), q.sigma_vec.data() + q.sigma_vec.size());
    const SeparationStats s = separation_stats(values, env.layout);
    CHECK(s.min_inter_gap > s.max_intra_gap);
}

TEST_SUITE_END();
