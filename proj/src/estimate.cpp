#include "chaincomm/estimate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace chaincomm {

Eigen::VectorXd sigma_hat(const Trajectory& traj, const TrajectorySummary& summary) {
    const int n = traj.n();
    const std::int64_t t_samples = traj.t();
    if (t_samples < 2) throw std::invalid_argument("sigma_hat: needs at least 2 time steps");

    // cross[j] = sum_{t=1}^{T-1} popcount(row_t) * X_{j,t-1}, exact in int64.
    std::vector<std::int64_t> cross(n, 0);
    for (std::int64_t t = 1; t < t_samples; ++t) {
        const std::int64_t row_count = traj.row_popcount(t);
        const auto prev = traj.row(t - 1);
        for (int w = 0; w < traj.words_per_row(); ++w) {
            std::uint64_t word = prev[w];
            while (word) {
                cross[w * 64 + std::countr_zero(word)] += row_count;
                word &= word - 1;
            }
        }
    }

    std::int64_t z_total = 0;
    for (const std::int64_t z : summary.counts) z_total += z;

    const double t_d = static_cast<double>(t_samples);
    Eigen::VectorXd result(n);
    for (int j = 0; j < n; ++j) {
        const double cross_term = static_cast<double>(cross[j]) / (t_d - 1.0);
        const double mean_term =
            static_cast<double>(z_total) / t_d * (static_cast<double>(summary.counts[j]) / t_d);
        result[j] = cross_term - mean_term;
    }
    return result;
}

KMeans2Result kmeans2(std::span<const double> values, int max_iter) {
    const int n = static_cast<int>(values.size());
    if (n < 2) throw std::invalid_argument("kmeans2: needs at least 2 values");
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    if (*lo_it == *hi_it)
        throw degenerate_values_error("kmeans2: all values identical, no separation");

    KMeans2Result result;
    result.labels.assign(n, -1);
    double c_low = *lo_it;
    double c_high = *hi_it;
    std::vector<std::int8_t> prev;
    for (int iter = 1; iter <= max_iter; ++iter) {
        // 1-D assignment is a threshold at the midpoint; ties go low.
        const double mid = 0.5 * (c_low + c_high);
        std::vector<std::int8_t> labels(n);
        for (int j = 0; j < n; ++j) labels[j] = values[j] > mid ? 1 : -1;
        if (labels == prev) break;
        prev = std::move(labels);
        result.iters = iter;

        double sum_low = 0, sum_high = 0;
        int n_low = 0, n_high = 0;
        for (int j = 0; j < n; ++j) {
            if (prev[j] > 0) {
                sum_high += values[j];
                ++n_high;
            } else {
                sum_low += values[j];
                ++n_low;
            }
        }
        // Both clusters hold at least the min / max point respectively.
        c_low = sum_low / n_low;
        c_high = sum_high / n_high;
    }
    result.c_low = c_low;
    result.c_high = c_high;
    result.labels = std::move(prev);
    return result;
}

RecoveryScore score(std::span<const std::int8_t> labels_hat, const CommunityLayout& layout) {
    if (labels_hat.size() != layout.labels.size())
        throw std::invalid_argument("score: label vectors have different lengths");
    int mismatches = 0;
    for (std::size_t j = 0; j < labels_hat.size(); ++j)
        if (labels_hat[j] != layout.labels[j]) ++mismatches;
    RecoveryScore s;
    s.exact = mismatches == 0;
    s.misclassified_fraction = static_cast<double>(mismatches) / layout.n();
    return s;
}

SeparationStats separation_stats(std::span<const double> values, const CommunityLayout& layout) {
    std::vector<double> plus, minus;
    for (std::size_t j = 0; j < values.size(); ++j)
        (layout.labels[j] > 0 ? plus : minus).push_back(values[j]);

    SeparationStats stats;
    auto range = [](const std::vector<double>& v) {
        if (v.size() < 2) return 0.0;
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        return *hi - *lo;
    };
    stats.max_intra_gap = std::max(range(plus), range(minus));

    if (plus.empty() || minus.empty()) {
        stats.min_inter_gap = 0.0;
        return stats;
    }
    std::sort(plus.begin(), plus.end());
    std::sort(minus.begin(), minus.end());
    double best = std::numeric_limits<double>::infinity();
    std::size_t k = 0;
    for (const double v : plus) {
        while (k + 1 < minus.size() && minus[k + 1] <= v) ++k;
        best = std::min(best, std::abs(v - minus[k]));
        if (k + 1 < minus.size()) best = std::min(best, std::abs(minus[k + 1] - v));
    }
    stats.min_inter_gap = best;
    return stats;
}

RecoveryResult recover(const Trajectory& traj, const TrajectorySummary& summary) {
    RecoveryResult result;
    result.sigma_hat = sigma_hat(traj, summary);
    const KMeans2Result km =
        kmeans2(std::span<const double>(result.sigma_hat.data(), result.sigma_hat.size()));
    result.c_low = km.c_low;
    result.c_high = km.c_high;
    result.labels_hat = km.labels;
    result.kmeans_iters = km.iters;
    return result;
}

}  // namespace chaincomm
