#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "chaincomm/model.hpp"
#include "chaincomm/simulate.hpp"

namespace chaincomm {

// All input values identical: no separation exists and 2-means cannot split.
// Callers in the Monte Carlo harness map this to "recovery failed".
class degenerate_values_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct KMeans2Result {
    double c_low = 0;
    double c_high = 0;
    std::vector<std::int8_t> labels;  // +1 = closer to c_high
    int iters = 0;
};

struct RecoveryResult {
    Eigen::VectorXd sigma_hat;
    double c_low = 0;
    double c_high = 0;
    std::vector<std::int8_t> labels_hat;
    int kmeans_iters = 0;
};

struct RecoveryScore {
    bool exact = false;
    double misclassified_fraction = 0.0;  // |Phat+ delta P+| / N
};

struct SeparationStats {
    double max_intra_gap = 0;  // max |v_i - v_j| over same-community pairs
    double min_inter_gap = 0;  // min |v_i - v_j| over cross-community pairs
};

// sigma_hat_j = sum_i [ (T-1)^-1 sum_{t>=2} X_{i,t} X_{j,t-1} - (Z_i/T)(Z_j/T) ],
// computed in the aggregated O(NT) form
//   N/(T-1) sum_{t>=2} Xbar_t X_{j,t-1} - N (Zbar/T)(Z_j/T).
// The per-t cross terms are integers and are accumulated exactly in int64;
// the two forms agree identically in exact arithmetic.
Eigen::VectorXd sigma_hat(const Trajectory& traj, const TrajectorySummary& summary);

// Lloyd's iteration on scalars with k=2, initialized at (min, max), run to a
// stable partition. Points equidistant from both centroids join the
// lower-centroid cluster. +1 goes to the higher-centroid cluster.
KMeans2Result kmeans2(std::span<const double> values, int max_iter = 100);

// Labeled comparison: orientation is fixed by the higher-centroid rule, no
// permutation minimization (the sign structure orients the clusters).
RecoveryScore score(std::span<const std::int8_t> labels_hat, const CommunityLayout& layout);

SeparationStats separation_stats(std::span<const double> values, const CommunityLayout& layout);

// sigma_hat + kmeans2 in one call.
RecoveryResult recover(const Trajectory& traj, const TrajectorySummary& summary);

}  // namespace chaincomm
