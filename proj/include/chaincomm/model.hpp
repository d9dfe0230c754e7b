#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace chaincomm {

// The five scalars defining the law of the model. Public interfaces take
// beta = mu/lambda instead of mu because the admissible range of beta does
// not depend on lambda; mu is derived.
struct ModelParams {
    int n = 50;            // number of components
    double r_plus = 0.5;   // asymptotic fraction of excitatory components, in (0,1)
    double beta = 0.5;     // mu/lambda, in [0,1]
    double lambda = 0.5;   // in (0,1)
    double p = 0.5;        // edge probability, in [0,1]

    double mu() const { return lambda * beta; }
    double r_minus() const { return 1.0 - r_plus; }
};

// Throws std::invalid_argument naming the offending field.
ModelParams validate_params(int n, double r_plus, double beta, double lambda, double p);
void validate_params(const ModelParams& params);

struct CommunityLayout {
    int plus_count = 0;            // |P+| = ceil(r_plus * N)
    std::vector<std::int8_t> labels;  // +1 for P+, -1 for P-

    int n() const { return static_cast<int>(labels.size()); }
    int minus_count() const { return n() - plus_count; }
};

// Canonical order: the first ceil(r_plus*N) indices form P+. The process law
// is exchangeable under within-community relabeling, so tests stay
// deterministic with this choice.
CommunityLayout build_layout(const ModelParams& params);

// Same counts, label positions shuffled by a seeded Fisher-Yates pass.
CommunityLayout build_layout_shuffled(const ModelParams& params, std::uint64_t shuffle_seed);

// A sampled interaction graph: theta_ij ~ iid Bernoulli(p), row-major.
struct Environment {
    ModelParams params;
    CommunityLayout layout;
    std::vector<std::uint8_t> theta;  // n*n entries in {0,1}, theta[i*n+j]
    std::uint64_t seed = 0;

    int n() const { return params.n; }
    std::uint8_t theta_at(int i, int j) const { return theta[static_cast<std::size_t>(i) * params.n + j]; }
    std::int64_t edge_count() const;
};

Environment sample_environment(const ModelParams& params, const CommunityLayout& layout,
                               std::uint64_t seed);

// A_ij = label(j) * theta_ij / N.
Eigen::MatrixXd signed_matrix(const Environment& env);

struct RowColSums {
    Eigen::VectorXd row_sums;    // L^N = A 1
    Eigen::VectorXd col_sums;    // C^N = 1^T A
    Eigen::VectorXd row_minus;   // A 1_{P-}
};
RowColSums row_col_sums(const Environment& env);

// Closed-form limiting constants of the model.
//   m           stationary mean activity
//   c1          (1-lambda) m (1-m), the lag-1 covariance scale
//   c2          c1 * (1-lambda)^2 p^3 (r+ - r-) / (1 - p^2 (r+ - r-)^2), the
//               common bias entering every entry as c2/N
//   sigma_plus  limit of sigma^N_j for j in P+  (= c2 + c1 p)
//   sigma_minus limit of sigma^N_j for j in P-  (= c2 - c1 p)
struct TheoreticalConstants {
    double m = 0;
    double c1 = 0;
    double c2 = 0;
    double sigma_plus = 0;
    double sigma_minus = 0;
    double separation = 0;  // sigma_plus - sigma_minus = 2 (1-lambda) p m (1-m)
};

TheoreticalConstants theoretical_constants(const ModelParams& params);

}  // namespace chaincomm
