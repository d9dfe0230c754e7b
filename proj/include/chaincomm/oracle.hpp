#pragma once

#include <Eigen/Dense>

#include "chaincomm/model.hpp"

namespace chaincomm {

// Exact environment-conditional quantities: the stationary mean vector,
// variance vector, simultaneous and lag-1 covariance matrices, and the
// column-sum vector sigma. Ground truth for tests and diagnostics; dense
// O(N^3) iteration, so capped at N <= 2000 by default.
struct OracleQuantities {
    Eigen::VectorXd mean_vec;   // m^N
    Eigen::VectorXd var_vec;    // v^N_i = m^N_i (1 - m^N_i)
    Eigen::MatrixXd sigma0;     // lag-0 covariance
    Eigen::MatrixXd sigma1;     // lag-1 covariance, (1-lambda) A sigma0
    Eigen::VectorXd sigma_vec;  // column sums of sigma1
    int iterations = 0;         // sigma0 fixed-point iterations
    double residual = 0.0;      // final max-norm increment
};

inline constexpr int kOracleDefaultMaxN = 2000;
inline constexpr double kOracleDefaultTol = 1e-12;
inline constexpr int kOracleDefaultMaxIter = 10000;

// Fixed point of m -> mu 1 + (1-lambda)(A m - A 1_{P-}), contraction factor
// <= (1-lambda), solved to tol in sup norm.
Eigen::VectorXd solve_mean_vector(const Environment& env, double tol = kOracleDefaultTol);

// Independent route via the resolvent Q = (I - (1-lambda)A)^{-1}:
// m = mu (Q 1) + 1_{P-} - (Q 1_{P-}), each resolvent sum solved as its own
// fixed point. Cross-check for solve_mean_vector.
Eigen::VectorXd mean_vector_resolvent_route(const Environment& env, double tol = kOracleDefaultTol);

Eigen::VectorXd variance_vector(const Eigen::VectorXd& mean_vec);

// Fixed point of S -> (1-lambda)^2 offdiag(A S A^T) + diag(v), iterated from
// diag(v); geometric convergence at rate <= (1-lambda)^2. Throws on max_iter
// (unreachable unless something is wrong).
Eigen::MatrixXd solve_sigma0(const Environment& env, const Eigen::VectorXd& var_vec,
                             double tol = kOracleDefaultTol, int max_iter = kOracleDefaultMaxIter,
                             int* iterations = nullptr, double* residual = nullptr);

Eigen::MatrixXd sigma1_from_sigma0(const Environment& env, const Eigen::MatrixXd& sigma0);

Eigen::VectorXd sigma_vector(const Eigen::MatrixXd& sigma1);

OracleQuantities compute_oracle(const Environment& env, double tol = kOracleDefaultTol,
                                int max_iter = kOracleDefaultMaxIter,
                                int max_n = kOracleDefaultMaxN);

// Max-norm residuals of the three limiting approximations:
//   thm1:   sigma1 vs c1 (A + bias J/N)
//   thm2:   sigma_vec vs (sigma_plus on P+, sigma_minus on P-)
//   prop43: sigma0 vs diag(v) + kappa (J - I)/N,
//           kappa = (1-lambda)^2 p^2 m(1-m) / (1 - p^2 (r+ - r-)^2)
struct ApproxResiduals {
    double thm1_maxnorm = 0;
    double thm2_supnorm = 0;
    double prop43_maxnorm = 0;
};
ApproxResiduals approximation_residuals(const Environment& env, const OracleQuantities& oracle,
                                        const TheoreticalConstants& constants);

// Sup-norm deviations of the environment sums from their limits:
// L^N from p(r+ - r-) 1, C^N from p(1_{P+} - 1_{P-}), v^N from m(1-m) 1.
struct EnvDiagnostics {
    double l_err = 0;
    double c_err = 0;
    double v_err = 0;
};
EnvDiagnostics environment_diagnostics(const Environment& env,
                                       const TheoreticalConstants& constants,
                                       double tol = kOracleDefaultTol);

}  // namespace chaincomm
