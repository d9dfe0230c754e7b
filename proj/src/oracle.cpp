#include "chaincomm/oracle.hpp"

#include <stdexcept>
#include <string>

namespace chaincomm {

namespace {

Eigen::VectorXd indicator_minus(const Environment& env) {
    Eigen::VectorXd ind = Eigen::VectorXd::Zero(env.n());
    for (int j = 0; j < env.n(); ++j)
        if (env.layout.labels[j] < 0) ind[j] = 1.0;
    return ind;
}

// Fixed point of y -> b + (1-lambda) A y. ||A||_inf <= 1 makes this a
// (1-lambda)-contraction in sup norm.
Eigen::VectorXd affine_fixed_point(const Eigen::MatrixXd& a, double one_m_lambda,
                                   const Eigen::VectorXd& b, double tol) {
    Eigen::VectorXd y = b;
    for (int it = 0; it < kOracleDefaultMaxIter; ++it) {
        Eigen::VectorXd next = b + one_m_lambda * (a * y);
        const double inc = (next - y).lpNorm<Eigen::Infinity>();
        y.swap(next);
        if (inc <= tol) return y;
    }
    throw std::runtime_error("affine fixed point did not converge");
}

}  // namespace

Eigen::VectorXd solve_mean_vector(const Environment& env, double tol) {
    const Eigen::MatrixXd a = signed_matrix(env);
    const double one_m_lambda = 1.0 - env.params.lambda;
    const Eigen::VectorXd b = Eigen::VectorXd::Constant(env.n(), env.params.mu()) -
                              one_m_lambda * (a * indicator_minus(env));
    return affine_fixed_point(a, one_m_lambda, b, tol);
}

Eigen::VectorXd mean_vector_resolvent_route(const Environment& env, double tol) {
    const Eigen::MatrixXd a = signed_matrix(env);
    const double one_m_lambda = 1.0 - env.params.lambda;
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(env.n());
    const Eigen::VectorXd ind_minus = indicator_minus(env);
    const Eigen::VectorXd ell = affine_fixed_point(a, one_m_lambda, ones, tol);
    const Eigen::VectorXd ell_minus = affine_fixed_point(a, one_m_lambda, ind_minus, tol);
    return env.params.mu() * ell + ind_minus - ell_minus;
}

Eigen::VectorXd variance_vector(const Eigen::VectorXd& mean_vec) {
    return mean_vec.array() * (1.0 - mean_vec.array());
}

Eigen::MatrixXd solve_sigma0(const Environment& env, const Eigen::VectorXd& var_vec, double tol,
                             int max_iter, int* iterations, double* residual) {
    const int n = env.n();
    const Eigen::MatrixXd a = signed_matrix(env);
    const double factor = (1.0 - env.params.lambda) * (1.0 - env.params.lambda);

    Eigen::MatrixXd s = var_vec.asDiagonal();
    for (int it = 1; it <= max_iter; ++it) {
        Eigen::MatrixXd next = factor * (a * s * a.transpose());
        next.diagonal() = var_vec;
        const double inc = (next - s).cwiseAbs().maxCoeff();
        s.swap(next);
        if (inc <= tol) {
            if (iterations) *iterations = it;
            if (residual) *residual = inc;
            return s;
        }
    }
    throw std::runtime_error("solve_sigma0: no convergence after " + std::to_string(max_iter) +
                             " iterations (tol=" + std::to_string(tol) + ")");
}

Eigen::MatrixXd sigma1_from_sigma0(const Environment& env, const Eigen::MatrixXd& sigma0) {
    if (sigma0.rows() != env.n() || sigma0.cols() != env.n())
        throw std::invalid_argument("sigma1_from_sigma0: sigma0 dimensions do not match environment");
    return (1.0 - env.params.lambda) * (signed_matrix(env) * sigma0);
}

Eigen::VectorXd sigma_vector(const Eigen::MatrixXd& sigma1) {
    return sigma1.colwise().sum().transpose();
}

OracleQuantities compute_oracle(const Environment& env, double tol, int max_iter, int max_n) {
    if (env.n() > max_n)
        throw std::invalid_argument("compute_oracle: N=" + std::to_string(env.n()) +
                                    " exceeds the dense-iteration cap of " + std::to_string(max_n));
    if (!(tol > 0)) throw std::invalid_argument("compute_oracle: tol must be positive");
    OracleQuantities q;
    q.mean_vec = solve_mean_vector(env, tol);
    q.var_vec = variance_vector(q.mean_vec);
    q.sigma0 = solve_sigma0(env, q.var_vec, tol, max_iter, &q.iterations, &q.residual);
    q.sigma1 = sigma1_from_sigma0(env, q.sigma0);
    q.sigma_vec = sigma_vector(q.sigma1);
    return q;
}

ApproxResiduals approximation_residuals(const Environment& env, const OracleQuantities& oracle,
                                        const TheoreticalConstants& constants) {
    const int n = env.n();
    const double p = env.params.p;
    const double one_m_lambda = 1.0 - env.params.lambda;
    const double diff = env.params.r_plus - env.params.r_minus();
    const double denom = 1.0 - p * p * diff * diff;
    const double bias = one_m_lambda * one_m_lambda * p * p * p * diff / denom;

    ApproxResiduals res;
    {
        Eigen::MatrixXd approx = constants.c1 * (signed_matrix(env).array() + bias / n).matrix();
        res.thm1_maxnorm = (oracle.sigma1 - approx).cwiseAbs().maxCoeff();
    }
    {
        Eigen::VectorXd limit(n);
        for (int j = 0; j < n; ++j)
            limit[j] = env.layout.labels[j] > 0 ? constants.sigma_plus : constants.sigma_minus;
        res.thm2_supnorm = (oracle.sigma_vec - limit).lpNorm<Eigen::Infinity>();
    }
    {
        const double kappa =
            one_m_lambda * one_m_lambda * p * p * constants.m * (1.0 - constants.m) / denom;
        // diag(v) + kappa (J - I)/N
        Eigen::MatrixXd approx = Eigen::MatrixXd::Constant(n, n, kappa / n);
        approx.diagonal() = oracle.var_vec;
        res.prop43_maxnorm = (oracle.sigma0 - approx).cwiseAbs().maxCoeff();
    }
    return res;
}

EnvDiagnostics environment_diagnostics(const Environment& env,
                                       const TheoreticalConstants& constants, double tol) {
    const int n = env.n();
    const double p = env.params.p;
    const double diff = env.params.r_plus - env.params.r_minus();
    const RowColSums sums = row_col_sums(env);

    EnvDiagnostics d;
    d.l_err = (sums.row_sums.array() - p * diff).abs().maxCoeff();
    Eigen::VectorXd c_limit(n);
    for (int j = 0; j < n; ++j) c_limit[j] = env.layout.labels[j] > 0 ? p : -p;
    d.c_err = (sums.col_sums - c_limit).lpNorm<Eigen::Infinity>();
    const Eigen::VectorXd var_vec = variance_vector(solve_mean_vector(env, tol));
    d.v_err = (var_vec.array() - constants.m * (1.0 - constants.m)).abs().maxCoeff();
    return d;
}

}  // namespace chaincomm
