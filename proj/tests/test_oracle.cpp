#include <doctest.h>

#include <cmath>

#include "chaincomm/oracle.hpp"
#include "chaincomm/rng.hpp"

using namespace chaincomm;

namespace {

Environment make_env(int n, double r_plus, double beta, double lambda, double p,
                     std::uint64_t seed) {
    const ModelParams params = validate_params(n, r_plus, beta, lambda, p);
    return sample_environment(params, build_layout(params), seed);
}

// Two-component full graph with labels (+1,-1), lambda=.5, mu=.25: the
// closed-form fixed points are m = (.5,.5), sigma0 offdiag = 1/36,
// sigma1 = +-1/18, sigma = (1/9, -1/9).
Environment two_full() { return make_env(2, 0.5, 0.5, 0.5, 1.0, 1); }

}  // namespace

TEST_SUITE_BEGIN("oracle");

TEST_CASE("mean vector is mu on the empty graph") {
    const Environment env = make_env(6, 0.5, 0.5, 0.5, 0.0, 2);
    const Eigen::VectorXd m = solve_mean_vector(env);
    CHECK((m.array() - 0.25).abs().maxCoeff() < 1e-12);
}

TEST_CASE("mean vector on the two-component full graph") {
    const Eigen::VectorXd m = solve_mean_vector(two_full());
    CHECK(m[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(m[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("mean vector concentrates around the limiting mean at large N") {
    // sqrt(log N / N) at N=200 is ~.16; the observed deviation sits well
    // below .05 across seeds (calibrated once with 20 seeds, max ~.02).
    const Environment env = make_env(200, 0.5, 0.5, 0.5, 0.5, 31);
    const Eigen::VectorXd m = solve_mean_vector(env);
    CHECK((m.array() - 0.375).abs().maxCoeff() < 0.05);
}

TEST_CASE("mean vector matches the resolvent route") {
    const double tol = 1e-12;
    for (const std::uint64_t seed : {3u, 4u, 5u}) {
        const Environment env = make_env(40, 0.3, 0.6, 0.4, 0.7, seed);
        const Eigen::VectorXd direct = solve_mean_vector(env, tol);
        const Eigen::VectorXd resolvent = mean_vector_resolvent_route(env, tol);
        CHECK((direct - resolvent).lpNorm<Eigen::Infinity>() < 10 * tol);
    }
}

TEST_CASE("variance_vector arithmetic") {
    Eigen::VectorXd m(3);
    m << 0.25, 0.0, 1.0;
    const Eigen::VectorXd v = variance_vector(m);
    CHECK(v[0] == doctest::Approx(0.1875));
    CHECK(v[1] == 0.0);
    CHECK(v[2] == 0.0);
    Eigen::VectorXd half = Eigen::VectorXd::Constant(2, 0.5);
    CHECK(variance_vector(half)[0] == doctest::Approx(0.25));
}

TEST_CASE("sigma0 is diag(v) on the empty graph") {
    const Environment env = make_env(5, 0.5, 0.5, 0.5, 0.0, 3);
    const OracleQuantities q = compute_oracle(env);
    CHECK(q.iterations == 1);
    CHECK((q.sigma0 - Eigen::MatrixXd(q.var_vec.asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sigma0 closed form on the two-component full graph") {
    const OracleQuantities q = compute_oracle(two_full());
    CHECK(q.sigma0(0, 0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(q.sigma0(1, 1) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(q.sigma0(0, 1) == doctest::Approx(1.0 / 36).epsilon(1e-10));
    CHECK(q.sigma0(1, 0) == doctest::Approx(1.0 / 36).epsilon(1e-10));
}

TEST_CASE("sigma0 diagonal equals the variance vector bit-exactly") {
    const Environment env = make_env(30, 0.4, 0.5, 0.5, 0.6, 7);
    const OracleQuantities q = compute_oracle(env);
    for (int i = 0; i < 30; ++i) CHECK(q.sigma0(i, i) == q.var_vec[i]);
}

TEST_CASE("sigma0 is symmetric positive semidefinite") {
    const Environment env = make_env(25, 0.3, 0.7, 0.4, 0.8, 8);
    const OracleQuantities q = compute_oracle(env);
    CHECK((q.sigma0 - q.sigma0.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q.sigma0);
    CHECK(eig.eigenvalues().minCoeff() > -1e-10);
}

TEST_CASE("sigma0 satisfies the Stein equation to tolerance") {
    const double tol = 1e-12;
    const Environment env = make_env(20, 0.5, 0.5, 0.5, 0.5, 9);
    const OracleQuantities q = compute_oracle(env, tol);
    const Eigen::MatrixXd a = signed_matrix(env);
    const double factor = 0.25;  // (1-lambda)^2
    Eigen::MatrixXd rhs = factor * (a * q.sigma0 * a.transpose());
    rhs.diagonal() = q.var_vec;
    CHECK((q.sigma0 - rhs).cwiseAbs().maxCoeff() <= tol);
}

TEST_CASE("sigma0 iteration count obeys the contraction bound") {
    const double tol = 1e-12;
    const Environment env = make_env(15, 0.5, 0.5, 0.5, 0.9, 10);
    const OracleQuantities q = compute_oracle(env, tol);
    const Eigen::MatrixXd a = signed_matrix(env);
    const double factor = (1 - env.params.lambda) * (1 - env.params.lambda);
    Eigen::MatrixXd s0 = q.var_vec.asDiagonal();
    Eigen::MatrixXd s1 = factor * (a * s0 * a.transpose());
    s1.diagonal() = q.var_vec;
    const double first_step = (s1 - s0).cwiseAbs().maxCoeff();
    const int bound =
        static_cast<int>(std::ceil(std::log(tol / first_step) / std::log(factor))) + 1;
    CHECK(q.iterations <= bound);
    CHECK(q.residual <= tol);
}

TEST_CASE("sigma0 solve throws when the iteration cap is too low") {
    const Environment env = make_env(10, 0.5, 0.5, 0.5, 0.8, 11);
    const Eigen::VectorXd v = variance_vector(solve_mean_vector(env));
    CHECK_THROWS_AS((void)solve_sigma0(env, v, 1e-12, 2), std::runtime_error);
}

TEST_CASE("sigma1 vanishes on the empty graph and scales linearly") {
    const Environment env0 = make_env(5, 0.5, 0.5, 0.5, 0.0, 3);
    const OracleQuantities q0 = compute_oracle(env0);
    CHECK(q0.sigma1.cwiseAbs().maxCoeff() == 0.0);

    const Environment env = make_env(12, 0.5, 0.5, 0.5, 0.7, 12);
    const OracleQuantities q = compute_oracle(env);
    const Eigen::MatrixXd doubled = sigma1_from_sigma0(env, 2.0 * q.sigma0);
    CHECK((doubled - 2.0 * q.sigma1).cwiseAbs().maxCoeff() < 1e-14);
    CHECK_THROWS_AS((void)sigma1_from_sigma0(env, Eigen::MatrixXd::Zero(3, 3)),
                    std::invalid_argument);
}

TEST_CASE("sigma1 closed form on the two-component full graph") {
    const OracleQuantities q = compute_oracle(two_full());
    CHECK(q.sigma1(0, 0) == doctest::Approx(1.0 / 18).epsilon(1e-10));
    CHECK(q.sigma1(0, 1) == doctest::Approx(-1.0 / 18).epsilon(1e-10));
    CHECK(q.sigma1(1, 0) == doctest::Approx(1.0 / 18).epsilon(1e-10));
    CHECK(q.sigma1(1, 1) == doctest::Approx(-1.0 / 18).epsilon(1e-10));
}

TEST_CASE("sigma vector column sums and sign pattern") {
    CHECK(sigma_vector(Eigen::MatrixXd::Zero(4, 4)).cwiseAbs().maxCoeff() == 0.0);
    const Environment env = two_full();
    const OracleQuantities q = compute_oracle(env);
    CHECK(q.sigma_vec[0] == doctest::Approx(1.0 / 9).epsilon(1e-10));
    CHECK(q.sigma_vec[1] == doctest::Approx(-1.0 / 9).epsilon(1e-10));
    for (int j = 0; j < 2; ++j)
        CHECK((q.sigma_vec[j] > 0) == (env.layout.labels[j] > 0));
    // componentwise identity with the matrix
    CHECK((q.sigma_vec.transpose() - Eigen::RowVectorXd::Ones(2) * q.sigma1).cwiseAbs().maxCoeff() <
          1e-14);
}

TEST_CASE("approximation residuals vanish in the non-interacting case") {
    const Environment env = make_env(8, 0.5, 0.5, 0.5, 0.0, 13);
    const OracleQuantities q = compute_oracle(env);
    const TheoreticalConstants c = theoretical_constants(env.params);
    const ApproxResiduals r = approximation_residuals(env, q, c);
    CHECK(r.thm1_maxnorm < 1e-12);
    CHECK(r.thm2_supnorm < 1e-12);
    CHECK(r.prop43_maxnorm < 1e-12);
}

TEST_CASE("entrywise residual is smaller than the column-sum residual") {
    const Environment env = make_env(100, 0.5, 0.5, 0.5, 0.5, 14);
    const OracleQuantities q = compute_oracle(env);
    const TheoreticalConstants c = theoretical_constants(env.params);
    const ApproxResiduals r = approximation_residuals(env, q, c);
    CHECK(r.thm1_maxnorm <= r.thm2_supnorm);
}

TEST_CASE("column-sum residual decays with N") {
    double mean25 = 0, mean100 = 0;
    const int reps = 5;
    for (int k = 0; k < reps; ++k) {
        const Environment small = make_env(25, 0.5, 0.5, 0.5, 0.5, 100 + k);
        const Environment large = make_env(100, 0.5, 0.5, 0.5, 0.5, 200 + k);
        mean25 += approximation_residuals(small, compute_oracle(small),
                                          theoretical_constants(small.params))
                      .thm2_supnorm;
        mean100 += approximation_residuals(large, compute_oracle(large),
                                           theoretical_constants(large.params))
                       .thm2_supnorm;
    }
    CHECK(mean100 / reps < mean25 / reps);
}

TEST_CASE("environment diagnostics in deterministic regimes") {
    const Environment empty = make_env(6, 0.5, 0.5, 0.5, 0.0, 15);
    const EnvDiagnostics d0 =
        environment_diagnostics(empty, theoretical_constants(empty.params));
    CHECK(d0.l_err < 1e-12);
    CHECK(d0.c_err < 1e-12);
    CHECK(d0.v_err < 1e-12);

    const Environment full = make_env(6, 0.5, 0.5, 0.5, 1.0, 15);
    const EnvDiagnostics d1 = environment_diagnostics(full, theoretical_constants(full.params));
    CHECK(d1.l_err == 0.0);
}

TEST_CASE("environment diagnostics shrink with N") {
    const int reps = 5;
    double l50 = 0, l200 = 0, c50 = 0, c200 = 0, v50 = 0, v200 = 0;
    for (int k = 0; k < reps; ++k) {
        const Environment small = make_env(50, 0.5, 0.5, 0.5, 0.5, 300 + k);
        const Environment large = make_env(200, 0.5, 0.5, 0.5, 0.5, 400 + k);
        const EnvDiagnostics ds =
            environment_diagnostics(small, theoretical_constants(small.params));
        const EnvDiagnostics dl =
            environment_diagnostics(large, theoretical_constants(large.params));
        l50 += ds.l_err;
        c50 += ds.c_err;
        v50 += ds.v_err;
        l200 += dl.l_err;
        c200 += dl.c_err;
        v200 += dl.v_err;
    }
    CHECK(l200 < l50);
    CHECK(c200 < c50);
    CHECK(v200 < v50);
}

TEST_CASE("exact column sums separate the communities at N=100") {
    for (const std::uint64_t seed : {500u, 501u, 502u}) {
        const Environment env = make_env(100, 0.5, 0.5, 0.5, 0.5, seed);
        const OracleQuantities q = compute_oracle(env);
        double min_plus = 1e9, max_minus = -1e9;
        for (int j = 0; j < 100; ++j) {
            if (env.layout.labels[j] > 0)
                min_plus = std::min(min_plus, q.sigma_vec[j]);
            else
                max_minus = std::max(max_minus, q.sigma_vec[j]);
        }
        CHECK(min_plus > max_minus);
    }
}

TEST_CASE("oracle rejects N beyond the dense cap") {
    const ModelParams params = validate_params(2001, 0.5, 0.5, 0.5, 0.0);
    const Environment env = sample_environment(params, build_layout(params), 1);
    CHECK_THROWS_AS((void)compute_oracle(env), std::invalid_argument);
}

TEST_SUITE_END();
