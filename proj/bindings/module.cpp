#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "chaincomm/estimate.hpp"
#include "chaincomm/experiment.hpp"
#include "chaincomm/model.hpp"
#include "chaincomm/oracle.hpp"
#include "chaincomm/simulate.hpp"

namespace py = pybind11;
using namespace chaincomm;

namespace {

py::array_t<std::uint8_t> trajectory_array(const Trajectory& traj) {
    py::array_t<std::uint8_t> arr({traj.t(), static_cast<std::int64_t>(traj.n())});
    auto view = arr.mutable_unchecked<2>();
    for (std::int64_t t = 0; t < traj.t(); ++t)
        for (int i = 0; i < traj.n(); ++i) view(t, i) = traj.at(t, i) ? 1 : 0;
    return arr;
}

py::array_t<std::uint8_t> theta_array(const Environment& env) {
    const int n = env.n();
    py::array_t<std::uint8_t> arr({n, n});
    auto view = arr.mutable_unchecked<2>();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) view(i, j) = env.theta_at(i, j);
    return arr;
}

std::vector<double> to_vector(py::array_t<double, py::array::c_style | py::array::forcecast> a) {
    if (a.ndim() != 1) throw std::invalid_argument("expected a 1-D array");
    return {a.data(), a.data() + a.shape(0)};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Binary interacting chains on a random signed graph: simulation, "
              "lag-1 covariance community recovery, exact small-N oracle.";

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init([](int n, double r_plus, double beta, double lambda, double p) {
                 return validate_params(n, r_plus, beta, lambda, p);
             }),
             py::arg("n") = 50, py::arg("r_plus") = 0.5, py::arg("beta") = 0.5,
             py::arg("lambda_") = 0.5, py::arg("p") = 0.5)
        .def_readonly("n", &ModelParams::n)
        .def_readonly("r_plus", &ModelParams::r_plus)
        .def_readonly("beta", &ModelParams::beta)
        .def_readonly("lambda_", &ModelParams::lambda)
        .def_readonly("p", &ModelParams::p)
        .def_property_readonly("mu", &ModelParams::mu)
        .def("__repr__", [](const ModelParams& p) {
            return "ModelParams(n=" + std::to_string(p.n) + ", r_plus=" + std::to_string(p.r_plus) +
                   ", beta=" + std::to_string(p.beta) + ", lambda_=" + std::to_string(p.lambda) +
                   ", p=" + std::to_string(p.p) + ")";
        });

    py::class_<TheoreticalConstants>(m, "TheoreticalConstants")
        .def_readonly("m", &TheoreticalConstants::m)
        .def_readonly("c1", &TheoreticalConstants::c1)
        .def_readonly("c2", &TheoreticalConstants::c2)
        .def_readonly("sigma_plus", &TheoreticalConstants::sigma_plus)
        .def_readonly("sigma_minus", &TheoreticalConstants::sigma_minus)
        .def_readonly("separation", &TheoreticalConstants::separation);
    m.def("theoretical_constants", &theoretical_constants, py::arg("params"));

    py::class_<Environment>(m, "Environment")
        .def_property_readonly("n", &Environment::n)
        .def_readonly("seed", &Environment::seed)
        .def_readonly("params", &Environment::params)
        .def_property_readonly("labels",
                               [](const Environment& env) {
                                   return py::array_t<std::int8_t>(
                                       static_cast<py::ssize_t>(env.layout.labels.size()),
                                       env.layout.labels.data());
                               })
        .def_property_readonly("theta", &theta_array)
        .def_property_readonly("signed_matrix",
                               [](const Environment& env) { return signed_matrix(env); });
    m.def(
        "sample_environment",
        [](const ModelParams& params, std::uint64_t seed, bool shuffle_labels) {
            const CommunityLayout layout = shuffle_labels
                                               ? build_layout_shuffled(params, hash64(seed, 99))
                                               : build_layout(params);
            return sample_environment(params, layout, seed);
        },
        py::arg("params"), py::arg("seed"), py::arg("shuffle_labels") = false);

    py::class_<Trajectory>(m, "Trajectory")
        .def_property_readonly("n", &Trajectory::n)
        .def_property_readonly("t", &Trajectory::t)
        .def("to_numpy", &trajectory_array);
    m.def(
        "simulate",
        [](const Environment& env, std::int64_t t, std::uint64_t seed, std::int64_t burn_in) {
            SimConfig config;
            config.t_samples = t;
            config.seed = seed;
            config.burn_in = burn_in;
            return simulate(env, config, nullptr);
        },
        py::arg("env"), py::arg("t"), py::arg("seed") = 0, py::arg("burn_in") = -1,
        py::call_guard<py::gil_scoped_release>());
    m.def("default_burn_in", &default_burn_in, py::arg("params"));
    m.def(
        "transition_probs",
        [](const Environment& env, py::array_t<std::uint8_t, py::array::c_style> state) {
            if (state.ndim() != 1) throw std::invalid_argument("state must be 1-D");
            return transition_probs(
                env, std::span<const std::uint8_t>(state.data(),
                                                   static_cast<std::size_t>(state.shape(0))));
        },
        py::arg("env"), py::arg("state"));

    m.def(
        "sigma_hat",
        [](const Trajectory& traj) {
            const TrajectorySummary summary = summarize(traj);
            return sigma_hat(traj, summary);
        },
        py::arg("traj"), py::call_guard<py::gil_scoped_release>());

    m.def(
        "kmeans2",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> values, int max_iter) {
            const std::vector<double> v = to_vector(values);
            const KMeans2Result r = kmeans2(v, max_iter);
            return py::make_tuple(r.c_low, r.c_high,
                                  py::array_t<std::int8_t>(
                                      static_cast<py::ssize_t>(r.labels.size()), r.labels.data()),
                                  r.iters);
        },
        py::arg("values"), py::arg("max_iter") = 100,
        "Returns (c_low, c_high, labels, iters); labels are +1 for the higher cluster.");

    m.def(
        "recover",
        [](const Trajectory& traj) {
            const TrajectorySummary summary = summarize(traj);
            const RecoveryResult r = recover(traj, summary);
            py::dict d;
            d["sigma_hat"] = r.sigma_hat;
            d["centroids"] = py::make_tuple(r.c_low, r.c_high);
            d["labels_hat"] = py::array_t<std::int8_t>(
                static_cast<py::ssize_t>(r.labels_hat.size()), r.labels_hat.data());
            d["kmeans_iters"] = r.kmeans_iters;
            return d;
        },
        py::arg("traj"));

    m.def(
        "score",
        [](py::array_t<std::int8_t, py::array::c_style | py::array::forcecast> labels_hat,
           const Environment& env) {
            const std::span<const std::int8_t> span(labels_hat.data(),
                                                    static_cast<std::size_t>(labels_hat.shape(0)));
            const RecoveryScore s = score(span, env.layout);
            return py::make_tuple(s.exact, s.misclassified_fraction);
        },
        py::arg("labels_hat"), py::arg("env"));

    m.def(
        "oracle",
        [](const Environment& env, double tol, int max_iter) {
            const OracleQuantities q = compute_oracle(env, tol, max_iter);
            py::dict d;
            d["mean_vec"] = q.mean_vec;
            d["var_vec"] = q.var_vec;
            d["sigma0"] = q.sigma0;
            d["sigma1"] = q.sigma1;
            d["sigma_vec"] = q.sigma_vec;
            d["iterations"] = q.iterations;
            d["residual"] = q.residual;
            return d;
        },
        py::arg("env"), py::arg("tol") = kOracleDefaultTol,
        py::arg("max_iter") = kOracleDefaultMaxIter);

    m.def(
        "run_replica",
        [](const ModelParams& params, std::int64_t t, std::uint64_t seed, std::int64_t burn_in) {
            const RecoveryScore s = run_replica(params, t, seed, burn_in);
            return py::make_tuple(s.exact, s.misclassified_fraction);
        },
        py::arg("params"), py::arg("t"), py::arg("seed"), py::arg("burn_in") = -1,
        py::call_guard<py::gil_scoped_release>());

    m.def(
        "run_cell",
        [](const ModelParams& params, std::int64_t t, int replicas, std::uint64_t seed,
           int threads, std::int64_t burn_in) {
            CellResult c;
            {
                py::gil_scoped_release release;
                c = run_cell(params, t, replicas, seed, 0, threads, burn_in);
            }
            py::dict d;
            d["per_hat"] = c.per_hat;
            d["per_stderr"] = c.per_stderr;
            d["mmp_hat"] = c.mmp_hat;
            d["mmp_std"] = c.mmp_std;
            d["replicas"] = c.n_replicas;
            d["wall_time_s"] = c.wall_time_s;
            return d;
        },
        py::arg("params"), py::arg("t"), py::arg("replicas"), py::arg("seed") = 0,
        py::arg("threads") = 0, py::arg("burn_in") = -1);
}
