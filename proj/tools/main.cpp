#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "chaincomm/estimate.hpp"
#include "chaincomm/experiment.hpp"
#include "chaincomm/io.hpp"
#include "chaincomm/model.hpp"
#include "chaincomm/oracle.hpp"
#include "chaincomm/simulate.hpp"
#include "chaincomm/svg.hpp"

namespace cc = chaincomm;

namespace {

struct ParamFlags {
    int n = 50;
    double r_plus = 0.5;
    double beta = 0.5;
    double lambda = 0.5;
    double p = 0.5;
    std::string params_file;

    void attach(CLI::App* cmd) {
        cmd->add_option("--params", params_file, "JSON file with a params object");
        cmd->add_option("--n", n, "number of components")->capture_default_str();
        cmd->add_option("--r-plus", r_plus, "fraction of excitatory components")
            ->capture_default_str();
        cmd->add_option("--beta", beta, "beta = mu/lambda")->capture_default_str();
        cmd->add_option("--lambda", lambda, "self-forgetting rate lambda")->capture_default_str();
        cmd->add_option("--p", p, "edge probability")->capture_default_str();
    }

    // Starts from `base` (spec-file values or defaults); a --params file
    // replaces it, then inline flags override individual fields.
    cc::ModelParams resolve(const CLI::App* cmd, cc::ModelParams base = {}) const {
        if (!params_file.empty()) {
            std::ifstream in(params_file);
            if (!in) throw std::runtime_error("cannot open: " + params_file);
            base = cc::read_experiment_spec(in).base;
        }
        if (cmd->count("--n")) base.n = n;
        if (cmd->count("--r-plus")) base.r_plus = r_plus;
        if (cmd->count("--beta")) base.beta = beta;
        if (cmd->count("--lambda")) base.lambda = lambda;
        if (cmd->count("--p")) base.p = p;
        cc::validate_params(base);
        return base;
    }
};

cc::ExperimentSpec resolve_spec(const std::string& spec_file) {
    if (spec_file.empty()) return {};
    return cc::read_experiment_spec_file(spec_file);
}

int exit_usage(const std::string& message) {
    std::cerr << "error: " << message << '\n';
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"binary interacting chains on a random signed graph: simulation, "
                 "lag-1 covariance community recovery, exact small-N oracle, Monte Carlo"};
    app.require_subcommand(1);

    // --- simulate ---
    auto* sim_cmd = app.add_subcommand("simulate", "sample a trajectory and write it out");
    ParamFlags sim_params;
    sim_params.attach(sim_cmd);
    std::string sim_env_file, sim_out = "trajectory.csv", sim_format = "csv", sim_save_env;
    std::int64_t sim_t = 0, sim_burn_in = -1;
    std::uint64_t sim_seed = 0;
    sim_cmd->add_option("--env", sim_env_file, "environment JSON (instead of sampling one)");
    sim_cmd->add_option("--t", sim_t, "retained steps")->required();
    sim_cmd->add_option("--burn-in", sim_burn_in, "discarded steps (-1 = auto)")
        ->capture_default_str();
    sim_cmd->add_option("--seed", sim_seed, "master seed")->capture_default_str();
    sim_cmd->add_option("--out", sim_out, "output path")->capture_default_str();
    sim_cmd->add_option("--format", sim_format, "csv or binary")
        ->check(CLI::IsMember({"csv", "binary"}))
        ->capture_default_str();
    sim_cmd->add_option("--save-env", sim_save_env, "also write the sampled environment JSON");

    // --- estimate ---
    auto* est_cmd = app.add_subcommand("estimate", "recover communities from a trajectory file");
    std::string est_traj, est_env_file, est_out;
    est_cmd->add_option("--traj", est_traj, "trajectory file (csv or binary)")->required();
    est_cmd->add_option("--env", est_env_file, "environment JSON with the true layout (scores the estimate)");
    est_cmd->add_option("--out", est_out, "output JSON path (default: stdout)");

    // --- oracle ---
    auto* ora_cmd = app.add_subcommand("oracle", "exact covariance quantities for an environment");
    ParamFlags ora_params;
    ora_params.attach(ora_cmd);
    std::string ora_env_file, ora_out, ora_res_csv;
    std::uint64_t ora_seed = 0;
    double ora_tol = cc::kOracleDefaultTol;
    int ora_max_iter = cc::kOracleDefaultMaxIter;
    bool ora_matrices = false;
    ora_cmd->add_option("--env", ora_env_file, "environment JSON (instead of sampling one)");
    ora_cmd->add_option("--seed", ora_seed, "environment seed when sampling")->capture_default_str();
    ora_cmd->add_option("--tol", ora_tol, "fixed-point tolerance")->capture_default_str();
    ora_cmd->add_option("--max-iter", ora_max_iter, "fixed-point iteration cap")
        ->capture_default_str();
    ora_cmd->add_flag("--matrices", ora_matrices, "include sigma0/sigma1 in the JSON");
    ora_cmd->add_option("--out", ora_out, "output JSON path (default: stdout)");
    ora_cmd->add_option("--residuals-csv", ora_res_csv, "also write a one-row residual CSV");

    // --- shared Monte Carlo flags ---
    auto add_mc_flags = [](CLI::App* cmd, std::string& spec_file, int& replicas,
                           std::uint64_t& seed, std::int64_t& burn_in, int& threads,
                           std::string& out) {
        cmd->add_option("--spec", spec_file, "experiment spec JSON");
        cmd->add_option("--replicas", replicas, "Monte Carlo replicas per cell")
            ->capture_default_str();
        cmd->add_option("--seed", seed, "master seed")->capture_default_str();
        cmd->add_option("--burn-in", burn_in, "discarded steps (-1 = auto)")->capture_default_str();
        cmd->add_option("--threads", threads, "worker threads (0 = hardware)")
            ->capture_default_str();
        cmd->add_option("--out", out, "output CSV path")->capture_default_str();
    };

    // --- mc (single cell) ---
    auto* mc_cmd = app.add_subcommand("mc", "PER/MMP for one parameter cell");
    ParamFlags mc_params;
    mc_params.attach(mc_cmd);
    std::string mc_spec_file, mc_out = "mc.csv";
    int mc_replicas = 1000, mc_threads = 0;
    std::uint64_t mc_seed = 0;
    std::int64_t mc_burn_in = -1, mc_t = 0;
    mc_cmd->add_option("--t", mc_t, "trajectory length");
    add_mc_flags(mc_cmd, mc_spec_file, mc_replicas, mc_seed, mc_burn_in, mc_threads, mc_out);

    // --- heatmap ---
    auto* hm_cmd = app.add_subcommand("heatmap", "PER/MMP over an (N, T) grid");
    ParamFlags hm_params;
    hm_params.attach(hm_cmd);
    std::string hm_spec_file, hm_out = "heatmap.csv", hm_svg;
    std::vector<int> hm_n_grid;
    std::vector<std::int64_t> hm_t_grid;
    int hm_replicas = 1000, hm_threads = 0;
    std::uint64_t hm_seed = 0;
    std::int64_t hm_burn_in = -1;
    hm_cmd->add_option("--n-grid", hm_n_grid, "N values")->delimiter(',');
    hm_cmd->add_option("--t-grid", hm_t_grid, "T values")->delimiter(',');
    hm_cmd->add_option("--svg", hm_svg, "also write an SVG heatmap");
    add_mc_flags(hm_cmd, hm_spec_file, hm_replicas, hm_seed, hm_burn_in, hm_threads, hm_out);

    // --- sweep ---
    auto* sw_cmd = app.add_subcommand("sweep", "PER/MMP while one parameter varies");
    ParamFlags sw_params;
    sw_params.attach(sw_cmd);
    std::string sw_spec_file, sw_out = "sweep.csv", sw_svg, sw_param;
    std::vector<double> sw_values;
    std::vector<std::int64_t> sw_t_grid;
    int sw_replicas = 1000, sw_threads = 0;
    std::uint64_t sw_seed = 0;
    std::int64_t sw_burn_in = -1;
    sw_cmd->add_option("--param", sw_param, "one of n, r_plus, beta, lambda, p");
    sw_cmd->add_option("--values", sw_values, "sweep values")->delimiter(',');
    sw_cmd->add_option("--t-grid", sw_t_grid, "T values")->delimiter(',');
    sw_cmd->add_option("--svg", sw_svg, "also write an SVG figure");
    add_mc_flags(sw_cmd, sw_spec_file, sw_replicas, sw_seed, sw_burn_in, sw_threads, sw_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (sim_cmd->parsed()) {
            cc::Environment env;
            if (!sim_env_file.empty()) {
                env = cc::read_environment_file(sim_env_file);
            } else {
                const cc::ModelParams params = sim_params.resolve(sim_cmd);
                env = cc::sample_environment(params, cc::build_layout(params),
                                             cc::hash64(sim_seed, 1));
            }
            if (!sim_save_env.empty()) cc::write_environment_file(sim_save_env, env);
            cc::SimConfig config;
            config.t_samples = sim_t;
            config.burn_in = sim_burn_in;
            config.seed = cc::hash64(sim_seed, 2);
            const cc::Trajectory traj = cc::simulate(env, config);
            cc::write_trajectory_file(sim_out, traj, sim_format);
            const cc::TrajectorySummary summary = cc::summarize(traj);
            std::cout << "simulate: N=" << env.n() << " T=" << traj.t()
                      << " grand_mean=" << cc::format_double(summary.grand_mean) << " -> "
                      << sim_out << '\n';
        } else if (est_cmd->parsed()) {
            const cc::Trajectory traj = cc::read_trajectory_file(est_traj);
            const cc::TrajectorySummary summary = cc::summarize(traj);
            const cc::RecoveryResult result = cc::recover(traj, summary);
            std::optional<cc::RecoveryScore> rec_score;
            if (!est_env_file.empty()) {
                const cc::Environment env = cc::read_environment_file(est_env_file);
                rec_score = cc::score(result.labels_hat, env.layout);
            }
            const std::string json =
                cc::recovery_to_json(result, rec_score ? &*rec_score : nullptr);
            if (est_out.empty()) {
                std::cout << json << '\n';
            } else {
                cc::write_text_file(est_out, json + "\n");
                std::cout << "estimate: N=" << traj.n() << " T=" << traj.t();
                if (rec_score)
                    std::cout << " exact=" << (rec_score->exact ? "true" : "false")
                              << " misclassified=" << cc::format_double(rec_score->misclassified_fraction);
                std::cout << " -> " << est_out << '\n';
            }
        } else if (ora_cmd->parsed()) {
            cc::Environment env;
            if (!ora_env_file.empty()) {
                env = cc::read_environment_file(ora_env_file);
            } else {
                const cc::ModelParams params = ora_params.resolve(ora_cmd);
                env = cc::sample_environment(params, cc::build_layout(params), ora_seed);
            }
            const cc::OracleQuantities oracle = cc::compute_oracle(env, ora_tol, ora_max_iter);
            const cc::TheoreticalConstants constants = cc::theoretical_constants(env.params);
            const cc::ApproxResiduals residuals =
                cc::approximation_residuals(env, oracle, constants);
            const cc::EnvDiagnostics diagnostics =
                cc::environment_diagnostics(env, constants, ora_tol);
            const std::string json = cc::oracle_to_json(env, oracle, constants, residuals,
                                                        diagnostics, ora_matrices);
            if (!ora_res_csv.empty()) {
                std::ofstream res(ora_res_csv);
                if (!res) throw std::runtime_error("cannot open for writing: " + ora_res_csv);
                cc::write_residuals_csv(res, env, residuals, diagnostics);
            }
            if (ora_out.empty()) {
                std::cout << json << '\n';
            } else {
                cc::write_text_file(ora_out, json + "\n");
                std::cout << "oracle: N=" << env.n() << " iterations=" << oracle.iterations
                          << " residual=" << cc::format_double(oracle.residual) << " -> "
                          << ora_out << '\n';
            }
        } else if (mc_cmd->parsed()) {
            cc::ExperimentSpec spec = resolve_spec(mc_spec_file);
            spec.base = mc_params.resolve(mc_cmd, spec.base);
            if (mc_cmd->count("--t")) spec.t_grid = {mc_t};
            if (mc_cmd->count("--replicas")) spec.n_replicas = mc_replicas;
            if (mc_cmd->count("--seed")) spec.master_seed = mc_seed;
            if (mc_cmd->count("--burn-in")) spec.burn_in = mc_burn_in;
            if (mc_cmd->count("--threads")) spec.threads = mc_threads;
            if (spec.t_grid.empty()) return exit_usage("mc: --t (or a spec with \"t\") is required");
            const cc::CellResult cell =
                cc::run_cell(spec.base, spec.t_grid.front(), spec.n_replicas, spec.master_seed, 0,
                             spec.threads, spec.burn_in);
            cc::write_cells_csv_file(mc_out, {cell}, spec.master_seed, spec.burn_in);
            std::cout << "mc: N=" << spec.base.n << " T=" << cell.t
                      << " per_hat=" << cc::format_double(cell.per_hat)
                      << " mmp_hat=" << cc::format_double(cell.mmp_hat) << " -> " << mc_out << '\n';
        } else if (hm_cmd->parsed()) {
            cc::ExperimentSpec spec = resolve_spec(hm_spec_file);
            spec.base = hm_params.resolve(hm_cmd, spec.base);
            if (!hm_n_grid.empty()) spec.n_grid = hm_n_grid;
            if (!hm_t_grid.empty()) spec.t_grid = hm_t_grid;
            if (hm_cmd->count("--replicas")) spec.n_replicas = hm_replicas;
            if (hm_cmd->count("--seed")) spec.master_seed = hm_seed;
            if (hm_cmd->count("--burn-in")) spec.burn_in = hm_burn_in;
            if (hm_cmd->count("--threads")) spec.threads = hm_threads;
            if (spec.n_grid.empty() || spec.t_grid.empty())
                return exit_usage("heatmap: needs --n-grid and --t-grid (or a spec file)");
            const std::vector<cc::CellResult> cells = cc::run_heatmap(spec);
            cc::write_cells_csv_file(hm_out, cells, spec.master_seed, spec.burn_in);
            if (!hm_svg.empty()) cc::write_text_file(hm_svg, cc::heatmap_svg(cells));
            std::cout << "heatmap: " << cells.size() << " cells -> " << hm_out << '\n';
        } else if (sw_cmd->parsed()) {
            cc::ExperimentSpec spec = resolve_spec(sw_spec_file);
            spec.base = sw_params.resolve(sw_cmd, spec.base);
            if (!sw_param.empty()) spec.sweep_param = sw_param;
            if (!sw_values.empty()) spec.sweep_values = sw_values;
            if (!sw_t_grid.empty()) spec.t_grid = sw_t_grid;
            if (sw_cmd->count("--replicas")) spec.n_replicas = sw_replicas;
            if (sw_cmd->count("--seed")) spec.master_seed = sw_seed;
            if (sw_cmd->count("--burn-in")) spec.burn_in = sw_burn_in;
            if (sw_cmd->count("--threads")) spec.threads = sw_threads;
            if (spec.sweep_param.empty() || spec.sweep_values.empty() || spec.t_grid.empty())
                return exit_usage("sweep: needs --param, --values and --t-grid (or a spec file)");
            if (spec.sweep_param != "n" && spec.sweep_param != "r_plus" &&
                spec.sweep_param != "beta" && spec.sweep_param != "lambda" &&
                spec.sweep_param != "p")
                return exit_usage("sweep: unknown parameter '" + spec.sweep_param + "'");
            const std::vector<cc::CellResult> cells = cc::run_sweep(spec);
            cc::write_cells_csv_file(sw_out, cells, spec.master_seed, spec.burn_in);
            if (!sw_svg.empty()) cc::write_text_file(sw_svg, cc::sweep_svg(cells, spec.sweep_param));
            std::cout << "sweep: " << spec.sweep_param << " over " << spec.sweep_values.size()
                      << " values, " << cells.size() << " cells -> " << sw_out << '\n';
        }
    } catch (const std::invalid_argument& e) {
        return exit_usage(e.what());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
