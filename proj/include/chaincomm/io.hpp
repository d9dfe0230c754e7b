#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "chaincomm/experiment.hpp"
#include "chaincomm/model.hpp"
#include "chaincomm/oracle.hpp"
#include "chaincomm/simulate.hpp"

namespace chaincomm {

// Environment file: JSON object with "format": "chaincomm-env-v1", the
// params, layout (plus_count + label string of '+'/'-'), seed, and theta as
// a packed hex string (per row: ceil(N/8) bytes, bit j of row i stored in
// byte j/8 at bit position j%8). Readers also accept "theta_rows", an array
// of N "0"/"1" strings.
void write_environment(std::ostream& out, const Environment& env);
void write_environment_file(const std::string& path, const Environment& env);
Environment read_environment(std::istream& in);
Environment read_environment_file(const std::string& path);

// Trajectory CSV: header "t,x1,...,xN", one row per retained step, t from 1.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& in);

// Trajectory binary: magic "CCTRJ001", then little-endian u32 n,
// u32 words_per_row, u64 t, u64 env_seed, u64 sim_seed, followed by
// t*words_per_row u64 row words (LSB = component 0).
void write_trajectory_binary(std::ostream& out, const Trajectory& traj);
Trajectory read_trajectory_binary(std::istream& in);

void write_trajectory_file(const std::string& path, const Trajectory& traj,
                           const std::string& format);  // "csv" or "binary"
Trajectory read_trajectory_file(const std::string& path);  // sniffs the magic

// Cell results CSV. Header:
//   N,T,r_plus,beta,lambda,p,replicas,per_hat,per_stderr,mmp_hat,mmp_std,wall_time_s
// preceded by one "# key=value ..." metadata comment (burn_in, master_seed).
// Every column except wall_time_s is deterministic for a fixed spec + seed.
void write_cells_csv(std::ostream& out, const std::vector<CellResult>& cells,
                     std::uint64_t master_seed, std::int64_t burn_in);
void write_cells_csv_file(const std::string& path, const std::vector<CellResult>& cells,
                          std::uint64_t master_seed, std::int64_t burn_in);

// Experiment spec JSON: {"params": {...}, "t": int or [int...],
// "n_grid": [...], "sweep": {"param": ..., "values": [...]},
// "replicas": R, "seed": s, "burn_in": b, "threads": w}.
ExperimentSpec read_experiment_spec(std::istream& in);
ExperimentSpec read_experiment_spec_file(const std::string& path);

// Oracle output JSON; matrices included only when with_matrices is set.
std::string oracle_to_json(const Environment& env, const OracleQuantities& oracle,
                           const TheoreticalConstants& constants, const ApproxResiduals& residuals,
                           const EnvDiagnostics& diagnostics, bool with_matrices);

// One-row CSV of the residual diagnostics.
void write_residuals_csv(std::ostream& out, const Environment& env,
                         const ApproxResiduals& residuals, const EnvDiagnostics& diagnostics);

std::string recovery_to_json(const RecoveryResult& result, const RecoveryScore* score_or_null);

// Shortest decimal form that round-trips a double; used everywhere a double
// lands in a text output so identical runs produce identical bytes.
std::string format_double(double value);

}  // namespace chaincomm
