#include "chaincomm/io.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace chaincomm {

using nlohmann::json;

std::string format_double(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, ptr);
}

namespace {

constexpr char kTrajMagic[8] = {'C', 'C', 'T', 'R', 'J', '0', '0', '1'};

json params_to_json(const ModelParams& p) {
    return json{{"n", p.n},
                {"r_plus", p.r_plus},
                {"beta", p.beta},
                {"lambda", p.lambda},
                {"p", p.p}};
}

ModelParams params_from_json(const json& j) {
    return validate_params(j.at("n").get<int>(), j.at("r_plus").get<double>(),
                           j.at("beta").get<double>(), j.at("lambda").get<double>(),
                           j.at("p").get<double>());
}

std::string theta_to_hex(const Environment& env) {
    static const char* digits = "0123456789abcdef";
    const int n = env.n();
    const int bytes_per_row = (n + 7) / 8;
    std::string hex;
    hex.reserve(static_cast<std::size_t>(n) * bytes_per_row * 2);
    for (int i = 0; i < n; ++i) {
        for (int b = 0; b < bytes_per_row; ++b) {
            unsigned byte = 0;
            for (int k = 0; k < 8; ++k) {
                const int j = b * 8 + k;
                if (j < n && env.theta_at(i, j)) byte |= 1u << k;
            }
            hex.push_back(digits[byte >> 4]);
            hex.push_back(digits[byte & 0xF]);
        }
    }
    return hex;
}

std::vector<std::uint8_t> theta_from_hex(const std::string& hex, int n) {
    const int bytes_per_row = (n + 7) / 8;
    if (hex.size() != static_cast<std::size_t>(n) * bytes_per_row * 2)
        throw std::runtime_error("environment file: theta_hex length does not match n");
    auto nibble = [](char c) -> unsigned {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw std::runtime_error("environment file: bad hex digit in theta_hex");
    };
    std::vector<std::uint8_t> theta(static_cast<std::size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const std::size_t byte_idx = static_cast<std::size_t>(i) * bytes_per_row + j / 8;
            const unsigned byte =
                (nibble(hex[2 * byte_idx]) << 4) | nibble(hex[2 * byte_idx + 1]);
            theta[static_cast<std::size_t>(i) * n + j] = (byte >> (j % 8)) & 1u;
        }
    }
    return theta;
}

}  // namespace

void write_environment(std::ostream& out, const Environment& env) {
    std::string labels;
    labels.reserve(env.n());
    for (const std::int8_t l : env.layout.labels) labels.push_back(l > 0 ? '+' : '-');
    json j{{"format", "chaincomm-env-v1"},
           {"params", params_to_json(env.params)},
           {"layout", json{{"plus_count", env.layout.plus_count}, {"labels", labels}}},
           {"seed", env.seed},
           {"theta_hex", theta_to_hex(env)}};
    out << j.dump(2) << '\n';
}

Environment read_environment(std::istream& in) {
    json j = json::parse(in);
    if (j.value("format", "") != "chaincomm-env-v1")
        throw std::runtime_error("environment file: missing or unknown format tag");
    Environment env;
    env.params = params_from_json(j.at("params"));
    const json& layout = j.at("layout");
    const std::string labels = layout.at("labels").get<std::string>();
    if (static_cast<int>(labels.size()) != env.params.n)
        throw std::runtime_error("environment file: labels length does not match n");
    env.layout.plus_count = layout.at("plus_count").get<int>();
    env.layout.labels.reserve(env.params.n);
    int plus_seen = 0;
    for (const char c : labels) {
        if (c != '+' && c != '-') throw std::runtime_error("environment file: bad label char");
        env.layout.labels.push_back(c == '+' ? 1 : -1);
        plus_seen += c == '+';
    }
    if (plus_seen != env.layout.plus_count)
        throw std::runtime_error("environment file: plus_count does not match labels");
    env.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("theta_hex")) {
        env.theta = theta_from_hex(j.at("theta_hex").get<std::string>(), env.params.n);
    } else if (j.contains("theta_rows")) {
        const auto rows = j.at("theta_rows").get<std::vector<std::string>>();
        if (static_cast<int>(rows.size()) != env.params.n)
            throw std::runtime_error("environment file: theta_rows count does not match n");
        env.theta.resize(static_cast<std::size_t>(env.params.n) * env.params.n);
        for (int i = 0; i < env.params.n; ++i) {
            if (static_cast<int>(rows[i].size()) != env.params.n)
                throw std::runtime_error("environment file: theta_rows row length mismatch");
            for (int j2 = 0; j2 < env.params.n; ++j2) {
                if (rows[i][j2] != '0' && rows[i][j2] != '1')
                    throw std::runtime_error("environment file: theta_rows entries must be 0/1");
                env.theta[static_cast<std::size_t>(i) * env.params.n + j2] = rows[i][j2] - '0';
            }
        }
    } else {
        throw std::runtime_error("environment file: needs theta_hex or theta_rows");
    }
    return env;
}

void write_environment_file(const std::string& path, const Environment& env) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_environment(out, env);
}

Environment read_environment_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return read_environment(in);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << 't';
    for (int i = 1; i <= traj.n(); ++i) out << ",x" << i;
    out << '\n';
    for (std::int64_t t = 0; t < traj.t(); ++t) {
        out << (t + 1);
        for (int i = 0; i < traj.n(); ++i) out << ',' << (traj.at(t, i) ? '1' : '0');
        out << '\n';
    }
}

Trajectory read_trajectory_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("trajectory csv: empty file");
    int n = 0;
    for (const char c : line) n += c == ',';
    if (n < 1) throw std::runtime_error("trajectory csv: no component columns");

    std::vector<std::uint8_t> bits;
    std::int64_t t_samples = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t pos = line.find(',');
        if (pos == std::string::npos) throw std::runtime_error("trajectory csv: malformed row");
        int seen = 0;
        while (pos != std::string::npos && seen < n) {
            const char c = line[pos + 1];
            if (c != '0' && c != '1') throw std::runtime_error("trajectory csv: entries must be 0/1");
            bits.push_back(c - '0');
            ++seen;
            pos = line.find(',', pos + 1);
        }
        if (seen != n) throw std::runtime_error("trajectory csv: row width mismatch");
        ++t_samples;
    }
    Trajectory traj(n, t_samples, 0, 0);
    for (std::int64_t t = 0; t < t_samples; ++t)
        traj.set_row(t, std::span<const std::uint8_t>(bits.data() + t * n, n));
    return traj;
}

void write_trajectory_binary(std::ostream& out, const Trajectory& traj) {
    out.write(kTrajMagic, sizeof(kTrajMagic));
    auto put_u32 = [&](std::uint32_t v) {
        char b[4];
        for (int k = 0; k < 4; ++k) b[k] = static_cast<char>((v >> (8 * k)) & 0xFF);
        out.write(b, 4);
    };
    auto put_u64 = [&](std::uint64_t v) {
        char b[8];
        for (int k = 0; k < 8; ++k) b[k] = static_cast<char>((v >> (8 * k)) & 0xFF);
        out.write(b, 8);
    };
    put_u32(static_cast<std::uint32_t>(traj.n()));
    put_u32(static_cast<std::uint32_t>(traj.words_per_row()));
    put_u64(static_cast<std::uint64_t>(traj.t()));
    put_u64(traj.env_seed());
    put_u64(traj.sim_seed());
    for (const std::uint64_t word : traj.raw_words()) put_u64(word);
}

Trajectory read_trajectory_binary(std::istream& in) {
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kTrajMagic, 8) != 0)
        throw std::runtime_error("trajectory binary: bad magic");
    auto get_u32 = [&]() {
        unsigned char b[4];
        in.read(reinterpret_cast<char*>(b), 4);
        std::uint32_t v = 0;
        for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(b[k]) << (8 * k);
        return v;
    };
    auto get_u64 = [&]() {
        unsigned char b[8];
        in.read(reinterpret_cast<char*>(b), 8);
        std::uint64_t v = 0;
        for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(b[k]) << (8 * k);
        return v;
    };
    const std::uint32_t n = get_u32();
    const std::uint32_t words_per_row = get_u32();
    const std::uint64_t t_samples = get_u64();
    const std::uint64_t env_seed = get_u64();
    const std::uint64_t sim_seed = get_u64();
    if (!in) throw std::runtime_error("trajectory binary: truncated header");
    if (words_per_row != (n + 63) / 64)
        throw std::runtime_error("trajectory binary: inconsistent word count");
    Trajectory traj(static_cast<int>(n), static_cast<std::int64_t>(t_samples), env_seed, sim_seed);
    for (std::int64_t t = 0; t < traj.t(); ++t) {
        std::uint64_t* row = traj.mutable_row(t);
        for (int w = 0; w < traj.words_per_row(); ++w) row[w] = get_u64();
    }
    if (!in) throw std::runtime_error("trajectory binary: truncated rows");
    return traj;
}

void write_trajectory_file(const std::string& path, const Trajectory& traj,
                           const std::string& format) {
    if (format == "csv") {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot open for writing: " + path);
        write_trajectory_csv(out, traj);
    } else if (format == "binary") {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open for writing: " + path);
        write_trajectory_binary(out, traj);
    } else {
        throw std::invalid_argument("trajectory format must be csv or binary");
    }
}

Trajectory read_trajectory_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    char magic[8];
    in.read(magic, 8);
    const bool is_binary = in.gcount() == 8 && std::memcmp(magic, kTrajMagic, 8) == 0;
    in.clear();
    in.seekg(0);
    return is_binary ? read_trajectory_binary(in) : read_trajectory_csv(in);
}

void write_cells_csv(std::ostream& out, const std::vector<CellResult>& cells,
                     std::uint64_t master_seed, std::int64_t burn_in) {
    out << "# master_seed=" << master_seed << " burn_in=";
    if (burn_in >= 0)
        out << burn_in;
    else
        out << "auto";
    out << '\n';
    out << "N,T,r_plus,beta,lambda,p,replicas,per_hat,per_stderr,mmp_hat,mmp_std,wall_time_s\n";
    for (const CellResult& c : cells) {
        out << c.params.n << ',' << c.t << ',' << format_double(c.params.r_plus) << ','
            << format_double(c.params.beta) << ',' << format_double(c.params.lambda) << ','
            << format_double(c.params.p) << ',' << c.n_replicas << ',' << format_double(c.per_hat)
            << ',' << format_double(c.per_stderr) << ',' << format_double(c.mmp_hat) << ','
            << format_double(c.mmp_std) << ',' << format_double(c.wall_time_s) << '\n';
    }
}

void write_cells_csv_file(const std::string& path, const std::vector<CellResult>& cells,
                          std::uint64_t master_seed, std::int64_t burn_in) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_cells_csv(out, cells, master_seed, burn_in);
}

ExperimentSpec read_experiment_spec(std::istream& in) {
    json j = json::parse(in);
    ExperimentSpec spec;
    if (j.contains("params")) spec.base = params_from_json(j.at("params"));
    if (j.contains("t")) {
        if (j.at("t").is_array())
            spec.t_grid = j.at("t").get<std::vector<std::int64_t>>();
        else
            spec.t_grid = {j.at("t").get<std::int64_t>()};
    }
    if (j.contains("n_grid")) spec.n_grid = j.at("n_grid").get<std::vector<int>>();
    if (j.contains("sweep")) {
        spec.sweep_param = j.at("sweep").at("param").get<std::string>();
        spec.sweep_values = j.at("sweep").at("values").get<std::vector<double>>();
    }
    if (j.contains("replicas")) spec.n_replicas = j.at("replicas").get<int>();
    if (j.contains("seed")) spec.master_seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("burn_in") && !j.at("burn_in").is_null())
        spec.burn_in = j.at("burn_in").get<std::int64_t>();
    if (j.contains("threads")) spec.threads = j.at("threads").get<int>();
    return spec;
}

ExperimentSpec read_experiment_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return read_experiment_spec(in);
}

namespace {

json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

std::string oracle_to_json(const Environment& env, const OracleQuantities& oracle,
                           const TheoreticalConstants& constants, const ApproxResiduals& residuals,
                           const EnvDiagnostics& diagnostics, bool with_matrices) {
    json j{{"n", env.n()},
           {"seed", env.seed},
           {"mean_vec", vector_to_json(oracle.mean_vec)},
           {"var_vec", vector_to_json(oracle.var_vec)},
           {"sigma_vec", vector_to_json(oracle.sigma_vec)},
           {"iterations", oracle.iterations},
           {"residual", oracle.residual},
           {"constants",
            json{{"m", constants.m},
                 {"c1", constants.c1},
                 {"c2", constants.c2},
                 {"sigma_plus", constants.sigma_plus},
                 {"sigma_minus", constants.sigma_minus},
                 {"separation", constants.separation}}},
           {"residuals",
            json{{"thm1_maxnorm", residuals.thm1_maxnorm},
                 {"thm2_supnorm", residuals.thm2_supnorm},
                 {"prop43_maxnorm", residuals.prop43_maxnorm}}},
           {"diagnostics",
            json{{"L_err", diagnostics.l_err},
                 {"C_err", diagnostics.c_err},
                 {"v_err", diagnostics.v_err}}}};
    if (with_matrices) {
        j["sigma0"] = matrix_to_json(oracle.sigma0);
        j["sigma1"] = matrix_to_json(oracle.sigma1);
    }
    return j.dump(2);
}

void write_residuals_csv(std::ostream& out, const Environment& env,
                         const ApproxResiduals& residuals, const EnvDiagnostics& diagnostics) {
    out << "N,seed,thm1_maxnorm,thm2_supnorm,prop43_maxnorm,L_err,C_err,v_err\n";
    out << env.n() << ',' << env.seed << ',' << format_double(residuals.thm1_maxnorm) << ','
        << format_double(residuals.thm2_supnorm) << ',' << format_double(residuals.prop43_maxnorm)
        << ',' << format_double(diagnostics.l_err) << ',' << format_double(diagnostics.c_err)
        << ',' << format_double(diagnostics.v_err) << '\n';
}

std::string recovery_to_json(const RecoveryResult& result, const RecoveryScore* score_or_null) {
    json j{{"sigma_hat", vector_to_json(result.sigma_hat)},
           {"centroids", json::array({result.c_low, result.c_high})},
           {"labels_hat", result.labels_hat},
           {"kmeans_iters", result.kmeans_iters}};
    if (score_or_null) {
        j["exact"] = score_or_null->exact;
        j["misclassified_fraction"] = score_or_null->misclassified_fraction;
    }
    return j.dump(2);
}

}  // namespace chaincomm
