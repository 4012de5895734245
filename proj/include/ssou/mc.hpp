#pragma once

/**
 * @file mc.hpp
 * @brief Monte Carlo study harness: simulate, estimate, normalize, summarize.
 *
 * Replication r at sample size n draws its path from the substream
 * derive_seed(derive_seed(seed, n), r), so every output except wall times is a
 * function of the configuration alone, whatever the number of threads.
 */

#include <cstdint>
#include <string>
#include <vector>

#include "ssou/io.hpp"
#include "ssou/pipeline.hpp"

namespace ssou {

struct MCConfig {
    ModelParams theta;
    double y0 = 0.0;
    double T = 1.0;
    std::vector<int> n_list{2000};
    int L = 200;
    double q = 0.2;
    std::uint64_t seed = 20240601;
    std::vector<Method> methods{Method::Mle, Method::Qmle};
    int threads = 0;  ///< 0: OpenMP default
    bool timescale = false;
    bool studentize = true;  ///< observed information and Studentized statistics per replication

    /// Throws InvalidInput unless L >= 1, every n >= 50 and methods is nonempty.
    void validate() const;
    /// Reads the keys lambda, mu, alpha, sigma, beta, y0, T, n, L, q, seed, methods, threads, timescale, studentize.
    /// @throws InvalidInput on unknown keys.
    static MCConfig from_config(const KeyValueConfig& kv);
};

struct ReplicationRecord {
    int rep = 0;
    int n = 0;
    Method method = Method::Qmle;
    bool ok = false;          ///< false: the replication threw
    std::string error;
    EstimationResult result;  ///< valid when ok
    Vec5 normalized = Vec5::Constant(std::numeric_limits<double>::quiet_NaN());
    Vec5 studentized = Vec5::Constant(std::numeric_limits<double>::quiet_NaN());
};

struct SummaryRow {
    std::string method;
    std::string param;
    int n = 0;
    double mean = 0.0;
    double sd = 0.0;
    double time_s = 0.0;
    int count = 0;
};

struct MCReport {
    std::vector<ReplicationRecord> records;  ///< sorted by (n, rep, method)
    std::vector<SummaryRow> summary;
    int failures = 0;      ///< replications that threw
    int nonconverged = 0;  ///< optimizer runs that stopped without converging
    int total = 0;

    double failure_fraction() const { return total ? double(failures) / total : 0.0; }
};

/// Methods actually run: the configured list plus timescale when the flag is set.
std::vector<Method> effective_methods(const MCConfig& cfg);

/// One replication of one method at one n.
ReplicationRecord run_replication(const MCConfig& cfg, const EstimateOptions& opt, int n, int rep, Method method);

/// Parallel over (n, replication) tasks with OpenMP.
MCReport run_mc(const MCConfig& cfg, const EstimateOptions& opt = {});

/// Serial reference; produces the same records as run_mc apart from wall times.
MCReport run_mc_serial(const MCConfig& cfg, const EstimateOptions& opt = {});

/// Mean, SD (divisor L - 1) and mean wall time per (method, parameter, n) over replications that ran.
std::vector<SummaryRow> summarize(const std::vector<ReplicationRecord>& records);

/// Writes summary.csv, replications.csv and normalized_n{n}.csv into dir (created if needed).
/// @throws IoError.
void write_mc_outputs(const MCReport& report, const MCConfig& cfg, const std::string& dir);

}  // namespace ssou
