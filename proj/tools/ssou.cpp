#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <iostream>
#include <optional>
#include <string>

#include "ssou/errors.hpp"
#include "ssou/io.hpp"
#include "ssou/mc.hpp"
#include "ssou/pipeline.hpp"
#include "ssou/rng.hpp"

namespace {

using json = nlohmann::json;
using namespace ssou;

enum ExitCode { kOk = 0, kBadInput = 2, kIoFailure = 3, kOptimizerFailure = 4, kMcFailures = 5 };

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json params_json(const Vec5& v) {
    json j;
    for (int k = 0; k < 5; ++k) j[param_name(k)] = number(v[k]);
    return j;
}

json matrix_json(const Mat5& m) {
    json rows = json::array();
    for (int i = 0; i < 5; ++i) {
        json row = json::array();
        for (int k = 0; k < 5; ++k) row.push_back(number(m(i, k)));
        rows.push_back(row);
    }
    return rows;
}

/// Estimation options from an optional key = value file plus command-line overrides.
EstimateOptions load_options(const std::string& config, std::optional<double> q, json& echo) {
    EstimateOptions o;
    if (!config.empty()) {
        const KeyValueConfig kv = KeyValueConfig::load(config);
        o.moments.q = kv.get_double("q", o.moments.q);
        o.lambda0 = kv.get_double("lambda0", o.lambda0);
        o.mu0 = kv.get_double("mu0", o.mu0);
        o.optimizer.grad_tol = kv.get_double("grad_tol", o.optimizer.grad_tol);
        o.optimizer.step_tol = kv.get_double("step_tol", o.optimizer.step_tol);
        o.optimizer.max_iters = static_cast<int>(kv.get_int("max_iters", o.optimizer.max_iters));
        o.timescale_refine = kv.get_bool("refine", o.timescale_refine);
        const auto unused = kv.unused_keys();
        if (!unused.empty()) throw InvalidInput("config: unknown key '" + unused.front() + "'");
    }
    if (q) o.moments.q = *q;
    o.moments.validate();
    echo["q"] = o.moments.q;
    echo["lambda0"] = o.lambda0;
    echo["mu0"] = o.mu0;
    echo["grad_tol"] = o.optimizer.grad_tol;
    echo["step_tol"] = o.optimizer.step_tol;
    echo["max_iters"] = o.optimizer.max_iters;
    echo["refine"] = o.timescale_refine;
    return o;
}

json report_json(const EstimationResult& r, const ObservedPath& path, const json& echo) {
    json j;
    j["method"] = to_string(r.method);
    j["theta_hat"] = params_json(r.theta_hat);
    j["loglik"] = number(r.loglik);
    j["converged"] = r.converged;
    j["iters"] = r.iterations;
    j["evaluations"] = r.evaluations;
    j["reason"] = r.reason;
    j["grad_norm"] = number(r.grad_norm);
    j["stderr"] = params_json(r.std_err);
    j["info_min_eig"] = number(r.info_min_eig);
    j["observed_information"] = r.has_info ? matrix_json(r.info) : json(nullptr);
    j["rate_matrix"] = r.has_info ? matrix_json(r.rate) : json(nullptr);
    j["moments"] = {{"alpha", number(r.moments.alpha_hat)},
                    {"sigma", number(r.moments.sigma_hat)},
                    {"beta", number(r.moments.beta_hat)},
                    {"alpha_clamped", r.moments.alpha_clamped},
                    {"beta_clamped", r.moments.beta_clamped}};
    j["seed"] = nullptr;
    j["runtime_s"] = r.runtime_s;
    j["n"] = path.n();
    j["T"] = path.scheme.T;
    j["config"] = echo;
    if (r.method == Method::Timescale) {
        j["tau"] = number(r.tau);
        j["stepwise"] = params_json(r.stepwise);
        j["original"] = params_json(r.original);
    }
    return j;
}

int run_estimate(const std::string& input, std::optional<double> T, Method method, const std::string& config,
                 std::optional<double> q) {
    json echo;
    echo["input"] = input;
    echo["method"] = to_string(method);
    if (T) echo["T"] = *T;
    const EstimateOptions opt = load_options(config, q, echo);
    const ObservedPath path = read_path_csv(input, T);
    const EstimationResult r = estimate(path, method, opt);
    std::cout << std::setprecision(17) << report_json(r, path, echo).dump(2) << '\n';
    return r.converged ? kOk : kOptimizerFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Skewed stable Ornstein-Uhlenbeck simulation and estimation"};
    app.require_subcommand(1);

    ModelParams th;
    double y0 = 0.0, T = 1.0;
    int n = 2000;
    std::uint64_t seed = 20240601;
    std::string out;
    auto* sim = app.add_subcommand("simulate", "Simulate a path on an equidistant grid and write it as CSV");
    sim->add_option("--lambda", th.lambda, "Mean-reversion rate")->capture_default_str();
    sim->add_option("--mu", th.mu, "Drift level")->capture_default_str();
    sim->add_option("--alpha", th.alpha, "Stability index in (0, 2]")->capture_default_str();
    sim->add_option("--sigma", th.sigma, "Noise scale")->capture_default_str();
    sim->add_option("--beta", th.beta, "Skewness in [-1, 1]")->capture_default_str();
    sim->add_option("--y0", y0, "Initial value")->capture_default_str();
    sim->add_option("--T", T, "Terminal time")->capture_default_str();
    sim->add_option("--n", n, "Number of increments")->capture_default_str();
    sim->add_option("--seed", seed, "Random seed")->capture_default_str();
    sim->add_option("--out", out, "Output CSV file")->required();

    std::string method_s = "qmle", input, config;
    std::optional<double> T_opt, q_opt;
    auto* est = app.add_subcommand("estimate", "Estimate the parameters from a path CSV and print a JSON report");
    est->add_option("--method", method_s, "moment, qmle or mle")->capture_default_str();
    est->add_option("--input", input, "Path CSV with header t,y")->required();
    est->add_option("--T", T_opt, "Terminal time (default: last t in the file)");
    est->add_option("--q", q_opt, "Moment order for the moment estimator");
    est->add_option("--config", config, "key = value file with estimator settings");

    std::string ts_input, ts_config;
    std::optional<double> ts_q;
    auto* ts = app.add_subcommand("timescale", "Time-scale estimation on the unit grid; prints a JSON report");
    ts->add_option("--input", ts_input, "Path CSV with header t,y")->required();
    ts->add_option("--q", ts_q, "Moment order for the moment step");
    ts->add_option("--config", ts_config, "key = value file with estimator settings");

    std::string mc_config, mc_out;
    int threads = 0;
    auto* mc = app.add_subcommand("mc", "Run a Monte Carlo study and write summary and per-replication CSV files");
    mc->add_option("--config", mc_config, "MC configuration file")->required();
    mc->add_option("--out", mc_out, "Output directory")->required();
    mc->add_option("--threads", threads, "Worker threads (0: OpenMP default)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kBadInput;
    }

    try {
        if (*sim) {
            th.validate();
            const SamplingScheme scheme(T, n);
            RngStream rng(seed);
            const ObservedPath path = simulate_path(th, y0, scheme, rng);
            write_path_csv(out, path);
            return kOk;
        }
        if (*est) {
            const Method m = parse_method(method_s);
            if (m == Method::Timescale) throw InvalidInput("use the timescale subcommand for the time-scale fit");
            return run_estimate(input, T_opt, m, config, q_opt);
        }
        if (*ts) return run_estimate(ts_input, std::nullopt, Method::Timescale, ts_config, ts_q);
        if (*mc) {
            MCConfig cfg = MCConfig::from_config(KeyValueConfig::load(mc_config));
            if (mc->count("--threads")) cfg.threads = threads;
            cfg.validate();
            const MCReport rep = run_mc(cfg);
            write_mc_outputs(rep, cfg, mc_out);
            std::cerr << "mc: " << rep.total << " fits, " << rep.failures << " failed, " << rep.nonconverged
                      << " not converged\n";
            return rep.failure_fraction() > 0.2 ? kMcFailures : kOk;
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIoFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadInput;
    }
    return kOk;
}
