#include "ssou/mc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ssou/errors.hpp"
#include "ssou/rng.hpp"

namespace ssou {

namespace {

// Parameters of the unit-horizon model obtained by reading a [0, T] grid as [0, 1].
Vec5 time_scaled_truth(const ModelParams& th, double T) {
    const double t = std::tan(th.alpha * std::numbers::pi / 2.0);
    const double s = std::pow(T, 1.0 / th.alpha);
    Vec5 v;
    v << th.lambda * T, th.mu * T + th.beta * th.sigma * (s - T) * t, th.alpha, th.sigma * s, th.beta;
    return v;
}

}  // namespace

void MCConfig::validate() const {
    theta.validate();
    require(std::isfinite(y0), "mc: y0 must be finite");
    require(std::isfinite(T) && T > 0.0, "mc: T must be positive");
    require(L >= 1, "mc: L must be at least 1");
    require(!n_list.empty(), "mc: n list is empty");
    for (int n : n_list) require(n >= 50, "mc: every n must be at least 50");
    require(!methods.empty() || timescale, "mc: methods must be nonempty");
    require(threads >= 0, "mc: threads must be non-negative");
}

MCConfig MCConfig::from_config(const KeyValueConfig& kv) {
    MCConfig c;
    c.theta.lambda = kv.get_double("lambda", c.theta.lambda);
    c.theta.mu = kv.get_double("mu", c.theta.mu);
    c.theta.alpha = kv.get_double("alpha", c.theta.alpha);
    c.theta.sigma = kv.get_double("sigma", c.theta.sigma);
    c.theta.beta = kv.get_double("beta", c.theta.beta);
    c.y0 = kv.get_double("y0", c.y0);
    c.T = kv.get_double("T", c.T);
    if (kv.has("n")) {
        c.n_list.clear();
        for (const auto& s : kv.get_list("n")) {
            try {
                c.n_list.push_back(std::stoi(s));
            } catch (const std::exception&) {
                throw InvalidInput("config key 'n': cannot parse '" + s + "'");
            }
        }
    }
    c.L = static_cast<int>(kv.get_int("L", c.L));
    c.q = kv.get_double("q", c.q);
    c.seed = kv.get_uint64("seed", c.seed);
    if (kv.has("methods")) {
        c.methods.clear();
        for (const auto& s : kv.get_list("methods")) c.methods.push_back(parse_method(s));
    }
    c.threads = static_cast<int>(kv.get_int("threads", c.threads));
    c.timescale = kv.get_bool("timescale", c.timescale);
    c.studentize = kv.get_bool("studentize", c.studentize);
    const auto unused = kv.unused_keys();
    if (!unused.empty()) throw InvalidInput("config: unknown key '" + unused.front() + "'");
    c.validate();
    return c;
}

std::vector<Method> effective_methods(const MCConfig& cfg) {
    std::vector<Method> m = cfg.methods;
    if (cfg.timescale && std::find(m.begin(), m.end(), Method::Timescale) == m.end()) m.push_back(Method::Timescale);
    return m;
}

ReplicationRecord run_replication(const MCConfig& cfg, const EstimateOptions& opt_in, int n, int rep, Method method) {
    ReplicationRecord r;
    r.rep = rep;
    r.n = n;
    r.method = method;
    try {
        RngStream rng = RngStream::substream(derive_seed(cfg.seed, static_cast<std::uint64_t>(n)),
                                             static_cast<std::uint64_t>(rep));
        const SamplingScheme scheme(cfg.T, n);
        const ObservedPath path = simulate_path(cfg.theta, cfg.y0, scheme, rng);
        EstimateOptions opt = opt_in;
        opt.moments.q = cfg.q;
        opt.information = cfg.studentize;
        r.result = estimate(path, method, opt);
        const bool unit = method == Method::Timescale;
        const Vec5 truth = unit ? time_scaled_truth(cfg.theta, cfg.T) : cfg.theta.vec();
        const SamplingScheme norm_scheme = unit ? SamplingScheme(1.0, n) : scheme;
        r.normalized = normalize_estimates(r.result.theta_hat, truth, norm_scheme);
        if (r.result.has_info && r.result.info_min_eig > 0.0)
            r.studentized = studentize(r.result.theta_hat, truth, r.result.info, r.result.rate);
        r.ok = true;
    } catch (const std::exception& e) {
        r.ok = false;
        r.error = e.what();
    }
    return r;
}

namespace {

MCReport finish(const MCConfig& cfg, std::vector<ReplicationRecord> records) {
    MCReport rep;
    rep.records = std::move(records);
    rep.total = static_cast<int>(rep.records.size());
    for (const auto& r : rep.records) {
        if (!r.ok)
            ++rep.failures;
        else if (!r.result.converged)
            ++rep.nonconverged;
    }
    rep.summary = summarize(rep.records);
    (void)cfg;
    return rep;
}

}  // namespace

MCReport run_mc(const MCConfig& cfg, const EstimateOptions& opt) {
    cfg.validate();
    const auto methods = effective_methods(cfg);
    const int M = static_cast<int>(methods.size());
    const int tasks = static_cast<int>(cfg.n_list.size()) * cfg.L;
    std::vector<ReplicationRecord> records(static_cast<std::size_t>(tasks) * M);
#ifdef _OPENMP
    const int nthreads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#else
    const int nthreads = 1;
#endif
    (void)nthreads;
#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads)
    for (int task = 0; task < tasks; ++task) {
        const int ni = task / cfg.L;
        const int rep = task % cfg.L;
        for (int m = 0; m < M; ++m)
            records[static_cast<std::size_t>(task) * M + m] = run_replication(cfg, opt, cfg.n_list[ni], rep, methods[m]);
    }
    return finish(cfg, std::move(records));
}

MCReport run_mc_serial(const MCConfig& cfg, const EstimateOptions& opt) {
    cfg.validate();
    const auto methods = effective_methods(cfg);
    std::vector<ReplicationRecord> records;
    for (int n : cfg.n_list)
        for (int rep = 0; rep < cfg.L; ++rep)
            for (Method m : methods) records.push_back(run_replication(cfg, opt, n, rep, m));
    return finish(cfg, std::move(records));
}

std::vector<SummaryRow> summarize(const std::vector<ReplicationRecord>& records) {
    struct Acc {
        double s = 0.0, s2 = 0.0, t = 0.0;
        int c = 0;
    };
    // Key order: n, method (first appearance), parameter.
    std::vector<std::pair<int, Method>> order;
    std::map<std::pair<int, int>, std::array<Acc, 5>> acc;
    for (const auto& r : records) {
        if (!r.ok) continue;
        const auto key = std::make_pair(r.n, static_cast<int>(r.method));
        if (!acc.count(key)) order.emplace_back(r.n, r.method);
        auto& a = acc[key];
        for (int k = 0; k < 5; ++k) {
            const double v = r.result.theta_hat[k];
            if (!std::isfinite(v)) continue;
            a[k].s += v;
            a[k].s2 += v * v;
            a[k].t += r.result.runtime_s;
            ++a[k].c;
        }
    }
    std::vector<SummaryRow> out;
    for (const auto& [n, m] : order) {
        const auto& a = acc[{n, static_cast<int>(m)}];
        for (int k = 0; k < 5; ++k) {
            if (a[k].c == 0) continue;
            SummaryRow row;
            row.method = to_string(m);
            row.param = param_name(k);
            row.n = n;
            row.count = a[k].c;
            row.mean = a[k].s / a[k].c;
            row.sd = a[k].c > 1 ? std::sqrt(std::max(0.0, (a[k].s2 - a[k].c * row.mean * row.mean) / (a[k].c - 1))) : 0.0;
            row.time_s = a[k].t / a[k].c;
            out.push_back(row);
        }
    }
    return out;
}

void write_mc_outputs(const MCReport& report, const MCConfig& cfg, const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
    auto open = [&](const std::string& name) {
        std::ofstream f(std::filesystem::path(dir) / name);
        if (!f) throw IoError("cannot open '" + dir + "/" + name + "' for writing");
        return f;
    };
    {
        auto f = open("summary.csv");
        f << "method,param,n,mean,sd,time_s\n";
        for (const auto& r : report.summary)
            f << r.method << ',' << r.param << ',' << r.n << ',' << format_double(r.mean) << ',' << format_double(r.sd)
              << ',' << format_double(r.time_s) << '\n';
        if (!f) throw IoError("write to summary.csv failed");
    }
    {
        auto f = open("replications.csv");
        f << "rep,n,method,ok,converged,lambda,mu,alpha,sigma,beta,loglik,iterations,info_min_eig,"
             "stud_lambda,stud_mu,stud_alpha,stud_sigma,stud_beta,time_s,error\n";
        for (const auto& r : report.records) {
            f << r.rep << ',' << r.n << ',' << to_string(r.method) << ',' << (r.ok ? 1 : 0) << ','
              << (r.ok && r.result.converged ? 1 : 0);
            for (int k = 0; k < 5; ++k) f << ',' << format_double(r.ok ? r.result.theta_hat[k] : NAN);
            f << ',' << format_double(r.ok ? r.result.loglik : NAN) << ',' << (r.ok ? r.result.iterations : 0) << ','
              << format_double(r.ok ? r.result.info_min_eig : NAN);
            for (int k = 0; k < 5; ++k) f << ',' << format_double(r.studentized[k]);
            std::string err = r.error;
            for (char& ch : err)
                if (ch == ',' || ch == '\n') ch = ';';
            f << ',' << format_double(r.ok ? r.result.runtime_s : NAN) << ',' << err << '\n';
        }
        if (!f) throw IoError("write to replications.csv failed");
    }
    for (int n : cfg.n_list) {
        auto f = open("normalized_n" + std::to_string(n) + ".csv");
        f << "rep,param,method,value\n";
        for (const auto& r : report.records) {
            if (r.n != n || !r.ok) continue;
            for (int k = 0; k < 5; ++k) {
                if (!std::isfinite(r.normalized[k])) continue;
                f << r.rep << ',' << param_name(k) << ',' << to_string(r.method) << ',' << format_double(r.normalized[k])
                  << '\n';
            }
        }
        if (!f) throw IoError("write to normalized csv failed");
    }
}

}  // namespace ssou
