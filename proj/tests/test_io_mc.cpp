#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ssou/errors.hpp"
#include "ssou/io.hpp"
#include "ssou/mc.hpp"

using namespace ssou;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / "ssou_tests";
    fs::create_directories(d);
    return d / name;
}

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream f(p);
    f << s;
}

std::size_t line_count(const fs::path& p) {
    std::ifstream f(p);
    std::size_t n = 0;
    std::string line;
    while (std::getline(f, line)) ++n;
    return n;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("path CSV round trip is exact and estimation is unchanged") {
    RngStream rng(12);
    const ObservedPath p = simulate_path(ModelParams{}, 0.3, SamplingScheme(1.0, 500), rng);
    const auto file = scratch("roundtrip.csv");
    write_path_csv(file.string(), p);
    const ObservedPath q = read_path_csv(file.string());
    CHECK(q.values == p.values);
    CHECK(q.n() == 500);
    CHECK(q.scheme.T == doctest::Approx(1.0).epsilon(1e-15));
    const EstimationResult a = estimate(p, Method::Qmle), b = estimate(read_path_csv(file.string(), 1.0), Method::Qmle);
    CHECK(a.theta_hat == b.theta_hat);
}

TEST_CASE("malformed path files") {
    const auto f1 = scratch("bad1.csv");
    write_text(f1, "time,value\n0,1\n1,2\n");
    CHECK_THROWS_AS(read_path_csv(f1.string()), InvalidInput);
    write_text(f1, "t,y\n0,1\n1,abc\n");
    CHECK_THROWS_AS(read_path_csv(f1.string()), InvalidInput);
    write_text(f1, "t,y\n0,1\n");
    CHECK_THROWS_AS(read_path_csv(f1.string()), InvalidInput);
    write_text(f1, "t,y\n0,1\n0.1,2\n0.3,2\n");
    CHECK_THROWS_AS(read_path_csv(f1.string()), InvalidInput);
    write_text(f1, "t,y\n0,1\n0,2\n");
    CHECK_THROWS_AS(read_path_csv(f1.string()), InvalidInput);
    CHECK_THROWS_AS(read_path_csv(scratch("missing.csv").string()), IoError);
}

TEST_CASE("key = value configuration") {
    const KeyValueConfig c = KeyValueConfig::parse("# comment\nalpha = 1.8\nn = 500, 2000 # two sizes\nflag = yes\n");
    CHECK(c.get_double("alpha", 0.0) == 1.8);
    CHECK(c.get_list("n") == std::vector<std::string>{"500", "2000"});
    CHECK(c.get_bool("flag", false));
    CHECK(c.get_double("absent", 4.0) == 4.0);
    CHECK_THROWS_AS(KeyValueConfig::parse("a = 1\na = 2\n"), InvalidInput);
    CHECK_THROWS_AS(KeyValueConfig::parse("no equals sign\n"), InvalidInput);
    CHECK_THROWS_AS(c.get_int("alpha", 0), InvalidInput);
}

TEST_CASE("shortest round-trip formatting") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(format_double(std::nan("")) == "nan");
}

}

TEST_SUITE("mc") {

TEST_CASE("configuration parsing and validation") {
    const MCConfig c = MCConfig::from_config(
        KeyValueConfig::parse("alpha = 1.8\nT = 100\nn = 500 2000\nL = 7\nmethods = mle, qmle, moment\nseed = 5\n"));
    CHECK(c.theta.alpha == 1.8);
    CHECK(c.n_list == std::vector<int>{500, 2000});
    CHECK(c.L == 7);
    CHECK(c.methods.size() == 3);
    CHECK_THROWS_AS(MCConfig::from_config(KeyValueConfig::parse("alpah = 1.8\n")), InvalidInput);
    CHECK_THROWS_AS(MCConfig::from_config(KeyValueConfig::parse("n = 10\n")), InvalidInput);
    CHECK_THROWS_AS(MCConfig::from_config(KeyValueConfig::parse("L = 0\n")), InvalidInput);
}

TEST_CASE("parallel and serial runs give identical records") {
    MCConfig c;
    c.n_list = {300};
    c.L = 4;
    c.methods = {Method::Moment, Method::Qmle, Method::Mle};
    c.threads = 2;
    const MCReport a = run_mc(c), b = run_mc_serial(c);
    c.threads = 1;
    const MCReport d = run_mc(c);
    REQUIRE(a.records.size() == 12);
    REQUIRE(b.records.size() == 12);
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].rep == b.records[i].rep);
        CHECK(a.records[i].method == b.records[i].method);
        const Vec5& x = a.records[i].result.theta_hat;
        const Vec5& y = b.records[i].result.theta_hat;
        for (int k = 0; k < 5; ++k) CHECK((x[k] == y[k] || (std::isnan(x[k]) && std::isnan(y[k]))));
        const double la = a.records[i].result.loglik, ld = d.records[i].result.loglik;
        CHECK((la == ld || (std::isnan(la) && std::isnan(ld))));
    }
}

TEST_CASE("summary statistics and output files") {
    MCConfig c;
    c.n_list = {200, 400};
    c.L = 3;
    c.methods = {Method::Moment, Method::Qmle};
    const MCReport r = run_mc(c);
    CHECK(r.total == 12);
    CHECK(r.failures == 0);
    // Moment rows only cover (alpha, sigma, beta).
    CHECK(r.summary.size() == 2 * (3 + 5));
    for (const auto& row : r.summary) {
        if (row.method != "qmle" || row.param != "alpha" || row.n != 400) continue;
        double s = 0, s2 = 0;
        for (const auto& rec : r.records)
            if (rec.n == 400 && rec.method == Method::Qmle) {
                s += rec.result.theta_hat[kAlpha];
                s2 += rec.result.theta_hat[kAlpha] * rec.result.theta_hat[kAlpha];
            }
        CHECK(row.mean == doctest::Approx(s / 3));
        CHECK(row.sd == doctest::Approx(std::sqrt((s2 - s * s / 3) / 2)));
    }
    const auto dir = scratch("mc_out");
    write_mc_outputs(r, c, dir.string());
    CHECK(line_count(dir / "summary.csv") == 1 + r.summary.size());
    CHECK(line_count(dir / "replications.csv") == 1 + 12);
    CHECK(line_count(dir / "normalized_n200.csv") == 1 + 3 * 3 + 3 * 5);
    std::ifstream f(dir / "summary.csv");
    std::string header;
    std::getline(f, header);
    CHECK(header == "method,param,n,mean,sd,time_s");
}

TEST_CASE("replication seeds depend only on the configuration") {
    MCConfig c;
    c.n_list = {300};
    c.L = 2;
    const ReplicationRecord a = run_replication(c, {}, 300, 1, Method::Qmle);
    const ReplicationRecord b = run_replication(c, {}, 300, 1, Method::Qmle);
    CHECK(a.result.theta_hat == b.result.theta_hat);
    CHECK(a.studentized.allFinite());
}

}
