#include "../tools/cli.hpp"
#include "gaugeclust/data.hpp"
#include "gaugeclust/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using gaugeclust::Json;
using gaugeclust::cli::run_cli;

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string scratch(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "gaugeclust_cli_test";
    fs::create_directories(dir);
    return (dir / name).string();
}

int count_lines(const std::string& s) {
    return static_cast<int>(std::count(s.begin(), s.end(), '\n'));
}

std::string laplace3_file() {
    static const std::string path = [] {
        std::string p = scratch("laplace3.csv");
        REQUIRE(cli({"gen", "laplace3", "--seed", "7", "-o", p}).code == 0);
        return p;
    }();
    return path;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("gen") {
    Run r = cli({"gen", "laplace3", "--seed", "7"});
    CHECK(r.code == 0);
    CHECK(count_lines(r.out) == 451);
    CHECK(r.out == cli({"gen", "laplace3", "--seed", "7"}).out);
    CHECK(count_lines(cli({"gen", "gauss4", "--seed", "1"}).out) == 801);
    CHECK(cli({"gen", "bogus"}).code == 2);
    CHECK(cli({"gen", "laplace3", "-o", "/nonexistent/dir/x.csv"}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({"gen", "laplace3", "--unknown-flag"}).code == 2);
    CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("fit reproduces the three-cluster solution") {
    Run r = cli({"fit", "-i", laplace3_file(), "--labels", "--lambda", "0.3", "--mu", "0.05", "--k0", "10"});
    REQUIRE(r.code == 0);
    Json j = Json::parse(r.out);
    CHECK(j["k_eff"] == 3);
    CHECK(j["ari"].get<double>() == doctest::Approx(1.0));
    CHECK(j["descent_audit"].contains("pass"));
    CHECK(j["traces"].size() == j["rounds"].get<std::size_t>());
    CHECK(r.out == cli({"fit", "-i", laplace3_file(), "--labels", "--lambda", "0.3", "--mu", "0.05"}).out);

    Run one = cli({"fit", "-i", laplace3_file(), "--labels", "--k0", "1"});
    REQUIRE(one.code == 0);
    CHECK(Json::parse(one.out)["k_eff"] == 1);
}

TEST_CASE("fit multistart on three centers and two points") {
    std::string p = scratch("two.csv");
    std::ofstream(p) << "0\n1\n";
    Run r = cli({"fit", "-i", p, "--gauge", "l1", "--lambda", "1", "--mu", "1e-6", "--k0", "3", "--init",
                 "uniform", "--no-delete", "--restarts", "20", "--tol", "1e-12", "--max-iter", "1000000",
                 "--oracle", "smoothed", "--no-trace"});
    REQUIRE(r.code == 0);
    Json j = Json::parse(r.out);
    CHECK(std::abs(j["objective"].get<double>() - 5.0 / 6.0) <= 1e-3);
    CHECK(j["descent_audit"]["pass"] == true);
    CHECK_FALSE(j.contains("traces"));
    CHECK(cli({"fit", "-i", p, "--k0", "3"}).code == 2);
}

TEST_CASE("fit usage errors") {
    CHECK(cli({"fit", "-i", "/nonexistent.csv"}).code == 2);
    CHECK(cli({"fit", "-i", laplace3_file(), "--gauge", "l7"}).code == 2);
    CHECK(cli({"fit", "-i", laplace3_file(), "--labels", "--gauge", "wl2:1,2,3"}).code == 2);
    CHECK(cli({"fit", "-i", laplace3_file(), "--algo", "newton"}).code == 2);
    CHECK(cli({"fit", "-i", laplace3_file(), "--mu", "-1"}).code == 2);
    CHECK(cli({"fit"}).code == 2);
}

TEST_CASE("path writes fixed columns and plot data") {
    std::string out = scratch("path1.csv");
    std::string json = scratch("path1.json");
    Run r = cli({"path", "-i", laplace3_file(), "--labels", "--steps", "1", "-o", out, "--json", json});
    REQUIRE(r.code == 0);
    std::string text = gaugeclust::read_file(out);
    CHECK(count_lines(text) == 2);
    CHECK(text.rfind(gaugeclust::kPathColumns, 0) == 0);
    CHECK(fs::exists(scratch("path1_plot.csv")));
    CHECK(Json::parse(gaugeclust::read_file(json)).size() == 1);

    Run a = cli({"path", "-i", laplace3_file(), "--steps", "6"});
    Run b = cli({"path", "-i", laplace3_file(), "--steps", "6", "--plot-data", scratch("p6.csv")});
    CHECK(a.code == 0);
    CHECK(count_lines(a.out) == 7);
    CHECK(a.out == b.out);
}

TEST_CASE("grid") {
    std::string summary = scratch("grid_summary.json");
    Run r = cli({"grid", "-i", laplace3_file(), "--labels", "--n-lambda", "2", "--n-mu", "2", "--max-iter", "50",
                 "--threads", "2", "--summary", summary});
    REQUIRE(r.code == 0);
    CHECK(count_lines(r.out) == 5);
    Json s = Json::parse(gaugeclust::read_file(summary));
    CHECK(s.contains("k_eff_fraction"));
    Run again = cli({"grid", "-i", laplace3_file(), "--labels", "--n-lambda", "2", "--n-mu", "2", "--max-iter",
                     "50", "--threads", "1"});
    CHECK(again.out == r.out);
}

TEST_CASE("verify suites") {
    Run nonopt = cli({"verify", "--suite", "nonoptimal"});
    CHECK(nonopt.code == 0);
    Json j = Json::parse(nonopt.out);
    CHECK(j.dump().find("necessary condition violated") != std::string::npos);
    CHECK(cli({"verify", "--suite", "three-centers"}).code == 0);
    CHECK(cli({"verify", "--suite", "stability", "--probes", "5"}).code == 0);
    CHECK(cli({"verify", "--suite", "bogus"}).code == 2);
}

TEST_CASE("verify audits traces") {
    Run fit = cli({"fit", "-i", laplace3_file(), "--lambda", "0.3", "--mu", "0.05", "--oracle", "smoothed"});
    REQUIRE(fit.code == 0);
    std::string good = scratch("fit_good.json");
    std::ofstream(good) << fit.out;
    CHECK(cli({"verify", "--suite", "none", "--trace", good}).code == 0);

    Json j = Json::parse(fit.out);
    auto& tr = j["traces"][0];
    tr[3]["f_mu"] = tr[2]["f_mu"].get<double>() + 1.0;
    std::string bad = scratch("fit_bad.json");
    std::ofstream(bad) << j.dump();
    Run r = cli({"verify", "--suite", "none", "--trace", bad});
    CHECK(r.code == 1);

    std::string bare = scratch("bare.json");
    std::ofstream(bare) << j["traces"][0].dump();
    CHECK(cli({"verify", "--suite", "none", "--trace", bare, "--n", "450", "--mu", "0.05"}).code == 1);
    CHECK(cli({"verify", "--suite", "none", "--trace", bare}).code == 2);
}

TEST_CASE("eval") {
    Run fit = cli({"fit", "-i", laplace3_file(), "--labels"});
    REQUIRE(fit.code == 0);
    std::string fp = scratch("fit_eval.json");
    std::ofstream(fp) << fit.out;
    Run r = cli({"eval", "--fit", fp, "-i", laplace3_file()});
    REQUIRE(r.code == 0);
    Json j = Json::parse(r.out);
    CHECK(j["results"][0]["ari"].get<double>() == doctest::Approx(1.0));
    CHECK(j["results"][0]["k_eff"] == 3);
    CHECK(j["table"].is_array());

    std::string small = scratch("small.csv");
    std::ofstream(small) << "0,0\n1,1\n";
    CHECK(cli({"eval", "--fit", fp, "-i", small}).code == 2);
}

}  // TEST_SUITE
