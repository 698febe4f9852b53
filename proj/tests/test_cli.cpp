#include <doctest.h>

#include <json.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "maxtail/equicorr.hpp"

using nlohmann::json;

namespace {

struct CliResult {
    int exit_code;
    std::string output;
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(MAXTAIL_CLI_PATH) + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    CliResult result{-1, {}};
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        result.output.append(buf.data(), got);
    }
    const int status = pclose(pipe);
    result.exit_code = WEXITSTATUS(status);
    return result;
}

json payload_of(const CliResult& result) {
    REQUIRE_FALSE(result.output.empty());
    return json::parse(result.output).at("payload");
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("exact with a raw threshold") {
    const CliResult r = run_cli("exact --n 4 --rho0 0.5 --t 1.0");
    CHECK(r.exit_code == 0);
    const json report = json::parse(r.output);
    CHECK(report.at("schema") == "gauss-maxtail/1");
    // the report envelope carries exactly these sections
    CHECK(report.size() == 4);
    for (const char* key : {"schema", "command", "payload", "meta"}) {
        CAPTURE(key);
        CHECK(report.contains(key));
    }
    const json p = report.at("payload");
    CHECK(p.at("lower_tail").at("abs_error_bound").get<double>() <= 1e-10);
    const double expected = maxtail::lower_tail_exact(4, 0.5, 1.0).value;
    CHECK(p.at("lower_tail").at("value").get<double>() ==
          doctest::Approx(expected).epsilon(1e-15));
    CHECK_FALSE(p.contains("small_ball"));
}

TEST_CASE("exact reports the small ball on request") {
    const CliResult r =
        run_cli("exact --n 3 --rho0 0.5 --t 1.5 --small-ball");
    CHECK(r.exit_code == 0);
    const json p = payload_of(r);
    const double expected = maxtail::small_ball_exact(3, 0.5, 1.5).value;
    CHECK(p.at("small_ball").at("value").get<double>() ==
          doctest::Approx(expected).epsilon(1e-15));
    CHECK(p.at("small_ball").at("value").get<double>() <=
          p.at("lower_tail").at("value").get<double>());
}

TEST_CASE("exact trivial value") {
    const CliResult r = run_cli("exact --n 1 --rho0 0.5 --t 0");
    CHECK(r.exit_code == 0);
    CHECK(payload_of(r).at("lower_tail").at("value").get<double>() ==
          doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("exact with a parametric threshold reports epsilon0") {
    const CliResult r = run_cli("exact --n 100 --rho0 0.5 --delta0 0.5");
    CHECK(r.exit_code == 0);
    const json p = payload_of(r);
    CHECK(p.at("t").get<double>() ==
          doctest::Approx(maxtail::threshold(100, 0.5, 0.5)).epsilon(1e-15));
    CHECK(p.at("epsilon0").get<double>() ==
          doctest::Approx(0.5 * std::sqrt(0.5)).epsilon(1e-15));
}

TEST_CASE("t and delta0 are mutually exclusive") {
    CHECK(run_cli("exact --n 4 --rho0 0.5 --t 1 --delta0 0.5").exit_code == 2);
    CHECK(run_cli("exact --n 4 --rho0 0.5").exit_code == 2);
}

TEST_CASE("bound table lists the catalog") {
    const CliResult r =
        run_cli("bound --n 1000 --rho0 0.5 --delta0 0.5 --samples 20000");
    CHECK(r.exit_code == 0);
    const json p = payload_of(r);
    std::vector<std::string> seen;
    bool borell_applicable = false;
    for (const auto& row : p.at("bounds")) {
        seen.push_back(row.at("name").get<std::string>());
        if (seen.back() == "borell_tis") {
            borell_applicable = row.at("applicable").get<bool>();
        }
    }
    for (const char* name :
         {"borell_tis", "pv_fixed_ratio", "hartigan", "main_rate",
          "reference_level", "latala_oleszkiewicz", "pv_small_ball"}) {
        CAPTURE(name);
        CHECK(std::find(seen.begin(), seen.end(), name) != seen.end());
    }
    CHECK(borell_applicable);
    CHECK(p.contains("worstcase_exponents"));
    CHECK(p.contains("variance_ratio_floor"));
}

TEST_CASE("bound table for a dense model uses monte carlo inputs") {
    const char* path = "cli_bound_matrix.csv";
    {
        std::ofstream f(path);
        f << "1,0.2,0.1,0\n0.2,1,0.2,0.1\n0.1,0.2,1,0.2\n0,0.1,0.2,1\n";
    }
    const CliResult r = run_cli(std::string("bound --matrix ") + path +
                                " --t 0.8 --samples 20000 --seed 4");
    CHECK(r.exit_code == 0);
    const json p = payload_of(r);
    CHECK(p.at("inputs").at("source") == "monte-carlo");
    CHECK(p.at("bounds").size() >= 5);
    std::remove(path);
}

TEST_CASE("hartigan row flags kappa below 6") {
    const CliResult r = run_cli(
        "bound --n 100 --rho0 0.5 --delta0 0.5 --eps 0.1 --samples 20000");
    CHECK(r.exit_code == 0);
    const json p = payload_of(r);
    for (const auto& row : p.at("bounds")) {
        if (row.at("name") == "hartigan") {
            CHECK_FALSE(row.at("applicable").get<bool>());
            CHECK(row.at("reason").get<std::string>().find("kappa") !=
                  std::string::npos);
        }
    }
}

TEST_CASE("bound command with n = 1 flags multi-variable bounds") {
    const CliResult r =
        run_cli("bound --n 1 --rho0 0.5 --t -0.5 --samples 20000");
    CHECK(r.exit_code == 0);
    const json p = payload_of(r);
    for (const auto& row : p.at("bounds")) {
        const std::string name = row.at("name").get<std::string>();
        if (name == "main_rate" || name == "hartigan" ||
            name == "reference_level" || name == "small_ball_abs" ||
            name == "small_ball_nonneg") {
            CAPTURE(name);
            CHECK_FALSE(row.at("applicable").get<bool>());
        }
    }
}

TEST_CASE("sharpness emits parseable csv") {
    const CliResult r =
        run_cli("sharpness --n-grid 100,1000 --rho0 0.5 --delta0 0.5");
    CHECK(r.exit_code == 0);
    std::istringstream lines(r.output);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "n,threshold,exact,rate,c_hat,quad_error");
    std::string line;
    int rows = 0;
    while (std::getline(lines, line)) {
        if (line.empty() || line[0] == '#') continue;
        ++rows;
        std::istringstream fields(line);
        std::string field;
        std::getline(fields, field, ',');
        const long long n = std::stoll(field);
        std::getline(fields, field, ',');
        const double t = std::stod(field);
        std::getline(fields, field, ',');
        const double exact = std::stod(field);
        std::getline(fields, field, ',');
        const double rate = std::stod(field);
        std::getline(fields, field, ',');
        const double c_hat = std::stod(field);
        // 17-significant-digit round trip: recompute the ratio exactly
        CHECK(c_hat == exact / rate);
        CHECK(t == maxtail::threshold(n, 0.5, 0.5));
    }
    CHECK(rows == 2);
    CHECK(r.output.find("# band min=") != std::string::npos);
}

TEST_CASE("sharpness degenerate band") {
    const CliResult r = run_cli("sharpness --n-grid 1000 --rho0 0.5 --delta0 0.5");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("max_over_min=1 ") != std::string::npos);
}

TEST_CASE("sharpness json format") {
    const CliResult r = run_cli(
        "sharpness --n-grid 100,1000 --rho0 0.5 --delta0 0.5 --format json");
    CHECK(r.exit_code == 0);
    const json p = payload_of(r);
    CHECK(p.at("study").at("rows").size() == 2);
    CHECK(p.at("study").at("band_ratio").get<double>() >= 1.0);
    CHECK(p.at("study").at("excluded").get<int>() == 0);
}

TEST_CASE("mc runs are byte-identical") {
    const std::string flags =
        "mc --n 6 --rho0 0.4 --t 1.0 --samples 200000 --seed 7";
    const CliResult a = run_cli(flags);
    const CliResult b = run_cli(flags);
    CHECK(a.exit_code == 0);
    CHECK(a.output == b.output);
    CHECK(payload_of(a).at("estimate").at("seed").get<std::uint64_t>() == 7);

    // dense path: same contract through a matrix file
    const char* path = "cli_det_matrix.csv";
    {
        std::ofstream f(path);
        f << "1,0.3,0.1\n0.3,1,0.3\n0.1,0.3,1\n";
    }
    const std::string dense_flags = std::string("mc --matrix ") + path +
                                    " --t 1.0 --samples 200000 --seed 7";
    const CliResult c = run_cli(dense_flags);
    const CliResult d = run_cli(dense_flags);
    CHECK(c.exit_code == 0);
    CHECK(c.output == d.output);
    std::remove(path);
}

TEST_CASE("mc payload is identical across thread counts") {
    const std::string base =
        "mc --n 6 --rho0 0.4 --t 1.0 --samples 200000 --seed 7 --threads ";
    const json p1 = payload_of(run_cli(base + "1"));
    const json p2 = payload_of(run_cli(base + "2"));
    const json p8 = payload_of(run_cli(base + "8"));
    CHECK(p1.dump() == p2.dump());
    CHECK(p1.dump() == p8.dump());
}

TEST_CASE("mc on a csv matrix") {
    const char* path = "cli_test_matrix.csv";
    {
        std::ofstream f(path);
        f << "1,0.2,0\n0.2,1,0.2\n0,0.2,1\n";
    }
    const CliResult r = run_cli(std::string("mc --matrix ") + path +
                                " --t 1.0 --samples 100000 --seed 3");
    CHECK(r.exit_code == 0);
    CHECK(payload_of(r).at("dim").get<int>() == 3);
    std::remove(path);

    {
        std::ofstream f(path);
        f << "1,0.2\nbroken,1\n";
    }
    const CliResult bad = run_cli(std::string("mc --matrix ") + path +
                                  " --t 1.0 --samples 100000");
    CHECK(bad.exit_code == 2);
    std::remove(path);
}

TEST_CASE("slepian-check verdict and exit codes") {
    const CliResult ok = run_cli(
        "slepian-check --n 8 --rho-a 0 --rho-b 0.5 --t 1.0 --samples 100000");
    CHECK(ok.exit_code == 0);
    CHECK(payload_of(ok).at("report").at("verdict") == "consistent");

    // reversed direction: hypothesis fails, exit code 4
    const CliResult bad = run_cli(
        "slepian-check --n 8 --rho-a 0.5 --rho-b 0.2 --t 1.0 --samples 100000");
    CHECK(bad.exit_code == 4);
    CHECK(payload_of(bad).at("report").at("verdict") == "hypothesis_fails");
}

TEST_CASE("median respects the equicorrelated reference level") {
    const CliResult r = run_cli("median --n 10000 --rho0 0.5");
    CHECK(r.exit_code == 0);
    const double value = payload_of(r).at("value").get<double>();
    CHECK(value <= std::sqrt(2.0 * 0.5 * std::log(10000.0)) + 1e-9);
    CHECK(payload_of(r).at("method") == "exact");
}

TEST_CASE("median honors the forced monte-carlo flag") {
    const CliResult r = run_cli(
        "median --n 100 --rho0 0.5 --mc --samples 200000 --seed 13");
    CHECK(r.exit_code == 0);
    const json p = payload_of(r);
    CHECK(p.at("method") == "monte-carlo");
    const double exact = maxtail::median_exact(100, 0.5);
    CHECK(p.at("estimate").at("ci_low").get<double>() <= exact);
    CHECK(exact <= p.at("estimate").at("ci_high").get<double>());
}

TEST_CASE("median falls back to monte carlo for dense models") {
    const char* path = "cli_median_matrix.csv";
    {
        std::ofstream f(path);
        f << "1,0.3\n0.3,1\n";
    }
    const CliResult r = run_cli(std::string("median --matrix ") + path +
                                " --samples 50000 --seed 11");
    CHECK(r.exit_code == 0);
    CHECK(payload_of(r).at("method") == "monte-carlo");
    std::remove(path);
}

TEST_CASE("out flag writes the report to a file") {
    const char* path = "cli_report_out.json";
    const CliResult r =
        run_cli(std::string("exact --n 4 --rho0 0.5 --t 1.0 --out ") + path);
    CHECK(r.exit_code == 0);
    CHECK(r.output.empty());
    std::ifstream f(path);
    REQUIRE(f.good());
    json report;
    f >> report;
    CHECK(report.at("schema") == "gauss-maxtail/1");
    std::remove(path);
}

}  // TEST_SUITE
