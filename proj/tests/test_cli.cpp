#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "risradar/cli.hpp"
#include "test_util.hpp"

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = risradar::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

const std::string kTable1 = testutil::config_path("table1.json");
const std::string kDesk = testutil::config_path("desk.json");

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s)
        if (c == '\n') ++n;
    return n;
}

} // namespace

TEST_CASE("usage errors exit 1") {
    CHECK(invoke({}).code == 1);
    CHECK(invoke({"frobnicate", "--config", kTable1}).code == 1);
    CHECK(invoke({"optimize"}).code == 1); // --config is required
    CHECK(invoke({"optimize", "--config", kTable1, "--bogus"}).code == 1);
    CHECK(invoke({"optimize", "--config", "/no/such/file.json"}).code == 1);
    CHECK(invoke({"optimize", "--config", kTable1, "--set", "noequals"}).code == 1);
    const Run r = invoke({"optimize", "--config", "/no/such/file.json"});
    CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("help exits 0") {
    const Run r = invoke({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("optimize") != std::string::npos);
    CHECK(r.out.find("sweep") != std::string::npos);
}

TEST_CASE("optimize prints a report and a csv row") {
    const Run r = invoke({"optimize", "--config", kTable1});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("fingerprint:") != std::string::npos);
    CHECK(r.out.find("pd:") != std::string::npos);
    CHECK(r.out.find("budget [W]:") != std::string::npos);
    CHECK(r.out.find("case,snr0_db,pd,") != std::string::npos);
    CHECK(count_lines(r.out) >= 3);

    // byte-identical across invocations
    const Run again = invoke({"optimize", "--config", kTable1});
    CHECK(again.out == r.out);
}

TEST_CASE("overrides reach the config") {
    const Run r = invoke({"optimize", "--config", kTable1, "--set",
                          "ris.a_max_db=37.5", "--set", "target.snr0_db=9.25",
                          "--dump-config"});
    REQUIRE(r.code == 0);
    const nlohmann::json doc = nlohmann::json::parse(r.out);
    CHECK(doc["ris"]["a_max_db"].get<double>() == 37.5);
    CHECK(doc["target"]["snr0_db"].get<double>() == 9.25);

    // overriding changes the fingerprint, and with it the solution banner
    const Run base = invoke({"optimize", "--config", kTable1});
    const Run bumped =
        invoke({"optimize", "--config", kTable1, "--set", "target.snr0_db=16"});
    CHECK(base.code == 0);
    CHECK(bumped.code == 0);
    CHECK(base.out != bumped.out);
}

TEST_CASE("worked example: strong amplifier saturates the amplitude") {
    const Run r = invoke({"optimize", "--config", kTable1, "--set",
                          "target.snr0_db=15", "--set", "ris.a_max_db=40"});
    REQUIRE(r.code == 0);
    // csv tail carries the solution; amplitude column must equal a_max = 100
    const std::size_t header = r.out.find("case,snr0_db,pd,");
    REQUIRE(header != std::string::npos);
    std::istringstream csv(r.out.substr(header));
    std::string line, row;
    std::getline(csv, line); // header
    std::getline(csv, row);
    std::vector<std::string> fields;
    std::istringstream fs(row);
    while (std::getline(fs, line, ',')) fields.push_back(line);
    REQUIRE(fields.size() == 11);
    CHECK(fields[0] == "active");
    CHECK(fields[5] == "100");
    CHECK(fields[8] == "1"); // budget_ok
    CHECK(std::stod(fields[2]) > 0.0);
    CHECK(std::stol(fields[4]) >= 1);
}

TEST_CASE("optimize --case selects baselines") {
    const Run nr = invoke({"optimize", "--config", kDesk, "--case", "no_ris"});
    REQUIRE(nr.code == 0);
    CHECK(nr.out.find("no_ris,") != std::string::npos);
    const Run pa = invoke({"optimize", "--config", kDesk, "--case", "passive"});
    REQUIRE(pa.code == 0);
    CHECK(pa.out.find("passive,") != std::string::npos);
    CHECK(invoke({"optimize", "--config", kDesk, "--case", "bogus"}).code == 1);
}

TEST_CASE("sweep emits the full grid") {
    const std::vector<std::string> args = {"sweep",    "--config", kTable1,
                                           "--start",  "10",       "--stop",
                                           "11",       "--step",   "0.5"};
    const Run r = invoke(args);
    REQUIRE(r.code == 0);
    CHECK(count_lines(r.out) == 1 + 6 * 3); // header + 6 cases x 3 points
    CHECK(r.out.rfind("case,snr0_db,pd,", 0) == 0);
    CHECK(r.err.find("fingerprint") != std::string::npos);

    const Run again = invoke(args);
    CHECK(again.out == r.out);

    // --out writes the same bytes to a file
    const std::string path = "/tmp/risradar_cli_sweep.csv";
    std::vector<std::string> to_file = args;
    to_file.push_back("--out");
    to_file.push_back(path);
    const Run filed = invoke(to_file);
    REQUIRE(filed.code == 0);
    std::ifstream in(path);
    std::stringstream back;
    back << in.rdbuf();
    CHECK(back.str() == r.out);
    std::remove(path.c_str());
}

TEST_CASE("simulate reports both hypotheses with analytic anchors") {
    const Run r = invoke({"simulate", "--config", kDesk, "--trials", "50000",
                          "--seed", "11", "--hypothesis", "both"});
    REQUIRE(r.code == 0);
    std::istringstream csv(r.out);
    std::string header, absent, present;
    std::getline(csv, header);
    std::getline(csv, absent);
    std::getline(csv, present);
    CHECK(header == "case,hypothesis,trials,hits,p_hat,ci_halfwidth,seed,analytic");
    CHECK(absent.find("absent") != std::string::npos);
    CHECK(present.find("present") != std::string::npos);

    auto field = [](const std::string& row, int idx) {
        std::istringstream fs(row);
        std::string f;
        for (int i = 0; i <= idx; ++i) std::getline(fs, f, ',');
        return f;
    };
    // monte carlo estimate brackets its analytic column
    for (const std::string& row : {absent, present}) {
        const double p_hat = std::stod(field(row, 4));
        const double ci = std::stod(field(row, 5));
        const double analytic = std::stod(field(row, 7));
        CHECK(std::abs(p_hat - analytic) <= std::max(ci, 3e-4));
    }
    CHECK(field(absent, 2) == "50000");
    CHECK(field(absent, 6) == "11");

    const Run again = invoke({"simulate", "--config", kDesk, "--trials", "50000",
                              "--seed", "11", "--hypothesis", "both"});
    CHECK(again.out == r.out);
}

TEST_CASE("validate passes on the shipped scenario") {
    const Run r = invoke(
        {"validate", "--config", kTable1, "--trials", "200000", "--seed", "7"});
    CHECK(r.code == 0);
    CHECK(r.out.find("VALIDATE: all checks passed") != std::string::npos);
    CHECK(r.out.find("FAIL") == std::string::npos);
    CHECK(r.out.find("coherence") != std::string::npos);
}

TEST_CASE("validate flags starved estimators with exit 2") {
    // 100 trials cannot see a 1e-3 false alarm rate; the check must fail loudly
    const Run r = invoke(
        {"validate", "--config", kTable1, "--trials", "100", "--seed", "1"});
    CHECK(r.code == 2);
    CHECK(r.out.find("FAILED") != std::string::npos);
}
