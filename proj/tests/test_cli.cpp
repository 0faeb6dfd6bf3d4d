#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

using nlohmann::json;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(SIGMAK_BIN) + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf;
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), got);
    int status = pclose(p);
    return {WEXITSTATUS(status), out};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("selftests pass") {
    for (const char* sub : {"identities", "radial", "degree", "reduce", "moments", "energy"}) {
        auto r = run(std::string(sub) + " --selftest");
        CAPTURE(sub);
        CHECK(r.exit_code == 0);
    }
}

TEST_CASE("identities subcommand reports convergence order") {
    auto r = run("identities --check divergence --n 4 --k 2 --baseN 13 --refine 1 --psi bubble");
    REQUIRE(r.exit_code == 0);
    json rep = json::parse(r.out);
    CHECK(rep["schema_version"] == 1);
    CHECK(rep["identity"].get<std::string>().find("divergence") == 0);
    REQUIRE(rep["order"].size() == 1);
    CHECK(rep["final_order"].get<double>() >= 3.5);
    CHECK(rep["pass"].get<bool>());
}

TEST_CASE("radial subcommand: gamma report and CSV") {
    auto r = run("radial --a 0.1733 --n 4 --tmax 20 --csv /tmp/sigmak_cli_radial.csv");
    REQUIRE(r.exit_code == 0);
    json rep = json::parse(r.out);
    CHECK(rep["gamma_formula"].get<double>() == doctest::Approx(1.5412).epsilon(2e-4));
    CHECK(rep["gamma_fit"].get<double>() == doctest::Approx(rep["gamma_formula"].get<double>()).epsilon(0.01));
    CHECK(rep["conservation_drift"].get<double>() <= 1e-9);
    std::string csv = slurp("/tmp/sigmak_cli_radial.csv");
    CHECK(csv.substr(0, 14) == "t,xi,xip,E,H\n0");
    std::remove("/tmp/sigmak_cli_radial.csv");
}

TEST_CASE("degree subcommand: criterion verdict for 2 + x5") {
    auto r = run("degree --K \"2 + x5\" --n 4 --s 0.5 --s 0.7");
    REQUIRE(r.exit_code == 0);
    json rep = json::parse(r.out);
    CHECK(rep["deg_crit_minus"].get<int>() == 1); // (-1)^4
    CHECK(rep["criterion"].get<std::string>().find("criterion fails") == 0);
    CHECK(rep["records"].size() == 2);
    for (auto& [s, d] : rep["deg_G_by_s"].items()) CHECK(d.get<int>() == 0); // -(-1)^4 + 1
}

TEST_CASE("solve subcommand refuses criterion-failing K, solves a valid one") {
    SUBCASE("criterion failure gives exit code 2") {
        auto r = run("solve --K \"1.5 + 0.1*x5\" --n 4 --k 2 --N 64");
        CHECK(r.exit_code == 2);
    }
    SUBCASE("constant K solves and writes the field") {
        auto r = run("solve --K \"1.5\" --n 4 --k 2 --N 64 --skip-criterion "
                     "--field-out /tmp/sigmak_cli_field");
        REQUIRE(r.exit_code == 0);
        json rep = json::parse(r.out);
        CHECK(rep["residual"].get<double>() <= 1e-8);
        CHECK(rep["cone_margin"].get<double>() > 0);
        json hdr = json::parse(slurp("/tmp/sigmak_cli_field.json"));
        CHECK(hdr["kind"] == "sphere_axisym");
        std::remove("/tmp/sigmak_cli_field.json");
        std::remove("/tmp/sigmak_cli_field.csv");
    }
}

TEST_CASE("invalid configuration is rejected with exit code 2") {
    CHECK(run("identities --check divergence --n 17 --k 2").exit_code == 2);
    CHECK(run("identities --check divergence --n 4 --k 3").exit_code == 2); // k > n/2
    CHECK(run("solve --K \"1.5\" --n 4 --k 1 --N 64").exit_code == 2);      // k < n/2
    CHECK(run("moments --q \"y1\" --d 4 --n 4").exit_code == 2);            // d >= n
}

TEST_CASE("reports are byte-identical across runs") {
    const std::string args =
        "identities --check summed --n 3 --k 1 --baseN 13 --refine 1 --psi poly --seed 7";
    auto a = run(args + " --out /tmp/sigmak_det_a.json");
    auto b = run(args + " --out /tmp/sigmak_det_b.json");
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    std::string ja = slurp("/tmp/sigmak_det_a.json"), jb = slurp("/tmp/sigmak_det_b.json");
    CHECK(!ja.empty());
    CHECK(ja == jb);
    std::remove("/tmp/sigmak_det_a.json");
    std::remove("/tmp/sigmak_det_b.json");
}

TEST_CASE("moments subcommand hits the beta-integral oracle") {
    auto r = run("moments --q \"1\" --d 0 --lam 1 --n 4 --r0 50");
    REQUIRE(r.exit_code == 0);
    json rep = json::parse(r.out);
    CHECK(rep["value"].get<double>() == doctest::Approx(M_PI * M_PI / 6.0).epsilon(1e-6));
}
