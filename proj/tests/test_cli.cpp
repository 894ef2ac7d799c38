#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dbarc/hermitian_forms.hpp"
#include "dbarc/reinhardt.hpp"

using namespace dbarc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("dbarc_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run(const std::string& args) {
    std::string cmd = std::string(DBARC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    int s = std::system(cmd.c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("dirichlet square writes the separable eigenvalue") {
    auto d = scratch("square");
    REQUIRE(run("--out " + d.string() + " dirichlet --shape square --N 256") == 0);
    std::istringstream csv(slurp(d / "dirichlet.csv"));
    std::string header, row;
    std::getline(csv, header);
    std::getline(csv, row);
    CHECK(header == "k,lambda,residual,nodes");
    double lambda = std::stod(row.substr(row.find(',') + 1));
    CHECK(std::abs(lambda / (2 * kPi * kPi) - 1) < 0.01);
}

TEST_CASE("reinhardt model file gives the bidisc verdict") {
    auto d = scratch("bidisc");
    std::ofstream(d / "bidisc.json") << reinhardt::model_to_json(reinhardt::bidisc()).dump();
    REQUIRE(run("--out " + d.string() + " reinhardt --model " + (d / "bidisc.json").string() + " --q 1") == 0);
    auto j = nlohmann::json::parse(slurp(d / "reinhardt.json"));
    CHECK(j["verdict"] == "non-compact");
}

TEST_CASE("pq-check accepts a constant-Hessian certificate") {
    auto d = scratch("pq");
    std::vector<std::vector<cplx>> pts;
    for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b) pts.push_back({cplx(0.2 * a, 0.1 * b), cplx(0.1 * b, -0.2 * a)});
    auto cert = hermitian::make_certificate(
        [](std::span<const cplx> z) { return (std::norm(z[0]) + std::norm(z[1])) / 4; }, pts, 1, 0.25, 1e-3, 1e-6);
    std::ofstream(d / "cert.json") << hermitian::certificate_to_json(cert).dump();
    REQUIRE(run("--out " + d.string() + " pq-check --cert " + (d / "cert.json").string()) == 0);
    auto j = nlohmann::json::parse(slurp(d / "pq.json"));
    CHECK(j["pass"] == true);
}

TEST_CASE("input errors exit with code 2") {
    auto d = scratch("bad");
    std::ofstream(d / "empty.txt").close();
    std::ofstream(d / "empty.json") << R"({"h": 0.01, "origin": [0, 0]})";
    CHECK(run("--out " + d.string() + " dirichlet --mask " + (d / "empty.txt").string()) == 2);
    std::ofstream(d / "broken.json") << "{\"n\": 2, \"profile\": ";
    CHECK(run("--out " + d.string() + " reinhardt --model " + (d / "broken.json").string() + " --q 1") == 2);
    CHECK(run("--out " + d.string() + " reinhardt --model bidisc --q 2") == 2);
    CHECK(run("--out " + d.string() + " wedge --m 0") == 2);
    CHECK(run("--out " + d.string() + " commutator --j 1") == 2);
    CHECK(run("nonsense") == 2);
}

TEST_CASE("fixed seed gives byte-identical outputs") {
    auto a = scratch("det_a"), b = scratch("det_b");
    for (const auto& d : {a, b}) {
        REQUIRE(run("--out " + d.string() + " --seed 5 wedge --m 12") == 0);
        REQUIRE(run("--out " + d.string() + " --seed 5 commutator --model ball --j 2 --cutoff 16") == 0);
    }
    for (const char* f : {"wedge.csv", "wedge.json", "commutator.csv", "commutator.json"}) {
        CHECK(!slurp(a / f).empty());
        CHECK(slurp(a / f) == slurp(b / f));
    }
}
