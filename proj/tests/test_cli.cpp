#include "doctest.h"

#include "matrix_io.hpp"
#include "nrd/cmatrix.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

// End-to-end checks of the command-line binary: every subcommand is spawned
// as a real process and judged on exit code, stdout report, and file output.

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunResult {
    int code = -1;
    std::string out;
};

fs::path scratch_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "nrdilate_cli_test";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path capture = scratch_dir() / ("stdout_" + std::to_string(counter++) + ".txt");
    const std::string cmd =
        std::string(NRD_CLI_PATH) + " " + args + " > " + capture.string() + " 2>/dev/null";
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    std::ifstream in(capture);
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

fs::path write_json(const std::string& name, const json& j) {
    const fs::path p = scratch_dir() / name;
    spit(p, j.dump(2) + "\n");
    return p;
}

json matrix_file(int rows, int cols, const std::vector<std::vector<std::pair<double, double>>>& d) {
    json data = json::array();
    for (const auto& row : d) {
        json jr = json::array();
        for (const auto& [re, im] : row)
            jr.push_back({re, im});
        data.push_back(std::move(jr));
    }
    return json{{"rows", rows}, {"cols", cols}, {"data", std::move(data)}};
}

json cone_file(double r) {
    return matrix_file(3, 3,
                       {{{r, 1.0}, {1.0, 0.0}, {0.0, 0.0}},
                        {{1.0, 0.0}, {r, -1.0}, {0.0, 0.0}},
                        {{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}}});
}

} // namespace

TEST_CASE("classify reports the case and exits 0") {
    const fs::path a = write_json("cone.json", cone_file(2.0));
    const RunResult r = run_cli("classify -A " + a.string());
    CHECK(r.code == 0);
    const json rep = json::parse(r.out);
    CHECK(rep["command"] == "classify");
    CHECK(rep["status"] == "ok");
    CHECK(rep["payload"]["case"] == "nonnormal2_plus_reducing");
    CHECK(rep["payload"]["r"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("every failure status maps to its own exit code") {
    const fs::path cone = write_json("cone.json", cone_file(2.0));
    const fs::path diag10 =
        write_json("diag10.json", matrix_file(2, 2, {{{1, 0}, {0, 0}}, {{0, 0}, {0, 0}}}));
    const fs::path nilp =
        write_json("nilp.json", matrix_file(2, 2, {{{0, 0}, {2, 0}}, {{0, 0}, {0, 0}}}));
    const fs::path quad = write_json("quad.json",
                                     matrix_file(4, 4,
                                                 {{{1, 0}, {0, 0}, {0, 0}, {0, 0}},
                                                  {{0, 0}, {0, 1}, {0, 0}, {0, 0}},
                                                  {{0, 0}, {0, 0}, {-1, 0}, {0, 0}},
                                                  {{0, 0}, {0, 0}, {0, 0}, {0, -1}}}));
    const fs::path half = write_json("half.json", matrix_file(1, 1, {{{0.5, 0}}}));

    SUBCASE("not_included exits 1 and reports the margin") {
        const RunResult r = run_cli("dilate -A " + diag10.string() + " -B " + nilp.string());
        CHECK(r.code == 1);
        const json rep = json::parse(r.out);
        CHECK(rep["status"] == "not_included");
        CHECK(rep["payload"]["margin"].get<double>() == doctest::Approx(-1.0).epsilon(1e-6));
    }
    SUBCASE("unsupported classification exits 2") {
        const RunResult r = run_cli("dilate -A " + quad.string() + " -B " + half.string());
        CHECK(r.code == 2);
        CHECK(json::parse(r.out)["status"] == "unsupported");
    }
    SUBCASE("missing input file exits 3") {
        const RunResult r = run_cli("radius -A " + (scratch_dir() / "absent.json").string());
        CHECK(r.code == 3);
        CHECK(json::parse(r.out)["status"] == "io_error");
    }
    SUBCASE("failed verification exits 4") {
        const fs::path v =
            write_json("notiso.json", matrix_file(2, 1, {{{1, 0}}, {{1, 0}}}));
        const RunResult r =
            run_cli("verify -A " + diag10.string() + " -B " + half.string() + " -V " + v.string());
        CHECK(r.code == 4);
        const json rep = json::parse(r.out);
        CHECK(rep["status"] == "numerical_failure");
        CHECK(rep["payload"]["ok"] == false);
    }
}

TEST_CASE("malformed matrix files name the offending field") {
    const fs::path p = scratch_dir() / "nocols.json";
    spit(p, R"({"rows": 1, "data": [[[1.0, 0.0]]]})");
    const RunResult r = run_cli("radius -A " + p.string());
    CHECK(r.code == 3);
    const json rep = json::parse(r.out);
    CHECK(rep["status"] == "io_error");
    CHECK(rep["payload"]["message"].get<std::string>().find("cols") != std::string::npos);
}

TEST_CASE("gen is deterministic and its output passes include") {
    const fs::path a = write_json("cone.json", cone_file(2.0));
    const fs::path b1 = scratch_dir() / "b1.json";
    const fs::path b2 = scratch_dir() / "b2.json";
    REQUIRE(run_cli("gen -A " + a.string() + " -n 2 -k 2 --seed 11 --out " + b1.string()).code == 0);
    REQUIRE(run_cli("gen -A " + a.string() + " -n 2 -k 2 --seed 11 --out " + b2.string()).code == 0);
    CHECK(slurp(b1) == slurp(b2)); // same seed, bitwise identical file

    const RunResult inc = run_cli("include -A " + a.string() + " -B " + b1.string() + " --certified");
    CHECK(inc.code == 0);
    const json rep = json::parse(inc.out);
    CHECK(rep["payload"]["included"] == true);
    CHECK(rep["payload"]["margin"].get<double>() >= -1e-9);
}

TEST_CASE("matrix files round-trip bitwise through parse and serialize") {
    std::mt19937_64 rng(99);
    auto unit = [&] { return (rng() >> 11) * 0x1p-53; };
    nrd::CMatrix m(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            m(i, j) = nrd::cplx(20.0 * unit() - 10.0, 20.0 * unit() - 10.0);
    const fs::path p = scratch_dir() / "roundtrip.json";
    nrdcli::serialize_matrix(m, p.string());
    const nrd::CMatrix back = nrdcli::parse_matrix(p.string());
    REQUIRE(back.rows() == 3);
    REQUIRE(back.cols() == 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(back(i, j) == m(i, j)); // bitwise, not approximate

    const fs::path a = write_json("cone.json", cone_file(2.0));
    const fs::path b = scratch_dir() / "rt_b.json";
    const fs::path v1 = scratch_dir() / "rt_v1.json";
    REQUIRE(run_cli("gen -A " + a.string() + " -n 2 -k 1 --seed 3 --out " + b.string()).code == 0);
    REQUIRE(run_cli("dilate -A " + a.string() + " -B " + b.string() + " --out " + v1.string()).code == 0);

    // verify reads V back; residuals must stay inside the report bounds
    const RunResult ver =
        run_cli("verify -A " + a.string() + " -B " + b.string() + " -V " + v1.string());
    CHECK(ver.code == 0);
    CHECK(json::parse(ver.out)["payload"]["ok"] == true);
}

TEST_CASE("range writes an increasing theta sweep with the CSV header") {
    const fs::path a = write_json("cone.json", cone_file(2.0));
    const fs::path csv = scratch_dir() / "range.csv";
    const RunResult r = run_cli("range -A " + a.string() + " --points 64 --out " + csv.string());
    CHECK(r.code == 0);
    std::ifstream in(csv);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "theta,re,im,h");
    std::size_t rows = 0;
    double prev = -10.0;
    const double pi = 3.14159265358979323846;
    while (std::getline(in, line)) {
        double theta = 0, re = 0, im = 0, h = 0;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &theta, &re, &im, &h) == 4);
        CHECK(theta > prev);
        CHECK(theta >= -pi);
        CHECK(theta < pi);
        // cone support: max(0, r cos(theta) + 1) with r = 2
        const double want = std::max(0.0, 2.0 * std::cos(theta) + 1.0);
        CHECK(h == doctest::Approx(want).epsilon(1e-8).scale(1.0));
        prev = theta;
        ++rows;
    }
    CHECK(rows == 64);
}

TEST_CASE("demo covers all four canonical cases") {
    for (const std::string name : {"interval", "triangle", "disk", "cone"}) {
        const RunResult r = run_cli("demo --case " + name);
        CHECK(r.code == 0);
        const json rep = json::parse(r.out);
        CHECK(rep["status"] == "ok");
        REQUIRE(rep["payload"]["runs"].is_array());
        for (const json& runj : rep["payload"]["runs"]) {
            CHECK(runj["isometry_residual"].get<double>() <= 1e-8);
            CHECK(runj["compression_residual"].get<double>() <= 1e-6);
        }
    }
}

TEST_CASE("help exits 0 and bad arguments exit 3") {
    CHECK(run_cli("--help").code == 0);
    CHECK(run_cli("").code == 3);
    CHECK(run_cli("classify").code == 3);
    CHECK(run_cli("demo --case pentagon").code == 3);
}
