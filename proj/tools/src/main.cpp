#include "matrix_io.hpp"

#include "nrd/cmatrix.hpp"
#include "nrd/cpbuild.hpp"
#include "nrd/dilation.hpp"
#include "nrd/errors.hpp"
#include "nrd/normform.hpp"
#include "nrd/numrange.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

using nlohmann::json;
using nrd::CMatrix;
using nrd::cplx;

namespace {

int status_code(const std::string& status) {
    if (status == "ok")
        return 0;
    if (status == "not_included")
        return 1;
    if (status == "unsupported")
        return 2;
    if (status == "io_error")
        return 3;
    return 4; // numerical_failure
}

// Shortest form that still round-trips binary64 through decimal.
std::string num17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json matrix_json(const CMatrix& m) {
    json data = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c)
            row.push_back({m(i, c).real(), m(i, c).imag()});
        data.push_back(std::move(row));
    }
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

/// Runs a subcommand body, translates the library's failure taxonomy into
/// the report status, prints the report as one JSON object on stdout, and
/// returns the mapped exit code.
int run_report(const std::string& command, const std::function<std::string(json&)>& body) {
    json payload = json::object();
    std::string status;
    try {
        status = body(payload);
    } catch (const nrd::NotIncluded& e) {
        status = "not_included";
        payload["message"] = e.what();
        payload["margin"] = e.margin();
    } catch (const nrd::UnsupportedCase& e) {
        status = "unsupported";
        payload["message"] = e.what();
    } catch (const nrd::NumericalFailure& e) {
        status = "numerical_failure";
        payload["message"] = e.what();
        payload["stage"] = e.stage();
        payload["residual"] = e.residual();
    } catch (const nrdcli::IoError& e) {
        status = "io_error";
        payload["message"] = e.what();
    } catch (const std::invalid_argument& e) {
        status = "io_error";
        payload["message"] = e.what();
    }
    const json report{{"command", command}, {"status", status}, {"payload", payload}};
    std::cout << report.dump(2) << std::endl;
    return status_code(status);
}

void put_dilation(json& payload, const nrd::DilationTrace& trace, bool full) {
    payload["case"] = to_string(trace.report.tag.kind);
    payload["r"] = trace.report.tag.r;
    payload["k"] = trace.report.k;
    payload["isometry_residual"] = trace.report.isometry_residual;
    payload["compression_residual"] = trace.report.compression_residual;
    if (trace.cone.has_value())
        payload["cone_gaps"] = json{{"tangent_pair", trace.cone->tangent_pair_gap},
                                    {"disk_arc", trace.cone->disk_arc_gap},
                                    {"k_bound", trace.cone->k_bound_gap},
                                    {"p_bound", trace.cone->p_bound_gap}};
    if (full && !trace.certificate.basis_values.empty())
        payload["certificate"] = json{{"choi_psd_gap", trace.certificate.psd_gap},
                                      {"unital_residual", trace.certificate.unital_residual},
                                      {"choi_dim", trace.certificate.choi.rows()}};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical range computation and dilation certificates"};
    app.require_subcommand(1);

    std::string a_path, b_path, v_path, out_path, demo_case;
    std::size_t npoints = 360, gen_n = 1, gen_k = 1;
    std::uint64_t seed = 1;
    bool certified = false, full_report = false;
    double demo_r = 2.0;

    CLI::App* c_classify = app.add_subcommand("classify", "case of the covered catalogue");
    c_classify->add_option("-A", a_path, "matrix file")->required();

    CLI::App* c_range = app.add_subcommand("range", "boundary samples as CSV");
    c_range->add_option("-A", a_path, "matrix file")->required();
    c_range->add_option("--points", npoints, "sample count (default 360)");
    c_range->add_option("--out", out_path, "CSV output path")->required();

    CLI::App* c_radius = app.add_subcommand("radius", "numerical radius");
    c_radius->add_option("-A", a_path, "matrix file")->required();

    CLI::App* c_include = app.add_subcommand("include", "range inclusion test");
    c_include->add_option("-A", a_path, "outer matrix file")->required();
    c_include->add_option("-B", b_path, "inner matrix file")->required();
    c_include->add_flag("--certified", certified, "require the sampling bound to clear");

    CLI::App* c_dilate = app.add_subcommand("dilate", "build a dilation isometry");
    c_dilate->add_option("-A", a_path, "dilating matrix file")->required();
    c_dilate->add_option("-B", b_path, "target matrix file")->required();
    c_dilate->add_option("--out", out_path, "write the isometry V here");
    c_dilate->add_flag("--report", full_report, "include certificate details");

    CLI::App* c_verify = app.add_subcommand("verify", "recompute dilation residuals");
    c_verify->add_option("-A", a_path, "dilating matrix file")->required();
    c_verify->add_option("-B", b_path, "target matrix file")->required();
    c_verify->add_option("-V", v_path, "isometry file")->required();

    CLI::App* c_gen = app.add_subcommand("gen", "seeded random compression of A");
    c_gen->add_option("-A", a_path, "source matrix file")->required();
    c_gen->add_option("-n", gen_n, "target dimension (default 1)");
    c_gen->add_option("-k", gen_k, "copies of A (default 1)");
    c_gen->add_option("--seed", seed, "generator seed (default 1)");
    c_gen->add_option("--out", out_path, "output matrix path")->required();

    CLI::App* c_demo = app.add_subcommand("demo", "bundled worked examples");
    c_demo->add_option("--case", demo_case, "interval | triangle | disk | cone")->required();
    c_demo->add_option("--r", demo_r, "cone apex distance (default 2)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 3;
    }

    if (c_classify->parsed())
        return run_report("classify", [&](json& payload) {
            const nrd::CaseTag tag = nrd::classify(nrdcli::parse_matrix(a_path));
            payload["case"] = to_string(tag.kind);
            payload["r"] = tag.r;
            payload["mu"] = {tag.mu.real(), tag.mu.imag()};
            return "ok";
        });

    if (c_range->parsed())
        return run_report("range", [&](json& payload) {
            const CMatrix a = nrdcli::parse_matrix(a_path);
            const auto samples = nrd::boundary(a, npoints);
            std::string csv = "theta,re,im,h\n";
            for (const nrd::BoundarySample& s : samples)
                csv += num17(s.theta) + "," + num17(s.point.real()) + "," +
                       num17(s.point.imag()) + "," + num17(s.support) + "\n";
            nrdcli::write_atomic(out_path, csv);
            payload["out"] = out_path;
            payload["points"] = samples.size();
            return "ok";
        });

    if (c_radius->parsed())
        return run_report("radius", [&](json& payload) {
            payload["radius"] = nrd::numerical_radius(nrdcli::parse_matrix(a_path));
            return "ok";
        });

    if (c_include->parsed())
        return run_report("include", [&](json& payload) {
            const CMatrix a = nrdcli::parse_matrix(a_path);
            const CMatrix b = nrdcli::parse_matrix(b_path);
            const nrd::InclusionReport rep = nrd::includes(a, b, 720, certified);
            payload["included"] = rep.included;
            payload["margin"] = rep.margin;
            payload["theta_min"] = rep.theta_min;
            if (certified)
                payload["certified"] = rep.certified;
            return rep.included ? "ok" : "not_included";
        });

    if (c_dilate->parsed())
        return run_report("dilate", [&](json& payload) {
            const CMatrix a = nrdcli::parse_matrix(a_path);
            const CMatrix b = nrdcli::parse_matrix(b_path);
            const nrd::DilationTrace trace = nrd::dilate_traced(a, b);
            put_dilation(payload, trace, full_report);
            if (!out_path.empty()) {
                nrdcli::serialize_matrix(trace.report.V, out_path);
                payload["out"] = out_path;
            }
            return "ok";
        });

    if (c_verify->parsed())
        return run_report("verify", [&](json& payload) {
            const CMatrix a = nrdcli::parse_matrix(a_path);
            const CMatrix b = nrdcli::parse_matrix(b_path);
            const CMatrix v = nrdcli::parse_matrix(v_path);
            const nrd::DilationReport rep = nrd::verify_dilation(v, a, b);
            payload["k"] = rep.k;
            payload["isometry_residual"] = rep.isometry_residual;
            payload["compression_residual"] = rep.compression_residual;
            payload["ok"] = rep.ok();
            if (rep.ok())
                return "ok";
            payload["message"] = "residuals exceed the dilation bounds";
            return "numerical_failure";
        });

    if (c_gen->parsed())
        return run_report("gen", [&](json& payload) {
            const CMatrix a = nrdcli::parse_matrix(a_path);
            const CMatrix b = nrd::random_compression(a, gen_n, gen_k, seed);
            nrdcli::serialize_matrix(b, out_path);
            payload["out"] = out_path;
            payload["n"] = gen_n;
            payload["k"] = gen_k;
            payload["seed"] = seed;
            return "ok";
        });

    // demo: run the bundled fixtures for one canonical case
    return run_report("demo", [&](json& payload) {
        const cplx I(0.0, 1.0);
        CMatrix a;
        std::vector<CMatrix> targets;
        if (demo_case == "interval") {
            a = CMatrix::from_rows({{1.0, 0.0}, {0.0, 0.0}});
            targets.push_back(CMatrix(1, 1, {0.5}));
            targets.push_back(a);
        } else if (demo_case == "triangle") {
            a = CMatrix::from_rows({{1.0, 0.0, 0.0}, {0.0, I, 0.0}, {0.0, 0.0, 0.0}});
            targets.push_back(CMatrix(1, 1, {0.25 + 0.25 * I}));
            targets.push_back(CMatrix::from_rows({{1.0, 0.0}, {0.0, I}}));
        } else if (demo_case == "disk") {
            a = nrd::canonical_disk_matrix();
            targets.push_back(CMatrix(1, 1, {1.0}));
            targets.push_back(CMatrix::from_rows({{0.0, 2.0}, {0.0, 0.0}}));
        } else if (demo_case == "cone") {
            if (!(demo_r > 1.0))
                throw std::invalid_argument("demo: --r must exceed 1 for the cone case");
            a = nrd::direct_sum(demo_r * CMatrix::identity(2) + nrd::canonical_disk_matrix(),
                                CMatrix::zero(1, 1));
            targets.push_back(CMatrix(1, 1, {demo_r + 1.0}));
            targets.push_back(CMatrix(1, 1, {0.0}));
        } else {
            throw std::invalid_argument("demo: unknown case " + demo_case +
                                        " (expected interval | triangle | disk | cone)");
        }
        payload["case"] = demo_case;
        if (demo_case == "cone")
            payload["r"] = demo_r;
        json runs = json::array();
        for (const CMatrix& b : targets) {
            const nrd::DilationTrace trace = nrd::dilate_traced(a, b);
            json entry;
            entry["target"] = matrix_json(b);
            put_dilation(entry, trace, true);
            runs.push_back(std::move(entry));
        }
        payload["runs"] = std::move(runs);
        return "ok";
    });
}
