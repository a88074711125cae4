#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include "prescurv/config.hpp"
#include "prescurv/expr.hpp"
#include "prescurv/frames.hpp"
#include "prescurv/operator_g.hpp"
#include "prescurv/report.hpp"
#include "prescurv/verify.hpp"

namespace {

std::string fmt(double x) { return prescurv::expr::format_double(x); }

int cmd_verify(std::uint64_t seed, bool inject_sign_error) {
    prescurv::testhooks::flip_first_order_sign = inject_sign_error;
    auto results = prescurv::run_verification(seed);
    prescurv::testhooks::flip_first_order_sign = false;

    bool all = true;
    for (const auto& r : results) {
        all = all && r.passed;
        std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name
                  << "  worst=" << fmt(r.worst) << "  tol=" << fmt(r.tolerance);
        if (!r.detail.empty()) std::cout << "  (" << r.detail << ")";
        std::cout << "\n";
    }
    std::cout << (all ? "verification passed" : "verification FAILED") << "\n";
    return all ? 0 : 1;
}

std::string default_report_path(const std::string& config_path) {
    auto dot = config_path.find_last_of('.');
    auto slash = config_path.find_last_of('/');
    std::string stem = (dot != std::string::npos && (slash == std::string::npos || dot > slash))
                           ? config_path.substr(0, dot)
                           : config_path;
    return stem + ".report.txt";
}

void print_summary(const prescurv::SolveReport& rep) {
    const auto& m = rep.monitors;
    std::cout << "steps accepted: " << rep.steps.size() << "\n";
    if (!rep.steps.empty()) {
        const auto& last = rep.steps.back();
        std::cout << "final residual: " << fmt(last.residual) << " (phase " << last.phase
                  << ", t=" << fmt(last.t) << ")\n";
    }
    std::cout << "kappa range: [" << fmt(m.kappa_min) << ", " << fmt(m.kappa_max) << "]\n"
              << "u range: [" << fmt(m.u_min) << ", " << fmt(m.u_max) << "]\n"
              << "monitors: C0=" << fmt(m.c0) << " C1=" << fmt(m.c1) << " K0=" << fmt(m.k0)
              << " tau_min=" << fmt(m.tau_min)
              << " boundary_hessian_max=" << fmt(m.boundary_hessian_max) << "\n"
              << "epsilon: " << fmt(rep.epsilon) << "\n";
}

int cmd_solve(const std::string& config_path, const std::string& path_override,
              bool export_mesh, const std::string& report_override) {
    prescurv::ProblemConfig cfg = prescurv::load_config(config_path);
    if (!path_override.empty()) cfg.homotopy.path = prescurv::parse_path_name(path_override);
    std::string report_path = !report_override.empty() ? report_override
                              : !cfg.report_path.empty() ? cfg.report_path
                                                         : default_report_path(config_path);

    prescurv::PreparedProblem prep = prescurv::prepare_problem(cfg);
    try {
        auto [field, report] = prescurv::continuation_run(prescurv::solve_input(prep), cfg.homotopy);
        prescurv::write_report(report_path, report);
        std::cout << "report: " << report_path << "\n";
        if (!cfg.field_path.empty()) {
            prescurv::write_field(cfg.field_path, prep.domain, prep.model, field);
            std::cout << "field: " << cfg.field_path << "\n";
        }
        if (export_mesh || !cfg.mesh_path.empty()) {
            std::string mesh_path =
                !cfg.mesh_path.empty() ? cfg.mesh_path : default_report_path(config_path) + ".mesh";
            prescurv::write_mesh(mesh_path, prep.domain, prep.model, field);
            std::cout << "mesh: " << mesh_path << "\n";
        }
        print_summary(report);
        return 0;
    } catch (const prescurv::ContinuationError& e) {
        prescurv::write_report(report_path, e.partial_report);
        std::cerr << "continuation failed: " << e.what() << "\n"
                  << "partial report: " << report_path << "\n";
        return 3;
    }
}

int cmd_curvature(const std::string& field_path, int model_override, bool have_override,
                  const std::string& out_path) {
    prescurv::FieldFile ff = prescurv::read_field(field_path);
    int sign = have_override ? model_override : ff.curvature_sign;
    prescurv::SpaceFormModel model(sign);
    prescurv::ChartedDomain dom =
        prescurv::build_domain(ff.center, ff.geodesic_radius, ff.n_r, ff.n_theta, ff.kind);
    prescurv::DiscreteField field{ff.utilde};

    std::ostream* out = &std::cout;
    std::ofstream fout;
    if (!out_path.empty()) {
        fout.open(out_path);
        if (!fout) throw prescurv::ValidationError("cannot open output file " + out_path);
        out = &fout;
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    int nonconvex = 0;
    *out << "y1 y2 u kappa1 kappa2 tau convexity\n";
    for (int i = 0; i < dom.node_count(); ++i) {
        const auto& nd = dom.node(i);
        double u = field.values[i] / nd.geo.mu;
        double k1 = nan, k2 = nan, tau = nan, conv = nan;
        if (!nd.boundary) {
            auto cj = prescurv::chart_jet(dom, field, i);
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cj.hessian);
            conv = es.eigenvalues()[0];
            auto fq = prescurv::frame_from_u(model, prescurv::covariant_jet(dom, field, i));
            k1 = fq.principal_curvatures[0];
            k2 = fq.principal_curvatures[1];
            tau = fq.support_function;
            if (conv <= 0.0) ++nonconvex;
        }
        *out << fmt(nd.r * std::cos(nd.theta)) << " " << fmt(nd.r * std::sin(nd.theta)) << " "
             << fmt(u) << " " << fmt(k1) << " " << fmt(k2) << " " << fmt(tau) << " " << fmt(conv)
             << "\n";
    }
    if (!out_path.empty()) std::cout << "table: " << out_path << "\n";

    if (nonconvex > 0) {
        std::cout << "warning: field is not strictly locally convex at " << nonconvex
                  << " interior node(s)\n";
    }
    try {
        auto m = prescurv::estimate_monitors(dom, model, field);
        std::cout << "kappa range: [" << fmt(m.kappa_min) << ", " << fmt(m.kappa_max) << "]\n"
                  << "u range: [" << fmt(m.u_min) << ", " << fmt(m.u_max) << "]\n"
                  << "monitors: C0=" << fmt(m.c0) << " C1=" << fmt(m.c1) << " K0=" << fmt(m.k0)
                  << " tau_min=" << fmt(m.tau_min)
                  << " boundary_hessian_max=" << fmt(m.boundary_hessian_max) << "\n";
    } catch (const prescurv::Error& e) {
        std::cout << "monitors unavailable: " << e.what() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Prescribed-curvature solver for convex radial graphs over geodesic disks"};
    app.require_subcommand(1);

    auto* verify = app.add_subcommand("verify", "Run the built-in verification suites");
    std::uint64_t seed = 2026;
    verify->add_option("--seed", seed, "Sample seed (default 2026)");
    bool inject = false;
    verify->add_flag("--inject-sign-error", inject)->group("");

    auto* solve = app.add_subcommand("solve", "Solve the problem described by a config file");
    std::string config_path;
    solve->add_option("config", config_path, "Problem config file")->required();
    std::string path_override;
    solve->add_option("--path", path_override, "Continuation path: auto, 68, 69, or 71")
        ->check(CLI::IsMember({"auto", "68", "69", "71"}));
    bool export_mesh = false;
    solve->add_flag("--export-mesh", export_mesh, "Write the surface mesh even if the config has no mesh path");
    std::string report_override;
    solve->add_option("--report", report_override, "Report path (overrides the config)");

    auto* curvature = app.add_subcommand("curvature", "Recompute curvatures from an exported field");
    std::string field_path;
    curvature->add_option("field", field_path, "Field table written by solve")->required();
    int model_override = 0;
    auto* model_opt = curvature->add_option("--model", model_override,
                                            "Space form curvature sign (default: from the file)")
                          ->check(CLI::IsMember({-1, 0, 1}));
    std::string out_path;
    curvature->add_option("-o,--output", out_path, "Write the table here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (verify->parsed()) return cmd_verify(seed, inject);
        if (solve->parsed()) return cmd_solve(config_path, path_override, export_mesh, report_override);
        if (curvature->parsed())
            return cmd_curvature(field_path, model_override, static_cast<bool>(*model_opt), out_path);
    } catch (const prescurv::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
