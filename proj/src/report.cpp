#include "prescurv/report.hpp"

#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "prescurv/expr.hpp"

namespace prescurv {

namespace {

using expr::format_double;

std::string timestamp_line() {
    const std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[40];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    return std::string("# generated: ") + buf + "\n";
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    return out;
}

std::string chart_name(ChartKind kind) {
    return kind == ChartKind::Gnomonic ? "gnomonic" : "projective";
}

}  // namespace

std::string render_report(const SolveReport& report) {
    std::ostringstream out;
    for (const TStepRecord& r : report.steps) {
        out << "step phase=" << r.phase << " t=" << format_double(r.t)
            << " newton=" << r.newton_iterations << " residual=" << format_double(r.residual)
            << " convexity_min=" << format_double(r.convexity_min)
            << " kappa_min=" << format_double(r.kappa_min)
            << " kappa_max=" << format_double(r.kappa_max)
            << " u_min=" << format_double(r.u_min) << " u_max=" << format_double(r.u_max)
            << " grad_max=" << format_double(r.grad_max)
            << " v_gap_min=" << format_double(r.v_gap_min);
        if (!std::isnan(r.subsolution_margin))
            out << " subsolution_margin=" << format_double(r.subsolution_margin);
        out << "\n";
    }
    out << "summary success=" << (report.success ? "true" : "false") << "\n";
    if (!report.success) {
        out << "summary failure_reason=" << report.failure_reason << "\n";
        out << "summary failed_t=" << format_double(report.failed_t) << "\n";
    }
    out << "summary epsilon=" << format_double(report.epsilon) << "\n";
    if (report.schedule_exponent > 0) {
        out << "summary delta1=" << format_double(report.delta1) << "\n";
        out << "summary delta2=" << format_double(report.delta2) << "\n";
        out << "summary schedule_exponent=" << report.schedule_exponent << "\n";
    }
    if (!std::isnan(report.endpoint_consistency))
        out << "summary endpoint_consistency=" << format_double(report.endpoint_consistency)
            << "\n";
    if (!std::isnan(report.subsolution_margin_min))
        out << "summary subsolution_margin_min=" << format_double(report.subsolution_margin_min)
            << "\n";
    if (!report.subsolution_note.empty())
        out << "summary subsolution_note=" << report.subsolution_note << "\n";
    const MonitorReport& m = report.monitors;
    out << "summary c0=" << format_double(m.c0) << "\n";
    out << "summary c1=" << format_double(m.c1) << "\n";
    out << "summary k0=" << format_double(m.k0) << "\n";
    out << "summary tau_min=" << format_double(m.tau_min) << "\n";
    out << "summary boundary_hessian_max=" << format_double(m.boundary_hessian_max) << "\n";
    out << "summary kappa_min=" << format_double(m.kappa_min) << "\n";
    out << "summary kappa_max=" << format_double(m.kappa_max) << "\n";
    out << "summary u_min=" << format_double(m.u_min) << "\n";
    out << "summary u_max=" << format_double(m.u_max) << "\n";
    return out.str();
}

void write_report(const std::string& path, const SolveReport& report) {
    std::ofstream out = open_out(path);
    out << timestamp_line() << render_report(report);
    if (!out) throw ValidationError("failed writing report to '" + path + "'");
}

void write_field(const std::string& path, const ChartedDomain& dom, const SpaceFormModel& model,
                 const DiscreteField& field) {
    if (field.values.size() != dom.node_count())
        throw ValidationError("field size disagrees with the domain");
    std::ofstream out = open_out(path);
    out << "# chart: " << chart_name(dom.kind()) << "\n";
    out << "# center: " << format_double(dom.center()[0]) << " "
        << format_double(dom.center()[1]) << " " << format_double(dom.center()[2]) << "\n";
    out << "# geodesic_radius: " << format_double(dom.geodesic_radius()) << "\n";
    out << "# n_r: " << dom.n_r() << "\n";
    out << "# n_theta: " << dom.n_theta() << "\n";
    out << "# curvature_sign: " << model.curvature_sign() << "\n";
    out << "y1 y2 u_tilde u kappa1 kappa2\n";
    const std::string nan = "nan";
    for (int p = 0; p < dom.node_count(); ++p) {
        const GridNode& nd = dom.node(p);
        const double u = field.values[p] / nd.geo.mu;
        out << format_double(nd.geo.coord[0]) << " " << format_double(nd.geo.coord[1]) << " "
            << format_double(field.values[p]) << " " << format_double(u);
        if (nd.boundary) {
            out << " " << nan << " " << nan << "\n";
        } else {
            const FrameQuantities fr = frame_from_u(model, covariant_jet(dom, field, p));
            out << " " << format_double(fr.principal_curvatures[0]) << " "
                << format_double(fr.principal_curvatures[1]) << "\n";
        }
    }
    if (!out) throw ValidationError("failed writing field to '" + path + "'");
}

FieldFile read_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open field file '" + path + "'");
    FieldFile ff;
    std::string line;
    bool header_done = false;
    std::vector<double> utilde;
    int lineno = 0;
    bool seen_chart = false, seen_center = false, seen_radius = false, seen_nr = false,
         seen_nt = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string key;
            ls >> key;
            if (key == "chart:") {
                std::string name;
                ls >> name;
                if (name == "gnomonic") {
                    ff.kind = ChartKind::Gnomonic;
                } else if (name == "projective") {
                    ff.kind = ChartKind::Projective;
                } else {
                    throw ValidationError("field file: unknown chart '" + name + "'");
                }
                seen_chart = true;
            } else if (key == "center:") {
                if (!(ls >> ff.center[0] >> ff.center[1] >> ff.center[2]))
                    throw ValidationError("field file: malformed center");
                seen_center = true;
            } else if (key == "geodesic_radius:") {
                if (!(ls >> ff.geodesic_radius))
                    throw ValidationError("field file: malformed geodesic_radius");
                seen_radius = true;
            } else if (key == "n_r:") {
                if (!(ls >> ff.n_r)) throw ValidationError("field file: malformed n_r");
                seen_nr = true;
            } else if (key == "n_theta:") {
                if (!(ls >> ff.n_theta)) throw ValidationError("field file: malformed n_theta");
                seen_nt = true;
            } else if (key == "curvature_sign:") {
                if (!(ls >> ff.curvature_sign))
                    throw ValidationError("field file: malformed curvature_sign");
            }
            continue;
        }
        if (!header_done) {
            if (line != "y1 y2 u_tilde u kappa1 kappa2")
                throw ValidationError("field file line " + std::to_string(lineno) +
                                      ": unexpected header row");
            header_done = true;
            continue;
        }
        std::istringstream ls(line);
        double y1, y2, ut;
        if (!(ls >> y1 >> y2 >> ut))
            throw ValidationError("field file line " + std::to_string(lineno) +
                                  ": malformed data row");
        utilde.push_back(ut);
    }
    if (!(seen_chart && seen_center && seen_radius && seen_nr && seen_nt))
        throw ValidationError("field file is missing lattice metadata");
    if (!header_done) throw ValidationError("field file has no header row");
    const long expected = static_cast<long>(ff.n_r) * ff.n_theta;
    if (static_cast<long>(utilde.size()) != expected)
        throw ValidationError("field file holds " + std::to_string(utilde.size()) +
                              " rows, lattice metadata expects " + std::to_string(expected));
    ff.utilde = Eigen::Map<Eigen::VectorXd>(utilde.data(), static_cast<long>(utilde.size()));
    return ff;
}

void write_mesh(const std::string& path, const ChartedDomain& dom, const SpaceFormModel& model,
                const DiscreteField& field) {
    if (field.values.size() != dom.node_count())
        throw ValidationError("field size disagrees with the domain");
    const int k = model.curvature_sign();
    const int cols = k == 0 ? 3 : 4;
    std::ofstream out = open_out(path);
    out << "# triangle mesh of the solved radial graph\n";
    out << "# embedding conventions: K=0 -> rho * z (3 coordinates); "
           "K=1 -> (sin(rho) z, cos(rho)); K=-1 -> (sinh(rho) z, cosh(rho)) (4 coordinates)\n";
    out << "# curvature_sign: " << k << "\n";
    out << "# coordinates_per_vertex: " << cols << "\n";
    out << "# vertex <index> <coordinates>; triangle <a> <b> <c>; the last vertex is a\n";
    out << "# synthetic pole point (centroid of the innermost ring)\n";

    const int n = dom.node_count();
    std::vector<Eigen::Vector4d> pos(static_cast<size_t>(n) + 1, Eigen::Vector4d::Zero());
    for (int p = 0; p < n; ++p) {
        const GridNode& nd = dom.node(p);
        const double u = field.values[p] / nd.geo.mu;
        const double rho = model.zeta(u).value;
        Eigen::Vector4d x = Eigen::Vector4d::Zero();
        switch (k) {
            case 0: x.head<3>() = rho * nd.sphere_point; break;
            case 1:
                x.head<3>() = std::sin(rho) * nd.sphere_point;
                x[3] = std::cos(rho);
                break;
            default:
                x.head<3>() = std::sinh(rho) * nd.sphere_point;
                x[3] = std::cosh(rho);
                break;
        }
        pos[static_cast<size_t>(p)] = x;
    }
    for (int l = 0; l < dom.n_theta(); ++l)
        pos[static_cast<size_t>(n)] += pos[static_cast<size_t>(dom.index(0, l))];
    pos[static_cast<size_t>(n)] /= dom.n_theta();

    for (int p = 0; p <= n; ++p) {
        out << "vertex " << p;
        for (int c = 0; c < cols; ++c) out << " " << format_double(pos[static_cast<size_t>(p)][c]);
        out << "\n";
    }
    for (int l = 0; l < dom.n_theta(); ++l) {
        const int l2 = (l + 1) % dom.n_theta();
        out << "triangle " << n << " " << dom.index(0, l) << " " << dom.index(0, l2) << "\n";
    }
    for (int m = 0; m + 1 < dom.n_r(); ++m) {
        for (int l = 0; l < dom.n_theta(); ++l) {
            const int l2 = (l + 1) % dom.n_theta();
            out << "triangle " << dom.index(m, l) << " " << dom.index(m + 1, l) << " "
                << dom.index(m, l2) << "\n";
            out << "triangle " << dom.index(m, l2) << " " << dom.index(m + 1, l) << " "
                << dom.index(m + 1, l2) << "\n";
        }
    }
    if (!out) throw ValidationError("failed writing mesh to '" + path + "'");
}

}  // namespace prescurv
