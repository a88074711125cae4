#include "prescurv/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "prescurv/expr.hpp"

namespace prescurv {

namespace {

std::string trim(const std::string& s) {
    const size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        const double x = std::stod(value, &used);
        if (trim(value.substr(used)).empty() && std::isfinite(x)) return x;
    } catch (const std::exception&) {
    }
    throw ValidationError("config key '" + key + "' needs a number, got '" + value + "'");
}

int parse_integer(const std::string& key, const std::string& value) {
    const double x = parse_number(key, value);
    const int i = static_cast<int>(std::lround(x));
    if (x != static_cast<double>(i))
        throw ValidationError("config key '" + key + "' needs an integer, got '" + value + "'");
    return i;
}

// Normalized expression text, restricted to the given variables.
std::string normalize_expression(const std::string& key, const std::string& value,
                                 const std::set<std::string>& allowed) {
    const expr::NodePtr tree = expr::parse(value);
    std::vector<const expr::Node*> todo{tree.get()};
    while (!todo.empty()) {
        const expr::Node* n = todo.back();
        todo.pop_back();
        if (n->kind == expr::Kind::Variable && allowed.count(n->name) == 0)
            throw ValidationError("config key '" + key + "' may not use variable '" + n->name +
                                  "'");
        for (const auto& a : n->args) todo.push_back(a.get());
    }
    return expr::serialize(tree);
}

const std::set<std::string> kPointVars{"y1", "y2"};
const std::set<std::string> kPsiVars{"y1", "y2", "u"};

}  // namespace

std::string path_name(PathKind kind) {
    switch (kind) {
        case PathKind::Auto: return "auto";
        case PathKind::Auxiliary68: return "68";
        case PathKind::Main69: return "69";
        case PathKind::Spherical71: return "71";
    }
    throw ValidationError("unknown path kind");
}

PathKind parse_path_name(const std::string& name) {
    if (name == "auto") return PathKind::Auto;
    if (name == "68") return PathKind::Auxiliary68;
    if (name == "69") return PathKind::Main69;
    if (name == "71") return PathKind::Spherical71;
    throw ValidationError("unknown path '" + name + "' (expected auto, 68, 69, or 71)");
}

ProblemConfig parse_config(const std::string& text) {
    ProblemConfig cfg;
    std::map<std::string, std::string> seen;

    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ValidationError("line " + std::to_string(lineno) + ": unterminated section");
            section = trim(s.substr(1, s.size() - 2));
            continue;
        }
        const size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ValidationError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (section.empty())
            throw ValidationError("line " + std::to_string(lineno) + ": key outside any section");
        const std::string full = section + "." + key;
        if (!seen.emplace(full, value).second)
            throw ValidationError("line " + std::to_string(lineno) + ": duplicate key '" + full +
                                  "'");

        if (full == "model.curvature_sign") {
            cfg.curvature_sign = parse_integer(full, value);
            if (cfg.curvature_sign < -1 || cfg.curvature_sign > 1)
                throw ValidationError("curvature_sign must be -1, 0, or 1");
        } else if (full == "curvature.f") {
            cfg.curvature_text = value;  // normalized below via the curvature parser
        } else if (full == "problem.psi") {
            cfg.psi_text = normalize_expression(full, value, kPsiVars);
        } else if (full == "domain.center") {
            std::istringstream cs(value);
            if (!(cs >> cfg.center[0] >> cfg.center[1] >> cfg.center[2]) ||
                !(cs >> std::ws).eof())
                throw ValidationError("domain.center needs three numbers");
        } else if (full == "domain.geodesic_radius") {
            cfg.geodesic_radius = parse_number(full, value);
        } else if (full == "domain.n_r") {
            cfg.n_r = parse_integer(full, value);
        } else if (full == "domain.n_theta") {
            cfg.n_theta = parse_integer(full, value);
        } else if (full == "boundary.u") {
            cfg.boundary_text = normalize_expression(full, value, kPointVars);
        } else if (full == "subsolution.u") {
            cfg.subsolution_text = normalize_expression(full, value, kPointVars);
        } else if (full == "homotopy.path") {
            cfg.homotopy.path = parse_path_name(value);
        } else if (full == "homotopy.epsilon") {
            cfg.homotopy.epsilon = parse_number(full, value);
        } else if (full == "homotopy.delta1") {
            cfg.homotopy.delta1 = parse_number(full, value);
        } else if (full == "homotopy.delta2") {
            cfg.homotopy.delta2 = parse_number(full, value);
        } else if (full == "homotopy.schedule_exponent") {
            cfg.homotopy.schedule_exponent = parse_integer(full, value);
        } else if (full == "homotopy.t_initial") {
            cfg.homotopy.t_initial = parse_number(full, value);
        } else if (full == "homotopy.t_min") {
            cfg.homotopy.t_min = parse_number(full, value);
        } else if (full == "homotopy.newton_max_iterations") {
            cfg.homotopy.newton.max_iterations = parse_integer(full, value);
        } else if (full == "homotopy.newton_tolerance") {
            cfg.homotopy.newton.tolerance = parse_number(full, value);
        } else if (full == "output.report") {
            cfg.report_path = value;
        } else if (full == "output.field") {
            cfg.field_path = value;
        } else if (full == "output.mesh") {
            cfg.mesh_path = value;
        } else {
            throw ValidationError("line " + std::to_string(lineno) + ": unknown key '" + full +
                                  "'");
        }
    }

    for (const char* required : {"model.curvature_sign", "curvature.f", "problem.psi",
                                 "domain.center", "domain.geodesic_radius", "domain.n_r",
                                 "domain.n_theta", "boundary.u", "subsolution.u"}) {
        if (seen.find(required) == seen.end())
            throw ValidationError(std::string("config is missing required key '") + required + "'");
    }

    // The curvature parser normalizes and validates the f text.
    cfg.curvature_text = parse_curvature_function(cfg.curvature_text, 2).source_text;

    if (!(cfg.center.norm() > 0.0)) throw ValidationError("domain.center must be nonzero");
    cfg.center.normalize();
    if (!(cfg.geodesic_radius > 0.0 && cfg.geodesic_radius < std::asin(1.0)))
        throw HemisphereError("geodesic radius " + expr::format_double(cfg.geodesic_radius) +
                              " lies outside (0, pi/2)");
    if (!(cfg.homotopy.t_initial > 0.0 && cfg.homotopy.t_initial <= 1.0))
        throw ValidationError("homotopy.t_initial must lie in (0, 1]");
    if (!(cfg.homotopy.t_min > 0.0 && cfg.homotopy.t_min <= cfg.homotopy.t_initial))
        throw ValidationError("homotopy.t_min must lie in (0, t_initial]");
    if (cfg.homotopy.newton.max_iterations < 1)
        throw ValidationError("homotopy.newton_max_iterations must be positive");
    if (!(cfg.homotopy.newton.tolerance > 0.0))
        throw ValidationError("homotopy.newton_tolerance must be positive");
    return cfg;
}

ProblemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const ProblemConfig& cfg) {
    std::ostringstream out;
    out << "[model]\n";
    out << "curvature_sign = " << cfg.curvature_sign << "\n\n";
    out << "[curvature]\n";
    out << "f = " << cfg.curvature_text << "\n\n";
    out << "[problem]\n";
    out << "psi = " << cfg.psi_text << "\n\n";
    out << "[domain]\n";
    out << "center = " << expr::format_double(cfg.center[0]) << " "
        << expr::format_double(cfg.center[1]) << " " << expr::format_double(cfg.center[2])
        << "\n";
    out << "geodesic_radius = " << expr::format_double(cfg.geodesic_radius) << "\n";
    out << "n_r = " << cfg.n_r << "\n";
    out << "n_theta = " << cfg.n_theta << "\n\n";
    out << "[boundary]\n";
    out << "u = " << cfg.boundary_text << "\n\n";
    out << "[subsolution]\n";
    out << "u = " << cfg.subsolution_text << "\n\n";
    out << "[homotopy]\n";
    out << "path = " << path_name(cfg.homotopy.path) << "\n";
    if (cfg.homotopy.epsilon)
        out << "epsilon = " << expr::format_double(*cfg.homotopy.epsilon) << "\n";
    if (cfg.homotopy.delta1)
        out << "delta1 = " << expr::format_double(*cfg.homotopy.delta1) << "\n";
    if (cfg.homotopy.delta2)
        out << "delta2 = " << expr::format_double(*cfg.homotopy.delta2) << "\n";
    if (cfg.homotopy.schedule_exponent)
        out << "schedule_exponent = " << *cfg.homotopy.schedule_exponent << "\n";
    out << "t_initial = " << expr::format_double(cfg.homotopy.t_initial) << "\n";
    out << "t_min = " << expr::format_double(cfg.homotopy.t_min) << "\n";
    out << "newton_max_iterations = " << cfg.homotopy.newton.max_iterations << "\n";
    out << "newton_tolerance = " << expr::format_double(cfg.homotopy.newton.tolerance) << "\n";
    if (!cfg.report_path.empty() || !cfg.field_path.empty() || !cfg.mesh_path.empty()) {
        out << "\n[output]\n";
        if (!cfg.report_path.empty()) out << "report = " << cfg.report_path << "\n";
        if (!cfg.field_path.empty()) out << "field = " << cfg.field_path << "\n";
        if (!cfg.mesh_path.empty()) out << "mesh = " << cfg.mesh_path << "\n";
    }
    return out.str();
}

PreparedProblem prepare_problem(const ProblemConfig& cfg) {
    const SpaceFormModel model(cfg.curvature_sign);
    const CurvatureFunctionSpec spec = parse_curvature_function(cfg.curvature_text, 2);
    ChartedDomain domain =
        build_domain(cfg.center, cfg.geodesic_radius, cfg.n_r, cfg.n_theta);

    const expr::NodePtr boundary_tree = expr::parse(cfg.boundary_text);
    const expr::NodePtr subsolution_tree = expr::parse(cfg.subsolution_text);
    const expr::NodePtr psi_tree = expr::parse(cfg.psi_text);

    const int n = domain.node_count();
    Eigen::VectorXd boundary(n), subsolution(n);
    std::vector<Eigen::Vector2d> coords(static_cast<size_t>(n));
    for (int p = 0; p < n; ++p) {
        const GridNode& nd = domain.node(p);
        coords[static_cast<size_t>(p)] = nd.geo.coord;
        const expr::Env env{{"y1", nd.geo.coord[0]}, {"y2", nd.geo.coord[1]}};
        const double ub = expr::evaluate(boundary_tree, env);
        const double us = expr::evaluate(subsolution_tree, env);
        if (!(us > model.u_lower()) || !(ub > model.u_lower()))
            throw ValidationError("boundary or subsolution value leaves the admissible u range "
                                  "at node (ring " +
                                  std::to_string(nd.ring) + ", spoke " +
                                  std::to_string(nd.spoke) + ")");
        boundary[p] = nd.geo.mu * ub;
        subsolution[p] = nd.geo.mu * us;

        const expr::Env psi_env{{"y1", nd.geo.coord[0]}, {"y2", nd.geo.coord[1]}, {"u", us}};
        if (!(expr::evaluate(psi_tree, psi_env) > 0.0))
            throw ValidationError("psi must be positive; it is not at node (ring " +
                                  std::to_string(nd.ring) + ", spoke " +
                                  std::to_string(nd.spoke) + ")");
    }

    PsiFunction psi = [psi_tree, coords](int node, double u) {
        const Eigen::Vector2d& y = coords[static_cast<size_t>(node)];
        const expr::Env env{{"y1", y[0]}, {"y2", y[1]}, {"u", u}};
        return expr::evaluate_with_derivative(psi_tree, env, "u");
    };

    return PreparedProblem{std::move(domain), model, spec, std::move(psi), std::move(boundary),
                           std::move(subsolution)};
}

SolveInput solve_input(const PreparedProblem& prep) {
    SolveInput in;
    in.domain = &prep.domain;
    in.curvature_sign = prep.model.curvature_sign();
    in.spec = &prep.spec;
    in.psi = prep.psi;
    in.boundary_values = prep.boundary_values;
    in.subsolution_values = prep.subsolution_values;
    return in;
}

}  // namespace prescurv
