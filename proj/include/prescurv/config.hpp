#pragma once

#include <string>

#include "prescurv/solver.hpp"

namespace prescurv {

// Flat key-value problem description, sections in brackets.  Expression
// values are stored normalized: parsing and serializing a config is
// idempotent after one pass.
struct ProblemConfig {
    int curvature_sign = 0;
    std::string curvature_text;    // f in sigma(k) syntax
    std::string psi_text;          // psi(y1, y2, u)
    Eigen::Vector3d center = Eigen::Vector3d(0.0, 0.0, 1.0);
    double geodesic_radius = 0.0;
    int n_r = 0;
    int n_theta = 0;
    std::string boundary_text;     // u on the boundary, in (y1, y2)
    std::string subsolution_text;  // u, in (y1, y2)
    HomotopyConfig homotopy;
    std::string report_path;  // empty = not requested
    std::string field_path;
    std::string mesh_path;
};

ProblemConfig parse_config(const std::string& text);
ProblemConfig load_config(const std::string& path);
std::string serialize_config(const ProblemConfig& cfg);

std::string path_name(PathKind kind);
PathKind parse_path_name(const std::string& name);

// Config turned into solvable data: grid, nodal boundary and
// subsolution values of u~, and the psi closure.
struct PreparedProblem {
    ChartedDomain domain;
    SpaceFormModel model;
    CurvatureFunctionSpec spec;
    PsiFunction psi;
    Eigen::VectorXd boundary_values;
    Eigen::VectorXd subsolution_values;
};

PreparedProblem prepare_problem(const ProblemConfig& cfg);

// View of a prepared problem in the solver's input shape.
SolveInput solve_input(const PreparedProblem& prep);

}  // namespace prescurv
