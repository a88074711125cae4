#pragma once

#include <string>

#include "prescurv/solver.hpp"

namespace prescurv {

// Report body: one line per accepted continuation step plus a key-value
// summary block.  Deterministic for identical inputs; the timestamp
// goes on a separate header line added at write time.
std::string render_report(const SolveReport& report);
void write_report(const std::string& path, const SolveReport& report);

// Field table with lattice metadata comments and a header row; kappa
// columns are nan on boundary nodes (no stencil reaches them).
void write_field(const std::string& path, const ChartedDomain& dom, const SpaceFormModel& model,
                 const DiscreteField& field);

struct FieldFile {
    ChartKind kind = ChartKind::Gnomonic;
    Eigen::Vector3d center = Eigen::Vector3d::Zero();
    double geodesic_radius = 0.0;
    int n_r = 0;
    int n_theta = 0;
    int curvature_sign = 0;
    Eigen::VectorXd utilde;
};

FieldFile read_field(const std::string& path);

// Triangle mesh of the solved graph in the model's natural embedding;
// conventions documented in the file header.
void write_mesh(const std::string& path, const ChartedDomain& dom, const SpaceFormModel& model,
                const DiscreteField& field);

}  // namespace prescurv
