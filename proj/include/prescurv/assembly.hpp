#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <utility>

#include "prescurv/grid.hpp"
#include "prescurv/operator_g.hpp"

namespace prescurv {

// Which operator a continuation stage works with: the space-form
// operator at fixed curvature sign, or the deformed family at
// homotopy time t.
struct OperatorConfig {
    bool deformed = false;
    int curvature_sign = 0;  // read when !deformed
    double t = 1.0;          // read when deformed
};

// Right side of the stage equation, evaluated per interior node at the
// current solution value there: returns (value, d/du).
using RhsFunction = std::function<std::pair<double, double>(int node, double u)>;

// One Dirichlet problem at a frozen continuation time:
//   G[u]_p = rhs(p, u_p)   at interior nodes,
//   u~_p   = b_p           on the boundary ring.
struct StageProblem {
    const ChartedDomain* domain = nullptr;
    const CurvatureFunctionSpec* spec = nullptr;
    OperatorConfig op;
    RhsFunction rhs;
    Eigen::VectorXd boundary_values;  // target u~ per node index, read on boundary rows
};

struct AssembledSystem {
    Eigen::VectorXd residual;
    Eigen::SparseMatrix<double> jacobian;
};

// Newton residual and exact Jacobian with respect to the nodal u~
// values.  A curvature spectrum outside the positive cone raises
// ConeViolationError naming the offending node.
AssembledSystem assemble(const StageProblem& prob, const DiscreteField& field);

// Residual alone, for line searches.
Eigen::VectorXd assemble_residual(const StageProblem& prob, const DiscreteField& field);

// Interior operator values G[u]_p (zeros on boundary rows).
Eigen::VectorXd operator_values(const StageProblem& prob, const DiscreteField& field);

}  // namespace prescurv
