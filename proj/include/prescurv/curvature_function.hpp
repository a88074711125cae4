#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

#include "prescurv/expr.hpp"

namespace prescurv {

// Symmetric curvature function f on the positive cone, given as an
// expression tree over elementary symmetric polynomials sigma(k) and
// constants, combined by sum, product, quotient, and real powers.
struct CurvatureFunctionSpec {
    expr::NodePtr tree;
    int dimension = 0;
    std::string source_text;
    // Degree when the tree is homogeneous (sigma(k) has degree k), else empty.
    std::optional<double> homogeneous_degree;
    // True when f provably vanishes on the cone boundary (an S_n factor).
    bool vanishes_on_boundary = false;
};

// Parses e.g. "sigma(n)^(1/n)", "(sigma(2)/sigma(1))^(1)"; the literal
// identifier n stands for the dimension.  Rejects variables other than
// n and calls other than sigma.  Checks f(1,...,1) is finite and positive.
CurvatureFunctionSpec parse_curvature_function(const std::string& text, int dimension);

// f(lambda); requires lambda in the open positive cone.
double eval_f(const CurvatureFunctionSpec& spec, const Eigen::VectorXd& lambda);

// Exact gradient (f_1, ..., f_n) by forward-mode differentiation of the tree.
Eigen::VectorXd grad_f(const CurvatureFunctionSpec& spec, const Eigen::VectorXd& lambda);

// Monte-Carlo falsifier for the structure conditions: empirical lower
// bound of sum f_i lambda_i on {psi0 <= f <= psi1}, a doubling search
// for the large-argument growth condition, and a finite-difference
// concavity witness.  Reports, never proves.
struct StructureReport {
    int accepted_samples = 0;
    int rejected_samples = 0;
    double sigma0_empirical = 0.0;      // min of sum f_i lambda_i
    // Max eigenvalue of diag(lambda) H_f diag(lambda) / f over the
    // samples; congruence-scaled so the roundoff floor is uniform.
    double concavity_max_eigenvalue = 0.0;
    bool growth_satisfied = false;
    double growth_r = 0.0;              // smallest R reaching the target, if any
    double growth_target = 0.0;         // the C the search had to reach
};

StructureReport check_structure_conditions(const CurvatureFunctionSpec& spec,
                                           int sample_count, double psi0, double psi1,
                                           std::uint64_t seed = 20240901ULL);

}  // namespace prescurv
