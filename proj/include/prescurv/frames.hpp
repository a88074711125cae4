#pragma once

#include <Eigen/Dense>

#include "prescurv/jet.hpp"
#include "prescurv/spaceform.hpp"

namespace prescurv {

// Pointwise extrinsic geometry of a radial graph in one formulation:
// induced metric, its square root, second fundamental form, symmetrized
// curvature matrix, principal curvatures, radial normal component, and
// support function.
struct FrameQuantities {
    Eigen::MatrixXd metric;                 // g_ij
    Eigen::MatrixXd inverse_metric;         // g^ij
    Eigen::MatrixXd sqrt_metric;            // gamma_ik, gamma gamma = g
    Eigen::MatrixXd inverse_sqrt_metric;    // gamma^ik
    Eigen::MatrixXd second_fundamental_form;  // h_ij
    Eigen::MatrixXd curvature_matrix;       // a = gamma^ h gamma^
    Eigen::MatrixXd convexity_matrix;       // form-specific positivity witness
    Eigen::VectorXd principal_curvatures;   // eigenvalues of a, ascending
    double normal_radial_component = 0.0;   // phi / w_rho
    double support_function = 0.0;          // tau = phi^2 / w_rho
};

FrameQuantities frame_from_rho(const SpaceFormModel& model, const ScalarJet2& jet);
FrameQuantities frame_from_u(const SpaceFormModel& model, const ScalarJet2& jet);
FrameQuantities frame_from_v(const SpaceFormModel& model, const ScalarJet2& jet);

// Geometry of the t-deformed ambient metric interpolating K=0 to K=1.
FrameQuantities frame_deformed(double t, const ScalarJet2& jet);

// Support function and the primitive of the warping function at a
// rho-jet: (tau, Phi) with Phi = rho^2/2, 1-cos rho, cosh rho - 1.
std::pair<double, double> support_and_primitive(const SpaceFormModel& model,
                                                const ScalarJet2& jet);

}  // namespace prescurv
