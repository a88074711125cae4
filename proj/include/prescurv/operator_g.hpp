#pragma once

#include <Eigen/Dense>

#include "prescurv/curvature_function.hpp"
#include "prescurv/frames.hpp"

namespace prescurv {

// Exact linearization of the scalar curvature operator at one jet:
// second-order coefficient matrix, gradient coefficient vector, the
// coefficient of the solution value, and the operator value itself.
struct LinearizationCoeffs {
    Eigen::MatrixXd second_order;  // positive definite on convex jets
    Eigen::VectorXd first_order;
    double zeroth_order = 0.0;
    double operator_value = 0.0;
};

// dF/da as a symmetric matrix: spectral function of a with eigenvalue
// map grad_f.  Requires the spectrum of a in the positive cone.
Eigen::MatrixXd F_matrix(const CurvatureFunctionSpec& spec, const Eigen::MatrixXd& a);

// G(jet) = f(principal curvatures of the u-form graph).
double evaluate_G(const SpaceFormModel& model, const CurvatureFunctionSpec& spec,
                  const ScalarJet2& jet);

LinearizationCoeffs linearize_G(const SpaceFormModel& model, const CurvatureFunctionSpec& spec,
                                const ScalarJet2& jet);

// The deformed operator along the flat-to-spherical homotopy, and its
// exact linearization (same closed forms with u^2 + K replaced by
// u^2 + t^2).
double evaluate_G_t(double t, const CurvatureFunctionSpec& spec, const ScalarJet2& jet);

LinearizationCoeffs linearize_G_t(double t, const CurvatureFunctionSpec& spec,
                                  const ScalarJet2& jet);

// Closed-form t-derivative of the deformed operator; nonnegative on
// strictly locally convex jets.
double dG_t_dt(double t, const CurvatureFunctionSpec& spec, const ScalarJet2& jet);

namespace testhooks {
// Deliberate fault injection for the verification suites' mutation
// check: flips one term of the gradient coefficient.  Never set outside
// of that check.
extern bool flip_first_order_sign;
}  // namespace testhooks

// Uniqueness-ingredient diagnostic: the v-derivative of the v-form
// operator minus psi xi'(v), negative where the contract
// (operator value) = psi xi(v) holds.  The caller asserts the sign;
// a violated contract raises StaleInputError.
double check_lemma61_sign(const SpaceFormModel& model, const CurvatureFunctionSpec& spec,
                          const ScalarJet2& jet_v, double psi_value);

}  // namespace prescurv
