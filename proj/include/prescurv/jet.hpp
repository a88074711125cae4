#pragma once

#include <Eigen/Dense>

#include "prescurv/spaceform.hpp"

namespace prescurv {

// Value, gradient, and symmetric Hessian of a scalar field at one
// point, taken with respect to an orthonormal frame unless a chart is
// explicitly in play.
struct ScalarJet2 {
    double value = 0.0;
    Eigen::VectorXd gradient;
    Eigen::MatrixXd hessian;

    int dim() const { return static_cast<int>(gradient.size()); }
};

// Validates dimensions (n >= 2, gradient/hessian consistent) and
// symmetrizes the Hessian.  Asymmetry above 1e-6 relative is an error,
// above 1e-8 a warning on stderr (once per process).
ScalarJet2 validated(const ScalarJet2& jet);

// Jet of m(field) from the jet of field, where m carries value and two
// derivatives at field.value: grad -> m' grad, hess -> m' hess + m'' grad gradT.
ScalarJet2 transform_jet(const Deriv2& m, const ScalarJet2& jet);

// Derivative triple of the inverse map at y = m(x), given m at x.
Deriv2 invert_map(const Deriv2& m, double x);

}  // namespace prescurv
