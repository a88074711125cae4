#pragma once

#include "prescurv/errors.hpp"

namespace prescurv {

// Scalar value with first and second derivative, the common return
// shape of all change-of-variable maps.
struct Deriv2 {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

struct Deriv1 {
    double value = 0.0;
    double d1 = 0.0;
};

// The ambient model: Euclidean space (K=0), the open hemisphere (K=1),
// or hyperbolic space (K=-1), written as a warped product over the unit
// sphere with warping factor phi.
class SpaceFormModel {
public:
    explicit SpaceFormModel(int curvature_sign);

    int curvature_sign() const { return k_; }

    // Upper end of the admissible radial range (0, rho_upper).
    double rho_upper() const;
    // Lower end of the admissible u-range (u_lower, inf).
    double u_lower() const;
    // Lower end of the admissible v-range (v_lower, inf).
    double v_lower() const;

    // Warping function: rho, sin rho, sinh rho.
    Deriv2 phi(double rho) const;

    // rho as a function of u: 1/u, arccot u, (1/2) log((u+1)/(u-1)).
    // Strictly decreasing; arccot takes the branch with range (0, pi).
    Deriv2 zeta(double u) const;

    // u as a function of v: e^v, sinh v, cosh v.  Strictly increasing
    // on the open v-range.
    Deriv2 eta(double v) const;

    // Inverse of eta: log u, asinh u, acosh u.
    double eta_inverse(double u) const;

    // Auxiliary weight for the flat and hyperbolic right-hand sides:
    // e^{2v} (K=0), sinh v (K=-1).  Undefined for K=1.
    Deriv1 xi(double v) const;

    // xi expressed through u = eta(v): u^2 (K=0), sqrt(u^2-1) (K=-1),
    // with d/du.  Same support as xi.
    Deriv1 xi_of_u(double u) const;

private:
    int k_;
};

// The one-parameter family deforming the flat model into the spherical
// one: phi^t(rho) = sin(t rho)/t, zeta^t(u) = (1/t) arccot(u/t), with
// the analytic t -> 0 limits phi^0 = rho, zeta^0 = 1/u.
struct DeformedTransforms {
    Deriv2 phi_t;
    Deriv2 zeta_t;
};

Deriv2 phi_deformed(double t, double rho);
Deriv2 zeta_deformed(double t, double u);
// Both triples at the same argument (read as rho for phi^t, u for zeta^t).
DeformedTransforms deformed_transforms(double t, double rho_or_u);

}  // namespace prescurv
