#include "prescurv/spaceform.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace prescurv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Below this t the deformed maps switch to their analytic t=0 limits;
// sin(t rho)/t would otherwise lose digits to cancellation.
constexpr double kDeformedLimitCrossover = 1e-8;

[[noreturn]] void bound_error(const char* name, double got, const char* relation, double bound) {
    std::ostringstream os;
    os << name << " = " << got << " violates " << name << " " << relation << " " << bound;
    throw DomainBoundError(os.str());
}

void require_curvature_sign(int k) {
    if (k != -1 && k != 0 && k != 1)
        throw ValidationError("curvature_sign must be one of -1, 0, +1");
}

}  // namespace

SpaceFormModel::SpaceFormModel(int curvature_sign) : k_(curvature_sign) {
    require_curvature_sign(k_);
}

double SpaceFormModel::rho_upper() const {
    return k_ == 1 ? std::asin(1.0) : kInf;  // pi/2 for the hemisphere
}

double SpaceFormModel::u_lower() const {
    return k_ == -1 ? 1.0 : 0.0;
}

double SpaceFormModel::v_lower() const {
    return k_ == 0 ? -kInf : 0.0;
}

Deriv2 SpaceFormModel::phi(double rho) const {
    if (!(rho > 0.0)) bound_error("rho", rho, ">", 0.0);
    if (!(rho < rho_upper())) bound_error("rho", rho, "<", rho_upper());
    switch (k_) {
        case 0: return {rho, 1.0, 0.0};
        case 1: return {std::sin(rho), std::cos(rho), -std::sin(rho)};
        default: return {std::sinh(rho), std::cosh(rho), std::sinh(rho)};
    }
}

Deriv2 SpaceFormModel::zeta(double u) const {
    if (!(u > u_lower())) bound_error("u", u, ">", u_lower());
    const double p = u * u + k_;  // 1/phi(zeta(u))^2 in every model
    double value;
    switch (k_) {
        case 0: value = 1.0 / u; break;
        case 1: value = std::atan2(1.0, u); break;  // arccot with range (0, pi)
        default: value = 0.5 * std::log((u + 1.0) / (u - 1.0)); break;
    }
    return {value, -1.0 / p, 2.0 * u / (p * p)};
}

Deriv2 SpaceFormModel::eta(double v) const {
    if (!(v > v_lower())) bound_error("v", v, ">", v_lower());
    switch (k_) {
        case 0: {
            const double e = std::exp(v);
            return {e, e, e};
        }
        case 1: return {std::sinh(v), std::cosh(v), std::sinh(v)};
        default: return {std::cosh(v), std::sinh(v), std::cosh(v)};
    }
}

double SpaceFormModel::eta_inverse(double u) const {
    if (!(u > u_lower())) bound_error("u", u, ">", u_lower());
    switch (k_) {
        case 0: return std::log(u);
        case 1: return std::asinh(u);
        default: return std::acosh(u);
    }
}

Deriv1 SpaceFormModel::xi(double v) const {
    if (k_ == 1) throw UnsupportedModelError("xi is defined only for K = 0 and K = -1");
    if (!(v > v_lower())) bound_error("v", v, ">", v_lower());
    if (k_ == 0) {
        const double e = std::exp(2.0 * v);
        return {e, 2.0 * e};
    }
    return {std::sinh(v), std::cosh(v)};
}

Deriv1 SpaceFormModel::xi_of_u(double u) const {
    if (k_ == 1) throw UnsupportedModelError("xi is defined only for K = 0 and K = -1");
    if (!(u > u_lower())) bound_error("u", u, ">", u_lower());
    if (k_ == 0) return {u * u, 2.0 * u};
    const double s = std::sqrt(u * u - 1.0);
    return {s, u / s};
}

Deriv2 phi_deformed(double t, double rho) {
    if (!(t >= 0.0 && t <= 1.0)) bound_error("t", t, "in", 1.0);
    if (t < kDeformedLimitCrossover) {
        if (!(rho > 0.0)) bound_error("rho", rho, ">", 0.0);
        return {rho, 1.0, 0.0};
    }
    const double upper = std::asin(1.0) / t;  // pi/(2t)
    if (!(rho > 0.0)) bound_error("rho", rho, ">", 0.0);
    if (!(rho < upper)) bound_error("rho", rho, "<", upper);
    return {std::sin(t * rho) / t, std::cos(t * rho), -t * std::sin(t * rho)};
}

Deriv2 zeta_deformed(double t, double u) {
    if (!(t >= 0.0 && t <= 1.0)) bound_error("t", t, "in", 1.0);
    if (!(u > 0.0)) bound_error("u", u, ">", 0.0);
    if (t < kDeformedLimitCrossover) {
        const double p = u * u;
        return {1.0 / u, -1.0 / p, 2.0 * u / (p * p)};
    }
    const double p = u * u + t * t;
    return {std::atan2(t, u) / t, -1.0 / p, 2.0 * u / (p * p)};
}

DeformedTransforms deformed_transforms(double t, double rho_or_u) {
    return {phi_deformed(t, rho_or_u), zeta_deformed(t, rho_or_u)};
}

}  // namespace prescurv
