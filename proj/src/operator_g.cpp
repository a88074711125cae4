#include "prescurv/operator_g.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "prescurv/errors.hpp"

namespace prescurv {

namespace testhooks {
bool flip_first_order_sign = false;
}  // namespace testhooks

namespace {

// Scalar coefficients of the u-form at p = u^2 + shift (shift = K or t^2):
// phi = 1/sqrt(p), phi' = u/sqrt(p), zeta' = -1/p, zeta'' = 2u/p^2, and
// w = sqrt(phi^2 + zeta'^2 |grad u|^2).
struct UFormScalars {
    double phi, dphi, zp, zpp, w;
};

UFormScalars u_scalars(double shift, double u, double q) {
    const double p = u * u + shift;
    const double sp = std::sqrt(p);
    UFormScalars s;
    s.phi = 1.0 / sp;
    s.dphi = u / sp;
    s.zp = -1.0 / p;
    s.zpp = 2.0 * u / (p * p);
    s.w = std::sqrt(p + q) / p;
    return s;
}

LinearizationCoeffs assemble_coeffs(const FrameQuantities& frame, const UFormScalars& s,
                                    const CurvatureFunctionSpec& spec, const ScalarJet2& jet) {
    const Eigen::MatrixXd f = F_matrix(spec, frame.curvature_matrix);
    const Eigen::MatrixXd& a = frame.curvature_matrix;
    const Eigen::MatrixXd& g_inv = frame.inverse_metric;
    const Eigen::MatrixXd& gamma = frame.inverse_sqrt_metric;
    const Eigen::VectorXd& du = jet.gradient;

    LinearizationCoeffs out;
    out.operator_value = eval_f(spec, frame.principal_curvatures);
    out.second_order = (-s.phi * s.zp / s.w) * (gamma * f * gamma);

    const double zp2 = s.zp * s.zp;
    const double tr_fa = (f * a).trace();
    const double hook = testhooks::flip_first_order_sign ? -1.0 : 1.0;
    out.first_order = -(2.0 * zp2 / (s.w * (s.phi + s.w))) *
                          (gamma * (s.w * (f * (a * du)) + hook * s.phi * (a * (f * du)))) -
                      (zp2 * tr_fa / (s.w * s.w)) * du;

    const double s1 = (g_inv * f * a).trace();
    const double s2 = (f * du).dot(a * du);
    const double w2 = s.w * s.w;
    out.zeroth_order = -2.0 * (s.phi * s.dphi * s.zp * s1 + s.zp * s.zpp * s2 / w2) +
                       (s.dphi * s.zp / s.phi - s.phi * s.dphi * s.zp / w2 +
                        s.phi * s.phi * s.zpp / (s.zp * w2)) *
                           tr_fa -
                       (s.phi * s.zp / s.w) * (f * g_inv).trace();
    return out;
}

}  // namespace

Eigen::MatrixXd F_matrix(const CurvatureFunctionSpec& spec, const Eigen::MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    const Eigen::VectorXd f = grad_f(spec, es.eigenvalues());  // cone-checked there
    return es.eigenvectors() * f.asDiagonal() * es.eigenvectors().transpose();
}

double evaluate_G(const SpaceFormModel& model, const CurvatureFunctionSpec& spec,
                  const ScalarJet2& jet) {
    return eval_f(spec, frame_from_u(model, jet).principal_curvatures);
}

LinearizationCoeffs linearize_G(const SpaceFormModel& model, const CurvatureFunctionSpec& spec,
                                const ScalarJet2& jet_in) {
    const ScalarJet2 jet = validated(jet_in);
    const FrameQuantities frame = frame_from_u(model, jet);
    return assemble_coeffs(frame,
                           u_scalars(model.curvature_sign(), jet.value,
                                     jet.gradient.squaredNorm()),
                           spec, jet);
}

double evaluate_G_t(double t, const CurvatureFunctionSpec& spec, const ScalarJet2& jet) {
    return eval_f(spec, frame_deformed(t, jet).principal_curvatures);
}

LinearizationCoeffs linearize_G_t(double t, const CurvatureFunctionSpec& spec,
                                  const ScalarJet2& jet_in) {
    const ScalarJet2 jet = validated(jet_in);
    const FrameQuantities frame = frame_deformed(t, jet);
    return assemble_coeffs(frame, u_scalars(t * t, jet.value, jet.gradient.squaredNorm()), spec,
                           jet);
}

double dG_t_dt(double t, const CurvatureFunctionSpec& spec, const ScalarJet2& jet_in) {
    const ScalarJet2 jet = validated(jet_in);
    const FrameQuantities frame = frame_deformed(t, jet);
    const Eigen::MatrixXd f = F_matrix(spec, frame.curvature_matrix);
    const Eigen::VectorXd& du = jet.gradient;
    const double q = du.squaredNorm();
    const double p = jet.value * jet.value + t * t;
    const double sp = std::sqrt(p);
    const double spq = std::sqrt(p + q);
    // b is the conjugated convexity matrix gamma~ (hess + u I) gamma~.
    const Eigen::MatrixXd b = (spq / sp) * frame.curvature_matrix;
    return t / (sp * spq * spq * spq) * (q * (f * b).trace() + 2.0 * (f * du).dot(b * du));
}

double check_lemma61_sign(const SpaceFormModel& model, const CurvatureFunctionSpec& spec,
                          const ScalarJet2& jet_v_in, double psi_value) {
    if (model.curvature_sign() == 1)
        throw UnsupportedModelError("the sign check needs xi, defined only for K = 0 and K = -1");
    if (!(psi_value > 0.0)) throw ValidationError("psi must be positive");
    const ScalarJet2 jet_v = validated(jet_v_in);
    const Deriv2 eta = model.eta(jet_v.value);
    const Deriv1 xi = model.xi(jet_v.value);
    const ScalarJet2 jet_u = transform_jet(eta, jet_v);
    const LinearizationCoeffs lin = linearize_G(model, spec, jet_u);

    const double contract = psi_value * xi.value;
    if (std::abs(lin.operator_value - contract) > 1e-8 * std::max(1.0, std::abs(contract)))
        throw StaleInputError("operator value does not satisfy the xi-weighted equation here");

    // v-derivative of the composed operator at fixed (hess v, grad v);
    // the third derivative of eta equals its first on every branch.
    const Eigen::VectorXd& pv = jet_v.gradient;
    const double gv = eta.d2 * (lin.second_order.cwiseProduct(jet_v.hessian)).sum() +
                      eta.d1 * pv.dot(lin.second_order * pv) +
                      eta.d2 * lin.first_order.dot(pv) + eta.d1 * lin.zeroth_order;
    return gv - psi_value * xi.d1;
}

}  // namespace prescurv
