#include "prescurv/frames.hpp"

#include <Eigen/Eigenvalues>
#include <atomic>
#include <cmath>
#include <iostream>

namespace prescurv {

namespace {

// Graph degenerating (|gradient| -> inf) drives the w-denominators to
// zero; below this they are treated as out of domain.
constexpr double kTinyDenominator = 1e-300;

void check_denominator(double w, const char* what) {
    if (!(w > kTinyDenominator))
        throw DomainBoundError(std::string(what) + " below 1e-300 (degenerate graph)");
}

Eigen::VectorXd ascending_eigenvalues(const Eigen::MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

// Shared u-form assembly.  Everything is algebraic in p = u^2 + k
// (k = K, or t^2 for the deformed metric): phi = 1/sqrt(p),
// phi' = u/sqrt(p), zeta' = -1/p, so no transcendental round trips.
FrameQuantities assemble_u_form(double p, const ScalarJet2& jet) {
    const int n = jet.dim();
    const double u = jet.value;
    const Eigen::VectorXd& du = jet.gradient;
    const double q = du.squaredNorm();
    check_denominator(p, "u^2 + K");
    const double sp = std::sqrt(p);
    const double spq = std::sqrt(p + q);
    check_denominator(spq, "w");

    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd outer = du * du.transpose();
    const Eigen::MatrixXd gamma_tilde = id - outer / (spq * (sp + spq));
    const Eigen::MatrixXd convexity = jet.hessian + u * id;

    FrameQuantities f;
    f.metric = id / p + outer / (p * p);
    f.inverse_metric = p * (id - outer / (p + q));
    f.sqrt_metric = id / sp + outer / (p * (sp + spq));
    f.inverse_sqrt_metric = sp * gamma_tilde;
    f.second_fundamental_form = convexity / (sp * spq);
    f.curvature_matrix = (sp / spq) * (gamma_tilde * convexity * gamma_tilde);
    f.convexity_matrix = convexity;
    f.principal_curvatures = ascending_eigenvalues(f.curvature_matrix);
    f.normal_radial_component = sp / spq;
    f.support_function = 1.0 / spq;
    return f;
}

}  // namespace

ScalarJet2 validated(const ScalarJet2& jet) {
    const int n = jet.dim();
    if (n < 2) throw ValidationError("jet dimension must be at least 2");
    if (jet.hessian.rows() != n || jet.hessian.cols() != n)
        throw ValidationError("jet hessian dimensions disagree with gradient");
    const Eigen::MatrixXd& h = jet.hessian;
    const double asym = (h - h.transpose()).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if (asym > 1e-6 * scale)
        throw ValidationError("jet hessian asymmetry exceeds tolerance");
    if (asym > 1e-8 * scale) {
        static std::atomic<bool> warned{false};
        if (!warned.exchange(true))
            std::cerr << "warning: asymmetric jet hessian symmetrized (|H - H^T| = "
                      << asym << ")\n";
    }
    ScalarJet2 out = jet;
    out.hessian = 0.5 * (h + h.transpose());
    return out;
}

ScalarJet2 transform_jet(const Deriv2& m, const ScalarJet2& jet) {
    ScalarJet2 out;
    out.value = m.value;
    out.gradient = m.d1 * jet.gradient;
    out.hessian = m.d1 * jet.hessian + m.d2 * (jet.gradient * jet.gradient.transpose());
    return out;
}

Deriv2 invert_map(const Deriv2& m, double x) {
    check_denominator(std::abs(m.d1), "map derivative");
    return {x, 1.0 / m.d1, -m.d2 / (m.d1 * m.d1 * m.d1)};
}

FrameQuantities frame_from_rho(const SpaceFormModel& model, const ScalarJet2& jet_in) {
    const ScalarJet2 jet = validated(jet_in);
    const int n = jet.dim();
    const Deriv2 ph = model.phi(jet.value);
    const double phi = ph.value, dphi = ph.d1;
    const Eigen::VectorXd& dr = jet.gradient;
    const double q = dr.squaredNorm();
    const double w = std::sqrt(phi * phi + q);
    check_denominator(phi, "phi");
    check_denominator(w, "w");

    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd outer = dr * dr.transpose();

    FrameQuantities f;
    f.metric = phi * phi * id + outer;
    f.inverse_metric = (id - outer / (w * w)) / (phi * phi);
    f.sqrt_metric = phi * id + outer / (phi + w);
    f.inverse_sqrt_metric = (id - outer / (w * (phi + w))) / phi;
    f.second_fundamental_form =
        (phi / w) * (-jet.hessian + (2.0 * dphi / phi) * outer + phi * dphi * id);
    f.curvature_matrix =
        f.inverse_sqrt_metric * f.second_fundamental_form * f.inverse_sqrt_metric;
    f.convexity_matrix = f.second_fundamental_form;
    f.principal_curvatures = ascending_eigenvalues(f.curvature_matrix);
    f.normal_radial_component = phi / w;
    f.support_function = phi * phi / w;
    return f;
}

FrameQuantities frame_from_u(const SpaceFormModel& model, const ScalarJet2& jet_in) {
    const ScalarJet2 jet = validated(jet_in);
    model.zeta(jet.value);  // range check on u
    return assemble_u_form(jet.value * jet.value + model.curvature_sign(), jet);
}

FrameQuantities frame_from_v(const SpaceFormModel& model, const ScalarJet2& jet_in) {
    const ScalarJet2 jet = validated(jet_in);
    const int n = jet.dim();
    const Deriv2 et = model.eta(jet.value);
    const double eta = et.value, deta = et.d1;
    const Eigen::VectorXd& dv = jet.gradient;
    const double q = dv.squaredNorm();
    const double w = std::sqrt(1.0 + q);
    check_denominator(deta, "eta'");

    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd outer = dv * dv.transpose();
    const Eigen::MatrixXd gamma_tilde = id - outer / (w * (1.0 + w));
    const Eigen::MatrixXd convexity = eta * id + deta * (gamma_tilde * jet.hessian * gamma_tilde);

    FrameQuantities f;
    f.metric = (id + outer) / (deta * deta);
    f.inverse_metric = deta * deta * (id - outer / (w * w));
    f.sqrt_metric = (id + outer / (1.0 + w)) / deta;
    f.inverse_sqrt_metric = deta * gamma_tilde;
    f.second_fundamental_form = (deta * jet.hessian + eta * outer + eta * id) / (deta * deta * w);
    f.curvature_matrix = convexity / w;
    f.convexity_matrix = convexity;
    f.principal_curvatures = ascending_eigenvalues(f.curvature_matrix);
    f.normal_radial_component = 1.0 / w;
    f.support_function = 1.0 / (deta * w);
    return f;
}

FrameQuantities frame_deformed(double t, const ScalarJet2& jet_in) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainBoundError("t must lie in [0, 1]");
    const ScalarJet2 jet = validated(jet_in);
    if (!(jet.value > 0.0)) throw DomainBoundError("u must be positive for the deformed metric");
    return assemble_u_form(jet.value * jet.value + t * t, jet);
}

std::pair<double, double> support_and_primitive(const SpaceFormModel& model,
                                                const ScalarJet2& jet_in) {
    const ScalarJet2 jet = validated(jet_in);
    const double rho = jet.value;
    const Deriv2 ph = model.phi(rho);
    const double w = std::sqrt(ph.value * ph.value + jet.gradient.squaredNorm());
    check_denominator(w, "w");
    double primitive;
    switch (model.curvature_sign()) {
        case 0: primitive = 0.5 * rho * rho; break;
        case 1: primitive = 1.0 - std::cos(rho); break;
        default: primitive = std::cosh(rho) - 1.0; break;
    }
    return {ph.value * ph.value / w, primitive};
}

}  // namespace prescurv
