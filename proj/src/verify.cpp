#include "prescurv/verify.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "prescurv/chart.hpp"
#include "prescurv/expr.hpp"
#include "prescurv/operator_g.hpp"

namespace prescurv {

JetSampler::JetSampler(std::uint64_t seed) : rng_(seed) {}

double JetSampler::uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
}

ScalarJet2 JetSampler::admissible(const SpaceFormModel& model, int n) {
    ScalarJet2 jet;
    jet.value = model.u_lower() + uniform(0.3, 2.5);
    jet.gradient.resize(n);
    for (int i = 0; i < n; ++i) jet.gradient[i] = uniform(-0.8, 0.8);
    Eigen::MatrixXd s(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) s(i, j) = s(j, i) = uniform(-1.0, 1.0);
    // Shift so the convexity matrix hess + u I has a definite margin.
    const double margin = uniform(0.05, 0.5);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s + jet.value * Eigen::MatrixXd::Identity(n, n));
    jet.hessian = s + (margin - es.eigenvalues()[0]) * Eigen::MatrixXd::Identity(n, n);
    return jet;
}

namespace {

constexpr int kSigns[] = {-1, 0, 1};

std::string sign_tag(int k) {
    return "K=" + std::to_string(k);
}

// Relative deviation against the larger magnitude with a unit-scale floor.
double rel_err(double got, double want, double floor_scale) {
    return std::abs(got - want) / std::max({std::abs(got), std::abs(want), floor_scale});
}

ScalarJet2 rho_jet_of(const SpaceFormModel& model, const ScalarJet2& jet_u) {
    return transform_jet(model.zeta(jet_u.value), jet_u);
}

ScalarJet2 v_jet_of(const SpaceFormModel& model, const ScalarJet2& jet_u) {
    const double v = model.eta_inverse(jet_u.value);
    return transform_jet(invert_map(model.eta(v), v), jet_u);
}

}  // namespace

SuiteResult suite_formulation_equivalence(std::uint64_t seed) {
    SuiteResult res{"formulation-equivalence", true, 0.0, 1e-10, ""};
    JetSampler sampler(seed);
    for (int k : kSigns) {
        const SpaceFormModel model(k);
        for (int n : {2, 3}) {
            for (int i = 0; i < 100; ++i) {
                const ScalarJet2 jet_u = sampler.admissible(model, n);
                const Eigen::VectorXd ku = frame_from_u(model, jet_u).principal_curvatures;
                const Eigen::VectorXd kr =
                    frame_from_rho(model, rho_jet_of(model, jet_u)).principal_curvatures;
                const Eigen::VectorXd kv =
                    frame_from_v(model, v_jet_of(model, jet_u)).principal_curvatures;
                for (int j = 0; j < n; ++j) {
                    const double d = std::max(rel_err(kr[j], ku[j], 1e-30),
                                              rel_err(kv[j], ku[j], 1e-30));
                    if (d > res.worst) {
                        res.worst = d;
                        res.detail = sign_tag(k) + " n=" + std::to_string(n);
                    }
                }
            }
        }
    }
    res.passed = res.worst <= res.tolerance;
    return res;
}

SuiteResult suite_sqrt_metric(std::uint64_t seed) {
    SuiteResult res{"square-root-metric", true, 0.0, 1e-10, ""};
    JetSampler sampler(seed);
    for (int k : kSigns) {
        const SpaceFormModel model(k);
        for (int n : {2, 3}) {
            for (int i = 0; i < 50; ++i) {
                const ScalarJet2 jet_u = sampler.admissible(model, n);
                const FrameQuantities frames[] = {
                    frame_from_u(model, jet_u),
                    frame_from_rho(model, rho_jet_of(model, jet_u)),
                    frame_from_v(model, v_jet_of(model, jet_u)),
                };
                const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
                for (const FrameQuantities& fr : frames) {
                    const double d1 = (fr.sqrt_metric * fr.sqrt_metric - fr.metric).norm() /
                                      fr.metric.norm();
                    const double d2 =
                        (fr.inverse_sqrt_metric * fr.inverse_sqrt_metric - fr.inverse_metric)
                            .norm() /
                        fr.inverse_metric.norm();
                    const double d3 = (fr.sqrt_metric * fr.inverse_sqrt_metric - id).norm();
                    const double d = std::max({d1, d2, d3});
                    if (d > res.worst) {
                        res.worst = d;
                        res.detail = sign_tag(k) + " n=" + std::to_string(n);
                    }
                }
            }
        }
    }
    res.passed = res.worst <= res.tolerance;
    return res;
}

SuiteResult suite_linearization_fd(std::uint64_t seed) {
    SuiteResult res{"linearization-fd", true, 0.0, 1e-6, ""};
    JetSampler sampler(seed);
    const int n = 3;
    const char* texts[] = {"sigma(1)", "sigma(2)^(1/2)", "sigma(3)^(1/3)",
                           "sigma(2)/sigma(1)"};
    const double h = 1e-5;
    for (int k : kSigns) {
        const SpaceFormModel model(k);
        for (const char* text : texts) {
            const CurvatureFunctionSpec spec = parse_curvature_function(text, n);
            for (int i = 0; i < 25; ++i) {
                const ScalarJet2 jet = sampler.admissible(model, n);
                const LinearizationCoeffs lin = linearize_G(model, spec, jet);

                ScalarJet2 dir;
                dir.value = sampler.uniform(-1.0, 1.0);
                dir.gradient.resize(n);
                for (int j = 0; j < n; ++j) dir.gradient[j] = sampler.uniform(-1.0, 1.0);
                dir.hessian.resize(n, n);
                for (int r = 0; r < n; ++r)
                    for (int c = 0; c <= r; ++c)
                        dir.hessian(r, c) = dir.hessian(c, r) = sampler.uniform(-1.0, 1.0);

                auto shifted = [&](double s) {
                    ScalarJet2 out;
                    out.value = jet.value + s * dir.value;
                    out.gradient = jet.gradient + s * dir.gradient;
                    out.hessian = jet.hessian + s * dir.hessian;
                    return out;
                };
                const double fd =
                    (evaluate_G(model, spec, shifted(h)) - evaluate_G(model, spec, shifted(-h))) /
                    (2.0 * h);
                const double pred = lin.second_order.cwiseProduct(dir.hessian).sum() +
                                    lin.first_order.dot(dir.gradient) +
                                    lin.zeroth_order * dir.value;
                const double d = rel_err(fd, pred, 1e-2);
                if (d > res.worst) {
                    res.worst = d;
                    res.detail = sign_tag(k) + " f=" + text;
                }
            }
        }
    }
    res.passed = res.worst <= res.tolerance;
    return res;
}

SuiteResult suite_deformation_monotonicity(std::uint64_t seed) {
    SuiteResult res{"deformation-monotonicity", true, 0.0, 1e-6, ""};
    JetSampler sampler(seed);
    const SpaceFormModel flat(0), sphere(1);
    double min_derivative = std::numeric_limits<double>::infinity();
    double endpoint_worst = 0.0;
    const double h = 1e-5;
    for (int n : {2, 3}) {
        const CurvatureFunctionSpec spec =
            parse_curvature_function(n == 2 ? "sigma(2)^(1/2)" : "sigma(3)^(1/3)", n);
        for (int i = 0; i < 50; ++i) {
            const ScalarJet2 jet = sampler.admissible(sphere, n);
            for (int j = 0; j <= 10; ++j) {
                const double t = 0.1 * j;
                const double v = dG_t_dt(t, spec, jet);
                min_derivative = std::min(min_derivative, v);
                if (t >= 0.1 && t <= 0.9) {
                    const double fd = (evaluate_G_t(t + h, spec, jet) -
                                       evaluate_G_t(t - h, spec, jet)) /
                                      (2.0 * h);
                    const double d = rel_err(fd, v, 1e-2);
                    if (d > res.worst) {
                        res.worst = d;
                        res.detail = "n=" + std::to_string(n) + " t=" + expr::format_double(t);
                    }
                }
            }
            const double g0 = evaluate_G(flat, spec, jet);
            const double g1 = evaluate_G(sphere, spec, jet);
            endpoint_worst = std::max(
                endpoint_worst,
                std::max(std::abs(evaluate_G_t(0.0, spec, jet) - g0) / std::max(1.0, std::abs(g0)),
                         std::abs(evaluate_G_t(1.0, spec, jet) - g1) /
                             std::max(1.0, std::abs(g1))));
        }
    }
    const bool monotone = min_derivative >= -1e-10;
    const bool endpoints = endpoint_worst <= 1e-12;
    res.passed = res.worst <= res.tolerance && monotone && endpoints;
    res.detail += (res.detail.empty() ? "" : "; ") +
                  std::string("min dG/dt = ") + expr::format_double(min_derivative) +
                  ", endpoint residual = " + expr::format_double(endpoint_worst);
    return res;
}

SuiteResult suite_chart_identity(std::uint64_t seed) {
    SuiteResult res{"chart-identity", true, 0.0, 1e-12, ""};
    JetSampler sampler(seed);
    const Eigen::Vector3d c(0.0, 0.0, 1.0), t1(1.0, 0.0, 0.0), t2(0.0, 1.0, 0.0);
    double sqrt_worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Eigen::Vector2d y(sampler.uniform(-1.2, 1.2), sampler.uniform(-1.2, 1.2));
        Eigen::Vector3d b;
        for (int j = 0; j < 3; ++j) b[j] = sampler.uniform(-1.0, 1.0);
        const double a = 2.0 + b.norm();  // u = a + b . z stays positive

        const ChartGeometry gg = gnomonic_geometry(y);
        const Eigen::Vector3d z = chart_to_sphere(ChartKind::Gnomonic, y, c, t1, t2);
        const Eigen::Vector2d x = sphere_to_chart(ChartKind::Projective, z, c, t1, t2);
        const ChartGeometry gp = projective_geometry(x);

        // Analytic chart jets of u~ = mu u for the sphere-linear test
        // function u(z) = a + b . z.
        ChartJet6 cg;
        cg.value = a * gg.mu + b.dot(c) + y[0] * b.dot(t1) + y[1] * b.dot(t2);
        cg.gradient = a * y / gg.mu + Eigen::Vector2d(b.dot(t1), b.dot(t2));
        cg.hessian = a * (Eigen::Matrix2d::Identity() / gg.mu -
                          y * y.transpose() / (gg.mu * gg.mu * gg.mu));

        ChartJet6 cp;
        const double x2 = x.squaredNorm();
        cp.value = a * gp.mu + b.dot(c) * (4.0 - x2) + 4.0 * x[0] * b.dot(t1) +
                   4.0 * x[1] * b.dot(t2);
        cp.gradient = 2.0 * (a - b.dot(c)) * x + 4.0 * Eigen::Vector2d(b.dot(t1), b.dot(t2));
        cp.hessian = 2.0 * (a - b.dot(c)) * Eigen::Matrix2d::Identity();

        const ScalarJet2 jg = frame_jet_from_chart(ChartKind::Gnomonic, gg, cg);
        const ScalarJet2 jp = frame_jet_from_chart(ChartKind::Projective, gp, cp);

        // Frame jets differ by a tangent-plane rotation, so compare the
        // rotation invariants.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eg(jg.hessian), ep(jp.hessian);
        const double d = std::max(
            {rel_err(jp.value, jg.value, 1.0),
             rel_err(jp.gradient.norm(), jg.gradient.norm(), 1.0),
             rel_err(ep.eigenvalues()[0], eg.eigenvalues()[0], 1.0),
             rel_err(ep.eigenvalues()[1], eg.eigenvalues()[1], 1.0)});
        if (d > res.worst) {
            res.worst = d;
            res.detail = "|y| = " + expr::format_double(y.norm());
        }

        for (const ChartGeometry* g : {&gg, &gp}) {
            sqrt_worst = std::max(
                sqrt_worst,
                (g->sigma_sqrt * g->sigma_sqrt - g->sigma).cwiseAbs().maxCoeff());
        }
    }
    res.passed = res.worst <= res.tolerance && sqrt_worst <= 1e-13;
    res.detail += (res.detail.empty() ? "" : "; ") +
                  std::string("sqrt identity residual = ") + expr::format_double(sqrt_worst);
    return res;
}

std::vector<SuiteResult> run_verification(std::uint64_t seed) {
    return {suite_formulation_equivalence(seed), suite_sqrt_metric(seed + 1),
            suite_linearization_fd(seed + 2), suite_deformation_monotonicity(seed + 3),
            suite_chart_identity(seed + 4)};
}

}  // namespace prescurv
