#include "prescurv/solver.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

namespace prescurv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSubsolutionTol = -1e-10;
constexpr double kOrderingTol = -1e-8;
// Equality-case subsolutions (the candidate is the exact solution) carry
// a discrete operator deficit of truncation size; the precondition only
// hard-fails past this fraction of the operator scale, and the recorded
// deficit widens the ordering check by the comparison-principle slack.
constexpr double kDeficitFraction = 0.05;
constexpr double kMarginTol = 1e-12;
constexpr int kEasyIterations = 6;

std::string node_label(const ChartedDomain& dom, int p) {
    const GridNode& nd = dom.node(p);
    return "(ring " + std::to_string(nd.ring) + ", spoke " + std::to_string(nd.spoke) + ")";
}

// Nodal u from the working unknown u~; bitwise identical to the value
// slot of the covariant jet at the node.
double node_u(const ChartedDomain& dom, const Eigen::VectorXd& utilde, int p) {
    return utilde[p] / dom.node(p).geo.mu;
}

}  // namespace

std::pair<DiscreteField, NewtonRecord> newton_solve(const StageProblem& prob,
                                                    const DiscreteField& initial,
                                                    const NewtonConfig& cfg) {
    const ChartedDomain& dom = *prob.domain;
    DiscreteField field = initial;
    const double witness0 = convexity_witness(dom, field);
    if (!(witness0 > 0.0))
        throw ValidationError("initial field is not strictly locally convex");
    const double floor = cfg.convexity_floor * witness0;

    NewtonRecord rec;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    for (int it = 0; it <= cfg.max_iterations; ++it) {
        const AssembledSystem sys = assemble(prob, field);
        const double rnorm = sys.residual.lpNorm<Eigen::Infinity>();
        rec.residual_history.push_back(rnorm);
        rec.final_residual = rnorm;
        rec.iterations = it;
        if (!std::isfinite(rnorm)) throw NonconvergenceError("residual is not finite", field);
        if (rnorm <= cfg.tolerance) {
            rec.converged = true;
            return {std::move(field), rec};
        }
        if (it == cfg.max_iterations) break;

        lu.compute(sys.jacobian);
        if (lu.info() != Eigen::Success)
            throw NonconvergenceError("Jacobian factorization failed", field);
        const Eigen::VectorXd delta = lu.solve(-sys.residual);
        if (lu.info() != Eigen::Success || !delta.allFinite())
            throw NonconvergenceError("linear solve failed", field);

        bool accepted = false;
        double s = 1.0;
        for (int h = 0; h <= cfg.max_halvings; ++h, s *= 0.5) {
            DiscreteField trial{field.values + s * delta};
            if (!(convexity_witness(dom, trial) >= floor)) continue;
            double tnorm;
            try {
                tnorm = assemble_residual(prob, trial).lpNorm<Eigen::Infinity>();
            } catch (const ConeViolationError&) {
                continue;  // rejected step
            } catch (const DomainBoundError&) {
                continue;  // left the admissible u range
            }
            if (std::isfinite(tnorm) && tnorm <= (1.0 - cfg.armijo_slope * s) * rnorm) {
                field = std::move(trial);
                accepted = true;
                break;
            }
        }
        if (!accepted) throw NonconvergenceError("line search exhausted its halvings", field);
    }
    throw NonconvergenceError("iteration budget spent", field);
}

namespace {

// One leg of a continuation pipeline: a t-indexed family of stage
// problems sharing an operator shape and boundary data.
struct Stage {
    std::string label;
    OperatorConfig op;                          // op.t is overwritten per step when deformed
    std::function<RhsFunction(double)> rhs_at;  // right side family
    int ordering_sign = 0;  // space form whose eta orders v against the subsolution
    bool assert_margin = false;  // deformation leg: subsolution strictness per t
};

// Thrown inside a stage to reject the step and halve; never escapes.
struct StepRejected {};

double v_gap_min(const ChartedDomain& dom, int ordering_sign, const Eigen::VectorXd& utilde,
                 const Eigen::VectorXd& sub) {
    const SpaceFormModel om(ordering_sign);
    double gap = kInf;
    for (int p = 0; p < dom.node_count(); ++p) {
        const double u = node_u(dom, utilde, p);
        if (!(u > om.u_lower())) return -kInf;
        gap = std::min(gap, om.eta_inverse(u) - om.eta_inverse(node_u(dom, sub, p)));
    }
    return gap;
}

class PipelineRunner {
public:
    PipelineRunner(const SolveInput& in, const HomotopyConfig& cfg, SolveReport& report)
        : in_(in),
          cfg_(cfg),
          report_(report),
          dom_(*in.domain),
          native_(in.curvature_sign),
          field_{in.subsolution_values} {}

    DiscreteField& field() { return field_; }

    StageProblem stage_problem(const Stage& st, double t) const {
        StageProblem prob;
        prob.domain = &dom_;
        prob.spec = in_.spec;
        prob.op = st.op;
        if (prob.op.deformed) prob.op.t = t;
        prob.rhs = st.rhs_at(t);
        prob.boundary_values = in_.boundary_values;
        return prob;
    }

    // Operator-vs-right-side margin of the subsolution at stage time t.
    // Operator values are t-independent off the deformation leg and
    // cached per stage.
    double stage_margin(const Stage& st, double t) const {
        const StageProblem prob = stage_problem(st, t);
        const DiscreteField sub{in_.subsolution_values};
        const Eigen::VectorXd* gv = nullptr;
        Eigen::VectorXd fresh;
        if (st.op.deformed) {
            fresh = operator_values(prob, sub);
            gv = &fresh;
        } else {
            auto it = sub_gv_.find(st.label);
            if (it == sub_gv_.end())
                it = sub_gv_.emplace(st.label, operator_values(prob, sub)).first;
            gv = &it->second;
        }
        double m = kInf;
        for (int p : dom_.interior())
            m = std::min(m, (*gv)[p] - prob.rhs(p, node_u(dom_, sub.values, p)).first);
        return m;
    }

    [[noreturn]] void fail(const std::string& reason, double t) {
        report_.success = false;
        report_.failure_reason = reason;
        report_.failed_t = t;
        try {
            report_.monitors = estimate_monitors(dom_, native_, field_);
        } catch (const Error&) {
            // partial report without monitors
        }
        throw ContinuationError(reason, report_, field_);
    }

    TStepRecord scan(const Stage& st, double t, const DiscreteField& f) const {
        TStepRecord r;
        r.phase = st.label;
        r.t = t;
        r.convexity_min = convexity_witness(dom_, f);
        r.u_min = kInf;
        r.u_max = -kInf;
        for (int p = 0; p < dom_.node_count(); ++p) {
            const double u = node_u(dom_, f.values, p);
            r.u_min = std::min(r.u_min, u);
            r.u_max = std::max(r.u_max, u);
        }
        r.kappa_min = kInf;
        r.kappa_max = -kInf;
        for (int p : dom_.interior()) {
            const ScalarJet2 jet = covariant_jet(dom_, f, p);
            const FrameQuantities fr = st.op.deformed
                                           ? frame_deformed(t, jet)
                                           : frame_from_u(SpaceFormModel(st.op.curvature_sign), jet);
            r.kappa_min = std::min(r.kappa_min, fr.principal_curvatures.minCoeff());
            r.kappa_max = std::max(r.kappa_max, fr.principal_curvatures.maxCoeff());
            r.grad_max = std::max(r.grad_max, jet.gradient.norm());
        }
        r.v_gap_min = v_gap_min(dom_, st.ordering_sign, f.values, in_.subsolution_values);
        return r;
    }

    // Solve the stage problem at t from the current field; accept only
    // if the Newton solve converges and the ordering against the
    // subsolution survives.
    TStepRecord attempt(const Stage& st, double t) {
        const double margin = stage_margin(st, t);
        if (st.assert_margin && !(margin > kMarginTol))
            fail(st.label + ": subsolution margin " + std::to_string(margin) +
                     " not strictly positive at t = " + std::to_string(t),
                 t);
        const StageProblem prob = stage_problem(st, t);
        auto [sol, rec] = newton_solve(prob, field_, cfg_.newton);
        TStepRecord r = scan(st, t, sol);
        r.newton_iterations = rec.iterations;
        r.residual = rec.final_residual;
        r.subsolution_margin = margin;
        // A stage-right-side deficit of the subsolution (equality case
        // near the target) widens the ordering tolerance by the slack
        // it introduces into the discrete comparison argument.
        const double tol = std::min(kOrderingTol, margin);
        if (r.v_gap_min < tol) throw StepRejected{};
        field_ = std::move(sol);
        return r;
    }

    void run_stage(const Stage& st) {
        try {
            report_.steps.push_back(attempt(st, 0.0));
        } catch (const NonconvergenceError& e) {
            fail(st.label + " failed at t = 0: " + e.what(), 0.0);
        } catch (const ConeViolationError& e) {
            fail(st.label + " left the convexity cone at t = 0: " + e.what(), 0.0);
        } catch (const StepRejected&) {
            fail(st.label + ": ordering against the subsolution violated at t = 0", 0.0);
        }

        double t = 0.0;
        double dt = cfg_.t_initial;
        int streak = 0;
        while (t < 1.0) {
            const double tv = std::min(1.0, t + dt);
            bool rejected = false;
            std::string why;
            try {
                TStepRecord r = attempt(st, tv);
                const bool easy = r.newton_iterations <= kEasyIterations;
                report_.steps.push_back(std::move(r));
                t = tv;
                if (easy) {
                    if (++streak >= 2) {
                        dt = std::min(0.5, 2.0 * dt);
                        streak = 0;
                    }
                } else {
                    streak = 0;
                }
                continue;
            } catch (const NonconvergenceError& e) {
                rejected = true;
                why = e.what();
            } catch (const ConeViolationError& e) {
                rejected = true;
                why = e.what();
            } catch (const DomainBoundError& e) {
                rejected = true;
                why = e.what();
            } catch (const StepRejected&) {
                rejected = true;
                why = "ordering against the subsolution violated";
            }
            if (rejected) {
                dt *= 0.5;
                streak = 0;
                if (dt < cfg_.t_min)
                    fail(st.label + ": step size underflow near t = " + std::to_string(tv) +
                             " (" + why + ")",
                         tv);
            }
        }
    }

    // Max abs difference of the two stage residuals on the current field.
    double residual_gap(const Stage& a, double ta, const Stage& b, double tb) const {
        const Eigen::VectorXd ra = assemble_residual(stage_problem(a, ta), field_);
        const Eigen::VectorXd rb = assemble_residual(stage_problem(b, tb), field_);
        return (ra - rb).cwiseAbs().maxCoeff();
    }

private:
    const SolveInput& in_;
    const HomotopyConfig& cfg_;
    SolveReport& report_;
    const ChartedDomain& dom_;
    SpaceFormModel native_;
    DiscreteField field_;
    mutable std::map<std::string, Eigen::VectorXd> sub_gv_;
};

void check_input(const SolveInput& in) {
    if (in.domain == nullptr || in.spec == nullptr || !in.psi)
        throw ValidationError("solve input is missing its domain, curvature function, or psi");
    const int n = in.domain->node_count();
    if (in.boundary_values.size() != n || in.subsolution_values.size() != n)
        throw ValidationError("boundary or subsolution data size disagrees with the domain");
    if (in.spec->dimension != 2)
        throw ValidationError("the discrete pipeline solves surfaces: curvature function dimension must be 2");
}

// Discrete subsolution precondition: operator margin at interior nodes
// and boundary equality with the Dirichlet datum.  Writes the worst
// margin into the report; margins below tolerance but within the
// discretization allowance are noted, not fatal.
void check_subsolution(const SolveInput& in, const SpaceFormModel& native, SolveReport& report) {
    const ChartedDomain& dom = *in.domain;
    for (int p : dom.boundary()) {
        const double diff = std::abs(in.subsolution_values[p] - in.boundary_values[p]);
        if (diff > 1e-10 * std::max(1.0, std::abs(in.boundary_values[p])))
            throw ValidationError("subsolution does not match the boundary datum at node " +
                                  node_label(dom, p));
    }
    StageProblem prob;
    prob.domain = &dom;
    prob.spec = in.spec;
    prob.op = {false, native.curvature_sign(), 1.0};
    prob.rhs = in.psi;
    prob.boundary_values = in.boundary_values;
    const DiscreteField sub{in.subsolution_values};
    const Eigen::VectorXd gv = operator_values(prob, sub);
    double worst = kInf;
    int worst_node = -1;
    double scale = 0.0;
    for (int p : dom.interior()) {
        const double margin = gv[p] - in.psi(p, node_u(dom, sub.values, p)).first;
        scale = std::max(scale, std::abs(gv[p]));
        if (margin < worst) {
            worst = margin;
            worst_node = p;
        }
    }
    report.subsolution_margin_min = worst;
    if (worst < kSubsolutionTol) {
        if (worst < -kDeficitFraction * scale)
            throw ValidationError("subsolution margin " + std::to_string(worst) +
                                  " below tolerance at node " + node_label(dom, worst_node));
        report.subsolution_note = "margin " + std::to_string(worst) + " at node " +
                                  node_label(dom, worst_node) +
                                  " is within the discretization allowance";
    }
}

double interior_min(const ChartedDomain& dom, const Eigen::VectorXd& v) {
    double m = kInf;
    for (int p : dom.interior()) m = std::min(m, v[p]);
    return m;
}

}  // namespace

std::pair<DiscreteField, SolveReport> continuation_run(const SolveInput& in,
                                                       const HomotopyConfig& cfg) {
    check_input(in);
    const ChartedDomain& dom = *in.domain;
    const SpaceFormModel native(in.curvature_sign);

    SolveReport report;
    check_subsolution(in, native, report);

    PathKind path = cfg.path;
    if (path == PathKind::Auto)
        path = in.curvature_sign == 1 ? PathKind::Spherical71 : PathKind::Auto;
    if (in.curvature_sign == 1 && path != PathKind::Spherical71)
        throw ValidationError("the spherical model solves through the deformation pipeline only");
    if (in.curvature_sign != 1 && path == PathKind::Spherical71)
        throw ValidationError("the deformation pipeline applies to the spherical model only");

    PipelineRunner runner(in, cfg, report);
    const PsiFunction psi = in.psi;

    if (in.curvature_sign != 1) {
        // Discrete operator values of the subsolution drive the
        // auxiliary right side, so its t = 0 problem is solved exactly.
        StageProblem nat;
        nat.domain = &dom;
        nat.spec = in.spec;
        nat.op = {false, in.curvature_sign, 1.0};
        nat.rhs = psi;
        nat.boundary_values = in.boundary_values;
        const DiscreteField sub{in.subsolution_values};
        const Eigen::VectorXd psi_bar = operator_values(nat, sub);

        const int n = dom.node_count();
        Eigen::VectorXd coeff = Eigen::VectorXd::Zero(n);
        double ratio_min = kInf;
        for (int p : dom.interior()) {
            const double xi_bar = native.xi_of_u(node_u(dom, sub.values, p)).value;
            coeff[p] = psi_bar[p] / xi_bar;
            ratio_min = std::min(ratio_min, coeff[p]);
        }
        const double eps = cfg.epsilon.value_or(0.5 * ratio_min);
        if (!(eps > 0.0 && eps < ratio_min))
            throw ValidationError("epsilon must lie in (0, " + std::to_string(ratio_min) +
                                  "), the subsolution bound");
        report.epsilon = eps;

        const int sign = in.curvature_sign;
        Stage aux;
        aux.label = "68";
        aux.op = {false, sign, 1.0};
        aux.ordering_sign = sign;
        aux.rhs_at = [coeff, eps, sign](double t) -> RhsFunction {
            return [coeff, eps, sign, t](int node, double u) {
                const Deriv1 xi = SpaceFormModel(sign).xi_of_u(u);
                const double c = t * eps + (1.0 - t) * coeff[node];
                return std::make_pair(c * xi.value, c * xi.d1);
            };
        };

        Stage main;
        main.label = "69";
        main.op = {false, sign, 1.0};
        main.ordering_sign = sign;
        main.rhs_at = [psi, eps, sign](double t) -> RhsFunction {
            return [psi, eps, sign, t](int node, double u) {
                const Deriv1 xi = SpaceFormModel(sign).xi_of_u(u);
                const auto [pv, pdu] = psi(node, u);
                return std::make_pair(t * pv + (1.0 - t) * (eps * xi.value),
                                      t * pdu + (1.0 - t) * (eps * xi.d1));
            };
        };

        if (path == PathKind::Auxiliary68 || path == PathKind::Auto) runner.run_stage(aux);
        if (path == PathKind::Auto)
            report.endpoint_consistency = runner.residual_gap(aux, 1.0, main, 0.0);
        if (path == PathKind::Main69 || path == PathKind::Auto) runner.run_stage(main);
    } else {
        // Flat operator values of the subsolution: the deformation
        // pipeline starts in the Euclidean model.
        StageProblem flat;
        flat.domain = &dom;
        flat.spec = in.spec;
        flat.op = {false, 0, 1.0};
        flat.rhs = psi;
        flat.boundary_values = in.boundary_values;
        const DiscreteField sub{in.subsolution_values};
        const Eigen::VectorXd g0_bar = operator_values(flat, sub);

        const int n = dom.node_count();
        double psi_bar_min = kInf, psi_bar_max = -kInf;
        for (int p : dom.interior()) {
            const double pv = psi(p, node_u(dom, sub.values, p)).first;
            psi_bar_min = std::min(psi_bar_min, pv);
            psi_bar_max = std::max(psi_bar_max, pv);
        }
        const double g0_min = interior_min(dom, g0_bar);
        if (!(psi_bar_min > 0.0)) throw ValidationError("psi must be positive at the subsolution");

        const double eps_cap = std::min(g0_min, psi_bar_min);
        const double eps = cfg.epsilon.value_or(0.5 * eps_cap);
        if (!(eps > 0.0 && eps < eps_cap))
            throw ValidationError("epsilon must lie in (0, " + std::to_string(eps_cap) +
                                  "), below the flat operator and psi at the subsolution");
        double u2_max = 0.0;
        for (int p = 0; p < n; ++p) {
            const double u = node_u(dom, in.subsolution_values, p);
            u2_max = std::max(u2_max, u * u);
        }
        const double delta2 = cfg.delta2.value_or(0.25 * eps / u2_max);
        if (!(delta2 > 0.0 && delta2 * u2_max < 0.5 * eps))
            throw ValidationError("delta2 must be positive with delta2 max(u^2) < epsilon / 2");
        const double delta1 = cfg.delta1.value_or(0.05);
        if (!(delta1 > 0.0 && delta1 < 1.0))
            throw ValidationError("delta1 must lie in (0, 1)");
        int p_exp = 0;
        if (cfg.schedule_exponent) {
            p_exp = *cfg.schedule_exponent;
        } else {
            for (int q = 1; q <= 1000; ++q) {
                if (g0_min > 2.0 * std::pow(1.0 - delta1, q) * psi_bar_max) {
                    p_exp = q;
                    break;
                }
            }
        }
        if (!(p_exp >= 1 &&
              g0_min > 2.0 * std::pow(1.0 - delta1, p_exp) * psi_bar_max))
            throw ValidationError("no schedule exponent satisfies the deformation inequality");
        report.epsilon = eps;
        report.delta1 = delta1;
        report.delta2 = delta2;
        report.schedule_exponent = p_exp;

        // Flat auxiliary leg ending at the flat problem with right side
        // delta2 u^2, the deformation leg's start.
        Eigen::VectorXd coeff0 = Eigen::VectorXd::Zero(n);
        for (int p : dom.interior()) {
            const double ub = node_u(dom, sub.values, p);
            coeff0[p] = g0_bar[p] / (ub * ub);
            if (!(delta2 < coeff0[p]))
                throw ValidationError("delta2 reaches the flat subsolution bound at node " +
                                      node_label(dom, p));
        }

        Stage auxflat;
        auxflat.label = "68";
        auxflat.op = {false, 0, 1.0};
        auxflat.ordering_sign = 0;
        auxflat.rhs_at = [coeff0, delta2](double t) -> RhsFunction {
            return [coeff0, delta2, t](int node, double u) {
                const double uu = u * u;
                const double c = t * delta2 + (1.0 - t) * coeff0[node];
                return std::make_pair(c * uu, c * 2.0 * u);
            };
        };

        Stage deform;
        deform.label = "71";
        deform.op = {true, 0, 0.0};
        deform.ordering_sign = 0;
        deform.assert_margin = true;
        deform.rhs_at = [psi, eps, delta2, p_exp](double t) -> RhsFunction {
            const double bigT = std::pow(t, p_exp);
            return [psi, eps, delta2, bigT](int node, double u) {
                const double uu = u * u;
                const auto [pv, pdu] = psi(node, u);
                return std::make_pair((1.0 - bigT) * (delta2 * uu) + bigT * (pv - eps),
                                      (1.0 - bigT) * (delta2 * 2.0 * u) + bigT * pdu);
            };
        };

        // Final leg removes the eps offset in the spherical model.
        Stage relax;
        relax.label = "eps";
        relax.op = {false, 1, 1.0};
        relax.ordering_sign = 1;
        relax.rhs_at = [psi, eps](double t) -> RhsFunction {
            return [psi, eps, t](int node, double u) {
                const auto [pv, pdu] = psi(node, u);
                return std::make_pair(pv - (1.0 - t) * eps, pdu);
            };
        };

        runner.run_stage(auxflat);
        runner.run_stage(deform);
        runner.run_stage(relax);
    }

    report.monitors = estimate_monitors(dom, native, runner.field());
    report.success = true;
    return {std::move(runner.field()), std::move(report)};
}

SubsolutionReport verify_subsolution(const ChartedDomain& dom, const SpaceFormModel& model,
                                     const CurvatureFunctionSpec& spec, const PsiFunction& psi,
                                     const DiscreteField& field, double margin_tolerance) {
    SubsolutionReport rep;
    rep.margins = Eigen::VectorXd::Zero(dom.node_count());
    rep.convexity_min = convexity_witness(dom, field);
    bool clean = true;
    rep.min_margin = kInf;
    for (int p : dom.interior()) {
        double margin;
        try {
            const ScalarJet2 jet = covariant_jet(dom, field, p);
            margin = evaluate_G(model, spec, jet) - psi(p, jet.value).first;
        } catch (const Error& e) {
            clean = false;
            if (rep.note.empty()) rep.note = node_label(dom, p) + ": " + e.what();
            rep.margins[p] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        rep.margins[p] = margin;
        if (margin < rep.min_margin) {
            rep.min_margin = margin;
            rep.worst_node = p;
        }
    }
    rep.verdict = clean && rep.convexity_min > 0.0 && rep.min_margin >= margin_tolerance;
    return rep;
}

MonitorReport estimate_monitors(const ChartedDomain& dom, const SpaceFormModel& model,
                                const DiscreteField& field) {
    if (!(convexity_witness(dom, field) > 0.0))
        throw ValidationError("monitors need a strictly locally convex field");
    MonitorReport rep;
    rep.u_min = kInf;
    rep.u_max = -kInf;
    for (int p = 0; p < dom.node_count(); ++p) {
        const double u = node_u(dom, field.values, p);
        rep.u_min = std::min(rep.u_min, u);
        rep.u_max = std::max(rep.u_max, u);
    }
    if (!(rep.u_min > model.u_lower()))
        throw ValidationError("field leaves the admissible u range");

    rep.kappa_min = kInf;
    rep.kappa_max = -kInf;
    rep.tau_min = kInf;
    const int boundary_ring = dom.n_r() - 2;
    for (int p : dom.interior()) {
        const ScalarJet2 jet = covariant_jet(dom, field, p);
        const FrameQuantities fr = frame_from_u(model, jet);
        rep.kappa_min = std::min(rep.kappa_min, fr.principal_curvatures.minCoeff());
        rep.kappa_max = std::max(rep.kappa_max, fr.principal_curvatures.maxCoeff());
        rep.tau_min = std::min(rep.tau_min, fr.support_function);
        rep.c1 = std::max(rep.c1, jet.gradient.norm());
        if (dom.node(p).ring == boundary_ring)
            rep.boundary_hessian_max = std::max(rep.boundary_hessian_max, jet.hessian.norm());
    }
    rep.c0 = std::max(rep.u_max, 1.0 / (rep.u_min - model.u_lower()));
    rep.k0 = std::max(rep.kappa_max, 1.0 / rep.kappa_min);
    return rep;
}

}  // namespace prescurv
