#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "prescurv/assembly.hpp"

using namespace prescurv;

namespace {

const Eigen::Vector3d kNorth(0.0, 0.0, 1.0);

// A smooth strictly locally convex working field near the unit graph.
DiscreteField convex_field(const ChartedDomain& dom) {
    DiscreteField f;
    f.values.resize(dom.node_count());
    for (int i = 0; i < dom.node_count(); ++i) {
        const Eigen::Vector2d y = dom.node(i).geo.coord;
        f.values[i] = dom.node(i).geo.mu * (1.0 + 0.05 * y[0] + 0.03 * y.squaredNorm());
    }
    return f;
}

StageProblem flat_stage(const ChartedDomain& dom, const CurvatureFunctionSpec& spec,
                        const DiscreteField& bc_source) {
    StageProblem prob;
    prob.domain = &dom;
    prob.spec = &spec;
    prob.op.deformed = false;
    prob.op.curvature_sign = 0;
    prob.rhs = [](int, double u) {
        return std::make_pair(0.9 + 0.02 * u * u, 0.04 * u);
    };
    prob.boundary_values = bc_source.values;
    return prob;
}

}  // namespace

TEST_CASE("boundary rows are the Dirichlet identity") {
    const ChartedDomain dom = build_domain(kNorth, 0.6, 9, 16);
    const auto spec = parse_curvature_function("sigma(2)^(1/2)", 2);
    const DiscreteField field = convex_field(dom);
    DiscreteField bc = field;
    for (int p : dom.boundary()) bc.values[p] += 0.125;  // nonzero boundary residual

    const StageProblem prob = flat_stage(dom, spec, bc);
    const AssembledSystem sys = assemble(prob, field);
    for (int p : dom.boundary()) {
        CHECK(sys.residual[p] == field.values[p] - bc.values[p]);
        const Eigen::RowVectorXd row = sys.jacobian.row(p);
        CHECK(row[p] == 1.0);
        CHECK(row.cwiseAbs().sum() == 1.0);
    }
}

TEST_CASE("interior residual is operator minus right side") {
    const ChartedDomain dom = build_domain(kNorth, 0.6, 9, 16);
    const auto spec = parse_curvature_function("sigma(2)^(1/2)", 2);
    const DiscreteField field = convex_field(dom);
    const StageProblem prob = flat_stage(dom, spec, field);

    const Eigen::VectorXd residual = assemble_residual(prob, field);
    const Eigen::VectorXd gvals = operator_values(prob, field);
    for (int p : dom.interior()) {
        const double u = field.values[p] / dom.node(p).geo.mu;
        CHECK(residual[p] ==
              doctest::Approx(gvals[p] - prob.rhs(p, u).first).epsilon(1e-14));
    }
    for (int p : dom.boundary()) CHECK(gvals[p] == 0.0);

    // the full assembly reports the same residual
    const AssembledSystem sys = assemble(prob, field);
    CHECK((sys.residual - residual).norm() == 0.0);
}

TEST_CASE("jacobian columns match finite differences") {
    const ChartedDomain dom = build_domain(kNorth, 0.6, 9, 16);
    const auto spec = parse_curvature_function("sigma(2)^(1/2)", 2);
    const DiscreteField field = convex_field(dom);
    const StageProblem prob = flat_stage(dom, spec, field);
    const AssembledSystem sys = assemble(prob, field);

    std::mt19937_64 rng(777);
    std::uniform_int_distribution<int> pick(0, dom.node_count() - 1);
    // small enough that the cubed pole-row weights do not surface in the
    // central-difference truncation
    const double h = 1e-7;
    for (int rep = 0; rep < 12; ++rep) {
        const int j = pick(rng);
        DiscreteField plus = field, minus = field;
        plus.values[j] += h;
        minus.values[j] -= h;
        const Eigen::VectorXd fd =
            (assemble_residual(prob, plus) - assemble_residual(prob, minus)) / (2.0 * h);
        const Eigen::VectorXd col = sys.jacobian.col(j);
        CHECK((col - fd).norm() < 1e-6 * std::max(1.0, fd.norm()));
    }
}

TEST_CASE("deformed assembly at t = 0 agrees with the flat operator") {
    const ChartedDomain dom = build_domain(kNorth, 0.6, 9, 16);
    const auto spec = parse_curvature_function("sigma(2)^(1/2)", 2);
    const DiscreteField field = convex_field(dom);
    StageProblem flat = flat_stage(dom, spec, field);
    StageProblem deformed = flat;
    deformed.op.deformed = true;
    deformed.op.t = 0.0;
    const Eigen::VectorXd a = assemble_residual(flat, field);
    const Eigen::VectorXd b = assemble_residual(deformed, field);
    CHECK((a - b).lpNorm<Eigen::Infinity>() < 1e-13);
}

TEST_CASE("a nonconvex iterate raises a cone violation naming the node") {
    const ChartedDomain dom = build_domain(kNorth, 0.6, 9, 16);
    const auto spec = parse_curvature_function("sigma(2)^(1/2)", 2);
    DiscreteField saddle;
    saddle.values.resize(dom.node_count());
    for (int i = 0; i < dom.node_count(); ++i) {
        const Eigen::Vector2d y = dom.node(i).geo.coord;
        saddle.values[i] = 1.0 + 0.8 * (y[0] * y[0] - y[1] * y[1]);
    }
    const StageProblem prob = flat_stage(dom, spec, saddle);
    CHECK_THROWS_WITH_AS(assemble(prob, saddle), doctest::Contains("node"),
                         ConeViolationError);
}
