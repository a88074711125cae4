#include "prescurv/assembly.hpp"

#include <string>
#include <vector>

#include "prescurv/errors.hpp"

namespace prescurv {

namespace {

LinearizationCoeffs linearize(const StageProblem& prob, const ScalarJet2& jet) {
    if (prob.op.deformed) return linearize_G_t(prob.op.t, *prob.spec, jet);
    return linearize_G(SpaceFormModel(prob.op.curvature_sign), *prob.spec, jet);
}

double evaluate(const StageProblem& prob, const ScalarJet2& jet) {
    if (prob.op.deformed) return evaluate_G_t(prob.op.t, *prob.spec, jet);
    return evaluate_G(SpaceFormModel(prob.op.curvature_sign), *prob.spec, jet);
}

[[noreturn]] void rethrow_at(const GridNode& nd, const ConeViolationError& e) {
    throw ConeViolationError("node (ring " + std::to_string(nd.ring) + ", spoke " +
                             std::to_string(nd.spoke) + "): " + e.what());
}

void check_sizes(const StageProblem& prob, const DiscreteField& field) {
    if (prob.domain == nullptr || prob.spec == nullptr)
        throw ValidationError("stage problem is missing its domain or curvature function");
    const int n = prob.domain->node_count();
    if (field.values.size() != n) throw ValidationError("field size disagrees with the domain");
    if (prob.boundary_values.size() != n)
        throw ValidationError("boundary data size disagrees with the domain");
}

}  // namespace

AssembledSystem assemble(const StageProblem& prob, const DiscreteField& field) {
    check_sizes(prob, field);
    const ChartedDomain& dom = *prob.domain;
    const int n = dom.node_count();

    AssembledSystem sys;
    sys.residual.resize(n);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<size_t>(n) * 24);

    for (int p : dom.boundary()) {
        sys.residual[p] = field.values[p] - prob.boundary_values[p];
        trips.emplace_back(p, p, 1.0);
    }

    for (int p : dom.interior()) {
        const GridNode& nd = dom.node(p);
        const ScalarJet2 jet = covariant_jet(dom, field, p);
        LinearizationCoeffs lin;
        try {
            lin = linearize(prob, jet);
        } catch (const ConeViolationError& e) {
            rethrow_at(nd, e);
        }
        const auto [rhs_value, rhs_du] = prob.rhs(p, jet.value);
        sys.residual[p] = lin.operator_value - rhs_value;

        // Chain rule through the six chart-jet slots: the operator sees
        // the frame jet, the stencil sees nodal u~ values.
        const std::array<SlotDerivative, 6> slots = frame_jet_slots(dom.kind(), nd.geo);
        Eigen::Matrix<double, 1, 6> d;
        for (int s = 0; s < 6; ++s) {
            d[s] = lin.second_order.cwiseProduct(slots[s].dhess).sum() +
                   lin.first_order.dot(slots[s].dgrad) +
                   (lin.zeroth_order - rhs_du) * slots[s].du;
        }
        const JetStencil& st = dom.stencil(p);
        const Eigen::RowVectorXd row = d * st.weights;
        for (size_t k = 0; k < st.nodes.size(); ++k)
            trips.emplace_back(p, st.nodes[k], row[static_cast<int>(k)]);
    }

    sys.jacobian.resize(n, n);
    sys.jacobian.setFromTriplets(trips.begin(), trips.end());
    return sys;
}

Eigen::VectorXd assemble_residual(const StageProblem& prob, const DiscreteField& field) {
    check_sizes(prob, field);
    const ChartedDomain& dom = *prob.domain;
    Eigen::VectorXd res(dom.node_count());
    for (int p : dom.boundary()) res[p] = field.values[p] - prob.boundary_values[p];
    for (int p : dom.interior()) {
        const ScalarJet2 jet = covariant_jet(dom, field, p);
        double gv;
        try {
            gv = evaluate(prob, jet);
        } catch (const ConeViolationError& e) {
            rethrow_at(dom.node(p), e);
        }
        res[p] = gv - prob.rhs(p, jet.value).first;
    }
    return res;
}

Eigen::VectorXd operator_values(const StageProblem& prob, const DiscreteField& field) {
    if (prob.domain == nullptr || prob.spec == nullptr)
        throw ValidationError("stage problem is missing its domain or curvature function");
    const ChartedDomain& dom = *prob.domain;
    Eigen::VectorXd vals = Eigen::VectorXd::Zero(dom.node_count());
    for (int p : dom.interior()) {
        const ScalarJet2 jet = covariant_jet(dom, field, p);
        try {
            vals[p] = evaluate(prob, jet);
        } catch (const ConeViolationError& e) {
            rethrow_at(dom.node(p), e);
        }
    }
    return vals;
}

}  // namespace prescurv
