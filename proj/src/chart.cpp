#include "prescurv/chart.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "prescurv/errors.hpp"

namespace prescurv {

namespace {

void fill_sqrts(ChartGeometry& g) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(g.sigma);
    const Eigen::Vector2d ev = es.eigenvalues();
    if (!(ev.minCoeff() > 0.0)) throw HemisphereError("chart metric degenerate at this point");
    const Eigen::Matrix2d v = es.eigenvectors();
    g.sigma_sqrt = v * ev.cwiseSqrt().asDiagonal() * v.transpose();
    g.sigma_inv_sqrt = v * ev.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
}

}  // namespace

ChartGeometry gnomonic_geometry(const Eigen::Vector2d& y) {
    ChartGeometry g;
    g.coord = y;
    const double mu2 = 1.0 + y.squaredNorm();
    g.mu = std::sqrt(mu2);
    const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
    g.sigma = (id - y * y.transpose() / mu2) / mu2;
    g.sigma_inv = mu2 * (id + y * y.transpose());
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                g.christoffel[k](i, j) =
                    -((i == k ? y[j] : 0.0) + (j == k ? y[i] : 0.0)) / mu2;
    fill_sqrts(g);
    return g;
}

ChartGeometry projective_geometry(const Eigen::Vector2d& x) {
    ChartGeometry g;
    g.coord = x;
    g.mu = 4.0 + x.squaredNorm();
    const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
    g.sigma = (16.0 / (g.mu * g.mu)) * id;
    g.sigma_inv = (g.mu * g.mu / 16.0) * id;
    g.sigma_sqrt = (4.0 / g.mu) * id;
    g.sigma_inv_sqrt = (g.mu / 4.0) * id;
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                g.christoffel[k](i, j) = -2.0 / g.mu *
                                         ((i == k ? x[j] : 0.0) + (j == k ? x[i] : 0.0) -
                                          (i == j ? x[k] : 0.0));
    return g;
}

ChartGeometry chart_geometry(ChartKind kind, const Eigen::Vector2d& coord) {
    return kind == ChartKind::Gnomonic ? gnomonic_geometry(coord) : projective_geometry(coord);
}

double chart_disk_radius(ChartKind kind, double geodesic_radius) {
    if (!(geodesic_radius > 0.0 && geodesic_radius < std::asin(1.0)))
        throw HemisphereError("geodesic radius must lie in (0, pi/2)");
    return kind == ChartKind::Gnomonic ? std::tan(geodesic_radius)
                                       : 2.0 * std::tan(0.5 * geodesic_radius);
}

Eigen::Vector3d chart_to_sphere(ChartKind kind, const Eigen::Vector2d& coord,
                                const Eigen::Vector3d& c, const Eigen::Vector3d& t1,
                                const Eigen::Vector3d& t2) {
    if (kind == ChartKind::Gnomonic) {
        const double mu = std::sqrt(1.0 + coord.squaredNorm());
        return (c + coord[0] * t1 + coord[1] * t2) / mu;
    }
    const double mu = 4.0 + coord.squaredNorm();
    return (4.0 * (coord[0] * t1 + coord[1] * t2) - (coord.squaredNorm() - 4.0) * c) / mu;
}

Eigen::Vector2d sphere_to_chart(ChartKind kind, const Eigen::Vector3d& z,
                                const Eigen::Vector3d& c, const Eigen::Vector3d& t1,
                                const Eigen::Vector3d& t2) {
    const double a = z.dot(c);
    if (kind == ChartKind::Gnomonic) {
        if (!(a > 0.0)) throw HemisphereError("point outside the chart hemisphere");
        return {z.dot(t1) / a, z.dot(t2) / a};
    }
    if (!(a > -1.0)) throw HemisphereError("point antipodal to the chart center");
    return {2.0 * z.dot(t1) / (1.0 + a), 2.0 * z.dot(t2) / (1.0 + a)};
}

ScalarJet2 frame_jet_from_chart(ChartKind kind, const ChartGeometry& geo, const ChartJet6& cj) {
    const double mu = geo.mu;
    ScalarJet2 jet;
    jet.value = cj.value / mu;

    Eigen::Vector2d dmu;
    if (kind == ChartKind::Gnomonic)
        dmu = geo.coord / mu;
    else
        dmu = 2.0 * geo.coord;
    const Eigen::Vector2d du_chart = cj.gradient / mu - cj.value * dmu / (mu * mu);
    jet.gradient = geo.sigma_inv_sqrt * du_chart;

    Eigen::Matrix2d m_chart = cj.hessian / mu;
    if (kind == ChartKind::Projective)
        m_chart += (2.0 / (mu * mu)) * (cj.value - geo.coord.dot(cj.gradient)) *
                   Eigen::Matrix2d::Identity();
    jet.hessian = geo.sigma_inv_sqrt * m_chart * geo.sigma_inv_sqrt -
                  jet.value * Eigen::Matrix2d::Identity();
    return jet;
}

std::array<SlotDerivative, 6> frame_jet_slots(ChartKind kind, const ChartGeometry& geo) {
    const double mu = geo.mu;
    const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
    const Eigen::Matrix2d& s = geo.sigma_inv_sqrt;
    const Eigen::Vector2d dmu =
        kind == ChartKind::Gnomonic ? Eigen::Vector2d(geo.coord / mu)
                                    : Eigen::Vector2d(2.0 * geo.coord);

    std::array<SlotDerivative, 6> slots;
    slots[0].du = 1.0 / mu;
    slots[0].dgrad = s * (-dmu / (mu * mu));
    slots[0].dhess = -(1.0 / mu) * id;
    for (int i = 0; i < 2; ++i) {
        Eigen::Vector2d e = Eigen::Vector2d::Zero();
        e[i] = 1.0;
        slots[1 + i].dgrad = s * (e / mu);
    }
    Eigen::Matrix2d basis[3];
    basis[0] << 1, 0, 0, 0;
    basis[1] << 0, 1, 1, 0;
    basis[2] << 0, 0, 0, 1;
    for (int k = 0; k < 3; ++k) slots[3 + k].dhess = s * (basis[k] / mu) * s;

    if (kind == ChartKind::Projective) {
        const Eigen::Matrix2d sigma_inv_scaled = (2.0 / (mu * mu)) * geo.sigma_inv;
        slots[0].dhess += sigma_inv_scaled;
        slots[1].dhess -= geo.coord[0] * sigma_inv_scaled;
        slots[2].dhess -= geo.coord[1] * sigma_inv_scaled;
    }
    return slots;
}

}  // namespace prescurv
