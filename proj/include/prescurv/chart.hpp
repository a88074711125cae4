#pragma once

#include <Eigen/Dense>
#include <array>

#include "prescurv/jet.hpp"

namespace prescurv {

// The solving chart is the gnomonic projection of the hemisphere onto
// the tangent plane at the domain center; the projective chart exists
// for cross-chart consistency tests only.
enum class ChartKind { Gnomonic, Projective };

// Chart metric data at one coordinate point.
struct ChartGeometry {
    Eigen::Vector2d coord;
    double mu = 1.0;
    Eigen::Matrix2d sigma;
    Eigen::Matrix2d sigma_inv;
    Eigen::Matrix2d sigma_sqrt;
    Eigen::Matrix2d sigma_inv_sqrt;
    // christoffel[k](i, j) = Gamma^k_ij
    std::array<Eigen::Matrix2d, 2> christoffel;
};

ChartGeometry gnomonic_geometry(const Eigen::Vector2d& y);
ChartGeometry projective_geometry(const Eigen::Vector2d& x);
ChartGeometry chart_geometry(ChartKind kind, const Eigen::Vector2d& coord);

// Euclidean radius of the chart image of a geodesic disk of the given
// radius about the tangency point.
double chart_disk_radius(ChartKind kind, double geodesic_radius);

// Chart coordinate <-> unit sphere point, for a chart centered at unit
// vector c with orthonormal tangent frame (t1, t2).
Eigen::Vector3d chart_to_sphere(ChartKind kind, const Eigen::Vector2d& coord,
                                const Eigen::Vector3d& c, const Eigen::Vector3d& t1,
                                const Eigen::Vector3d& t2);
Eigen::Vector2d sphere_to_chart(ChartKind kind, const Eigen::Vector3d& z,
                                const Eigen::Vector3d& c, const Eigen::Vector3d& t1,
                                const Eigen::Vector3d& t2);

// Chart-coordinate 2-jet of the working unknown: (value, gradient,
// Hessian) of u~ = mu u in Cartesian chart coordinates.
struct ChartJet6 {
    double value = 0.0;
    Eigen::Vector2d gradient = Eigen::Vector2d::Zero();
    Eigen::Matrix2d hessian = Eigen::Matrix2d::Zero();
};

// Orthonormal-frame jet of u from the chart jet of u~.  The map is
// linear in the six chart-jet slots; slot_derivatives returns its six
// partial maps (slot order: value, d1, d2, d11, d12, d22) for Jacobian
// rows.  The d12 slot feeds both off-diagonal Hessian entries.
ScalarJet2 frame_jet_from_chart(ChartKind kind, const ChartGeometry& geo, const ChartJet6& cj);

struct SlotDerivative {
    double du = 0.0;
    Eigen::Vector2d dgrad = Eigen::Vector2d::Zero();
    Eigen::Matrix2d dhess = Eigen::Matrix2d::Zero();
};

std::array<SlotDerivative, 6> frame_jet_slots(ChartKind kind, const ChartGeometry& geo);

}  // namespace prescurv
