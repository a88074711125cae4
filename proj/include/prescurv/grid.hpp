#pragma once

#include <vector>

#include "prescurv/chart.hpp"

namespace prescurv {

struct GridNode {
    int ring = 0;      // radial index m
    int spoke = 0;     // angular index l
    double r = 0.0;    // polar radius in chart coordinates
    double theta = 0.0;
    ChartGeometry geo;
    Eigen::Vector3d sphere_point = Eigen::Vector3d::Zero();
    bool boundary = false;
};

// Per-interior-node linear map from nodal u~ values to the six
// chart-jet slots (value, d1, d2, d11, d12, d22).
struct JetStencil {
    std::vector<int> nodes;
    Eigen::MatrixXd weights;  // 6 x nodes.size()
    int center_col = 0;       // column of the node the stencil belongs to
};

// A geodesic disk on the unit sphere with a boundary-fitted polar
// lattice in chart coordinates.  Rings sit at r_m = (m + 1/2) h_r
// (cell-centered: no node at the pole), the outermost ring on the
// boundary circle carrying Dirichlet rows.
class ChartedDomain {
public:
    ChartedDomain(ChartKind kind, const Eigen::Vector3d& center, double geodesic_radius,
                  int n_r, int n_theta);

    ChartKind kind() const { return kind_; }
    const Eigen::Vector3d& center() const { return center_; }
    const Eigen::Vector3d& tangent1() const { return t1_; }
    const Eigen::Vector3d& tangent2() const { return t2_; }
    double geodesic_radius() const { return geodesic_radius_; }
    double chart_radius() const { return chart_radius_; }
    int n_r() const { return n_r_; }
    int n_theta() const { return n_theta_; }
    double h_r() const { return h_r_; }
    double h_theta() const { return h_theta_; }

    int node_count() const { return static_cast<int>(nodes_.size()); }
    int index(int ring, int spoke) const;
    const GridNode& node(int i) const { return nodes_[i]; }
    const std::vector<int>& interior() const { return interior_; }
    const std::vector<int>& boundary() const { return boundary_; }
    const JetStencil& stencil(int i) const;

private:
    ChartKind kind_;
    Eigen::Vector3d center_, t1_, t2_;
    double geodesic_radius_, chart_radius_, h_r_, h_theta_;
    int n_r_, n_theta_;
    std::vector<GridNode> nodes_;
    std::vector<int> interior_, boundary_;
    std::vector<JetStencil> stencils_;  // empty weights on boundary nodes

    void build_stencils();
    JetStencil make_stencil(const GridNode& nd) const;
};

ChartedDomain build_domain(const Eigen::Vector3d& center, double geodesic_radius, int n_r,
                           int n_theta, ChartKind kind = ChartKind::Gnomonic);

// Nodal values of u~ = mu u over a domain's nodes.
struct DiscreteField {
    Eigen::VectorXd values;
};

ChartJet6 chart_jet(const ChartedDomain& dom, const DiscreteField& f, int node);
ScalarJet2 covariant_jet(const ChartedDomain& dom, const DiscreteField& f, int node);

// Smallest eigenvalue of the chart Hessian of u~ over interior nodes:
// positive exactly when the field is strictly locally convex.
double convexity_witness(const ChartedDomain& dom, const DiscreteField& f);

}  // namespace prescurv
