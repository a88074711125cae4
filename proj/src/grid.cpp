#include "prescurv/grid.hpp"

#include <array>
#include <cmath>
#include <map>

#include "prescurv/errors.hpp"

namespace prescurv {

namespace {

Eigen::Vector3d pick_tangent(const Eigen::Vector3d& c) {
    int smallest = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(c[i]) < std::abs(c[smallest])) smallest = i;
    Eigen::Vector3d e = Eigen::Vector3d::Zero();
    e[smallest] = 1.0;
    return (e - e.dot(c) * c).normalized();
}

// Accumulates stencil weights keyed by node index.  Slots in polar
// space: 0 value, 1 u_r, 2 u_theta, 3 u_rr, 4 u_rtheta, 5 u_thetatheta.
struct RowBuilder {
    std::map<int, std::array<double, 6>> entries;

    void add(int node, int slot, double w) {
        entries.try_emplace(node, std::array<double, 6>{});
        entries[node][slot] += w;
    }
};

// Fourth-order central first derivative in theta, scaled; the theta
// truncation error carries 1/r^2 factors and needs the extra order to
// keep the jet second-order on the inner rings.
void theta_row(const ChartedDomain& dom, RowBuilder& rb, int ring, int spoke, int slot,
               double scale) {
    const double ht = dom.h_theta();
    rb.add(dom.index(ring, spoke + 2), slot, -scale / (12.0 * ht));
    rb.add(dom.index(ring, spoke + 1), slot, 8.0 * scale / (12.0 * ht));
    rb.add(dom.index(ring, spoke - 1), slot, -8.0 * scale / (12.0 * ht));
    rb.add(dom.index(ring, spoke - 2), slot, scale / (12.0 * ht));
}

void theta_theta_row(const ChartedDomain& dom, RowBuilder& rb, int ring, int spoke) {
    const double ht = dom.h_theta();
    rb.add(dom.index(ring, spoke + 2), 5, -1.0 / (12.0 * ht * ht));
    rb.add(dom.index(ring, spoke + 1), 5, 16.0 / (12.0 * ht * ht));
    rb.add(dom.index(ring, spoke), 5, -30.0 / (12.0 * ht * ht));
    rb.add(dom.index(ring, spoke - 1), 5, 16.0 / (12.0 * ht * ht));
    rb.add(dom.index(ring, spoke - 2), 5, -1.0 / (12.0 * ht * ht));
}

// Exact polar-to-Cartesian conversion of the accumulated polar rows.
JetStencil from_polar_rows(const ChartedDomain& dom, const RowBuilder& polar,
                           const GridNode& nd) {
    const double r = nd.r, c = std::cos(nd.theta), s = std::sin(nd.theta);
    JetStencil st;
    st.nodes.reserve(polar.entries.size());
    for (const auto& [node, _] : polar.entries) st.nodes.push_back(node);
    st.weights = Eigen::MatrixXd::Zero(6, static_cast<Eigen::Index>(st.nodes.size()));
    const int self = dom.index(nd.ring, nd.spoke);
    for (size_t k = 0; k < st.nodes.size(); ++k) {
        if (st.nodes[k] == self) st.center_col = static_cast<int>(k);
        const auto& p = polar.entries.at(st.nodes[k]);
        const double ur = p[1], ut = p[2], urr = p[3], urt = p[4], utt = p[5];
        st.weights(0, k) = p[0];
        st.weights(1, k) = c * ur - s / r * ut;
        st.weights(2, k) = s * ur + c / r * ut;
        st.weights(3, k) = c * c * urr - 2.0 * c * s / r * urt + s * s / (r * r) * utt +
                           s * s / r * ur + 2.0 * c * s / (r * r) * ut;
        st.weights(4, k) = c * s * urr + (c * c - s * s) / r * urt - c * s / (r * r) * utt -
                           c * s / r * ur - (c * c - s * s) / (r * r) * ut;
        st.weights(5, k) = s * s * urr + 2.0 * c * s / r * urt + c * c / (r * r) * utt +
                           c * c / r * ur - 2.0 * c * s / (r * r) * ut;
    }
    return st;
}

}  // namespace

ChartedDomain::ChartedDomain(ChartKind kind, const Eigen::Vector3d& center,
                             double geodesic_radius, int n_r, int n_theta)
    : kind_(kind),
      center_(center.normalized()),
      geodesic_radius_(geodesic_radius),
      n_r_(n_r),
      n_theta_(n_theta) {
    if (!(geodesic_radius > 0.0 && geodesic_radius < std::asin(1.0)))
        throw HemisphereError("geodesic radius must lie in (0, pi/2): domain contained in an "
                              "open hemisphere");
    if (n_r < 5) throw ValidationError("n_r must be at least 5");
    if (n_theta < 8) throw ValidationError("n_theta must be at least 8");

    t1_ = pick_tangent(center_);
    t2_ = center_.cross(t1_);
    chart_radius_ = chart_disk_radius(kind_, geodesic_radius_);
    h_r_ = chart_radius_ / (n_r_ - 0.5);
    h_theta_ = 2.0 * std::acos(-1.0) / n_theta_;

    nodes_.reserve(static_cast<size_t>(n_r_) * n_theta_);
    for (int m = 0; m < n_r_; ++m) {
        const double r = (m + 0.5) * h_r_;
        for (int l = 0; l < n_theta_; ++l) {
            GridNode nd;
            nd.ring = m;
            nd.spoke = l;
            nd.r = r;
            nd.theta = l * h_theta_;
            const Eigen::Vector2d y(r * std::cos(nd.theta), r * std::sin(nd.theta));
            nd.geo = chart_geometry(kind_, y);
            nd.sphere_point = chart_to_sphere(kind_, y, center_, t1_, t2_);
            nd.boundary = (m == n_r_ - 1);
            (nd.boundary ? boundary_ : interior_).push_back(static_cast<int>(nodes_.size()));
            nodes_.push_back(std::move(nd));
        }
    }
    build_stencils();
}

int ChartedDomain::index(int ring, int spoke) const {
    const int l = ((spoke % n_theta_) + n_theta_) % n_theta_;
    return ring * n_theta_ + l;
}

const JetStencil& ChartedDomain::stencil(int i) const {
    if (nodes_[i].boundary)
        throw StencilError("no jet stencil on the boundary ring (node " + std::to_string(i) +
                           ")");
    return stencils_[i];
}

void ChartedDomain::build_stencils() {
    stencils_.resize(nodes_.size());
    for (int i : interior_) stencils_[i] = make_stencil(nodes_[i]);
}

JetStencil ChartedDomain::make_stencil(const GridNode& nd) const {
    // The polar-to-Cartesian conversion divides the radial rows' error
    // by r, so the radial differences are fourth order (five points,
    // one-sided at the pole ring, biased one in) on every ring where
    // the disk provides them.  The ring next to the boundary falls back
    // to the plain central rows; r is of the order of the disk radius
    // there and the amplification is gone.  Theta rows are fourth-order
    // central throughout for the same reason, squared.
    const int m = nd.ring, l = nd.spoke;
    const double hr = h_r_;

    std::vector<std::pair<int, double>> dr, drr;
    if (m == 0) {
        dr = {{0, -11.0 / 6.0}, {1, 3.0}, {2, -1.5}, {3, 1.0 / 3.0}};
        drr = {{0, 35.0 / 12.0}, {1, -26.0 / 3.0}, {2, 9.5}, {3, -14.0 / 3.0},
               {4, 11.0 / 12.0}};
    } else if (m == 1) {
        dr = {{0, -0.25}, {1, -5.0 / 6.0}, {2, 1.5}, {3, -0.5}, {4, 1.0 / 12.0}};
        drr = {{0, 11.0 / 12.0}, {1, -5.0 / 3.0}, {2, 0.5}, {3, 1.0 / 3.0},
               {4, -1.0 / 12.0}};
    } else if (m <= n_r_ - 3) {
        dr = {{m - 2, 1.0 / 12.0}, {m - 1, -2.0 / 3.0}, {m + 1, 2.0 / 3.0},
              {m + 2, -1.0 / 12.0}};
        drr = {{m - 2, -1.0 / 12.0}, {m - 1, 4.0 / 3.0}, {m, -2.5}, {m + 1, 4.0 / 3.0},
               {m + 2, -1.0 / 12.0}};
    } else {
        dr = {{m - 1, -0.5}, {m + 1, 0.5}};
        drr = {{m - 1, 1.0}, {m, -2.0}, {m + 1, 1.0}};
    }

    RowBuilder polar;
    polar.add(index(m, l), 0, 1.0);
    for (const auto& [ring, w] : dr) {
        polar.add(index(ring, l), 1, w / hr);
        theta_row(*this, polar, ring, l, 4, w / hr);
    }
    for (const auto& [ring, w] : drr) polar.add(index(ring, l), 3, w / (hr * hr));
    theta_row(*this, polar, m, l, 2, 1.0);
    theta_theta_row(*this, polar, m, l);
    return from_polar_rows(*this, polar, nd);
}

ChartedDomain build_domain(const Eigen::Vector3d& center, double geodesic_radius, int n_r,
                           int n_theta, ChartKind kind) {
    return ChartedDomain(kind, center, geodesic_radius, n_r, n_theta);
}

ChartJet6 chart_jet(const ChartedDomain& dom, const DiscreteField& f, int node) {
    if (f.values.size() != dom.node_count())
        throw ValidationError("field size disagrees with the domain");
    const JetStencil& st = dom.stencil(node);
    // Differences are taken against the nodal value: the 1/r^2-scaled
    // angular weights near the pole then act on O(h) increments, which
    // keeps the jet's roundoff floor h-uniform over the rings.
    const double u0 = f.values[st.nodes[st.center_col]];
    Eigen::VectorXd local(st.nodes.size());
    for (size_t k = 0; k < st.nodes.size(); ++k) local[k] = f.values[st.nodes[k]] - u0;
    const Eigen::VectorXd slots = st.weights * local;
    ChartJet6 cj;
    cj.value = u0;
    cj.gradient << slots[1], slots[2];
    cj.hessian << slots[3], slots[4], slots[4], slots[5];
    return cj;
}

ScalarJet2 covariant_jet(const ChartedDomain& dom, const DiscreteField& f, int node) {
    return frame_jet_from_chart(dom.kind(), dom.node(node).geo, chart_jet(dom, f, node));
}

double convexity_witness(const ChartedDomain& dom, const DiscreteField& f) {
    double worst = std::numeric_limits<double>::infinity();
    for (int i : dom.interior()) {
        const ChartJet6 cj = chart_jet(dom, f, i);
        const double tr = cj.hessian.trace();
        const double det = cj.hessian.determinant();
        const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
        worst = std::min(worst, tr / 2.0 - disc);
    }
    return worst;
}

}  // namespace prescurv
