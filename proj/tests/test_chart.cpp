#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "prescurv/chart.hpp"
#include "prescurv/frames.hpp"

using namespace prescurv;

namespace {

// FD Christoffel symbols from the metric field of the chart.
Eigen::Matrix2d fd_christoffel(ChartKind kind, const Eigen::Vector2d& y, int k) {
    const double h = 1e-6;
    std::array<Eigen::Matrix2d, 2> dsigma;
    for (int l = 0; l < 2; ++l) {
        Eigen::Vector2d yp = y, ym = y;
        yp[l] += h;
        ym[l] -= h;
        dsigma[l] = (chart_geometry(kind, yp).sigma - chart_geometry(kind, ym).sigma) / (2 * h);
    }
    const Eigen::Matrix2d sigma_inv = chart_geometry(kind, y).sigma_inv;
    Eigen::Matrix2d gamma = Eigen::Matrix2d::Zero();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double s = 0.0;
            for (int l = 0; l < 2; ++l)
                s += sigma_inv(k, l) * (dsigma[i](j, l) + dsigma[j](i, l) - dsigma[l](i, j));
            gamma(i, j) = 0.5 * s;
        }
    return gamma;
}

}  // namespace

TEST_CASE("gnomonic chart metric closed forms and matrix identities") {
    const Eigen::Vector2d y(0.31, -0.22);
    const ChartGeometry g = gnomonic_geometry(y);
    const double mu2 = 1.0 + y.squaredNorm();
    CHECK(g.mu == doctest::Approx(std::sqrt(mu2)).epsilon(1e-15));
    const Eigen::Matrix2d expected =
        (Eigen::Matrix2d::Identity() - y * y.transpose() / mu2) / mu2;
    CHECK((g.sigma - expected).norm() < 1e-15);
    CHECK((g.sigma * g.sigma_inv - Eigen::Matrix2d::Identity()).norm() < 1e-14);
    CHECK((g.sigma_sqrt * g.sigma_sqrt - g.sigma).norm() < 1e-14);
    CHECK((g.sigma_inv_sqrt * g.sigma_sqrt - Eigen::Matrix2d::Identity()).norm() < 1e-14);
}

TEST_CASE("projective chart metric is conformal") {
    const Eigen::Vector2d x(0.4, 0.1);
    const ChartGeometry g = projective_geometry(x);
    const double mu = 4.0 + x.squaredNorm();
    CHECK(g.mu == doctest::Approx(mu).epsilon(1e-15));
    CHECK((g.sigma - (16.0 / (mu * mu)) * Eigen::Matrix2d::Identity()).norm() < 1e-15);
    CHECK((g.sigma * g.sigma_inv - Eigen::Matrix2d::Identity()).norm() < 1e-14);
}

TEST_CASE("christoffel symbols agree with metric derivatives") {
    for (ChartKind kind : {ChartKind::Gnomonic, ChartKind::Projective}) {
        const Eigen::Vector2d y(0.27, 0.15);
        const ChartGeometry g = chart_geometry(kind, y);
        for (int k = 0; k < 2; ++k) {
            const Eigen::Matrix2d fd = fd_christoffel(kind, y, k);
            CHECK((g.christoffel[k] - fd).norm() < 1e-8);
            CHECK((g.christoffel[k] - g.christoffel[k].transpose()).norm() < 1e-14);
        }
    }
}

TEST_CASE("chart radius of a geodesic disk") {
    CHECK(chart_disk_radius(ChartKind::Gnomonic, 0.6) ==
          doctest::Approx(std::tan(0.6)).epsilon(1e-15));
    CHECK(chart_disk_radius(ChartKind::Projective, 0.6) ==
          doctest::Approx(2.0 * std::tan(0.3)).epsilon(1e-15));
    CHECK_THROWS_AS(chart_disk_radius(ChartKind::Gnomonic, 1.6), HemisphereError);
    CHECK_THROWS_AS(chart_disk_radius(ChartKind::Gnomonic, 0.0), HemisphereError);
}

TEST_CASE("chart maps round trip through the sphere") {
    // a tilted frame, orthonormal by construction
    Eigen::Vector3d c(0.2, -0.3, 0.8);
    c.normalize();
    Eigen::Vector3d t1 = c.cross(Eigen::Vector3d::UnitX()).normalized();
    Eigen::Vector3d t2 = c.cross(t1);

    for (ChartKind kind : {ChartKind::Gnomonic, ChartKind::Projective}) {
        CHECK((chart_to_sphere(kind, Eigen::Vector2d::Zero(), c, t1, t2) - c).norm() < 1e-15);
        const Eigen::Vector2d y(0.37, -0.18);
        const Eigen::Vector3d z = chart_to_sphere(kind, y, c, t1, t2);
        CHECK(z.norm() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK((sphere_to_chart(kind, z, c, t1, t2) - y).norm() < 1e-14);
    }

    // both charts of the same sphere point agree after conversion
    const Eigen::Vector2d yg(0.25, 0.12);
    const Eigen::Vector3d z = chart_to_sphere(ChartKind::Gnomonic, yg, c, t1, t2);
    const Eigen::Vector2d xp = sphere_to_chart(ChartKind::Projective, z, c, t1, t2);
    CHECK((chart_to_sphere(ChartKind::Projective, xp, c, t1, t2) - z).norm() < 1e-14);

    CHECK_THROWS_AS(sphere_to_chart(ChartKind::Gnomonic, -c, c, t1, t2), HemisphereError);
}

TEST_CASE("first spherical harmonics have frame hessian -u times identity") {
    // u(z) = b.z satisfies hess u + u id = 0; in both charts the lifted
    // working unknown is polynomial, so the chart jets are exact.
    Eigen::Vector3d c(0.1, 0.2, 0.95);
    c.normalize();
    Eigen::Vector3d t1 = c.cross(Eigen::Vector3d::UnitY()).normalized();
    Eigen::Vector3d t2 = c.cross(t1);
    const Eigen::Vector3d b(0.4, -0.2, 1.1);

    // gnomonic: u~(y) = b.c + y1 b.t1 + y2 b.t2 (affine)
    {
        const Eigen::Vector2d y(0.3, -0.2);
        ChartJet6 cj;
        cj.value = b.dot(c) + y[0] * b.dot(t1) + y[1] * b.dot(t2);
        cj.gradient = Eigen::Vector2d(b.dot(t1), b.dot(t2));
        const ScalarJet2 jet = frame_jet_from_chart(ChartKind::Gnomonic,
                                                    gnomonic_geometry(y), cj);
        const double u = b.dot(chart_to_sphere(ChartKind::Gnomonic, y, c, t1, t2));
        CHECK(jet.value == doctest::Approx(u).epsilon(1e-14));
        CHECK((jet.hessian + u * Eigen::Matrix2d::Identity()).norm() < 1e-13);
    }
    // projective: u~(x) = 4(x1 b.t1 + x2 b.t2) - (|x|^2 - 4) b.c (quadratic)
    {
        const Eigen::Vector2d x(0.5, 0.28);
        ChartJet6 cj;
        cj.value = 4.0 * (x[0] * b.dot(t1) + x[1] * b.dot(t2)) -
                   (x.squaredNorm() - 4.0) * b.dot(c);
        cj.gradient = Eigen::Vector2d(4.0 * b.dot(t1) - 2.0 * x[0] * b.dot(c),
                                      4.0 * b.dot(t2) - 2.0 * x[1] * b.dot(c));
        cj.hessian = -2.0 * b.dot(c) * Eigen::Matrix2d::Identity();
        const ScalarJet2 jet = frame_jet_from_chart(ChartKind::Projective,
                                                    projective_geometry(x), cj);
        const double u = b.dot(chart_to_sphere(ChartKind::Projective, x, c, t1, t2));
        CHECK(jet.value == doctest::Approx(u).epsilon(1e-13));
        CHECK((jet.hessian + u * Eigen::Matrix2d::Identity()).norm() < 1e-12);
    }
}

TEST_CASE("frame jet is the sum of its slot maps") {
    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> unif(-0.5, 0.5);
    for (ChartKind kind : {ChartKind::Gnomonic, ChartKind::Projective}) {
        const Eigen::Vector2d y(unif(rng), unif(rng));
        const ChartGeometry geo = chart_geometry(kind, y);
        ChartJet6 cj;
        cj.value = 1.0 + unif(rng);
        cj.gradient = Eigen::Vector2d(unif(rng), unif(rng));
        const double h12 = unif(rng);
        cj.hessian << 1.0 + unif(rng), h12, h12, 1.0 + unif(rng);

        const ScalarJet2 jet = frame_jet_from_chart(kind, geo, cj);
        const auto slots = frame_jet_slots(kind, geo);
        const double w[6] = {cj.value,         cj.gradient[0],   cj.gradient[1],
                             cj.hessian(0, 0), cj.hessian(0, 1), cj.hessian(1, 1)};
        double value = 0.0;
        Eigen::Vector2d grad = Eigen::Vector2d::Zero();
        Eigen::Matrix2d hess = Eigen::Matrix2d::Zero();
        for (int s = 0; s < 6; ++s) {
            value += slots[s].du * w[s];
            grad += slots[s].dgrad * w[s];
            hess += slots[s].dhess * w[s];
        }
        CHECK(value == doctest::Approx(jet.value).epsilon(1e-13));
        CHECK((grad - Eigen::Vector2d(jet.gradient)).norm() < 1e-13);
        CHECK((hess - Eigen::Matrix2d(jet.hessian)).norm() < 1e-13);
    }
}

TEST_CASE("chart hessian positivity is equivalent to strict local convexity") {
    // For the hemisphere model, the spherical convexity matrix of the
    // graph is the gnomonic chart hessian of u~ up to congruence.
    std::mt19937_64 rng(8080);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    SpaceFormModel m(1);
    int convex_seen = 0, nonconvex_seen = 0;
    for (int rep = 0; rep < 200; ++rep) {
        const Eigen::Vector2d y(0.4 * unif(rng), 0.4 * unif(rng));
        const ChartGeometry geo = gnomonic_geometry(y);
        ChartJet6 cj;
        cj.value = 1.5 + 0.3 * unif(rng);
        cj.gradient = Eigen::Vector2d(0.3 * unif(rng), 0.3 * unif(rng));
        const double h12 = 0.8 * unif(rng);
        cj.hessian << unif(rng), h12, h12, unif(rng);

        const ScalarJet2 jet = frame_jet_from_chart(ChartKind::Gnomonic, geo, cj);
        if (!(jet.value > 0.0)) continue;  // keep inside the admissible u range
        const FrameQuantities fr = frame_from_u(m, jet);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cj.hessian);
        const bool chart_convex = es.eigenvalues()[0] > 0.0;
        const bool graph_convex = fr.principal_curvatures[0] > 0.0;
        CHECK(chart_convex == graph_convex);
        (chart_convex ? convex_seen : nonconvex_seen) += 1;
    }
    CHECK(convex_seen > 20);
    CHECK(nonconvex_seen > 20);
}
