#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "prescurv/config.hpp"
#include "prescurv/report.hpp"

using namespace prescurv;

namespace {

const char* kFlatConfig =
    "# small flat instance\n"
    "[model]\n"
    "curvature_sign = 0\n"
    "[curvature]\n"
    "f = sigma(2)^(1/2)\n"
    "[problem]\n"
    "psi = 1\n"
    "[domain]\n"
    "center = 0 0 1\n"
    "geodesic_radius = 0.6\n"
    "n_r = 9\n"
    "n_theta = 16\n"
    "[boundary]\n"
    "u = 1.3\n"
    "[subsolution]\n"
    "u = 1.3\n";

std::string with_line(const std::string& base, const std::string& extra) {
    return base + extra + "\n";
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(static_cast<bool>(in));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    REQUIRE(static_cast<bool>(out));
    out << text;
}

}  // namespace

TEST_CASE("config parse and serialize are idempotent after one pass") {
    const std::string text = std::string(kFlatConfig) +
                             "[homotopy]\n"
                             "path = 69\n"
                             "epsilon = 0.25\n"
                             "t_initial = 0.5\n"
                             "t_min = 0.001\n"
                             "newton_max_iterations = 25\n"
                             "newton_tolerance = 1e-11\n"
                             "[output]\n"
                             "report = out.report\n"
                             "field = out.field\n"
                             "mesh = out.mesh\n";
    const ProblemConfig cfg = parse_config(text);
    CHECK(cfg.curvature_sign == 0);
    CHECK(cfg.n_r == 9);
    CHECK(cfg.n_theta == 16);
    CHECK(cfg.homotopy.path == PathKind::Main69);
    REQUIRE(static_cast<bool>(cfg.homotopy.epsilon));
    CHECK(*cfg.homotopy.epsilon == 0.25);
    CHECK(cfg.homotopy.newton.max_iterations == 25);
    CHECK(cfg.homotopy.newton.tolerance == 1e-11);
    CHECK(cfg.report_path == "out.report");

    const std::string once = serialize_config(cfg);
    const std::string twice = serialize_config(parse_config(once));
    CHECK(once == twice);
}

TEST_CASE("config rejections name the offense") {
    const std::string base(kFlatConfig);
    CHECK_THROWS_WITH_AS(parse_config(""), doctest::Contains("missing required key"),
                         ValidationError);
    CHECK_THROWS_WITH_AS(parse_config(with_line(base, "[domain]\nn_r = 9")),
                         doctest::Contains("duplicate key"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_config(with_line(base, "[domain]\nshape = odd")),
                         doctest::Contains("unknown key"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_config(std::string("stray = 1\n") + base),
                         doctest::Contains("line 1"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_config(std::string("[model\n") + base),
                         doctest::Contains("unterminated section"), ValidationError);

    std::string bad = base;
    bad.replace(bad.find("n_r = 9"), 7, "n_r = 8.5");
    CHECK_THROWS_WITH_AS(parse_config(bad), doctest::Contains("integer"), ValidationError);

    bad = base;
    bad.replace(bad.find("center = 0 0 1"), 14, "center = 0 0");
    CHECK_THROWS_WITH_AS(parse_config(bad), doctest::Contains("three numbers"),
                         ValidationError);

    bad = base;
    bad.replace(bad.find("geodesic_radius = 0.6"), 21, "geodesic_radius = 1.6");
    CHECK_THROWS_AS(parse_config(bad), HemisphereError);

    bad = base;
    bad.replace(bad.find("curvature_sign = 0"), 18, "curvature_sign = 2");
    CHECK_THROWS_WITH_AS(parse_config(bad), doctest::Contains("curvature_sign"),
                         ValidationError);

    bad = base;
    bad.replace(bad.find("psi = 1"), 7, "psi = y3");
    CHECK_THROWS_WITH_AS(parse_config(bad), doctest::Contains("may not use variable"),
                         ValidationError);

    // the boundary expression sees the point only, not the unknown
    bad = base;
    bad.replace(bad.find("u = 1.3"), 7, "u = 1.3 + u");
    CHECK_THROWS_WITH_AS(parse_config(bad), doctest::Contains("may not use variable"),
                         ValidationError);
}

TEST_CASE("path names round trip") {
    for (PathKind k :
         {PathKind::Auto, PathKind::Auxiliary68, PathKind::Main69, PathKind::Spherical71})
        CHECK(parse_path_name(path_name(k)) == k);
    CHECK(path_name(PathKind::Auxiliary68) == "68");
    CHECK(path_name(PathKind::Main69) == "69");
    CHECK(path_name(PathKind::Spherical71) == "71");
    CHECK_THROWS_AS(parse_path_name("70"), ValidationError);
}

TEST_CASE("prepared problems sample the expressions onto the lattice") {
    std::string text(kFlatConfig);
    text.replace(text.find("psi = 1"), 7, "psi = 1 + u^2");
    const ProblemConfig cfg = parse_config(text);
    const PreparedProblem prep = prepare_problem(cfg);
    CHECK(prep.domain.node_count() == 9 * 16);
    CHECK(prep.model.curvature_sign() == 0);
    for (int p : {0, 40, 100}) {
        CHECK(prep.boundary_values[p] ==
              doctest::Approx(1.3 * prep.domain.node(p).geo.mu).epsilon(1e-14));
        CHECK(prep.subsolution_values[p] == prep.boundary_values[p]);
    }
    const auto [value, ddu] = prep.psi(0, 0.5);
    CHECK(value == doctest::Approx(1.25).epsilon(1e-15));
    CHECK(ddu == doctest::Approx(1.0).epsilon(1e-15));

    const SolveInput in = solve_input(prep);
    CHECK(in.domain == &prep.domain);
    CHECK(in.curvature_sign == 0);
    CHECK(in.boundary_values.size() == prep.domain.node_count());

    // hyperbolic model: the radial variable must clear its lower bound
    std::string hyp(kFlatConfig);
    hyp.replace(hyp.find("curvature_sign = 0"), 18, "curvature_sign = -1");
    hyp.replace(hyp.find("u = 1.3"), 7, "u = 0.9");
    hyp.replace(hyp.find("u = 1.3"), 7, "u = 0.9");
    CHECK_THROWS_WITH_AS(prepare_problem(parse_config(hyp)),
                         doctest::Contains("admissible u range"), ValidationError);

    // psi must be positive on the lattice
    std::string neg(kFlatConfig);
    neg.replace(neg.find("psi = 1"), 7, "psi = y1 - 10");
    CHECK_THROWS_WITH_AS(prepare_problem(parse_config(neg)),
                         doctest::Contains("psi must be positive"), ValidationError);
}

TEST_CASE("report rendering is deterministic and the file adds one timestamp line") {
    SolveReport rep;
    TStepRecord st;
    st.phase = "68";
    st.t = 0.25;
    st.newton_iterations = 3;
    st.residual = 1.5e-12;
    st.convexity_min = 0.8;
    st.kappa_min = 1.0;
    st.kappa_max = 1.4;
    st.u_min = 1.0;
    st.u_max = 1.3;
    st.grad_max = 0.2;
    st.v_gap_min = 0.0;
    rep.steps.push_back(st);
    rep.success = true;
    rep.epsilon = 0.5;
    rep.monitors.c0 = 2.0;
    rep.monitors.k0 = 2.0;

    const std::string a = render_report(rep);
    const std::string b = render_report(rep);
    CHECK(a == b);
    CHECK(a.find("step phase=68 t=0.25 newton=3") != std::string::npos);
    CHECK(a.find("summary success=true") != std::string::npos);
    // nan-valued optional summaries stay out of the body
    CHECK(a.find("endpoint_consistency") == std::string::npos);
    CHECK(a.find("subsolution_note") == std::string::npos);

    rep.endpoint_consistency = 0.0;
    rep.subsolution_margin_min = -0.001;
    rep.subsolution_note = "margin within the discretization allowance";
    const std::string c = render_report(rep);
    CHECK(c.find("summary endpoint_consistency=0") != std::string::npos);
    CHECK(c.find("summary subsolution_margin_min=-0.001") != std::string::npos);
    CHECK(c.find("summary subsolution_note=margin") != std::string::npos);

    const std::string path = "report_roundtrip.tmp";
    write_report(path, rep);
    const std::string file = slurp(path);
    std::remove(path.c_str());
    const size_t nl = file.find('\n');
    REQUIRE(nl != std::string::npos);
    CHECK(file.substr(0, 12) == "# generated:");
    CHECK(file.substr(nl + 1) == c);
}

TEST_CASE("field files round trip bitwise") {
    const ChartedDomain dom = build_domain(Eigen::Vector3d(0, 0, 1), 0.6, 9, 16);
    const SpaceFormModel m(1);
    DiscreteField f;
    f.values.resize(dom.node_count());
    for (int i = 0; i < dom.node_count(); ++i)
        f.values[i] = 1.4 * dom.node(i).geo.mu * (1.0 + 1e-3 * std::sin(i));

    const std::string path = "field_roundtrip.tmp";
    write_field(path, dom, m, f);
    const FieldFile ff = read_field(path);
    CHECK(ff.kind == ChartKind::Gnomonic);
    CHECK(ff.curvature_sign == 1);
    CHECK(ff.n_r == 9);
    CHECK(ff.n_theta == 16);
    CHECK(ff.geodesic_radius == 0.6);
    CHECK((ff.center - dom.center()).norm() == 0.0);
    REQUIRE(ff.utilde.size() == f.values.size());
    CHECK((ff.utilde - f.values).norm() == 0.0);  // shortest round-trip formatting

    // tampering with the row count is caught against the metadata
    spit(path, slurp(path) + "0 0 1 1 nan nan\n");
    CHECK_THROWS_WITH_AS(read_field(path), doctest::Contains("lattice metadata expects"),
                         ValidationError);
    std::remove(path.c_str());

    const std::string bad = "field_bad.tmp";
    spit(bad, "# chart: gnomonic\ny1 y2 u_tilde u kappa1 kappa2\n");
    CHECK_THROWS_WITH_AS(read_field(bad), doctest::Contains("missing lattice metadata"),
                         ValidationError);
    spit(bad, "not a field file\n");
    CHECK_THROWS_AS(read_field(bad), ValidationError);
    std::remove(bad.c_str());

    DiscreteField wrong;
    wrong.values = Eigen::VectorXd::Zero(dom.node_count() - 1);
    CHECK_THROWS_AS(write_field(path, dom, m, wrong), ValidationError);
}

TEST_CASE("mesh export writes the full triangulation") {
    const ChartedDomain dom = build_domain(Eigen::Vector3d(0, 0, 1), 0.6, 9, 16);
    const SpaceFormModel m(1);
    DiscreteField f;
    f.values.resize(dom.node_count());
    for (int i = 0; i < dom.node_count(); ++i) f.values[i] = 1.4 * dom.node(i).geo.mu;

    const std::string path = "mesh_smoke.tmp";
    write_mesh(path, dom, m, f);
    const std::string mesh = slurp(path);
    std::remove(path.c_str());

    int vertices = 0, triangles = 0;
    std::istringstream in(mesh);
    std::string line;
    size_t vertex_tokens = 0;
    while (std::getline(in, line)) {
        if (line.rfind("vertex ", 0) == 0) {
            ++vertices;
            std::istringstream ls(line);
            std::string tok;
            vertex_tokens = 0;
            while (ls >> tok) ++vertex_tokens;
        } else if (line.rfind("triangle ", 0) == 0) {
            ++triangles;
        }
    }
    CHECK(vertices == dom.node_count() + 1);  // synthetic pole point
    CHECK(vertex_tokens == 6);                // "vertex", index, 4 coordinates
    CHECK(triangles == 16 + 2 * 8 * 16);
    CHECK(mesh.find("# curvature_sign: 1") != std::string::npos);
}
