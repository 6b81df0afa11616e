#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "h2r/period_solver.hpp"

#include <cmath>

using namespace h2r;

namespace {
constexpr double kPi = 3.14159265358979323846;

PipelineConfig coarse() {
    PipelineConfig cfg;
    cfg.h = 0.08;
    cfg.tol_P2 = 1e-3;
    return cfg;
}
} // namespace

TEST_CASE("classification is a pure function of P2 and l") {
    CHECK(classify(0.5, kInfiniteLength, 1e-4) == Family::Knoid);
    CHECK(classify(0.5, 1.5, 1e-4) == Family::Saddle);
    CHECK(classify(1.0, kInfiniteLength, 1e-4) == Family::Parabolic);
    CHECK(classify(1.00005, kInfiniteLength, 1e-4) == Family::Parabolic);
    CHECK(classify(1.7, kInfiniteLength, 1e-4) == Family::Hyperbolic);
}

TEST_CASE("first period root: residual rechecked on a fresh mesh") {
    const PipelineConfig cfg = coarse();
    const TriangleSpec spec{0.5, 0.9, 1.5};
    int solves = 0;
    const double b = solve_first_period(spec, cfg, &solves);
    CHECK(b > 0.0);
    CHECK(solves > 2);

    const TrianglePose pose = layout_triangle(spec);
    const TriangleMesh mesh = build_mesh(pose, cfg.h, cfg.trunc_R);
    double diam = std::max({spec.a, spec.l, pose.side_c});
    const double N = b + 10.0 * diam;
    const double res =
        flux_P1(mesh, solve_graph(mesh, triangle_dirichlet(mesh, b, N)));
    CHECK(std::fabs(res) < 2.0 * cfg.tol_P1 * (1.0 + b));
}

TEST_CASE("first period trends in a") {
    const PipelineConfig cfg = coarse();
    const double phi = 0.9, l = 1.5;
    const double am = a_max(phi, l);
    const double b_small = solve_first_period({am / 50.0, phi, l}, cfg);
    const double b_mid = solve_first_period({am / 10.0, phi, l}, cfg);
    const double b_large = solve_first_period({0.8 * am, phi, l}, cfg);
    CHECK(b_small < b_mid);
    CHECK(b_mid < b_large);
}

TEST_CASE("point evaluation: P2 tends to cos(phi) for small a") {
    const PipelineConfig cfg = coarse();
    const double phi = 0.9, l = 1.5;
    const PeriodReport rep = evaluate_point({a_max(phi, l) / 100.0, phi, l}, cfg);
    CHECK(rep.theta0 > kPi);
    CHECK(rep.theta0 < 2.0 * kPi);
    CHECK(rep.twist_residual < 1e-6);
    CHECK(std::fabs(rep.P2 - std::cos(phi)) < 0.05);
}

TEST_CASE("point evaluation is deterministic") {
    const PipelineConfig cfg = coarse();
    const PeriodReport r1 = evaluate_point({0.4, 0.9, 1.5}, cfg);
    const PeriodReport r2 = evaluate_point({0.4, 0.9, 1.5}, cfg);
    CHECK(r1.b == r2.b);
    CHECK(r1.P2 == r2.P2);
    CHECK(r1.to_json() == r2.to_json());
}

TEST_CASE("second period root for a saddle tower") {
    const PipelineConfig cfg = coarse();
    const PeriodReport rep = solve_second_period(1.2, 3, 1.5, cfg);
    CHECK(rep.family == Family::Saddle);
    CHECK(rep.P2 == doctest::Approx(0.5).epsilon(2e-3));
    CHECK(rep.a > 0.0);
    CHECK(rep.a < a_max(1.2, 1.5));
    CHECK(rep.contact == GammaContact::Intersecting);
    CHECK(std::fabs(rep.delta - kPi / 3.0) < 2e-3 / std::sin(kPi / 3.0));
    CHECK(rep.delta < 1.2); // crossing angle below phi
    CHECK(!rep.brackets.empty());
    CHECK(std::fabs(rep.P1_residual) < 2.0 * cfg.tol_P1 * (1.0 + rep.b));
}

TEST_CASE("invalid requests are rejected") {
    const PipelineConfig cfg = coarse();
    CHECK_THROWS_AS(solve_second_period(1.0, 2, 1.5, cfg), PeriodError);
    CHECK_THROWS_AS(solve_second_period(kPi / 3.0 - 0.1, 3, 1.5, cfg), PeriodError);
    CHECK_THROWS_AS(find_hyperbolic(0.9, 0.8, 1.5, cfg), PeriodError);
    CHECK_THROWS_AS(solve_parabolic(2.0, 1.5, cfg), PeriodError);
}

TEST_CASE("report serialization carries the key fields") {
    const PipelineConfig cfg = coarse();
    const PeriodReport rep = evaluate_point({0.4, 0.9, 1.5}, cfg);
    const std::string j = rep.to_json();
    CHECK(j.find("\"P2\"") != std::string::npos);
    CHECK(j.find("\"b\"") != std::string::npos);
    CHECK(j.find("\"family\"") != std::string::npos);
    CHECK(j.find("\"twist_residual\"") != std::string::npos);
}
