#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "h2r/conjugation.hpp"

#include <cmath>

using namespace h2r;

namespace {
constexpr double kPi = 3.14159265358979323846;

RotationProfile flat_profile(double t0, double t1) {
    RotationProfile p;
    p.t = {t0, t1};
    p.psi = {0.0, 0.0};
    return p;
}

RotationProfile linear_profile(double t0, double t1, double slope) {
    RotationProfile p;
    p.t = {t0, t1};
    p.psi = {0.0, slope * (t1 - t0)};
    return p;
}

// fourth-order central difference on the uniform sample grid
double speed_residual(const ConjCurve& c) {
    double worst = 0.0;
    for (size_t i = 2; i + 2 < c.t.size(); ++i) {
        const double h = c.t[i + 1] - c.t[i];
        const double dx =
            (-c.x[i + 2] + 8 * c.x[i + 1] - 8 * c.x[i - 1] + c.x[i - 2]) / (12 * h);
        const double dy =
            (-c.y[i + 2] + 8 * c.y[i + 1] - 8 * c.y[i - 1] + c.y[i - 2]) / (12 * h);
        worst = std::max(worst, std::fabs(std::hypot(dx, dy) / c.y[i] - 1.0));
    }
    return worst;
}
} // namespace

TEST_CASE("constant-angle equilibrium") {
    const ConjCurve c = integrate_curve(flat_profile(0.0, 4.0), 1.5 * kPi, {0.0, 1.0});
    for (double th : c.theta) CHECK(th == doctest::Approx(1.5 * kPi).epsilon(1e-14));
    for (size_t i = 0; i < c.t.size(); ++i) {
        CHECK(c.x[i] == doctest::Approx(0.0));
        CHECK(c.y[i] == doctest::Approx(std::exp(-c.t[i])).epsilon(1e-9));
    }
}

TEST_CASE("closed form for theta' = -cos(theta)") {
    const ConjCurve c = integrate_curve(flat_profile(0.0, 5.0), kPi, {0.0, 1.0});
    for (size_t i = 0; i < c.t.size(); ++i) {
        const double exact = 1.5 * kPi - 2.0 * std::atan(std::exp(-c.t[i]));
        CHECK(std::fabs(c.theta[i] - exact) < 1e-8);
    }
    CHECK(c.halving_error < 1e-8);
}

TEST_CASE("horocycle and vertical-geodesic integrations") {
    // psi' = -1 keeps theta = pi: the leftward horocycle
    const ConjCurve horo = integrate_curve(linear_profile(0.0, 3.0, -1.0), kPi, {0.0, 1.0});
    CHECK(horo.x.back() == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(horo.y.back() == doctest::Approx(1.0).epsilon(1e-12));

    const ConjCurve vert = integrate_curve(flat_profile(0.0, 2.0), 0.5 * kPi, {0.0, 1.0});
    CHECK(vert.x.back() == doctest::Approx(0.0));
    CHECK(vert.y.back() == doctest::Approx(std::exp(2.0)).epsilon(1e-9));
}

TEST_CASE("turn identity is scheme-exact") {
    // theta(end) - theta(0) - turn + integral cos(theta) vanishes
    RotationProfile p;
    for (int i = 0; i <= 16; ++i) {
        const double s = i / 16.0;
        p.t.push_back(0.7 * s);
        p.psi.push_back(0.9 * (s - std::sin(2.0 * kPi * s) / (2.0 * kPi)));
    }
    const ThetaProfile th = integrate_theta(p, kPi);
    const double res = th.theta.back() - kPi - 0.9 + th.cos_integral;
    CHECK(std::fabs(res) < 1e-12);
}

TEST_CASE("unit hyperbolic speed along integrated curves") {
    const ConjCurve c =
        integrate_curve(linear_profile(0.0, 2.0, 0.3), 1.2 * kPi, {0.0, 1.0}, 0.005);
    CHECK(speed_residual(c) < 1e-6);
}

TEST_CASE("P2 formula special values") {
    CHECK(compute_P2(0.0, 1.0, 1.5 * kPi) == doctest::Approx(0.0));
    CHECK(compute_P2(0.7, 0.3, kPi) == doctest::Approx(1.0));
    CHECK(compute_P2(-2.0, 5.0, kPi) == doctest::Approx(1.0));
    CHECK_THROWS_AS(compute_P2(0.0, -1.0, 4.0), ConjugationError);
}

TEST_CASE("gamma line classification") {
    const double y0 = 0.8, theta0 = 4.0;
    auto x_for = [&](double target) {
        return y0 * (target + std::cos(theta0)) / std::sin(theta0);
    };

    const GammaLine cross = gamma_line(x_for(0.5), y0, theta0);
    CHECK(cross.P2 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(cross.contact == GammaContact::Intersecting);
    CHECK(cross.delta == doctest::Approx(std::acos(0.5)).epsilon(1e-12));
    CHECK(cross.line.contains({x_for(0.5), y0}, 1e-10));
    CHECK(cross.line.contains({0.0, cross.axis_y}, 1e-10));

    const GammaLine touch = gamma_line(x_for(1.0), y0, theta0);
    CHECK(touch.contact == GammaContact::Asymptotic);
    CHECK(std::fabs(touch.x_at_gamma0) < 1e-12);

    const GammaLine far = gamma_line(x_for(1.5), y0, theta0);
    CHECK(far.contact == GammaContact::Disjoint);

    CHECK_THROWS_AS(gamma_line(0.0, 1.0, 0.5 * kPi), ConjugationError);
}

TEST_CASE("mirror-curve reconstruction") {
    NuProfile flat;
    for (int i = 0; i < 10; ++i) {
        flat.s.push_back(0.05 + 0.1 * i);
        flat.nu.push_back(1.0);
    }
    const HTildeCurve level =
        reconstruct_h_tilde(flat, Geodesic::vertical(0.0), 0.0, 0.0, HRole::H3, 1.0);
    CHECK(level.z.back() == doctest::Approx(0.0));
    CHECK(level.xi.back() == doctest::Approx(1.0).epsilon(1e-12));

    NuProfile steep = flat;
    for (auto& v : steep.nu) v = 1e-6;
    const HTildeCurve drop =
        reconstruct_h_tilde(steep, Geodesic::vertical(0.0), 0.0, 0.0, HRole::H3, 1.0);
    CHECK(drop.z.back() == doctest::Approx(-1.0).epsilon(1e-9));
    for (size_t i = 1; i < drop.z.size(); ++i) CHECK(drop.z[i] < drop.z[i - 1]);

    NuProfile bump;
    for (int i = 0; i < 11; ++i) {
        bump.s.push_back(0.05 + 0.1 * i);
        bump.nu.push_back(0.2 + 0.75 * std::exp(-0.5 * (i - 5.0) * (i - 5.0)));
    }
    const HTildeCurve dip =
        reconstruct_h_tilde(bump, Geodesic::vertical(0.0), 0.0, 0.0, HRole::H1, 1.0);
    CHECK(dip.min_index == 6);
    const double zmin = *std::min_element(dip.z.begin(), dip.z.end());
    CHECK(zmin == doctest::Approx(dip.z[dip.min_index]));
    CHECK(zmin < dip.z.front());
    CHECK(zmin < dip.z.back());
}

TEST_CASE("conjugate boundary of a finite-triangle solve") {
    const TrianglePose pose = layout_triangle({0.5, 0.9, 1.2});
    const TriangleMesh mesh = build_mesh(pose, 0.03);
    const double b = 0.4, N = 6.0;
    const GraphSolution sol = solve_graph(mesh, triangle_dirichlet(mesh, b, N));
    const ConjBoundary cb = assemble_conj_boundary(pose, mesh, sol, b, N);

    MESSAGE("x0 ", cb.x0, " y0 ", cb.y0, " theta0 ", cb.theta0);
    MESSAGE("P2 ", cb.P2, " flux ", cb.flux, " v3_height ", cb.v3_height);
    MESSAGE("h3_drop ", cb.h3_drop, " l-P1 ", 1.2 - cb.v3_height);
    MESSAGE("twist ", cb.twist_residual, " corner ", cb.corner_residual);
    MESSAGE("v3 end ", cb.v3.end().x, " ", cb.v3.end().y);
    MESSAGE("v1 end ", cb.v1->end().x, " ", cb.v1->end().y);
    MESSAGE("gamma kind ", (int)cb.gamma.contact, " axis_y ", cb.gamma.axis_y,
            " delta ", cb.gamma.delta);

    CHECK(cb.twist_residual < 1e-6);
    for (size_t i = 0; i < cb.v2.t.size(); ++i) {
        CHECK(cb.v2.theta[i] > kPi - 1e-12);
        CHECK(cb.v2.theta[i] < 2.0 * kPi);
        if (cb.v2.t[i] > 0.0) CHECK(cb.v2.x[i] < 0.0);
    }
    CHECK(cb.x0 < 0.0);
    CHECK(cb.y0 > 0.0);

    // h3 descends strictly, h1 has its single interior dip
    for (size_t i = 1; i < cb.h3.z.size(); ++i) CHECK(cb.h3.z[i] < cb.h3.z[i - 1]);
    CHECK(cb.h1.min_index > 0);
    CHECK(cb.h1.min_index + 1 < (int)cb.h1.z.size());

    // two independent versions of the first period agree
    CHECK(std::fabs(cb.v3_height - cb.flux) < 0.01);
    CHECK(cb.corner_residual < 10.0 * mesh.h);
}

TEST_CASE("conjugate boundary of an ideal-vertex solve") {
    const TrianglePose pose = layout_triangle({0.4, 1.2, kInfiniteLength});
    const TriangleMesh mesh = build_mesh(pose, 0.03, 8.0);
    const double b = 0.4, N = 8.0;
    const GraphSolution sol = solve_graph(mesh, triangle_dirichlet(mesh, b, N));
    const ConjBoundary cb = assemble_conj_boundary(pose, mesh, sol, b, N);

    MESSAGE("ideal: x0 ", cb.x0, " y0 ", cb.y0, " theta0 ", cb.theta0, " P2 ", cb.P2);
    MESSAGE("ideal: flux ", cb.flux, " v3_height ", cb.v3_height, " h3_drop ", cb.h3_drop);
    MESSAGE("ideal: v3 end ", cb.v3.end().x, " ", cb.v3.end().y);

    CHECK(cb.twist_residual < 1e-6);
    CHECK(!cb.v1.has_value());
    CHECK(cb.x0 < 0.0);
    for (double th : cb.v3.theta) {
        CHECK(th > 0.0);
        CHECK(th < 3.0 * kPi);
    }
    CHECK(std::fabs(cb.v3_height - cb.flux) < 0.1);
}
