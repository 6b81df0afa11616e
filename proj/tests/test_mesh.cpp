#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "h2r/mesh.hpp"

#include <cmath>

using namespace h2r;

namespace {
constexpr double kPi = 3.14159265358979323846;

int count_side(const TriangleMesh& m, BoundaryTag tag) { return (int)m.side(tag).size(); }
} // namespace

TEST_CASE("finite triangle mesh: tags, orientation, boundary on geodesics") {
    const TrianglePose pose = layout_triangle({0.6, 0.9, 1.5});
    const TriangleMesh mesh = build_mesh(pose, 0.05);
    CHECK(mesh.min_signed_area() > 0.0);
    CHECK(count_side(mesh, BoundaryTag::L1) > 0);
    CHECK(count_side(mesh, BoundaryTag::L2) > 0);
    CHECK(count_side(mesh, BoundaryTag::L3) > 0);
    CHECK(count_side(mesh, BoundaryTag::Trunc) == 0);
    for (const auto& v : mesh.vertices) CHECK(v.y > 0.0);

    // every boundary vertex lies on its side's geodesic
    for (const auto& e : mesh.side(BoundaryTag::L1)) {
        CHECK(pose.l1.contains(mesh.vertices[e.v0], 1e-9));
        CHECK(pose.l1.contains(mesh.vertices[e.v1], 1e-9));
    }
    for (const auto& e : mesh.side(BoundaryTag::L2))
        CHECK(pose.l2.contains(mesh.vertices[e.v0], 1e-9));
    for (const auto& e : mesh.side(BoundaryTag::L3))
        CHECK(pose.l3.contains(mesh.vertices[e.v0], 1e-9));

    // corner bookkeeping
    CHECK(dist(mesh.vertices[mesh.vp2], pose.p2) < 1e-12);
    CHECK(dist(mesh.vertices[mesh.vp3], pose.p3) < 1e-10);
    CHECK(dist(mesh.vertices[mesh.vp1], pose.p1) < 1e-10);
}

TEST_CASE("refinement doubles boundary edge counts approximately") {
    const TrianglePose pose = layout_triangle({0.6, 0.9, 1.5});
    const TriangleMesh coarse = build_mesh(pose, 0.10);
    const TriangleMesh fine = build_mesh(pose, 0.05);
    const int c = count_side(coarse, BoundaryTag::L1);
    const int f = count_side(fine, BoundaryTag::L1);
    CHECK(f >= 2 * c - 2);
    CHECK(f <= 2 * c + 2);
}

TEST_CASE("mesh area converges to the Gauss-Bonnet angle defect") {
    const TrianglePose pose = layout_triangle({0.6, 0.9, 1.5});
    const double exact = pose.area();
    const double e1 = std::fabs(build_mesh(pose, 0.08).hyperbolic_area() - exact);
    const double e2 = std::fabs(build_mesh(pose, 0.04).hyperbolic_area() - exact);
    CHECK(e2 < e1);
    CHECK(e2 < 5e-3);
}

TEST_CASE("truncated mesh for the ideal vertex") {
    const TrianglePose pose = layout_triangle({0.7, 1.1, kInfiniteLength});
    const TriangleMesh mesh = build_mesh(pose, 0.05, 6.0);
    CHECK(mesh.truncated);
    CHECK(mesh.min_signed_area() > 0.0);
    CHECK(count_side(mesh, BoundaryTag::Trunc) > 0);
    // cut corners at hyperbolic distance R from the finite vertices
    CHECK(dist(mesh.vertices[mesh.vt3], pose.p2) == doctest::Approx(6.0).epsilon(1e-8));
    CHECK(dist(mesh.vertices[mesh.vt2], pose.p3) == doctest::Approx(6.0).epsilon(1e-8));
    for (const auto& e : mesh.side(BoundaryTag::L2))
        CHECK(pose.l2.contains(mesh.vertices[e.v0], 1e-8));
}

TEST_CASE("degenerate requests are rejected") {
    const TrianglePose pose = layout_triangle({0.6, 0.9, 1.5});
    CHECK_THROWS_AS(build_mesh(pose, -1.0), GeometryError);
}

TEST_CASE("rect mesh and point location") {
    const TriangleMesh mesh = build_rect_mesh(0.0, 1.0, 0.5, 1.5, 8, 8);
    CHECK(mesh.min_signed_area() > 0.0);
    std::array<double, 3> bary{};
    const int e = locate_point(mesh, {0.33, 0.77}, bary);
    REQUIRE(e >= 0);
    const auto& t = mesh.triangles[e];
    const double x = bary[0] * mesh.vertices[t[0]].x + bary[1] * mesh.vertices[t[1]].x +
                     bary[2] * mesh.vertices[t[2]].x;
    CHECK(x == doctest::Approx(0.33).epsilon(1e-12));
    CHECK(locate_point(mesh, {5.0, 5.0}, bary) == -1);
}
