#pragma once

#include "h2r/hyperbolic.hpp"

#include <array>
#include <vector>

namespace h2r {

enum class BoundaryTag { None, L1, L2, L3, Trunc };

// Linear triangulation of the (possibly truncated) geodesic triangle.
// Vertices are chart coordinates; geometry enters through the y-weights
// in the solver, so elements are straight in the chart.
struct TriangleMesh {
    std::vector<HPoint> vertices;
    std::vector<std::array<int, 3>> triangles; // CCW in the chart

    struct BoundaryEdge {
        int v0 = -1, v1 = -1; // oriented along the side's parameterization
        int elem = -1;
        BoundaryTag tag = BoundaryTag::None;
    };
    // Ordered along each side: L1 from p2 to p3, L3 from p2 toward p1,
    // L2 from p3 toward p1, Trunc from the l3 cut to the l2 cut.
    std::vector<BoundaryEdge> boundary;

    double h = 0.0;
    bool truncated = false;
    double trunc_R = 0.0;
    int vp1 = -1, vp2 = -1, vp3 = -1; // corner vertices (vp1 only when finite)
    int vt3 = -1, vt2 = -1;           // truncation corners on l3 / l2

    std::vector<BoundaryEdge> side(BoundaryTag tag) const;
    double hyperbolic_area() const;
    double min_signed_area() const; // Euclidean, for inversion checks
};

struct MeshGrading {
    double corner_cluster = 0.45; // two-sided clustering strength, in [0,1)
    double l2_power = 1.7;        // one-sided densification toward l2
    double row_ratio = 1.12;      // geometric row growth away from l1 (truncated case)
    int fixed_n = 0; // pin the subdivision count (0: derive from h); a
                     // root-finder varying `a` uses this to keep the mesh
                     // topology, and with it P2(a), continuous
};

// The subdivision count build_mesh derives from h when fixed_n is 0.
int default_resolution(const TrianglePose& pose, double h, double trunc_R = 8.0);

// Graded mesh of the triangle; trunc_R is the cut distance from the
// finite vertices along l2/l3 when the spec has an ideal vertex.
TriangleMesh build_mesh(const TrianglePose& pose, double h, double trunc_R = 8.0,
                        const MeshGrading& grading = {});

// Uniform rectangle mesh (chart coordinates); every boundary edge is
// tagged Trunc and callers prescribe explicit Dirichlet values.
TriangleMesh build_rect_mesh(double x0, double x1, double y0, double y1, int nx, int ny);

// Brute-force point location; returns element index or -1, fills
// barycentric coordinates. `candidates` restricts the search when given.
int locate_point(const TriangleMesh& mesh, const HPoint& p, std::array<double, 3>& bary,
                 const std::vector<int>* candidates = nullptr);

} // namespace h2r
