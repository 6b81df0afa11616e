#pragma once

#include "h2r/period_solver.hpp"

#include <string>

// Fundamental-piece reconstruction and assembly: project the conjugate
// boundary to a chart polygon, re-solve the minimal-graph equation over
// it, mirror the resulting piece across its boundary planes, and report
// discrete total curvature plus mesh exports.

namespace h2r {

// Chart polygon of the conjugate domain with Dirichlet heights attached
// to every vertex. The chain is closed (poly[n-1] connects to poly[0])
// and counterclockwise. `corner` marks the four transfinite-patch
// corners: start of v2, start of h1, start of v3, start of the return
// run (truncation gap + v1 + h3).
struct ConjDomain {
    std::vector<HPoint> poly;
    std::vector<double> height;
    std::array<int, 4> corner{};
    GammaLine gamma;
    double signed_area = 0.0;
};

ConjDomain build_conj_domain(const ConjBoundary& cb);

// True when the physical boundary (slice curves and mirror arc, up to
// corner[3]) stays weakly on one side of the full gamma geodesic, so
// the mirror image across that plane cannot overlap it. The truncation
// cut is ignored: it is an artifact of compactifying the shadow of a
// deep end and may pass under the geodesic's arch.
bool reflection_overlap_free(const ConjDomain& dom, double tol = 1e-9);

// Fundamental piece: transfinite-patch mesh of the domain plus the
// re-solved graph heights over it.
struct ConjPiece {
    TriangleMesh mesh;
    GraphSolution sol;
};

ConjPiece solve_conjugate_graph(const ConjDomain& dom, int n,
                                const SolveOptions& opts = {});

struct SurfaceMesh {
    struct Vertex {
        double x = 0.0, y = 1.0, t = 0.0;
    };
    std::vector<Vertex> vertices;
    std::vector<std::array<int, 3>> faces;
    std::vector<int> copy_of; // per-vertex copy index

    int piece_vertices = 0, piece_faces = 0, n_copies = 0;
    Family family = Family::Sample;
    int k = 0;
    double translation = 0.0; // saddle: vertical period 2l
    double axis_y = 0.0;      // knoid/saddle rotation axis on the y-axis
    std::vector<Isometry> generators;
};

// Mirrors the piece across the plane x = 0, the vertical plane over
// gamma, and the slice t = 0. Knoid and saddle modes emit the closed
// dihedral family of 4k copies (the rotation is snapped to exactly
// 2 pi / k about the measured axis point, so the group closes to
// roundoff); parabolic and hyperbolic modes emit n_copies fundamental
// domains of the translation generated by the two vertical mirrors.
SurfaceMesh reflect_and_assemble(const ConjPiece& piece, const PeriodReport& rep,
                                 int n_copies = 3);

struct CurvatureReport {
    double piece = 0.0;     // integral of K over one fundamental piece
    double total = 0.0;     // piece value times the copy count
    double predicted = 0.0; // 2 pi (2 - 2 genus - ends - polygons)
    int genus = 1, ends = 0, polygons = 0, copies = 0;
    double mesh_h = 0.0;
};

// Integral of the Gauss curvature of the graph via interior angle
// defects of the induced metric (edge length = hypot of hyperbolic
// distance and height difference).
double piece_curvature(const TriangleMesh& mesh, const GraphSolution& sol);

CurvatureReport total_curvature(const TriangleMesh& mesh, const GraphSolution& sol,
                                Family family, int k, int copies);

void export_obj(const SurfaceMesh& mesh, const std::string& path);
void export_ply(const SurfaceMesh& mesh, const std::string& path);
// Reads back vertices/faces of an export for round-trip checks.
SurfaceMesh import_obj(const std::string& path);

std::string surface_metadata(const SurfaceMesh& mesh, const PeriodReport& rep,
                             const CurvatureReport& curv);

// Half-plane to Poincare-disk chart map (for visual exports).
std::array<double, 2> to_disk(const HPoint& p);

struct BuildError : std::runtime_error {
    explicit BuildError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace h2r
