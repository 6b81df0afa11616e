#pragma once

#include "h2r/mesh.hpp"

#include <array>
#include <vector>

// Minimal-graph solver over the triangle: minimizes the area functional
// A(u) = integral of sqrt(1 + y^2 |Du|^2) / y^2 with Dirichlet data,
// i.e. the Euler-Lagrange equation d/dx(u_x/W) + d/dy(u_y/W) = 0 with
// W = sqrt(1 + y^2 |Du|^2). Linear elements, damped Newton.

namespace h2r {

struct DirichletData {
    std::vector<unsigned char> fixed; // per vertex
    std::vector<double> value;        // per vertex, meaningful where fixed
};

// Standard boundary data of the graph problem: b on l1, N on l2 (finite
// stand-in for +infinity), 0 on l3. Corner vertices take the mean of
// their two sides; the truncation arc interpolates linearly.
DirichletData triangle_dirichlet(const TriangleMesh& mesh, double b, double N);

struct SolveOptions {
    double tol = 1e-10; // relative residual (max-norm of the energy gradient)
    int max_iter = 200;
    bool parallel = true; // threaded element loops; reductions stay ordered
};

struct GraphSolution {
    std::vector<double> u;                   // per vertex
    std::vector<std::array<double, 2>> grad; // per element, chart gradient
    double residual = 0.0;                   // relative, at convergence
    int iterations = 0;
    double energy = 0.0;
};

// Tilt factor W of element `elem` evaluated at height y.
double tilt_W(const GraphSolution& sol, int elem, double y);

GraphSolution solve_graph(const TriangleMesh& mesh, const DirichletData& bc,
                          const SolveOptions& opts = {});

// Flux of the scaled gradient through the l1 side with the inward
// normal: integral of (du/dn)/W over l1 (the y-weights of normal and
// arclength cancel, so the integrand is Euclidean). Positive for b = 0.
double flux_P1(const TriangleMesh& mesh, const GraphSolution& sol);

struct NuProfile {
    std::vector<double> s;  // hyperbolic arclength of edge midpoints
    std::vector<double> nu; // 1/W per boundary edge of the side
};
NuProfile angle_profile_nu(const TriangleMesh& mesh, const GraphSolution& sol,
                           BoundaryTag side);

struct RotationProfile {
    std::vector<double> t;   // heights, ascending
    std::vector<double> psi; // monotone, psi.front() == 0
    double max_disagreement = 0.0; // radius-halving mismatch, radians
    int interior_samples = 0;
    int flagged_samples = 0; // samples with mismatch above 0.05 rad

    double total_turn() const { return psi.back() - psi.front(); }
};

enum class Corner { P1, P2, P3 }; // P1 only when the vertex is finite

// Direction of the level curve {u = t} at a corner, sampled on circles
// of hyperbolic radius 5h and 2.5h with Richardson extrapolation.
// Endpoints are pinned to the analytic side directions, so the total
// turn equals the interior angle of the triangle exactly.
RotationProfile rotation_profile_psi(const TriangleMesh& mesh, const GraphSolution& sol,
                                     const TrianglePose& pose, Corner corner, double t_lo,
                                     double t_hi, int samples = 64);

struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace h2r
