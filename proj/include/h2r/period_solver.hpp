#pragma once

#include "h2r/conjugation.hpp"

#include <limits>
#include <string>

// Root-finding layer: P1(a, phi, b) = 0 is solved for b at fixed (a, phi)
// by bracketing + Illinois iteration (P1 is strictly decreasing in b),
// then P2(a, phi, f(a, phi)) = target is solved for a by scanning for the
// first sign change and bisecting within it.

namespace h2r {

struct PipelineConfig {
    double h = 0.06;       // mesh size
    double trunc_R = 8.0;  // ideal-vertex cut distance
    double trunc_N = 0.0;  // 0: use b + 10 * diam of the (truncated) triangle
    double tol_P1 = 1e-6;  // scaled by (1 + b)
    double tol_P2 = 1e-4;
    double eps_margin = 1e-3; // relative margins of the a-scan bracket
    int scan_points = 12;
    int max_bisect = 80;
    double bracket_cap = 64.0; // largest b tried while bracketing P1
    MeshGrading grading;
    SolveOptions solve;
};

enum class Family { Sample, Knoid, Saddle, Parabolic, Hyperbolic };

std::string family_name(Family f);

// Pure classification by the second period: |P2| < 1 is a dihedral
// candidate (knoid for ideal l, saddle otherwise), P2 = 1 parabolic,
// P2 > 1 hyperbolic.
Family classify(double P2, double l, double tol);

struct PeriodReport {
    double a = 0.0, phi = 0.0, l = kInfiniteLength;
    double b = 0.0;
    double P1_residual = 0.0;
    double P2 = 0.0;
    double x0 = 0.0, y0 = 0.0, theta0 = 0.0;
    double delta = std::numeric_limits<double>::quiet_NaN();
    GammaContact contact = GammaContact::Intersecting;
    Family family = Family::Sample;
    int k = 0;
    bool embedded = false;
    double twist_residual = 0.0;
    int solves = 0; // PDE solves spent on this report
    double h = 0.0, trunc_N = 0.0, trunc_R = 0.0;
    std::vector<std::array<double, 2>> brackets; // all sign-change brackets in a

    std::string to_json() const;
};

// b = f(a, phi) with |P1| < tol_P1 * (1 + b).
double solve_first_period(const TriangleSpec& spec, const PipelineConfig& cfg,
                          int* solves = nullptr);

// Solves the first period at the given a and evaluates the second.
PeriodReport evaluate_point(const TriangleSpec& spec, const PipelineConfig& cfg);

// Leftmost a with P2(a, phi, f(a, phi)) = cos(pi/k); requires
// pi/k < phi < pi/2 and k >= 3.
PeriodReport solve_second_period(double phi, int k, double l, const PipelineConfig& cfg);

// Root of P2 = 1 (gamma asymptotic to the y-axis at the ideal point).
PeriodReport solve_parabolic(double phi, double l, const PipelineConfig& cfg);

// Root of P2 = target for target > 1 (disjoint mirror geodesics).
PeriodReport find_hyperbolic(double phi, double target, double l,
                             const PipelineConfig& cfg);

struct PeriodError : std::runtime_error {
    explicit PeriodError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace h2r
