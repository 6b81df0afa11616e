#pragma once

#include "h2r/jenkins_serrin.hpp"

#include <optional>

// Conjugate boundary data: vertical boundary geodesics of the graph turn
// into horizontal-slice curves obtained from theta' = psi' - cos(theta),
// horizontal boundary geodesics turn into mirror curves in vertical
// planes reconstructed from the angle function.

namespace h2r {

struct ThetaProfile {
    std::vector<double> t, theta;
    double cos_integral = 0.0;  // integral of cos(theta), scheme-consistent
    double halving_error = 0.0; // endpoint change under step halving
};

// theta' = psi'(t) - cos(theta) with psi piecewise linear between the
// profile knots; RK4 substeps aligned to the knots, so the psi' term
// integrates exactly. max_step <= 0 uses range/200.
ThetaProfile integrate_theta(const RotationProfile& psi, double theta0,
                             double max_step = 0.0);

struct ConjCurve {
    std::vector<double> t, x, y, theta;
    double cos_integral = 0.0;
    double halving_error = 0.0;
    double height = 0.0; // containing horizontal slice
    HPoint end() const { return HPoint{x.back(), y.back()}; }
};

// Same integration carrying the position along: x' = y cos(theta),
// y' = y sin(theta) (unit hyperbolic speed by construction).
ConjCurve integrate_curve(const RotationProfile& psi, double theta0, HPoint start,
                          double max_step = 0.0);

double compute_P2(double x0, double y0, double theta0);

enum class GammaContact { Intersecting, Asymptotic, Disjoint };

struct GammaLine {
    Geodesic line;
    double P2 = 0.0;
    GammaContact contact = GammaContact::Intersecting;
    double axis_y = 0.0;      // crossing with the positive y-axis, if any
    double delta = 0.0;       // non-oriented crossing angle, cos(delta) = P2
    double x_at_gamma0 = 0.0; // first coordinate of the t = 0 ideal endpoint
};

// Geodesic through (x0, y0) with direction theta0; crosses the positive
// y-axis iff |P2| < 1, touches it at the ideal point (0,0) iff P2 = 1.
GammaLine gamma_line(double x0, double y0, double theta0, double tol = 1e-9);

enum class HRole { H1, H3 };

struct HTildeCurve {
    std::vector<double> s;  // arclength along the original side
    std::vector<double> xi; // arc coordinate along the carrying geodesic
    std::vector<double> z;  // height
    Geodesic carrier;
    int min_index = -1; // H1 only: vertex index of the height minimum
};

// Mirror-curve reconstruction from the angle function: the projection
// moves along `carrier` with speed nu (orientation dir_xi = +-1), the
// height with speed sqrt(1 - nu^2). H3 descends monotonically; H1
// descends up to the nu-peak and ascends after it.
HTildeCurve reconstruct_h_tilde(const NuProfile& nu, const Geodesic& carrier,
                                double xi_start, double z_start, HRole role,
                                double dir_xi);

struct ConjBoundary {
    ConjCurve v2;                // slice 0, starts at (0,1) pointing -E1
    ConjCurve v3;                // slice v3_height
    std::optional<ConjCurve> v1; // finite l only
    HTildeCurve h1;              // over gamma
    HTildeCurve h2;              // over the end carrier, from the v3 corner
    HTildeCurve h3;              // over the y-axis, descending from (0,1)
    GammaLine gamma;
    double x0 = 0.0, y0 = 0.0, theta0 = 0.0;
    double P2 = 0.0;
    double flux = 0.0;            // P1 from the graph solution
    double v3_height = 0.0;       // height at the end of h1
    double h3_drop = 0.0;         // total descent of h3
    double twist_residual = 0.0;  // |theta0 - phi - pi + integral cos(theta)|
    double corner_residual = 0.0; // worst closure mismatch
};

// Positions all six conjugate boundary curves in the common frame:
// h3 in the vertical plane x = 0, v2 from (0,1) at height 0.
ConjBoundary assemble_conj_boundary(const TrianglePose& pose, const TriangleMesh& mesh,
                                    const GraphSolution& sol, double b, double N);

struct ConjugationError : std::runtime_error {
    explicit ConjugationError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace h2r
