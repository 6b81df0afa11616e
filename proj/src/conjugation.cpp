#include "h2r/conjugation.hpp"

#include <algorithm>
#include <cmath>

namespace h2r {

namespace {
constexpr double kPi = 3.14159265358979323846;

struct State {
    double th, ci, x, y; // theta, integral of cos(theta), position
};

State deriv(const State& s, double slope) {
    const double c = std::cos(s.th), sn = std::sin(s.th);
    return State{slope - c, c, s.y * c, s.y * sn};
}

State blend(const State& s, double h, const State& d) {
    return State{s.th + h * d.th, s.ci + h * d.ci, s.x + h * d.x, s.y + h * d.y};
}

State rk4_step(const State& s, double h, double slope) {
    const State k1 = deriv(s, slope);
    const State k2 = deriv(blend(s, 0.5 * h, k1), slope);
    const State k3 = deriv(blend(s, 0.5 * h, k2), slope);
    const State k4 = deriv(blend(s, h, k3), slope);
    return State{s.th + h / 6.0 * (k1.th + 2 * k2.th + 2 * k3.th + k4.th),
                 s.ci + h / 6.0 * (k1.ci + 2 * k2.ci + 2 * k3.ci + k4.ci),
                 s.x + h / 6.0 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x),
                 s.y + h / 6.0 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y)};
}

ConjCurve run(const RotationProfile& psi, double theta0, HPoint start, double max_step,
              int refine) {
    if (psi.t.size() < 2 || psi.t.size() != psi.psi.size())
        throw ConjugationError("integrate: bad rotation profile");
    if (!(start.y > 0.0)) throw ConjugationError("integrate: start not in the half-plane");
    const double range = psi.t.back() - psi.t.front();
    if (!(range > 0.0)) throw ConjugationError("integrate: empty parameter range");
    if (max_step <= 0.0) max_step = range / 200.0;

    ConjCurve out;
    State s{theta0, 0.0, start.x, start.y};
    out.t.push_back(psi.t.front());
    out.theta.push_back(s.th);
    out.x.push_back(s.x);
    out.y.push_back(s.y);
    for (size_t k = 0; k + 1 < psi.t.size(); ++k) {
        const double len = psi.t[k + 1] - psi.t[k];
        if (!(len >= 0.0)) throw ConjugationError("integrate: knots not ascending");
        if (len == 0.0) continue;
        const double slope = (psi.psi[k + 1] - psi.psi[k]) / len;
        const int nsub = refine * std::max(1, (int)std::ceil(len / max_step));
        const double h = len / nsub;
        for (int j = 0; j < nsub; ++j) {
            s = rk4_step(s, h, slope);
            if (!(s.y > 0.0)) throw ConjugationError("integrate: curve left the half-plane");
            out.t.push_back(psi.t[k] + (j + 1) * h);
            out.theta.push_back(s.th);
            out.x.push_back(s.x);
            out.y.push_back(s.y);
        }
    }
    out.cos_integral = s.ci;
    return out;
}
} // namespace

ConjCurve integrate_curve(const RotationProfile& psi, double theta0, HPoint start,
                          double max_step) {
    const ConjCurve coarse = run(psi, theta0, start, max_step, 1);
    ConjCurve fine = run(psi, theta0, start, max_step, 2);
    fine.halving_error =
        std::max(std::fabs(fine.theta.back() - coarse.theta.back()),
                 std::hypot(fine.x.back() - coarse.x.back(), fine.y.back() - coarse.y.back()));
    return fine;
}

ThetaProfile integrate_theta(const RotationProfile& psi, double theta0, double max_step) {
    const ConjCurve c = integrate_curve(psi, theta0, HPoint{0.0, 1.0}, max_step);
    ThetaProfile out;
    out.t = c.t;
    out.theta = c.theta;
    out.cos_integral = c.cos_integral;
    out.halving_error = c.halving_error;
    return out;
}

double compute_P2(double x0, double y0, double theta0) {
    if (!(y0 > 0.0)) throw ConjugationError("compute_P2: y0 <= 0");
    return x0 * std::sin(theta0) / y0 - std::cos(theta0);
}

GammaLine gamma_line(double x0, double y0, double theta0, double tol) {
    if (!(y0 > 0.0)) throw ConjugationError("gamma_line: y0 <= 0");
    if (!(theta0 > kPi && theta0 < 2.0 * kPi))
        throw ConjugationError("gamma_line: theta0 outside (pi, 2 pi)");
    GammaLine g;
    g.P2 = compute_P2(x0, y0, theta0);
    const double sn = std::sin(theta0);
    if (std::fabs(sn) < 1e-12) {
        g.line = Geodesic::vertical(x0); // theta0 ~ pi: gamma degenerates to a vertical
        g.contact = GammaContact::Disjoint;
        g.x_at_gamma0 = x0;
        return g;
    }
    const double center = x0 - y0 * std::cos(theta0) / sn;
    const double radius = -y0 / sn; // positive for theta0 in (pi, 2 pi)
    g.line = Geodesic::circle(center, radius);
    g.x_at_gamma0 = y0 * (g.P2 - 1.0) / sn;
    const double mag = std::fabs(g.P2); // equals |center| / radius exactly
    if (mag < 1.0 - tol) {
        g.contact = GammaContact::Intersecting;
        g.axis_y = std::sqrt(std::max(0.0, radius * radius - center * center));
        g.delta = std::acos(std::clamp(g.P2, -1.0, 1.0));
    } else if (mag <= 1.0 + tol) {
        g.contact = GammaContact::Asymptotic;
        g.delta = 0.0;
    } else {
        g.contact = GammaContact::Disjoint;
    }
    return g;
}

HTildeCurve reconstruct_h_tilde(const NuProfile& nu, const Geodesic& carrier,
                                double xi_start, double z_start, HRole role,
                                double dir_xi) {
    if (nu.s.empty() || nu.s.size() != nu.nu.size())
        throw ConjugationError("reconstruct_h_tilde: bad nu profile");
    if (dir_xi != 1.0 && dir_xi != -1.0)
        throw ConjugationError("reconstruct_h_tilde: dir_xi must be +-1");
    for (double v : nu.nu)
        if (!(v > 0.0 && v <= 1.0))
            throw ConjugationError("reconstruct_h_tilde: nu outside (0,1]");

    int peak = -1;
    if (role == HRole::H1) {
        peak = (int)(std::max_element(nu.nu.begin(), nu.nu.end()) - nu.nu.begin());
        if (peak == 0 || peak + 1 == (int)nu.nu.size())
            throw ConjugationError("reconstruct_h_tilde: nu peak not interior");
    }

    HTildeCurve out;
    out.carrier = carrier;
    double s_end = 0.0, xi = xi_start, z = z_start;
    out.s.push_back(0.0);
    out.xi.push_back(xi);
    out.z.push_back(z);
    for (size_t i = 0; i < nu.nu.size(); ++i) {
        const double w = 2.0 * (nu.s[i] - s_end);
        s_end += w;
        const double v = nu.nu[i];
        const double zspeed = std::sqrt(std::max(0.0, 1.0 - v * v));
        double zsign = -1.0;
        if (role == HRole::H1) zsign = (int)i < peak ? -1.0 : ((int)i > peak ? 1.0 : 0.0);
        xi += dir_xi * v * w;
        z += zsign * zspeed * w;
        out.s.push_back(s_end);
        out.xi.push_back(xi);
        out.z.push_back(z);
    }
    if (role == HRole::H1) out.min_index = peak + 1;
    return out;
}

ConjBoundary assemble_conj_boundary(const TrianglePose& pose, const TriangleMesh& mesh,
                                    const GraphSolution& sol, double b, double N) {
    if (!(N > b && b > 0.0)) throw ConjugationError("assemble: need N > b > 0");
    ConjBoundary out;

    // v2: slice 0, from (0,1) pointing -E1
    const RotationProfile psi2 = rotation_profile_psi(mesh, sol, pose, Corner::P2, 0.0, b);
    out.v2 = integrate_curve(psi2, kPi, HPoint{0.0, 1.0});
    out.v2.height = 0.0;
    out.x0 = out.v2.x.back();
    out.y0 = out.v2.y.back();
    out.theta0 = out.v2.theta.back();
    out.twist_residual =
        std::fabs(out.theta0 - pose.spec.phi - kPi + out.v2.cos_integral);
    out.P2 = compute_P2(out.x0, out.y0, out.theta0);
    out.gamma = gamma_line(out.x0, out.y0, out.theta0);

    // h1 over gamma, height 0 at the v2 corner, running away from the axis
    const NuProfile nu1 = angle_profile_nu(mesh, sol, BoundaryTag::L1);
    const double xi0 = out.gamma.line.arc_coordinate(HPoint{out.x0, out.y0});
    out.h1 = reconstruct_h_tilde(nu1, out.gamma.line, xi0, 0.0, HRole::H1, -1.0);
    out.v3_height = out.h1.z.back();
    out.flux = flux_P1(mesh, sol);

    // v3 starts at the far corner of h1, orthogonal to the gamma plane
    const HPoint p3s = out.gamma.line.point_at(out.h1.xi.back());
    const RotationProfile psi3 = rotation_profile_psi(mesh, sol, pose, Corner::P3, b, N);
    const double tang = out.gamma.line.tangent_angle(p3s);
    out.v3 = integrate_curve(psi3, tang + 0.5 * kPi, p3s);
    out.v3.height = out.v3_height;

    // h2 continues from the far corner of v3 over its own carrier,
    // descending toward the truncation depth
    const NuProfile nu2 = angle_profile_nu(mesh, sol, BoundaryTag::L2);
    const Geodesic carrier2 =
        Geodesic::from_direction(out.v3.end(), out.v3.theta.back());
    const double xi2 = carrier2.arc_coordinate(out.v3.end());
    out.h2 = reconstruct_h_tilde(nu2, carrier2, xi2, out.v3_height, HRole::H3, -1.0);

    // h3 in the plane x = 0, descending from (0,1)
    const NuProfile nu3 = angle_profile_nu(mesh, sol, BoundaryTag::L3);
    out.h3 = reconstruct_h_tilde(nu3, Geodesic::vertical(0.0), 0.0, 0.0, HRole::H3, -1.0);
    out.h3_drop = -out.h3.z.back();

    double residual = std::fabs(out.v3_height - out.flux);
    if (!pose.spec.ideal()) {
        // v1 sits in the slice at depth l below v3; h3 must account for it
        residual = std::max(residual,
                            std::fabs(out.h3_drop + out.v3_height - pose.spec.l));
        const HPoint p1s = Geodesic::vertical(0.0).point_at(out.h3.xi.back());
        const RotationProfile psi1 =
            rotation_profile_psi(mesh, sol, pose, Corner::P1, 0.0, N);
        out.v1 = integrate_curve(psi1, kPi, p1s);
        out.v1->height = -out.h3_drop;
    }
    out.corner_residual = residual;
    return out;
}

} // namespace h2r
