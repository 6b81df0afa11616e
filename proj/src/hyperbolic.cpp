#include "h2r/hyperbolic.hpp"

#include <cmath>
#include <complex>
#include <limits>

namespace h2r {

namespace {
constexpr double kPi = 3.14159265358979323846;

double wrap_pi(double a) { return std::remainder(a, 2.0 * kPi); }

double wrap_angle_abs(double a) {
    a = std::fabs(std::remainder(a, 2.0 * kPi));
    return a > kPi ? 2.0 * kPi - a : a;
}
} // namespace

bool finite_point(const HPoint& p) {
    return std::isfinite(p.x) && std::isfinite(p.y) && p.y > 0.0;
}

double dist(const HPoint& p, const HPoint& q) {
    if (!finite_point(p) || !finite_point(q))
        throw GeometryError("dist: non-finite point");
    const double dx = p.x - q.x, dy = p.y - q.y;
    const double arg = 1.0 + (dx * dx + dy * dy) / (2.0 * p.y * q.y);
    return std::acosh(std::max(arg, 1.0));
}

Geodesic Geodesic::vertical(double x) {
    Geodesic g;
    g.kind = Kind::Vertical;
    g.c = x;
    return g;
}

Geodesic Geodesic::circle(double center, double radius) {
    if (!(radius > 0.0)) throw GeometryError("Geodesic::circle: radius <= 0");
    Geodesic g;
    g.kind = Kind::Circle;
    g.c = center;
    g.r = radius;
    return g;
}

Geodesic Geodesic::through(const HPoint& p, const HPoint& q) {
    if (!finite_point(p) || !finite_point(q))
        throw GeometryError("Geodesic::through: non-finite point");
    const double dx = p.x - q.x;
    const double scale = std::max({std::fabs(p.x), std::fabs(q.x), p.y, q.y, 1.0});
    if (std::fabs(dx) < 1e-13 * scale) return vertical(0.5 * (p.x + q.x));
    const double c = (p.x * p.x + p.y * p.y - q.x * q.x - q.y * q.y) / (2.0 * dx);
    return circle(c, std::hypot(p.x - c, p.y));
}

Geodesic Geodesic::from_direction(const HPoint& p, double alpha) {
    if (!finite_point(p)) throw GeometryError("Geodesic::from_direction: bad point");
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    if (std::fabs(ca) < 1e-13) return vertical(p.x);
    const double c = p.x + p.y * sa / ca;
    return circle(c, std::hypot(p.x - c, p.y));
}

bool Geodesic::contains(const HPoint& p, double tol) const {
    if (kind == Kind::Vertical) return std::fabs(p.x - c) <= tol * std::max(1.0, p.y);
    return std::fabs(std::hypot(p.x - c, p.y) - r) <= tol * std::max(1.0, r);
}

double Geodesic::tangent_angle(const HPoint& p) const {
    if (kind == Kind::Vertical) return 0.5 * kPi;
    const double beta = std::atan2(p.y, p.x - c);
    return std::atan2(-std::cos(beta), std::sin(beta));
}

IdealPoint Geodesic::ideal_endpoint(bool forward) const {
    IdealPoint e;
    if (kind == Kind::Vertical) {
        e.at_infinity = forward;
        e.x = c;
    } else {
        e.x = forward ? c + r : c - r;
    }
    return e;
}

double Geodesic::arc_coordinate(const HPoint& p) const {
    if (kind == Kind::Vertical) return std::log(p.y);
    const double beta = std::atan2(p.y, p.x - c);
    return -std::log(std::tan(0.5 * beta));
}

HPoint Geodesic::point_at(double arc) const {
    if (kind == Kind::Vertical) return HPoint{c, std::exp(arc)};
    const double beta = 2.0 * std::atan(std::exp(-arc));
    return HPoint{c + r * std::cos(beta), r * std::sin(beta)};
}

HPoint geodesic_step(const HPoint& p, double alpha, double s) {
    const Geodesic g = Geodesic::from_direction(p, alpha);
    const double ta = g.tangent_angle(p);
    const double sign = std::cos(alpha - ta) >= 0.0 ? 1.0 : -1.0;
    return g.point_at(g.arc_coordinate(p) + sign * s);
}

double direction_angle(const HPoint& p, const HPoint& q) {
    const Geodesic g = Geodesic::through(p, q);
    const double ta = g.tangent_angle(p);
    return wrap_pi(g.arc_coordinate(q) >= g.arc_coordinate(p) ? ta : ta + kPi);
}

double direction_angle(const HPoint& p, const IdealPoint& q) {
    if (q.at_infinity) return 0.5 * kPi;
    const double dx = p.x - q.x;
    if (std::fabs(dx) < 1e-13 * std::max(1.0, p.y)) return -0.5 * kPi;
    const double c = (p.x * p.x + p.y * p.y - q.x * q.x) / (2.0 * dx);
    const Geodesic g = Geodesic::circle(c, std::hypot(p.x - c, p.y));
    const double ta = g.tangent_angle(p);
    return wrap_pi(q.x > c ? ta : ta + kPi);
}

Isometry Isometry::identity() { return Isometry{}; }

Isometry Isometry::reflection(const Geodesic& g) {
    Isometry iso;
    iso.reversing = true;
    if (g.kind == Geodesic::Kind::Vertical) {
        iso.m = {-1.0, 2.0 * g.c, 0.0, 1.0};
    } else {
        iso.m = {g.c / g.r, (g.r * g.r - g.c * g.c) / g.r, 1.0 / g.r, -g.c / g.r};
    }
    return iso;
}

Isometry Isometry::vertical_mirror(double height) {
    Isometry iso;
    iso.t_sign = -1.0;
    iso.t_shift = 2.0 * height;
    return iso;
}

Isometry Isometry::vertical_shift(double dt) {
    Isometry iso;
    iso.t_shift = dt;
    return iso;
}

HPoint Isometry::apply(const HPoint& p) const {
    std::complex<double> z(p.x, p.y);
    if (reversing) z = std::conj(z);
    const std::complex<double> w = (m[0] * z + m[1]) / (m[2] * z + m[3]);
    return HPoint{w.real(), w.imag()};
}

double Isometry::apply_height(double t) const { return t_sign * t + t_shift; }

IdealPoint Isometry::apply(const IdealPoint& p) const {
    IdealPoint out;
    if (p.at_infinity) {
        if (std::fabs(m[2]) < 1e-300) {
            out.at_infinity = true;
        } else {
            out.x = m[0] / m[2];
        }
        return out;
    }
    const double den = m[2] * p.x + m[3];
    if (std::fabs(den) < 1e-300) {
        out.at_infinity = true;
        return out;
    }
    out.x = (m[0] * p.x + m[1]) / den;
    return out;
}

Isometry Isometry::inverse() const {
    Isometry inv;
    const double det = m[0] * m[3] - m[1] * m[2];
    inv.m = {m[3] / det, -m[1] / det, -m[2] / det, m[0] / det};
    inv.reversing = reversing;
    inv.t_sign = t_sign;
    inv.t_shift = -t_sign * t_shift;
    return inv;
}

Isometry compose(const Isometry& f, const Isometry& g) {
    Isometry h;
    h.m = {f.m[0] * g.m[0] + f.m[1] * g.m[2], f.m[0] * g.m[1] + f.m[1] * g.m[3],
           f.m[2] * g.m[0] + f.m[3] * g.m[2], f.m[2] * g.m[1] + f.m[3] * g.m[3]};
    const double det = std::fabs(h.m[0] * h.m[3] - h.m[1] * h.m[2]);
    if (det > 0.0) {
        const double s = 1.0 / std::sqrt(det);
        for (auto& v : h.m) v *= s;
    }
    h.reversing = f.reversing != g.reversing;
    h.t_sign = f.t_sign * g.t_sign;
    h.t_shift = f.t_sign * g.t_shift + f.t_shift;
    return h;
}

void TriangleSpec::validate() const {
    if (!(phi > 0.0 && phi < 0.5 * kPi))
        throw GeometryError("TriangleSpec: phi outside (0, pi/2)");
    if (!ideal() && !(l > 0.0)) throw GeometryError("TriangleSpec: l must be positive");
    const double am = a_max(phi, l);
    if (!(a > 0.0 && a < am))
        throw GeometryError("TriangleSpec: a outside (0, a_max)");
}

double a_max(double phi, double l) {
    if (!(phi > 0.0 && phi <= 0.5 * kPi))
        throw GeometryError("a_max: phi outside (0, pi/2]");
    if (phi == 0.5 * kPi) return 0.0; // right-angle limit, exact
    const double th = (l == kInfiniteLength) ? 1.0 : std::tanh(l);
    return 2.0 * std::atanh(th * std::cos(phi));
}

double a_emb(double phi, double l) {
    if (!(phi > 0.0 && phi <= 0.5 * kPi))
        throw GeometryError("a_emb: phi outside (0, pi/2]");
    if (phi == 0.5 * kPi) return 0.0; // right-angle limit, exact
    const double th = (l == kInfiniteLength) ? 1.0 : std::tanh(l);
    return std::asinh(th / std::tan(phi));
}

namespace {

// Hyperbolic law of cosines for c = d(p1,p2), given a = d(p2,p3),
// l = d(p1,p3) and the angle phi between the sides a and c at p2:
// cosh l = cosh a cosh c - sinh a sinh c cos phi. The right-hand side
// has a single minimum at tanh c = tanh a cos phi; the admissible root
// lies on the increasing branch.
double solve_side_c(double a, double phi, double l) {
    const double cl = std::cosh(l);
    const double cha = std::cosh(a), sha = std::sinh(a), cp = std::cos(phi);
    auto rhs = [&](double c) { return cha * std::cosh(c) - sha * std::sinh(c) * cp; };
    const double c_min = std::atanh(std::tanh(a) * cp);
    if (rhs(c_min) > cl * (1.0 + 1e-14))
        throw GeometryError("layout_triangle: no triangle with these (a, phi, l)");
    double lo = c_min, hi = std::max(1.0, 2.0 * c_min);
    int guard = 0;
    while (rhs(hi) < cl) {
        hi *= 2.0;
        if (++guard > 200) throw GeometryError("layout_triangle: bracket expansion failed");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (rhs(mid) < cl ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TrianglePose layout_triangle(const TriangleSpec& spec) {
    spec.validate();
    TrianglePose pose;
    pose.spec = spec;
    pose.p2 = HPoint{0.0, 1.0};
    pose.l1 = Geodesic::circle(0.0, 1.0);
    pose.dir_l1_at_p2 = 0.0; // toward +x along the unit circle
    pose.p3 = pose.l1.point_at(pose.l1.arc_coordinate(pose.p2) + spec.a);
    pose.dir_l3_at_p2 = -spec.phi;
    pose.l3 = Geodesic::from_direction(pose.p2, -spec.phi);
    pose.dir_l1_at_p3 = direction_angle(pose.p3, pose.p2);

    if (spec.ideal()) {
        const double ta = pose.l3.tangent_angle(pose.p2);
        const bool forward = std::cos(-spec.phi - ta) >= 0.0;
        pose.p1_ideal = pose.l3.ideal_endpoint(forward);
        pose.dir_l2_at_p3 = direction_angle(pose.p3, pose.p1_ideal);
        pose.l2 = Geodesic::from_direction(pose.p3, pose.dir_l2_at_p3);
        pose.angle_p1 = 0.0;
    } else {
        pose.side_c = solve_side_c(spec.a, spec.phi, spec.l);
        pose.p1 = geodesic_step(pose.p2, -spec.phi, pose.side_c);
        pose.l2 = Geodesic::through(pose.p1, pose.p3);
        pose.dir_l2_at_p3 = direction_angle(pose.p3, pose.p1);
        pose.dir_l2_at_p1 = direction_angle(pose.p1, pose.p3);
        pose.dir_l3_at_p1 = direction_angle(pose.p1, pose.p2);
        pose.angle_p1 = wrap_angle_abs(pose.dir_l2_at_p1 - pose.dir_l3_at_p1);
    }
    pose.angle_p2 = wrap_angle_abs(pose.dir_l1_at_p2 - pose.dir_l3_at_p2);
    pose.angle_p3 = wrap_angle_abs(pose.dir_l1_at_p3 - pose.dir_l2_at_p3);
    return pose;
}

double TrianglePose::area() const { return kPi - angle_p1 - angle_p2 - angle_p3; }

} // namespace h2r
