#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>

// Geometry of the hyperbolic plane in the upper half-plane model
// {(x,y) : y > 0} with metric y^-2 (dx^2 + dy^2). Vertical lines and
// half-circles centered on the x-axis are the geodesics.

namespace h2r {

inline constexpr double kInfiniteLength = -1.0; // sentinel for l = infinity

struct HPoint {
    double x = 0.0;
    double y = 1.0;
};

// A point on the ideal boundary: either a finite abscissa on the x-axis
// or the point at infinity (shared endpoint of all vertical lines).
struct IdealPoint {
    double x = 0.0;
    bool at_infinity = false;
};

bool finite_point(const HPoint& p);

double dist(const HPoint& p, const HPoint& q);

struct Geodesic {
    enum class Kind { Vertical, Circle };
    Kind kind = Kind::Vertical;
    double c = 0.0; // x = c for vertical lines, circle center (c, 0) otherwise
    double r = 1.0; // circle radius, unused for vertical lines

    static Geodesic vertical(double x);
    static Geodesic circle(double center, double radius);
    // Unique geodesic through two distinct finite points.
    static Geodesic through(const HPoint& p, const HPoint& q);
    // Geodesic through p with unit tangent at Euclidean angle `alpha`
    // (angles in the chart agree with hyperbolic angles by conformality).
    static Geodesic from_direction(const HPoint& p, double alpha);

    bool contains(const HPoint& p, double tol = 1e-9) const;
    // Euclidean angle of the unit tangent at p, oriented toward
    // increasing x (vertical lines: +pi/2).
    double tangent_angle(const HPoint& p) const;
    IdealPoint ideal_endpoint(bool forward) const;
    // Signed hyperbolic arclength coordinate of p along the geodesic;
    // increases in the direction of tangent_angle.
    double arc_coordinate(const HPoint& p) const;
    HPoint point_at(double arc) const;
};

// Walk hyperbolic distance s from p along the geodesic with initial
// Euclidean direction angle alpha; returns the endpoint.
HPoint geodesic_step(const HPoint& p, double alpha, double s);

// Euclidean direction angle at p of the geodesic ray from p to q.
double direction_angle(const HPoint& p, const HPoint& q);
// Direction angle at p of the ray toward an ideal point.
double direction_angle(const HPoint& p, const IdealPoint& q);

// Orientation-preserving maps are real Moebius maps z -> (az+b)/(cz+d);
// orientation-reversing ones act on the conjugate first. The vertical
// factor of H^2 x R transforms as t -> t_sign * t + t_shift.
struct Isometry {
    std::array<double, 4> m{1.0, 0.0, 0.0, 1.0}; // a b c d, det normalized to +1
    bool reversing = false;
    double t_sign = 1.0;
    double t_shift = 0.0;

    static Isometry identity();
    static Isometry reflection(const Geodesic& g);
    static Isometry vertical_mirror(double height); // t -> 2*height - t
    static Isometry vertical_shift(double dt);

    HPoint apply(const HPoint& p) const;
    double apply_height(double t) const;
    IdealPoint apply(const IdealPoint& p) const;
    Isometry inverse() const;
};

Isometry compose(const Isometry& f, const Isometry& g); // f after g

// Triangle parameters (a, phi, l): side l1 = p2p3 has length a, the angle
// at p2 is phi, side l2 = p1p3 has length l (kInfiniteLength for the
// ideal-vertex case).
struct TriangleSpec {
    double a;
    double phi;
    double l = kInfiniteLength;

    bool ideal() const { return l == kInfiniteLength; }
    void validate() const;
};

// Longest admissible a: the unequal side of the isosceles triangle with
// equal sides l and equal angles phi.
double a_max(double phi, double l = kInfiniteLength);
// Embeddedness threshold: angle at p3 equal to pi/2.
double a_emb(double phi, double l = kInfiniteLength);

// Concrete placement of the triangle in the half-plane: p2 = (0,1), side
// l1 leaves p2 along the unit circle toward +x, side l3 leaves p2 at
// angle -phi. The interior is the wedge below l1; this chirality makes
// the normal along the vertical boundary geodesics rotate
// counterclockwise, which the conjugation step assumes.
struct TrianglePose {
    TriangleSpec spec;
    HPoint p2, p3;
    HPoint p1;             // finite case only
    IdealPoint p1_ideal;   // ideal case only
    Geodesic l1, l2, l3;
    double side_c = 0.0;   // d(p1, p2), finite case
    double angle_p2 = 0.0;
    double angle_p3 = 0.0;
    double angle_p1 = 0.0; // 0 in the ideal case
    // Interior direction angles of the sides at their endpoints.
    double dir_l1_at_p2 = 0.0, dir_l3_at_p2 = 0.0;
    double dir_l1_at_p3 = 0.0, dir_l2_at_p3 = 0.0;
    double dir_l2_at_p1 = 0.0, dir_l3_at_p1 = 0.0; // finite case

    double area() const; // pi - angle sum
};

TrianglePose layout_triangle(const TriangleSpec& spec);

struct GeometryError : std::runtime_error {
    explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace h2r
