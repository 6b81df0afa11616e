#include "h2r/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace h2r {

namespace {
constexpr double kPi = 3.14159265358979323846;

double signed_area(const HPoint& a, const HPoint& b, const HPoint& c) {
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

// Monotone [0,1] map clustering both endpoints.
double two_sided(double s, double beta) {
    return s - beta * std::sin(2.0 * kPi * s) / (2.0 * kPi);
}

// Monotone [0,1] map clustering the s = 1 end.
double one_sided(double s, double p) { return 1.0 - std::pow(1.0 - s, p); }

struct SideSampler {
    Geodesic g;
    double arc0 = 0.0;
    double sign = 1.0;

    SideSampler(const Geodesic& geod, const HPoint& start, double dir_angle) : g(geod) {
        arc0 = g.arc_coordinate(start);
        sign = std::cos(dir_angle - g.tangent_angle(start)) >= 0.0 ? 1.0 : -1.0;
    }
    HPoint at(double s) const { return g.point_at(arc0 + sign * s); }
};

} // namespace

std::vector<TriangleMesh::BoundaryEdge> TriangleMesh::side(BoundaryTag tag) const {
    std::vector<BoundaryEdge> out;
    for (const auto& e : boundary)
        if (e.tag == tag) out.push_back(e);
    return out;
}

double TriangleMesh::hyperbolic_area() const {
    double total = 0.0;
    for (const auto& t : triangles) {
        const HPoint &a = vertices[t[0]], &b = vertices[t[1]], &c = vertices[t[2]];
        const double ae = signed_area(a, b, c);
        const double y01 = 0.5 * (a.y + b.y), y12 = 0.5 * (b.y + c.y), y20 = 0.5 * (c.y + a.y);
        total += ae / 3.0 * (1.0 / (y01 * y01) + 1.0 / (y12 * y12) + 1.0 / (y20 * y20));
    }
    return total;
}

double TriangleMesh::min_signed_area() const {
    double m = std::numeric_limits<double>::max();
    for (const auto& t : triangles)
        m = std::min(m, signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]));
    return m;
}

int default_resolution(const TrianglePose& pose, double h, double trunc_R) {
    const double a = pose.spec.a;
    if (pose.spec.ideal())
        return std::min(400, std::max(6, (int)std::llround(a / h)));
    const double len3 = pose.side_c, len2 = pose.spec.l;
    return std::min(320, std::max(8, (int)std::llround(std::max({a, len2, len3}) / h)));
}

TriangleMesh build_mesh(const TrianglePose& pose, double h, double trunc_R,
                        const MeshGrading& grading) {
    if (!(h > 0.0)) throw GeometryError("build_mesh: h must be positive");
    const bool ideal = pose.spec.ideal();
    if (ideal && !(trunc_R > 0.0)) throw GeometryError("build_mesh: trunc_R must be positive");

    const double a = pose.spec.a;
    const double len3 = ideal ? trunc_R : pose.side_c;      // along l3 from p2
    const double len2 = ideal ? trunc_R : pose.spec.l;      // along l2 from p3

    const SideSampler s1(pose.l1, pose.p2, pose.dir_l1_at_p2);
    const SideSampler s3(pose.l3, pose.p2, pose.dir_l3_at_p2);
    const SideSampler s2(pose.l2, pose.p3, pose.dir_l2_at_p3);

    // Row fractions from l1 toward the apex / truncation arc.
    std::vector<double> frac;
    if (ideal) {
        const double r = grading.row_ratio;
        const int n = std::max(
            8, (int)std::ceil(std::log(1.0 + trunc_R * (r - 1.0) / h) / std::log(r)));
        frac.resize(n + 1);
        for (int j = 0; j <= n; ++j)
            frac[j] = (std::pow(r, j) - 1.0) / (std::pow(r, n) - 1.0);
    } else {
        const int n = grading.fixed_n > 0 ? grading.fixed_n
                                          : default_resolution(pose, h, trunc_R);
        frac.resize(n + 1);
        for (int j = 0; j <= n; ++j)
            frac[j] = two_sided((double)j / n, grading.corner_cluster);
    }
    const int nrow = (int)frac.size() - 1;

    const int ncol_base = !ideal              ? nrow
                          : grading.fixed_n > 0 ? grading.fixed_n
                                                : default_resolution(pose, h, trunc_R);

    TriangleMesh mesh;
    mesh.h = h;
    mesh.truncated = ideal;
    mesh.trunc_R = ideal ? trunc_R : 0.0;

    // rows[j][i] = vertex index
    std::vector<std::vector<int>> rows(nrow + 1);
    for (int j = 0; j <= nrow; ++j) {
        const HPoint A = s3.at(frac[j] * len3);
        const HPoint B = s2.at(frac[j] * len2);
        const int m = ideal ? ncol_base + 1 : ncol_base + 1 - j;
        rows[j].resize(std::max(m, 1));
        if (m <= 1) {
            rows[j][0] = (int)mesh.vertices.size();
            mesh.vertices.push_back(A); // apex: A == B == p1
            continue;
        }
        const double len = dist(A, B);
        const SideSampler row(Geodesic::through(A, B), A, direction_angle(A, B));
        for (int i = 0; i < m; ++i) {
            double s = (double)i / (m - 1);
            s = one_sided(two_sided(s, grading.corner_cluster), grading.l2_power);
            rows[j][i] = (int)mesh.vertices.size();
            if (i == 0)
                mesh.vertices.push_back(A);
            else if (i == m - 1)
                mesh.vertices.push_back(B);
            else
                mesh.vertices.push_back(row.at(s * len));
        }
    }

    for (int j = 0; j < nrow; ++j) {
        const auto& bot = rows[j];
        const auto& top = rows[j + 1];
        const int mb = (int)bot.size(), mt = (int)top.size();
        if (mt == mb) {
            for (int i = 0; i + 1 < mb; ++i) {
                mesh.triangles.push_back({bot[i], bot[i + 1], top[i]});
                mesh.triangles.push_back({bot[i + 1], top[i + 1], top[i]});
            }
        } else { // mt == mb - 1
            for (int i = 0; i + 1 < mb; ++i) {
                mesh.triangles.push_back({bot[i], bot[i + 1], top[std::min(i, mt - 1)]});
                if (i + 1 < mt)
                    mesh.triangles.push_back({bot[i + 1], top[i + 1], top[i]});
            }
        }
    }

    // Consistent chart orientation.
    if (!mesh.triangles.empty()) {
        const auto& t0 = mesh.triangles.front();
        if (signed_area(mesh.vertices[t0[0]], mesh.vertices[t0[1]], mesh.vertices[t0[2]]) < 0.0)
            for (auto& t : mesh.triangles) std::swap(t[1], t[2]);
    }
    if (mesh.min_signed_area() <= 0.0)
        throw GeometryError("build_mesh: inverted element (domain too distorted for h)");

    mesh.vp2 = rows[0].front();
    mesh.vp3 = rows[0].back();
    if (ideal) {
        mesh.vt3 = rows[nrow].front();
        mesh.vt2 = rows[nrow].back();
    } else {
        mesh.vp1 = rows[nrow].front();
    }

    std::map<std::pair<int, int>, int> edge_elem;
    for (int e = 0; e < (int)mesh.triangles.size(); ++e) {
        const auto& t = mesh.triangles[e];
        for (int k = 0; k < 3; ++k) {
            const int u = t[k], v = t[(k + 1) % 3];
            edge_elem[{std::min(u, v), std::max(u, v)}] = e;
        }
    }
    auto push_edge = [&](int u, int v, BoundaryTag tag) {
        TriangleMesh::BoundaryEdge be;
        be.v0 = u;
        be.v1 = v;
        be.tag = tag;
        be.elem = edge_elem.at({std::min(u, v), std::max(u, v)});
        mesh.boundary.push_back(be);
    };
    for (int i = 0; i + 1 < (int)rows[0].size(); ++i)
        push_edge(rows[0][i], rows[0][i + 1], BoundaryTag::L1);
    for (int j = 0; j < nrow; ++j)
        push_edge(rows[j].front(), rows[j + 1].front(), BoundaryTag::L3);
    for (int j = 0; j < nrow; ++j)
        push_edge(rows[j].back(), rows[j + 1].back(), BoundaryTag::L2);
    if (ideal)
        for (int i = 0; i + 1 < (int)rows[nrow].size(); ++i)
            push_edge(rows[nrow][i], rows[nrow][i + 1], BoundaryTag::Trunc);

    return mesh;
}

TriangleMesh build_rect_mesh(double x0, double x1, double y0, double y1, int nx, int ny) {
    if (!(x1 > x0 && y1 > y0 && nx >= 1 && ny >= 1))
        throw GeometryError("build_rect_mesh: bad arguments");
    TriangleMesh mesh;
    mesh.h = std::max((x1 - x0) / nx, (y1 - y0) / ny);
    auto id = [&](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            mesh.vertices.push_back(
                HPoint{x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny});
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i, j + 1)});
            mesh.triangles.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    std::map<std::pair<int, int>, int> edge_elem;
    for (int e = 0; e < (int)mesh.triangles.size(); ++e) {
        const auto& t = mesh.triangles[e];
        for (int k = 0; k < 3; ++k) {
            const int u = t[k], v = t[(k + 1) % 3];
            edge_elem[{std::min(u, v), std::max(u, v)}] = e;
        }
    }
    auto push_edge = [&](int u, int v) {
        TriangleMesh::BoundaryEdge be;
        be.v0 = u;
        be.v1 = v;
        be.tag = BoundaryTag::Trunc;
        be.elem = edge_elem.at({std::min(u, v), std::max(u, v)});
        mesh.boundary.push_back(be);
    };
    for (int i = 0; i < nx; ++i) push_edge(id(i, 0), id(i + 1, 0));
    for (int j = 0; j < ny; ++j) push_edge(id(nx, j), id(nx, j + 1));
    for (int i = nx; i > 0; --i) push_edge(id(i, ny), id(i - 1, ny));
    for (int j = ny; j > 0; --j) push_edge(id(0, j), id(0, j - 1));
    return mesh;
}

int locate_point(const TriangleMesh& mesh, const HPoint& p, std::array<double, 3>& bary,
                 const std::vector<int>* candidates) {
    int best = -1;
    double best_min = -1e9;
    std::array<double, 3> best_bary{};
    const int n = candidates ? (int)candidates->size() : (int)mesh.triangles.size();
    for (int k = 0; k < n; ++k) {
        const int e = candidates ? (*candidates)[k] : k;
        const auto& t = mesh.triangles[e];
        const HPoint &a = mesh.vertices[t[0]], &b = mesh.vertices[t[1]],
                     &c = mesh.vertices[t[2]];
        const double A = signed_area(a, b, c);
        if (A <= 0.0) continue;
        const double l0 = signed_area(p, b, c) / A;
        const double l1 = signed_area(a, p, c) / A;
        const double l2 = 1.0 - l0 - l1;
        const double mn = std::min({l0, l1, l2});
        if (mn > best_min) {
            best_min = mn;
            best = e;
            best_bary = {l0, l1, l2};
        }
        if (mn >= 0.0) break;
    }
    if (best_min < -1e-6) return -1;
    bary = best_bary;
    return best;
}

} // namespace h2r
