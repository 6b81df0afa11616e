#include "h2r/surface_builder.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace h2r {

namespace {
constexpr double kPi = 3.14159265358979323846;

struct Chain {
    std::vector<HPoint> p;
    std::vector<double> z;

    void add(const HPoint& q, double h) {
        if (!p.empty() && std::hypot(q.x - p.back().x, q.y - p.back().y) < 1e-14)
            return;
        p.push_back(q);
        z.push_back(h);
    }
};

double cross(const HPoint& o, const HPoint& a, const HPoint& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool segments_cross(const HPoint& a, const HPoint& b, const HPoint& c, const HPoint& d) {
    const double d1 = cross(a, b, c), d2 = cross(a, b, d);
    const double d3 = cross(c, d, a), d4 = cross(c, d, b);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

Isometry power(const Isometry& g, int n) {
    Isometry out = Isometry::identity();
    for (int i = 0; i < n; ++i) out = compose(g, out);
    return out;
}
} // namespace

ConjDomain build_conj_domain(const ConjBoundary& cb) {
    ConjDomain dom;
    dom.gamma = cb.gamma;
    Chain chain;

    // v2 in slice 0, from (0,1) to (x0, y0)
    dom.corner[0] = 0;
    for (size_t i = 0; i < cb.v2.t.size(); ++i)
        chain.add(HPoint{cb.v2.x[i], cb.v2.y[i]}, 0.0);

    // h1 along gamma
    dom.corner[1] = (int)chain.p.size() - 1;
    for (size_t i = 0; i < cb.h1.xi.size(); ++i)
        chain.add(cb.h1.carrier.point_at(cb.h1.xi[i]), cb.h1.z[i]);

    // v3 in its slice, clipped where its tail has collapsed onto the
    // ideal endpoint of the end it follows
    dom.corner[2] = (int)chain.p.size() - 1;
    const double y3_clip = 0.05 * cb.v3.y.front();
    for (size_t i = 0; i < cb.v3.t.size(); ++i) {
        if (i > 2 && cb.v3.y[i] < y3_clip) break;
        chain.add(HPoint{cb.v3.x[i], cb.v3.y[i]}, cb.v3_height);
    }

    // return run: truncation cut, v1 (finite l, tail clipped the same
    // way), then h3 back up to (0,1)
    dom.corner[3] = (int)chain.p.size() - 1;
    const double z_low = -cb.h3_drop;
    {
        // The cut crosses the flat deep wall: the height plunges to the
        // far-side depth within the cusp next to the clipped tail, then
        // stays essentially at that depth across to the other deep end.
        const HPoint a = chain.p.back();
        const double z_start = chain.z.back();
        const double z_deep = cb.h2.z.back();
        HPoint tgt;
        double z_tgt;
        if (cb.v1) {
            const double y1_clip = 0.05 * cb.v1->y.front();
            size_t i1 = cb.v1->t.size() - 1;
            while (i1 > 2 && cb.v1->y[i1] < y1_clip) --i1;
            tgt = HPoint{cb.v1->x[i1], cb.v1->y[i1]};
            z_tgt = z_low;
        } else {
            tgt = cb.h3.carrier.point_at(cb.h3.xi.back());
            z_tgt = cb.h3.z.back();
        }
        const int m = 24;

        // Two candidate traces for the cut.  The knee route passes just
        // inside the mirror geodesic, under the corner where the first
        // slice curve lands on it, so it clears that curve however
        // steeply it approaches; the straight chord is the fallback.
        std::vector<std::vector<HPoint>> candidates;
        if (!cb.v1 && dom.gamma.line.kind != Geodesic::Kind::Vertical &&
            dom.corner[1] > 0) {
            const HPoint q = chain.p[dom.corner[1]];
            const double gc = dom.gamma.line.c;
            const HPoint knee{gc + 0.85 * (q.x - gc), 0.85 * q.y};
            const double L1 = std::hypot(knee.x - a.x, knee.y - a.y);
            const double L2 = std::hypot(tgt.x - knee.x, tgt.y - knee.y);
            const int m1 = std::max(
                4, std::min(m - 4, (int)std::lround(m * L1 / (L1 + L2))));
            std::vector<HPoint> route;
            for (int i = 1; i <= m1; ++i) {
                const double f = (double)i / m1;
                route.push_back(
                    HPoint{a.x + f * (knee.x - a.x), a.y + f * (knee.y - a.y)});
            }
            for (int i = 1; i < m - m1; ++i) {
                const double f = (double)i / (m - m1);
                route.push_back(HPoint{knee.x + f * (tgt.x - knee.x),
                                       knee.y + f * (tgt.y - knee.y)});
            }
            candidates.push_back(std::move(route));
        }
        {
            std::vector<HPoint> chord;
            for (int i = 1; i < m; ++i) {
                const double f = (double)i / m;
                chord.push_back(
                    HPoint{a.x + f * (tgt.x - a.x), a.y + f * (tgt.y - a.y)});
            }
            candidates.push_back(std::move(chord));
        }
        const std::vector<HPoint>* cut = &candidates.back();
        for (const auto& cand : candidates) {
            bool clean = true;
            const int nc = (int)chain.p.size();
            for (size_t i = 0; i + 1 < cand.size() + 2 && clean; ++i) {
                const HPoint s0 = (i == 0) ? a : cand[i - 1];
                const HPoint s1 = (i == cand.size()) ? tgt : cand[i];
                for (int j = 0; j + 1 < nc; ++j) {
                    if (i == 0 && j >= nc - 2) continue; // shares the tip
                    if (segments_cross(s0, s1, chain.p[j], chain.p[j + 1])) {
                        clean = false;
                        break;
                    }
                }
            }
            if (clean) {
                cut = &cand;
                break;
            }
        }

        double L = 0.0;
        {
            HPoint prev = a;
            for (const HPoint& q : *cut) {
                L += std::hypot(q.x - prev.x, q.y - prev.y);
                prev = q;
            }
            L += std::hypot(tgt.x - prev.x, tgt.y - prev.y);
        }
        const double w = std::min(0.25 * L, 2.0 * y3_clip);
        double s = 0.0;
        HPoint prev = a;
        for (const HPoint& q : *cut) {
            s += std::hypot(q.x - prev.x, q.y - prev.y);
            prev = q;
            double z;
            if (s <= w)
                z = z_start + (s / w) * (z_deep - z_start);
            else
                z = z_deep + (s - w) / (L - w) * (z_tgt - z_deep);
            chain.add(q, z);
        }
    }
    if (cb.v1) {
        const double y1_clip = 0.05 * cb.v1->y.front();
        for (size_t i = cb.v1->t.size(); i-- > 0;) {
            if (i > 2 && cb.v1->y[i] < y1_clip) continue;
            chain.add(HPoint{cb.v1->x[i], cb.v1->y[i]}, z_low);
        }
    }
    for (size_t i = cb.h3.xi.size(); i-- > 0;) {
        const HPoint q = cb.h3.carrier.point_at(cb.h3.xi[i]);
        if (i == 0) break; // closes at (0,1)
        chain.add(q, cb.h3.z[i]);
    }

    dom.poly = std::move(chain.p);
    dom.height = std::move(chain.z);
    const int n = (int)dom.poly.size();
    if (n < 4) throw BuildError("build_conj_domain: degenerate boundary");

    double area2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const HPoint &p = dom.poly[i], &q = dom.poly[(i + 1) % n];
        area2 += p.x * q.y - q.x * p.y;
    }
    dom.signed_area = 0.5 * area2;
    if (!(dom.signed_area > 0.0))
        throw BuildError("build_conj_domain: boundary not positively oriented");

    for (int i = 0; i < n; ++i) {
        for (int j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue; // adjacent around the wrap
            if (segments_cross(dom.poly[i], dom.poly[(i + 1) % n], dom.poly[j],
                               dom.poly[(j + 1) % n])) {
                std::ostringstream os;
                os << "build_conj_domain: boundary self-intersects near ("
                   << dom.poly[i].x << ", " << dom.poly[i].y << "), segments " << i
                   << " and " << j << " at (" << dom.poly[j].x << ", " << dom.poly[j].y
                   << ") of " << n << ", corners " << dom.corner[1] << " "
                   << dom.corner[2] << " " << dom.corner[3];
                throw BuildError(os.str());
            }
        }
    }
    return dom;
}

bool reflection_overlap_free(const ConjDomain& dom, double tol) {
    const Geodesic& g = dom.gamma.line;
    int pos = 0, neg = 0;
    // Only the physical boundary (slice curves and the mirror arc,
    // indices 0..corner[3]) counts: the truncation cut that closes the
    // polygon across the deep end is an artifact of compactifying the
    // shadow and may duck under the mirror geodesic.
    for (int i = 0; i <= dom.corner[3] && i < (int)dom.poly.size(); ++i) {
        const HPoint& p = dom.poly[i];
        double d;
        if (g.kind == Geodesic::Kind::Vertical)
            d = p.x - g.c;
        else
            d = std::hypot(p.x - g.c, p.y) - g.r;
        if (d > tol)
            ++pos;
        else if (d < -tol)
            ++neg;
    }
    return pos == 0 || neg == 0;
}

ConjPiece solve_conjugate_graph(const ConjDomain& dom, int n, const SolveOptions& opts) {
    if (n < 8) throw BuildError("solve_conjugate_graph: need n >= 8");
    const int np = (int)dom.poly.size();

    // target edge length: the boundary is split into roughly n pieces
    double perim = 0.0;
    for (int i = 0; i < np; ++i)
        perim += dist(dom.poly[i], dom.poly[(i + 1) % np]);
    const double ht = perim / n;
    // Ear clipping runs on a moderate resample; the refinement stage
    // below brings the boundary down to the target spacing.
    const double hb = perim / std::min(n, 64);

    // --- boundary resampled at hyperbolic spacing hb ---------------------
    std::vector<HPoint> pts;
    std::vector<double> zval;
    std::vector<char> on_bdy;
    auto push = [&](const HPoint& p, double z, bool bdy) {
        pts.push_back(p);
        zval.push_back(z);
        on_bdy.push_back(bdy ? 1 : 0);
        return (int)pts.size() - 1;
    };
    std::vector<char> is_corner(np, 0);
    for (int c : dom.corner) is_corner[c] = 1;
    push(dom.poly[0], dom.height[0], true);
    double acc = 0.0;
    for (int i = 0; i < np; ++i) {
        const int j = (i + 1) % np;
        const HPoint &a = dom.poly[i], &b = dom.poly[j];
        const double d = dist(a, b);
        if (d > 1.5 * hb) { // long straight edge: subdivide it directly
            const int k = (int)std::ceil(d / hb);
            for (int q = 1; q < k; ++q) {
                const double w = (double)q / k;
                push(HPoint{a.x + w * (b.x - a.x), a.y + w * (b.y - a.y)},
                     dom.height[i] + w * (dom.height[j] - dom.height[i]), true);
            }
            acc = 0.0;
            if (j != 0) push(b, dom.height[j], true);
            continue;
        }
        acc += d;
        if ((acc >= hb || is_corner[j]) && j != 0) {
            push(b, dom.height[j], true);
            acc = 0.0;
        }
    }
    const int nb = (int)pts.size();
    if (nb < 4) throw BuildError("solve_conjugate_graph: boundary too coarse");

    // --- ear clipping of the simple boundary polygon ---------------------
    std::vector<std::array<int, 3>> tris;
    {
        std::vector<int> ring(nb);
        for (int i = 0; i < nb; ++i) ring[i] = i;
        auto tri_ok = [&](int t, bool strict) {
            const int r = (int)ring.size();
            const int i0 = ring[(t + r - 1) % r], i1 = ring[t], i2 = ring[(t + 1) % r];
            const double a2 = cross(pts[i0], pts[i1], pts[i2]);
            if (a2 <= 1e-14) return false;
            if (!strict) return true;
            for (int u : ring) {
                if (u == i0 || u == i1 || u == i2) continue;
                if (cross(pts[i0], pts[i1], pts[u]) > 0.0 &&
                    cross(pts[i1], pts[i2], pts[u]) > 0.0 &&
                    cross(pts[i2], pts[i0], pts[u]) > 0.0)
                    return false;
            }
            return true;
        };
        while ((int)ring.size() > 3) {
            bool clipped = false;
            for (int t = 0; t < (int)ring.size(); ++t) {
                if (!tri_ok(t, true)) continue;
                const int r = (int)ring.size();
                tris.push_back({ring[(t + r - 1) % r], ring[t], ring[(t + 1) % r]});
                ring.erase(ring.begin() + t);
                clipped = true;
                break;
            }
            if (clipped) continue;
            // numerical fallback: clip the widest convex corner
            int bt = -1;
            double ba = 0.0;
            for (int t = 0; t < (int)ring.size(); ++t) {
                const int r = (int)ring.size();
                const double a2 = cross(pts[ring[(t + r - 1) % r]], pts[ring[t]],
                                        pts[ring[(t + 1) % r]]);
                if (a2 > ba) {
                    ba = a2;
                    bt = t;
                }
            }
            if (bt < 0) throw BuildError("solve_conjugate_graph: ear clipping failed");
            const int r = (int)ring.size();
            tris.push_back({ring[(bt + r - 1) % r], ring[bt], ring[(bt + 1) % r]});
            ring.erase(ring.begin() + bt);
        }
        tris.push_back({ring[0], ring[1], ring[2]});
    }

    // --- refinement to target size with flips and smoothing --------------
    std::map<std::pair<int, int>, char> bedge;
    for (int i = 0; i < nb; ++i) {
        const int j = (i + 1) % nb;
        bedge[{std::min(i, j), std::max(i, j)}] = 1;
    }
    auto key = [](int u, int v) { return std::make_pair(std::min(u, v), std::max(u, v)); };
    auto area2_of = [&](const std::array<int, 3>& t) {
        return cross(pts[t[0]], pts[t[1]], pts[t[2]]);
    };

    for (int pass = 0; pass < 40; ++pass) {
        // split every edge longer than the target
        std::map<std::pair<int, int>, int> mid;
        for (const auto& t : tris)
            for (int k = 0; k < 3; ++k) {
                const int u = t[k], v = t[(k + 1) % 3];
                const auto e = key(u, v);
                if (mid.count(e) || dist(pts[u], pts[v]) <= 1.4 * ht) continue;
                const bool bd = bedge.count(e) > 0;
                const int m = push(HPoint{0.5 * (pts[u].x + pts[v].x),
                                          0.5 * (pts[u].y + pts[v].y)},
                                   0.5 * (zval[u] + zval[v]), bd);
                mid[e] = m;
                if (bd) {
                    bedge.erase(e);
                    bedge[key(u, m)] = 1;
                    bedge[key(m, v)] = 1;
                }
            }
        if (!mid.empty()) {
            std::vector<std::array<int, 3>> next;
            for (const auto& t : tris) {
                int m01 = mid.count(key(t[0], t[1])) ? mid[key(t[0], t[1])] : -1;
                int m12 = mid.count(key(t[1], t[2])) ? mid[key(t[1], t[2])] : -1;
                int m20 = mid.count(key(t[2], t[0])) ? mid[key(t[2], t[0])] : -1;
                std::array<int, 3> v = t;
                std::array<int, 3> m{m01, m12, m20};
                int cnt = (m01 >= 0) + (m12 >= 0) + (m20 >= 0);
                if (cnt == 0) {
                    next.push_back(t);
                } else if (cnt == 3) {
                    next.push_back({v[0], m[0], m[2]});
                    next.push_back({m[0], v[1], m[1]});
                    next.push_back({m[2], m[1], v[2]});
                    next.push_back({m[0], m[1], m[2]});
                } else {
                    // rotate so edge 0-1 is split
                    while (m[0] < 0) {
                        std::rotate(v.begin(), v.begin() + 1, v.end());
                        std::rotate(m.begin(), m.begin() + 1, m.end());
                    }
                    if (cnt == 1) {
                        next.push_back({v[0], m[0], v[2]});
                        next.push_back({m[0], v[1], v[2]});
                    } else {
                        // rotate so both split edges are 0-1 and 1-2
                        if (m[1] < 0) {
                            std::rotate(v.begin(), v.begin() + 1, v.end());
                            std::rotate(m.begin(), m.begin() + 1, m.end());
                            while (m[0] < 0) {
                                std::rotate(v.begin(), v.begin() + 1, v.end());
                                std::rotate(m.begin(), m.begin() + 1, m.end());
                            }
                        }
                        next.push_back({v[0], m[0], v[2]});
                        next.push_back({m[0], m[1], v[2]});
                        next.push_back({m[0], v[1], m[1]});
                    }
                }
            }
            tris.swap(next);
        }

        // Delaunay flips of interior edges
        for (int fp = 0; fp < 3; ++fp) {
            std::map<std::pair<int, int>, std::array<int, 2>> adj;
            for (int e = 0; e < (int)tris.size(); ++e)
                for (int k = 0; k < 3; ++k) {
                    auto& slot = adj[key(tris[e][k], tris[e][(k + 1) % 3])];
                    if (slot[0] == 0 && slot[1] == 0) slot = {e + 1, 0};
                    else slot[1] = e + 1;
                }
            bool any = false;
            for (const auto& [e, slot] : adj) {
                if (slot[1] == 0 || bedge.count(e)) continue;
                const int ta = slot[0] - 1, tb = slot[1] - 1;
                auto& A = tris[ta];
                auto& B = tris[tb];
                int c = -1, d = -1, a = e.first, b = e.second;
                for (int x : A) if (x != a && x != b) c = x;
                for (int x : B) if (x != a && x != b) d = x;
                if (c < 0 || d < 0 || c == d) continue;
                // incircle test on the CCW triangle containing c
                std::array<int, 3> ccw = A;
                if (area2_of(ccw) < 0.0) ccw = {A[0], A[2], A[1]};
                const auto& p0 = pts[ccw[0]];
                const auto& p1 = pts[ccw[1]];
                const auto& p2 = pts[ccw[2]];
                const auto& pd = pts[d];
                const double ax = p0.x - pd.x, ay = p0.y - pd.y;
                const double bx = p1.x - pd.x, by = p1.y - pd.y;
                const double cx = p2.x - pd.x, cy = p2.y - pd.y;
                const double det =
                    (ax * ax + ay * ay) * (bx * cy - by * cx) -
                    (bx * bx + by * by) * (ax * cy - ay * cx) +
                    (cx * cx + cy * cy) * (ax * by - ay * bx);
                if (det <= 1e-14) continue;
                const std::array<int, 3> NA{a, d, c}, NB{d, b, c};
                if (cross(pts[NA[0]], pts[NA[1]], pts[NA[2]]) <= 1e-14 ||
                    cross(pts[NB[0]], pts[NB[1]], pts[NB[2]]) <= 1e-14)
                    continue;
                A = NA;
                B = NB;
                any = true;
                break; // adjacency is stale after a flip
            }
            if (!any) break;
        }

        // guarded Laplace smoothing of interior vertices
        for (int sp = 0; sp < 2; ++sp) {
            std::vector<std::vector<int>> nbr(pts.size());
            std::vector<std::vector<int>> vtris(pts.size());
            for (int e = 0; e < (int)tris.size(); ++e)
                for (int k = 0; k < 3; ++k) {
                    nbr[tris[e][k]].push_back(tris[e][(k + 1) % 3]);
                    vtris[tris[e][k]].push_back(e);
                }
            for (size_t v = 0; v < pts.size(); ++v) {
                if (on_bdy[v] || nbr[v].empty()) continue;
                HPoint c{0.0, 0.0};
                for (int u : nbr[v]) {
                    c.x += pts[u].x;
                    c.y += pts[u].y;
                }
                c.x /= nbr[v].size();
                c.y /= nbr[v].size();
                const HPoint old = pts[v];
                pts[v] = c;
                for (int e : vtris[v])
                    if (area2_of(tris[e]) <= 1e-14) {
                        pts[v] = old;
                        break;
                    }
            }
        }

        bool done = true;
        for (const auto& t : tris)
            for (int k = 0; k < 3 && done; ++k)
                if (dist(pts[t[k]], pts[t[(k + 1) % 3]]) > 1.4 * ht) done = false;
        if (done && pass > 0) break;
    }

    // --- assemble the solver mesh ----------------------------------------
    TriangleMesh mesh;
    mesh.h = ht;
    mesh.vertices = pts;
    mesh.triangles = tris;
    if (mesh.min_signed_area() <= 0.0)
        throw BuildError("solve_conjugate_graph: degenerate element after refinement");

    std::map<std::pair<int, int>, int> edge_elem;
    for (int e = 0; e < (int)tris.size(); ++e)
        for (int k = 0; k < 3; ++k)
            edge_elem[key(tris[e][k], tris[e][(k + 1) % 3])] = e;
    for (const auto& [e, tag] : bedge) {
        (void)tag;
        if (!edge_elem.count(e)) continue;
        TriangleMesh::BoundaryEdge be;
        be.v0 = e.first;
        be.v1 = e.second;
        be.tag = BoundaryTag::Trunc;
        be.elem = edge_elem.at(e);
        mesh.boundary.push_back(be);
    }

    DirichletData bc;
    bc.fixed.assign(pts.size(), 0);
    bc.value.assign(pts.size(), 0.0);
    for (size_t v = 0; v < pts.size(); ++v)
        if (on_bdy[v]) {
            bc.fixed[v] = 1;
            bc.value[v] = zval[v];
        }

    ConjPiece piece;
    piece.sol = solve_graph(mesh, bc, opts);
    piece.mesh = std::move(mesh);
    return piece;
}

SurfaceMesh reflect_and_assemble(const ConjPiece& piece, const PeriodReport& rep,
                                 int n_copies) {
    if (rep.family == Family::Sample)
        throw BuildError("reflect_and_assemble: report carries no family");
    const bool dihedral =
        rep.family == Family::Knoid || rep.family == Family::Saddle;
    if (dihedral && rep.k < 3)
        throw BuildError("reflect_and_assemble: dihedral family needs k >= 3");

    const GammaLine g = gamma_line(rep.x0, rep.y0, rep.theta0, 1e-2);
    const Isometry R1 = Isometry::reflection(Geodesic::vertical(0.0));
    const Isometry M0 = Isometry::vertical_mirror(0.0);
    Isometry R2;
    double axis_y = 0.0;

    std::vector<Isometry> copies;
    if (dihedral) {
        if (g.contact != GammaContact::Intersecting)
            throw BuildError("reflect_and_assemble: gamma misses the axis");
        axis_y = g.axis_y;
        // snap the second mirror so the rotation R2 R1 closes exactly
        const HPoint ap{0.0, axis_y};
        const double ta = g.line.tangent_angle(ap);
        const double sgn = std::remainder(ta - 0.5 * kPi, 2.0 * kPi) >= 0.0 ? 1.0 : -1.0;
        const Geodesic snapped =
            Geodesic::from_direction(ap, 0.5 * kPi + sgn * kPi / rep.k);
        R2 = Isometry::reflection(snapped);
        const Isometry rho = compose(R2, R1);
        for (int j = 0; j < rep.k; ++j) {
            const Isometry rj = power(rho, j);
            for (const Isometry& h : {rj, compose(rj, R1)})
                for (const Isometry& v : {Isometry::identity(), M0})
                    copies.push_back(compose(h, v));
        }
    } else {
        if (n_copies < 1) throw BuildError("reflect_and_assemble: need n_copies >= 1");
        R2 = Isometry::reflection(g.line);
        const Isometry tau = compose(R2, R1);
        for (int j = 0; j < n_copies; ++j) {
            const Isometry tj = power(tau, j);
            for (const Isometry& h : {tj, compose(tj, R1)})
                for (const Isometry& v : {Isometry::identity(), M0})
                    copies.push_back(compose(h, v));
        }
    }

    SurfaceMesh out;
    out.family = rep.family;
    out.k = rep.k;
    out.axis_y = axis_y;
    out.piece_vertices = (int)piece.mesh.vertices.size();
    out.piece_faces = (int)piece.mesh.triangles.size();
    out.n_copies = (int)copies.size();
    out.generators = {R1, R2, M0};
    if (rep.family == Family::Saddle) {
        out.translation = 2.0 * rep.l;
        out.generators.push_back(Isometry::vertical_mirror(-rep.l));
    }

    for (int c = 0; c < (int)copies.size(); ++c) {
        const Isometry& T = copies[c];
        const int base = c * out.piece_vertices;
        for (int v = 0; v < out.piece_vertices; ++v) {
            const HPoint q = T.apply(piece.mesh.vertices[v]);
            out.vertices.push_back({q.x, q.y, T.apply_height(piece.sol.u[v])});
            out.copy_of.push_back(c);
        }
        for (const auto& f : piece.mesh.triangles)
            out.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
    }
    return out;
}

double piece_curvature(const TriangleMesh& mesh, const GraphSolution& sol) {
    const int nv = (int)mesh.vertices.size();
    std::vector<char> on_bdy(nv, 0);
    for (const auto& e : mesh.boundary) {
        on_bdy[e.v0] = 1;
        on_bdy[e.v1] = 1;
    }
    std::vector<double> angsum(nv, 0.0);
    for (const auto& t : mesh.triangles) {
        double len[3];
        for (int k = 0; k < 3; ++k) {
            const int a = t[k], b = t[(k + 1) % 3];
            len[k] = std::hypot(dist(mesh.vertices[a], mesh.vertices[b]),
                                sol.u[b] - sol.u[a]);
        }
        for (int k = 0; k < 3; ++k) {
            // angle at vertex k: between edges k (to k+1) and k+2 (from k+2)
            const double a = len[k], b = len[(k + 2) % 3], c = len[(k + 1) % 3];
            const double cosang =
                std::clamp((a * a + b * b - c * c) / (2.0 * a * b), -1.0, 1.0);
            angsum[t[k]] += std::acos(cosang);
        }
    }
    double total = 0.0;
    for (int v = 0; v < nv; ++v)
        if (!on_bdy[v]) total += 2.0 * kPi - angsum[v];
    return total;
}

CurvatureReport total_curvature(const TriangleMesh& mesh, const GraphSolution& sol,
                                Family family, int k, int copies) {
    CurvatureReport rep;
    rep.piece = piece_curvature(mesh, sol);
    rep.copies = copies;
    rep.total = rep.piece * copies;
    rep.mesh_h = mesh.h;
    rep.genus = 1;
    if (family == Family::Knoid) {
        rep.ends = k;
        rep.polygons = k;
        rep.predicted = 2.0 * kPi * (2 - 2 * rep.genus - rep.ends - rep.polygons);
    } else {
        rep.ends = family == Family::Saddle ? 2 * k : 0;
        rep.polygons = 0;
        rep.predicted = -kPi * copies;
    }
    return rep;
}

void export_obj(const SurfaceMesh& mesh, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw BuildError("export_obj: cannot open " + path);
    char buf[128];
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v.x, v.y, v.t);
        f << buf;
    }
    for (const auto& fc : mesh.faces)
        f << "f " << fc[0] + 1 << ' ' << fc[1] + 1 << ' ' << fc[2] + 1 << '\n';
    if (!f) throw BuildError("export_obj: write failed for " + path);
}

void export_ply(const SurfaceMesh& mesh, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw BuildError("export_ply: cannot open " + path);
    f << "ply\nformat ascii 1.0\n";
    f << "element vertex " << mesh.vertices.size() << "\n";
    f << "property double x\nproperty double y\nproperty double z\n";
    f << "element face " << mesh.faces.size() << "\n";
    f << "property list uchar int vertex_indices\nend_header\n";
    char buf[128];
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", v.x, v.y, v.t);
        f << buf;
    }
    for (const auto& fc : mesh.faces)
        f << "3 " << fc[0] << ' ' << fc[1] << ' ' << fc[2] << '\n';
    if (!f) throw BuildError("export_ply: write failed for " + path);
}

SurfaceMesh import_obj(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw BuildError("import_obj: cannot open " + path);
    SurfaceMesh mesh;
    std::string line;
    while (std::getline(f, line)) {
        std::istringstream is(line);
        std::string tag;
        is >> tag;
        if (tag == "v") {
            SurfaceMesh::Vertex v;
            is >> v.x >> v.y >> v.t;
            mesh.vertices.push_back(v);
        } else if (tag == "f") {
            std::array<int, 3> fc{};
            is >> fc[0] >> fc[1] >> fc[2];
            for (int& i : fc) --i;
            mesh.faces.push_back(fc);
        }
    }
    return mesh;
}

std::string surface_metadata(const SurfaceMesh& mesh, const PeriodReport& rep,
                             const CurvatureReport& curv) {
    nlohmann::json j;
    j["report"] = nlohmann::json::parse(rep.to_json());
    j["assembly"] = {{"family", family_name(mesh.family)},
                     {"k", mesh.k},
                     {"copies", mesh.n_copies},
                     {"piece_vertices", mesh.piece_vertices},
                     {"piece_faces", mesh.piece_faces},
                     {"axis_y", mesh.axis_y},
                     {"translation", mesh.translation}};
    j["curvature"] = {{"piece", curv.piece},
                      {"total", curv.total},
                      {"predicted", curv.predicted},
                      {"genus", curv.genus},
                      {"ends", curv.ends},
                      {"polygons", curv.polygons},
                      {"mesh_h", curv.mesh_h}};
    return j.dump(2);
}

std::array<double, 2> to_disk(const HPoint& p) {
    const double d = p.x * p.x + (p.y + 1.0) * (p.y + 1.0);
    return {(p.x * p.x + p.y * p.y - 1.0) / d, -2.0 * p.x / d};
}

} // namespace h2r
