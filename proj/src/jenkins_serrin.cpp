#include "h2r/jenkins_serrin.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace h2r {

namespace {
constexpr double kPi = 3.14159265358979323846;

struct ElemGeom {
    std::array<int, 3> v;
    double area = 0.0;
    std::array<std::array<double, 2>, 3> dphi; // basis gradients
    std::array<double, 3> ymid;                // y at the three edge midpoints
};

std::vector<ElemGeom> precompute(const TriangleMesh& mesh) {
    std::vector<ElemGeom> geo(mesh.triangles.size());
    for (size_t e = 0; e < mesh.triangles.size(); ++e) {
        const auto& t = mesh.triangles[e];
        const HPoint p0 = mesh.vertices[t[0]], p1 = mesh.vertices[t[1]],
                     p2 = mesh.vertices[t[2]];
        const double twoA =
            (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
        if (!(twoA > 0.0)) throw SolverError("solve_graph: inverted element");
        ElemGeom& g = geo[e];
        g.v = t;
        g.area = 0.5 * twoA;
        g.dphi[0] = {(p1.y - p2.y) / twoA, (p2.x - p1.x) / twoA};
        g.dphi[1] = {(p2.y - p0.y) / twoA, (p0.x - p2.x) / twoA};
        g.dphi[2] = {(p0.y - p1.y) / twoA, (p1.x - p0.x) / twoA};
        g.ymid[0] = 0.5 * (p0.y + p1.y);
        g.ymid[1] = 0.5 * (p1.y + p2.y);
        g.ymid[2] = 0.5 * (p2.y + p0.y);
    }
    return geo;
}

// Element energy, gradient and Hessian with edge-midpoint quadrature.
// `laplace` replaces W by 1, turning the step into the plain Laplacian
// used for the initial guess.
double element_terms(const ElemGeom& g, const std::vector<double>& u, bool laplace,
                     std::array<double, 9>& He, std::array<double, 3>& ge) {
    double gx = 0.0, gy = 0.0;
    for (int i = 0; i < 3; ++i) {
        gx += u[g.v[i]] * g.dphi[i][0];
        gy += u[g.v[i]] * g.dphi[i][1];
    }
    const double g2 = gx * gx + gy * gy;
    std::array<double, 3> gd;
    for (int i = 0; i < 3; ++i) gd[i] = gx * g.dphi[i][0] + gy * g.dphi[i][1];

    He.fill(0.0);
    ge.fill(0.0);
    double energy = 0.0;
    const double w = g.area / 3.0;
    for (int q = 0; q < 3; ++q) {
        const double y2 = g.ymid[q] * g.ymid[q];
        const double W = laplace ? 1.0 : std::sqrt(1.0 + y2 * g2);
        energy += w * W / y2;
        const double c1 = 1.0 / W;
        const double c2 = laplace ? 0.0 : y2 / (W * W * W);
        for (int i = 0; i < 3; ++i) {
            ge[i] += w * c1 * gd[i];
            for (int j = 0; j < 3; ++j) {
                const double dd =
                    g.dphi[i][0] * g.dphi[j][0] + g.dphi[i][1] * g.dphi[j][1];
                He[3 * i + j] += w * (c1 * dd - c2 * gd[i] * gd[j]);
            }
        }
    }
    return energy;
}

double element_energy(const ElemGeom& g, const std::vector<double>& u) {
    double gx = 0.0, gy = 0.0;
    for (int i = 0; i < 3; ++i) {
        gx += u[g.v[i]] * g.dphi[i][0];
        gy += u[g.v[i]] * g.dphi[i][1];
    }
    const double g2 = gx * gx + gy * gy;
    double energy = 0.0;
    for (int q = 0; q < 3; ++q) {
        const double y2 = g.ymid[q] * g.ymid[q];
        energy += (g.area / 3.0) * std::sqrt(1.0 + y2 * g2) / y2;
    }
    return energy;
}

} // namespace

DirichletData triangle_dirichlet(const TriangleMesh& mesh, double b, double N) {
    if (!(b >= 0.0) || !(N >= b))
        throw SolverError("triangle_dirichlet: need N >= b >= 0");
    const int n = (int)mesh.vertices.size();
    std::vector<double> sum(n, 0.0);
    std::vector<int> cnt(n, 0);
    std::vector<unsigned> seen(n, 0); // bitmask of tags already counted
    auto add = [&](int v, BoundaryTag tag, double val) {
        const unsigned bit = 1u << (int)tag;
        if (seen[v] & bit) return;
        seen[v] |= bit;
        sum[v] += val;
        ++cnt[v];
    };
    for (const auto& e : mesh.boundary) {
        double val = 0.0;
        switch (e.tag) {
            case BoundaryTag::L1: val = b; break;
            case BoundaryTag::L2: val = N; break;
            case BoundaryTag::L3: val = 0.0; break;
            default: continue; // truncation arc handled below
        }
        add(e.v0, e.tag, val);
        add(e.v1, e.tag, val);
    }
    const auto trunc = mesh.side(BoundaryTag::Trunc);
    if (!trunc.empty()) {
        // runs from the l3 cut (value 0) to the l2 cut (value N)
        double total = 0.0;
        for (const auto& e : trunc)
            total += dist(mesh.vertices[e.v0], mesh.vertices[e.v1]);
        double s = 0.0;
        add(trunc.front().v0, BoundaryTag::Trunc, 0.0);
        for (const auto& e : trunc) {
            s += dist(mesh.vertices[e.v0], mesh.vertices[e.v1]);
            add(e.v1, BoundaryTag::Trunc, N * s / total);
        }
    }
    DirichletData bc;
    bc.fixed.assign(n, 0);
    bc.value.assign(n, 0.0);
    for (int v = 0; v < n; ++v) {
        if (cnt[v] == 0) continue;
        bc.fixed[v] = 1;
        bc.value[v] = sum[v] / cnt[v];
    }
    return bc;
}

double tilt_W(const GraphSolution& sol, int elem, double y) {
    const auto& g = sol.grad[elem];
    return std::sqrt(1.0 + y * y * (g[0] * g[0] + g[1] * g[1]));
}

GraphSolution solve_graph(const TriangleMesh& mesh, const DirichletData& bc,
                          const SolveOptions& opts) {
    const int n = (int)mesh.vertices.size();
    const int ne = (int)mesh.triangles.size();
    if ((int)bc.fixed.size() != n || (int)bc.value.size() != n)
        throw SolverError("solve_graph: Dirichlet data size mismatch");

    const std::vector<ElemGeom> geo = precompute(mesh);

    std::vector<int> fidx(n, -1);
    int nf = 0;
    for (int v = 0; v < n; ++v)
        if (!bc.fixed[v]) fidx[v] = nf++;

    std::vector<double> u(n, 0.0);
    for (int v = 0; v < n; ++v)
        if (bc.fixed[v]) u[v] = bc.value[v];

    GraphSolution sol;
    auto fill_derived = [&](const std::vector<double>& v) {
        sol.u = v;
        sol.grad.assign(ne, {0.0, 0.0});
        for (int e = 0; e < ne; ++e) {
            for (int i = 0; i < 3; ++i) {
                sol.grad[e][0] += v[geo[e].v[i]] * geo[e].dphi[i][0];
                sol.grad[e][1] += v[geo[e].v[i]] * geo[e].dphi[i][1];
            }
        }
        double en = 0.0;
        for (int e = 0; e < ne; ++e) en += element_energy(geo[e], v);
        sol.energy = en;
    };

    if (nf == 0) {
        fill_derived(u);
        return sol;
    }

    std::vector<std::array<double, 9>> He(ne);
    std::vector<std::array<double, 3>> Ge(ne);
    std::vector<double> Ee(ne);

    auto assemble_elements = [&](const std::vector<double>& v, bool laplace) {
        if (opts.parallel) {
#pragma omp parallel for schedule(static)
            for (int e = 0; e < ne; ++e)
                Ee[e] = element_terms(geo[e], v, laplace, He[e], Ge[e]);
        } else {
            for (int e = 0; e < ne; ++e)
                Ee[e] = element_terms(geo[e], v, laplace, He[e], Ge[e]);
        }
    };

    Eigen::VectorXd grad(nf);
    Eigen::SparseMatrix<double> H(nf, nf);
    std::vector<Eigen::Triplet<double>> trip;

    // Ordered scatter: element order is fixed, so the result does not
    // depend on the thread count used above.
    auto reduce = [&]() {
        grad.setZero();
        trip.clear();
        for (int e = 0; e < ne; ++e) {
            for (int i = 0; i < 3; ++i) {
                const int gi = fidx[geo[e].v[i]];
                if (gi < 0) continue;
                grad[gi] += Ge[e][i];
                for (int j = 0; j < 3; ++j) {
                    const int gj = fidx[geo[e].v[j]];
                    if (gj >= 0) trip.emplace_back(gi, gj, He[e][3 * i + j]);
                }
            }
        }
        H.setFromTriplets(trip.begin(), trip.end());
        return std::accumulate(Ee.begin(), Ee.end(), 0.0);
    };

    auto energy_at = [&](const std::vector<double>& v) {
        if (opts.parallel) {
#pragma omp parallel for schedule(static)
            for (int e = 0; e < ne; ++e) Ee[e] = element_energy(geo[e], v);
        } else {
            for (int e = 0; e < ne; ++e) Ee[e] = element_energy(geo[e], v);
        }
        return std::accumulate(Ee.begin(), Ee.end(), 0.0);
    };

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;

    // harmonic-like start: one exact step on the Laplace functional
    assemble_elements(u, true);
    reduce();
    ldlt.compute(H);
    if (ldlt.info() != Eigen::Success)
        throw SolverError("solve_graph: singular Laplace system");
    Eigen::VectorXd d = ldlt.solve(-grad);
    for (int v = 0; v < n; ++v)
        if (fidx[v] >= 0) u[v] += d[fidx[v]];

    double res0 = -1.0, res = 0.0;
    bool done = false;
    std::vector<double> trial(n);
    for (int it = 0; it <= opts.max_iter; ++it) {
        assemble_elements(u, false);
        const double E0 = reduce();
        res = grad.lpNorm<Eigen::Infinity>();
        if (res0 < 0.0) res0 = res;
        if (res <= opts.tol * (1.0 + res0)) {
            sol.iterations = it;
            done = true;
            break;
        }
        if (it == opts.max_iter) break;

        ldlt.compute(H);
        if (ldlt.info() != Eigen::Success)
            throw SolverError("solve_graph: singular linearization");
        d = ldlt.solve(-grad);
        const double gTd = grad.dot(d); // <= 0 by convexity

        double unorm = 0.0;
        for (double v : u) unorm = std::max(unorm, std::fabs(v));
        if (d.lpNorm<Eigen::Infinity>() <= 1e-13 * (1.0 + unorm)) {
            // step below roundoff; the residual is as small as it gets
            sol.iterations = it;
            done = true;
            break;
        }

        double s = 1.0;
        for (int half = 0;; ++half) {
            trial = u;
            for (int v = 0; v < n; ++v)
                if (fidx[v] >= 0) trial[v] += s * d[fidx[v]];
            if (energy_at(trial) <= E0 + 1e-4 * s * gTd + 1e-14 * std::fabs(E0) ||
                half >= 40)
                break;
            s *= 0.5;
        }
        u.swap(trial);
    }
    if (!done)
        throw SolverError("solve_graph: no convergence, relative residual " +
                          std::to_string(res / (1.0 + res0)));
    sol.residual = res / (1.0 + res0);
    fill_derived(u);
    return sol;
}

// Variational flux: the energy-gradient entries at the l1 nodes equal the
// discrete inward flux through l1 tested against the nodal hat functions
// (Green's identity; the y-weights of arclength and normal cancel).  Corner
// hats straddle two sides and contribute half.  Second-order accurate where
// the raw normal-derivative quadrature is only first-order.
double flux_P1(const TriangleMesh& mesh, const GraphSolution& sol) {
    if (mesh.side(BoundaryTag::L1).empty())
        throw SolverError("flux_P1: mesh has no l1 edges");
    std::vector<char> on_l1(mesh.vertices.size(), 0), on_other(mesh.vertices.size(), 0);
    for (const auto& e : mesh.boundary) {
        auto& mark = e.tag == BoundaryTag::L1 ? on_l1 : on_other;
        mark[e.v0] = 1;
        mark[e.v1] = 1;
    }
    std::vector<double> w(mesh.vertices.size(), 0.0);
    for (size_t v = 0; v < w.size(); ++v)
        if (on_l1[v]) w[v] = on_other[v] ? 0.5 : 1.0;
    double total = 0.0;
    for (size_t e = 0; e < mesh.triangles.size(); ++e) {
        const auto& t = mesh.triangles[e];
        if (w[t[0]] == 0.0 && w[t[1]] == 0.0 && w[t[2]] == 0.0) continue;
        const HPoint p0 = mesh.vertices[t[0]], p1 = mesh.vertices[t[1]],
                     p2 = mesh.vertices[t[2]];
        const double twoA =
            (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
        const std::array<std::array<double, 2>, 3> dphi{
            {{(p1.y - p2.y) / twoA, (p2.x - p1.x) / twoA},
             {(p2.y - p0.y) / twoA, (p0.x - p2.x) / twoA},
             {(p0.y - p1.y) / twoA, (p1.x - p0.x) / twoA}}};
        const auto& g = sol.grad[e];
        const std::array<double, 3> ym{0.5 * (p0.y + p1.y), 0.5 * (p1.y + p2.y),
                                       0.5 * (p2.y + p0.y)};
        for (int q = 0; q < 3; ++q) {
            const double iW = 1.0 / tilt_W(sol, (int)e, ym[q]);
            for (int i = 0; i < 3; ++i)
                if (w[t[i]] != 0.0)
                    total -= w[t[i]] * (twoA / 6.0) *
                             (g[0] * dphi[i][0] + g[1] * dphi[i][1]) * iW;
        }
    }
    return total;
}

NuProfile angle_profile_nu(const TriangleMesh& mesh, const GraphSolution& sol,
                           BoundaryTag side) {
    const auto edges = mesh.side(side);
    if (edges.empty()) throw SolverError("angle_profile_nu: side has no edges");
    NuProfile out;
    double s = 0.0;
    for (const auto& e : edges) {
        const HPoint p0 = mesh.vertices[e.v0], p1 = mesh.vertices[e.v1];
        const double len = dist(p0, p1);
        out.s.push_back(s + 0.5 * len);
        out.nu.push_back(1.0 / tilt_W(sol, e.elem, 0.5 * (p0.y + p1.y)));
        s += len;
    }
    return out;
}

RotationProfile rotation_profile_psi(const TriangleMesh& mesh, const GraphSolution& sol,
                                     const TrianglePose& pose, Corner corner, double t_lo,
                                     double t_hi, int samples) {
    if (!(t_hi > t_lo)) throw SolverError("rotation_profile_psi: empty height range");
    if (samples < 3) throw SolverError("rotation_profile_psi: need >= 3 samples");

    HPoint v;
    double a_lo, a_hi;
    if (corner == Corner::P2) {
        v = pose.p2;
        a_lo = pose.dir_l3_at_p2; // level {u = t_lo} leaves along l3
        a_hi = pose.dir_l1_at_p2;
    } else if (corner == Corner::P3) {
        v = pose.p3;
        a_lo = pose.dir_l1_at_p3;
        a_hi = pose.dir_l2_at_p3;
    } else {
        if (pose.spec.ideal())
            throw SolverError("rotation_profile_psi: p1 is ideal");
        v = pose.p1;
        a_lo = pose.dir_l3_at_p1;
        a_hi = pose.dir_l2_at_p1;
    }
    const double delta = std::remainder(a_hi - a_lo, 2.0 * kPi);
    const double angle = std::fabs(delta);
    const double sgn = delta >= 0.0 ? 1.0 : -1.0;

    const int m = 160;
    auto sample_arc = [&](double radius, std::vector<double>& fr, std::vector<double>& uv) {
        std::array<double, 3> bary{};
        for (int j = 0; j < m; ++j) {
            const double frac = (j + 0.5) / m;
            const HPoint p = geodesic_step(v, a_lo + sgn * frac * angle, radius);
            const int e = locate_point(mesh, p, bary);
            if (e < 0) continue;
            const auto& t = mesh.triangles[e];
            fr.push_back(frac);
            uv.push_back(bary[0] * sol.u[t[0]] + bary[1] * sol.u[t[1]] +
                         bary[2] * sol.u[t[2]]);
        }
    };
    std::vector<double> fr1, uv1, fr2, uv2;
    sample_arc(5.0 * mesh.h, fr1, uv1);
    sample_arc(2.5 * mesh.h, fr2, uv2);

    auto crossing = [](const std::vector<double>& fr, const std::vector<double>& uv,
                       double t) {
        for (size_t j = 1; j < uv.size(); ++j) {
            const double d0 = uv[j - 1] - t, d1 = uv[j] - t;
            if (d0 == 0.0) return fr[j - 1];
            if (d0 * d1 < 0.0)
                return fr[j - 1] + (fr[j] - fr[j - 1]) * d0 / (d0 - d1);
        }
        return std::numeric_limits<double>::quiet_NaN();
    };

    RotationProfile prof;
    prof.t.push_back(t_lo);
    prof.psi.push_back(0.0);
    for (int i = 1; i + 1 < samples; ++i) {
        const double t = t_lo + (t_hi - t_lo) * i / (samples - 1.0);
        const double f1 = crossing(fr1, uv1, t), f2 = crossing(fr2, uv2, t);
        if (std::isnan(f1) || std::isnan(f2)) continue;
        const double mismatch = std::fabs(f2 - f1) * angle;
        prof.max_disagreement = std::max(prof.max_disagreement, mismatch);
        if (mismatch > 0.05) ++prof.flagged_samples;
        const double f = std::clamp(2.0 * f2 - f1, 0.0, 1.0); // radius extrapolation
        prof.t.push_back(t);
        prof.psi.push_back(f * angle);
        ++prof.interior_samples;
    }
    prof.t.push_back(t_hi);
    prof.psi.push_back(angle);
    for (size_t i = 1; i < prof.psi.size(); ++i)
        prof.psi[i] = std::clamp(std::max(prof.psi[i], prof.psi[i - 1]), 0.0, angle);
    return prof;
}

} // namespace h2r
