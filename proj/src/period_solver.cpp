#include "h2r/period_solver.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

namespace h2r {

namespace {
constexpr double kPi = 3.14159265358979323846;

// Everything needed to evaluate P1 at one (a, phi, l): the mesh is built
// once and reused across all b evaluations.
struct Stage {
    TrianglePose pose;
    TriangleMesh mesh;
    double diam = 0.0;
    const PipelineConfig& cfg;
    int solves = 0;

    Stage(const TriangleSpec& spec, const PipelineConfig& c)
        : pose(layout_triangle(spec)), mesh(build_mesh(pose, c.h, c.trunc_R, c.grading)),
          cfg(c) {
        std::vector<int> corners{mesh.vp2, mesh.vp3};
        if (mesh.truncated) {
            corners.push_back(mesh.vt3);
            corners.push_back(mesh.vt2);
        } else {
            corners.push_back(mesh.vp1);
        }
        for (int i : corners)
            for (int j : corners)
                diam = std::max(diam, dist(mesh.vertices[i], mesh.vertices[j]));
    }

    double trunc_height(double b) const {
        return cfg.trunc_N > 0.0 ? cfg.trunc_N : b + 10.0 * diam;
    }

    GraphSolution solve_at(double b) {
        ++solves;
        return solve_graph(mesh, triangle_dirichlet(mesh, b, trunc_height(b)), cfg.solve);
    }

    double P1_at(double b) { return flux_P1(mesh, solve_at(b)); }
};

double first_period(Stage& st) {
    const PipelineConfig& cfg = st.cfg;
    double lo = 0.0, flo = st.P1_at(0.0);
    if (!(flo > 0.0)) throw PeriodError("first period: P1 at b = 0 is not positive");
    double hi = std::max(1.0, st.pose.spec.a), fhi = st.P1_at(hi);
    while (fhi > 0.0) {
        lo = hi;
        flo = fhi;
        hi *= 2.0;
        if (hi > cfg.bracket_cap)
            throw PeriodError("first period: no sign change up to b = " +
                              std::to_string(hi / 2.0));
        fhi = st.P1_at(hi);
    }
    double m = hi, fm = fhi;
    for (int it = 0; it < cfg.max_bisect; ++it) {
        if (std::fabs(fm) < cfg.tol_P1 * (1.0 + m)) return m;
        m = (lo * fhi - hi * flo) / (fhi - flo);
        const double w = hi - lo;
        m = std::clamp(m, lo + 0.01 * w, hi - 0.01 * w);
        fm = st.P1_at(m);
        if (fm > 0.0) {
            lo = m;
            flo = fm;
            fhi *= 0.5; // Illinois damping of the retained endpoint
        } else {
            hi = m;
            fhi = fm;
            flo *= 0.5;
        }
        if (hi - lo < 1e-12 * (1.0 + hi)) return m;
    }
    if (std::fabs(fm) < 2.0 * cfg.tol_P1 * (1.0 + m)) return m;
    throw PeriodError("first period: stalled, residual " + std::to_string(fm));
}

PeriodReport evaluate_with(Stage& st) {
    const TriangleSpec& spec = st.pose.spec;
    PeriodReport rep;
    rep.a = spec.a;
    rep.phi = spec.phi;
    rep.l = spec.l;
    rep.h = st.cfg.h;
    rep.trunc_R = st.cfg.trunc_R;

    rep.b = first_period(st);
    rep.trunc_N = st.trunc_height(rep.b);
    const GraphSolution sol = st.solve_at(rep.b);
    rep.P1_residual = flux_P1(st.mesh, sol);

    const RotationProfile psi =
        rotation_profile_psi(st.mesh, sol, st.pose, Corner::P2, 0.0, rep.b);
    const ConjCurve v2 = integrate_curve(psi, kPi, HPoint{0.0, 1.0});
    rep.x0 = v2.x.back();
    rep.y0 = v2.y.back();
    rep.theta0 = v2.theta.back();
    rep.twist_residual = std::fabs(rep.theta0 - spec.phi - kPi + v2.cos_integral);
    rep.P2 = compute_P2(rep.x0, rep.y0, rep.theta0);
    const GammaLine g = gamma_line(rep.x0, rep.y0, rep.theta0, st.cfg.tol_P2);
    rep.contact = g.contact;
    if (g.contact == GammaContact::Intersecting) rep.delta = g.delta;
    rep.family = classify(rep.P2, spec.l, st.cfg.tol_P2);
    rep.embedded = spec.a >= a_emb(spec.phi, spec.l);
    rep.solves = st.solves;
    return rep;
}

PeriodReport root_in_a(double phi, double l, double target, const PipelineConfig& cfg) {
    const double am = a_max(phi, l);
    const double lo_a = cfg.eps_margin * am, hi_a = (1.0 - cfg.eps_margin) * am;
    const int n = std::max(cfg.scan_points, 3);

    // One mesh topology for the whole scan keeps P2(a) free of subdivision
    // jumps that would stall the bisection on a steep stretch.
    PipelineConfig pinned = cfg;
    if (pinned.grading.fixed_n == 0)
        pinned.grading.fixed_n = default_resolution(
            layout_triangle({hi_a, phi, l}), cfg.h, cfg.trunc_R);

    // Near a_max the first-period root b escapes to infinity, so P1 can stay
    // positive for every b the bracketing tries; P2 blows up there as well.
    // Such points sit above any finite target and are scored +inf.
    auto eval = [&](double a, PeriodReport* out) {
        try {
            Stage st(TriangleSpec{a, phi, l}, pinned);
            PeriodReport r = evaluate_with(st);
            if (out) *out = r;
            return r.P2 - target;
        } catch (const PeriodError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    // coarse scan for the leftmost sign change
    std::vector<std::array<double, 2>> brackets;
    int total_solves = 0;
    double prev_a = 0.0, prev_g = 0.0;
    bool have_prev = false;
    double blo = 0.0, bhi = 0.0, glo = 0.0, ghi = 0.0;
    bool found = false;
    for (int i = 0; i < n; ++i) {
        const double a = lo_a + (hi_a - lo_a) * i / (n - 1.0);
        PeriodReport r;
        const double g = eval(a, &r);
        total_solves += r.solves;
        if (have_prev && prev_g * g <= 0.0) {
            brackets.push_back({prev_a, a});
            if (!found) {
                blo = prev_a;
                glo = prev_g;
                bhi = a;
                ghi = g;
                found = true;
            }
        }
        prev_a = a;
        prev_g = g;
        have_prev = true;
    }
    if (!found)
        throw PeriodError("second period: no sign change of P2 - target on the a-grid");

    PeriodReport best;
    for (int it = 0; it < cfg.max_bisect; ++it) {
        const double a = 0.5 * (blo + bhi);
        PeriodReport r;
        const double g = eval(a, &r);
        if (std::isfinite(g)) {
            total_solves += r.solves;
            best = r;
        }
        if (std::fabs(g) < cfg.tol_P2 || bhi - blo < 1e-9 * am) break;
        if (glo * g <= 0.0) {
            bhi = a;
            ghi = g;
        } else {
            blo = a;
            glo = g;
        }
    }
    if (std::fabs(best.P2 - target) >= 2.0 * cfg.tol_P2)
        throw PeriodError("second period: bisection stalled at P2 = " +
                          std::to_string(best.P2));
    best.brackets = brackets;
    best.solves = total_solves;
    return best;
}
} // namespace

std::string family_name(Family f) {
    switch (f) {
        case Family::Knoid: return "knoid";
        case Family::Saddle: return "saddle";
        case Family::Parabolic: return "parabolic";
        case Family::Hyperbolic: return "hyperbolic";
        default: return "sample";
    }
}

Family classify(double P2, double l, double tol) {
    if (std::fabs(P2) < 1.0 - tol)
        return l == kInfiniteLength ? Family::Knoid : Family::Saddle;
    if (std::fabs(P2) <= 1.0 + tol) return Family::Parabolic;
    return Family::Hyperbolic;
}

double solve_first_period(const TriangleSpec& spec, const PipelineConfig& cfg,
                          int* solves) {
    Stage st(spec, cfg);
    const double b = first_period(st);
    if (solves) *solves = st.solves;
    return b;
}

PeriodReport evaluate_point(const TriangleSpec& spec, const PipelineConfig& cfg) {
    Stage st(spec, cfg);
    return evaluate_with(st);
}

PeriodReport solve_second_period(double phi, int k, double l, const PipelineConfig& cfg) {
    if (k < 3) throw PeriodError("second period: need k >= 3");
    if (!(phi > kPi / k && phi < 0.5 * kPi))
        throw PeriodError("second period: need pi/k < phi < pi/2");
    PeriodReport rep = root_in_a(phi, l, std::cos(kPi / k), cfg);
    rep.k = k;
    rep.family = l == kInfiniteLength ? Family::Knoid : Family::Saddle;
    return rep;
}

PeriodReport solve_parabolic(double phi, double l, const PipelineConfig& cfg) {
    if (!(phi > 0.0 && phi < 0.5 * kPi))
        throw PeriodError("parabolic: need 0 < phi < pi/2");
    PeriodReport rep = root_in_a(phi, l, 1.0, cfg);
    rep.family = Family::Parabolic;
    return rep;
}

PeriodReport find_hyperbolic(double phi, double target, double l,
                             const PipelineConfig& cfg) {
    if (!(target > 1.0)) throw PeriodError("hyperbolic: need target > 1");
    if (!(phi > 0.0 && phi < 0.5 * kPi))
        throw PeriodError("hyperbolic: need 0 < phi < pi/2");
    PeriodReport rep = root_in_a(phi, l, target, cfg);
    rep.family = Family::Hyperbolic;
    return rep;
}

std::string PeriodReport::to_json() const {
    nlohmann::json j;
    j["a"] = a;
    j["phi"] = phi;
    j["l"] = l == kInfiniteLength ? nlohmann::json() : nlohmann::json(l);
    j["b"] = b;
    j["P1_residual"] = P1_residual;
    j["P2"] = P2;
    j["x0"] = x0;
    j["y0"] = y0;
    j["theta0"] = theta0;
    if (std::isfinite(delta)) j["delta"] = delta;
    j["contact"] = contact == GammaContact::Intersecting
                       ? "intersecting"
                       : (contact == GammaContact::Asymptotic ? "asymptotic" : "disjoint");
    j["family"] = family_name(family);
    if (k > 0) j["k"] = k;
    j["embedded"] = embedded;
    j["twist_residual"] = twist_residual;
    j["solves"] = solves;
    j["mesh_h"] = h;
    j["trunc_N"] = trunc_N;
    j["trunc_R"] = trunc_R;
    nlohmann::json br = nlohmann::json::array();
    for (const auto& p : brackets) br.push_back({p[0], p[1]});
    j["brackets"] = br;
    return j.dump(2);
}

} // namespace h2r
