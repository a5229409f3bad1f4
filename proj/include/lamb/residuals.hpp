#pragma once

#include "laplace_path.hpp"
#include "solver.hpp"

namespace lamb {

struct ResidualReport {
    double pde = 0, pde_u = 0, pde_v = 0;  // relative to the acceleration norm
    double bc = 0, bc1 = 0, bc2 = 0;       // relative to the boundary data norm
    double ic = 0;                         // max |field - initial data| at t = 0 over peak field
    double field_peak = 0;
    int pde_levels = 0, bc_levels = 0;
    bool has_pde = false, has_bc = false, has_ic = false;
};

namespace detail {

inline bool uniform(const std::vector<double>& s, double& h) {
    if (s.size() < 2) return false;
    h = s[1] - s[0];
    for (size_t i = 1; i < s.size(); ++i)
        if (std::abs(s[i] - s[i - 1] - h) > 1e-9 * std::abs(h)) return false;
    return h > 0;
}

// weights of the derivative (d = 1) or value (d = 0) at 0 of the cubic through 4 nodes
inline std::array<double, 4> lagrange_at_zero(const std::array<double, 4>& y, int d) {
    std::array<double, 4> w{};
    for (int i = 0; i < 4; ++i) {
        double den = 1;
        for (int j = 0; j < 4; ++j)
            if (j != i) den *= y[i] - y[j];
        if (d == 0) {
            double num = 1;
            for (int j = 0; j < 4; ++j)
                if (j != i) num *= -y[j];
            w[i] = num / den;
        } else {
            double num = 0;
            for (int a = 0; a < 4; ++a) {
                if (a == i) continue;
                double prod = 1;
                for (int j = 0; j < 4; ++j)
                    if (j != i && j != a) prod *= -y[j];
                num += prod;
            }
            w[i] = num / den;
        }
    }
    return w;
}

inline void check_spacing(const ProblemSpec& p, double h) {
    double eps = p.forcing.mollifier;
    if (!p.forcing.is_zero() && eps > 0 && h > 0.5 * eps)
        throw GridTooCoarse("residuals: spacing " + std::to_string(h) + " does not resolve the mollifier width " +
                            std::to_string(eps));
}

} // namespace detail

// Interior Lame-Navier residual on every time level that has equispaced
// neighbours, IC residual on a t = 0 level. Second-order central differences.
inline ResidualReport interior_residuals(const ProblemSpec& p, const FieldGrid& g) {
    ResidualReport r;
    double hx, hy;
    if (g.nx() < 3 || g.ny() < 3 || !detail::uniform(g.xs, hx) || !detail::uniform(g.ys, hy))
        throw GridTooCoarse("residuals: need a uniform grid with >= 3 nodes in x and y");
    detail::check_spacing(p, std::max(hx, hy));
    const Material& m = p.material;
    double lp = m.lambda + 2 * m.mu, mu = m.mu, lm = m.lambda + m.mu;
    for (double v : g.u) r.field_peak = std::max(r.field_peak, std::abs(v));
    for (double v : g.v) r.field_peak = std::max(r.field_peak, std::abs(v));
    double ru = 0, rv = 0, au = 0, av = 0;
    auto U = [&](size_t i, size_t j, size_t n) { return g.u[g.idx(i, j, n)]; };
    auto V = [&](size_t i, size_t j, size_t n) { return g.v[g.idx(i, j, n)]; };
    for (size_t n = 1; n + 1 < g.nt(); ++n) {
        double d1 = g.ts[n] - g.ts[n - 1], d2 = g.ts[n + 1] - g.ts[n];
        if (!(d1 > 0) || std::abs(d1 - d2) > 1e-9 * d1 || d1 > 4 * std::max(hx, hy)) continue;
        ++r.pde_levels;
        for (size_t j = 1; j + 1 < g.ny(); ++j)
            for (size_t i = 1; i + 1 < g.nx(); ++i) {
                double utt = (U(i, j, n + 1) - 2 * U(i, j, n) + U(i, j, n - 1)) / (d1 * d1);
                double vtt = (V(i, j, n + 1) - 2 * V(i, j, n) + V(i, j, n - 1)) / (d1 * d1);
                double uxx = (U(i + 1, j, n) - 2 * U(i, j, n) + U(i - 1, j, n)) / (hx * hx);
                double uyy = (U(i, j + 1, n) - 2 * U(i, j, n) + U(i, j - 1, n)) / (hy * hy);
                double vxx = (V(i + 1, j, n) - 2 * V(i, j, n) + V(i - 1, j, n)) / (hx * hx);
                double vyy = (V(i, j + 1, n) - 2 * V(i, j, n) + V(i, j - 1, n)) / (hy * hy);
                double uxy = (U(i + 1, j + 1, n) - U(i + 1, j - 1, n) - U(i - 1, j + 1, n) + U(i - 1, j - 1, n)) / (4 * hx * hy);
                double vxy = (V(i + 1, j + 1, n) - V(i + 1, j - 1, n) - V(i - 1, j + 1, n) + V(i - 1, j - 1, n)) / (4 * hx * hy);
                ru += sq(utt - (lp * uxx + mu * uyy + lm * vxy));
                rv += sq(vtt - (mu * vxx + lp * vyy + lm * uxy));
                au += utt * utt;
                av += vtt * vtt;
            }
    }
    if (r.pde_levels > 0) {
        r.has_pde = true;
        double a = std::sqrt(au + av);
        if (a == 0) a = 1;  // zero field: report the absolute residual
        r.pde_u = std::sqrt(ru) / a;
        r.pde_v = std::sqrt(rv) / a;
        r.pde = std::sqrt(ru + rv) / a;
    }
    for (size_t n = 0; n < g.nt(); ++n) {
        if (g.ts[n] != 0.0) continue;
        r.has_ic = true;
        double e = 0;
        for (size_t j = 0; j < g.ny(); ++j)
            for (size_t i = 0; i < g.nx(); ++i) {
                double u0 = p.initial.value(0, g.xs[i], g.ys[j]), v0 = p.initial.value(2, g.xs[i], g.ys[j]);
                e = std::max({e, std::abs(U(i, j, n) - u0), std::abs(V(i, j, n) - v0)});
            }
        r.ic = r.field_peak > 0 ? e / r.field_peak : e;
    }
    return r;
}

// Surface BC residual from the four lowest y-layers of a grid (cubic
// extrapolation to y = 0; the representation is evaluated only for y > 0).
inline ResidualReport bc_residuals(const ProblemSpec& p, const FieldGrid& g) {
    ResidualReport r;
    double hx;
    if (g.nx() < 3 || g.ny() < 4 || !detail::uniform(g.xs, hx))
        throw GridTooCoarse("bc residual: need >= 3 uniform x nodes and >= 4 y layers");
    detail::check_spacing(p, hx);
    if (!(g.ys[0] > 0) || g.ys[3] > 8 * hx) throw GridTooCoarse("bc residual: lowest layers must be close to the surface");
    const Material& m = p.material;
    double ratio = m.lambda / (m.lambda + 2 * m.mu);
    std::array<double, 4> y = {g.ys[0], g.ys[1], g.ys[2], g.ys[3]};
    auto w0 = detail::lagrange_at_zero(y, 0), w1 = detail::lagrange_at_zero(y, 1);
    double e1 = 0, e2 = 0, nrm = 0;
    for (size_t n = 0; n < g.nt(); ++n) {
        double t = g.ts[n];
        if (t <= 0) continue;
        ++r.bc_levels;
        std::vector<double> u0(g.nx()), v0(g.nx()), uy(g.nx()), vy(g.nx());
        for (size_t i = 0; i < g.nx(); ++i) {
            for (int q = 0; q < 4; ++q) {
                double uu = g.u[g.idx(i, q, n)], vv = g.v[g.idx(i, q, n)];
                u0[i] += w0[q] * uu;
                v0[i] += w0[q] * vv;
                uy[i] += w1[q] * uu;
                vy[i] += w1[q] * vv;
            }
        }
        for (size_t i = 1; i + 1 < g.nx(); ++i) {
            double x = g.xs[i];
            double ux = (u0[i + 1] - u0[i - 1]) / (2 * hx), vx = (v0[i + 1] - v0[i - 1]) / (2 * hx);
            double g1 = 0, g2 = 0;
            if (!p.forcing.is_zero()) {
                g1 = p.forcing.g_physical(1, x, t, m);
                g2 = p.forcing.g_physical(2, x, t, m);
            }
            e1 += sq(uy[i] + vx - g1);
            e2 += sq(vy[i] + ratio * ux - g2);
            nrm += g1 * g1 + g2 * g2;
        }
    }
    if (r.bc_levels > 0) {
        r.has_bc = true;
        double a = nrm > 0 ? std::sqrt(nrm) : 1.0;
        r.bc1 = std::sqrt(e1) / a;
        r.bc2 = std::sqrt(e2) / a;
        r.bc = std::sqrt(e1 + e2) / a;
    }
    return r;
}

// combined report: interior grid (PDE + IC) and an optional near-surface layer grid (BC)
inline ResidualReport residuals(const ProblemSpec& p, const FieldGrid& interior, const FieldGrid* layers = nullptr) {
    ResidualReport r = interior_residuals(p, interior);
    if (layers) {
        auto b = bc_residuals(p, *layers);
        r.bc = b.bc;
        r.bc1 = b.bc1;
        r.bc2 = b.bc2;
        r.bc_levels = b.bc_levels;
        r.has_bc = b.has_bc;
    }
    return r;
}

// ---------------------------------------------------------------------------
// global relations: k u^ + l v^ and l u^ - k v^ from the field against the
// right sides built from boundary traces and data

struct GlobalRelationResult {
    std::array<cplx, 2> lhs{}, rhs{};
    double residual = 0;
};

struct GlobalRelationOptions {
    double y_max = 0;       // 0: cp t + 8 eps + 1
    double panel = 0.1;     // Gauss-Legendre panel length in y
    int per_panel = 16;
    double dt = 0.0025;     // Volterra step for the boundary traces
    double L_l = 800;       // inner truncation near the surface
    double tol = 1e-7;
};

// field: returns u~(k, y, t), v~(k, y, t) at the given y nodes
inline GlobalRelationResult global_relation_from(const ProblemSpec& p,
                                                 const std::function<void(const std::vector<double>&, std::vector<cplx>&,
                                                                          std::vector<cplx>&)>& field,
                                                 const BoundaryTrace& tr, double k, cplx l, double t,
                                                 const GlobalRelationOptions& opt = {}) {
    const Material& m = p.material;
    double lp = m.lambda + 2 * m.mu, mu = m.mu;
    GlobalRelationResult res;
    double Y = opt.y_max > 0 ? opt.y_max : m.cp() * t + 8 * p.forcing.mollifier + 1.0;
    int np = std::max(1, static_cast<int>(std::ceil(Y / opt.panel)));
    std::vector<double> gx, gw, ys, wy;
    gauss_legendre(opt.per_panel, gx, gw);
    for (int q = 0; q < np; ++q) {
        double a = Y * q / np, b = Y * (q + 1) / np;
        for (int i = 0; i < opt.per_panel; ++i) {
            ys.push_back(0.5 * (a + b) + 0.5 * (b - a) * gx[i]);
            wy.push_back(0.5 * (b - a) * gw[i]);
        }
    }
    std::vector<cplx> ut, vt;
    field(ys, ut, vt);
    cplx uh = 0, vh = 0;
    double peak = 0, edge = 0;
    for (size_t j = 0; j < ys.size(); ++j) {
        cplx e = std::exp(-I * l * ys[j]);
        uh += wy[j] * e * ut[j];
        vh += wy[j] * e * vt[j];
        double mag = std::abs(e) * std::max(std::abs(ut[j]), std::abs(vt[j]));
        peak = std::max(peak, mag);
        if (ys[j] > Y - opt.panel) edge = std::max(edge, mag);
    }
    if (peak > 0 && edge > 1e-3 * peak) throw GridTooCoarse("global relation: y range does not cover the field support");
    res.lhs = {k * uh + l * vh, l * uh - k * vh};

    // S_w[trace] through piecewise-linear sampled profiles
    size_t nt = tr.ts.size();
    if (nt < 2 || std::abs(tr.ts.back() - t) > 1e-9 * std::max(1.0, t))
        throw DomainError("global relation: trace grid must end at t");
    double dt = tr.ts[1] - tr.ts[0];
    auto pu = TimeProfile::sampled(dt, tr.u), pv = TimeProfile::sampled(dt, tr.v);
    cplx W1 = lp * (k * k + l * l), W2 = mu * (k * k + l * l);
    cplx U1 = -I * pu.S(W1, t), V1 = -I * pv.S(W1, t), U2 = -I * pu.S(W2, t), V2 = -I * pv.S(W2, t);
    auto [NP, NQ] = N_PQ_at(p.forcing.at(k, m), p.initial.at(k), m, k, l, t);
    res.rhs = {(m.lambda * k * k + l * l * lp) * V1 + 2 * mu * k * l * U1 + NP,
               -mu * (k * k - l * l) * U2 - 2 * mu * k * l * V2 + NQ};
    double num = std::sqrt(std::norm(res.lhs[0] - res.rhs[0]) + std::norm(res.lhs[1] - res.rhs[1]));
    double den = std::sqrt(std::norm(res.rhs[0]) + std::norm(res.rhs[1]));
    res.residual = den > 0 ? num / den : num;
    return res;
}

// Boundary traces of `data_problem` from the Volterra system; the field is the
// main-path x-transform of `field_problem` (the same problem unless a negative
// control is wanted).
inline GlobalRelationResult global_relation_check(const ProblemSpec& data_problem, const ProblemSpec& field_problem, double k,
                                                  cplx l, double t, const GlobalRelationOptions& opt = {}) {
    if (l.imag() > 0) throw DomainError("global relation: need Im l <= 0");
    if (data_problem.is_zero() && field_problem.is_zero()) return {};
    int n = std::max(2, static_cast<int>(std::ceil(t / opt.dt)));
    std::vector<double> ts(n + 1);
    for (int i = 0; i <= n; ++i) ts[i] = t * i / n;
    auto tr = solve_volterra(data_problem.material, data_problem.forcing, data_problem.initial, k, ts);
    SolverOptions so;
    so.allow_small_y = true;
    so.L_l = opt.L_l;
    so.tol = opt.tol;
    auto eng = general_engine(field_problem, so);
    auto field = [&](const std::vector<double>& ys, std::vector<cplx>& u, std::vector<cplx>& v) {
        auto s = eng.x_transform(k, ys, {t});
        u = s.u;
        v = s.v;
    };
    return global_relation_from(data_problem, field, tr, k, l, t, opt);
}

inline GlobalRelationResult global_relation_check(const ProblemSpec& p, double k, cplx l, double t,
                                                  const GlobalRelationOptions& opt = {}) {
    return global_relation_check(p, p, k, l, t, opt);
}

} // namespace lamb
