#pragma once

#include <algorithm>
#include <array>
#include <functional>

#include "contour.hpp"
#include "data_transforms.hpp"

namespace lamb {

using Mat2 = std::array<std::array<cplx, 2>, 2>;
using Vec2 = std::array<cplx, 2>;

struct KernelSet {
    Mat2 N, M;
    Vec2 H;
};

// N, M, H of the Volterra system at one (k, l, t)
inline KernelSet kernels(const Material& m, double k, cplx l, double t, const InitialAtK* ic = nullptr) {
    double lp = m.lambda + 2 * m.mu, mu = m.mu, sm = std::sqrt(mu), sl = std::sqrt(lp);
    cplx s = sqrt_branch(k, l).value;
    cplx w1 = sl * s, w2 = sm * s;
    cplx e1 = std::exp(I * w1 * t), e2 = std::exp(I * w2 * t);
    KernelSet r;
    r.N = {{{I * sm * l * e2, -I * sm * (lp / mu) * k * e2}, {I * (mu / sl) * k * e1, I * sl * l * e1}}};
    r.M = {{{sm * k * k * e2, 2 * sm * k * l * e2}, {-(2 * mu / sl) * k * l * e1, -(m.lambda / sl) * k * k * e1}}};
    r.H = {0.0, 0.0};
    if (ic && !ic->zero) {
        auto [P0, P1, Q0, Q1] = ic->pq(l);
        r.H = {I * e1 / lp * (I * w1 * P0 + P1), I * e2 / mu * (I * w2 * Q0 + Q1)};
    }
    return r;
}

// (K[f])(k, t) = 1/(2 pi) int_{gamma_k2} f dl / (l (k^2+l^2)^{1/2}); the real
// tails beyond L are mapped to (0, 1] by l = +-L/s
template <class F>
QuadratureResult K_apply(F&& f, double k, const ContourPath& path, double tol = 1e-10) {
    auto g = [&](cplx l) { return f(l) / (l * detail::sqb(k, l)); };
    // decay precondition: l g(l) -> 0, otherwise the closing arc does not vanish
    double far = 1e8 * std::max(1.0, std::abs(k)), L = path.L;
    double arc = far * std::max(std::abs(g(cplx(far))), std::abs(g(cplx(-far))));
    double near = L * std::max(std::abs(g(cplx(L))), std::abs(g(cplx(-L))));
    if (!(arc < 1e-3 * std::max(near, 1e-300)) && !(arc < 1e-200))
        throw ToleranceNotMet("K_apply: integrand does not decay on gamma_k2 (closing-arc contribution not negligible)",
                              arc);
    QuadOptions o;
    o.rel_tol = tol;
    o.abs_tol = 1e-300;
    o.max_panel_length = std::max(1.0, std::abs(k));
    auto mid = integrate_polyline(g, path.segments, o);
    auto tails = integrate_polyline(
        [&](cplx s) {
            double x = s.real();
            return (g(cplx(L / x)) + g(cplx(-L / x))) * (L / (x * x));
        },
        {{cplx(0.0), cplx(1.0)}}, o);
    QuadratureResult r;
    r.value = (mid.value + tails.value) / (2 * pi);
    r.error_estimate = (mid.error_estimate + tails.error_estimate) / (2 * pi);
    r.panels_used = mid.panels_used + tails.panels_used;
    r.converged = mid.converged && tails.converged;
    r.truncation_bound = arc / (2 * pi);
    if (!r.converged) throw ToleranceNotMet("K_apply: quadrature did not converge", r.error_estimate);
    return r;
}

struct BoundaryTrace {
    double k = 0;
    std::vector<double> ts;
    std::vector<cplx> u, v;
};

struct VolterraOptions {
    double tol = 1e-10;
    GammaK2Options contour;
};

namespace detail {

// product-integration moments of the kernels c(l) e^{i w_j tau} against hat
// functions on a uniform grid, integrated over gamma_k2 with 1/(2 pi l sqb).
// family f = 2 (row-1) + p: row 0 uses omega_2, row 1 omega_1; p = power of l.
struct Moments {
    int nt = 0;
    // [family][0] end hat, [1..nt] interior lag m, [nt+1..2nt] start hat at lag n
    std::array<std::vector<cplx>, 4> z;
    cplx end(int f) const { return z[f][0]; }
    cplx interior(int f, int m) const { return z[f][m]; }
    cplx start(int f, int n) const { return z[f][nt + n]; }
};

inline Moments volterra_moments(const Material& m, double k, double d, int nt, const ContourPath& path, double tol) {
    const double c[2] = {m.cs(), m.cp()};
    const int per = 2 * nt + 1;
    const double R = path.segments[1].first.real() < 0 ? -path.segments[1].first.real() : 4 * std::abs(k);
    auto f = [&](cplx l, cplx* out) {
        cplx s = sqb(k, l);
        bool tail = l.imag() == 0.0 && std::abs(l.real()) > R * (1 - 1e-12);
        for (int row = 0; row < 2; ++row) {
            cplx th = I * c[row] * s * d;
            cplx eth = std::exp(th), emth = 1.0 / eth;
            cplx sh = th == cplx(0) ? cplx(1) : sinc(-I * th * 0.5);  // sinh(th/2)/(th/2)
            cplx lam = sh * sh;
            cplx endv = tail ? d * eth / (th * th) : d * eth * psi1(-th);
            cplx stf = d * psi1(th) * emth;  // times e^{th n}
            for (int p = 0; p < 2; ++p) {
                cplx base = (p == 1 ? l : cplx(1.0)) / (l * s);
                cplx* o = out + (2 * row + p) * per;
                o[0] = base * endv;
                cplx E = 1.0;
                for (int mm = 1; mm <= nt; ++mm) {
                    E *= eth;
                    o[mm] = base * d * E * lam;
                    o[nt + mm] = base * stf * E;
                }
            }
        }
    };
    QuadOptions o;
    o.rel_tol = tol;
    o.abs_tol = 1e-300;
    o.max_panel_length = 3 * pi / (m.cp() * d * nt + 1.0);
    o.max_panels = std::max(2000, static_cast<int>(2e7 / (4 * per)));  // bounded memory
    auto r = integrate_segments(f, path.segments, 4 * per, o);
    if (!r.converged) throw ToleranceNotMet("volterra moments: quadrature did not converge", r.error_estimate);
    Moments mo;
    mo.nt = nt;
    double ak = std::abs(k);
    for (int row = 0; row < 2; ++row) {
        for (int p = 0; p < 2; ++p) {
            auto& z = mo.z[2 * row + p];
            z.assign(r.value.begin() + (2 * row + p) * per, r.value.begin() + (2 * row + p + 1) * per);
            // analytic real-tail integrals of the non-oscillatory end-hat part dropped above
            double cj = c[row];
            cplx tailv;
            if (p == 1) {
                tailv = (2.0 * I / (cj * ak)) * (pi / 2 - std::atan(R / ak));
            } else {
                double S0 = std::sqrt(R * R + ak * ak);
                double J = (0.5 / ak * std::log((S0 + ak) / (S0 - ak)) - 1.0 / S0) / (ak * ak);
                tailv = 2.0 / (cj * cj * d) * J;
            }
            z[0] += tailv;
            for (auto& v : z) v /= 2 * pi;
        }
    }
    return mo;
}

} // namespace detail

// second-kind Volterra system for the boundary traces, product-integration
// trapezoidal stepping (hat functions) with a direct 2x2 solve per step
inline BoundaryTrace solve_volterra(const Material& m, const BoundaryForcing& forcing, const InitialData& data, double k,
                                    const std::vector<double>& ts, const VolterraOptions& opt = {}) {
    m.validate();
    int nt = static_cast<int>(ts.size()) - 1;
    if (nt < 1 || ts[0] != 0.0) throw DomainError("solve_volterra: t grid must start at 0 with >= 2 nodes");
    double d = ts[1] - ts[0];
    for (int n = 1; n <= nt; ++n)
        if (std::abs(ts[n] - ts[n - 1] - d) > 1e-9 * d) throw DomainError("solve_volterra: t grid must be uniform");
    if (k == 0.0) throw DomainError("solve_volterra: k = 0");
    BoundaryTrace tr;
    tr.k = k;
    tr.ts = ts;
    tr.u.assign(nt + 1, 0.0);
    tr.v.assign(nt + 1, 0.0);
    auto fk = forcing.at(k, m);
    auto ic = data.at(k);
    if (fk.zero && ic.zero) return tr;

    ContourPath path = build_gamma_k2(k, opt.contour);
    auto mo = detail::volterra_moments(m, k, d, nt, path, opt.tol);

    double lp = m.lambda + 2 * m.mu, mu = m.mu, sm = std::sqrt(mu), sl = std::sqrt(lp);
    // coefficient and family of each entry (row 0 -> omega_2 families 0/1, row 1 -> omega_1 families 2/3)
    const cplx cM[2][2] = {{sm * k * k, 2 * sm * k}, {-(2 * mu / sl) * k, -(m.lambda / sl) * k * k}};
    const int fM[2][2] = {{0, 1}, {3, 2}};
    const cplx cN[2][2] = {{I * sm, -I * sm * (lp / mu) * k}, {I * (mu / sl) * k, I * sl}};
    const int fN[2][2] = {{1, 0}, {2, 3}};

    // K[H] at every node
    std::vector<Vec2> KH(nt + 1, Vec2{0.0, 0.0});
    if (!ic.zero) {
        auto f = [&](cplx l, cplx* out) {
            cplx s = detail::sqb(k, l);
            cplx w1 = sl * s, w2 = sm * s;
            auto [P0, P1, Q0, Q1] = ic.pq(l);
            cplx a1 = I / lp * (I * w1 * P0 + P1), a2 = I / mu * (I * w2 * Q0 + Q1);
            cplx base = 1.0 / (l * s);
            cplx e1 = std::exp(I * w1 * d), e2 = std::exp(I * w2 * d), E1 = 1, E2 = 1;
            for (int n = 0; n <= nt; ++n) {
                out[2 * n] = base * a1 * E1;
                out[2 * n + 1] = base * a2 * E2;
                E1 *= e1;
                E2 *= e2;
            }
        };
        QuadOptions o;
        o.rel_tol = opt.tol;
        o.abs_tol = 1e-300;
        o.max_panel_length = 3 * pi / (m.cp() * d * nt + 1.0);
        o.max_panels = std::max(2000, static_cast<int>(2e7 / (2 * (nt + 1))));
        auto r = integrate_segments(f, path.segments, 2 * (nt + 1), o);
        if (!r.converged) throw ToleranceNotMet("solve_volterra: K[H] quadrature did not converge", r.error_estimate);
        for (int n = 0; n <= nt; ++n) KH[n] = {r.value[2 * n] / (2 * pi), r.value[2 * n + 1] / (2 * pi)};
    }

    std::vector<Vec2> g(nt + 1), h(nt + 1);
    for (int n = 0; n <= nt; ++n) g[n] = {fk.g(1, ts[n]), fk.g(2, ts[n])};
    h[0] = KH[0];
    auto apply = [&](const cplx (&c)[2][2], const int (&fam)[2][2], int type, int lag, const Vec2& x) {
        Vec2 y{0.0, 0.0};
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                cplx w = type == 0 ? mo.end(fam[a][b]) : type == 1 ? mo.interior(fam[a][b], lag) : mo.start(fam[a][b], lag);
                y[a] += c[a][b] * w * x[b];
            }
        return y;
    };
    Mat2 A;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) A[a][b] = (a == b ? 1.0 : 0.0) - cM[a][b] * mo.end(fM[a][b]);
    cplx det = A[0][0] * A[1][1] - A[0][1] * A[1][0];
    if (!(std::abs(det) > 1e-12) || !std::isfinite(std::abs(det))) throw StepUnstable("solve_volterra: singular step matrix");
    for (int n = 1; n <= nt; ++n) {
        Vec2 rhs = KH[n];
        auto add = [&](const Vec2& y) {
            rhs[0] += y[0];
            rhs[1] += y[1];
        };
        add(apply(cM, fM, 2, n, h[0]));
        add(apply(cN, fN, 2, n, g[0]));
        for (int j = 1; j < n; ++j) {
            add(apply(cM, fM, 1, n - j, h[j]));
            add(apply(cN, fN, 1, n - j, g[j]));
        }
        add(apply(cN, fN, 0, 0, g[n]));
        h[n] = {(A[1][1] * rhs[0] - A[0][1] * rhs[1]) / det, (-A[1][0] * rhs[0] + A[0][0] * rhs[1]) / det};
        if (!std::isfinite(std::abs(h[n][0])) || !std::isfinite(std::abs(h[n][1])))
            throw StepUnstable("solve_volterra: non-finite step");
    }
    for (int n = 0; n <= nt; ++n) {
        tr.u[n] = h[n][0];
        tr.v[n] = h[n][1];
    }
    return tr;
}

// ---------------------------------------------------------------------------
// Laplace domain

enum class ICSign { Verbatim, Derived };

struct LaplacePoint {
    cplx p, w1, w2, den, delta;
};

// w_j with the cut on the segment between +-i c_j k, so w_j ~ p at infinity and
// Re w_j > 0 for Re p > 0
inline cplx w_branch(cplx p, double c2k2) {
    if (p == cplx(0)) return std::sqrt(cplx(c2k2));
    return p * std::sqrt(1.0 + c2k2 / (p * p));
}

inline LaplacePoint laplace_point(const Material& m, double k, cplx p) {
    double lp = m.lambda + 2 * m.mu, mu = m.mu;
    LaplacePoint r;
    r.p = p;
    r.w1 = w_branch(p, lp * k * k);
    r.w2 = w_branch(p, mu * k * k);
    cplx a = p * p + 2 * mu * k * k;
    double rt = std::sqrt(mu / lp);
    r.den = a * a - 4 * rt * mu * k * k * r.w1 * r.w2;
    r.delta = a * a / (r.w1 * r.w1 * r.w2 * r.w2) - 4 * rt * mu * k * k / (r.w1 * r.w2);
    return r;
}

// first matrix of the closed form (acts on the transformed boundary data)
inline Mat2 laplace_matrix(const Material& m, double k, cplx p) {
    double lp = m.lambda + 2 * m.mu, mu = m.mu;
    auto q = laplace_point(m, k, p);
    cplx a = p * p + 2 * mu * k * k;
    double rt = std::sqrt(mu / lp);
    Mat2 A;
    A[0][0] = -std::sqrt(mu) * p * p * q.w2 / q.den;
    A[0][1] = I * k * (lp * a - 2 * std::sqrt(mu * lp) * q.w1 * q.w2) / q.den;
    A[1][0] = I * k * (2 * mu * rt * q.w1 * q.w2 - mu * a) / q.den;
    A[1][1] = -std::sqrt(lp) * p * p * q.w1 / q.den;
    return A;
}

struct LaplaceOptions {
    ICSign sign = ICSign::Verbatim;
    GammaK2Options contour;
    double tol = 1e-10;
    double pole_threshold = 1e-10;
};

// (u~o, v~o)(k, p)
inline Vec2 laplace_solution(const Material& m, const ForcingAtK& fk, const InitialAtK& ic, double k, cplx p,
                             const LaplaceOptions& opt = {}) {
    if (!(p.real() > 0)) throw DomainError("laplace_solution: need Re p > 0");
    double lp = m.lambda + 2 * m.mu, mu = m.mu;
    auto q = laplace_point(m, k, p);
    double scale = std::norm(p * p) + sq(lp * k * k);
    if (std::abs(q.den) < opt.pole_threshold * scale) throw RayleighPole("laplace_solution: p at a zero of the determinant");
    Vec2 r{0.0, 0.0};
    if (!fk.zero) {
        Mat2 A = laplace_matrix(m, k, p);
        cplx g1 = fk.laplace(1, p), g2 = fk.laplace(2, p);
        r = {A[0][0] * g1 + A[0][1] * g2, A[1][0] * g1 + A[1][1] * g2};
    }
    if (!ic.zero) {
        ContourPath path = build_gamma_k2(k, opt.contour);
        double sl = std::sqrt(lp), sm = std::sqrt(mu);
        auto i1 = K_apply(
            [&](cplx l) {
                cplx w1 = sl * detail::sqb(k, l);
                auto pq = ic.pq(l);
                return (I * w1 * pq[0] + pq[1]) / (lp * (p - I * w1));
            },
            k, path, opt.tol);
        auto i2 = K_apply(
            [&](cplx l) {
                cplx w2 = sm * detail::sqb(k, l);
                auto pq = ic.pq(l);
                return (I * w2 * pq[2] + pq[3]) / (mu * (p - I * w2));
            },
            k, path, opt.tol);
        // K_apply carries 1/(2 pi); the display has -(i/2 pi) and +(i/2 pi)
        cplx c1 = (opt.sign == ICSign::Verbatim ? -I : I) * i1.value;
        cplx c2 = I * i2.value;
        cplx a = p * p + 2 * mu * k * k;
        Mat2 B = {{{a / (q.w1 * q.w1), 2.0 * I * sm * k / q.w2},
                   {-2.0 * I * std::sqrt(mu / lp) * sm * k / q.w1, a / (q.w2 * q.w2)}}};
        r[0] += (B[0][0] * c1 + B[0][1] * c2) / q.delta;
        r[1] += (B[1][0] * c1 + B[1][1] * c2) / q.delta;
    }
    return r;
}

// K-transforms of the kernel matrices, by quadrature on gamma_k2:
// Ko[c e^{i w t}](p) = 1/(2 pi) int c / ((p - i w) l sqb) dl. Valid for Re p
// beyond the growth of e^{i w t} on the contour.
inline std::pair<Mat2, Mat2> laplace_kernel_transforms(const Material& m, double k, cplx p, const GammaK2Options& go = {},
                                                       double tol = 1e-11) {
    ContourPath path = build_gamma_k2(k, go);
    double lp = m.lambda + 2 * m.mu, mu = m.mu, sm = std::sqrt(mu), sl = std::sqrt(lp);
    auto kint = [&](int row, int pw) {
        double c = row == 0 ? sm : sl;
        return K_apply([&](cplx l) { return (pw ? l : cplx(1.0)) / (p - I * c * detail::sqb(k, l)); }, k, path, tol).value;
    };
    cplx z00 = kint(0, 0), z01 = kint(0, 1), z10 = kint(1, 0), z11 = kint(1, 1);
    Mat2 N = {{{I * sm * z01, -I * sm * (lp / mu) * k * z00}, {I * (mu / sl) * k * z10, I * sl * z11}}};
    Mat2 M = {{{sm * k * k * z00, 2 * sm * k * z01}, {-(2 * mu / sl) * k * z11, -(m.lambda / sl) * k * k * z10}}};
    return {N, M};
}

// ---------------------------------------------------------------------------
// Rayleigh

// zeros of F inside the box [x0,x1] x [y0,y1] by the argument principle
template <class F>
int winding_number(F&& f, double x0, double x1, double y0, double y1, int n = 4000) {
    cplx c[5] = {cplx(x0, y0), cplx(x1, y0), cplx(x1, y1), cplx(x0, y1), cplx(x0, y0)};
    double total = 0;
    cplx prev = f(c[0]);
    for (int e = 0; e < 4; ++e)
        for (int i = 1; i <= n; ++i) {
            cplx z = c[e] + (c[e + 1] - c[e]) * (double(i) / n);
            cplx cur = f(z);
            total += std::arg(cur / prev);
            prev = cur;
        }
    return static_cast<int>(std::lround(total / (2 * pi)));
}

struct RayleighReport {
    double speed_ratio = 0;             // c_R / cs from the determinant on the imaginary p axis
    std::vector<cplx> zeros;            // zeros of the determinant as p / (k cs)
    int right_half_plane_zeros = 0;     // principal sheet, Re p > 0 (argument principle)
    bool pole_free = false;             // classifier for the transformed boundary data
    double threshold_mu_over_lambda = 0;  // where the classifier switches
    std::array<cplx, 3> cubic_roots{};  // of the rationalized secular equation, in (c/cs)^2
};

namespace detail {

// rationalized secular equation in q = c^2/cs^2: q^3 - 8 q^2 + (24 - 16 kappa) q - 16 (1 - kappa)
inline double rayleigh_discriminant(double kappa) {
    double a = 1, b = -8, c = 24 - 16 * kappa, d = -16 * (1 - kappa);
    return 18 * a * b * c * d - 4 * b * b * b * d + b * b * c * c - 4 * a * c * c * c - 27 * a * a * d * d;
}

inline std::array<cplx, 3> cubic_roots(double kappa) {
    // companion eigenvalues via Durand-Kerner, deterministic start
    std::array<cplx, 3> z = {cplx(0.4, 0.9), cplx(0.4, 0.9) * cplx(0.4, 0.9), cplx(0.4, 0.9) * cplx(0.4, 0.9) * cplx(0.4, 0.9)};
    auto P = [&](cplx x) { return ((x - 8.0) * x + (24 - 16 * kappa)) * x - 16 * (1 - kappa); };
    for (int it = 0; it < 500; ++it)
        for (int i = 0; i < 3; ++i) {
            cplx den = 1;
            for (int j = 0; j < 3; ++j)
                if (j != i) den *= z[i] - z[j];
            z[i] -= P(z[i]) / den;
        }
    std::sort(z.begin(), z.end(), [](cplx a, cplx b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
    return z;
}

} // namespace detail

inline RayleighReport rayleigh_zeros(const Material& m) {
    m.validate();
    RayleighReport r;
    double cs = m.cs();
    // determinant along p = i c k (k = 1) is real for 0 < c < cs
    double lp = m.lambda + 2 * m.mu, mu = m.mu;
    // limit from Re p > 0: w_j = (c_j^2 - c^2)^{1/2} > 0
    auto D = [&](double c) {
        return sq(2 * mu - c * c) - 4 * std::sqrt(mu / lp) * mu * std::sqrt(lp - c * c) * std::sqrt(mu - c * c);
    };
    double lo = 1e-6 * cs, hi = cs * (1 - 1e-15);
    double flo = D(lo), fhi = D(hi);
    if (flo * fhi > 0) throw RootSearchIncomplete("rayleigh_zeros: no sign change below cs");
    for (int it = 0; it < 200 && hi - lo > 1e-16 * cs; ++it) {
        double mid = 0.5 * (lo + hi), fm = D(mid);
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    r.speed_ratio = 0.5 * (lo + hi) / cs;
    r.zeros = {cplx(0, -r.speed_ratio), cplx(0, r.speed_ratio)};
    // zeros with Re p > 0 on the principal sheet: winding number of den on a box
    auto F = [&](cplx z) { return laplace_point(m, 1.0, z * cs).den; };
    r.right_half_plane_zeros = winding_number(F, 1e-3, 8.0 * m.cp() / cs, -8.0 * m.cp() / cs, 8.0 * m.cp() / cs);
    double kappa = m.mu / (m.lambda + 2 * m.mu);
    r.cubic_roots = detail::cubic_roots(kappa);
    r.pole_free = detail::rayleigh_discriminant(kappa) > 0;
    // threshold in mu/lambda: kappa = r/(1+2r) is increasing in r
    double a = 0.05, b = 50.0;
    auto disc = [&](double rr) { return detail::rayleigh_discriminant(rr / (1 + 2 * rr)); };
    double da = disc(a);
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (a + b);
        if ((disc(mid) > 0) == (da > 0))
            a = mid;
        else
            b = mid;
    }
    r.threshold_mu_over_lambda = 0.5 * (a + b);
    return r;
}

// ---------------------------------------------------------------------------
// inversion on a parabola z = s (1 + i u)^2 enclosing singularities with |Im| <= B

struct InversionResult {
    std::vector<cplx> values;
    std::vector<double> error_estimate;
};

inline cplx invert_at(const std::function<cplx(cplx)>& F, double t, int N, double B) {
    double Mfac = std::min(0.25 * N, 10.0);
    double s = std::max(Mfac / t, 0.6 * B + 0.5);
    double umax = std::sqrt(1 + 40.0 / (s * t));
    double h = umax / N;
    cplx sum = 0;
    for (int j = -N; j <= N; ++j) {
        double u = j * h;
        cplx z = s * cplx(1 - u * u, 2 * u);
        sum += std::exp(z * t) * F(z) * cplx(1, u);
    }
    return sum * h * s / pi;
}

inline InversionResult invert_laplace(const std::function<cplx(cplx)>& F, const std::vector<double>& ts, double B,
                                      int N = 64, double tol = 0.0) {
    InversionResult r;
    double worst = 0, scale = 0;
    for (double t : ts) {
        if (t <= 0) {
            r.values.push_back(0.0);
            r.error_estimate.push_back(0.0);
            continue;
        }
        cplx a = invert_at(F, t, N, B), b = invert_at(F, t, 2 * N, B);
        r.values.push_back(b);
        r.error_estimate.push_back(std::abs(a - b));
        worst = std::max(worst, std::abs(a - b));
        scale = std::max(scale, std::abs(b));
    }
    if (tol > 0 && worst > tol * std::max(scale, 1e-300))
        throw ToleranceNotMet("invert_laplace: node doubling disagrees", worst / std::max(scale, 1e-300));
    return r;
}

// Boundary traces from the closed form, zero initial data. Heaviside, moving
// and zero forcing invert directly; other profiles go through the unit step
// response and a Duhamel integral (their transforms grow like e^{-p tau} on the
// left part of the parabola).
inline BoundaryTrace laplace_trace(const Material& m, const BoundaryForcing& forcing, double k, const std::vector<double>& ts,
                                   int N = 64) {
    BoundaryTrace tr;
    tr.k = k;
    tr.ts = ts;
    tr.u.assign(ts.size(), 0.0);
    tr.v.assign(ts.size(), 0.0);
    auto fk = forcing.at(k, m);
    if (fk.zero) return tr;
    double B = m.cp() * std::abs(k) + (fk.moving ? std::abs(fk.kappa) : 0.0);
    auto direct = [&](const ForcingAtK& f, int comp, const std::vector<double>& tt) {
        auto F = [&](cplx p) {
            Mat2 A = laplace_matrix(m, k, p);
            cplx g1 = f.laplace(1, p), g2 = f.laplace(2, p);
            return comp == 0 ? A[0][0] * g1 + A[0][1] * g2 : A[1][0] * g1 + A[1][1] * g2;
        };
        return invert_laplace(F, tt, B, N).values;
    };
    bool step = fk.moving || fk.prof[0] == nullptr || fk.prof[0]->kind == TimeProfile::Heaviside;
    if (fk.prof[0] && fk.prof[1] && fk.prof[0] != fk.prof[1]) step = false;
    if (step) {
        auto u = direct(fk, 0, ts), v = direct(fk, 1, ts);
        tr.u = u;
        tr.v = v;
        return tr;
    }
    // step response with the same spatial amplitudes
    ForcingAtK unit = fk;
    auto H = std::make_shared<const TimeProfile>(TimeProfile::heaviside());
    unit.prof = {H, H};
    const TimeProfile& X = *fk.prof[0];
    std::vector<double> gx, gw;
    gauss_legendre(24, gx, gw);
    for (size_t n = 0; n < ts.size(); ++n) {
        double t = ts[n];
        if (t <= 0) continue;
        // X = X(0) H + int X'(s) H(. - s) ds, X' from the profile (piecewise smooth)
        std::vector<std::pair<double, double>> pieces;
        if (X.kind == TimeProfile::Smoothed)
            pieces.push_back({0.0, std::min(t, X.tau)});
        else
            for (size_t i = 0; i + 1 < X.values.size() && i * X.dt < t; ++i) pieces.push_back({i * X.dt, std::min((i + 1) * X.dt, t)});
        std::vector<double> tt;
        std::vector<cplx> wts;
        tt.push_back(t);
        wts.push_back(X.value(0.0));
        for (auto [a, b] : pieces) {
            for (int i = 0; i < 24; ++i) {
                double s = 0.5 * (a + b) + 0.5 * (b - a) * gx[i];
                cplx dX = X.kind == TimeProfile::Smoothed ? cplx((1 - std::cos(2 * pi * s / X.tau)) / X.tau)
                                                          : (X.value(b) - X.value(a)) / (b - a);
                tt.push_back(t - s);
                wts.push_back(0.5 * (b - a) * gw[i] * dX);
            }
        }
        auto u = direct(unit, 0, tt), v = direct(unit, 1, tt);
        for (size_t i = 0; i < tt.size(); ++i) {
            tr.u[n] += wts[i] * u[i];
            tr.v[n] += wts[i] * v[i];
        }
    }
    return tr;
}

} // namespace lamb
