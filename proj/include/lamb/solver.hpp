#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>

#include "contour.hpp"
#include "data_transforms.hpp"
#include "parallel.hpp"

namespace lamb {

enum class Normalization { FourierConsistent, PaperFinalVerbatim };

inline const char* normalization_name(Normalization n) {
    return n == Normalization::FourierConsistent ? "fourier-consistent" : "paper-final-verbatim";
}

inline double normalization_factor(Normalization n) {
    return n == Normalization::FourierConsistent ? 1.0 / (4 * pi * pi) : 1.0;
}

// PerUnknown: V2, U2 over Delta1 and V1, U1 over Delta2. AsDisplayed swaps
// them (how the display reads); kept as a negative control only.
enum class DeltaPlacement { PerUnknown, AsDisplayed };

struct ProblemSpec {
    Material material;
    InitialData initial;
    BoundaryForcing forcing;
    Normalization normalization = Normalization::FourierConsistent;
    DeltaPlacement placement = DeltaPlacement::PerUnknown;

    bool is_zero() const { return initial.is_zero() && forcing.is_zero(); }
};

struct SolverOptions {
    double tol = 1e-7;          // relative, inner and outer
    double L_l = 0.0;           // 0: default_L_l
    double L_k = 0.0;           // 0: max(50, 40/max(y,|x|+eps)), cut by the mollifier
    double clearance = 0.05;    // gamma_k clearance relative to |k|
    double clearance_cap = 0.5;
    double y_min = 1e-2;
    bool allow_small_y = false;
    double k_notch = 1e-6;      // |k| < k_notch excluded
    bool use_symmetry = true;   // u(-k) = conj u(k) for real data
    int threads = 0;
};

// ---------------------------------------------------------------------------
// elimination

struct Unknowns {
    cplx U1, U2, V1, V2;
};

// N-only parts of the eliminated unknowns; inputs are N_P(l12), N_Q(-l), N_P(-l), N_Q(l21)
inline Unknowns eliminate_raw(const Coeffs& c, cplx d1, cplx d2, cplx NP12, cplx NQm, cplx NPm, cplx NQ21) {
    Unknowns u;
    u.V2 = (c.C4 * (-NP12) - c.C2 * (-NQm)) / d1;
    u.U2 = (-c.C3 * (-NP12) + c.C1 * (-NQm)) / d1;
    u.V1 = (c.D4 * (-NPm) - c.D2 * (-NQ21)) / d2;
    u.U1 = (-c.D3 * (-NPm) + c.D1 * (-NQ21)) / d2;
    return u;
}

inline Unknowns eliminate_unknowns(const Material& m, double k, cplx l, cplx NP12, cplx NQm, cplx NPm, cplx NQ21) {
    cplx L12 = l_map_12(m, k, l), L21 = l_map_21(m, k, l);
    Coeffs c = coeffs_raw(m, k, l, L12, L21);
    cplx d1 = delta_raw(1, m, k, l, L12, L21), d2 = delta_raw(2, m, k, l, L12, L21);
    double scale = sq(k * k + std::norm(l)) * std::max(m.mu * m.mu, sq(m.lambda + 2 * m.mu));
    if (std::abs(d1) < 1e-13 * scale || std::abs(d2) < 1e-13 * scale)
        throw DeterminantNearZero("eliminate_unknowns: determinant vanishes (point not on an admissible contour)");
    return eliminate_raw(c, d1, d2, NP12, NQm, NPm, NQ21);
}

// ---------------------------------------------------------------------------
// per-k integrands. eval(l, ts, fu, fv) fills the l-integrands (without e^{ily})
// for every t; the gamma part applies where Im l > 0 or |Re l| >= xend (shared
// real tails), the real-axis part where Im l == 0.

namespace detail {

struct TimeFactors {
    cplx S1, S2, C, Sn;
};

inline TimeFactors time_factors(const ForcingAtK& fk, cplx W, double t, bool ic) {
    TimeFactors f;
    f.S1 = fk.S(1, W, t);
    f.S2 = fk.S(2, W, t);
    if (ic) {
        cplx w = std::sqrt(W);
        f.C = std::cos(w * t);
        f.Sn = t * sinc(w * t);
    } else {
        f.C = f.Sn = 0.0;
    }
    return f;
}

} // namespace detail

struct GeneralIntegrand {
    Material m;
    double k;
    double xend;
    ForcingAtK fk;
    InitialAtK ic;
    detail::MapConsts q;
    bool swap_deltas;

    GeneralIntegrand(const ProblemSpec& p, double k_, double xend_)
        : m(p.material), k(k_), xend(xend_), fk(p.forcing.at(k_, p.material)), ic(p.initial.at(k_)), q(p.material),
          swap_deltas(p.placement == DeltaPlacement::AsDisplayed) {}

    bool zero() const { return fk.zero && ic.zero; }

    void eval(cplx l, const std::vector<double>& ts, cplx* fu, cplx* fv) const {
        const double lp = m.lambda + 2 * m.mu, mu = m.mu, lam = m.lambda;
        const bool onR = l.imag() == 0.0;
        const bool onG = l.imag() > 0.0 || std::abs(l.real()) >= xend;
        const cplx s2 = k * k + l * l;
        const cplx W1 = lp * s2, W2 = mu * s2;
        const bool hasic = !ic.zero;
        std::array<cplx, 4> pl{}, pm{}, p12{}, p21{};
        if (hasic) pm = ic.pq(-l);
        if (hasic && onR) pl = ic.pq(l);
        cplx L12 = 0, L21 = 0, d1 = 1, d2 = 1;
        Coeffs c{};
        if (onG) {
            L12 = detail::l12(q, k, l);
            L21 = detail::l21(q, k, l);
            c = coeffs_raw(m, k, l, L12, L21);
            d1 = delta_raw(1, m, k, l, L12, L21);
            d2 = delta_raw(2, m, k, l, L12, L21);
            if (swap_deltas) std::swap(d1, d2);
            if (hasic) {
                p12 = ic.pq(L12);
                p21 = ic.pq(L21);
            }
        }
        auto NP = [&](cplx lq, const detail::TimeFactors& f, const std::array<cplx, 4>& pq) {
            return -lq * lp * f.S2 - mu * k * f.S1 + pq[0] * f.C + pq[1] * f.Sn;
        };
        auto NQ = [&](cplx lq, const detail::TimeFactors& f, const std::array<cplx, 4>& pq) {
            return k * lp * f.S2 - mu * lq * f.S1 + pq[2] * f.C + pq[3] * f.Sn;
        };
        const cplx inv = 1.0 / s2;
        const cplx gu1 = 2.0 * (lam * k * k * k + k * l * l * lp), gu2 = -4.0 * mu * k * l * l;
        const cplx gv1 = 4.0 * mu * k * l * l, gv2 = 2.0 * mu * (k * k * k - k * l * l);
        for (size_t n = 0; n < ts.size(); ++n) {
            double t = ts[n];
            auto f1 = detail::time_factors(fk, W1, t, hasic);
            auto f2 = detail::time_factors(fk, W2, t, hasic);
            cplx u = 0, v = 0;
            if (onG) {
                // l12 carries omega_1^2 -> omega_2^2, l21 carries omega_2^2 -> omega_1^2
                Unknowns x = eliminate_raw(c, d1, d2, NP(L12, f2, p12), NQ(-l, f2, pm), NP(-l, f1, pm), NQ(L21, f1, p21));
                u += gu1 * x.V1 + gu2 * x.V2;
                v += gv1 * x.U1 + gv2 * x.U2;
            }
            if (onR) {
                cplx npl = NP(l, f1, pl), npm = NP(-l, f1, pm), nql = NQ(l, f2, pl), nqm = NQ(-l, f2, pm);
                u += k * (npl + npm) + l * (nql - nqm);
                v += l * (npl - npm) - k * (nql + nqm);
            }
            fu[n] = u * inv;
            fv[n] = v * inv;
        }
    }
};

enum class Prop2Form { Derived, AsPrinted };

// closed-form integrands for the suddenly applied normal line load
struct Prop2Integrand {
    Material m;
    double k, xend, sigma0;
    Prop2Form form;
    detail::MapConsts q;

    Prop2Integrand(const Material& m_, double sigma, double k_, double xend_, Prop2Form f)
        : m(m_), k(k_), xend(xend_), sigma0(sigma), form(f), q(m_) {}

    bool zero() const { return sigma0 == 0.0; }

    void eval(cplx l, const std::vector<double>& ts, cplx* fu, cplx* fv) const {
        const double lp = m.lambda + 2 * m.mu, mu = m.mu, lam = m.lambda;
        const double sp = sigma0 * lp / (m.lambda + m.mu);
        const bool onR = l.imag() == 0.0;
        const bool onG = l.imag() > 0.0 || std::abs(l.real()) >= xend;
        const cplx s2 = k * k + l * l, W1 = lp * s2, W2 = mu * s2;
        cplx L12 = 0, L21 = 0, d1 = 1, d2 = 1, D1 = 0;
        if (onG) {
            L12 = detail::l12(q, k, l);
            L21 = detail::l21(q, k, l);
            d1 = delta_raw(1, m, k, l, L12, L21);
            d2 = delta_raw(2, m, k, l, L12, L21);
            D1 = lam * k * k + l * l * lp;
        }
        const cplx k2 = k * k, l2 = l * l;
        const cplx au = 2.0 * (lam * k2 * k * l + k * l2 * l * lp), bu = 4.0 * mu * k * l2 * L12;
        for (size_t n = 0; n < ts.size(); ++n) {
            double t = ts[n];
            cplx K1 = detail::K_int(W1, t), K2 = detail::K_int(W2, t);
            cplx c1 = W1 * K1, c2 = W2 * K2;  // 1 - cos(omega_j t)
            cplx u = 0, v = 0;
            if (onG) {
                if (form == Prop2Form::Derived) {
                    u += -sp * (au * c1 / d2 + bu * c2 / d1);
                    v += -sp * (4.0 * mu * k2 * l2 * (2.0 * mu * l * L21 + D1) * K1 / d2 +
                                2.0 * mu * mu * (k2 * k2 - k2 * l2) * (2.0 * l * L12 + l2 - k2) * K2 / d1);
                } else {
                    u += -sp * (au * c1 + bu * c2) / d1;
                    v += -sp * (2.0 * mu * k2 * l2 * (2.0 * mu * l * L21 + D1) * K1 -
                                2.0 * mu * mu * (k2 * k2 - k2 * l2) * (k2 - l2 - 2.0 * l * L12) * K2) / d2;
                }
            }
            if (onR) v += -2.0 * sp * (l2 * K1 + k2 * K2);
            fu[n] = u / s2;
            fv[n] = v / s2;
        }
    }
};

// ---------------------------------------------------------------------------
// grids

struct FieldGrid {
    std::vector<double> xs, ys, ts;
    std::vector<double> u, v;  // index (n * ny + j) * nx + i
    double max_imag_u = 0.0, max_imag_v = 0.0;
    double error_estimate = 0.0;
    bool tolerance_flagged = false;
    std::string source = "spectral";
    std::string normalization = "fourier-consistent";
    double tol = 0.0, L_l = 0.0, L_k = 0.0, clearance = 0.0;
    int k_nodes = 0;
    double max_l_nodes = 0;

    size_t nx() const { return xs.size(); }
    size_t ny() const { return ys.size(); }
    size_t nt() const { return ts.size(); }
    size_t idx(size_t i, size_t j, size_t n) const { return (n * ys.size() + j) * xs.size() + i; }
    void allocate() {
        u.assign(xs.size() * ys.size() * ts.size(), 0.0);
        v.assign(u.size(), 0.0);
    }
};

// inner l-integrals at one k for every (y, t): U(k, y, t) = int e^{ily} f dl
struct KSlice {
    std::vector<cplx> u, v;  // j * nt + n
    double err = 0.0;
    bool converged = true;
    int nodes = 0;
};

namespace detail {

// smooth (C^3) taper of the real l-tails over [L/2, L]: a hard cut leaves an
// error ~ f(L) e^{iLy}/y that oscillates in y on the grid scale
inline double tail_window(cplx l, double L) {
    if (l.imag() != 0.0 || L <= 0) return 1.0;
    double s = (std::abs(l.real()) - 0.5 * L) / (0.5 * L);
    if (s <= 0) return 1.0;
    if (s >= 1) return 0.0;
    double s4 = s * s * s * s;
    return 1.0 - s4 * (35 - 84 * s + 70 * s * s - 20 * s * s * s);
}

inline std::vector<double> probe_of(const std::vector<double>& s) {
    double lo = *std::min_element(s.begin(), s.end()), hi = *std::max_element(s.begin(), s.end());
    if (hi == lo) return {lo};
    return {lo, hi};
}

inline std::vector<double> probe_t(const std::vector<double>& ts) {
    double hi = *std::max_element(ts.begin(), ts.end());
    double lo = hi;
    for (double t : ts)
        if (t > 0) lo = std::min(lo, t);
    if (lo == hi) return {hi};
    return {lo, hi};
}

} // namespace detail

// Two-pass evaluation over a tensor grid: pass 1 adapts the k mesh (and, per k,
// the l mesh) on probe points; pass 2 evaluates every (y, t) on the cached l
// meshes with one matrix product per k and accumulates e^{ikx}.
template <class Factory>
class SpectralEngine {
public:
    SpectralEngine(const Material& m, Factory fac, double norm, const SolverOptions& opt, bool real_data)
        : m_(m), fac_(std::move(fac)), norm_(norm), opt_(opt), real_(real_data) {}

    double L_l_for(double k, double ymin) const {
        if (opt_.L_l > 0) return opt_.L_l;
        return default_L_l(k, std::max(ymin, 1e-3), m_);
    }

    ContourPath path_for(double k, double ymin) const {
        GammaOptions go;
        go.clearance = opt_.clearance;
        go.clearance_cap = opt_.clearance_cap;
        go.L = L_l_for(k, ymin);
        return build_gamma_k(m_, k, go);
    }

    // segments: gamma_k with the real interior [-xend, xend] appended
    static std::vector<std::pair<cplx, cplx>> segments_of(const ContourPath& p, double& xend) {
        auto segs = p.segments;
        xend = segs.back().first.real();
        segs.push_back({cplx(-xend, 0), cplx(xend, 0)});
        return segs;
    }

    // inner adaptive integration on probe (y, t); returns probe values, keeps the mesh
    struct Probe {
        std::vector<std::pair<cplx, cplx>> panels;
        std::vector<cplx> vals;  // (a * nyp + j) * ntp + n
        double err = 0;
        bool converged = true;
        double xend = 0, L = 0;
    };

    Probe inner_probe(double k, const std::vector<double>& yp, const std::vector<double>& tp, double ymin, double tmax,
                      double ymax) const {
        Probe pr;
        ContourPath path = path_for(k, ymin);
        auto segs = segments_of(path, pr.xend);
        pr.L = path.L;
        auto integrand = fac_(k, pr.xend);
        int nyp = yp.size(), ntp = tp.size(), dim = 2 * nyp * ntp;
        if (integrand.zero()) {
            pr.vals.assign(dim, 0.0);
            return pr;
        }
        std::vector<cplx> fu(ntp), fv(ntp);
        double L = pr.L;
        auto f = [&](cplx l, cplx* out) {
            integrand.eval(l, tp, fu.data(), fv.data());
            double wl = detail::tail_window(l, L);
            for (int j = 0; j < nyp; ++j) {
                cplx e = wl * std::exp(I * l * yp[j]);
                for (int n = 0; n < ntp; ++n) {
                    out[(0 * nyp + j) * ntp + n] = fu[n] * e;
                    out[(1 * nyp + j) * ntp + n] = fv[n] * e;
                }
            }
        };
        QuadOptions o;
        o.rel_tol = opt_.tol;
        o.abs_tol = 1e-300;
        o.max_panel_length = 3 * pi / (ymax + m_.cp() * tmax + 0.5);
        auto r = integrate_segments(f, segs, dim, o);
        pr.vals = r.value;
        pr.err = r.error_estimate;
        pr.converged = r.converged;
        pr.panels.reserve(r.panels.size());
        for (auto& p : r.panels) pr.panels.push_back({p.a, p.b});
        return pr;
    }

    KSlice inner_full(double k, const Probe& pr, const std::vector<double>& ys, const std::vector<double>& ts) const {
        KSlice s;
        int ny = ys.size(), nt = ts.size();
        s.u.assign(ny * nt, 0.0);
        s.v.assign(ny * nt, 0.0);
        s.err = pr.err;
        s.converged = pr.converged;
        if (pr.panels.empty()) return s;
        auto integrand = fac_(k, pr.xend);
        double x[15], wt[15];
        gk::nodes15(x, wt);
        int nq = 15 * pr.panels.size();
        s.nodes = nq;
        Eigen::MatrixXcd E(ny, nq), Fu(nq, nt), Fv(nq, nt);
        std::vector<cplx> fu(nt), fv(nt);
        int qi = 0;
        for (auto& [a, b] : pr.panels) {
            cplx c = 0.5 * (a + b), h = 0.5 * (b - a);
            for (int i = 0; i < 15; ++i, ++qi) {
                cplx l = c + x[i] * h, w = wt[i] * h * detail::tail_window(l, pr.L);
                integrand.eval(l, ts, fu.data(), fv.data());
                for (int n = 0; n < nt; ++n) {
                    Fu(qi, n) = fu[n];
                    Fv(qi, n) = fv[n];
                }
                for (int j = 0; j < ny; ++j) E(j, qi) = w * std::exp(I * l * ys[j]);
            }
        }
        Eigen::MatrixXcd Ru = E * Fu, Rv = E * Fv;
        for (int j = 0; j < ny; ++j)
            for (int n = 0; n < nt; ++n) {
                s.u[j * nt + n] = Ru(j, n);
                s.v[j * nt + n] = Rv(j, n);
            }
        return s;
    }

    double default_L_k(const std::vector<double>& xs, const std::vector<double>& ys, double mollifier) const {
        if (opt_.L_k > 0) return opt_.L_k;
        double ymin = *std::min_element(ys.begin(), ys.end());
        double xa = 0;
        for (double x : xs) xa = std::max(xa, std::abs(x));
        double L = std::max(50.0, 40.0 / std::max(std::max(ymin, 1e-3), xa + 1e-2));
        if (mollifier > 0) L = std::min(L, 9.0 / mollifier);
        return L;
    }

    FieldGrid evaluate(const std::vector<double>& xs, const std::vector<double>& ys, const std::vector<double>& ts,
                       double mollifier = 0.0) const {
        FieldGrid g;
        g.xs = xs;
        g.ys = ys;
        g.ts = ts;
        g.allocate();
        g.tol = opt_.tol;
        g.clearance = opt_.clearance;
        double ymin = *std::min_element(ys.begin(), ys.end());
        double ymax = *std::max_element(ys.begin(), ys.end());
        double tmax = *std::max_element(ts.begin(), ts.end());
        if (ymin <= 0 && !opt_.allow_small_y) throw DomainError("evaluate: y must be > 0");
        if (ymin < opt_.y_min && !opt_.allow_small_y)
            throw DomainError("evaluate: y below y_min; surface traces belong to the Volterra route (or set allow_small_y)");
        for (double t : ts)
            if (t < 0) throw DomainError("evaluate: t must be >= 0");
        double Lk = default_L_k(xs, ys, mollifier);
        g.L_k = Lk;
        g.L_l = L_l_for(1.0, ymin);
        auto yp = detail::probe_of(ys), tp = detail::probe_t(ts), xp = detail::probe_of(xs);
        if (tmax == 0) tp = {0.0};
        int nyp = yp.size(), ntp = tp.size(), nxp = xp.size();
        double xa = 0;
        for (double x : xs) xa = std::max(xa, std::abs(x));

        // pass 1: outer adaptivity on probes
        std::map<double, Probe> cache;
        bool flagged = false;
        double inner_err = 0;
        int odim = 2 * nxp * nyp * ntp;
        auto fk = [&](cplx kz, cplx* out) {
            double k = kz.real();
            Probe pr = inner_probe(k, yp, tp, ymin, tmax, ymax);
            if (!pr.converged) flagged = true;
            inner_err = std::max(inner_err, pr.err);
            for (int a = 0; a < 2; ++a)
                for (int i = 0; i < nxp; ++i) {
                    cplx e = std::exp(I * k * xp[i]);
                    for (int j = 0; j < nyp; ++j)
                        for (int n = 0; n < ntp; ++n) {
                            cplx val = pr.vals[(a * nyp + j) * ntp + n] * e;
                            // symmetric mode: the k<0 half is the conjugate; fold as 2 Re later
                            out[((a * nxp + i) * nyp + j) * ntp + n] = val;
                        }
                }
            cache.emplace(k, std::move(pr));
        };
        std::vector<std::pair<cplx, cplx>> ksegs;
        bool sym = real_ && opt_.use_symmetry;
        if (!sym) ksegs.push_back({cplx(-Lk), cplx(-opt_.k_notch)});
        ksegs.push_back({cplx(opt_.k_notch), cplx(Lk)});
        QuadOptions o;
        o.rel_tol = opt_.tol;
        o.abs_tol = 1e-300;
        o.max_panel_length = 2 * pi / (xa + ymax + m_.cp() * tmax + 0.5);
        auto kr = integrate_segments(fk, ksegs, odim, o);
        if (!kr.converged) flagged = true;

        // pass 2: full slices on the final k nodes
        double x[15], wt[15];
        gk::nodes15(x, wt);
        std::vector<std::pair<double, double>> knodes;  // (k, weight)
        for (auto& p : kr.panels) {
            double c = 0.5 * (p.a + p.b).real(), h = 0.5 * (p.b - p.a).real();
            for (int i = 0; i < 15; ++i) knodes.push_back({c + x[i] * h, wt[i] * h});
        }
        g.k_nodes = knodes.size();
        int nx = xs.size(), ny = ys.size(), nt = ts.size();
        int workers = std::min(opt_.threads > 0 ? opt_.threads : solver_threads(), std::max(1, (int)knodes.size()));
        std::vector<std::vector<cplx>> accu(workers, std::vector<cplx>(size_t(nx) * ny * nt, 0.0)),
            accv(workers, std::vector<cplx>(size_t(nx) * ny * nt, 0.0));
        std::vector<int> maxnodes(workers, 0);
        parallel_for(
            knodes.size(),
            [&](int idx, int w) {
                auto [k, wk] = knodes[idx];
                const Probe& pr = cache.at(k);
                KSlice s = inner_full(k, pr, ys, ts);
                maxnodes[w] = std::max(maxnodes[w], s.nodes);
                auto& au = accu[w];
                auto& av = accv[w];
                for (int i = 0; i < nx; ++i) {
                    cplx e = wk * std::exp(I * k * xs[i]);
                    for (int j = 0; j < ny; ++j)
                        for (int n = 0; n < nt; ++n) {
                            size_t id = (size_t(n) * ny + j) * nx + i;
                            au[id] += e * s.u[j * nt + n];
                            av[id] += e * s.v[j * nt + n];
                        }
                }
            },
            workers);
        for (int w = 0; w < workers; ++w) g.max_l_nodes = std::max<double>(g.max_l_nodes, maxnodes[w]);
        double scale = 0;
        for (size_t id = 0; id < g.u.size(); ++id) {
            cplx u = 0, v = 0;
            for (int w = 0; w < workers; ++w) {
                u += accu[w][id];
                v += accv[w][id];
            }
            if (sym) {
                u = 2.0 * u.real();
                v = 2.0 * v.real();
            }
            u *= norm_;
            v *= norm_;
            g.u[id] = u.real();
            g.v[id] = v.real();
            g.max_imag_u = std::max(g.max_imag_u, std::abs(u.imag()));
            g.max_imag_v = std::max(g.max_imag_v, std::abs(v.imag()));
            scale = std::max({scale, std::abs(u.real()), std::abs(v.real())});
        }
        g.error_estimate = (sym ? 2 : 1) * norm_ * kr.error_estimate;
        g.tolerance_flagged = flagged;
        (void)scale;
        (void)inner_err;
        return g;
    }

    // x-transform trace at one k: u~(k, y, t) = 2 pi norm U(k, y, t)
    KSlice x_transform(double k, const std::vector<double>& ys, const std::vector<double>& ts) const {
        double ymin = *std::min_element(ys.begin(), ys.end()), ymax = *std::max_element(ys.begin(), ys.end());
        double tmax = *std::max_element(ts.begin(), ts.end());
        auto tp = detail::probe_t(ts);
        if (tmax == 0) tp = {0.0};
        Probe pr = inner_probe(k, detail::probe_of(ys), tp, ymin, tmax, ymax);
        KSlice s = inner_full(k, pr, ys, ts);
        for (auto& z : s.u) z *= 2 * pi * norm_;
        for (auto& z : s.v) z *= 2 * pi * norm_;
        return s;
    }

private:
    Material m_;
    Factory fac_;
    double norm_;
    SolverOptions opt_;
    bool real_;
};

inline auto general_engine(const ProblemSpec& p, const SolverOptions& opt) {
    auto fac = [p](double k, double xend) { return GeneralIntegrand(p, k, xend); };
    // every supported forcing and initial-data kind is real in x
    return SpectralEngine<decltype(fac)>(p.material, fac, normalization_factor(p.normalization), opt, true);
}

inline auto prop2_engine(const Material& m, double sigma0, const SolverOptions& opt, Prop2Form form,
                         Normalization nrm = Normalization::FourierConsistent) {
    auto fac = [m, sigma0, form](double k, double xend) { return Prop2Integrand(m, sigma0, k, xend, form); };
    return SpectralEngine<decltype(fac)>(m, fac, normalization_factor(nrm), opt, true);
}

struct PointValue {
    double u = 0, v = 0;
    double imag_u = 0, imag_v = 0;
    double error_estimate = 0;
    bool flagged = false;
};

inline PointValue point_of(const FieldGrid& g) {
    return {g.u[0], g.v[0], g.max_imag_u, g.max_imag_v, g.error_estimate, g.tolerance_flagged};
}

inline FieldGrid evaluate_grid(const ProblemSpec& p, const std::vector<double>& xs, const std::vector<double>& ys,
                               const std::vector<double>& ts, const SolverOptions& opt = {}) {
    p.material.validate();
    ensure_branches_validated(p.material);
    FieldGrid g;
    if (p.is_zero()) {
        g.xs = xs;
        g.ys = ys;
        g.ts = ts;
        g.allocate();
    } else {
        g = general_engine(p, opt).evaluate(xs, ys, ts, p.forcing.kind == BoundaryForcing::Sampled ? 0.0 : p.forcing.mollifier);
    }
    g.normalization = normalization_name(p.normalization);
    return g;
}

inline PointValue evaluate_uv(const ProblemSpec& p, double x, double y, double t, const SolverOptions& opt = {}) {
    return point_of(evaluate_grid(p, {x}, {y}, {t}, opt));
}

inline PointValue evaluate_prop2(const Material& m, double sigma0, double x, double y, double t, const SolverOptions& opt = {},
                                 Prop2Form form = Prop2Form::Derived,
                                 Normalization nrm = Normalization::FourierConsistent) {
    m.validate();
    ensure_branches_validated(m);
    if (sigma0 == 0.0) return {};
    return point_of(prop2_engine(m, sigma0, opt, form, nrm).evaluate({x}, {y}, {t}));
}

} // namespace lamb
