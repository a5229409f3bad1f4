#pragma once

#include <functional>

#include "solver.hpp"

namespace lamb {

// body force f(x, y) s(t) along x (dir 0) or y (dir 1); Gaussian of std `width`
struct BodySource {
    double x = 0, y = 1, width = 0.05;
    int dir = 0;
    std::function<double(double)> s;
};

struct FdtdConfig {
    double X = 3.5, Y = 3.5;  // domain [-X, X] x [0, Y]
    double h = 1.0 / 64;
    double dt = 0.0;          // 0: 0.5 h / cp
    double eps_x = 0.0;       // 0: taken from the forcing
    double tau = 0.0;         // 0: taken from the forcing profile
    double layer = 1.0;       // sponge width (left, right, bottom)
    double sigma_max = 0.0;   // 0: 18 cp / layer
    bool periodic_x = false;  // test harness: no sponge in x, wrap around
    bool check_domain = true;
    std::vector<BodySource> sources;
};

// staggered grid: u at (x_i, (j+1/2) h), v at (x_i + h/2, j h), x_i = -X + i h.
// Arrays carry one ghost column on each side (offset 1) and a zero row at j = Ny.
struct FdtdState {
    int Nx = 0, Ny = 0, W = 0;
    double t = 0;
    long step = 0;
    std::vector<double> u, up, v, vp;
    std::vector<double> sig_u, sig_v;  // sponge profile at the u and v nodes
    size_t at(int i, int j) const { return size_t(j) * W + (i + 1); }
};

namespace detail {

struct FdtdWork {
    std::vector<double> cxx, cyy, kxy, au, av;
};

inline void fill_ghosts(const FdtdConfig& c, FdtdState& s, std::vector<double>& a, bool is_u) {
    for (int j = 0; j <= s.Ny; ++j) {
        if (c.periodic_x) {
            a[s.at(-1, j)] = a[s.at(s.Nx - 1, j)];
            a[s.at(s.Nx, j)] = a[s.at(0, j)];
            a[s.at(s.Nx + 1, j)] = a[s.at(1, j)];
        } else {
            a[s.at(-1, j)] = 0;
            if (is_u) {
                a[s.at(0, j)] = 0;
                a[s.at(s.Nx, j)] = 0;
            } else {
                a[s.at(s.Nx, j)] = 0;
            }
            a[s.at(s.Nx + 1, j)] = 0;
        }
    }
    for (int i = -1; i <= s.Nx + 1; ++i) a[s.at(i, s.Ny)] = 0;
}

// accelerations at time t from displacement (U, V)
inline void accel(const FdtdConfig& c, const Material& m, const BoundaryForcing& f, FdtdState& s, const std::vector<double>& U,
                  const std::vector<double>& V, double t, FdtdWork& w) {
    int Nx = s.Nx, Ny = s.Ny;
    double h = c.h, lp = m.lambda + 2 * m.mu, la = m.lambda, mu = m.mu;
    size_t n = U.size();
    w.cxx.assign(n, 0);
    w.cyy.assign(n, 0);
    w.kxy.assign(n, 0);
    w.au.assign(n, 0);
    w.av.assign(n, 0);
    // normal stresses at cell centres (i + 1/2, j + 1/2)
    for (int j = 0; j < Ny; ++j)
        for (int i = -1; i < Nx; ++i) {
            double exx = (U[s.at(i + 1, j)] - U[s.at(i, j)]) / h;
            double eyy = (V[s.at(i, j + 1)] - V[s.at(i, j)]) / h;
            w.cxx[s.at(i, j)] = lp * exx + la * eyy;
            w.cyy[s.at(i, j)] = la * exx + lp * eyy;
        }
    // shear stress at corners (i, j); the surface row carries the data
    bool forced = !f.is_zero();
    for (int i = 0; i <= Nx; ++i) {
        double x = -c.X + i * h;
        w.kxy[s.at(i, 0)] = forced ? mu * f.g_physical(1, x, t, m) : 0.0;
    }
    for (int j = 1; j <= Ny; ++j)
        for (int i = 0; i <= Nx; ++i)
            w.kxy[s.at(i, j)] = mu * ((U[s.at(i, j)] - U[s.at(i, j - 1)]) / h + (V[s.at(i, j)] - V[s.at(i - 1, j)]) / h);
    int i0 = c.periodic_x ? 0 : 1, i1 = Nx;  // u active [i0, i1)
    for (int j = 0; j < Ny; ++j)
        for (int i = i0; i < i1; ++i)
            w.au[s.at(i, j)] = (w.cxx[s.at(i, j)] - w.cxx[s.at(i - 1, j)]) / h + (w.kxy[s.at(i, j + 1)] - w.kxy[s.at(i, j)]) / h;
    for (int i = 0; i < Nx; ++i) {
        double x = -c.X + (i + 0.5) * h;
        double S = forced ? lp * f.g_physical(2, x, t, m) : 0.0;
        // half cell at the surface with the ghost stress mirrored about the data
        w.av[s.at(i, 0)] = (w.kxy[s.at(i + 1, 0)] - w.kxy[s.at(i, 0)]) / h + 2 * (w.cyy[s.at(i, 0)] - S) / h;
    }
    for (int j = 1; j < Ny; ++j)
        for (int i = 0; i < Nx; ++i)
            w.av[s.at(i, j)] = (w.kxy[s.at(i + 1, j)] - w.kxy[s.at(i, j)]) / h + (w.cyy[s.at(i, j)] - w.cyy[s.at(i, j - 1)]) / h;
    for (auto& src : c.sources) {
        double a = src.s ? src.s(t) : 0.0;
        if (a == 0) continue;
        double norm = 1.0 / (2 * pi * src.width * src.width);
        int r = static_cast<int>(std::ceil(5 * src.width / h)) + 1;
        bool isu = src.dir == 0;
        double xo = isu ? 0.0 : 0.5 * h, yo = isu ? 0.5 * h : 0.0;
        int ic = static_cast<int>(std::lround((src.x + c.X - xo) / h)), jc = static_cast<int>(std::lround((src.y - yo) / h));
        for (int j = std::max(0, jc - r); j <= std::min(Ny - 1, jc + r); ++j)
            for (int i = std::max(0, ic - r); i <= std::min(Nx - 1, ic + r); ++i) {
                double x = -c.X + i * h + xo, y = j * h + yo;
                double g = norm * std::exp(-0.5 * (sq(x - src.x) + sq(y - src.y)) / sq(src.width));
                (isu ? w.au : w.av)[s.at(i, j)] += a * g;
            }
    }
}

} // namespace detail

inline double fdtd_dt(const FdtdConfig& c, const Material& m) { return c.dt > 0 ? c.dt : 0.5 * c.h / m.cp(); }

inline void validate(const FdtdConfig& c, const Material& m, const BoundaryForcing& f) {
    m.validate();
    if (!(c.h > 0) || !(c.X > 0) || !(c.Y > 0)) throw DomainError("fdtd: need h, X, Y > 0");
    double dt = fdtd_dt(c, m);
    if (dt > 0.5 * c.h / m.cp() * (1 + 1e-12)) throw CflViolation("fdtd: dt exceeds 0.5 h / cp");
    if (!f.is_zero()) {
        if (f.kind != BoundaryForcing::Sampled) {
            double eps = c.eps_x > 0 ? c.eps_x : f.mollifier;
            if (!(f.mollifier > 0)) throw DomainError("fdtd: mollified forcing only (set a mollifier width)");
            if (eps < 4 * c.h) throw GridTooCoarse("fdtd: mollifier width below 4 h");
        }
        double tau = c.tau > 0 ? c.tau : (f.kind != BoundaryForcing::Moving && f.profile.kind == TimeProfile::Smoothed ? f.profile.tau : 0.0);
        if (f.kind != BoundaryForcing::Moving && f.profile.kind == TimeProfile::Heaviside && f.kind != BoundaryForcing::Sampled)
            throw DomainError("fdtd: mollified forcing only (a sudden Heaviside needs a rise time)");
        if (tau > 0 && tau < 4 * dt) throw CflViolation("fdtd: rise time below 4 dt");
    }
}

inline FdtdState fdtd_init(const FdtdConfig& c, const Material& m, const BoundaryForcing& f, const InitialData& d) {
    validate(c, m, f);
    FdtdState s;
    s.Nx = static_cast<int>(std::lround(2 * c.X / c.h));
    s.Ny = static_cast<int>(std::lround(c.Y / c.h));
    s.W = s.Nx + 3;
    size_t n = size_t(s.W) * (s.Ny + 1);
    s.u.assign(n, 0);
    s.v.assign(n, 0);
    s.sig_u.assign(n, 0);
    s.sig_v.assign(n, 0);
    double smax = c.sigma_max > 0 ? c.sigma_max : 18 * m.cp() / c.layer;
    auto sigma = [&](double x, double y) {
        double dx = c.periodic_x ? 0.0 : std::max(0.0, std::abs(x) - (c.X - c.layer));
        double dy = std::max(0.0, y - (c.Y - c.layer));
        double d = std::max(dx, dy) / c.layer;
        return smax * d * d;
    };
    std::vector<double> u1(n, 0), v1(n, 0);
    for (int j = 0; j <= s.Ny; ++j)
        for (int i = -1; i <= s.Nx + 1; ++i) {
            double xu = -c.X + i * c.h, yu = (j + 0.5) * c.h, xv = xu + 0.5 * c.h, yv = j * c.h;
            s.sig_u[s.at(i, j)] = sigma(xu, yu);
            s.sig_v[s.at(i, j)] = sigma(xv, yv);
            if (d.kind != InitialData::Zero && j < s.Ny) {
                s.u[s.at(i, j)] = d.value(0, xu, yu);
                u1[s.at(i, j)] = d.value(1, xu, yu);
                s.v[s.at(i, j)] = d.value(2, xv, yv);
                v1[s.at(i, j)] = d.value(3, xv, yv);
            }
        }
    detail::fill_ghosts(c, s, s.u, true);
    detail::fill_ghosts(c, s, s.v, false);
    detail::fill_ghosts(c, s, u1, true);
    detail::fill_ghosts(c, s, v1, false);
    // second-order start: u(-dt) = u0 - dt u1 + dt^2/2 a(u0)
    double dt = fdtd_dt(c, m);
    detail::FdtdWork w;
    detail::accel(c, m, f, s, s.u, s.v, 0.0, w);
    s.up.resize(n);
    s.vp.resize(n);
    for (size_t q = 0; q < n; ++q) {
        s.up[q] = s.u[q] - dt * u1[q] + 0.5 * dt * dt * w.au[q];
        s.vp[q] = s.v[q] - dt * v1[q] + 0.5 * dt * dt * w.av[q];
    }
    detail::fill_ghosts(c, s, s.up, true);
    detail::fill_ghosts(c, s, s.vp, false);
    return s;
}

// one leapfrog step from t to t + dt (sponge as a damping term)
inline void step(FdtdState& s, const FdtdConfig& c, const Material& m, const BoundaryForcing& f, detail::FdtdWork& w) {
    double dt = fdtd_dt(c, m);
    if (dt > 0.5 * c.h / m.cp() * (1 + 1e-12)) throw CflViolation("fdtd: dt exceeds 0.5 h / cp");
    detail::accel(c, m, f, s, s.u, s.v, s.t, w);
    int i0 = c.periodic_x ? 0 : 1;
    for (int j = 0; j < s.Ny; ++j) {
        for (int i = i0; i < s.Nx; ++i) {
            size_t q = s.at(i, j);
            double a = 0.5 * s.sig_u[q] * dt;
            double nu = (2 * s.u[q] - (1 - a) * s.up[q] + dt * dt * w.au[q]) / (1 + a);
            s.up[q] = s.u[q];
            s.u[q] = nu;
        }
        for (int i = 0; i < s.Nx; ++i) {
            size_t q = s.at(i, j);
            double a = 0.5 * s.sig_v[q] * dt;
            double nv = (2 * s.v[q] - (1 - a) * s.vp[q] + dt * dt * w.av[q]) / (1 + a);
            s.vp[q] = s.v[q];
            s.v[q] = nv;
        }
    }
    detail::fill_ghosts(c, s, s.u, true);
    detail::fill_ghosts(c, s, s.v, false);
    detail::fill_ghosts(c, s, s.up, true);
    detail::fill_ghosts(c, s, s.vp, false);
    s.t += dt;
    ++s.step;
}

inline void step(FdtdState& s, const FdtdConfig& c, const Material& m, const BoundaryForcing& f) {
    detail::FdtdWork w;
    step(s, c, m, f, w);
}

// discrete energy at t - dt/2: kinetic from the half-step velocity plus the
// strain form between the two levels (conserved by the undamped scheme)
inline double energy(const FdtdState& s, const FdtdConfig& c, const Material& m) {
    double dt = fdtd_dt(c, m), h = c.h, lp = m.lambda + 2 * m.mu, la = m.lambda, mu = m.mu;
    double ke = 0, pe = 0;
    int i0 = c.periodic_x ? 0 : 1;
    for (int j = 0; j < s.Ny; ++j) {
        for (int i = i0; i < s.Nx; ++i) ke += sq((s.u[s.at(i, j)] - s.up[s.at(i, j)]) / dt);
        for (int i = 0; i < s.Nx; ++i) ke += (j == 0 ? 0.5 : 1.0) * sq((s.v[s.at(i, j)] - s.vp[s.at(i, j)]) / dt);
    }
    auto strain = [&](const std::vector<double>& U, const std::vector<double>& V, int i, int j, double& exx, double& eyy) {
        exx = (U[s.at(i + 1, j)] - U[s.at(i, j)]) / h;
        eyy = (V[s.at(i, j + 1)] - V[s.at(i, j)]) / h;
    };
    for (int j = 0; j < s.Ny; ++j)
        for (int i = 0; i < s.Nx; ++i) {
            double a1, a2, b1, b2;
            strain(s.u, s.v, i, j, a1, a2);
            strain(s.up, s.vp, i, j, b1, b2);
            pe += lp * (a1 * b1 + a2 * b2) + la * (a1 * b2 + a2 * b1);
        }
    int iend = c.periodic_x ? s.Nx - 1 : s.Nx;
    for (int j = 1; j <= s.Ny; ++j)
        for (int i = 0; i <= iend; ++i) {
            auto g = [&](const std::vector<double>& U, const std::vector<double>& V) {
                return (U[s.at(i, j)] - U[s.at(i, j - 1)]) / h + (V[s.at(i, j)] - V[s.at(i - 1, j)]) / h;
            };
            pe += mu * g(s.u, s.v) * g(s.up, s.vp);
        }
    return 0.5 * h * h * (ke + pe);
}

// bilinear sample of the current level
inline void fdtd_sample(const FdtdState& s, const FdtdConfig& c, double x, double y, double& u, double& v) {
    auto interp = [&](const std::vector<double>& a, double xo, double yo, int imax, int jmax) {
        double fx = (x + c.X - xo) / c.h, fy = (y - yo) / c.h;
        fx = std::clamp(fx, 0.0, double(imax) - 1e-9);
        fy = std::clamp(fy, 0.0, double(jmax) - 1e-9);
        int i = static_cast<int>(fx), j = static_cast<int>(fy);
        double a1 = fx - i, b1 = fy - j;
        return (1 - b1) * ((1 - a1) * a[s.at(i, j)] + a1 * a[s.at(i + 1, j)]) +
               b1 * ((1 - a1) * a[s.at(i, j + 1)] + a1 * a[s.at(i + 1, j + 1)]);
    };
    u = interp(s.u, 0.0, 0.5 * c.h, s.Nx, s.Ny - 1);
    v = interp(s.v, 0.5 * c.h, 0.0, s.Nx - 1, s.Ny);
}

struct FdtdInfo {
    double h = 0, dt = 0;
    long steps = 0;
    double r_max = 0;
    double convergence_h2 = -1;       // relative L2 difference against the 2h run (-1: not run)
    std::vector<double> energy;       // per output time
};

inline double fdtd_reach(const FdtdConfig& c, const Material& m, const BoundaryForcing& f, const InitialData& d, double T) {
    double r = 0;
    if (!f.is_zero()) {
        double eps = f.kind == BoundaryForcing::Sampled ? 0.0 : f.mollifier;
        double ext = f.kind == BoundaryForcing::Sampled ? std::max(std::abs(f.x0), std::abs(f.x0 + (f.nx - 1) * f.dx)) : 0.0;
        r = std::max(r, ext + 4 * eps + (f.kind == BoundaryForcing::Moving ? f.speed * T : 0.0));
    }
    for (auto& b : d.bumps) r = std::max(r, std::hypot(b.x0, b.y0) + 4 * b.width);
    if (d.kind == InitialData::Sampled) r = std::max({r, std::abs(d.x0), std::abs(d.x0 + (d.nx - 1) * d.dx), d.y0 + (d.ny - 1) * d.dy});
    (void)c;
    return r + m.cp() * T;
}

// fields at the requested nodes; linear interpolation in t between levels
inline FieldGrid run(const FdtdConfig& c, const Material& m, const BoundaryForcing& f, const InitialData& d,
                     const std::vector<double>& xs, const std::vector<double>& ys, const std::vector<double>& ts,
                     FdtdInfo* info = nullptr) {
    FieldGrid g;
    g.xs = xs;
    g.ys = ys;
    g.ts = ts;
    g.allocate();
    g.source = "fdtd";
    g.normalization = "n/a";
    double T = ts.empty() ? 0.0 : *std::max_element(ts.begin(), ts.end());
    double reach = fdtd_reach(c, m, f, d, T);
    if (c.check_domain && (!f.is_zero() || d.kind != InitialData::Zero)) {
        double lim = std::min(c.periodic_x ? 1e300 : c.X - c.layer, c.Y - c.layer);
        if (!(reach < lim))
            throw DomainTooSmall("fdtd: wavefront reach " + std::to_string(reach) + " exceeds the undamped region " +
                                 std::to_string(lim));
    }
    if (info) {
        info->h = c.h;
        info->dt = fdtd_dt(c, m);
        info->r_max = reach;
    }
    validate(c, m, f);
    if (f.is_zero() && d.kind == InitialData::Zero && c.sources.empty()) return g;
    FdtdState s = fdtd_init(c, m, f, d);
    detail::FdtdWork w;
    double dt = fdtd_dt(c, m);
    std::vector<size_t> order(ts.size());
    for (size_t n = 0; n < ts.size(); ++n) order[n] = n;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return ts[a] < ts[b]; });
    std::vector<double> pu, pv;
    for (size_t q : order) {
        double t = ts[q];
        if (t < 0) throw DomainError("fdtd: negative output time");
        while (s.t + dt <= t + 1e-12 * dt) step(s, c, m, f, w);
        double frac = (t - s.t) / dt;  // in [0, 1)
        std::vector<double> U0(xs.size() * ys.size()), V0(U0.size());
        for (size_t j = 0; j < ys.size(); ++j)
            for (size_t i = 0; i < xs.size(); ++i) fdtd_sample(s, c, xs[i], ys[j], U0[j * xs.size() + i], V0[j * xs.size() + i]);
        if (frac > 1e-12) {
            FdtdState s2 = s;
            step(s2, c, m, f, w);
            for (size_t j = 0; j < ys.size(); ++j)
                for (size_t i = 0; i < xs.size(); ++i) {
                    double u1, v1;
                    fdtd_sample(s2, c, xs[i], ys[j], u1, v1);
                    U0[j * xs.size() + i] += frac * (u1 - U0[j * xs.size() + i]);
                    V0[j * xs.size() + i] += frac * (v1 - V0[j * xs.size() + i]);
                }
        }
        for (size_t j = 0; j < ys.size(); ++j)
            for (size_t i = 0; i < xs.size(); ++i) {
                g.u[g.idx(i, j, q)] = U0[j * xs.size() + i];
                g.v[g.idx(i, j, q)] = V0[j * xs.size() + i];
            }
        if (info) info->energy.push_back(energy(s, c, m));
    }
    if (info) info->steps = s.step;
    return g;
}

inline double relative_l2(const FieldGrid& a, const FieldGrid& b) {
    double num = 0, den = 0;
    for (size_t q = 0; q < a.u.size(); ++q) {
        num += sq(a.u[q] - b.u[q]) + sq(a.v[q] - b.v[q]);
        den += sq(b.u[q]) + sq(b.v[q]);
    }
    return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

// relative L2 per output time, over u and v jointly
inline std::vector<double> relative_l2_per_time(const FieldGrid& a, const FieldGrid& b) {
    std::vector<double> r;
    size_t per = a.nx() * a.ny();
    for (size_t n = 0; n < a.nt(); ++n) {
        double num = 0, den = 0;
        for (size_t q = n * per; q < (n + 1) * per; ++q) {
            num += sq(a.u[q] - b.u[q]) + sq(a.v[q] - b.v[q]);
            den += sq(b.u[q]) + sq(b.v[q]);
        }
        r.push_back(den > 0 ? std::sqrt(num / den) : std::sqrt(num));
    }
    return r;
}

// run at h plus the companion run at 2h; the difference goes into info
inline FieldGrid run_with_convergence(const FdtdConfig& c, const Material& m, const BoundaryForcing& f, const InitialData& d,
                                      const std::vector<double>& xs, const std::vector<double>& ys,
                                      const std::vector<double>& ts, FdtdInfo* info = nullptr) {
    FdtdInfo local;
    FdtdInfo* inf = info ? info : &local;
    auto fine = run(c, m, f, d, xs, ys, ts, inf);
    FdtdConfig c2 = c;
    c2.h = 2 * c.h;
    if (c2.dt > 0) c2.dt = 2 * c.dt;
    try {
        auto coarse = run(c2, m, f, d, xs, ys, ts);
        inf->convergence_h2 = relative_l2(coarse, fine);
    } catch (const GridTooCoarse&) {
        inf->convergence_h2 = -1;
    }
    return fine;
}

} // namespace lamb
