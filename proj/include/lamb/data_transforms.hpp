#pragma once

#include <array>
#include <map>
#include <mutex>
#include <memory>
#include <vector>

#include "quadrature.hpp"
#include "spectral_kernel.hpp"
#include "special.hpp"

namespace lamb {

namespace detail {

// J(u) = int_0^u (1 - cos w s)/w^2 ds = (u - sin(w u)/w)/w^2, w^2 = w2
inline cplx J_int(cplx w2, double u) {
    cplx x = w2 * u * u;
    if (std::abs(x) < 0.25) {
        return u * u * u * (1.0 / 6 - x * (1.0 / 120 - x * (1.0 / 5040 - x * (1.0 / 362880 - x / 39916800.0))));
    }
    cplx w = std::sqrt(w2);
    return (u - u * sinc(w * u)) / w2;
}

// (1 - cos(w u))/w^2, cancellation free
inline cplx K_int(cplx w2, double u) {
    cplx s = sinc(std::sqrt(w2) * (0.5 * u));
    return 0.5 * u * u * s * s;
}

// phi1(z) = (e^z - 1)/z and psi(z) = int_0^1 x e^{zx} dx
inline cplx phi1(cplx z) {
    if (std::abs(z) < 0.1) {
        cplx s = 0, term = 1;
        for (int n = 0; n < 12; ++n) {
            s += term;
            term *= z / double(n + 2);
        }
        return s;
    }
    return (std::exp(z) - 1.0) / z;
}
inline cplx psi1(cplx z) {
    if (std::abs(z) < 0.1) {
        cplx s = 0, zn = 1;
        double fact = 1;
        for (int n = 0; n < 12; ++n) {
            s += zn / (fact * (n + 2));
            zn *= z;
            fact *= (n + 1);
        }
        return s;
    }
    return (std::exp(z) * (z - 1.0) + 1.0) / (z * z);
}

inline const std::vector<double>& gl_nodes(int n, bool weights) {
    static std::mutex mtx;
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    std::lock_guard<std::mutex> lk(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) {
        std::vector<double> x, w;
        gauss_legendre(n, x, w);
        it = cache.emplace(n, std::make_pair(x, w)).first;
    }
    return weights ? it->second.second : it->second.first;
}

} // namespace detail

// X(t) for a line load. Sampled values are complex so the same machinery also
// carries per-k transforms of sampled boundary data.
struct TimeProfile {
    enum Kind { Heaviside, Smoothed, Sampled } kind = Heaviside;
    double tau = 0.0;          // rise time (Smoothed)
    double dt = 0.0;           // spacing (Sampled), values at n dt, held constant afterwards
    std::vector<cplx> values;

    static TimeProfile heaviside() { return {}; }
    static TimeProfile smoothed(double tau) {
        if (!(tau > 0)) throw DomainError("smoothed profile: tau must be > 0");
        TimeProfile p;
        p.kind = Smoothed;
        p.tau = tau;
        return p;
    }
    static TimeProfile sampled(double dt, std::vector<cplx> v) {
        if (!(dt > 0) || v.empty()) throw DomainError("sampled profile: need dt > 0 and values");
        TimeProfile p;
        p.kind = Sampled;
        p.dt = dt;
        p.values = std::move(v);
        return p;
    }

    cplx value(double t) const {
        if (t < 0) return 0.0;
        switch (kind) {
            case Heaviside: return 1.0;
            case Smoothed: {
                if (t >= tau) return 1.0;
                double s = t / tau;
                return s - std::sin(2 * pi * s) / (2 * pi);
            }
            case Sampled: {
                double q = t / dt;
                size_t n = static_cast<size_t>(q);
                if (n + 1 >= values.size()) return values.back();
                double f = q - n;
                return values[n] * (1 - f) + values[n + 1] * f;
            }
        }
        return 0.0;
    }

    // int_0^t sin(w (t-s))/w X(s) ds ; even in w, so only w^2 enters
    cplx S(cplx w2, double t) const {
        if (t <= 0) return 0.0;
        switch (kind) {
            case Heaviside: return detail::K_int(w2, t);
            case Smoothed: return S_smoothed(w2, t);
            case Sampled: {
                // integrate by parts: X(0) K(t) + sum slope_i int K(t-s) ds
                cplx r = values[0] * detail::K_int(w2, t);
                for (size_t i = 0; i + 1 < values.size(); ++i) {
                    double a = i * dt;
                    if (a >= t) break;
                    double b = std::min(a + dt, t);
                    cplx slope = (values[i + 1] - values[i]) / dt;
                    if (slope == cplx(0)) continue;
                    r += slope * (detail::J_int(w2, t - a) - detail::J_int(w2, t - b));
                }
                return r;
            }
        }
        return 0.0;
    }

    // int_0^t e^{i w s} X(s) ds
    cplx E(cplx w, double t) const {
        if (t <= 0) return 0.0;
        if (kind == Heaviside) return t * std::exp(I * w * (0.5 * t)) * sinc(w * (0.5 * t));
        std::vector<std::pair<cplx, cplx>> segs;
        double T = kind == Smoothed ? std::min(t, tau) : std::min(t, dt * (values.size() - 1));
        if (kind == Smoothed)
            segs.push_back({0.0, T});
        else
            for (size_t i = 0; i * dt < T; ++i) segs.push_back({i * dt, std::min((i + 1) * dt, T)});
        QuadOptions o;
        o.rel_tol = 1e-13;
        o.abs_tol = 1e-300;
        o.max_panel_length = std::max(0.25 / std::max(std::abs(w), 1e-300), 1e-3 * t);
        cplx r = 0.0;
        if (T > 0) r = integrate_polyline([&](cplx s) { return std::exp(I * w * s) * value(s.real()); }, segs, o).value;
        if (t > T) {
            double h = t - T;
            r += value(t) * h * std::exp(I * w * (T + 0.5 * h)) * sinc(w * (0.5 * h));
        }
        return r;
    }

    cplx laplace(cplx p) const {
        switch (kind) {
            case Heaviside: return 1.0 / p;
            case Smoothed: {
                double b = 2 * pi / tau;
                // (1 - e^{-p tau}) = p tau phi1(-p tau)
                return detail::phi1(-p * tau) * b * b / (p * (p * p + b * b));
            }
            case Sampled: {
                cplx r = 0.0;
                for (size_t i = 0; i + 1 < values.size(); ++i) {
                    double a = i * dt;
                    cplx ea = std::exp(-p * a), z = -p * dt;
                    cplx slope = values[i + 1] - values[i];
                    r += ea * dt * (values[i] * detail::phi1(z) + slope * detail::psi1(z));
                }
                double T = dt * (values.size() - 1);
                return r + values.back() * std::exp(-p * T) / p;
            }
        }
        return 0.0;
    }

private:
    // X = s/tau - sin(b s)/(2 pi), b = 2 pi/tau; S = int_0^T K(t-s) X'(s) ds
    cplx S_smoothed(cplx w2, double t) const {
        double T = std::min(t, tau), b = 2 * pi / tau;
        cplx w = std::sqrt(w2);
        if (std::abs(w) * t < 2.0) {
            const auto& x = detail::gl_nodes(24, false);
            const auto& wt = detail::gl_nodes(24, true);
            cplx r = 0.0;
            for (size_t i = 0; i < x.size(); ++i) {
                double s = 0.5 * T * (x[i] + 1);
                double sn = std::sin(0.5 * b * s);
                r += wt[i] * detail::K_int(w2, t - s) * (2.0 / tau) * sn * sn;
            }
            return 0.5 * T * r;
        }
        auto C = [&](cplx a) { return T * sinc(a * (0.5 * T)); };  // int_0^T cos(phi - a s) = cos(phi - aT/2) C(a)
        cplx I1 = T;
        cplx I2 = std::cos(0.5 * b * T) * C(b);
        cplx I3 = std::cos(w * (t - 0.5 * T)) * C(w);
        cplx I4 = 0.5 * (std::cos(w * t - (w - b) * (0.5 * T)) * C(w - b) + std::cos(w * t - (w + b) * (0.5 * T)) * C(w + b));
        return (I1 - I2 - I3 + I4) / (w2 * tau);
    }
};

// ---------------------------------------------------------------------------
// boundary forcing

// time behaviour of g~_j(k, .) at one fixed k
struct ForcingAtK {
    bool zero = true;
    bool moving = false;
    double kappa = 0.0;           // k C for the moving load: g~2 = amp e^{-i kappa t}
    std::array<cplx, 2> amp{};    // separable: g~_j(k,t) = amp_j X_j(t)
    std::array<std::shared_ptr<const TimeProfile>, 2> prof;

    cplx g(int j, double t) const {
        if (zero || t < 0) return 0.0;
        if (moving) return j == 2 ? amp[1] * std::exp(-I * kappa * t) : cplx(0.0);
        return amp[j - 1] == cplx(0) ? cplx(0) : amp[j - 1] * prof[j - 1]->value(t);
    }

    // S_w[g~_j](t) = int_0^t sin(w(t-s))/w g~_j(s) ds
    cplx S(int j, cplx w2, double t) const {
        if (zero || amp[j - 1] == cplx(0) || t <= 0) return 0.0;
        if (!moving) return amp[j - 1] * prof[j - 1]->S(w2, t);
        cplx w = std::sqrt(w2);
        if (std::abs(w) * t >= 0.5) {
            auto E = [&](cplx a) { return t * std::exp(I * a * (0.5 * t)) * sinc(a * (0.5 * t)); };
            return amp[1] * (std::exp(I * w * t) * E(-(w + kappa)) - std::exp(-I * w * t) * E(w - kappa)) / (2.0 * I * w);
        }
        int n = 16 + 2 * static_cast<int>(std::ceil(std::abs(kappa) * t));
        std::vector<double> x, wt;
        gauss_legendre(n, x, wt);
        cplx r = 0.0;
        for (int i = 0; i < n; ++i) {
            double s = 0.5 * t * (x[i] + 1), u = t - s;
            r += wt[i] * u * sinc(w * u) * std::exp(-I * kappa * s);
        }
        return amp[1] * 0.5 * t * r;
    }

    // int_0^t e^{i w s} g~_j(s) ds
    cplx E(int j, cplx w, double t) const {
        if (zero || amp[j - 1] == cplx(0) || t <= 0) return 0.0;
        if (moving) {
            cplx a = w - kappa;
            return amp[1] * t * std::exp(I * a * (0.5 * t)) * sinc(a * (0.5 * t));
        }
        return amp[j - 1] * prof[j - 1]->E(w, t);
    }

    cplx laplace(int j, cplx p) const {
        if (zero || amp[j - 1] == cplx(0)) return 0.0;
        if (moving) return amp[1] / (p + I * kappa);
        return amp[j - 1] * prof[j - 1]->laplace(p);
    }
};

struct BoundaryForcing {
    enum Kind { None, Tangential, Normal, Moving, Sampled } kind = None;
    double sigma0 = 1.0;
    double speed = 0.0;      // Moving
    double mollifier = 0.0;  // Gaussian std in x; 0 = exact delta
    TimeProfile profile;
    // Sampled: g_j(x0 + i dx, n dt), row-major [n * nx + i]
    double x0 = 0.0, dx = 0.0, dt = 0.0;
    int nx = 0, nt = 0;
    std::vector<double> g1, g2;

    static BoundaryForcing none() { return {}; }
    static BoundaryForcing tangential(double s0, TimeProfile p, double eps = 0.0) {
        BoundaryForcing f;
        f.kind = Tangential;
        f.sigma0 = s0;
        f.profile = std::move(p);
        f.mollifier = eps;
        return f;
    }
    static BoundaryForcing normal(double s0, TimeProfile p, double eps = 0.0) {
        BoundaryForcing f;
        f.kind = Normal;
        f.sigma0 = s0;
        f.profile = std::move(p);
        f.mollifier = eps;
        return f;
    }
    static BoundaryForcing moving(double s0, double C, double eps = 0.0) {
        if (C < 0) throw DomainError("moving load: C must be >= 0");
        BoundaryForcing f;
        f.kind = Moving;
        f.sigma0 = s0;
        f.speed = C;
        f.mollifier = eps;
        return f;
    }

    bool is_zero() const { return kind == None || (kind != Sampled && sigma0 == 0.0); }

    double mollify(double k) const { return mollifier > 0 ? std::exp(-0.5 * sq(k * mollifier)) : 1.0; }

    // amplitude of g_j for the line loads: delta(x) transforms to 1
    cplx line_amp(int j, const Material& m) const {
        switch (kind) {
            case Tangential: return j == 1 ? sigma0 / m.mu : 0.0;
            case Normal:
            case Moving: return j == 2 ? sigma0 / (m.lambda + m.mu) : 0.0;
            default: return 0.0;
        }
    }

    // x-transform of sampled data at time row n (trapezoid)
    cplx sampled_transform(int j, double k, int n) const {
        if (std::abs(k) > pi / dx * (1 + 1e-12)) throw GridTooCoarse("sampled forcing: |k| beyond Nyquist pi/dx");
        const auto& g = j == 1 ? g1 : g2;
        cplx r = 0.0;
        for (int i = 0; i < nx; ++i) {
            double w = (i == 0 || i == nx - 1) ? 0.5 : 1.0;
            r += w * g[size_t(n) * nx + i] * std::exp(-I * k * (x0 + i * dx));
        }
        return r * dx;
    }

    ForcingAtK at(double k, const Material& m) const {
        ForcingAtK f;
        if (is_zero()) return f;
        f.zero = false;
        if (kind == Sampled) {
            for (int j = 1; j <= 2; ++j) {
                std::vector<cplx> v(nt);
                bool any = false;
                for (int n = 0; n < nt; ++n) {
                    v[n] = sampled_transform(j, k, n);
                    any = any || v[n] != cplx(0);
                }
                f.amp[j - 1] = any ? 1.0 : 0.0;
                f.prof[j - 1] = std::make_shared<const TimeProfile>(TimeProfile::sampled(dt, std::move(v)));
            }
            return f;
        }
        double mk = mollify(k);
        for (int j = 1; j <= 2; ++j) f.amp[j - 1] = line_amp(j, m) * mk;
        if (kind == Moving) {
            f.moving = true;
            f.kappa = k * speed;
        } else {
            auto p = std::make_shared<const TimeProfile>(profile);
            f.prof = {p, p};
        }
        return f;
    }

    // spatial data for the grid oracles: g_j(x, t) with the Gaussian mollifier
    double g_physical(int j, double x, double t, const Material& m) const {
        if (is_zero() || t < 0) return 0.0;
        if (kind == Sampled) {
            // bilinear in (x, t), zero outside the x range, held after the last row
            const auto& g = j == 1 ? g1 : g2;
            double fx = (x - x0) / dx;
            if (fx < 0 || fx > nx - 1) return 0.0;
            double ft = std::min(t / dt, double(nt - 1));
            int i = std::min(static_cast<int>(fx), nx - 2), n = std::min(static_cast<int>(ft), std::max(nt - 2, 0));
            double a = fx - i, b = nt > 1 ? ft - n : 0.0;
            auto G = [&](int ii, int nn) { return g[size_t(std::min(nn, nt - 1)) * nx + ii]; };
            return (1 - b) * ((1 - a) * G(i, n) + a * G(i + 1, n)) + b * ((1 - a) * G(i, n + 1) + a * G(i + 1, n + 1));
        }
        if (!(mollifier > 0)) throw DomainError("g_physical: exact delta cannot be sampled; set a mollifier");
        double xc = kind == Moving ? x - speed * t : x;
        double d = std::exp(-0.5 * sq(xc / mollifier)) / (mollifier * std::sqrt(2 * pi));
        double a = line_amp(j, m).real();
        if (a == 0) return 0.0;
        double X = kind == Moving ? 1.0 : profile.value(t).real();
        return a * d * X;
    }
};

inline cplx g_tilde(const BoundaryForcing& f, const Material& m, int j, double k, double t) {
    return f.at(k, m).g(j, t);
}

// ---------------------------------------------------------------------------
// initial data

struct GaussianBump {
    int field = 0;  // 0: u0, 1: u1, 2: v0, 3: v1
    double amplitude = 1.0, x0 = 0.0, y0 = 0.0, width = 0.1;
};

namespace detail {
// int_0^inf e^{-i l y} e^{-(y-y0)^2/(2w^2)} dy
inline cplx half_gaussian_transform(cplx l, double y0, double w) {
    double c = w * std::sqrt(pi / 2);
    cplx zeta = (-l * w * w - I * y0) / (w * std::sqrt(2.0));  // i * (i l w^2 - y0)/(w sqrt2)
    if (zeta.imag() >= 0) return c * std::exp(-y0 * y0 / (2 * w * w)) * faddeeva(zeta);
    return c * (2.0 * std::exp(-l * l * (0.5 * w * w) - I * l * y0) - std::exp(-y0 * y0 / (2 * w * w)) * faddeeva(-zeta));
}
} // namespace detail

// per-k view: hats(l) = (u0^, u1^, v0^, v1^)(k, l)
struct InitialAtK {
    bool zero = true;
    double k = 0.0;
    std::vector<std::pair<cplx, GaussianBump>> bumps;  // x-transformed amplitude
    bool sampled = false;
    double y0 = 0.0, dy = 0.0;
    std::array<std::vector<cplx>, 4> cols;             // x-transformed sampled columns over y

    std::array<cplx, 4> hats(cplx l) const {
        std::array<cplx, 4> h{};
        if (zero) return h;
        if (sampled) {
            if (l.imag() > 1e-14 * (1 + std::abs(l))) throw DomainError("sampled initial data: transform needs Im l <= 0");
            size_t ny = cols[0].size();
            for (size_t j = 0; j < ny; ++j) {
                double wy = (j == 0 || j + 1 == ny) ? 0.5 : 1.0;
                cplx e = wy * dy * std::exp(-I * l * (y0 + j * dy));
                for (int f = 0; f < 4; ++f) h[f] += cols[f][j] * e;
            }
            return h;
        }
        for (auto& [a, b] : bumps) h[b.field] += a * detail::half_gaussian_transform(l, b.y0, b.width);
        return h;
    }

    // (P0, P1, Q0, Q1)
    std::array<cplx, 4> pq(cplx l) const {
        auto h = hats(l);
        return {k * h[0] + l * h[2], k * h[1] + l * h[3], l * h[0] - k * h[2], l * h[1] - k * h[3]};
    }
};

struct InitialData {
    enum Kind { Zero, Gaussian, Sampled } kind = Zero;
    std::vector<GaussianBump> bumps;
    // Sampled: f(x0 + i dx, y0 + j dy) row-major [j * nx + i], fields u0,u1,v0,v1
    double x0 = 0.0, dx = 0.0, y0 = 0.0, dy = 0.0;
    int nx = 0, ny = 0;
    std::array<std::vector<double>, 4> fields;

    bool is_zero() const { return kind == Zero || (kind == Gaussian && bumps.empty()); }

    InitialAtK at(double k) const {
        InitialAtK r;
        r.k = k;
        if (is_zero()) return r;
        r.zero = false;
        if (kind == Gaussian) {
            for (auto& b : bumps) {
                if (b.field < 0 || b.field > 3 || !(b.width > 0)) throw DomainError("gaussian bump: bad field or width");
                cplx a = b.amplitude * b.width * std::sqrt(2 * pi) * std::exp(-I * k * b.x0 - 0.5 * sq(k * b.width));
                r.bumps.push_back({a, b});
            }
            return r;
        }
        if (std::abs(k) > pi / dx * (1 + 1e-12)) throw GridTooCoarse("sampled initial data: |k| beyond Nyquist pi/dx");
        r.sampled = true;
        r.y0 = y0;
        r.dy = dy;
        std::vector<cplx> ex(nx);
        for (int i = 0; i < nx; ++i) ex[i] = ((i == 0 || i == nx - 1) ? 0.5 : 1.0) * dx * std::exp(-I * k * (x0 + i * dx));
        for (int f = 0; f < 4; ++f) {
            r.cols[f].assign(ny, 0.0);
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) r.cols[f][j] += ex[i] * fields[f][size_t(j) * nx + i];
        }
        return r;
    }

    // physical value of field f at (x, y), used by the grid oracles
    double value(int f, double x, double y) const {
        if (is_zero()) return 0.0;
        if (kind == Gaussian) {
            double s = 0;
            for (auto& b : bumps)
                if (b.field == f) s += b.amplitude * std::exp(-(sq(x - b.x0) + sq(y - b.y0)) / (2 * sq(b.width)));
            return s;
        }
        double qx = (x - x0) / dx, qy = (y - y0) / dy;
        if (qx < 0 || qy < 0 || qx > nx - 1 || qy > ny - 1) return 0.0;
        int i = std::min(int(qx), nx - 2), j = std::min(int(qy), ny - 2);
        double fx = qx - i, fy = qy - j;
        auto at = [&](int a, int b) { return fields[f][size_t(b) * nx + a]; };
        return (1 - fx) * (1 - fy) * at(i, j) + fx * (1 - fy) * at(i + 1, j) + (1 - fx) * fy * at(i, j + 1) + fx * fy * at(i + 1, j + 1);
    }
};

inline std::array<cplx, 4> initial_transforms(const InitialData& d, double k, cplx l) { return d.at(k).pq(l); }

// ---------------------------------------------------------------------------
// composite known functions

struct TimeIntegrals {
    cplx g_plus, g_minus, f_plus, f_minus;
};

// g^{(j)+-}, f^{(j)+-}
inline TimeIntegrals time_integrals(const BoundaryForcing& f, const Material& m, int j, double k, cplx l, double t) {
    cplx w = omega(j, m, k, l);
    auto fk = f.at(k, m);
    return {fk.E(1, w, t), fk.E(1, -w, t), fk.E(2, w, t), fk.E(2, -w, t)};
}

// (G^{(j)}, F^{(j)}) = -i S_{w_j}[g~1, g~2]
inline std::pair<cplx, cplx> big_GF(const BoundaryForcing& f, const Material& m, int j, double k, cplx l, double t) {
    cplx w = omega(j, m, k, l);
    auto fk = f.at(k, m);
    return {-I * fk.S(1, w * w, t), -I * fk.S(2, w * w, t)};
}

// N_P, N_Q at one (k, l, t) from per-k views
inline std::pair<cplx, cplx> N_PQ_at(const ForcingAtK& fk, const InitialAtK& ik, const Material& m, double k, cplx l, double t) {
    cplx s = detail::sqb(k, l);
    cplx w1 = m.cp() * s, w2 = m.cs() * s;
    cplx a1 = w1 * w1, a2 = w2 * w2;
    double lp = m.lambda + 2 * m.mu, mu = m.mu;
    cplx NP = -l * lp * fk.S(2, a1, t) - mu * k * fk.S(1, a1, t);
    cplx NQ = k * lp * fk.S(2, a2, t) - mu * l * fk.S(1, a2, t);
    if (!ik.zero) {
        auto [P0, P1, Q0, Q1] = ik.pq(l);
        NP += P0 * std::cos(w1 * t) + P1 * t * sinc(w1 * t);
        NQ += Q0 * std::cos(w2 * t) + Q1 * t * sinc(w2 * t);
    }
    return {NP, NQ};
}

inline std::pair<cplx, cplx> N_PQ(const BoundaryForcing& f, const InitialData& d, const Material& m, double k, cplx l, double t) {
    sqrt_branch(k, l);  // branch-point guard
    return N_PQ_at(f.at(k, m), d.at(k), m, k, l, t);
}

} // namespace lamb
