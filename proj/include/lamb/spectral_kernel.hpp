#pragma once

#include <algorithm>
#include <array>
#include <mutex>
#include <set>
#include <utility>

#include "common.hpp"

namespace lamb {

struct BranchValue {
    cplx value;
    bool on_cut = false;
};

inline double eps_cut(double k) { return 1e-8 * std::max(1.0, std::abs(k)); }

namespace detail {

inline double branch_hit_threshold(double scale) {
    return 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, scale);
}

// distance from z to the segment [-i a, i a]
inline double dist_vertical_segment(cplx z, double a) {
    double y = std::abs(z.imag());
    if (y <= a) return std::abs(z.real());
    return std::hypot(z.real(), y - a);
}

inline double dist_horizontal_segment(cplx z, double a) {
    double x = std::abs(z.real());
    if (x <= a) return std::abs(z.imag());
    return std::hypot(x - a, z.imag());
}

// unchecked kernels used in the hot loops; principal-root compositions put the
// cuts exactly on the straight segments joining the branch points
inline cplx sqb(double k, cplx l) {
    if (l == cplx(0.0)) return cplx(std::abs(k), 0.0);
    return l * std::sqrt(1.0 + (k * k) / (l * l));
}

struct MapConsts {
    double a, b, c, d;  // l21 = -l sqrt(a + b k^2/l^2), l12 = -l sqrt(c - d k^2/l^2)
    explicit MapConsts(const Material& m)
        : a((m.lambda + 2 * m.mu) / m.mu),
          b((m.lambda + m.mu) / m.mu),
          c(m.mu / (m.lambda + 2 * m.mu)),
          d((m.lambda + m.mu) / (m.lambda + 2 * m.mu)) {}
};

inline cplx l12(const MapConsts& q, double k, cplx l) { return -l * std::sqrt(q.c - q.d * (k * k) / (l * l)); }
inline cplx l21(const MapConsts& q, double k, cplx l) { return -l * std::sqrt(q.a + q.b * (k * k) / (l * l)); }

} // namespace detail

inline BranchValue sqrt_branch(double k, cplx l) {
    double ak = std::abs(k);
    double thr = detail::branch_hit_threshold(ak);
    if (std::abs(l - I * ak) < thr || std::abs(l + I * ak) < thr)
        throw BranchPointHit("sqrt_branch: l at branch point +-ik");
    BranchValue r;
    r.value = detail::sqb(k, l);
    r.on_cut = detail::dist_vertical_segment(l, ak) < eps_cut(k);
    return r;
}

inline cplx omega(int j, const Material& m, double k, cplx l) {
    cplx s = sqrt_branch(k, l).value;
    return (j == 1 ? m.cp() : m.cs()) * s;
}

inline double l12_branch_point(const Material& m, double k) {
    return std::abs(k) * std::sqrt((m.lambda + m.mu) / m.mu);
}
inline double l21_branch_point(const Material& m, double k) {
    return std::abs(k) * std::sqrt((m.lambda + m.mu) / (m.lambda + 2 * m.mu));
}

inline cplx l_map_12(const Material& m, double k, cplx l) {
    if (l == cplx(0.0)) throw ZeroArgument("l_map_12: l = 0");
    double bp = l12_branch_point(m, k);
    double thr = detail::branch_hit_threshold(bp);
    if (std::abs(l - bp) < thr || std::abs(l + bp) < thr) throw BranchPointHit("l_map_12: branch point");
    return detail::l12(detail::MapConsts(m), k, l);
}

inline cplx l_map_21(const Material& m, double k, cplx l) {
    if (l == cplx(0.0)) throw ZeroArgument("l_map_21: l = 0");
    double bp = l21_branch_point(m, k);
    double thr = detail::branch_hit_threshold(bp);
    if (std::abs(l - I * bp) < thr || std::abs(l + I * bp) < thr) throw BranchPointHit("l_map_21: branch point");
    return detail::l21(detail::MapConsts(m), k, l);
}

struct Coeffs {
    cplx C1, C2, C3, C4;
    cplx D1, D2, D3, D4;
};

inline Coeffs coeffs_raw(const Material& m, double k, cplx l, cplx L12, cplx L21) {
    double lam = m.lambda, mu = m.mu;
    Coeffs c;
    c.C1 = lam * k * k + L12 * L12 * (lam + 2 * mu);
    c.C2 = 2 * mu * k * L12;
    c.C3 = 2 * mu * k * l;
    c.C4 = -mu * (k * k - l * l);
    c.D1 = lam * k * k + l * l * (lam + 2 * mu);
    c.D2 = -2 * mu * k * l;
    c.D3 = -2 * mu * k * L21;
    c.D4 = -mu * (k * k - L21 * L21);
    return c;
}

inline Coeffs coeffs(const Material& m, double k, cplx l) {
    return coeffs_raw(m, k, l, l_map_12(m, k, l), l_map_21(m, k, l));
}

// simplified determinants; l.l12 and l.l21 make them single valued near l = 0
inline cplx delta_raw(int j, const Material& m, double k, cplx l, cplx L12, cplx L21) {
    double mu = m.mu;
    if (j == 1) {
        cplx a = k * k - l * l;
        return mu * mu * a * a - 4 * mu * mu * k * k * l * L12;
    }
    cplx d1 = m.lambda * k * k + l * l * (m.lambda + 2 * mu);
    return d1 * d1 - 4 * mu * mu * k * k * l * L21;
}

inline cplx delta(int j, const Material& m, double k, cplx l) {
    if (k == 0.0) {
        // degenerate column: off-diagonal coefficients vanish
        cplx l4 = l * l * l * l;
        return j == 1 ? m.mu * m.mu * l4 : sq(m.lambda + 2 * m.mu) * l4;
    }
    return delta_raw(j, m, k, l, l_map_12(m, k, l), l_map_21(m, k, l));
}

// Continuation check of the principal-root compositions: walk 16 rays in from
// |l| = 1e6 max(1,|k|), picking at each step the root nearest the previous value.
// Returns the worst relative mismatch against the closed forms.
inline double branch_continuation_mismatch(const Material& m, double k, int rays = 16) {
    detail::MapConsts q(m);
    double ak = std::max(std::abs(k), 1e-3);
    double worst = 0.0;
    for (int j = 0; j < rays; ++j) {
        double th = (j + 0.5) * 2 * pi / rays;
        cplx dir = std::polar(1.0, th);
        double r = 1e6 * std::max(1.0, ak);
        cplx l = r * dir;
        std::array<cplx, 3> prev = {l, -l * std::sqrt(q.c), -l * std::sqrt(q.a)};
        while (r > 0.05 * ak) {
            r *= 0.98;
            l = r * dir;
            std::array<cplx, 3> sqv = {k * k + l * l, q.c * l * l - q.d * k * k, q.a * l * l + q.b * k * k};
            std::array<cplx, 3> formula = {detail::sqb(k, l), detail::l12(q, k, l), detail::l21(q, k, l)};
            for (int f = 0; f < 3; ++f) {
                cplx s = std::sqrt(sqv[f]);
                cplx pick = std::abs(s - prev[f]) < std::abs(-s - prev[f]) ? s : -s;
                prev[f] = pick;
                worst = std::max(worst, std::abs(pick - formula[f]) / std::abs(pick));
            }
        }
    }
    return worst;
}

// Runs the continuation check once per material; continuation is the authority,
// so a disagreement is fatal rather than silently patched.
inline void ensure_branches_validated(const Material& m) {
    static std::mutex mtx;
    static std::set<std::pair<double, double>> done;
    std::lock_guard<std::mutex> lk(mtx);
    auto key = std::make_pair(m.lambda, m.mu);
    if (done.count(key)) return;
    for (double k : {1.0, -1.0}) {
        double w = branch_continuation_mismatch(m, k);
        if (w > 1e-8) throw BranchPointHit("branch validation failed: principal-root composition left the continued sheet");
    }
    done.insert(key);
}

} // namespace lamb
