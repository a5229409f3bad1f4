#pragma once

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "spectral_kernel.hpp"

namespace lamb {

struct DeltaZero {
    cplx alpha;
    bool principal = false;  // zero of Delta_j itself (cut plane), not only of the other sheet
    double residual = 0.0;   // |Delta| on its own sheet, relative to the local scale
};

struct ZeroSet {
    int determinant_id = 0;
    std::vector<DeltaZero> zeros;
    double max_abs_ratio = 0.0;
    int cells = 0;

    std::vector<cplx> ratios() const {
        std::vector<cplx> r;
        for (auto& z : zeros) r.push_back(z.alpha);
        return r;
    }
    std::vector<cplx> principal_ratios() const {
        std::vector<cplx> r;
        for (auto& z : zeros)
            if (z.principal) r.push_back(z.alpha);
        return r;
    }
};

namespace detail {

// Delta_j(1,a) times its value on the other sheet of l12 (resp. l21): the
// square root drops out, leaving an entire function (a polynomial in a^2).
inline cplx sheet_product(int j, const Material& m, cplx a) {
    MapConsts q(m);
    double mu2 = m.mu * m.mu;
    cplx a2 = a * a;
    if (j == 1) {
        cplx A = mu2 * (1.0 - a2) * (1.0 - a2);
        return A * A - 16.0 * mu2 * mu2 * a2 * (q.c * a2 - q.d);
    }
    cplx D1 = m.lambda + (m.lambda + 2 * m.mu) * a2;
    return D1 * D1 * D1 * D1 - 16.0 * mu2 * mu2 * a2 * (q.a * a2 + q.b);
}

inline std::pair<cplx, cplx> delta_both_sheets(int j, const Material& m, cplx a) {
    MapConsts q(m);
    double mu2 = m.mu * m.mu;
    if (j == 1) {
        cplx L = (a == cplx(0.0)) ? cplx(0.0) : l12(q, 1.0, a);
        cplx A = mu2 * (1.0 - a * a) * (1.0 - a * a);
        return {A - 4.0 * mu2 * a * L, A + 4.0 * mu2 * a * L};
    }
    cplx L = (a == cplx(0.0)) ? cplx(0.0) : l21(q, 1.0, a);
    cplx D1 = m.lambda + (m.lambda + 2 * m.mu) * a * a;
    return {D1 * D1 - 4.0 * mu2 * a * L, D1 * D1 + 4.0 * mu2 * a * L};
}

inline double delta_scale(int j, const Material& m, cplx a) {
    double r2 = std::norm(a);
    if (j == 1) return m.mu * m.mu * sq(1.0 + r2);
    return sq(std::abs(m.lambda) + (m.lambda + 2 * m.mu) * (1.0 + r2));
}

// winding number of f around the rectangle [x0,x1]x[y0,y1]; edges are refined
// until successive phase jumps stay below pi/4
template <class F>
int winding_number(F&& f, double x0, double x1, double y0, double y1) {
    cplx corners[5] = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}, {x0, y0}};
    double total = 0.0;
    for (int e = 0; e < 4; ++e) {
        cplx a = corners[e], b = corners[e + 1];
        cplx fa = f(a);
        double s = 0.0;
        int n = 8;
        double ds = 1.0 / n;
        while (s < 1.0) {
            double step = std::min(ds, 1.0 - s);
            cplx fb = f(a + (b - a) * (s + step));
            double dphi = std::arg(fb / fa);
            if (std::abs(dphi) > pi / 4 && step > 1e-9) {
                ds = step / 2;
                continue;
            }
            total += dphi;
            fa = fb;
            s += step;
            ds = std::min(2 * step, 1.0 / n);
        }
    }
    return static_cast<int>(std::lround(total / (2 * pi)));
}

template <class F>
bool newton_polish(F&& f, cplx& z, double tol = 1e-14, int maxit = 60) {
    for (int it = 0; it < maxit; ++it) {
        double h = 1e-5 * (1.0 + std::abs(z));
        cplx fz = f(z);
        cplx df = (f(z + h) - f(z - h)) / (2 * h);
        if (df == cplx(0.0)) return false;
        cplx dz = fz / df;
        z -= dz;
        if (std::abs(dz) < tol * (1.0 + std::abs(z))) return true;
    }
    return false;
}

} // namespace detail

// Zeros alpha of Delta_j(1, alpha) on both sheets of the map root: argument
// principle on the entire sheet product over |Re|,|Im| <= R, then Newton.
inline ZeroSet compute_delta_zeros(int j, const Material& m, int grid = 16) {
    m.validate();
    if (j != 1 && j != 2) throw DomainError("delta_zeros: j must be 1 or 2");
    double R = 4.0 * m.cp() / m.cs();
    auto P = [&](cplx a) { return detail::sheet_product(j, m, a); };
    ZeroSet out;
    out.determinant_id = j;
    double h = 2 * R / grid;
    double off = 0.0123 * h;  // keep the symmetry axes off the cell edges
    std::vector<cplx> roots;
    struct Cell { double x0, x1, y0, y1; int depth; };
    std::vector<Cell> work;
    for (int ix = 0; ix < grid; ++ix)
        for (int iy = 0; iy < grid; ++iy)
            work.push_back({-R + off + ix * h, -R + off + (ix + 1) * h, -R + off + iy * h, -R + off + (iy + 1) * h, 0});
    out.cells = static_cast<int>(work.size());
    int expected = detail::winding_number(P, -R + off, R + off, -R + off, R + off);
    while (!work.empty()) {
        Cell c = work.back();
        work.pop_back();
        int n = detail::winding_number(P, c.x0, c.x1, c.y0, c.y1);
        if (n == 0) continue;
        double w = c.x1 - c.x0;
        if (n == 1 || c.depth > 24) {
            cplx z{0.5 * (c.x0 + c.x1), 0.5 * (c.y0 + c.y1)};
            bool ok = detail::newton_polish(P, z);
            bool inside = z.real() >= c.x0 - 1e-9 * w && z.real() <= c.x1 + 1e-9 * w &&
                          z.imag() >= c.y0 - 1e-9 * w && z.imag() <= c.y1 + 1e-9 * w;
            if (ok && (inside || c.depth > 24)) {
                for (int r = 0; r < n; ++r) roots.push_back(z);
                continue;
            }
            if (c.depth > 24) throw RootSearchIncomplete("delta_zeros: Newton polishing did not converge");
        }
        double xm = 0.5 * (c.x0 + c.x1), ym = 0.5 * (c.y0 + c.y1);
        work.push_back({c.x0, xm, c.y0, ym, c.depth + 1});
        work.push_back({xm, c.x1, c.y0, ym, c.depth + 1});
        work.push_back({c.x0, xm, ym, c.y1, c.depth + 1});
        work.push_back({xm, c.x1, ym, c.y1, c.depth + 1});
    }
    if (static_cast<int>(roots.size()) != expected)
        throw RootSearchIncomplete("delta_zeros: cell counts do not add up to the enclosing winding number");
    for (auto z : roots) {
        auto [d0, d1] = detail::delta_both_sheets(j, m, z);
        DeltaZero dz;
        dz.alpha = z;
        dz.principal = std::abs(d0) <= std::abs(d1);
        dz.residual = std::min(std::abs(d0), std::abs(d1)) / detail::delta_scale(j, m, z);
        out.zeros.push_back(dz);
        out.max_abs_ratio = std::max(out.max_abs_ratio, std::abs(z));
    }
    std::sort(out.zeros.begin(), out.zeros.end(), [](const DeltaZero& a, const DeltaZero& b) {
        if (std::abs(a.alpha.real() - b.alpha.real()) > 1e-9) return a.alpha.real() < b.alpha.real();
        return a.alpha.imag() < b.alpha.imag();
    });
    return out;
}

// populated once per (j, material, grid), read concurrently afterwards
inline const ZeroSet& delta_zeros(int j, const Material& m, int grid = 16) {
    static std::mutex mtx;
    static std::map<std::tuple<int, double, double, int>, ZeroSet> cache;
    std::lock_guard<std::mutex> lk(mtx);
    auto key = std::make_tuple(j, m.lambda, m.mu, grid);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    return cache.emplace(key, compute_delta_zeros(j, m, grid)).first->second;
}

} // namespace lamb
