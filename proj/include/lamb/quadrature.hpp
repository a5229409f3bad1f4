#pragma once

#include <algorithm>
#include <functional>
#include <queue>
#include <vector>

#include "common.hpp"

namespace lamb {

struct QuadratureResult {
    cplx value{0.0, 0.0};
    double error_estimate = 0.0;
    int panels_used = 0;
    double truncation_bound = 0.0;
    bool converged = true;
};

struct Panel {
    cplx a, b;
    int segment = 0;
    double err = 0.0;
    std::vector<cplx> val;
};

struct VecQuadResult {
    std::vector<cplx> value;
    double error_estimate = 0.0;
    int panels_used = 0;
    double truncation_bound = 0.0;
    bool converged = true;
    std::vector<Panel> panels;  // final panels, ordered along the path
};

struct QuadOptions {
    double rel_tol = 1e-8;
    double abs_tol = 0.0;
    int max_panels = 200000;
    double max_panel_length = std::numeric_limits<double>::infinity();
};

namespace gk {
// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15 tables)
inline constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// abscissae on [-1,1] in increasing order, with Kronrod weights
inline void nodes15(double* x, double* w) {
    for (int i = 0; i < 7; ++i) {
        x[i] = -xgk[i];
        w[i] = wgk[i];
        x[14 - i] = xgk[i];
        w[14 - i] = wgk[i];
    }
    x[7] = 0.0;
    w[7] = wgk[7];
}
} // namespace gk

// f(z, out) fills `dim` values. Straight panel a->b, dz included.
template <class F>
void gk15_panel(F& f, Panel& p, int dim, std::vector<cplx>& buf) {
    cplx c = 0.5 * (p.a + p.b), h = 0.5 * (p.b - p.a);
    std::vector<cplx> k(dim, 0.0), g(dim, 0.0), absum(dim, 0.0);
    std::vector<double> resabs(dim, 0.0);
    buf.assign(dim, 0.0);
    f(c, buf.data());
    for (int d = 0; d < dim; ++d) {
        k[d] += gk::wgk[7] * buf[d];
        g[d] += gk::wg[3] * buf[d];
        resabs[d] += gk::wgk[7] * std::abs(buf[d]);
    }
    for (int i = 0; i < 7; ++i) {
        for (int s = -1; s <= 1; s += 2) {
            f(c + double(s) * gk::xgk[i] * h, buf.data());
            for (int d = 0; d < dim; ++d) {
                k[d] += gk::wgk[i] * buf[d];
                resabs[d] += gk::wgk[i] * std::abs(buf[d]);
                if (i % 2 == 1) g[d] += gk::wg[i / 2] * buf[d];
            }
        }
    }
    p.val.resize(dim);
    double ah = std::abs(h);
    p.err = 0.0;
    for (int d = 0; d < dim; ++d) {
        p.val[d] = k[d] * h;
        double e = std::abs((k[d] - g[d]) * h);
        double A = resabs[d] * ah;
        double est = A > 0 ? A * std::min(1.0, std::pow(200.0 * e / A, 1.5)) : e;
        p.err = std::max(p.err, std::max(est, 50.0 * std::numeric_limits<double>::epsilon() * A));
    }
}

// Globally adaptive vector-valued G7K15 along a polyline of straight segments.
template <class F>
VecQuadResult integrate_segments(F&& f, const std::vector<std::pair<cplx, cplx>>& segs, int dim,
                                 const QuadOptions& opt = {}) {
    VecQuadResult res;
    std::vector<Panel> panels;
    std::vector<cplx> buf;
    for (int s = 0; s < static_cast<int>(segs.size()); ++s) {
        auto [a, b] = segs[s];
        double len = std::abs(b - a);
        if (len == 0.0) continue;
        int n = std::max(1, static_cast<int>(std::ceil(len / opt.max_panel_length)));
        for (int i = 0; i < n; ++i) {
            Panel p;
            p.a = a + (b - a) * (double(i) / n);
            p.b = a + (b - a) * (double(i + 1) / n);
            p.segment = s;
            gk15_panel(f, p, dim, buf);
            panels.push_back(std::move(p));
        }
    }
    auto cmp = [&](int i, int j) { return panels[i].err < panels[j].err; };
    std::priority_queue<int, std::vector<int>, decltype(cmp)> pq(cmp);
    std::vector<cplx> total(dim, 0.0);
    double err = 0.0;
    for (int i = 0; i < static_cast<int>(panels.size()); ++i) {
        pq.push(i);
        for (int d = 0; d < dim; ++d) total[d] += panels[i].val[d];
        err += panels[i].err;
    }
    std::vector<char> alive(panels.size(), 1);
    auto target = [&]() {
        double m = 0.0;
        for (auto& v : total) m = std::max(m, std::abs(v));
        return std::max(opt.rel_tol * m, opt.abs_tol);
    };
    int live = static_cast<int>(panels.size());
    while (err > target() && live < opt.max_panels && !pq.empty()) {
        int i = pq.top();
        pq.pop();
        Panel p = panels[i];
        if (std::abs(p.b - p.a) < 1e-13 * (1.0 + std::abs(p.a))) {
            res.converged = false;
            break;
        }
        alive[i] = 0;
        cplx m = 0.5 * (p.a + p.b);
        Panel l{p.a, m, p.segment, 0.0, {}}, r{m, p.b, p.segment, 0.0, {}};
        gk15_panel(f, l, dim, buf);
        gk15_panel(f, r, dim, buf);
        for (int d = 0; d < dim; ++d) total[d] += l.val[d] + r.val[d] - p.val[d];
        err += l.err + r.err - p.err;
        panels.push_back(std::move(l));
        alive.push_back(1);
        pq.push(static_cast<int>(panels.size()) - 1);
        panels.push_back(std::move(r));
        alive.push_back(1);
        pq.push(static_cast<int>(panels.size()) - 1);
        ++live;
    }
    // re-sum final panels in path order so the value is independent of refinement history
    std::vector<Panel> fin;
    for (size_t i = 0; i < panels.size(); ++i)
        if (alive[i]) fin.push_back(std::move(panels[i]));
    std::sort(fin.begin(), fin.end(), [&](const Panel& x, const Panel& y) {
        if (x.segment != y.segment) return x.segment < y.segment;
        auto [a, b] = segs[x.segment];
        return std::abs(x.a - a) < std::abs(y.a - a);
    });
    res.value.assign(dim, 0.0);
    err = 0.0;
    for (auto& p : fin) {
        for (int d = 0; d < dim; ++d) res.value[d] += p.val[d];
        err += p.err;
    }
    res.error_estimate = err;
    res.panels_used = static_cast<int>(fin.size());
    double m = 0.0;
    for (auto& v : res.value) m = std::max(m, std::abs(v));
    if (err > std::max(opt.rel_tol * m, opt.abs_tol)) res.converged = false;
    res.panels = std::move(fin);
    return res;
}

// quadrature nodes of final panels: (z, w) with w already containing dz
inline void panel_nodes(const std::vector<Panel>& panels, std::vector<cplx>& z, std::vector<cplx>& w) {
    double x[15], wt[15];
    gk::nodes15(x, wt);
    z.clear();
    w.clear();
    z.reserve(panels.size() * 15);
    w.reserve(panels.size() * 15);
    for (auto& p : panels) {
        cplx c = 0.5 * (p.a + p.b), h = 0.5 * (p.b - p.a);
        for (int i = 0; i < 15; ++i) {
            z.push_back(c + x[i] * h);
            w.push_back(wt[i] * h);
        }
    }
}

// scalar convenience
template <class F>
QuadratureResult integrate_polyline(F&& f, const std::vector<std::pair<cplx, cplx>>& segs, const QuadOptions& opt) {
    auto g = [&](cplx z, cplx* out) { out[0] = f(z); };
    auto r = integrate_segments(g, segs, 1, opt);
    QuadratureResult q;
    q.value = r.value[0];
    q.error_estimate = r.error_estimate;
    q.panels_used = r.panels_used;
    q.converged = r.converged;
    return q;
}

// Gauss-Legendre nodes on [-1,1] (Newton on the three-term recurrence)
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5)), dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

} // namespace lamb
