#pragma once

#include <map>

#include "quadrature.hpp"
#include "zeros.hpp"

namespace lamb {

enum class Exclusion { DeltaZero1, DeltaZero2, BranchL12, BranchL21, Removable, OtherSheetZero, Pole };

inline const char* exclusion_name(Exclusion e) {
    switch (e) {
        case Exclusion::DeltaZero1: return "delta1_zero";
        case Exclusion::DeltaZero2: return "delta2_zero";
        case Exclusion::BranchL12: return "l12_branch_point";
        case Exclusion::BranchL21: return "l21_branch_point";
        case Exclusion::Removable: return "removable_ik";
        case Exclusion::OtherSheetZero: return "other_sheet_zero";
        case Exclusion::Pole: return "kernel_pole";
    }
    return "?";
}

struct ExclusionPoint {
    cplx z;
    Exclusion kind;
    bool must_clear = true;  // genuine singularity of the integrand on the cut plane
    double distance = 0.0;   // verified distance to the path
};

struct ContourPath {
    std::vector<std::pair<cplx, cplx>> segments;
    double clearance = 0.0;  // absolute margin actually used
    double L = 0.0;
    std::vector<ExclusionPoint> certificate;

    double length() const {
        double s = 0;
        for (auto& [a, b] : segments) s += std::abs(b - a);
        return s;
    }
    // highest point of the path over abscissa x (vertical segments count)
    double height_at(double x) const {
        double h = -std::numeric_limits<double>::infinity();
        for (auto& [a, b] : segments) {
            double x0 = std::min(a.real(), b.real()), x1 = std::max(a.real(), b.real());
            if (x < x0 - 1e-12 || x > x1 + 1e-12) continue;
            if (x1 - x0 < 1e-14) {
                h = std::max(h, std::max(a.imag(), b.imag()));
            } else {
                double s = (x - a.real()) / (b.real() - a.real());
                h = std::max(h, a.imag() + s * (b.imag() - a.imag()));
            }
        }
        return h;
    }
    double lowest_at(double x) const {
        double h = std::numeric_limits<double>::infinity();
        for (auto& [a, b] : segments) {
            double x0 = std::min(a.real(), b.real()), x1 = std::max(a.real(), b.real());
            if (x < x0 - 1e-12 || x > x1 + 1e-12) continue;
            if (x1 - x0 < 1e-14) {
                h = std::min(h, std::min(a.imag(), b.imag()));
            } else {
                double s = (x - a.real()) / (b.real() - a.real());
                h = std::min(h, a.imag() + s * (b.imag() - a.imag()));
            }
        }
        return h;
    }
    double distance_to(cplx z) const {
        double d = std::numeric_limits<double>::infinity();
        for (auto& [a, b] : segments) {
            cplx ab = b - a;
            // project from the nearer end; long tail segments lose digits otherwise
            double ta = std::real((z - a) * std::conj(ab)) / std::norm(ab);
            double tb = std::real((z - b) * std::conj(ab)) / std::norm(ab);
            cplx q = ta <= 0 ? a : tb >= 0 ? b : (-tb > ta ? a + ta * ab : b + tb * ab);
            d = std::min(d, std::abs(z - q));
        }
        return d;
    }
};

struct GammaOptions {
    double clearance = 0.05;     // relative to |k|
    double clearance_cap = 0.5;  // absolute cap so the path keeps hugging at large |k|
    double L = 0.0;              // 0: caller decides (see default_L_l)
    int zero_grid = 16;
};

inline double default_L_l(double k, double y, const Material& m) {
    double R0 = (l12_branch_point(m, k) + 0.1 * std::abs(k));
    return std::max({50.0, 40.0 / y, 8.0 * R0});
}

// Exclusion set for gamma_k: principal-sheet zeros and map branch points are
// genuine singularities; l = +-ik is removable for the combined integrand.
inline std::vector<ExclusionPoint> gamma_k_exclusions(const Material& m, double k, int zero_grid = 16) {
    std::vector<ExclusionPoint> ex;
    double ak = std::abs(k);
    for (int j = 1; j <= 2; ++j) {
        for (auto& z : delta_zeros(j, m, zero_grid).zeros) {
            cplx p = z.alpha * ak;
            bool removable = std::abs(std::abs(z.alpha) - 1.0) < 1e-9 && std::abs(z.alpha.real()) < 1e-9;
            if (!z.principal)
                ex.push_back({p, Exclusion::OtherSheetZero, false});
            else if (removable)
                ex.push_back({p, Exclusion::Removable, false});
            else
                ex.push_back({p, j == 1 ? Exclusion::DeltaZero1 : Exclusion::DeltaZero2, true});
        }
    }
    double b12 = l12_branch_point(m, k), b21 = l21_branch_point(m, k);
    ex.push_back({cplx(-b12, 0), Exclusion::BranchL12, true});
    ex.push_back({cplx(b12, 0), Exclusion::BranchL12, true});
    ex.push_back({cplx(0, -b21), Exclusion::BranchL21, true});
    ex.push_back({cplx(0, b21), Exclusion::BranchL21, true});
    bool have_ik = false;
    for (auto& e : ex)
        if (e.kind == Exclusion::Removable) have_ik = true;
    if (!have_ik) {
        ex.push_back({cplx(0, ak), Exclusion::Removable, false});
        ex.push_back({cplx(0, -ak), Exclusion::Removable, false});
    }
    return ex;
}

inline void verify_gamma_k(ContourPath& p) {
    for (auto& e : p.certificate) {
        e.distance = p.distance_to(e.z);
        if (!e.must_clear || e.z.imag() < 0) continue;
        double h = p.height_at(e.z.real());
        if (!(e.z.imag() < h) || e.distance < p.clearance * (1 - 1e-9))
            throw CertificateViolation(std::string("gamma_k: ") + exclusion_name(e.kind) + " not cleared");
    }
}

// Skyline path: upper envelope of clearance boxes around every genuine
// singularity in the closed upper half plane (the l12 cut becomes one long low
// box). It stays close to the real axis, which keeps e^{i omega t} small.
inline ContourPath build_gamma_k(const Material& m, double k, const GammaOptions& opt) {
    if (k == 0.0) throw DomainError("build_gamma_k: k = 0 (use the notch)");
    double ak = std::abs(k);
    ContourPath path;
    path.certificate = gamma_k_exclusions(m, k, opt.zero_grid);
    double c = std::min(opt.clearance * ak, opt.clearance_cap);
    path.clearance = c;
    struct Box { double x0, x1, h; };
    std::vector<Box> boxes;
    double b12 = l12_branch_point(m, k);
    boxes.push_back({-b12 - c, b12 + c, c});
    for (auto& e : path.certificate) {
        if (!e.must_clear || e.z.imag() < 0) continue;
        boxes.push_back({e.z.real() - c, e.z.real() + c, e.z.imag() + c});
    }
    // do not graze the removable point: numerically it is a 0/0
    for (auto& b : boxes) {
        if (b.x0 <= 0 && b.x1 >= 0 && std::abs(b.h - ak) < 0.5 * c) b.h = ak + 0.5 * c;
    }
    std::vector<double> xs;
    for (auto& b : boxes) {
        xs.push_back(b.x0);
        xs.push_back(b.x1);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::vector<std::pair<double, double>> level;  // (x_left, height) per interval
    for (size_t i = 0; i + 1 < xs.size(); ++i) {
        double xm = 0.5 * (xs[i] + xs[i + 1]), h = 0.0;
        for (auto& b : boxes)
            if (b.x0 <= xm && xm <= b.x1) h = std::max(h, b.h);
        if (!level.empty() && level.back().second == h) continue;
        level.push_back({xs[i], h});
    }
    double L = opt.L > 0 ? opt.L : default_L_l(k, 1.0, m);
    double xend = xs.back();
    if (L <= xend + c) L = xend + c + 1.0;
    path.L = L;
    std::vector<cplx> v;
    v.push_back(cplx(-L, 0));
    double cur = 0.0;
    for (size_t i = 0; i < level.size(); ++i) {
        double x = level[i].first, h = level[i].second;
        if (h != cur) {
            v.push_back(cplx(x, cur));
            v.push_back(cplx(x, h));
            cur = h;
        }
    }
    v.push_back(cplx(xend, cur));
    v.push_back(cplx(xend, 0));
    v.push_back(cplx(L, 0));
    for (size_t i = 0; i + 1 < v.size(); ++i)
        if (std::abs(v[i + 1] - v[i]) > 0) path.segments.push_back({v[i], v[i + 1]});
    verify_gamma_k(path);
    return path;
}

struct GammaK2Options {
    double depth = 2.0;  // bottom at -i depth |k|
    double width = 8.0;  // total width of the dip, in |k|
    double L = 0.0;
};

// Rectangular dip below the kernel pole l = 0 and the sqrt cut [-ik, ik].
inline ContourPath build_gamma_k2(double k, const GammaK2Options& opt) {
    double ak = std::abs(k);
    if (ak == 0.0) throw DomainError("build_gamma_k2: k = 0");
    ContourPath p;
    double hw = 0.5 * opt.width * ak, d = opt.depth * ak;
    double L = opt.L > 0 ? opt.L : std::max(200.0, 50.0 * ak);
    p.L = L;
    p.clearance = std::min(d - ak, hw);
    cplx v[6] = {cplx(-L, 0), cplx(-hw, 0), cplx(-hw, -d), cplx(hw, -d), cplx(hw, 0), cplx(L, 0)};
    for (int i = 0; i < 5; ++i) p.segments.push_back({v[i], v[i + 1]});
    p.certificate.push_back({cplx(0, 0), Exclusion::Pole, true});
    p.certificate.push_back({cplx(0, ak), Exclusion::Removable, true});
    p.certificate.push_back({cplx(0, -ak), Exclusion::Removable, true});
    for (auto& e : p.certificate) {
        e.distance = p.distance_to(e.z);
        if (!(e.z.imag() > p.lowest_at(e.z.real())) || e.distance < p.clearance * (1 - 1e-9))
            throw CertificateViolation("gamma_k2: pole or cut not above the path");
    }
    return p;
}

template <class F>
QuadratureResult integrate_path(F&& f, const ContourPath& path, double tol, double max_panel_length = 1e300) {
    QuadOptions o;
    o.rel_tol = tol;
    o.max_panel_length = max_panel_length;
    return integrate_polyline(std::forward<F>(f), path.segments, o);
}

struct DecayModel {
    enum Kind { Power, Exponential, Gaussian } kind = Power;
    double rate = 2.0;  // power p, exponential rate a, or gaussian c in e^{-c x^2}
};

// symmetric truncation [-L, L]; the tail bound uses |f(+-L)| and the decay model
template <class F>
QuadratureResult integrate_real_line(F&& f, double L, double tol, DecayModel dm = {},
                                     double max_panel_length = 1e300) {
    QuadOptions o;
    o.rel_tol = tol;
    o.max_panel_length = max_panel_length;
    std::vector<std::pair<cplx, cplx>> segs = {{cplx(-L), cplx(0)}, {cplx(0), cplx(L)}};
    QuadratureResult q = integrate_polyline(f, segs, o);
    double edge = std::abs(f(cplx(L))) + std::abs(f(cplx(-L)));
    double fac = 0.0;
    switch (dm.kind) {
        case DecayModel::Power: fac = dm.rate > 1 ? L / (dm.rate - 1) : std::numeric_limits<double>::infinity(); break;
        case DecayModel::Exponential: fac = 1.0 / dm.rate; break;
        case DecayModel::Gaussian: fac = 1.0 / (2.0 * dm.rate * L); break;
    }
    q.truncation_bound = edge * fac;
    return q;
}

} // namespace lamb
