// acceptance <n>|all : one PASS/FAIL line per criterion
#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>

#include "lamb/cli.hpp"

using namespace lamb;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char b[1024];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(b, sizeof b, f, ap);
    va_end(ap);
    return b;
}

const Material nu13{2.0, 1.0};

ProblemSpec mollified(double eps = 0.1) {
    ProblemSpec p;
    p.material = nu13;
    p.forcing = BoundaryForcing::normal(1.0, TimeProfile::smoothed(0.05), eps);
    return p;
}

std::vector<double> range(double a, double b, double h) {
    std::vector<double> r;
    for (int i = 0; a + i * h <= b + 1e-12; ++i) r.push_back(a + i * h);
    return r;
}

// worst over the listed values of the distance to the nearest computed zero
double match(const std::vector<cplx>& want, const ZeroSet& z) {
    double worst = 0;
    for (auto w : want) {
        double best = 1e300;
        for (auto& d : z.zeros) best = std::min(best, std::abs(d.alpha - w));
        worst = std::max(worst, best);
    }
    return worst;
}

Outcome c1() {
    std::ostringstream os;
    int rc = cli::cmd_zeros(nu13, os);
    const std::vector<cplx> d1 = {{-1.624, 0.126}, {-1.624, -0.126}, {0, 0.357}, {0, -0.357},
                                  {0, 1.056},      {0, -1.056},      {1.624, 0.126}, {1.624, -0.126}};
    const std::vector<cplx> d2 = {{-0.295, 0.442}, {-0.295, -0.442}, {0, 0.885}, {0, -0.885},
                                  {0, 1},          {0, -1},          {0.295, 0.442}, {0.295, -0.442}};
    double e1 = match(d1, delta_zeros(1, nu13)), e2 = match(d2, delta_zeros(2, nu13));
    bool ok = rc == 0 && e1 < 5e-3 && e2 < 5e-3;
    return {ok, fmt("Delta_1 worst |dev| %.4f, Delta_2 worst |dev| %.4f (tol 5e-3 each)", e1, e2)};
}

Outcome c2() {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> U(-3, 3), K(0.2, 3);
    const Material& m = nu13;
    double worst_odd = 0, worst_21 = 0, worst_12 = 0;
    int n = 0;
    while (n < 100) {
        double k = K(rng) * (rng() % 2 ? 1 : -1);
        cplx l(U(rng), U(rng));
        try {
            for (int j = 1; j <= 2; ++j) {
                cplx a = omega(j, m, k, -l), b = omega(j, m, k, l);
                worst_odd = std::max(worst_odd, std::abs(a + b) / std::abs(b));
            }
            cplx w1 = omega(1, m, k, l), w2 = omega(2, m, k, l);
            cplx a = omega(2, m, k, l_map_21(m, k, l));
            cplx b = omega(1, m, k, l_map_12(m, k, l));
            worst_21 = std::max(worst_21, std::abs(a + w1) / std::abs(w1));
            worst_12 = std::max(worst_12, std::abs(b + w2) / std::abs(w2));
            ++n;
        } catch (const BranchPointHit&) {
        }
    }
    // normalizations at |l| = 1e4 along several directions
    double worst_asym = 0;
    double a21 = std::sqrt((m.lambda + 2 * m.mu) / m.mu), a12 = std::sqrt(m.mu / (m.lambda + 2 * m.mu));
    for (int d = 0; d < 8; ++d) {
        cplx l = std::polar(1e4, (d + 0.25) * pi / 4);
        double k = 1.0;
        worst_asym = std::max({worst_asym, std::abs(omega(1, m, k, l) / (m.cp() * l) - 1.0),
                               std::abs(omega(2, m, k, l) / (m.cs() * l) - 1.0),
                               std::abs(l_map_21(m, k, l) / (-l * a21) - 1.0),
                               std::abs(l_map_12(m, k, l) / (-l * a12) - 1.0)});
    }
    bool ok = worst_odd < 1e-10 && worst_21 < 1e-10 && worst_12 < 1e-10 && worst_asym < 1e-6;
    return {ok, fmt("odd %.1e, w2(l21)+w1 %.1e, w1(l12)+w2 %.1e (tol 1e-10); asymptotic %.1e (tol 1e-6)", worst_odd,
                    worst_21, worst_12, worst_asym)};
}

Outcome c3() {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> U(-4, 4), K(0.1, 4);
    const Material& m = nu13;
    double worst = 0;
    int n = 0;
    while (n < 1000) {
        double k = K(rng) * (rng() % 2 ? 1 : -1);
        cplx l(U(rng), U(rng));
        try {
            Coeffs c = coeffs(m, k, l);
            for (int j = 1; j <= 2; ++j) {
                cplx full = j == 1 ? c.C1 * c.C4 - c.C2 * c.C3 : c.D1 * c.D4 - c.D2 * c.D3;
                double scale = j == 1 ? std::abs(c.C1 * c.C4) + std::abs(c.C2 * c.C3) : std::abs(c.D1 * c.D4) + std::abs(c.D2 * c.D3);
                worst = std::max(worst, std::abs(delta(j, m, k, l) - full) / scale);
            }
            ++n;
        } catch (const BranchPointHit&) {
        }
    }
    double worst_ik = 0;
    for (double k : {0.3, 1.0, 2.5, -1.7}) {
        cplx l = I * std::abs(k);
        Coeffs c = coeffs(m, k, l);
        double scale = std::abs(c.D1 * c.D4) + std::abs(c.D2 * c.D3);
        worst_ik = std::max(worst_ik, std::abs(delta(2, m, k, l)) / scale);
    }
    bool ok = worst < 1e-12 && worst_ik < 1e-12;
    return {ok, fmt("simplified vs full determinant %.1e, |Delta_2(k, ik)| %.1e (tol 1e-12)", worst, worst_ik)};
}

Outcome c4() {
    SolverOptions a, b;
    a.clearance = 0.05;
    b.clearance = 0.10;
    auto pa = evaluate_prop2(nu13, 1.0, 0.5, 0.5, 1.0, a), pb = evaluate_prop2(nu13, 1.0, 0.5, 0.5, 1.0, b);
    double rel = std::hypot(pa.u - pb.u, pa.v - pb.v) / std::hypot(pa.u, pa.v);
    return {rel < 1e-4 && !pa.flagged && !pb.flagged,
            fmt("(u, v) = (%.10f, %.10f) at c, (%.10f, %.10f) at 2c, rel diff %.1e (tol 1e-4)", pa.u, pa.v, pb.u, pb.v, rel)};
}

Outcome c5() {
    double h = 1.0 / 64;
    ProblemSpec p = mollified();
    auto xs = range(-2, 2, h), ys = range(0.2, 2, h);
    std::vector<double> ts = {0.0};
    for (double tc : {0.25, 0.5, 0.75, 1.0})
        for (double d : {-0.5 * h, 0.0, 0.5 * h}) ts.push_back(tc + d);
    std::vector<double> yl = {0.5 * h, h, 1.5 * h, 2 * h}, tl = {0.25, 0.5, 0.75, 1.0};
    SolverOptions o, ob;
    ob.allow_small_y = true;
    auto g = evaluate_grid(p, xs, ys, ts, o);
    auto gb = evaluate_grid(p, xs, yl, tl, ob);
    auto r = residuals(p, g, &gb);
    // negative controls on a reduced surface patch: both wrong choices must move the BC residual by > 10x
    auto xc = range(-1, 1, h);
    auto bc_of = [&](const ProblemSpec& q) { return bc_residuals(q, evaluate_grid(q, xc, yl, {0.5}, ob)).bc; };
    double ref = bc_of(p);
    ProblemSpec wn = p, wp = p;
    wn.normalization = Normalization::PaperFinalVerbatim;
    wp.placement = DeltaPlacement::AsDisplayed;
    double bn = bc_of(wn), bp = bc_of(wp);
    bool ok = r.pde < 0.02 && r.bc < 0.02 && r.ic < 1e-3 && bn > 10 * ref && bp > 10 * ref && !g.tolerance_flagged;
    return {ok, fmt("PDE %.2f%%, BC %.2f%% (tol 2%%), IC %.1e of peak (tol 1e-3); controls BC: normalization x1 %.1e, "
                    "x4pi^2 %.1e, swapped Delta %.1e",
                    100 * r.pde, 100 * r.bc, r.ic, ref, bn, bp)};
}

Outcome c6() {
    auto xs = range(-2, 2, 1.0 / 16), ys = range(0.2, 2, 1.0 / 16);
    std::vector<double> ts = {0.5, 1.0};
    FdtdConfig fc;
    fc.h = 1.0 / 256;
    std::string trend;
    bool ok = true;
    std::vector<double> to_delta;
    ProblemSpec exact = mollified(0.0);
    auto ge = evaluate_grid(exact, xs, ys, ts);
    for (double eps : {0.1, 0.05}) {
        ProblemSpec p = mollified(eps);
        auto s = evaluate_grid(p, xs, ys, ts);
        auto f = run(fc, p.material, p.forcing, p.initial, xs, ys, ts);
        auto per = relative_l2_per_time(s, f);
        if (eps == 0.1) ok = per[0] < 0.05 && per[1] < 0.05 && !s.tolerance_flagged;
        trend += fmt(" eps %.3g: t=0.5 %.2f%%, t=1 %.2f%%;", eps, 100 * per[0], 100 * per[1]);
        to_delta.push_back(relative_l2(s, ge));
    }
    // linearity of the main path in the load amplitude
    ProblemSpec p2 = mollified(0.1);
    p2.forcing.sigma0 = 2.0;
    auto s1 = evaluate_grid(mollified(0.1), xs, ys, ts), s2 = evaluate_grid(p2, xs, ys, ts);
    double lin = 0, nrm = 0;
    for (size_t q = 0; q < s1.u.size(); ++q) {
        lin += sq(s2.u[q] - 2 * s1.u[q]) + sq(s2.v[q] - 2 * s1.v[q]);
        nrm += sq(2 * s1.u[q]) + sq(2 * s1.v[q]);
    }
    return {ok, fmt("main vs FDTD (h=1/256):%s tol 5%% at eps 0.1. distance to exact delta: eps 0.1 %.2f%%, 0.05 %.2f%% (%s); "
                    "linearity %.1e",
                    trend.c_str(), 100 * to_delta[0], 100 * to_delta[1], to_delta[1] < to_delta[0] ? "shrinking" : "NOT shrinking",
                    std::sqrt(lin / nrm))};
}

Outcome c7() {
    RunConfig c;
    c.problem.material = nu13;
    c.problem.forcing = BoundaryForcing::normal(1.0, TimeProfile::heaviside());
    c.appendix.ts = range(0, 2, 0.01);
    c.appendix.ks = {0.5, 1.0, 2.0};
    auto rows = cli::appendix_routes(c);
    bool ok = true;
    std::string d;
    for (auto& r : rows) {
        ok = ok && r.ab < 0.02 && r.ac < 0.05;
        d += fmt(" k=%g: (b) %.2e, (c) %.2e;", r.k, r.ab, r.ac);
    }
    return {ok, "relative L2 against Volterra:" + d + " tol 2% / 5%"};
}

// classical secular equation (2 - x^2)^2 = 4 sqrt(1 - kappa x^2) sqrt(1 - x^2), x = c/cs
double classical_rayleigh(const Material& m) {
    double kappa = m.mu / (m.lambda + 2 * m.mu);
    auto R = [&](double x) { return sq(2 - x * x) - 4 * std::sqrt(1 - kappa * x * x) * std::sqrt(1 - x * x); };
    double a = 0.5, b = 1 - 1e-14;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (a + b);
        ((R(mid) > 0) == (R(a) > 0) ? a : b) = mid;
    }
    return 0.5 * (a + b);
}

Outcome c8() {
    auto r = rayleigh_zeros(nu13);
    double ref = classical_rayleigh(nu13), rel = std::abs(r.speed_ratio - ref) / ref;
    auto r1 = rayleigh_zeros(Material{1.0, 1.0});
    bool pf = r1.pole_free && r1.right_half_plane_zeros == 0;
    return {rel < 5e-4 && pf, fmt("c_R/cs %.9f vs classical %.9f (rel %.1e, tol 5e-4); mu/lambda = 1: %s (Re p > 0 zeros: %d)",
                                  r.speed_ratio, ref, rel, pf ? "pole-free" : "NOT pole-free", r1.right_half_plane_zeros)};
}

Outcome c9() {
    ProblemSpec p = mollified();
    auto r = global_relation_check(p, 1.0, cplx(0, -0.5), 0.5);
    ProblemSpec q = p;
    q.forcing = BoundaryForcing::tangential(1.0, TimeProfile::smoothed(0.05), 0.1);
    auto n = global_relation_check(p, q, 1.0, cplx(0, -0.5), 0.5);
    return {r.residual < 0.05 && n.residual > 0.5,
            fmt("residual %.2e (tol 5%%), negative control %.1f%% (must exceed 50%%)", r.residual, 100 * n.residual)};
}

const char* titles[] = {"",
                        "determinant zeros vs listed values",
                        "branch and map identities",
                        "determinant identity",
                        "contour-deformation invariance",
                        "residual suite",
                        "FDTD oracle agreement",
                        "appendix three-way agreement",
                        "Rayleigh consistency",
                        "global relation spot check"};

} // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: acceptance <1..9|all>\n";
        return 2;
    }
    std::vector<int> which;
    if (std::string(argv[1]) == "all")
        for (int i = 1; i <= 9; ++i) which.push_back(i);
    else
        which.push_back(std::atoi(argv[1]));
    Outcome (*fns[])() = {nullptr, c1, c2, c3, c4, c5, c6, c7, c8, c9};
    bool all = true;
    for (int n : which) {
        if (n < 1 || n > 9) {
            std::cerr << "criterion must be 1..9\n";
            return 2;
        }
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fns[n]();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %d [%s]: %s  %s  (%.1f s)\n", n, titles[n], o.pass ? "PASS" : "FAIL", o.detail.c_str(), sec);
        std::fflush(stdout);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
