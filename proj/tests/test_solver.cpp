#include <gtest/gtest.h>

#include <random>

#include "lamb/residuals.hpp"

using namespace lamb;

namespace {

const Material M{2.0, 1.0};

ProblemSpec delta_load() {
    ProblemSpec p;
    p.material = M;
    p.forcing = BoundaryForcing::normal(1.0, TimeProfile::heaviside());
    return p;
}

double rel(const PointValue& a, const PointValue& b) { return std::hypot(a.u - b.u, a.v - b.v) / std::hypot(b.u, b.v); }

std::vector<double> range(double a, double b, double h) {
    std::vector<double> r;
    int n = static_cast<int>(std::lround((b - a) / h));
    for (int i = 0; i <= n; ++i) r.push_back(a + i * h);
    return r;
}

// P plane wave u = (k, l)/|kappa| cos(kx + ly - cp |kappa| t)
FieldGrid plane_wave(double h) {
    FieldGrid g;
    g.xs = range(0, 1, h);
    g.ys = range(0.5, 1.5, h);
    g.ts = {0.3 - h / 4, 0.3, 0.3 + h / 4};
    g.allocate();
    double k = 2, l = 1, K = std::hypot(k, l), w = M.cp() * K;
    for (size_t n = 0; n < g.nt(); ++n)
        for (size_t j = 0; j < g.ny(); ++j)
            for (size_t i = 0; i < g.nx(); ++i) {
                double c = std::cos(k * g.xs[i] + l * g.ys[j] - w * g.ts[n]);
                g.u[g.idx(i, j, n)] = k / K * c;
                g.v[g.idx(i, j, n)] = l / K * c;
            }
    return g;
}

} // namespace

TEST(Eliminate, ZeroDataGivesZero) {
    auto x = eliminate_unknowns(M, 1.0, cplx(0.3, 0.8), 0, 0, 0, 0);
    EXPECT_EQ(x.U1, cplx(0));
    EXPECT_EQ(x.U2, cplx(0));
    EXPECT_EQ(x.V1, cplx(0));
    EXPECT_EQ(x.V2, cplx(0));
}

TEST(Eliminate, SolvesBothLinearSystems) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(-2, 2);
    for (int it = 0; it < 20; ++it) {
        cplx l(U(rng), std::abs(U(rng)) + 0.1);
        double k = 0.5 + std::abs(U(rng));
        cplx n[4] = {{U(rng), U(rng)}, {U(rng), U(rng)}, {U(rng), U(rng)}, {U(rng), U(rng)}};
        Unknowns x;
        try {
            x = eliminate_unknowns(M, k, l, n[0], n[1], n[2], n[3]);
        } catch (const BranchPointHit&) {
            continue;
        }
        auto c = coeffs(M, k, l);
        EXPECT_LT(std::abs(c.C1 * x.V2 + c.C2 * x.U2 + n[0]), 1e-10);
        EXPECT_LT(std::abs(c.C3 * x.V2 + c.C4 * x.U2 + n[1]), 1e-10);
        EXPECT_LT(std::abs(c.D1 * x.V1 + c.D2 * x.U1 + n[2]), 1e-10);
        EXPECT_LT(std::abs(c.D3 * x.V1 + c.D4 * x.U1 + n[3]), 1e-10);
    }
}

TEST(Eliminate, RejectsDeterminantZero) {
    for (auto& z : delta_zeros(1, M).zeros)
        if (z.principal && z.alpha.imag() > 0) EXPECT_THROW(eliminate_unknowns(M, 1.0, z.alpha, 1, 1, 1, 1), DeterminantNearZero);
}

TEST(Evaluate, ZeroProblemIsZero) {
    ProblemSpec p;
    p.material = M;
    auto g = evaluate_grid(p, {-0.5, 0.5}, {0.3, 1.0}, {0.0, 1.0});
    for (double x : g.u) EXPECT_EQ(x, 0.0);
    for (double x : g.v) EXPECT_EQ(x, 0.0);
    auto q = evaluate_prop2(M, 0.0, 0.5, 0.5, 1.0);
    EXPECT_EQ(q.u, 0.0);
    EXPECT_EQ(q.v, 0.0);
}

TEST(Evaluate, QuiescentAtTimeZero) {
    auto g = evaluate_grid(delta_load(), {0.0, 0.5}, {0.5}, {0.0});
    for (double x : g.u) EXPECT_LT(std::abs(x), 1e-12);
    for (double x : g.v) EXPECT_LT(std::abs(x), 1e-12);
}

TEST(Evaluate, Prop2MatchesGeneralPath) {
    auto a = evaluate_prop2(M, 1.0, 0.5, 0.5, 1.0);
    auto b = evaluate_uv(delta_load(), 0.5, 0.5, 1.0);
    EXPECT_FALSE(a.flagged);
    EXPECT_FALSE(b.flagged);
    EXPECT_LT(rel(b, a), 1e-4) << a.u << " " << a.v << " vs " << b.u << " " << b.v;
    // real data: imaginary residue negligible
    double s = std::hypot(b.u, b.v);
    EXPECT_LT(b.imag_u, 1e-6 * s);
    EXPECT_LT(b.imag_v, 1e-6 * s);
}

TEST(Evaluate, LineLoadSymmetry) {
    auto g = evaluate_grid(delta_load(), {-0.4, 0.0, 0.4}, {0.5}, {0.8});
    double s = std::abs(g.v[1]);
    EXPECT_LT(std::abs(g.u[1]), 1e-6 * s);
    EXPECT_LT(std::abs(g.u[0] + g.u[2]), 1e-6 * s);
    EXPECT_LT(std::abs(g.v[0] - g.v[2]), 1e-6 * s);
}

TEST(Evaluate, LinearInLoadAmplitude) {
    ProblemSpec p = delta_load(), q = delta_load();
    q.forcing = BoundaryForcing::normal(-2.5, TimeProfile::heaviside());
    auto a = evaluate_uv(p, 0.3, 0.6, 0.7), b = evaluate_uv(q, 0.3, 0.6, 0.7);
    EXPECT_LT(std::abs(b.u + 2.5 * a.u), 1e-6 * std::abs(a.u));
    EXPECT_LT(std::abs(b.v + 2.5 * a.v), 1e-6 * std::abs(a.v));
}

TEST(Evaluate, AdditiveInInitialData) {
    ProblemSpec a, b, s;
    a.material = b.material = s.material = M;
    a.initial.kind = b.initial.kind = s.initial.kind = InitialData::Gaussian;
    a.initial.bumps = {{0, 1.0, 0.0, 0.8, 0.2}};
    b.initial.bumps = {{3, -0.7, 0.3, 1.0, 0.15}};
    s.initial.bumps = {a.initial.bumps[0], b.initial.bumps[0]};
    SolverOptions o;
    std::vector<double> ys = {0.5, 0.9}, ts = {0.3, 0.6};
    auto fa = general_engine(a, o).x_transform(1.3, ys, ts), fb = general_engine(b, o).x_transform(1.3, ys, ts);
    auto fs = general_engine(s, o).x_transform(1.3, ys, ts);
    for (size_t i = 0; i < fs.u.size(); ++i) {
        double scale = std::abs(fa.u[i]) + std::abs(fb.u[i]) + std::abs(fa.v[i]) + std::abs(fb.v[i]);
        EXPECT_LT(std::abs(fs.u[i] - fa.u[i] - fb.u[i]), 1e-6 * scale);
        EXPECT_LT(std::abs(fs.v[i] - fa.v[i] - fb.v[i]), 1e-6 * scale);
    }
}

TEST(Evaluate, ContourIndependence) {
    SolverOptions a, b;
    a.clearance = 0.05;
    b.clearance = 0.1;
    auto pa = evaluate_uv(delta_load(), 0.4, 0.7, 0.9, a), pb = evaluate_uv(delta_load(), 0.4, 0.7, 0.9, b);
    EXPECT_LT(rel(pa, pb), 1e-6 + 10 * a.tol);
}

TEST(Evaluate, NormalizationConventionsDifferBy4Pi2) {
    ProblemSpec p = delta_load(), q = delta_load();
    q.normalization = Normalization::PaperFinalVerbatim;
    auto a = evaluate_uv(p, 0.4, 0.7, 0.9), b = evaluate_uv(q, 0.4, 0.7, 0.9);
    EXPECT_NEAR(b.u / a.u, 4 * pi * pi, 1e-6 * 4 * pi * pi);
    EXPECT_NEAR(b.v / a.v, 4 * pi * pi, 1e-6 * 4 * pi * pi);
}

TEST(Evaluate, WeakCausality) {
    // r = 1.5 .. 1.8, so t = 0.5 < 0.9 r / cp everywhere on this grid
    auto g = evaluate_grid(delta_load(), {-1.0, 0.0, 1.0}, {1.2, 1.5}, {0.5, 1.0});
    int checked = 0;
    for (size_t j = 0; j < g.ny(); ++j)
        for (size_t i = 0; i < g.nx(); ++i) {
            if (std::hypot(g.xs[i], g.ys[j]) < 1.5 - 1e-12) continue;
            double late = std::hypot(g.u[g.idx(i, j, 1)], g.v[g.idx(i, j, 1)]);
            double early = std::hypot(g.u[g.idx(i, j, 0)], g.v[g.idx(i, j, 0)]);
            EXPECT_LT(early, 0.01 * late) << g.xs[i] << "," << g.ys[j];
            ++checked;
        }
    EXPECT_EQ(checked, 5);
}

TEST(Evaluate, SmallYNeedsOptIn) {
    EXPECT_THROW(evaluate_uv(delta_load(), 0.0, 0.005, 0.5), DomainError);
}

TEST(Residuals, ZeroFieldZeroResidual) {
    ProblemSpec p;
    p.material = M;
    FieldGrid g;
    g.xs = range(0, 0.5, 0.05);
    g.ys = range(0.2, 0.5, 0.05);
    g.ts = {0.0, 0.05, 0.1};
    g.allocate();
    auto r = interior_residuals(p, g);
    EXPECT_TRUE(r.has_pde);
    EXPECT_TRUE(r.has_ic);
    EXPECT_EQ(r.pde, 0.0);
    EXPECT_EQ(r.ic, 0.0);
}

TEST(Residuals, SecondOrderOnPlaneWave) {
    ProblemSpec p;
    p.material = M;
    double a = interior_residuals(p, plane_wave(1.0 / 32)).pde, b = interior_residuals(p, plane_wave(1.0 / 64)).pde;
    EXPECT_LT(a, 0.05);
    EXPECT_NEAR(a / b, 4.0, 0.4);
}

TEST(Residuals, CoarseGridRejected) {
    ProblemSpec p = delta_load();
    p.forcing = BoundaryForcing::normal(1.0, TimeProfile::smoothed(0.05), 0.1);
    EXPECT_THROW(interior_residuals(p, plane_wave(0.1)), GridTooCoarse);
}

TEST(GlobalRelation, ZeroProblem) {
    ProblemSpec p;
    p.material = M;
    EXPECT_EQ(global_relation_check(p, 1.0, cplx(0, -0.5), 0.5).residual, 0.0);
    EXPECT_THROW(global_relation_check(p, 1.0, cplx(0, 0.5), 0.5), DomainError);
}
