#include <gtest/gtest.h>

#include "lamb/laplace_path.hpp"

using namespace lamb;

namespace {

const Material M{2.0, 1.0};

std::vector<double> grid(double T, int n) {
    std::vector<double> ts;
    for (int i = 0; i <= n; ++i) ts.push_back(T * i / n);
    return ts;
}

// trapezoid Laplace transform of a sampled trace
Vec2 sampled_laplace(const BoundaryTrace& a, double p) {
    double dt = a.ts[1] - a.ts[0];
    cplx Lu = 0, Lv = 0;
    for (size_t n = 0; n < a.ts.size(); ++n) {
        double w = (n == 0 || n + 1 == a.ts.size()) ? 0.5 : 1.0;
        Lu += w * std::exp(-p * a.ts[n]) * a.u[n];
        Lv += w * std::exp(-p * a.ts[n]) * a.v[n];
    }
    return {Lu * dt, Lv * dt};
}

double rel2(const Vec2& a, const Vec2& b) {
    return std::sqrt(std::norm(a[0] - b[0]) + std::norm(a[1] - b[1])) / std::sqrt(std::norm(b[0]) + std::norm(b[1]));
}

InitialData bumps() {
    InitialData d;
    d.kind = InitialData::Gaussian;
    d.bumps = {{2, 1.0, 0.0, 0.8, 0.2}, {1, 0.5, 0.1, 0.6, 0.15}};
    return d;
}

} // namespace

TEST(Kernels, ZeroInitialDataHasNoH) {
    auto r = kernels(M, 1.0, cplx(0.3, -0.4), 0.5);
    EXPECT_EQ(r.H[0], cplx(0));
    EXPECT_EQ(r.H[1], cplx(0));
}

TEST(Kernels, MAtKZero) {
    auto r = kernels(M, 0.0, cplx(0.3, -0.4), 0.5);
    EXPECT_EQ(r.M[0][1], cplx(0));
    EXPECT_EQ(r.M[1][0], cplx(0));
    EXPECT_EQ(r.M[1][1], cplx(0));
}

TEST(Kernels, EntriesAtMinusTwoI) {
    // right of the cut below -i: (k^2 + l^2)^{1/2} -> -i sqrt(3)
    double k = 1, t = 0.5, lp = 4, mu = 1;
    cplx l(1e-12, -2.0), s(0, -std::sqrt(3.0));
    EXPECT_LT(std::abs(sqrt_branch(k, l).value - s), 1e-9);
    cplx e1 = std::exp(I * std::sqrt(lp) * s * t), e2 = std::exp(I * std::sqrt(mu) * s * t);
    auto r = kernels(M, k, l, t);
    EXPECT_LT(std::abs(r.N[0][0] - I * l * e2), 1e-9);
    EXPECT_LT(std::abs(r.N[0][1] - (-I * lp * k * e2)), 1e-9);
    EXPECT_LT(std::abs(r.N[1][0] - I * (mu / 2) * k * e1), 1e-9);
    EXPECT_LT(std::abs(r.N[1][1] - I * 2.0 * l * e1), 1e-9);
    EXPECT_LT(std::abs(r.M[0][0] - k * k * e2), 1e-9);
    EXPECT_LT(std::abs(r.M[0][1] - 2.0 * k * l * e2), 1e-9);
    EXPECT_LT(std::abs(r.M[1][0] - (-(2 * mu / 2) * k * l * e1)), 1e-9);
    EXPECT_LT(std::abs(r.M[1][1] - (-(2.0 / 2) * k * k * e1)), 1e-9);
}

TEST(KApply, ZeroAndDeformationInvariance) {
    auto path = build_gamma_k2(1.0, {});
    EXPECT_EQ(K_apply([](cplx) { return cplx(0); }, 1.0, path).value, cplx(0));
    auto f = [](cplx l) { return std::exp(I * 0.7 * sqrt_branch(1.0, l).value) / (1.0 + l * l * 0.1); };
    GammaK2Options o;
    o.depth = 3.0;
    o.width = 10.0;
    cplx a = K_apply(f, 1.0, path).value, b = K_apply(f, 1.0, build_gamma_k2(1.0, o)).value;
    EXPECT_LT(std::abs(a - b), 1e-6 * std::abs(a));
}

TEST(KApply, RejectsNonDecayingIntegrand) {
    auto path = build_gamma_k2(1.0, {});
    EXPECT_THROW(K_apply([](cplx l) { return l * sqrt_branch(1.0, l).value; }, 1.0, path), ToleranceNotMet);
}

TEST(Volterra, ZeroProblem) {
    auto tr = solve_volterra(M, BoundaryForcing::none(), InitialData{}, 1.0, grid(1, 10));
    for (auto x : tr.u) EXPECT_EQ(x, cplx(0));
    for (auto x : tr.v) EXPECT_EQ(x, cplx(0));
}

TEST(Volterra, RejectsBadGrids) {
    auto f = BoundaryForcing::normal(1.0, TimeProfile::heaviside());
    EXPECT_THROW(solve_volterra(M, f, {}, 1.0, {0.0, 0.1, 0.3}), DomainError);
    EXPECT_THROW(solve_volterra(M, f, {}, 1.0, {0.1, 0.2}), DomainError);
    EXPECT_THROW(solve_volterra(M, f, {}, 0.0, grid(1, 4)), DomainError);
}

TEST(Volterra, SecondOrderInTimeStep) {
    auto f = BoundaryForcing::normal(1.0, TimeProfile::heaviside());
    VolterraOptions vo;
    vo.tol = 1e-9;
    cplx v[3];
    int i = 0;
    for (int n : {25, 50, 100}) v[i++] = solve_volterra(M, f, {}, 1.0, grid(1, n), vo).v.back();
    double ratio = std::abs(v[0] - v[1]) / std::abs(v[1] - v[2]);
    EXPECT_GT(ratio, 2.5);
    EXPECT_LT(ratio, 6.0);
}

TEST(Volterra, AgreesWithLaplaceInversion) {
    for (double k : {0.5, 1.0, 2.0}) {
        auto f = BoundaryForcing::normal(1.0, TimeProfile::heaviside());
        auto ts = grid(2, 200);
        VolterraOptions vo;
        vo.tol = 1e-8;
        auto a = solve_volterra(M, f, {}, k, ts, vo);
        auto b = laplace_trace(M, f, k, ts);
        double num = 0, den = 0;
        for (size_t n = 0; n < ts.size(); ++n) {
            num += std::norm(a.u[n] - b.u[n]) + std::norm(a.v[n] - b.v[n]);
            den += std::norm(a.u[n]) + std::norm(a.v[n]);
        }
        EXPECT_LT(std::sqrt(num / den), 0.02) << k;
    }
}

TEST(Volterra, SmoothedProfileThroughDuhamel) {
    auto f = BoundaryForcing::tangential(1.0, TimeProfile::smoothed(0.2), 0.1);
    auto ts = grid(1, 100);
    VolterraOptions vo;
    vo.tol = 1e-8;
    auto a = solve_volterra(M, f, {}, 1.0, ts, vo);
    auto b = laplace_trace(M, f, 1.0, ts);
    EXPECT_LT(std::abs(a.u.back() - b.u.back()), 0.01 * std::abs(b.u.back()));
    EXPECT_LT(std::abs(a.v.back() - b.v.back()), 0.01 * std::abs(b.u.back()));
}

TEST(LaplaceSolution, ForcingTermMatchesVolterraTransform) {
    auto f = BoundaryForcing::normal(1.0, TimeProfile::heaviside());
    VolterraOptions vo;
    vo.tol = 1e-8;
    auto a = solve_volterra(M, f, {}, 1.0, grid(4, 400), vo);
    for (double p : {6.0, 8.0}) {
        auto s = laplace_solution(M, f.at(1.0, M), InitialData{}.at(1.0), 1.0, p);
        EXPECT_LT(rel2(s, sampled_laplace(a, p)), 1e-3) << p;
    }
    EXPECT_THROW(laplace_solution(M, f.at(1.0, M), InitialData{}.at(1.0), 1.0, cplx(-1, 0)), DomainError);
}

TEST(LaplaceSolution, InitialDataSign) {
    // the sign carried by the first contour integral as derived, not as displayed
    auto d = bumps();
    VolterraOptions vo;
    vo.tol = 1e-8;
    vo.contour.depth = 1.2;
    auto a = solve_volterra(M, BoundaryForcing::none(), d, 1.0, grid(4, 400), vo);
    for (double p : {6.0, 8.0}) {
        LaplaceOptions lo;
        lo.contour.depth = 1.2;
        lo.sign = ICSign::Derived;
        auto s = laplace_solution(M, BoundaryForcing::none().at(1.0, M), d.at(1.0), 1.0, p, lo);
        lo.sign = ICSign::Verbatim;
        auto v = laplace_solution(M, BoundaryForcing::none().at(1.0, M), d.at(1.0), 1.0, p, lo);
        auto L = sampled_laplace(a, p);
        EXPECT_LT(rel2(s, L), 1e-3);
        EXPECT_GT(rel2(v, L), 0.5);
    }
}

TEST(LaplaceMatrix, EqualsResolventOfKernelTransforms) {
    double k = 1;
    cplx p = 6.0;
    auto [N, Mk] = laplace_kernel_transforms(M, k, p);
    // (I - M)^{-1} N
    cplx a = 1.0 - Mk[0][0], b = -Mk[0][1], c = -Mk[1][0], d = 1.0 - Mk[1][1], det = a * d - b * c;
    Mat2 R;
    for (int j = 0; j < 2; ++j) {
        R[0][j] = (d * N[0][j] - b * N[1][j]) / det;
        R[1][j] = (-c * N[0][j] + a * N[1][j]) / det;
    }
    auto A = laplace_matrix(M, k, p);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) EXPECT_LT(std::abs(A[i][j] - R[i][j]), 1e-8) << i << j;
}

TEST(LaplacePoint, BranchHasPositiveRealPart) {
    for (cplx p : {cplx(0.1, 3.0), cplx(2.0, -5.0), cplx(0.01, 0.5)}) {
        auto q = laplace_point(M, 1.3, p);
        EXPECT_GT(q.w1.real(), 0);
        EXPECT_GT(q.w2.real(), 0);
        EXPECT_LT(std::abs(q.w1 * q.w1 - (p * p + 4.0 * 1.69)), 1e-12);
    }
}

TEST(Inversion, KnownPairs) {
    auto ts = grid(3, 30);
    auto e = invert_laplace([](cplx p) { return 1.0 / (p + 1.0); }, ts, 0.0);
    auto s = invert_laplace([](cplx p) { return 1.0 / (p * p + 1.0); }, ts, 1.0);
    for (size_t n = 1; n < ts.size(); ++n) {
        EXPECT_LT(std::abs(e.values[n] - std::exp(-ts[n])), 1e-8);
        EXPECT_LT(std::abs(s.values[n] - std::sin(ts[n])), 1e-8);
    }
}

TEST(Rayleigh, SpeedMatchesClassicalRoot) {
    // independent: bisection of (2 - x^2)^2 - 4 sqrt(1 - kappa x^2) sqrt(1 - x^2) on (0.5, 1)
    double kappa = 0.25;
    auto R = [&](double x) { return std::pow(2 - x * x, 2) - 4 * std::sqrt(1 - kappa * x * x) * std::sqrt(1 - x * x); };
    double a = 0.5, b = 1 - 1e-15;
    for (int i = 0; i < 200; ++i) {
        double m = 0.5 * (a + b);
        (R(m) > 0) == (R(a) > 0) ? a = m : b = m;
    }
    auto r = rayleigh_zeros(M);
    EXPECT_NEAR(r.speed_ratio, 0.5 * (a + b), 1e-10);
    EXPECT_NEAR(r.speed_ratio, 0.9325, 1e-4);
    EXPECT_EQ(r.right_half_plane_zeros, 0);
}

TEST(Rayleigh, ClassifierThreshold) {
    auto r = rayleigh_zeros(M);
    EXPECT_NEAR(r.threshold_mu_over_lambda, 0.90055, 1e-4);
    EXPECT_FALSE(r.pole_free);
    auto s = rayleigh_zeros(Material{1.0, 1.0});
    EXPECT_TRUE(s.pole_free);
    EXPECT_EQ(s.right_half_plane_zeros, 0);
    for (auto q : r.cubic_roots) {
        double kappa = 0.25;
        EXPECT_LT(std::abs(((q - 8.0) * q + (24 - 16 * kappa)) * q - 16 * (1 - kappa)), 1e-10);
    }
}

TEST(Rayleigh, PoleRejected) {
    auto r = rayleigh_zeros(M);
    auto f = BoundaryForcing::normal(1.0, TimeProfile::heaviside());
    cplx p(0, r.speed_ratio * M.cs());
    // on the imaginary axis Re p = 0 is outside the domain; just inside it the pole is resolved
    EXPECT_THROW(laplace_solution(M, f.at(1.0, M), InitialData{}.at(1.0), 1.0, p), DomainError);
    EXPECT_THROW(laplace_solution(M, f.at(1.0, M), InitialData{}.at(1.0), 1.0, p + 1e-14), RayleighPole);
}
