#include <gtest/gtest.h>

#include <random>

#include "lamb/data_transforms.hpp"

using namespace lamb;

namespace {

const Material M{2.0, 1.0};

// plain composite Gauss-Legendre on [a, b]
template <class F>
cplx gl(F f, double a, double b, int panels, int order = 20) {
    std::vector<double> x, w;
    gauss_legendre(order, x, w);
    cplx r = 0;
    double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p)
        for (int i = 0; i < order; ++i) r += 0.5 * h * w[i] * f(a + p * h + 0.5 * h * (x[i] + 1));
    return r;
}

} // namespace

TEST(GTilde, NormalLoad) {
    auto f = BoundaryForcing::normal(1.0, TimeProfile::heaviside());
    for (double k : {-2.0, 0.3, 5.0}) {
        EXPECT_LT(std::abs(g_tilde(f, M, 2, k, 0.7) - 1.0 / 3.0), 1e-15);
        EXPECT_EQ(g_tilde(f, M, 1, k, 0.7), cplx(0));
    }
}

TEST(GTilde, MovingLoadShift) {
    auto f = BoundaryForcing::moving(1.0, 2.0);
    EXPECT_LT(std::abs(g_tilde(f, M, 2, 1.0, 1.0) - std::exp(cplx(0, -2)) / 3.0), 1e-15);
}

TEST(GTilde, SampledMatchesTrapezoidAndChecksNyquist) {
    BoundaryForcing f;
    f.kind = BoundaryForcing::Sampled;
    f.x0 = -3;
    f.dx = 0.05;
    f.nx = 121;
    f.dt = 0.1;
    f.nt = 3;
    f.g1.assign(f.nx * f.nt, 0.0);
    f.g2.assign(f.nx * f.nt, 0.0);
    for (int n = 0; n < f.nt; ++n)
        for (int i = 0; i < f.nx; ++i) {
            double x = f.x0 + i * f.dx;
            f.g2[n * f.nx + i] = std::exp(-x * x / (2 * 0.3 * 0.3));
        }
    // Gaussian: transform 0.3 sqrt(2 pi) e^{-k^2 0.09/2}
    double k = 1.5;
    cplx want = 0.3 * std::sqrt(2 * pi) * std::exp(-0.5 * k * k * 0.09);
    EXPECT_LT(std::abs(g_tilde(f, M, 2, k, 0.15) - want), 1e-10);
    EXPECT_THROW(g_tilde(f, M, 2, 100.0, 0.1), GridTooCoarse);
}

TEST(TimeIntegrals, HeavisideClosedForm) {
    auto f = BoundaryForcing::normal(1.0, TimeProfile::heaviside());
    double k = 1, t = 0.8;
    cplx l(0.3, 0.4);
    for (int j = 1; j <= 2; ++j) {
        auto ti = time_integrals(f, M, j, k, l, t);
        cplx w = omega(j, M, k, l);
        EXPECT_LT(std::abs(ti.f_plus - (std::exp(I * w * t) - 1.0) / (I * w) / 3.0), 1e-14);
        EXPECT_LT(std::abs(ti.f_minus - (std::exp(-I * w * t) - 1.0) / (-I * w) / 3.0), 1e-14);
        EXPECT_EQ(ti.g_plus, cplx(0));
    }
}

TEST(TimeIntegrals, ZeroAtTimeZero) {
    for (auto f : {BoundaryForcing::normal(1.0, TimeProfile::heaviside()), BoundaryForcing::tangential(2.0, TimeProfile::smoothed(0.1)),
                   BoundaryForcing::moving(1.0, 1.5)}) {
        auto ti = time_integrals(f, M, 1, 1.0, cplx(0.2, 0.1), 0.0);
        EXPECT_EQ(ti.g_plus, cplx(0));
        EXPECT_EQ(ti.f_plus, cplx(0));
        EXPECT_EQ(ti.f_minus, cplx(0));
    }
}

TEST(TimeIntegrals, SmoothedAgainstQuadrature) {
    auto f = BoundaryForcing::normal(1.0, TimeProfile::smoothed(0.1));
    double k = 1, t = 1;
    cplx l(1e-3, 2.0);  // side specified: right of the cut
    for (int j = 1; j <= 2; ++j) {
        cplx w = omega(j, M, k, l);
        auto X = TimeProfile::smoothed(0.1);
        cplx want = gl([&](double s) { return std::exp(I * w * s) * X.value(s); }, 0, 0.1, 40) +
                    gl([&](double s) { return std::exp(I * w * s) * X.value(s); }, 0.1, t, 40);
        want /= 3.0;
        EXPECT_LT(std::abs(time_integrals(f, M, j, k, l, t).f_plus - want), 1e-10 * std::abs(want));
    }
}

TEST(BigGF, HeavisideAndSmallOmega) {
    auto f = BoundaryForcing::normal(1.0, TimeProfile::heaviside());
    double t = 0.9;
    cplx l(0.7, -0.2);
    for (int j = 1; j <= 2; ++j) {
        cplx w = omega(j, M, 1.0, l);
        auto [G, F] = big_GF(f, M, j, 1.0, l, t);
        EXPECT_EQ(G, cplx(0));
        EXPECT_LT(std::abs(F - (-I / 3.0) * (1.0 - std::cos(w * t)) / (w * w)), 1e-14);
    }
    // w t << 1: Taylor limit, no cancellation
    auto [G, F] = big_GF(f, M, 1, 1e-6, cplx(1e-6, 0), t);
    EXPECT_LT(std::abs(F - (-I / 3.0) * t * t / 2.0), 1e-12);
}

TEST(BigGF, BoundedNearRemovablePoints) {
    auto f = BoundaryForcing::tangential(1.0, TimeProfile::heaviside());
    double k = 1.3, t = 0.6;
    for (int d = 0; d < 8; ++d) {
        cplx l = I * k + 1e-5 * std::polar(1.0, (d + 0.5) * pi / 4);
        if (std::abs(l.real()) < 1e-9) continue;
        for (int j = 1; j <= 2; ++j) {
            auto [G, F] = big_GF(f, M, j, k, l, t);
            // omega^2 -> 0: G -> -i g1 (t^2/2 - omega^2 t^4/24), g1 = 1/mu
            cplx w2 = omega(j, M, k, l) * omega(j, M, k, l);
            EXPECT_LT(std::abs(G - (-I) * (t * t / 2.0 - w2 * std::pow(t, 4) / 24.0)), 1e-11);
            EXPECT_EQ(F, cplx(0));
        }
    }
}

TEST(InitialTransforms, ZeroData) {
    auto r = initial_transforms(InitialData{}, 1.0, cplx(0.3, -0.2));
    for (auto x : r) EXPECT_EQ(x, cplx(0));
}

TEST(InitialTransforms, KZeroKillsQ0) {
    InitialData d;
    d.kind = InitialData::Gaussian;
    d.bumps.push_back({2, 1.0, 0.0, 0.8, 0.2});
    cplx l(0.5, -0.3);
    auto r = initial_transforms(d, 0.0, l);
    EXPECT_EQ(r[2], cplx(0));
    EXPECT_NE(r[0], cplx(0));
    auto h = d.at(0.0).hats(l);
    EXPECT_LT(std::abs(r[0] - l * h[2]), 1e-15);
}

TEST(InitialTransforms, GaussianAgainstQuadrature) {
    InitialData d;
    d.kind = InitialData::Gaussian;
    GaussianBump b{0, 1.3, 0.2, 0.6, 0.15};
    d.bumps.push_back(b);
    double k = 1;
    cplx l(0, -0.5);
    auto inner = [&](double x) {
        return gl([&](double y) { return std::exp(-I * k * x - I * l * y) * b.amplitude * std::exp(-(sq(x - b.x0) + sq(y - b.y0)) / (2 * b.width * b.width)); },
                  0.0, b.y0 + 12 * b.width, 20);
    };
    cplx u0 = gl(inner, b.x0 - 12 * b.width, b.x0 + 12 * b.width, 20);
    auto h = d.at(k).hats(l);
    EXPECT_LT(std::abs(h[0] - u0), 1e-8 * std::abs(u0));
    auto pq = initial_transforms(d, k, l);
    EXPECT_LT(std::abs(pq[0] - k * u0), 1e-8 * std::abs(u0));
    EXPECT_LT(std::abs(pq[2] - l * u0), 1e-8 * std::abs(u0));
}

TEST(InitialTransforms, SampledNeedsLowerHalfPlane) {
    InitialData d;
    d.kind = InitialData::Sampled;
    d.x0 = -1;
    d.dx = 0.1;
    d.nx = 21;
    d.y0 = 0;
    d.dy = 0.1;
    d.ny = 11;
    for (auto& f : d.fields) f.assign(d.nx * d.ny, 0.0);
    d.fields[0][5 * 21 + 10] = 1.0;
    EXPECT_NO_THROW(initial_transforms(d, 1.0, cplx(0.3, -0.1)));
    EXPECT_THROW(initial_transforms(d, 1.0, cplx(0.3, 0.1)), DomainError);
}

TEST(NPQ, NormalLoadClosedForm) {
    auto f = BoundaryForcing::normal(1.0, TimeProfile::heaviside());
    double k = 0.8, t = 1.1;
    cplx l(0.4, 0.6);
    auto [NP, NQ] = N_PQ(f, InitialData{}, M, k, l, t);
    cplx w1 = omega(1, M, k, l), w2 = omega(2, M, k, l);
    EXPECT_LT(std::abs(NP - (-l * 4.0 / 3.0 * (1.0 - std::cos(w1 * t)) / (w1 * w1))), 1e-13);
    EXPECT_LT(std::abs(NQ - (k * 4.0 / 3.0 * (1.0 - std::cos(w2 * t)) / (w2 * w2))), 1e-13);
}

TEST(NPQ, ZeroEverything) {
    auto [NP, NQ] = N_PQ(BoundaryForcing::none(), InitialData{}, M, 1.0, cplx(0.1, 0.2), 1.0);
    EXPECT_EQ(NP, cplx(0));
    EXPECT_EQ(NQ, cplx(0));
}

TEST(NPQ, ReducesToInitialDataAtTimeZero) {
    InitialData d;
    d.kind = InitialData::Gaussian;
    d.bumps = {{0, 1.0, 0.1, 0.5, 0.2}, {1, -0.5, 0.0, 0.7, 0.1}, {2, 0.3, -0.2, 0.4, 0.2}, {3, 0.8, 0.2, 0.6, 0.15}};
    for (auto f : {BoundaryForcing::none(), BoundaryForcing::normal(1.0, TimeProfile::heaviside())}) {
        cplx l(0.4, -0.3);
        auto [NP, NQ] = N_PQ(f, d, M, 1.2, l, 0.0);
        auto pq = initial_transforms(d, 1.2, l);
        EXPECT_LT(std::abs(NP - pq[0]), 1e-14);
        EXPECT_LT(std::abs(NQ - pq[2]), 1e-14);
    }
}

TEST(NPQ, ParityForNormalLoad) {
    auto f = BoundaryForcing::normal(1.0, TimeProfile::heaviside());
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-2, 2);
    for (int i = 0; i < 50; ++i) {
        cplx l(U(rng), U(rng));
        auto [a, b] = N_PQ(f, InitialData{}, M, 1.0, l, 0.7);
        auto [c, d] = N_PQ(f, InitialData{}, M, 1.0, -l, 0.7);
        EXPECT_LT(std::abs(a + c), 1e-12 * std::abs(a));
        EXPECT_LT(std::abs(b - d), 1e-12 * std::abs(b));
    }
}

TEST(NPQ, SubstitutionRelations) {
    auto f = BoundaryForcing::normal(1.0, TimeProfile::heaviside());
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(-2.5, 2.5);
    double k = 0.9, t = 0.6;
    int n = 0;
    while (n < 50) {
        cplx l(U(rng), U(rng));
        try {
            cplx L12 = l_map_12(M, k, l), L21 = l_map_21(M, k, l);
            auto [NP, NQ] = N_PQ(f, InitialData{}, M, k, l, t);
            auto NP12 = N_PQ(f, InitialData{}, M, k, L12, t).first;
            auto NQ21 = N_PQ(f, InitialData{}, M, k, L21, t).second;
            EXPECT_LT(std::abs(NP12 + L12 / k * NQ), 1e-10 * std::abs(NP12));
            EXPECT_LT(std::abs(NQ21 + k / l * NP), 1e-10 * std::abs(NQ21));
            ++n;
        } catch (const BranchPointHit&) {
        }
    }
}

TEST(Profiles, LaplaceTransformsMatchQuadrature) {
    auto sm = TimeProfile::smoothed(0.2);
    auto sa = TimeProfile::sampled(0.1, {0.0, 0.5, 1.0, 0.8});
    for (double p : {1.0, 3.0}) {
        for (auto* X : {&sm, &sa}) {
            cplx want = gl([&](double s) { return std::exp(-p * s) * X->value(s); }, 0, 0.3, 30) +
                        gl([&](double s) { return std::exp(-p * s) * X->value(s); }, 0.3, 40, 400);
            EXPECT_LT(std::abs(X->laplace(p) - want), 1e-10);
        }
    }
}
