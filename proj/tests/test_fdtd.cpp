#include <gtest/gtest.h>

#include "lamb/fdtd.hpp"

using namespace lamb;

namespace {

const Material M{2.0, 1.0};

// right-going P pulse u = f(x - cp t), constant in y, sampled on a fine grid
InitialData plane_pulse(double X, double Y) {
    InitialData d;
    d.kind = InitialData::Sampled;
    d.x0 = -X;
    d.dx = 1.0 / 128;
    d.nx = static_cast<int>(std::lround(2 * X / d.dx)) + 1;
    d.y0 = 0;
    d.dy = 1.0 / 128;
    d.ny = static_cast<int>(std::lround(Y / d.dy)) + 1;
    for (auto& f : d.fields) f.assign(size_t(d.nx) * d.ny, 0.0);
    double w = 0.1;
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i) {
            double x = d.x0 + i * d.dx, g = std::exp(-x * x / (2 * w * w));
            d.fields[0][size_t(j) * d.nx + i] = g;
            d.fields[1][size_t(j) * d.nx + i] = M.cp() * x / (w * w) * g;
        }
    return d;
}

double pulse(double t) { return t < 0.2 ? sq(std::sin(pi * t / 0.2)) : 0.0; }

} // namespace

TEST(Fdtd, ZeroStaysZero) {
    FdtdConfig c;
    c.h = 1.0 / 16;
    c.X = c.Y = 2;
    auto s = fdtd_init(c, M, BoundaryForcing::none(), InitialData{});
    for (int n = 0; n < 50; ++n) step(s, c, M, BoundaryForcing::none());
    for (double x : s.u) EXPECT_EQ(x, 0.0);
    for (double x : s.v) EXPECT_EQ(x, 0.0);
    auto g = run(c, M, BoundaryForcing::none(), InitialData{}, {0.0}, {0.5}, {0.5});
    EXPECT_EQ(g.u[0], 0.0);
}

TEST(Fdtd, PlaneWaveSpeed) {
    FdtdConfig c;
    c.X = 2;
    c.Y = 4;
    c.h = 1.0 / 64;
    c.periodic_x = true;
    c.check_domain = false;
    auto s = fdtd_init(c, M, BoundaryForcing::none(), plane_pulse(2, 4));
    for (int n = 0; n < 100; ++n) step(s, c, M, BoundaryForcing::none());
    // away from the bottom sponge and the surface; peak by parabolic refinement
    int j = static_cast<int>(1.5 / c.h), bi = 0;
    double best = -1;
    for (int i = 0; i < s.Nx; ++i)
        if (s.u[s.at(i, j)] > best) {
            best = s.u[s.at(i, j)];
            bi = i;
        }
    double a = s.u[s.at(bi - 1, j)], b = s.u[s.at(bi, j)], cc = s.u[s.at(bi + 1, j)];
    double x = -c.X + (bi + 0.5 * (a - cc) / (a - 2 * b + cc)) * c.h;
    EXPECT_NEAR(x / s.t, M.cp(), 0.01 * M.cp());
}

TEST(Fdtd, EnergyNeverIncreases) {
    FdtdConfig c;
    c.X = c.Y = 2;
    c.h = 1.0 / 32;
    c.layer = 0.7;
    c.check_domain = false;
    InitialData d;
    d.kind = InitialData::Gaussian;
    d.bumps = {{0, 1.0, 0.0, 1.0, 0.1}, {2, 0.5, 0.2, 0.8, 0.1}};
    auto s = fdtd_init(c, M, BoundaryForcing::none(), d);
    double e0 = energy(s, c, M), prev = e0;
    for (int n = 0; n < 600; ++n) {
        step(s, c, M, BoundaryForcing::none());
        double e = energy(s, c, M);
        EXPECT_LE(e, prev * (1 + 1e-12)) << n;
        prev = e;
    }
    EXPECT_LT(prev, 0.5 * e0);  // the sponge removes the outgoing waves
    // no sponge: conserved to rounding
    c.sigma_max = 1e-300;
    auto u = fdtd_init(c, M, BoundaryForcing::none(), d);
    double f0 = energy(u, c, M);
    for (int n = 0; n < 300; ++n) step(u, c, M, BoundaryForcing::none());
    EXPECT_LT(std::abs(energy(u, c, M) / f0 - 1), 1e-10);
}

TEST(Fdtd, SecondOrderConvergence) {
    auto f = BoundaryForcing::normal(1.0, TimeProfile::smoothed(0.2), 0.3);
    std::vector<double> xs = {-0.3, 0.0, 0.4}, ys = {0.25, 0.5}, ts = {0.5};
    std::vector<FieldGrid> g;
    for (double h : {1.0 / 32, 1.0 / 64, 1.0 / 128}) {
        FdtdConfig c;
        c.X = c.Y = 3.2;  // keeps sponge reflections out of the coarse run
        c.layer = 0.8;
        c.h = h;
        g.push_back(run(c, M, f, {}, xs, ys, ts));
    }
    double e1 = relative_l2(g[0], g[1]), e2 = relative_l2(g[1], g[2]);
    double order = std::log2(e1 / e2);
    EXPECT_GT(order, 1.5);
    EXPECT_LT(order, 2.5);
}

TEST(Fdtd, Reciprocity) {
    // u_y at B from an x-force at A equals u_x at A from a y-force at B
    FdtdConfig c;
    c.X = 2;
    c.Y = 3;
    c.h = 1.0 / 64;
    c.periodic_x = true;
    c.check_domain = false;
    double ax = -0.25, ay = 0.8, bx = 0.3, by = 1.1, T = 0.6;
    auto response = [&](double sx, double sy, int sdir, double rx, double ry, int rdir) {
        FdtdConfig cc = c;
        cc.sources = {{sx, sy, 0.05, sdir, pulse}};
        auto s = fdtd_init(cc, M, BoundaryForcing::none(), InitialData{});
        while (s.t < T - 1e-12) step(s, cc, M, BoundaryForcing::none());
        double u, v;
        fdtd_sample(s, cc, rx, ry, u, v);
        return rdir == 0 ? u : v;
    };
    double ab = response(ax, ay, 0, bx, by, 1), ba = response(bx, by, 1, ax, ay, 0);
    ASSERT_GT(std::abs(ab), 1e-6);
    EXPECT_LT(std::abs(ab - ba), 0.02 * std::abs(ab)) << ab << " " << ba;
}

TEST(Fdtd, SurfaceTractionCarriesTheData) {
    FdtdConfig c;
    c.X = c.Y = 1.5;
    c.h = 1.0 / 32;
    c.layer = 0.5;
    auto f = BoundaryForcing::tangential(1.0, TimeProfile::smoothed(0.2), 0.15);
    auto s = fdtd_init(c, M, f, InitialData{});
    detail::FdtdWork w;
    double t = 0.13;
    detail::accel(c, M, f, s, s.u, s.v, t, w);
    for (int i = 0; i <= s.Nx; ++i) {
        double x = -c.X + i * c.h;
        EXPECT_LT(std::abs(w.kxy[s.at(i, 0)] - M.mu * f.g_physical(1, x, t, M)), 1e-10);
    }
}

TEST(Fdtd, Preconditions) {
    FdtdConfig c;
    c.h = 1.0 / 32;
    EXPECT_THROW(validate(c, M, BoundaryForcing::normal(1.0, TimeProfile::smoothed(0.05))), DomainError);
    EXPECT_THROW(validate(c, M, BoundaryForcing::normal(1.0, TimeProfile::heaviside(), 0.2)), DomainError);
    EXPECT_THROW(validate(c, M, BoundaryForcing::normal(1.0, TimeProfile::smoothed(0.05), 0.1)), GridTooCoarse);
    c.dt = c.h;
    EXPECT_THROW(validate(c, M, BoundaryForcing::none()), CflViolation);
    FdtdConfig small;
    small.X = small.Y = 1.5;
    small.h = 1.0 / 64;
    EXPECT_THROW(run(small, M, BoundaryForcing::normal(1.0, TimeProfile::smoothed(0.05), 0.1), {}, {0.0}, {0.5}, {1.0}),
                 DomainTooSmall);
}
