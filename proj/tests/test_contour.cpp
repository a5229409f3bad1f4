#include <gtest/gtest.h>

#include "lamb/contour.hpp"

using namespace lamb;

namespace {

const Material M{2.0, 1.0};

ContourPath path_k(double k, double clearance = 0.25, double L = 20.0) {
    GammaOptions o;
    o.clearance = clearance;
    o.L = L;
    return build_gamma_k(M, k, o);
}

// brute force: distance from z to the path sampled densely
double sampled_distance(const ContourPath& p, cplx z) {
    double d = 1e300;
    for (auto& [a, b] : p.segments) {
        int n = 20000;
        for (int i = 0; i <= n; ++i) d = std::min(d, std::abs(a + (b - a) * (double(i) / n) - z));
    }
    return d;
}

} // namespace

TEST(GammaK, StartsAndEndsOnTheRealAxis) {
    auto p = path_k(1.0);
    EXPECT_EQ(p.segments.front().first, cplx(-20.0));
    EXPECT_EQ(p.segments.back().second, cplx(20.0));
    for (size_t i = 1; i < p.segments.size(); ++i) EXPECT_EQ(p.segments[i].first, p.segments[i - 1].second);
    for (auto& [a, b] : p.segments) EXPECT_GE(std::min(a.imag(), b.imag()), 0.0);
}

TEST(GammaK, CertificateDistancesRecomputed) {
    for (double k : {1.0, -0.7, 2.5}) {
        auto p = path_k(k);
        for (auto& e : p.certificate) {
            double d = sampled_distance(p, e.z);
            EXPECT_NEAR(e.distance, d, 2e-3 * std::max(1.0, std::abs(k))) << exclusion_name(e.kind);
            if (e.must_clear && e.z.imag() >= 0) {
                EXPECT_GE(d, p.clearance * (1 - 1e-3));
                EXPECT_LT(e.z.imag(), p.height_at(e.z.real()));
            }
        }
    }
}

TEST(GammaK, TopClearsHighestSingularity) {
    auto p = path_k(1.0);
    double top = 0;
    for (auto& e : p.certificate)
        if (e.must_clear) top = std::max(top, e.z.imag());
    double h = 0;
    for (auto& [a, b] : p.segments) h = std::max(h, std::max(a.imag(), b.imag()));
    EXPECT_GE(h, top + 0.25 - 1e-12);
}

TEST(GammaK, ClearsMapBranchPoints) {
    auto p = path_k(1.0);
    std::vector<cplx> want = {cplx(std::sqrt(3.0)), cplx(-std::sqrt(3.0)), cplx(0, std::sqrt(0.75))};
    for (auto w : want) {
        bool found = false;
        for (auto& e : p.certificate)
            if (std::abs(e.z - w) < 1e-12) found = true;
        EXPECT_TRUE(found) << w;
        EXPECT_GE(p.distance_to(w), 0.25 - 1e-12);
        EXPECT_GT(p.height_at(w.real()), w.imag());
    }
}

TEST(GammaK, ScalesWithK) {
    auto a = path_k(1.0, 0.25, 20.0), b = path_k(2.0, 0.25, 40.0);
    ASSERT_EQ(a.certificate.size(), b.certificate.size());
    for (size_t i = 0; i < a.certificate.size(); ++i) EXPECT_LT(std::abs(2.0 * a.certificate[i].z - b.certificate[i].z), 1e-9);
    ASSERT_EQ(a.segments.size(), b.segments.size());
    for (size_t i = 0; i < a.segments.size(); ++i) {
        EXPECT_LT(std::abs(2.0 * a.segments[i].first - b.segments[i].first), 1e-9);
        EXPECT_LT(std::abs(2.0 * a.segments[i].second - b.segments[i].second), 1e-9);
    }
}

TEST(GammaK, ZeroWavenumberRejected) { EXPECT_THROW(path_k(0.0), DomainError); }

TEST(GammaK2, DipsBelowPoleAndCut) {
    auto p = build_gamma_k2(1.5, {});
    for (cplx z : {cplx(0), cplx(0, 1.5), cplx(0, -1.5)}) {
        EXPECT_GT(z.imag(), p.lowest_at(z.real()));
        EXPECT_NEAR(p.distance_to(z), sampled_distance(p, z), 1e-2);
    }
    EXPECT_THROW(build_gamma_k2(0.0, {}), DomainError);
}

TEST(IntegratePath, ZeroIntegrand) {
    auto r = integrate_path([](cplx) { return cplx(0); }, path_k(1.0), 1e-10);
    EXPECT_EQ(r.value, cplx(0));
    EXPECT_EQ(r.error_estimate, 0.0);
}

TEST(IntegratePath, ResidueTheorem) {
    auto p = path_k(1.0);
    double L = p.L;
    // close below with the rectangle L -> L - iL -> -L - iL -> -L: clockwise around z0
    std::vector<std::pair<cplx, cplx>> back = {{cplx(L), cplx(L, -L)}, {cplx(L, -L), cplx(-L, -L)}, {cplx(-L, -L), cplx(-L)}};
    QuadOptions o;
    o.rel_tol = 1e-12;
    for (cplx z0 : {cplx(0.1, 0.2), cplx(0.5, -0.3), cplx(-0.1, 1.0)}) {
        auto f = [&](cplx l) { return 1.0 / (l - z0); };
        cplx s = integrate_path(f, p, 1e-12).value + integrate_polyline(f, back, o).value;
        EXPECT_LT(std::abs(s + 2.0 * pi * I), 1e-9) << z0;
    }
}

TEST(IntegrateRealLine, Gaussian) {
    auto r = integrate_real_line([](cplx l) { return std::exp(-l * l); }, 10.0, 1e-8, {DecayModel::Gaussian, 1.0});
    EXPECT_LT(std::abs(r.value - std::sqrt(pi)), 1e-8);
    EXPECT_GE(r.error_estimate, 0.0);
    EXPECT_LT(r.truncation_bound, 1e-40);
}

TEST(IntegrateRealLine, EvenIntegrandIsTwiceHalfLine) {
    auto f = [](cplx l) { return 1.0 / (1.0 + l * l * l * l); };
    auto full = integrate_real_line(f, 30.0, 1e-10, {DecayModel::Power, 4.0});
    QuadOptions o;
    o.rel_tol = 1e-10;
    auto half = integrate_polyline(f, {{cplx(0), cplx(30)}}, o);
    EXPECT_LT(std::abs(full.value - 2.0 * half.value), 1e-9);
    // tail beyond 30 is ~ 2/(3 30^3)
    EXPECT_GT(full.truncation_bound, 2.0 / (3 * 27000.0) * 0.5);
    EXPECT_LT(std::abs(full.value - pi / std::sqrt(2.0)), 2 * full.truncation_bound + 1e-9);
}

TEST(IntegratePath, Deterministic) {
    auto f = [](cplx l) { return std::exp(I * 3.0 * l) / (1.0 + l * l * l * l); };
    auto a = integrate_path(f, path_k(1.0), 1e-10), b = integrate_path(f, path_k(1.0), 1e-10);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.panels_used, b.panels_used);
    EXPECT_EQ(a.error_estimate, b.error_estimate);
}
