#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace lamb {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};
inline constexpr double pi = 3.14159265358979323846;

// error taxonomy; every failure mode the modules can raise
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BranchPointHit : Error { using Error::Error; };
struct ZeroArgument : Error { using Error::Error; };
struct RootSearchIncomplete : Error { using Error::Error; };
struct GridTooCoarse : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct CertificateViolation : Error { using Error::Error; };
struct DeterminantNearZero : Error { using Error::Error; };
struct StepUnstable : Error { using Error::Error; };
struct RayleighPole : Error { using Error::Error; };
struct CflViolation : Error { using Error::Error; };
struct DomainTooSmall : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct ToleranceNotMet : Error {
    double estimate;
    ToleranceNotMet(const std::string& what, double est) : Error(what), estimate(est) {}
};

struct Material {
    double lambda = 2.0;
    double mu = 1.0;

    double cp() const { return std::sqrt(lambda + 2.0 * mu); }
    double cs() const { return std::sqrt(mu); }

    void validate() const {
        if (!(mu > 0.0)) throw DomainError("material: mu must be > 0");
        if (!(lambda + 2.0 * mu > 0.0)) throw DomainError("material: lambda + 2 mu must be > 0");
        if (!(cp() > cs())) throw DomainError("material: need cp > cs (lambda + mu > 0)");
    }
};

// sin(z)/z, stable near 0
inline cplx sinc(cplx z) {
    if (std::abs(z) < 1e-4) {
        cplx z2 = z * z;
        return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
    }
    return std::sin(z) / z;
}

inline double sq(double x) { return x * x; }

} // namespace lamb
