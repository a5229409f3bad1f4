#pragma once

#include <array>
#include <vector>

#include "common.hpp"

namespace lamb {

namespace detail {
// Weideman's rational expansion of the Faddeeva function, upper half plane
template <int N>
struct Weideman {
    std::array<double, N> a{};
    double L;
    Weideman() {
        const int M = 2 * N, M2 = 2 * M;
        L = std::sqrt(N / std::sqrt(2.0));
        std::vector<double> f(M2, 0.0);
        for (int k = -M + 1; k <= M - 1; ++k) {
            double th = k * pi / M, t = L * std::tan(th / 2);
            f[k + M] = std::exp(-t * t) * (L * L + t * t);  // f[0] = 0 pad
        }
        std::vector<double> fs(M2);
        for (int i = 0; i < M2; ++i) fs[i] = f[(i + M) % M2];
        for (int n = 1; n <= N; ++n) {
            double re = 0.0;
            for (int j = 0; j < M2; ++j) re += fs[j] * std::cos(2 * pi * double(j) * n / M2);
            a[N - n] = re / M2;
        }
    }
};
} // namespace detail

// w(z) = exp(-z^2) erfc(-iz)
inline cplx faddeeva(cplx z) {
    static const detail::Weideman<40> W;
    if (z.imag() < 0) return 2.0 * std::exp(-z * z) - faddeeva(-z);
    cplx d = W.L - I * z;
    cplx Z = (W.L + I * z) / d;
    cplx p = 0.0;
    for (double c : W.a) p = p * Z + c;
    return 2.0 * p / (d * d) + (1.0 / std::sqrt(pi)) / d;
}

inline cplx erfc_complex(cplx z) { return std::exp(-z * z) * faddeeva(I * z); }

} // namespace lamb
