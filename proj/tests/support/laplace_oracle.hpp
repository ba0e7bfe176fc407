#pragma once

// Test-only oracle: direct truncated solve of the transform recursion
//   (s+rho+1) E*_{n,b} = 1 + b/(n+b) E*_{n,b-1} + n/(n+b) E*_{n-1,b}
//                        + rho sum_m q_m E*_{n+m,b}
// by Gauss-Seidel sweeps (contraction factor rho/(s+rho+1)). Independent of
// the analytic pipeline; shares nothing with the kernel/quadrature path.

#include <cmath>
#include <vector>

#include "batchps/model.hpp"

namespace batchps::testsupport {

struct LaplaceGrid {
    int N = 0, B = 0;
    double s = 0.0;
    std::vector<std::vector<double>> e;  // e[b][n], b = 0..B (b=0 all zero)

    double value(int n, int b) const { return e[b][n]; }

    double geometric_mix(int b, double q) const {
        double acc = 0.0, w = 1.0;
        for (int n = 0; n <= N; ++n, w *= q) acc += e[b][n] * w;
        return acc;
    }
};

inline LaplaceGrid solve_transforms(double rho, const BatchDistribution& dist,
                                    double s, int N, int B) {
    LaplaceGrid g;
    g.N = N;
    g.B = B;
    g.s = s;
    g.e.assign(B + 1, std::vector<double>(N + 1, 0.0));
    const double denom = s + rho + 1.0;
    const bool geo = dist.kind == BatchDistribution::Kind::Geometric;
    std::vector<double> S(N + 1);
    for (int b = 1; b <= B; ++b) {
        auto& E = g.e[b];
        const auto& Ep = g.e[b - 1];
        std::fill(E.begin(), E.end(), 1.0 / s);
        for (int iter = 0; iter < 2000; ++iter) {
            if (geo) {
                const double q = dist.q;
                double s_next = E[N];  // tail rows copied from the last one
                for (int n = N - 1; n >= 0; --n) {
                    S[n] = (1.0 - q) * E[n + 1] + q * s_next;
                    s_next = S[n];
                }
                S[N] = E[N];
            } else {
                for (int n = 0; n <= N; ++n) {
                    double acc = 0.0;
                    for (std::size_t m = 1; m <= dist.pmf.size(); ++m)
                        acc += dist.pmf[m - 1] * E[std::min<int>(N, n + int(m))];
                    S[n] = acc;
                }
            }
            double delta = 0.0;
            for (int n = 0; n <= N; ++n) {
                double nb = double(n + b);
                double v = 1.0 + (b / nb) * Ep[n] + rho * S[n];
                if (n >= 1) v += (n / nb) * E[n - 1];
                v /= denom;
                delta = std::max(delta, std::abs(v - E[n]));
                E[n] = v;
            }
            if (delta < 1e-14) break;
        }
    }
    return g;
}

}  // namespace batchps::testsupport
