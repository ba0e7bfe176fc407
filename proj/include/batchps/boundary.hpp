#pragma once

#include <vector>

#include "batchps/kernels.hpp"

namespace batchps {

// Boundary coefficients e[b-1] = E_b*(s,q), b = 1..B_max, solved from the
// triangular moment system. Each is a geometric mixture of conditional
// survival transforms, hence 0 < E_b*(s,q) < 1/(s(1-q)).
struct BoundaryCoefficients {
    double s = 0.0;
    double rho = 0.0, q = 0.0;
    std::vector<double> e;
    std::vector<double> series_coeff;  // e[b-1]/b!, cached for the entire series
    std::vector<double> residual;      // filled by cnc0_residual
    // Forward substitution conditioning grows roughly like 4^b (alternating
    // binomial rows), so each coefficient carries an absolute error estimate:
    // row-scale/diagonal times the quadrature accuracy. Downstream use divides
    // by b!, which buries the loss, but raw coefficients near B_max are only
    // as good as this estimate says.
    std::vector<double> e_err;

    int b_max() const { return int(e.size()); }
};

// Forward substitution over b of
//   sum_{l=1}^b (-1)^l C(b,l) Q_{b,l}(s) E_l*(s,q) = K_b(s),
//   Q_{b,l}(s) = (l+1-b) M_{b,l}(s) - l (s+1+rho) M_{b,l-1}(s).
// Aborts on a near-singular diagonal rather than regularizing.
BoundaryCoefficients solve_triangular(const ModelParams& params,
                                      const MomentTable& table);

// Boundary generating function E*(s,q,v) = sum_b E_b*(s,q) v^b and its
// v-derivative, truncated at B_max. The coefficients tend to 1/(s(1-q)), so
// the radius of convergence is 1; every pipeline use keeps |v| well below
// U^-(s) < 1 and the guard throws if the truncation tail at this v is no
// longer negligible against the partial sum.
Complex boundary_series(const BoundaryCoefficients& bc, Complex v);
Complex boundary_series_dv(const BoundaryCoefficients& bc, Complex v);

// L(s,u,v) = v(1-uv)/((1-u)^2(1-v)^2) + (u+v) E*(s,q,v)
//          + v (v-s-1-rho) dE*/dv(s,q,v)
Complex eval_L(const BoundaryCoefficients& bc, Complex u, Complex v);

// Residual of the analyticity condition, order by order in v up to B_max,
// each normalized by the magnitude of its row. Recomputes every moment
// integral with the independent quadrature route; never touches the cached
// table the solve used.
std::vector<double> cnc0_residual(const ModelParams& params,
                                  const BoundaryCoefficients& bc);

}  // namespace batchps
