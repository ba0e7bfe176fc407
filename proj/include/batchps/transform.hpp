#pragma once

#include <memory>
#include <vector>

#include "batchps/boundary.hpp"
#include "batchps/cheb.hpp"

namespace batchps {

// Grid of conditional survival transforms E*_{n,b}(s), the input to Laplace
// inversion.
struct ConditionalTransform {
    double s = 0.0;
    int n_max = 0, b_max = 0;
    std::vector<std::vector<double>> grid;  // grid[n][b-1]
    double extraction_radius = 0.0;
};

// Builds the conditional transforms for one s by the level recursion:
//   F_b*(s,u) = 1/(u^b P(s,u)) * int_u^{U^-} [ (z+b(1-z))/(1-z)^2
//               + b E_{b-1}*(s,z) + (z - b(1+rho+s)) E_b*(s,q) ]
//               R(s,u;z)^b z^{b-1} dz
//   E_b*(s,u) = E_b*(s,q) + (u-q) F_b*(s,u)
// Each level keeps (a) a power series around 0 obtained by extracting Taylor
// coefficients on a circle, and (b) a Chebyshev interpolant on the real
// working interval. The next level's quadratures read E_{b-1}* through these
// instead of nesting quadratures, which would be exponential in b.
class TransformBuilder {
public:
    struct Options {
        int b_levels = 12;          // highest level that may be requested
        int n_series = 32;          // extracted coefficients per level
        int series_b_max = 20;      // truncation of the boundary series for L
        int cheb_degree = 64;
        double quad_rel_tol = 1e-12;
        double radius_frac = 0.0;   // 0: policy (0.6, or 0.9 when n_series > 10)
        double u_floor_frac = 0.05; // fb_star rejects |u| below this * U^-
        unsigned threads = 1;
    };

    TransformBuilder(const ModelParams& params, double s);
    TransformBuilder(const ModelParams& params, double s, Options opt);

    const ModelParams& params() const { return params_; }
    const SpectralData& spectral() const { return sd_; }
    const BoundaryCoefficients& boundary() const { return bc_; }
    double extraction_radius() const { return radius_; }

    // Quadrature route; throws InvalidInput when |u| < u_floor * U^- (the
    // 1/u^b prefactor amplifies quadrature noise there; the series route
    // carries the small-u information instead).
    Complex fb_star(int b, Complex u);
    Complex eb_star(int b, Complex u);

    // E*_{n,b}(s) for n = 0..n_max from the cached circle extraction.
    std::vector<double> extract_coefficients(int b, int n_max);
    double extraction_im_residue(int b);

    ConditionalTransform conditional_transform(int n_max, int b_max);

    // Evaluate E_b*(s,z) anywhere in the working hull (series near 0,
    // interpolant elsewhere). Used by the level recursion and by tests.
    Complex eval_Eb(int b, Complex z);

    // Bivariate characteristic-curve representation: with w = v/u,
    //   F*(s,u,v) = 1/P(s,u) int_u^{U^-} L(s,z, z w R/(1-w+wR))
    //               / (1-w+wR) dz/z,   R = R(s,u;z),
    // the conserved combination along characteristics being w/(1-w) R^{-1}.
    // Valid for |v| < u (the rational factor develops a path zero beyond);
    // evaluated with a fixed composite rule so finite differences in (u,v)
    // see a smooth function. Vanishes identically at v = 0. Its v-expansion
    // coefficients are the per-level functions F_b*(s,u).
    Complex f_star(double u, Complex v);

    // Max relative residuals of the two first-order PDEs, by fourth-order
    // central differences at a Chebyshev-placed sample of interior points.
    struct PdeResiduals {
        double first_order = 0.0;  // on F*(s,u,v) directly
        double transported = 0.0;  // on P(s,u)(1-v) F*(s,u,uv)
    };
    PdeResiduals pde_residual(int n_points = 25, double h = 1e-3);

private:
    struct Level {
        bool built = false;
        std::vector<double> coeff;  // E*_{n,b}, n = 0..n_series
        Cheb cheb;                  // E_b*(s,.) on [0, 0.995 U^-]
        double im_residue = 0.0;
        double quad_err = 0.0;
    };

    void build_level(int b);
    Complex fb_star_quad(int b, Complex u) const;  // no floor check
    Complex series_eval(int b, Complex z) const;

    ModelParams params_;
    Options opt_;
    SpectralData sd_;
    MomentTable table_;
    BoundaryCoefficients bc_;
    double radius_;
    double inner_radius_;  // series/quadrature handover
    std::vector<Level> levels_;
};

}  // namespace batchps
