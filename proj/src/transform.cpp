#include "batchps/transform.hpp"

#include <cmath>

#include "batchps/parallel.hpp"
#include "batchps/quadrature.hpp"

namespace batchps {

namespace {

Complex ipow(Complex z, int n) {
    Complex r = 1.0;
    for (int i = 0; i < n; ++i) r *= z;
    return r;
}

}  // namespace

TransformBuilder::TransformBuilder(const ModelParams& params, double s)
    : TransformBuilder(params, s, Options()) {}

TransformBuilder::TransformBuilder(const ModelParams& params, double s,
                                   Options opt)
    : params_(params), opt_(opt), sd_(spectral_data(params, s)) {
    if (opt_.b_levels < 1 || opt_.n_series < 1)
        throw InvalidInput("TransformBuilder: b_levels and n_series must be >= 1");
    int b_solve = std::max(opt_.series_b_max, opt_.b_levels);
    table_ = build_moment_table(sd_, b_solve, 1e-11, opt_.threads);
    bc_ = solve_triangular(params_, table_);
    double frac = opt_.radius_frac;
    if (frac <= 0.0) frac = opt_.n_series > 10 ? 0.9 : 0.6;
    radius_ = frac * sd_.u_minus;
    inner_radius_ = 0.35 * sd_.u_minus;
    levels_.resize(opt_.b_levels);
}

Complex TransformBuilder::series_eval(int b, Complex z) const {
    const auto& c = levels_[b - 1].coeff;
    Complex acc = c.back();
    for (int n = int(c.size()) - 2; n >= 0; --n) acc = acc * z + c[n];
    return acc;
}

Complex TransformBuilder::eval_Eb(int b, Complex z) {
    if (b == 0) return 0.0;
    build_level(b);
    if (std::abs(z) <= inner_radius_) return series_eval(b, z);
    return levels_[b - 1].cheb(z);
}

Complex TransformBuilder::fb_star_quad(int b, Complex u) const {
    const double um = sd_.u_minus;
    const double D = 1.0 + params_.rho + sd_.s;
    const double e_b = bc_.e[b - 1];
    const Complex span = um - u;
    auto integrand = [&](double t) -> Complex {
        Complex z = u + t * span;
        Complex omz = 1.0 - z;
        Complex a = (z + double(b) * omz) / (omz * omz) + (z - b * D) * e_b;
        if (b >= 2) {
            Complex prev = std::abs(z) <= inner_radius_
                               ? series_eval(b - 1, z)
                               : levels_[b - 2].cheb(z);
            a += double(b) * prev;
        }
        return a * kernel_pow(sd_, u, t, double(b)) * ipow(z, b - 1) * span;
    };
    double beta = b * (sd_.c_minus - 1.0);
    // cancellation makes the raw integral as small as |u|^b |P|; an absolute
    // target at that scale keeps the divided-out result accurate without
    // demanding impossible relative accuracy of a near-zero value
    Complex prefactor = ipow(u, b) * char_poly(sd_, u);
    double abs_tol = opt_.quad_rel_tol * std::abs(prefactor) * 10.0;
    auto r = integrate01_endpoint<Complex>(integrand, beta, opt_.quad_rel_tol,
                                           abs_tol);
    if (!r.converged)
        throw ComputeError("fb_star quadrature did not converge at b=" +
                           std::to_string(b) + "; achieved abs err " +
                           std::to_string(r.err));
    return r.value / prefactor;
}

void TransformBuilder::build_level(int b) {
    if (b < 1 || b > opt_.b_levels)
        throw InvalidInput("transform level out of configured range: b=" +
                           std::to_string(b));
    Level& lv = levels_[b - 1];
    if (lv.built) return;
    if (b >= 2) build_level(b - 1);

    const double q = params_.q;
    const double e_b = bc_.e[b - 1];
    const int M = 4 * (opt_.n_series + 1);

    // E_b*(s,.) on the extraction circle
    std::vector<Complex> vals(M);
    parallel_for(M, opt_.threads, [&](std::size_t j) {
        double th = 2.0 * M_PI * double(j) / M;
        Complex u = radius_ * Complex(std::cos(th), std::sin(th));
        vals[j] = e_b + (u - q) * fb_star_quad(b, u);
    });

    double scale = 1.0;
    for (const Complex& v : vals) scale = std::max(scale, std::abs(v));

    // Taylor coefficients about 0 by the circle average; imaginary parts must
    // cancel (real coefficients), anything else means a branch/path error.
    lv.coeff.resize(opt_.n_series + 1);
    double im_worst = 0.0;
    double rn = 1.0;
    for (int n = 0; n <= opt_.n_series; ++n) {
        Complex acc = 0.0;
        for (int j = 0; j < M; ++j) {
            double ang = -2.0 * M_PI * double(j) * double(n) / M;
            acc += vals[j] * Complex(std::cos(ang), std::sin(ang));
        }
        acc /= double(M);
        im_worst = std::max(im_worst, std::abs(acc.imag()));
        lv.coeff[n] = acc.real() / rn;
        rn *= radius_;
    }
    lv.im_residue = im_worst / scale;
    if (lv.im_residue > 1e-9)
        throw ComputeError(
            "extraction imaginary residue " + std::to_string(lv.im_residue) +
            " at b=" + std::to_string(b) + " signals a branch/path error");

    // real-interval interpolant; small-u nodes read the fresh series, the
    // rest use the quadrature route
    lv.cheb = Cheb::fit(0.0, 0.995 * sd_.u_minus, opt_.cheb_degree,
                        [](double) { return 0.0; });
    const auto& nodes = lv.cheb.nodes();
    std::vector<double> node_vals(nodes.size());
    parallel_for(nodes.size(), opt_.threads, [&](std::size_t j) {
        double x = nodes[j];
        if (x <= inner_radius_)
            node_vals[j] = series_eval(b, Complex(x, 0.0)).real();
        else
            node_vals[j] = e_b + (x - q) * fb_star_quad(b, Complex(x, 0.0)).real();
    });
    for (std::size_t j = 0; j < nodes.size(); ++j)
        lv.cheb.set_value(int(j), node_vals[j]);
    lv.built = true;
}

Complex TransformBuilder::fb_star(int b, Complex u) {
    if (b < 1) throw InvalidInput("fb_star requires b >= 1");
    double au = std::abs(u);
    if (au < opt_.u_floor_frac * sd_.u_minus)
        throw InvalidInput(
            "fb_star: |u| below the evaluation floor; the 1/u^b prefactor "
            "amplifies quadrature noise there (use coefficient extraction)");
    if (au >= sd_.u_minus)
        throw InvalidInput("fb_star requires |u| < U^-(s)");
    if (b >= 2) build_level(b - 1);
    return fb_star_quad(b, u);
}

Complex TransformBuilder::eb_star(int b, Complex u) {
    return bc_.e[b - 1] + (u - params_.q) * fb_star(b, u);
}

std::vector<double> TransformBuilder::extract_coefficients(int b, int n_max) {
    if (n_max < 0) throw InvalidInput("n_max must be >= 0");
    if (n_max > opt_.n_series)
        throw InvalidInput("n_max exceeds the configured series length");
    build_level(b);
    const auto& c = levels_[b - 1].coeff;
    return std::vector<double>(c.begin(), c.begin() + n_max + 1);
}

double TransformBuilder::extraction_im_residue(int b) {
    build_level(b);
    return levels_[b - 1].im_residue;
}

ConditionalTransform TransformBuilder::conditional_transform(int n_max,
                                                             int b_max) {
    if (b_max > opt_.b_levels)
        throw InvalidInput("b_max exceeds configured levels");
    ConditionalTransform ct;
    ct.s = sd_.s;
    ct.n_max = n_max;
    ct.b_max = b_max;
    ct.extraction_radius = radius_;
    ct.grid.assign(n_max + 1, std::vector<double>(b_max));
    for (int b = 1; b <= b_max; ++b) {
        auto c = extract_coefficients(b, n_max);
        for (int n = 0; n <= n_max; ++n) ct.grid[n][b - 1] = c[n];
    }
    return ct;
}

Complex TransformBuilder::f_star(double u, Complex v) {
    if (!(u > 0.0) || !(u < sd_.u_minus))
        throw InvalidInput("f_star requires real u in (0, U^-(s))");
    if (std::abs(v) >= 0.95 * u)
        throw InvalidInput(
            "f_star integral representation requires |v| < u; the rational "
            "factor 1 - v/u + (v/u) R develops a zero on the path otherwise");
    const double um = sd_.u_minus;
    const double span = um - u;
    const Complex w = v / u;
    // along the characteristic through (u, w) the second coordinate moves as
    // w(z) = w R / (1 - w + w R); the solution integrates (1-w(z)) L(z, z w(z))
    // over the path, and the defining prefactor P (1-w) cancels one factor
    auto integrand = [&](double t) -> Complex {
        double z = u + t * span;
        double R = kernel_pow(sd_, u, t, 1.0);
        Complex denom = 1.0 - w + w * R;
        Complex arg = z * w * R / denom;
        return eval_L(bc_, z, arg) / (denom * z) * span;
    };
    Complex val = integrate01_endpoint_fixed<Complex>(
        integrand, sd_.c_minus - 1.0, 14, 8);
    return val / char_poly(sd_, Complex(u, 0.0));
}

TransformBuilder::PdeResiduals TransformBuilder::pde_residual(int n_points,
                                                              double h) {
    const double um = sd_.u_minus;
    const double q = params_.q, rho = params_.rho;
    const double D = sd_.s + 1.0 + rho;
    int k = std::max(2, int(std::lround(std::sqrt(double(n_points)))));

    auto cheb_pts = [&](double lo, double hi, std::vector<double>& out) {
        out.resize(k);
        for (int i = 0; i < k; ++i)
            out[i] = 0.5 * (lo + hi) +
                     0.5 * (hi - lo) * std::cos((2.0 * i + 1.0) * M_PI / (2.0 * k));
    };
    std::vector<double> us;
    cheb_pts(0.30 * um, 0.85 * um, us);

    auto d4 = [&](auto&& f, double x) {
        return (-f(x + 2 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2 * h)) /
               (12.0 * h);
    };

    PdeResiduals out;
    for (double u : us) {
        double P = char_poly(sd_, Complex(u, 0.0)).real();
        // the integral representation of F* holds for |v| < u; sample v
        // inside that wedge with margins for the stencil
        std::vector<double> vs;
        double v_lim = 0.8 * (u - 2.0 * h) - 2.0 * h;
        cheb_pts(-v_lim, v_lim, vs);
        // transported variables w = v/u cover most of the unit disk
        std::vector<double> ws;
        cheb_pts(-0.7, 0.7, ws);
        for (int j = 0; j < k; ++j) {
            double v = vs[j];
            // first-order PDE on F*
            double F = f_star(u, v).real();
            double Fu = d4([&](double x) { return f_star(x, v).real(); }, u);
            double Fv = d4([&](double y) { return f_star(u, y).real(); }, v);
            double L = eval_L(bc_, u, v).real();
            double res = u * P * Fu +
                         v * ((u - q) * (v - D) + rho * (1.0 - q)) * Fv +
                         (u * (u - D) + (u - q) * (u + v)) * F + L;
            out.first_order =
                std::max(out.first_order, std::abs(res) / std::max(1.0, std::abs(L)));

            // transported form on Phi(u,w) = P(s,u)(1-w) F*(s,u,uw)
            double w = ws[j];
            auto phi = [&](double x, double y) {
                double Px = char_poly(sd_, Complex(x, 0.0)).real();
                return Px * (1.0 - y) * f_star(x, x * y).real();
            };
            double Phu = d4([&](double x) { return phi(x, w); }, u);
            double Phv = d4([&](double y) { return phi(u, y); }, w);
            double ell = (1.0 - w) * eval_L(bc_, u, u * w).real() / u;
            double res2 = Phu - ((u - q) / P) * w * (1.0 - w) * Phv + ell;
            out.transported =
                std::max(out.transported, std::abs(res2) / std::max(1.0, std::abs(ell)));
        }
    }
    return out;
}

}  // namespace batchps
