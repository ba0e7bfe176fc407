#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <queue>
#include <vector>

#include "batchps/common.hpp"

namespace batchps {

// Gauss(7)/Kronrod(15) abscissae and weights on [-1,1] (symmetric half).
namespace gk15 {
inline constexpr double xgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double wgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};
}  // namespace gk15

template <typename T>
struct QuadPanel {
    double a, b;
    T integral;
    double err;
    double resabs;  // integral of |f|, tracks cancellation severity
};

// One Gauss-Kronrod 15(7) panel.
template <typename T, typename F>
QuadPanel<T> gk15_panel(F&& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    T fc = f(c);
    T kron = gk15::wgk[7] * fc;
    T gauss = gk15::wg[3] * fc;
    double resabs = gk15::wgk[7] * std::abs(fc);
    for (int j = 0; j < 7; ++j) {
        T f1 = f(c - h * gk15::xgk[j]);
        T f2 = f(c + h * gk15::xgk[j]);
        kron += gk15::wgk[j] * (f1 + f2);
        resabs += gk15::wgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) gauss += gk15::wg[j / 2] * (f1 + f2);
    }
    QuadPanel<T> p;
    p.a = a;
    p.b = b;
    p.integral = h * kron;
    p.resabs = h * resabs;
    double diff = std::abs(kron - gauss) * h;
    // QUADPACK-style sharpened estimate for smooth integrands.
    double scale = p.resabs > 0 ? p.resabs : 1.0;
    double r = diff / scale;
    p.err = (r > 0 && r < 1) ? scale * std::pow(200.0 * r, 1.5) : diff;
    if (p.err > diff) p.err = diff;
    p.err = std::max(p.err, 50.0 * 2.3e-16 * p.resabs);
    return p;
}

template <typename T>
struct QuadResult {
    T value{};
    double err = 0.0;
    double resabs = 0.0;
    int panels = 0;
    bool converged = false;
};

// Globally adaptive Gauss-Kronrod on [a,b]; splits the worst panel first.
// Deterministic: ties broken by insertion order.
template <typename T, typename F>
QuadResult<T> adaptive_gk(F&& f, double a, double b, double rel_tol,
                          double abs_tol = 0.0, int max_panels = 400) {
    struct Item {
        double err;
        long seq;
        QuadPanel<T> p;
        bool operator<(const Item& o) const {
            if (err != o.err) return err < o.err;
            return seq > o.seq;
        }
    };
    std::priority_queue<Item> heap;
    long seq = 0;
    QuadPanel<T> first = gk15_panel<T>(f, a, b);
    heap.push({first.err, seq++, first});
    T total = first.integral;
    double errsum = first.err, resabs = first.resabs;
    int n = 1;
    while (n < max_panels) {
        double target = std::max(abs_tol, rel_tol * std::abs(total));
        target = std::max(target, 1e-15 * resabs);
        if (errsum <= target) break;
        Item worst = heap.top();
        heap.pop();
        double mid = 0.5 * (worst.p.a + worst.p.b);
        if (mid <= worst.p.a || mid >= worst.p.b) {
            heap.push(worst);  // interval exhausted at double precision
            break;
        }
        QuadPanel<T> left = gk15_panel<T>(f, worst.p.a, mid);
        QuadPanel<T> right = gk15_panel<T>(f, mid, worst.p.b);
        total += left.integral + right.integral - worst.p.integral;
        errsum += left.err + right.err - worst.err;
        resabs += left.resabs + right.resabs - worst.p.resabs;
        heap.push({left.err, seq++, left});
        heap.push({right.err, seq++, right});
        ++n;
    }
    QuadResult<T> r;
    r.value = total;
    r.err = errsum;
    r.resabs = resabs;
    r.panels = n;
    // same floor as the refinement loop: cancellation-limited integrals count
    // as converged once the error reaches the roundoff scale of sum |f|
    r.converged =
        errsum <= std::max({abs_tol, rel_tol * std::abs(total), 2e-15 * resabs});
    return r;
}

// Integral over t in [0,1] of g(t) where g ~ C (1-t)^beta near t = 1
// (beta >= 0, typically fractional). The terminal panel t in [t_split,1] is
// mapped through 1-t = (1-t_split) tau^{1/(beta+1)}, which turns the
// algebraic endpoint behavior into an O(1) integrand in tau.
template <typename T, typename G>
QuadResult<T> integrate01_endpoint(G&& g, double beta, double rel_tol,
                                   double abs_tol = 0.0, int max_panels = 400) {
    const double t_split = 0.9;
    const double p = 1.0 / (beta + 1.0);
    const double w = 1.0 - t_split;
    auto tail = [&](double tau) -> T {
        double tp = std::pow(tau, p);
        double t = 1.0 - w * tp;
        double jac = w * p * (tp / tau);  // d t / d tau, sign dropped
        return g(t) * jac;
    };
    QuadResult<T> main_part =
        adaptive_gk<T>(g, 0.0, t_split, rel_tol, 0.5 * abs_tol, max_panels / 2);
    double tail_abs =
        std::max(0.5 * abs_tol, 0.25 * rel_tol * std::abs(main_part.value));
    QuadResult<T> tail_part =
        adaptive_gk<T>(tail, 0.0, 1.0, rel_tol, tail_abs, max_panels / 2);
    QuadResult<T> r;
    r.value = main_part.value + tail_part.value;
    r.err = main_part.err + tail_part.err;
    r.resabs = main_part.resabs + tail_part.resabs;
    r.panels = main_part.panels + tail_part.panels;
    r.converged = main_part.converged && tail_part.converged;
    return r;
}

// Fixed (non-adaptive) composite version of the same scheme. Used where the
// result must be a smooth function of auxiliary parameters (finite-difference
// stencils): adaptive splitting toggles would show up as stencil noise.
template <typename T, typename G>
T integrate01_endpoint_fixed(G&& g, double beta, int n_main = 14,
                             int n_tail = 8) {
    const double t_split = 0.9;
    const double p = 1.0 / (beta + 1.0);
    const double w = 1.0 - t_split;
    T total{};
    for (int i = 0; i < n_main; ++i) {
        double a = t_split * i / n_main, b = t_split * (i + 1) / n_main;
        total += gk15_panel<T>(g, a, b).integral;
    }
    auto tail = [&](double tau) -> T {
        double tp = std::pow(tau, p);
        double t = 1.0 - w * tp;
        double jac = w * p * (tp / tau);
        return g(t) * jac;
    };
    for (int i = 0; i < n_tail; ++i) {
        double a = double(i) / n_tail, b = double(i + 1) / n_tail;
        total += gk15_panel<T>(tail, a, b).integral;
    }
    return total;
}

// Independent route: composite 20-point Gauss-Legendre on a mesh graded
// toward t = 1, after the same flattening substitution. Shares no code path
// with the adaptive scheme; used for the fresh-quadrature residual checks.
template <typename T, typename G>
T integrate01_graded_gl(G&& g, double beta, int levels = 24) {
    static constexpr double x20[10] = {
        0.076526521133497333755, 0.227785851141645078080,
        0.373706088715419560673, 0.510867001950827098004,
        0.636053680726515025453, 0.746331906460150792614,
        0.839116971822218823395, 0.912234428251325905868,
        0.963971927277913791268, 0.993128599185094924786};
    static constexpr double w20[10] = {
        0.152753387130725850698, 0.149172986472603746788,
        0.142096109318382051329, 0.131688638449176626898,
        0.118194531961518417312, 0.101930119817240435037,
        0.083276741576704748725, 0.062672048334109063570,
        0.040601429800386941331, 0.017614007139152118312};
    const double p = 1.0 / (beta + 1.0);
    auto h = [&](double tau) -> T {
        double tp = std::pow(tau, p);
        double t = 1.0 - tp;
        double jac = p * (tp / tau);
        return g(t) * jac;
    };
    // mesh on tau in [0,1]: dyadic refinement toward 0 keeps the remaining
    // curvature (from the interior behavior of g) resolved
    std::vector<double> edges;
    edges.push_back(1.0);
    double e = 0.5;
    for (int i = 0; i < levels; ++i) {
        edges.push_back(e);
        e *= 0.5;
    }
    edges.push_back(0.0);
    T total{};
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        double b = edges[i], a = edges[i + 1];
        double c = 0.5 * (a + b), half = 0.5 * (b - a);
        T acc{};
        for (int j = 0; j < 10; ++j) {
            acc += w20[j] * (h(c - half * x20[j]) + h(c + half * x20[j]));
        }
        total += half * acc;
    }
    return total;
}

}  // namespace batchps
