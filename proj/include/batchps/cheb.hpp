#pragma once

#include <vector>

#include "batchps/common.hpp"

namespace batchps {

// Chebyshev-Lobatto interpolant of a real-valued function on [lo,hi],
// evaluated barycentrically. Evaluation at complex points inside the
// surrounding Bernstein ellipse inherits the interpolant's accuracy, which is
// how the transform recursion reaches segment points just off the real axis.
class Cheb {
public:
    Cheb() = default;

    template <typename F>
    static Cheb fit(double lo, double hi, int degree, F&& f) {
        Cheb c;
        c.lo_ = lo;
        c.hi_ = hi;
        c.nodes_.resize(degree + 1);
        c.vals_.resize(degree + 1);
        double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (int j = 0; j <= degree; ++j) {
            double x = mid + half * std::cos(j * M_PI / degree);
            c.nodes_[j] = x;
            c.vals_[j] = f(x);
        }
        return c;
    }

    bool valid() const { return !vals_.empty(); }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    const std::vector<double>& nodes() const { return nodes_; }
    void set_value(int j, double v) { vals_[j] = v; }

    Complex operator()(Complex z) const {
        const int N = int(vals_.size()) - 1;
        Complex num = 0.0, den = 0.0;
        for (int j = 0; j <= N; ++j) {
            Complex d = z - nodes_[j];
            if (std::abs(d) < 1e-14 * (std::abs(z) + 1.0)) return vals_[j];
            double w = (j % 2) ? -1.0 : 1.0;
            if (j == 0 || j == N) w *= 0.5;
            Complex t = w / d;
            num += t * vals_[j];
            den += t;
        }
        return num / den;
    }

    double operator()(double x) const {
        return operator()(Complex(x, 0.0)).real();
    }

private:
    double lo_ = 0.0, hi_ = 0.0;
    std::vector<double> nodes_;
    std::vector<double> vals_;
};

}  // namespace batchps
