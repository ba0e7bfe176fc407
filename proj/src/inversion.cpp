#include "batchps/inversion.hpp"

#include <algorithm>
#include <cmath>

namespace batchps {

std::vector<double> stehfest_weights(int order) {
    if (order < 2 || order % 2 != 0 || order > 20)
        throw InvalidInput("Stehfest order must be even and in [2,20]");
    const int M = order / 2;
    auto fact = [](int n) {
        double f = 1.0;
        for (int i = 2; i <= n; ++i) f *= i;
        return f;
    };
    std::vector<double> w(order + 1, 0.0);
    for (int k = 1; k <= order; ++k) {
        double sum = 0.0;
        for (int j = (k + 1) / 2; j <= std::min(k, M); ++j) {
            sum += std::pow(double(j), M) * fact(2 * j) /
                   (fact(M - j) * fact(j) * fact(j - 1) * fact(k - j) *
                    fact(2 * j - k));
        }
        w[k] = ((M + k) % 2 ? -1.0 : 1.0) * sum;
    }
    return w;
}

double gs_invert(const std::function<double(double)>& transform, double x,
                 int order) {
    if (!(x > 0.0)) throw InvalidInput("inversion requires x > 0");
    static thread_local std::map<int, std::vector<double>> cache;
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, stehfest_weights(order)).first;
    const auto& w = it->second;
    const double l2x = M_LN2 / x;
    double acc = 0.0;
    for (int k = 1; k <= order; ++k) acc += w[k] * transform(k * l2x);
    return acc * l2x;
}

InvertResult invert(const std::function<double(double)>& transform, double x) {
    double f10 = gs_invert(transform, x, 10);
    double f12 = gs_invert(transform, x, 12);
    double f14 = gs_invert(transform, x, 14);
    InvertResult r;
    r.value = f12;
    double d1 = std::abs(f12 - f10), d2 = std::abs(f14 - f12);
    r.err = std::max(d1, d2);
    r.oscillation = d2 > 2.0 * d1 + 1e-12;
    return r;
}

TransformFamily::TransformFamily(const ModelParams& params, int n_max,
                                 int b_max)
    : TransformFamily(params, n_max, b_max, TransformBuilder::Options()) {}

TransformFamily::TransformFamily(const ModelParams& params, int n_max,
                                 int b_max, TransformBuilder::Options opt)
    : params_(params), n_max_(n_max), b_max_(b_max), opt_(opt) {
    validate(params);
    if (n_max < 0 || b_max < 1) throw InvalidInput("bad family dimensions");
    opt_.b_levels = std::max(opt_.b_levels, b_max);
    opt_.n_series = std::max(opt_.n_series, n_max);

    auto occ = stationary_occupancy(params.rho,
                                    BatchDistribution::geometric(params.q),
                                    std::max(params.n_max, n_max + 1));
    pi_.assign(occ.pi.begin(), occ.pi.begin() + n_max + 1);
    auto dist = BatchDistribution::geometric(params.q);
    qb_.resize(b_max);
    for (int b = 1; b <= b_max; ++b) qb_[b - 1] = batch_pmf(dist, b);
    covered_ = 0.0;
    double pn = 0.0, pb = 0.0;
    for (double p : pi_) pn += p;
    for (double p : qb_) pb += p;
    covered_ = pn * pb;
}

TransformBuilder& TransformFamily::builder(double s) {
    auto it = builders_.find(s);
    if (it == builders_.end()) {
        it = builders_
                 .emplace(s, std::make_unique<TransformBuilder>(params_, s, opt_))
                 .first;
    }
    return *it->second;
}

const ConditionalTransform& TransformFamily::grid(double s) {
    auto it = grids_.find(s);
    if (it == grids_.end()) {
        it = grids_.emplace(s, builder(s).conditional_transform(n_max_, b_max_))
                 .first;
        builders_.erase(s);  // grid keeps everything the inversions need
    }
    return it->second;
}

double TransformFamily::value(double s, int n, int b) {
    if (n < 0 || n > n_max_ || b < 1 || b > b_max_)
        throw InvalidInput("value(n,b) outside the family grid");
    return grid(s).grid[n][b - 1];
}

double TransformFamily::mixed(double s) {
    const auto& g = grid(s);
    double acc = 0.0;
    for (int n = 0; n <= n_max_; ++n) {
        double row = 0.0;
        for (int b = 1; b <= b_max_; ++b) row += qb_[b - 1] * g.grid[n][b - 1];
        acc += pi_[n] * row;
    }
    return acc;
}

double TransformFamily::covered_mass() { return covered_; }

SurvivalPoint conditional_survival(TransformFamily& family, int n, int b,
                                   double x) {
    auto r = invert([&](double s) { return family.value(s, n, b); }, x);
    SurvivalPoint p;
    p.x = x;
    p.raw = r.value;
    p.value = std::clamp(r.value, 0.0, 1.0);
    p.err = r.err;
    return p;
}

SurvivalPoint unconditional_survival(TransformFamily& family, double x) {
    auto r = invert([&](double s) { return family.mixed(s); }, x);
    SurvivalPoint p;
    p.x = x;
    p.raw = r.value;
    p.value = std::clamp(r.value, 0.0, 1.0);
    p.err = r.err;
    p.bracket = 1.0 - family.covered_mass();
    return p;
}

double extrapolate_to_zero(const std::vector<double>& s,
                           const std::vector<double>& f) {
    std::vector<double> p = f;
    const int n = int(s.size());
    for (int level = 1; level < n; ++level)
        for (int i = 0; i < n - level; ++i)
            p[i] = ((0.0 - s[i + level]) * p[i] - (0.0 - s[i]) * p[i + 1]) /
                   (s[i] - s[i + level]);
    return p[0];
}

static const std::vector<double> kMomentNodes = {0.2, 0.1, 0.05, 0.025};

double moment(TransformFamily& family, int n, int b, int order) {
    if (order == 1) {
        std::vector<double> f;
        for (double s : kMomentNodes) f.push_back(family.value(s, n, b));
        return extrapolate_to_zero(kMomentNodes, f);
    }
    if (order == 2) {
        // 2 int x P(Omega > x) dx on a grid extended geometrically until the
        // tail stops contributing
        double acc = 0.0, x_prev = 0.0, y_prev = 1.0;
        double x = 0.05;
        while (x < 400.0) {
            double y = conditional_survival(family, n, b, x).value;
            acc += (x - x_prev) * 0.5 * (2.0 * x_prev * y_prev + 2.0 * x * y);
            if (x > 10.0 && 2.0 * x * y * x < 1e-7 * std::max(acc, 1e-300)) break;
            x_prev = x;
            y_prev = y;
            x = x < 10.0 ? x + 0.05 : x * 1.08;
        }
        return acc;
    }
    throw InvalidInput("moment order must be 1 or 2");
}

double unconditional_moment1(TransformFamily& family) {
    std::vector<double> f;
    for (double s : kMomentNodes) f.push_back(family.mixed(s));
    return extrapolate_to_zero(kMomentNodes, f);
}

}  // namespace batchps
