#pragma once

#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "batchps/transform.hpp"

namespace batchps {

// Real-axis Laplace inversion. The whole transform pipeline is defined for
// real s > 0 only, so complex-node methods are off the table; Gaver-Stehfest
// needs nothing but real nodes s = k ln2 / x.
std::vector<double> stehfest_weights(int order);
double gs_invert(const std::function<double(double)>& transform, double x,
                 int order = 12);

struct InvertResult {
    double value = 0.0;    // order-12 estimate (raw, unclamped)
    double err = 0.0;      // order-agreement estimate over {10,12,14}
    bool oscillation = false;
};

InvertResult invert(const std::function<double(double)>& transform, double x);

struct SurvivalPoint {
    double x = 0.0;
    double raw = 0.0;      // unclamped inversion output
    double value = 0.0;    // clamped to [0,1]
    double err = 0.0;
    double bracket = 0.0;  // truncation remainder (unconditional only)
};

// Caches one TransformBuilder per s-node so that inversions at many x, n, b
// share pipeline work.
class TransformFamily {
public:
    TransformFamily(const ModelParams& params, int n_max, int b_max);
    TransformFamily(const ModelParams& params, int n_max, int b_max,
                    TransformBuilder::Options opt);

    double value(double s, int n, int b);

    // Occupancy/batch-size mixture of the grid at one s, with the covered
    // probability mass; the uncovered remainder is in [0, (1-mass)/s].
    double mixed(double s);
    double covered_mass();

    const ModelParams& params() const { return params_; }
    int n_max() const { return n_max_; }
    int b_max() const { return b_max_; }
    TransformBuilder& builder(double s);

private:
    const ConditionalTransform& grid(double s);

    ModelParams params_;
    int n_max_, b_max_;
    TransformBuilder::Options opt_;
    std::vector<double> pi_;      // occupancy weights, 0..n_max
    std::vector<double> qb_;      // batch pmf, 1..b_max
    double covered_ = 0.0;
    std::map<double, std::unique_ptr<TransformBuilder>> builders_;
    std::map<double, ConditionalTransform> grids_;
};

SurvivalPoint conditional_survival(TransformFamily& family, int n, int b,
                                   double x);
SurvivalPoint unconditional_survival(TransformFamily& family, double x);

// k = 1: polynomial extrapolation of E*_{n,b}(s) to s -> 0 over
// s in {0.2, 0.1, 0.05, 0.025}. k = 2: 2 int x E_{n,b}(x) dx over the
// inverted curve on a geometrically extended grid.
double moment(TransformFamily& family, int n, int b, int order);
double unconditional_moment1(TransformFamily& family);

// extrapolation helper (Neville to 0); exposed for tests
double extrapolate_to_zero(const std::vector<double>& s,
                           const std::vector<double>& f);

}  // namespace batchps
