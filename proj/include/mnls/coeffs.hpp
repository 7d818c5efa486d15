#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "mnls/grid.hpp"

namespace mnls {

// dense derivative tensors of the metric at one point (n <= 4)
struct MetricDerivs {
    // d1[l][m][k] = a_{lm;k}; d2[l][m][k][j]; d3[l][m][k][j][p]
    double d1[kMaxDim][kMaxDim][kMaxDim];
    double d2[kMaxDim][kMaxDim][kMaxDim][kMaxDim];
    double d3[kMaxDim][kMaxDim][kMaxDim][kMaxDim][kMaxDim];
};

// gauge-invariant nonlinearity f with companion antiderivative F
struct Nonlinearity {
    double gamma = 3.0;
    double lambda = 1.0;
    bool is_power = true;
    std::function<cplx(cplx)> f_custom;       // used when !is_power
    std::function<double(double)> F_custom;   // F(s) for s >= 0

    cplx f(cplx z) const {
        if (is_power) {
            double s = std::abs(z);
            return s == 0.0 ? cplx(0) : lambda * std::pow(s, gamma - 1.0) * z;
        }
        return f_custom(z);
    }
    double F(double s) const {
        if (is_power) return lambda * std::pow(s, gamma + 1.0) / (gamma + 1.0);
        return F_custom(s);
    }
    // bracket f(z) conj(z) - 2 F(z) (real for gauge-invariant f)
    double bracket(cplx z) const {
        double s = std::abs(z);
        if (is_power) return lambda * (1.0 - 2.0 / (gamma + 1.0)) * std::pow(s, gamma + 1.0);
        return std::real(f_custom(z) * std::conj(z)) - 2.0 * F(s);
    }
    // conservative midpoint chi: 2 (F(s1) - F(s0)) / (s1^2 - s0^2),
    // with the removable-singularity limit f(s)/s at equal moduli
    double chi(double s0, double s1) const {
        double d = s1 * s1 - s0 * s0;
        double scale = std::max(s0, s1);
        if (scale == 0.0) return 0.0;
        if (std::abs(s1 - s0) <= 1e-9 * scale) {
            double s = 0.5 * (s0 + s1);
            if (is_power) return lambda * std::pow(s, gamma - 1.0);
            return s == 0.0 ? 0.0 : std::abs(f_custom(cplx(s, 0))) / s;
        }
        return 2.0 * (F(s1) - F(s0)) / d;
    }
};

// declared caps for the admissibility verdicts ("holds" compares the
// measured supremum against these)
struct DeclaredBounds {
    double Ca = 100.0;
    double Cb = 100.0;
    double Cplus = 100.0;
    double Cminus = 100.0;
    double Cc = 100.0;
    double Ccprime = 1e4;
    double CI = 1.0;  // hard requirement < 1
};

// The coefficient fields a(x), b(x), c(x) with analytic derivatives.
struct CoefficientSet {
    int dim = 3;
    double delta = 1.0;
    std::string name = "custom";
    Nonlinearity nl;
    DeclaredBounds declared;

    std::function<void(const Point&, double (&a)[kMaxDim][kMaxDim])> metric;
    std::function<void(const Point&, MetricDerivs&)> metric_derivs;
    std::function<void(const Point&, double (&b)[kMaxDim])> magnetic;
    // b1[j][l] = d_j b_l
    std::function<void(const Point&, double (&b1)[kMaxDim][kMaxDim])> magnetic_d1;
    std::function<double(const Point&)> electric;
    std::function<void(const Point&, double (&gc)[kMaxDim])> electric_grad;

    void eval_metric(const Point& x, double (&a)[kMaxDim][kMaxDim]) const { metric(x, a); }
    double electric_at(const Point& x) const { return electric(x); }
};

struct CoeffParams {
    int dim = 3;
    double delta = 1.0;
    double bump_amp = 0.0;   // metric a = (1 + A exp(-|x|^2/w^2)) I
    double bump_width = 2.0;
    double beta = 0.0;       // b = beta (-x2, x1, 0, ...) / <x>^3
    double kappa = 0.0;        // c += kappa / |x|^2
    double kappa_smooth = 0.0; // c += kappa_smooth / (1 + |x|^2)  (same decay, smooth)
    double harmonic = 0.0;     // c += harmonic |x|^2   (used as a failing probe)
    double gamma = 3.0;
    double lambda = 1.0;
    DeclaredBounds declared;
};

CoefficientSet make_coefficients(const CoeffParams& p);
// named presets: "free", "repulsive-inverse-square", "smooth-metric-bump",
// "rotational-magnetic", "exterior-ball" (coefficients are free; the obstacle
// lives in the grid section)
CoeffParams preset_params(const std::string& name);

// pointwise evaluation bundle for eval_coefficients
struct CoefficientValues {
    Eigen::MatrixXd a;
    MetricDerivs ad;
    Eigen::VectorXd b;
    Eigen::MatrixXd db;   // db(j,l) = d_j b_l - d_l b_j
    Eigen::MatrixXd b1;   // b1(j,l) = d_j b_l
    double c;
    Eigen::VectorXd grad_c;
};

// errors if x lies inside a declared obstacle region
CoefficientValues eval_coefficients(const CoefficientSet& cs, const Point& x,
                                    const Grid* grid = nullptr);

// paper-notation aggregates: |a'| etc. are sums over multi-indices of
// Frobenius norms of the derivative matrices; |a| and |db| are spectral norms
double metric_d1_size(const MetricDerivs& d, int n);
double metric_d2_size(const MetricDerivs& d, int n);
double metric_d3_size(const MetricDerivs& d, int n);
double operator_norm(const Eigen::MatrixXd& m);

}  // namespace mnls
