#include "mnls/coeffs.hpp"

#include <Eigen/Eigenvalues>
#include <cstring>
#include <stdexcept>

namespace mnls {

namespace {

double r2_of(const Point& x, int n) {
    double s = 0;
    for (int k = 0; k < n; ++k) s += x[k] * x[k];
    return s;
}

}  // namespace

CoefficientSet make_coefficients(const CoeffParams& p) {
    CoefficientSet cs;
    cs.dim = p.dim;
    cs.delta = p.delta;
    cs.declared = p.declared;
    cs.nl.gamma = p.gamma;
    cs.nl.lambda = p.lambda;
    const int n = p.dim;

    const double A = p.bump_amp;
    const double w2 = p.bump_width * p.bump_width;
    cs.metric = [n, A, w2](const Point& x, double (&a)[kMaxDim][kMaxDim]) {
        double phi = A * std::exp(-r2_of(x, n) / w2);
        for (int l = 0; l < n; ++l)
            for (int m = 0; m < n; ++m) a[l][m] = (l == m) ? 1.0 + phi : 0.0;
    };
    cs.metric_derivs = [n, A, w2](const Point& x, MetricDerivs& d) {
        std::memset(&d, 0, sizeof(d));
        if (A == 0.0) return;
        double phi = A * std::exp(-r2_of(x, n) / w2);
        double g1[kMaxDim], g2[kMaxDim][kMaxDim], g3[kMaxDim][kMaxDim][kMaxDim];
        for (int k = 0; k < n; ++k) g1[k] = -2.0 * x[k] / w2 * phi;
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j)
                g2[k][j] = (-2.0 * (k == j ? 1.0 : 0.0) / w2 + 4.0 * x[k] * x[j] / (w2 * w2)) * phi;
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j)
                for (int q = 0; q < n; ++q) {
                    double poly = -2.0 * (k == j ? 1.0 : 0.0) / w2 + 4.0 * x[k] * x[j] / (w2 * w2);
                    double dpoly = 4.0 * ((k == q ? 1.0 : 0.0) * x[j] + (j == q ? 1.0 : 0.0) * x[k]) / (w2 * w2);
                    g3[k][j][q] = dpoly * phi + poly * (-2.0 * x[q] / w2) * phi;
                }
        for (int l = 0; l < n; ++l) {
            for (int k = 0; k < n; ++k) d.d1[l][l][k] = g1[k];
            for (int k = 0; k < n; ++k)
                for (int j = 0; j < n; ++j) d.d2[l][l][k][j] = g2[k][j];
            for (int k = 0; k < n; ++k)
                for (int j = 0; j < n; ++j)
                    for (int q = 0; q < n; ++q) d.d3[l][l][k][j][q] = g3[k][j][q];
        }
    };

    const double beta = p.beta;
    cs.magnetic = [n, beta](const Point& x, double (&b)[kMaxDim]) {
        for (int k = 0; k < n; ++k) b[k] = 0.0;
        if (beta == 0.0 || n < 2) return;
        double br = std::pow(1.0 + r2_of(x, n), 1.5);
        b[0] = -beta * x[1] / br;
        b[1] = beta * x[0] / br;
    };
    cs.magnetic_d1 = [n, beta](const Point& x, double (&b1)[kMaxDim][kMaxDim]) {
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) b1[j][l] = 0.0;
        if (beta == 0.0 || n < 2) return;
        double s = 1.0 + r2_of(x, n);
        double br = std::pow(s, 1.5), br5 = std::pow(s, 2.5);
        double e[kMaxDim] = {-x[1], x[0], 0, 0};
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < 2; ++l) {
                double de = 0.0;
                if (l == 0 && j == 1) de = -1.0;
                if (l == 1 && j == 0) de = 1.0;
                b1[j][l] = beta * (de / br - 3.0 * e[l] * x[j] / br5);
            }
    };

    const double kap = p.kappa, ks = p.kappa_smooth, har = p.harmonic;
    cs.electric = [n, kap, ks, har](const Point& x) {
        double r2 = r2_of(x, n);
        double v = har * r2;
        if (kap != 0.0) v += kap / r2;
        if (ks != 0.0) v += ks / (1.0 + r2);
        return v;
    };
    cs.electric_grad = [n, kap, ks, har](const Point& x, double (&gc)[kMaxDim]) {
        double r2 = r2_of(x, n);
        for (int k = 0; k < n; ++k) {
            gc[k] = 2.0 * har * x[k];
            if (kap != 0.0) gc[k] += -2.0 * kap * x[k] / (r2 * r2);
            if (ks != 0.0) gc[k] += -2.0 * ks * x[k] / sq(1.0 + r2);
        }
    };
    return cs;
}

CoeffParams preset_params(const std::string& name) {
    CoeffParams p;
    if (name == "free" || name == "exterior-ball") {
        // identity metric, no potentials
    } else if (name == "repulsive-inverse-square") {
        p.kappa = 1.0;
    } else if (name == "smooth-metric-bump") {
        p.bump_amp = 0.05;
        p.bump_width = 2.0;
    } else if (name == "rotational-magnetic") {
        p.beta = 5e-4;
    } else {
        throw std::invalid_argument("unknown coefficient preset: " + name);
    }
    return p;
}

CoefficientValues eval_coefficients(const CoefficientSet& cs, const Point& x, const Grid* grid) {
    const int n = cs.dim;
    if (grid && grid->obstacle().kind == Obstacle::Kind::ball) {
        double s = 0;
        for (int k = 0; k < n; ++k) s += sq(x[k] - grid->obstacle().center[k]);
        if (std::sqrt(s) <= grid->obstacle().radius)
            throw std::domain_error("eval_coefficients: point lies inside the obstacle");
    }
    CoefficientValues v;
    double a[kMaxDim][kMaxDim];
    cs.metric(x, a);
    v.a.resize(n, n);
    for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m) v.a(l, m) = a[l][m];
    cs.metric_derivs(x, v.ad);
    double b[kMaxDim];
    cs.magnetic(x, b);
    v.b.resize(n);
    for (int k = 0; k < n; ++k) v.b[k] = b[k];
    double b1[kMaxDim][kMaxDim];
    cs.magnetic_d1(x, b1);
    v.b1.resize(n, n);
    v.db.resize(n, n);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) v.b1(j, l) = b1[j][l];
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) v.db(j, l) = v.b1(j, l) - v.b1(l, j);
    v.c = cs.electric(x);
    double gc[kMaxDim];
    cs.electric_grad(x, gc);
    v.grad_c.resize(n);
    for (int k = 0; k < n; ++k) v.grad_c[k] = gc[k];
    return v;
}

double metric_d1_size(const MetricDerivs& d, int n) {
    double s = 0;
    for (int k = 0; k < n; ++k) {
        double fr = 0;
        for (int l = 0; l < n; ++l)
            for (int m = 0; m < n; ++m) fr += sq(d.d1[l][m][k]);
        s += std::sqrt(fr);
    }
    return s;
}

double metric_d2_size(const MetricDerivs& d, int n) {
    double s = 0;
    for (int k = 0; k < n; ++k)
        for (int j = k; j < n; ++j) {
            double fr = 0;
            for (int l = 0; l < n; ++l)
                for (int m = 0; m < n; ++m) fr += sq(d.d2[l][m][k][j]);
            s += std::sqrt(fr);
        }
    return s;
}

double metric_d3_size(const MetricDerivs& d, int n) {
    double s = 0;
    for (int k = 0; k < n; ++k)
        for (int j = k; j < n; ++j)
            for (int q = j; q < n; ++q) {
                double fr = 0;
                for (int l = 0; l < n; ++l)
                    for (int m = 0; m < n; ++m) fr += sq(d.d3[l][m][k][j][q]);
                s += std::sqrt(fr);
            }
    return s;
}

double operator_norm(const Eigen::MatrixXd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()[0];
}

}  // namespace mnls
