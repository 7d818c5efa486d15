#include "mnls/weights.hpp"

#include <cmath>
#include <stdexcept>

namespace mnls {

MorawetzWeight::MorawetzWeight(int dim, double scale) : n_(dim), R_(scale) {
    if (scale <= 0) throw std::invalid_argument("morawetz weight: scale must be positive");
    if (dim < 1) throw std::invalid_argument("morawetz weight: bad dimension");
}

double MorawetzWeight::value(double r) const {
    double s = r / R_;
    double c = (n_ - 1.0) / (4.0 * n_);
    double psi1;
    if (s <= 1.0) {
        psi1 = c * s * s;
    } else if (n_ == 2) {
        psi1 = c + (s - 1.0) / 2.0 - std::log(s) / (2.0 * n_);
    } else {
        psi1 = c + (s - 1.0) / 2.0 - (std::pow(s, 2.0 - n_) - 1.0) / (2.0 * n_ * (2.0 - n_));
    }
    return R_ * psi1;
}

WeightTable MorawetzWeight::table(double r) const {
    WeightTable t;
    double c = (n_ - 1.0) / (2.0 * n_);
    if (r <= R_) {
        t.p1 = c * r / R_;
        t.p2 = c / R_;
        t.p3 = 0.0;
        t.p4 = 0.0;
    } else {
        double rp = std::pow(R_ / r, n_ - 1.0);
        t.p1 = 0.5 - rp / (2.0 * n_);
        t.p2 = c * rp / r;
        t.p3 = -(n_ - 1.0) / 2.0 * rp / (r * r);
        t.p4 = (n_ * n_ - 1.0) / 2.0 * rp / (r * r * r);
    }
    return t;
}

double MorawetzWeight::shell_coeff() const { return -(n_ - 1.0) / (2.0 * R_ * R_); }

double MorawetzWeight::curvature_combo(double r) const {
    if (r <= R_) return 0.0;
    return -(1.0 - std::pow(R_ / r, n_ - 1.0)) / (2.0 * r);
}

InteractionWeight::InteractionWeight(double sigma) : sigma_(sigma) {
    if (sigma < 0) throw std::invalid_argument("interaction weight: sigma must be >= 0");
}

double InteractionWeight::value(double r) const { return std::sqrt(sigma_ * sigma_ + r * r); }

WeightTable InteractionWeight::table(double r) const {
    if (sigma_ == 0.0 && r == 0.0)
        throw std::domain_error("interaction weight: derivative table undefined at r=0 for sigma=0");
    WeightTable t;
    double br = value(r);
    double s2 = sigma_ * sigma_;
    t.p1 = r / br;
    t.p2 = s2 / std::pow(br, 3);
    t.p3 = -3.0 * s2 * r / std::pow(br, 5);
    t.p4 = 12.0 * s2 / std::pow(br, 5) - 15.0 * s2 * s2 / std::pow(br, 7);
    return t;
}

double InteractionWeight::dd_combo(double r) const { return -1.0 / std::pow(value(r), 3); }

double InteractionWeight::ddd_combo(double r) const {
    if (r == 0.0) throw std::domain_error("interaction weight: combo undefined at r=0");
    double br = value(r), s2 = sigma_ * sigma_;
    return -s2 * (3.0 * r / std::pow(br, 5) + 1.0 / (std::pow(br, 3) * r));
}

namespace {

struct PointData {
    int n;
    double r;
    double xh[kMaxDim];
    double A[kMaxDim][kMaxDim];
    MetricDerivs ad;
    double axh[kMaxDim];
    double ahat, abar, axh2, aHS2;
    double beta[kMaxDim];                   // a_{lm;l}
    double g;                               // beta . xhat
    double hat1[kMaxDim];                   // a_{lm;k} xh_l xh_m
    double bar1[kMaxDim];                   // a_{mm;k}
    double beta1[kMaxDim][kMaxDim];         // d_k beta_m   [m][k]
    double P[kMaxDim][kMaxDim];             // d_k xh_l
};

PointData point_data(const CoefficientSet& cs, const Point& x) {
    PointData d{};
    const int n = cs.dim;
    d.n = n;
    double r2 = 0;
    for (int k = 0; k < n; ++k) r2 += x[k] * x[k];
    d.r = std::sqrt(r2);
    if (d.r == 0.0) throw std::domain_error("weights: metric-adapted quantities need x != 0");
    for (int k = 0; k < n; ++k) d.xh[k] = x[k] / d.r;
    cs.metric(x, d.A);
    cs.metric_derivs(x, d.ad);
    d.abar = 0;
    for (int m = 0; m < n; ++m) d.abar += d.A[m][m];
    for (int l = 0; l < n; ++l) {
        d.axh[l] = 0;
        for (int m = 0; m < n; ++m) d.axh[l] += d.A[l][m] * d.xh[m];
    }
    d.ahat = 0;
    d.axh2 = 0;
    for (int l = 0; l < n; ++l) {
        d.ahat += d.axh[l] * d.xh[l];
        d.axh2 += d.axh[l] * d.axh[l];
    }
    d.aHS2 = 0;
    for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m) d.aHS2 += sq(d.A[l][m]);
    for (int m = 0; m < n; ++m) {
        d.beta[m] = 0;
        for (int l = 0; l < n; ++l) d.beta[m] += d.ad.d1[l][m][l];
    }
    d.g = 0;
    for (int m = 0; m < n; ++m) d.g += d.beta[m] * d.xh[m];
    for (int k = 0; k < n; ++k) {
        d.hat1[k] = 0;
        for (int l = 0; l < n; ++l)
            for (int m = 0; m < n; ++m) d.hat1[k] += d.ad.d1[l][m][k] * d.xh[l] * d.xh[m];
        d.bar1[k] = 0;
        for (int m = 0; m < n; ++m) d.bar1[k] += d.ad.d1[m][m][k];
    }
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k) {
            d.beta1[m][k] = 0;
            for (int l = 0; l < n; ++l) d.beta1[m][k] += d.ad.d2[l][m][l][k];
        }
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
            d.P[k][l] = ((k == l ? 1.0 : 0.0) - d.xh[k] * d.xh[l]) / d.r;
    return d;
}

// F_k (metric-frozen part of grad(A psi)) and D_k (derivative-carrying part)
void fd_vectors(const PointData& d, const WeightTable& t, double (&F)[kMaxDim],
                double (&D)[kMaxDim]) {
    const int n = d.n;
    const double r = d.r;
    double q = t.p2 - t.p1 / r;
    double qp = t.p3 - t.p2 / r + t.p1 / (r * r);
    double wv = t.p1 / r;
    double wp = t.p2 / r - t.p1 / (r * r);
    for (int k = 0; k < n; ++k) {
        F[k] = 2.0 / r * (d.axh[k] - d.ahat * d.xh[k]) * q +
               (d.ahat * qp + d.abar * wp) * d.xh[k];
        double gk = 0;  // d_k (beta . xhat)
        for (int m = 0; m < n; ++m) gk += d.beta1[m][k] * d.xh[m] + d.beta[m] * d.P[k][m];
        D[k] = d.hat1[k] * q + d.bar1[k] * wv + gk * t.p1 + d.g * t.p2 * d.xh[k];
    }
}

}  // namespace

double a_psi(const CoefficientSet& cs, const Point& x, const RadialWeight& w) {
    PointData d = point_data(cs, x);
    WeightTable t = w.table(d.r);
    return d.ahat * t.p2 + (d.abar - d.ahat) * t.p1 / d.r + d.g * t.p1;
}

void grad_a_psi(const CoefficientSet& cs, const Point& x, const RadialWeight& w,
                double (&out)[kMaxDim]) {
    PointData d = point_data(cs, x);
    WeightTable t = w.table(d.r);
    double F[kMaxDim], D[kMaxDim];
    fd_vectors(d, t, F, D);
    for (int k = 0; k < d.n; ++k) out[k] = F[k] + D[k];
    for (int k = d.n; k < kMaxDim; ++k) out[k] = 0;
}

BilapSplit bilap_split(const CoefficientSet& cs, const Point& x, const RadialWeight& w,
                       double Ca, double Nbound, double ratio_threshold_ok) {
    PointData d = point_data(cs, x);
    const int n = d.n;
    const double r = d.r;
    if (w.shell_radius() > 0 && std::abs(r - w.shell_radius()) < 1e-12 * w.shell_radius())
        throw std::domain_error(
            "bilap_split: point on the weight's singular shell; use the surface pairing");
    WeightTable t = w.table(r);

    BilapSplit out;
    out.S = d.ahat * d.ahat * t.p4 +
            (2.0 * d.abar * d.ahat - 6.0 * sq(d.ahat) + 4.0 * d.axh2) * t.p3 / r +
            (2.0 * d.aHS2 + sq(d.abar) - 6.0 * d.abar * d.ahat + 15.0 * sq(d.ahat) -
             12.0 * d.axh2) *
                (t.p2 / (r * r) - t.p1 / (r * r * r));

    double q = t.p2 - t.p1 / r;
    double qp = t.p3 - t.p2 / r + t.p1 / (r * r);
    double wv = t.p1 / r;
    double wp = t.p2 / r - t.p1 / (r * r);
    double F[kMaxDim], D[kMaxDim];
    fd_vectors(d, t, F, D);

    double R = 0;
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            // derivative-carrying part of d_j F_k
            double axh1_kj = 0;
            for (int l = 0; l < n; ++l) axh1_kj += d.ad.d1[k][l][j] * d.xh[l];
            double dF = 2.0 / r * (axh1_kj - d.hat1[j] * d.xh[k]) * q +
                        (d.hat1[j] * qp + d.bar1[j] * wp) * d.xh[k];

            // full d_j D_k
            double hat2_kj = 0, bar2_kj = 0, cross = 0;
            for (int l = 0; l < n; ++l)
                for (int m = 0; m < n; ++m) {
                    hat2_kj += d.ad.d2[l][m][k][j] * d.xh[l] * d.xh[m];
                    cross += d.ad.d1[l][m][k] * d.xh[m] * d.P[j][l];
                }
            for (int m = 0; m < n; ++m) bar2_kj += d.ad.d2[m][m][k][j];

            double g_k = 0, g_j = 0;
            for (int m = 0; m < n; ++m) {
                g_k += d.beta1[m][k] * d.xh[m] + d.beta[m] * d.P[k][m];
                g_j += d.beta1[m][j] * d.xh[m] + d.beta[m] * d.P[j][m];
            }
            double g_kj = 0;
            for (int m = 0; m < n; ++m) {
                double beta2 = 0;
                for (int l = 0; l < n; ++l) beta2 += d.ad.d3[l][m][l][k][j];
                double dP_jkm = -((k == m ? 1.0 : 0.0) - d.xh[k] * d.xh[m]) * d.xh[j] / (r * r) -
                                (d.P[j][k] * d.xh[m] + d.xh[k] * d.P[j][m]) / r;
                g_kj += beta2 * d.xh[m] + d.beta1[m][k] * d.P[j][m] + d.beta1[m][j] * d.P[k][m] +
                        d.beta[m] * dP_jkm;
            }

            double dD = (hat2_kj + 2.0 * cross) * q + d.hat1[k] * qp * d.xh[j] + bar2_kj * wv +
                        d.bar1[k] * wp * d.xh[j] + g_kj * t.p1 + g_k * t.p2 * d.xh[j] +
                        g_j * t.p2 * d.xh[k] + d.g * t.p3 * d.xh[j] * d.xh[k] +
                        d.g * t.p2 * d.P[j][k];

            R += d.A[j][k] * (dF + dD);
        }
        R += d.beta[j] * (F[j] + D[j]);
    }
    out.R_rem = R;

    double br = std::sqrt(1.0 + r * r);
    if (w.shell_radius() > 0) {
        double RvX = std::max(w.shell_radius(), r);
        out.R_bound =
            12.0 * n * Ca * (Nbound + Ca) / (r * std::pow(br, 1.0 + cs.delta) * RvX);
    } else {
        const auto* iw = dynamic_cast<const InteractionWeight*>(&w);
        double brs = iw ? iw->value(r) : r;
        out.R_bound = 5.0 * n * Ca * (Nbound + Ca) *
                      (2.0 / (std::pow(br, 1.0 + cs.delta) * r * brs) +
                       1.0 / (std::pow(br, 1.0 + cs.delta) * r * r));
    }
    out.bound_holds = std::abs(out.R_rem) <= out.R_bound + 1e-14;
    out.sign_argument_applicable = ratio_threshold_ok > 0.0;
    return out;
}

void alpha_matrix(const CoefficientSet& cs, const Point& x, const RadialWeight& w,
                  double (&alpha)[kMaxDim][kMaxDim]) {
    PointData d = point_data(cs, x);
    const int n = d.n;
    WeightTable t = w.table(d.r);
    // d_k psi = p1 xh_k ; d_j d_k psi = p2 xh_j xh_k + p1 P_{jk}
    double gpsi[kMaxDim], hess[kMaxDim][kMaxDim];
    for (int k = 0; k < n; ++k) gpsi[k] = t.p1 * d.xh[k];
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) hess[j][k] = t.p2 * d.xh[j] * d.xh[k] + t.p1 * d.P[j][k];

    for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m) {
            double s = 0;
            for (int j = 0; j < n; ++j) {
                double dj_alk_dkpsi = 0;  // d_j (a_{lk} d_k psi)
                for (int k = 0; k < n; ++k)
                    dj_alk_dkpsi += d.ad.d1[l][k][j] * gpsi[k] + d.A[l][k] * hess[j][k];
                s += 2.0 * d.A[j][m] * dj_alk_dkpsi;
                for (int k = 0; k < n; ++k) s -= d.A[j][k] * gpsi[k] * d.ad.d1[l][m][j];
            }
            alpha[l][m] = s;
        }
}

}  // namespace mnls
