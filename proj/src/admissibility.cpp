#include "mnls/admissibility.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mnls {

const AssumptionEntry* AdmissibilityReport::find(const std::string& name) const {
    for (auto& e : entries)
        if (e.name == name) return &e;
    return nullptr;
}

std::vector<Point> admissibility_samples(const Grid& g, int max_grid_samples) {
    std::vector<Point> pts;
    int stride = std::max(1, g.interior_size() / max_grid_samples);
    for (int ord = 0; ord < g.interior_size(); ord += stride) pts.push_back(g.coords(ord));

    // radial probes to 10x the box radius
    const int n = g.dim();
    std::vector<Point> dirs;
    for (int k = 0; k < n; ++k) {
        Point d{};
        d[k] = 1;
        dirs.push_back(d);
        d[k] = -1;
        dirs.push_back(d);
    }
    {
        Point d{};
        double s = 1.0 / std::sqrt(double(n));
        for (int k = 0; k < n; ++k) d[k] = s;
        dirs.push_back(d);
        for (int k = 0; k < n; ++k) d[k] = (k % 2 ? -s : s);
        dirs.push_back(d);
    }
    double r0 = g.h(), r1 = 10.0 * g.box();
    for (int i = 0; i < 48; ++i) {
        double r = r0 * std::pow(r1 / r0, i / 47.0);
        for (auto& d : dirs) {
            Point p{};
            for (int k = 0; k < n; ++k) p[k] = r * d[k];
            if (g.obstacle().kind == Obstacle::Kind::ball) {
                double s = 0;
                for (int k = 0; k < n; ++k) s += sq(p[k] - g.obstacle().center[k]);
                if (std::sqrt(s) <= g.obstacle().radius) continue;
            }
            pts.push_back(p);
        }
    }
    return pts;
}

namespace {

double bracket_weight(const Point& x, int n) {
    return std::sqrt(1.0 + std::inner_product(x.begin(), x.begin() + n, x.begin(), 0.0));
}

double radius_of(const Point& x, int n) {
    double s = 0;
    for (int k = 0; k < n; ++k) s += x[k] * x[k];
    return std::sqrt(s);
}

}  // namespace

AdmissibilityReport check_admissibility(const CoefficientSet& cs,
                                        const std::vector<Point>& samples,
                                        AssumptionVariant variant) {
    if (samples.empty()) throw std::invalid_argument("check_admissibility: empty sample set");
    const int n = cs.dim;
    if (variant == AssumptionVariant::n_eq_3 && n != 3)
        throw std::invalid_argument("check_admissibility: n=3 variant requires dim 3");
    if (variant == AssumptionVariant::n_ge_4 && n < 3)
        throw std::invalid_argument("check_admissibility: variant requires dim >= 3");

    AdmissibilityReport rep;
    rep.variant = variant;
    {
        std::ostringstream os;
        os << samples.size() << " points (grid subsample + 48-radius log probes to 10x box)";
        rep.sample_description = os.str();
    }

    double nu = 1e300, N = 0, asym = 0;
    double sup_ader = 0, sup_db = 0, cplus2 = 0, cminus2 = 0, sup_ac = 0, sup_acn = 0, sup_ai = 0;
    double sup_sb = 0, sup_b_n4 = 0, sup_b_n3 = 0, sup_cdec = 0;
    const double dlt = cs.delta;

    for (const auto& x : samples) {
        double r = radius_of(x, n);
        if (r < 1e-12) continue;  // weights with |x|^{-k} exclude the origin
        double br = bracket_weight(x, n);
        CoefficientValues v = eval_coefficients(cs, x);

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v.a);
        nu = std::min(nu, es.eigenvalues().minCoeff());
        N = std::max(N, es.eigenvalues().maxCoeff());
        asym = std::max(asym, (v.a - v.a.transpose()).cwiseAbs().maxCoeff());

        double ader = metric_d1_size(v.ad, n) + r * metric_d2_size(v.ad, n) +
                      r * r * metric_d3_size(v.ad, n);
        sup_ader = std::max(sup_ader, ader * std::pow(br, 1.0 + dlt));

        double dbn = operator_norm(v.db);
        double denom = (variant == AssumptionVariant::n_eq_3)
                           ? std::pow(r, 2.0 + dlt) + r
                           : std::pow(r, 2.0 + dlt) + std::pow(r, 2.0 - dlt);
        sup_db = std::max(sup_db, dbn * denom);

        cplus2 = std::max(cplus2, std::max(v.c, 0.0) * r * r);
        cminus2 = std::max(cminus2, std::max(-v.c, 0.0) * r * r);

        Eigen::VectorXd xv(n);
        for (int k = 0; k < n; ++k) xv[k] = x[k];
        double axgc = (v.a * xv).dot(v.grad_c);
        sup_ac = std::max(sup_ac, std::max(axgc, 0.0) * r * std::pow(br, 1.0 + dlt));
        sup_acn = std::max(sup_acn, r * r * v.grad_c.norm() * std::pow(br, 1.0 + dlt));

        Eigen::MatrixXd ai = v.a - Eigen::MatrixXd::Identity(n, n);
        sup_ai = std::max(sup_ai, operator_norm(ai) * std::pow(br, dlt));

        double bnorm = v.b.norm();
        double b1sum = v.b1.cwiseAbs().sum();
        sup_sb = std::max(sup_sb, bnorm * br);
        sup_b_n4 = std::max(sup_b_n4,
                            (r * bnorm + r * r * b1sum) * std::pow(r, -dlt) * std::pow(br, 2.0 * dlt));
        sup_b_n3 = std::max(sup_b_n3, r * bnorm + r * std::pow(br, 1.0 + dlt) * b1sum);

        double gcsum = v.grad_c.cwiseAbs().sum();
        sup_cdec = std::max(sup_cdec, (r * std::abs(v.c) + r * r * gcsum) * std::pow(br, 1.0 + dlt));
    }

    rep.nu = nu;
    rep.N = N;
    rep.Ca = sup_ader;
    rep.Cb = sup_db;
    rep.Cplus = std::sqrt(cplus2);
    rep.Cminus = std::sqrt(cminus2);
    rep.Cc = sup_ac;
    rep.Ccprime = sup_acn;
    rep.CI = sup_ai;
    rep.Sb = sup_sb;

    auto add = [&](const std::string& name, double sup, double bound, bool ok,
                   const std::string& note = "") {
        rep.entries.push_back({name, sup, bound, ok, note});
    };

    add("metric_symmetry", asym, 1e-12, asym <= 1e-12);
    add("metric_ellipticity", nu, 0.0, nu > 0, "measured nu; holds iff nu > 0");
    add("metric_derivative_decay", sup_ader, cs.declared.Ca, sup_ader <= cs.declared.Ca);
    add(variant == AssumptionVariant::n_eq_3 ? "magnetic_field_decay_strong"
                                             : "magnetic_field_decay",
        sup_db, cs.declared.Cb, sup_db <= cs.declared.Cb);
    add("electric_upper", rep.Cplus, cs.declared.Cplus, rep.Cplus <= cs.declared.Cplus);
    add("electric_lower", rep.Cminus, cs.declared.Cminus, rep.Cminus <= cs.declared.Cminus);
    add("electric_repulsivity", sup_ac, cs.declared.Cc, sup_ac <= cs.declared.Cc);
    add("electric_gradient_decay", sup_acn, cs.declared.Ccprime, sup_acn <= cs.declared.Ccprime);
    if (variant == AssumptionVariant::n_eq_3)
        add("metric_near_identity", sup_ai, std::min(1.0, cs.declared.CI),
            sup_ai <= cs.declared.CI && sup_ai < 1.0);

    // nonlinearity: gauge invariance on a theta x z lattice
    double gerr = 0;
    for (int it = 0; it < 12; ++it) {
        double th = 2.0 * M_PI * it / 12.0;
        cplx ph(std::cos(th), std::sin(th));
        for (int iz = 0; iz < 16; ++iz) {
            double s = 0.1 + 0.35 * iz;
            for (int ia = 0; ia < 8; ++ia) {
                double al = 2.0 * M_PI * ia / 8.0;
                cplx z = s * cplx(std::cos(al), std::sin(al));
                gerr = std::max(gerr, std::abs(cs.nl.f(ph * z) - ph * cs.nl.f(z)));
            }
        }
    }
    add("gauge_invariance", gerr, 1e-12, gerr <= 1e-12);

    double rmin = 1e300;
    for (int iz = 0; iz <= 64; ++iz) {
        double s = 5.0 * iz / 64.0;
        rmin = std::min(rmin, cs.nl.bracket(cplx(s, 0)));
    }
    add("nonlinearity_repulsive", rmin, 0.0, rmin >= -1e-12, "min of f(z)zbar - 2F(z)");

    double fmin = 1e300;
    for (int iz = 0; iz <= 64; ++iz) fmin = std::min(fmin, cs.nl.F(5.0 * iz / 64.0));
    add("defocusing", fmin, 0.0, fmin >= -1e-12, "min of F");

    // scattering-theorem assumption forms (reported as named entries)
    if (variant == AssumptionVariant::n_ge_4)
        add("scatter_b_n4", sup_b_n4, cs.declared.Cb, sup_b_n4 <= cs.declared.Cb,
            "sup (r|b| + r^2|b'|) r^{-d} <x>^{2d}");
    else
        add("scatter_b_n3", sup_b_n3, cs.declared.Cb, sup_b_n3 <= cs.declared.Cb,
            "sup (r|b| + r <x>^{1+d} |b'|)");
    add("scatter_c_decay", sup_cdec, cs.declared.Ccprime, sup_cdec <= cs.declared.Ccprime,
        "sup (r|c| + r^2|c'|) <x>^{1+d}");

    return rep;
}

StarshapeReport starshape_check(const Grid& g, const CoefficientSet& cs) {
    StarshapeReport rep;
    if (g.obstacle().kind == Obstacle::Kind::none) {
        rep.vacuous = true;
        return rep;
    }
    const int n = g.dim();
    double amat[kMaxDim][kMaxDim];
    for (const auto& bc : g.obstacle_boundary()) {
        Point x = g.coords(bc.ordinal);
        cs.metric(x, amat);
        double v = 0;
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) v += amat[j][k] * x[k] * bc.normal[j];
        if (v > rep.worst_value) {
            rep.worst_value = v;
            rep.worst_point = x;
        }
    }
    rep.holds = rep.worst_value <= rep.tolerance;
    return rep;
}

Rational::Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (den == 0) {  // infinity marker (used for p = infinity couples)
        num = 1;
        return;
    }
    if (den < 0) {
        num = -num;
        den = -den;
    }
    std::int64_t g = std::gcd(std::llabs(num), den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}
Rational Rational::operator+(const Rational& o) const {
    return Rational(num * o.den + o.num * den, den * o.den);
}
Rational Rational::operator-(const Rational& o) const {
    return Rational(num * o.den - o.num * den, den * o.den);
}
Rational Rational::operator*(const Rational& o) const {
    return Rational(num * o.num, den * o.den);
}

Rational k0_exact(int n, Rational ratio) {
    return Rational(n - 1, 6) - Rational(n + 3, 2) * ratio + Rational(n, 1);
}

Rational assratio_threshold_sq_exact(int n) {
    return Rational(std::int64_t(n) * n + 2 * n + 15, 6 * (std::int64_t(n) + 2));
}

Rational condcm_threshold_exact(Rational sqrt_nu, int n) {
    return Rational(2, n - 2) * sqrt_nu;
}

double gamma0_worst_case(int n, double nu, double N, double Ca) {
    double inside = (n - 1.0) / (2.0 * n) * (n * nu - Ca);
    double outside = 0.5 * ((n - 1.0) / n * (n * nu - N) - Ca);
    return std::min(inside, outside);
}

SmallnessLedger smallness_ledger(const AdmissibilityReport& rep, const CoefficientSet& cs) {
    SmallnessLedger lg;
    lg.n = cs.dim;
    lg.delta = cs.delta;
    lg.nu = rep.nu;
    lg.N = rep.N;
    lg.ratio = rep.N / rep.nu;
    lg.Ca = rep.Ca;
    lg.Cb = rep.Cb;
    lg.Cminus = rep.Cminus;
    lg.Cc = rep.Cc;
    lg.CI = rep.CI;
    const int n = lg.n;
    const double d = lg.delta;

    lg.K0 = (n - 1.0) / 6.0 - (n + 3.0) / 2.0 * lg.ratio + n;
    lg.gamma0 = gamma0_worst_case(n, lg.nu, lg.N, lg.Ca);
    lg.M3 = lg.gamma0 / 3.0;

    lg.M1 = lg.K0 / 2.0 * sq(lg.nu) -
            (5.0 * sq(lg.N) * lg.Cb + 12.0 * n * lg.Ca * (lg.N + lg.Ca) + lg.Cc) / d;
    lg.M2 = (n - 1.0) / (3.0 * n) * sq(lg.nu) - (5.0 * sq(lg.N) * lg.Cb + 24.0 * lg.N * lg.Ca) / d;

    lg.M1p = sq(1.0 - lg.CI) / 78.0 -
             8.0 / d * (lg.Cc + 9.0 * lg.CI + 41.0 * lg.Ca * (lg.N + lg.Ca)) -
             9.0 / d * sq(lg.N) * lg.Cb;
    lg.M2p = sq(1.0 - lg.CI) / 6.0 -
             13.0 / d * (lg.Cc + 38.0 * lg.Ca * (lg.N + lg.Ca)) -
             9.0 / d * sq(lg.N) * lg.Cb;

    if (n <= 25)
        lg.assratio_threshold = std::sqrt((n * n + 2.0 * n + 15.0) / (6.0 * (n + 2.0)));
    else
        lg.assratio_threshold = (7.0 * n - 1.0) / (3.0 * (n + 3.0));
    lg.condCm_threshold = 2.0 * std::sqrt(lg.nu) / (n - 2.0);
    lg.remark_third_condition = (n - lg.ratio) - double(n) / (n - 1.0) * lg.nu * lg.Ca;

    lg.assratio_ok = lg.ratio <= lg.assratio_threshold + 1e-15;
    lg.condCm_ok = lg.Cminus <= lg.condCm_threshold + 1e-15;
    bool ms = (n >= 4) ? (lg.M1 > 0 && lg.M2 > 0 && lg.M3 > 0)
                       : (lg.M1p > 0 && lg.M2p > 0 && lg.M3 > 0);
    lg.verdict = ms && lg.assratio_ok && lg.condCm_ok;
    return lg;
}

}  // namespace mnls
