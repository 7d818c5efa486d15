#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mnls/admissibility.hpp"

using namespace mnls;

namespace {

// central finite differences of an analytic closure
template <typename F>
double fd1(F&& f, Point x, int k, double h = 1e-5) {
    Point xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    return (f(xp) - f(xm)) / (2 * h);
}

}  // namespace

TEST_CASE("free coefficients evaluate to the identity data") {
    CoefficientSet cs = make_coefficients(preset_params("free"));
    Point x{0.7, -0.3, 1.1};
    CoefficientValues v = eval_coefficients(cs, x);
    CHECK(v.a(0, 0) == 1.0);
    CHECK(v.a(0, 1) == 0.0);
    CHECK(metric_d1_size(v.ad, 3) == 0.0);
    CHECK(v.b.norm() == 0.0);
    CHECK(v.c == 0.0);
}

TEST_CASE("metric bump has a critical point at the origin") {
    CoeffParams p;
    p.bump_amp = 0.1;
    p.bump_width = 1.0;
    CoefficientSet cs = make_coefficients(p);
    Point x{0, 0, 0};
    CoefficientValues v = eval_coefficients(cs, x);
    CHECK(v.a(0, 0) == doctest::Approx(1.1));
    CHECK(metric_d1_size(v.ad, 3) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("analytic metric derivatives agree with finite differences") {
    CoeffParams p;
    p.bump_amp = 0.3;
    p.bump_width = 1.7;
    CoefficientSet cs = make_coefficients(p);
    Point x{0.8, -0.4, 0.6};
    MetricDerivs d;
    cs.metric_derivs(x, d);
    auto entry = [&](const Point& y) {
        double a[kMaxDim][kMaxDim];
        cs.metric(y, a);
        return a[1][1];
    };
    for (int k = 0; k < 3; ++k)
        CHECK(d.d1[1][1][k] == doctest::Approx(fd1(entry, x, k)).epsilon(1e-7));
    // second derivative: difference the first-derivative closure
    auto d1entry = [&](const Point& y) {
        MetricDerivs dd;
        cs.metric_derivs(y, dd);
        return dd.d1[1][1][0];
    };
    for (int k = 0; k < 3; ++k)
        CHECK(d.d2[1][1][0][k] == doctest::Approx(fd1(d1entry, x, k)).epsilon(1e-6));
    auto d2entry = [&](const Point& y) {
        MetricDerivs dd;
        cs.metric_derivs(y, dd);
        return dd.d2[1][1][0][2];
    };
    for (int k = 0; k < 3; ++k)
        CHECK(d.d3[1][1][0][2][k] == doctest::Approx(fd1(d2entry, x, k)).epsilon(1e-5));
}

TEST_CASE("rotational magnetic field derivative table") {
    CoeffParams p;
    p.beta = 0.1;
    CoefficientSet cs = make_coefficients(p);
    Point x{1.0, 0.0, 0.0};
    CoefficientValues v = eval_coefficients(cs, x);
    // closed form: db_12 = 0.1 [2 <x>^{-3} - 3 (x1^2+x2^2) <x>^{-5}] = 0.1 2^{-3/2} / 2
    double expect = 0.1 * (2.0 * std::pow(2.0, -1.5) - 3.0 * std::pow(2.0, -2.5));
    CHECK(v.db(0, 1) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(v.db(0, 1) == doctest::Approx(0.0176776695).epsilon(1e-6));
    CHECK(v.db(1, 0) == doctest::Approx(-v.db(0, 1)));
    // finite-difference cross check of b1
    auto b2 = [&](const Point& y) {
        double b[kMaxDim];
        cs.magnetic(y, b);
        return b[1];
    };
    CHECK(v.b1(0, 1) == doctest::Approx(fd1(b2, x, 0)).epsilon(1e-7));
}

TEST_CASE("point inside the obstacle is a domain error") {
    CoefficientSet cs = make_coefficients(preset_params("free"));
    Obstacle ob;
    ob.kind = Obstacle::Kind::ball;
    ob.radius = 1.0;
    Grid g(3, 8.0, 32, ob);
    Point x{0.2, 0.0, 0.0};
    CHECK_THROWS_AS(eval_coefficients(cs, x, &g), std::domain_error);
}

TEST_CASE("admissibility of the free preset") {
    CoefficientSet cs = make_coefficients(preset_params("free"));
    Grid g(3, 6.0, 16);
    auto rep = check_admissibility(cs, admissibility_samples(g), AssumptionVariant::n_eq_3);
    CHECK(rep.all_hold());
    CHECK(rep.Ca == 0.0);
    CHECK(rep.Cb == 0.0);
    CHECK(rep.Cplus == 0.0);
    CHECK(rep.Cminus == 0.0);
    CHECK(rep.Cc == 0.0);
    SmallnessLedger lg = smallness_ledger(rep, cs);
    CHECK(lg.gamma0 > 0);
    CHECK(lg.verdict);
    CHECK(lg.gamma0 == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("inverse-square potential: C+ = sqrt(kappa), repulsive") {
    CoeffParams p = preset_params("repulsive-inverse-square");
    CoefficientSet cs = make_coefficients(p);
    Grid g(3, 6.0, 16);
    auto rep = check_admissibility(cs, admissibility_samples(g), AssumptionVariant::n_eq_3);
    CHECK(rep.Cplus == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rep.Cminus == 0.0);
    CHECK(rep.Cc == 0.0);  // a x . grad c = -2 kappa / |x|^2 <= 0
    CHECK(rep.find("electric_repulsivity")->holds);
}

TEST_CASE("harmonic trap violates the repulsivity decay bound") {
    CoeffParams p;
    p.harmonic = 1.0;
    p.declared.Cc = 10.0;
    p.declared.Cplus = 10.0;
    CoefficientSet cs = make_coefficients(p);
    Grid g(3, 6.0, 16);
    auto rep = check_admissibility(cs, admissibility_samples(g), AssumptionVariant::n_eq_3);
    CHECK_FALSE(rep.find("electric_repulsivity")->holds);
    CHECK_FALSE(rep.find("electric_upper")->holds);
}

TEST_CASE("gauge invariance and repulsivity of power nonlinearities") {
    CoefficientSet cs = make_coefficients(preset_params("free"));
    Grid g(3, 4.0, 8);
    auto rep = check_admissibility(cs, admissibility_samples(g), AssumptionVariant::n_eq_3);
    CHECK(rep.find("gauge_invariance")->holds);
    CHECK(rep.find("nonlinearity_repulsive")->holds);
    CHECK(rep.find("defocusing")->holds);
    // closed form of the bracket for power f
    Nonlinearity nl;
    nl.gamma = 3.0;
    nl.lambda = 2.0;
    cplx z(0.4, -0.7);
    double s = std::abs(z);
    double expect = 2.0 * (1.0 - 2.0 / 4.0) * std::pow(s, 4.0);
    CHECK(nl.bracket(z) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(nl.bracket(z) >= 0);
}

TEST_CASE("ledger formulas reproduce the pinned exact values") {
    CHECK(k0_exact(3, Rational(1, 1)) == Rational(1, 3));
    CHECK(assratio_threshold_sq_exact(3) == Rational(1, 1));
    CHECK(assratio_threshold_sq_exact(4) == Rational(39, 36));
    CHECK(condcm_threshold_exact(Rational(1, 1), 3) == Rational(2, 1));
    // floating-point route agrees
    CoefficientSet cs = make_coefficients(preset_params("free"));
    Grid g(3, 6.0, 8);
    auto rep = check_admissibility(cs, admissibility_samples(g), AssumptionVariant::n_eq_3);
    SmallnessLedger lg = smallness_ledger(rep, cs);
    CHECK(lg.K0 == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(lg.assratio_threshold == doctest::Approx(1.0));
    CHECK(lg.condCm_threshold == doctest::Approx(2.0));
}

TEST_CASE("M constants decrease in each perturbation constant") {
    CoefficientSet cs = make_coefficients(preset_params("free"));
    Grid g(3, 6.0, 8);
    auto rep = check_admissibility(cs, admissibility_samples(g), AssumptionVariant::n_eq_3);
    SmallnessLedger base = smallness_ledger(rep, cs);
    {
        AdmissibilityReport r2 = rep;
        r2.Ca += 0.01;
        SmallnessLedger lg = smallness_ledger(r2, cs);
        CHECK(lg.M1 < base.M1);
        CHECK(lg.M2 < base.M2);
        CHECK(lg.M1p < base.M1p);
        CHECK(lg.M2p < base.M2p);
        CHECK(lg.M3 < base.M3);
    }
    {
        AdmissibilityReport r2 = rep;
        r2.Cb += 0.01;
        SmallnessLedger lg = smallness_ledger(r2, cs);
        CHECK(lg.M1 < base.M1);
        CHECK(lg.M2 < base.M2);
        CHECK(lg.M1p < base.M1p);
        CHECK(lg.M2p < base.M2p);
    }
    {
        AdmissibilityReport r2 = rep;
        r2.Cc += 0.01;
        SmallnessLedger lg = smallness_ledger(r2, cs);
        CHECK(lg.M1 < base.M1);
        CHECK(lg.M1p < base.M1p);
        CHECK(lg.M2p < base.M2p);
    }
    {
        AdmissibilityReport r2 = rep;
        r2.CI += 0.01;
        SmallnessLedger lg = smallness_ledger(r2, cs);
        CHECK(lg.M1p < base.M1p);
        CHECK(lg.M2p < base.M2p);
    }
}

TEST_CASE("ellipticity bounds hold along random directions") {
    CoeffParams p;
    p.bump_amp = 0.07;
    CoefficientSet cs = make_coefficients(p);
    Grid g(3, 6.0, 8);
    auto samples = admissibility_samples(g);
    auto rep = check_admissibility(cs, samples, AssumptionVariant::n_eq_3);
    // nu, N are suprema over the declared sample set: random directions at
    // sampled points must respect them
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> uni(-1, 1);
    std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);
    double amat[kMaxDim][kMaxDim];
    for (int trial = 0; trial < 400; ++trial) {
        const Point& x = samples[pick(rng)];
        double e[3] = {uni(rng), uni(rng), uni(rng)};
        double en = std::sqrt(e[0] * e[0] + e[1] * e[1] + e[2] * e[2]);
        if (en < 1e-6) continue;
        cs.metric(x, amat);
        double q = 0;
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) q += e[j] * amat[j][k] * e[k];
        q /= en * en;
        CHECK(q >= rep.nu - 1e-9);
        CHECK(q <= rep.N + 1e-9);
    }
    // and the preset's exact global bounds contain the measured interval
    CHECK(rep.nu >= 1.0 - 1e-12);
    CHECK(rep.N <= 1.07 + 1e-12);
}

TEST_CASE("critical bump amplitude by bisection on the ledger formula") {
    // smallest positive root of M1'(amplitude) along the bump family
    Grid g(3, 6.0, 12);
    auto samples = admissibility_samples(g);
    auto m1p = [&](double amp) {
        CoeffParams p;
        p.bump_amp = amp;
        CoefficientSet cs = make_coefficients(p);
        auto rep = check_admissibility(cs, samples, AssumptionVariant::n_eq_3);
        return smallness_ledger(rep, cs).M1p;
    };
    double lo = 0.0, hi = 1e-4;
    CHECK(m1p(lo) > 0);
    CHECK(m1p(hi) < 0);
    for (int i = 0; i < 40; ++i) {
        double mid = 0.5 * (lo + hi);
        (m1p(mid) > 0 ? lo : hi) = mid;
    }
    // the explicit constants are conservative: critical amplitude is tiny
    CHECK(lo > 1e-7);
    CHECK(hi < 1e-4);
}
