#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mnls/coeffs.hpp"

namespace mnls {

enum class AssumptionVariant { n_ge_4, n_eq_3 };

struct AssumptionEntry {
    std::string name;
    double measured_sup;
    double bound_constant;
    bool holds;
    std::string note;
};

struct AdmissibilityReport {
    AssumptionVariant variant;
    std::vector<AssumptionEntry> entries;
    // measured structural constants
    double nu = 0, N = 0;
    double Ca = 0, Cb = 0, Cplus = 0, Cminus = 0, Cc = 0, Ccprime = 0, CI = 0;
    double Sb = 0;  // sup |b(x)| <x>, used by the weighted gradient equivalence
    std::string sample_description;
    bool all_hold() const {
        for (auto& e : entries)
            if (!e.holds) return false;
        return true;
    }
    const AssumptionEntry* find(const std::string& name) const;
};

// sample set: grid cells (subsampled) plus log-spaced radial probes out to
// 10x the box radius along a fixed direction set
std::vector<Point> admissibility_samples(const Grid& g, int max_grid_samples = 20000);

AdmissibilityReport check_admissibility(const CoefficientSet& cs,
                                        const std::vector<Point>& samples,
                                        AssumptionVariant variant);

// boundary star-shape condition a(x) x . nu(x) <= 0 on the obstacle boundary
struct StarshapeReport {
    bool holds = true;
    bool vacuous = false;  // no obstacle
    Point worst_point{};
    double worst_value = -1e300;
    double tolerance = 1e-8;
};
StarshapeReport starshape_check(const Grid& g, const CoefficientSet& cs);

// exact rational for the ledger regression values
struct Rational {
    std::int64_t num = 0, den = 1;
    Rational() = default;
    Rational(std::int64_t n, std::int64_t d);
    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    double value() const { return double(num) / double(den); }
};

// K0 = (n-1)/6 - (n+3)/2 * ratio + n, with ratio = N/nu given as a rational
Rational k0_exact(int n, Rational ratio);
// square of the ratio threshold: (n^2 + 2n + 15) / (6 (n + 2))   [3 <= n <= 25]
Rational assratio_threshold_sq_exact(int n);
// C- threshold 2 sqrt(nu)/(n-2) for rational sqrt(nu) inputs
Rational condcm_threshold_exact(Rational sqrt_nu, int n);

struct SmallnessLedger {
    int n = 3;
    double delta = 1;
    double nu = 1, N = 1, ratio = 1;
    double Ca = 0, Cb = 0, Cminus = 0, Cc = 0, CI = 0;
    double K0 = 0;
    double gamma0 = 0;
    double M1 = 0, M2 = 0, M3 = 0;    // n >= 4 route
    double M1p = 0, M2p = 0;          // n = 3 route
    double assratio_threshold = 0;    // threshold on N/nu
    double condCm_threshold = 0;      // threshold on C-
    double remark_third_condition = 0;  // (n - N/nu) - n/(n-1) * nu * Ca, as printed
    bool assratio_ok = false;
    bool condCm_ok = false;
    bool verdict = false;             // positivity of the route M's + both thresholds
};

SmallnessLedger smallness_ledger(const AdmissibilityReport& rep, const CoefficientSet& cs);

// gamma0 from the weight positivity bound with worst-case metric bounds:
// min( (n-1)/(2n) (n nu - Ca), 1/2 [ (n-1)/n (n nu - N) - Ca ] )
double gamma0_worst_case(int n, double nu, double N, double Ca);

}  // namespace mnls
