#pragma once

#include "mnls/coeffs.hpp"

namespace mnls {

// radial derivative table psi', psi'', psi''', psi'''' (smooth parts only)
struct WeightTable {
    double p1 = 0, p2 = 0, p3 = 0, p4 = 0;
};

class RadialWeight {
  public:
    virtual ~RadialWeight() = default;
    virtual double value(double r) const = 0;
    virtual WeightTable table(double r) const = 0;
    // surface-delta part of psi'''' : coefficient c with support |x| = radius;
    // radius < 0 means no singular part
    virtual double shell_coeff() const { return 0.0; }
    virtual double shell_radius() const { return -1.0; }
    virtual std::string name() const = 0;
};

// the scaled weight of the smoothing estimate:
//   psi_R(|x|) = R psi_1(|x|/R),   psi_1'(s) = (n-1)/(2n) s        (s <= 1)
//                                  psi_1'(s) = 1/2 - s^{1-n}/(2n)  (s > 1)
class MorawetzWeight : public RadialWeight {
  public:
    MorawetzWeight(int dim, double scale);
    double value(double r) const override;
    WeightTable table(double r) const override;
    double shell_coeff() const override;   // -(n-1)/(2 R^2)
    double shell_radius() const override { return R_; }
    std::string name() const override { return "morawetz"; }

    // psi'' - psi'/|x| : 0 inside, -(1 - (R/r)^{n-1})/(2r) outside
    double curvature_combo(double r) const;
    int dim() const { return n_; }
    double scale() const { return R_; }

  private:
    int n_;
    double R_;
};

// the bilinear weight <r>_sigma = sqrt(sigma^2 + r^2); sigma = 0 gives |r|
class InteractionWeight : public RadialWeight {
  public:
    explicit InteractionWeight(double sigma);
    double value(double r) const override;
    WeightTable table(double r) const override;
    std::string name() const override { return "interaction"; }

    double dd_combo(double r) const;   // psi''/r^2 - psi'/r^3  ( = -1/<r>^3 )
    double ddd_combo(double r) const;  // psi''' - psi''/r
    double sigma() const { return sigma_; }

  private:
    double sigma_;
};

// metric-adapted quantities of a radial weight at a point ----------------

// A psi = ahat psi'' + (abar - ahat) psi'/r + a_{lm;l} xhat_m psi'
double a_psi(const CoefficientSet& cs, const Point& x, const RadialWeight& w);

// grad(A psi) evaluated analytically (used by the momentum-flux vector)
void grad_a_psi(const CoefficientSet& cs, const Point& x, const RadialWeight& w,
                double (&out)[kMaxDim]);

struct BilapSplit {
    double S = 0;       // principal part (vanishes structurally for a = I, n = 3)
    double R_rem = 0;   // remainder; every term carries a derivative of a
    double R_bound = 0; // decay envelope for |R_rem|
    bool bound_holds = true;
    bool sign_argument_applicable = true;  // ratio condition for the S sign analysis
};

// A^2 psi = S + R away from the weight's singular shell
BilapSplit bilap_split(const CoefficientSet& cs, const Point& x, const RadialWeight& w,
                       double Ca = 0.0, double Nbound = 1.0,
                       double ratio_threshold_ok = 1.0);

// alpha_{lm} = 2 a_{jm} d_j(a_{lk} d_k psi) - a_{jk} d_k psi d_j a_{lm}
void alpha_matrix(const CoefficientSet& cs, const Point& x, const RadialWeight& w,
                  double (&alpha)[kMaxDim][kMaxDim]);

}  // namespace mnls
