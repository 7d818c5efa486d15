#pragma once

#include <map>
#include <optional>

#include "mnls/admissibility.hpp"
#include "mnls/fftops.hpp"
#include "mnls/op.hpp"
#include "mnls/weights.hpp"

namespace mnls {

// ---- basic functionals -------------------------------------------------

double mass(const Field& u, double cell_vol);
// E = 1/2 q(u) + int F(|u|)
double energy(const DiscreteOperator& op, const Nonlinearity& nl, const Field& u);
double lp_norm(const Field& u, double p, double cell_vol);

// ---- Morrey-Campanato norms --------------------------------------------

enum class McKind { Xdot, X, Ydot, Y };

struct McResult {
    double value = 0;      // the norm (not squared)
    double argmax_R = 0;   // maximizing radius
};

// kind Xdot/X act on surface sums of |v|^2; Ydot/Y on ball sums
McResult mc_norm(const ShellPartition& sh, const RealField& density_sq, McKind kind);
McResult mc_norm_field(const ShellPartition& sh, const Field& v, McKind kind);

// ---- estimate reports ----------------------------------------------------

struct EstimateReport {
    std::string estimate;
    double lhs = 0, rhs = 0;
    std::optional<double> ratio;
    std::vector<std::pair<std::string, double>> components;
    std::vector<std::pair<std::string, double>> constants;
    double T = 0;
    std::string grid_id, scenario_id;
    std::vector<std::string> caveats;
    void finalize_ratio() {
        if (rhs > 0) ratio = lhs / rhs;
    }
};

// ---- reversed space-time accumulators ------------------------------------

// accumulates, step by step, everything the smoothing / bilinear reports
// need: per-shell time integrals of surface |u|^2 and ball |grad_b u|^2,
// the repulsivity brackets with 1/|x| and 1/<x> weights, weighted L2 series,
// the L4 accumulation and (optionally) the pairwise-kernel accumulation.
class SpaceTimeAccumulator {
  public:
    SpaceTimeAccumulator(const DiscreteOperator& op, const ShellPartition& sh,
                         const Nonlinearity& nl, double eps_exp, bool with_kernel = false,
                         int kernel_stride = 5);

    void add_step(double t, const Field& u);

    // horizons at which prefix snapshots of all integrals are recorded
    void mark_horizon(double T, const Field& u_at_T);

    struct Horizon {
        double T = 0;
        std::vector<double> shell_u2;    // per-shell int_0^T surface sums
        std::vector<double> ball_grad2;  // per-shell int_0^T cumulative ball sums
        double bracket_absx = 0;         // int int (f(u)ubar - 2F)/|x|
        double bracket_brax = 0;         // same with 1/<x>
        double w32_u2 = 0;               // || <x>^{-3/2-eps} u ||^2_{L2L2}
        double w12_grad2 = 0;            // || <x>^{-1/2-eps} grad_b u ||^2
        double w1_u2 = 0;                // || <x>^{-1-eps} u ||^2
        double l4_int = 0;               // int ||u||_{L4}^4
        double kernel_int = 0;           // int I(t) dt (zero if disabled)
        double hhalf_end = 0;            // ||u(T)||_{H^{1/2}-dot}
        double mass_end = 0;
        double boundary_frac = 0;
    };
    const std::vector<Horizon>& horizons() const { return horizons_; }
    double hhalf_initial() const { return hhalf0_; }
    double mass_initial() const { return mass0_; }
    double eps_exp() const { return eps_; }
    const ShellPartition& shells() const { return *sh_; }

  private:
    const DiscreteOperator* op_;
    const ShellPartition* sh_;
    const Nonlinearity* nl_;
    double eps_;
    bool with_kernel_;
    int kernel_stride_;
    std::unique_ptr<InteractionKernel> kernel_;

    double prev_t_ = 0;
    bool first_ = true;
    int step_count_ = 0;
    double hhalf0_ = 0, mass0_ = 0;

    // running trapezoid integrals
    std::vector<double> shell_u2_, ball_grad2_;
    std::vector<double> prev_shell_u2_, prev_ball_grad2_;
    double bracket_absx_ = 0, bracket_brax_ = 0, w32_ = 0, w12_ = 0, w1_ = 0, l4_ = 0,
           kernel_int_ = 0;
    double prev_bracket_absx_ = 0, prev_bracket_brax_ = 0, prev_w32_ = 0, prev_w12_ = 0,
           prev_w1_ = 0, prev_l4_ = 0;
    double prev_kernel_t_ = 0, prev_kernel_v_ = 0;
    bool kernel_first_ = true;

    // cached cell weights
    RealField inv_absx_, inv_brax_, w32w_, w12w_, w1w_;

    std::vector<Horizon> horizons_;
};

enum class SmoothingVariant { thm_n_ge_4, thm_n_eq_3, weighted, linear_flow };

EstimateReport smoothing_report(const SpaceTimeAccumulator& acc, std::size_t horizon_index,
                                SmoothingVariant variant);

enum class InteractionVariant { kernel_n_ge_4, l4_n_eq_3 };

EstimateReport interaction_report(const SpaceTimeAccumulator& acc, std::size_t horizon_index,
                                  InteractionVariant variant);

// ---- lemma suite ----------------------------------------------------------

struct LemmaResult {
    std::string lemma;
    double lhs = 0, rhs = 0;   // worst case over the family
    double constant = 0;       // paper constant (before the (1+eps_h) slack)
    bool holds = true;
    int worst_field = -1;
};

// built-in family: Gaussians x polynomials and off-center bumps
std::vector<Field> lemma_test_family(const Grid& g, int count, unsigned seed);

std::vector<LemmaResult> lemma_suite(const DiscreteOperator& op, const ShellPartition& sh,
                                     const std::vector<Field>& family, double delta,
                                     double eps_h = 0.1);

// ---- Sobolev equivalences --------------------------------------------------

struct RatioInterval {
    double min_ratio = 0, max_ratio = 0;
};

// || (-L)^{1/2} v || / || grad v || over a sample family (flux gradient)
RatioInterval equiv_h1_ratio(const DiscreteOperator& op, const std::vector<Field>& family);
// || (-L)^{s/2} v ||_{L2} / || v ||_{H^s-dot} for s in {1/2, 1}
RatioInterval homsob_ratio(const DiscreteOperator& op, const std::vector<Field>& family,
                           double s);

// ---- virial residual --------------------------------------------------------

struct VirialSample {
    Field u_minus, u, u_plus;  // consecutive snapshots
    double t = 0, dt = 0;
    bool linear = false;       // true when the trajectory solves the f = 0 flow
};

struct VirialResidual {
    double lhs_dt = 0;        // centered d/dt of the momentum functional
    double rhs_sum = 0;       // the five volume groups
    double divergence = 0;    // discretely integrated divergence group
    double residual = 0;      // lhs - rhs - divergence
    std::map<std::string, double> groups;
};

VirialResidual virial_residual(const DiscreteOperator& op, const RadialWeight& w,
                               const ShellPartition& sh, const VirialSample& s);

// momentum functional D(u) = Im int a(grad psi, grad_b u) u
double virial_momentum(const DiscreteOperator& op, const RadialWeight& w, const Field& u);

// ---- decay / scattering diagnostics ----------------------------------------

struct SeriesTable {
    std::vector<double> times;
    std::map<std::string, std::vector<double>> cols;
};

// admissible couple check in exact rational arithmetic; p = num/den, infinite
// p encoded as den = 0
struct StrichartzCouple {
    Rational p, q;
    bool admissible = false;
    bool endpoint = false;
};
StrichartzCouple admissible_check(Rational p, Rational q, int n);

double strichartz_norm(const SeriesTable& series, const std::string& lq_col, double p);

struct DecayVerdict {
    double r = 0;
    double decay_factor = 0;  // ||u(T)||_r / max_t ||u(t)||_r
    bool r_admissible = true; // r in (2, 2n/(n-2))
};
DecayVerdict scattering_verdict(const SeriesTable& series, const std::string& col, double r,
                                int n);

struct AsymptoticState {
    Field u_plus;                       // e^{i T L} u(T)
    std::vector<double> increment_h1;   // || v(t_{k+1}) - v(t_k) ||_{H1-equiv}
    std::vector<double> times;
};

// v(t_k) = e^{i t_k L} u(t_k); increments in the mass + quadratic-form norm
// (exactly invariant under the discrete linear flow)
AsymptoticState asymptotic_state(const DiscreteOperator& op,
                                 const std::vector<Field>& snapshots,
                                 const std::vector<double>& times, double dt_linear);

double h1_norm(const DiscreteOperator& op, const Field& u);

}  // namespace mnls
