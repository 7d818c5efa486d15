#pragma once

#include "mnls/functionals.hpp"

namespace mnls {

struct InitialSpec {
    enum class Kind { gaussian, ring, eigenmode, file } kind = Kind::gaussian;
    Point center{};
    double width = 1.0;
    Point momentum{};
    double amplitude = 1.0;
    double ring_radius = 2.0;
    int mode = 1;              // sin-mode index per axis (free eigenmode)
    std::string path;          // file kind
};

struct SpongeSpec {
    bool on = false;
    double width = 1.5;
    double strength = 5.0;
};

enum class Integrator { crank_nicolson, strang_free };

struct Scenario {
    InitialSpec initial;
    double dt = 5e-3;
    double t_max = 1.0;
    int snapshot_stride = 20;
    Integrator integrator = Integrator::crank_nicolson;
    double fp_tol = 1e-12;
    int fp_max = 50;
    SpongeSpec sponge;
    double boundary_threshold = 1e-6;
    std::vector<double> r_list = {4.0};
    bool coefficients_free = false;  // strang_free requires this
    bool linear = false;             // drop the nonlinearity
    std::string id = "scenario";
};

Field make_initial(const Grid& g, const InitialSpec& spec);

struct StepInfo {
    int fp_iterations = 0;
    double fp_residual = 0.0;
    double solver_residual = 0.0;
};

// conservative midpoint stepper for i u_t - L u + f(u) = 0
class CrankNicolsonStepper {
  public:
    CrankNicolsonStepper(const DiscreteOperator& op, const Nonlinearity* nl, double fp_tol,
                         int fp_max);
    StepInfo step(Field& u, double dt);

  private:
    const DiscreteOperator* op_;
    const Nonlinearity* nl_;  // nullptr = linear flow
    double fp_tol_;
    int fp_max_;
    Field rhs0_, rhs_, w_, fmid_;
};

// split-step reference integrator for the a=I, b=0, c=0 flow
class StrangFreeStepper {
  public:
    StrangFreeStepper(const Grid& g, const Nonlinearity* nl);
    void step(Field& u, double dt);

  private:
    const Grid* grid_;
    const Nonlinearity* nl_;
    FftBox box_;
    void half_kick(Field& u, double dt);
};

struct BoundaryContamination : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SolverDivergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class StepObserver {
  public:
    virtual ~StepObserver() = default;
    virtual void observe(int step, double t, const Field& u) = 0;
};

struct Trajectory {
    std::vector<double> snapshot_times;
    std::vector<Field> snapshots;
    SeriesTable series;  // t, mass, energy, L<r>..., boundary_frac, fp_iters, fp_residual
    int steps = 0;
    std::string scenario_id;
};

Trajectory run(const DiscreteOperator& op, const Scenario& sc,
               const std::vector<StepObserver*>& observers = {});

// sponge damping factor at a point (1 in the bulk)
double sponge_factor(const Grid& g, const SpongeSpec& sp, const Point& x, double dt);

}  // namespace mnls
