#include "mnls/evolution.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace mnls {

Field make_initial(const Grid& g, const InitialSpec& spec) {
    const int n = g.dim();
    Field u = g.zeros();
    switch (spec.kind) {
        case InitialSpec::Kind::gaussian: {
            double w2 = 2.0 * sq(spec.width);
            for (int ord = 0; ord < g.interior_size(); ++ord) {
                Point x = g.coords(ord);
                double r2 = 0, ph = 0;
                for (int k = 0; k < n; ++k) {
                    r2 += sq(x[k] - spec.center[k]);
                    ph += spec.momentum[k] * x[k];
                }
                u[ord] = spec.amplitude * std::exp(-r2 / w2) * cplx(std::cos(ph), std::sin(ph));
            }
            break;
        }
        case InitialSpec::Kind::ring: {
            double w2 = 2.0 * sq(spec.width);
            for (int ord = 0; ord < g.interior_size(); ++ord) {
                double r = g.radius(ord);
                double ph = 0;
                Point x = g.coords(ord);
                for (int k = 0; k < n; ++k) ph += spec.momentum[k] * x[k];
                u[ord] = spec.amplitude * std::exp(-sq(r - spec.ring_radius) / w2) *
                         cplx(std::cos(ph), std::sin(ph));
            }
            break;
        }
        case InitialSpec::Kind::eigenmode: {
            // sin-mode of the zero-ghost lattice (exact free eigenvector)
            const int M = g.points_per_axis();
            for (int ord = 0; ord < g.interior_size(); ++ord) {
                std::int64_t f = g.full_index(ord);
                double v = spec.amplitude;
                std::int64_t rem = f;
                for (int k = 0; k < n; ++k) {
                    int idx = static_cast<int>(rem % M);
                    rem /= M;
                    v *= std::sin(spec.mode * M_PI * (idx + 1.0) / (M + 1.0));
                }
                u[ord] = v;
            }
            break;
        }
        case InitialSpec::Kind::file: {
            std::ifstream in(spec.path, std::ios::binary);
            if (!in) throw std::runtime_error("initial datum: cannot open " + spec.path);
            Eigen::VectorXcd full(g.full_size());
            in.read(reinterpret_cast<char*>(full.data()),
                    static_cast<std::streamsize>(sizeof(cplx) * g.full_size()));
            if (!in) throw std::runtime_error("initial datum: short read from " + spec.path);
            g.gather(full, u);
            break;
        }
    }
    return u;
}

CrankNicolsonStepper::CrankNicolsonStepper(const DiscreteOperator& op, const Nonlinearity* nl,
                                           double fp_tol, int fp_max)
    : op_(&op), nl_(nl), fp_tol_(fp_tol), fp_max_(fp_max) {}

StepInfo CrankNicolsonStepper::step(Field& u, double dt) {
    const double theta = dt / 2.0;
    StepInfo info;
    // rhs0 = (I + i theta P) u
    Field pu = op_->matrix() * u;
    rhs0_ = u + cplx(0, theta) * pu;
    if (!nl_) {
        w_ = u;  // warm start
        SolveStats st = op_->solve_cayley(rhs0_, theta, w_);
        info.solver_residual = st.residual;
        u = w_;
        return info;
    }
    const int N = static_cast<int>(u.size());
    if (fmid_.size() != N) fmid_.resize(N);
    w_ = u;
    double res = 1e300;
    int it = 0;
    for (; it < fp_max_; ++it) {
        for (int i = 0; i < N; ++i) {
            double chi = nl_->chi(std::abs(u[i]), std::abs(w_[i]));
            fmid_[i] = chi * 0.5 * (u[i] + w_[i]);
        }
        rhs_ = rhs0_ + cplx(0, dt) * fmid_;
        Field w_new = w_;
        SolveStats st = op_->solve_cayley(rhs_, theta, w_new);
        info.solver_residual = st.residual;
        res = (w_new - w_).norm() / std::max(w_new.norm(), 1e-300);
        w_ = w_new;
        if (res <= fp_tol_) break;
    }
    info.fp_iterations = it + 1;
    info.fp_residual = res;
    if (res > std::max(fp_tol_ * 100.0, 1e-9) && it == fp_max_) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "midpoint fixed-point did not converge (residual %.3e); try a smaller dt",
                      res);
        throw SolverDivergence(buf);
    }
    u = w_;
    return info;
}

StrangFreeStepper::StrangFreeStepper(const Grid& g, const Nonlinearity* nl)
    : grid_(&g), nl_(nl), box_(g.dim(), g.points_per_axis()) {}

void StrangFreeStepper::half_kick(Field& u, double dt) {
    if (!nl_) return;
    for (int i = 0; i < u.size(); ++i) {
        double s = std::abs(u[i]);
        if (s == 0) continue;
        // u_t = i f(u): exact phase rotation for gauge-invariant f
        double rate = std::real(nl_->f(cplx(s, 0))) / s;
        double ph = rate * dt * 0.5;
        u[i] *= cplx(std::cos(ph), std::sin(ph));
    }
}

void StrangFreeStepper::step(Field& u, double dt) {
    half_kick(u, dt);
    free_drift(*grid_, u, dt, box_);
    half_kick(u, dt);
}

double sponge_factor(const Grid& g, const SpongeSpec& sp, const Point& x, double dt) {
    if (!sp.on) return 1.0;
    double s = 0;
    for (int k = 0; k < g.dim(); ++k) {
        double d = std::abs(x[k]) - (g.box() - sp.width);
        if (d > 0) s += sq(d / sp.width);
    }
    return std::exp(-dt * sp.strength * s);
}

Trajectory run(const DiscreteOperator& op, const Scenario& sc,
               const std::vector<StepObserver*>& observers) {
    const Grid& g = op.grid();
    if (sc.dt <= 0) throw std::invalid_argument("scenario: dt must be positive");
    if (sc.t_max < sc.dt) throw std::invalid_argument("scenario: t_max must be >= dt");
    if (sc.integrator == Integrator::strang_free && !sc.coefficients_free)
        throw std::invalid_argument("strang integrator requires free coefficients");

    Field u = make_initial(g, sc.initial);
    const Nonlinearity* nl = sc.linear ? nullptr : &op.coeffs().nl;

    Trajectory tr;
    tr.scenario_id = sc.id;
    auto& series = tr.series;
    std::vector<std::string> rcols;
    for (double r : sc.r_list) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "L%g", r);
        rcols.emplace_back(buf);
    }

    // precompute damping profile
    std::vector<double> damp;
    if (sc.sponge.on) {
        damp.resize(g.interior_size());
        for (int ord = 0; ord < g.interior_size(); ++ord)
            damp[ord] = sponge_factor(g, sc.sponge, g.coords(ord), sc.dt);
    }

    CrankNicolsonStepper cn(op, nl, sc.fp_tol, sc.fp_max);
    std::unique_ptr<StrangFreeStepper> strang;
    if (sc.integrator == Integrator::strang_free) strang = std::make_unique<StrangFreeStepper>(g, nl);

    int steps = static_cast<int>(std::llround(sc.t_max / sc.dt));
    auto record = [&](int step, double t, const StepInfo& info) {
        series.times.push_back(t);
        series.cols["mass"].push_back(mass(u, g.cell_volume()));
        series.cols["energy"].push_back(energy(op, op.coeffs().nl, u));
        for (std::size_t i = 0; i < sc.r_list.size(); ++i)
            series.cols[rcols[i]].push_back(lp_norm(u, sc.r_list[i], g.cell_volume()));
        series.cols["boundary_frac"].push_back(g.boundary_band_fraction(u));
        series.cols["fp_iters"].push_back(info.fp_iterations);
        series.cols["fp_residual"].push_back(info.fp_residual);
        if (step % sc.snapshot_stride == 0 || step == steps) {
            tr.snapshot_times.push_back(t);
            tr.snapshots.push_back(u);
        }
        for (auto* ob : observers) ob->observe(step, t, u);
    };

    record(0, 0.0, {});
    for (int s = 1; s <= steps; ++s) {
        StepInfo info;
        if (strang)
            strang->step(u, sc.dt);
        else
            info = cn.step(u, sc.dt);
        if (sc.sponge.on)
            for (int ord = 0; ord < g.interior_size(); ++ord) u[ord] *= damp[ord];
        double t = s * sc.dt;
        record(s, t, info);
        if (!sc.sponge.on && s % 16 == 0) {
            double frac = series.cols["boundary_frac"].back();
            if (frac > sc.boundary_threshold) {
                char buf[160];
                std::snprintf(buf, sizeof buf,
                              "boundary contamination at t=%.4f: band mass fraction %.3e exceeds %.1e",
                              t, frac, sc.boundary_threshold);
                throw BoundaryContamination(buf);
            }
        }
        tr.steps = s;
    }
    return tr;
}

}  // namespace mnls
