#include "mnls/harness.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include <json.hpp>

namespace mnls {

namespace fs = std::filesystem;
using nlohmann::json;

const char* kCodeVersion = "mnls 1.0.0";

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        out << content;
    }
    fs::rename(tmp, path);
}

json admissibility_json(const AdmissibilityReport& rep) {
    json j;
    j["variant"] = rep.variant == AssumptionVariant::n_eq_3 ? "n_eq_3" : "n_ge_4";
    j["sample_set"] = rep.sample_description;
    j["nu"] = rep.nu;
    j["N"] = rep.N;
    json entries = json::array();
    for (const auto& e : rep.entries)
        entries.push_back({{"name", e.name},
                           {"measured_sup", e.measured_sup},
                           {"bound_constant", e.bound_constant},
                           {"holds", e.holds},
                           {"note", e.note}});
    j["entries"] = entries;
    return j;
}

json ledger_json(const SmallnessLedger& lg) {
    json j;
    j["n"] = lg.n;
    j["delta"] = lg.delta;
    j["nu"] = lg.nu;
    j["N"] = lg.N;
    j["ratio"] = lg.ratio;
    j["Ca"] = lg.Ca;
    j["Cb"] = lg.Cb;
    j["Cminus"] = lg.Cminus;
    j["Cc"] = lg.Cc;
    j["CI"] = lg.CI;
    j["K0"] = lg.K0;
    j["gamma0"] = lg.gamma0;
    j["M1"] = lg.M1;
    j["M2"] = lg.M2;
    j["M3"] = lg.M3;
    j["M1_prime"] = lg.M1p;
    j["M2_prime"] = lg.M2p;
    j["assratio_threshold"] = lg.assratio_threshold;
    j["condCm_threshold"] = lg.condCm_threshold;
    j["remark_third_condition"] = lg.remark_third_condition;
    j["assratio_ok"] = lg.assratio_ok;
    j["condCm_ok"] = lg.condCm_ok;
    j["verdict"] = lg.verdict;
    return j;
}

json report_to_json(const EstimateReport& rep) {
    json j;
    j["estimate"] = rep.estimate;
    j["lhs"] = rep.lhs;
    j["rhs"] = rep.rhs;
    if (rep.ratio)
        j["ratio"] = *rep.ratio;
    else
        j["ratio"] = nullptr;
    json comp = json::object(), cons = json::object();
    for (auto& [k, v] : rep.components) comp[k] = v;
    for (auto& [k, v] : rep.constants) cons[k] = v;
    j["components"] = comp;
    j["constants"] = cons;
    j["T"] = rep.T;
    j["grid"] = rep.grid_id;
    j["scenario"] = rep.scenario_id;
    j["caveats"] = rep.caveats;
    return j;
}

// observer wiring the space-time accumulator with horizon marks
class AccObserver : public StepObserver {
  public:
    AccObserver(SpaceTimeAccumulator& acc, std::vector<double> horizons, double dt)
        : acc_(&acc), horizons_(std::move(horizons)), dt_(dt) {}
    void observe(int, double t, const Field& u) override {
        acc_->add_step(t, u);
        if (next_ < horizons_.size() && t >= horizons_[next_] - dt_ / 2.0) {
            acc_->mark_horizon(t, u);
            ++next_;
        }
    }

  private:
    SpaceTimeAccumulator* acc_;
    std::vector<double> horizons_;
    double dt_;
    std::size_t next_ = 0;
};

class VirialObserver : public StepObserver {
  public:
    VirialObserver(double t_star, double dt, bool linear = false) : dt_(dt) {
        k_ = static_cast<int>(std::llround(t_star / dt));
        sample_.linear = linear;
    }
    void observe(int step, double t, const Field& u) override {
        if (step == k_ - 1) sample_.u_minus = u;
        if (step == k_) {
            sample_.u = u;
            sample_.t = t;
            sample_.dt = dt_;
        }
        if (step == k_ + 1) {
            sample_.u_plus = u;
            complete_ = true;
        }
    }
    bool complete() const { return complete_; }
    const VirialSample& sample() const { return sample_; }

  private:
    double dt_;
    int k_;
    VirialSample sample_;
    bool complete_ = false;
};

std::string series_csv(const SeriesTable& s) {
    std::ostringstream os;
    os << "t";
    for (auto& [name, col] : s.cols) os << "," << name;
    os << "\n";
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        os << fmt17(s.times[i]);
        for (auto& [name, col] : s.cols) os << "," << fmt17(col[i]);
        os << "\n";
    }
    return os.str();
}

double linear_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = static_cast<int>(x.size());
    for (int i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

namespace {
void append_starshape(AdmissibilityReport& rep, const Grid& g, const CoefficientSet& cs) {
    StarshapeReport sr = starshape_check(g, cs);
    rep.entries.push_back({"boundary_starshape", sr.vacuous ? 0.0 : sr.worst_value, sr.tolerance,
                           sr.holds,
                           sr.vacuous ? "vacuously true (no obstacle)"
                                      : "max of a(x) x . nu over the obstacle boundary"});
}
}  // namespace

CheckResult run_check(const RunConfig& cfg, const std::string& outdir) {
    Grid g = make_grid(cfg);
    CoefficientSet cs = make_coefficient_set(cfg);
    auto samples = admissibility_samples(g);
    AssumptionVariant variant =
        cfg.grid.dim == 3 ? AssumptionVariant::n_eq_3 : AssumptionVariant::n_ge_4;
    CheckResult res{check_admissibility(cs, samples, variant), {}};
    append_starshape(res.report, g, cs);
    res.ledger = smallness_ledger(res.report, cs);
    if (!outdir.empty()) {
        fs::create_directories(outdir);
        write_text_atomic(outdir + "/admissibility.json", admissibility_json(res.report).dump(2));
        write_text_atomic(outdir + "/ledger.json", ledger_json(res.ledger).dump(2));
    }
    return res;
}

RunResult run_once(const RunConfig& cfg, const std::string& outdir, double eps_exp_override,
                   bool write_snapshots) {
    auto t0 = std::chrono::steady_clock::now();
    RunResult res;
    if (!outdir.empty()) fs::create_directories(outdir);

    Grid g = make_grid(cfg);
    CoefficientSet cs = make_coefficient_set(cfg);
    DiscreteOperator op(g, cs);
    ShellPartition sh(g, cfg.grid.shells);

    // gamma range advisory (warning, not an error)
    {
        double lo = 1.0 + 4.0 / g.dim();
        double hi = g.dim() > 2 ? 1.0 + 4.0 / (g.dim() - 2) : 1e300;
        if (!cfg.scenario.linear && (cs.nl.gamma <= lo || cs.nl.gamma >= hi))
            std::fprintf(stderr,
                         "warning: gamma=%.3g outside the scattering range (%.3g, %.3g); "
                         "local theory still applies for gamma < %.3g\n",
                         cs.nl.gamma, lo, hi, hi);
        if (g.plumbing_only())
            std::fprintf(stderr, "warning: dimension %d grid is plumbing-only (theory needs n >= 3)\n",
                         g.dim());
    }

    auto samples = admissibility_samples(g);
    AssumptionVariant variant =
        g.dim() == 3 ? AssumptionVariant::n_eq_3 : AssumptionVariant::n_ge_4;
    res.admissibility = check_admissibility(cs, samples, variant);
    append_starshape(res.admissibility, g, cs);
    res.ledger = smallness_ledger(res.admissibility, cs);
    if (!res.ledger.verdict)
        std::fprintf(stderr, "note: smallness-ledger verdict negative; run proceeds, flagged\n");

    double eps = eps_exp_override > 0 ? eps_exp_override : cfg.functionals.eps_exp;
    bool kernel = false;
    if (cfg.functionals.interaction == "kernel") kernel = true;
    if (cfg.functionals.interaction == "auto") kernel = (g.dim() >= 4);
    bool want_acc = cfg.functionals.smoothing != "none" || cfg.functionals.interaction != "none";

    std::vector<double> horizons = cfg.functionals.report_times;
    if (horizons.empty()) horizons = {cfg.scenario.t_max};

    std::unique_ptr<SpaceTimeAccumulator> acc;
    std::unique_ptr<AccObserver> accobs;
    std::unique_ptr<VirialObserver> virobs;
    std::vector<StepObserver*> obs;
    if (want_acc) {
        acc = std::make_unique<SpaceTimeAccumulator>(op, sh, cs.nl, eps, kernel,
                                                     cfg.functionals.interaction_stride);
        accobs = std::make_unique<AccObserver>(*acc, horizons, cfg.scenario.dt);
        obs.push_back(accobs.get());
    }
    if (cfg.functionals.virial_time > 0) {
        virobs = std::make_unique<VirialObserver>(cfg.functionals.virial_time, cfg.scenario.dt,
                                                  cfg.scenario.linear);
        obs.push_back(virobs.get());
    }

    res.trajectory = run(op, cfg.scenario, obs);

    // reports
    auto push_smoothing = [&](SmoothingVariant v) {
        for (std::size_t hi = 0; hi < acc->horizons().size(); ++hi) {
            EstimateReport rep = smoothing_report(*acc, hi, v);
            rep.grid_id = g.id();
            rep.scenario_id = cfg.scenario.id;
            res.reports.push_back(rep);
        }
    };
    if (acc) {
        const std::string& sm = cfg.functionals.smoothing;
        if (sm == "n_ge_4" || (sm == "auto" && g.dim() >= 4)) push_smoothing(SmoothingVariant::thm_n_ge_4);
        if (sm == "n_eq_3" || (sm == "auto" && g.dim() == 3)) push_smoothing(SmoothingVariant::thm_n_eq_3);
        if (sm == "weighted" || sm == "auto") push_smoothing(SmoothingVariant::weighted);
        if (sm == "linear" || (sm == "auto" && cfg.scenario.linear))
            push_smoothing(SmoothingVariant::linear_flow);
        if (cfg.functionals.interaction != "none") {
            InteractionVariant iv = kernel ? InteractionVariant::kernel_n_ge_4
                                           : InteractionVariant::l4_n_eq_3;
            for (std::size_t hi = 0; hi < acc->horizons().size(); ++hi) {
                EstimateReport rep = interaction_report(*acc, hi, iv);
                rep.grid_id = g.id();
                rep.scenario_id = cfg.scenario.id;
                res.reports.push_back(rep);
            }
        }
    }

    json virial_out;
    if (virobs && virobs->complete()) {
        MorawetzWeight mw(g.dim(), cfg.functionals.virial_morawetz_scale);
        InteractionWeight iw(cfg.functionals.virial_sigma);
        for (const RadialWeight* w : {static_cast<const RadialWeight*>(&mw),
                                      static_cast<const RadialWeight*>(&iw)}) {
            VirialResidual vr = virial_residual(op, *w, sh, virobs->sample());
            json jv;
            jv["weight"] = w->name();
            jv["t"] = virobs->sample().t;
            jv["lhs_dt"] = vr.lhs_dt;
            jv["rhs_sum"] = vr.rhs_sum;
            jv["divergence"] = vr.divergence;
            jv["residual"] = vr.residual;
            for (auto& [k, v] : vr.groups) jv["groups"][k] = v;
            virial_out.push_back(jv);
        }
    }

    // artifacts
    RunManifest& man = res.manifest;
    man.scenario_hash = cfg.hash();
    man.code_version = kCodeVersion;
    man.grid_id = g.id();
    man.ledger_verdict = res.ledger.verdict;
    man.steps = res.trajectory.steps;
    if (!outdir.empty()) {
        write_text_atomic(outdir + "/series.csv", series_csv(res.trajectory.series));
        man.artifacts.push_back("series.csv");
        write_text_atomic(outdir + "/admissibility.json", admissibility_json(res.admissibility).dump(2));
        man.artifacts.push_back("admissibility.json");
        write_text_atomic(outdir + "/ledger.json", ledger_json(res.ledger).dump(2));
        man.artifacts.push_back("ledger.json");
        {
            json arr = json::array();
            for (const auto& r : res.reports) arr.push_back(report_to_json(r));
            write_text_atomic(outdir + "/reports.json", arr.dump(2));
            man.artifacts.push_back("reports.json");
            std::ostringstream os;
            os << "estimate,T,lhs,rhs,ratio\n";
            for (const auto& r : res.reports)
                os << r.estimate << "," << fmt17(r.T) << "," << fmt17(r.lhs) << "," << fmt17(r.rhs)
                   << "," << (r.ratio ? fmt17(*r.ratio) : std::string("nan")) << "\n";
            write_text_atomic(outdir + "/reports.csv", os.str());
            man.artifacts.push_back("reports.csv");
        }
        if (!virial_out.is_null()) {
            write_text_atomic(outdir + "/virial.json", virial_out.dump(2));
            man.artifacts.push_back("virial.json");
        }
        if (write_snapshots) {
            for (std::size_t i = 0; i < res.trajectory.snapshots.size(); ++i) {
                char name[64];
                std::snprintf(name, sizeof name, "snap_%06zu.bin", i);
                write_field(outdir + "/" + name, g, res.trajectory.snapshots[i],
                            res.trajectory.snapshot_times[i]);
                man.artifacts.push_back(name);
                man.artifacts.push_back(std::string(name) + ".json");
            }
        }
        auto t1 = std::chrono::steady_clock::now();
        man.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
        json jm;
        jm["scenario_hash"] = man.scenario_hash;
        jm["code_version"] = man.code_version;
        jm["grid"] = man.grid_id;
        jm["ledger_verdict"] = man.ledger_verdict;
        jm["artifacts"] = man.artifacts;
        jm["wall_seconds"] = man.wall_seconds;
        jm["steps"] = man.steps;
        write_text_atomic(outdir + "/manifest.json", jm.dump(2));
    }
    return res;
}

int run_sweep(const RunConfig& cfg, const std::string& outdir, int parallelism) {
    fs::create_directories(outdir);
    std::vector<double> values = cfg.sweep.values;
    if (values.empty()) values = {cfg.scenario.t_max};
    const std::string axis = cfg.sweep.axis;

    struct Row {
        double value;
        std::vector<EstimateReport> reports;
    };
    std::vector<Row> rows(values.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex err_mx;

    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= values.size() || failed) return;
            RunConfig c = cfg;
            double v = values[i];
            if (axis == "T")
                c.scenario.t_max = v;
            else if (axis == "amplitude")
                c.scenario.initial.amplitude = v;
            else if (axis == "coeff-scale") {
                c.coeff.bump_amp *= v;
                c.coeff.beta *= v;
                c.coeff.kappa *= v;
            } else if (axis == "dt")
                c.scenario.dt = v;
            else if (axis == "h")
                c.grid.points = std::max(4, static_cast<int>(std::llround(2.0 * c.grid.box / v)));
            else if (axis != "none")
                throw ConfigError("unknown sweep axis: " + axis);
            c.functionals.report_times = {c.scenario.t_max};
            char sub[32];
            std::snprintf(sub, sizeof sub, "val_%03zu", i);
            try {
                RunResult r = run_once(c, outdir + "/" + sub, -1, false);
                rows[i] = {v, r.reports};
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lk(err_mx);
                if (!failed) first_error = e.what();
                failed = true;
            }
        }
    };
    int nw = std::max(1, std::min<int>(parallelism, static_cast<int>(values.size())));
    std::vector<std::thread> pool;
    for (int i = 0; i < nw; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failed) throw std::runtime_error("sweep worker failed: " + first_error);

    std::ostringstream csv, dat;
    csv << "axis_value,estimate,T,lhs,rhs,ratio\n";
    dat << "# sweep axis: " << axis << "\n# value lhs rhs ratio (one block per estimate)\n";
    std::vector<std::string> names;
    for (const auto& row : rows)
        for (const auto& r : row.reports)
            if (std::find(names.begin(), names.end(), r.estimate) == names.end())
                names.push_back(r.estimate);
    for (const auto& est : names) {
        dat << "# estimate: " << est << "\n";
        for (const auto& row : rows)
            for (const auto& r : row.reports)
                if (r.estimate == est) {
                    csv << fmt17(row.value) << "," << r.estimate << "," << fmt17(r.T) << ","
                        << fmt17(r.lhs) << "," << fmt17(r.rhs) << ","
                        << (r.ratio ? fmt17(*r.ratio) : std::string("nan")) << "\n";
                    dat << fmt17(row.value) << " " << fmt17(r.lhs) << " " << fmt17(r.rhs) << " "
                        << (r.ratio ? fmt17(*r.ratio) : std::string("nan")) << "\n";
                }
        dat << "\n\n";
    }
    write_text_atomic(outdir + "/sweep.csv", csv.str());
    write_text_atomic(outdir + "/sweep.dat", dat.str());
    write_text_atomic(outdir + "/sweep.gp",
                      "set logscale x\nset xlabel 'axis value'\nset ylabel 'ratio'\n"
                      "plot 'sweep.dat' using 1:4 with linespoints title 'lhs/rhs'\n");
    return 0;
}

Field oracle_free_gaussian(const Grid& g, const InitialSpec& spec, double t) {
    const int n = g.dim();
    double w2 = sq(spec.width);
    cplx shrink = std::pow(cplx(1.0, -2.0 * t / w2), -0.5 * n);
    double p2 = 0;
    for (int k = 0; k < n; ++k) p2 += sq(spec.momentum[k]);
    cplx denom(2.0 * w2, -4.0 * t);
    Field u = g.zeros();
    for (int ord = 0; ord < g.interior_size(); ++ord) {
        Point x = g.coords(ord);
        double y2 = 0, px = 0;
        for (int k = 0; k < n; ++k) {
            double y = x[k] - spec.center[k] + 2.0 * spec.momentum[k] * t;
            y2 += y * y;
            px += spec.momentum[k] * x[k];
        }
        cplx phase = std::exp(cplx(0.0, px + p2 * t));
        u[ord] = spec.amplitude * shrink * phase * std::exp(-y2 / denom);
    }
    return u;
}

Field oracle_expm(const DiscreteOperator& op, const Field& u0, double t) {
    if (!op.eig_available())
        throw std::invalid_argument("oracle_expm: grid exceeds the dense-exponential guard");
    return op.propagate(u0, t);
}

double oracle_direct_interaction(const Grid& g, const RealField& rho) {
    if (g.interior_size() > 4096)
        throw std::invalid_argument("oracle_direct_interaction: grid exceeds the 8^4 guard");
    InteractionKernel K(g, 3.0);
    return K.evaluate_direct(rho);
}

void write_field(const std::string& path, const Grid& g, const Field& u, double t) {
    Eigen::VectorXcd full;
    g.scatter(u, full);
    {
        std::ofstream out(path, std::ios::binary);
        out.write(reinterpret_cast<const char*>(full.data()),
                  static_cast<std::streamsize>(sizeof(cplx) * full.size()));
    }
    json j;
    j["dim"] = g.dim();
    j["box"] = g.box();
    j["points"] = g.points_per_axis();
    j["h"] = g.h();
    j["time"] = t;
    j["layout"] = "raw complex128 on the full box lattice, axis 0 fastest";
    if (g.obstacle().kind == Obstacle::Kind::ball) {
        j["obstacle"] = "ball";
        j["obstacle_radius"] = g.obstacle().radius;
    } else {
        j["obstacle"] = "none";
    }
    write_text_atomic(path + ".json", j.dump(2));
}

Field read_field(const std::string& path, const Grid& g) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_field: cannot open " + path);
    Eigen::VectorXcd full(g.full_size());
    in.read(reinterpret_cast<char*>(full.data()),
            static_cast<std::streamsize>(sizeof(cplx) * g.full_size()));
    if (!in) throw std::runtime_error("read_field: short read");
    Field u;
    g.gather(full, u);
    return u;
}

std::string report_json(const EstimateReport& rep) { return report_to_json(rep).dump(2); }

// ------------------------- acceptance suite --------------------------------

namespace {

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

RunConfig admissible_mix_config(bool fast) {
    RunConfig cfg;
    cfg.preset = "smooth-metric-bump";
    cfg.coeff.bump_amp = 0.02;
    cfg.coeff.bump_width = 2.0;
    cfg.coeff.beta = 0.01;
    cfg.coeff.kappa_smooth = 0.1;
    cfg.grid.dim = cfg.coeff.dim = 3;
    cfg.grid.box = 10.0;
    cfg.grid.points = fast ? 16 : 32;
    cfg.grid.shells = 32;
    cfg.scenario.initial.kind = InitialSpec::Kind::gaussian;
    cfg.scenario.initial.width = 3.2;
    cfg.scenario.initial.amplitude = 0.6;
    cfg.scenario.initial.momentum[0] = 0.2;
    cfg.scenario.dt = 5e-3;
    cfg.scenario.t_max = fast ? 1.0 : 4.0;
    cfg.scenario.fp_tol = 1e-13;
    cfg.scenario.snapshot_stride = 100;
    cfg.functionals.smoothing = "none";
    cfg.functionals.r_list = {4.0, 10.0 / 3.0};
    cfg.functionals.virial_sigma = fast ? 3.0 : 2.5;  // bilinear-weight scale resolved by the coarse grid
    cfg.scenario.boundary_threshold = 5e-3;  // recorded; gaussian tails at this box
    return cfg;
}

double drift(const std::vector<double>& v) {
    double mn = v[0], mx = v[0];
    for (double x : v) {
        mn = std::min(mn, x);
        mx = std::max(mx, x);
    }
    return (mx - mn) / std::max(std::abs(v[0]), 1e-300);
}

}  // namespace

namespace {
bool criterion_selected(int idx) {
    const char* only = std::getenv("MNLS_ONLY");
    if (!only || !*only) return true;
    std::string s(only);
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ','))
        if (!tok.empty() && std::atoi(tok.c_str()) == idx) return true;
    return false;
}
}  // namespace

std::vector<CriterionResult> verify_suite(bool fast, const std::string& workdir) {
    std::vector<CriterionResult> out;
    fs::create_directories(workdir);
    auto push = [&](int idx, const std::string& name, bool pass, const std::string& detail,
                    double sec) {
        out.push_back({idx, name, pass, detail, sec});
        std::printf("[%s] criterion %2d: %-28s %s\n", pass ? "PASS" : "FAIL", idx, name.c_str(),
                    detail.c_str());
        std::fflush(stdout);
    };

    // ---- criteria 1 + 2: conservation and virial refinement -----------------
    if (criterion_selected(1) || criterion_selected(2)) try {
        Timer tm;
        RunConfig cfg = admissible_mix_config(fast);
        cfg.functionals.virial_time = 0.5;
        cfg.functionals.virial_morawetz_scale = 3.5;
        Grid g = make_grid(cfg);
        CoefficientSet cs = make_coefficient_set(cfg);
        DiscreteOperator op(g, cs, 1);
        ShellPartition sh(g, cfg.grid.shells);
        VirialObserver vo(0.5, cfg.scenario.dt);
        std::vector<StepObserver*> obs{&vo};
        Trajectory tr = run(op, cfg.scenario, obs);
        double md = drift(tr.series.cols.at("mass"));
        double ed = drift(tr.series.cols.at("energy"));
        bool pass1 = md <= 1e-10 && ed <= 1e-6;
        char d1[160];
        std::snprintf(d1, sizeof d1, "mass drift %.2e (<=1e-10), energy drift %.2e (<=1e-6), %d steps",
                      md, ed, tr.steps);
        push(1, "conservation", pass1, d1, tm.seconds());

        Timer tm2;
        MorawetzWeight mw(3, cfg.functionals.virial_morawetz_scale);
        InteractionWeight iw(cfg.functionals.virial_sigma);
        VirialResidual vm_c = virial_residual(op, mw, sh, vo.sample());
        VirialResidual vi_c = virial_residual(op, iw, sh, vo.sample());

        RunConfig fine = cfg;
        fine.grid.points = fast ? 32 : 64;
        fine.scenario.dt = cfg.scenario.dt / 2.0;
        fine.scenario.t_max = 0.5 + 4.0 * fine.scenario.dt;
        Grid gf = make_grid(fine);
        DiscreteOperator opf(gf, cs, 1);
        ShellPartition shf(gf, fine.grid.shells);
        VirialObserver vof(0.5, fine.scenario.dt);
        std::vector<StepObserver*> obsf{&vof};
        run(opf, fine.scenario, obsf);
        VirialResidual vm_f = virial_residual(opf, mw, shf, vof.sample());
        VirialResidual vi_f = virial_residual(opf, iw, shf, vof.sample());
        double rm = std::abs(vm_c.residual) / std::max(std::abs(vm_f.residual), 1e-300);
        double ri = std::abs(vi_c.residual) / std::max(std::abs(vi_f.residual), 1e-300);
        double need = fast ? 2.5 : 3.5;
        bool pass2 = rm >= need && ri >= need;
        char d2[200];
        std::snprintf(d2, sizeof d2,
                      "residual reduction morawetz %.2f, interaction %.2f (need >= %.1f); "
                      "coarse |res| %.2e / %.2e",
                      rm, ri, need, std::abs(vm_c.residual), std::abs(vi_c.residual));
        push(2, "virial_refinement", pass2, d2, tm2.seconds());
    } catch (const std::exception& e) {
        push(1, "conservation", false, e.what(), 0);
        push(2, "virial_refinement", false, "skipped after failure", 0);
    }

    // ---- criterion 3: smoothing T-uniformity --------------------------------
    std::vector<double> l4_ratios_n3;
    try {
        Timer tm;
        auto tsweep = [&](bool linear) -> std::pair<double, std::vector<double>> {
            RunConfig cfg;
            cfg.preset = linear ? "repulsive-inverse-square" : "smooth-metric-bump";
            cfg.coeff.kappa = linear ? 0.5 : 0.0;
            cfg.coeff.bump_amp = linear ? 0.0 : 0.02;
            cfg.grid.dim = cfg.coeff.dim = 3;
            cfg.grid.box = fast ? 8.0 : 18.0;
            cfg.grid.points = fast ? 16 : 72;
            cfg.grid.shells = 40;
            // width sets the dispersion time w^2/2; it must be well inside the
            // first horizon for the T-sweep ratios to stabilize
            cfg.scenario.initial.width = fast ? 1.2 : 2.1;
            cfg.scenario.initial.amplitude = linear ? 1.0 : 0.5;
            cfg.scenario.dt = 0.02;
            cfg.scenario.t_max = fast ? 2.0 : 8.0;
            cfg.scenario.linear = linear;
            cfg.scenario.snapshot_stride = 1000000;
            cfg.scenario.fp_tol = 1e-12;
            cfg.scenario.boundary_threshold = fast ? 5e-2 : 2e-2;
            Grid g = make_grid(cfg);
            CoefficientSet cs = make_coefficient_set(cfg);
            DiscreteOperator op(g, cs, 1);
            ShellPartition sh(g, cfg.grid.shells);
            SpaceTimeAccumulator acc(op, sh, cs.nl, 0.1, false);
            std::vector<double> horizons =
                fast ? std::vector<double>{0.5, 1, 2} : std::vector<double>{1, 2, 4, 8};
            AccObserver ao(acc, horizons, cfg.scenario.dt);
            std::vector<StepObserver*> obs{&ao};
            run(op, cfg.scenario, obs);
            std::vector<double> ratios, l4;
            for (std::size_t hi = 0; hi < acc.horizons().size(); ++hi) {
                EstimateReport rep = smoothing_report(acc, hi, SmoothingVariant::thm_n_eq_3);
                if (rep.ratio) ratios.push_back(*rep.ratio);
                EstimateReport il = interaction_report(acc, hi, InteractionVariant::l4_n_eq_3);
                if (il.ratio) l4.push_back(*il.ratio);
            }
            double mx = 0, mn = 1e300;
            for (double r : ratios) {
                mx = std::max(mx, r);
                mn = std::min(mn, r);
            }
            if (!linear) l4_ratios_n3 = l4;
            return {mx / mn, ratios};
        };
        auto [spread_lin, rl] = tsweep(true);
        auto [spread_cub, rc] = tsweep(false);
        bool pass = spread_lin <= 3.0 && spread_cub <= 3.0;
        char d[200];
        std::snprintf(d, sizeof d, "ratio max/min linear %.2f, cubic %.2f (need <= 3)", spread_lin,
                      spread_cub);
        push(3, "smoothing_T_uniformity", pass, d, tm.seconds());
    } catch (const std::exception& e) {
        push(3, "smoothing_T_uniformity", false, e.what(), 0);
    }

    // ---- criterion 4: interaction Morawetz ----------------------------------
    if (criterion_selected(4)) try {
        Timer tm;
        RunConfig cfg;
        cfg.preset = "smooth-metric-bump";
        cfg.coeff.bump_amp = 2e-4;
        cfg.grid.dim = cfg.coeff.dim = 4;
        cfg.grid.box = fast ? 6.0 : 12.0;
        cfg.grid.points = fast ? 8 : 16;
        cfg.grid.shells = 24;
        cfg.coeff.gamma = 2.5;
        cfg.scenario.initial.width = fast ? 1.5 : 2.83;
        cfg.scenario.initial.amplitude = 0.4;
        cfg.scenario.dt = 0.0125;
        cfg.scenario.t_max = fast ? 1.0 : 4.0;
        cfg.scenario.snapshot_stride = 1000000;
        cfg.scenario.boundary_threshold = fast ? 0.2 : 5e-3;
        Grid g = make_grid(cfg);
        CoefficientSet cs = make_coefficient_set(cfg);
        DiscreteOperator op(g, cs, 1);
        ShellPartition sh(g, cfg.grid.shells);
        SpaceTimeAccumulator acc(op, sh, cs.nl, 0.1, true, 4);
        std::vector<double> horizons = fast ? std::vector<double>{0.5, 1} : std::vector<double>{1, 2, 4};
        AccObserver ao(acc, horizons, cfg.scenario.dt);
        std::vector<StepObserver*> obs{&ao};
        run(op, cfg.scenario, obs);
        std::vector<double> ratios;
        for (std::size_t hi = 0; hi < acc.horizons().size(); ++hi) {
            EstimateReport rep = interaction_report(acc, hi, InteractionVariant::kernel_n_ge_4);
            if (rep.ratio) ratios.push_back(*rep.ratio);
        }
        double mx = 0, mn = 1e300;
        for (double r : ratios) {
            mx = std::max(mx, r);
            mn = std::min(mn, r);
        }
        double spread4 = mx / mn;
        double spread3 = 1.0;
        if (!l4_ratios_n3.empty()) {
            double m3 = 0, n3 = 1e300;
            std::size_t use = std::min<std::size_t>(l4_ratios_n3.size(), 3);
            for (std::size_t i = 0; i < use; ++i) {
                m3 = std::max(m3, l4_ratios_n3[i]);
                n3 = std::min(n3, l4_ratios_n3[i]);
            }
            spread3 = m3 / n3;
        }

        // FFT vs direct oracle on the small grid
        Grid g8(4, 4.0, 8);
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        RealField rho(g8.interior_size());
        for (int i = 0; i < rho.size(); ++i) {
            Point x = g8.coords(i);
            double r2 = 0;
            for (int k = 0; k < 4; ++k) r2 += x[k] * x[k];
            rho[i] = std::exp(-r2) * (0.5 + uni(rng));
        }
        InteractionKernel K(g8, 3.0);
        double vf = K.evaluate(rho);
        double vd = K.evaluate_direct(rho);
        double rel = std::abs(vf - vd) / std::abs(vd);

        bool pass = spread4 <= 3.0 && spread3 <= 3.0 && rel <= 1e-8;
        char d[220];
        std::snprintf(d, sizeof d,
                      "kernel ratio spread %.2f, L4(n=3) spread %.2f (need <= 3); fft-vs-direct %.2e",
                      spread4, spread3, rel);
        push(4, "interaction_morawetz", pass, d, tm.seconds());
    } catch (const std::exception& e) {
        push(4, "interaction_morawetz", false, e.what(), 0);
    }

    // ---- criterion 5: lemma suite -------------------------------------------
    if (criterion_selected(5)) try {
        Timer tm;
        RunConfig cfg;
        cfg.preset = "rotational-magnetic";
        cfg.coeff.beta = 0.05;
        cfg.grid.dim = cfg.coeff.dim = 3;
        cfg.grid.box = 8.0;
        cfg.grid.points = fast ? 16 : 64;
        cfg.grid.shells = 48;
        Grid g = make_grid(cfg);
        CoefficientSet cs = make_coefficient_set(cfg);
        DiscreteOperator op(g, cs, 1);
        ShellPartition sh(g, cfg.grid.shells);
        auto family = lemma_test_family(g, 50, 42);
        double eps_h = fast ? 0.35 : 0.1;
        auto results = lemma_suite(op, sh, family, 1.0, eps_h);
        bool pass = true;
        std::string bad, info;
        for (const auto& r : results) {
            bool origin_weighted = r.lemma == "singular_weight_xdot" ||
                                   r.lemma == "weighted_x_to_y" ||
                                   r.lemma == "weighted_xdot_to_ydot";
            if (fast && origin_weighted) {
                // 1/|x|^2-weighted constants need the criterion's M=64 grid;
                // at the capped fast grid they are recorded, not gating
                if (!r.holds) info += r.lemma + " ";
                continue;
            }
            if (!r.holds) {
                pass = false;
                bad += r.lemma + " ";
                // serialize the offending field for inspection
                if (r.worst_field >= 0)
                    write_field(workdir + "/lemma_offender_" + r.lemma + ".bin", g,
                                family[r.worst_field], 0.0);
            }
        }
        char d[240];
        std::snprintf(d, sizeof d, "%zu inequalities on 50 fields, slack %.2f%s%s%s%s",
                      results.size(), 1.0 + eps_h, pass ? "" : "; failed: ", bad.c_str(),
                      info.empty() ? "" : "; coarse-grid informational: ", info.c_str());
        push(5, "lemma_suite", pass, d, tm.seconds());
    } catch (const std::exception& e) {
        push(5, "lemma_suite", false, e.what(), 0);
    }

    // ---- criterion 6: operator structure -------------------------------------
    if (criterion_selected(6)) try {
        Timer tm;
        RunConfig cfg = admissible_mix_config(true);
        cfg.grid.points = 16;
        Grid g = make_grid(cfg);
        CoefficientSet cs = make_coefficient_set(cfg);
        DiscreteOperator op(g, cs, 1);
        double herm = op.hermiticity_defect();

        // PSD with a negative inverse-square part below the threshold
        RunConfig cpsd;
        cpsd.coeff.kappa = -0.5;
        cpsd.coeff.bump_amp = 0.02;
        cpsd.grid.dim = cpsd.coeff.dim = 3;
        cpsd.grid.box = 4.8;
        cpsd.grid.points = 12;
        Grid gp = make_grid(cpsd);
        CoefficientSet csp = make_coefficient_set(cpsd);
        DiscreteOperator opp(gp, csp, 4096);
        double lmin = opp.eigenvalues().minCoeff();
        double lmax = opp.eigenvalues().maxCoeff();
        bool psd = lmin >= -1e-8 * lmax;

        // free spectrum vs closed form
        RunConfig cfree;
        cfree.grid.dim = cfree.coeff.dim = 3;
        cfree.grid.box = 5.0;
        cfree.grid.points = 10;
        Grid gfree = make_grid(cfree);
        CoefficientSet csf = make_coefficient_set(cfree);
        DiscreteOperator opf(gfree, csf, 4096);
        std::vector<double> exact;
        int M = 10;
        double h = gfree.h();
        for (int k1 = 1; k1 <= M; ++k1)
            for (int k2 = 1; k2 <= M; ++k2)
                for (int k3 = 1; k3 <= M; ++k3)
                    exact.push_back(4.0 / (h * h) *
                                    (sq(std::sin(k1 * M_PI / (2.0 * (M + 1)))) +
                                     sq(std::sin(k2 * M_PI / (2.0 * (M + 1)))) +
                                     sq(std::sin(k3 * M_PI / (2.0 * (M + 1))))));
        std::sort(exact.begin(), exact.end());
        double spec_err = 0;
        for (int i = 0; i < 10; ++i)
            spec_err = std::max(spec_err,
                                std::abs(opf.eigenvalues()[i] - exact[i]) / exact[i]);

        bool pass = herm <= 1e-12 && psd && spec_err <= 1e-9;
        char d[220];
        std::snprintf(d, sizeof d,
                      "hermiticity %.1e (<=1e-12); lambda_min/lambda_max %.1e (psd %s); "
                      "free-spectrum err %.1e (<=1e-9)",
                      herm, lmin / lmax, psd ? "yes" : "NO", spec_err);
        push(6, "operator_structure", pass, d, tm.seconds());
    } catch (const std::exception& e) {
        push(6, "operator_structure", false, e.what(), 0);
    }

    // ---- criterion 7: heat-flow domination ------------------------------------
    if (criterion_selected(7)) try {
        Timer tm;
        RunConfig cfg;
        cfg.preset = "rotational-magnetic";
        cfg.coeff.beta = 5e-4;
        cfg.grid.dim = cfg.coeff.dim = 3;
        cfg.grid.box = 4.8;
        cfg.grid.points = 12;
        Grid g = make_grid(cfg);
        CoefficientSet cs = make_coefficient_set(cfg);
        DiscreteOperator op(g, cs, 4096);
        InitialSpec is;
        is.width = 1.0;
        is.momentum[1] = 0.7;
        Field phi = make_initial(g, is);
        double worst = 0;
        for (double t : {0.1, 1.0}) {
            DominationReport rep = op.diamagnetic_domination_check(phi, t);
            worst = std::max(worst, rep.max_violation);
        }

        // gaussian envelope fit for the heat column
        int y0 = g.ordinal(g.full_size() / 2 + 1);
        if (y0 < 0) y0 = 0;
        Point yc = g.coords(y0);
        Field delta = g.zeros();
        delta[y0] = 1.0 / g.cell_volume();
        double bestCp = 1e300, bestC = 0;
        for (double C : {2.0, 4.0, 8.0, 16.0, 32.0}) {
            double need = 0;
            bool ok = true;
            for (double t : {0.05, 0.1, 0.2, 0.5, 1.0}) {
                Field col = op.heat_apply(delta, t);
                double peak = 0;
                for (int i = 0; i < col.size(); ++i) peak = std::max(peak, std::abs(col[i]));
                // the lattice kernel leaves the gaussian regime once it drops
                // to its far-field floor; fit over the resolved 12 decades
                for (int i = 0; i < col.size(); ++i) {
                    double a = std::abs(col[i]);
                    if (a < 1e-12 * peak) continue;
                    Point x = g.coords(i);
                    double d2 = 0;
                    for (int k = 0; k < 3; ++k) d2 += sq(x[k] - yc[k]);
                    double logc = std::log(a) + 1.5 * std::log(t) + d2 / (C * t);
                    need = std::max(need, logc);
                    if (!std::isfinite(need)) ok = false;
                }
            }
            if (ok && need < bestCp) {
                bestCp = need;
                bestC = C;
            }
        }
        bool fit_ok = std::isfinite(bestCp);
        bool pass = worst <= 1e-8 && fit_ok;
        char d[200];
        std::snprintf(d, sizeof d, "max domination violation %.2e (<=1e-8); envelope C=%.1f logC'=%.2f",
                      worst, bestC, bestCp);
        push(7, "heat_domination", pass, d, tm.seconds());
    } catch (const std::exception& e) {
        push(7, "heat_domination", false, e.what(), 0);
    }

    // ---- criterion 8: norm equivalences ----------------------------------------
    if (criterion_selected(8)) try {
        Timer tm;
        RunConfig cfg;
        cfg.preset = "smooth-metric-bump";
        cfg.coeff.bump_amp = 0.05;
        cfg.grid.dim = cfg.coeff.dim = 3;
        cfg.grid.box = 6.0;
        cfg.grid.points = 16;
        Grid g = make_grid(cfg);
        CoefficientSet cs = make_coefficient_set(cfg);
        DiscreteOperator op(g, cs, 1);
        auto family = lemma_test_family(g, 50, 11);
        RatioInterval lh1 = equiv_h1_ratio(op, family);
        double nu = 1.0, N = 1.0 + cfg.coeff.bump_amp;
        bool in_band = lh1.min_ratio >= std::sqrt(nu) * 0.9 && lh1.max_ratio <= std::sqrt(N) * 1.1;

        RatioInterval h16 = homsob_ratio(op, family, 0.5);
        bool stable = true;
        double dmin = 0, dmax = 0;
        if (!fast) {
            RunConfig c24 = cfg;
            c24.grid.points = 24;
            Grid g24 = make_grid(c24);
            DiscreteOperator op24(g24, cs, 1);
            auto fam24 = lemma_test_family(g24, 50, 11);
            RatioInterval h24 = homsob_ratio(op24, fam24, 0.5);
            dmin = std::abs(h16.min_ratio - h24.min_ratio) / h24.min_ratio;
            dmax = std::abs(h16.max_ratio - h24.max_ratio) / h24.max_ratio;
            stable = dmin <= 0.15 && dmax <= 0.15;
        }
        bool pass = in_band && stable;
        char d[240];
        std::snprintf(d, sizeof d,
                      "H1 ratio [%.4f,%.4f] in [%.4f,%.4f]; s=1/2 interval [%.3f,%.3f], "
                      "refinement drift %.1f%%/%.1f%%",
                      lh1.min_ratio, lh1.max_ratio, std::sqrt(nu) * 0.9, std::sqrt(N) * 1.1,
                      h16.min_ratio, h16.max_ratio, 100 * dmin, 100 * dmax);
        push(8, "norm_equivalences", pass, d, tm.seconds());
    } catch (const std::exception& e) {
        push(8, "norm_equivalences", false, e.what(), 0);
    }

    // ---- criterion 9: resolvent family -----------------------------------------
    if (criterion_selected(9)) try {
        Timer tm;
        RunConfig cfg;
        cfg.preset = "smooth-metric-bump";
        cfg.coeff.bump_amp = 0.05;
        cfg.coeff.kappa = 0.1;
        cfg.grid.dim = cfg.coeff.dim = 3;
        cfg.grid.box = 6.0;
        cfg.grid.points = 16;
        Grid g = make_grid(cfg);
        CoefficientSet cs = make_coefficient_set(cfg);
        DiscreteOperator op(g, cs, 1);
        InitialSpec is;
        is.width = 1.2;
        Field v = make_initial(g, is);
        std::vector<double> lx, ly;
        for (double eps : {1e-3, 3e-3, 1e-2, 3e-2, 1e-1}) {
            Field jv = op.resolvent_apply(v, eps);
            lx.push_back(std::log(eps));
            ly.push_back(std::log((jv - v).norm()));
        }
        double slope = linear_slope(lx, ly);

        // operator norm of J_eps by power iteration
        Field w = Field::Ones(g.interior_size());
        w /= w.norm();
        double nrm = 0;
        for (int i = 0; i < 30; ++i) {
            Field jw = op.resolvent_apply(w, 0.5);
            nrm = jw.norm();
            w = jw / nrm;
        }
        bool pass = std::abs(slope - 1.0) <= 0.1 && nrm <= 1.0 + 1e-8;
        char d[160];
        std::snprintf(d, sizeof d, "eps-sweep slope %.3f (1.0 +- 0.1); ||J_eps|| = %.12f", slope,
                      nrm);
        push(9, "resolvent_family", pass, d, tm.seconds());
    } catch (const std::exception& e) {
        push(9, "resolvent_family", false, e.what(), 0);
    }

    // ---- criterion 10: scattering diagnostics ----------------------------------
    if (criterion_selected(10)) try {
        Timer tm;
        RunConfig cfg;
        cfg.preset = "smooth-metric-bump";
        cfg.coeff.bump_amp = 0.02;
        cfg.grid.dim = cfg.coeff.dim = 3;
        cfg.grid.box = fast ? 8.0 : 16.0;
        cfg.grid.points = fast ? 16 : 64;
        cfg.scenario.initial.width = 1.5;
        cfg.scenario.initial.amplitude = 0.3;
        cfg.scenario.dt = 0.01;
        cfg.scenario.t_max = fast ? 2.0 : 8.0;
        cfg.scenario.sponge.on = true;
        cfg.scenario.sponge.width = 3.0;
        cfg.scenario.sponge.strength = 4.0;
        cfg.scenario.snapshot_stride = 100;  // snapshots every 1.0
        cfg.scenario.r_list = {10.0 / 3.0};
        Grid g = make_grid(cfg);
        CoefficientSet cs = make_coefficient_set(cfg);
        DiscreteOperator op(g, cs, 1);
        Trajectory tr = run(op, cfg.scenario, {});
        DecayVerdict dv = scattering_verdict(tr.series, "L3.33333", 10.0 / 3.0, 3);

        // asymptotic increments over the final half-window
        std::vector<Field> snaps;
        std::vector<double> times;
        double half = cfg.scenario.t_max / 2.0;
        for (std::size_t i = 0; i < tr.snapshot_times.size(); ++i)
            if (tr.snapshot_times[i] >= half - 1e-9) {
                snaps.push_back(tr.snapshots[i]);
                times.push_back(tr.snapshot_times[i]);
            }
        AsymptoticState as = asymptotic_state(op, snaps, times, cfg.scenario.dt);
        bool monotone = true;
        for (std::size_t i = 0; i + 1 < as.increment_h1.size(); ++i)
            if (as.increment_h1[i + 1] > as.increment_h1[i]) monotone = false;
        double need_decay = fast ? 0.8 : 0.5;
        bool pass = dv.decay_factor <= need_decay && monotone;
        std::string incs;
        for (double v : as.increment_h1) {
            char b[24];
            std::snprintf(b, sizeof b, "%.2e ", v);
            incs += b;
        }
        char d[240];
        std::snprintf(d, sizeof d,
                      "L^{10/3} decay factor %.3f (<=%.1f); H1 increments [%s]%s (box-truncation "
                      "caveat: not a t->inf statement)",
                      dv.decay_factor, need_decay, incs.c_str(),
                      monotone ? " decreasing" : " NOT decreasing");
        push(10, "scattering_diagnostics", pass, d, tm.seconds());
    } catch (const std::exception& e) {
        push(10, "scattering_diagnostics", false, e.what(), 0);
    }

    // ---- criterion 11: ledger regression (exact arithmetic) --------------------
    if (criterion_selected(11)) try {
        Timer tm;
        Rational k0 = k0_exact(3, Rational(1, 1));
        bool a = (k0 == Rational(1, 3));
        Rational thr = assratio_threshold_sq_exact(3);
        bool b = (thr == Rational(1, 1));
        Rational cm = condcm_threshold_exact(Rational(1, 1), 3);
        bool c = (cm == Rational(2, 1));
        bool pass = a && b && c;
        char d[160];
        std::snprintf(d, sizeof d, "K0(3,1)=%lld/%lld; ratio-threshold^2(3)=%lld/%lld; condCm(1,3)=%lld/%lld",
                      (long long)k0.num, (long long)k0.den, (long long)thr.num, (long long)thr.den,
                      (long long)cm.num, (long long)cm.den);
        push(11, "ledger_regression", pass, d, tm.seconds());
    } catch (const std::exception& e) {
        push(11, "ledger_regression", false, e.what(), 0);
    }

    // ---- criterion 12: determinism ----------------------------------------------
    if (criterion_selected(12)) try {
        Timer tm;
        RunConfig cfg;
        cfg.grid.dim = cfg.coeff.dim = 3;
        cfg.grid.box = 6.0;
        cfg.grid.points = 12;
        cfg.scenario.t_max = 0.2;
        cfg.scenario.dt = 0.01;
        cfg.scenario.linear = true;
        cfg.functionals.smoothing = "auto";
        auto read_all = [](const std::string& p) {
            std::ifstream in(p, std::ios::binary);
            std::ostringstream os;
            os << in.rdbuf();
            return os.str();
        };
        run_once(cfg, workdir + "/det_a", -1, false);
        run_once(cfg, workdir + "/det_b", -1, false);
        bool pass = read_all(workdir + "/det_a/series.csv") == read_all(workdir + "/det_b/series.csv") &&
                    read_all(workdir + "/det_a/reports.csv") == read_all(workdir + "/det_b/reports.csv");
        push(12, "determinism", pass, pass ? "series.csv and reports.csv byte-identical" : "MISMATCH",
             tm.seconds());
    } catch (const std::exception& e) {
        push(12, "determinism", false, e.what(), 0);
    }

    return out;
}

int print_verify_results(const std::vector<CriterionResult>& results) {
    int failures = 0;
    double total = 0;
    for (const auto& r : results) {
        if (!r.pass) ++failures;
        total += r.seconds;
    }
    std::printf("---\n%zu criteria, %d failed, %.1f s total\n", results.size(), failures, total);
    return failures == 0 ? 0 : 2;
}

}  // namespace mnls
