#include <CLI11.hpp>
#include <cstdio>

#include "mnls/harness.hpp"

using namespace mnls;

int main(int argc, char** argv) {
    CLI::App app{"variable-coefficient magnetic NLS simulator and estimate harness"};
    app.require_subcommand(1);

    std::string config_path, outdir = "out";
    std::string level = "fast";
    int parallel = 1;
    double eps_exp = -1.0;
    unsigned seed = 0;

    auto add_common = [&](CLI::App* sub, bool need_config) {
        if (need_config)
            sub->add_option("--config", config_path, "scenario config file")->required();
        sub->add_option("--out", outdir, "output directory");
        sub->add_option("--parallel", parallel, "worker pool size");
        sub->add_option("--eps-exp", eps_exp, "the '-' exponent representative");
        sub->add_option("--seed", seed, "seed for randomized test fields");
    };

    CLI::App* c_check = app.add_subcommand("check", "admissibility report + smallness ledger");
    add_common(c_check, true);
    CLI::App* c_run = app.add_subcommand("run", "integrate a scenario and write all reports");
    add_common(c_run, true);
    CLI::App* c_verify = app.add_subcommand("verify", "run the acceptance criteria suite");
    add_common(c_verify, false);
    c_verify->add_option("--level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));
    CLI::App* c_sweep = app.add_subcommand("sweep", "run a scenario across an axis");
    add_common(c_sweep, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_check->parsed()) {
            RunConfig cfg = parse_config_file(config_path);
            CheckResult res = run_check(cfg, outdir);
            std::printf("%-28s %14s %14s  %s\n", "assumption", "measured", "bound", "holds");
            for (const auto& e : res.report.entries)
                std::printf("%-28s %14.6g %14.6g  %s\n", e.name.c_str(), e.measured_sup,
                            e.bound_constant, e.holds ? "yes" : "NO");
            const auto& lg = res.ledger;
            std::printf("---\nnu=%.6g N=%.6g ratio=%.6g (threshold %.6g)\n", lg.nu, lg.N, lg.ratio,
                        lg.assratio_threshold);
            std::printf("K0=%.6g gamma0=%.6g M1=%.6g M2=%.6g M3=%.6g M1'=%.6g M2'=%.6g\n", lg.K0,
                        lg.gamma0, lg.M1, lg.M2, lg.M3, lg.M1p, lg.M2p);
            std::printf("C- = %.6g (threshold %.6g)\n", lg.Cminus, lg.condCm_threshold);
            std::printf("verdict: %s\n", lg.verdict ? "positive" : "negative");
            return lg.verdict ? 0 : 2;
        }
        if (c_run->parsed()) {
            RunConfig cfg = parse_config_file(config_path);
            RunResult res = run_once(cfg, outdir, eps_exp);
            std::printf("run complete: %d steps, %zu reports, artifacts in %s\n",
                        res.trajectory.steps, res.reports.size(), outdir.c_str());
            return 0;
        }
        if (c_verify->parsed()) {
            auto results = verify_suite(level == "fast", outdir);
            return print_verify_results(results);
        }
        if (c_sweep->parsed()) {
            RunConfig cfg = parse_config_file(config_path);
            return run_sweep(cfg, outdir, parallel);
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 3;
    } catch (const BoundaryContamination& e) {
        std::fprintf(stderr, "runtime abort: %s\n", e.what());
        return 4;
    } catch (const SolverDivergence& e) {
        std::fprintf(stderr, "runtime abort: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
