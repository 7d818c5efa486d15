#pragma once

#include "mnls/config.hpp"

namespace mnls {

struct RunManifest {
    std::uint64_t scenario_hash = 0;
    std::string code_version;
    std::string grid_id;
    bool ledger_verdict = false;
    std::vector<std::string> artifacts;
    double wall_seconds = 0;
    int steps = 0;
};

struct RunResult {
    RunManifest manifest;
    AdmissibilityReport admissibility;
    SmallnessLedger ledger;
    std::vector<EstimateReport> reports;
    Trajectory trajectory;
};

// full single run: build, check, integrate, measure, write artifacts
RunResult run_once(const RunConfig& cfg, const std::string& outdir, double eps_exp_override = -1,
                   bool write_snapshots = true);

// check-only entry (admissibility + ledger, artifacts under outdir if nonempty)
struct CheckResult {
    AdmissibilityReport report;
    SmallnessLedger ledger;
};
CheckResult run_check(const RunConfig& cfg, const std::string& outdir);

int run_sweep(const RunConfig& cfg, const std::string& outdir, int parallelism);

// --- oracles -----------------------------------------------------------------

// closed-form free evolution of a gaussian packet under i u_t - Lap u = 0
Field oracle_free_gaussian(const Grid& g, const InitialSpec& spec, double t);
// dense spectral exponential (guarded small grids)
Field oracle_expm(const DiscreteOperator& op, const Field& u0, double t);
// direct pairwise O(N^2) interaction sum (guarded small grids)
double oracle_direct_interaction(const Grid& g, const RealField& rho);

// --- binary field IO -----------------------------------------------------------

void write_field(const std::string& path, const Grid& g, const Field& u, double t);
Field read_field(const std::string& path, const Grid& g);

std::string report_json(const EstimateReport& rep);

// --- acceptance / verification ---------------------------------------------------

struct CriterionResult {
    int index = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

// level: true = fast (grids capped at 16^3 / 8^4), false = full
std::vector<CriterionResult> verify_suite(bool fast, const std::string& workdir);
int print_verify_results(const std::vector<CriterionResult>& results);

extern const char* kCodeVersion;

}  // namespace mnls
