#pragma once

#include <optional>
#include <string>
#include <vector>

#include "regretlab/bounds.hpp"
#include "regretlab/config.hpp"
#include "regretlab/lemmas.hpp"
#include "regretlab/optimizers.hpp"
#include "regretlab/problems.hpp"

namespace regretlab {

// Instance construction from a problem config. The problem seed drives the
// instance; batching/theta0 seeds are split from the experiment root seed.
Objective instantiate_problem(const ProblemConfig& pc);
Objective apply_batching(const Objective& obj, const ExperimentConfig& cfg);
Vec initial_theta(const ExperimentConfig& cfg, const Objective& obj);
// Theorem-maximal step for eta = auto entries.
double resolve_eta(const OptEntry& entry, const Objective& obj);

// First t with J(theta_t) - J* <= rel_tol * (J(theta_1) - J*); -1 if never.
int steps_to_tolerance(const Trace& trace, double jstar, double rel_tol);

struct RunOutcome {
    std::string name;
    OptimizerConfig cfg;  // with auto eta resolved
    Trace trace;          // partial if diverged
    Vec final_theta;
    bool diverged = false;
    std::optional<RegretCertificate> cert;
    std::string refusal;  // non-empty when certification was refused
    std::string error;    // divergence or I/O diagnostics

    bool ok() const { return !diverged && refusal.empty() && error.empty() &&
                             (!cert || cert->status != CertStatus::Violated); }
};

// Runs one optimizer entry of the config against the given objective.
RunOutcome run_single(const ExperimentConfig& cfg, const OptEntry& entry, const Objective& obj,
                      const Vec& theta0);

// Writes <name>.trace.jsonl plus, when enabled, certificate JSON/CSV and the
// SVG regret plot, all under cfg.out_dir.
void write_run_artifacts(const RunOutcome& outcome, const ExperimentConfig& cfg);

// Exit code 0 iff every run completed and every requested certificate holds
// (empirical reports for stochastic runs do not fail the run).
int run_experiment(const ExperimentConfig& cfg);

// One run per configured optimizer with shared instance and theta0; writes
// comparison.csv plus per-run artifacts.
int compare_optimizers(const ExperimentConfig& cfg);

// Certify an existing trace against the config's problem and single
// optimizer entry; writes certificate artifacts next to the other outputs.
int certify_trace_file(const std::string& trace_path, const ExperimentConfig& cfg);

struct CampaignRow {
    std::string name;
    int trial = 0;
    InequalityReport report;
    std::uint64_t seed = 0;
};

// Seeded sampling campaign over the six instance-level inequality checkers;
// writes lemmas.csv under out_dir. Exit code 0 iff every row holds.
int run_lemma_campaign(std::uint64_t seed, int trials, const std::string& out_dir);
std::vector<CampaignRow> lemma_campaign_rows(std::uint64_t seed, int trials);

// Central-difference audit of the configured problem at 20 seeded points
// (h = 1e-5); exit code 0 iff every error is <= 1e-6.
int grad_check(const ExperimentConfig& cfg);

// Standalone SVG: regret and bound curves over a log-scaled T axis, at most
// 1000 points per series.
void emit_svg_plot(const RegretCertificate& cert, const std::string& path);

}  // namespace regretlab
