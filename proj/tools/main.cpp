#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "regretlab/experiment.hpp"

namespace {

// --out and --seed override the config file; --plot switches plotting on.
struct CommonFlags {
    std::string out_dir;
    bool plot = false;
    std::int64_t seed = -1;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--out", flags.out_dir, "Output directory (overrides the config)");
    cmd->add_flag("--plot", flags.plot, "Emit SVG regret plots");
    cmd->add_option("--seed", flags.seed, "Root seed (overrides the config)");
}

int load_config(const std::string& path, const CommonFlags& flags,
                regretlab::ExperimentConfig& out) {
    regretlab::ParseResult parsed = regretlab::parse_config_file(path);
    if (!parsed.ok()) {
        for (const std::string& e : parsed.errors) std::cerr << "config: " << e << "\n";
        return 2;
    }
    out = *parsed.config;
    if (!flags.out_dir.empty()) out.out_dir = flags.out_dir;
    if (flags.plot) out.plot = true;
    if (flags.seed >= 0) out.seed = static_cast<std::uint64_t>(flags.seed);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"regretlab: first-order optimizers with executable regret certificates"};
    app.require_subcommand(1);

    std::string config_path, trace_path;
    CommonFlags flags;
    std::int64_t lemma_seed = 1;
    int lemma_trials = 1000;

    CLI::App* cmd_run = app.add_subcommand("run", "Run the configured optimizers, write traces "
                                                  "and certificates");
    cmd_run->add_option("config", config_path, "Experiment config file")->required();
    add_common(cmd_run, flags);

    CLI::App* cmd_certify =
        app.add_subcommand("certify", "Certify an existing trace against a config's problem");
    cmd_certify->add_option("trace", trace_path, "Trace file (JSON lines)")->required();
    cmd_certify->add_option("config", config_path, "Experiment config file")->required();
    add_common(cmd_certify, flags);

    CLI::App* cmd_compare =
        app.add_subcommand("compare", "Race the configured optimizers on one problem");
    cmd_compare->add_option("config", config_path, "Experiment config file")->required();
    add_common(cmd_compare, flags);

    CLI::App* cmd_lemmas =
        app.add_subcommand("check-lemmas", "Sampling campaign over the inequality checkers");
    cmd_lemmas->add_option("--seed", lemma_seed, "Campaign seed");
    cmd_lemmas->add_option("--trials", lemma_trials, "Trials per checker");
    std::string lemma_out = "out";
    cmd_lemmas->add_option("--out", lemma_out, "Output directory");

    CLI::App* cmd_grad =
        app.add_subcommand("grad-check", "Finite-difference audit of the configured problem");
    cmd_grad->add_option("config", config_path, "Experiment config file")->required();
    add_common(cmd_grad, flags);

    CLI11_PARSE(app, argc, argv);

    try {
        regretlab::ExperimentConfig cfg;
        if (cmd_run->parsed()) {
            if (int rc = load_config(config_path, flags, cfg)) return rc;
            return regretlab::run_experiment(cfg);
        }
        if (cmd_certify->parsed()) {
            if (int rc = load_config(config_path, flags, cfg)) return rc;
            return regretlab::certify_trace_file(trace_path, cfg);
        }
        if (cmd_compare->parsed()) {
            if (int rc = load_config(config_path, flags, cfg)) return rc;
            return regretlab::compare_optimizers(cfg);
        }
        if (cmd_lemmas->parsed()) {
            if (lemma_trials < 1) {
                std::cerr << "check-lemmas: trials must be at least 1\n";
                return 2;
            }
            return regretlab::run_lemma_campaign(static_cast<std::uint64_t>(lemma_seed),
                                                 lemma_trials, lemma_out);
        }
        if (cmd_grad->parsed()) {
            if (int rc = load_config(config_path, flags, cfg)) return rc;
            return regretlab::grad_check(cfg);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
