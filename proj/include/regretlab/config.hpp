#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "regretlab/optimizers.hpp"
#include "regretlab/vec.hpp"

namespace regretlab {

struct ProblemConfig {
    std::string kind;  // quadratic | least_squares | logistic | sparse
    int dim = 10;
    std::uint64_t seed = 1;
    int rows = 0;  // 0 = 5 * dim for data-backed kinds
    double density = 0.1;
    double l2 = 0.1;
    double l1 = 0.0;
};

struct OptEntry {
    std::string name;  // section name after "opt."
    OptimizerConfig cfg;
    bool eta_auto = false;  // eta = theorem-maximal step, resolved per instance
};

struct ExperimentConfig {
    ProblemConfig problem;
    std::vector<OptEntry> optimizers;  // file order
    int T = 100;
    bool minibatch = false;
    int batch_count = 1;
    std::uint64_t seed = 1;  // root seed; every sub-task seed is split from it
    bool certify = false;
    bool plot = false;
    std::string out_dir = "out";
    double tolerance = 1e-6;     // steps-to-tolerance, relative to J(theta_1) - J*
    std::optional<Vec> theta0;   // explicit start; single value broadcasts
};

// Either a validated config or every error found, never just the first.
struct ParseResult {
    std::optional<ExperimentConfig> config;
    std::vector<std::string> errors;

    bool ok() const { return errors.empty(); }
};

// Flat "key = value" text with '#' comments and dotted sections
// (problem.kind, opt.<name>.eta). Unknown keys are errors.
ParseResult parse_config(const std::string& text);
ParseResult parse_config_file(const std::string& path);

}  // namespace regretlab
