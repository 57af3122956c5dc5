#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "regretlab/problems.hpp"
#include "regretlab/trace.hpp"
#include "regretlab/vec.hpp"

namespace regretlab {

// Every update rule below is a pure state transition: it takes the state by
// value-semantics reference and returns the successor state.

struct SgdState {
    Vec theta;
    double eta = 0.1;
    long t = 0;
};

// theta' = theta - eta * g
SgdState sgd_step(const SgdState& s, const Vec& g);

struct MomentumState {
    Vec theta;
    Vec velocity;  // zero at t = 0
    double gamma = 0.0;
    double eta = 0.1;
    long t = 0;
};

// v' = gamma v - eta g; theta' = theta + v'
MomentumState momentum_step(const MomentumState& s, const Vec& g);

// Single-equation form: theta_t + gamma (theta_t - theta_prev) - eta g.
Vec momentum_oneline_step(const Vec& theta_t, const Vec& theta_prev, const Vec& g, double gamma,
                          double eta);

struct NagState {
    Vec y;
    Vec y_prev;
    Vec theta;  // y == y_prev == theta at t = 0
    double gamma = 0.0;
    double eta = 0.1;
    long t = 0;
};

// y' = theta - eta grad(theta); theta' = y' + gamma (y' - y).
// The gradient is evaluated at theta, so it is passed as an oracle.
NagState nag_step(const NagState& s, const std::function<Vec(const Vec&)>& grad_at);

// Lookahead form: v' = gamma v - eta grad(y + gamma v); y' = y + v'.
// Equivalent to nag_step under v_t = y_t - y_{t-1}.
std::pair<Vec, Vec> nag_lookahead_step(const Vec& y, const Vec& v, double gamma, double eta,
                                       const std::function<Vec(const Vec&)>& grad_at);

struct AdagradState {
    Vec theta;
    Vec accum;  // per-coordinate sum of squared gradients (diagonal of G_t)
    double eta = 0.1;
    double epsilon = 1e-8;
    long t = 0;
};

// accum'_i = accum_i + g_i^2; theta'_i = theta_i - eta g_i / sqrt(accum'_i + epsilon).
// A coordinate with g_i = 0, accum'_i = 0 and epsilon = 0 is left unchanged.
AdagradState adagrad_step(const AdagradState& s, const Vec& g);

double soft_threshold(double z, double tau);

// Composite step in the metric w_i = delta + sqrt(accum'_i): plain scaled
// descent for RegKind::None, soft-thresholding for an L1 term.
AdagradState adagrad_prox_step(const AdagradState& s, const Vec& g, const Regularizer& reg,
                               double delta);

struct AdamState {
    Vec theta;
    Vec m;  // zero at t = 0
    Vec v;  // zero at t = 0
    double beta1 = 0.9;
    double beta2 = 0.999;
    double lambda = 1.0;  // per-step decay of beta1; 1 = no decay
    double eta0 = 0.001;
    double epsilon = 1e-8;
    long t = 0;
    bool sqrt_t_decay = false;  // eta_t = eta0 / sqrt(t)
};

// One Adam step. The effective first-moment coefficient at step t is
// beta1 * lambda^(t-1); bias correction always uses the constant beta1.
AdamState adam_step(const AdamState& s, const Vec& g);

enum class Algo { Sgd, Momentum, Nag, Adagrad, AdagradProx, Adam };

std::string algo_name(Algo a);
std::optional<Algo> algo_from_name(const std::string& name);

struct OptimizerConfig {
    Algo algo = Algo::Sgd;
    double eta = 0.1;
    double gamma = 0.0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double lambda = 1.0;
    double epsilon = 1e-8;
    double delta = 0.0;
    bool sqrt_t_decay = false;
};

struct BatchMode {
    bool minibatch = false;
    std::uint64_t seed = 0;

    static BatchMode full() { return {false, 0}; }
    static BatchMode with_seed(std::uint64_t s) { return {true, s}; }
};

struct DivergenceError : std::runtime_error {
    Trace partial;
    int failed_step;
    DivergenceError(const std::string& msg, Trace trace, int step)
        : std::runtime_error(msg), partial(std::move(trace)), failed_step(step) {}
};

struct RunResult {
    Trace trace;
    Vec final_theta;  // the iterate after the last recorded step
};

// Runs T steps from theta0 and records (t, theta_t, g_t, J(theta_t)) for
// t = 1..T, theta_1 = theta0. The loss is always the full objective, also
// under minibatch mode; the gradient is the one fed to the update. Batches
// are visited in a freshly shuffled order each epoch, seeded from
// batch.seed. Throws DivergenceError (carrying the partial trace) when an
// iterate goes non-finite.
RunResult run(const OptimizerConfig& cfg, const Objective& obj, const Vec& theta0, int T,
              const BatchMode& batch = BatchMode::full());

}  // namespace regretlab
