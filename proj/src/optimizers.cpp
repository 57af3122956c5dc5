#include "regretlab/optimizers.hpp"

#include <cmath>

namespace regretlab {

namespace {

void require_finite_gradient(const Vec& g, const char* op) {
    if (!all_finite(g)) {
        throw std::invalid_argument(std::string(op) + ": non-finite gradient");
    }
}

}  // namespace

SgdState sgd_step(const SgdState& s, const Vec& g) {
    require_same_dim(s.theta, g, "sgd_step");
    require_finite_gradient(g, "sgd_step");
    SgdState next = s;
    for (std::size_t i = 0; i < g.size(); ++i) {
        next.theta[i] = s.theta[i] - s.eta * g[i];
    }
    next.t = s.t + 1;
    return next;
}

MomentumState momentum_step(const MomentumState& s, const Vec& g) {
    require_same_dim(s.theta, g, "momentum_step");
    require_same_dim(s.velocity, g, "momentum_step");
    require_finite_gradient(g, "momentum_step");
    MomentumState next = s;
    for (std::size_t i = 0; i < g.size(); ++i) {
        next.velocity[i] = s.gamma * s.velocity[i] - s.eta * g[i];
        next.theta[i] = s.theta[i] + next.velocity[i];
    }
    next.t = s.t + 1;
    return next;
}

Vec momentum_oneline_step(const Vec& theta_t, const Vec& theta_prev, const Vec& g, double gamma,
                          double eta) {
    require_same_dim(theta_t, theta_prev, "momentum_oneline_step");
    require_same_dim(theta_t, g, "momentum_oneline_step");
    Vec out(theta_t.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = theta_t[i] + gamma * (theta_t[i] - theta_prev[i]) - eta * g[i];
    }
    return out;
}

NagState nag_step(const NagState& s, const std::function<Vec(const Vec&)>& grad_at) {
    Vec g = grad_at(s.theta);
    require_same_dim(s.theta, g, "nag_step");
    require_finite_gradient(g, "nag_step");
    NagState next = s;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double y_new = s.theta[i] - s.eta * g[i];
        next.y[i] = y_new;
        next.theta[i] = y_new + s.gamma * (y_new - s.y[i]);
    }
    next.y_prev = s.y;
    next.t = s.t + 1;
    return next;
}

std::pair<Vec, Vec> nag_lookahead_step(const Vec& y, const Vec& v, double gamma, double eta,
                                       const std::function<Vec(const Vec&)>& grad_at) {
    require_same_dim(y, v, "nag_lookahead_step");
    Vec probe(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) probe[i] = y[i] + gamma * v[i];
    Vec g = grad_at(probe);
    require_same_dim(y, g, "nag_lookahead_step");
    require_finite_gradient(g, "nag_lookahead_step");
    Vec v_next(y.size()), y_next(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        v_next[i] = gamma * v[i] - eta * g[i];
        y_next[i] = y[i] + v_next[i];
    }
    return {std::move(y_next), std::move(v_next)};
}

AdagradState adagrad_step(const AdagradState& s, const Vec& g) {
    require_same_dim(s.theta, g, "adagrad_step");
    require_same_dim(s.accum, g, "adagrad_step");
    require_finite_gradient(g, "adagrad_step");
    AdagradState next = s;
    for (std::size_t i = 0; i < g.size(); ++i) {
        next.accum[i] = s.accum[i] + g[i] * g[i];
        const double denom = std::sqrt(next.accum[i] + s.epsilon);
        if (denom == 0.0) {
            if (g[i] == 0.0) continue;  // untouched coordinate: 0/0 is a no-op
            throw std::runtime_error("adagrad_step: zero denominator with nonzero gradient");
        }
        next.theta[i] = s.theta[i] - s.eta * g[i] / denom;
    }
    next.t = s.t + 1;
    return next;
}

double soft_threshold(double z, double tau) {
    if (z > tau) return z - tau;
    if (z < -tau) return z + tau;
    return 0.0;
}

AdagradState adagrad_prox_step(const AdagradState& s, const Vec& g, const Regularizer& reg,
                               double delta) {
    require_same_dim(s.theta, g, "adagrad_prox_step");
    require_same_dim(s.accum, g, "adagrad_prox_step");
    require_finite_gradient(g, "adagrad_prox_step");
    if (delta < 0.0) throw std::invalid_argument("adagrad_prox_step: delta must be >= 0");
    AdagradState next = s;
    const bool l1 = reg.kind == RegKind::L1 && reg.weight > 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        next.accum[i] = s.accum[i] + g[i] * g[i];
        const double w = delta + std::sqrt(next.accum[i]);
        if (w == 0.0) {
            if (g[i] == 0.0) continue;  // no history, no gradient: leave the coordinate
            throw std::runtime_error(
                "adagrad_prox_step: zero metric weight with nonzero gradient (delta = 0, no "
                "history)");
        }
        const double moved = s.theta[i] - s.eta * g[i] / w;
        next.theta[i] = l1 ? soft_threshold(moved, s.eta * reg.weight / w) : moved;
    }
    next.t = s.t + 1;
    return next;
}

AdamState adam_step(const AdamState& s, const Vec& g) {
    require_same_dim(s.theta, g, "adam_step");
    require_finite_gradient(g, "adam_step");
    if (!(s.beta1 >= 0.0 && s.beta1 < 1.0) || !(s.beta2 >= 0.0 && s.beta2 < 1.0)) {
        throw std::invalid_argument("adam_step: beta1 and beta2 must be in [0, 1)");
    }
    if (!(s.lambda > 0.0 && s.lambda <= 1.0)) {
        throw std::invalid_argument("adam_step: lambda must be in (0, 1]");
    }
    AdamState next = s;
    next.t = s.t + 1;
    const double t_now = static_cast<double>(next.t);
    const double beta1_t = s.beta1 * std::pow(s.lambda, t_now - 1.0);
    const double corr1 = 1.0 - std::pow(s.beta1, t_now);
    const double corr2 = 1.0 - std::pow(s.beta2, t_now);
    const double eta_t = s.sqrt_t_decay ? s.eta0 / std::sqrt(t_now) : s.eta0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        next.m[i] = beta1_t * s.m[i] + (1.0 - beta1_t) * g[i];
        next.v[i] = s.beta2 * s.v[i] + (1.0 - s.beta2) * g[i] * g[i];
        const double m_hat = next.m[i] / corr1;
        const double v_hat = next.v[i] / corr2;
        next.theta[i] = s.theta[i] - eta_t * m_hat / (std::sqrt(v_hat) + s.epsilon);
    }
    return next;
}

std::string algo_name(Algo a) {
    switch (a) {
        case Algo::Sgd: return "sgd";
        case Algo::Momentum: return "momentum";
        case Algo::Nag: return "nag";
        case Algo::Adagrad: return "adagrad";
        case Algo::AdagradProx: return "adagrad_prox";
        case Algo::Adam: return "adam";
    }
    return "?";
}

std::optional<Algo> algo_from_name(const std::string& name) {
    if (name == "sgd") return Algo::Sgd;
    if (name == "momentum") return Algo::Momentum;
    if (name == "nag") return Algo::Nag;
    if (name == "adagrad") return Algo::Adagrad;
    if (name == "adagrad_prox") return Algo::AdagradProx;
    if (name == "adam") return Algo::Adam;
    return std::nullopt;
}

namespace {

std::string bool_str(bool b) { return b ? "true" : "false"; }

}  // namespace

RunResult run(const OptimizerConfig& cfg, const Objective& obj, const Vec& theta0, int T,
              const BatchMode& batch) {
    if (T < 1) throw std::invalid_argument("run: T must be at least 1");
    if (static_cast<int>(theta0.size()) != obj.dim()) {
        throw std::invalid_argument("run: theta0 dimension does not match the objective");
    }
    if (!all_finite(theta0)) throw std::invalid_argument("run: theta0 must be finite");

    Trace trace;
    trace.meta["algo"] = algo_name(cfg.algo);
    trace.meta["eta"] = format_g17(cfg.eta);
    trace.meta["gamma"] = format_g17(cfg.gamma);
    trace.meta["beta1"] = format_g17(cfg.beta1);
    trace.meta["beta2"] = format_g17(cfg.beta2);
    trace.meta["lambda"] = format_g17(cfg.lambda);
    trace.meta["epsilon"] = format_g17(cfg.epsilon);
    trace.meta["delta"] = format_g17(cfg.delta);
    trace.meta["sqrt_t_decay"] = bool_str(cfg.sqrt_t_decay);
    trace.meta["T"] = std::to_string(T);
    trace.meta["batch"] = batch.minibatch ? "minibatch" : "full";
    if (batch.minibatch) {
        trace.meta["batch_seed"] = std::to_string(batch.seed);
        trace.meta["batch_count"] = std::to_string(obj.batch_count());
    }
    trace.meta["problem"] = obj.kind_name();

    const std::size_t d = theta0.size();

    // Per-epoch shuffled batch order.
    std::vector<int> order;
    std::size_t order_pos = 0;
    long epoch = 0;
    Rng batch_rng(batch.seed);
    auto next_batch = [&]() -> int {
        if (!batch.minibatch) return -1;
        if (order_pos == order.size()) {
            order.resize(static_cast<std::size_t>(obj.batch_count()));
            for (int i = 0; i < obj.batch_count(); ++i) order[static_cast<std::size_t>(i)] = i;
            Rng epoch_rng = batch_rng.split(static_cast<std::uint64_t>(epoch));
            epoch_rng.shuffle(order);
            order_pos = 0;
            ++epoch;
        }
        return order[order_pos++];
    };

    auto gradient_at = [&](const Vec& theta, int batch_index, bool smooth_only) -> Vec {
        if (batch_index < 0) {
            return smooth_only ? obj.smooth_gradient(theta) : obj.gradient(theta);
        }
        return smooth_only ? obj.batch_smooth_gradient(theta, batch_index)
                           : obj.batch_gradient(theta, batch_index);
    };

    // Algorithm state; only the slot matching cfg.algo is used.
    SgdState sgd{theta0, cfg.eta, 0};
    MomentumState mom{theta0, Vec(d, 0.0), cfg.gamma, cfg.eta, 0};
    NagState nag{theta0, theta0, theta0, cfg.gamma, cfg.eta, 0};
    AdagradState ada{theta0, Vec(d, 0.0), cfg.eta, cfg.epsilon, 0};
    AdamState adam{theta0, Vec(d, 0.0), Vec(d, 0.0), cfg.beta1, cfg.beta2,
                   cfg.lambda, cfg.eta, cfg.epsilon, 0, cfg.sqrt_t_decay};

    auto current_theta = [&]() -> const Vec& {
        switch (cfg.algo) {
            case Algo::Sgd: return sgd.theta;
            case Algo::Momentum: return mom.theta;
            case Algo::Nag: return nag.theta;
            case Algo::Adagrad:
            case Algo::AdagradProx: return ada.theta;
            case Algo::Adam: return adam.theta;
        }
        return sgd.theta;
    };

    for (int t = 1; t <= T; ++t) {
        const int b = next_batch();
        const Vec& theta = current_theta();
        const bool smooth_only = cfg.algo == Algo::AdagradProx;

        TraceStep step;
        step.t = t;
        step.theta = theta;
        step.loss = obj.value(theta);
        if (!std::isfinite(step.loss)) {
            throw DivergenceError("run: objective became non-finite at step " + std::to_string(t),
                                  std::move(trace), t);
        }

        // The NAG rule in its standard form also evaluates its gradient at
        // theta_t (the lookahead variant is a separate operation), so one
        // shared evaluation covers every algorithm.
        const Vec g = gradient_at(theta, b, smooth_only);
        if (!all_finite(g)) {
            throw DivergenceError("run: gradient became non-finite at step " + std::to_string(t),
                                  std::move(trace), t);
        }
        step.grad = g;
        trace.steps.push_back(std::move(step));

        switch (cfg.algo) {
            case Algo::Sgd: sgd = sgd_step(sgd, g); break;
            case Algo::Momentum: mom = momentum_step(mom, g); break;
            case Algo::Nag:
                nag = nag_step(nag, [&g](const Vec&) { return g; });
                break;
            case Algo::Adagrad: ada = adagrad_step(ada, g); break;
            case Algo::AdagradProx:
                ada = adagrad_prox_step(ada, g, obj.regularizer(), cfg.delta);
                break;
            case Algo::Adam: adam = adam_step(adam, g); break;
        }

        if (!all_finite(current_theta())) {
            throw DivergenceError("run: iterate diverged (non-finite coordinate) after step " +
                                      std::to_string(t),
                                  std::move(trace), t);
        }
    }

    return RunResult{std::move(trace), current_theta()};
}

}  // namespace regretlab
