#include "regretlab/lemmas.hpp"

#include <cmath>
#include <limits>

namespace regretlab {

InequalityReport make_report(std::string name, double lhs, double rhs, std::string witness) {
    InequalityReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = rhs - lhs;
    r.holds = bound_holds(lhs, rhs);
    r.witness = std::move(witness);
    return r;
}

double bregman(const BregmanMetric& metric, const Vec& x, const Vec& y) {
    require_same_dim(x, y, "bregman");
    require_same_dim(x, metric.s, "bregman");
    if (metric.delta < 0.0) throw std::invalid_argument("bregman: delta must be >= 0");
    double out = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (metric.s[i] < 0.0) {
            throw std::invalid_argument("bregman: metric weights must be >= 0");
        }
        const double d = x[i] - y[i];
        out += (metric.delta + metric.s[i]) * d * d;
    }
    return out;
}

std::vector<BregmanMetric> metrics_from_trace(const Trace& trace, double delta) {
    std::vector<Vec> norms = prefix_column_norms(trace.gradient_history());
    std::vector<BregmanMetric> out;
    out.reserve(norms.size());
    for (auto& s : norms) out.push_back(BregmanMetric{std::move(s), delta});
    return out;
}

InequalityReport check_convexity_sandwich(const Objective& obj, const Vec& x, const Vec& y,
                                          double lipschitz) {
    const Vec gx = obj.gradient(x);
    const Vec diff = sub(y, x);
    const double gap = obj.value(y) - obj.value(x) - dot(gx, diff);
    const double upper = 0.5 * lipschitz * dot(diff, diff);
    InequalityReport r = make_report("convexity_sandwich", gap, upper, "");
    r.holds = bound_holds(0.0, gap) && bound_holds(gap, upper);
    return r;
}

InequalityReport check_cocoercivity(const Objective& obj, const Vec& x, const Vec& y,
                                    double lipschitz) {
    if (!(lipschitz > 0.0)) {
        throw std::invalid_argument("check_cocoercivity: lipschitz must be positive");
    }
    const Vec gx = obj.gradient(x);
    const Vec gy = obj.gradient(y);
    const Vec gd = sub(gx, gy);
    const double lhs = obj.value(x) + dot(gx, sub(y, x)) + dot(gd, gd) / (2.0 * lipschitz);
    return make_report("cocoercivity", lhs, obj.value(y), "");
}

InequalityReport check_duchi_prop3(const Trace& trace, const Objective& obj,
                                   const std::vector<BregmanMetric>& metrics, double eta) {
    if (trace.steps.empty()) throw std::invalid_argument("check_duchi_prop3: empty trace");
    if (!(eta > 0.0)) throw std::invalid_argument("check_duchi_prop3: eta must be positive");
    if (metrics.size() != trace.steps.size()) {
        throw std::invalid_argument("check_duchi_prop3: metric/trace length mismatch");
    }
    if (!obj.optimum().has_value() || !obj.optimal_value().has_value()) {
        throw std::invalid_argument("check_duchi_prop3: objective has no known optimum");
    }
    const Vec& star = *obj.optimum();
    const double jstar = *obj.optimal_value();
    const std::size_t t_count = trace.steps.size();

    double lhs = 0.0;
    for (const TraceStep& s : trace.steps) lhs += s.loss - jstar;

    double rhs = bregman(metrics[0], star, trace.steps[0].theta) / eta;
    for (std::size_t t = 0; t + 1 < t_count; ++t) {
        const Vec& next_theta = trace.steps[t + 1].theta;
        rhs += (bregman(metrics[t + 1], star, next_theta) - bregman(metrics[t], star, next_theta)) /
               eta;
    }
    for (std::size_t t = 0; t < t_count; ++t) {
        const Vec& g = trace.steps[t].grad;
        const BregmanMetric& m = metrics[t];
        double dual_sq = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double w = m.delta + m.s[i];
            if (w == 0.0) continue;  // s = 0 forces g = 0 on this coordinate
            dual_sq += g[i] * g[i] / w;
        }
        rhs += 0.5 * eta * dual_sq;
    }
    return make_report("duchi_prop3", lhs, rhs,
                       "T=" + std::to_string(t_count) + " eta=" + format_g17(eta));
}

InequalityReport check_duchi_lemma4(const GradientHistory& h) {
    const std::vector<Vec> s = prefix_column_norms(h);  // throws on empty
    const std::size_t d = static_cast<std::size_t>(h.dim());
    double lhs = 0.0;
    for (std::size_t t = 0; t < h.columns.size(); ++t) {
        for (std::size_t i = 0; i < d; ++i) {
            const double g = h.columns[t][i];
            if (s[t][i] == 0.0) continue;
            lhs += g * g / s[t][i];
        }
    }
    double rhs = 0.0;
    for (std::size_t i = 0; i < d; ++i) rhs += 2.0 * s.back()[i];
    return make_report("duchi_lemma4", lhs, rhs, "T=" + std::to_string(h.steps()));
}

namespace {

double realized_max_inf(const GradientHistory& h) {
    double m = 0.0;
    for (const Vec& g : h.columns) m = std::max(m, norm_inf(g));
    return m;
}

// Per-coordinate aggregation: lhs/rhs of the smallest-slack coordinate,
// holds over all of them.
InequalityReport aggregate_coordinates(std::string name, const std::vector<double>& lhs,
                                       const std::vector<double>& rhs, std::string witness) {
    std::size_t worst = 0;
    bool all_hold = true;
    double worst_slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        all_hold = all_hold && bound_holds(lhs[i], rhs[i]);
        const double slack = rhs[i] - lhs[i];
        if (slack < worst_slack) {
            worst_slack = slack;
            worst = i;
        }
    }
    InequalityReport r = make_report(std::move(name), lhs[worst], rhs[worst],
                                     witness + " coordinate=" + std::to_string(worst));
    r.holds = all_hold;
    return r;
}

}  // namespace

InequalityReport check_kingma_lemma103(const GradientHistory& h, double l_inf) {
    const std::vector<Vec> s = prefix_column_norms(h);
    const double realized = realized_max_inf(h);
    if (l_inf < realized) {
        throw std::invalid_argument("check_kingma_lemma103: l_inf " + format_g17(l_inf) +
                                    " understates the realized max " + format_g17(realized));
    }
    const std::size_t d = static_cast<std::size_t>(h.dim());
    std::vector<double> lhs(d, 0.0), rhs(d, 0.0);
    for (std::size_t t = 0; t < h.columns.size(); ++t) {
        for (std::size_t i = 0; i < d; ++i) {
            lhs[i] += std::abs(h.columns[t][i]) / std::sqrt(static_cast<double>(t + 1));
        }
    }
    for (std::size_t i = 0; i < d; ++i) rhs[i] = 2.0 * l_inf * s.back()[i];
    return aggregate_coordinates("kingma_lemma_10_3", lhs, rhs, "T=" + std::to_string(h.steps()));
}

InequalityReport check_kingma_lemma104(const GradientHistory& h, double beta1, double beta2,
                                       double l_inf) {
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
        throw std::invalid_argument("check_kingma_lemma104: betas must be in [0, 1)");
    }
    const double gamma = beta1 * beta1 / std::sqrt(beta2);
    if (!(gamma < 1.0)) {
        throw std::invalid_argument("check_kingma_lemma104: beta1^2/sqrt(beta2) must be below 1");
    }
    const std::vector<Vec> s = prefix_column_norms(h);
    const std::size_t d = static_cast<std::size_t>(h.dim());
    std::vector<double> lhs(d, 0.0), rhs(d, 0.0);
    Vec m(d, 0.0), v(d, 0.0);
    for (std::size_t t = 0; t < h.columns.size(); ++t) {
        const double tt = static_cast<double>(t + 1);
        const double corr1 = 1.0 - std::pow(beta1, tt);
        const double corr2 = 1.0 - std::pow(beta2, tt);
        for (std::size_t i = 0; i < d; ++i) {
            const double g = h.columns[t][i];
            m[i] = beta1 * m[i] + (1.0 - beta1) * g;
            v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
            const double v_hat = v[i] / corr2;
            if (v_hat == 0.0) continue;  // m is provably 0 here too
            const double m_hat = m[i] / corr1;
            lhs[i] += m_hat * m_hat / std::sqrt(tt * v_hat);
        }
    }
    const double factor = 2.0 * l_inf / ((1.0 - gamma) * (1.0 - gamma) * std::sqrt(1.0 - beta2));
    for (std::size_t i = 0; i < d; ++i) rhs[i] = factor * s.back()[i];
    return aggregate_coordinates("kingma_lemma_10_4", lhs, rhs, "T=" + std::to_string(h.steps()));
}

InequalityReport check_vhat_dominance(const GradientHistory& h, double beta2) {
    if (!(beta2 >= 0.0 && beta2 < 1.0)) {
        throw std::invalid_argument("check_vhat_dominance: beta2 must be in [0, 1)");
    }
    const std::vector<Vec> s = prefix_column_norms(h);
    const std::size_t d = static_cast<std::size_t>(h.dim());
    Vec v(d, 0.0);
    bool all_hold = true;
    double worst_slack = std::numeric_limits<double>::infinity();
    double worst_lhs = 0.0, worst_rhs = 0.0;
    std::size_t worst_t = 0, worst_i = 0;
    for (std::size_t t = 0; t < h.columns.size(); ++t) {
        const double corr2 = 1.0 - std::pow(beta2, static_cast<double>(t + 1));
        for (std::size_t i = 0; i < d; ++i) {
            const double g = h.columns[t][i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
            const double v_hat = v[i] / corr2;
            const double cap = s[t][i] * s[t][i];
            all_hold = all_hold && bound_holds(v_hat, cap);
            if (cap - v_hat < worst_slack) {
                worst_slack = cap - v_hat;
                worst_lhs = v_hat;
                worst_rhs = cap;
                worst_t = t + 1;
                worst_i = i;
            }
        }
    }
    InequalityReport r = make_report("vhat_dominance", worst_lhs, worst_rhs,
                                     "t=" + std::to_string(worst_t) +
                                         " coordinate=" + std::to_string(worst_i));
    r.holds = all_hold;
    return r;
}

}  // namespace regretlab
