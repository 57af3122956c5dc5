#include "regretlab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace regretlab {

std::vector<double> regret_curve(const Trace& trace, double optimal_value) {
    if (trace.steps.empty()) throw std::invalid_argument("regret_curve: empty trace");
    for (const TraceStep& s : trace.steps) {
        if (optimal_value > s.loss + 1e-9) {
            throw std::invalid_argument(
                "regret_curve: recorded loss at step " + std::to_string(s.t) +
                " is below optimal_value; theta* is not a true optimum");
        }
    }
    std::vector<double> out;
    out.reserve(trace.steps.size());
    double acc = 0.0;
    for (const TraceStep& s : trace.steps) {
        acc += s.loss - optimal_value;
        out.push_back(acc);
    }
    return out;
}

double sgd_bound(const Vec& theta1, const Vec& theta_star, double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("sgd_bound: eta must be positive");
    const double d = norm2(sub(theta1, theta_star));
    return d * d / (2.0 * eta);
}

double momentum_bound(const Vec& theta1, const Vec& theta_star, double j1, double jstar,
                      double eta, double gamma) {
    if (!(eta > 0.0)) throw std::invalid_argument("momentum_bound: eta must be positive");
    if (!(gamma >= 0.0 && gamma < 1.0)) {
        throw std::invalid_argument("momentum_bound: gamma must be in [0, 1)");
    }
    // gamma = 0 reduces to the sgd bound exactly, including in floating point.
    return gamma / (1.0 - gamma) * (j1 - jstar) +
           (1.0 - gamma) * sgd_bound(theta1, theta_star, eta);
}

double nag_bound(const Vec& theta1, const Vec& theta_star, double j1, double jstar, double eta,
                 double gamma) {
    if (!(eta > 0.0)) throw std::invalid_argument("nag_bound: eta must be positive");
    if (!(gamma >= 0.0 && gamma < 1.0)) {
        throw std::invalid_argument("nag_bound: gamma must be in [0, 1)");
    }
    // Both proofs end on the same closed form as the momentum bound.
    return gamma / (1.0 - gamma) * (j1 - jstar) +
           (1.0 - gamma) * sgd_bound(theta1, theta_star, eta);
}

std::vector<double> adagrad_bound_curve(const Trace& trace, const Vec& theta_star, double eta) {
    if (trace.steps.empty()) throw std::invalid_argument("adagrad_bound: empty trace");
    if (!(eta > 0.0)) throw std::invalid_argument("adagrad_bound: eta must be positive");
    const std::size_t d = trace.steps.front().theta.size();
    if (theta_star.size() != d) throw std::invalid_argument("adagrad_bound: dimension mismatch");

    std::vector<double> out;
    out.reserve(trace.steps.size());
    Vec sq(d, 0.0);  // per-coordinate sum of squared gradients
    double max_inf = 0.0;
    for (const TraceStep& s : trace.steps) {
        double colnorm_sum = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            sq[i] += s.grad[i] * s.grad[i];
            colnorm_sum += std::sqrt(sq[i]);
            max_inf = std::max(max_inf, std::abs(theta_star[i] - s.theta[i]));
        }
        out.push_back(max_inf * max_inf / (2.0 * eta) * colnorm_sum + eta * colnorm_sum);
    }
    return out;
}

double adagrad_bound(const Trace& trace, const Vec& theta_star, double eta) {
    return adagrad_bound_curve(trace, theta_star, eta).back();
}

std::vector<double> adam_bound_curve(const Trace& trace, double eta0, double beta1, double beta2,
                                     double lambda) {
    if (trace.steps.empty()) throw std::invalid_argument("adam_bound: empty trace");
    if (!(eta0 > 0.0)) throw std::invalid_argument("adam_bound: eta must be positive");
    const double gamma = beta1 * beta1 / std::sqrt(beta2);
    if (!(gamma < 1.0)) {
        throw std::invalid_argument("adam_bound: beta1^2/sqrt(beta2) must be below 1");
    }
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw std::invalid_argument("adam_bound: lambda must be in (0, 1)");
    }
    const std::size_t d = trace.steps.front().theta.size();

    // Centroid of the whole trace: the fixed reference point for the O(T)
    // two-norm diameter over-approximation 2 max_t ||theta_t - centroid||.
    Vec centroid(d, 0.0);
    for (const TraceStep& s : trace.steps) {
        for (std::size_t i = 0; i < d; ++i) centroid[i] += s.theta[i];
    }
    for (auto& c : centroid) c /= static_cast<double>(trace.steps.size());

    std::vector<double> out;
    out.reserve(trace.steps.size());
    Vec v(d, 0.0);        // second-moment recurrence rebuilt from the trace
    Vec sq(d, 0.0);       // per-coordinate sum of squared gradients
    Vec lo = trace.steps.front().theta, hi = lo;
    double max_to_centroid = 0.0;
    double l_inf = 0.0;
    int t = 0;
    for (const TraceStep& s : trace.steps) {
        ++t;
        double dist_sq = 0.0;
        double colnorm_sum = 0.0, vhat_sum = 0.0;
        const double corr2 = 1.0 - std::pow(beta2, t);
        double d_inf = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double g = s.grad[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
            sq[i] += g * g;
            colnorm_sum += std::sqrt(sq[i]);
            vhat_sum += std::sqrt(static_cast<double>(t) * v[i] / corr2);
            l_inf = std::max(l_inf, std::abs(g));
            lo[i] = std::min(lo[i], s.theta[i]);
            hi[i] = std::max(hi[i], s.theta[i]);
            d_inf = std::max(d_inf, hi[i] - lo[i]);
            const double dc = s.theta[i] - centroid[i];
            dist_sq += dc * dc;
        }
        max_to_centroid = std::max(max_to_centroid, std::sqrt(dist_sq));
        const double big_d = 2.0 * max_to_centroid;
        const double term1 = big_d * big_d / (2.0 * eta0 * (1.0 - beta1)) * vhat_sum;
        const double term2 = static_cast<double>(d) * d_inf * d_inf * l_inf /
                             (2.0 * eta0 * (1.0 - beta1) * (1.0 - lambda) * (1.0 - lambda));
        const double term3 = eta0 * (beta1 + 1.0) * l_inf /
                             ((1.0 - beta1) * std::sqrt(1.0 - beta2) * (1.0 - gamma) * (1.0 - gamma)) *
                             colnorm_sum;
        out.push_back(term1 + term2 + term3);
    }
    return out;
}

double adam_bound(const Trace& trace, double eta0, double beta1, double beta2, double lambda) {
    return adam_bound_curve(trace, eta0, beta1, beta2, lambda).back();
}

std::string cert_status_name(CertStatus s) {
    switch (s) {
        case CertStatus::Holds: return "holds";
        case CertStatus::Violated: return "violated";
        case CertStatus::Empirical: return "empirical";
    }
    return "?";
}

namespace {

void require_meta_match(const Trace& trace, const std::string& key, double value) {
    if (trace.meta_num(key) != value) {
        throw std::invalid_argument("certify: config value for '" + key +
                                    "' does not match the trace meta");
    }
}

void append_column_norms(std::vector<std::pair<std::string, double>>& inputs, const Trace& trace) {
    const std::size_t d = trace.steps.front().grad.size();
    Vec sq(d, 0.0);
    for (const TraceStep& s : trace.steps) {
        for (std::size_t i = 0; i < d; ++i) sq[i] += s.grad[i] * s.grad[i];
    }
    double sum = 0.0;
    for (double v : sq) sum += std::sqrt(v);
    inputs.emplace_back("colnorm_sum", sum);
    for (std::size_t i = 0; i < d; ++i) {
        inputs.emplace_back("g_colnorm_" + std::to_string(i), std::sqrt(sq[i]));
    }
}

void append_adam_inputs(std::vector<std::pair<std::string, double>>& inputs, const Trace& trace) {
    const std::size_t d = trace.steps.front().theta.size();
    Vec centroid(d, 0.0);
    for (const TraceStep& s : trace.steps) {
        for (std::size_t i = 0; i < d; ++i) centroid[i] += s.theta[i];
    }
    for (auto& c : centroid) c /= static_cast<double>(trace.steps.size());
    Vec lo = trace.steps.front().theta, hi = lo;
    double max_to_centroid = 0.0, l_inf = 0.0;
    for (const TraceStep& s : trace.steps) {
        double dist_sq = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            lo[i] = std::min(lo[i], s.theta[i]);
            hi[i] = std::max(hi[i], s.theta[i]);
            const double dc = s.theta[i] - centroid[i];
            dist_sq += dc * dc;
            l_inf = std::max(l_inf, std::abs(s.grad[i]));
        }
        max_to_centroid = std::max(max_to_centroid, std::sqrt(dist_sq));
    }
    double d_inf = 0.0;
    for (std::size_t i = 0; i < d; ++i) d_inf = std::max(d_inf, hi[i] - lo[i]);
    inputs.emplace_back("D", 2.0 * max_to_centroid);
    inputs.emplace_back("D_inf", d_inf);
    inputs.emplace_back("L_inf", l_inf);
}

}  // namespace

RegretCertificate certify(const Trace& trace, const Objective& obj, const OptimizerConfig& cfg) {
    if (trace.steps.empty()) throw std::invalid_argument("certify: empty trace");
    if (!obj.optimal_value().has_value() || !obj.optimum().has_value()) {
        throw std::invalid_argument("certify: objective has no known optimum");
    }
    if (trace.meta_str("algo") != algo_name(cfg.algo)) {
        throw std::invalid_argument("certify: trace algorithm '" + trace.meta_str("algo") +
                                    "' does not match config '" + algo_name(cfg.algo) + "'");
    }
    require_meta_match(trace, "eta", cfg.eta);
    if (cfg.algo == Algo::Momentum || cfg.algo == Algo::Nag) {
        require_meta_match(trace, "gamma", cfg.gamma);
    }
    if (cfg.algo == Algo::Adam) {
        require_meta_match(trace, "beta1", cfg.beta1);
        require_meta_match(trace, "beta2", cfg.beta2);
        require_meta_match(trace, "lambda", cfg.lambda);
        if (trace.meta_str("sqrt_t_decay") != (cfg.sqrt_t_decay ? "true" : "false")) {
            throw std::invalid_argument(
                "certify: config value for 'sqrt_t_decay' does not match the trace meta");
        }
    }

    RegretCertificate cert;
    cert.algorithm = algo_name(cfg.algo);
    cert.T = trace.length();
    const double jstar = *obj.optimal_value();
    cert.regret = regret_curve(trace, jstar);
    cert.regret_final = cert.regret.back();

    if (trace.meta_str("batch") == "minibatch") {
        // Stochastic runs get an empirical regret report: the certified
        // bounds cover only deterministic full-gradient sequences.
        cert.status = CertStatus::Empirical;
        cert.bound_final = std::numeric_limits<double>::quiet_NaN();
        cert.slack = std::numeric_limits<double>::quiet_NaN();
        cert.inputs.emplace_back("eta", cfg.eta);
        return cert;
    }

    const Vec& theta1 = trace.steps.front().theta;
    const Vec& theta_star = *obj.optimum();
    const double j1 = trace.steps.front().loss;

    switch (cfg.algo) {
        case Algo::Sgd:
        case Algo::Momentum:
        case Algo::Nag: {
            if (!obj.lipschitz().has_value()) {
                throw std::invalid_argument("certify: objective has no Lipschitz constant");
            }
            const double lip = *obj.lipschitz();
            const StepSizeVerdict verdict =
                validate_step_size(cert.algorithm, cfg.eta, cfg.gamma, lip);
            if (!verdict.ok) {
                throw std::invalid_argument("certify: step size outside the theorem window: " +
                                            verdict.violation);
            }
            if (cfg.algo == Algo::Sgd) {
                cert.bound_final = sgd_bound(theta1, theta_star, cfg.eta);
            } else if (cfg.algo == Algo::Momentum) {
                cert.bound_final = momentum_bound(theta1, theta_star, j1, jstar, cfg.eta, cfg.gamma);
            } else {
                cert.bound_final = nag_bound(theta1, theta_star, j1, jstar, cfg.eta, cfg.gamma);
            }
            cert.bound.assign(cert.regret.size(), cert.bound_final);
            cert.inputs.emplace_back("dist1", norm2(sub(theta1, theta_star)));
            cert.inputs.emplace_back("j1", j1);
            cert.inputs.emplace_back("jstar", jstar);
            cert.inputs.emplace_back("eta", cfg.eta);
            cert.inputs.emplace_back("gamma", cfg.gamma);
            cert.inputs.emplace_back("lipschitz", lip);
            break;
        }
        case Algo::Adagrad:
        case Algo::AdagradProx: {
            cert.bound = adagrad_bound_curve(trace, theta_star, cfg.eta);
            cert.bound_final = cert.bound.back();
            double max_inf = 0.0;
            for (const TraceStep& s : trace.steps) {
                max_inf = std::max(max_inf, norm_inf(sub(theta_star, s.theta)));
            }
            cert.inputs.emplace_back("eta", cfg.eta);
            cert.inputs.emplace_back("max_inf_dist", max_inf);
            append_column_norms(cert.inputs, trace);
            break;
        }
        case Algo::Adam: {
            if (!cfg.sqrt_t_decay) {
                throw std::invalid_argument(
                    "certify: the adam theorem requires the eta/sqrt(t) schedule");
            }
            cert.bound = adam_bound_curve(trace, cfg.eta, cfg.beta1, cfg.beta2, cfg.lambda);
            cert.bound_final = cert.bound.back();
            cert.inputs.emplace_back("eta", cfg.eta);
            cert.inputs.emplace_back("beta1", cfg.beta1);
            cert.inputs.emplace_back("beta2", cfg.beta2);
            cert.inputs.emplace_back("lambda", cfg.lambda);
            cert.inputs.emplace_back("gamma", cfg.beta1 * cfg.beta1 / std::sqrt(cfg.beta2));
            append_adam_inputs(cert.inputs, trace);
            append_column_norms(cert.inputs, trace);
            break;
        }
    }

    cert.slack = cert.bound_final - cert.regret_final;
    cert.status = bound_holds(cert.regret_final, cert.bound_final) ? CertStatus::Holds
                                                                   : CertStatus::Violated;
    return cert;
}

std::vector<int> downsample_indices(int T, int max_points) {
    std::vector<int> out;
    if (T <= 0) return out;
    if (T <= max_points) {
        out.resize(static_cast<std::size_t>(T));
        for (int t = 1; t <= T; ++t) out[static_cast<std::size_t>(t) - 1] = t;
        return out;
    }
    out.reserve(static_cast<std::size_t>(max_points));
    const double log_t = std::log(static_cast<double>(T));
    int prev = 0;
    for (int k = 0; k < max_points; ++k) {
        const double f = max_points == 1 ? 1.0 : static_cast<double>(k) / (max_points - 1);
        int idx = static_cast<int>(std::lround(std::exp(f * log_t)));
        idx = std::max(1, std::min(T, idx));
        if (idx > prev) {
            out.push_back(idx);
            prev = idx;
        }
    }
    if (out.back() != T) out.push_back(T);
    return out;
}

void write_certificate_json(const RegretCertificate& cert, std::ostream& os) {
    // NaN (empirical certificates) is not a JSON token; write null instead.
    auto num = [](double v) { return std::isfinite(v) ? format_g17(v) : std::string("null"); };
    os << "{\n";
    os << "  \"algorithm\": \"" << cert.algorithm << "\",\n";
    os << "  \"T\": " << cert.T << ",\n";
    os << "  \"status\": \"" << cert_status_name(cert.status) << "\",\n";
    os << "  \"regret_final\": " << num(cert.regret_final) << ",\n";
    os << "  \"bound_final\": " << num(cert.bound_final) << ",\n";
    os << "  \"slack\": " << num(cert.slack) << ",\n";
    os << "  \"inputs\": {";
    for (std::size_t i = 0; i < cert.inputs.size(); ++i) {
        if (i) os << ", ";
        os << "\"" << cert.inputs[i].first << "\": " << num(cert.inputs[i].second);
    }
    os << "},\n";
    const std::vector<int> idx = downsample_indices(cert.T);
    os << "  \"curve\": {\n    \"t\": [";
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (i) os << ",";
        os << idx[i];
    }
    os << "],\n    \"regret\": [";
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (i) os << ",";
        os << format_g17(cert.regret[static_cast<std::size_t>(idx[i]) - 1]);
    }
    os << "]";
    if (!cert.bound.empty()) {
        os << ",\n    \"bound\": [";
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (i) os << ",";
            os << format_g17(cert.bound[static_cast<std::size_t>(idx[i]) - 1]);
        }
        os << "]";
    }
    os << "\n  }\n}\n";
}

void write_certificate_csv(const RegretCertificate& cert, std::ostream& os) {
    os << "T,regret,bound,slack,holds\n";
    const std::vector<int> idx = downsample_indices(cert.T);
    for (int t : idx) {
        const double regret = cert.regret[static_cast<std::size_t>(t) - 1];
        os << t << "," << format_g17(regret) << ",";
        if (cert.bound.empty()) {
            os << "nan,nan,na\n";
        } else {
            const double bound = cert.bound[static_cast<std::size_t>(t) - 1];
            os << format_g17(bound) << "," << format_g17(bound - regret) << ","
               << (bound_holds(regret, bound) ? "true" : "false") << "\n";
        }
    }
}

}  // namespace regretlab
