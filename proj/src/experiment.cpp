#include "regretlab/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace regretlab {

namespace fs = std::filesystem;

// Sub-task tags for splitting the root seed.
namespace seed_tag {
constexpr std::uint64_t theta0 = 1;
constexpr std::uint64_t batch_partition = 2;
constexpr std::uint64_t batch_schedule = 3;
constexpr std::uint64_t grad_check_points = 4;
}  // namespace seed_tag

Objective instantiate_problem(const ProblemConfig& pc) {
    Objective obj = [&]() {
        const Rng rng(pc.seed);
        if (pc.kind == "quadratic") return make_random_spd_quadratic(pc.dim, rng);
        if (pc.kind == "least_squares") {
            return make_random_least_squares(pc.rows > 0 ? pc.rows : 5 * pc.dim, pc.dim, rng);
        }
        if (pc.kind == "logistic") {
            return make_random_logistic(pc.rows > 0 ? pc.rows : 5 * pc.dim, pc.dim, pc.l2, rng);
        }
        if (pc.kind == "sparse") return make_sparse_problem(pc.dim, pc.density, rng);
        throw std::invalid_argument("unknown problem kind: " + pc.kind);
    }();
    if (pc.l1 > 0.0) obj = obj.with_l1(pc.l1);
    return obj;
}

Objective apply_batching(const Objective& obj, const ExperimentConfig& cfg) {
    if (!cfg.minibatch) return obj;
    // Sparse instances already come one-batch-per-row; keep that partition
    // unless the config asks for a specific batch count.
    if (cfg.batch_count == 1 && obj.batch_count() > 1) return obj;
    const std::uint64_t seed = Rng(cfg.seed).split(seed_tag::batch_partition).seed();
    return obj.with_batches(cfg.batch_count, seed);
}

Vec initial_theta(const ExperimentConfig& cfg, const Objective& obj) {
    const int d = obj.dim();
    if (cfg.theta0.has_value()) {
        const Vec& raw = *cfg.theta0;
        if (static_cast<int>(raw.size()) == d) return raw;
        if (raw.size() == 1) return Vec(static_cast<std::size_t>(d), raw[0]);
        throw std::invalid_argument("theta0 has " + std::to_string(raw.size()) +
                                    " entries but the problem dimension is " + std::to_string(d));
    }
    Rng rng = Rng(cfg.seed).split(seed_tag::theta0);
    return rng.normal_vec(d);
}

double resolve_eta(const OptEntry& entry, const Objective& obj) {
    if (!entry.eta_auto) return entry.cfg.eta;
    if (!obj.lipschitz().has_value() || !(*obj.lipschitz() > 0.0)) {
        throw std::invalid_argument("opt." + entry.name +
                                    ": eta = auto needs a positive Lipschitz constant");
    }
    const double lip = *obj.lipschitz();
    switch (entry.cfg.algo) {
        case Algo::Sgd:
        case Algo::Nag: return 1.0 / lip;
        case Algo::Momentum: return (1.0 - entry.cfg.gamma) / lip;
        default:
            throw std::invalid_argument("opt." + entry.name + ": eta = auto is not defined for " +
                                        algo_name(entry.cfg.algo));
    }
}

int steps_to_tolerance(const Trace& trace, double jstar, double rel_tol) {
    if (trace.steps.empty()) return -1;
    const double threshold = rel_tol * (trace.steps.front().loss - jstar);
    for (const TraceStep& s : trace.steps) {
        if (s.loss - jstar <= threshold) return s.t;
    }
    return -1;
}

RunOutcome run_single(const ExperimentConfig& cfg, const OptEntry& entry, const Objective& obj,
                      const Vec& theta0) {
    RunOutcome out;
    out.name = entry.name;
    out.cfg = entry.cfg;
    out.cfg.eta = resolve_eta(entry, obj);

    BatchMode batch = BatchMode::full();
    if (cfg.minibatch) {
        batch = BatchMode::with_seed(Rng(cfg.seed).split(seed_tag::batch_schedule).seed());
    }

    try {
        RunResult res = run(out.cfg, obj, theta0, cfg.T, batch);
        out.trace = std::move(res.trace);
        out.final_theta = std::move(res.final_theta);
    } catch (const DivergenceError& e) {
        out.diverged = true;
        out.error = e.what();
        out.trace = e.partial;
        out.trace.meta["seed"] = std::to_string(cfg.seed);
        return out;
    }
    out.trace.meta["seed"] = std::to_string(cfg.seed);

    if (cfg.certify) {
        try {
            out.cert = certify(out.trace, obj, out.cfg);
        } catch (const std::exception& e) {
            out.refusal = e.what();
        }
    }
    return out;
}

namespace {

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
    f << content;
}

void write_refusal_report(const fs::path& path, const RunOutcome& outcome) {
    std::ostringstream os;
    os << "{\n  \"algorithm\": \"" << algo_name(outcome.cfg.algo) << "\",\n"
       << "  \"status\": \"refused\",\n  \"reason\": \"" << outcome.refusal << "\"\n}\n";
    write_text_file(path, os.str());
}

std::string outcome_status(const RunOutcome& o) {
    if (o.diverged) return "diverged";
    if (!o.refusal.empty()) return "refused";
    if (o.cert) return cert_status_name(o.cert->status);
    return "off";
}

}  // namespace

void write_run_artifacts(const RunOutcome& outcome, const ExperimentConfig& cfg) {
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    save_trace(outcome.trace, (dir / (outcome.name + ".trace.jsonl")).string());
    if (!outcome.refusal.empty()) {
        write_refusal_report(dir / (outcome.name + ".cert.json"), outcome);
        return;
    }
    if (outcome.cert) {
        {
            std::ofstream f(dir / (outcome.name + ".cert.json"), std::ios::binary);
            write_certificate_json(*outcome.cert, f);
        }
        {
            std::ofstream f(dir / (outcome.name + ".cert.csv"), std::ios::binary);
            write_certificate_csv(*outcome.cert, f);
        }
        if (cfg.plot) {
            emit_svg_plot(*outcome.cert, (dir / (outcome.name + ".svg")).string());
        }
    }
}

int run_experiment(const ExperimentConfig& cfg) {
    const Objective obj = apply_batching(instantiate_problem(cfg.problem), cfg);
    const Vec theta0 = initial_theta(cfg, obj);
    bool all_ok = true;
    for (const OptEntry& entry : cfg.optimizers) {
        RunOutcome outcome = run_single(cfg, entry, obj, theta0);
        write_run_artifacts(outcome, cfg);
        std::cout << entry.name << ": " << (outcome.diverged ? "diverged" : "completed")
                  << " T=" << outcome.trace.length();
        if (outcome.cert) {
            std::cout << " regret=" << format_g17(outcome.cert->regret_final)
                      << " certificate=" << cert_status_name(outcome.cert->status);
        } else if (!outcome.refusal.empty()) {
            std::cout << " certificate=refused (" << outcome.refusal << ")";
        }
        std::cout << "\n";
        all_ok = all_ok && outcome.ok();
    }
    return all_ok ? 0 : 1;
}

int compare_optimizers(const ExperimentConfig& cfg) {
    if (cfg.optimizers.size() < 2) {
        std::cerr << "compare: need at least two optimizer sections\n";
        return 2;
    }
    const Objective obj = apply_batching(instantiate_problem(cfg.problem), cfg);
    const Vec theta0 = initial_theta(cfg, obj);

    std::ostringstream csv;
    csv << "name,algo,final_loss,final_regret,steps_to_tolerance,certificate\n";
    bool all_ok = true;
    for (const OptEntry& entry : cfg.optimizers) {
        RunOutcome outcome = run_single(cfg, entry, obj, theta0);
        write_run_artifacts(outcome, cfg);
        all_ok = all_ok && outcome.ok();

        const double final_loss =
            outcome.trace.steps.empty() ? std::nan("") : outcome.trace.steps.back().loss;
        double final_regret = std::nan("");
        int stt = -1;
        if (obj.optimal_value().has_value() && !outcome.trace.steps.empty()) {
            const double jstar = *obj.optimal_value();
            double acc = 0.0;
            for (const TraceStep& s : outcome.trace.steps) acc += s.loss - jstar;
            final_regret = acc;
            stt = steps_to_tolerance(outcome.trace, jstar, cfg.tolerance);
        }
        csv << outcome.name << "," << algo_name(outcome.cfg.algo) << "," << format_g17(final_loss)
            << "," << format_g17(final_regret) << "," << stt << "," << outcome_status(outcome)
            << "\n";
    }
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    write_text_file(dir / "comparison.csv", csv.str());
    std::cout << csv.str();
    return all_ok ? 0 : 1;
}

int certify_trace_file(const std::string& trace_path, const ExperimentConfig& cfg) {
    if (cfg.optimizers.size() != 1) {
        std::cerr << "certify: the config must contain exactly one optimizer section\n";
        return 2;
    }
    const Objective obj = instantiate_problem(cfg.problem);
    const Trace trace = load_trace(trace_path);
    OptimizerConfig ocfg = cfg.optimizers.front().cfg;
    ocfg.eta = resolve_eta(cfg.optimizers.front(), obj);

    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    const std::string name = cfg.optimizers.front().name;
    try {
        const RegretCertificate cert = certify(trace, obj, ocfg);
        {
            std::ofstream f(dir / (name + ".cert.json"), std::ios::binary);
            write_certificate_json(cert, f);
        }
        {
            std::ofstream f(dir / (name + ".cert.csv"), std::ios::binary);
            write_certificate_csv(cert, f);
        }
        if (cfg.plot) emit_svg_plot(cert, (dir / (name + ".svg")).string());
        std::cout << "certificate: " << cert_status_name(cert.status)
                  << " regret=" << format_g17(cert.regret_final)
                  << " bound=" << format_g17(cert.bound_final) << "\n";
        return cert.status == CertStatus::Violated ? 1 : 0;
    } catch (const std::exception& e) {
        RunOutcome stub;
        stub.name = name;
        stub.cfg = ocfg;
        stub.refusal = e.what();
        write_refusal_report(dir / (name + ".cert.json"), stub);
        std::cerr << "certify: refused: " << e.what() << "\n";
        return 1;
    }
}

std::vector<CampaignRow> lemma_campaign_rows(std::uint64_t seed, int trials) {
    if (trials < 1) throw std::invalid_argument("lemma campaign: trials must be at least 1");
    const Rng root(seed);
    std::vector<CampaignRow> rows;
    rows.reserve(static_cast<std::size_t>(trials) * 6);

    const char* names[] = {"convexity_sandwich", "cocoercivity",       "duchi_lemma4",
                           "kingma_lemma_10_3",  "kingma_lemma_10_4", "vhat_dominance"};
    for (int which = 0; which < 6; ++which) {
        for (int trial = 0; trial < trials; ++trial) {
            Rng r = root.split(static_cast<std::uint64_t>(which)).split(
                static_cast<std::uint64_t>(trial));
            CampaignRow row;
            row.name = names[which];
            row.trial = trial;
            row.seed = r.seed();
            if (which <= 1) {
                const int dim = 2 + static_cast<int>(r.below(4));
                const Objective obj = make_random_spd_quadratic(dim, r.split(1));
                Rng pair_rng = r.split(2);
                const Vec x = pair_rng.normal_vec(dim);
                const Vec y = pair_rng.normal_vec(dim);
                const double lip = *obj.lipschitz();
                row.report = which == 0 ? check_convexity_sandwich(obj, x, y, lip)
                                        : check_cocoercivity(obj, x, y, lip);
            } else {
                const int d = 1 + static_cast<int>(r.below(5));
                const int t_steps = 1 + static_cast<int>(r.below(50));
                Rng hist_rng = r.split(1);
                GradientHistory h;
                for (int t = 0; t < t_steps; ++t) h.push(hist_rng.normal_vec(d));
                double realized = 0.0;
                for (const Vec& g : h.columns) realized = std::max(realized, norm_inf(g));
                // The Kingma lemmas assume an a-priori bound ||g_t||_inf <=
                // L_inf over the whole domain; the campaign instantiates it
                // as max(3, realized). The tightest choice (realized max
                // itself) falsifies lemma 10.3 already on one-step
                // histories with |g| < 1/2.
                const double hypothesis_linf = std::max(3.0, realized);
                switch (which) {
                    case 2: row.report = check_duchi_lemma4(h); break;
                    case 3: row.report = check_kingma_lemma103(h, hypothesis_linf); break;
                    case 4:
                        row.report = check_kingma_lemma104(h, 0.9, 0.999, hypothesis_linf);
                        break;
                    case 5: row.report = check_vhat_dominance(h, r.uniform(0.0, 0.9995)); break;
                }
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

int run_lemma_campaign(std::uint64_t seed, int trials, const std::string& out_dir) {
    std::vector<CampaignRow> rows;
    std::ostringstream csv;
    csv << "name,trial,lhs,rhs,slack,holds,seed\n";
    int violations = 0, errors = 0;
    try {
        rows = lemma_campaign_rows(seed, trials);
    } catch (const std::exception& e) {
        std::cerr << "check-lemmas: " << e.what() << "\n";
        return 2;
    }
    for (const CampaignRow& row : rows) {
        csv << row.name << "," << row.trial << "," << format_g17(row.report.lhs) << ","
            << format_g17(row.report.rhs) << "," << format_g17(row.report.slack) << ","
            << (row.report.holds ? "true" : "false") << "," << row.seed << "\n";
        if (!row.report.holds) ++violations;
    }
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    write_text_file(dir / "lemmas.csv", csv.str());
    std::cout << "check-lemmas: " << rows.size() << " checks, " << violations << " violations, "
              << errors << " errors\n";
    return violations == 0 && errors == 0 ? 0 : 1;
}

int grad_check(const ExperimentConfig& cfg) {
    const Objective obj = instantiate_problem(cfg.problem);
    Rng rng = Rng(cfg.seed).split(seed_tag::grad_check_points);
    constexpr double kH = 1e-5;
    constexpr double kThreshold = 1e-6;
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const Vec theta = rng.normal_vec(obj.dim());
        const double err = check_gradient(obj, theta, kH);
        worst = std::max(worst, err);
        std::cout << "point " << k << ": max coordinate error " << format_g17(err) << "\n";
    }
    std::cout << "grad-check: worst " << format_g17(worst) << " (threshold "
              << format_g17(kThreshold) << ")\n";
    return worst <= kThreshold ? 0 : 1;
}

namespace {

std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

}  // namespace

void emit_svg_plot(const RegretCertificate& cert, const std::string& path) {
    if (cert.regret.empty()) throw std::invalid_argument("emit_svg_plot: empty curves");
    constexpr double kW = 860, kH = 520;
    constexpr double kLeft = 80, kRight = 30, kTop = 40, kBottom = 60;
    const double plot_w = kW - kLeft - kRight;
    const double plot_h = kH - kTop - kBottom;

    const std::vector<int> idx = downsample_indices(cert.T);
    const double log_max = std::log10(std::max(2, cert.T));
    auto x_of = [&](int t) { return kLeft + std::log10(static_cast<double>(t)) / log_max * plot_w; };
    double y_max = 0.0;
    for (int t : idx) {
        y_max = std::max(y_max, cert.regret[static_cast<std::size_t>(t) - 1]);
        if (!cert.bound.empty()) {
            y_max = std::max(y_max, cert.bound[static_cast<std::size_t>(t) - 1]);
        }
    }
    if (y_max <= 0.0) y_max = 1.0;
    auto y_of = [&](double v) { return kTop + plot_h - v / y_max * plot_h; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
       << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
    os << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << kLeft << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
       << cert.algorithm << " regret vs bound (T=" << cert.T << ")</text>\n";

    // axes
    os << "<line x1=\"" << svg_num(kLeft) << "\" y1=\"" << svg_num(kTop) << "\" x2=\""
       << svg_num(kLeft) << "\" y2=\"" << svg_num(kTop + plot_h)
       << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    os << "<line x1=\"" << svg_num(kLeft) << "\" y1=\"" << svg_num(kTop + plot_h) << "\" x2=\""
       << svg_num(kLeft + plot_w) << "\" y2=\"" << svg_num(kTop + plot_h)
       << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

    // decade ticks on the log T axis
    for (int t = 1; t <= cert.T; t *= 10) {
        const double x = x_of(t);
        os << "<line x1=\"" << svg_num(x) << "\" y1=\"" << svg_num(kTop + plot_h) << "\" x2=\""
           << svg_num(x) << "\" y2=\"" << svg_num(kTop + plot_h + 6)
           << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        os << "<text x=\"" << svg_num(x) << "\" y=\"" << svg_num(kTop + plot_h + 22)
           << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" << t
           << "</text>\n";
    }
    os << "<text x=\"" << svg_num(kLeft + plot_w / 2) << "\" y=\"" << svg_num(kH - 14)
       << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">t (log scale)"
       << "</text>\n";

    // y ticks
    for (int k = 0; k <= 4; ++k) {
        const double v = y_max * k / 4.0;
        const double y = y_of(v);
        os << "<line x1=\"" << svg_num(kLeft - 6) << "\" y1=\"" << svg_num(y) << "\" x2=\""
           << svg_num(kLeft) << "\" y2=\"" << svg_num(y)
           << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        os << "<text x=\"" << svg_num(kLeft - 10) << "\" y=\"" << svg_num(y + 4)
           << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">" << tick_label(v)
           << "</text>\n";
    }

    auto polyline = [&](const std::vector<double>& series, const char* color) {
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (int t : idx) {
            if (!first) os << " ";
            first = false;
            os << svg_num(x_of(t)) << "," << svg_num(y_of(series[static_cast<std::size_t>(t) - 1]));
        }
        os << "\"/>\n";
    };
    polyline(cert.regret, "#1f77b4");
    if (!cert.bound.empty()) polyline(cert.bound, "#d62728");

    os << "<rect x=\"" << svg_num(kLeft + plot_w - 150) << "\" y=\"" << svg_num(kTop + 8)
       << "\" width=\"12\" height=\"3\" fill=\"#1f77b4\"/>\n";
    os << "<text x=\"" << svg_num(kLeft + plot_w - 132) << "\" y=\"" << svg_num(kTop + 13)
       << "\" font-family=\"sans-serif\" font-size=\"12\">measured regret</text>\n";
    if (!cert.bound.empty()) {
        os << "<rect x=\"" << svg_num(kLeft + plot_w - 150) << "\" y=\"" << svg_num(kTop + 26)
           << "\" width=\"12\" height=\"3\" fill=\"#d62728\"/>\n";
        os << "<text x=\"" << svg_num(kLeft + plot_w - 132) << "\" y=\"" << svg_num(kTop + 31)
           << "\" font-family=\"sans-serif\" font-size=\"12\">theorem bound</text>\n";
    }
    os << "</svg>\n";

    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << os.str();
}

}  // namespace regretlab
