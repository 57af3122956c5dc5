#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "regretlab/config.hpp"
#include "regretlab/experiment.hpp"

using namespace regretlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "regretlab_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

constexpr const char* kMinimalConfig =
    "problem.kind = quadratic\n"
    "problem.dim = 4\n"
    "problem.seed = 3\n"
    "T = 50\n"
    "opt.sgd.eta = auto\n";

}  // namespace

TEST_CASE("parse_config: minimal config") {
    const ParseResult r = parse_config(kMinimalConfig);
    REQUIRE(r.ok());
    CHECK(r.config->problem.kind == "quadratic");
    CHECK(r.config->T == 50);
    REQUIRE(r.config->optimizers.size() == 1);
    CHECK(r.config->optimizers[0].cfg.algo == Algo::Sgd);
    CHECK(r.config->optimizers[0].eta_auto);
}

TEST_CASE("parse_config: comments, sections, explicit algo") {
    const ParseResult r = parse_config(
        "# experiment\n"
        "problem.kind = sparse   # generated instance\n"
        "problem.dim = 20\n"
        "problem.density = 0.25\n"
        "T = 10\n"
        "batch = minibatch\n"
        "batch.count = 4\n"
        "certify = false\n"
        "opt.first.algo = adagrad\n"
        "opt.first.eta = 0.5\n"
        "opt.second.algo = adagrad\n"
        "opt.second.eta = 0.5\n");
    REQUIRE(r.ok());
    CHECK(r.config->minibatch);
    CHECK(r.config->batch_count == 4);
    REQUIRE(r.config->optimizers.size() == 2);
    CHECK(r.config->optimizers[0].name == "first");
    CHECK(r.config->optimizers[1].cfg.algo == Algo::Adagrad);
}

TEST_CASE("parse_config: gamma window error") {
    const ParseResult r = parse_config(
        "problem.kind = quadratic\n"
        "opt.momentum.eta = 0.1\n"
        "opt.momentum.gamma = 1.0\n");
    REQUIRE(!r.ok());
    bool found = false;
    for (const std::string& e : r.errors) {
        if (e.find("gamma must be in [0,1)") != std::string::npos) found = true;
    }
    CHECK(found);
}

TEST_CASE("parse_config: unknown keys are named") {
    const ParseResult r = parse_config(
        "problem.kind = quadratic\n"
        "moementum = 0.9\n"
        "opt.sgd.eta = 0.1\n"
        "opt.sgd.gammma = 0.5\n");
    REQUIRE(!r.ok());
    bool top = false, nested = false;
    for (const std::string& e : r.errors) {
        if (e.find("moementum") != std::string::npos) top = true;
        if (e.find("gammma") != std::string::npos) nested = true;
    }
    CHECK(top);
    CHECK(nested);
}

TEST_CASE("parse_config: all errors are collected") {
    const ParseResult r = parse_config(
        "problem.kind = cubic\n"
        "T = 0\n"
        "opt.sgd.eta = -1\n"
        "opt.adam.eta = auto\n");
    REQUIRE(!r.ok());
    CHECK(r.errors.size() >= 4);
    CHECK(!r.config.has_value());
}

TEST_CASE("parse_config: misc validation") {
    CHECK(!parse_config("opt.sgd.eta = 0.1\n").ok());               // problem.kind missing
    CHECK(!parse_config("problem.kind = quadratic\n").ok());        // no optimizer
    CHECK(!parse_config("problem.kind = quadratic\nnot a line\nopt.sgd.eta=1\n").ok());
    CHECK(!parse_config("problem.kind = quadratic\nopt.mystery.eta = 1\n").ok());
    CHECK(!parse_config(
               "problem.kind = quadratic\nbatch = minibatch\nopt.sgd.eta = 1\n")
               .ok());  // no rows to batch on a quadratic
}

TEST_CASE("instantiate_problem and initial_theta") {
    ExperimentConfig cfg;
    cfg.problem.kind = "logistic";
    cfg.problem.dim = 3;
    cfg.problem.rows = 12;
    cfg.problem.l2 = 0.2;
    cfg.problem.seed = 5;
    const Objective obj = instantiate_problem(cfg.problem);
    CHECK(obj.dim() == 3);
    CHECK(obj.optimum().has_value());

    cfg.theta0 = Vec{2.5};
    CHECK(initial_theta(cfg, obj) == Vec{2.5, 2.5, 2.5});
    cfg.theta0 = Vec{1.0, 2.0, 3.0};
    CHECK(initial_theta(cfg, obj) == Vec{1.0, 2.0, 3.0});
    cfg.theta0 = Vec{1.0, 2.0};
    CHECK_THROWS_AS(initial_theta(cfg, obj), std::invalid_argument);
    cfg.theta0.reset();
    CHECK(initial_theta(cfg, obj).size() == 3);
    CHECK(initial_theta(cfg, obj) == initial_theta(cfg, obj));  // seeded
}

TEST_CASE("steps_to_tolerance") {
    Trace t;
    for (int i = 1; i <= 4; ++i) {
        TraceStep s;
        s.t = i;
        s.loss = 10.0 / i;  // 10, 5, 3.33, 2.5
        t.steps.push_back(s);
    }
    CHECK(steps_to_tolerance(t, 0.0, 0.5) == 2);    // threshold 5
    CHECK(steps_to_tolerance(t, 0.0, 0.34) == 3);   // threshold 3.4
    CHECK(steps_to_tolerance(t, 0.0, 1e-6) == -1);  // never reached
}

TEST_CASE("run_experiment writes artifacts and certifies") {
    ParseResult parsed = parse_config(kMinimalConfig);
    REQUIRE(parsed.ok());
    ExperimentConfig cfg = *parsed.config;
    cfg.certify = true;
    cfg.out_dir = fresh_dir("run_ok").string();
    CHECK(run_experiment(cfg) == 0);
    CHECK(fs::exists(fs::path(cfg.out_dir) / "sgd.trace.jsonl"));
    CHECK(fs::exists(fs::path(cfg.out_dir) / "sgd.cert.json"));
    CHECK(fs::exists(fs::path(cfg.out_dir) / "sgd.cert.csv"));
    CHECK(!fs::exists(fs::path(cfg.out_dir) / "sgd.svg"));  // plot off

    cfg.plot = true;
    cfg.out_dir = fresh_dir("run_plot").string();
    CHECK(run_experiment(cfg) == 0);
    CHECK(fs::exists(fs::path(cfg.out_dir) / "sgd.svg"));
}

TEST_CASE("run_experiment: precondition violation exits nonzero with a refusal report") {
    ParseResult parsed = parse_config(
        "problem.kind = quadratic\n"
        "problem.dim = 4\n"
        "problem.seed = 3\n"
        "T = 20\n"
        "certify = true\n"
        "opt.sgd.eta = 50\n");  // far above 1/L for this instance
    REQUIRE(parsed.ok());
    ExperimentConfig cfg = *parsed.config;
    cfg.out_dir = fresh_dir("run_refused").string();
    CHECK(run_experiment(cfg) != 0);
    const fs::path report_path = fs::path(cfg.out_dir) / "sgd.cert.json";
    REQUIRE(fs::exists(report_path));
    CHECK(slurp(report_path).find("refused") != std::string::npos);
}

TEST_CASE("byte-identical reruns") {
    ParseResult parsed = parse_config(kMinimalConfig);
    REQUIRE(parsed.ok());
    ExperimentConfig cfg = *parsed.config;
    cfg.certify = true;
    cfg.plot = true;

    cfg.out_dir = fresh_dir("rerun_a").string();
    REQUIRE(run_experiment(cfg) == 0);
    const fs::path a = cfg.out_dir;
    cfg.out_dir = fresh_dir("rerun_b").string();
    REQUIRE(run_experiment(cfg) == 0);
    const fs::path b = cfg.out_dir;

    for (const char* name :
         {"sgd.trace.jsonl", "sgd.cert.json", "sgd.cert.csv", "sgd.svg"}) {
        CHECK(slurp(a / name) == slurp(b / name));
    }
}

TEST_CASE("compare_optimizers: duplicate entries give identical rows") {
    ParseResult parsed = parse_config(
        "problem.kind = quadratic\n"
        "problem.dim = 4\n"
        "problem.seed = 9\n"
        "T = 100\n"
        "opt.a.algo = sgd\n"
        "opt.a.eta = auto\n"
        "opt.b.algo = sgd\n"
        "opt.b.eta = auto\n");
    REQUIRE(parsed.ok());
    ExperimentConfig cfg = *parsed.config;
    cfg.out_dir = fresh_dir("compare_dup").string();
    CHECK(compare_optimizers(cfg) == 0);

    std::stringstream csv(slurp(fs::path(cfg.out_dir) / "comparison.csv"));
    std::string header, row_a, row_b;
    std::getline(csv, header);
    std::getline(csv, row_a);
    std::getline(csv, row_b);
    CHECK(header == "name,algo,final_loss,final_regret,steps_to_tolerance,certificate");
    CHECK(row_a.substr(row_a.find(',')) == row_b.substr(row_b.find(',')));
}

TEST_CASE("compare_optimizers requires two entries") {
    ParseResult parsed = parse_config(kMinimalConfig);
    REQUIRE(parsed.ok());
    ExperimentConfig cfg = *parsed.config;
    cfg.out_dir = fresh_dir("compare_one").string();
    CHECK(compare_optimizers(cfg) == 2);
}

TEST_CASE("lemma campaign: deterministic and violation-free") {
    const std::vector<CampaignRow> rows = lemma_campaign_rows(12345, 3);
    CHECK(rows.size() == 18);  // 6 checkers x 3 trials
    for (const CampaignRow& row : rows) CHECK(row.report.holds);

    const std::vector<CampaignRow> again = lemma_campaign_rows(12345, 3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].report.lhs == again[i].report.lhs);
        CHECK(rows[i].report.rhs == again[i].report.rhs);
        CHECK(rows[i].seed == again[i].seed);
    }

    const fs::path dir = fresh_dir("campaign");
    CHECK(run_lemma_campaign(12345, 3, dir.string()) == 0);
    const std::string csv = slurp(dir / "lemmas.csv");
    CHECK(csv.rfind("name,trial,lhs,rhs,slack,holds,seed\n", 0) == 0);
    CHECK(csv.find("false") == std::string::npos);
}

TEST_CASE("emit_svg_plot") {
    RegretCertificate tiny;
    tiny.algorithm = "sgd";
    tiny.T = 2;
    tiny.regret = {1.0, 2.0};
    tiny.bound = {5.0, 5.0};  // constant bound renders horizontally
    tiny.regret_final = 2.0;
    tiny.bound_final = 5.0;
    tiny.status = CertStatus::Holds;

    const fs::path dir = fresh_dir("svg");
    emit_svg_plot(tiny, (dir / "tiny.svg").string());
    const std::string svg = slurp(dir / "tiny.svg");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("<polyline") != std::string::npos);
    // two points per series: each polyline has exactly two "x,y" pairs
    std::size_t pos = 0;
    int polylines = 0;
    while ((pos = svg.find("points=\"", pos)) != std::string::npos) {
        const std::size_t end = svg.find('"', pos + 8);
        const std::string pts = svg.substr(pos + 8, end - pos - 8);
        int commas = 0;
        for (char ch : pts) commas += ch == ',';
        CHECK(commas == 2);
        ++polylines;
        pos = end;
    }
    CHECK(polylines == 2);

    // large run: at most 1000 points per series
    RegretCertificate big;
    big.algorithm = "sgd";
    big.T = 10000;
    big.regret.resize(10000);
    big.bound.resize(10000, 123.0);
    for (int i = 0; i < 10000; ++i) big.regret[static_cast<std::size_t>(i)] = i * 0.01;
    big.regret_final = big.regret.back();
    big.bound_final = 123.0;
    emit_svg_plot(big, (dir / "big.svg").string());
    const std::string bigsvg = slurp(dir / "big.svg");
    pos = 0;
    while ((pos = bigsvg.find("points=\"", pos)) != std::string::npos) {
        const std::size_t end = bigsvg.find('"', pos + 8);
        const std::string pts = bigsvg.substr(pos + 8, end - pos - 8);
        int commas = 0;
        for (char ch : pts) commas += ch == ',';
        CHECK(commas <= 1000);
        pos = end;
    }
}

TEST_CASE("grad_check exits clean for every family") {
    for (const char* kind : {"quadratic", "least_squares", "logistic", "sparse"}) {
        ExperimentConfig cfg;
        cfg.problem.kind = kind;
        cfg.problem.dim = 5;
        cfg.problem.rows = 15;
        cfg.problem.seed = 8;
        cfg.problem.density = 0.4;
        cfg.seed = 77;
        CHECK(grad_check(cfg) == 0);
    }
}

TEST_CASE("certify_trace_file round trip") {
    ParseResult parsed = parse_config(kMinimalConfig);
    REQUIRE(parsed.ok());
    ExperimentConfig cfg = *parsed.config;
    cfg.certify = true;
    cfg.out_dir = fresh_dir("cert_file").string();
    REQUIRE(run_experiment(cfg) == 0);

    ExperimentConfig cfg2 = cfg;
    cfg2.out_dir = (fs::path(cfg.out_dir) / "again").string();
    CHECK(certify_trace_file((fs::path(cfg.out_dir) / "sgd.trace.jsonl").string(), cfg2) == 0);
    CHECK(fs::exists(fs::path(cfg2.out_dir) / "sgd.cert.json"));
    // identical certificate both ways
    CHECK(slurp(fs::path(cfg.out_dir) / "sgd.cert.json") ==
          slurp(fs::path(cfg2.out_dir) / "sgd.cert.json"));
}
