#include "regretlab/config.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace regretlab {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

bool parse_int(const std::string& s, long long& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtoll(s.c_str(), &end, 10);
    return end == s.c_str() + s.size();
}

bool parse_bool(const std::string& s, bool& out) {
    if (s == "true") {
        out = true;
        return true;
    }
    if (s == "false") {
        out = false;
        return true;
    }
    return false;
}

struct Parser {
    ExperimentConfig cfg;
    std::vector<std::string> errors;
    std::map<std::string, std::size_t> opt_index;
    // Track which keys were given at all, so an invalid value does not also
    // produce a redundant "missing key" error.
    std::map<std::string, bool> opt_has_algo;
    std::map<std::string, bool> opt_has_eta;
    bool kind_given = false;

    void error(const std::string& msg) { errors.push_back(msg); }

    OptEntry& opt_entry(const std::string& name) {
        auto it = opt_index.find(name);
        if (it != opt_index.end()) return cfg.optimizers[it->second];
        opt_index[name] = cfg.optimizers.size();
        OptEntry e;
        e.name = name;
        cfg.optimizers.push_back(e);
        return cfg.optimizers.back();
    }

    void set_problem(const std::string& key, const std::string& value) {
        double d = 0;
        long long n = 0;
        if (key == "kind") {
            kind_given = true;
            if (value == "quadratic" || value == "least_squares" || value == "logistic" ||
                value == "sparse") {
                cfg.problem.kind = value;
            } else {
                error("problem.kind must be one of quadratic, least_squares, logistic, sparse "
                      "(got '" +
                      value + "')");
            }
        } else if (key == "dim") {
            if (parse_int(value, n) && n >= 1) cfg.problem.dim = static_cast<int>(n);
            else error("problem.dim must be a positive integer");
        } else if (key == "seed") {
            if (parse_int(value, n) && n >= 0) cfg.problem.seed = static_cast<std::uint64_t>(n);
            else error("problem.seed must be a non-negative integer");
        } else if (key == "rows") {
            if (parse_int(value, n) && n >= 1) cfg.problem.rows = static_cast<int>(n);
            else error("problem.rows must be a positive integer");
        } else if (key == "density") {
            if (parse_double(value, d) && d > 0.0 && d <= 1.0) cfg.problem.density = d;
            else error("problem.density must be in (0,1]");
        } else if (key == "l2") {
            if (parse_double(value, d) && d >= 0.0) cfg.problem.l2 = d;
            else error("problem.l2 must be >= 0");
        } else if (key == "l1") {
            if (parse_double(value, d) && d >= 0.0) cfg.problem.l1 = d;
            else error("problem.l1 must be >= 0");
        } else {
            error("unknown key 'problem." + key + "'");
        }
    }

    void set_opt(const std::string& name, const std::string& key, const std::string& value) {
        OptEntry& e = opt_entry(name);
        double d = 0;
        bool b = false;
        if (key == "algo") {
            auto a = algo_from_name(value);
            if (a) {
                e.cfg.algo = *a;
                opt_has_algo[name] = true;
            } else {
                error("opt." + name + ".algo: unknown algorithm '" + value + "'");
            }
        } else if (key == "eta") {
            opt_has_eta[name] = true;
            if (value == "auto") {
                e.eta_auto = true;
            } else if (parse_double(value, d) && d > 0.0) {
                e.cfg.eta = d;
            } else {
                error("opt." + name + ".eta must be positive or 'auto'");
            }
        } else if (key == "gamma") {
            if (parse_double(value, d) && d >= 0.0 && d < 1.0) e.cfg.gamma = d;
            else error("opt." + name + ".gamma must be in [0,1)");
        } else if (key == "beta1") {
            if (parse_double(value, d) && d >= 0.0 && d < 1.0) e.cfg.beta1 = d;
            else error("opt." + name + ".beta1 must be in [0,1)");
        } else if (key == "beta2") {
            if (parse_double(value, d) && d >= 0.0 && d < 1.0) e.cfg.beta2 = d;
            else error("opt." + name + ".beta2 must be in [0,1)");
        } else if (key == "lambda") {
            if (parse_double(value, d) && d > 0.0 && d <= 1.0) e.cfg.lambda = d;
            else error("opt." + name + ".lambda must be in (0,1]");
        } else if (key == "epsilon") {
            if (parse_double(value, d) && d >= 0.0) e.cfg.epsilon = d;
            else error("opt." + name + ".epsilon must be >= 0");
        } else if (key == "delta") {
            if (parse_double(value, d) && d >= 0.0) e.cfg.delta = d;
            else error("opt." + name + ".delta must be >= 0");
        } else if (key == "sqrt_t_decay") {
            if (parse_bool(value, b)) e.cfg.sqrt_t_decay = b;
            else error("opt." + name + ".sqrt_t_decay must be true or false");
        } else {
            error("unknown key 'opt." + name + "." + key + "'");
        }
    }

    void set_top(const std::string& key, const std::string& value) {
        double d = 0;
        long long n = 0;
        bool b = false;
        if (key == "T") {
            if (parse_int(value, n) && n >= 1) cfg.T = static_cast<int>(n);
            else error("T must be at least 1");
        } else if (key == "seed") {
            if (parse_int(value, n) && n >= 0) cfg.seed = static_cast<std::uint64_t>(n);
            else error("seed must be a non-negative integer");
        } else if (key == "batch") {
            if (value == "full") cfg.minibatch = false;
            else if (value == "minibatch") cfg.minibatch = true;
            else error("batch must be 'full' or 'minibatch'");
        } else if (key == "batch.count") {
            if (parse_int(value, n) && n >= 1) cfg.batch_count = static_cast<int>(n);
            else error("batch.count must be at least 1");
        } else if (key == "certify") {
            if (parse_bool(value, b)) cfg.certify = b;
            else error("certify must be true or false");
        } else if (key == "plot") {
            if (parse_bool(value, b)) cfg.plot = b;
            else error("plot must be true or false");
        } else if (key == "out") {
            cfg.out_dir = value;
        } else if (key == "tolerance") {
            if (parse_double(value, d) && d > 0.0) cfg.tolerance = d;
            else error("tolerance must be positive");
        } else if (key == "theta0") {
            Vec v;
            std::stringstream ss(value);
            std::string part;
            bool ok = true;
            while (std::getline(ss, part, ',')) {
                double x = 0;
                if (parse_double(trim(part), x)) v.push_back(x);
                else ok = false;
            }
            if (ok && !v.empty()) cfg.theta0 = std::move(v);
            else error("theta0 must be a comma-separated list of numbers");
        } else {
            error("unknown key '" + key + "'");
        }
    }

    void finish() {
        if (cfg.problem.kind.empty() && !kind_given) {
            error("missing required key 'problem.kind'");
        }
        if (cfg.problem.kind == "sparse" && cfg.problem.dim < 2) {
            error("problem.dim must be at least 2 for sparse problems");
        }
        if (cfg.optimizers.empty()) error("no optimizer configured (add an opt.<name> section)");
        for (OptEntry& e : cfg.optimizers) {
            if (!opt_has_algo[e.name]) {
                auto a = algo_from_name(e.name);
                if (a) {
                    e.cfg.algo = *a;
                } else {
                    error("opt." + e.name + ": section name is not a known algorithm; set opt." +
                          e.name + ".algo");
                    continue;
                }
            }
            if (!opt_has_eta[e.name]) {
                error("opt." + e.name + ": missing required key 'eta'");
            }
            if (e.eta_auto && e.cfg.algo != Algo::Sgd && e.cfg.algo != Algo::Momentum &&
                e.cfg.algo != Algo::Nag) {
                error("opt." + e.name + ": eta = auto is only defined for sgd, momentum and nag");
            }
        }
        if (cfg.minibatch && cfg.problem.kind == "quadratic") {
            error("batch = minibatch is not available for quadratic problems (no data rows)");
        }
    }
};

}  // namespace

ParseResult parse_config(const std::string& text) {
    Parser p;
    std::stringstream ss(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(ss, raw)) {
        ++line_no;
        std::string line = raw;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            p.error("line " + std::to_string(line_no) + ": expected 'key = value'");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            p.error("line " + std::to_string(line_no) + ": expected 'key = value'");
            continue;
        }
        if (key.rfind("problem.", 0) == 0) {
            p.set_problem(key.substr(8), value);
        } else if (key.rfind("opt.", 0) == 0) {
            const std::string rest = key.substr(4);
            const std::size_t dot = rest.find('.');
            if (dot == std::string::npos || dot == 0 || dot + 1 >= rest.size()) {
                p.error("unknown key '" + key + "' (expected opt.<name>.<param>)");
            } else {
                p.set_opt(rest.substr(0, dot), rest.substr(dot + 1), value);
            }
        } else {
            p.set_top(key, value);
        }
    }
    p.finish();
    ParseResult result;
    result.errors = std::move(p.errors);
    if (result.errors.empty()) result.config = std::move(p.cfg);
    return result;
}

ParseResult parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        ParseResult r;
        r.errors.push_back("cannot open config file: " + path);
        return r;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace regretlab
