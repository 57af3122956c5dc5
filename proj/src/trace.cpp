#include "regretlab/trace.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace regretlab {

double Trace::meta_num(const std::string& key) const {
    auto it = meta.find(key);
    if (it == meta.end()) {
        throw std::invalid_argument("trace meta: missing key '" + key + "'");
    }
    std::size_t pos = 0;
    double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) {
        throw std::invalid_argument("trace meta: key '" + key + "' is not numeric");
    }
    return v;
}

std::string Trace::meta_str(const std::string& key, const std::string& fallback) const {
    auto it = meta.find(key);
    return it == meta.end() ? fallback : it->second;
}

GradientHistory Trace::gradient_history() const {
    GradientHistory h;
    for (const TraceStep& s : steps) h.push(s.grad);
    return h;
}

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {

void append_json_string(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '"';
}

void append_vec(std::string& out, const Vec& v) {
    out += '[';
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += format_g17(v[i]);
    }
    out += ']';
}

}  // namespace

void write_trace_jsonl(const Trace& trace, std::ostream& os) {
    std::string line = "{\"meta\":{";
    bool first = true;
    for (const auto& [k, v] : trace.meta) {
        if (!first) line += ',';
        first = false;
        append_json_string(line, k);
        line += ':';
        append_json_string(line, v);
    }
    line += "}}\n";
    os << line;
    for (const TraceStep& s : trace.steps) {
        line.clear();
        line += "{\"t\":" + std::to_string(s.t) + ",\"theta\":";
        append_vec(line, s.theta);
        line += ",\"grad\":";
        append_vec(line, s.grad);
        line += ",\"loss\":" + format_g17(s.loss) + "}\n";
        os << line;
    }
}

Trace read_trace_jsonl(std::istream& is) {
    Trace trace;
    std::string line;
    bool have_header = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        if (!have_header) {
            if (!j.contains("meta")) {
                throw std::runtime_error("trace: first line must carry meta");
            }
            for (auto it = j["meta"].begin(); it != j["meta"].end(); ++it) {
                trace.meta[it.key()] = it.value().get<std::string>();
            }
            have_header = true;
            continue;
        }
        TraceStep s;
        s.t = j.at("t").get<int>();
        s.theta = j.at("theta").get<Vec>();
        s.grad = j.at("grad").get<Vec>();
        s.loss = j.at("loss").get<double>();
        trace.steps.push_back(std::move(s));
    }
    if (!have_header) {
        throw std::runtime_error("trace: empty stream");
    }
    return trace;
}

void save_trace(const Trace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_trace_jsonl(trace, out);
}

Trace load_trace(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return read_trace_jsonl(in);
}

}  // namespace regretlab
