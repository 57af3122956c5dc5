#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "regretlab/vec.hpp"

namespace regretlab {

// One recorded iteration: theta is the iterate the step started from
// (theta_1 is the initial point), grad is the gradient actually fed to the
// update, loss is the full objective at theta.
struct TraceStep {
    int t = 0;
    Vec theta;
    Vec grad;
    double loss = 0.0;
};

// Immutable record of a completed run. `meta` keeps the run parameters as
// strings so serialization round-trips byte for byte.
struct Trace {
    std::map<std::string, std::string> meta;
    std::vector<TraceStep> steps;

    int length() const { return static_cast<int>(steps.size()); }
    int dim() const { return steps.empty() ? 0 : static_cast<int>(steps.front().theta.size()); }

    bool has_meta(const std::string& key) const { return meta.count(key) > 0; }
    // Throws if the key is missing or not numeric.
    double meta_num(const std::string& key) const;
    std::string meta_str(const std::string& key, const std::string& fallback = "") const;

    GradientHistory gradient_history() const;
};

// 17 significant decimal digits: enough to reproduce any finite double.
std::string format_g17(double x);

// JSON-lines: a header line {"meta":{...}} followed by one line per step
// with fields t, theta, grad, loss. Doubles are written with format_g17 so a
// write/read cycle is bit-exact.
void write_trace_jsonl(const Trace& trace, std::ostream& os);
Trace read_trace_jsonl(std::istream& is);

void save_trace(const Trace& trace, const std::string& path);
Trace load_trace(const std::string& path);

}  // namespace regretlab
