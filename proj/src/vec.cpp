#include "regretlab/vec.hpp"

namespace regretlab {

GradientHistory::GradientHistory(std::vector<Vec> cols) {
    for (auto& c : cols) push(std::move(c));
}

void GradientHistory::push(Vec g) {
    if (!columns.empty() && g.size() != columns.front().size()) {
        throw std::invalid_argument("GradientHistory: column dimension mismatch");
    }
    columns.push_back(std::move(g));
}

std::vector<Vec> prefix_column_norms(const GradientHistory& h) {
    if (h.columns.empty()) {
        throw std::invalid_argument("prefix_column_norms: empty history");
    }
    const std::size_t d = h.columns.front().size();
    std::vector<Vec> out;
    out.reserve(h.columns.size());
    Vec sq(d, 0.0);
    for (const Vec& g : h.columns) {
        Vec s(d);
        for (std::size_t i = 0; i < d; ++i) {
            sq[i] += g[i] * g[i];
            s[i] = std::sqrt(sq[i]);
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace regretlab
