#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace regretlab {

// Parameter vectors are plain dense double vectors. All operations are pure
// and dimension-checked; callers treat vectors as values.
using Vec = std::vector<double>;

inline bool all_finite(const Vec& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

inline void require_same_dim(const Vec& a, const Vec& b, const char* op) {
    if (a.size() != b.size()) {
        throw std::invalid_argument(std::string(op) + ": dimension mismatch (" +
                                    std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
    }
}

inline double dot(const Vec& a, const Vec& b) {
    require_same_dim(a, b, "dot");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += a[i] * b[i];
    }
    return sum;
}

inline double norm2(const Vec& a) {
    return std::sqrt(dot(a, a));
}

inline double norm_inf(const Vec& a) {
    double m = 0.0;
    for (double x : a) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

// sqrt(sum_i w_i a_i^2): the diagonal Mahalanobis norm ||a||_W.
inline double mahalanobis_norm(const Vec& a, const Vec& weights) {
    require_same_dim(a, weights, "mahalanobis_norm");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (weights[i] < 0.0) {
            throw std::invalid_argument("mahalanobis_norm: negative weight at coordinate " +
                                        std::to_string(i));
        }
        sum += weights[i] * a[i] * a[i];
    }
    return std::sqrt(sum);
}

inline Vec sub(const Vec& a, const Vec& b) {
    require_same_dim(a, b, "sub");
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

inline Vec add(const Vec& a, const Vec& b) {
    require_same_dim(a, b, "add");
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

inline Vec scaled(const Vec& a, double alpha) {
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = alpha * a[i];
    return out;
}

// Columns g_1..g_T of a gradient history, all of one dimension.
struct GradientHistory {
    std::vector<Vec> columns;

    GradientHistory() = default;
    explicit GradientHistory(std::vector<Vec> cols);

    void push(Vec g);
    int dim() const { return columns.empty() ? 0 : static_cast<int>(columns.front().size()); }
    int steps() const { return static_cast<int>(columns.size()); }
};

// s_t with s_{t,i} = ||g_{1:t,i}||_2 for every prefix t; coordinatewise
// non-decreasing in t. Throws on an empty history.
std::vector<Vec> prefix_column_norms(const GradientHistory& h);

}  // namespace regretlab
