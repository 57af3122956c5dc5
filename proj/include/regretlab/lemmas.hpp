#pragma once

#include <string>
#include <vector>

#include "regretlab/problems.hpp"
#include "regretlab/tolerance.hpp"
#include "regretlab/trace.hpp"
#include "regretlab/vec.hpp"

namespace regretlab {

// One executed inequality: holds iff slack = rhs - lhs clears the shared
// tolerance. For per-coordinate checks lhs/rhs belong to the coordinate with
// the smallest slack and holds covers all of them; witness says which
// instance was checked.
struct InequalityReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool holds = false;
    std::string witness;
};

InequalityReport make_report(std::string name, double lhs, double rhs, std::string witness);

// Diagonal metric psi(x) = <x, (delta I + diag(s)) x>.
struct BregmanMetric {
    Vec s;  // coordinatewise >= 0
    double delta = 0.0;
};

// B_psi(x, y) = psi(x) - psi(y) - <grad psi(y), x - y>
//            = <x - y, (delta I + diag(s)) (x - y)>  for this quadratic psi.
double bregman(const BregmanMetric& metric, const Vec& x, const Vec& y);

// psi_t built from a trace's gradient history: s_t are the prefix column
// norms, delta is shared across steps.
std::vector<BregmanMetric> metrics_from_trace(const Trace& trace, double delta);

// 0 <= J(y) - J(x) - <grad J(x), y-x> <= (L/2) ||x-y||^2.
// lhs/rhs report the upper inequality; holds requires both.
InequalityReport check_convexity_sandwich(const Objective& obj, const Vec& x, const Vec& y,
                                          double lipschitz);

// J(x) + <grad J(x), y-x> + 1/(2L) ||grad J(x) - grad J(y)||^2 <= J(y).
InequalityReport check_cocoercivity(const Objective& obj, const Vec& x, const Vec& y,
                                    double lipschitz);

// R_J(T) <= (1/eta) B_{psi_1}(theta*, theta_1)
//         + (1/eta) sum_{t=1}^{T-1} [B_{psi_{t+1}}(theta*, theta_{t+1})
//                                    - B_{psi_t}(theta*, theta_{t+1})]
//         + (eta/2) sum_t <g_t, (delta I + diag(s_t))^{-1} g_t>.
InequalityReport check_duchi_prop3(const Trace& trace, const Objective& obj,
                                   const std::vector<BregmanMetric>& metrics, double eta);

// sum_t <g_t, diag(s_t)^{-1} g_t> <= 2 sum_i ||g_{1:T,i}||_2; coordinates
// with s_{t,i} = 0 contribute 0.
InequalityReport check_duchi_lemma4(const GradientHistory& h);

// Per coordinate: sum_t |g_{t,i}|/sqrt(t) <= 2 L_inf ||g_{1:T,i}||_2.
// Throws when l_inf understates the realized max ||g_t||_inf.
InequalityReport check_kingma_lemma103(const GradientHistory& h, double l_inf);

// Per coordinate: sum_t mhat_{t,i}^2 / sqrt(t vhat_{t,i})
//   <= 2 L_inf / ((1-gamma)^2 sqrt(1-beta2)) ||g_{1:T,i}||_2,
// gamma = beta1^2/sqrt(beta2); moments from the constant-beta1 recurrences
// with bias correction; terms with vhat = 0 are 0.
InequalityReport check_kingma_lemma104(const GradientHistory& h, double beta1, double beta2,
                                       double l_inf);

// vhat_{t,i} <= ||g_{1:t,i}||_2^2 for every t, i.
InequalityReport check_vhat_dominance(const GradientHistory& h, double beta2);

}  // namespace regretlab
