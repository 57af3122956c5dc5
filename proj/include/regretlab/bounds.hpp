#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "regretlab/optimizers.hpp"
#include "regretlab/problems.hpp"
#include "regretlab/tolerance.hpp"
#include "regretlab/trace.hpp"

namespace regretlab {

// R_J(t) = sum_{s<=t} [J(theta_s) - J*] for t = 1..T. Requires
// optimal_value <= min recorded loss + 1e-9; the error names the first
// violating step.
std::vector<double> regret_curve(const Trace& trace, double optimal_value);

// ||theta1 - theta*||^2 / (2 eta)
double sgd_bound(const Vec& theta1, const Vec& theta_star, double eta);

// gamma/(1-gamma) (J1 - Jstar) + (1-gamma)/(2 eta) ||theta1 - theta*||^2
double momentum_bound(const Vec& theta1, const Vec& theta_star, double j1, double jstar,
                      double eta, double gamma);

// Same closed form as momentum_bound (the two proofs end on the same line).
double nag_bound(const Vec& theta1, const Vec& theta_star, double j1, double jstar, double eta,
                 double gamma);

// (1/2 eta) max_{t<=T} ||theta*-theta_t||_inf^2 sum_i ||g_{1:T,i}||_2
//   + eta sum_i ||g_{1:T,i}||_2, all measured from the trace.
double adagrad_bound(const Trace& trace, const Vec& theta_star, double eta);
std::vector<double> adagrad_bound_curve(const Trace& trace, const Vec& theta_star, double eta);

// D^2/(2 eta (1-beta1)) sum_i sqrt(T vhat_{T,i})
//   + d D_inf^2 L_inf / (2 eta (1-beta1) (1-lambda)^2)
//   + eta (beta1+1) L_inf / ((1-beta1) sqrt(1-beta2) (1-gamma)^2) sum_i ||g_{1:T,i}||_2
// with gamma = beta1^2/sqrt(beta2). D_inf and L_inf are exact trace maxima;
// D uses the O(T) over-approximation 2 max_t ||theta_t - mean(theta)||_2,
// which can only enlarge the bound.
double adam_bound(const Trace& trace, double eta0, double beta1, double beta2, double lambda);
std::vector<double> adam_bound_curve(const Trace& trace, double eta0, double beta1, double beta2,
                                     double lambda);

enum class CertStatus { Holds, Violated, Empirical };

std::string cert_status_name(CertStatus s);

// Executable comparison of a measured regret curve against a theorem's
// closed-form bound. `status` is Empirical for stochastic traces, which have
// no certified bound; otherwise Holds/Violated by the kRelSlack rule.
struct RegretCertificate {
    std::string algorithm;
    int T = 0;
    std::vector<double> regret;  // R_J(1..T)
    std::vector<double> bound;   // bound evaluated on each prefix (empty if empirical)
    double regret_final = 0.0;
    double bound_final = 0.0;
    double slack = 0.0;
    CertStatus status = CertStatus::Empirical;
    std::vector<std::pair<std::string, double>> inputs;
};

// Builds the certificate for a finished run. Refuses (throws) when the
// cited theorem's preconditions are violated or required data is missing,
// so status == Violated always means a genuine bound violation.
RegretCertificate certify(const Trace& trace, const Objective& obj, const OptimizerConfig& cfg);

// At most max_points 1-based indices, log-spaced, always including 1 and T.
std::vector<int> downsample_indices(int T, int max_points = 1000);

void write_certificate_json(const RegretCertificate& cert, std::ostream& os);
void write_certificate_csv(const RegretCertificate& cert, std::ostream& os);

}  // namespace regretlab
