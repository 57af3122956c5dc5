#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "regretlab/rng.hpp"
#include "regretlab/vec.hpp"

namespace regretlab {

// Small dense row-major matrix; all problem data here is desk-scale.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

    double& at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
};

Vec matvec(const Matrix& m, const Vec& x);
Vec matvec_transposed(const Matrix& m, const Vec& x);

// Gaussian elimination with partial pivoting. Throws std::runtime_error on a
// (numerically) singular system.
Vec solve_linear(Matrix m, Vec b);

enum class RegKind { None, L1 };

struct Regularizer {
    RegKind kind = RegKind::None;
    double weight = 0.0;

    double value(const Vec& theta) const;
    // Subgradient with the sign(0) = 0 selection.
    Vec subgradient(const Vec& theta) const;
};

struct QuadraticSpec {
    Matrix a;  // symmetric PSD
    Vec b;
};

enum class ObjKind { Quadratic, LeastSquares, Logistic };

// A convex objective J(theta) = f(theta) + phi(theta) with a gradient
// oracle, optional known optimum and Lipschitz constant, and mini-batch
// access. Instances are immutable after construction and cheap to copy.
class Objective {
public:
    int dim() const;
    ObjKind kind() const;
    std::string kind_name() const;

    // Full objective including the regularizer.
    double value(const Vec& theta) const;
    // Gradient of the full objective where differentiable; for an L1 term
    // the sign(0) = 0 subgradient selection is used.
    Vec gradient(const Vec& theta) const;
    Vec subgradient(const Vec& theta) const { return gradient(theta); }

    // Smooth part f only (what a composite/proximal update consumes).
    double smooth_value(const Vec& theta) const;
    Vec smooth_gradient(const Vec& theta) const;

    const Regularizer& regularizer() const;
    const std::optional<Vec>& optimum() const;
    std::optional<double> optimal_value() const;
    std::optional<double> lipschitz() const;

    int batch_count() const;
    // Batch values/gradients are scaled so their average over all batches
    // equals the full value/gradient.
    double batch_value(const Vec& theta, int batch_index) const;
    Vec batch_gradient(const Vec& theta, int batch_index) const;
    Vec batch_smooth_gradient(const Vec& theta, int batch_index) const;

    // Returns a copy with rows partitioned into `count` contiguous batches
    // after a seeded shuffle.
    Objective with_batches(int count, std::uint64_t seed) const;
    // Returns a copy carrying an L1 regularizer of the given weight.
    Objective with_l1(double weight) const;

    nlohmann::json to_json() const;
    static Objective from_json(const nlohmann::json& j);

    struct Data;
    explicit Objective(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

private:
    std::shared_ptr<const Data> data_;
};

// J(theta) = 1/2 <theta, A theta> - <b, theta>; optimum solves A theta* = b.
// Throws when the optimum is requested and A is singular.
Objective make_quadratic(const QuadraticSpec& spec, bool want_optimum = true);

// J(theta) = 1/2 ||X theta - y||^2 with row batches; optimum via the normal
// equations when X^T X is nonsingular.
Objective make_least_squares(Matrix x, Vec y);

// J(theta) = 1/n sum log(1 + exp(-label_i <x_i, theta>)) + l2/2 ||theta||^2.
// The optimum is found by the reference solver (full-batch descent at
// eta = 1/L until ||grad|| <= 1e-10) and cached.
Objective make_logistic(Matrix x, std::vector<int> labels, double l2_weight);

// Least-squares instance whose rows each touch ceil(density * d)
// coordinates. Supports tile a seeded permutation so every coordinate is
// covered; one batch per row.
Objective make_sparse_problem(int d, double density, Rng rng);

// Seeded generators used by the experiment harness.
Objective make_random_spd_quadratic(int dim, Rng rng);
Objective make_random_least_squares(int n, int d, Rng rng);
Objective make_random_logistic(int n, int d, double l2_weight, Rng rng);

// Max absolute central-difference error over coordinates.
double check_gradient(const Objective& obj, const Vec& theta, double h);

struct PowerIterationError : std::runtime_error {
    double last_estimate;
    PowerIterationError(const std::string& msg, double estimate)
        : std::runtime_error(msg), last_estimate(estimate) {}
};

// Dominant eigenvalue of a symmetric PSD operator; stops when successive
// Rayleigh quotients differ by less than tol relative. Throws
// PowerIterationError (carrying the last estimate) on non-convergence.
double lipschitz_power_iteration(const std::function<Vec(const Vec&)>& apply, int dim,
                                 double tol, int max_iter);

struct StepSizeVerdict {
    bool ok = false;
    std::string violation;  // names the failed condition when !ok
};

// Checks the theorem step-size windows: sgd eta in (0, 1/L]; momentum
// gamma in [0,1), eta in (0, (1-gamma)/L]; nag gamma in [0,1),
// eta in (0, 1/L]. Unknown algorithm names throw.
StepSizeVerdict validate_step_size(const std::string& algorithm, double eta, double gamma,
                                   double lipschitz);

}  // namespace regretlab
