#include "regretlab/problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace regretlab {

Vec matvec(const Matrix& m, const Vec& x) {
    if (static_cast<int>(x.size()) != m.cols) {
        throw std::invalid_argument("matvec: dimension mismatch");
    }
    Vec out(static_cast<std::size_t>(m.rows), 0.0);
    for (int i = 0; i < m.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < m.cols; ++j) s += m.at(i, j) * x[j];
        out[i] = s;
    }
    return out;
}

Vec matvec_transposed(const Matrix& m, const Vec& x) {
    if (static_cast<int>(x.size()) != m.rows) {
        throw std::invalid_argument("matvec_transposed: dimension mismatch");
    }
    Vec out(static_cast<std::size_t>(m.cols), 0.0);
    for (int i = 0; i < m.rows; ++i) {
        for (int j = 0; j < m.cols; ++j) out[j] += m.at(i, j) * x[i];
    }
    return out;
}

Vec solve_linear(Matrix m, Vec b) {
    if (m.rows != m.cols || static_cast<int>(b.size()) != m.rows) {
        throw std::invalid_argument("solve_linear: shape mismatch");
    }
    const int n = m.rows;
    double scale = 0.0;
    for (double v : m.a) scale = std::max(scale, std::abs(v));
    const double tiny = 1e-13 * std::max(1.0, scale);
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r) {
            if (std::abs(m.at(r, col)) > std::abs(m.at(pivot, col))) pivot = r;
        }
        if (std::abs(m.at(pivot, col)) <= tiny) {
            throw std::runtime_error("solve_linear: singular matrix");
        }
        if (pivot != col) {
            for (int j = 0; j < n; ++j) std::swap(m.at(pivot, j), m.at(col, j));
            std::swap(b[pivot], b[col]);
        }
        for (int r = col + 1; r < n; ++r) {
            const double f = m.at(r, col) / m.at(col, col);
            if (f == 0.0) continue;
            for (int j = col; j < n; ++j) m.at(r, j) -= f * m.at(col, j);
            b[r] -= f * b[col];
        }
    }
    Vec x(static_cast<std::size_t>(n), 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= m.at(i, j) * x[j];
        x[i] = s / m.at(i, i);
    }
    return x;
}

double Regularizer::value(const Vec& theta) const {
    if (kind == RegKind::None || weight == 0.0) return 0.0;
    double s = 0.0;
    for (double x : theta) s += std::abs(x);
    return weight * s;
}

Vec Regularizer::subgradient(const Vec& theta) const {
    Vec g(theta.size(), 0.0);
    if (kind == RegKind::None || weight == 0.0) return g;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (theta[i] > 0.0) g[i] = weight;
        else if (theta[i] < 0.0) g[i] = -weight;
    }
    return g;
}

struct Objective::Data {
    ObjKind kind = ObjKind::Quadratic;
    Matrix m;                  // A for quadratic, X otherwise
    Vec rhs;                   // b for quadratic, y for least squares
    std::vector<int> labels;   // logistic
    double l2 = 0.0;           // logistic ridge
    Regularizer reg;
    std::optional<Vec> optimum;
    std::optional<double> optimal_value;
    std::optional<double> lipschitz;
    int batch_count = 1;
    std::vector<int> batch_order;
    std::vector<int> batch_offsets;  // size batch_count + 1
    std::uint64_t batch_seed = 0;
    bool batched = false;
    nlohmann::json gen;  // generation record for serialization
};

namespace {

double logistic_loss(double margin) {
    // log(1 + exp(-margin)), stable for either sign
    if (margin > 0.0) return std::log1p(std::exp(-margin));
    return -margin + std::log1p(std::exp(margin));
}

double sigmoid_of_negative(double margin) {
    // 1 / (1 + exp(margin)); exp overflow saturates cleanly to 0
    return 1.0 / (1.0 + std::exp(margin));
}

void identity_batches(Objective::Data& d, int n) {
    d.batch_count = 1;
    d.batch_order.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) d.batch_order[static_cast<std::size_t>(i)] = i;
    d.batch_offsets = {0, n};
}

void per_row_batches(Objective::Data& d, int n) {
    identity_batches(d, n);
    d.batch_count = n;
    d.batch_offsets.resize(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) d.batch_offsets[static_cast<std::size_t>(i)] = i;
}

Objective wrap(Objective::Data d) {
    return Objective(std::make_shared<const Objective::Data>(std::move(d)));
}

}  // namespace

int Objective::dim() const {
    return data_->kind == ObjKind::Quadratic ? data_->m.rows : data_->m.cols;
}

ObjKind Objective::kind() const { return data_->kind; }

std::string Objective::kind_name() const {
    switch (data_->kind) {
        case ObjKind::Quadratic: return "quadratic";
        case ObjKind::LeastSquares: return "least_squares";
        case ObjKind::Logistic: return "logistic";
    }
    return "?";
}

double Objective::smooth_value(const Vec& theta) const {
    const Data& d = *data_;
    switch (d.kind) {
        case ObjKind::Quadratic:
            return 0.5 * dot(theta, matvec(d.m, theta)) - dot(d.rhs, theta);
        case ObjKind::LeastSquares: {
            Vec r = matvec(d.m, theta);
            double s = 0.0;
            for (std::size_t i = 0; i < r.size(); ++i) {
                const double e = r[i] - d.rhs[i];
                s += e * e;
            }
            return 0.5 * s;
        }
        case ObjKind::Logistic: {
            const int n = d.m.rows;
            Vec z = matvec(d.m, theta);
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += logistic_loss(d.labels[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(i)]);
            return s / n + 0.5 * d.l2 * dot(theta, theta);
        }
    }
    return 0.0;
}

Vec Objective::smooth_gradient(const Vec& theta) const {
    const Data& d = *data_;
    switch (d.kind) {
        case ObjKind::Quadratic: {
            Vec g = matvec(d.m, theta);
            for (std::size_t i = 0; i < g.size(); ++i) g[i] -= d.rhs[i];
            return g;
        }
        case ObjKind::LeastSquares: {
            Vec r = matvec(d.m, theta);
            for (std::size_t i = 0; i < r.size(); ++i) r[i] -= d.rhs[i];
            return matvec_transposed(d.m, r);
        }
        case ObjKind::Logistic: {
            const int n = d.m.rows;
            Vec z = matvec(d.m, theta);
            Vec w(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                const int y = d.labels[static_cast<std::size_t>(i)];
                w[static_cast<std::size_t>(i)] = -y * sigmoid_of_negative(y * z[static_cast<std::size_t>(i)]) / n;
            }
            Vec g = matvec_transposed(d.m, w);
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += d.l2 * theta[i];
            return g;
        }
    }
    return {};
}

double Objective::value(const Vec& theta) const {
    return smooth_value(theta) + data_->reg.value(theta);
}

Vec Objective::gradient(const Vec& theta) const {
    Vec g = smooth_gradient(theta);
    if (data_->reg.kind != RegKind::None && data_->reg.weight != 0.0) {
        Vec r = data_->reg.subgradient(theta);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += r[i];
    }
    return g;
}

const Regularizer& Objective::regularizer() const { return data_->reg; }
const std::optional<Vec>& Objective::optimum() const { return data_->optimum; }
std::optional<double> Objective::optimal_value() const { return data_->optimal_value; }
std::optional<double> Objective::lipschitz() const { return data_->lipschitz; }
int Objective::batch_count() const { return data_->batch_count; }

namespace {

void check_batch_index(const Objective::Data& d, int k) {
    if (k < 0 || k >= d.batch_count) {
        throw std::invalid_argument("batch index out of range: " + std::to_string(k));
    }
}

}  // namespace

double Objective::batch_value(const Vec& theta, int batch_index) const {
    const Data& d = *data_;
    check_batch_index(d, batch_index);
    if (d.kind == ObjKind::Quadratic) return value(theta);
    const int lo = d.batch_offsets[static_cast<std::size_t>(batch_index)];
    const int hi = d.batch_offsets[static_cast<std::size_t>(batch_index) + 1];
    const int k = d.batch_count;
    double s = 0.0;
    if (d.kind == ObjKind::LeastSquares) {
        for (int p = lo; p < hi; ++p) {
            const int row = d.batch_order[static_cast<std::size_t>(p)];
            double r = -d.rhs[static_cast<std::size_t>(row)];
            for (int j = 0; j < d.m.cols; ++j) r += d.m.at(row, j) * theta[static_cast<std::size_t>(j)];
            s += 0.5 * r * r;
        }
        s *= k;
    } else {  // logistic
        for (int p = lo; p < hi; ++p) {
            const int row = d.batch_order[static_cast<std::size_t>(p)];
            double z = 0.0;
            for (int j = 0; j < d.m.cols; ++j) z += d.m.at(row, j) * theta[static_cast<std::size_t>(j)];
            s += logistic_loss(d.labels[static_cast<std::size_t>(row)] * z);
        }
        s = s * k / d.m.rows + 0.5 * d.l2 * dot(theta, theta);
    }
    return s + d.reg.value(theta);
}

Vec Objective::batch_smooth_gradient(const Vec& theta, int batch_index) const {
    const Data& d = *data_;
    check_batch_index(d, batch_index);
    if (d.kind == ObjKind::Quadratic) return smooth_gradient(theta);
    const int lo = d.batch_offsets[static_cast<std::size_t>(batch_index)];
    const int hi = d.batch_offsets[static_cast<std::size_t>(batch_index) + 1];
    const int k = d.batch_count;
    Vec g(theta.size(), 0.0);
    if (d.kind == ObjKind::LeastSquares) {
        for (int p = lo; p < hi; ++p) {
            const int row = d.batch_order[static_cast<std::size_t>(p)];
            double r = -d.rhs[static_cast<std::size_t>(row)];
            for (int j = 0; j < d.m.cols; ++j) r += d.m.at(row, j) * theta[static_cast<std::size_t>(j)];
            for (int j = 0; j < d.m.cols; ++j) g[static_cast<std::size_t>(j)] += d.m.at(row, j) * r;
        }
        for (auto& x : g) x *= k;
    } else {
        for (int p = lo; p < hi; ++p) {
            const int row = d.batch_order[static_cast<std::size_t>(p)];
            const int y = d.labels[static_cast<std::size_t>(row)];
            double z = 0.0;
            for (int j = 0; j < d.m.cols; ++j) z += d.m.at(row, j) * theta[static_cast<std::size_t>(j)];
            const double w = -y * sigmoid_of_negative(y * z);
            for (int j = 0; j < d.m.cols; ++j) g[static_cast<std::size_t>(j)] += d.m.at(row, j) * w;
        }
        const double f = static_cast<double>(k) / d.m.rows;
        for (std::size_t j = 0; j < g.size(); ++j) g[j] = g[j] * f + d.l2 * theta[j];
    }
    return g;
}

Vec Objective::batch_gradient(const Vec& theta, int batch_index) const {
    Vec g = batch_smooth_gradient(theta, batch_index);
    if (data_->reg.kind != RegKind::None && data_->reg.weight != 0.0) {
        Vec r = data_->reg.subgradient(theta);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += r[i];
    }
    return g;
}

Objective Objective::with_batches(int count, std::uint64_t seed) const {
    const Data& d = *data_;
    if (d.kind == ObjKind::Quadratic) {
        throw std::invalid_argument("with_batches: quadratic objectives have no data rows");
    }
    const int n = d.m.rows;
    if (count < 1 || count > n) {
        throw std::invalid_argument("with_batches: count must be in [1, rows]");
    }
    Data copy = d;
    copy.batch_order.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) copy.batch_order[static_cast<std::size_t>(i)] = i;
    Rng rng(seed);
    rng.shuffle(copy.batch_order);
    copy.batch_count = count;
    copy.batch_offsets.assign(static_cast<std::size_t>(count) + 1, 0);
    const int base = n / count, extra = n % count;
    int pos = 0;
    for (int k = 0; k < count; ++k) {
        pos += base + (k < extra ? 1 : 0);
        copy.batch_offsets[static_cast<std::size_t>(k) + 1] = pos;
    }
    copy.batch_seed = seed;
    copy.batched = true;
    return wrap(std::move(copy));
}

Objective Objective::with_l1(double weight) const {
    if (!(weight >= 0.0) || !std::isfinite(weight)) {
        throw std::invalid_argument("with_l1: weight must be finite and non-negative");
    }
    Data copy = *data_;
    copy.reg = Regularizer{RegKind::L1, weight};
    // The cached optimum belongs to the unregularized objective.
    if (weight > 0.0) {
        copy.optimum.reset();
        copy.optimal_value.reset();
    }
    return wrap(std::move(copy));
}

double lipschitz_power_iteration(const std::function<Vec(const Vec&)>& apply, int dim,
                                 double tol, int max_iter) {
    if (dim < 1) throw std::invalid_argument("lipschitz_power_iteration: dim must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("lipschitz_power_iteration: tol must be positive");
    Rng rng(0x51A7E11Eu);  // fixed start so estimates are reproducible
    Vec v = rng.normal_vec(dim);
    double nv = norm2(v);
    if (nv == 0.0) v[0] = nv = 1.0;
    for (auto& x : v) x /= nv;
    double rq = 0.0, prev = std::numeric_limits<double>::quiet_NaN();
    for (int it = 0; it < max_iter; ++it) {
        Vec w = apply(v);
        rq = dot(v, w);
        const double nw = norm2(w);
        if (nw == 0.0) return 0.0;  // v is in the kernel; PSD operator acts as zero here
        if (it > 0 && std::abs(rq - prev) <= tol * std::max(1.0, std::abs(rq))) return rq;
        prev = rq;
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = w[i] / nw;
    }
    throw PowerIterationError("lipschitz_power_iteration: no convergence after " +
                                  std::to_string(max_iter) + " iterations",
                              rq);
}

namespace {

constexpr double kPowerTol = 1e-13;
constexpr int kPowerMaxIter = 200000;

double gram_spectral_norm(const Matrix& x) {
    auto apply = [&x](const Vec& v) { return matvec_transposed(x, matvec(x, v)); };
    return lipschitz_power_iteration(apply, x.cols, kPowerTol, kPowerMaxIter);
}

nlohmann::json matrix_to_json(const Matrix& m) {
    return nlohmann::json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.a}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
    Matrix m(j.at("rows").get<int>(), j.at("cols").get<int>());
    m.a = j.at("data").get<std::vector<double>>();
    if (m.a.size() != static_cast<std::size_t>(m.rows) * static_cast<std::size_t>(m.cols)) {
        throw std::invalid_argument("matrix json: data length mismatch");
    }
    return m;
}

}  // namespace

Objective make_quadratic(const QuadraticSpec& spec, bool want_optimum) {
    const Matrix& a = spec.a;
    if (a.rows != a.cols || a.rows < 1 || static_cast<int>(spec.b.size()) != a.rows) {
        throw std::invalid_argument("make_quadratic: shape mismatch");
    }
    double scale = 0.0;
    for (double v : a.a) scale = std::max(scale, std::abs(v));
    for (int i = 0; i < a.rows; ++i) {
        for (int j = i + 1; j < a.cols; ++j) {
            if (std::abs(a.at(i, j) - a.at(j, i)) > 1e-12 * std::max(1.0, scale)) {
                throw std::invalid_argument("make_quadratic: matrix is not symmetric");
            }
        }
    }
    // Extreme eigenvalues through Gershgorin-shifted operators: A + cI and
    // cI - A are both PSD with dominant eigenvalues lam_max + c and
    // c - lam_min, so the power iteration applies even when A is indefinite.
    double gersh = 0.0;
    for (int i = 0; i < a.rows; ++i) {
        double row = 0.0;
        for (int j = 0; j < a.cols; ++j) row += std::abs(a.at(i, j));
        gersh = std::max(gersh, row);
    }
    double lam_max = 0.0, lam_min = 0.0;
    if (gersh > 0.0) {
        const double up = lipschitz_power_iteration(
            [&a, gersh](const Vec& v) {
                Vec w = matvec(a, v);
                for (std::size_t i = 0; i < w.size(); ++i) w[i] += gersh * v[i];
                return w;
            },
            a.rows, kPowerTol, kPowerMaxIter);
        lam_max = up - gersh;
        const double down = lipschitz_power_iteration(
            [&a, gersh](const Vec& v) {
                Vec w = matvec(a, v);
                for (std::size_t i = 0; i < w.size(); ++i) w[i] = gersh * v[i] - w[i];
                return w;
            },
            a.rows, kPowerTol, kPowerMaxIter);
        lam_min = gersh - down;
    }
    if (lam_min < -1e-10 * std::max(1.0, gersh)) {
        throw std::invalid_argument("make_quadratic: matrix is not positive semidefinite");
    }
    if (lam_max < 0.0) lam_max = 0.0;  // tiny negative from cancellation

    Objective::Data d;
    d.kind = ObjKind::Quadratic;
    d.m = a;
    d.rhs = spec.b;
    d.lipschitz = lam_max;
    identity_batches(d, 1);
    if (want_optimum) {
        Vec star;
        try {
            star = solve_linear(a, spec.b);
        } catch (const std::runtime_error&) {
            throw std::runtime_error("make_quadratic: singular matrix, optimum unavailable");
        }
        d.optimum = star;
        d.optimal_value = 0.5 * dot(star, matvec(a, star)) - dot(spec.b, star);
    }
    d.gen = nlohmann::json{{"kind", "quadratic"},
                           {"a", matrix_to_json(a)},
                           {"b", spec.b},
                           {"want_optimum", want_optimum}};
    return wrap(std::move(d));
}

namespace {

Objective finish_least_squares(Matrix x, Vec y, nlohmann::json gen, bool per_row) {
    Objective::Data d;
    d.kind = ObjKind::LeastSquares;
    d.m = std::move(x);
    d.rhs = std::move(y);
    d.lipschitz = gram_spectral_norm(d.m);
    if (per_row) {
        per_row_batches(d, d.m.rows);
    } else {
        identity_batches(d, d.m.rows);
    }
    // Normal equations; a singular Gram matrix just leaves the optimum unset.
    Matrix gram(d.m.cols, d.m.cols);
    for (int i = 0; i < d.m.cols; ++i) {
        for (int j = 0; j < d.m.cols; ++j) {
            double s = 0.0;
            for (int r = 0; r < d.m.rows; ++r) s += d.m.at(r, i) * d.m.at(r, j);
            gram.at(i, j) = s;
        }
    }
    try {
        Vec star = solve_linear(gram, matvec_transposed(d.m, d.rhs));
        Vec res = matvec(d.m, star);
        double v = 0.0;
        for (std::size_t i = 0; i < res.size(); ++i) {
            const double e = res[i] - d.rhs[i];
            v += e * e;
        }
        d.optimum = std::move(star);
        d.optimal_value = 0.5 * v;
    } catch (const std::runtime_error&) {
        // no optimum
    }
    d.gen = std::move(gen);
    return wrap(std::move(d));
}

}  // namespace

Objective make_least_squares(Matrix x, Vec y) {
    if (x.rows < 1 || x.cols < 1 || static_cast<int>(y.size()) != x.rows) {
        throw std::invalid_argument("make_least_squares: degenerate shapes");
    }
    nlohmann::json gen{{"kind", "least_squares"}, {"x", matrix_to_json(x)}, {"y", y}};
    return finish_least_squares(std::move(x), std::move(y), std::move(gen), false);
}

Objective make_logistic(Matrix x, std::vector<int> labels, double l2_weight) {
    if (x.rows < 1 || x.cols < 1 || static_cast<int>(labels.size()) != x.rows) {
        throw std::invalid_argument("make_logistic: degenerate shapes");
    }
    if (!(l2_weight >= 0.0)) {
        throw std::invalid_argument("make_logistic: l2_weight must be non-negative");
    }
    for (int v : labels) {
        if (v != 1 && v != -1) {
            throw std::invalid_argument("make_logistic: labels must be +1 or -1");
        }
    }
    Objective::Data d;
    d.kind = ObjKind::Logistic;
    d.m = std::move(x);
    d.labels = std::move(labels);
    d.l2 = l2_weight;
    identity_batches(d, d.m.rows);
    const double lip = gram_spectral_norm(d.m) / (4.0 * d.m.rows) + l2_weight;
    d.lipschitz = lip;
    d.gen = nlohmann::json{{"kind", "logistic"},
                           {"x", matrix_to_json(d.m)},
                           {"labels", d.labels},
                           {"l2", l2_weight}};

    // Reference solver: full-batch descent at 1/L until the gradient is
    // essentially zero. This is the instance's optimum oracle.
    Objective probe = wrap(d);
    Vec theta(static_cast<std::size_t>(d.m.cols), 0.0);
    const double eta = lip > 0.0 ? 1.0 / lip : 0.0;
    constexpr int kMaxSolveIter = 2000000;
    bool converged = false;
    for (int it = 0; it < kMaxSolveIter; ++it) {
        Vec g = probe.smooth_gradient(theta);
        if (norm2(g) <= 1e-10) {
            converged = true;
            break;
        }
        if (eta == 0.0) break;
        for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= eta * g[i];
    }
    if (!converged) {
        throw std::runtime_error(
            "make_logistic: reference solver did not reach ||grad|| <= 1e-10 "
            "(is the problem strongly convex?)");
    }
    d.optimum = theta;
    d.optimal_value = probe.smooth_value(theta);
    return wrap(std::move(d));
}

Objective make_sparse_problem(int d, double density, Rng rng) {
    if (d < 2) throw std::invalid_argument("make_sparse_problem: d must be at least 2");
    if (!(density > 0.0) || density > 1.0) {
        throw std::invalid_argument("make_sparse_problem: density must be in (0, 1]");
    }
    const int nnz_per_row = static_cast<int>(std::ceil(density * d));
    const int n = 2 * d;

    // Coordinate popularity is skewed (weight (1+j)^-1.5 over a shuffled
    // identity): a few coordinates appear in most rows while the tail
    // coordinates are rare. Row i always contains perm[i mod d], so every
    // coordinate is touched at least twice across the 2d rows.
    std::vector<int> perm(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) perm[static_cast<std::size_t>(i)] = i;
    rng.shuffle(perm);
    std::vector<double> cum(static_cast<std::size_t>(d), 0.0);
    double total = 0.0;
    for (int j = 0; j < d; ++j) {
        total += 1.0 / std::pow(1.0 + j, 1.5);
        cum[static_cast<std::size_t>(j)] = total;
    }
    auto draw_coord = [&]() {
        const double u = rng.uniform() * total;
        int lo = 0, hi = d - 1;
        while (lo < hi) {
            const int mid = (lo + hi) / 2;
            if (cum[static_cast<std::size_t>(mid)] >= u) hi = mid;
            else lo = mid + 1;
        }
        return perm[static_cast<std::size_t>(lo)];
    };

    Matrix x(n, d);
    for (int i = 0; i < n; ++i) {
        std::vector<int> support;
        if (nnz_per_row == d) {  // dense limit
            for (int j = 0; j < d; ++j) support.push_back(j);
        } else {
            support.push_back(perm[static_cast<std::size_t>(i % d)]);
            while (static_cast<int>(support.size()) < nnz_per_row) {
                const int col = draw_coord();
                bool fresh = true;
                for (int c : support) fresh = fresh && c != col;
                if (fresh) support.push_back(col);
            }
        }
        for (int col : support) x.at(i, col) = rng.normal();
    }
    Vec theta_true = rng.normal_vec(d);
    Vec y = matvec(x, theta_true);
    for (auto& v : y) v += 0.01 * rng.normal();

    nlohmann::json gen{{"kind", "sparse"}, {"d", d}, {"density", density}, {"seed", rng.seed()}};
    return finish_least_squares(std::move(x), std::move(y), std::move(gen), true);
}

Objective make_random_spd_quadratic(int dim, Rng rng) {
    if (dim < 1) throw std::invalid_argument("make_random_spd_quadratic: dim must be positive");
    Matrix g(dim, dim);
    for (auto& v : g.a) v = rng.normal();
    Matrix a(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            double s = 0.0;
            for (int k = 0; k < dim; ++k) s += g.at(k, i) * g.at(k, j);
            a.at(i, j) = s / dim + (i == j ? 0.1 : 0.0);
        }
    }
    Vec b = rng.normal_vec(dim);
    return make_quadratic(QuadraticSpec{std::move(a), std::move(b)}, true);
}

Objective make_random_least_squares(int n, int d, Rng rng) {
    if (n < 1 || d < 1) throw std::invalid_argument("make_random_least_squares: bad shape");
    Matrix x(n, d);
    for (auto& v : x.a) v = rng.normal();
    Vec theta_true = rng.normal_vec(d);
    Vec y = matvec(x, theta_true);
    for (auto& v : y) v += 0.05 * rng.normal();
    return make_least_squares(std::move(x), std::move(y));
}

Objective make_random_logistic(int n, int d, double l2_weight, Rng rng) {
    if (n < 1 || d < 1) throw std::invalid_argument("make_random_logistic: bad shape");
    Matrix x(n, d);
    for (auto& v : x.a) v = rng.normal();
    Vec theta_true = rng.normal_vec(d);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double z = 0.0;
        for (int j = 0; j < d; ++j) z += x.at(i, j) * theta_true[static_cast<std::size_t>(j)];
        // Noisy teacher labels keep the instance non-separable-ish.
        labels[static_cast<std::size_t>(i)] = (z + 0.5 * rng.normal()) >= 0.0 ? 1 : -1;
    }
    return make_logistic(std::move(x), std::move(labels), l2_weight);
}

double check_gradient(const Objective& obj, const Vec& theta, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("check_gradient: h must be positive");
    const Vec g = obj.gradient(theta);
    Vec probe = theta;
    double worst = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        probe[i] = theta[i] + h;
        const double up = obj.value(probe);
        probe[i] = theta[i] - h;
        const double down = obj.value(probe);
        probe[i] = theta[i];
        worst = std::max(worst, std::abs((up - down) / (2.0 * h) - g[i]));
    }
    return worst;
}

StepSizeVerdict validate_step_size(const std::string& algorithm, double eta, double gamma,
                                   double lipschitz) {
    if (!(lipschitz > 0.0)) {
        throw std::invalid_argument("validate_step_size: lipschitz must be positive");
    }
    auto gamma_bad = [&]() -> bool { return !(gamma >= 0.0 && gamma < 1.0); };
    auto eta_verdict = [&](double cap, const std::string& cap_desc) -> StepSizeVerdict {
        if (eta > 0.0 && eta <= cap) return {true, ""};
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", cap);
        return {false, "eta must be in (0, " + cap_desc + "] = (0, " + buf + "]"};
    };
    if (algorithm == "sgd") {
        return eta_verdict(1.0 / lipschitz, "1/L");
    }
    if (algorithm == "momentum") {
        if (gamma_bad()) return {false, "gamma must be in [0,1)"};
        return eta_verdict((1.0 - gamma) / lipschitz, "(1-gamma)/L");
    }
    if (algorithm == "nag") {
        if (gamma_bad()) return {false, "gamma must be in [0,1)"};
        return eta_verdict(1.0 / lipschitz, "1/L");
    }
    throw std::invalid_argument("validate_step_size: unknown algorithm '" + algorithm + "'");
}

nlohmann::json Objective::to_json() const {
    nlohmann::json j = data_->gen;
    if (data_->reg.kind == RegKind::L1) j["l1"] = data_->reg.weight;
    if (data_->batched) {
        j["batch_count"] = data_->batch_count;
        j["batch_seed"] = data_->batch_seed;
    }
    return j;
}

Objective Objective::from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    Objective obj = [&]() {
        if (kind == "quadratic") {
            QuadraticSpec spec{matrix_from_json(j.at("a")), j.at("b").get<Vec>()};
            return make_quadratic(spec, j.value("want_optimum", true));
        }
        if (kind == "least_squares") {
            return make_least_squares(matrix_from_json(j.at("x")), j.at("y").get<Vec>());
        }
        if (kind == "logistic") {
            return make_logistic(matrix_from_json(j.at("x")), j.at("labels").get<std::vector<int>>(),
                                 j.at("l2").get<double>());
        }
        if (kind == "sparse") {
            return make_sparse_problem(j.at("d").get<int>(), j.at("density").get<double>(),
                                       Rng(j.at("seed").get<std::uint64_t>()));
        }
        throw std::invalid_argument("objective json: unknown kind '" + kind + "'");
    }();
    if (j.contains("l1")) obj = obj.with_l1(j.at("l1").get<double>());
    if (j.contains("batch_count")) {
        obj = obj.with_batches(j.at("batch_count").get<int>(), j.at("batch_seed").get<std::uint64_t>());
    }
    return obj;
}

}  // namespace regretlab
