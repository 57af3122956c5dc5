#include <cmath>

#include "doctest.h"
#include "regretlab/problems.hpp"
#include "regretlab/rng.hpp"
#include "test_oracles.hpp"

using namespace regretlab;

namespace {

Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

Matrix random_spd(int n, Rng& rng, double ridge = 0.1) {
    Matrix g(n, n);
    for (auto& v : g.a) v = rng.normal();
    Matrix a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += g.at(k, i) * g.at(k, j);
            a.at(i, j) = s / n + (i == j ? ridge : 0.0);
        }
    }
    return a;
}

}  // namespace

TEST_CASE("make_quadratic identity instance") {
    const Objective obj = make_quadratic({identity(2), {0, 0}});
    CHECK(obj.value({1, 1}) == 1.0);
    CHECK(obj.gradient({1, 1}) == Vec{1, 1});
    REQUIRE(obj.optimum().has_value());
    CHECK(norm2(*obj.optimum()) == 0.0);
    CHECK(*obj.lipschitz() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("make_quadratic diagonal lipschitz") {
    Matrix a(2, 2);
    a.at(0, 0) = 1.0;
    a.at(1, 1) = 4.0;
    const Objective obj = make_quadratic({a, {0, 0}});
    CHECK(*obj.lipschitz() == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("make_quadratic validation") {
    Matrix asym(2, 2);
    asym.at(0, 1) = 1.0;  // not symmetric
    CHECK_THROWS_AS(make_quadratic({asym, {0, 0}}), std::invalid_argument);

    Matrix indef(2, 2);
    indef.at(0, 0) = 1.0;
    indef.at(1, 1) = -1.0;
    CHECK_THROWS_AS(make_quadratic({indef, {0, 0}}), std::invalid_argument);

    // singular matrix: optimum request fails, no request succeeds
    Matrix rank1(2, 2);
    rank1.at(0, 0) = 1.0;
    CHECK_THROWS_AS(make_quadratic({rank1, {1, 1}}, true), std::runtime_error);
    CHECK(!make_quadratic({rank1, {1, 0}}, false).optimum().has_value());
}

TEST_CASE("make_quadratic random instance against oracles") {
    Rng rng(31);
    const Matrix a = random_spd(5, rng);
    const Vec b = rng.normal_vec(5);
    const Objective obj = make_quadratic({a, b});

    const Vec theta = rng.normal_vec(5);
    CHECK(check_gradient(obj, theta, 1e-5) <= 1e-7);

    // optimum solves A theta* = b
    const Vec residual = sub(matvec(a, *obj.optimum()), b);
    CHECK(norm2(residual) <= 1e-10);

    // lipschitz matches the dense eigenvalue oracle
    CHECK(*obj.lipschitz() ==
          doctest::Approx(oracles::jacobi_lambda_max(a)).epsilon(1e-9));
}

TEST_CASE("make_least_squares small exact instances") {
    Matrix x1(1, 1);
    x1.at(0, 0) = 1.0;
    const Objective a = make_least_squares(x1, {2});
    REQUIRE(a.optimum().has_value());
    CHECK((*a.optimum())[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(*a.optimal_value() == doctest::Approx(0.0).epsilon(1e-14));

    const Objective b = make_least_squares(identity(2), {1, -1});
    CHECK((*b.optimum())[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK((*b.optimum())[1] == doctest::Approx(-1.0).epsilon(1e-14));

    CHECK_THROWS_AS(make_least_squares(Matrix(2, 2), Vec{1, 2, 3}), std::invalid_argument);
}

TEST_CASE("make_least_squares random instance") {
    Rng rng(32);
    Matrix x(20, 5);
    for (auto& v : x.a) v = rng.normal();
    Vec y = rng.normal_vec(20);
    const Objective obj = make_least_squares(x, y);

    for (int k = 0; k < 5; ++k) {
        CHECK(check_gradient(obj, rng.normal_vec(5), 1e-5) <= 1e-6);
    }
    // gradient vanishes at the normal-equations solution
    CHECK(norm2(obj.gradient(*obj.optimum())) <= 1e-10);

    Matrix gram(5, 5);
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            double s = 0.0;
            for (int r = 0; r < 20; ++r) s += x.at(r, i) * x.at(r, j);
            gram.at(i, j) = s;
        }
    }
    CHECK(*obj.lipschitz() == doctest::Approx(oracles::jacobi_lambda_max(gram)).epsilon(1e-9));
}

TEST_CASE("make_logistic corner cases") {
    Matrix zero_row(1, 1);
    const Objective a = make_logistic(zero_row, {1}, 0.5);
    CHECK(a.value({3.7}) == doctest::Approx(std::log(2.0) + 0.25 * 3.7 * 3.7).epsilon(1e-14));
    // pure ridge: optimum at zero
    CHECK(norm2(*a.optimum()) <= 1e-9);

    CHECK_THROWS_AS(make_logistic(identity(2), {1, 2}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_logistic(identity(2), {1}, 0.0), std::invalid_argument);
}

TEST_CASE("make_logistic random instance") {
    const Objective obj = make_random_logistic(50, 5, 0.1, Rng(33));
    Rng rng(34);
    for (int k = 0; k < 5; ++k) {
        CHECK(check_gradient(obj, rng.normal_vec(5), 1e-5) <= 1e-6);
    }
    REQUIRE(obj.optimum().has_value());
    CHECK(norm2(obj.gradient(*obj.optimum())) <= 1e-10);
}

TEST_CASE("make_sparse_problem structure") {
    CHECK_THROWS_AS(make_sparse_problem(10, 0.0, Rng(1)), std::invalid_argument);
    CHECK_THROWS_AS(make_sparse_problem(10, 1.5, Rng(1)), std::invalid_argument);
    CHECK_THROWS_AS(make_sparse_problem(1, 0.5, Rng(1)), std::invalid_argument);

    // density 1/d: every batch touches exactly one coordinate
    const Objective one = make_sparse_problem(8, 1.0 / 8.0, Rng(2));
    Rng rng(3);
    const Vec probe = rng.normal_vec(8);
    for (int b = 0; b < one.batch_count(); ++b) {
        int nonzero = 0;
        for (double v : one.batch_gradient(probe, b)) nonzero += v != 0.0;
        CHECK(nonzero <= 1);
    }

    // d=20, density 0.1: at least 80% zero entries across batch gradients
    const Objective sparse = make_sparse_problem(20, 0.1, Rng(4));
    int zeros = 0, total = 0;
    const Vec probe20 = rng.normal_vec(20);
    for (int b = 0; b < sparse.batch_count(); ++b) {
        for (double v : sparse.batch_gradient(probe20, b)) {
            zeros += v == 0.0;
            ++total;
        }
    }
    CHECK(static_cast<double>(zeros) / total >= 0.8);

    // the instance must expose an optimum for regret measurements
    CHECK(make_sparse_problem(50, 0.1, Rng(7)).optimum().has_value());
}

TEST_CASE("check_gradient spot values") {
    const Objective quad = make_quadratic({identity(2), {0, 0}});
    CHECK(check_gradient(quad, {1, 1}, 1e-5) <= 1e-8);

    // linear objective: central differences are exact up to rounding
    const Objective linear = make_quadratic({Matrix(2, 2), {1.5, -2.0}}, false);
    CHECK(check_gradient(linear, {0.3, 0.7}, 1e-5) <= 1e-9);

    CHECK_THROWS_AS(check_gradient(quad, {1, 1}, 0.0), std::invalid_argument);
}

TEST_CASE("lipschitz_power_iteration") {
    Matrix diag(2, 2);
    diag.at(0, 0) = 1.0;
    diag.at(1, 1) = 4.0;
    auto apply = [&diag](const Vec& v) { return matvec(diag, v); };
    CHECK(lipschitz_power_iteration(apply, 2, 1e-12, 100000) ==
          doctest::Approx(4.0).epsilon(1e-10));

    const Matrix eye = identity(3);
    auto apply_eye = [&eye](const Vec& v) { return matvec(eye, v); };
    CHECK(lipschitz_power_iteration(apply_eye, 3, 1e-12, 1000) ==
          doctest::Approx(1.0).epsilon(1e-12));

    Rng rng(35);
    const Matrix a = random_spd(6, rng);
    auto apply_a = [&a](const Vec& v) { return matvec(a, v); };
    const double est = lipschitz_power_iteration(apply_a, 6, 1e-12, 200000);
    const double exact = oracles::jacobi_lambda_max(a);
    CHECK(std::abs(est - exact) / exact <= 1e-6);

    // non-convergence carries the last estimate
    try {
        lipschitz_power_iteration(apply_a, 6, 1e-15, 1);
        FAIL("expected PowerIterationError");
    } catch (const PowerIterationError& e) {
        CHECK(std::isfinite(e.last_estimate));
        CHECK(e.last_estimate > 0.0);
    }
}

TEST_CASE("validate_step_size") {
    const double lip = 2.0;
    CHECK(validate_step_size("sgd", 1.0 / lip, 0.0, lip).ok);
    CHECK(!validate_step_size("sgd", 1.0 / lip + 1e-6, 0.0, lip).ok);
    CHECK(!validate_step_size("sgd", 0.0, 0.0, lip).ok);

    const StepSizeVerdict v = validate_step_size("momentum", 0.3, 0.5, lip);
    CHECK(!v.ok);
    CHECK(v.violation.find("0.25") != std::string::npos);
    CHECK(validate_step_size("momentum", 0.25, 0.5, lip).ok);
    CHECK(!validate_step_size("momentum", 0.1, 1.0, lip).ok);

    CHECK(validate_step_size("nag", 1.0 / lip, 0.99, lip).ok);
    CHECK(!validate_step_size("nag", 1.0 / lip, -0.1, lip).ok);

    CHECK_THROWS_AS(validate_step_size("adagrad", 0.1, 0.0, lip), std::invalid_argument);
    CHECK_THROWS_AS(validate_step_size("sgd", 0.1, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("batch structure averages back to the full objective") {
    Rng rng(36);
    const Objective base = make_random_least_squares(17, 4, Rng(40));
    const Objective batched = base.with_batches(5, 99);
    CHECK(batched.batch_count() == 5);

    const Objective logistic = make_random_logistic(23, 3, 0.05, Rng(41)).with_batches(4, 98);

    for (const Objective* obj : {&batched, &logistic}) {
        for (int trial = 0; trial < 5; ++trial) {
            const Vec theta = rng.normal_vec(obj->dim());
            Vec sum(static_cast<std::size_t>(obj->dim()), 0.0);
            double vsum = 0.0;
            for (int b = 0; b < obj->batch_count(); ++b) {
                const Vec g = obj->batch_gradient(theta, b);
                for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += g[i];
                vsum += obj->batch_value(theta, b);
            }
            const Vec full = obj->gradient(theta);
            for (std::size_t i = 0; i < sum.size(); ++i) {
                CHECK(sum[i] / obj->batch_count() ==
                      doctest::Approx(full[i]).epsilon(1e-9));
            }
            CHECK(vsum / obj->batch_count() == doctest::Approx(obj->value(theta)).epsilon(1e-9));
        }
    }

    CHECK_THROWS_AS(base.with_batches(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(base.with_batches(18, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_quadratic({identity(2), {0, 0}}).with_batches(2, 1),
                    std::invalid_argument);
}

TEST_CASE("sampled convexity and smoothness hold for every family") {
    Rng rng(37);
    const std::vector<Objective> instances = {
        make_random_spd_quadratic(5, Rng(50)),
        make_random_least_squares(20, 5, Rng(51)),
        make_random_logistic(30, 4, 0.1, Rng(52)),
        make_sparse_problem(10, 0.3, Rng(53)),
    };
    for (const Objective& obj : instances) {
        const double lip = *obj.lipschitz();
        for (int pair = 0; pair < 100; ++pair) {
            const Vec x = rng.normal_vec(obj.dim());
            const Vec y = rng.normal_vec(obj.dim());
            const double jx = obj.value(x), jy = obj.value(y);
            const double lin = jx + dot(obj.gradient(x), sub(y, x));
            const Vec diff = sub(y, x);
            CHECK(jy >= lin - 1e-9 * (1.0 + std::abs(jy)));
            const double upper = lin + 0.5 * lip * dot(diff, diff);
            CHECK(jy <= upper + 1e-9 * (1.0 + std::abs(upper)));
        }
    }
}

TEST_CASE("l1 attachment") {
    const Objective base = make_random_least_squares(10, 3, Rng(60));
    const Objective reg = base.with_l1(0.5);
    CHECK(reg.regularizer().kind == RegKind::L1);
    const Vec theta{1.0, -2.0, 0.0};
    CHECK(reg.value(theta) == doctest::Approx(base.value(theta) + 0.5 * 3.0).epsilon(1e-14));
    const Vec g = reg.gradient(theta);
    const Vec gs = base.gradient(theta);
    CHECK(g[0] == doctest::Approx(gs[0] + 0.5).epsilon(1e-14));
    CHECK(g[1] == doctest::Approx(gs[1] - 0.5).epsilon(1e-14));
    CHECK(g[2] == doctest::Approx(gs[2]).epsilon(1e-14));  // sign(0) = 0
    // smooth path ignores the regularizer
    CHECK(reg.smooth_value(theta) == base.smooth_value(theta));
    CHECK_THROWS_AS(base.with_l1(-1.0), std::invalid_argument);
}

TEST_CASE("objective json round-trip") {
    Rng rng(61);
    const std::vector<Objective> instances = {
        make_random_spd_quadratic(4, Rng(70)),
        make_random_least_squares(12, 3, Rng(71)).with_batches(3, 5),
        make_random_logistic(15, 3, 0.2, Rng(72)),
        make_sparse_problem(9, 0.25, Rng(73)).with_l1(0.1),
    };
    for (const Objective& obj : instances) {
        const Objective back = Objective::from_json(obj.to_json());
        CHECK(back.dim() == obj.dim());
        CHECK(back.batch_count() == obj.batch_count());
        for (int k = 0; k < 3; ++k) {
            const Vec theta = rng.normal_vec(obj.dim());
            CHECK(back.value(theta) == obj.value(theta));
            CHECK(back.gradient(theta) == obj.gradient(theta));
        }
        if (obj.optimum().has_value()) {
            CHECK(*back.optimum() == *obj.optimum());
        }
    }
}
