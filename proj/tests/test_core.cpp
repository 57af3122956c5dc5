#include <cmath>
#include <sstream>

#include "doctest.h"
#include "regretlab/rng.hpp"
#include "regretlab/trace.hpp"
#include "regretlab/vec.hpp"
#include "test_oracles.hpp"

using namespace regretlab;

TEST_CASE("dot") {
    CHECK(dot({1, 2}, {3, 4}) == 11.0);
    CHECK(dot({5, -3, 2}, {0, 0, 0}) == 0.0);
    CHECK_THROWS_AS(dot({1, 2}, {1, 2, 3}), std::invalid_argument);

    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Vec a = rng.normal_vec(5), b = rng.normal_vec(5);
        CHECK(dot(a, b) == doctest::Approx(oracles::dot_loop(a, b)).epsilon(1e-14));
    }
}

TEST_CASE("norm2 and norm_inf") {
    CHECK(norm2({3, 4}) == 5.0);
    CHECK(norm2({0, 0, 0}) == 0.0);
    CHECK(norm_inf({-3, 2}) == 3.0);
    CHECK(norm_inf({0, 0}) == 0.0);

    Rng rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        const Vec a = rng.normal_vec(7);
        CHECK(norm2(a) == doctest::Approx(std::sqrt(oracles::dot_loop(a, a))).epsilon(1e-14));
        CHECK(norm_inf(a) == oracles::norm_inf_loop(a));
    }
}

TEST_CASE("mahalanobis_norm") {
    CHECK(mahalanobis_norm({1, 1}, {1, 1}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(mahalanobis_norm({2, 5}, {1, 0}) == 2.0);
    CHECK_THROWS_AS(mahalanobis_norm({1, 1}, {1, -0.5}), std::invalid_argument);

    Rng rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const Vec a = rng.normal_vec(6);
        Vec w(6);
        for (auto& x : w) x = rng.uniform();
        CHECK(mahalanobis_norm(a, w) ==
              doctest::Approx(oracles::weighted_norm_loop(a, w)).epsilon(1e-14));
        // identity metric reduces to the euclidean norm
        CHECK(std::abs(mahalanobis_norm(a, Vec(6, 1.0)) - norm2(a)) <= 1e-12);
    }
}

TEST_CASE("prefix_column_norms") {
    GradientHistory single;
    single.push({3, 0});
    auto s1 = prefix_column_norms(single);
    CHECK(s1.size() == 1);
    CHECK(s1[0] == Vec{3, 0});

    GradientHistory ortho;
    ortho.push({1, 0});
    ortho.push({0, 1});
    auto s2 = prefix_column_norms(ortho);
    CHECK(s2[1] == Vec{1, 1});

    CHECK_THROWS_AS(prefix_column_norms(GradientHistory{}), std::invalid_argument);
    GradientHistory bad;
    bad.push({1, 2});
    CHECK_THROWS_AS(bad.push({1, 2, 3}), std::invalid_argument);

    Rng rng(14);
    GradientHistory h;
    for (int t = 0; t < 4; ++t) h.push(rng.normal_vec(3));
    auto s = prefix_column_norms(h);
    for (std::size_t t = 0; t < 4; ++t) {
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(s[t][i] ==
                  doctest::Approx(oracles::prefix_norm_at(h.columns, t, i)).epsilon(1e-14));
        }
    }
}

TEST_CASE("prefix norms are coordinatewise non-decreasing") {
    Rng rng(15);
    for (int trial = 0; trial < 1000; ++trial) {
        const int d = 1 + static_cast<int>(rng.below(5));
        const int steps = 1 + static_cast<int>(rng.below(20));
        GradientHistory h;
        for (int t = 0; t < steps; ++t) h.push(rng.normal_vec(d));
        auto s = prefix_column_norms(h);
        for (std::size_t t = 1; t < s.size(); ++t) {
            for (int i = 0; i < d; ++i) {
                CHECK(s[t][static_cast<std::size_t>(i)] >= s[t - 1][static_cast<std::size_t>(i)]);
            }
        }
    }
}

TEST_CASE("rng determinism and distribution sanity") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());

    Rng c(42), d(43);
    CHECK(c.next_u64() != d.next_u64());

    // split streams do not depend on parent consumption
    Rng p(7);
    const std::uint64_t before = p.split(3).next_u64();
    p.next_u64();
    CHECK(p.split(3).next_u64() == before);

    Rng n(21);
    double mean = 0.0, var = 0.0;
    constexpr int kSamples = 20000;
    for (int i = 0; i < kSamples; ++i) {
        const double x = n.normal();
        mean += x;
        var += x * x;
    }
    mean /= kSamples;
    var = var / kSamples - mean * mean;
    CHECK(std::abs(mean) < 0.03);
    CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("trace jsonl round-trip is bit-exact") {
    Rng rng(99);
    Trace t;
    t.meta["algo"] = "sgd";
    t.meta["eta"] = format_g17(0.1);
    t.meta["batch"] = "full";
    for (int step = 1; step <= 20; ++step) {
        TraceStep s;
        s.t = step;
        s.theta = rng.normal_vec(4);
        s.grad = rng.normal_vec(4);
        // exercise awkward magnitudes
        s.theta[0] *= 1e-17;
        s.grad[1] *= 1e16;
        s.loss = rng.normal() * 1e-8;
        t.steps.push_back(s);
    }

    std::stringstream buf;
    write_trace_jsonl(t, buf);
    const Trace back = read_trace_jsonl(buf);

    REQUIRE(back.steps.size() == t.steps.size());
    CHECK(back.meta == t.meta);
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        CHECK(back.steps[i].t == t.steps[i].t);
        CHECK(back.steps[i].theta == t.steps[i].theta);  // exact, not approximate
        CHECK(back.steps[i].grad == t.steps[i].grad);
        CHECK(back.steps[i].loss == t.steps[i].loss);
    }

    // a second serialization of the reread trace is byte-identical
    std::stringstream buf2;
    write_trace_jsonl(back, buf2);
    CHECK(buf.str() == buf2.str());
}

TEST_CASE("trace meta accessors") {
    Trace t;
    t.meta["eta"] = "0.25";
    t.meta["algo"] = "sgd";
    CHECK(t.meta_num("eta") == 0.25);
    CHECK(t.meta_str("algo") == "sgd");
    CHECK(t.meta_str("missing", "fallback") == "fallback");
    CHECK_THROWS_AS(t.meta_num("missing"), std::invalid_argument);
    CHECK_THROWS_AS(t.meta_num("algo"), std::invalid_argument);
}
