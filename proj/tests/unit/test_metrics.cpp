// Copyright (c) 2026, The unimodal authors
// SPDX-License-Identifier: Apache-2.0

#include "unimodal/errors.hpp"
#include "unimodal/metrics.hpp"
#include "unimodal/ordinal.hpp"

#include <doctest.h>

#include <numeric>
#include <random>
#include <vector>

using namespace unimodal;

TEST_CASE("mae examples")
{
    CHECK(mae(std::vector<int>{1, 2, 3}, std::vector<int>{1, 2, 3}) == 0.0);
    CHECK(mae(std::vector<int>{1, 3}, std::vector<int>{2, 5}) == 1.5);
    CHECK(mae(std::vector<int>{2, 3, 4}, std::vector<int>{1, 2, 3}) == 1.0);
    CHECK_THROWS_AS(mae(std::vector<int>{1}, std::vector<int>{1, 2}), UsageError);
    CHECK_THROWS_AS(mae(std::vector<int>{}, std::vector<int>{}), UsageError);
}

TEST_CASE("mae detects translation")
{
    const std::vector<int> truth = {1, 2, 3, 4, 2};
    for (int k = 0; k <= 3; ++k) {
        std::vector<int> pred = truth;
        for (int& p : pred) {
            p += k;
        }
        CHECK(mae(pred, truth) == static_cast<double>(k));
    }
}

TEST_CASE("soi examples")
{
    CHECK(soi(std::vector<double>{0.1, 0.2, 0.4, 0.3}, 3) == 1.0);
    CHECK(soi(std::vector<double>{0.3, 0.2, 0.4, 0.1}, 3) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    for (int nu = 1; nu <= 4; ++nu) {
        CHECK(soi(std::vector<double>(4, 0.25), nu) == 0.0);
    }
    CHECK_THROWS_AS(soi(std::vector<double>{0.5, 0.5}, 3), UsageError);
}

TEST_CASE("soi peaks only at the mode of a strictly unimodal vector")
{
    const std::vector<double> p = {0.05, 0.1, 0.4, 0.3, 0.15};
    CHECK(soi(p, 3) == 1.0);
    for (int nu : {1, 2, 4, 5}) {
        CHECK(soi(p, nu) < 1.0);
    }
}

TEST_CASE("soi takes values on the 1/(c-1) grid")
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> p(6);
        for (double& v : p) {
            v = u(rng);
        }
        const int nu = 1 + static_cast<int>(trial % 6);
        const double s = soi(p, nu);
        CHECK(s * 5.0 == static_cast<double>(soi_satisfied(p, nu)));
    }
}

TEST_CASE("soi_dataset")
{
    const std::vector<std::vector<double>> dists = {{0.1, 0.2, 0.4, 0.3}, {0.3, 0.2, 0.4, 0.1}};
    CHECK(soi_dataset(dists, std::vector<int>{3, 3}) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
    CHECK(soi_dataset(std::span(dists).first(1), std::vector<int>{3}) == 1.0);
}

TEST_CASE("violation histogram")
{
    const std::vector<std::vector<double>> ordered = {{0.1, 0.2, 0.4, 0.3}, {0.6, 0.3, 0.1, 0.0}};
    CHECK(violation_histogram(ordered, std::vector<int>{3, 1}) == std::vector<std::size_t>{0, 0, 0});
    const std::vector<std::vector<double>> one = {{0.3, 0.2, 0.4, 0.1}};
    CHECK(violation_histogram(one, std::vector<int>{3}) == std::vector<std::size_t>{1, 0, 0});
}

TEST_CASE("violation histogram total matches soi_dataset")
{
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t n = 300;
    const int c = 7;
    std::vector<std::vector<double>> dists(n, std::vector<double>(c));
    std::vector<int> refs(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (double& v : dists[i]) {
            v = u(rng);
        }
        refs[i] = 1 + static_cast<int>(i % c);
    }
    const auto h = violation_histogram(dists, refs);
    const double total = static_cast<double>(std::accumulate(h.begin(), h.end(), std::size_t{0}));
    CHECK(total == doctest::Approx(n * (c - 1) * (1.0 - soi_dataset(dists, refs))).epsilon(1e-12));
    for (std::size_t v : h) {
        CHECK(v <= n);
    }
}

TEST_CASE("evaluate fills a report")
{
    const std::vector<std::vector<double>> dists = {{0.1, 0.2, 0.4, 0.3}, {0.3, 0.2, 0.4, 0.1}};
    const auto r = evaluate(dists, std::vector<int>{3, 3}, std::vector<int>{3, 1});
    CHECK(r.n_samples == 2);
    CHECK(r.mae == 1.0);
    CHECK(r.soi_predicted == doctest::Approx(5.0 / 6.0));
    CHECK(r.soi_true == doctest::Approx((1.0 + 2.0 / 3.0) / 2.0));
    CHECK(r.violation_histogram.size() == 3);
}
