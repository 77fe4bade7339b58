#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "odstream/kernels.hpp"

using namespace odstream;
using kernels::Neighbor;

namespace {

std::vector<std::vector<double>> random_points(std::size_t n, std::size_t d,
                                               std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::vector<double>> pts(n, std::vector<double>(d));
    for (auto& p : pts) {
        for (auto& x : p) x = normal(rng);
    }
    return pts;
}

// Full-sort oracle for k nearest neighbors.
std::vector<Neighbor> knn_by_sort(const std::vector<std::vector<double>>& refs,
                                  const std::vector<double>& query, std::size_t k,
                                  std::size_t skip) {
    std::vector<Neighbor> all;
    for (std::size_t i = 0; i < refs.size(); ++i) {
        if (i == skip) continue;
        all.emplace_back(kernels::distance(refs[i], query), i);
    }
    std::sort(all.begin(), all.end());
    all.resize(k);
    return all;
}

}  // namespace

TEST_CASE("distance basics") {
    CHECK(kernels::squared_distance({0, 0}, {3, 4}) == doctest::Approx(25.0));
    CHECK(kernels::distance({0, 0}, {3, 4}) == doctest::Approx(5.0));
    CHECK(kernels::distance({1, 2, 3}, {1, 2, 3}) == 0.0);
}

TEST_CASE("knn_of matches a full-sort oracle") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto pts = random_points(60, 4, seed);
        const auto query = random_points(1, 4, seed + 1000)[0];
        for (std::size_t k : {1u, 3u, 10u}) {
            const auto fast = kernels::knn_of(pts, query, k);
            const auto slow = knn_by_sort(pts, query, k, static_cast<std::size_t>(-1));
            REQUIRE(fast.size() == slow.size());
            for (std::size_t i = 0; i < k; ++i) {
                CHECK(fast[i].first == slow[i].first);
                CHECK(fast[i].second == slow[i].second);
            }
        }
    }
}

TEST_CASE("knn_of skip excludes the self reference") {
    const auto pts = random_points(30, 3, 7);
    const auto res = kernels::knn_of(pts, pts[5], 5, 5);
    for (const auto& [dist, idx] : res) CHECK(idx != 5);
    CHECK(res.front().first > 0.0);
}

TEST_CASE("knn_of ties break by reference index") {
    std::vector<std::vector<double>> pts = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const auto res = kernels::knn_of(pts, {0, 0}, 3);
    CHECK(res[0].second == 0);
    CHECK(res[1].second == 1);
    CHECK(res[2].second == 2);
}

TEST_CASE("knn_of rejects k larger than the reference set") {
    const auto pts = random_points(4, 2, 1);
    CHECK_THROWS_AS((void)kernels::knn_of(pts, pts[0], 5), std::invalid_argument);
    CHECK_THROWS_AS((void)kernels::knn_of(pts, pts[0], 4, 0), std::invalid_argument);
}

TEST_CASE("parallel knn_graph equals the serial reference exactly") {
    for (std::uint64_t seed : {3u, 4u, 5u}) {
        const auto pts = random_points(80, 5, seed);
        const auto fast = kernels::knn_graph(pts, 6);
        const auto slow = kernels::serial::knn_graph(pts, 6);
        REQUIRE(fast.size() == slow.size());
        for (std::size_t i = 0; i < fast.size(); ++i) {
            REQUIRE(fast[i].size() == slow[i].size());
            for (std::size_t j = 0; j < fast[i].size(); ++j) {
                CHECK(fast[i][j].first == slow[i][j].first);
                CHECK(fast[i][j].second == slow[i][j].second);
            }
        }
    }
}

TEST_CASE("angle_moments matches the serial reference") {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        const auto pts = random_points(50, 3, seed);
        const auto query = random_points(1, 3, seed + 99)[0];
        const auto fast = kernels::angle_moments(pts, query);
        const auto slow = kernels::serial::angle_moments(pts, query);
        CHECK(fast.valid_pairs == slow.valid_pairs);
        CHECK(fast.weight_sum == doctest::Approx(slow.weight_sum).epsilon(1e-12));
        CHECK(fast.weighted_cos == doctest::Approx(slow.weighted_cos).epsilon(1e-12));
        CHECK(fast.weighted_cos_sq ==
              doctest::Approx(slow.weighted_cos_sq).epsilon(1e-12));
    }
}

TEST_CASE("angle_moments skips zero difference vectors") {
    // Query coincides with two of three reference points: only pairs among
    // nonzero difference vectors count, and one point leaves no pair.
    std::vector<std::vector<double>> pts = {{1, 1}, {1, 1}, {2, 0}};
    const auto m = kernels::angle_moments(pts, {1, 1});
    CHECK(m.valid_pairs == 0);
}

TEST_CASE("angle_moments on a right angle") {
    // Two unit difference vectors at 90 degrees: cos = 0, weight = 1.
    std::vector<std::vector<double>> pts = {{1, 0}, {0, 1}};
    const auto m = kernels::angle_moments(pts, {0, 0});
    CHECK(m.valid_pairs == 1);
    CHECK(m.weight_sum == doctest::Approx(1.0));
    CHECK(m.weighted_cos == doctest::Approx(0.0));
    CHECK(m.weighted_cos_sq == doctest::Approx(0.0));
}

TEST_CASE("pairwise_distance_percentile handles hand-checkable cases") {
    // Points on a line at 0, 1, 3: pairwise distances {1, 2, 3}.
    std::vector<std::vector<double>> pts = {{0}, {1}, {3}};
    CHECK(kernels::pairwise_distance_percentile(pts, 0.0) == doctest::Approx(1.0));
    CHECK(kernels::pairwise_distance_percentile(pts, 0.5) == doctest::Approx(2.0));
    CHECK(kernels::pairwise_distance_percentile(pts, 1.0) == doctest::Approx(3.0));
    CHECK(kernels::pairwise_distance_percentile(pts, 0.25) == doctest::Approx(1.5));
}

TEST_CASE("pairwise_distance_percentile equals the serial reference") {
    for (std::uint64_t seed : {21u, 22u}) {
        const auto pts = random_points(40, 4, seed);
        for (double q : {0.05, 0.5, 0.95}) {
            CHECK(kernels::pairwise_distance_percentile(pts, q) ==
                  kernels::serial::pairwise_distance_percentile(pts, q));
        }
    }
}
