#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "nuem/error.hpp"
#include "nuem/resolvent.hpp"
#include "oracles.hpp"

using namespace nuem;

namespace {

struct Setup {
    Eigensystem es;
    MergedGrid grid;
    ResolventTable table;
};

Setup make(std::vector<double> lambdas, std::vector<std::size_t> n) {
    auto es = Eigensystem::from_values(std::move(lambdas), std::vector<double>(n.size(), 1.0));
    auto grid = MergedGrid::merge(LevelGrids(std::move(n)));
    auto table = ResolventTable::build(es, grid);
    return Setup{std::move(es), std::move(grid), std::move(table)};
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("hand products") {
    const auto s = make({1.0, 2.0}, {2, 3});
    CHECK(std::exp(s.table.log_prefix(0, 0)) == 1.0);
    // lambda = 2 over dtau = (1/3, 1/6): (3/5)(3/4)
    CHECK(std::exp(s.table.log_prefix(1, 2)) == doctest::Approx(0.45).epsilon(1e-15));
    CHECK(s.table.factor(1, 0, 2) == doctest::Approx(0.45).epsilon(1e-15));
    const auto u = make({1.0}, {2});
    CHECK(std::exp(u.table.log_prefix(0, 2)) == doctest::Approx(4.0 / 9.0).epsilon(1e-15));
    for (std::size_t eta = 0; eta <= s.grid.steps(); ++eta) CHECK(s.table.factor(1, eta, eta) == 1.0);
    CHECK_THROWS_AS(s.table.log_factor(0, 3, 2), Error);
    CHECK_THROWS_AS(s.table.factor(0, 3, 2), Error);
}

TEST_CASE("prefix monotone in eta and in j; extra factor strictly smaller") {
    const auto s = make({0.1, 1.0, 30.0, 1e4}, {3, 5, 7});
    for (std::size_t j = 0; j < 4; ++j) {
        for (std::size_t eta = 1; eta <= s.grid.steps(); ++eta) {
            CHECK(s.table.log_prefix(j, eta) < s.table.log_prefix(j, eta - 1));
            if (j > 0) CHECK(s.table.log_prefix(j, eta) < s.table.log_prefix(j - 1, eta));
            for (std::size_t a = 0; a < eta; ++a) CHECK(s.table.factor(j, a, eta) < s.table.factor(j, a, eta - 1));
        }
    }
}

TEST_CASE("semigroup and agreement with direct products") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 60; ++trial) {
        const auto n = oracle::random_steps(rng, 1 + rng() % 5, 20);
        const auto lam = oracle::log_uniform_lambdas(rng, 6, 1e-1, 1e3);
        const auto s = make(lam, n);
        const auto b = oracle::brute_grid(n);
        const std::size_t N = s.grid.steps();
        for (std::size_t j = 0; j < lam.size(); ++j) {
            for (std::size_t a = 0; a <= N; ++a) {
                for (std::size_t c = a; c <= N; ++c) {
                    const double direct = static_cast<double>(oracle::direct_factor(b, lam[j], a, c));
                    CHECK(rel(s.table.factor(j, a, c), direct) <= 1e-12);
                    const std::size_t mid = a + (c - a) / 2;
                    CHECK(rel(s.table.factor(j, a, mid) * s.table.factor(j, mid, c), s.table.factor(j, a, c)) <=
                          1e-12);
                }
            }
        }
    }
}

TEST_CASE("stiff modes keep window ratios") {
    const auto s = make({1e8}, {1000});
    // the full prefix underflows but a one-step window is still (1 + 1e5)^-1
    CHECK(s.table.factor(0, 0, 1000) == std::numeric_limits<double>::denorm_min());
    CHECK(rel(s.table.factor(0, 500, 501), 1.0 / (1.0 + 1e5)) <= 1e-12);
    CHECK(rel(s.table.factor(0, 997, 999), 1.0 / ((1.0 + 1e5) * (1.0 + 1e5))) <= 1e-12);
}

TEST_CASE("interpolant") {
    const auto s = make({0.5, 3.0, 40.0}, {3, 4});
    const std::size_t N = s.grid.steps();
    for (std::size_t j = 0; j < 3; ++j) {
        for (std::size_t e0 = 0; e0 < N; ++e0) {
            CHECK(interpolant_S(s.es, s.grid, j, e0, s.grid.tau(e0)) == 1.0);
            CHECK(rel(interpolant_S(s.es, s.grid, j, e0, 1.0), s.table.factor(j, e0, N)) <= 1e-13);
            for (std::size_t eta = e0 + 1; eta <= N; ++eta) {
                const double lo = s.table.factor(j, e0, eta);
                const double hi = s.table.factor(j, e0, eta - 1);
                for (double w : {0.1, 0.5, 0.9, 1.0}) {
                    const double t = s.grid.tau(eta - 1) + w * s.grid.dtau(eta);
                    const double v = interpolant_S(s.es, s.grid, j, e0, t);
                    CHECK(v >= lo * (1 - 1e-14));
                    CHECK(v <= hi * (1 + 1e-14));
                }
            }
        }
    }
}

TEST_CASE("weight sum examples") {
    const auto one = make({1.0}, {1});
    CHECK(weight_sum(one.table, one.grid, 0, 0, 1) == doctest::Approx(0.25).epsilon(1e-15));
    const auto stiff = make({100.0}, {4});
    const auto b = oracle::brute_grid({4});
    for (std::size_t i = 1; i <= 4; ++i) {
        const double w = weight_sum(stiff.table, stiff.grid, 0, 0, i);
        CHECK(w <= 0.02);
        CHECK(rel(w, static_cast<double>(oracle::brute_weight_sum(b, 100.0L, 0, i))) <= 1e-13);
    }
}

TEST_CASE("weight sums against brute force and the 2/lambda bound") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 80; ++trial) {
        const std::size_t L = 1 + rng() % 8;
        const auto n = oracle::random_steps(rng, L, 24);
        const auto lam = oracle::log_uniform_lambdas(rng, 1 + rng() % 8, 1e-1, 1e8);
        const auto s = make(lam, n);
        const auto b = oracle::brute_grid(n);
        for (std::size_t j = 0; j < lam.size(); ++j) {
            for (std::size_t l = 0; l < L; ++l) {
                for (std::size_t i = 1; i <= n[l]; ++i) {
                    const double w = weight_sum(s.table, s.grid, j, l, i);
                    CHECK(rel(w, static_cast<double>(oracle::brute_weight_sum(b, lam[j], l, i))) <= 1e-12);
                    CHECK(w <= 2.0 / lam[j]);
                }
            }
        }
    }
}
