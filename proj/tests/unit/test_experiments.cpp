#include <qmod/errors.hpp>
#include <qmod/experiments.hpp>

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

using namespace qmod;
using namespace qmod::experiments;

namespace {

SweepOptions quick(std::size_t budget, unsigned threads = 2)
{
    SweepOptions o;
    o.fem.budget = budget;
    o.threads = threads;
    return o;
}

std::string csv_body(const GridReport & r)
{
    std::ostringstream out;
    r.write_csv(out, false);
    return out.str();
}

} // namespace

TEST_CASE("grid helpers")
{
    const auto xs = right_endpoints({0.5, 3.0}, 5);
    CHECK(xs == std::vector<double>{1.0, 1.5, 2.0, 2.5, 3.0});
    const auto hs = linspace(0.5, 2.0, 16);
    CHECK(hs.front() == 0.5);
    CHECK(hs.back() == 2.0);
    CHECK(hs[5] == 1.0);
    CHECK(linspace(0.7, 1.0, 1) == std::vector<double>{0.7});
    CHECK_THROWS_AS(right_endpoints({1.0, 1.0}, 3), DomainError);
    CHECK_THROWS_AS(right_endpoints({0.0, 1.0}, 0), DomainError);
    CHECK(default_trapezoid_heights().size() == 10);
    CHECK(default_circular_thetas().size() == 23);
    CHECK(default_circular_thetas().back() == 1.2);
}

TEST_CASE("parallel_for visits every index once and rethrows the lowest failure")
{
    std::vector<std::atomic<int>> hits(100);
    parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
    for (const auto & h : hits) CHECK(h.load() == 1);

    try {
        parallel_for(50, 4, [](std::size_t i) {
            if (i == 7 || i == 31) throw std::runtime_error(std::to_string(i));
        });
        FAIL("expected an exception");
    } catch (const std::runtime_error & e) {
        CHECK(std::string(e.what()) == "7");
    }
}

TEST_CASE("reciprocal grid")
{
    const auto r = recip_grid({0.5, 3.0}, {0.5, 3.0}, 2, 2, quick(3000));
    REQUIRE(r.rows().size() == 4);
    CHECK(r.columns()[0] == "x");
    CHECK(r.columns()[3] == "log10_abs_f");
    for (const auto & row : r.rows()) {
        CHECK(std::abs(row[2]) <= 2e-3);
        if (row[0] == row[1]) CHECK(row[4] == row[5]);  // identical quadrilaterals
    }
    CHECK_THROWS_AS(recip_grid({0.5, 4.0}, {0.5, 3.0}, 2, 2, quick(3000)), DomainError);
}

TEST_CASE("five-by-five grid has 25 rows")
{
    const auto r = recip_grid({0.5, 3.0}, {0.5, 3.0}, 5, 5, quick(300));
    CHECK(r.rows().size() == 25);
}

TEST_CASE("sweeps do not depend on the thread count")
{
    const auto a = trapezoid_table({1.2, 1.6, 1.9}, quick(2000, 1));
    const auto b = trapezoid_table({1.2, 1.6, 1.9}, quick(2000, 3));
    CHECK(csv_body(a) == csv_body(b));
}

TEST_CASE("parallelogram grid")
{
    const auto r = parallelogram_grid(3, {1.0, 1.5}, quick(4000));
    REQUIRE(r.rows().size() == 6);
    double prev = INFINITY;
    for (const auto & row : r.rows()) {
        CHECK(row[0] > 0.0);
        CHECK(row[0] < std::numbers::pi / 2);
        if (row[1] == 1.0) {
            CHECK(std::abs(row[2] - 1.0) <= 1e-12);
            CHECK(std::abs(row[3] - 1.0) <= 1e-4);
        } else {
            CHECK(row[2] < prev);  // g decreasing in t for h = 1.5
            prev = row[2];
        }
    }
    CHECK_THROWS_AS(parallelogram_grid(0, {1.0}, quick(100)), DomainError);
}

TEST_CASE("trapezoid table")
{
    const auto r = trapezoid_table({1.1, 1.9}, quick(4000));
    REQUIRE(r.rows().size() == 2);
    CHECK(std::abs(r.rows()[0][2] - 0.3403135) <= 5e-8);
    CHECK(std::abs(r.rows()[1][2] - 1.1791715) <= 5e-8);
    for (const auto & row : r.rows()) CHECK(row[3] == std::abs(row[1] - row[2]));
    CHECK_THROWS_AS(trapezoid_table({1.0}, quick(100)), DomainError);
}

TEST_CASE("circular table")
{
    const auto r = circular_table({0.1, 0.3, 1.2}, 0.4, 16, quick(3000));
    REQUIRE(r.rows().size() == 3);
    CHECK(std::abs(r.rows()[0][2] - 7.597433) <= 1e-6);
    CHECK(std::abs(r.rows()[1][2] - 2.498368) <= 1e-6);
    CHECK(std::abs(r.rows()[2][2] - 0.454689) <= 1e-6);
    CHECK_THROWS_AS(circular_table({2.0}, 0.4, 16, quick(100)), DomainError);
}

TEST_CASE("mu table")
{
    const auto r = mu_table({0.25, 0.5}, 9);
    REQUIRE(r.rows().size() == 18);
    for (const auto & row : r.rows()) {
        const double s = std::sin(std::numbers::pi * row[0]);
        CHECK(row[3] == doctest::Approx(std::numbers::pi * std::numbers::pi / (4 * s * s)).epsilon(1e-12));
    }
    for (std::size_t i = 1; i < 9; ++i) CHECK(r.rows()[i][2] < r.rows()[i - 1][2]);

    const auto half = mu_table({0.5}, 1);
    CHECK(half.rows()[0][1] == 0.5);
    CHECK_THROWS_AS(mu_table({0.6}, 3), DomainError);
    CHECK_THROWS_AS(mu_table({0.5}, 0), DomainError);
}
