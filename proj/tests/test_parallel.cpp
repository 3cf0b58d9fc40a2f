#include <doctest.h>

#include <atomic>
#include <stdexcept>
#include <string>

#include "seo/circle_map.hpp"
#include "seo/parallel.hpp"
#include "seo/stats.hpp"

using namespace seo;

TEST_SUITE("parallel") {

TEST_CASE("map_indexed gathers results by index under both policies") {
    set_worker_count(4);
    for (auto policy : {ExecPolicy::Serial, ExecPolicy::Parallel}) {
        const auto v = map_indexed(policy, 1000, [](std::size_t i) { return static_cast<double>(i * i); });
        REQUIRE(v.size() == 1000);
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == static_cast<double>(i * i));
    }
    set_worker_count(0);
}

TEST_CASE("the lowest-index failure is reported") {
    set_worker_count(4);
    std::atomic<int> calls{0};
    try {
        for_each_index(ExecPolicy::Parallel, 64, [&](std::size_t i) {
            ++calls;
            if (i % 10 == 7) throw std::runtime_error("point " + std::to_string(i));
        });
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "point 7");
    }
    CHECK(calls.load() == 64);
    set_worker_count(0);
}

TEST_CASE("worker count round trip") {
    set_worker_count(3);
    CHECK(worker_count() == 3);
    set_worker_count(0);
    CHECK(worker_count() >= 1);
}

TEST_CASE("map staircase is bitwise identical serial and parallel") {
    set_worker_count(4);
    const MapSpec s{0.0, 0.8, MapFunction::sine()};
    const auto alphas = stats::linspace(0.0, 6.0, 300);
    const auto a = winding_staircase(s, alphas, 0.1, 500, 2000, ExecPolicy::Serial);
    const auto b = winding_staircase(s, alphas, 0.1, 500, 2000, ExecPolicy::Parallel);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].winding == b[i].winding);
        CHECK(a[i].locked_q == b[i].locked_q);
    }
    set_worker_count(0);
}

}  // TEST_SUITE
