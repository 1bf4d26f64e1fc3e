#include <doctest.h>

#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "bounce/parallel.hpp"

using namespace bounce;

TEST_CASE("thread count follows the environment")
{
    setenv("BOUNCE_LAB_THREADS", "3", 1);
    CHECK(thread_count() == 3);
    setenv("BOUNCE_LAB_THREADS", "0", 1);
    CHECK(thread_count() >= 1);
    unsetenv("BOUNCE_LAB_THREADS");
    CHECK(thread_count() >= 1);
}

TEST_CASE("parallel_for covers every index once")
{
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) {
        CHECK(h == 1);
    }
}

TEST_CASE("parallel_for rethrows the lowest-index failure")
{
    try {
        parallel_for(100, 4, [](std::size_t i) {
            if (i == 17 || i == 60) {
                throw std::runtime_error(std::to_string(i));
            }
        });
        FAIL("expected a throw");
    } catch (const std::runtime_error &e) {
        CHECK(std::string(e.what()) == "17");
    }
}
