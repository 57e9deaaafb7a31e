#include "property_check.hpp"

#include "uavsim/network.hpp"

#include <doctest.h>

using namespace uavsim;

TEST_CASE("randomized mini scenarios keep every invariant")
{
    std::uint64_t receptions = 0;
    std::uint64_t collisions = 0;
    std::uint64_t dense = 0;
    for (std::uint64_t i = 1; i <= 200; ++i) {
        const Scenario s = random_mini_scenario(i);
        const PropertyReport r = check_properties(s);
        INFO("scenario ", i, ":\n", format_scenario(s));
        for (const auto& v : r.violations)
            INFO(v);
        CHECK(r.violation_count == 0);
        if (r.violation_count > 0)
            MESSAGE(r.violations.front());
        receptions += r.receptions_checked;
        collisions += r.collisions_seen;
        dense += r.dense_collisions;
    }
    CHECK(receptions > 10000);
    CHECK(collisions > 100);
    CHECK(dense > 10);
}
