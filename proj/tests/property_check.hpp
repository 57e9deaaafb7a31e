#pragma once

#include "uavsim/scenario.hpp"

#include <cstdint>
#include <string>
#include <vector>

// Randomized whole-stack invariant checks shared by the unit and acceptance suites.

/// Mini scenario number `index`: n_sta <= 5, sim_time <= 2 s, random geometry and MAC knobs.
uavsim::Scenario random_mini_scenario(std::uint64_t index);

struct PropertyReport {
    std::vector<std::string> violations; // first few only
    std::uint64_t violation_count = 0;
    std::uint64_t events = 0;
    std::uint64_t receptions_checked = 0;
    std::uint64_t collisions_seen = 0;
    std::uint64_t dense_collisions = 0; // collisions checked under full mutual carrier sense
    std::uint64_t data_delivered = 0;
};

PropertyReport check_properties(const uavsim::Scenario& s);
