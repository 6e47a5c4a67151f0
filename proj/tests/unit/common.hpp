#pragma once

#include "dpomdp/cassandra.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <string>

inline std::filesystem::path fixture(const std::string& name) {
    return std::filesystem::path(DPOMDP_FIXTURE_DIR) / name;
}

inline dpomdp::PomdpModel load_fixture(const std::string& name) { return dpomdp::parse_pomdp_file(fixture(name)); }

inline dpomdp::PomdpModel parse_text(const std::string& text) {
    std::istringstream in(text);
    return dpomdp::parse_pomdp(in);
}

inline dpomdp::Belief belief2(double p) {
    dpomdp::Vector v(2);
    v << p, 1.0 - p;
    return dpomdp::Belief(v);
}

inline dpomdp::Belief belief_of(std::initializer_list<double> values) {
    dpomdp::Vector v(static_cast<dpomdp::Index>(values.size()));
    dpomdp::Index i = 0;
    for (double x : values) v(i++) = x;
    return dpomdp::Belief(v);
}
