#pragma once

#include <string>

#include "tdlr/config.hpp"

namespace tdlr {

struct RunOptions {
    std::string command;   // scf | check | spectrum | kick | resonance
    std::string out_dir = ".";
    unsigned seed = 0;
    bool no_interaction = false;   // zero the coupling operator everywhere
    double delta = 1.0;            // coupling scale for spectrum runs
};

inline constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 success, 2 config, 3 not-a-minimum, 4 numerical failure.
int run(const Config& cfg, const RunOptions& opts);

}  // namespace tdlr
