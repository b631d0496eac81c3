#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tdlr/groundstate.hpp"
#include "tdlr/model.hpp"

namespace tdlr {

// INI-style configuration: "[section]" headers, "key = value" entries,
// '#' or ';' comments.  Unknown sections or keys are rejected so typos
// fail loudly instead of silently running defaults.
struct DriveConfig {
    std::string vp_spec = "poly:0,1";  // poly:c0,c1,... or file:PATH
    std::string f_spec = "gaussian:1.0,0.25";  // gaussian:t0,sigma | step | sinusoid:w0
    double eps = 1e-3;
    double T = 40.0;
    double dt = 0.01;
};

struct FreqConfig {
    double wmin = 0.0;
    double wmax = 2.0;
    int nw = 201;
    double eta = 5e-3;
};

struct ResonanceConfig {
    int i0 = 0;
    int a0 = 2;
    std::vector<double> deltas = {1.0};
    double s = 0.0;  // 0 -> 4x local level spacing
    std::vector<double> eta_seq = {0.05, 0.035, 0.025, 0.0175, 0.012};
    bool lorentz = false;
};

struct Config {
    ModelSystem model;
    ScfOptions scf;
    DriveConfig drive;
    FreqConfig freq;
    ResonanceConfig resonance;
    std::string raw;  // canonical text, hashed into every output

    Config();
    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text);

    std::string hash() const;  // FNV-1a of raw, hex
};

// Materialize the probe potential on the grid of `model`.
Vec build_probe(const Config& cfg, const ModelSystem& model);

}  // namespace tdlr
