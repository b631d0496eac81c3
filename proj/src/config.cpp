#include "tdlr/config.hpp"

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace tdlr {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_num(const std::string& sec, const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("[" + sec + "] " + key + ": cannot parse number '" + v + "'");
    }
}

int parse_int(const std::string& sec, const std::string& key, const std::string& v) {
    double x = parse_num(sec, key, v);
    int k = static_cast<int>(x);
    if (k != x) throw ConfigError("[" + sec + "] " + key + ": expected integer, got '" + v + "'");
    return k;
}

std::vector<double> parse_list(const std::string& sec, const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::string item;
    std::stringstream ss(v);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_num(sec, key, item));
    }
    if (out.empty()) throw ConfigError("[" + sec + "] " + key + ": empty list");
    return out;
}

}  // namespace

Config::Config() {
    // Default system: two electrons in a soft-Coulomb well with a mildly
    // repulsive quadratic xc term; binds exactly two orbitals and has a
    // comfortably positive coercivity constant.
    model.grid = GridSpec::uniform(240, 24.0);
    model.sc = {2.0, 2.0, 0.5};
    model.xc = {0.3, 0.0, 0.0};
    model.N = 2;
}

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str());
}

Config Config::from_string(const std::string& text) {
    Config cfg;
    cfg.raw = text;

    int n = cfg.model.grid.n;
    double L = cfg.model.grid.L;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t cpos = line.find_first_of("#;");
        if (cpos != std::string::npos) line = line.substr(0, cpos);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "model" && section != "scf" && section != "drive" &&
                section != "freq" && section != "resonance")
                throw ConfigError("unknown section [" + section + "]");
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (section.empty()) throw ConfigError("key '" + key + "' outside any section");

        if (section == "model") {
            if (key == "n") n = parse_int(section, key, val);
            else if (key == "L") L = parse_num(section, key, val);
            else if (key == "a") cfg.model.sc.a = parse_num(section, key, val);
            else if (key == "a_ext") cfg.model.sc.a_ext = parse_num(section, key, val);
            else if (key == "Z") cfg.model.sc.Z = parse_num(section, key, val);
            else if (key == "N") cfg.model.N = parse_int(section, key, val);
            else if (key == "c2") cfg.model.xc.c2 = parse_num(section, key, val);
            else if (key == "c3") cfg.model.xc.c3 = parse_num(section, key, val);
            else if (key == "c4") cfg.model.xc.c4 = parse_num(section, key, val);
            else throw ConfigError("unknown key '" + key + "' in [model]");
        } else if (section == "scf") {
            if (key == "tol") cfg.scf.tol = parse_num(section, key, val);
            else if (key == "max_iter") cfg.scf.max_iter = parse_int(section, key, val);
            else if (key == "mixing") cfg.scf.mixing = parse_num(section, key, val);
            else if (key == "occupation") {
                std::vector<int> occ;
                for (double x : parse_list(section, key, val)) occ.push_back(static_cast<int>(x));
                cfg.scf.occupation = occ;
            } else throw ConfigError("unknown key '" + key + "' in [scf]");
        } else if (section == "drive") {
            if (key == "vp") cfg.drive.vp_spec = val;
            else if (key == "f") cfg.drive.f_spec = val;
            else if (key == "eps") cfg.drive.eps = parse_num(section, key, val);
            else if (key == "T") cfg.drive.T = parse_num(section, key, val);
            else if (key == "dt") cfg.drive.dt = parse_num(section, key, val);
            else throw ConfigError("unknown key '" + key + "' in [drive]");
        } else if (section == "freq") {
            if (key == "wmin") cfg.freq.wmin = parse_num(section, key, val);
            else if (key == "wmax") cfg.freq.wmax = parse_num(section, key, val);
            else if (key == "nw") cfg.freq.nw = parse_int(section, key, val);
            else if (key == "eta") cfg.freq.eta = parse_num(section, key, val);
            else throw ConfigError("unknown key '" + key + "' in [freq]");
        } else {  // resonance
            if (key == "i0") cfg.resonance.i0 = parse_int(section, key, val);
            else if (key == "a0") cfg.resonance.a0 = parse_int(section, key, val);
            else if (key == "delta") cfg.resonance.deltas = parse_list(section, key, val);
            else if (key == "s") cfg.resonance.s = parse_num(section, key, val);
            else if (key == "eta_seq") cfg.resonance.eta_seq = parse_list(section, key, val);
            else if (key == "lorentz") cfg.resonance.lorentz = (val == "true" || val == "1");
            else throw ConfigError("unknown key '" + key + "' in [resonance]");
        }
    }

    // Bounds checks.
    if (n < 16) throw ConfigError("[model] n must be >= 16");
    if (L <= 0) throw ConfigError("[model] L must be positive");
    if (cfg.model.sc.a <= 0 || cfg.model.sc.a_ext <= 0) throw ConfigError("[model] softening lengths must be positive");
    if (cfg.model.sc.Z < 0) throw ConfigError("[model] Z must be nonnegative");
    if (cfg.model.N < 1 || cfg.model.N >= n) throw ConfigError("[model] need 1 <= N < n");
    if (cfg.scf.tol <= 0) throw ConfigError("[scf] tol must be positive");
    if (cfg.scf.max_iter < 1) throw ConfigError("[scf] max_iter must be >= 1");
    if (cfg.scf.mixing <= 0 || cfg.scf.mixing > 1) throw ConfigError("[scf] mixing must be in (0, 1]");
    if (cfg.drive.eps < 0) throw ConfigError("[drive] eps must be nonnegative");
    if (cfg.drive.dt <= 0 || cfg.drive.T < 0) throw ConfigError("[drive] need dt > 0 and T >= 0");
    if (cfg.freq.nw < 2 || cfg.freq.wmax <= cfg.freq.wmin) throw ConfigError("[freq] need nw >= 2 and wmax > wmin");
    if (cfg.freq.eta <= 0) throw ConfigError("[freq] eta must be positive");
    if (cfg.resonance.s < 0) throw ConfigError("[resonance] s must be nonnegative");
    for (double d : cfg.resonance.deltas)
        if (d < 0) throw ConfigError("[resonance] delta values must be nonnegative");
    for (double e : cfg.resonance.eta_seq)
        if (e <= 0) throw ConfigError("[resonance] eta_seq values must be positive");

    cfg.model.grid = GridSpec::uniform(n, L);
    return cfg;
}

std::string Config::hash() const {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : raw) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Vec build_probe(const Config& cfg, const ModelSystem& model) {
    const std::string& spec = cfg.drive.vp_spec;
    if (spec.rfind("poly:", 0) == 0) {
        std::vector<double> c = parse_list("drive", "vp", spec.substr(5));
        Vec v = Vec::Zero(model.grid.n);
        for (int i = 0; i < model.grid.n; ++i) {
            double x = model.grid.x[i], p = 0.0;
            for (size_t k = c.size(); k-- > 0;) p = p * x + c[k];
            v[i] = p;
        }
        return v;
    }
    if (spec.rfind("gausspoly:", 0) == 0) {
        // gausspoly:width,c0,c1,... -> polynomial damped by exp(-(x/width)^2).
        std::vector<double> c = parse_list("drive", "vp", spec.substr(10));
        if (c.size() < 2) throw ConfigError("[drive] vp gausspoly needs width and coefficients");
        double w = c[0];
        if (w <= 0) throw ConfigError("[drive] vp gausspoly width must be positive");
        Vec v = Vec::Zero(model.grid.n);
        for (int i = 0; i < model.grid.n; ++i) {
            double x = model.grid.x[i], p = 0.0;
            for (size_t k = c.size(); k-- > 1;) p = p * x + c[k];
            v[i] = p * std::exp(-(x / w) * (x / w));
        }
        return v;
    }
    if (spec.rfind("file:", 0) == 0) {
        std::string path = spec.substr(5);
        std::ifstream in(path);
        if (!in) throw ConfigError("[drive] vp gridfile not found: " + path);
        std::vector<double> vals;
        double x;
        while (in >> x) vals.push_back(x);
        if (static_cast<int>(vals.size()) != model.grid.n)
            throw ConfigError("[drive] vp gridfile has " + std::to_string(vals.size()) +
                              " values, grid has " + std::to_string(model.grid.n));
        return Eigen::Map<Vec>(vals.data(), vals.size());
    }
    throw ConfigError("[drive] vp: unknown spec '" + spec + "' (use poly:, gausspoly: or file:)");
}

}  // namespace tdlr
