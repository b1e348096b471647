#include "porosim/config.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace porosim {

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "scenario",
        "seed",
        "grid.n_cells",
        "grid.n_cells_y",
        "time.dt",
        "time.n_steps",
        "constants.rho",
        "constants.t0_tension",
        "constants.t1",
        "forcing.table",
        "forcing.cutoff_time",
        "initial.table",
        "wave.b_hat",
        "wave.b_dc",
        "wave.k",
        "wave.v",
        "wave.e0",
        "wave.q",
        "wave.gamma",
        "wave.f_osc",
        "wave.reference_area",
        "wave.normal",
        "charge.charges_per_area",
        "charge.dimple_area",
        "charge.energy_per_molecule",
        "charge.characteristic_length",
        "charge.dimple_mass",
        "solver.omega",
        "solver.max_iters",
        "solver.tol",
        "solver.chi_eps_rel",
        "solver.explicit_wave",
        "analysis.rho_values",
        "analysis.tau_values",
        "analysis.theta",
        "analysis.alpha",
        "analysis.eps_rel",
        "analysis.max_points",
        "analysis.quad_n_xi",
        "analysis.quad_n_sigma",
        "output.dir",
        "sweep.key",
        "sweep.values",
    };
    return keys;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

RunConfig RunConfig::parse_string(const std::string& text,
                                  const std::string& origin) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                     ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!known_keys().count(key))
            throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                     ": unknown key '" + key + "'");
        cfg.entries_[key] = value;
    }
    return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_string(ss.str(), path);
}

RunConfig RunConfig::defaults_for(const std::string& scenario) {
    RunConfig cfg;
    cfg.entries_["scenario"] = scenario;
    return cfg;
}

bool RunConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string RunConfig::get_str(const std::string& key,
                               const std::string& fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
        std::size_t used = 0;
        const double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument(it->second);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("config: key '" + key + "' is not a number: '" +
                                 it->second + "'");
    }
}

int RunConfig::get_int(const std::string& key, int fallback) const {
    const double v = get_double(key, fallback);
    const int i = static_cast<int>(v);
    if (i != v)
        throw std::runtime_error("config: key '" + key + "' is not an integer");
    return i;
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw std::runtime_error("config: key '" + key + "' is not a bool");
}

std::vector<double> RunConfig::get_list(const std::string& key,
                                        const std::vector<double>& fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw std::runtime_error("config: key '" + key +
                                     "' has a malformed list entry '" + tok + "'");
        }
    }
    if (out.empty())
        throw std::runtime_error("config: key '" + key + "' is an empty list");
    return out;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    if (!known_keys().count(key))
        throw std::runtime_error("config: unknown key '" + key + "'");
    entries_[key] = value;
}

std::string RunConfig::canonical_text() const {
    std::string out;
    for (const auto& [k, v] : entries_) out += k + "=" + v + "\n";
    return out;
}

std::string RunConfig::hash() const {
    const std::string text = canonical_text();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void RunConfig::validate() const {
    auto positive = [&](const std::string& key) {
        if (has(key) && !(get_double(key, 1.0) > 0.0))
            throw std::runtime_error("config: key '" + key + "' must be positive");
    };
    positive("time.dt");
    positive("constants.rho");
    positive("constants.t0_tension");
    positive("constants.t1");
    positive("solver.tol");
    positive("analysis.theta");
    positive("wave.reference_area");
    if (has("grid.n_cells") && get_int("grid.n_cells", 2) < 2)
        throw std::runtime_error("config: grid.n_cells must be >= 2");
    if (has("time.n_steps") && get_int("time.n_steps", 1) < 1)
        throw std::runtime_error("config: time.n_steps must be >= 1");
    if (has("solver.omega")) {
        const double w = get_double("solver.omega", 1.5);
        if (!(w > 0.0 && w < 2.0))
            throw std::runtime_error("config: solver.omega must lie in (0, 2)");
    }
    if (has("analysis.alpha")) {
        const double a = get_double("analysis.alpha", 0.5);
        if (!(a > 0.0 && a < 1.0))
            throw std::runtime_error("config: analysis.alpha must lie in (0, 1)");
    }
    for (const char* key : {"forcing.table", "initial.table"})
        if (has(key) && !std::filesystem::exists(get_str(key, "")))
            throw std::runtime_error(std::string("config: ") + key +
                                     " path does not exist: " + get_str(key, ""));
}

}  // namespace porosim
