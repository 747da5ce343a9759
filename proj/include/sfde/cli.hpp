#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "sfde/error.hpp"
#include "sfde/experiments.hpp"
#include "sfde/fbm.hpp"
#include "sfde/selftest.hpp"
#include "sfde/solver.hpp"

#ifndef SFDE_VERSION
#define SFDE_VERSION "0.1.0"
#endif

// Configuration parsing and command dispatch behind the sfde executable.
//
// Config format: one `key = value` per line, `#` starts a comment.
//   alpha, s, hurst, m   model parameters (alpha, s, hurst in (0,1))
//   t_final              final time, default 0.01
//   axis                 time | space
//   levels               comma-separated refinement levels, each double the previous
//   fixed_other          N for the time axis, L for the space axis
//   n_traj               Monte Carlo trajectories, default 100
//   seed                 master seed, default 1
//   nonlinearity         sin | zero, default sin
//   threads              worker cap, default 0 (all cores)
namespace sfde::cli {

using experiments::Axis;
using experiments::ExperimentConfig;

inline const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{"alpha", "s",      "hurst", "m",            "t_final", "axis",
                                            "levels", "fixed_other", "n_traj", "seed", "nonlinearity", "threads"};
    return keys;
}

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline Error key_error(const std::string& key, const std::string& what) { return Error("cli", "key '" + key + "': " + what); }

inline double parse_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty() || !std::isfinite(out))
        throw key_error(key, "malformed number '" + v + "'");
    return out;
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
        throw key_error(key, "malformed integer '" + v + "'");
    return out;
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void split_assignment(const std::string& line, std::string& key, std::string& value) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("cli", "expected 'key = value', got '" + line + "'");
    key = trim(std::string_view(line).substr(0, eq));
    value = trim(std::string_view(line).substr(eq + 1));
    if (!known_keys().contains(key)) throw Error("cli", "unknown configuration key '" + key + "'");
}

} // namespace detail

/// Parses the key-value text, applies `overrides` ("key=value") on top, then validates.
inline ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {}) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        const auto hash = raw.find('#');
        const std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        std::string key, value;
        detail::split_assignment(line, key, value);
        kv[key] = value;
    }
    for (const auto& o : overrides) {
        std::string key, value;
        detail::split_assignment(detail::trim(o), key, value);
        kv[key] = value;
    }

    auto required = [&](const std::string& key) -> const std::string& {
        const auto it = kv.find(key);
        if (it == kv.end()) throw Error("cli", "missing required key '" + key + "'");
        return it->second;
    };
    auto open_unit = [&](const std::string& key) {
        const double v = detail::parse_double(key, required(key));
        if (!(v > 0.0 && v < 1.0)) throw detail::key_error(key, "value " + kv[key] + " outside (0,1)");
        return v;
    };

    ExperimentConfig cfg;
    cfg.params.alpha = open_unit("alpha");
    cfg.params.s = open_unit("s");
    cfg.params.h = open_unit("hurst");
    cfg.params.m = detail::parse_double("m", required("m"));
    if (kv.contains("t_final")) {
        cfg.params.t_final = detail::parse_double("t_final", kv["t_final"]);
        if (!(cfg.params.t_final > 0.0)) throw detail::key_error("t_final", "must be positive");
    }

    const std::string& axis = required("axis");
    if (axis == "time")
        cfg.axis = Axis::Time;
    else if (axis == "space")
        cfg.axis = Axis::Space;
    else
        throw detail::key_error("axis", "expected 'time' or 'space', got '" + axis + "'");

    std::istringstream levels(required("levels"));
    for (std::string item; std::getline(levels, item, ',');)
        cfg.levels.push_back(detail::parse_uint("levels", detail::trim(item)));
    if (cfg.levels.empty()) throw detail::key_error("levels", "empty list");
    for (std::size_t j = 0; j < cfg.levels.size(); ++j) {
        if (cfg.levels[j] < 1) throw detail::key_error("levels", "levels must be positive");
        if (j > 0 && cfg.levels[j] != 2 * cfg.levels[j - 1])
            throw detail::key_error("levels", "each level must double the previous");
    }

    cfg.fixed_other = detail::parse_uint("fixed_other", required("fixed_other"));
    if (cfg.fixed_other < 1) throw detail::key_error("fixed_other", "must be positive");
    if (kv.contains("n_traj")) {
        cfg.n_traj = detail::parse_uint("n_traj", kv["n_traj"]);
        if (cfg.n_traj < 2) throw detail::key_error("n_traj", "need at least 2 trajectories");
    }
    if (kv.contains("seed")) cfg.master_seed = detail::parse_uint("seed", kv["seed"]);
    if (kv.contains("threads")) cfg.threads = detail::parse_uint("threads", kv["threads"]);
    if (kv.contains("nonlinearity")) {
        const auto& f = kv["nonlinearity"];
        if (f == "sin")
            cfg.params.f = solver::Nonlinearity::sine();
        else if (f == "zero")
            cfg.params.f = solver::Nonlinearity::zero();
        else
            throw detail::key_error("nonlinearity", "expected 'sin' or 'zero', got '" + f + "'");
    }
    cfg.validate();
    return cfg;
}

/// Inverse of parse_config: every key written explicitly.
inline std::string to_config_text(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "alpha = " << detail::format_double(cfg.params.alpha) << '\n'
       << "s = " << detail::format_double(cfg.params.s) << '\n'
       << "hurst = " << detail::format_double(cfg.params.h) << '\n'
       << "m = " << detail::format_double(cfg.params.m) << '\n'
       << "t_final = " << detail::format_double(cfg.params.t_final) << '\n'
       << "axis = " << experiments::to_string(cfg.axis) << '\n'
       << "levels = ";
    for (std::size_t j = 0; j < cfg.levels.size(); ++j) os << (j ? "," : "") << cfg.levels[j];
    os << '\n'
       << "fixed_other = " << cfg.fixed_other << '\n'
       << "n_traj = " << cfg.n_traj << '\n'
       << "seed = " << cfg.master_seed << '\n'
       << "nonlinearity = " << cfg.params.f.name() << '\n'
       << "threads = " << cfg.threads << '\n';
    return os.str();
}

inline bool same_config(const ExperimentConfig& a, const ExperimentConfig& b) {
    return a.params.alpha == b.params.alpha && a.params.s == b.params.s && a.params.h == b.params.h &&
           a.params.m == b.params.m && a.params.t_final == b.params.t_final &&
           a.params.f.name() == b.params.f.name() && a.axis == b.axis && a.levels == b.levels &&
           a.fixed_other == b.fixed_other && a.n_traj == b.n_traj && a.master_seed == b.master_seed &&
           a.threads == b.threads;
}

enum class Command { Study, Trajectory, Selftest };

struct RunSpec {
    Command command = Command::Selftest;
    std::string config_path;
    std::string output_dir = ".";
    std::vector<std::string> overrides;
    std::optional<std::size_t> threads;
};

inline nlohmann::ordered_json config_json(const ExperimentConfig& cfg) {
    nlohmann::ordered_json j;
    j["alpha"] = cfg.params.alpha;
    j["s"] = cfg.params.s;
    j["hurst"] = cfg.params.h;
    j["m"] = cfg.params.m;
    j["t_final"] = cfg.params.t_final;
    j["axis"] = experiments::to_string(cfg.axis);
    j["levels"] = cfg.levels;
    j["fixed_other"] = cfg.fixed_other;
    j["n_traj"] = cfg.n_traj;
    j["seed"] = cfg.master_seed;
    j["nonlinearity"] = cfg.params.f.name();
    return j;
}

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cli", "cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ExperimentConfig load(const RunSpec& spec) {
    if (spec.config_path.empty()) throw Error("cli", "--config is required for this command");
    ExperimentConfig cfg = parse_config(read_file(spec.config_path), spec.overrides);
    if (spec.threads) cfg.threads = *spec.threads;
    return cfg;
}

inline std::filesystem::path prepare_output(const RunSpec& spec) {
    std::filesystem::path dir(spec.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cli", "cannot create output directory '" + spec.output_dir + "': " + ec.message());
    return dir;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cli", "cannot write " + path.string());
    os << j.dump(2) << '\n';
}

inline int run_study(const RunSpec& spec, std::ostream& out) {
    const ExperimentConfig cfg = load(spec);
    const auto table = experiments::run_convergence_study(cfg);
    const auto dir = prepare_output(spec);
    experiments::emit_table(table, (dir / "table.csv").string());

    nlohmann::ordered_json m;
    m["tool"] = "sfde";
    m["version"] = SFDE_VERSION;
    m["command"] = "study";
    m["config"] = config_json(cfg);
    m["master_seed"] = cfg.master_seed;
    m["theoretical_rate"] = table.theoretical_rate;
    if (auto r = table.observed_rate()) m["observed_rate"] = *r;
    else m["observed_rate"] = nullptr;
    m["outputs"] = {"table.csv"};
    write_json(dir / "manifest.json", m);

    out << "study (" << experiments::to_string(cfg.axis) << "): theoretical rate " << table.theoretical_rate;
    if (auto r = table.observed_rate()) out << ", observed rate " << *r;
    out << "; wrote " << (dir / "table.csv").string() << '\n';
    return 0;
}

inline int run_single(const RunSpec& spec, std::ostream& out) {
    const ExperimentConfig cfg = load(spec);
    const auto& p = cfg.params;
    const std::size_t n_modes = cfg.axis == Axis::Time ? cfg.fixed_other : cfg.levels.back();
    const std::size_t steps = cfg.axis == Axis::Time ? cfg.levels.back() : cfg.fixed_other;
    const auto disc = solver::Discretization::make(p.t_final, n_modes, steps);
    const auto ens = fbm::generate_ensemble(p.h, disc.tau, steps, n_modes, 1, cfg.master_seed, 0);
    const auto traj = solver::run_trajectory(p, disc, ens, 0);

    const auto dir = prepare_output(spec);
    {
        std::ofstream os(dir / "trajectory.bin", std::ios::binary);
        if (!os) throw Error("cli", "cannot write " + (dir / "trajectory.bin").string());
        solver::write_trajectory(os, traj);
    }
    nlohmann::ordered_json m;
    m["tool"] = "sfde";
    m["version"] = SFDE_VERSION;
    m["command"] = "trajectory";
    m["config"] = config_json(cfg);
    m["master_seed"] = cfg.master_seed;
    m["n_modes"] = n_modes;
    m["n_steps"] = steps;
    m["final_l2_norm"] = spectral::l2_norm(traj.final_state());
    m["outputs"] = {"trajectory.bin"};
    write_json(dir / "manifest.json", m);
    out << "trajectory: N = " << n_modes << ", L = " << steps << ", ||u(T)|| = " << spectral::l2_norm(traj.final_state())
        << "; wrote " << (dir / "trajectory.bin").string() << '\n';
    return 0;
}

inline int run_selftest(std::ostream& out) {
    const auto results = selftest::run_all();
    std::size_t passed = 0;
    for (const auto& r : results) {
        out << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << '\n';
        passed += r.passed ? 1 : 0;
    }
    out << passed << "/" << results.size() << " suites passed\n";
    return passed == results.size() ? 0 : 1;
}

} // namespace detail

/// Executes one command. Returns 0 on success; otherwise prints a one-line reason to `err`.
inline int run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    try {
        switch (spec.command) {
        case Command::Study: return detail::run_study(spec, out);
        case Command::Trajectory: return detail::run_single(spec, out);
        case Command::Selftest: {
            const int rc = detail::run_selftest(out);
            if (rc != 0) err << "error: selftest: one or more suites failed\n";
            return rc;
        }
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

} // namespace sfde::cli
