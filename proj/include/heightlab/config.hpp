// Runtime configuration: "key = value" files with '#' comments, validated
// invariants, flag overrides handled by the CLI layer.
#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include "heightlab/bigint.hpp"
#include "heightlab/per1.hpp"
#include "heightlab/potentials.hpp"

namespace heightlab {

struct ConfigError : Error {
    using Error::Error;
};

struct Config {
    Rational lambda = Rational(2);
    LiftKind lift = LiftKind::standard;
    EscapeMode escape = EscapeMode::log_plain;
    int prime_bound = 100;  // P
    int n_max = 8;
    int grid = 128;
    double tol = 1e-9;
    std::uint64_t seed = 1;
    int precision_digits = 15;
    std::string cache_dir = ".heightlab-cache";

    void validate() const {
        if (lambda == 0 || lambda == 1 || lambda == -1)
            throw ConfigError("lambda must be nonzero and not a root of unity");
        if (prime_bound < 2) throw ConfigError("P must be >= 2");
        if (n_max < 1 || n_max > 10) throw ConfigError("n_max must lie in [1,10]");
        if (!(tol > 0)) throw ConfigError("tol must be positive");
        if (precision_digits < 1 || precision_digits > 18)
            throw ConfigError("precision_digits must lie in [1,18] (long double ceiling)");
    }

    bool extended_precision() const { return precision_digits > 16; }
};

namespace detail {

inline std::string trimmed(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

inline void apply_config_entry(Config& cfg, const std::string& key, const std::string& value) {
    try {
        if (key == "lambda") {
            cfg.lambda = parse_rational(value);
        } else if (key == "lift") {
            if (value == "std") cfg.lift = LiftKind::standard;
            else if (value == "paper-literal") cfg.lift = LiftKind::paper_literal;
            else throw ConfigError("lift must be 'std' or 'paper-literal'");
        } else if (key == "escape") {
            if (value == "log-plus") cfg.escape = EscapeMode::log_plus;
            else if (value == "log-plain") cfg.escape = EscapeMode::log_plain;
            else throw ConfigError("escape must be 'log-plus' or 'log-plain'");
        } else if (key == "P") {
            cfg.prime_bound = std::stoi(value);
        } else if (key == "n_max") {
            cfg.n_max = std::stoi(value);
        } else if (key == "grid") {
            cfg.grid = std::stoi(value);
        } else if (key == "tol") {
            cfg.tol = std::stod(value);
        } else if (key == "seed") {
            cfg.seed = std::stoull(value);
        } else if (key == "precision_digits") {
            cfg.precision_digits = std::stoi(value);
        } else if (key == "cache_dir") {
            cfg.cache_dir = value;
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const ParseError& e) {
        throw ConfigError("bad value for '" + key + "': " + e.what());
    } catch (const std::exception&) {
        throw ConfigError("malformed value for '" + key + "': '" + value + "'");
    }
}

inline Config parse_config_stream(std::istream& in, Config base = {}) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string entry = detail::trimmed(line);
        if (entry.empty()) continue;
        const auto eq = entry.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = detail::trimmed(entry.substr(0, eq));
        const std::string value = detail::trimmed(entry.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        apply_config_entry(base, key, value);
    }
    return base;
}

inline Config parse_config_file(const std::string& path, Config base = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    Config out = parse_config_stream(in, std::move(base));
    return out;
}

}  // namespace heightlab
