#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "torres/deformation.hpp"
#include "torres/spectral.hpp"
#include "torres/symbols.hpp"
#include "torres/toml.hpp"

namespace torres {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FbiCheckConfig {
    double h = 0.1;
    int max_degree = 5;
    double inversion_tol = 1e-3;
    double lebeau_tol = 1e-2;
};

struct EscapeCheckConfig {
    double c_cut = 10.0;
    double xi_max = 40.0;
    double tol = 0.05;
    EscapeRegion region = EscapeRegion::Cylinder;
};

/// Everything an experiment run needs; keys in the TOML file mirror the
/// field names (see README for the schema).
struct ExperimentConfig {
    SymbolFamily symbol;
    std::string symbol_text = "fig2";
    std::vector<double> thetas{0.8};
    std::vector<double> nu_sweep;
    int n_lo = 0, n_hi = 0;
    int grid_n = 128;
    SpectralWindow window{0.5, 0.8};
    bool full_mode_laplacian = false;
    std::filesystem::path output_dir = "out";
    std::int64_t seed = 0;
    std::string g0_expression;  // empty: built-in default field
    FbiCheckConfig fbi;
    EscapeCheckConfig escape;

    DeformationSpec deformation(double theta) const {
        return g0_expression.empty() ? default_deformation(theta)
                                     : deformation_from_expression(theta, g0_expression);
    }

    void validate() const {
        if (grid_n < 4 || grid_n % 2 != 0) throw ConfigError("config: N must be even and >= 4");
        if (n_lo > n_hi) throw ConfigError("config: n_range must be a nonempty interval");
        for (double t : thetas)
            if (t < 0.0) throw ConfigError("config: theta must be >= 0");
        for (size_t i = 0; i < nu_sweep.size(); ++i) {
            if (!(nu_sweep[i] > 0.0)) throw ConfigError("config: nu_sweep entries must be > 0");
            if (i > 0 && !(nu_sweep[i] < nu_sweep[i - 1]))
                throw ConfigError("config: nu_sweep must be strictly decreasing");
        }
        if (window.omega0 < 0.0) throw ConfigError("config: window.omega0 must be >= 0");
    }
};

namespace detail {

inline std::vector<double> number_list(const toml::Value& v, const std::string& key) {
    std::vector<double> out;
    if (v.is_number()) {
        out.push_back(v.as_number());
        return out;
    }
    if (!v.is_array()) throw ConfigError("config: " + key + " must be a number or array");
    for (const auto& e : v.as_array()) out.push_back(e.as_number());
    return out;
}

}  // namespace detail

inline ExperimentConfig config_from_toml(const toml::Table& t) {
    ExperimentConfig cfg;
    for (const auto& [key, val] : t) {
        if (key == "symbol") {
            if (val.is_string()) {
                cfg.symbol = builtin_symbol(val.as_string());
                cfg.symbol_text = val.as_string();
            } else if (val.is_table()) {
                const auto& tab = val.as_table();
                if (!tab.count("v_a") || !tab.count("v_m"))
                    throw ConfigError("config: symbol table needs v_a and v_m expressions");
                cfg.symbol = symbol_from_expressions(tab.at("v_a").as_string(),
                                                     tab.at("v_m").as_string());
                cfg.symbol_text = "custom";
            } else {
                throw ConfigError("config: symbol must be a name or a {v_a, v_m} table");
            }
        } else if (key == "theta") {
            cfg.thetas = detail::number_list(val, "theta");
            if (cfg.thetas.empty()) throw ConfigError("config: theta list is empty");
        } else if (key == "nu_sweep") {
            cfg.nu_sweep = detail::number_list(val, "nu_sweep");
        } else if (key == "n_range") {
            const auto& arr = val.as_array();
            if (arr.size() != 2) throw ConfigError("config: n_range must be [lo, hi]");
            cfg.n_lo = static_cast<int>(arr[0].as_integer());
            cfg.n_hi = static_cast<int>(arr[1].as_integer());
        } else if (key == "N") {
            cfg.grid_n = static_cast<int>(val.as_integer());
        } else if (key == "window") {
            const auto& tab = val.as_table();
            if (tab.count("omega0")) cfg.window.omega0 = tab.at("omega0").as_number();
            if (tab.count("theta")) cfg.window.theta = tab.at("theta").as_number();
        } else if (key == "flags") {
            const auto& tab = val.as_table();
            if (tab.count("full_mode_laplacian"))
                cfg.full_mode_laplacian = tab.at("full_mode_laplacian").as_bool();
        } else if (key == "output_dir") {
            cfg.output_dir = val.as_string();
        } else if (key == "seed") {
            cfg.seed = val.as_integer();
        } else if (key == "g0_expression") {
            cfg.g0_expression = val.as_string();
        } else if (key == "fbi") {
            const auto& tab = val.as_table();
            if (tab.count("h")) cfg.fbi.h = tab.at("h").as_number();
            if (tab.count("max_degree"))
                cfg.fbi.max_degree = static_cast<int>(tab.at("max_degree").as_integer());
            if (tab.count("inversion_tol")) cfg.fbi.inversion_tol = tab.at("inversion_tol").as_number();
            if (tab.count("lebeau_tol")) cfg.fbi.lebeau_tol = tab.at("lebeau_tol").as_number();
        } else if (key == "escape") {
            const auto& tab = val.as_table();
            if (tab.count("C")) cfg.escape.c_cut = tab.at("C").as_number();
            if (tab.count("xi_max")) cfg.escape.xi_max = tab.at("xi_max").as_number();
            if (tab.count("tol")) cfg.escape.tol = tab.at("tol").as_number();
            if (tab.count("region")) {
                const std::string& r = tab.at("region").as_string();
                if (r == "ball") cfg.escape.region = EscapeRegion::Ball;
                else if (r == "cylinder") cfg.escape.region = EscapeRegion::Cylinder;
                else throw ConfigError("config: escape.region must be 'ball' or 'cylinder'");
            }
        } else {
            throw ConfigError("config: unknown key '" + key + "'");
        }
    }
    // the window's Im cutoff defaults to the largest deformation used
    if (!t.count("window") || !t.at("window").as_table().count("theta")) {
        double tmax = 0.0;
        for (double th : cfg.thetas) tmax = std::max(tmax, th);
        cfg.window.theta = tmax;
    }
    cfg.validate();
    return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return config_from_toml(toml::parse(ss.str()));
}

}  // namespace torres
