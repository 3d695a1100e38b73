#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "fibrelax/ibm.hpp"
#include "fibrelax/macro.hpp"

namespace fibrelax {

struct SweepConfig {
    double r_min = 0.1;
    double r_max = 10.0;
    int steps = 10;
};

struct FieldInit {
    std::string family; // rho: uniform|gaussian ; theta: constant|plane_wave
    double value = 1.0;
    double sigma = 0.1;
    double amplitude = 0.0;
    double mean = 0.0;
    int k = 1;
    std::string axis = "x";
};

struct GridConfig {
    int nx = 64, ny = 64;
    double Lx = 1.0, Ly = 1.0;
    double dt = 1e-4;
    double t_end = 0.1;
    int output_every = 100;
    bool evolve_theta = false;
    FieldInit rho_init{"uniform", 1.0};
    FieldInit theta_init{"constant", 0.0};
};

struct ValidateConfig {
    double tol_l1 = 0.08;
    double tol_r_rel = 0.15;
    double steady_drift = 0.01;
};

struct ScenarioConfig {
    std::string mode; // ibm | coeffs | pde | ellipticity | validate
    std::uint64_t seed = 0;
    std::string outputs = "out";
    ModelParams model;
    SimConfig sim;
    GridConfig grid;
    SweepConfig sweep;
    ValidateConfig validate;
    std::string resolved_json; // canonical form captured for the manifest
};

// Parses and validates a scenario from JSON text; rejects unknown keys with
// the offending field path. Optional overrides replace seed / output dir.
ScenarioConfig parse_scenario(const std::string& json_text,
                              const std::optional<std::uint64_t>& seed_override = std::nullopt,
                              const std::optional<std::string>& out_override = std::nullopt);

struct ValidationReport {
    double r_theory = 0.0;
    double eta_empirical = 0.0;
    double r_fitted = 0.0;
    double l1_distance = 0.0;
    bool pass = false;
};
std::string to_json(const ValidationReport& rep);

// Cross-scale check: fits a von Mises concentration to the time-averaged
// order parameter of an IBM run and compares it (and the recentered angle
// density) against the equilibrium family at r_theory = xi alpha L^2 gamma /
// (4 d). Throws NotConverged when the trailing-window drift test fails.
ValidationReport validate_equilibrium(const IbmRunResult& run, const ModelParams& params,
                                      const ValidateConfig& tol);

// Dispatches a scenario, writes manifest.json plus the mode's artifacts into
// cfg.outputs. Returns the process exit status (0 success, 4 validation
// fail); configuration and numerical errors are thrown.
int run_scenario(const ScenarioConfig& cfg);

extern const char* const kVersion;

} // namespace fibrelax
