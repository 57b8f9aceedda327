#pragma once

#include "nlsw/grid.hpp"
#include "nlsw/model.hpp"
#include "nlsw/potential.hpp"
#include "nlsw/spectra.hpp"
#include "nlsw/stationary.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nlsw::cli {

struct PotentialConfig {
    std::string kind = "cosine"; // constant, cosine, tabulated
    double amplitude = 0.0;
    double base = 1.0;
    double period = 1.0;
    std::optional<double> shift; // gauge shift override
    std::vector<double> samples;

    Potential build() const;
};

struct BumpsConfig {
    int n = 1;
    std::vector<long> offsets;
    std::vector<long> separations;
};

struct SolverConfig {
    double flow_step = 0.5;
    double flow_tol = 1e-6;
    int flow_max_iter = 20000;
    double newton_tol = 1e-10;
    int newton_max_iter = 30;
    double max_initial_residual = 1.0;
    double tau_rel = 1e-6;
    double residual_check = 1e-8; // accepted sup residual of an input field
    std::optional<double> center;
    bool truncation_check = false;
};

struct ShadowingConfig {
    bool enabled = true;
    double delta = 0.1;
    double q = 0.5;
    int samples = 8;
};

struct DynamicsConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    double amplitude = 1e-5;
    std::string perturbation = "eigenvector"; // eigenvector, random, none
    int record_stride = 10;
    std::optional<double> stop_distance;
    double fit_lo = 1e-4;
    double fit_hi = 1e-2;
    double exit_radius = 1e-2;
    long seed = 1;
};

struct GlueStudyConfig {
    int n = 2;
    double mass_per_bump = 0.0;
    int periods = 5;
    double points_per_unit = 16.0;
    long spacing = 1;
};

struct SemiclassicalConfig {
    std::vector<double> eps_list;
    std::optional<GlueStudyConfig> glue;
};

struct RunConfig {
    GridSpec grid;
    PotentialConfig potential;
    double p = 4.0;
    double coefficient = 1.0;
    std::optional<double> mass;
    BumpsConfig bumps;
    SolverConfig solver;
    ShadowingConfig shadowing;
    DynamicsConfig dynamics;
    SemiclassicalConfig semiclassical;
    std::string output;
    std::optional<std::string> field;
    std::filesystem::path base_dir; // directory of the config file

    nlohmann::json raw;
    std::string hash; // FNV-1a of the canonical dump

    Nonlinearity nonlinearity() const { return Nonlinearity(p, coefficient); }
    SampledPotential sampled(const GridSpec& g) const { return SampledPotential(potential.build(), g, potential.shift); }
    SampledPotential sampled() const { return sampled(grid); }
    double require_mass() const;
    GroundStateOptions ground_state_options() const;
    NewtonOptions newton_options() const;
    SpectralOptions spectral_options() const { return {solver.tau_rel}; }
};

// Throws ConfigError on unknown keys, wrong types or violated invariants.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

} // namespace nlsw::cli
