#include "config.hpp"

#include "nlsw/error.hpp"
#include "nlsw/io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace nlsw::cli {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where)
{
    if (!j.is_object())
        throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.count(key))
            throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

template <class T>
T read(const json& j, const char* key, const std::string& where)
{
    if (!j.contains(key))
        throw ConfigError(where + ": missing key '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + ": wrong type");
    }
}

template <class T>
void read_opt(const json& j, const char* key, const std::string& where, T& out)
{
    if (j.contains(key) && !j.at(key).is_null())
        out = read<T>(j, key, where);
}

template <class T>
void read_opt(const json& j, const char* key, const std::string& where, std::optional<T>& out)
{
    if (j.contains(key) && !j.at(key).is_null())
        out = read<T>(j, key, where);
}

void require(bool ok, const std::string& msg)
{
    if (!ok)
        throw ConfigError(msg);
}

PotentialConfig parse_potential(const json& j)
{
    check_keys(j, {"kind", "A", "base", "period", "shift", "samples"}, "potential");
    PotentialConfig pc;
    pc.kind = read<std::string>(j, "kind", "potential");
    read_opt(j, "A", "potential", pc.amplitude);
    read_opt(j, "base", "potential", pc.base);
    read_opt(j, "period", "potential", pc.period);
    read_opt(j, "shift", "potential", pc.shift);
    read_opt(j, "samples", "potential", pc.samples);
    require(pc.kind == "constant" || pc.kind == "cosine" || pc.kind == "tabulated",
            "potential.kind must be constant, cosine or tabulated");
    require(pc.period > 0.0, "potential.period must be positive");
    if (pc.kind == "tabulated")
        require(pc.samples.size() >= 4, "potential.samples needs at least 4 values");
    return pc;
}

} // namespace

Potential PotentialConfig::build() const
{
    if (kind == "constant")
        return Potential::constant(base);
    if (kind == "cosine")
        return Potential::cosine(amplitude, base, period);
    return Potential::tabulated(samples, period);
}

double RunConfig::require_mass() const
{
    if (!mass)
        throw ConfigError("this command needs 'mass'");
    return *mass;
}

NewtonOptions RunConfig::newton_options() const
{
    NewtonOptions o;
    o.tol = solver.newton_tol;
    o.max_iter = solver.newton_max_iter;
    o.max_initial_residual = solver.max_initial_residual;
    return o;
}

GroundStateOptions RunConfig::ground_state_options() const
{
    GroundStateOptions o;
    o.flow.step = solver.flow_step;
    o.flow.tol = solver.flow_tol;
    o.flow.max_iter = solver.flow_max_iter;
    o.newton = newton_options();
    o.newton.max_initial_residual = 1e300;
    o.center = solver.center;
    return o;
}

RunConfig parse_config(const json& j)
{
    check_keys(j, {"grid", "potential", "nonlinearity", "mass", "bumps", "solver", "shadowing", "dynamics",
                   "semiclassical", "output", "field"},
               "config");
    RunConfig c;
    c.raw = j;
    c.hash = hex64(fnv1a(j.dump()));

    const json& g = j.contains("grid") ? j.at("grid") : throw ConfigError("config: missing key 'grid'");
    check_keys(g, {"L", "M"}, "grid");
    double L = read<double>(g, "L", "grid");
    int M = read<int>(g, "M", "grid");
    require(L > 0.0 && L == std::floor(L), "grid.L must be a positive integer");
    require(M >= 64 && M % 2 == 0, "grid.M must be even and at least 64");
    require(M % static_cast<long>(2 * L) == 0, "grid.M must be a multiple of 2L");
    c.grid = GridSpec(L, M);

    c.potential = parse_potential(j.contains("potential") ? j.at("potential")
                                                          : throw ConfigError("config: missing key 'potential'"));
    if (c.potential.kind != "constant")
        require(c.grid.points_in(c.potential.period) > 0, "potential.period must be a whole number of grid steps");

    const json& nl =
        j.contains("nonlinearity") ? j.at("nonlinearity") : throw ConfigError("config: missing key 'nonlinearity'");
    check_keys(nl, {"p", "coefficient"}, "nonlinearity");
    c.p = read<double>(nl, "p", "nonlinearity");
    read_opt(nl, "coefficient", "nonlinearity", c.coefficient);
    require(c.p > 2.0 && std::isfinite(c.p), "nonlinearity.p must exceed 2");

    read_opt(j, "mass", "config", c.mass);
    if (c.mass)
        require(*c.mass > 0.0, "mass must be positive");

    if (j.contains("bumps")) {
        const json& b = j.at("bumps");
        check_keys(b, {"n", "offsets", "separations"}, "bumps");
        c.bumps.n = read<int>(b, "n", "bumps");
        read_opt(b, "offsets", "bumps", c.bumps.offsets);
        read_opt(b, "separations", "bumps", c.bumps.separations);
        require(c.bumps.n >= 1, "bumps.n must be at least 1");
        require(c.bumps.offsets.empty() || static_cast<int>(c.bumps.offsets.size()) == c.bumps.n,
                "bumps.offsets must have n entries");
        for (long d : c.bumps.separations)
            require(d >= 1, "bumps.separations must be positive");
    }

    if (j.contains("solver")) {
        const json& s = j.at("solver");
        check_keys(s, {"flow_step", "flow_tol", "flow_max_iter", "newton_tol", "newton_max_iter",
                       "max_initial_residual", "tau_rel", "residual_check", "center", "truncation_check"},
                   "solver");
        read_opt(s, "flow_step", "solver", c.solver.flow_step);
        read_opt(s, "flow_tol", "solver", c.solver.flow_tol);
        read_opt(s, "flow_max_iter", "solver", c.solver.flow_max_iter);
        read_opt(s, "newton_tol", "solver", c.solver.newton_tol);
        read_opt(s, "newton_max_iter", "solver", c.solver.newton_max_iter);
        read_opt(s, "max_initial_residual", "solver", c.solver.max_initial_residual);
        read_opt(s, "tau_rel", "solver", c.solver.tau_rel);
        read_opt(s, "residual_check", "solver", c.solver.residual_check);
        read_opt(s, "center", "solver", c.solver.center);
        read_opt(s, "truncation_check", "solver", c.solver.truncation_check);
        require(c.solver.newton_tol > 0.0 && c.solver.flow_tol > 0.0 && c.solver.tau_rel > 0.0,
                "solver tolerances must be positive");
    }

    if (j.contains("shadowing")) {
        const json& s = j.at("shadowing");
        check_keys(s, {"enabled", "delta", "q", "samples"}, "shadowing");
        read_opt(s, "enabled", "shadowing", c.shadowing.enabled);
        read_opt(s, "delta", "shadowing", c.shadowing.delta);
        read_opt(s, "q", "shadowing", c.shadowing.q);
        read_opt(s, "samples", "shadowing", c.shadowing.samples);
        require(c.shadowing.delta > 0.0, "shadowing.delta must be positive");
        require(c.shadowing.q > 0.0 && c.shadowing.q < 1.0, "shadowing.q must lie in (0, 1)");
    }

    if (j.contains("dynamics")) {
        const json& d = j.at("dynamics");
        check_keys(d, {"dt", "t_end", "amplitude", "perturbation", "record_stride", "stop_distance", "fit_window",
                       "exit_radius", "seed"},
                   "dynamics");
        auto& dc = c.dynamics;
        read_opt(d, "dt", "dynamics", dc.dt);
        read_opt(d, "t_end", "dynamics", dc.t_end);
        read_opt(d, "amplitude", "dynamics", dc.amplitude);
        read_opt(d, "perturbation", "dynamics", dc.perturbation);
        read_opt(d, "record_stride", "dynamics", dc.record_stride);
        read_opt(d, "stop_distance", "dynamics", dc.stop_distance);
        read_opt(d, "exit_radius", "dynamics", dc.exit_radius);
        read_opt(d, "seed", "dynamics", dc.seed);
        if (d.contains("fit_window")) {
            auto w = read<std::vector<double>>(d, "fit_window", "dynamics");
            require(w.size() == 2 && 0.0 < w[0] && w[0] < w[1], "dynamics.fit_window must be [lo, hi] with 0 < lo < hi");
            dc.fit_lo = w[0];
            dc.fit_hi = w[1];
        }
        require(dc.dt > 0.0 && dc.t_end > 0.0, "dynamics.dt and dynamics.t_end must be positive");
        require(dc.record_stride >= 1, "dynamics.record_stride must be at least 1");
        require(dc.perturbation == "eigenvector" || dc.perturbation == "random" || dc.perturbation == "none",
                "dynamics.perturbation must be eigenvector, random or none");
    }

    if (j.contains("semiclassical")) {
        const json& s = j.at("semiclassical");
        check_keys(s, {"eps_list", "glue"}, "semiclassical");
        read_opt(s, "eps_list", "semiclassical", c.semiclassical.eps_list);
        const auto& el = c.semiclassical.eps_list;
        for (std::size_t i = 0; i < el.size(); ++i) {
            require(el[i] > 0.0, "semiclassical.eps_list must be positive");
            require(i == 0 || el[i] < el[i - 1], "semiclassical.eps_list must be strictly decreasing");
        }
        if (s.contains("glue")) {
            const json& gl = s.at("glue");
            check_keys(gl, {"n", "mass_per_bump", "periods", "points_per_unit", "spacing"}, "semiclassical.glue");
            GlueStudyConfig gc;
            gc.n = read<int>(gl, "n", "semiclassical.glue");
            gc.mass_per_bump = read<double>(gl, "mass_per_bump", "semiclassical.glue");
            read_opt(gl, "periods", "semiclassical.glue", gc.periods);
            read_opt(gl, "points_per_unit", "semiclassical.glue", gc.points_per_unit);
            read_opt(gl, "spacing", "semiclassical.glue", gc.spacing);
            require(gc.n >= 1 && gc.mass_per_bump > 0.0 && gc.periods >= 1 && gc.spacing >= 1,
                    "semiclassical.glue: n, mass_per_bump, periods and spacing must be positive");
            c.semiclassical.glue = gc;
        }
    }

    read_opt(j, "output", "config", c.output);
    read_opt(j, "field", "config", c.field);
    return c;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    RunConfig c = parse_config(j);
    c.base_dir = path.parent_path();
    return c;
}

} // namespace nlsw::cli
