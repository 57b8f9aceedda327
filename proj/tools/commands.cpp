#include "commands.hpp"

#include "nlsw/dynamics.hpp"
#include "nlsw/error.hpp"
#include "nlsw/gluing.hpp"
#include "nlsw/io.hpp"
#include "nlsw/semiclassical.hpp"
#include "nlsw/spectra.hpp"
#include "nlsw/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace nlsw::cli {

using nlohmann::json;
namespace fs = std::filesystem;

int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const ConfigError*>(&e))
        return exit_config;
    if (dynamic_cast<const PreconditionError*>(&e))
        return exit_precondition;
    return exit_solver;
}

namespace {

json header(const RunConfig& c, const Context& ctx, const std::string& command)
{
    return {{"command", command},
            {"config_hash", c.hash},
            {"versions", {{"nlsw", library_version}}},
            {"jobs", ctx.jobs}};
}

fs::path prepare(const Context& ctx)
{
    fs::create_directories(ctx.out);
    return ctx.out;
}

std::optional<fs::path> field_path(const RunConfig& c, const Context& ctx)
{
    if (ctx.field)
        return ctx.field;
    if (c.field) {
        fs::path p(*c.field);
        return p.is_relative() ? c.base_dir / p : p;
    }
    return std::nullopt;
}

Field read_field(const fs::path& p)
{
    if (!fs::exists(p))
        throw ConfigError("field file not found: " + p.string());
    return p.extension() == ".csv" ? read_field_csv(p) : read_field_binary(p);
}

struct BaseState {
    ConstrainedCriticalPoint point;
    std::string method;
    double site = 0.0;
};

double peak_location(const Field& u)
{
    Eigen::Index i;
    u.values().maxCoeff(&i);
    return u.grid().x(i);
}

// Constant potentials are translation invariant, so the bordered Newton system
// is singular there; the closed-form profile is used instead.
BaseState solve_base(const RunConfig& c, const SampledPotential& V, const Nonlinearity& f, double alpha)
{
    if (c.potential.kind == "constant" && c.coefficient == 1.0) {
        const double vbar = limit_profile_vbar(c.p, alpha);
        const double center = c.solver.center.value_or(0.0);
        Field u = limit_profile(V.grid(), c.p, vbar, center);
        return {make_point(u, c.potential.base - vbar, alpha, V, f), "closed_form", center};
    }
    auto pt = ground_state(V, f, alpha, c.ground_state_options());
    const double site = peak_location(pt.u);
    return {std::move(pt), "flow_newton", site};
}

ConstrainedCriticalPoint point_from_field(const Field& u, const SampledPotential& V, const Nonlinearity& f,
                                          std::optional<double> mass, double tol)
{
    if (mass && std::abs(u.mass() - *mass) > 1e-8 * std::max(1.0, *mass))
        throw AssumptionViolation("field mass " + format_double(u.mass()) + " differs from configured mass " +
                                  format_double(*mass));
    auto pt = make_point(u, lagrange_multiplier(u, V, f), mass.value_or(u.mass()), V, f);
    if (!(pt.l2_residual_norm <= tol))
        throw AssumptionViolation("field is not a constrained critical point: residual " +
                                  format_double(pt.l2_residual_norm) + " > " + format_double(tol));
    return pt;
}

struct Fit {
    double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

Fit linear_fit(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    Fit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
    return fit;
}

// Index of an n-bump glued state predicted from the single bump's report.
std::pair<int, int> glued_index(const SpectralReport& ubar, int n)
{
    const int m_f = n * ubar.m_f;
    const bool negative_branch = ubar.classification == Classification::fully_nondegenerate_neg;
    return {negative_branch ? m_f - 1 : m_f, m_f};
}

std::string error_kind(const std::exception& e)
{
    if (dynamic_cast<const GluingFailed*>(&e))
        return "gluing_failed";
    if (dynamic_cast<const DegenerateSuperposition*>(&e))
        return "degenerate_superposition";
    if (dynamic_cast<const PreconditionError*>(&e))
        return "precondition";
    return "solver_error";
}

} // namespace

int cmd_groundstate(const RunConfig& c, const Context& ctx)
{
    const fs::path out = prepare(ctx);
    const auto f = c.nonlinearity();
    const auto V = c.sampled();
    const double alpha = c.require_mass();
    const auto base = solve_base(c, V, f, alpha);
    const auto report = classify(base.point, V, f, c.spectral_options());

    json j = header(c, ctx, "groundstate");
    j["method"] = base.method;
    j["concentration_site"] = base.site;
    j["spectrum_bottom"] = V.bottom();
    j["point"] = to_json(base.point, V, f);
    j["spectral"] = to_json(report);
    if (c.solver.truncation_check) {
        const GridSpec wide(2.0 * c.grid.L, 2 * c.grid.M);
        const auto V2 = c.sampled(wide);
        const auto base2 = solve_base(c, V2, f, alpha);
        const Field diff = resample(base2.point.u, c.grid) - base.point.u;
        j["truncation"] = {{"L", wide.L},
                           {"h1_difference", norm_h1(diff)},
                           {"lambda_difference", std::abs(base2.point.lambda - base.point.lambda)}};
    }
    write_json(j, out / "groundstate.json");
    write_field_csv(base.point.u, out / "groundstate.csv");
    write_field_binary(base.point.u, out / "groundstate.bin");
    return exit_ok;
}

int cmd_glue(const RunConfig& c, const Context& ctx)
{
    const fs::path out = prepare(ctx);
    const auto f = c.nonlinearity();
    const auto V = c.sampled();
    const double alpha = c.require_mass();
    const int n = c.bumps.n;

    ConstrainedCriticalPoint ubar;
    std::string method;
    if (auto fp = field_path(c, ctx)) {
        ubar = point_from_field(read_field(*fp), V, f, alpha / n, c.solver.residual_check);
        method = "field";
    } else {
        auto base = solve_base(c, V, f, alpha / n);
        ubar = std::move(base.point);
        method = base.method;
    }
    const auto ubar_report = classify(ubar, V, f, c.spectral_options());
    const auto expected = glued_index(ubar_report, n);

    std::vector<BumpConfig> configs;
    if (!c.bumps.offsets.empty()) {
        configs.emplace_back(c.bumps.offsets);
    } else {
        const std::vector<long> seps = c.bumps.separations.empty() ? std::vector<long>{8, 12, 16}
                                                                    : c.bumps.separations;
        for (long d : seps)
            configs.push_back(BumpConfig::evenly_spaced(n, d));
    }

    struct Row {
        bool ok = false;
        std::string status;
        json report;
        std::optional<GlueResult> result;
        SpectralReport spectral;
        double sigma_min = std::nan("");
    };
    std::vector<Row> rows(configs.size());
    const auto newton = c.newton_options();

    run_pool(ctx.jobs, configs.size(), [&](std::size_t i) {
        const auto& cfg = configs[i];
        Row& row = rows[i];
        const long d = cfg.separation();
        json rep;
        rep["separation"] = n > 1 ? json(d) : json(nullptr);
        rep["offsets"] = cfg.offsets();
        try {
            auto g = glue(ubar, cfg, n * ubar.mass, V, f, newton);
            row.spectral = classify(g.point, V, f, c.spectral_options());
            const ExtendedPoint v0{g.superposition, ubar.lambda};
            if (c.shadowing.enabled) {
                auto sh = shadowing_certificate(v0, n * ubar.mass, V, f, c.shadowing.delta, c.shadowing.q,
                                                c.shadowing.samples);
                row.sigma_min = sh.sigma_min;
                rep["shadowing"] = to_json(sh);
            } else {
                row.sigma_min = bordered_sigma_min(v0, V, f).sigma_min;
            }
            rep["point"] = to_json(g.point, V, f);
            rep["spectral"] = to_json(row.spectral);
            rep["newton"] = {{"iterations", g.trace.iterations},
                             {"residuals", g.trace.residuals},
                             {"halvings", g.trace.halvings}};
            rep["distance_h1"] = g.distance;
            rep["lambda_shift"] = g.lambda_shift;
            rep["initial_residual"] = g.initial_residual;
            rep["index_formula_holds"] = row.spectral.m == expected.first && row.spectral.m_f == expected.second;
            if (ubar_report.classification != Classification::degenerate) {
                auto zc = z_translate_check(ubar, V, g.point, V, f, cfg);
                rep["z_translate"] = {{"field_discrepancy", zc.field_discrepancy},
                                      {"scalar_discrepancy", zc.scalar_discrepancy},
                                      {"scalar_relative", zc.scalar_relative}};
            }
            row.result = std::move(g);
            row.ok = true;
            row.status = "ok";
        } catch (const GluingFailed& e) {
            row.status = error_kind(e);
            rep["error"] = e.what();
            rep["residuals"] = e.residuals();
        } catch (const Error& e) {
            row.status = error_kind(e);
            rep["error"] = e.what();
        }
        rep["status"] = row.status;
        row.report = std::move(rep);
    });

    CsvTable table({"d", "newton_iters", "dist_h1", "dlambda", "sigma_min", "m", "m_f", "status", "min_u",
                    "initial_residual"});
    json summary = header(c, ctx, "glue");
    summary["base"] = {{"method", method}, {"point", to_json(ubar, V, f)}, {"spectral", to_json(ubar_report)}};
    summary["expected_index"] = {{"m", expected.first}, {"m_f", expected.second}};
    json jrows = json::array();
    std::vector<double> xs, ys;
    int successes = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const long d = configs[i].separation();
        const std::string dcell = n > 1 ? cell(d) : "inf";
        const std::string tag = n > 1 ? std::to_string(d) : "single";
        if (r.ok) {
            const auto& g = *r.result;
            ++successes;
            table.add({dcell, cell(g.trace.iterations), cell(g.distance), cell(g.lambda_shift), cell(r.sigma_min),
                       cell(r.spectral.m), cell(r.spectral.m_f), r.status, cell(g.point.u.min()),
                       cell(g.initial_residual)});
            if (n > 1 && g.distance > 0) {
                xs.push_back(static_cast<double>(d));
                ys.push_back(std::log(g.distance));
            }
            write_field_binary(g.point.u, out / ("glue_d" + tag + ".bin"));
        } else {
            table.add({dcell, "", "", "", "", "", "", r.status, "", ""});
        }
        write_json(r.report, out / ("glue_d" + tag + ".json"));
        jrows.push_back(r.report);
    }
    summary["rows"] = jrows;
    if (xs.size() >= 3) {
        const auto fit = linear_fit(xs, ys);
        summary["log_distance_fit"] = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2}};
    }
    summary["succeeded"] = successes;
    table.write(out / "glue.csv");
    write_json(summary, out / "glue.json");
    return successes > 0 ? exit_ok : exit_solver;
}

int cmd_spectrum(const RunConfig& c, const Context& ctx)
{
    auto fp = field_path(c, ctx);
    if (!fp)
        throw ConfigError("spectrum needs a field file (--field or 'field')");
    const Field u = read_field(*fp);
    if (!(u.grid() == c.grid))
        throw GridMismatch("field grid differs from the configured grid");
    const auto f = c.nonlinearity();
    const auto V = c.sampled();
    const auto pt = point_from_field(u, V, f, c.mass, c.solver.residual_check);
    const auto report = classify(pt, V, f, c.spectral_options());

    const fs::path out = prepare(ctx);
    json j = header(c, ctx, "spectrum");
    j["point"] = to_json(pt, V, f);
    j["spectral"] = to_json(report);
    write_json(j, out / "spectrum.json");

    CsvTable table({"index", "free", "constrained"});
    const std::size_t rows = std::max(report.free_eigenvalues.size(), report.constrained_eigenvalues.size());
    for (std::size_t i = 0; i < rows; ++i)
        table.add({cell(static_cast<long>(i)),
                   i < report.free_eigenvalues.size() ? cell(report.free_eigenvalues[i]) : "",
                   i < report.constrained_eigenvalues.size() ? cell(report.constrained_eigenvalues[i]) : ""});
    table.write(out / "eigenvalues.csv");
    return exit_ok;
}

int cmd_evolve(const RunConfig& c, const Context& ctx)
{
    const auto f = c.nonlinearity();
    const auto V = c.sampled();
    const auto& dc = c.dynamics;

    ConstrainedCriticalPoint phi;
    if (auto fp = field_path(c, ctx))
        phi = point_from_field(read_field(*fp), V, f, c.mass, c.solver.residual_check);
    else
        phi = solve_base(c, V, f, c.require_mass()).point;

    json j = header(c, ctx, "evolve");
    j["reference"] = to_json(phi, V, f);
    j["perturbation"] = dc.perturbation;
    j["amplitude"] = dc.amplitude;

    std::optional<double> rho;
    ComplexField psi0 = ComplexField::from_real(phi.u);
    if (dc.perturbation == "eigenvector") {
        const auto ins = instability_eigenvalue(phi, V, f, c.solver.tau_rel);
        rho = ins.rho;
        j["instability"] = to_json(ins);
        psi0 = seed_perturbation(phi.u, (1.0 / norm_h1(ins.v)) * ins.v, dc.amplitude);
    } else if (dc.perturbation == "random") {
        const auto dir = random_direction(c.grid, V, 1.0, static_cast<std::uint64_t>(dc.seed)).field;
        psi0 = seed_perturbation(phi.u, (1.0 / norm_h1(dir)) * dir, dc.amplitude);
    }

    PropagateOptions po;
    po.dt = dc.dt;
    po.t_end = dc.t_end;
    po.record_stride = dc.record_stride;
    po.snapshot_stride = ctx.snapshot_stride;
    po.stop_distance = dc.stop_distance;
    const auto traj = propagate(psi0, V, f, po, &phi.u);

    const fs::path out = prepare(ctx);
    write_trajectory_csv(traj, out / "trajectory.csv");
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "snapshot_%05zu", k);
        write_field_binary(traj.snapshots[k].real(), out / (std::string(name) + "_re.bin"));
        write_field_binary(traj.snapshots[k].imag(), out / (std::string(name) + "_im.bin"));
    }

    double max_dist = 0.0;
    json exit_time = nullptr;
    for (std::size_t i = 0; i < traj.orbit_distance.size(); ++i) {
        max_dist = std::max(max_dist, traj.orbit_distance[i]);
        if (exit_time.is_null() && traj.orbit_distance[i] > dc.exit_radius)
            exit_time = traj.times[i];
    }
    double mass_drift = 0.0, energy_drift = 0.0;
    for (std::size_t i = 0; i < traj.mass.size(); ++i) {
        mass_drift = std::max(mass_drift, std::abs(traj.mass[i] - traj.mass[0]));
        energy_drift = std::max(energy_drift, std::abs(traj.energy[i] - traj.energy[0]));
    }
    j["t_final"] = traj.times.back();
    j["max_orbit_distance"] = max_dist;
    j["exit_radius"] = dc.exit_radius;
    j["exit_time"] = exit_time;
    j["mass_drift"] = mass_drift;
    j["energy_drift"] = energy_drift;
    try {
        const auto w = growth_window(traj, dc.fit_lo, dc.fit_hi);
        const double rate = growth_rate_fit(traj, w.first, w.second);
        json fit = {{"window", {w.first, w.second}}, {"rate", rate}};
        if (rho)
            fit["relative_error"] = std::abs(rate - *rho) / *rho;
        j["growth_fit"] = fit;
    } catch (const FitRejected& e) {
        j["growth_fit"] = nullptr;
        j["growth_fit_note"] = e.what();
    }
    write_json(j, out / "evolve.json");
    return exit_ok;
}

int cmd_semiclassical(const RunConfig& c, const Context& ctx)
{
    if (c.semiclassical.eps_list.empty())
        throw ConfigError("semiclassical needs a non-empty eps_list");
    const auto f = c.nonlinearity();
    const Potential V = c.potential.build();
    const auto family = continue_family(c.semiclassical.eps_list, V, f, c.grid);
    const auto crit = criterion_value(c.p);
    const auto ztab = z_eps_check(family);
    const auto rayleigh = translation_mode_estimate(family);
    const auto morse = morse_check(family);

    const fs::path out = prepare(ctx);
    CsvTable table({"eps", "mass", "x_eps", "m", "m_f", "expected_m", "expected_m_f", "flagged", "z_dot_u",
                    "z_error", "rayleigh_ratio", "h2_rate", "newton_steps"});
    json rows = json::array();
    bool morse_ok = true;
    for (std::size_t i = 0; i < family.members.size(); ++i) {
        const auto& mem = family.members[i];
        const auto& mr = morse[i];
        morse_ok = morse_ok && (mr.flagged || mr.ok());
        table.add({cell(mem.eps), cell(mem.unrescaled_mass), cell(mem.peak_location), cell(mr.m), cell(mr.m_f),
                   cell(mr.expected_m), cell(mr.expected_m_f), cell(mr.flagged), cell(ztab.rows[i].z_dot_u),
                   cell(ztab.rows[i].error), cell(rayleigh[i].ratio), cell(rayleigh[i].h2_rate),
                   cell(mem.newton_steps)});
        rows.push_back({{"eps", mem.eps},
                        {"point", to_json(mem.point, mem.potential, f)},
                        {"unrescaled_mass", mem.unrescaled_mass},
                        {"peak_location", mem.peak_location},
                        {"spectral", to_json(mr.report)},
                        {"sign_ok", ztab.rows[i].sign_ok},
                        {"rayleigh", rayleigh[i].rayleigh},
                        {"rayleigh_predicted", rayleigh[i].predicted}});
    }
    table.write(out / "family.csv");

    json j = header(c, ctx, "semiclassical");
    j["criterion"] = {{"p", c.p},
                      {"numeric", crit.numeric},
                      {"analytic", crit.analytic},
                      {"relative_error", crit.relative_error()},
                      {"sign_matches", (crit.numeric > 0) == (c.p > Nonlinearity::mass_critical)}};
    j["z_limit"] = ztab.limit;
    j["z_monotone"] = ztab.monotone;
    j["morse_matches"] = morse_ok;
    j["potential_morse_index"] = morse_index_of_potential(V);
    j["members"] = rows;

    int code = exit_ok;
    if (const auto& gc = c.semiclassical.glue) {
        const double ppu = gc->points_per_unit;
        const int periods = gc->periods;
        auto grid_for = [ppu, periods](double e) {
            return lattice_grid(e, periods, 2 * static_cast<int>(std::lround(ppu / (2.0 * e))));
        };
        const auto sel = select_mass_epsilon(gc->n * gc->mass_per_bump, gc->n, family, grid_for);
        const auto& Vn = sel.member.potential;
        const auto ubar_rep = classify(sel.member.point, Vn, f, c.spectral_options());
        const auto expected = glued_index(ubar_rep, gc->n);
        json gj = {{"eps", sel.eps},
                   {"solves", sel.solves},
                   {"mass_error", sel.mass_error},
                   {"grid", to_json(Vn.grid())},
                   {"base", {{"point", to_json(sel.member.point, Vn, f)}, {"spectral", to_json(ubar_rep)}}},
                   {"expected_index", {{"m", expected.first}, {"m_f", expected.second}}}};
        try {
            NewtonOptions no = c.newton_options();
            no.max_initial_residual = 1e300;
            const auto g = glue(sel.member.point, BumpConfig::evenly_spaced(gc->n, gc->spacing),
                                gc->n * sel.member.point.mass, Vn, f, no);
            const auto rep = classify(g.point, Vn, f, c.spectral_options());
            gj["glued"] = {{"point", to_json(g.point, Vn, f)},
                           {"spectral", to_json(rep)},
                           {"newton_iterations", g.trace.iterations},
                           {"positive", g.point.u.min() > 0}};
            gj["index_formula_holds"] = rep.m == expected.first && rep.m_f == expected.second;
            write_field_binary(g.point.u, out / "glued.bin");
        } catch (const SolverError& e) {
            gj["error"] = e.what();
            code = exit_solver;
        }
        j["glue"] = gj;
    }
    write_json(j, out / "semiclassical.json");
    return code;
}

int run_command(const std::string& name, const RunConfig& c, const Context& ctx)
{
    if (name == "groundstate")
        return cmd_groundstate(c, ctx);
    if (name == "glue")
        return cmd_glue(c, ctx);
    if (name == "spectrum")
        return cmd_spectrum(c, ctx);
    if (name == "evolve")
        return cmd_evolve(c, ctx);
    if (name == "semiclassical")
        return cmd_semiclassical(c, ctx);
    throw ConfigError("unknown command '" + name + "'");
}

int cmd_sweep(const fs::path& manifest, const Context& ctx)
{
    std::ifstream in(manifest);
    if (!in)
        throw ConfigError("cannot open manifest " + manifest.string());
    json m;
    try {
        m = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("manifest: " + std::string(e.what()));
    }
    if (!m.is_object() || !m.contains("runs") || !m.at("runs").is_array())
        throw ConfigError("manifest needs a 'runs' array");

    struct Run {
        std::string name, command;
        fs::path config;
        std::optional<fs::path> field;
        int expect = 0;
        int code = 0;
        std::string message;
    };
    std::vector<Run> runs;
    std::set<std::string> names;
    const fs::path base = manifest.parent_path();
    for (const auto& r : m.at("runs")) {
        for (const auto& [key, value] : r.items()) {
            (void)value;
            if (key != "name" && key != "command" && key != "config" && key != "field" && key != "expect_exit")
                throw ConfigError("manifest run: unknown key '" + key + "'");
        }
        Run run;
        try {
            run.name = r.at("name").get<std::string>();
            run.command = r.at("command").get<std::string>();
            run.config = base / r.at("config").get<std::string>();
            if (r.contains("field"))
                run.field = base / r.at("field").get<std::string>();
            if (r.contains("expect_exit"))
                run.expect = r.at("expect_exit").get<int>();
        } catch (const json::exception&) {
            throw ConfigError("manifest run needs string name, command and config");
        }
        if (!names.insert(run.name).second)
            throw ConfigError("manifest: duplicate run name '" + run.name + "'");
        runs.push_back(std::move(run));
    }

    run_pool(ctx.jobs, runs.size(), [&](std::size_t i) {
        Run& run = runs[i];
        Context sub;
        sub.out = ctx.out / run.name;
        sub.jobs = 1;
        sub.snapshot_stride = ctx.snapshot_stride;
        sub.field = run.field;
        try {
            run.code = run_command(run.command, load_config(run.config), sub);
        } catch (const std::exception& e) {
            run.code = exit_code_for(e);
            run.message = e.what();
        }
    });

    fs::create_directories(ctx.out);
    CsvTable table({"name", "command", "exit_code", "expected", "message"});
    bool all = true;
    for (const auto& r : runs) {
        all = all && r.code == r.expect;
        std::string msg = r.message;
        std::replace(msg.begin(), msg.end(), ',', ';');
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        table.add({r.name, r.command, cell(r.code), cell(r.expect), msg});
    }
    table.write(ctx.out / "summary.csv");
    return all ? exit_ok : exit_solver;
}

} // namespace nlsw::cli
