#include "fibrelax/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <set>

#include <json.hpp>

#include "fibrelax/io.hpp"
#include "fibrelax/simd.hpp"

namespace fibrelax {

const char* const kVersion = "0.1.0";

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& path, std::set<std::string> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key()))
            throw ConfigInvalid(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
    }
}

double get_num(const json& obj, const std::string& path, const char* key, double fallback,
               bool required = false) {
    if (!obj.contains(key)) {
        if (required) throw ConfigInvalid(path + "." + key, "missing required field");
        return fallback;
    }
    if (!obj[key].is_number()) throw ConfigInvalid(path + "." + key, "must be a number");
    return obj[key].get<double>();
}

AngularPotential make_u1_cos2(double amplitude, double theta_star) {
    AngularPotential u;
    u.value = [=](double th) { return -amplitude * std::cos(2.0 * (th - theta_star)); };
    u.dtheta = [=](double th) { return 2.0 * amplitude * std::sin(2.0 * (th - theta_star)); };
    return u;
}

SpatialPotential make_u0_cosine_well(double amplitude, double px, double py) {
    SpatialPotential u;
    u.value = [=](double x, double y) {
        return 0.5 * amplitude *
               (2.0 - std::cos(2.0 * kPi * x / px) - std::cos(2.0 * kPi * y / py));
    };
    u.grad = [=](double x, double y) {
        return Vec2{amplitude * (kPi / px) * std::sin(2.0 * kPi * x / px),
                    amplitude * (kPi / py) * std::sin(2.0 * kPi * y / py)};
    };
    return u;
}

ModelParams parse_model(const json& m, const std::string& path) {
    reject_unknown(m, path,
                   {"mu", "lambda", "kappa", "alpha", "beta", "d", "nu_f", "nu_d", "L", "xi",
                    "gamma", "U0", "U1"});
    ModelParams p;
    p.mu = get_num(m, path, "mu", p.mu);
    p.lambda = get_num(m, path, "lambda", p.lambda);
    p.kappa = get_num(m, path, "kappa", p.kappa);
    p.alpha = get_num(m, path, "alpha", p.alpha);
    p.beta = get_num(m, path, "beta", p.beta);
    p.d = get_num(m, path, "d", p.d);
    p.nu_f = get_num(m, path, "nu_f", p.nu_f);
    p.nu_d = get_num(m, path, "nu_d", p.nu_d);
    p.L = get_num(m, path, "L", p.L);
    p.xi = get_num(m, path, "xi", p.xi);
    p.gamma = get_num(m, path, "gamma", p.gamma);
    if (m.contains("U0")) {
        const json& u = m["U0"];
        reject_unknown(u, path + ".U0", {"family", "amplitude", "period_x", "period_y"});
        const std::string fam = u.value("family", "none");
        if (fam == "cosine_well") {
            p.U0 = make_u0_cosine_well(get_num(u, path + ".U0", "amplitude", 1.0, true),
                                       get_num(u, path + ".U0", "period_x", 1.0, true),
                                       get_num(u, path + ".U0", "period_y", 1.0, true));
        } else if (fam != "none") {
            throw ConfigInvalid(path + ".U0.family", "unknown family '" + fam + "'");
        }
    }
    if (m.contains("U1")) {
        const json& u = m["U1"];
        reject_unknown(u, path + ".U1", {"family", "amplitude", "theta_star"});
        const std::string fam = u.value("family", "none");
        if (fam == "cos2") {
            p.U1 = make_u1_cos2(get_num(u, path + ".U1", "amplitude", 1.0, true),
                                get_num(u, path + ".U1", "theta_star", 0.0));
        } else if (fam != "none") {
            throw ConfigInvalid(path + ".U1.family", "unknown family '" + fam + "'");
        }
    }
    validate(p);
    return p;
}

SimConfig parse_sim(const json& s, const std::string& path) {
    reject_unknown(s, path,
                   {"dt", "t_end", "box", "n_fibers", "neighbor_cell_size", "output_stride",
                    "hist_bins"});
    SimConfig cfg;
    cfg.dt = get_num(s, path, "dt", cfg.dt, true);
    cfg.t_end = get_num(s, path, "t_end", cfg.t_end, true);
    if (!s.contains("box") || !s["box"].is_array() || s["box"].size() != 2)
        throw ConfigInvalid(path + ".box", "must be [size_x, size_y]");
    cfg.box_x = s["box"][0].get<double>();
    cfg.box_y = s["box"][1].get<double>();
    cfg.n_fibers = static_cast<int>(get_num(s, path, "n_fibers", 0, true));
    cfg.neighbor_cell_size = get_num(s, path, "neighbor_cell_size", 0.0);
    cfg.output_stride = static_cast<int>(get_num(s, path, "output_stride", 1));
    cfg.hist_bins = static_cast<int>(get_num(s, path, "hist_bins", 64));
    return cfg;
}

FieldInit parse_field_init(const json& f, const std::string& path,
                           const std::set<std::string>& families) {
    reject_unknown(f, path, {"family", "value", "sigma", "amplitude", "mean", "k", "axis"});
    FieldInit init;
    init.family = f.value("family", "");
    if (!families.count(init.family))
        throw ConfigInvalid(path + ".family", "unknown family '" + init.family + "'");
    init.value = get_num(f, path, "value", init.value);
    init.sigma = get_num(f, path, "sigma", init.sigma);
    init.amplitude = get_num(f, path, "amplitude", init.amplitude);
    init.mean = get_num(f, path, "mean", init.mean);
    init.k = static_cast<int>(get_num(f, path, "k", init.k));
    if (f.contains("axis")) init.axis = f["axis"].get<std::string>();
    if (init.axis != "x" && init.axis != "y")
        throw ConfigInvalid(path + ".axis", "must be 'x' or 'y'");
    return init;
}

GridConfig parse_grid(const json& g, const std::string& path) {
    reject_unknown(g, path,
                   {"nx", "ny", "Lx", "Ly", "dt", "t_end", "output_every", "evolve_theta",
                    "rho_init", "theta_init"});
    GridConfig cfg;
    cfg.nx = static_cast<int>(get_num(g, path, "nx", cfg.nx));
    cfg.ny = static_cast<int>(get_num(g, path, "ny", cfg.ny));
    cfg.Lx = get_num(g, path, "Lx", cfg.Lx);
    cfg.Ly = get_num(g, path, "Ly", cfg.Ly);
    cfg.dt = get_num(g, path, "dt", cfg.dt, true);
    cfg.t_end = get_num(g, path, "t_end", cfg.t_end, true);
    cfg.output_every = static_cast<int>(get_num(g, path, "output_every", cfg.output_every));
    if (g.contains("evolve_theta")) {
        if (!g["evolve_theta"].is_boolean())
            throw ConfigInvalid(path + ".evolve_theta", "must be a boolean");
        cfg.evolve_theta = g["evolve_theta"].get<bool>();
    }
    if (cfg.nx < 4 || cfg.ny < 4) throw ConfigInvalid(path + ".nx", "grid must be at least 4x4");
    if (!(cfg.Lx > 0.0) || !(cfg.Ly > 0.0)) throw ConfigInvalid(path + ".Lx", "must be > 0");
    if (cfg.output_every < 1) throw ConfigInvalid(path + ".output_every", "must be >= 1");
    if (g.contains("rho_init"))
        cfg.rho_init = parse_field_init(g["rho_init"], path + ".rho_init", {"uniform", "gaussian"});
    if (g.contains("theta_init"))
        cfg.theta_init =
            parse_field_init(g["theta_init"], path + ".theta_init", {"constant", "plane_wave"});
    return cfg;
}

} // namespace

ScenarioConfig parse_scenario(const std::string& json_text,
                              const std::optional<std::uint64_t>& seed_override,
                              const std::optional<std::string>& out_override) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigInvalid("<root>", std::string("JSON parse error: ") + e.what());
    }
    if (!root.is_object()) throw ConfigInvalid("<root>", "top level must be an object");
    reject_unknown(root, "", {"mode", "seed", "outputs", "model", "sim", "grid", "sweep",
                              "validate"});

    ScenarioConfig cfg;
    if (!root.contains("mode")) throw ConfigInvalid("mode", "missing required field");
    cfg.mode = root["mode"].get<std::string>();
    const std::set<std::string> modes{"ibm", "coeffs", "pde", "ellipticity", "validate"};
    if (!modes.count(cfg.mode))
        throw ConfigInvalid("mode", "must be one of ibm|coeffs|pde|ellipticity|validate");

    if (root.contains("seed")) cfg.seed = root["seed"].get<std::uint64_t>();
    if (seed_override) cfg.seed = *seed_override;
    if (root.contains("outputs")) cfg.outputs = root["outputs"].get<std::string>();
    if (out_override) cfg.outputs = *out_override;

    const bool needs_model = cfg.mode == "ibm" || cfg.mode == "pde" || cfg.mode == "validate";
    if (root.contains("model"))
        cfg.model = parse_model(root["model"], "model");
    else if (needs_model)
        throw ConfigInvalid("model", "missing required section for mode " + cfg.mode);

    if (cfg.mode == "ibm" || cfg.mode == "validate") {
        if (!root.contains("sim"))
            throw ConfigInvalid("sim", "missing required section for mode " + cfg.mode);
        cfg.sim = parse_sim(root["sim"], "sim");
        cfg.sim.seed = cfg.seed;
        validate(cfg.sim, cfg.model);
    }
    if (cfg.mode == "pde") {
        if (!root.contains("grid")) throw ConfigInvalid("grid", "missing required section");
        cfg.grid = parse_grid(root["grid"], "grid");
    }
    if (cfg.mode == "coeffs" || cfg.mode == "ellipticity") {
        if (!root.contains("sweep")) throw ConfigInvalid("sweep", "missing required section");
        const json& sw = root["sweep"];
        reject_unknown(sw, "sweep", {"r_min", "r_max", "steps"});
        cfg.sweep.r_min = get_num(sw, "sweep", "r_min", cfg.sweep.r_min, true);
        cfg.sweep.r_max = get_num(sw, "sweep", "r_max", cfg.sweep.r_max, true);
        cfg.sweep.steps = static_cast<int>(get_num(sw, "sweep", "steps", cfg.sweep.steps, true));
        if (!(cfg.sweep.r_min > 0.0) || !(cfg.sweep.r_max >= cfg.sweep.r_min))
            throw ConfigInvalid("sweep.r_min", "need 0 < r_min <= r_max");
        if (cfg.sweep.steps < 1) throw ConfigInvalid("sweep.steps", "must be >= 1");
    }
    if (root.contains("validate")) {
        const json& v = root["validate"];
        reject_unknown(v, "validate", {"tol_l1", "tol_r_rel", "steady_drift"});
        cfg.validate.tol_l1 = get_num(v, "validate", "tol_l1", cfg.validate.tol_l1);
        cfg.validate.tol_r_rel = get_num(v, "validate", "tol_r_rel", cfg.validate.tol_r_rel);
        cfg.validate.steady_drift = get_num(v, "validate", "steady_drift", cfg.validate.steady_drift);
        if (cfg.validate.tol_l1 < 0.0 || cfg.validate.tol_r_rel < 0.0)
            throw ConfigInvalid("validate", "tolerances must be >= 0");
    }
    if (cfg.mode == "validate" && cfg.model.beta != 1.0)
        throw ConfigInvalid("model.beta",
                            "cross-scale validation requires beta = 1 (closed-form equilibria)");

    // canonical resolved config for the manifest
    json resolved = root;
    resolved["seed"] = cfg.seed;
    resolved["outputs"] = cfg.outputs;
    cfg.resolved_json = resolved.dump(2);
    return cfg;
}

std::string to_json(const ValidationReport& rep) {
    json j;
    j["r_theory"] = rep.r_theory;
    j["eta_empirical"] = rep.eta_empirical;
    j["r_fitted"] = rep.r_fitted;
    j["l1_distance"] = rep.l1_distance;
    j["pass"] = rep.pass;
    return j.dump(2) + "\n";
}

ValidationReport validate_equilibrium(const IbmRunResult& run, const ModelParams& params,
                                      const ValidateConfig& tol) {
    if (run.records.size() < 10) throw NotConverged("too few records for a steady-state test");
    const std::size_t n = run.records.size();
    const std::size_t w0 = n - n / 5; // trailing 20% window
    std::vector<double> etas;
    for (std::size_t k = w0; k < n; ++k) etas.push_back(run.records[k].eta);
    if (etas.size() < 4) throw NotConverged("trailing window too short");
    const std::size_t half = etas.size() / 2;
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < half; ++k) m1 += etas[k];
    for (std::size_t k = half; k < etas.size(); ++k) m2 += etas[k];
    m1 /= half;
    m2 /= (etas.size() - half);
    if (std::abs(m2 - m1) > tol.steady_drift)
        throw NotConverged("trailing-window eta drift exceeds threshold");

    ValidationReport rep;
    rep.eta_empirical = 0.5 * (m1 + m2);
    rep.r_theory = params.xi * params.alpha * params.L * params.L * params.gamma / (4.0 * params.d);
    rep.r_fitted = vm_concentration_from_order(rep.eta_empirical);

    if (run.recentered_frames == 0 || run.recentered_density.n == 0)
        throw NotConverged("no recentered density accumulated");
    const AngularGrid g(run.recentered_density.n);
    const AngularField m = vm_field(g, 0.0, rep.r_fitted);
    double l1 = 0.0;
    for (int j = 0; j < g.n; ++j) l1 += std::abs(run.recentered_density.v[j] - m.v[j]);
    rep.l1_distance = l1 / g.n;

    const double r_rel =
        rep.r_theory > 0.0 ? std::abs(rep.r_fitted - rep.r_theory) / rep.r_theory : 1.0;
    rep.pass = (r_rel < tol.tol_r_rel) && (rep.l1_distance < tol.tol_l1);
    return rep;
}

namespace {

namespace fs = std::filesystem;

void write_manifest(const ScenarioConfig& cfg) {
    json m;
    m["version"] = kVersion;
    m["simd_backend"] = simd::backend_name();
    m["config"] = json::parse(cfg.resolved_json);
    write_file((fs::path(cfg.outputs) / "manifest.json").string(), m.dump(2) + "\n");
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = a;
        return v;
    }
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

void run_coeffs(const ScenarioConfig& cfg) {
    const std::vector<double> rs = linspace(cfg.sweep.r_min, cfg.sweep.r_max, cfg.sweep.steps);
    std::vector<CsvRow> rows;
    for (double r : rs) {
        const Coefficients co = coefficients_from_r(cfg.model.d, cfg.model.L, r);
        rows.push_back({co.r, co.Z, co.c, co.alpha1, co.alpha2, co.alpha3, co.alpha4, co.alpha5,
                        co.script_A, co.script_A + co.c});
    }
    write_csv((fs::path(cfg.outputs) / "coeffs.csv").string(),
              {"r", "Z", "c", "alpha1", "alpha2", "alpha3", "alpha4", "alpha5", "scriptA",
               "scriptA_plus_c"},
              rows);
}

void run_ellipticity(const ScenarioConfig& cfg) {
    const std::vector<double> rs = linspace(cfg.sweep.r_min, cfg.sweep.r_max, cfg.sweep.steps);
    const auto reports = ellipticity_sweep(rs, cfg.model.d, cfg.model.L);
    std::vector<CsvRow> rows;
    for (const auto& rep : reports) {
        rows.push_back({rep.r, rep.A_of_r, rep.c_of_r, rep.sum, rep.alpha2, rep.alpha3,
                        rep.lambda_plus, rep.lambda_minus, rep.elliptic});
    }
    write_csv((fs::path(cfg.outputs) / "ellipticity.csv").string(),
              {"r", "scriptA", "c", "sum", "alpha2", "alpha3", "lambda_plus", "lambda_minus",
               "elliptic"},
              rows);
}

void write_ibm_outputs(const ScenarioConfig& cfg, const IbmRunResult& run) {
    std::vector<CsvRow> obs;
    std::vector<CsvRow> hist;
    for (const ObservableRecord& r : run.records) {
        obs.push_back({r.time, r.eta, r.theta_mean,
                       static_cast<unsigned long long>(r.link_count), r.energy});
        CsvRow h{r.time};
        for (double v : r.angle_histogram) h.push_back(v);
        hist.push_back(std::move(h));
    }
    write_csv((fs::path(cfg.outputs) / "observables.csv").string(),
              {"time", "eta", "theta_mean", "link_count", "energy"}, obs);
    std::vector<std::string> hh{"time"};
    for (int b = 0; b < cfg.sim.hist_bins; ++b) hh.push_back("bin" + std::to_string(b));
    write_csv((fs::path(cfg.outputs) / "histograms.csv").string(), hh, hist);
    write_snapshot((fs::path(cfg.outputs) / "state.fibs").string(), run.final_state);
}

MacroState init_macro(const GridConfig& g) {
    MacroState s(g.nx, g.ny, g.Lx, g.Ly);
    if (g.rho_init.family == "uniform") {
        std::fill(s.rho.begin(), s.rho.end(), g.rho_init.value);
    } else { // gaussian (periodically wrapped, mass = value)
        const double cx = 0.5 * g.Lx, cy = 0.5 * g.Ly;
        for (int iy = 0; iy < g.ny; ++iy)
            for (int ix = 0; ix < g.nx; ++ix) {
                double v = 0.0;
                for (int px = -3; px <= 3; ++px)
                    for (int py = -3; py <= 3; ++py) {
                        const double dx = s.cell_x(ix) - cx + px * g.Lx;
                        const double dy = s.cell_y(iy) - cy + py * g.Ly;
                        v += std::exp(-(dx * dx + dy * dy) / (2.0 * g.rho_init.sigma *
                                                              g.rho_init.sigma));
                    }
                s.rho[s.idx(ix, iy)] =
                    g.rho_init.value * v / (2.0 * kPi * g.rho_init.sigma * g.rho_init.sigma);
            }
    }
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            double th = g.theta_init.mean;
            if (g.theta_init.family == "plane_wave") {
                const double u = g.theta_init.axis == "x" ? s.cell_x(ix) / g.Lx
                                                          : s.cell_y(iy) / g.Ly;
                th += g.theta_init.amplitude * std::cos(2.0 * kPi * g.theta_init.k * u);
            } else {
                th = g.theta_init.value;
            }
            s.set_theta0(ix, iy, th);
        }
    return s;
}

void write_macro_fields(const ScenarioConfig& cfg, const MacroState& s, int frame) {
    char name[32];
    std::snprintf(name, sizeof name, "rho_%04d.csv", frame);
    std::vector<std::string> header;
    for (int ix = 0; ix < s.nx; ++ix) header.push_back("c" + std::to_string(ix));
    std::vector<CsvRow> rows;
    for (int iy = 0; iy < s.ny; ++iy) {
        CsvRow row;
        for (int ix = 0; ix < s.nx; ++ix) row.push_back(s.rho[s.idx(ix, iy)]);
        rows.push_back(std::move(row));
    }
    write_csv((fs::path(cfg.outputs) / name).string(), header, rows);

    std::snprintf(name, sizeof name, "theta_%04d.csv", frame);
    rows.clear();
    for (int iy = 0; iy < s.ny; ++iy) {
        CsvRow row;
        for (int ix = 0; ix < s.nx; ++ix) row.push_back(s.theta0(ix, iy));
        rows.push_back(std::move(row));
    }
    write_csv((fs::path(cfg.outputs) / name).string(), header, rows);
}

void run_pde(const ScenarioConfig& cfg) {
    MacroState s = init_macro(cfg.grid);
    std::optional<Coefficients> co;
    if (cfg.grid.evolve_theta)
        co = coefficients(cfg.model.d, cfg.model.L, cfg.model.xi, cfg.model.alpha,
                          cfg.model.gamma, cfg.model.nu_f, cfg.model.nu_d);
    const DriftVelocities drift = make_drift(s, cfg.model.U0);
    const DriftVelocities* dp = cfg.model.U0.empty() ? nullptr : &drift;

    const std::uint64_t n_steps =
        static_cast<std::uint64_t>(std::llround(cfg.grid.t_end / cfg.grid.dt));
    std::vector<CsvRow> series;
    int frame = 0;
    auto record = [&]() {
        std::vector<double> thetas(s.rho.size());
        for (int iy = 0; iy < s.ny; ++iy)
            for (int ix = 0; ix < s.nx; ++ix) thetas[s.idx(ix, iy)] = s.theta0(ix, iy);
        const OrderParameters op = order_parameters(thetas);
        series.push_back({s.time, total_mass(s), op.eta});
        write_macro_fields(cfg, s, frame++);
    };
    record();
    for (std::uint64_t k = 0; k < n_steps; ++k) {
        rho_step(s, dp, cfg.model.d, cfg.grid.dt);
        if (co) theta_step(s, *co, cfg.model.U0, cfg.model.U1, cfg.grid.dt);
        if ((k + 1) % static_cast<std::uint64_t>(cfg.grid.output_every) == 0 ||
            k + 1 == n_steps)
            record();
    }
    write_csv((fs::path(cfg.outputs) / "series.csv").string(), {"time", "mass", "eta_theta"},
              series);
}

} // namespace

int run_scenario(const ScenarioConfig& cfg) {
    std::error_code ec;
    fs::create_directories(cfg.outputs, ec);
    if (ec) throw IoError("cannot create output directory: " + cfg.outputs);
    write_manifest(cfg);

    if (cfg.mode == "coeffs") {
        run_coeffs(cfg);
        return 0;
    }
    if (cfg.mode == "ellipticity") {
        run_ellipticity(cfg);
        return 0;
    }
    if (cfg.mode == "pde") {
        run_pde(cfg);
        return 0;
    }
    if (cfg.mode == "ibm") {
        const IbmRunResult run = run_ibm(cfg.model, cfg.sim);
        write_ibm_outputs(cfg, run);
        return 0;
    }
    // validate
    const IbmRunResult run = run_ibm(cfg.model, cfg.sim);
    write_ibm_outputs(cfg, run);
    const ValidationReport rep = validate_equilibrium(run, cfg.model, cfg.validate);
    write_file((fs::path(cfg.outputs) / "validation.json").string(), to_json(rep));
    return rep.pass ? 0 : 4;
}

} // namespace fibrelax
