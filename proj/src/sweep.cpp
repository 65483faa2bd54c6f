#include "rotbec/sweep.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace rotbec {

namespace {

std::vector<double> parse_fraction_list(const std::string& s) {
    std::vector<double> out;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stod(item));
    return out;
}

bool parse_bool(const std::string& v) {
    if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "off" || v == "no") return false;
    throw ConfigError("config: expected boolean, got '" + v + "'");
}

} // namespace

SweepConfig parse_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config file: " + path);
    SweepConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            bool blank = true;
            for (char c : line)
                if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
            if (blank) continue;
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected key = value");
        }
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        try {
            if (key == "c0") cfg.c0 = std::stod(val);
            else if (key == "beta") cfg.beta = std::stod(val);
            else if (key == "fractions") cfg.fractions = parse_fraction_list(val);
            else if (key == "grid.L") cfg.grid_extent = std::stod(val);
            else if (key == "grid.N") cfg.grid_n = std::stoi(val);
            else if (key == "tol") cfg.tol = std::stod(val);
            else if (key == "max_iter") cfg.max_iter = std::stoi(val);
            else if (key == "outdir") cfg.outdir = val;
            else if (key == "seed") cfg.seed = std::stoull(val);
            else if (key == "warm_start") cfg.warm_start = parse_bool(val);
            else if (key == "restarts") cfg.restarts = std::stoi(val);
            else if (key == "vortex.threshold") cfg.vortex_threshold = std::stod(val);
            else if (key == "vortex.scan_radius") cfg.vortex_scan_radius = std::stod(val);
            else if (key == "snapshots") cfg.write_snapshots = parse_bool(val);
            else throw ConfigError("config: unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": bad value for " + key);
        }
    }
    validate_config(cfg);
    return cfg;
}

void validate_config(SweepConfig& cfg) {
    if (!(cfg.c0 > 0.0)) throw ConfigError("config: c0 must be positive");
    if (!(cfg.beta >= 0.0 && cfg.beta < 0.5))
        throw ConfigError("config: beta must lie in [0, 1/2)");
    for (double frac : cfg.fractions)
        if (!(frac > 0.0 && frac < 1.0))
            throw ConfigError("config: fractions must lie in (0,1)");
    for (std::size_t i = 1; i < cfg.fractions.size(); ++i)
        if (!(cfg.fractions[i] > cfg.fractions[i - 1]))
            throw ConfigError("config: fractions must be strictly increasing");
    if (cfg.beta >= 1.0 / 6.0)
        cfg.warnings.push_back(
            "beta >= 1/6: the vortex-free-region guarantee only covers beta < 1/6");
    if (cfg.tol <= 0.0) throw ConfigError("config: tol must be positive");
}

std::vector<SweepRecord> run_sweep(const SweepConfig& cfg, const RadialProfile& q,
                                   const TownesConstants& tc) {
    namespace fs = std::filesystem;
    if (cfg.write_snapshots) {
        std::error_code ec;
        fs::create_directories(cfg.outdir, ec);
        if (ec) throw IoError("cannot create output directory: " + cfg.outdir);
    }
    const Grid2D grid(cfg.grid_extent, cfg.grid_n);
    std::vector<SweepRecord> rows;
    std::optional<ComplexField2D> warm;

    for (std::size_t i = 0; i < cfg.fractions.size(); ++i) {
        const double frac = cfg.fractions[i];
        SweepRecord row;
        row.frac = frac;
        try {
            const TrapSpec trap = make_trap(cfg.c0, cfg.beta, frac * tc.a_star,
                                            tc.a_star);
            row.blowup.a = trap.a;
            row.blowup.beta = trap.beta;
            row.blowup.c0 = trap.c0;
            row.blowup.omega = trap.omega;

            MinimizeOptions opts;
            opts.tol = cfg.tol;
            opts.max_iter = cfg.max_iter;
            opts.seed = cfg.seed + i;
            opts.restarts = (cfg.warm_start && warm.has_value()) ? 0 : cfg.restarts;

            double tau = tc.lambda * std::sqrt(cfg.c0) *
                         std::pow(tc.a_star - trap.a, -(1.0 + 2.0 * trap.beta) / 4.0);
            tau = std::min(tau, 0.5 / grid.spacing());
            const ComplexField2D init =
                (cfg.warm_start && warm.has_value())
                    ? *warm
                    : init_trial(grid, trap, q, {1.0, 0.0}, tau);

            MinimizerResult res = minimize(trap, grid, init, opts);
            if (!res.converged) row.status = "unconverged";
            row.minimized = res.converged;
            row.energy = res.energy;
            row.iterations = res.iterations;
            row.residual = res.residual_norm;
            row.boundary_ratio = res.boundary_ratio;
            row.blowup.energy = res.energy.total;
            row.blowup.mu = res.mu;
            row.blowup.x_a = res.x_a;
            row.blowup.eps_a = res.eps_a;

            // Later stages fail independently; the first error is recorded and
            // whatever was computed stays in the row.
            auto note = [&row](const std::string& what) {
                if (row.status == "ok") row.status = what;
            };
            try {
                row.blowup = blowup_record(res, q, tc, trap);
            } catch (const std::exception& e) {
                note(std::string("blowup: ") + e.what());
            }
            try {
                const VortexReport vr = scan_vortices(
                    res.field, cfg.vortex_threshold, cfg.vortex_scan_radius);
                row.n_vortices = static_cast<int>(vr.vortices.size());
                row.vortex_free_radius = vr.vortex_free_radius;
                row.min_modulus_ratio = vr.min_modulus_ratio;
            } catch (const std::exception& e) {
                note(std::string("vortex: ") + e.what());
            }
            try {
                const double ra = std::hypot(res.x_a[0], res.x_a[1]);
                const std::array<double, 2> x0 = {res.x_a[0] / ra, res.x_a[1] / ra};
                const Grid2D cg = comparison_grid();
                const ExpansionSet set = solve_expansion_set(q, tc, expansion_grid(), x0);
                const double eps_bar = std::sqrt(-1.0 / res.mu);
                const ComplexField2D nu_raw =
                    rescale(res.field, res.x_a, eps_bar, trap.omega,
                            eps_bar * std::sqrt(trap.a), cg);
                const ComplexField2D qg = lift_to_grid(q, cg, {0.0, 0.0});
                const AlignedField nu = align_phase(nu_raw, qg);
                row.expansion =
                    expansion_residuals(nu.field, q, set, trap.omega, eps_bar);
            } catch (const std::exception& e) {
                note(std::string("expansion: ") + e.what());
            }

            if (cfg.write_snapshots) {
                char name[64];
                std::snprintf(name, sizeof(name), "field_%.4f.snap", frac);
                write_snapshot((fs::path(cfg.outdir) / name).string(), res.field,
                               trap.a, trap.omega);
            }
            warm = std::move(res.field);
        } catch (const IoError&) {
            throw; // unwritable outputs abort the sweep
        } catch (const std::exception& e) {
            row.status = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

PowerLawFit fit_power_law(const std::vector<SweepRecord>& records, double a_star,
                          double beta) {
    std::vector<double> xs, ys;
    for (const SweepRecord& r : records)
        if (r.minimized && r.blowup.energy > 0.0) {
            xs.push_back(std::log(a_star - r.blowup.a));
            ys.push_back(std::log(r.blowup.energy));
        }
    if (xs.size() < 3)
        throw NumericalError("fit_power_law: need at least 3 converged records");
    const std::size_t n = xs.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
        syy += ys[i] * ys[i];
    }
    const double dn = static_cast<double>(n);
    const double denom = dn * sxx - sx * sx;
    PowerLawFit fit;
    fit.n_points = static_cast<int>(n);
    fit.slope = (dn * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / dn;
    double ss_res = 0.0, ss_tot = 0.0;
    const double ymean = sy / dn;
    for (std::size_t i = 0; i < n; ++i) {
        const double fit_y = fit.slope * xs[i] + fit.intercept;
        ss_res += (ys[i] - fit_y) * (ys[i] - fit_y);
        ss_tot += (ys[i] - ymean) * (ys[i] - ymean);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;

    // Prefactor from the record closest to a*.
    const SweepRecord* last = nullptr;
    for (const SweepRecord& r : records)
        if (r.minimized) last = &r;
    if (last)
        fit.prefactor_last = last->blowup.energy /
                             std::pow(a_star - last->blowup.a, 0.5 - beta);
    return fit;
}

std::string sweep_csv_header() {
    return "frac,a,beta,C0,Omega,status,I,cov_kinetic,trap,interaction,mu,"
           "iterations,residual,eps_a,eps_bar,x_a_norm,theta,sup_dist,l2_dist,"
           "eps_ratio,mu_eps2,maxpoint_ratio,n_vortices,vortex_free_radius,"
           "min_modulus_ratio,exp_r0,exp_r1,exp_r2,exp_im,im_scale";
}

std::string sweep_csv_row(const SweepRecord& r) {
    std::string status = r.status;
    for (char& c : status)
        if (c == ',' || c == '\n') c = ';';
    char buf[1024];
    std::snprintf(
        buf, sizeof(buf),
        "%.17g,%.17g,%.17g,%.17g,%.17g,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%d,"
        "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%.17g,"
        "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g",
        r.frac, r.blowup.a, r.blowup.beta, r.blowup.c0, r.blowup.omega,
        status.c_str(), r.blowup.energy, r.energy.covariant_kinetic, r.energy.trap,
        r.energy.interaction, r.blowup.mu, r.iterations, r.residual, r.blowup.eps_a,
        r.blowup.eps_bar, std::hypot(r.blowup.x_a[0], r.blowup.x_a[1]),
        r.blowup.theta, r.blowup.sup_dist, r.blowup.l2_dist, r.blowup.eps_ratio,
        r.blowup.mu_eps2, r.blowup.maxpoint_ratio, r.n_vortices,
        r.vortex_free_radius, r.min_modulus_ratio, r.expansion.r0, r.expansion.r1,
        r.expansion.r2, r.expansion.r_im, r.expansion.im_scale);
    return buf;
}

namespace {

void write_xy(const std::string& path, const std::vector<double>& x,
              const std::vector<double>& y) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot open plot-data file for writing: " + path);
    for (std::size_t i = 0; i < x.size(); ++i)
        std::fprintf(f, "%.17g %.17g\n", x[i], y[i]);
    std::fclose(f);
}

} // namespace

void emit_report(const std::vector<SweepRecord>& records, const TownesConstants& tc,
                 const std::string& outdir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec) throw IoError("cannot create output directory: " + outdir);

    const fs::path dir(outdir);
    std::FILE* f = std::fopen((dir / "sweep.csv").string().c_str(), "w");
    if (!f) throw IoError("cannot open sweep.csv for writing in " + outdir);
    std::fprintf(f, "%s\n", sweep_csv_header().c_str());
    for (const SweepRecord& r : records)
        std::fprintf(f, "%s\n", sweep_csv_row(r).c_str());
    std::fclose(f);

    std::vector<double> gap, energy, a, dist, maxpt, vradius;
    for (const SweepRecord& r : records) {
        if (!r.minimized) continue;
        gap.push_back(tc.a_star - r.blowup.a);
        energy.push_back(r.blowup.energy);
        a.push_back(r.blowup.a);
        dist.push_back(r.blowup.sup_dist);
        maxpt.push_back(r.blowup.maxpoint_ratio);
        vradius.push_back(r.vortex_free_radius);
    }
    write_xy((dir / "energy_vs_gap.dat").string(), gap, energy);
    write_xy((dir / "profile_dist_vs_a.dat").string(), a, dist);
    write_xy((dir / "maxpoint_vs_a.dat").string(), a, maxpt);
    write_xy((dir / "vortex_radius_vs_a.dat").string(), a, vradius);
}

} // namespace rotbec
