// rotbec: ground states of attractive 2D Bose gases in a rotating
// quadratic+quartic trap, with blow-up, expansion and vortex diagnostics.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "rotbec/expansion.hpp"
#include "rotbec/gpe.hpp"
#include "rotbec/rescale.hpp"
#include "rotbec/sweep.hpp"
#include "rotbec/townes.hpp"
#include "rotbec/vortex.hpp"

namespace fs = std::filesystem;
using namespace rotbec;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

RadialProfile solve_profile(double rmax, double tol) {
    return shoot_townes(rmax, tol);
}

int cmd_townes(double rmax, double tol, const std::string& out) {
    const RadialProfile q = solve_profile(rmax, tol);
    const TownesConstants tc = townes_constants(q);
    std::printf("q0 = %.12f\n", tc.q0);
    std::printf("a_star = %.12f\n", tc.a_star);
    std::printf("M2 = %.12f\n", tc.m2);
    std::printf("lambda = %.12f\n", tc.lambda);
    std::printf("C_tilde = %.12f\n", tc.c_tilde);
    std::printf("pohozaev_grad = %.3e\n", tc.pohozaev_grad);
    std::printf("pohozaev_quart = %.3e\n", tc.pohozaev_quart);
    if (!out.empty()) write_constants(out, tc);
    return kExitOk;
}

void print_warnings(const SweepConfig& cfg) {
    for (const std::string& w : cfg.warnings)
        std::fprintf(stderr, "[rotbec] warning: %s\n", w.c_str());
}

int cmd_minimize(const std::string& config, double frac, const std::string& outdir) {
    SweepConfig cfg = config.empty() ? SweepConfig{} : parse_config(config);
    if (config.empty()) validate_config(cfg);
    print_warnings(cfg);
    const RadialProfile q = solve_profile(24.0, 1e-12);
    const TownesConstants tc = townes_constants(q);
    const TrapSpec trap = make_trap(cfg.c0, cfg.beta, frac * tc.a_star, tc.a_star);
    const Grid2D grid(cfg.grid_extent, cfg.grid_n);

    MinimizeOptions opts;
    opts.tol = cfg.tol;
    opts.max_iter = cfg.max_iter;
    opts.seed = cfg.seed;
    opts.restarts = cfg.restarts;
    opts.quiet = false;

    double tau = tc.lambda * std::sqrt(cfg.c0) *
                 std::pow(tc.a_star - trap.a, -(1.0 + 2.0 * trap.beta) / 4.0);
    tau = std::min(tau, 0.5 / grid.spacing());
    const ComplexField2D init = init_trial(grid, trap, q, {1.0, 0.0}, tau);
    const MinimizerResult res = minimize(trap, grid, init, opts);

    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec) throw IoError("cannot create output directory: " + outdir);
    write_snapshot((fs::path(outdir) / "field.snap").string(), res.field, trap.a,
                   trap.omega);
    write_run_record((fs::path(outdir) / "record.txt").string(), res, trap);
    std::printf("I = %.10f\nmu = %.10f\niterations = %d\nresidual = %.3e\n",
                res.energy.total, res.mu, res.iterations, res.residual_norm);
    std::printf("x_a = (%.6f, %.6f)  |x_a| = %.6f\n", res.x_a[0], res.x_a[1],
                std::hypot(res.x_a[0], res.x_a[1]));
    std::printf("eps_a = %.6f  eps_bar = %.6f\n", res.eps_a,
                res.eps_bar.value_or(std::nan("")));
    return res.converged ? kExitOk : kExitNumerical;
}

int cmd_sweep(const std::string& config) {
    SweepConfig cfg = parse_config(config);
    print_warnings(cfg);
    const RadialProfile q = solve_profile(24.0, 1e-12);
    const TownesConstants tc = townes_constants(q);
    std::error_code ec;
    fs::create_directories(cfg.outdir, ec);
    if (ec) throw IoError("cannot create output directory: " + cfg.outdir);
    write_constants((fs::path(cfg.outdir) / "townes_constants.txt").string(), tc);
    const auto rows = run_sweep(cfg, q, tc);
    emit_report(rows, tc, cfg.outdir);
    int bad = 0;
    for (const auto& r : rows) {
        std::printf("frac=%.4f status=%s I=%.8f mu=%.6f\n", r.frac, r.status.c_str(),
                    r.blowup.energy, r.blowup.mu);
        if (r.status != "ok") ++bad;
    }
    try {
        const PowerLawFit fit = fit_power_law(rows, tc.a_star, cfg.beta);
        std::printf("slope = %.6f (theory %.6f)\n", fit.slope, 0.5 - cfg.beta);
        std::printf("prefactor_last = %.6f (limit %.6f)\n", fit.prefactor_last,
                    2.0 * cfg.c0 * tc.lambda * tc.lambda / tc.a_star);
        std::printf("r_squared = %.8f\n", fit.r_squared);
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "[rotbec] power-law fit skipped: %s\n", e.what());
    }
    std::printf("wrote %s/sweep.csv\n", cfg.outdir.c_str());
    return bad == 0 ? kExitOk : kExitNumerical;
}

int cmd_expand(double x01, double x02, const std::string& outdir) {
    const double n = std::hypot(x01, x02);
    if (n == 0.0) throw ConfigError("expand: x0 must be nonzero");
    const std::array<double, 2> x0{x01 / n, x02 / n};
    const RadialProfile q = solve_profile(24.0, 1e-12);
    const TownesConstants tc = townes_constants(q);
    const Grid2D grid = expansion_grid();
    const ExpansionSet set = solve_expansion_set(q, tc, grid, x0);

    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec) throw IoError("cannot create output directory: " + outdir);
    write_snapshot((fs::path(outdir) / "psi1.snap").string(), set.psi1, 0.0, 0.0);
    write_snapshot((fs::path(outdir) / "psi2.snap").string(), set.psi2, 0.0, 0.0);
    write_snapshot((fs::path(outdir) / "phi_i.snap").string(), set.phi_i, 0.0, 0.0);
    write_residual_report((fs::path(outdir) / "expansion_report.txt").string(), set,
                          nullptr);
    std::printf("psi1_solvability = %.3e\n", set.psi1_solvability);
    std::printf("psi2_solvability = %.3e\n", set.psi2_solvability);
    std::printf("phi_solvability = %.3e\n", set.phi_solvability);
    std::printf("grad_psi1_origin = %.3e\n", set.grad_psi1_origin);
    std::printf("grad_psi2_origin = %.3e\n", set.grad_psi2_origin);
    std::printf("q_phi_inner = %.3e\n", set.q_phi_inner);
    std::printf("wrote psi1/psi2/phi_i snapshots to %s\n", outdir.c_str());
    return kExitOk;
}

int cmd_vortex(const std::string& snapshot, double threshold) {
    const Snapshot snap = read_snapshot(snapshot);
    const VortexReport rep = scan_vortices(snap.field, threshold);
    std::printf("n_vortices = %zu\n", rep.vortices.size());
    for (const Vortex& v : rep.vortices)
        std::printf("vortex at (%.5f, %.5f) winding %+d\n", v.x, v.y, v.winding);
    std::printf("vortex_free_radius = %.6f (scan cap %.6f)\n", rep.vortex_free_radius,
                rep.scan_radius);
    std::printf("min_modulus_ratio = %.3e (threshold %.1e)\n", rep.min_modulus_ratio,
                rep.threshold);
    return kExitOk;
}

// Rebuild the plot-data files from a stored sweep.csv.
int cmd_report(const std::string& csv, const std::string& outdir) {
    std::ifstream f(csv);
    if (!f) throw IoError("cannot open csv: " + csv);
    std::string header;
    if (!std::getline(f, header) || header != sweep_csv_header())
        throw IoError("unrecognized sweep.csv header in " + csv);
    std::vector<SweepRecord> rows;
    double a_star_guess = 0.0;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 30) throw IoError("malformed sweep.csv row in " + csv);
        SweepRecord r;
        r.frac = std::stod(cells[0]);
        // rows whose flow converged carry either a clean status or a
        // post-minimize stage error
        r.minimized = cells[5] == "ok" || cells[5].rfind("blowup:", 0) == 0 ||
                      cells[5].rfind("vortex:", 0) == 0 ||
                      cells[5].rfind("expansion:", 0) == 0;
        r.blowup.a = std::stod(cells[1]);
        r.blowup.beta = std::stod(cells[2]);
        r.blowup.c0 = std::stod(cells[3]);
        r.blowup.omega = std::stod(cells[4]);
        r.status = cells[5];
        r.blowup.energy = std::stod(cells[6]);
        r.energy.covariant_kinetic = std::stod(cells[7]);
        r.energy.trap = std::stod(cells[8]);
        r.energy.interaction = std::stod(cells[9]);
        r.blowup.mu = std::stod(cells[10]);
        r.iterations = std::stoi(cells[11]);
        r.residual = std::stod(cells[12]);
        r.blowup.eps_a = std::stod(cells[13]);
        r.blowup.eps_bar = std::stod(cells[14]);
        r.blowup.x_a = {std::stod(cells[15]), 0.0};
        r.blowup.theta = std::stod(cells[16]);
        r.blowup.sup_dist = std::stod(cells[17]);
        r.blowup.l2_dist = std::stod(cells[18]);
        r.blowup.eps_ratio = std::stod(cells[19]);
        r.blowup.mu_eps2 = std::stod(cells[20]);
        r.blowup.maxpoint_ratio = std::stod(cells[21]);
        r.n_vortices = std::stoi(cells[22]);
        r.vortex_free_radius = std::stod(cells[23]);
        r.min_modulus_ratio = std::stod(cells[24]);
        r.expansion.r0 = std::stod(cells[25]);
        r.expansion.r1 = std::stod(cells[26]);
        r.expansion.r2 = std::stod(cells[27]);
        r.expansion.r_im = std::stod(cells[28]);
        r.expansion.im_scale = std::stod(cells[29]);
        if (r.frac > 0.0) a_star_guess = r.blowup.a / r.frac;
        rows.push_back(std::move(r));
    }
    TownesConstants tc{};
    tc.a_star = a_star_guess;
    emit_report(rows, tc, outdir);
    std::printf("re-emitted %zu rows to %s\n", rows.size(), outdir.c_str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rotating attractive Bose gas ground-state laboratory"};
    app.require_subcommand(1);

    auto* t = app.add_subcommand("townes", "solve the radial ground profile, print constants");
    double rmax = 24.0, tol = 1e-12;
    std::string tout;
    t->add_option("--rmax", rmax, "radial cutoff");
    t->add_option("--tol", tol, "bisection tolerance");
    t->add_option("--out", tout, "write key=value constants file");

    auto* m = app.add_subcommand("minimize", "minimize one trap instance");
    std::string mconfig, moutdir = "out";
    double mfrac = 0.9;
    m->add_option("--config", mconfig, "key=value config file");
    m->add_option("--frac", mfrac, "a / a_star")->check(CLI::Range(0.0, 1.0));
    m->add_option("--out", moutdir, "output directory");

    auto* s = app.add_subcommand("sweep", "run the full a -> a* pipeline");
    std::string sconfig;
    s->add_option("--config", sconfig, "key=value config file")->required();

    auto* e = app.add_subcommand("expand", "solve the correction problems");
    double x01 = 1.0, x02 = 0.0;
    std::string eoutdir = "out";
    e->add_option("--x0x", x01, "blow-up direction, x component");
    e->add_option("--x0y", x02, "blow-up direction, y component");
    e->add_option("--out", eoutdir, "output directory");

    auto* v = app.add_subcommand("vortex", "scan a field snapshot for vortices");
    std::string vsnap;
    double vthresh = 1e-6;
    v->add_option("--snapshot", vsnap, "field snapshot path")->required();
    v->add_option("--threshold", vthresh, "relative modulus threshold");

    auto* r = app.add_subcommand("report", "re-emit plot data from a sweep.csv");
    std::string rcsv, routdir = "out";
    r->add_option("--csv", rcsv, "stored sweep.csv")->required();
    r->add_option("--out", routdir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& ex) {
        const int rc = app.exit(ex);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (t->parsed()) return cmd_townes(rmax, tol, tout);
        if (m->parsed()) return cmd_minimize(mconfig, mfrac, moutdir);
        if (s->parsed()) return cmd_sweep(sconfig);
        if (e->parsed()) return cmd_expand(x01, x02, eoutdir);
        if (v->parsed()) return cmd_vortex(vsnap, vthresh);
        if (r->parsed()) return cmd_report(rcsv, routdir);
    } catch (const ConfigError& ex) {
        std::fprintf(stderr, "config error: %s\n", ex.what());
        return kExitConfig;
    } catch (const IoError& ex) {
        std::fprintf(stderr, "i/o error: %s\n", ex.what());
        return kExitIo;
    } catch (const NumericalError& ex) {
        std::fprintf(stderr, "numerical error: %s\n", ex.what());
        return kExitNumerical;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return kExitNumerical;
    }
    return kExitOk;
}
