// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// fails. Criteria run on the production configuration (N=256, L=4, C0=1,
// default fraction schedule) and print the measured quantities.

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rotbec/expansion.hpp"
#include "rotbec/gpe.hpp"
#include "rotbec/rescale.hpp"
#include "rotbec/sweep.hpp"
#include "rotbec/townes.hpp"
#include "rotbec/vortex.hpp"

using namespace rotbec;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

} // namespace

int main() {
    const auto t_all = std::chrono::steady_clock::now();

    // ---- criterion 1: Townes constants ------------------------------------
    auto t0 = std::chrono::steady_clock::now();
    const RadialProfile q = shoot_townes();
    const TownesConstants tc = townes_constants(q);
    {
        const double dt = seconds_since(t0);
        const bool pass = std::abs(tc.q0 - 2.2062) <= 1e-3 &&
                          std::abs(tc.a_star - 11.7009) <= 1e-2 &&
                          tc.pohozaev_grad < 1e-6 && tc.pohozaev_quart < 1e-6 &&
                          dt < 5.0;
        report(1, pass,
               fmt("Q(0)=%.6f (2.2062±1e-3), a*=%.6f (11.7009±1e-2), pohozaev "
                   "%.1e/%.1e (<1e-6), %.2fs (<5s)",
                   tc.q0, tc.a_star, tc.pohozaev_grad, tc.pohozaev_quart, dt));
    }

    // ---- criterion 2: Gagliardo-Nirenberg ---------------------------------
    t0 = std::chrono::steady_clock::now();
    {
        const Grid2D g(12.0, 256);
        const double residual = gn_equality_check(q, g);
        bool inequality_ok = true;
        double worst_violation = 0.0;
        const Grid2D gr(6.0, 128);
        for (int trial = 0; trial < 100; ++trial) {
            const ComplexField2D u =
                oracle::random_band_limited(gr, 12, 5000 + trial, true);
            const auto [dx, dy] = gradient(u);
            const double grad2 = dx.mass() + dy.mass();
            const double mass = u.mass();
            double quart = 0.0;
            for (const cplx& v : u.samples()) quart += std::norm(v) * std::norm(v);
            quart *= gr.spacing() * gr.spacing();
            const double slack = 2.0 / tc.a_star * grad2 * mass + 1e-9 - quart;
            if (slack < 0.0) {
                inequality_ok = false;
                worst_violation = std::min(worst_violation, slack);
            }
        }
        const double dt = seconds_since(t0);
        const bool pass = residual < 1e-5 && inequality_ok && dt < 30.0;
        report(2, pass,
               fmt("equality residual %.2e (<1e-5), inequality on 100 random "
                   "fields %s, %.2fs (<30s)",
                   residual, inequality_ok ? "holds" : "VIOLATED", dt));
    }

    // ---- criterion 3: energy scaling sweeps --------------------------------
    t0 = std::chrono::steady_clock::now();
    const fs::path outdir = fs::temp_directory_path() / "rotbec_acceptance";
    fs::remove_all(outdir);
    std::vector<SweepRecord> rows0, rows1;
    PowerLawFit fit0{}, fit1{};
    {
        SweepConfig cfg;
        cfg.outdir = (outdir / "beta0").string();
        rows0 = run_sweep(cfg, q, tc);
        fit0 = fit_power_law(rows0, tc.a_star, cfg.beta);
        emit_report(rows0, tc, cfg.outdir);

        SweepConfig cfg1;
        cfg1.beta = 0.1;
        cfg1.outdir = (outdir / "beta01").string();
        rows1 = run_sweep(cfg1, q, tc);
        fit1 = fit_power_law(rows1, tc.a_star, cfg1.beta);
        emit_report(rows1, tc, cfg1.outdir);

        const double limit = 2.0 * tc.lambda * tc.lambda / tc.a_star;
        const double dt = seconds_since(t0);
        bool all_ok = true;
        for (const auto& r : rows0) all_ok = all_ok && r.status == "ok";
        for (const auto& r : rows1) all_ok = all_ok && r.status == "ok";
        const bool pass = all_ok && std::abs(fit0.slope - 0.5) <= 0.05 &&
                          std::abs(fit1.slope - 0.4) <= 0.05 &&
                          std::abs(fit0.prefactor_last - limit) / limit <= 0.10 &&
                          std::abs(fit1.prefactor_last - limit) / limit <= 0.10 &&
                          dt < 1800.0;
        report(3, pass,
               fmt("slope(b=0)=%.4f (0.5±0.05), slope(b=0.1)=%.4f (0.4±0.05), "
                   "prefactors %.4f/%.4f vs %.4f (±10%%), rows %s, %.0fs (<1800s)",
                   fit0.slope, fit1.slope, fit0.prefactor_last, fit1.prefactor_last,
                   limit, all_ok ? "all ok" : "with errors", dt));
    }

    // ---- criterion 4: blow-up diagnostics ----------------------------------
    {
        const SweepRecord& last = rows0.back();
        bool decreasing = true;
        for (std::size_t i = 1; i < rows0.size(); ++i)
            if (!(rows0[i].blowup.sup_dist < rows0[i - 1].blowup.sup_dist))
                decreasing = false;
        const bool pass = last.blowup.mu_eps2 >= 0.9 && last.blowup.mu_eps2 <= 1.1 &&
                          last.blowup.eps_ratio >= 0.9 &&
                          last.blowup.eps_ratio <= 1.1 && decreasing;
        report(4, pass,
               fmt("-mu*eps^2=%.4f ([0.9,1.1]), eps ratio=%.4f ([0.9,1.1]), "
                   "sup dist %s (%.4f -> %.4f)",
                   last.blowup.mu_eps2, last.blowup.eps_ratio,
                   decreasing ? "monotone decreasing" : "NOT MONOTONE",
                   rows0.front().blowup.sup_dist, last.blowup.sup_dist));
    }

    // ---- criterion 5: maximum-point law ------------------------------------
    {
        const SweepRecord& last = rows0.back();
        bool all_negative = true;
        for (const auto& r : rows0)
            if (!(r.blowup.maxpoint_ratio < 0.0)) all_negative = false;
        const double rel = std::abs(last.blowup.maxpoint_ratio - tc.c_tilde) /
                           std::abs(tc.c_tilde);
        // the diagnostic must also have settled: Cauchy within 20% over the
        // last three sweep points
        bool cauchy = true;
        const std::size_t n = rows0.size();
        for (std::size_t i = n - 2; i < n; ++i) {
            const double a = rows0[i - 1].blowup.maxpoint_ratio;
            const double b = rows0[i].blowup.maxpoint_ratio;
            if (std::abs(b - a) > 0.20 * std::abs(b)) cauchy = false;
        }
        const bool pass = rel <= 0.20 && all_negative && cauchy;
        report(5, pass,
               fmt("(|x_a|^2-1)/eps_bar^2 = %.4f vs C~=%.4f (within %.1f%%, "
                   "need 20%%), sign negative at every point: %s, settled: %s",
                   last.blowup.maxpoint_ratio, tc.c_tilde, 100.0 * rel,
                   all_negative ? "yes" : "NO", cauchy ? "yes" : "NO"));
    }

    // ---- criterion 6: correction problems ----------------------------------
    t0 = std::chrono::steady_clock::now();
    {
        const Grid2D eg = expansion_grid();
        const ExpansionSet set = solve_expansion_set(q, tc, eg, {1.0, 0.0});
        bool control_throws = false;
        try {
            solve_psi2(q, eg, {1.0, 0.0}, 0.9 * tc.c_tilde);
        } catch (const OrthogonalityError&) {
            control_throws = true;
        }
        // manufactured recovery on the unit-test box
        const Grid2D g(16.0, 256);
        const LinearizedOperator Lt(LinearizedOperator::Kind::Ltilde, q, g);
        ComplexField2D target(g);
        for (int ix = 0; ix < g.n(); ++ix)
            for (int iy = 0; iy < g.n(); ++iy) {
                const double x = g.coord(ix), y = g.coord(iy);
                target.at(ix, iy) =
                    std::exp(-(x * x + y * y) / 2.0) * (1.0 + 0.3 * std::cos(x));
            }
        for (const auto& k : Lt.kernel()) {
            const double c = std::real(inner(k, target));
            for (std::size_t i = 0; i < g.size(); ++i)
                target.data()[i] -= c * k.samples()[i];
        }
        const ComplexField2D sol = solve_kernel_projected(Lt, Lt.apply(target));
        double rec_err = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            rec_err = std::max(rec_err,
                               std::abs(sol.samples()[i] - target.samples()[i]));
        const double dt = seconds_since(t0);
        const bool pass = set.psi1_solvability < 1e-8 &&
                          set.psi2_solvability < 1e-8 && control_throws &&
                          std::abs(set.q_phi_inner) < 1e-10 && rec_err < 1e-7 &&
                          dt < 120.0;
        report(6, pass,
               fmt("solvability %.1e/%.1e (<1e-8), control %s, <Q,Phi>=%.1e "
                   "(<1e-10), manufactured %.1e (<1e-7), %.1fs (<120s)",
                   set.psi1_solvability, set.psi2_solvability,
                   control_throws ? "throws" : "SILENT", set.q_phi_inner, rec_err,
                   dt));
    }

    // ---- criterion 7: refined expansion ratios -----------------------------
    {
        const std::size_t n = rows0.size();
        const double r1_prev = rows0[n - 2].expansion.r1;
        const double r1_last = rows0[n - 1].expansion.r1;
        const double im_prev = rows0[n - 2].expansion.im_scale;
        const double im_last = rows0[n - 1].expansion.im_scale;
        const double im_ratio = im_last / im_prev;
        const bool pass = r1_last < r1_prev && im_ratio <= 3.0 && im_ratio >= 1.0 / 3.0;
        report(7, pass,
               fmt("r1 %.4f -> %.4f (%s), |Im nu| scale ratio %.3f (within "
                   "[1/3, 3])",
                   r1_prev, r1_last,
                   r1_last < r1_prev ? "decreasing" : "NOT DECREASING", im_ratio));
    }

    // ---- criterion 8: vortex-free region -----------------------------------
    {
        bool no_vortices_inner = true;
        int checked = 0;
        for (const auto& r : rows0) {
            char name[64];
            std::snprintf(name, sizeof(name), "field_%.4f.snap", r.frac);
            const fs::path snap = outdir / "beta0" / name;
            if (!fs::exists(snap)) continue;
            ++checked;
            const Snapshot s = read_snapshot(snap.string());
            const WindingMap m = winding_map(s.field);
            const Grid2D& g = s.field.grid();
            for (int ix = 0; ix < g.n(); ++ix)
                for (int iy = 0; iy < g.n(); ++iy) {
                    const double cx = g.coord(ix) + g.spacing() / 2;
                    const double cy = g.coord(iy) + g.spacing() / 2;
                    if (std::hypot(cx, cy) <= 2.0 && m.reliable(ix, iy) &&
                        m.at(ix, iy) != 0)
                        no_vortices_inner = false;
                }
        }
        bool radius_monotone = true;
        for (std::size_t i = 1; i < rows0.size(); ++i)
            if (rows0[i].vortex_free_radius < rows0[i - 1].vortex_free_radius - 1e-12)
                radius_monotone = false;
        const bool pass = no_vortices_inner && radius_monotone && checked == 4;
        report(8, pass,
               fmt("windings in |x|<=2: %s (%d snapshots), vortex-free radius "
                   "non-decreasing: %s (%.3f -> %.3f)",
                   no_vortices_inner ? "none" : "FOUND", checked,
                   radius_monotone ? "yes" : "NO", rows0.front().vortex_free_radius,
                   rows0.back().vortex_free_radius));
    }

    // ---- criterion 9: property suites ---------------------------------------
    {
        bool pass = true;
        std::string notes;

        // diamagnetic inequality along an instrumented flow
        {
            const Grid2D g(4.0, 128);
            const TrapSpec t = make_trap(1.0, 0.0, 0.9 * tc.a_star, tc.a_star);
            MinimizeOptions opts;
            opts.tol = 1e-6;
            opts.restarts = 0;
            opts.check_diamagnetic = true;
            const ComplexField2D init = init_trial(g, t, q, {1.0, 0.0}, 2.0);
            const MinimizerResult res = minimize(t, g, init, opts);
            const bool ok = res.converged && res.diamagnetic_margin >= -1e-9;
            pass = pass && ok;
            notes += fmt("diamagnetic margin %.1e%s", res.diamagnetic_margin,
                         ok ? "" : " FAIL");
        }
        // gradient vs finite differences
        {
            const Grid2D g(4.0, 64);
            TrapSpec t;
            t.a = 3.0;
            t.a_star = tc.a_star;
            t.omega = 1.3;
            ComplexField2D u = oracle::random_band_limited(g, 8, 41, false);
            const double n = std::sqrt(u.mass());
            for (auto& c : u.data()) c /= n;
            const ComplexField2D delta = oracle::random_band_limited(g, 8, 42, false);
            ComplexField2D graw = apply_hamiltonian(u, t);
            for (std::size_t i = 0; i < g.size(); ++i)
                graw.data()[i] -= t.a * std::norm(u.samples()[i]) * u.samples()[i];
            const double deriv = 2.0 * std::real(inner(graw, delta));
            auto shifted = [&](double s) {
                ComplexField2D v = u;
                for (std::size_t i = 0; i < g.size(); ++i)
                    v.data()[i] += s * delta.samples()[i];
                return energy(v, t).total;
            };
            const double fd = (shifted(1e-5) - shifted(-1e-5)) / 2e-5;
            const bool ok = std::abs(fd - deriv) / std::abs(deriv) < 1e-5;
            pass = pass && ok;
            notes += fmt(", grad-fd %.1e%s", std::abs(fd - deriv) / std::abs(deriv),
                         ok ? "" : " FAIL");
        }
        // gauge and rotation invariance of the energy
        {
            const Grid2D g(4.0, 64);
            TrapSpec t;
            t.a = 2.5;
            t.a_star = tc.a_star;
            t.omega = 0.9;
            ComplexField2D u = oracle::random_band_limited(g, 9, 77, false);
            for (int ix = 0; ix < g.n(); ++ix)
                for (int iy = 0; iy < g.n(); ++iy) {
                    const double x = g.coord(ix), y = g.coord(iy);
                    u.at(ix, iy) *= std::exp(-(x * x + y * y));
                }
            const double e0 = energy(u, t).total;
            ComplexField2D up = u;
            for (auto& c : up.data()) c *= std::polar(1.0, 1.234);
            const double e1 = energy(up, t).total;
            const double e2 = energy(rotate90(u), t).total;
            const bool ok = std::abs(e1 - e0) < 1e-12 * std::abs(e0) &&
                            std::abs(e2 - e0) < 1e-11 * std::abs(e0);
            pass = pass && ok;
            notes += fmt(", gauge/rot %.1e/%.1e%s", std::abs(e1 - e0),
                         std::abs(e2 - e0), ok ? "" : " FAIL");
        }
        // winding gauge invariance and additivity; the tight envelope keeps
        // the periodic seam below the dead-modulus floor, away from the
        // antipodal phase steps where the principal value is ill-posed
        {
            const Grid2D g(4.0, 64);
            // zero kept off the grid lines: an edge through the zero has an
            // exactly antipodal phase step, which no principal value settles
            ComplexField2D u(g);
            for (int ix = 0; ix < g.n(); ++ix)
                for (int iy = 0; iy < g.n(); ++iy) {
                    const double x = g.coord(ix), y = g.coord(iy);
                    u.at(ix, iy) = cplx(x - 0.51, y + 0.27) *
                                   std::exp(-3.0 * (x * x + y * y));
                }
            const WindingMap m0 = winding_map(u);
            ComplexField2D v = u;
            for (auto& c : v.data()) c *= std::polar(1.0, 2.7);
            const bool gauge_ok = winding_map(v).winding == m0.winding;
            int inside = 0;
            bool clean = true;
            for (int i = 20; i < 44; ++i)
                for (int j = 20; j < 44; ++j) {
                    inside += m0.at(i, j);
                    if (!m0.reliable(i, j)) clean = false;
                }
            const bool add_ok =
                clean && loop_winding(u, 20, 20, 24, 24) == inside;
            pass = pass && gauge_ok && add_ok;
            notes += fmt(", winding gauge %s additivity %s", gauge_ok ? "ok" : "FAIL",
                         add_ok ? "ok" : "FAIL");
        }
        // deterministic reruns, byte identical
        {
            SweepConfig cfg;
            cfg.fractions = {0.90};
            cfg.grid_n = 64;
            cfg.tol = 1e-5;
            cfg.write_snapshots = false;
            const auto a = run_sweep(cfg, q, tc);
            const auto b = run_sweep(cfg, q, tc);
            const bool ok = a.size() == b.size() && !a.empty() &&
                            sweep_csv_row(a[0]) == sweep_csv_row(b[0]);
            pass = pass && ok;
            notes += fmt(", determinism %s", ok ? "byte-identical" : "FAIL");
        }
        report(9, pass, notes);
    }

    std::printf("acceptance total: %d failure(s), %.0fs\n", g_failures,
                seconds_since(t_all));
    return g_failures == 0 ? 0 : 1;
}
