#include "rotbec/gpe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "rotbec/rescale.hpp"

namespace rotbec {

TrapSpec make_trap(double c0, double beta, double a, double a_star) {
    if (!(c0 > 0.0)) throw ConfigError("TrapSpec: C0 must be positive");
    if (!(beta >= 0.0 && beta < 0.5)) throw ConfigError("TrapSpec: beta must lie in [0, 1/2)");
    if (!(a_star > 0.0)) throw ConfigError("TrapSpec: a_star must be positive");
    if (!(a >= 0.0)) throw ConfigError("TrapSpec: a must be non-negative");
    if (!(a < a_star))
        throw ConfigError("TrapSpec: a >= a_star, no minimizer exists");
    TrapSpec t;
    t.c0 = c0;
    t.beta = beta;
    t.a = a;
    t.a_star = a_star;
    t.omega = c0 * std::pow(a_star - a, -beta);
    return t;
}

namespace {

// One spectral pass shared by the energy and the gradient: from a single
// forward transform we get Lap u, d1 u, d2 u and every integral of interest.
struct FlowEval {
    EnergyBreakdown e;
    ComplexField2D grad_raw; // Hu - a|u|^2 u
    double mu = 0.0;         // Rayleigh quotient (unit mass assumed)
};

FlowEval full_eval(const ComplexField2D& u, const TrapSpec& trap, bool want_grad) {
    const Grid2D& g = u.grid();
    const int N = g.n();
    const double om = trap.omega;
    const double h2 = g.spacing() * g.spacing();

    std::vector<cplx> hat;
    spectral::forward(g, u.samples(), hat);
    std::vector<cplx> hlap(g.size()), hdx(g.size()), hdy(g.size());
    for (int ix = 0; ix < N; ++ix) {
        const double kx = g.wavenumber(ix);
        const double kxd = (ix == N / 2) ? 0.0 : kx;
        for (int iy = 0; iy < N; ++iy) {
            const double ky = g.wavenumber(iy);
            const double kyd = (iy == N / 2) ? 0.0 : ky;
            const std::size_t id = g.idx(ix, iy);
            hlap[id] = -(kx * kx + ky * ky) * hat[id];
            hdx[id] = cplx(0.0, kxd) * hat[id];
            hdy[id] = cplx(0.0, kyd) * hat[id];
        }
    }
    std::vector<cplx> lap, dx, dy;
    spectral::inverse(g, hlap, lap);
    spectral::inverse(g, hdx, dx);
    spectral::inverse(g, hdy, dy);

    long double grad2 = 0.0, jterm = 0.0, moment2 = 0.0, trap_int = 0.0,
                quart = 0.0;
    ComplexField2D graw(g);
    for (int ix = 0; ix < N; ++ix) {
        const double x = g.coord(ix);
        for (int iy = 0; iy < N; ++iy) {
            const double y = g.coord(iy);
            const std::size_t id = g.idx(ix, iy);
            const cplx uv = u.samples()[id];
            const double r2 = x * x + y * y;
            const double w2 = r2 - 1.0;
            const double n2 = std::norm(uv);
            grad2 += std::norm(dx[id]) + std::norm(dy[id]);
            // x_perp = (-y, x)
            jterm += -y * std::imag(std::conj(uv) * dx[id]) +
                     x * std::imag(std::conj(uv) * dy[id]);
            moment2 += r2 * n2;
            trap_int += w2 * w2 * n2;
            quart += n2 * n2;
            if (want_grad) {
                const cplx xp_grad = -y * dx[id] + x * dy[id];
                graw.at(ix, iy) = -lap[id] + cplx(0.0, 2.0 * om) * xp_grad +
                                  (om * om * r2 + om * om / 8.0 * w2 * w2 -
                                   trap.a * n2) *
                                      uv;
            }
        }
    }
    FlowEval out{EnergyBreakdown{}, std::move(graw), 0.0};
    out.e.covariant_kinetic = static_cast<double>(
        h2 * (grad2 - 2.0L * om * jterm + om * om * moment2));
    out.e.trap = static_cast<double>(h2 * om * om / 8.0L * trap_int);
    out.e.interaction = static_cast<double>(-trap.a / 2.0L * h2 * quart);
    out.e.total = out.e.covariant_kinetic + out.e.trap + out.e.interaction;
    // <u, Hu - a|u|^2 u> = E + interaction (the quartic counts twice in H).
    out.mu = out.e.total + out.e.interaction;
    return out;
}

} // namespace

EnergyBreakdown energy(const ComplexField2D& u, const TrapSpec& trap) {
    if (!u.all_finite()) throw NumericalError("energy: field has non-finite samples");
    return full_eval(u, trap, false).e;
}

ComplexField2D apply_hamiltonian(const ComplexField2D& u, const TrapSpec& trap) {
    TrapSpec lin = trap;
    lin.a = 0.0;
    return full_eval(u, lin, true).grad_raw;
}

ComplexField2D el_residual(const ComplexField2D& u, const TrapSpec& trap, double mu) {
    FlowEval ev = full_eval(u, trap, true);
    ComplexField2D r = std::move(ev.grad_raw);
    const std::size_t n = r.samples().size();
    for (std::size_t i = 0; i < n; ++i) r.data()[i] -= mu * u.samples()[i];
    return r;
}

double chemical_potential(const ComplexField2D& u, const TrapSpec& trap,
                          double energy_total) {
    double quart = 0.0;
    for (const cplx& v : u.samples()) quart += std::norm(v) * std::norm(v);
    quart *= u.grid().spacing() * u.grid().spacing();
    return energy_total - trap.a / 2.0 * quart;
}

double rayleigh_mu(const ComplexField2D& u, const TrapSpec& trap) {
    const FlowEval ev = full_eval(u, trap, true);
    double s = 0.0;
    const std::size_t n = u.samples().size();
    for (std::size_t i = 0; i < n; ++i)
        s += std::real(std::conj(u.samples()[i]) * ev.grad_raw.samples()[i]);
    const double h2 = u.grid().spacing() * u.grid().spacing();
    return h2 * s / u.mass();
}

double modulus_grad_norm2(const ComplexField2D& u) {
    const Grid2D& g = u.grid();
    ComplexField2D mod(g);
    for (std::size_t i = 0; i < g.size(); ++i)
        mod.data()[i] = cplx(std::abs(u.samples()[i]), 0.0);
    const auto [mx, my] = gradient(mod);
    return mx.mass() + my.mass();
}

ComplexField2D init_trial(const Grid2D& grid, const TrapSpec& trap,
                          const RadialProfile& q, std::array<double, 2> y0,
                          double tau) {
    if (std::abs(std::hypot(y0[0], y0[1]) - 1.0) > 1e-12)
        throw ConfigError("init_trial: y0 must be a unit vector");
    if (!(tau > 0.0)) throw ConfigError("init_trial: tau must be positive");
    if (tau * grid.spacing() > 0.5)
        throw ResolutionError("init_trial: tau too large for this grid (tau*h > 0.5)");
    const int N = grid.n();
    ComplexField2D u(grid);
    for (int ix = 0; ix < N; ++ix) {
        const double x = grid.coord(ix);
        for (int iy = 0; iy < N; ++iy) {
            const double y = grid.coord(iy);
            const double rr = std::hypot(x - y0[0], y - y0[1]);
            if (rr >= 2.0) continue;
            // smooth cutoff: 1 on rr<=1, 0 on rr>=2
            double phi = 1.0;
            if (rr > 1.0) {
                const double t = rr - 1.0;
                phi = 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
            }
            const double s = x * (-y0[1]) + y * y0[0]; // x . y0_perp
            const double amp = tau * q.value(tau * rr) * phi;
            u.at(ix, iy) = std::polar(amp, trap.omega * s);
        }
    }
    const double m = u.mass();
    if (!(m > 0.0)) throw NumericalError("init_trial: zero-mass trial state");
    const double scale = 1.0 / std::sqrt(m);
    for (cplx& v : u.data()) v *= scale;
    return u;
}

namespace {

ComplexField2D normalized(ComplexField2D u) {
    const double m = u.mass();
    if (!(m > 0.0)) throw NumericalError("normalize: zero mass");
    const double s = 1.0 / std::sqrt(m);
    for (cplx& v : u.data()) v *= s;
    return u;
}

struct FlowOutcome {
    ComplexField2D u;
    EnergyBreakdown e;
    double mu;
    int iterations;
    double residual;
    bool converged;
    double diamagnetic_margin;
};

FlowOutcome run_flow(const TrapSpec& trap, ComplexField2D u,
                     const MinimizeOptions& opts) {
    const Grid2D& g = u.grid();
    u = normalized(std::move(u));
    FlowEval ev = full_eval(u, trap, true);
    double dt = opts.dt_init;
    double diam_margin = std::numeric_limits<double>::infinity();
    const double h2 = g.spacing() * g.spacing();
    const int N = g.n();

    // Local potential for the combined preconditioner; the quartic trap at
    // the box corners is far stiffer than the Laplacian at these sizes, so a
    // Fourier-only preconditioner would pin dt to its inverse.
    std::vector<double> vpot(g.size());
    for (int ix = 0; ix < N; ++ix) {
        const double x = g.coord(ix);
        for (int iy = 0; iy < N; ++iy) {
            const double y = g.coord(iy);
            const double r2 = x * x + y * y;
            const double w = r2 - 1.0;
            vpot[g.idx(ix, iy)] =
                trap.omega * trap.omega * (r2 + w * w / 8.0);
        }
    }

    int it = 0;
    double rnorm = 0.0;
    bool converged = false;
    for (; it < opts.max_iter; ++it) {
        // G = Hu - a|u|^2 u - mu u with the instantaneous Rayleigh quotient.
        ComplexField2D G = ev.grad_raw;
        for (std::size_t i = 0; i < g.size(); ++i)
            G.data()[i] -= ev.mu * u.samples()[i];
        double r2 = 0.0;
        for (const cplx& v : G.samples()) r2 += std::norm(v);
        rnorm = std::sqrt(h2 * r2);
        if (rnorm < opts.tol) {
            converged = true;
            break;
        }
        if (!opts.quiet && it % 200 == 0)
            std::fprintf(stderr, "[flow] it=%d E=%.10f res=%.3e mu=%.6f dt=%.3g\n",
                         it, ev.e.total, rnorm, ev.mu, dt);

        // P = D^{1/2} (sigma - Lap)^{-1} D^{1/2}, D = sigma/(sigma + V).
        const double sigma = std::max(1.0, std::abs(ev.mu));
        ComplexField2D dir = G;
        for (std::size_t i = 0; i < g.size(); ++i)
            dir.data()[i] *= std::sqrt(sigma / (sigma + vpot[i]));
        dir = spectral::helmholtz_inverse(dir, sigma);
        for (std::size_t i = 0; i < g.size(); ++i)
            dir.data()[i] *= std::sqrt(sigma / (sigma + vpot[i]));

        bool accepted = false;
        while (dt >= opts.dt_floor) {
            ComplexField2D v(g);
            for (std::size_t i = 0; i < g.size(); ++i)
                v.data()[i] = u.samples()[i] - dt * dir.samples()[i];
            v = normalized(std::move(v));
            FlowEval trial = full_eval(v, trap, true);
            // slack covers the energy-evaluation roundoff near convergence
            if (trial.e.total <=
                ev.e.total + 1e-12 * (std::abs(ev.e.total) + 1.0)) {
                u = std::move(v);
                ev = std::move(trial);
                accepted = true;
                break;
            }
            dt *= 0.5;
        }
        if (!accepted)
            throw NumericalError(
                "minimize: energy non-monotone after backtracking floor");
        if (opts.check_diamagnetic) {
            const double margin = ev.e.covariant_kinetic - modulus_grad_norm2(u);
            diam_margin = std::min(diam_margin, margin);
            if (margin < -1e-9)
                throw NumericalError("minimize: diamagnetic inequality violated");
        }
        dt = std::min(dt * 1.25, opts.dt_max);
    }
    if (!std::isfinite(diam_margin)) diam_margin = 0.0;
    return FlowOutcome{std::move(u), ev.e, ev.mu, it, rnorm, converged, diam_margin};
}

// Band-limited complex perturbation for the restart; smooth by construction.
ComplexField2D perturbed_start(const ComplexField2D& u, std::uint64_t seed) {
    const Grid2D& g = u.grid();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int kmax = 6;
    const int N = g.n();
    std::vector<cplx> hat(g.size(), cplx(0, 0));
    for (int ix = -kmax; ix <= kmax; ++ix)
        for (int iy = -kmax; iy <= kmax; ++iy) {
            const int jx = (ix + N) % N;
            const int jy = (iy + N) % N;
            hat[g.idx(jx, jy)] = cplx(gauss(rng), gauss(rng));
        }
    std::vector<cplx> noise;
    spectral::inverse(g, hat, noise);
    double nmax = 0.0;
    for (const cplx& v : noise) nmax = std::max(nmax, std::abs(v));
    const double umax = u.max_abs();
    ComplexField2D out(g);
    const double amp = 0.1 * umax / std::max(nmax, 1e-300);
    for (std::size_t i = 0; i < g.size(); ++i)
        out.data()[i] = u.samples()[i] + amp * noise[i];
    return out;
}

} // namespace

MinimizerResult minimize(const TrapSpec& trap, const Grid2D& grid,
                         const ComplexField2D& init, const MinimizeOptions& opts) {
    if (!(trap.a < trap.a_star))
        throw ConfigError("minimize: a >= a_star, no minimizer exists");
    if (init.grid() != grid) throw ConfigError("minimize: init field on wrong grid");
    if (!init.all_finite()) throw NumericalError("minimize: non-finite init");

    FlowOutcome best = run_flow(trap, init, opts);
    for (int r = 0; r < opts.restarts; ++r) {
        // a diverging restart does not invalidate the base flow
        try {
            FlowOutcome alt = run_flow(
                trap, perturbed_start(init, opts.seed + 101 * (r + 1)), opts);
            if (alt.e.total < best.e.total) best = std::move(alt);
        } catch (const NumericalError&) {
        }
    }

    const double g2 = modulus_grad_norm2(best.u);
    const double boundary = boundary_max_ratio(best.u);
    const std::array<double, 2> x_a = locate_max(best.u);

    MinimizerResult res(std::move(best.u));
    res.energy = best.e;
    res.mu = best.mu;
    res.iterations = best.iterations;
    res.residual_norm = best.residual;
    res.converged = best.converged;
    res.diamagnetic_margin = best.diamagnetic_margin;
    res.boundary_ratio = boundary;
    res.x_a = x_a;
    res.eps_a = g2 > 0.0 ? 1.0 / std::sqrt(g2) : 0.0;
    if (best.mu < 0.0) res.eps_bar = std::sqrt(-1.0 / best.mu);

    if (res.eps_a > 0.0 && res.eps_a < 4.0 * grid.spacing())
        throw ResolutionError(
            "minimize: blow-up width eps_a under 4h; re-run on a finer grid");
    if (res.boundary_ratio > 1e-10 && !opts.quiet)
        std::fprintf(stderr,
                     "[rotbec] warning: boundary samples at %.2e of max; "
                     "consider a larger box\n",
                     res.boundary_ratio);
    return res;
}

void write_run_record(const std::string& path, const MinimizerResult& r,
                      const TrapSpec& trap) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot open run record for writing: " + path);
    std::fprintf(f, "a = %.17g\n", trap.a);
    std::fprintf(f, "beta = %.17g\n", trap.beta);
    std::fprintf(f, "c0 = %.17g\n", trap.c0);
    std::fprintf(f, "omega = %.17g\n", trap.omega);
    std::fprintf(f, "energy = %.17g\n", r.energy.total);
    std::fprintf(f, "covariant_kinetic = %.17g\n", r.energy.covariant_kinetic);
    std::fprintf(f, "trap = %.17g\n", r.energy.trap);
    std::fprintf(f, "interaction = %.17g\n", r.energy.interaction);
    std::fprintf(f, "mu = %.17g\n", r.mu);
    std::fprintf(f, "iterations = %d\n", r.iterations);
    std::fprintf(f, "residual = %.17g\n", r.residual_norm);
    std::fprintf(f, "converged = %d\n", r.converged ? 1 : 0);
    std::fprintf(f, "x_a = %.17g %.17g\n", r.x_a[0], r.x_a[1]);
    std::fprintf(f, "eps_a = %.17g\n", r.eps_a);
    std::fprintf(f, "eps_bar = %.17g\n", r.eps_bar.value_or(0.0));
    std::fclose(f);
}

} // namespace rotbec
