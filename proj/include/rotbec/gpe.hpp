#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "rotbec/grid.hpp"
#include "rotbec/townes.hpp"

namespace rotbec {

// One minimization instance of the rotating trap problem. The schedule ties
// the velocity to the interaction strength: Omega = C0 (a* - a)^(-beta).
struct TrapSpec {
    double c0 = 1.0;
    double beta = 0.0;
    double a = 0.0;
    double a_star = 0.0;
    double omega = 0.0;
};

// Validated construction along the schedule; a < a* is a hard requirement
// (no minimizer exists otherwise).
TrapSpec make_trap(double c0, double beta, double a, double a_star);

struct EnergyBreakdown {
    double covariant_kinetic = 0.0; // int |(grad - i Omega x_perp) u|^2
    double trap = 0.0;              // (Omega^2/8) int (|x|^2-1)^2 |u|^2
    double interaction = 0.0;       // -(a/2) int |u|^4
    double total = 0.0;
};

EnergyBreakdown energy(const ComplexField2D& u, const TrapSpec& trap);

// H u = -Lap u + 2i Omega (x_perp . grad u) + Omega^2 |x|^2 u
//       + (Omega^2/8)(|x|^2-1)^2 u
ComplexField2D apply_hamiltonian(const ComplexField2D& u, const TrapSpec& trap);

// Pointwise H u - a|u|^2 u - mu u; its L2 norm is the convergence metric.
ComplexField2D el_residual(const ComplexField2D& u, const TrapSpec& trap, double mu);

// mu = I - (a/2) int |u|^4 (multiplier identity; I is the energy total).
double chemical_potential(const ComplexField2D& u, const TrapSpec& trap,
                          double energy_total);

// Rayleigh-quotient route: Re<u, Hu - a|u|^2 u> / mass(u).
double rayleigh_mu(const ComplexField2D& u, const TrapSpec& trap);

// Paper-style trial state: unit-mass cutoff Townes bump of width 1/tau at
// y0 with the gauge phase exp(i Omega x . y0_perp).
ComplexField2D init_trial(const Grid2D& grid, const TrapSpec& trap,
                          const RadialProfile& q, std::array<double, 2> y0,
                          double tau);

struct MinimizeOptions {
    double tol = 1e-6;           // L2 norm of the EL residual
    int max_iter = 50000;
    double dt_init = 1.0;        // step for the preconditioned direction
    double dt_max = 2.0;
    double dt_floor = 1e-8;
    int restarts = 1;            // extra random-phase-perturbed starts
    std::uint64_t seed = 0x5eed5eedULL;
    bool check_diamagnetic = false; // verify the inequality on every accepted step
    bool quiet = true;
};

struct MinimizerResult {
    explicit MinimizerResult(ComplexField2D f) : field(std::move(f)) {}

    ComplexField2D field;
    EnergyBreakdown energy;
    double mu = 0.0;
    int iterations = 0;
    double residual_norm = 0.0;
    bool converged = false;
    std::array<double, 2> x_a{0.0, 0.0};
    double eps_a = 0.0;                 // (int |grad |u||^2)^{-1/2}
    std::optional<double> eps_bar;      // sqrt(-1/mu), only when mu < 0
    double diamagnetic_margin = 0.0;    // min over checked iterates
    double boundary_ratio = 0.0;        // truncation-box diagnostic
};

// Normalized gradient flow on the unit-mass sphere. Steps follow
// u <- normalize(u - dt * P G(u)), G = Hu - a|u|^2 u - mu(u) u, with the
// Fourier-diagonal preconditioner P = (sigma - Lap)^{-1}; dt backtracks until
// the energy is non-increasing. Runs 1 + opts.restarts flows and keeps the
// lowest energy.
MinimizerResult minimize(const TrapSpec& trap, const Grid2D& grid,
                         const ComplexField2D& init, const MinimizeOptions& opts);

// int |grad |u||^2 via the spectral gradient of the modulus.
double modulus_grad_norm2(const ComplexField2D& u);

// Flat key=value record of the scalar results.
void write_run_record(const std::string& path, const MinimizerResult& r,
                      const TrapSpec& trap);

} // namespace rotbec
