#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rotbec/expansion.hpp"
#include "rotbec/gpe.hpp"
#include "rotbec/rescale.hpp"
#include "rotbec/townes.hpp"
#include "rotbec/vortex.hpp"

namespace rotbec {

struct SweepConfig {
    double c0 = 1.0;
    double beta = 0.0;
    std::vector<double> fractions = {0.90, 0.94, 0.97, 0.985};
    double grid_extent = 4.0;
    int grid_n = 256;
    double tol = 1e-6;
    int max_iter = 50000;
    std::string outdir = "out";
    std::uint64_t seed = 20260810;
    bool warm_start = true;
    int restarts = 1;
    double vortex_threshold = 1e-6;
    // Scan disk for the sweep rows: the condensate region around the ring
    // |x| = 1. Desk-scale minimizers carry no vortices at all, so the
    // measured radius saturates this cap.
    double vortex_scan_radius = 2.0;
    bool write_snapshots = true;

    std::vector<std::string> warnings; // filled during validation
};

// Flat key=value text; keys: c0, beta, fractions, grid.L, grid.N, tol,
// max_iter, outdir, seed, warm_start, restarts, vortex.threshold,
// vortex.scan_radius, snapshots.
SweepConfig parse_config(const std::string& path);
void validate_config(SweepConfig& cfg);

struct SweepRecord {
    double frac = 0.0;
    std::string status = "ok";
    bool minimized = false; // the flow converged; energy/mu fields are valid
    BlowupRecord blowup;
    EnergyBreakdown energy;
    int iterations = 0;
    double residual = 0.0;
    int n_vortices = 0;
    double vortex_free_radius = 0.0;
    double min_modulus_ratio = 0.0;
    ExpansionResiduals expansion;
    double boundary_ratio = 0.0;
};

// Minimize / rescale / expand / vortex-scan once per fraction, warm-starting
// each run from the previous converged field. Stage errors land in the row
// status and the sweep continues.
std::vector<SweepRecord> run_sweep(const SweepConfig& cfg, const RadialProfile& q,
                                   const TownesConstants& tc);

struct PowerLawFit {
    double slope = 0.0;
    double intercept = 0.0;
    double prefactor_last = 0.0; // I / (a*-a)^{1/2-beta} at the last point
    double r_squared = 0.0;
    int n_points = 0;
};

// Least squares on (log(a*-a), log I) over converged rows.
PowerLawFit fit_power_law(const std::vector<SweepRecord>& records, double a_star,
                          double beta);

// sweep.csv plus the plot-data files (fixed column order, see README).
void emit_report(const std::vector<SweepRecord>& records, const TownesConstants& tc,
                 const std::string& outdir);

std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRecord& r);

} // namespace rotbec
