#pragma once

#include <cstdint>
#include <vector>

#include "rotbec/grid.hpp"

namespace rotbec {

// Discrete vorticity per plaquette: sum of principal-value phase differences
// around the 4 oriented edges, in units of 2 pi. Plaquette (i,j) has corners
// (i,j), (i+1,j), (i+1,j+1), (i,j+1) with periodic wrap; its center sits at
// (coord(i)+h/2, coord(j)+h/2).
struct WindingMap {
    Grid2D grid;
    std::vector<int> winding;           // N*N plaquettes, same idx() layout
    std::vector<std::uint8_t> unreliable; // an edge endpoint had |u| < 1e-14

    int at(int ix, int iy) const { return winding[grid.idx(ix, iy)]; }
    bool reliable(int ix, int iy) const { return !unreliable[grid.idx(ix, iy)]; }
};

WindingMap winding_map(const ComplexField2D& u);

// Phase winding of u around the rectangle of plaquettes
// [i0, i0+nx) x [j0, j0+ny), walked along its outer node contour.
int loop_winding(const ComplexField2D& u, int i0, int j0, int nx, int ny);

struct Vortex {
    double x;
    double y;
    int winding;
};

struct VortexReport {
    std::vector<Vortex> vortices;  // reliable nonzero-winding plaquettes
    double min_modulus = 0.0;      // over the scan disk of radius scan_radius
    double min_modulus_ratio = 0.0;
    double vortex_free_radius = 0.0;
    double threshold = 0.0;        // relative modulus threshold used
    double scan_radius = 0.0;
};

// Largest disk radius about the lab origin (dyadic search up to scan_radius)
// containing no reliable nonzero winding and no modulus below
// threshold * max|u|. A vortex at the center yields radius 0.
double vortex_free_radius(const ComplexField2D& u, double threshold,
                          double scan_radius);

VortexReport scan_vortices(const ComplexField2D& u, double threshold = 1e-6,
                           double scan_radius = 0.0 /* 0: grid default */);

} // namespace rotbec
