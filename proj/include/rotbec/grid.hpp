#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "rotbec/errors.hpp"

namespace rotbec {

using cplx = std::complex<double>;

// Square periodic grid on [-L, L)^2, N nodes per side, spacing h = 2L/N.
// N is even, so the origin x = 0 sits exactly on node index N/2; point
// evaluations at the center never interpolate.
class Grid2D {
public:
    Grid2D(double half_extent, int points_per_side);

    double extent() const { return L_; }
    int n() const { return N_; }
    double spacing() const { return h_; }

    // Physical coordinate of node i along either axis, i in [0, N).
    double coord(int i) const { return -L_ + h_ * i; }
    int origin_index() const { return N_ / 2; }

    // Angular wavenumber of Fourier index i (standard FFT ordering).
    double wavenumber(int i) const;

    std::size_t size() const { return static_cast<std::size_t>(N_) * N_; }
    std::size_t idx(int ix, int iy) const {
        return static_cast<std::size_t>(ix) * N_ + iy;
    }

    bool operator==(const Grid2D& o) const { return N_ == o.N_ && L_ == o.L_; }
    bool operator!=(const Grid2D& o) const { return !(*this == o); }

private:
    double L_;
    int N_;
    double h_;
};

// Complex wave function sampled on a Grid2D. Treated as an immutable value by
// every operation in this library: ops take const refs and return new fields.
class ComplexField2D {
public:
    explicit ComplexField2D(Grid2D grid);
    ComplexField2D(Grid2D grid, std::vector<cplx> samples);

    const Grid2D& grid() const { return grid_; }
    const std::vector<cplx>& samples() const { return data_; }

    cplx at(int ix, int iy) const { return data_[grid_.idx(ix, iy)]; }
    cplx& at(int ix, int iy) {
        mass_valid_ = false;
        return data_[grid_.idx(ix, iy)];
    }
    std::vector<cplx>& data() {
        mass_valid_ = false;
        return data_;
    }

    // h^2 * sum |u|^2, cached after first evaluation.
    double mass() const;
    double max_abs() const;
    bool all_finite() const;

private:
    Grid2D grid_;
    std::vector<cplx> data_;
    mutable double mass_cache_ = 0.0;
    mutable bool mass_valid_ = false;
};

// Spectral operators under periodic extension.
ComplexField2D laplacian(const ComplexField2D& u);
std::pair<ComplexField2D, ComplexField2D> gradient(const ComplexField2D& u);

// Periodic midpoint quadrature h^2 * sum f.
double integrate(const Grid2D& grid, const std::vector<double>& samples);
cplx integrate(const ComplexField2D& u);
double integrate_abs2(const ComplexField2D& u);

// L2 inner product h^2 * sum conj(f) g.
cplx inner(const ComplexField2D& f, const ComplexField2D& g);

// Sum over spectral coefficients matching integrate(|u|^2) (Parseval check).
double spectral_mass(const ComplexField2D& u);

// max |u| over the outermost node ring divided by max |u| overall; used to
// warn when the periodic truncation box is too small for the field at hand.
double boundary_max_ratio(const ComplexField2D& u);

// Exact 90-degree rotation (x, y) -> (-y, x) using the periodic index map.
ComplexField2D rotate90(const ComplexField2D& u);

// Raw spectral helpers shared by the solvers.
namespace spectral {
// Unnormalized forward DFT and 1/N^2-normalized inverse.
void forward(const Grid2D& grid, const std::vector<cplx>& in, std::vector<cplx>& out);
void inverse(const Grid2D& grid, const std::vector<cplx>& in, std::vector<cplx>& out);
// u -> F^-1[ F[u] / (sigma + |k|^2) ]
ComplexField2D helmholtz_inverse(const ComplexField2D& u, double sigma);
} // namespace spectral

// Field snapshot file: header "N L a Omega", then N^2 lines "re im" in
// row-major order (outer loop ix, inner iy), %.17g so the round trip is
// bit-faithful.
void write_snapshot(const std::string& path, const ComplexField2D& u, double a,
                    double omega);

struct Snapshot {
    ComplexField2D field;
    double a;
    double omega;
};

Snapshot read_snapshot(const std::string& path);

} // namespace rotbec
