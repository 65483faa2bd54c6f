#include "rotbec/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <numbers>

namespace rotbec {

Grid2D::Grid2D(double half_extent, int points_per_side)
    : L_(half_extent), N_(points_per_side), h_(2.0 * half_extent / points_per_side) {
    if (!(half_extent > 0.0))
        throw ConfigError("Grid2D: half extent must be positive");
    if (N_ < 32 || (N_ & (N_ - 1)) != 0)
        throw ConfigError("Grid2D: N must be a power of two >= 32");
}

double Grid2D::wavenumber(int i) const {
    const int m = (i <= N_ / 2) ? i : i - N_;
    return std::numbers::pi / L_ * m;
}

ComplexField2D::ComplexField2D(Grid2D grid)
    : grid_(grid), data_(grid.size(), cplx(0.0, 0.0)) {}

ComplexField2D::ComplexField2D(Grid2D grid, std::vector<cplx> samples)
    : grid_(grid), data_(std::move(samples)) {
    if (data_.size() != grid_.size())
        throw ConfigError("ComplexField2D: sample count does not match grid");
}

double ComplexField2D::mass() const {
    if (!mass_valid_) {
        double s = 0.0;
        for (const cplx& v : data_) s += std::norm(v);
        mass_cache_ = grid_.spacing() * grid_.spacing() * s;
        mass_valid_ = true;
    }
    return mass_cache_;
}

double ComplexField2D::max_abs() const {
    double m = 0.0;
    for (const cplx& v : data_) m = std::max(m, std::abs(v));
    return m;
}

bool ComplexField2D::all_finite() const {
    for (const cplx& v : data_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

// ---------------------------------------------------------------------------
// FFT engine: one fftw plan pair per grid size, reused across all fields.
// FFTW_ESTIMATE keeps plan selection deterministic run to run.
// ---------------------------------------------------------------------------
namespace {

struct PlanSet {
    fftw_complex* buf = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    int n = 0;

    explicit PlanSet(int N) : n(N) {
        buf = fftw_alloc_complex(static_cast<std::size_t>(N) * N);
        fwd = fftw_plan_dft_2d(N, N, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_2d(N, N, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~PlanSet() {
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(buf);
    }
    PlanSet(const PlanSet&) = delete;
    PlanSet& operator=(const PlanSet&) = delete;
};

std::mutex& fft_mutex() {
    static std::mutex m;
    return m;
}

PlanSet& plans_for(int N) {
    static std::map<int, PlanSet*> cache;
    auto it = cache.find(N);
    if (it == cache.end()) it = cache.emplace(N, new PlanSet(N)).first;
    return *it->second;
}

void run_fft(const Grid2D& grid, const std::vector<cplx>& in, std::vector<cplx>& out,
             bool forward) {
    std::lock_guard<std::mutex> lock(fft_mutex());
    PlanSet& p = plans_for(grid.n());
    const std::size_t sz = grid.size();
    for (std::size_t i = 0; i < sz; ++i) {
        p.buf[i][0] = in[i].real();
        p.buf[i][1] = in[i].imag();
    }
    fftw_execute(forward ? p.fwd : p.bwd);
    out.resize(sz);
    const double scale = forward ? 1.0 : 1.0 / static_cast<double>(sz);
    for (std::size_t i = 0; i < sz; ++i)
        out[i] = cplx(p.buf[i][0] * scale, p.buf[i][1] * scale);
}

} // namespace

namespace spectral {

void forward(const Grid2D& grid, const std::vector<cplx>& in, std::vector<cplx>& out) {
    run_fft(grid, in, out, true);
}

void inverse(const Grid2D& grid, const std::vector<cplx>& in, std::vector<cplx>& out) {
    run_fft(grid, in, out, false);
}

ComplexField2D helmholtz_inverse(const ComplexField2D& u, double sigma) {
    const Grid2D& g = u.grid();
    std::vector<cplx> hat;
    forward(g, u.samples(), hat);
    const int N = g.n();
    for (int ix = 0; ix < N; ++ix) {
        const double kx = g.wavenumber(ix);
        for (int iy = 0; iy < N; ++iy) {
            const double ky = g.wavenumber(iy);
            hat[g.idx(ix, iy)] /= sigma + kx * kx + ky * ky;
        }
    }
    std::vector<cplx> res;
    inverse(g, hat, res);
    return ComplexField2D(g, std::move(res));
}

} // namespace spectral

ComplexField2D laplacian(const ComplexField2D& u) {
    const Grid2D& g = u.grid();
    std::vector<cplx> hat;
    spectral::forward(g, u.samples(), hat);
    const int N = g.n();
    for (int ix = 0; ix < N; ++ix) {
        const double kx = g.wavenumber(ix);
        for (int iy = 0; iy < N; ++iy) {
            const double ky = g.wavenumber(iy);
            hat[g.idx(ix, iy)] *= -(kx * kx + ky * ky);
        }
    }
    std::vector<cplx> res;
    spectral::inverse(g, hat, res);
    return ComplexField2D(g, std::move(res));
}

std::pair<ComplexField2D, ComplexField2D> gradient(const ComplexField2D& u) {
    const Grid2D& g = u.grid();
    std::vector<cplx> hat;
    spectral::forward(g, u.samples(), hat);
    const int N = g.n();
    std::vector<cplx> hx(g.size()), hy(g.size());
    for (int ix = 0; ix < N; ++ix) {
        // Nyquist mode carries no signed direction; dropped for odd derivatives.
        const double kx = (ix == N / 2) ? 0.0 : g.wavenumber(ix);
        for (int iy = 0; iy < N; ++iy) {
            const double ky = (iy == N / 2) ? 0.0 : g.wavenumber(iy);
            const cplx v = hat[g.idx(ix, iy)];
            hx[g.idx(ix, iy)] = cplx(0.0, kx) * v;
            hy[g.idx(ix, iy)] = cplx(0.0, ky) * v;
        }
    }
    std::vector<cplx> dx, dy;
    spectral::inverse(g, hx, dx);
    spectral::inverse(g, hy, dy);
    return {ComplexField2D(g, std::move(dx)), ComplexField2D(g, std::move(dy))};
}

double integrate(const Grid2D& grid, const std::vector<double>& samples) {
    double s = 0.0;
    for (double v : samples) s += v;
    return grid.spacing() * grid.spacing() * s;
}

cplx integrate(const ComplexField2D& u) {
    cplx s(0.0, 0.0);
    for (const cplx& v : u.samples()) s += v;
    return u.grid().spacing() * u.grid().spacing() * s;
}

double integrate_abs2(const ComplexField2D& u) { return u.mass(); }

cplx inner(const ComplexField2D& f, const ComplexField2D& g) {
    if (f.grid() != g.grid()) throw ConfigError("inner: fields live on different grids");
    cplx s(0.0, 0.0);
    const std::size_t n = f.samples().size();
    for (std::size_t i = 0; i < n; ++i) s += std::conj(f.samples()[i]) * g.samples()[i];
    return f.grid().spacing() * f.grid().spacing() * s;
}

double spectral_mass(const ComplexField2D& u) {
    const Grid2D& g = u.grid();
    std::vector<cplx> hat;
    spectral::forward(g, u.samples(), hat);
    double s = 0.0;
    for (const cplx& v : hat) s += std::norm(v);
    const double n2 = static_cast<double>(g.size());
    return g.spacing() * g.spacing() * s / n2;
}

double boundary_max_ratio(const ComplexField2D& u) {
    const Grid2D& g = u.grid();
    const int N = g.n();
    double edge = 0.0;
    for (int i = 0; i < N; ++i) {
        edge = std::max(edge, std::abs(u.at(0, i)));
        edge = std::max(edge, std::abs(u.at(N - 1, i)));
        edge = std::max(edge, std::abs(u.at(i, 0)));
        edge = std::max(edge, std::abs(u.at(i, N - 1)));
    }
    const double peak = u.max_abs();
    return peak > 0.0 ? edge / peak : 0.0;
}

ComplexField2D rotate90(const ComplexField2D& u) {
    const Grid2D& g = u.grid();
    const int N = g.n();
    ComplexField2D out(g);
    // out(ix,iy) = u at rot^-1(x,y) = (y, -x); index -x is (N - ix) mod N.
    for (int ix = 0; ix < N; ++ix)
        for (int iy = 0; iy < N; ++iy)
            out.at(ix, iy) = u.at(iy, (N - ix) % N);
    return out;
}

void write_snapshot(const std::string& path, const ComplexField2D& u, double a,
                    double omega) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot open snapshot for writing: " + path);
    std::fprintf(f, "%d %.17g %.17g %.17g\n", u.grid().n(), u.grid().extent(), a, omega);
    for (const cplx& v : u.samples())
        std::fprintf(f, "%.17g %.17g\n", v.real(), v.imag());
    std::fclose(f);
}

Snapshot read_snapshot(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "r");
    if (!f) throw IoError("cannot open snapshot for reading: " + path);
    int N = 0;
    double L = 0.0, a = 0.0, omega = 0.0;
    if (std::fscanf(f, "%d %lg %lg %lg", &N, &L, &a, &omega) != 4) {
        std::fclose(f);
        throw IoError("malformed snapshot header: " + path);
    }
    Grid2D grid(L, N);
    std::vector<cplx> data(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double re = 0.0, im = 0.0;
        if (std::fscanf(f, "%lg %lg", &re, &im) != 2) {
            std::fclose(f);
            throw IoError("snapshot truncated: " + path);
        }
        data[i] = cplx(re, im);
    }
    std::fclose(f);
    ComplexField2D field(grid, std::move(data));
    if (!field.all_finite()) throw NumericalError("snapshot contains non-finite samples");
    return Snapshot{std::move(field), a, omega};
}

} // namespace rotbec
