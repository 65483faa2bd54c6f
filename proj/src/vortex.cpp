#include "rotbec/vortex.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rotbec {

namespace {

constexpr double kDeadModulus = 1e-14;

// Principal-value phase difference arg(b) - arg(a) in (-pi, pi].
inline double phase_step(const cplx& a, const cplx& b) {
    return std::arg(b * std::conj(a));
}

} // namespace

WindingMap winding_map(const ComplexField2D& u) {
    const Grid2D& g = u.grid();
    const int N = g.n();
    WindingMap map{g, std::vector<int>(g.size(), 0),
                   std::vector<std::uint8_t>(g.size(), 0)};
    const double umax = u.max_abs();
    const double dead = std::max(kDeadModulus, 0.0 * umax);
    for (int ix = 0; ix < N; ++ix) {
        const int ix1 = (ix + 1) % N;
        for (int iy = 0; iy < N; ++iy) {
            const int iy1 = (iy + 1) % N;
            const cplx c00 = u.at(ix, iy);
            const cplx c10 = u.at(ix1, iy);
            const cplx c11 = u.at(ix1, iy1);
            const cplx c01 = u.at(ix, iy1);
            const std::size_t id = g.idx(ix, iy);
            if (std::abs(c00) < dead || std::abs(c10) < dead ||
                std::abs(c11) < dead || std::abs(c01) < dead) {
                map.unreliable[id] = 1;
                continue;
            }
            const double total = phase_step(c00, c10) + phase_step(c10, c11) +
                                 phase_step(c11, c01) + phase_step(c01, c00);
            map.winding[id] =
                static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
        }
    }
    return map;
}

int loop_winding(const ComplexField2D& u, int i0, int j0, int nx, int ny) {
    const Grid2D& g = u.grid();
    const int N = g.n();
    auto at = [&](int i, int j) { return u.at(((i % N) + N) % N, ((j % N) + N) % N); };
    double total = 0.0;
    for (int i = i0; i < i0 + nx; ++i) total += phase_step(at(i, j0), at(i + 1, j0));
    for (int j = j0; j < j0 + ny; ++j)
        total += phase_step(at(i0 + nx, j), at(i0 + nx, j + 1));
    for (int i = i0 + nx; i > i0; --i)
        total += phase_step(at(i, j0 + ny), at(i - 1, j0 + ny));
    for (int j = j0 + ny; j > j0; --j) total += phase_step(at(i0, j), at(i0, j - 1));
    return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

namespace {

struct ScanData {
    std::vector<double> vortex_r;  // radii of reliable nonzero windings
    std::vector<std::pair<double, double>> node_r_mod; // (radius, |u|)
    double umax;
};

ScanData collect(const ComplexField2D& u, const WindingMap& map) {
    const Grid2D& g = u.grid();
    const int N = g.n();
    ScanData d;
    d.umax = u.max_abs();
    for (int ix = 0; ix < N; ++ix)
        for (int iy = 0; iy < N; ++iy) {
            const std::size_t id = g.idx(ix, iy);
            if (!map.unreliable[id] && map.winding[id] != 0) {
                const double cx = g.coord(ix) + g.spacing() / 2.0;
                const double cy = g.coord(iy) + g.spacing() / 2.0;
                d.vortex_r.push_back(std::hypot(cx, cy));
            }
            d.node_r_mod.emplace_back(std::hypot(g.coord(ix), g.coord(iy)),
                                      std::abs(u.at(ix, iy)));
        }
    return d;
}

bool disk_clean(const ScanData& d, double R, double floor_abs) {
    for (double r : d.vortex_r)
        if (r <= R) return false;
    for (const auto& [r, m] : d.node_r_mod)
        if (r <= R && m <= floor_abs) return false;
    return true;
}

} // namespace

double vortex_free_radius(const ComplexField2D& u, double threshold,
                          double scan_radius) {
    const WindingMap map = winding_map(u);
    const ScanData d = collect(u, map);
    const double floor_abs = threshold * d.umax;
    if (!disk_clean(d, 0.0, floor_abs)) return 0.0;
    if (disk_clean(d, scan_radius, floor_abs)) return scan_radius;
    // Dyadic refinement of the largest clean radius.
    double lo = 0.0, hi = scan_radius;
    for (int it = 0; it < 48 && hi - lo > 1e-12 * scan_radius; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (disk_clean(d, mid, floor_abs))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

VortexReport scan_vortices(const ComplexField2D& u, double threshold,
                           double scan_radius) {
    const Grid2D& g = u.grid();
    if (scan_radius <= 0.0) scan_radius = g.extent() - 2.0 * g.spacing();
    const WindingMap map = winding_map(u);
    VortexReport rep;
    rep.threshold = threshold;
    rep.scan_radius = scan_radius;
    const int N = g.n();
    for (int ix = 0; ix < N; ++ix)
        for (int iy = 0; iy < N; ++iy) {
            const std::size_t id = g.idx(ix, iy);
            if (!map.unreliable[id] && map.winding[id] != 0) {
                const double cx = g.coord(ix) + g.spacing() / 2.0;
                const double cy = g.coord(iy) + g.spacing() / 2.0;
                if (std::hypot(cx, cy) <= scan_radius)
                    rep.vortices.push_back(Vortex{cx, cy, map.winding[id]});
            }
        }
    const double umax = u.max_abs();
    double mn = umax;
    for (int ix = 0; ix < N; ++ix)
        for (int iy = 0; iy < N; ++iy)
            if (std::hypot(g.coord(ix), g.coord(iy)) <= scan_radius)
                mn = std::min(mn, std::abs(u.at(ix, iy)));
    rep.min_modulus = mn;
    rep.min_modulus_ratio = umax > 0.0 ? mn / umax : 0.0;
    rep.vortex_free_radius = vortex_free_radius(u, threshold, scan_radius);
    return rep;
}

} // namespace rotbec
