#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "oracles.hpp"
#include "rotbec/grid.hpp"
#include "rotbec/townes.hpp"

using namespace rotbec;

namespace {

const RadialProfile& townes() {
    static RadialProfile q = shoot_townes();
    return q;
}

ComplexField2D gaussian_field(const Grid2D& g, double sigma2 = 1.0) {
    ComplexField2D u(g);
    for (int ix = 0; ix < g.n(); ++ix)
        for (int iy = 0; iy < g.n(); ++iy) {
            const double x = g.coord(ix), y = g.coord(iy);
            u.at(ix, iy) = std::exp(-(x * x + y * y) / (2.0 * sigma2));
        }
    return u;
}

} // namespace

TEST_CASE("grid construction enforces the invariants") {
    CHECK_THROWS_AS(Grid2D(4.0, 100), ConfigError); // not a power of two
    CHECK_THROWS_AS(Grid2D(4.0, 16), ConfigError);  // too small
    CHECK_THROWS_AS(Grid2D(-1.0, 64), ConfigError);
    const Grid2D g(4.0, 64);
    CHECK(g.spacing() == doctest::Approx(0.125));
    CHECK(g.coord(g.origin_index()) == 0.0); // origin exactly on a node
}

TEST_CASE("derivatives of a constant vanish") {
    const Grid2D g(4.0, 64);
    ComplexField2D u(g);
    for (auto& v : u.data()) v = cplx(0.7, -0.3);
    const ComplexField2D lap = laplacian(u);
    CHECK(lap.max_abs() < 1e-12);
    const auto [dx, dy] = gradient(u);
    CHECK(dx.max_abs() < 1e-13);
    CHECK(dy.max_abs() < 1e-13);
}

TEST_CASE("plane waves are laplacian and gradient eigenfunctions") {
    const Grid2D g(2.0, 64);
    const double kx = g.wavenumber(3), ky = g.wavenumber(60); // negative branch
    ComplexField2D u(g);
    for (int ix = 0; ix < g.n(); ++ix)
        for (int iy = 0; iy < g.n(); ++iy)
            u.at(ix, iy) = std::polar(1.0, kx * g.coord(ix) + ky * g.coord(iy));
    const ComplexField2D lap = laplacian(u);
    const auto [dx, dy] = gradient(u);
    double worst_l = 0.0, worst_g = 0.0;
    for (int ix = 0; ix < g.n(); ++ix)
        for (int iy = 0; iy < g.n(); ++iy) {
            const cplx uv = u.at(ix, iy);
            worst_l = std::max(worst_l,
                               std::abs(lap.at(ix, iy) + (kx * kx + ky * ky) * uv));
            worst_g = std::max(worst_g, std::abs(dx.at(ix, iy) - cplx(0, kx) * uv));
            worst_g = std::max(worst_g, std::abs(dy.at(ix, iy) - cplx(0, ky) * uv));
        }
    CHECK(worst_l < 1e-10);
    CHECK(worst_g < 1e-11);
}

TEST_CASE("gaussian laplacian matches the analytic formula") {
    const Grid2D g(12.0, 256);
    const ComplexField2D u = gaussian_field(g);
    const ComplexField2D lap = laplacian(u);
    // Lap e^{-r^2/2} = (r^2 - 2) e^{-r^2/2}
    double worst = 0.0;
    for (int ix = 0; ix < g.n(); ++ix)
        for (int iy = 0; iy < g.n(); ++iy) {
            const double x = g.coord(ix), y = g.coord(iy);
            const double r2 = x * x + y * y;
            const double expect = (r2 - 2.0) * std::exp(-r2 / 2.0);
            worst = std::max(worst, std::abs(lap.at(ix, iy) - expect));
        }
    CHECK(worst / 2.0 < 1e-8); // relative to the sup of the target
}

TEST_CASE("gradient of the lifted ground profile matches the radial derivative") {
    const Grid2D g(12.0, 256);
    const RadialProfile& q = townes();
    const ComplexField2D qf = lift_to_grid(q, g, {0.0, 0.0});
    const auto [dx, dy] = gradient(qf);
    double worst = 0.0;
    for (int ix = 0; ix < g.n(); ++ix)
        for (int iy = 0; iy < g.n(); ++iy) {
            const double x = g.coord(ix), y = g.coord(iy);
            const double r = std::hypot(x, y);
            if (r < 0.5 || r > 8.0) continue; // away from r=0 per the contract
            const double qp = q.deriv(r);
            worst = std::max(worst, std::abs(dx.at(ix, iy) - qp * x / r));
            worst = std::max(worst, std::abs(dy.at(ix, iy) - qp * y / r));
        }
    CHECK(worst < 1e-6);
}

TEST_CASE("quadrature: constants, gaussians, and the lifted profile mass") {
    const Grid2D g(12.0, 256);
    std::vector<double> ones(g.size(), 1.0);
    CHECK(integrate(g, ones) == doctest::Approx(576.0).epsilon(1e-14));

    // normalized gaussian (1/pi) e^{-r^2}
    std::vector<double> gbell(g.size());
    for (int ix = 0; ix < g.n(); ++ix)
        for (int iy = 0; iy < g.n(); ++iy) {
            const double x = g.coord(ix), y = g.coord(iy);
            gbell[g.idx(ix, iy)] =
                std::exp(-(x * x + y * y)) / std::numbers::pi;
        }
    CHECK(std::abs(integrate(g, gbell) - 1.0) < 1e-10);

    const ComplexField2D qf = lift_to_grid(townes(), g, {0.0, 0.0});
    const TownesConstants tc = townes_constants(townes());
    CHECK(std::abs(qf.mass() - tc.a_star) / tc.a_star < 1e-4);
}

TEST_CASE("parseval identity holds to near machine precision") {
    const Grid2D g(3.0, 128);
    const ComplexField2D u = oracle::random_band_limited(g, 40, 11, false);
    const double direct = integrate_abs2(u);
    const double viaspec = spectral_mass(u);
    CHECK(std::abs(direct - viaspec) / direct < 1e-12);
}

TEST_CASE("spectral operators are linear") {
    const Grid2D g(3.0, 64);
    const ComplexField2D u = oracle::random_band_limited(g, 20, 3, false);
    const ComplexField2D v = oracle::random_band_limited(g, 20, 4, false);
    const cplx al(0.7, -1.3), be(-0.2, 0.5);
    ComplexField2D w(g);
    for (std::size_t i = 0; i < g.size(); ++i)
        w.data()[i] = al * u.samples()[i] + be * v.samples()[i];
    const ComplexField2D lw = laplacian(w);
    const ComplexField2D lu = laplacian(u);
    const ComplexField2D lv = laplacian(v);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        worst = std::max(worst, std::abs(lw.samples()[i] - al * lu.samples()[i] -
                                         be * lv.samples()[i]));
    CHECK(worst < 1e-9 * std::max(1.0, lw.max_abs()));
}

TEST_CASE("discrete divergence theorem: derivatives integrate to zero") {
    const Grid2D g(3.0, 64);
    const ComplexField2D u = oracle::random_band_limited(g, 25, 9, false);
    const auto [dx, dy] = gradient(u);
    CHECK(std::abs(integrate(dx)) < 1e-10);
    CHECK(std::abs(integrate(dy)) < 1e-10);
}

TEST_CASE("snapshot files round-trip bit-faithfully") {
    const Grid2D g(2.0, 32);
    ComplexField2D u = oracle::random_band_limited(g, 10, 17, false);
    const auto path = std::filesystem::temp_directory_path() / "rotbec_snap_test.txt";
    write_snapshot(path.string(), u, 0.5, 1.25);
    const Snapshot s = read_snapshot(path.string());
    REQUIRE(s.field.grid() == g);
    CHECK(s.a == 0.5);
    CHECK(s.omega == 1.25);
    bool exact = true;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (s.field.samples()[i] != u.samples()[i]) exact = false;
    CHECK(exact);
    std::filesystem::remove(path);
}

TEST_CASE("snapshot reader rejects malformed input") {
    const auto path = std::filesystem::temp_directory_path() / "rotbec_bad_snap.txt";
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    std::fprintf(f, "64 4.0 0.5\n");
    std::fclose(f);
    CHECK_THROWS_AS(read_snapshot(path.string()), IoError);
    CHECK_THROWS_AS(read_snapshot("/nonexistent/rotbec.snap"), IoError);
    std::filesystem::remove(path);
}

TEST_CASE("rotate90 permutes nodes exactly") {
    const Grid2D g(2.0, 32);
    const ComplexField2D u = oracle::random_band_limited(g, 9, 23, false);
    ComplexField2D r = rotate90(rotate90(rotate90(rotate90(u))));
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        worst = std::max(worst, std::abs(r.samples()[i] - u.samples()[i]));
    CHECK(worst == 0.0);
    // mass is conserved by the permutation
    CHECK(rotate90(u).mass() == doctest::Approx(u.mass()).epsilon(1e-15));
}
