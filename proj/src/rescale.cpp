#include "rotbec/rescale.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace rotbec {

Grid2D comparison_grid() { return Grid2D(10.0, 256); }

std::array<double, 2> locate_max(const ComplexField2D& u) {
    const Grid2D& g = u.grid();
    const int N = g.n();
    int bx = -1, by = -1;
    double best = -1.0, best_r2 = 0.0;
    for (int ix = 0; ix < N; ++ix)
        for (int iy = 0; iy < N; ++iy) {
            const double m = std::abs(u.at(ix, iy));
            const double x = g.coord(ix), y = g.coord(iy);
            const double r2 = x * x + y * y;
            if (m > best || (m == best && r2 < best_r2)) {
                best = m;
                best_r2 = r2;
                bx = ix;
                by = iy;
            }
        }
    if (best <= 0.0) throw NumericalError("locate_max: zero field");
    if (bx == 0 || bx == N - 1 || by == 0 || by == N - 1)
        throw RangeError("locate_max: maximum on the domain boundary; box too small");

    // Quadratic model of |u|^2 on the 3x3 stencil around the node max.
    auto f = [&](int dx, int dy) {
        return std::norm(u.at((bx + dx + N) % N, (by + dy + N) % N));
    };
    const double fx = (f(1, 0) - f(-1, 0)) / 2.0;
    const double fy = (f(0, 1) - f(0, -1)) / 2.0;
    const double fxx = f(1, 0) - 2.0 * f(0, 0) + f(-1, 0);
    const double fyy = f(0, 1) - 2.0 * f(0, 0) + f(0, -1);
    const double fxy = (f(1, 1) - f(1, -1) - f(-1, 1) + f(-1, -1)) / 4.0;
    const double det = fxx * fyy - fxy * fxy;
    double ox = 0.0, oy = 0.0;
    if (det > 0.0 && fxx < 0.0) {
        ox = -(fyy * fx - fxy * fy) / det;
        oy = -(fxx * fy - fxy * fx) / det;
        ox = std::clamp(ox, -0.5, 0.5);
        oy = std::clamp(oy, -0.5, 0.5);
    }
    const double h = g.spacing();
    return {g.coord(bx) + ox * h, g.coord(by) + oy * h};
}

namespace {

// 1D cubic Lagrange weights for offset s in [0,1] between nodes 1 and 2.
inline std::array<double, 4> cubic_w(double s) {
    const double s2 = s * s, s3 = s2 * s;
    return {(-s3 + 2.0 * s2 - s) / 2.0, (3.0 * s3 - 5.0 * s2 + 2.0) / 2.0,
            (-3.0 * s3 + 4.0 * s2 + s) / 2.0, (s3 - s2) / 2.0};
}

// Bicubic sample of a periodic lab field at an arbitrary physical point.
cplx sample_bicubic(const ComplexField2D& u, double x, double y) {
    const Grid2D& g = u.grid();
    const int N = g.n();
    const double h = g.spacing();
    const double tx = (x + g.extent()) / h;
    const double ty = (y + g.extent()) / h;
    const int ix = static_cast<int>(std::floor(tx));
    const int iy = static_cast<int>(std::floor(ty));
    const auto wx = cubic_w(tx - ix);
    const auto wy = cubic_w(ty - iy);
    cplx acc(0.0, 0.0);
    for (int a = -1; a <= 2; ++a) {
        const int jx = ((ix + a) % N + N) % N;
        cplx row(0.0, 0.0);
        for (int b = -1; b <= 2; ++b) {
            const int jy = ((iy + b) % N + N) % N;
            row += wy[static_cast<std::size_t>(b + 1)] * u.at(jx, jy);
        }
        acc += wx[static_cast<std::size_t>(a + 1)] * row;
    }
    return acc;
}

} // namespace

ComplexField2D rescale(const ComplexField2D& u, std::array<double, 2> x_a,
                       double eps, double omega, double amplitude,
                       const Grid2D& target) {
    if (!(eps > 0.0)) throw ConfigError("rescale: eps must be positive");
    const Grid2D& lab = u.grid();
    const double reach = eps * target.extent() * std::numbers::sqrt2 +
                         std::hypot(x_a[0], x_a[1]);
    // Windows poking outside the box are tolerated only when the lab field
    // has decayed there; otherwise data is genuinely missing.
    if (reach > lab.extent() && boundary_max_ratio(u) > 1e-3)
        throw RangeError("rescale: window exceeds the lab domain where the field "
                         "is not negligible");
    const int N = target.n();
    ComplexField2D out(target);
    const double xp1 = -x_a[1], xp2 = x_a[0]; // x_a_perp
    for (int ix = 0; ix < N; ++ix) {
        const double yx = target.coord(ix);
        for (int iy = 0; iy < N; ++iy) {
            const double yy = target.coord(iy);
            const double px = x_a[0] + eps * yx;
            const double py = x_a[1] + eps * yy;
            cplx v(0.0, 0.0);
            if (std::abs(px) <= lab.extent() && std::abs(py) <= lab.extent())
                v = sample_bicubic(u, px, py);
            const double phase = -omega * eps * (yx * xp1 + yy * xp2);
            out.at(ix, iy) = amplitude * v * std::polar(1.0, phase);
        }
    }
    return out;
}

AlignedField align_phase(const ComplexField2D& v, const ComplexField2D& qfield) {
    const cplx overlap = inner(qfield, v); // qfield real: int q * v
    const double scale = std::sqrt(qfield.mass() * v.mass());
    if (std::abs(overlap) <= 1e-14 * scale)
        throw NumericalError("align_phase: zero overlap, alignment undefined");
    const double theta = -std::arg(overlap);
    ComplexField2D aligned(v.grid());
    const cplx rot = std::polar(1.0, theta);
    for (std::size_t i = 0; i < v.samples().size(); ++i)
        aligned.data()[i] = rot * v.samples()[i];
    return AlignedField{theta, std::move(aligned)};
}

BlowupRecord blowup_record(const MinimizerResult& result, const RadialProfile& q,
                           const TownesConstants& tc, const TrapSpec& trap) {
    if (!(result.mu < 0.0))
        throw NumericalError("blowup_record: mu >= 0, not in the blow-up regime");
    BlowupRecord rec;
    rec.x_a = result.x_a;
    rec.eps_a = result.eps_a;
    rec.eps_bar = std::sqrt(-1.0 / result.mu);
    rec.a = trap.a;
    rec.beta = trap.beta;
    rec.c0 = trap.c0;
    rec.omega = trap.omega;
    rec.energy = result.energy.total;
    rec.mu = result.mu;

    const Grid2D cg = comparison_grid();
    const ComplexField2D w =
        rescale(result.field, result.x_a, result.eps_a, trap.omega, result.eps_a, cg);
    const ComplexField2D qg = lift_to_grid(q, cg, {0.0, 0.0});
    AlignedField al = align_phase(w, qg);
    rec.theta = al.theta;

    const double inv_sqrt_astar = 1.0 / std::sqrt(tc.a_star);
    double sup = 0.0, l2 = 0.0;
    for (std::size_t i = 0; i < cg.size(); ++i) {
        const cplx d = al.field.samples()[i] - qg.samples()[i] * inv_sqrt_astar;
        sup = std::max(sup, std::abs(d));
        l2 += std::norm(d);
    }
    rec.sup_dist = sup;
    rec.l2_dist = std::sqrt(cg.spacing() * cg.spacing() * l2);

    const double eps_pred = std::pow(trap.a_star - trap.a, (1.0 + 2.0 * trap.beta) / 4.0) /
                            (std::sqrt(trap.c0) * tc.lambda);
    rec.eps_ratio = result.eps_a / eps_pred;
    rec.mu_eps2 = -result.mu * result.eps_a * result.eps_a;
    const double ra2 = result.x_a[0] * result.x_a[0] + result.x_a[1] * result.x_a[1];
    rec.maxpoint_ratio = (ra2 - 1.0) / (rec.eps_bar * rec.eps_bar);
    return rec;
}

std::string blowup_csv_header() {
    return "a,beta,C0,Omega,I,mu,eps_a,eps_bar,x_a_norm,theta,sup_dist,l2_dist";
}

std::string blowup_csv_row(const BlowupRecord& r) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                  "%.17g,%.17g",
                  r.a, r.beta, r.c0, r.omega, r.energy, r.mu, r.eps_a, r.eps_bar,
                  std::hypot(r.x_a[0], r.x_a[1]), r.theta, r.sup_dist, r.l2_dist);
    return buf;
}

} // namespace rotbec
