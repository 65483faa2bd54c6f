#include "rotbec/townes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace rotbec {

namespace {

// Asymptotic decaying solution of the linearized tail equation w'' + w'/r = w,
// i.e. the modified Bessel K0 expansion sqrt(pi/2r) e^{-r} (1 - 1/8r + ...).
constexpr double kA1 = -1.0 / 8.0;
constexpr double kA2 = 9.0 / 128.0;
constexpr double kA3 = -75.0 / 1024.0;
constexpr double kA4 = 11025.0 / 98304.0;

double tail_shape(double r) {
    const double s = 1.0 + kA1 / r + kA2 / (r * r) + kA3 / (r * r * r) +
                     kA4 / (r * r * r * r);
    return std::sqrt(std::numbers::pi / (2.0 * r)) * std::exp(-r) * s;
}

double tail_shape_deriv(double r) {
    const double s = 1.0 + kA1 / r + kA2 / (r * r) + kA3 / (r * r * r) +
                     kA4 / (r * r * r * r);
    const double sp = -kA1 / (r * r) - 2.0 * kA2 / (r * r * r) -
                      3.0 * kA3 / (r * r * r * r) - 4.0 * kA4 / (r * r * r * r * r);
    const double pre = std::sqrt(std::numbers::pi / (2.0 * r)) * std::exp(-r);
    return pre * (sp - s - 0.5 * s / r);
}

struct OdeState {
    double q;
    double p; // Q'
};

inline OdeState rhs(double r, const OdeState& s) {
    return {s.p, s.q - s.q * s.q * s.q - s.p / r};
}

inline OdeState rk4_step(double r, const OdeState& s, double h) {
    const OdeState k1 = rhs(r, s);
    const OdeState k2 = rhs(r + h / 2, {s.q + h / 2 * k1.q, s.p + h / 2 * k1.p});
    const OdeState k3 = rhs(r + h / 2, {s.q + h / 2 * k2.q, s.p + h / 2 * k2.p});
    const OdeState k4 = rhs(r + h, {s.q + h * k3.q, s.p + h * k3.p});
    return {s.q + h / 6 * (k1.q + 2 * k2.q + 2 * k3.q + k4.q),
            s.p + h / 6 * (k1.p + 2 * k2.p + 2 * k3.p + k4.p)};
}

// Series start just off the coordinate singularity:
// Q(r) = Q(0) + Q''(0) r^2 / 2 with Q''(0) = (Q(0) - Q(0)^3)/2.
OdeState series_start(double b, double r0) {
    const double qpp0 = 0.5 * (b - b * b * b);
    return {b + 0.5 * qpp0 * r0 * r0, qpp0 * r0};
}

constexpr double kSeriesR0 = 1e-4;

// March from r0 to r_stop on the uniform node ladder r = k*step, classifying
// the trajectory on the way. Returns +1 for the undershoot side (Q turns
// upward again, heading for 2 Q(0) or the damped orbit around Q=1) and -1
// for the overshoot side (Q crosses zero).
int classify_trajectory(double b, double step, double r_stop) {
    OdeState s = series_start(b, kSeriesR0);
    double r = kSeriesR0;
    s = rk4_step(r, s, step - kSeriesR0);
    r = step;
    const long n = std::lround(r_stop / step);
    for (long i = 1; i < n; ++i) {
        s = rk4_step(r, s, step);
        r += step;
        if (s.q < 0.0) return -1;
        if (s.q > 2.0 * b) return +1;
        // In the low regime the separatrix keeps falling; turning upward
        // there means the linear term won and the trajectory rises again.
        if (s.q < 0.5 && s.p > 0.0) return +1;
    }
    return s.p > 0.0 ? +1 : -1;
}

} // namespace

RadialProfile::RadialProfile(double step, std::vector<double> values,
                             std::vector<double> derivs, double q0)
    : step_(step), values_(std::move(values)), derivs_(std::move(derivs)), q0_(q0) {
    if (values_.size() != derivs_.size() || values_.size() < 16)
        throw ConfigError("RadialProfile: inconsistent sample arrays");
    for (std::size_t i = 1; i < values_.size(); ++i) {
        if (!(values_[i] < values_[i - 1]))
            throw NumericalError("RadialProfile: values not strictly decreasing");
        if (values_[i] <= 0.0 && i + 1 < values_.size())
            throw NumericalError("RadialProfile: non-positive interior value");
    }
    tail_r_ = r_max();
    tail_amp_ = values_.back() / tail_shape(tail_r_);
}

double RadialProfile::tail_value(double r) const { return tail_amp_ * tail_shape(r); }
double RadialProfile::tail_deriv(double r) const {
    return tail_amp_ * tail_shape_deriv(r);
}

namespace {

// 4-point Lagrange interpolation on uniform samples with even mirror at r=0.
double interp4(const std::vector<double>& v, double step, double r, int parity) {
    const double t = r / step;
    long i1 = static_cast<long>(std::floor(t));
    const long m = static_cast<long>(v.size()) - 1;
    i1 = std::clamp(i1, 0L, m - 1);
    const double s = t - static_cast<double>(i1);
    auto get = [&](long i) -> double {
        if (i < 0) return parity * v[static_cast<std::size_t>(-i)];
        if (i > m) return v.back(); // only reachable at the exact right edge
        return v[static_cast<std::size_t>(i)];
    };
    const double f0 = get(i1 - 1), f1 = get(i1), f2 = get(i1 + 1), f3 = get(i1 + 2);
    return f1 + s * ((f2 - f0) / 2.0 +
                     s * ((2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3) / 2.0 +
                          s * ((f3 - 3.0 * f2 + 3.0 * f1 - f0) / 2.0)));
}

} // namespace

double RadialProfile::value(double r) const {
    if (r < 0.0) r = -r;
    if (r >= tail_r_) return tail_value(r);
    return interp4(values_, step_, r, +1);
}

double RadialProfile::deriv(double r) const {
    if (r < 0.0) r = -r;
    if (r >= tail_r_) return tail_deriv(r);
    return interp4(derivs_, step_, r, -1);
}

RadialProfile shoot_townes(double r_max, double tol, double step) {
    if (r_max < 15.0) throw ConfigError("shoot_townes: R_max must be >= 15");
    if (tol > 1e-10) throw ConfigError("shoot_townes: tol must be <= 1e-10");
    if (!(step > 0.0 && step < 1e-2)) throw ConfigError("shoot_townes: bad step");

    // Classification continues well past r_max so that brackets tight enough
    // to track the separatrix to r_max still get decided.
    const double r_classify = 2.0 * r_max;

    double lo = 0.0, hi = 0.0; // lo diverges (+1), hi crosses zero (-1)
    for (double b : {2.0, 1.5, 1.0}) {
        if (classify_trajectory(b, step, r_classify) == +1) {
            lo = b;
            break;
        }
    }
    for (double b : {2.5, 3.0, 4.0}) {
        if (classify_trajectory(b, step, r_classify) == -1) {
            hi = b;
            break;
        }
    }
    if (lo == 0.0 || hi == 0.0)
        throw ConfigError("shoot_townes: bisection bracket not found");

    // Refine all the way to double resolution; the requested tol is only a
    // floor that must be met.
    const int max_iter = 200;
    int iter = 0;
    while (true) {
        if (++iter > max_iter)
            throw NumericalError("shoot_townes: bisection failed to converge");
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (classify_trajectory(mid, step, r_classify) == +1)
            lo = mid;
        else
            hi = mid;
    }
    if (hi - lo > tol)
        throw NumericalError("shoot_townes: bisection stalled above tol");
    const double b = 0.5 * (lo + hi);

    // Final pass: record the trajectory, then splice in the asymptotic tail
    // from the radius where Q falls under the switch level. The bracket is
    // tight enough that the trajectory is still on the separatrix there.
    const double q_switch = 1e-5;
    const double blend_width = 2.0;
    const long n_nodes = std::lround(r_max / step) + 1;

    std::vector<double> qs(static_cast<std::size_t>(n_nodes));
    std::vector<double> ps(static_cast<std::size_t>(n_nodes));
    qs[0] = b;
    ps[0] = 0.0;

    OdeState s = series_start(b, kSeriesR0);
    s = rk4_step(kSeriesR0, s, step - kSeriesR0);
    qs[1] = s.q;
    ps[1] = s.p;
    double r = step;
    long i_switch = -1;
    for (long i = 2; i < n_nodes; ++i) {
        s = rk4_step(r, s, step);
        r += step;
        qs[static_cast<std::size_t>(i)] = s.q;
        ps[static_cast<std::size_t>(i)] = s.p;
        if (i_switch < 0 && s.q < q_switch) i_switch = i;
        if (i_switch >= 0 && r > step * i_switch + blend_width) break;
    }
    if (i_switch < 0)
        throw NumericalError("shoot_townes: trajectory never reached the tail regime");

    const double r_switch = step * static_cast<double>(i_switch);
    const double amp = qs[static_cast<std::size_t>(i_switch)] / tail_shape(r_switch);
    for (long i = i_switch; i < n_nodes; ++i) {
        const double ri = step * static_cast<double>(i);
        const double t = std::clamp((ri - r_switch) / blend_width, 0.0, 1.0);
        const double w = 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
        const double wp =
            (t <= 0.0 || t >= 1.0) ? 0.0 : -30.0 * t * t * (1.0 - t) * (1.0 - t) / blend_width;
        const double tq = amp * tail_shape(ri);
        const double tp = amp * tail_shape_deriv(ri);
        if (t >= 1.0) {
            qs[static_cast<std::size_t>(i)] = tq;
            ps[static_cast<std::size_t>(i)] = tp;
        } else {
            const double q_num = qs[static_cast<std::size_t>(i)];
            const double p_num = ps[static_cast<std::size_t>(i)];
            qs[static_cast<std::size_t>(i)] = w * q_num + (1.0 - w) * tq;
            ps[static_cast<std::size_t>(i)] =
                w * p_num + (1.0 - w) * tp + wp * (q_num - tq);
        }
    }
    return RadialProfile(step, std::move(qs), std::move(ps), b);
}

namespace {

// Composite Simpson on the uniform radial samples (even interval count by
// construction of shoot_townes).
double simpson(const std::vector<double>& f, double h) {
    const std::size_t n = f.size();
    double s = f[0] + f[n - 1];
    for (std::size_t i = 1; i + 1 < n; ++i) s += f[i] * (i % 2 == 1 ? 4.0 : 2.0);
    return s * h / 3.0;
}

} // namespace

TownesConstants townes_constants(const RadialProfile& q) {
    const std::size_t n = q.values().size();
    const double h = q.step();
    std::vector<double> f2(n), fg(n), fm(n), f4(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = h * static_cast<double>(i);
        const double qq = q.values()[i];
        const double pp = q.derivs()[i];
        f2[i] = qq * qq * r;
        fg[i] = pp * pp * r;
        fm[i] = qq * qq * r * r * r;
        f4[i] = qq * qq * qq * qq * r;
    }
    const double two_pi = 2.0 * std::numbers::pi;
    TownesConstants c{};
    c.a_star = two_pi * simpson(f2, h);
    c.grad2 = two_pi * simpson(fg, h);
    c.m2 = two_pi * simpson(fm, h);
    c.q4 = two_pi * simpson(f4, h);
    c.lambda = std::pow(1.25 * c.m2, 0.25);
    c.c_tilde = -2.0 * c.m2 / c.a_star;
    c.q0 = q.q0();
    c.pohozaev_grad = std::abs(c.grad2 - c.a_star) / c.a_star;
    c.pohozaev_quart = std::abs(0.5 * c.q4 - c.a_star) / c.a_star;
    return c;
}

ComplexField2D lift_to_grid(const RadialProfile& q, const Grid2D& grid,
                            std::array<double, 2> center) {
    const double need = grid.extent() * std::numbers::sqrt2 +
                        std::hypot(center[0], center[1]);
    if (q.r_max() < need)
        throw RangeError("lift_to_grid: grid extends beyond profile support");
    const int N = grid.n();
    const double span = 2.0 * grid.extent();
    ComplexField2D out(grid);
    for (int ix = 0; ix < N; ++ix) {
        const double x = grid.coord(ix) - center[0];
        for (int iy = 0; iy < N; ++iy) {
            const double y = grid.coord(iy) - center[1];
            double v = 0.0;
            for (int mx = -1; mx <= 1; ++mx)
                for (int my = -1; my <= 1; ++my)
                    v += q.value(std::hypot(x - span * mx, y - span * my));
            out.at(ix, iy) = cplx(v, 0.0);
        }
    }
    return out;
}

double gn_equality_check(const RadialProfile& q, const Grid2D& grid) {
    const TownesConstants c = townes_constants(q);
    const ComplexField2D qf = lift_to_grid(q, grid, {0.0, 0.0});
    const auto [dx, dy] = gradient(qf);
    const double grad2 = dx.mass() + dy.mass();
    const double mass = qf.mass();
    double quart = 0.0;
    for (const cplx& v : qf.samples()) quart += std::norm(v) * std::norm(v);
    quart *= grid.spacing() * grid.spacing();
    return std::abs(quart - 2.0 / c.a_star * grad2 * mass) / quart;
}

void write_constants(const std::string& path, const TownesConstants& c) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot open constants file for writing: " + path);
    std::fprintf(f, "a_star = %.17g\n", c.a_star);
    std::fprintf(f, "M2 = %.17g\n", c.m2);
    std::fprintf(f, "lambda = %.17g\n", c.lambda);
    std::fprintf(f, "C_tilde = %.17g\n", c.c_tilde);
    std::fprintf(f, "q0 = %.17g\n", c.q0);
    std::fclose(f);
}

TownesConstants read_constants(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open constants file: " + path);
    std::map<std::string, double> kv;
    std::string line;
    while (std::getline(f, line)) {
        std::istringstream ss(line);
        std::string key, eq;
        double val;
        if (ss >> key >> eq >> val && eq == "=") kv[key] = val;
    }
    for (const char* k : {"a_star", "M2", "lambda", "C_tilde", "q0"})
        if (!kv.count(k)) throw IoError("constants file missing key: " + std::string(k));
    TownesConstants c{};
    c.a_star = kv["a_star"];
    c.m2 = kv["M2"];
    c.lambda = kv["lambda"];
    c.c_tilde = kv["C_tilde"];
    c.q0 = kv["q0"];
    c.grad2 = c.a_star;
    c.q4 = 2.0 * c.a_star;
    return c;
}

} // namespace rotbec
