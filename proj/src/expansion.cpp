#include "rotbec/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "rotbec/rescale.hpp"

namespace rotbec {

Grid2D expansion_grid() { return Grid2D(16.0, 512); }

namespace {

std::pair<ComplexField2D, ComplexField2D> lift_gradient(const RadialProfile& q,
                                                        const Grid2D& grid) {
    const int N = grid.n();
    const double span = 2.0 * grid.extent();
    ComplexField2D gx(grid), gy(grid);
    for (int ix = 0; ix < N; ++ix) {
        const double x = grid.coord(ix);
        for (int iy = 0; iy < N; ++iy) {
            const double y = grid.coord(iy);
            double sx = 0.0, sy = 0.0;
            for (int mx = -1; mx <= 1; ++mx)
                for (int my = -1; my <= 1; ++my) {
                    const double dx = x - span * mx;
                    const double dy = y - span * my;
                    const double r = std::hypot(dx, dy);
                    if (r < 1e-12) continue; // grad Q(0) = 0
                    const double dq = q.deriv(r);
                    sx += dq * dx / r;
                    sy += dq * dy / r;
                }
            gx.at(ix, iy) = cplx(sx, 0.0);
            gy.at(ix, iy) = cplx(sy, 0.0);
        }
    }
    return {std::move(gx), std::move(gy)};
}

ComplexField2D normalized_copy(const ComplexField2D& f) {
    ComplexField2D out = f;
    const double s = 1.0 / std::sqrt(f.mass());
    for (cplx& v : out.data()) v *= s;
    return out;
}

double re_inner(const ComplexField2D& a, const ComplexField2D& b) {
    return std::real(inner(a, b));
}

void axpy(ComplexField2D& y, double alpha, const ComplexField2D& x) {
    for (std::size_t i = 0; i < y.samples().size(); ++i)
        y.data()[i] += alpha * x.samples()[i];
}

} // namespace

LinearizedOperator::LinearizedOperator(Kind kind, const RadialProfile& q,
                                       const Grid2D& grid)
    : kind_(kind), grid_(grid) {
    const ComplexField2D qf = lift_to_grid(q, grid, {0.0, 0.0});
    const double c = (kind == Kind::L) ? 1.0 : 3.0;
    potential_.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        potential_[i] = 1.0 - c * std::norm(qf.samples()[i]);
    if (kind == Kind::L) {
        kernel_.push_back(normalized_copy(qf));
    } else {
        auto [gx, gy] = lift_gradient(q, grid);
        // Orthogonal by parity already; normalize and re-orthogonalize anyway.
        ComplexField2D k1 = normalized_copy(gx);
        ComplexField2D k2 = gy;
        axpy(k2, -re_inner(k1, k2), k1);
        kernel_.push_back(std::move(k1));
        kernel_.push_back(normalized_copy(k2));
    }
}

ComplexField2D LinearizedOperator::apply(const ComplexField2D& v) const {
    if (v.grid() != grid_) throw ConfigError("LinearizedOperator: wrong grid");
    ComplexField2D out = laplacian(v);
    for (std::size_t i = 0; i < grid_.size(); ++i)
        out.data()[i] = -out.samples()[i] + potential_[i] * v.samples()[i];
    return out;
}

std::vector<double> LinearizedOperator::kernel_residuals() const {
    std::vector<double> res;
    for (const ComplexField2D& k : kernel_) {
        const ComplexField2D ak = apply(k);
        res.push_back(std::sqrt(ak.mass() / k.mass()));
    }
    return res;
}

namespace {

void project_out_kernel(const LinearizedOperator& A, ComplexField2D& v) {
    for (const ComplexField2D& k : A.kernel()) axpy(v, -re_inner(k, v), k);
}

} // namespace

ComplexField2D solve_kernel_projected(const LinearizedOperator& A,
                                      const ComplexField2D& rhs,
                                      const SolveOptions& opts) {
    const Grid2D& g = A.grid();
    if (rhs.grid() != g) throw ConfigError("solve_kernel_projected: wrong grid");

    const double rhs_norm = std::sqrt(rhs.mass());
    if (rhs_norm == 0.0) return ComplexField2D(g);

    for (const ComplexField2D& k : A.kernel()) {
        const double ip = re_inner(k, rhs);
        const double scale = rhs_norm * std::sqrt(k.mass());
        if (std::abs(ip) > opts.orth_tol * scale)
            throw OrthogonalityError(
                "solve_kernel_projected: rhs not orthogonal to the kernel "
                "(inner product " + std::to_string(ip) + ")",
                ip);
    }

    ComplexField2D b = rhs;
    project_out_kernel(A, b);

    auto op = [&](const ComplexField2D& v) {
        ComplexField2D w = A.apply(v);
        project_out_kernel(A, w);
        return w;
    };
    auto prec = [&](const ComplexField2D& v) {
        ComplexField2D w = spectral::helmholtz_inverse(v, 1.0);
        project_out_kernel(A, w);
        return w;
    };

    // Preconditioned MINRES on the kernel complement (the operator is
    // symmetric but indefinite there for the Ltilde case).
    ComplexField2D x(g);
    ComplexField2D r1 = b;
    ComplexField2D y = prec(r1);
    double beta1 = re_inner(r1, y);
    if (beta1 <= 0.0) return x;
    beta1 = std::sqrt(beta1);

    double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0;
    double phibar = beta1, cs = -1.0, sn = 0.0, oldeps = 0.0;
    ComplexField2D r2 = r1;
    ComplexField2D w(g), w2(g);

    const double target = opts.rel_tol * beta1;
    bool converged = false;
    for (int it = 0; it < opts.max_iter; ++it) {
        ComplexField2D v = y;
        for (cplx& c : v.data()) c *= 1.0 / beta;
        y = op(v);
        if (it >= 1) axpy(y, -beta / oldb, r1);
        const double alfa = re_inner(v, y);
        axpy(y, -alfa / beta, r2);
        r1 = r2;
        r2 = y;
        y = prec(r2);
        oldb = beta;
        beta = re_inner(r2, y);
        if (beta < 0.0) throw NumericalError("minres: preconditioner not SPD");
        beta = std::sqrt(beta);

        oldeps = epsln;
        const double delta = cs * dbar + sn * alfa;
        const double gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        double gamma = std::hypot(gbar, beta);
        gamma = std::max(gamma, 1e-300);
        cs = gbar / gamma;
        sn = beta / gamma;
        const double phi = cs * phibar;
        phibar = sn * phibar;

        ComplexField2D w1 = w2;
        w2 = w;
        w = v;
        axpy(w, -oldeps, w1);
        axpy(w, -delta, w2);
        for (cplx& c : w.data()) c *= 1.0 / gamma;
        axpy(x, phi, w);

        if (phibar <= target) {
            converged = true;
            break;
        }
    }

    project_out_kernel(A, x);
    ComplexField2D res = A.apply(x);
    for (std::size_t i = 0; i < g.size(); ++i) res.data()[i] -= b.samples()[i];
    project_out_kernel(A, res);
    const double final_rel = std::sqrt(res.mass()) / rhs_norm;
    if (!converged && final_rel > 1e-8)
        throw NumericalError("solve_kernel_projected: iteration stalled at relative "
                             "residual " + std::to_string(final_rel));
    return x;
}

namespace {

struct NormalizedSolve {
    ComplexField2D field;
    double solvability;
    double grad_origin;
};

// Solve Ltilde psi = rhs, then add the kernel combination fixing
// grad psi(0) = 0 through the (nondegenerate) Hessian of Q at the origin.
NormalizedSolve solve_normalized(const LinearizedOperator& lt,
                                 const RadialProfile& q, const Grid2D& grid,
                                 const ComplexField2D& rhs) {
    double solv = 0.0;
    const double rn = std::sqrt(rhs.mass());
    for (const ComplexField2D& k : lt.kernel())
        solv = std::max(solv, std::abs(re_inner(k, rhs)) / (rn * std::sqrt(k.mass())));

    ComplexField2D psi = solve_kernel_projected(lt, rhs);

    auto [gx, gy] = gradient(psi);
    const int o = grid.origin_index();
    const double g1 = std::real(gx.at(o, o));
    const double g2 = std::real(gy.at(o, o));

    // Response matrix from the kernel fields as discretized, so the
    // correction is exact for the gradients we actually measure. This is the
    // Hessian of Q at the origin up to discretization (nondegenerate).
    auto [k1, k2] = lift_gradient(q, grid);
    const auto [k1x, k1y] = gradient(k1);
    const auto [k2x, k2y] = gradient(k2);
    const double h11 = std::real(k1x.at(o, o));
    const double h21 = std::real(k1y.at(o, o));
    const double h12 = std::real(k2x.at(o, o));
    const double h22 = std::real(k2y.at(o, o));
    const double det = h11 * h22 - h12 * h21;
    if (std::abs(det) < 1e-12)
        throw NumericalError("solve_normalized: degenerate Hessian of Q at 0");
    // grad(psi + c1 k1 + c2 k2)(0) = 0
    const double c1 = -(h22 * g1 - h12 * g2) / det;
    const double c2 = -(h11 * g2 - h21 * g1) / det;

    axpy(psi, c1, k1);
    axpy(psi, c2, k2);

    auto [px, py] = gradient(psi);
    const double res_grad =
        std::hypot(std::real(px.at(o, o)), std::real(py.at(o, o)));
    if (res_grad > 1e-8)
        throw NumericalError("solve_normalized: grad psi(0) normalization failed; "
                             "grid/symmetry problem");
    return {std::move(psi), solv, res_grad};
}

ComplexField2D psi1_rhs(const RadialProfile& q, const Grid2D& grid,
                        std::array<double, 2> x0) {
    const ComplexField2D qf = lift_to_grid(q, grid, {0.0, 0.0});
    const int N = grid.n();
    ComplexField2D rhs(grid);
    for (int ix = 0; ix < N; ++ix) {
        const double x = grid.coord(ix);
        for (int iy = 0; iy < N; ++iy) {
            const double y = grid.coord(iy);
            const double dot = x * x0[0] + y * x0[1];
            rhs.at(ix, iy) =
                -(x * x + y * y + 0.5 * dot * dot) * qf.at(ix, iy);
        }
    }
    return rhs;
}

ComplexField2D psi2_rhs(const RadialProfile& q, const Grid2D& grid,
                        std::array<double, 2> x0, double c_tilde) {
    const ComplexField2D qf = lift_to_grid(q, grid, {0.0, 0.0});
    const int N = grid.n();
    ComplexField2D rhs(grid);
    for (int ix = 0; ix < N; ++ix) {
        const double x = grid.coord(ix);
        // the odd coordinate factor uses the symmetrized seam value (the -L
        // column has no +L partner; 0 is the pairwise-consistent choice)
        const double xs = (ix == 0) ? 0.0 : x;
        for (int iy = 0; iy < N; ++iy) {
            const double y = grid.coord(iy);
            const double ys = (iy == 0) ? 0.0 : y;
            const double dot = xs * x0[0] + ys * x0[1];
            rhs.at(ix, iy) =
                -0.5 * (x * x + y * y + c_tilde) * dot * qf.at(ix, iy);
        }
    }
    return rhs;
}

} // namespace

ComplexField2D solve_psi1(const RadialProfile& q, const Grid2D& grid,
                          std::array<double, 2> x0) {
    LinearizedOperator lt(LinearizedOperator::Kind::Ltilde, q, grid);
    return solve_normalized(lt, q, grid, psi1_rhs(q, grid, x0)).field;
}

ComplexField2D solve_psi2(const RadialProfile& q, const Grid2D& grid,
                          std::array<double, 2> x0, double c_tilde) {
    LinearizedOperator lt(LinearizedOperator::Kind::Ltilde, q, grid);
    return solve_normalized(lt, q, grid, psi2_rhs(q, grid, x0, c_tilde)).field;
}

ComplexField2D solve_phi_I(const RadialProfile& q, const Grid2D& grid,
                           const ComplexField2D& psi1) {
    LinearizedOperator lop(LinearizedOperator::Kind::L, q, grid);
    const auto [gx, gy] = gradient(psi1);
    const int N = grid.n();
    ComplexField2D rhs(grid);
    for (int ix = 0; ix < N; ++ix) {
        const double x = grid.coord(ix);
        for (int iy = 0; iy < N; ++iy) {
            const double y = grid.coord(iy);
            // x_perp . grad = -y d1 + x d2
            rhs.at(ix, iy) = -2.0 * (-y * gx.at(ix, iy) + x * gy.at(ix, iy));
        }
    }
    // a radial psi1 leaves only derivative noise; the solution is zero
    if (rhs.mass() <= 1e-20 * psi1.mass()) return ComplexField2D(grid);
    ComplexField2D phi = solve_kernel_projected(lop, rhs);
    // Exact zero-mean against Q by final projection.
    axpy(phi, -re_inner(lop.kernel()[0], phi), lop.kernel()[0]);
    return phi;
}

ExpansionSet solve_expansion_set(const RadialProfile& q, const TownesConstants& tc,
                                 const Grid2D& grid, std::array<double, 2> x0) {
    LinearizedOperator lt(LinearizedOperator::Kind::Ltilde, q, grid);
    LinearizedOperator lop(LinearizedOperator::Kind::L, q, grid);

    NormalizedSolve s1 = solve_normalized(lt, q, grid, psi1_rhs(q, grid, x0));
    NormalizedSolve s2 =
        solve_normalized(lt, q, grid, psi2_rhs(q, grid, x0, tc.c_tilde));

    ExpansionSet set{ComplexField2D(grid), ComplexField2D(grid), ComplexField2D(grid),
                     x0};
    set.psi1 = std::move(s1.field);
    set.psi2 = std::move(s2.field);
    set.psi1_solvability = s1.solvability;
    set.psi2_solvability = s2.solvability;
    set.grad_psi1_origin = s1.grad_origin;
    set.grad_psi2_origin = s2.grad_origin;

    const auto [gx, gy] = gradient(set.psi1);
    const int N = grid.n();
    ComplexField2D rhs(grid);
    for (int ix = 0; ix < N; ++ix) {
        const double x = grid.coord(ix);
        for (int iy = 0; iy < N; ++iy)
            rhs.at(ix, iy) = -2.0 * (-grid.coord(iy) * gx.at(ix, iy) +
                                     x * gy.at(ix, iy));
    }
    const ComplexField2D& qk = lop.kernel()[0];
    set.phi_solvability =
        std::abs(re_inner(qk, rhs)) / std::sqrt(rhs.mass() * qk.mass());
    set.phi_i = solve_kernel_projected(lop, rhs);
    axpy(set.phi_i, -re_inner(qk, set.phi_i), qk);
    // report against the unnormalized Q
    set.q_phi_inner = re_inner(qk, set.phi_i) * std::sqrt(tc.a_star);
    return set;
}

ExpansionResiduals expansion_residuals(const ComplexField2D& nu,
                                       const RadialProfile& q,
                                       const ExpansionSet& set, double omega,
                                       double eps_bar) {
    const Grid2D& g = nu.grid();
    // Correction fields solved on a larger box get resampled onto nu's grid.
    auto on_nu_grid = [&](const ComplexField2D& f) {
        if (f.grid() == g) return f;
        if (f.grid().extent() < g.extent())
            throw ConfigError("expansion_residuals: correction grid too small");
        return rescale(f, {0.0, 0.0}, 1.0, 0.0, 1.0, g);
    };
    const ComplexField2D psi1 = on_nu_grid(set.psi1);
    const ComplexField2D psi2 = on_nu_grid(set.psi2);
    const ComplexField2D phi_i = on_nu_grid(set.phi_i);
    const ComplexField2D qf = lift_to_grid(q, g, {0.0, 0.0});
    const double s4 = omega * omega * std::pow(eps_bar, 4);
    const double s5 = omega * omega * std::pow(eps_bar, 5);
    const double s6 = std::pow(omega, 3) * std::pow(eps_bar, 6);
    ExpansionResiduals out;
    double m0 = 0.0, m1 = 0.0, m2 = 0.0, mi = 0.0, mim = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const cplx d0 = nu.samples()[i] - qf.samples()[i];
        const cplx d1 = d0 - s4 * psi1.samples()[i];
        // second-order remainder measured on the real part (the imaginary
        // piece carries its own Phi_I term)
        const double d2 = std::real(d1) - s5 * std::real(psi2.samples()[i]);
        const double im =
            std::imag(nu.samples()[i]) - s6 * std::real(phi_i.samples()[i]);
        m0 = std::max(m0, std::abs(d0));
        m1 = std::max(m1, std::abs(d1));
        m2 = std::max(m2, std::abs(d2));
        mi = std::max(mi, std::abs(im));
        mim = std::max(mim, std::abs(std::imag(nu.samples()[i])));
    }
    out.r0 = m0;
    out.r1 = m1 / s4;
    out.r2 = m2 / s5;
    out.r_im = mi / s6;
    out.im_scale = mim / s6;
    return out;
}

void write_residual_report(const std::string& path, const ExpansionSet& set,
                           const ExpansionResiduals* res) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot open residual report for writing: " + path);
    std::fprintf(f, "x0 = %.17g %.17g\n", set.x0[0], set.x0[1]);
    std::fprintf(f, "psi1_solvability = %.17g\n", set.psi1_solvability);
    std::fprintf(f, "psi2_solvability = %.17g\n", set.psi2_solvability);
    std::fprintf(f, "phi_solvability = %.17g\n", set.phi_solvability);
    std::fprintf(f, "grad_psi1_origin = %.17g\n", set.grad_psi1_origin);
    std::fprintf(f, "grad_psi2_origin = %.17g\n", set.grad_psi2_origin);
    std::fprintf(f, "q_phi_inner = %.17g\n", set.q_phi_inner);
    if (res) {
        std::fprintf(f, "r0 = %.17g\n", res->r0);
        std::fprintf(f, "r1 = %.17g\n", res->r1);
        std::fprintf(f, "r2 = %.17g\n", res->r2);
        std::fprintf(f, "r_im = %.17g\n", res->r_im);
        std::fprintf(f, "im_scale = %.17g\n", res->im_scale);
    }
    std::fclose(f);
}

} // namespace rotbec
