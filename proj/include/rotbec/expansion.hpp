#pragma once

#include <array>
#include <string>
#include <vector>

#include "rotbec/grid.hpp"
#include "rotbec/townes.hpp"

namespace rotbec {

// Self-adjoint Schrodinger-type operator -Lap + 1 - c Q^2 with its discrete
// kernel basis. kind L has c=1 (kernel {Q}); kind Ltilde has c=3 (kernel
// {d1 Q, d2 Q}).
class LinearizedOperator {
public:
    enum class Kind { L, Ltilde };

    LinearizedOperator(Kind kind, const RadialProfile& q, const Grid2D& grid);

    Kind kind() const { return kind_; }
    const Grid2D& grid() const { return grid_; }
    const std::vector<double>& potential() const { return potential_; }
    const std::vector<ComplexField2D>& kernel() const { return kernel_; }

    ComplexField2D apply(const ComplexField2D& v) const;
    // ||A k|| / ||k|| for each kernel field.
    std::vector<double> kernel_residuals() const;

private:
    Kind kind_;
    Grid2D grid_;
    std::vector<double> potential_; // 1 - c Q^2
    std::vector<ComplexField2D> kernel_;
};

struct SolveOptions {
    double rel_tol = 1e-10;
    int max_iter = 4000;
    double orth_tol = 1e-8; // solvability threshold, relative to scale
};

// Box for the correction-problem solves. Larger than the comparison grid:
// the solvability integrands carry |x|^3-weighted tails that are only
// negligible past |x| ~ 14.
Grid2D expansion_grid();

// Minimal-norm solution of A x = rhs orthogonal to the kernel, via MINRES on
// the kernel complement with (1 - Lap)^{-1} preconditioning. Throws
// OrthogonalityError when the rhs has a kernel component beyond orth_tol.
ComplexField2D solve_kernel_projected(const LinearizedOperator& A,
                                      const ComplexField2D& rhs,
                                      const SolveOptions& opts = {});

struct ExpansionSet {
    ComplexField2D psi1;
    ComplexField2D psi2;
    ComplexField2D phi_i;
    std::array<double, 2> x0{1.0, 0.0};
    // Solvability inner products, relative to ||rhs|| ||k||.
    double psi1_solvability = 0.0;
    double psi2_solvability = 0.0;
    double phi_solvability = 0.0;
    // Normalization records.
    double grad_psi1_origin = 0.0;
    double grad_psi2_origin = 0.0;
    double q_phi_inner = 0.0;
};

// Ltilde Psi1 = -[|x|^2 + (x.x0)^2/2] Q with grad Psi1(0) = 0.
ComplexField2D solve_psi1(const RadialProfile& q, const Grid2D& grid,
                          std::array<double, 2> x0);

// Ltilde Psi2 = -(1/2)(|x|^2 + c_tilde)(x.x0) Q with grad Psi2(0) = 0.
// Solvable only at the true c_tilde = -2 M2 / a*.
ComplexField2D solve_psi2(const RadialProfile& q, const Grid2D& grid,
                          std::array<double, 2> x0, double c_tilde);

// L Phi_I = -2 (x_perp . grad Psi1) with <Q, Phi_I> = 0.
ComplexField2D solve_phi_I(const RadialProfile& q, const Grid2D& grid,
                           const ComplexField2D& psi1);

ExpansionSet solve_expansion_set(const RadialProfile& q, const TownesConstants& tc,
                                 const Grid2D& grid, std::array<double, 2> x0);

struct ExpansionResiduals {
    double r0 = 0.0;   // ||nu - Q||_inf
    double r1 = 0.0;   // ||nu - Q - W^2 e^4 Psi1||_inf / (W^2 e^4)
    double r2 = 0.0;   // ||nu - Q - W^2 e^4 Psi1 - W^2 e^5 Psi2||_inf / (W^2 e^5)
    double r_im = 0.0; // ||Im nu - W^3 e^6 Phi_I||_inf / (W^3 e^6)
    double im_scale = 0.0; // ||Im nu||_inf / (W^3 e^6)
};

ExpansionResiduals expansion_residuals(const ComplexField2D& nu,
                                       const RadialProfile& q,
                                       const ExpansionSet& set, double omega,
                                       double eps_bar);

void write_residual_report(const std::string& path, const ExpansionSet& set,
                           const ExpansionResiduals* res);

} // namespace rotbec
