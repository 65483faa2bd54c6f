#pragma once

#include <array>
#include <string>

#include "rotbec/gpe.hpp"
#include "rotbec/grid.hpp"
#include "rotbec/townes.hpp"

namespace rotbec {

// Common grid every rescaled profile is compared on.
Grid2D comparison_grid();

// Argmax of |u| over nodes, refined by the quadratic model of |u|^2 on the
// 3x3 stencil; ties broken toward the smallest |x|.
std::array<double, 2> locate_max(const ComplexField2D& u);

// v(y) = amplitude * u(x_a + eps y) * exp(-i omega eps (y . x_a_perp)) on the
// target grid, bicubic in the lab field. The amplitude prefactor is explicit
// so both the eps-normalized profile (-> Q/sqrt(a*)) and the eps*sqrt(a) one
// (-> Q) come from the same routine.
ComplexField2D rescale(const ComplexField2D& u, std::array<double, 2> x_a,
                       double eps, double omega, double amplitude,
                       const Grid2D& target);

struct AlignedField {
    double theta = 0.0;
    ComplexField2D field;
};

// Constant phase minimizing ||e^{i theta} v - qfield||_2; afterwards the
// imaginary part is L2-orthogonal to qfield.
AlignedField align_phase(const ComplexField2D& v, const ComplexField2D& qfield);

struct BlowupRecord {
    std::array<double, 2> x_a{0.0, 0.0};
    double eps_a = 0.0;
    double eps_bar = 0.0;
    double theta = 0.0;
    double sup_dist = 0.0; // || |w_a| aligned - Q/sqrt(a*) ||_inf
    double l2_dist = 0.0;
    double eps_ratio = 0.0;     // eps_a / [ (a*-a)^{(1+2b)/4} / (sqrt(C0) lambda) ]
    double mu_eps2 = 0.0;       // -mu * eps_a^2
    double maxpoint_ratio = 0.0; // (|x_a|^2 - 1) / eps_bar^2
    double a = 0.0;
    double beta = 0.0;
    double c0 = 0.0;
    double omega = 0.0;
    double energy = 0.0;
    double mu = 0.0;
};

// Assemble the blow-up diagnostics from a converged run; requires mu < 0.
BlowupRecord blowup_record(const MinimizerResult& result, const RadialProfile& q,
                           const TownesConstants& tc, const TrapSpec& trap);

// CSV row in the fixed order documented in the README.
std::string blowup_csv_header();
std::string blowup_csv_row(const BlowupRecord& r);

} // namespace rotbec
