#pragma once

#include <array>
#include <string>
#include <vector>

#include "rotbec/grid.hpp"

namespace rotbec {

// Positive decaying solution of Q'' + Q'/r = Q - Q^3 on [0, R_max], sampled
// on a uniform radial grid. Beyond R_max the profile continues with the
// matched asymptotic tail ~ r^{-1/2} e^{-r}, so value() is total on r >= 0.
class RadialProfile {
public:
    RadialProfile(double step, std::vector<double> values, std::vector<double> derivs,
                  double q0);

    double r_max() const { return step_ * (static_cast<double>(values_.size()) - 1); }
    double step() const { return step_; }
    double q0() const { return q0_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& derivs() const { return derivs_; }

    // Cubic interpolation on the stored range, asymptotic tail beyond it.
    double value(double r) const;
    double deriv(double r) const;

private:
    double tail_value(double r) const;
    double tail_deriv(double r) const;

    double step_;
    std::vector<double> values_;
    std::vector<double> derivs_;
    double q0_;
    double tail_amp_; // A in Q ~ A sqrt(pi/2r) e^{-r} (1 - 1/8r + ...)
    double tail_r_;   // matching radius
};

struct TownesConstants {
    double a_star;        // int Q^2
    double m2;            // int |x|^2 Q^2
    double lambda;        // (5 m2 / 4)^{1/4}
    double c_tilde;       // -8 lambda^4 / (5 a_star) = -2 m2 / a_star
    double q0;            // Q(0)
    double grad2;         // int |grad Q|^2
    double q4;            // int Q^4
    // Relative residuals of int|gradQ|^2 = intQ^2 = (1/2)intQ^4.
    double pohozaev_grad; // |grad2 - a_star| / a_star
    double pohozaev_quart;// |q4/2 - a_star| / a_star
};

// Bisection on Q(0) between a trajectory that crosses zero and one that
// blows up past 2 Q(0); RK4 march with the r=0 singularity started from the
// series Q(r) = Q(0) + Q''(0) r^2/2, Q''(0) = (Q(0) - Q(0)^3)/2.
RadialProfile shoot_townes(double r_max = 24.0, double tol = 1e-12,
                           double step = 1e-3);

TownesConstants townes_constants(const RadialProfile& q);

// Evaluate Q(|x - center|) on the grid nodes, summing the 3x3 ring of
// periodic images so the result is smooth across the box seam.
ComplexField2D lift_to_grid(const RadialProfile& q, const Grid2D& grid,
                            std::array<double, 2> center);

// |int Q^4 - (2/a*) int |grad Q|^2 int Q^2| / int Q^4 on the 2D grid.
double gn_equality_check(const RadialProfile& q, const Grid2D& grid);

// Flat key=value file consumed by the sweep driver.
void write_constants(const std::string& path, const TownesConstants& c);
TownesConstants read_constants(const std::string& path);

} // namespace rotbec
