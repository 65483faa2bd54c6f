#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "rotbec/expansion.hpp"
#include "rotbec/gpe.hpp"
#include "rotbec/rescale.hpp"
#include "rotbec/sweep.hpp"
#include "rotbec/townes.hpp"
#include "rotbec/vortex.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace rotbec;

namespace {

py::array_t<cplx> field_to_numpy(const ComplexField2D& f) {
    const int n = f.grid().n();
    py::array_t<cplx> out({n, n});
    auto r = out.mutable_unchecked<2>();
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy) r(ix, iy) = f.at(ix, iy);
    return out;
}

ComplexField2D numpy_to_field(const Grid2D& g, const py::array_t<cplx>& arr) {
    auto r = arr.unchecked<2>();
    if (r.shape(0) != g.n() || r.shape(1) != g.n())
        throw ConfigError("array shape does not match the grid");
    ComplexField2D f(g);
    for (int ix = 0; ix < g.n(); ++ix)
        for (int iy = 0; iy < g.n(); ++iy) f.at(ix, iy) = r(ix, iy);
    return f;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "rotating attractive Bose gas ground-state laboratory";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<NumericalError>(m, "NumericalError");
    py::register_exception<IoError>(m, "IoError");

    py::class_<Grid2D>(m, "Grid2D")
        .def(py::init<double, int>(), "half_extent"_a, "points_per_side"_a)
        .def_property_readonly("L", &Grid2D::extent)
        .def_property_readonly("N", &Grid2D::n)
        .def_property_readonly("h", &Grid2D::spacing)
        .def("coord", &Grid2D::coord);

    py::class_<RadialProfile>(m, "RadialProfile")
        .def_property_readonly("r_max", &RadialProfile::r_max)
        .def_property_readonly("q0", &RadialProfile::q0)
        .def("value", py::vectorize(&RadialProfile::value))
        .def("deriv", py::vectorize(&RadialProfile::deriv));

    py::class_<TownesConstants>(m, "TownesConstants")
        .def_readonly("a_star", &TownesConstants::a_star)
        .def_readonly("m2", &TownesConstants::m2)
        .def_readonly("lambda_", &TownesConstants::lambda)
        .def_readonly("c_tilde", &TownesConstants::c_tilde)
        .def_readonly("q0", &TownesConstants::q0)
        .def_readonly("pohozaev_grad", &TownesConstants::pohozaev_grad)
        .def_readonly("pohozaev_quart", &TownesConstants::pohozaev_quart);

    m.def("shoot_townes", &shoot_townes, "r_max"_a = 20.0, "tol"_a = 1e-12,
          "step"_a = 1e-3);
    m.def("townes_constants", &townes_constants);
    m.def(
        "lift_to_grid",
        [](const RadialProfile& q, const Grid2D& g, double cx, double cy) {
            return field_to_numpy(lift_to_grid(q, g, {cx, cy}));
        },
        "profile"_a, "grid"_a, "cx"_a = 0.0, "cy"_a = 0.0);

    py::class_<TrapSpec>(m, "TrapSpec")
        .def_readonly("c0", &TrapSpec::c0)
        .def_readonly("beta", &TrapSpec::beta)
        .def_readonly("a", &TrapSpec::a)
        .def_readonly("a_star", &TrapSpec::a_star)
        .def_readonly("omega", &TrapSpec::omega);
    m.def("make_trap", &make_trap, "c0"_a, "beta"_a, "a"_a, "a_star"_a);

    py::class_<EnergyBreakdown>(m, "EnergyBreakdown")
        .def_readonly("covariant_kinetic", &EnergyBreakdown::covariant_kinetic)
        .def_readonly("trap", &EnergyBreakdown::trap)
        .def_readonly("interaction", &EnergyBreakdown::interaction)
        .def_readonly("total", &EnergyBreakdown::total);

    m.def(
        "energy",
        [](const Grid2D& g, const py::array_t<cplx>& u, const TrapSpec& t) {
            return energy(numpy_to_field(g, u), t);
        },
        "grid"_a, "u"_a, "trap"_a);
    m.def(
        "init_trial",
        [](const Grid2D& g, const TrapSpec& t, const RadialProfile& q, double y1,
           double y2, double tau) {
            return field_to_numpy(init_trial(g, t, q, {y1, y2}, tau));
        },
        "grid"_a, "trap"_a, "profile"_a, "y1"_a, "y2"_a, "tau"_a);

    py::class_<MinimizerResult>(m, "MinimizerResult")
        .def_property_readonly("field",
                               [](const MinimizerResult& r) {
                                   return field_to_numpy(r.field);
                               })
        .def_readonly("energy", &MinimizerResult::energy)
        .def_readonly("mu", &MinimizerResult::mu)
        .def_readonly("iterations", &MinimizerResult::iterations)
        .def_readonly("residual_norm", &MinimizerResult::residual_norm)
        .def_readonly("converged", &MinimizerResult::converged)
        .def_readonly("x_a", &MinimizerResult::x_a)
        .def_readonly("eps_a", &MinimizerResult::eps_a)
        .def_property_readonly("eps_bar", [](const MinimizerResult& r) {
            return r.eps_bar ? py::cast(*r.eps_bar) : py::none().cast<py::object>();
        });

    m.def(
        "minimize",
        [](const TrapSpec& t, const Grid2D& g, const py::array_t<cplx>& init,
           double tol, int max_iter, int restarts, std::uint64_t seed) {
            MinimizeOptions opts;
            opts.tol = tol;
            opts.max_iter = max_iter;
            opts.restarts = restarts;
            opts.seed = seed;
            return minimize(t, g, numpy_to_field(g, init), opts);
        },
        "trap"_a, "grid"_a, "init"_a, "tol"_a = 1e-6, "max_iter"_a = 50000,
        "restarts"_a = 1, "seed"_a = 20260810ULL);

    m.def(
        "locate_max",
        [](const Grid2D& g, const py::array_t<cplx>& u) {
            return locate_max(numpy_to_field(g, u));
        },
        "grid"_a, "u"_a);
    m.def(
        "rescale",
        [](const Grid2D& g, const py::array_t<cplx>& u, std::array<double, 2> x_a,
           double eps, double omega, double amplitude, const Grid2D& target) {
            return field_to_numpy(
                rescale(numpy_to_field(g, u), x_a, eps, omega, amplitude, target));
        },
        "grid"_a, "u"_a, "x_a"_a, "eps"_a, "omega"_a, "amplitude"_a, "target"_a);
    m.def(
        "align_phase",
        [](const Grid2D& g, const py::array_t<cplx>& v, const py::array_t<cplx>& q) {
            AlignedField a = align_phase(numpy_to_field(g, v), numpy_to_field(g, q));
            return py::make_tuple(a.theta, field_to_numpy(a.field));
        },
        "grid"_a, "v"_a, "qfield"_a);
    m.def("comparison_grid", &comparison_grid);

    m.def(
        "winding_map",
        [](const Grid2D& g, const py::array_t<cplx>& u) {
            const WindingMap w = winding_map(numpy_to_field(g, u));
            const int n = g.n();
            py::array_t<int> out({n, n});
            auto r = out.mutable_unchecked<2>();
            for (int ix = 0; ix < n; ++ix)
                for (int iy = 0; iy < n; ++iy) r(ix, iy) = w.at(ix, iy);
            return out;
        },
        "grid"_a, "u"_a);
    m.def(
        "vortex_free_radius",
        [](const Grid2D& g, const py::array_t<cplx>& u, double threshold,
           double scan_radius) {
            return vortex_free_radius(numpy_to_field(g, u), threshold, scan_radius);
        },
        "grid"_a, "u"_a, "threshold"_a = 1e-6, "scan_radius"_a = 0.0);

    m.def(
        "solve_psi1",
        [](const RadialProfile& q, const Grid2D& g, std::array<double, 2> x0) {
            return field_to_numpy(solve_psi1(q, g, x0));
        },
        "profile"_a, "grid"_a, "x0"_a);
    m.def(
        "solve_psi2",
        [](const RadialProfile& q, const Grid2D& g, std::array<double, 2> x0,
           double c_tilde) {
            return field_to_numpy(solve_psi2(q, g, x0, c_tilde));
        },
        "profile"_a, "grid"_a, "x0"_a, "c_tilde"_a);
    m.def(
        "solve_phi_I",
        [](const RadialProfile& q, const Grid2D& g, const py::array_t<cplx>& psi1) {
            return field_to_numpy(solve_phi_I(q, g, numpy_to_field(g, psi1)));
        },
        "profile"_a, "grid"_a, "psi1"_a);

    m.def(
        "run_sweep_config",
        [](const std::string& config_path) {
            SweepConfig cfg = parse_config(config_path);
            const RadialProfile q = shoot_townes();
            const TownesConstants tc = townes_constants(q);
            const auto rows = run_sweep(cfg, q, tc);
            emit_report(rows, tc, cfg.outdir);
            py::list out;
            for (const auto& r : rows) {
                py::dict d;
                d["frac"] = r.frac;
                d["status"] = r.status;
                d["energy"] = r.blowup.energy;
                d["mu"] = r.blowup.mu;
                d["eps_a"] = r.blowup.eps_a;
                d["eps_bar"] = r.blowup.eps_bar;
                d["x_a_norm"] = std::hypot(r.blowup.x_a[0], r.blowup.x_a[1]);
                d["sup_dist"] = r.blowup.sup_dist;
                d["n_vortices"] = r.n_vortices;
                d["vortex_free_radius"] = r.vortex_free_radius;
                out.append(std::move(d));
            }
            return out;
        },
        "config_path"_a);
}
