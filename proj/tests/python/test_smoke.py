"""Smoke tests for the python bindings: quick, coarse-grid sanity checks."""

import math

import numpy as np
import pytest

import rotbec


@pytest.fixture(scope="module")
def profile():
    return rotbec.shoot_townes()


@pytest.fixture(scope="module")
def consts(profile):
    return rotbec.townes_constants(profile)


def test_townes_constants(profile, consts):
    assert abs(profile.q0 - 2.2062) < 1e-3
    assert abs(consts.a_star - 11.7009) < 1e-2
    assert consts.pohozaev_grad < 1e-6
    assert consts.c_tilde == pytest.approx(-2.0 * consts.m2 / consts.a_star)


def test_profile_vectorized_eval(profile):
    r = np.linspace(0.0, 10.0, 101)
    v = profile.value(r)
    assert v.shape == r.shape
    assert np.all(np.diff(v) < 0)


def test_lift_and_energy(profile, consts):
    g = rotbec.Grid2D(12.0, 128)
    qf = rotbec.lift_to_grid(profile, g)
    assert qf.shape == (128, 128)
    mass = g.h * g.h * float(np.sum(np.abs(qf) ** 2))
    assert abs(mass - consts.a_star) / consts.a_star < 1e-3

    trap = rotbec.make_trap(1.0, 0.0, 0.5 * consts.a_star, consts.a_star)
    e = rotbec.energy(g, qf / math.sqrt(mass), trap)
    assert e.trap >= 0.0
    assert e.total == pytest.approx(
        e.covariant_kinetic + e.trap + e.interaction
    )


def test_minimize_small(profile, consts):
    g = rotbec.Grid2D(4.0, 64)
    trap = rotbec.make_trap(1.0, 0.0, 0.9 * consts.a_star, consts.a_star)
    init = rotbec.init_trial(g, trap, profile, 1.0, 0.0, 2.0)
    res = rotbec.minimize(trap, g, init, tol=1e-5, restarts=0)
    assert res.converged
    assert res.mu < 0.0
    assert res.energy.total < 1.0
    assert 0.3 < np.hypot(*res.x_a) < 1.0
    assert res.eps_bar is not None


def test_winding_of_canonical_vortex():
    g = rotbec.Grid2D(4.0, 64)
    x = np.array([g.coord(i) for i in range(g.N)])
    X, Y = np.meshgrid(x, x, indexing="ij")
    X0, Y0 = X - g.h / 2, Y - g.h / 2  # zero off-node inside the first cell
    u = (X0 + 1j * Y0) * np.exp(-3.0 * (X0**2 + Y0**2))
    w = rotbec.winding_map(g, u)
    interior = w[np.hypot(X, Y) <= 2.0]
    assert int(interior.sum()) == 1
    assert rotbec.vortex_free_radius(g, u, 1e-9, 3.0) <= g.h


def test_make_trap_validates(consts):
    with pytest.raises(rotbec.ConfigError):
        rotbec.make_trap(1.0, 0.0, consts.a_star, consts.a_star)
