"""Smoke tests of the python bindings: shapes, analytics, and one short run."""

import math

import numpy as np
import pytest

import cascade_qed as cq


def test_layout_and_operators():
    lay = cq.SpaceLayout(2, 2)
    assert lay.total_dim == 36
    assert lay.decode(lay.index_of("e", 1, 2)) == [3, 1, 2]

    a = cq.annihilation(2)
    assert a.shape == (3, 3)
    assert a[0, 1] == pytest.approx(1.0)
    assert a[1, 2] == pytest.approx(math.sqrt(2.0))

    a_u = cq.embed(a, "u", lay)
    a_l = cq.embed(cq.annihilation(2), "l", lay)
    comm = a_u @ a_l - a_l @ a_u
    assert np.abs(comm).max() < 1e-12

    sigma_gi = cq.transition(lay, "g", "i")
    assert np.count_nonzero(sigma_gi) == 9


def test_analytics_match_measured_rates():
    assert cq.cooperativity(4.0, 30.0, 0.33) == pytest.approx(0.808, abs=0.001)
    assert cq.cooperativity(21.9, 60.0, 3.0) == pytest.approx(1.332, abs=0.001)
    assert cq.purcell_lifetime(26.2, 1.33) == pytest.approx(7.15, abs=0.01)

    params = cq.SystemParams(g_u=10.0, g_l=1.0, kappa_u=0.0, kappa_l=0.0,
                             gamma_u=0.0, gamma_l=0.0)
    e0, e1, e2 = cq.chain_eigenenergies(params, 0.0)
    assert e0 == 0.0
    assert e1 == pytest.approx(math.sqrt(101.0))

    psi0 = cq.dark_state(params)
    lay = params.layout
    assert psi0[lay.index_of("e", 0, 0)] == pytest.approx(-1.0 / math.sqrt(101.0))

    h = cq.build_static_hamiltonian(params)
    assert np.abs(h @ psi0).max() < 1e-10 * np.abs(h).max()


def test_short_dynamics_run():
    params = cq.SystemParams(g_u=0.0, g_l=0.0, kappa_u=30.0, kappa_l=0.0,
                             gamma_u=0.0, gamma_l=0.0, n_max_u=1, n_max_l=1)
    lay = params.layout
    psi = cq.basis_state(lay, "g", n_u=1)
    rho0 = np.outer(psi, psi.conj())
    out = cq.integrate_master_equation(params, rho0, t_end_ns=10.0, sample_dt_ns=0.5)
    assert out["trace_error"] < 1e-8
    n_u = out["series"]["n_u"]
    expected = np.exp(-2.0 * 2.0 * math.pi * 30.0 * out["times_ns"] * 1e-3)
    assert np.abs(n_u - expected).max() < 1e-6


def test_steady_state_sink():
    params = cq.SystemParams(g_u=10.0, g_l=1.0, kappa_u=0.01, kappa_l=0.1,
                             gamma_u=1.0, gamma_l=2.0,
                             drive=cq.DriveSpec(mode="cw_g_e", omega_d=0.0))
    rho, residual = cq.steady_state(params)
    lay = params.layout
    k = lay.index_of("g", 0, 0)
    assert rho[k, k] == pytest.approx(1.0, abs=1e-12)
    assert residual < 1e-10


def test_validation_errors_surface_as_value_error():
    with pytest.raises(ValueError):
        cq.SystemParams(g_u=-1.0, g_l=0.0, kappa_u=0.0, kappa_l=0.0,
                        gamma_u=0.0, gamma_l=0.0)
    with pytest.raises(ValueError):
        cq.annihilation(0)
