import numpy as np
import pytest

from nullmem import radiation
from nullmem.errors import AbsentFieldError, DomainError, RangeError
from nullmem.radiation import RadiativePayload
from nullmem.sphere.fields import OneFormField, SHCoefficients, STTField
from nullmem.sphere.grid import SphereGrid
from nullmem.sphere.operators import oneform_from_potentials, recompose_stt

L = 8
U = np.linspace(-20, 20, 401)


@pytest.fixture(scope="module")
def grid():
    return SphereGrid(L)


def unit_stt(grid, modes=((2, 0, 1.0), (3, 2, 0.4))):
    """STT pattern with sphere-mean |T|^2 = 1."""
    T = recompose_stt(SHCoefficients.from_dict(L, {(l, m): w for l, m, w in modes}), None, grid)
    return T * (1 / np.sqrt(grid.mean(T.norm_sq())))


def unit_oneform(grid):
    V = oneform_from_potentials(SHCoefficients.from_dict(L, {(1, 0): 1.0}),
                                SHCoefficients.from_dict(L, {(2, 1): 0.5}), grid)
    return V * (1 / np.sqrt(grid.mean(V.norm_sq())))


def stt_series(T, f):
    return STTField(T.grid, f[:, None, None] * T.tt, f[:, None, None] * T.tp)


def oneform_series(V, f):
    return OneFormField(V.grid, f[:, None, None] * V.theta, f[:, None, None] * V.phi)


def zero_payload(grid):
    return RadiativePayload(U, STTField.zeros(grid, (U.size,)))


def test_payload_validation(grid):
    with pytest.raises(RangeError):
        RadiativePayload(U[:10], STTField.zeros(grid, (U.size,)))
    other = SphereGrid(6)
    with pytest.raises(RangeError):
        RadiativePayload(U, STTField.zeros(grid, (U.size,)),
                         A_F=OneFormField.zeros(other, (U.size,)))


def test_mass_loss_rate_examples(grid):
    assert radiation.mass_loss_rate(zero_payload(grid), 0.0) == 0.0
    g = np.exp(-U**2)
    p = RadiativePayload(U, stt_series(unit_stt(grid), np.sqrt(g)))
    i = 200
    assert radiation.mass_loss_rate(p, U[i]) == pytest.approx(g[i] / 2, rel=1e-12)
    p = RadiativePayload(U, STTField.zeros(grid, (U.size,)),
                         A_F=oneform_series(unit_oneform(grid), np.sqrt(g)))
    assert radiation.mass_loss_rate(p, U[i]) == pytest.approx(g[i] / 4, rel=1e-12)
    with pytest.raises(RangeError):
        radiation.mass_loss_rate(p, 0.05)


def test_mass_curve_examples(grid):
    mc = radiation.mass_curve(RadiativePayload(U, STTField.zeros(grid, (U.size,)), M_minus=2.0))
    assert np.all(mc.M == 2.0) and mc.M_plus == 2.0
    f = np.exp(-U**2 / 2)
    p = RadiativePayload(U, stt_series(unit_stt(grid), f))
    assert radiation.mass_curve(p).radiated == pytest.approx(np.sqrt(np.pi) / 2, rel=1e-10)
    p = RadiativePayload(U, stt_series(unit_stt(grid), f),
                         A_F=oneform_series(unit_oneform(grid), f))
    assert radiation.mass_curve(p).radiated == pytest.approx(3 * np.sqrt(np.pi) / 4, rel=1e-10)
    assert np.all(np.diff(radiation.mass_curve(p).M) >= 0)


def test_flux_and_memory_source(grid):
    assert np.all(radiation.flux_per_solid_angle(zero_payload(grid)).values == 0)
    T = unit_stt(grid)
    f = np.exp(-U**2 / 2)
    p = RadiativePayload(U, stt_series(T, f))
    # per direction: int |T|^2 e^{-u^2} du = sqrt(pi) |T|^2
    expect = np.sqrt(np.pi) * T.norm_sq() / (32 * np.pi)
    np.testing.assert_allclose(radiation.flux_per_solid_angle(p).values, expect, rtol=1e-10,
                               atol=1e-16)
    V = unit_oneform(grid)
    q = RadiativePayload(U, STTField.zeros(grid, (U.size,)), A_F=oneform_series(V, f))
    np.testing.assert_allclose(radiation.flux_per_solid_angle(q).values,
                               0.5 * np.sqrt(np.pi) * V.norm_sq() / (32 * np.pi),
                               rtol=1e-10, atol=1e-16)
    F = radiation.memory_source(p)
    assert F.mean() == pytest.approx(np.sqrt(np.pi), rel=1e-10)


def test_sigma_from_xi_examples(grid):
    sm = unit_stt(grid) * 0.3
    s = radiation.sigma_from_xi(RadiativePayload(U, STTField.zeros(grid, (U.size,)),
                                                 Sigma_minus=sm))
    np.testing.assert_array_equal(s.Sigma.tt, np.broadcast_to(sm.tt, s.Sigma.tt.shape))
    T0 = unit_stt(grid)
    p = RadiativePayload(U, stt_series(T0, np.exp(-U**2)))
    s = radiation.sigma_from_xi(p)
    np.testing.assert_allclose(s.jump.tt, -np.sqrt(np.pi) * T0.tt, rtol=1e-9, atol=1e-14)
    np.testing.assert_allclose(s.jump.tp, -np.sqrt(np.pi) * T0.tp, rtol=1e-9, atol=1e-14)


def test_xi_from_aw(grid):
    p = zero_payload(grid)
    with pytest.raises(AbsentFieldError):
        radiation.xi_from_aw(p)
    T0 = unit_stt(grid)
    g = np.exp(-U**2)
    aw = stt_series(T0, -4 * (-2 * U * g))
    p = RadiativePayload(U, stt_series(T0, g), A_W=aw)
    xi = radiation.xi_from_aw(p)
    assert np.max(np.abs(xi.tt - p.Xi.tt)) < 1e-5 * np.max(np.abs(p.Xi.tt))
    assert radiation.aw_consistency(p) < 1e-3
    z = RadiativePayload(U, STTField.zeros(grid, (U.size,)), A_W=STTField.zeros(grid, (U.size,)))
    assert np.all(radiation.xi_from_aw(z).tt == 0)


def test_decay_report(grid):
    T0 = unit_stt(grid)
    ok = RadiativePayload(U, stt_series(T0, (1 + np.abs(U)) ** -1.5))
    rep = radiation.decay_report(ok)
    assert rep.passed and rep["Xi"].exponent == pytest.approx(-1.5, abs=0.05)
    bad = RadiativePayload(U, stt_series(T0, (1 + np.abs(U)) ** -1.0))
    rep = radiation.decay_report(bad)
    assert not rep.passed and rep["Xi"].exponent == pytest.approx(-1.0, abs=0.05)
    rep = radiation.decay_report(zero_payload(grid))
    assert rep.passed and rep["Xi"].degenerate
    short = RadiativePayload(U[150:250], STTField.zeros(grid, (100,)))
    with pytest.raises(RangeError):
        radiation.decay_report(short)


def test_area_radius():
    tr = radiation.area_radius(0.0, 100.0, 100.0, 1e5)
    np.testing.assert_allclose(tr.r, 100.0 + (tr.t - 100.0), rtol=1e-14)
    tr = radiation.area_radius(1.0, 100.0, 100.0, 1e5)
    assert tr.coefficient == pytest.approx(-2.0, abs=0.04)
    with pytest.raises(DomainError):
        radiation.area_radius(1.0, 3.0, 1.0, 10.0)
