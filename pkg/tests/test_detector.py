import numpy as np
import pytest

from nullmem import detector, memory
from nullmem.detector import DetectorConfig
from nullmem.errors import DomainError, RangeError
from nullmem.radiation import RadiativePayload
from nullmem.sphere.fields import STTField
from nullmem.synth import SynthSpec, synth

DIRECTION = (1.1, 0.4)


@pytest.fixture(scope="module")
def pulse():
    return synth(SynthSpec(xi_electric=[(2, 0, 1.0), (3, 1, 0.5)], xi_magnetic=[(2, 1, 0.4)],
                           af_electric=[(2, 0, 0.5)], band_limit=12))


def test_config_checks():
    with pytest.raises(DomainError):
        DetectorConfig(0.0, 1.0)
    with pytest.raises(DomainError):
        DetectorConfig(1.0, -1.0)
    with pytest.warns(RuntimeWarning):
        DetectorConfig(1.0, 10.0)


def test_drive_examples(pulse):
    const = RadiativePayload(pulse.u, STTField(pulse.grid, np.broadcast_to(pulse.Xi.tt[200], pulse.Xi.tt.shape),
                                               np.broadcast_to(pulse.Xi.tp[200], pulse.Xi.tp.shape)))
    d = detector.drive_tensor(const, DIRECTION)
    assert np.max(np.abs(d.samples)) < 1e-12
    # Xi = exp(-u^2) T0 -> A = 8 u exp(-u^2) T0
    fd = detector.drive_tensor(pulse, DIRECTION, use_aw=False)
    aw = detector.drive_tensor(pulse, DIRECTION, use_aw=True)
    T0 = detector.stt_at(pulse.Xi, DIRECTION)[200]
    u = pulse.u
    expect = 8 * u[:, None, None] * np.exp(-u**2)[:, None, None] * T0
    assert np.max(np.abs(aw.samples - expect)) < 1e-12 * np.max(np.abs(expect)) + 1e-15
    assert np.max(np.abs(fd.samples - aw.samples)) < 1e-2 * np.max(np.abs(aw.samples))
    with pytest.raises(RangeError):
        detector.drive_tensor(pulse, (1e-4, 0.0))


def test_zero_drive_is_static(pulse):
    zero = RadiativePayload(pulse.u, STTField.zeros(pulse.grid, (pulse.u.size,)))
    cfg = DetectorConfig(1.0, 100.0, DIRECTION)
    tr = detector.integrate_jacobi(cfg, detector.drive_tensor(zero, DIRECTION), zero)
    assert np.all(tr.positions == np.eye(2)) and np.all(tr.displacement == 0)
    cf = detector.closed_form_trace(cfg, zero)
    assert np.all(cf.velocities == 0)


def test_integrator_matches_closed_form(pulse):
    cfg = DetectorConfig(1.0, 100.0, DIRECTION)
    for use_aw in (False, True):
        tr = detector.integrate_jacobi(cfg, detector.drive_tensor(pulse, DIRECTION, use_aw=use_aw))
        cf = detector.closed_form_trace(cfg, pulse)
        scale = np.max(np.abs(cf.positions - np.eye(2)))
        assert np.max(np.abs(tr.positions - cf.positions)) < 1e-5 * scale
        assert np.max(np.abs(tr.velocities - cf.velocities)) < 1e-5 * np.max(np.abs(cf.velocities))
        assert np.max(np.abs(tr.displacement - cf.displacement)) < 1e-5 * scale
    # initial conditions and vertical confinement
    np.testing.assert_array_equal(tr.positions[0], np.eye(2))
    np.testing.assert_array_equal(tr.velocities[0], 0)
    assert np.max(np.abs(tr.vertical)) == 0


def test_return_to_rest_and_memory_consistency(pulse):
    cfg = DetectorConfig(1.0, 100.0, DIRECTION)
    tr = detector.integrate_jacobi(cfg, detector.drive_tensor(pulse, DIRECTION))
    xi_max = np.max(np.abs(detector.stt_at(pulse.Xi, DIRECTION)))
    assert np.max(np.abs(tr.velocities[-1])) < 1e-6 * 0.01 * xi_max
    with pytest.warns(RuntimeWarning):
        mr = memory.solve_memory(pulse)
    # compare at a grid node so that interpolation error does not enter
    node = (pulse.grid.theta[5], pulse.grid.phi[3])
    cfg = DetectorConfig(1.0, 100.0, node)
    tr = detector.integrate_jacobi(cfg, detector.drive_tensor(pulse, node))
    dx = detector.stt_at(memory.memory_displacement_field(mr, 1.0, 100.0, "direct"), node)
    assert np.max(np.abs(tr.displacement - dx)) < 1e-5 * np.max(np.abs(dx))


def test_closed_form_substitution(pulse):
    cfg = DetectorConfig(1.0, 100.0, DIRECTION)
    cf = detector.closed_form_trace(cfg, pulse)
    xi = detector.stt_at(pulse.Xi, DIRECTION)
    i = 200
    assert cf.velocities[i, 0, 0] == pytest.approx(0.01 * xi[i, 0, 0], rel=1e-14)
    # Gaussian profile: displacement = (d0/r) sqrt(pi) T0
    T0 = xi[i]
    np.testing.assert_allclose(cf.displacement, 0.01 * np.sqrt(np.pi) * T0, rtol=1e-8)


def test_em_correction_scales_inverse_r(pulse):
    ratios = []
    rs = np.array([1e2, 1e3, 1e4])
    for r in rs:
        off = detector.integrate_jacobi(DetectorConfig(1.0, r, DIRECTION),
                                        detector.drive_tensor(pulse, DIRECTION), pulse)
        on = detector.integrate_jacobi(DetectorConfig(1.0, r, DIRECTION, True),
                                       detector.drive_tensor(pulse, DIRECTION), pulse)
        ratios.append(np.max(np.abs(on.displacement - off.displacement))
                      / np.max(np.abs(off.displacement)))
    slope = np.polyfit(np.log(rs), np.log(ratios), 1)[0]
    assert slope == pytest.approx(-1.0, abs=0.1)


def test_nonlinear_mode_converges_to_linear(pulse):
    # substituting initial values drops a term of relative size O(|Sigma| d0 / r)
    gaps = []
    for r in (1e3, 1e4):
        lin = detector.integrate_jacobi(DetectorConfig(1.0, r, DIRECTION),
                                        detector.drive_tensor(pulse, DIRECTION))
        non = detector.integrate_jacobi(DetectorConfig(1.0, r, DIRECTION, linearize=False),
                                        detector.drive_tensor(pulse, DIRECTION))
        gaps.append(np.max(np.abs(non.positions - lin.positions))
                    / np.max(np.abs(lin.positions - np.eye(2))))
    assert gaps[1] == pytest.approx(gaps[0] / 10, rel=0.05)
