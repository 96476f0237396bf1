import numpy as np
import pytest

from nullmem import archive, radiation
from nullmem.bondi import BondiWaveform
from nullmem.errors import ArchiveError, SynthSpecError
from nullmem.sphere.fields import ScalarField, SHCoefficients
from nullmem.sphere.operators import recompose_stt
from nullmem.synth import SynthSpec, synth


def test_amplitude_zero():
    p = synth(SynthSpec(amplitude=0.0, af_electric=[(1, 0, 1.0)]))
    assert np.all(p.Xi.tt == 0) and np.all(p.A_F.theta == 0) and np.all(p.A_W.tt == 0)


def test_gaussian_y20_jump():
    p = synth(SynthSpec(band_limit=8))
    jump = radiation.sigma_from_xi(p).jump
    T = recompose_stt(SHCoefficients.from_dict(8, {(2, 0): 1.0}), None, p.grid)
    np.testing.assert_allclose(jump.tt, -np.sqrt(np.pi) * T.tt, rtol=1e-9, atol=1e-14)
    np.testing.assert_allclose(jump.tp, -np.sqrt(np.pi) * T.tp, atol=1e-14)


def test_default_passes_decay_and_power_law_limits():
    assert radiation.decay_report(synth(SynthSpec(band_limit=6))).passed
    ok = synth(SynthSpec(profile="power-law-tail", band_limit=6, af_electric=[(1, 0, 1.0)]))
    assert radiation.decay_report(ok).passed
    bad = synth(SynthSpec(profile="power-law-tail", xi_exponent=1.0, band_limit=6))
    rep = radiation.decay_report(bad)
    assert not rep["Xi"].passed


def test_custom_table_profile():
    u = np.linspace(-20, 20, 401)
    p = synth(SynthSpec(profile="custom", table_u=u, table_f=np.exp(-u**2), band_limit=6))
    q = synth(SynthSpec(band_limit=6))
    np.testing.assert_allclose(p.Xi.tt, q.Xi.tt, atol=1e-15)


def test_seed_determinism():
    a = synth(SynthSpec(random_modes=5, seed=3, band_limit=8))
    b = synth(SynthSpec(random_modes=5, seed=3, band_limit=8))
    c = synth(SynthSpec(random_modes=5, seed=4, band_limit=8))
    np.testing.assert_array_equal(a.Xi.tt, b.Xi.tt)
    assert not np.array_equal(a.Xi.tt, c.Xi.tt)


@pytest.mark.parametrize("kw", [
    dict(xi_electric=[(17, 0, 1.0)]),
    dict(xi_electric=[(1, 0, 1.0)]),
    dict(af_magnetic=[(0, 0, 1.0)]),
    dict(xi_magnetic=[(3, 4, 1.0)]),
    dict(profile="triangle"),
    dict(profile="custom"),
])
def test_invalid_spec(kw):
    with pytest.raises(SynthSpecError):
        synth(SynthSpec(**kw))


@pytest.fixture
def payload():
    return synth(SynthSpec(band_limit=6, n_u=41, random_modes=3, seed=1,
                           af_electric=[(1, 1, 0.5)], M_minus=0.25))


def fields_of(p):
    out = {"u": p.u, "M_minus": np.array(p.M_minus)}
    for name in p.present():
        f = getattr(p, name)
        out[name] = archive._stack(f)
    out["Sigma_minus"] = archive._stack(p.Sigma_minus)
    return out


def test_binary_round_trip_bit_exact(tmp_path, payload):
    archive.save_payload(payload, tmp_path / "a")
    back = archive.load_payload(tmp_path / "a")
    a, b = fields_of(payload), fields_of(back)
    assert a.keys() == b.keys()
    for k in a:
        np.testing.assert_array_equal(a[k], b[k])
    assert back.grid == payload.grid


def test_text_round_trip(tmp_path, payload):
    archive.save_payload(payload, tmp_path / "t", encoding="text")
    back = archive.load_payload(tmp_path / "t")
    a, b = fields_of(payload), fields_of(back)
    for k in a:
        scale = max(np.max(np.abs(a[k])), 1e-300)
        assert np.max(np.abs(a[k] - b[k])) <= 1e-14 * scale


def test_truncated_block_names_field(tmp_path, payload):
    archive.save_payload(payload, tmp_path / "a")
    path = tmp_path / "a" / "A_F.bin"
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(ArchiveError) as exc:
        archive.load_payload(tmp_path / "a")
    assert exc.value.field == "A_F" and "A_F" in str(exc.value)


def test_nan_and_version_and_missing(tmp_path, payload):
    archive.save_payload(payload, tmp_path / "t", encoding="text")
    lines = (tmp_path / "t" / "Xi.txt").read_text().splitlines()
    lines[3] = "nan"
    (tmp_path / "t" / "Xi.txt").write_text("\n".join(lines) + "\n")
    with pytest.raises(ArchiveError) as exc:
        archive.load_payload(tmp_path / "t")
    assert exc.value.field == "Xi"

    archive.save_payload(payload, tmp_path / "v")
    mf = tmp_path / "v" / "manifest.txt"
    mf.write_text(mf.read_text().replace("format_version = 1", "format_version = 99"))
    with pytest.raises(ArchiveError) as exc:
        archive.load_payload(tmp_path / "v")
    assert exc.value.field == "format_version"

    archive.save_payload(payload, tmp_path / "m")
    (tmp_path / "m" / "A_W.bin").unlink()
    with pytest.raises(ArchiveError) as exc:
        archive.load_payload(tmp_path / "m")
    assert exc.value.field == "A_W"

    archive.save_payload(payload, tmp_path / "s")
    (tmp_path / "s" / "extra.bin").write_bytes(b"\0" * 8)
    with pytest.raises(ArchiveError) as exc:
        archive.load_payload(tmp_path / "s")
    assert exc.value.field == "extra"


def test_bondi_round_trip(tmp_path):
    from nullmem.sphere.grid import SphereGrid
    grid = SphereGrid(4)
    rng = np.random.default_rng(0)
    w = np.linspace(-5, 5, 21)
    f = {k: ScalarField(grid, rng.normal(size=(21,) + grid.shape)) for k in "cdXY"}
    b = BondiWaveform(w, **f)
    archive.save_bondi(b, tmp_path / "b", encoding="text")
    back = archive.load_bondi(tmp_path / "b")
    for k in "cdXY":
        np.testing.assert_array_equal(getattr(back, k).values, f[k].values)
    with pytest.raises(ArchiveError):
        archive.load_payload(tmp_path / "b")
