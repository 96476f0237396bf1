"""Payload archives: a directory with ``manifest.txt`` plus one block per field.

Manifest lines are ``key = value``.  Each block is a flat array in row-major
``(u, theta, phi, component)`` order, stored either as text (one ``%.17g``
value per line, ``<name>.txt``) or raw little-endian float64
(``<name>.bin``).  The time grid is stored as the block ``u_grid``.

Example manifest::

    format_version = 1
    kind = radiative
    band_limit = 16
    n_theta = 17
    n_phi = 34
    phi_offset = 0
    n_time = 401
    encoding = binary
    units = geometric units, G = c = 1
    fields = Xi, A_F
    shape.Xi = 401,17,34,2
    kind.Xi = stt
    ...
"""

from pathlib import Path

import numpy as np

from .bondi import BondiWaveform
from .errors import ArchiveError
from .radiation import FIELD_KINDS, RadiativePayload
from .sphere.fields import OneFormField, ScalarField, STTField
from .sphere.grid import SphereGrid

FORMAT_VERSION = 1
MANIFEST = "manifest.txt"
ENCODINGS = ("text", "binary")
UNITS = "geometric units, G = c = 1"
N_COMPONENTS = {"scalar": 1, "oneform": 2, "stt": 2}


def _stack(f):
    if isinstance(f, STTField):
        return np.stack([f.tt, f.tp], axis=-1)
    if isinstance(f, OneFormField):
        return np.stack([f.theta, f.phi], axis=-1)
    return f.values[..., None]


def _unstack(kind, grid, a):
    if kind == "stt":
        return STTField(grid, a[..., 0], a[..., 1])
    if kind == "oneform":
        return OneFormField(grid, a[..., 0], a[..., 1])
    return ScalarField(grid, a[..., 0])


def _write_block(path, name, arr, encoding):
    flat = np.ascontiguousarray(arr, dtype=float).ravel()
    if encoding == "binary":
        flat.astype("<f8").tofile(path / f"{name}.bin")
    else:
        np.savetxt(path / f"{name}.txt", flat, fmt="%.17g")


def _read_block(path, name, shape, encoding):
    n = int(np.prod(shape))
    fname = path / (f"{name}.bin" if encoding == "binary" else f"{name}.txt")
    if not fname.exists():
        raise ArchiveError(f"block file {fname.name} is missing", field=name)
    try:
        if encoding == "binary":
            flat = np.fromfile(fname, dtype="<f8")
        else:
            flat = np.atleast_1d(np.loadtxt(fname, dtype=float, ndmin=1))
    except ValueError as exc:
        raise ArchiveError(f"block {name} is not parseable: {exc}", field=name) from None
    if flat.size != n:
        raise ArchiveError(f"block {name} has {flat.size} values, manifest declares {n} "
                           f"(shape {shape})", field=name)
    if not np.all(np.isfinite(flat)):
        raise ArchiveError(f"block {name} contains NaN or infinite values", field=name)
    return flat.astype(float).reshape(shape)


def _write_archive(path, kind, grid, t, fields, extra, encoding):
    if encoding not in ENCODINGS:
        raise ArchiveError(f"unknown encoding {encoding!r}", field="encoding")
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    lines = [
        f"format_version = {FORMAT_VERSION}",
        f"kind = {kind}",
        f"band_limit = {grid.L}",
        f"n_theta = {grid.n_theta}",
        f"n_phi = {grid.n_phi}",
        f"phi_offset = {grid.phi_offset!r}",
        f"n_time = {t.size}",
        f"encoding = {encoding}",
        f"units = {UNITS}",
    ]
    for k, v in extra.items():
        lines.append(f"{k} = {v}")
    lines.append("fields = " + ", ".join(fields))
    _write_block(path, "u_grid", t, encoding)
    for name, (fkind, arr) in fields.items():
        lines.append(f"shape.{name} = " + ",".join(str(s) for s in arr.shape))
        lines.append(f"kind.{name} = {fkind}")
        _write_block(path, name, arr, encoding)
    (path / MANIFEST).write_text("\n".join(lines) + "\n")


def read_manifest(path):
    path = Path(path)
    mf = path / MANIFEST
    if not mf.exists():
        raise ArchiveError(f"{mf} not found", field="manifest")
    out = {}
    for i, raw in enumerate(mf.read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ArchiveError(f"manifest line {i} is not 'key = value': {raw!r}",
                               field="manifest")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _need(mf, key):
    if key not in mf:
        raise ArchiveError(f"manifest lacks '{key}'", field=key)
    return mf[key]


def _read_archive(path, expect_kind):
    path = Path(path)
    mf = read_manifest(path)
    version = _need(mf, "format_version")
    if version != str(FORMAT_VERSION):
        raise ArchiveError(f"format_version {version} unsupported (expected {FORMAT_VERSION})",
                           field="format_version")
    kind = _need(mf, "kind")
    if kind != expect_kind:
        raise ArchiveError(f"archive kind is {kind!r}, expected {expect_kind!r}", field="kind")
    encoding = _need(mf, "encoding")
    if encoding not in ENCODINGS:
        raise ArchiveError(f"unknown encoding {encoding!r}", field="encoding")
    try:
        grid = SphereGrid(int(_need(mf, "band_limit")), int(_need(mf, "n_theta")),
                          int(_need(mf, "n_phi")), float(mf.get("phi_offset", 0.0)))
        n_t = int(_need(mf, "n_time"))
    except ValueError as exc:
        raise ArchiveError(f"bad grid description: {exc}", field="manifest") from None
    t = _read_block(path, "u_grid", (n_t,), encoding)
    names = [s.strip() for s in _need(mf, "fields").split(",") if s.strip()]
    declared = set(names)
    on_disk = {p.stem for p in path.iterdir() if p.suffix in (".bin", ".txt")} - {"u_grid",
                                                                                   "manifest"}
    stray = on_disk - declared
    if stray:
        raise ArchiveError(f"blocks not listed in manifest: {sorted(stray)}",
                           field=sorted(stray)[0])
    fields = {}
    for name in names:
        fkind = _need(mf, f"kind.{name}")
        if fkind not in N_COMPONENTS:
            raise ArchiveError(f"unknown field kind {fkind!r}", field=name)
        static = name == "Sigma_minus"
        expect = (() if static else (n_t,)) + grid.shape + (N_COMPONENTS[fkind],)
        try:
            shape = tuple(int(s) for s in _need(mf, f"shape.{name}").split(","))
        except ValueError:
            raise ArchiveError("shape is not a list of integers", field=name) from None
        if shape != expect:
            raise ArchiveError(f"shape {shape} does not match grid dimensions {expect}",
                               field=name)
        fields[name] = _unstack(fkind, grid, _read_block(path, name, shape, encoding))
    return mf, t, fields


# -- radiative payloads -----------------------------------------------------------

def save_payload(p: RadiativePayload, path, encoding="binary"):
    fields = {}
    for name in p.present():
        fields[name] = (FIELD_KINDS[name], _stack(getattr(p, name)))
    fields["Sigma_minus"] = ("stt", _stack(p.Sigma_minus))
    _write_archive(path, "radiative", p.grid, p.u, fields,
                   {"M_minus": repr(float(p.M_minus))}, encoding)


def load_payload(path) -> RadiativePayload:
    mf, u, fields = _read_archive(path, "radiative")
    if "Xi" not in fields:
        raise ArchiveError("radiative archive lacks Xi", field="Xi")
    for name, f in fields.items():
        if name != "Sigma_minus" and name not in FIELD_KINDS:
            raise ArchiveError(f"unknown radiative field {name!r}", field=name)
    try:
        M_minus = float(mf.get("M_minus", 0.0))
    except ValueError:
        raise ArchiveError("M_minus is not a number", field="M_minus") from None
    return RadiativePayload(u=u, M_minus=M_minus, **fields)


# -- Bondi waveforms --------------------------------------------------------------

BONDI_FIELDS = ("c", "d", "X", "Y")


def save_bondi(b: BondiWaveform, path, encoding="binary"):
    fields = {n: ("scalar", _stack(getattr(b, n))) for n in BONDI_FIELDS}
    _write_archive(path, "bondi", b.grid, b.w, fields, {"time_axis": "w"}, encoding)


def load_bondi(path) -> BondiWaveform:
    _, w, fields = _read_archive(path, "bondi")
    missing = [n for n in BONDI_FIELDS if n not in fields]
    if missing:
        raise ArchiveError(f"Bondi archive lacks {missing}", field=missing[0])
    return BondiWaveform(w=w, **{n: fields[n] for n in BONDI_FIELDS})
