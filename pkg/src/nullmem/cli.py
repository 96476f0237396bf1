"""Command-line front end.  Each command is a thin shell over library calls.

Reports are plain text (stdout or ``--report``); tabular data goes to
``--csv`` with a one-line header naming columns and units.  Failures print a
single JSON object on stderr, e.g.::

    {"error": "archive", "field": "Xi", "message": "block Xi has 10 values ..."}

and exit with the code listed in ``EXIT_CODES``.
"""

import argparse
import csv
import datetime
import json
import logging
import sys
import warnings

import numpy as np

from . import __version__, archive, bondi, detector, memory, radiation, synth
from .errors import NullmemError
from .sphere.operators import analyze, decompose_stt

EXIT_CODES = {
    "usage": 2,
    "resolution": 3, "grid-collision": 3,
    "non-mean-free-source": 4, "non-electric-source": 4, "kernel-obstruction": 4,
    "range": 5, "absent-field": 5,
    "domain": 6,
    "integrator": 7,
    "internal-consistency": 8,
    "archive": 9,
    "spec": 10,
    "validation": 11,
}
UNITS = "geometric"


class Report:
    def __init__(self, command, timestamp=True):
        self.lines = [f"nullmem {__version__} {command}"]
        if timestamp:
            now = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
            self.lines.append(f"generated {now}")

    def add(self, key, value=None):
        if value is None:
            self.lines.append(str(key))
        elif isinstance(value, float):
            self.lines.append(f"{key:<34s} {value:.12g}")
        else:
            self.lines.append(f"{key:<34s} {value}")

    def write(self, path):
        text = "\n".join(self.lines) + "\n"
        if path:
            with open(path, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


def write_csv(path, header, columns):
    """Write equal-length columns; ``header`` entries are ``'name [unit]'``."""
    if not path:
        return
    rows = np.column_stack([np.asarray(c, dtype=float).ravel() for c in columns])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([f"{x:.17g}" for x in row])


class UsageError(NullmemError):
    category = "usage"


def _pair(text, flag):
    try:
        a, b = (float(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"{flag} expects two comma-separated numbers, got {text!r}",
                         field=flag) from None
    return a, b


def _modes(text, flag):
    """``'l,m,w;l,m,w'`` -> list of ``(l, m, w)``."""
    if not text:
        return []
    out = []
    for chunk in text.split(";"):
        try:
            l, m, w = chunk.split(",")
            out.append((int(l), int(m), float(w)))
        except ValueError:
            raise UsageError(f"{flag} expects 'l,m,weight;...', got {chunk!r}",
                             field=flag) from None
    return out


def _onoff(text):
    return text == "on"


def _grid_axes(grid):
    th = np.repeat(grid.theta, grid.n_phi)
    ph = np.tile(grid.phi, grid.n_theta)
    return th, ph


# -- commands -----------------------------------------------------------------------

def cmd_synth(args, rep):
    table_u = table_f = None
    if args.table:
        data = np.loadtxt(args.table, delimiter=",", ndmin=2)
        table_u, table_f = data[:, 0], data[:, 1]
    u_min, u_max = _pair(args.u_range, "--u-range")
    spec = synth.SynthSpec(
        profile=args.profile, amplitude=args.amplitude, width=args.width,
        xi_electric=_modes(args.xi_electric, "--xi-electric"),
        xi_magnetic=_modes(args.xi_magnetic, "--xi-magnetic"),
        af_electric=_modes(args.af_electric, "--af-electric"),
        af_magnetic=_modes(args.af_magnetic, "--af-magnetic"),
        xi_exponent=args.xi_exponent, af_exponent=args.af_exponent,
        table_u=table_u, table_f=table_f, seed=args.seed, random_modes=args.random_modes,
        band_limit=args.band_limit, n_u=args.n_u, u_min=u_min, u_max=u_max,
        include_aw=not args.no_aw, normalize=args.normalize, M_minus=args.M_minus)
    p = synth.synth(spec)
    archive.save_payload(p, args.output, encoding=args.encoding)
    rep.add("archive", args.output)
    rep.add("encoding", args.encoding)
    rep.add("band limit", p.grid.L)
    rep.add("u samples", p.u.size)
    rep.add("fields", ", ".join(p.present()))
    return 0


def cmd_massloss(args, rep):
    p = archive.load_payload(args.input)
    mc = radiation.mass_curve(p, tail=_onoff(args.tail_model))
    rep.add("tail model", args.tail_model)
    rep.add("M(-inf)", mc.M_minus)
    rep.add("M(+inf)", mc.M_plus)
    rep.add("radiated M(+inf) - M(-inf)", mc.radiated)
    rep.add("tail contribution, u < u_min", mc.tail_minus)
    rep.add("tail contribution, u > u_max", mc.tail_plus)
    write_csv(args.csv, [f"u [{UNITS}]", f"M [{UNITS}]", "dM/du [dimensionless]"],
              [mc.u, mc.M, mc.rate])
    return 0


def cmd_flux(args, rep):
    p = archive.load_payload(args.input)
    f = radiation.flux_per_solid_angle(p, tail=_onoff(args.tail_model))
    grid = p.grid
    rep.add("total radiated energy", float(grid.integrate(f.values)))
    rep.add("max dE/dOmega", float(np.max(f.values)))
    rep.add("min dE/dOmega", float(np.min(f.values)))
    th, ph = _grid_axes(grid)
    write_csv(args.csv, ["theta [rad]", "phi [rad]", f"dE/dOmega [{UNITS}]"],
              [th, ph, f.values])
    return 0


def _coeff_lines(rep, title, c, ref=None, rel=1e-12):
    ref = float(np.max(np.abs(c.data))) if ref is None else ref
    nz = c.nonzero(tol=rel * max(ref, 1e-300))
    rep.add(f"{title} ({len(nz)} nonzero)")
    for (l, m), v in nz.items():
        rep.add(f"  l={l:<3d} m={m:<4d}", v)


def cmd_memory(args, rep):
    p = archive.load_payload(args.input)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        mr = memory.solve_memory(p, tail=_onoff(args.tail_model))
    for w in caught:
        rep.add("warning", str(w.message))
    rep.add("mean of F", mr.F_mean)
    rep.add("l=1 content of grad Phi", mr.l1_content)
    rep.add("Poisson residual", mr.poisson_residual)
    rep.add("divergence residual", mr.hodge_residual)
    rep.add("curl of grad Phi", mr.curl_residual)
    rep.add("constraint vs direct residual", mr.residual)
    rep.add("magnetic norm of direct jump", float(mr.b_direct.norm()))
    _coeff_lines(rep, "Phi coefficients", analyze(mr.Phi))
    if args.source in ("constraint", "both"):
        _coeff_lines(rep, "electric potential of jump (constraint)", mr.e_constraint)
    if args.source in ("direct", "both"):
        _coeff_lines(rep, "electric potential of jump (direct)", mr.e_direct)
        ref = max(float(np.max(np.abs(mr.e_direct.data))), float(np.max(np.abs(mr.b_direct.data))))
        _coeff_lines(rep, "magnetic potential of jump (direct)", mr.b_direct, ref=ref)
    th, ph = _grid_axes(p.grid)
    header = ["theta [rad]", "phi [rad]", f"Phi [{UNITS}]"]
    cols = [th, ph, mr.Phi.values]
    for src, S in (("constraint", mr.Sigma_jump_constraint), ("direct", mr.Sigma_jump_direct)):
        if args.source in (src, "both"):
            header += [f"dSigma_tt_{src} [{UNITS}]", f"dSigma_tp_{src} [{UNITS}]"]
            cols += [S.tt, S.tp]
    write_csv(args.csv, header, cols)
    return 0


def cmd_detector(args, rep):
    p = archive.load_payload(args.input)
    direction = _pair(args.direction, "--direction")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        cfg = detector.DetectorConfig(args.d0, args.r, direction,
                                      include_em_correction=_onoff(args.em_correction))
    for w in caught:
        rep.add("warning", str(w.message))
    drive = detector.drive_tensor(p, direction)
    tr = detector.integrate_jacobi(cfg, drive, p)
    rep.add("drive source", drive.source)
    rep.add("substeps per interval", tr.substeps)
    for a in range(2):
        for b in range(2):
            rep.add(f"displacement x{a + 1}_({b + 1})", float(tr.displacement[a, b]))
    rep.add("final speed", float(np.max(np.abs(tr.velocities[-1]))))
    header = ["t [geometric]"]
    cols = [tr.t]
    names = [(a, b) for b in range(2) for a in range(2)]
    header += [f"x{a + 1}_({b + 1}) [length]" for a, b in names]
    cols += [tr.positions[:, a, b] for a, b in names]
    header += [f"v{a + 1}_({b + 1}) [dimensionless]" for a, b in names]
    cols += [tr.velocities[:, a, b] for a, b in names]
    if args.closed_form:
        cf = detector.closed_form_trace(cfg, p)
        scale = max(float(np.max(np.abs(cf.positions - cfg.d0 * np.eye(2)))), 1e-300)
        rep.add("closed-form position mismatch", float(np.max(np.abs(tr.positions - cf.positions))) / scale)
        for a in range(2):
            for b in range(2):
                rep.add(f"closed-form displacement x{a + 1}_({b + 1})", float(cf.displacement[a, b]))
        header += [f"x{a + 1}_({b + 1})_closed [length]" for a, b in names]
        cols += [cf.positions[:, a, b] for a, b in names]
    write_csv(args.csv, header, cols)
    return 0


def cmd_bondi_check(args, rep):
    b = archive.load_bondi(args.input)
    res = bondi.check_mass_loss_equivalence(b, orientation=args.orientation)
    for line in res.lines():
        rep.add(line)
    write_csv(args.csv, [f"w [{UNITS}]", "dM/du CK [dimensionless]", "dM/dw Bondi [dimensionless]"],
              [b.w, res.rate_ck, res.rate_bondi])
    return 0


def cmd_radius(args, rep):
    t0, t1 = _pair(args.t_span, "--t-span")
    r0 = t0 if args.r0 is None else args.r0
    tr = radiation.area_radius(args.mass, r0, t0, t1, steps_per_decade=args.steps_per_decade)
    rep.add("M(+inf)", float(args.mass))
    rep.add("t span", f"{t0:g} .. {t1:g}")
    rep.add("r(t0)", float(r0))
    rep.add("steps per decade", tr.steps_per_decade)
    rep.add("fitted log coefficient", tr.coefficient)
    rep.add("expected -2 M", -2.0 * args.mass)
    write_csv(args.csv, [f"t [{UNITS}]", f"r [{UNITS}]"], [tr.t, tr.r])
    return 0


def cmd_validate(args, rep):
    p = archive.load_payload(args.input)
    dr = radiation.decay_report(p)
    rep.add(f"decay fits (slack {dr.slack:g})")
    for name, f in dr.fits.items():
        verdict = "pass" if f.passed else "FAIL"
        rep.add(f"  {name:<6s} bound -{f.bound:g}", f"fitted {f.exponent:.4g}  {verdict}")
    ok = dr.passed
    _, _, resid = decompose_stt(p.Xi, return_residual=True)
    rep.add("Xi unrepresented content", float(np.max(resid)))
    if p.A_W is not None:
        c = radiation.aw_consistency(p)
        rep.add("dXi/du + A_W/4 relative", c)
        ok = ok and c < args.aw_tol
    try:
        mc = radiation.mass_curve(p)
        rep.add("mass monotone", "yes")
        rep.add("radiated mass", mc.radiated)
    except NullmemError as exc:
        rep.add("mass monotone", f"no ({exc})")
        ok = False
    rep.add("overall", "pass" if ok else "FAIL")
    if not ok and args.strict:
        rep.write(args.report)
        raise _Validation("payload failed validation", field="payload")
    return 0


class _Validation(NullmemError):
    category = "validation"


# -- parser ---------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="nullmem", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"nullmem {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true", help="log to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, needs_input=True):
        if needs_input:
            sp.add_argument("input", help="payload archive directory")
        sp.add_argument("--report", help="report file (default stdout)")
        sp.add_argument("--csv", help="CSV output path")
        sp.add_argument("--no-timestamp", action="store_true",
                        help="omit the timestamp line for byte-identical reports")
        return sp

    onoff = ("on", "off")

    sp = common(sub.add_parser("synth", help="generate a synthetic payload archive"), False)
    sp.add_argument("--output", "-o", required=True, help="archive directory to write")
    sp.add_argument("--encoding", choices=archive.ENCODINGS, default="binary")
    sp.add_argument("--profile", choices=synth.PROFILES, default="gaussian")
    sp.add_argument("--table", help="CSV 'u,f' table for --profile custom")
    sp.add_argument("--amplitude", type=float, default=1.0)
    sp.add_argument("--width", type=float, default=1.0)
    sp.add_argument("--xi-electric", default="2,0,1", help="modes 'l,m,w;l,m,w'")
    sp.add_argument("--xi-magnetic", default="")
    sp.add_argument("--af-electric", default="")
    sp.add_argument("--af-magnetic", default="")
    sp.add_argument("--xi-exponent", type=float, default=1.5)
    sp.add_argument("--af-exponent", type=float, default=1.5)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--random-modes", type=int, default=0)
    sp.add_argument("--band-limit", type=int, default=16)
    sp.add_argument("--n-u", type=int, default=401)
    sp.add_argument("--u-range", default="-20,20")
    sp.add_argument("--no-aw", action="store_true", help="do not store A_W")
    sp.add_argument("--normalize", action="store_true",
                    help="unit sphere-mean |T|^2 for each angular pattern")
    sp.add_argument("--M-minus", type=float, default=0.0)
    sp.set_defaults(func=cmd_synth)

    sp = common(sub.add_parser("massloss", help="Bondi mass curve"))
    sp.add_argument("--tail-model", choices=onoff, default="on")
    sp.set_defaults(func=cmd_massloss)

    sp = common(sub.add_parser("flux", help="radiated energy per solid angle"))
    sp.add_argument("--tail-model", choices=onoff, default="on")
    sp.set_defaults(func=cmd_flux)

    sp = common(sub.add_parser("memory", help="memory tensor from the constraint"))
    sp.add_argument("--source", choices=("constraint", "direct", "both"), default="both")
    sp.add_argument("--tail-model", choices=onoff, default="on")
    sp.set_defaults(func=cmd_memory)

    sp = common(sub.add_parser("detector", help="test-mass trajectories"))
    sp.add_argument("--d0", type=float, default=1.0)
    sp.add_argument("--r", type=float, default=100.0)
    sp.add_argument("--direction", default="1.5707963267948966,0", help="theta,phi")
    sp.add_argument("--em-correction", choices=onoff, default="off")
    sp.add_argument("--closed-form", action="store_true",
                    help="also evaluate the closed-form trace and compare")
    sp.set_defaults(func=cmd_detector)

    sp = common(sub.add_parser("bondi-check", help="Bondi vs radiative mass-loss integrand"))
    sp.add_argument("--orientation", type=int, choices=(1, -1), default=1,
                    help="u = orientation * w")
    sp.set_defaults(func=cmd_bondi_check)

    sp = common(sub.add_parser("radius", help="area radius r(t) at large t"), False)
    sp.add_argument("--mass", type=float, required=True, help="final Bondi mass")
    sp.add_argument("--t-span", default="100,1e5", help="t0,t1")
    sp.add_argument("--r0", type=float, default=None, help="r(t0), default t0")
    sp.add_argument("--steps-per-decade", type=int, default=64)
    sp.set_defaults(func=cmd_radius)

    sp = common(sub.add_parser("validate", help="decay fits and payload audit"))
    sp.add_argument("--aw-tol", type=float, default=1e-3)
    sp.add_argument("--strict", action="store_true", help="nonzero exit when the audit fails")
    sp.set_defaults(func=cmd_validate)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    rep = Report(args.command, timestamp=not args.no_timestamp)
    try:
        code = args.func(args, rep)
    except NullmemError as exc:
        err = {"error": exc.category, "field": exc.field, "message": str(exc)}
        sys.stderr.write(json.dumps(err) + "\n")
        return EXIT_CODES.get(exc.category, 1)
    except OSError as exc:
        err = {"error": "io", "field": getattr(exc, "filename", None), "message": str(exc)}
        sys.stderr.write(json.dumps(err) + "\n")
        return 12
    rep.write(args.report)
    return code


if __name__ == "__main__":
    sys.exit(main())
