"""Dense-quadrature oracle for the diagonal operator constants.

Computes, independently of the spectral machinery in :mod:`.operators`:

* ``lambda_e[l]``: ``div(D_e Y_lm) = grad(lambda_e Y_lm)``
* ``lambda_b[l]``: ``div(D_b Y_lm) = *grad(lambda_b Y_lm)``
* ``mu[l]``: ``int Y_lm(w') (1 - w.w')^(-1/2) dw' = mu_l Y_lm(w)``

The tensor constants come from nested 8th-order central finite differences
of harmonics evaluated by :func:`scipy.special.sph_harm_y`, with covariant
derivatives written out in ``(theta, phi)`` coordinates, projected onto
``grad Y`` and ``*grad Y`` by dense Gauss x trapezoid quadrature.  The
kernel constants come from 1-D Gauss-Jacobi quadrature of Legendre
polynomials against the weight ``(1-x)^(-1/2)``.

Run ``python -m nullmem.sphere.oracle`` to regenerate the constants table
shipped in ``nullmem/sphere/data/operator_constants.txt``.
"""

import argparse
from pathlib import Path

import numpy as np
from scipy import special

TABLE_VERSION = 1
DEFAULT_LMAX = 64
TABLE_PATH = Path(__file__).with_name("data") / "operator_constants.txt"

D1 = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])
D2 = np.array([-1 / 560, 8 / 315, -1 / 5, 8 / 5, -205 / 72, 8 / 5, -1 / 5, 8 / 315, -1 / 560])
OFFSETS = np.arange(-4, 5)


class _Harmonic:
    """Real harmonic ``Re Y_l^m`` (separable: theta profile x cos(m phi))."""

    def __init__(self, l, m):
        self.l, self.m = l, m

    def __call__(self, th, ph):
        prof = special.sph_harm_y(self.l, self.m, th, 0.0).real
        return prof[:, None] * np.cos(self.m * ph)[None, :]


def _d(f, th, ph, h, order_th, order_ph):
    """Partial derivative of ``f(th, ph)`` by central differences."""
    st = {0: None, 1: D1, 2: D2}
    out = 0.0
    wt, wp = st[order_th], st[order_ph]
    for i, a in enumerate(OFFSETS if wt is not None else [0]):
        ca = wt[i] / h**order_th if wt is not None else 1.0
        if ca == 0.0:
            continue
        for k, b in enumerate(OFFSETS if wp is not None else [0]):
            cb = wp[k] / h**order_ph if wp is not None else 1.0
            if cb == 0.0:
                continue
            out = out + ca * cb * f(th + a * h, ph + b * h)
    return out


def _electric_tensor(f, h):
    """Coordinate components ``(T_tt, T_tp, T_pp)`` of ``D_e f``."""
    def T(th, ph):
        s = np.sin(th)[:, None]
        c = np.cos(th)[:, None]
        f_t = _d(f, th, ph, h, 1, 0)
        f_p = _d(f, th, ph, h, 0, 1)
        f_tt = _d(f, th, ph, h, 2, 0)
        f_pp = _d(f, th, ph, h, 0, 2)
        f_tp = _d(f, th, ph, h, 1, 1)
        lap = f_tt + c / s * f_t + f_pp / s**2
        return np.stack([f_tt - 0.5 * lap,
                         f_tp - c / s * f_p,
                         f_pp + s * c * f_t - 0.5 * s**2 * lap])
    return T


def _magnetic_tensor(f, h):
    """Coordinate components of ``D_b f = *D_e f`` (dual taken in the dyad)."""
    Te = _electric_tensor(f, h)

    def T(th, ph):
        s = np.sin(th)[:, None]
        tt, tp, _ = Te(th, ph)
        # dyad: (*T)_tt = T_tp_hat, (*T)_tp = -T_tt_hat ; back to coordinates
        btt = tp / s
        btp = -tt * s
        return np.stack([btt, btp, -btt * s**2])
    return T


def _divergence(T, th, ph, h):
    """Dyad components of ``div T`` for a coordinate-component tensor callable."""
    s = np.sin(th)[:, None]
    c = np.cos(th)[:, None]
    tt, tp, pp = T(th, ph)
    d_th = _d(lambda a, b: T(a, b)[0:2], th, ph, h, 1, 0)
    d_ph = _d(lambda a, b: T(a, b)[1:3], th, ph, h, 0, 1)
    div_t = d_th[0] + (d_ph[0] - c / s * pp + s * c * tt) / s**2
    div_p = d_th[1] + c / s * tp + d_ph[1] / s**2
    return div_t, div_p / s


def tensor_constants(l, m=1, h=None):
    """Return ``(lambda_e, lambda_b, leak_e, leak_b)`` for degree ``l``.

    ``leak_*`` are the relative projections on the wrong parity, which
    should vanish.
    """
    m = min(m, l)
    h = 0.02 / max(l, 4) if h is None else h
    n_th = 2 * l + 24
    n_ph = 4 * l + 24
    x, w = np.polynomial.legendre.leggauss(n_th)
    th = np.arccos(x)
    ph = 2 * np.pi * np.arange(n_ph) / n_ph
    area = np.outer(w, np.full(n_ph, 2 * np.pi / n_ph))
    s = np.sin(th)[:, None]

    f = _Harmonic(l, m)
    g_t = _d(f, th, ph, h, 1, 0)
    g_p = _d(f, th, ph, h, 0, 1) / s
    # *grad f = (g_p, -g_t)
    norm = np.sum(area * (g_t**2 + g_p**2))

    de_t, de_p = _divergence(_electric_tensor(f, h), th, ph, h)
    db_t, db_p = _divergence(_magnetic_tensor(f, h), th, ph, h)
    lam_e = np.sum(area * (de_t * g_t + de_p * g_p)) / norm
    leak_e = np.sum(area * (de_t * g_p - de_p * g_t)) / norm
    lam_b = np.sum(area * (db_t * g_p - db_p * g_t)) / norm
    leak_b = np.sum(area * (db_t * g_t + db_p * g_p)) / norm
    return lam_e, lam_b, leak_e / abs(lam_e), leak_b / abs(lam_b)


def kernel_constant(l):
    """``mu_l = 2 pi int_{-1}^{1} P_l(x) (1 - x)^(-1/2) dx`` (Funk-Hecke)."""
    x, w = special.roots_jacobi(l // 2 + 8, -0.5, 0.0)
    return 2 * np.pi * np.sum(w * special.eval_legendre(l, x))


def build_table(lmax=DEFAULT_LMAX):
    rows = []
    for l in range(lmax + 1):
        if l >= 2:
            lam_e, lam_b, _, _ = tensor_constants(l)
        else:
            lam_e = lam_b = 0.0
        rows.append((l, lam_e, lam_b, kernel_constant(l)))
    return rows


def write_table(rows, path=TABLE_PATH):
    lines = [
        f"# nullmem operator constants, version {TABLE_VERSION}",
        "# generated by: python -m nullmem.sphere.oracle",
        "# l lambda_e lambda_b mu   (lambda_* undefined for l < 2, written as 0)",
    ]
    lines += [f"{l} {a:.17g} {b:.17g} {c:.17g}" for l, a, b, c in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lmax", type=int, default=DEFAULT_LMAX)
    ap.add_argument("--output", type=Path, default=TABLE_PATH)
    args = ap.parse_args(argv)
    write_table(build_table(args.lmax), args.output)
    print(f"wrote {args.output}")


if __name__ == "__main__":
    main()
