"""Funk transform over great circles and the even-part equality check."""

from __future__ import annotations

import numpy as np

from .sphere_core import check_unit, even_odd_split, frames_batch

CHUNK = 2048


def default_quadrature(L):
    return max(4 * L, 2 * L + 2)


def funk_batch(F, xis, n_quad=None):
    """Integral of F over E(xi) for each row of ``xis`` (trapezoidal rule).

    The rule with n_quad >= 2L + 2 nodes is exact for the restriction, a
    trigonometric polynomial of degree <= L.
    """
    L = F.degree_max
    n = default_quadrature(L) if n_quad is None else int(n_quad)
    if n < 2 * L + 2:
        raise ValueError(f"n_quad={n} under-resolves degree {L}; need at least {2 * L + 2}")
    xis = check_unit(np.atleast_2d(xis))
    th = 2.0 * np.pi * np.arange(n) / n
    c, s = np.cos(th), np.sin(th)
    out = np.empty(len(xis))
    for start in range(0, len(xis), CHUNK):
        sl = slice(start, start + CHUNK)
        E1, E2 = frames_batch(xis[sl])
        pts = c[None, :, None] * E1[:, None, :] + s[None, :, None] * E2[:, None, :]
        vals = F(pts.reshape(-1, 3)).reshape(len(E1), n)
        out[sl] = vals.sum(axis=1) * (2.0 * np.pi / n)
    return out


def funk_transform(F, xi, n_quad=None):
    """Integral of F over the great circle orthogonal to ``xi``."""
    return float(funk_batch(F, np.asarray(xi, dtype=float)[None, :], n_quad)[0])


def even_equality_check(f, g, grid, tol=1e-8):
    """Check f_e = g_e by coefficients and by Funk transforms over ``grid``.

    Returns ``(passed, max_defect)`` where max_defect is the larger of the
    coefficient-wise difference and the largest Funk-transform difference.
    """
    L = max(f.degree_max, g.degree_max)
    fe, _ = even_odd_split(f.with_degree(L))
    ge, _ = even_odd_split(g.with_degree(L))
    diff = ge - fe
    coeff_defect = float(np.abs(diff.coeffs).max(initial=0.0))
    funk_defect = float(np.abs(funk_batch(diff, grid.directions)).max(initial=0.0))
    defect = max(coeff_defect, funk_defect)
    return (coeff_defect <= tol and funk_defect <= tol), defect
