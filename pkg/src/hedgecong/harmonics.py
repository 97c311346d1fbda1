"""Real, unit-normalized spherical harmonics with Cartesian derivatives.

Each basis function is evaluated through its harmonic polynomial extension

    Y_lm(x) = sqrt(2) * p_lm(z, r^2) * Re((x + i y)^m)      m > 0
    Y_l0(x) = p_l0(z, r^2)
    Y_l,-m(x) = sqrt(2) * p_lm(z, r^2) * Im((x + i y)^m)    m > 0

where p_lm follows the normalized associated-Legendre three-term recurrence
written in solid form.  No Condon-Shortley phase is applied, so the three
degree-1 functions are sqrt(3/4pi) * (y, z, x) for m = -1, 0, 1.

Because the extension is a polynomial on R^3, first and second derivatives
are exact and carried through the same recurrence.  Coefficient index of
(l, m) is ``l*l + l + m``.
"""

from __future__ import annotations

import numpy as np


def num_coeffs(L):
    return (L + 1) ** 2


def lm_index(l, m):
    return l * l + l + m


def degree_of_count(n):
    L = int(round(np.sqrt(n))) - 1
    if (L + 1) ** 2 != n:
        raise ValueError(f"{n} is not a square coefficient count")
    return L


def degrees(L):
    """Degree l of each coefficient slot, shape ((L+1)^2,)."""
    return np.concatenate([np.full(2 * l + 1, l) for l in range(L + 1)])


def real_sh_basis(points, L, order=0):
    """Evaluate all real harmonics up to degree ``L`` at ``points``.

    Parameters
    ----------
    points : (N, 3) array
        Evaluation points.  The polynomial extension is used, so points off
        the sphere are allowed (derivatives are ambient derivatives).
    L : int
    order : {0, 1, 2}
        Highest derivative order returned.

    Returns
    -------
    tuple
        ``(Y,)``, ``(Y, dY)`` or ``(Y, dY, d2Y)`` with shapes (N, nc),
        (N, nc, 3), (N, nc, 3, 3).
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    N = P.shape[0]
    nc = num_coeffs(L)
    x, y, z = P[:, 0], P[:, 1], P[:, 2]
    r2 = x * x + y * y + z * z

    Y = np.zeros((N, nc))
    dY = np.zeros((N, nc, 3)) if order >= 1 else None
    d2Y = np.zeros((N, nc, 3, 3)) if order >= 2 else None

    e3 = np.array([0.0, 0.0, 1.0])
    eye = np.eye(3)
    zeros3 = np.zeros((N, 3))
    zeros33 = np.zeros((N, 3, 3))

    # powers of w = x + i y with derivatives; dw = (1, i, 0)
    dw = np.array([1.0, 1.0j, 0.0])
    dwdw = np.outer(dw, dw)
    w = x + 1j * y
    wpow = [np.ones(N, dtype=complex)]
    for _ in range(L):
        wpow.append(wpow[-1] * w)

    pmm = 1.0 / np.sqrt(4.0 * np.pi)
    s2 = np.sqrt(2.0)
    for m in range(L + 1):
        if m > 0:
            pmm *= np.sqrt((2 * m + 1) / (2.0 * m))
        wm = wpow[m]
        dwm = d2wm = None
        if order >= 1:
            dwm = (m * wpow[m - 1])[:, None] * dw if m >= 1 else np.zeros((N, 3), dtype=complex)
        if order >= 2:
            d2wm = ((m * (m - 1) * wpow[m - 2])[:, None, None] * dwdw if m >= 2
                    else np.zeros((N, 3, 3), dtype=complex))

        # (value, gradient, hessian) of p_lm for l-1 and l-2
        prev = prev2 = None
        for l in range(m, L + 1):
            if l == m:
                cur = (np.full(N, pmm), zeros3, zeros33)
            else:
                a = np.sqrt((4.0 * l * l - 1) / (l * l - m * m))
                b = 0.0 if l == m + 1 else np.sqrt(((l - 1.0) ** 2 - m * m) * (2 * l + 1)
                                                   / ((2 * l - 3.0) * (l * l - m * m)))
                v1, g1, h1 = prev
                v2, g2, h2 = prev2 if prev2 is not None else (0.0, zeros3, zeros33)
                v = a * z * v1 - b * r2 * v2
                g = h = None
                if order >= 1:
                    g = (a * (z[:, None] * g1 + v1[:, None] * e3)
                         - b * (r2[:, None] * g2 + 2.0 * np.asarray(v2)[..., None] * P))
                if order >= 2:
                    h = (a * (z[:, None, None] * h1
                              + np.einsum("i,nj->nij", e3, g1)
                              + np.einsum("ni,j->nij", g1, e3))
                         - b * (r2[:, None, None] * h2
                                + 2.0 * np.asarray(v2)[..., None, None] * eye
                                + 2.0 * np.einsum("ni,nj->nij", P, g2)
                                + 2.0 * np.einsum("ni,nj->nij", g2, P)))
                cur = (v, g, h)
            prev2, prev = prev, cur

            pv, pg, ph = cur
            val = pv * wm
            if order >= 1:
                grad = pg * wm[:, None] + pv[:, None] * dwm
            if order >= 2:
                hess = (ph * wm[:, None, None]
                        + np.einsum("ni,nj->nij", pg, dwm)
                        + np.einsum("ni,nj->nij", dwm, pg)
                        + pv[:, None, None] * d2wm)

            if m == 0:
                slots = [(lm_index(l, 0), np.real, 1.0)]
            else:
                slots = [(lm_index(l, m), np.real, s2), (lm_index(l, -m), np.imag, s2)]
            for idx, part, scale in slots:
                Y[:, idx] = scale * part(val)
                if order >= 1:
                    dY[:, idx] = scale * part(grad)
                if order >= 2:
                    d2Y[:, idx] = scale * part(hess)

    out = (Y,)
    if order >= 1:
        out += (dY,)
    if order >= 2:
        out += (d2Y,)
    return out
