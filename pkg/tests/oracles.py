"""Brute-force references kept independent of the solver code paths."""

import numpy as np

from hedgecong.hedgehog_geom import curvature_operator, tangent_basis
from hedgecong.sphere_core import icosphere_grid


def dense_phase_search(fpos, gpos, n=1_000_000, chunk=100_000):
    """Minimise max_{k=0,|k|>=2} |g_k - f_k e^{ik phi}| over n equispaced phi.

    Returns (best_phi, best_value, values) with values on the whole grid.
    """
    K = len(fpos) - 1
    k = np.arange(2, K + 1)
    phis = -np.pi + 2.0 * np.pi * (np.arange(n) + 1) / n
    vals = np.empty(n)
    for s in range(0, n, chunk):
        p = phis[s:s + chunk]
        r = np.abs(gpos[None, 2:] - fpos[None, 2:] * np.exp(1j * np.outer(p, k))).max(axis=1)
        vals[s:s + chunk] = np.maximum(r, abs(gpos[0] - fpos[0]))
    i = int(np.argmin(vals))
    return phis[i], vals[i], phis, vals


def symmetry_defect_scan(pos, n=1_000_000):
    """min over beta in [pi/K, 2pi - pi/K] of max_{k>=2} |h_k| |e^{ik beta} - 1|.

    Nontrivial symmetry angles of a degree-K function are at least 2pi/K from 0.
    """
    K = len(pos) - 1
    exclude = np.pi / K
    k = np.arange(2, K + 1)
    beta = exclude + (2.0 * np.pi - 2 * exclude) * np.arange(n) / (n - 1)
    out = np.inf
    for s in range(0, n, 100_000):
        b = beta[s:s + 100_000]
        v = (np.abs(pos[None, 2:]) * np.abs(np.exp(1j * np.outer(b, k)) - 1.0)).max(axis=1)
        out = min(out, v.min())
    return out


def legendre_at_zero(l):
    """P_l(0) from the closed form (-1)^{l/2} (l-1)!! / l!!."""
    if l % 2:
        return 0.0
    num = den = 1.0
    for j in range(1, l + 1):
        if j % 2:
            num *= j
        else:
            den *= j
    return (-1) ** (l // 2) * num / den


def _min_eig(C, r):
    return np.linalg.eigvalsh(C + r * np.eye(2))[:, 0]


def convexify_oracle(f, level=5, n_zoom=10, n_seeds=6, patch=21):
    """Bisection on r over an eigen-scan of a dense icosphere plus zoomed patches.

    Zooming shrinks a patch x patch tangent grid around the current best
    point by a factor 5 per level, starting from the dense-grid spacing.
    """
    grid = icosphere_grid(level)
    X = grid.directions
    C = curvature_operator(f, X)
    lam = _min_eig(C, 0.0)
    pts = [X]
    mats = [C]
    spacing = grid.resolution()
    for i in np.argsort(lam)[:n_seeds]:
        center = X[i]
        half = spacing
        for _ in range(n_zoom):
            T1, T2 = tangent_basis(center[None, :])
            s = np.linspace(-half, half, patch)
            a, b = np.meshgrid(s, s)
            P = center + a.ravel()[:, None] * T1 + b.ravel()[:, None] * T2
            P /= np.linalg.norm(P, axis=1)[:, None]
            Cp = curvature_operator(f, P)
            pts.append(P)
            mats.append(Cp)
            center = P[np.argmin(_min_eig(Cp, 0.0))]
            half /= 5.0
    C = np.concatenate(mats)
    lo, hi = 0.0, 1.0
    while _min_eig(C, hi).min() < 0:
        hi *= 2.0
    if _min_eig(C, lo).min() >= 0:
        return 0.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if _min_eig(C, mid).min() >= 0:
            hi = mid
        else:
            lo = mid
    return hi
