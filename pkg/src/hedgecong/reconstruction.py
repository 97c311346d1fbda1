"""Translation merging and the global sign/translation classifier.

Given f, g on S^2 whose great-circle restrictions are directly congruent,
decide whether g = f + b.u or g = f(-.) + b.u and recover b.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np

from .circle_congruence import DEFAULT_TOL, restrict_batch
from .funk import even_equality_check
from .rotation_field import compute_field, level_set
from .sphere_core import check_unit, frames_batch


class ReconstructionError(Exception):
    """Inputs fall outside the hypothesis of the reconstruction theorem."""


class HypothesisViolated(ReconstructionError):
    pass


class AmbiguousInput(ReconstructionError):
    pass


class InconsistentTranslations(ValueError):
    pass


@dataclass(frozen=True)
class ReconstructionResult:
    sign: int
    b: tuple
    residual: float
    xi0_fraction: float
    xipi_fraction: float

    def to_dict(self):
        return {"sign": int(self.sign), "b": [float(v) for v in self.b], "residual": float(self.residual),
                "xi0_fraction": float(self.xi0_fraction), "xipi_fraction": float(self.xipi_fraction)}

    @classmethod
    def from_dict(cls, d):
        return cls(int(d["sign"]), tuple(float(v) for v in d["b"]), float(d["residual"]),
                   float(d["xi0_fraction"]), float(d["xipi_fraction"]))

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def merge_translations(xi1, a1, xi2, a2, tol=1e-8):
    """Common translation y with y.u = a_i.u on xi_i^perp, i = 1, 2.

    a1 - a2 must be a combination t xi1 + s xi2; then y = a1 - t xi1.
    """
    xi1, xi2 = check_unit(xi1), check_unit(xi2)
    a1, a2 = np.asarray(a1, dtype=float), np.asarray(a2, dtype=float)
    if np.linalg.norm(np.cross(xi1, xi2)) < 1e-8:
        raise ValueError("planes are parallel")
    A = np.column_stack([xi1, xi2])
    (t, s), *_ = np.linalg.lstsq(A, a1 - a2, rcond=None)
    if np.linalg.norm(A @ [t, s] - (a1 - a2)) > tol:
        raise InconsistentTranslations("a1 - a2 is not orthogonal to the common line; no common translation")
    return a1 - t * xi1


def fit_global_translation(f, g, sign, grid):
    """Weighted least-squares b for g(u) ~ f(sign u) + b.u over ``grid``.

    Returns ``(b, residual)`` with residual the sup over the grid.
    """
    D = g - f.signed(sign)
    X = grid.directions
    vals = D(X)
    w = grid.weights
    b = np.linalg.solve((X * w[:, None]).T @ X, X.T @ (w * vals))
    return b, float(np.abs(vals - X @ b).max())


def _circle_sup(modes, n):
    """Sup over n equispaced angles of the real series with positive modes ``modes``."""
    K = modes.shape[-1] - 1
    th = 2.0 * np.pi * np.arange(n) / n
    k = np.arange(K + 1)
    E = np.exp(1j * np.outer(k, th))
    weights = np.where(k == 0, 1.0, 2.0)
    vals = ((modes * weights) @ E).real
    return np.abs(vals).max(axis=-1)


def verify_three_plane(f, G, w1, w2, w3, tol=1e-8):
    """Three-plane test: G = f on E(w1), E(w2) forces the translation on E(w3) to vanish.

    Returns True when G = f within ``tol`` on E(w1) and E(w2) and the best-fit
    planar translation a with G = f + a.u on E(w3) has |a| <= tol.
    """
    W = check_unit(np.array([w1, w2, w3], dtype=float))
    if abs(np.linalg.det(W)) < 1e-6:
        raise ValueError("w1, w2, w3 are coplanar")
    L = max(f.degree_max, G.degree_max)
    D = (G - f).with_degree(L)
    modes, _, _ = restrict_batch(D, W)
    n = 4 * L + 4
    sup12 = _circle_sup(modes[:2], n)
    a = 2.0 * np.abs(modes[2, 1]) if L >= 1 else 0.0
    return bool(np.all(sup12 <= tol) and a <= tol)


class Membership(enum.IntFlag):
    NEITHER = 0
    XI0 = 1
    XIPI = 2
    BOTH = 3


@dataclass(frozen=True, eq=False)
class HalvesClassification:
    membership: np.ndarray
    residual_plus: np.ndarray
    residual_minus: np.ndarray

    def fraction(self, flag):
        return float(np.mean((self.membership & flag) == flag))


def classify_by_halves(f, g, grid, tol=DEFAULT_TOL, chunk=1024):
    """Per direction, test g = f(+-v) + a.v on E(xi) with the best planar a.

    The best a removes the k = +-1 modes of the difference; the residual is
    the sup of what remains over 4L+4 points on the circle.
    """
    L = max(f.degree_max, g.degree_max)
    f, g = f.with_degree(L), g.with_degree(L)
    n = len(grid)
    rp = np.empty(n)
    rm = np.empty(n)
    parity = (-1.0) ** np.arange(L + 1)
    for start in range(0, n, chunk):
        sl = slice(start, min(start + chunk, n))
        frames = frames_batch(grid.directions[sl])
        fm, _, _ = restrict_batch(f, grid.directions[sl], frames=frames)
        gm, _, _ = restrict_batch(g, grid.directions[sl], frames=frames)
        for sign, out in ((1.0, rp), (-1.0, rm)):
            d = gm - (fm * parity if sign < 0 else fm)
            if L >= 1:
                d[:, 1] = 0.0
            out[sl] = _circle_sup(d, 4 * L + 4)
    member = np.where(rp <= tol, int(Membership.XI0), 0) | np.where(rm <= tol, int(Membership.XIPI), 0)
    return HalvesClassification(member, rp, rm)


def classify_and_reconstruct(f, g, grid, tol=DEFAULT_TOL, tol_angle=1e-6):
    """Decide g = f + b.u or g = f(-.) + b.u and recover b.

    Steps: even-part equality, rotation field over ``grid``, dominant level set
    (angle 0 or pi on more than half the valid directions), global fit, and a
    residual recomputed from the returned (sign, b).

    Raises HypothesisViolated when the even parts differ and AmbiguousInput
    when neither level set dominates.
    """
    ok, defect = even_equality_check(f, g, grid, tol)
    if not ok:
        raise HypothesisViolated(f"even parts differ (max defect {defect:.3e})")
    field = compute_field(f, g, grid, tol)
    nvalid = int(field.valid.sum())
    if nvalid == 0:
        raise AmbiguousInput("no direction admits a unique congruence")
    p0 = len(level_set(field, 0.0, tol_angle)) / nvalid
    ppi = len(level_set(field, np.pi, tol_angle)) / nvalid
    if p0 > 0.5 and p0 > ppi:
        sign = 1
    elif ppi > 0.5 and ppi > p0:
        sign = -1
    else:
        raise AmbiguousInput(f"no dominant level set (angle 0: {p0:.3f}, angle pi: {ppi:.3f})")
    b, _ = fit_global_translation(f, g, sign, grid)
    D = g - f.signed(sign)
    residual = float(np.abs(D(grid.directions) - grid.directions @ b).max())
    return ReconstructionResult(sign, tuple(float(v) for v in b), residual, p0, ppi)
