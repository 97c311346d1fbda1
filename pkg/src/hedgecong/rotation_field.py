"""The direction-indexed rotation angle field and its structural checks."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .circle_congruence import DEFAULT_TOL, circular_distance, restrict_batch, solve_modes
from .sphere_core import SphereGrid, check_unit, frames_batch, great_circle_frame

CHUNK = 1024


@dataclass(frozen=True, eq=False)
class RotationField:
    """Least-angle congruence solution per grid direction.

    Angles are measured counterclockwise about ``xi`` in the right-handed frame
    at ``xi`` and are NaN where ``valid`` is false (no solution, or degenerate
    restriction).  ``translations`` holds the planar translation as a 3-vector.
    """

    grid: SphereGrid
    angles: np.ndarray
    valid: np.ndarray
    residuals: np.ndarray
    multiplicity: np.ndarray
    translations: np.ndarray = field(default=None)

    def valid_fraction(self):
        return float(np.mean(self.valid))

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["xi_x", "xi_y", "xi_z", "angle", "valid", "residual", "multiplicity"])
        for d, a, v, r, m in zip(self.grid.directions, self.angles, self.valid, self.residuals,
                                 self.multiplicity):
            w.writerow([repr(float(d[0])), repr(float(d[1])), repr(float(d[2])),
                        repr(float(a)) if v else "", int(v), repr(float(r)), int(m)])
        return buf.getvalue()

    @staticmethod
    def rows_from_csv(text):
        """Parse CSV produced by :meth:`to_csv` into column arrays."""
        rows = list(csv.DictReader(io.StringIO(text)))
        dirs = np.array([[float(r["xi_x"]), float(r["xi_y"]), float(r["xi_z"])] for r in rows])
        angles = np.array([float(r["angle"]) if r["angle"] else np.nan for r in rows])
        valid = np.array([r["valid"] == "1" for r in rows])
        residuals = np.array([float(r["residual"]) for r in rows])
        mult = np.array([r["multiplicity"] == "1" for r in rows])
        return dirs, angles, valid, residuals, mult


def compute_field(f, g, grid, tol=DEFAULT_TOL):
    """Solve the congruence equation on E(xi) for every grid direction."""
    if f.degree_max != g.degree_max:
        L = max(f.degree_max, g.degree_max)
        f, g = f.with_degree(L), g.with_degree(L)
    n = len(grid)
    angles = np.full(n, np.nan)
    valid = np.zeros(n, dtype=bool)
    residuals = np.full(n, np.inf)
    mult = np.zeros(n, dtype=bool)
    trans = np.full((n, 3), np.nan)
    dirs = grid.directions
    for start in range(0, n, CHUNK):
        sl = slice(start, min(start + CHUNK, n))
        frames = frames_batch(dirs[sl])
        fm, _, _ = restrict_batch(f, dirs[sl], frames=frames)
        gm, _, _ = restrict_batch(g, dirs[sl], frames=frames)
        for j, (sols, degenerate) in enumerate(solve_modes(fm, gm, tol)):
            i = start + j
            if not sols:
                continue
            phi, a, r = sols[0]
            residuals[i] = r
            mult[i] = degenerate or len(sols) > 1
            if degenerate:
                continue
            valid[i] = True
            angles[i] = phi
            trans[i] = a.real * frames[0][j] - a.imag * frames[1][j]
    return RotationField(grid, angles, valid, residuals, mult, trans)


@dataclass(frozen=True)
class FieldRegularity:
    max_jump: float
    median_jump: float
    oddness_defect: float
    jump_tol: float
    passed: bool


def check_field_regularity(field, jump_tol=None, odd_tol=1e-8, min_valid=0.9):
    """Largest circular jump across grid edges and antipodal oddness defect.

    ``jump_tol`` defaults to ten times the median edge jump.  Passing needs
    max jump <= jump_tol and oddness defect <= odd_tol.
    """
    if field.valid_fraction() < min_valid:
        raise ValueError(f"only {field.valid_fraction():.1%} of directions are valid")
    a = field.grid.adjacency
    ok = field.valid[a[:, 0]] & field.valid[a[:, 1]]
    jumps = circular_distance(field.angles[a[ok, 0]], field.angles[a[ok, 1]])
    max_jump = float(jumps.max(initial=0.0))
    median_jump = float(np.median(jumps)) if jumps.size else 0.0
    anti = field.grid.antipode
    both = field.valid & field.valid[anti]
    odd = circular_distance(field.angles[anti][both], -field.angles[both])
    odd_defect = float(odd.max(initial=0.0))
    tol = 10.0 * median_jump if jump_tol is None else float(jump_tol)
    return FieldRegularity(max_jump, median_jump, odd_defect, tol,
                           max_jump <= tol and odd_defect <= odd_tol)


@dataclass(frozen=True, eq=False)
class LevelSet:
    target: float
    members: np.ndarray
    tol_angle: float
    directions: np.ndarray = field(default=None)

    def __len__(self):
        return len(self.members)


def level_set(field, target, tol_angle=1e-6):
    """Valid directions whose angle lies within ``tol_angle`` of ``target`` (0 or pi)."""
    if not (np.isclose(target, 0.0) or np.isclose(abs(target), np.pi)):
        raise ValueError("level sets are defined for targets 0 and pi")
    idx = np.nonzero(field.valid)[0]
    d = circular_distance(field.angles[idx], target)
    members = idx[d <= tol_angle]
    return LevelSet(float(target), members, float(tol_angle), field.grid.directions[members])


FULL_SPHERE_EIG = 0.1


def is_great_circle(S, fit_tol=1e-2):
    """Test whether the level-set directions lie on one great circle.

    Fits a plane through the origin via the smallest eigenvector of the
    normalized second-moment matrix.  Returns ``(True, normal)`` when every
    member is within ``fit_tol`` of the plane and the members are not confined
    to a half circle.  Member sets whose smallest moment eigenvalue exceeds
    FULL_SPHERE_EIG (1/3 for uniform sphere coverage) return ``(False, None)``.
    """
    X = np.asarray(S.directions, dtype=float)
    if len(X) < 3:
        raise ValueError("need at least 3 members to fit a great circle")
    M = X.T @ X / len(X)
    w, V = np.linalg.eigh(M)
    if w[0] > FULL_SPHERE_EIG:
        return False, None
    normal = V[:, 0]
    if np.abs(X @ normal).max() > fit_tol:
        return False, normal
    e1 = V[:, 2]
    e2 = np.cross(normal, e1)
    t = np.sort(np.arctan2(X @ e2, X @ e1))
    gaps = np.diff(np.concatenate([t, [t[0] + 2.0 * np.pi]]))
    return bool(gaps.max() <= np.pi + 1e-12), normal


@dataclass(frozen=True)
class MeridianCoverage:
    covered_fraction: float
    gaps: list
    counts: np.ndarray
    bin_width: float


def meridian_coverage(S, u0, grid, bin_width=None):
    """Fraction of meridians from u0 to -u0 that meet the level set.

    Members are binned by longitude about the axis u0 (bin 0 is centred on
    the e1 direction of the frame at u0); gaps are maximal runs of empty bins
    reported as ``(start, end)`` longitude intervals.
    """
    u0 = check_unit(u0)
    width = grid.resolution() if bin_width is None else float(bin_width)
    nbins = max(1, int(np.ceil(2.0 * np.pi / width - 1e-9)))
    width = 2.0 * np.pi / nbins
    fr = great_circle_frame(u0)
    X = np.asarray(S.directions, dtype=float).reshape(-1, 3)
    X = X[np.abs(X @ u0) < 1.0 - 1e-12]
    t = np.mod(np.arctan2(X @ np.asarray(fr.e2), X @ np.asarray(fr.e1)), 2.0 * np.pi)
    bins = np.floor(t / width + 0.5).astype(int) % nbins
    counts = np.bincount(bins, minlength=nbins)
    empty = counts == 0
    gaps = []
    if empty.all():
        gaps = [(0.0, 2.0 * np.pi)]
    elif empty.any():
        start = int(np.argmin(empty))  # first covered bin
        run = None
        for j in range(start, start + nbins + 1):
            b = j % nbins
            if empty[b] and run is None:
                run = j
            elif not empty[b] and run is not None:
                gaps.append((((run - 0.5) * width) % (2.0 * np.pi), ((j - 0.5) * width) % (2.0 * np.pi)))
                run = None
    return MeridianCoverage(float(1.0 - empty.mean()), gaps, counts, width)
