"""Band-limited functions on S^2, great-circle frames and quadrature grids."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .harmonics import degree_of_count, degrees, lm_index, num_coeffs, real_sh_basis

UNIT_TOL = 1e-12
DEFAULT_DEGREE = 16


def check_unit(u, tol=UNIT_TOL):
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != 3:
        raise ValueError(f"expected 3-vectors, got shape {u.shape}")
    norms = np.linalg.norm(u, axis=-1)
    if np.any(np.abs(norms - 1.0) > tol) or not np.all(np.isfinite(u)):
        raise ValueError("direction is not a unit vector")
    return u


@dataclass(frozen=True, eq=False)
class SphereFun:
    """Real function on S^2 as real spherical-harmonic coefficients."""

    degree_max: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.ndim != 1 or c.size != num_coeffs(self.degree_max):
            raise ValueError(
                f"degree {self.degree_max} needs {num_coeffs(self.degree_max)} coefficients, got {c.size}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, L):
        return cls(L, np.zeros(num_coeffs(L)))

    @classmethod
    def constant(cls, value, L=0):
        c = np.zeros(num_coeffs(L))
        c[0] = value * np.sqrt(4.0 * np.pi)
        return cls(L, c)

    @classmethod
    def linear(cls, v, L=1):
        """The linear form u -> u . v."""
        c = np.zeros(num_coeffs(max(L, 1)))
        s = np.sqrt(4.0 * np.pi / 3.0)
        c[lm_index(1, -1)] = s * v[1]
        c[lm_index(1, 0)] = s * v[2]
        c[lm_index(1, 1)] = s * v[0]
        return cls(max(L, 1), c)

    @classmethod
    def random(cls, L, rng, scale=1.0, decay=0.0):
        """Gaussian coefficients, optionally damped by (1 + l)^-decay."""
        c = rng.standard_normal(num_coeffs(L)) * scale
        if decay:
            c = c / (1.0 + degrees(L)) ** decay
        return cls(L, c)

    @classmethod
    def from_function(cls, func, L):
        """Project a vectorised callable ``func((N,3)) -> (N,)`` onto degree <= L."""
        grid = gauss_legendre_grid(L)
        return sh_fit(grid, func(grid.directions), L)

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        (Y,) = real_sh_basis(u.reshape(-1, 3), self.degree_max)
        vals = Y @ self.coeffs
        return vals[0] if u.ndim == 1 else vals.reshape(u.shape[:-1])

    def with_degree(self, L):
        if L < self.degree_max:
            raise ValueError("cannot truncate to a lower degree")
        c = np.zeros(num_coeffs(L))
        c[: self.coeffs.size] = self.coeffs
        return SphereFun(L, c)

    def _aligned(self, other):
        L = max(self.degree_max, other.degree_max)
        return self.with_degree(L), other.with_degree(L)

    def __add__(self, other):
        if np.isscalar(other):
            return self + SphereFun.constant(other)
        a, b = self._aligned(other)
        return SphereFun(a.degree_max, a.coeffs + b.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return SphereFun(self.degree_max, -self.coeffs)

    def __mul__(self, s):
        return SphereFun(self.degree_max, float(s) * self.coeffs)

    __rmul__ = __mul__

    def reflected(self):
        """u -> F(-u)."""
        sign = np.where(degrees(self.degree_max) % 2 == 0, 1.0, -1.0)
        return SphereFun(self.degree_max, sign * self.coeffs)

    def signed(self, sign):
        """u -> F(sign * u) for sign in {+1, -1}."""
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        return self if sign == 1 else self.reflected()

    def plus_linear(self, b):
        return self + SphereFun.linear(np.asarray(b, dtype=float))

    def linear_part(self):
        """Vector b of the degree-1 component b . u."""
        if self.degree_max < 1:
            return np.zeros(3)
        s = np.sqrt(3.0 / (4.0 * np.pi))
        c = self.coeffs
        return s * np.array([c[lm_index(1, 1)], c[lm_index(1, -1)], c[lm_index(1, 0)]])

    def sup_norm(self, grid=None):
        grid = grid or gauss_legendre_grid(2 * self.degree_max + 2)
        return float(np.abs(self(grid.directions)).max())

    def allclose(self, other, atol=1e-10):
        a, b = self._aligned(other)
        return bool(np.all(np.abs(a.coeffs - b.coeffs) <= atol))

    def to_dict(self):
        return {"degree_max": int(self.degree_max), "coeffs": [float(c) for c in self.coeffs]}

    @classmethod
    def from_dict(cls, d):
        L = int(d["degree_max"])
        coeffs = np.asarray(d["coeffs"], dtype=float)
        if coeffs.size != num_coeffs(L):
            raise ValueError("coefficient count does not match degree_max")
        return cls(L, coeffs)

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def sh_eval(F, u):
    """Value of ``F`` at the unit vector(s) ``u``; non-unit input raises ValueError."""
    return F(check_unit(u))


def even_odd_split(F):
    """Return ``(F_e, F_o)``: even-degree and odd-degree parts of ``F``."""
    even = degrees(F.degree_max) % 2 == 0
    return (SphereFun(F.degree_max, np.where(even, F.coeffs, 0.0)),
            SphereFun(F.degree_max, np.where(even, 0.0, F.coeffs)))


def _tangent_projector(u):
    return np.eye(3) - np.einsum("ni,nj->nij", u, u)


def surface_gradient(F, u):
    """Tangential gradient of ``F`` on the sphere at unit vector(s) ``u``."""
    u = check_unit(u)
    U = u.reshape(-1, 3)
    _, dY = real_sh_basis(U, F.degree_max, order=1)
    g = np.einsum("nci,c->ni", dY, F.coeffs)
    g = g - np.sum(g * U, axis=1)[:, None] * U
    return g[0] if u.ndim == 1 else g


def surface_hessian(F, u):
    """Covariant Hessian of ``F`` on S^2 as a 3x3 tangent-space operator.

    For an ambient extension P, Hess_S F = Pr (D^2 P) Pr - (u . grad P) Pr with
    Pr the tangent projector.
    """
    u = check_unit(u)
    U = u.reshape(-1, 3)
    _, dY, d2Y = real_sh_basis(U, F.degree_max, order=2)
    g = np.einsum("nci,c->ni", dY, F.coeffs)
    H = np.einsum("ncij,c->nij", d2Y, F.coeffs)
    Pr = _tangent_projector(U)
    radial = np.sum(g * U, axis=1)
    out = Pr @ H @ Pr - radial[:, None, None] * Pr
    return out[0] if u.ndim == 1 else out


@dataclass(frozen=True)
class GreatCircleFrame:
    """Right-handed orthonormal frame (e1, e2, xi) for E(xi) = S^2 ∩ xi^perp."""

    xi: tuple
    e1: tuple
    e2: tuple

    def point(self, theta):
        """u(theta) = cos(theta) e1 + sin(theta) e2, shape (..., 3)."""
        theta = np.asarray(theta, dtype=float)
        return (np.cos(theta)[..., None] * np.asarray(self.e1)
                + np.sin(theta)[..., None] * np.asarray(self.e2))

    def matrix(self):
        """Columns e1, e2, xi."""
        return np.column_stack([self.e1, self.e2, self.xi])

    def to_dict(self):
        return {"xi": list(self.xi), "e1": list(self.e1), "e2": list(self.e2)}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(float(v) for v in d["xi"]), tuple(float(v) for v in d["e1"]),
                   tuple(float(v) for v in d["e2"]))


POLE_CUT = 1e-8


def great_circle_frame(xi):
    """Deterministic frame for the great circle orthogonal to ``xi``.

    e1 = normalize(e3 x xi) and e2 = xi x e1.  Within POLE_CUT of the poles
    e1 falls back to the x-axis.  The frame is continuous away from the poles
    only; no global continuous choice exists.
    """
    xi = check_unit(xi).astype(float)
    e1 = np.cross([0.0, 0.0, 1.0], xi)
    n = np.linalg.norm(e1)
    if n < POLE_CUT:
        e1 = np.array([1.0, 0.0, 0.0])
    else:
        e1 = e1 / n
    e1 = e1 - np.dot(e1, xi) * xi
    e1 = e1 / np.linalg.norm(e1)
    e2 = np.cross(xi, e1)
    e2 = e2 / np.linalg.norm(e2)
    return GreatCircleFrame(tuple(xi.tolist()), tuple(e1.tolist()), tuple(e2.tolist()))


def frames_batch(xis):
    """Vectorised great_circle_frame: returns (E1, E2) arrays of shape (N, 3).

    Matches great_circle_frame bit-for-bit row by row.
    """
    out1 = np.empty_like(xis)
    out2 = np.empty_like(xis)
    for i, xi in enumerate(xis):
        fr = great_circle_frame(xi)
        out1[i] = fr.e1
        out2[i] = fr.e2
    return out1, out2


@dataclass(frozen=True, eq=False)
class SphereGrid:
    """Directions with quadrature weights and a neighbour graph.

    ``exact_degree`` is the polynomial degree integrated exactly by the
    weights, or None when the weights are only approximate.
    """

    directions: np.ndarray
    adjacency: np.ndarray
    weights: np.ndarray
    exact_degree: int | None = None
    antipode: np.ndarray = field(default=None)

    def __post_init__(self):
        d = np.asarray(self.directions, dtype=float)
        object.__setattr__(self, "directions", d)
        object.__setattr__(self, "adjacency", np.asarray(self.adjacency, dtype=int).reshape(-1, 2))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        if self.antipode is None:
            tree = cKDTree(d)
            dist, idx = tree.query(-d)
            if np.any(dist > 1e-9):
                raise ValueError("grid is not antipodally closed")
            object.__setattr__(self, "antipode", idx)
        for arr in (self.directions, self.adjacency, self.weights, self.antipode):
            arr.setflags(write=False)

    def __len__(self):
        return len(self.directions)

    def is_connected(self):
        n = len(self)
        a = self.adjacency
        m = coo_matrix((np.ones(len(a)), (a[:, 0], a[:, 1])), shape=(n, n))
        return connected_components(m, directed=False)[0] == 1

    def edge_angles(self):
        d = self.directions
        a = self.adjacency
        c = np.clip(np.sum(d[a[:, 0]] * d[a[:, 1]], axis=1), -1.0, 1.0)
        return np.arccos(c)

    def resolution(self):
        """Median angular length of the neighbour edges."""
        return float(np.median(self.edge_angles()))

    def integrate(self, values):
        return float(np.dot(self.weights, values))


def gauss_legendre_grid(L):
    """Product grid exact for polynomials of degree 2L.

    L+1 Gauss-Legendre nodes in z = cos(colatitude) times 2L+2 equispaced
    longitudes.  The longitude count is even, so the grid is antipodally closed.
    """
    nlat = L + 1
    nlon = 2 * L + 2
    z, wz = np.polynomial.legendre.leggauss(nlat)
    lon = 2.0 * np.pi * np.arange(nlon) / nlon
    s = np.sqrt(1.0 - z * z)
    dirs = np.stack([
        (s[:, None] * np.cos(lon)[None, :]).ravel(),
        (s[:, None] * np.sin(lon)[None, :]).ravel(),
        np.repeat(z, nlon),
    ], axis=1)
    weights = np.repeat(wz, nlon) * (2.0 * np.pi / nlon)
    idx = np.arange(nlat * nlon).reshape(nlat, nlon)
    edges = [np.stack([idx.ravel(), np.roll(idx, -1, axis=1).ravel()], axis=1)]
    if nlat > 1:
        edges.append(np.stack([idx[:-1].ravel(), idx[1:].ravel()], axis=1))
    # ring i longitude j maps to ring nlat-1-i longitude j + nlon/2
    anti = idx[::-1, :][:, (np.arange(nlon) + nlon // 2) % nlon].ravel()
    return SphereGrid(dirs, np.concatenate(edges), weights, exact_degree=2 * L + 1, antipode=anti)


def _spherical_triangle_area(a, b, c):
    num = np.abs(np.einsum("ij,ij->i", a, np.cross(b, c)))
    den = 1.0 + np.einsum("ij,ij->i", a, b) + np.einsum("ij,ij->i", b, c) + np.einsum("ij,ij->i", c, a)
    return 2.0 * np.arctan2(num, den)


def icosphere(level):
    """Vertices and faces of a subdivided icosahedron projected to S^2."""
    t = (1.0 + np.sqrt(5.0)) / 2.0
    verts = [[-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
             [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
             [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1]]
    faces = [[0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
             [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
             [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
             [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1]]
    verts = [np.array(v, dtype=float) / np.linalg.norm(v) for v in verts]
    for _ in range(level):
        cache = {}

        def midpoint(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                m = verts[i] + verts[j]
                verts.append(m / np.linalg.norm(m))
                cache[key] = len(verts) - 1
            return cache[key]

        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces += [[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]
        faces = new_faces
    return np.array(verts), np.array(faces, dtype=int)


def icosphere_grid(level=5):
    """Near-uniform grid from icosahedron subdivision (10 * 4^level + 2 points).

    Weights are one third of the spherical area of each incident triangle,
    rescaled so they sum to 4 pi.
    """
    verts, faces = icosphere(level)
    area = _spherical_triangle_area(verts[faces[:, 0]], verts[faces[:, 1]], verts[faces[:, 2]])
    weights = np.zeros(len(verts))
    for k in range(3):
        np.add.at(weights, faces[:, k], area / 3.0)
    weights *= 4.0 * np.pi / weights.sum()
    edges = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
    edges = np.unique(np.sort(edges, axis=1), axis=0)
    return SphereGrid(verts, edges, weights, exact_degree=None)


def sh_fit(grid, values, L):
    """Spherical-harmonic coefficients of degree <= L from samples on ``grid``.

    On a grid with declared exactness >= 2L the fit is the quadrature
    projection, an exact inverse of sampling for degree-<=L inputs.  Grids
    without declared exactness fall back to least squares and must have full
    column rank.
    """
    values = np.asarray(values, dtype=float)
    if values.shape != (len(grid),):
        raise ValueError("one value per grid direction is required")
    (Y,) = real_sh_basis(grid.directions, L)
    if grid.exact_degree is not None:
        if grid.exact_degree < 2 * L:
            raise ValueError(f"grid is exact to degree {grid.exact_degree}, fitting degree {L} needs {2 * L}")
        return SphereFun(L, Y.T @ (grid.weights * values))
    if len(grid) < num_coeffs(L):
        raise ValueError("too few samples for the requested degree")
    sw = np.sqrt(grid.weights)
    coeffs, _, rank, sv = np.linalg.lstsq(Y * sw[:, None], values * sw, rcond=None)
    if rank < num_coeffs(L) or sv[-1] < 1e-8 * sv[0]:
        raise ValueError("grid does not resolve the requested degree")
    return SphereFun(L, coeffs)


def degree_from_coeffs(coeffs):
    return degree_of_count(len(coeffs))
