"""Hedgehog geometry from a support function on S^2.

The hedgehog of h is the envelope of the planes x . u = h(u); it is
parameterized by x(u) = h(u) u + grad_S h(u).  Its curvature operator
Hess_S h + h I is the Hessian of the 1-homogeneous extension of h restricted
to the tangent plane, and is PSD everywhere exactly when h is the support
function of a convex body.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .circle_congruence import circle_envelope, restrict_to_circle
from .harmonics import real_sh_basis
from .sphere_core import SphereFun, check_unit, icosphere_grid


@dataclass(frozen=True, eq=False)
class Hedgehog:
    support: SphereFun

    def __post_init__(self):
        if self.support.degree_max < 1:
            object.__setattr__(self, "support", self.support.with_degree(1))


def envelope_point(H, u):
    """Point(s) of the hedgehog with outer normal ``u``."""
    u = check_unit(u)
    U = u.reshape(-1, 3)
    Y, dY = real_sh_basis(U, H.support.degree_max, order=1)
    c = H.support.coeffs
    val = Y @ c
    grad = np.einsum("nci,c->ni", dY, c)
    tang = grad - np.sum(grad * U, axis=1)[:, None] * U
    x = val[:, None] * U + tang
    return x[0] if u.ndim == 1 else x


def project_support(H, xi):
    """Support function of the projection onto xi^perp: the restriction of h to E(xi)."""
    return restrict_to_circle(H.support, xi, H.support.degree_max)


def projected_envelope(H, xi, theta):
    """Envelope of the projected hedgehog in the (e1, e2) coordinates of E(xi)."""
    return circle_envelope(project_support(H, xi), theta)


def width(H, u):
    u = check_unit(u)
    return H.support(u) + H.support(-u)


def tangent_basis(U):
    """Orthonormal (T1, T2) with T1 x T2 = u for each row; vectorised, not the circle frame."""
    U = np.atleast_2d(U)
    ref = np.where((np.abs(U[:, 2]) < 0.9)[:, None], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0])
    T1 = np.cross(ref, U)
    T1 /= np.linalg.norm(T1, axis=1)[:, None]
    T2 = np.cross(U, T1)
    return T1, T2


def curvature_operator(f, u):
    """2x2 matrix Hess_S f + f I in a tangent basis at each unit vector ``u``."""
    U = np.atleast_2d(check_unit(u))
    Y, dY, d2Y = real_sh_basis(U, f.degree_max, order=2)
    c = f.coeffs
    val = Y @ c
    grad = np.einsum("nci,c->ni", dY, c)
    hess = np.einsum("ncij,c->nij", d2Y, c)
    radial = np.sum(grad * U, axis=1)
    T1, T2 = tangent_basis(U)
    T = np.stack([T1, T2], axis=2)  # (n, 3, 2)
    out = np.einsum("nia,nij,njb->nab", T, hess, T)
    out += (val - radial)[:, None, None] * np.eye(2)
    return out


def min_curvature_eigenvalue(f, u):
    C = curvature_operator(f, u)
    a, b, d = C[:, 0, 0], C[:, 0, 1], C[:, 1, 1]
    return 0.5 * (a + d) - np.sqrt(0.25 * (a - d) ** 2 + b * b)


def _refine_minimum(f, u0):
    T1, T2 = tangent_basis(u0[None, :])

    def chart(p):
        v = u0 + p[0] * T1[0] + p[1] * T2[0]
        return v / np.linalg.norm(v)

    res = minimize(lambda p: min_curvature_eigenvalue(f, chart(p))[0], np.zeros(2),
                   method="Nelder-Mead",
                   options={"xatol": 1e-8, "fatol": 1e-13, "initial_simplex":
                            np.array([[0.0, 0.0], [0.02, 0.0], [0.0, 0.02]]), "maxiter": 2000})
    return float(res.fun)


def convexify_constant(f, grid=None, n_starts=8):
    """Smallest r >= 0 with Hess_S f + (f + r) I positive semidefinite on S^2.

    Adding r shifts every curvature eigenvalue by r, so r = max(0, -min
    lambda_min).  The minimum is located on ``grid`` (icosphere level 4 by
    default) and refined by local optimisation from the ``n_starts`` lowest
    grid local minima.
    """
    grid = grid or icosphere_grid(4)
    lam = min_curvature_eigenvalue(f, grid.directions)
    a = grid.adjacency
    is_min = np.ones(len(grid), dtype=bool)
    np.logical_and.at(is_min, a[:, 0], lam[a[:, 0]] <= lam[a[:, 1]])
    np.logical_and.at(is_min, a[:, 1], lam[a[:, 1]] <= lam[a[:, 0]])
    cand = np.nonzero(is_min)[0]
    cand = cand[np.argsort(lam[cand])][:n_starts]
    best = float(lam.min())
    for i in cand:
        best = min(best, _refine_minimum(f, grid.directions[i]))
    return max(0.0, -best)


def convexify(f, grid=None, margin=1.0):
    """Constant C = r + margin and the support function f + C of a convex body."""
    C = convexify_constant(f, grid) + margin
    return C, f + C


def transform_support(H, rot, a):
    """Support function of rot(H) + a, i.e. u -> h(rot^T u) + a . u."""
    rot = np.asarray(rot, dtype=float)
    if rot.shape != (3, 3) or np.abs(rot.T @ rot - np.eye(3)).max() > 1e-12:
        raise ValueError("rot must be an orthogonal 3x3 matrix")
    a = np.asarray(a, dtype=float)
    h = H.support
    new = SphereFun.from_function(lambda X: h(X @ rot) + X @ a, h.degree_max)
    return Hedgehog(new)


@dataclass(frozen=True, eq=False)
class Mesh:
    vertices: np.ndarray
    faces: np.ndarray

    def to_obj(self):
        buf = io.StringIO()
        for v in self.vertices:
            buf.write("v {!r} {!r} {!r}\n".format(*map(float, v)))
        for f in self.faces + 1:
            buf.write(f"f {f[0]} {f[1]} {f[2]}\n")
        return buf.getvalue()


def mesh_vertex_count(resolution):
    return 2 * resolution * (resolution - 1) + 2


def export_mesh(H, resolution):
    """Triangulated envelope over a latitude-longitude grid of normals.

    ``resolution`` n gives n-1 interior rings of 2n normals plus both poles:
    2n(n-1) + 2 vertices and 4n(n-1) triangles.  Hedgehogs can self-intersect,
    so the mesh is not guaranteed to be manifold.
    """
    n = int(resolution)
    if n < 3:
        raise ValueError("resolution must be at least 3")
    colat = np.pi * np.arange(1, n) / n
    lon = 2.0 * np.pi * np.arange(2 * n) / (2 * n)
    s, c = np.sin(colat), np.cos(colat)
    ring = np.stack([(s[:, None] * np.cos(lon)).ravel(), (s[:, None] * np.sin(lon)).ravel(),
                     np.repeat(c, 2 * n)], axis=1)
    normals = np.vstack([[0.0, 0.0, 1.0], ring, [0.0, 0.0, -1.0]])
    normals /= np.linalg.norm(normals, axis=1)[:, None]
    verts = envelope_point(H, normals)
    m = 2 * n
    idx = 1 + np.arange((n - 1) * m).reshape(n - 1, m)
    south = len(normals) - 1
    faces = []
    for j in range(m):
        faces.append([0, idx[0, j], idx[0, (j + 1) % m]])
    for i in range(n - 2):
        for j in range(m):
            a, b = idx[i, j], idx[i, (j + 1) % m]
            c2, d = idx[i + 1, j], idx[i + 1, (j + 1) % m]
            faces += [[a, c2, d], [a, d, b]]
    for j in range(m):
        faces.append([south, idx[-1, (j + 1) % m], idx[-1, j]])
    return Mesh(verts, np.array(faces, dtype=int))


def projection_curve_csv(H, xi, n=256):
    """CSV rows (theta, x, y) of the projected hedgehog in the frame of E(xi)."""
    theta = 2.0 * np.pi * np.arange(n) / n
    pts = projected_envelope(H, xi, theta)
    lines = ["theta,x,y"] + ["{!r},{!r},{!r}".format(float(t), float(p[0]), float(p[1])) for t, p in zip(theta, pts)]
    return "\n".join(lines) + "\n"
