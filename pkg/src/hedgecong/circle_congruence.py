"""Functions on great circles and direct-congruence solving by Fourier phase.

A circle function is ``h(theta) = sum_k c_k exp(i k theta)`` on
``u(theta) = cos(theta) e1 + sin(theta) e2``.  Rotating by ``phi`` multiplies
mode k by ``exp(i k phi)``; adding ``a . u`` with ``a`` in the plane only
touches modes k = +-1.  So ``f(rot_phi u) + a . u = g(u)`` holds exactly when
``g_k = f_k exp(i k phi)`` for k = 0 and |k| >= 2, and the k = 1 residue
gives the translation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import reduce
from math import gcd

import numpy as np

from .sphere_core import GreatCircleFrame, check_unit, frames_batch, great_circle_frame

DEFAULT_TOL = 1e-8


def wrap_angle(phi):
    """Map angles to (-pi, pi]."""
    phi = np.asarray(phi, dtype=float)
    out = np.mod(phi + np.pi, 2.0 * np.pi) - np.pi
    out = np.where(out <= -np.pi, out + 2.0 * np.pi, out)
    return out if out.ndim else float(out)


def circular_distance(a, b):
    d = np.abs(np.mod(np.asarray(a) - np.asarray(b) + np.pi, 2.0 * np.pi) - np.pi)
    return d if np.ndim(d) else float(d)


@dataclass(frozen=True, eq=False)
class CircleFun:
    """Real trigonometric polynomial of degree ``num_modes`` on a framed great circle.

    ``coeffs[k + num_modes]`` holds c_k for k = -K..K.
    """

    frame: GreatCircleFrame
    num_modes: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        K = self.num_modes
        if c.shape != (2 * K + 1,):
            raise ValueError(f"expected {2 * K + 1} coefficients, got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_positive(cls, frame, pos):
        """Build from modes c_0..c_K; negative modes are conjugates."""
        pos = np.asarray(pos, dtype=complex).copy()
        pos[0] = pos[0].real
        return cls(frame, len(pos) - 1, np.concatenate([np.conj(pos[:0:-1]), pos]))

    @classmethod
    def from_samples(cls, frame, values):
        """Fourier analysis of ``values`` at theta_j = 2 pi j / N; K = (N - 2) // 2."""
        values = np.asarray(values, dtype=float)
        N = values.size
        K = (N - 2) // 2
        c = np.fft.fft(values) / N
        return cls.from_positive(frame, c[: K + 1])

    def mode(self, k):
        return self.coeffs[k + self.num_modes]

    @property
    def positive(self):
        return self.coeffs[self.num_modes:]

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        k = np.arange(-self.num_modes, self.num_modes + 1)
        vals = np.exp(1j * np.multiply.outer(theta, k)) @ self.coeffs
        return vals.real

    def derivative(self, theta):
        theta = np.asarray(theta, dtype=float)
        k = np.arange(-self.num_modes, self.num_modes + 1)
        return (np.exp(1j * np.multiply.outer(theta, k)) @ (1j * k * self.coeffs)).real

    def sup_norm(self, n=None):
        n = n or 8 * (self.num_modes + 1)
        return float(np.abs(self(2.0 * np.pi * np.arange(n) / n)).max())

    def to_dict(self):
        flat = []
        for c in self.coeffs:
            flat += [float(c.real), float(c.imag)]
        return {"frame": self.frame.to_dict(), "num_modes": int(self.num_modes), "coeffs": flat}

    @classmethod
    def from_dict(cls, d):
        K = int(d["num_modes"])
        flat = np.asarray(d["coeffs"], dtype=float)
        if flat.size != 2 * (2 * K + 1):
            raise ValueError("coefficient list length does not match num_modes")
        c = flat[0::2] + 1j * flat[1::2]
        if np.abs(c - np.conj(c[::-1])).max(initial=0.0) > 1e-12 * max(1.0, np.abs(c).max()):
            raise ValueError("coefficients are not conjugate-symmetric")
        return cls(GreatCircleFrame.from_dict(d["frame"]), K, c)

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class CongruenceSolution:
    """One solution of f(rot_angle u) + a . u = g(u) on a circle.

    ``translation`` is (a1, a2) with a = a1 e1 + a2 e2.  ``degenerate`` marks
    the case where f and g have no modes |k| >= 2, so every angle works and
    angle 0 is reported as a representative.
    """

    angle: float
    translation: tuple
    residual: float
    multiplicity_flag: bool = False
    degenerate: bool = False

    def translation_vector(self, frame):
        return self.translation[0] * np.asarray(frame.e1) + self.translation[1] * np.asarray(frame.e2)

    def to_dict(self):
        return {"angle": self.angle, "translation": list(self.translation), "residual": self.residual,
                "multiplicity_flag": self.multiplicity_flag, "degenerate": self.degenerate}

    @classmethod
    def from_dict(cls, d):
        return cls(float(d["angle"]), tuple(float(v) for v in d["translation"]), float(d["residual"]),
                   bool(d["multiplicity_flag"]), bool(d.get("degenerate", False)))


@dataclass(frozen=True)
class SymmetryReport:
    has_symmetry: bool
    symmetry_angles: list = field(default_factory=list)
    degenerate: bool = False

    def to_dict(self):
        return {"has_symmetry": self.has_symmetry, "symmetry_angles": list(self.symmetry_angles),
                "degenerate": self.degenerate}

    @classmethod
    def from_dict(cls, d):
        return cls(bool(d["has_symmetry"]), [float(a) for a in d["symmetry_angles"]], bool(d["degenerate"]))


def circle_sample_thetas(K):
    N = 2 * K + 2
    return 2.0 * np.pi * np.arange(N) / N


def restrict_to_circle(F, xi, K=None):
    """Restriction of a SphereFun to E(xi) in the frame great_circle_frame(xi)."""
    K = F.degree_max if K is None else int(K)
    if K < F.degree_max:
        raise ValueError(f"K={K} is below the function degree {F.degree_max}; restriction would alias")
    frame = great_circle_frame(xi)
    return CircleFun.from_samples(frame, F(frame.point(circle_sample_thetas(K))))


def restrict_batch(F, xis, K=None, frames=None):
    """Positive modes c_0..c_K of F restricted to E(xi) for every row of ``xis``.

    Returns ``(modes, (E1, E2), samples)`` where ``samples`` are the values at
    the 2K+2 equispaced angles.
    """
    K = F.degree_max if K is None else int(K)
    if K < F.degree_max:
        raise ValueError("K below function degree")
    xis = check_unit(np.atleast_2d(xis))
    E1, E2 = frames if frames is not None else frames_batch(xis)
    th = circle_sample_thetas(K)
    pts = np.cos(th)[None, :, None] * E1[:, None, :] + np.sin(th)[None, :, None] * E2[:, None, :]
    vals = F(pts.reshape(-1, 3)).reshape(len(xis), len(th))
    modes = np.fft.fft(vals, axis=1)[:, : K + 1] / len(th)
    modes[:, 0] = modes[:, 0].real
    return modes, (E1, E2), vals


def apply_motion(h, angle, a):
    """Circle function theta -> h(theta + angle) + a1 cos(theta) + a2 sin(theta)."""
    K = h.num_modes
    k = np.arange(-K, K + 1)
    c = h.coeffs * np.exp(1j * k * angle)
    a1, a2 = a
    if K >= 1:
        c[K + 1] += (a1 - 1j * a2) / 2.0
        c[K - 1] += (a1 + 1j * a2) / 2.0
    elif a1 or a2:
        c = np.concatenate([[(a1 + 1j * a2) / 2.0], c, [(a1 - 1j * a2) / 2.0]])
        K = 1
    return CircleFun(h.frame, K, c)


def _pad(pos, K):
    out = np.zeros(pos.shape[:-1] + (K + 1,), dtype=complex)
    out[..., : pos.shape[-1]] = pos
    return out


def solve_modes(fpos, gpos, tol=DEFAULT_TOL):
    """Vectorised congruence solve on positive-mode arrays of shape (n, K+1).

    Returns, per pair, ``(solutions, degenerate)`` where solutions is a list of
    ``(angle, a_complex, residual)`` with a_complex = a1 - i a2, sorted by
    least |angle| with positive angles first on ties.
    """
    fpos = np.atleast_2d(np.asarray(fpos, dtype=complex))
    gpos = np.atleast_2d(np.asarray(gpos, dtype=complex))
    K = max(fpos.shape[1], gpos.shape[1]) - 1
    fpos, gpos = _pad(fpos, K), _pad(gpos, K)
    n = fpos.shape[0]
    tol = np.broadcast_to(np.asarray(tol, dtype=float), (n,))

    def residual(idx, phi):
        k = np.arange(2, K + 1)
        r0 = np.abs(gpos[idx, 0] - fpos[idx, 0])
        if K < 2:
            return r0
        rk = np.abs(gpos[idx][:, 2:] - fpos[idx][:, 2:] * np.exp(1j * np.outer(phi, k))).max(axis=1)
        return np.maximum(r0, rk)

    def translation(idx, phi):
        if K < 1:
            return np.zeros(len(idx), dtype=complex)
        return 2.0 * (gpos[idx, 1] - fpos[idx, 1] * np.exp(1j * phi))

    fhigh = np.abs(fpos[:, 2:]).max(axis=1, initial=0.0)
    degenerate = fhigh <= tol
    results = [([], bool(d)) for d in degenerate]

    deg_idx = np.nonzero(degenerate)[0]
    if deg_idx.size:
        zero = np.zeros(deg_idx.size)
        res = residual(deg_idx, zero)
        a = translation(deg_idx, zero)
        for j, i in enumerate(deg_idx):
            if res[j] <= tol[i]:
                results[i] = ([(0.0, a[j], float(res[j]))], True)

    live = np.nonzero(~degenerate)[0]
    if live.size:
        # S(phi) = const - 2 Re sum_k A_k e^{ik phi}, A_k = conj(g_k) f_k, k >= 2
        k = np.arange(2, K + 1)
        A = np.conj(gpos[live][:, 2:]) * fpos[live][:, 2:]
        M = 16 * K
        step = 2.0 * np.pi / M
        grid = -np.pi + step * np.arange(1, M + 1)
        S = -2.0 * (A @ np.exp(1j * np.outer(k, grid))).real
        is_min = (S <= np.roll(S, 1, axis=1)) & (S <= np.roll(S, -1, axis=1))
        rows, cols = np.nonzero(is_min)
        phi = grid[cols]
        Ac = A[rows]
        for _ in range(60):
            e = np.exp(1j * np.outer(phi, k))
            d1 = 2.0 * (Ac * e * k).imag.sum(axis=1)
            d2 = 2.0 * (Ac * e * k * k).real.sum(axis=1)
            newton = np.where(d2 > 0, -d1 / np.where(d2 > 0, d2, 1.0), -np.sign(d1) * step)
            delta = np.clip(newton, -step, step)
            phi = phi + delta
            if np.all(np.abs(delta) < 1e-15):
                break
        phi = wrap_angle(phi)
        pair = live[rows]
        res = residual(pair, phi)
        a = translation(pair, phi)
        ok = res <= tol[pair]
        buckets = {}
        for i, p, ac, r in zip(pair[ok], phi[ok], a[ok], res[ok]):
            sols = buckets.setdefault(int(i), [])
            for j, (q, _, rq) in enumerate(sols):
                if circular_distance(p, q) < 1e-7:
                    if r < rq:
                        sols[j] = (float(p), ac, float(r))
                    break
            else:
                sols.append((float(p), ac, float(r)))
        for i, sols in buckets.items():
            sols.sort(key=lambda s: (abs(s[0]), -s[0]))
            results[i] = (sols, False)
    return results


def _effective_tol(f, tol, relative):
    return tol * f.sup_norm() if relative else tol


def solve_congruence(f, g, tol=DEFAULT_TOL, relative=False):
    """All direct congruences ``f(rot u) + a . u = g(u)`` between two circle functions.

    Returns a list of CongruenceSolution sorted by least |angle|.  An empty
    list means the restrictions are not directly congruent at ``tol``.  With
    ``relative=True`` the tolerance is scaled by the sup norm of f.
    """
    if not np.allclose(f.frame.matrix(), g.frame.matrix(), atol=1e-12):
        raise ValueError("circle functions are expressed in different frames")
    t = _effective_tol(f, tol, relative)
    sols, degenerate = solve_modes(f.positive[None, :], g.positive[None, :], t)[0]
    multiple = degenerate or len(sols) > 1
    return [CongruenceSolution(float(wrap_angle(p)), (float(a.real) + 0.0, float(-a.imag) + 0.0), r, multiple, degenerate)
            for p, a, r in sols]


def active_modes(h, tol=DEFAULT_TOL):
    return [k for k in range(2, h.num_modes + 1) if abs(h.mode(k)) > tol]


def detect_symmetry(h, tol=DEFAULT_TOL):
    """Direct rigid-motion symmetries of a circle function.

    h(rot_beta u) + a . u = h(u) for some a iff exp(i k beta) = 1 on every
    active mode |k| >= 2, so beta ranges over multiples of 2 pi / gcd(active).
    With no active modes the function is symmetric under every rotation:
    ``degenerate`` is set, ``has_symmetry`` is true and no discrete angle
    list is produced.
    """
    active = active_modes(h, tol)
    if not active:
        return SymmetryReport(True, [], True)
    m = reduce(gcd, active)
    if m < 2:
        return SymmetryReport(False, [], False)
    return SymmetryReport(True, [2.0 * np.pi * j / m for j in range(1, m)], False)


def circle_envelope(h, theta):
    """Planar envelope of the lines x . u(theta) = h(theta), in (e1, e2) coordinates."""
    theta = np.asarray(theta, dtype=float)
    v, dv = h(theta), h.derivative(theta)
    c, s = np.cos(theta), np.sin(theta)
    return np.stack([v * c - dv * s, v * s + dv * c], axis=-1)
