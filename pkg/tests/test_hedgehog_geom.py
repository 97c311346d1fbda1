import numpy as np
import pytest

from conftest import random_rotation, random_unit
from hedgecong.harmonics import lm_index
from hedgecong.hedgehog_geom import (
    Hedgehog,
    convexify,
    convexify_constant,
    curvature_operator,
    envelope_point,
    export_mesh,
    mesh_vertex_count,
    min_curvature_eigenvalue,
    project_support,
    projected_envelope,
    projection_curve_csv,
    tangent_basis,
    transform_support,
    width,
)
from hedgecong.sphere_core import SphereFun, even_odd_split, great_circle_frame, icosphere_grid
from oracles import convexify_oracle

V = np.array([0.4, -0.3, 1.2])


@pytest.fixture(scope="module")
def H():
    return Hedgehog(SphereFun.random(7, np.random.default_rng(21)))


# ---------------------------------------------------------------------------
# envelope
# ---------------------------------------------------------------------------


def test_unit_sphere_envelope(rng):
    u = random_unit(rng, 50)
    assert np.allclose(envelope_point(Hedgehog(SphereFun.constant(1.0)), u), u, atol=1e-14)


def test_translated_sphere_envelope(rng):
    u = random_unit(rng, 50)
    H = Hedgehog(SphereFun.linear(V) + 1.0)
    assert np.allclose(envelope_point(H, u), u + V, atol=1e-14)


def test_support_plane_identity(H, rng):
    u = random_unit(rng, 10_000)
    x = envelope_point(H, u)
    assert np.abs(np.sum(x * u, axis=1) - H.support(u)).max() < 1e-10


def test_tangency_by_finite_differences(H, rng):
    # d/dt [x(u(t)) . u(t) - h(u(t))] = 0, i.e. x . u' = dh/dt
    h = 1e-6
    for u in random_unit(rng, 20):
        x = envelope_point(H, u)
        T1, T2 = tangent_basis(u)
        for t in (T1[0], T2[0]):
            up = np.cos(h) * u + np.sin(h) * t
            um = np.cos(h) * u - np.sin(h) * t
            dh = (H.support(up) - H.support(um)) / (2 * h)
            assert x @ t == pytest.approx(dh, abs=1e-6)


# ---------------------------------------------------------------------------
# projection
# ---------------------------------------------------------------------------


def test_project_unit_ball():
    h = project_support(Hedgehog(SphereFun.constant(1.0)), [0.6, 0.0, 0.8])
    assert h.mode(0) == pytest.approx(1.0, abs=1e-14)
    assert np.abs(h.coeffs).sum() == pytest.approx(1.0, abs=1e-13)


def test_project_vertical_linear_is_zero():
    h = project_support(Hedgehog(SphereFun.linear([0, 0, 1])), [0, 0, 1])
    assert np.abs(h.coeffs).max() < 1e-15


def test_projection_commutes_with_envelope(H, rng):
    theta = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    for xi in random_unit(rng, 10):
        fr = great_circle_frame(xi)
        u = fr.point(theta)
        x3 = envelope_point(H, u)
        planar = np.stack([x3 @ np.asarray(fr.e1), x3 @ np.asarray(fr.e2)], axis=1)
        assert np.allclose(projected_envelope(H, xi, theta), planar, atol=1e-8)


def test_projected_support_equals_restriction(H, rng):
    for xi in random_unit(rng, 10):
        h = project_support(H, xi)
        th = rng.uniform(0, 2 * np.pi, 30)
        assert np.abs(h(th) - H.support(h.frame.point(th))).max() < 1e-12


def test_projection_curve_csv(H):
    text = projection_curve_csv(H, [0.0, 0.0, 1.0], 8)
    lines = text.splitlines()
    assert lines[0] == "theta,x,y" and len(lines) == 9
    row = np.array(lines[3].split(","), dtype=float)
    assert np.allclose(row[1:], projected_envelope(H, [0, 0, 1], np.array([row[0]]))[0], atol=1e-14)


# ---------------------------------------------------------------------------
# width
# ---------------------------------------------------------------------------


def test_width_examples(rng):
    u = random_unit(rng, 100)
    assert np.allclose(width(Hedgehog(SphereFun.constant(1.0)), u), 2.0, atol=1e-14)
    assert np.allclose(width(Hedgehog(SphereFun.linear(V) + 1.0), u), 2.0, atol=1e-14)


def test_constant_plus_odd_has_constant_width(rng):
    _, fo = even_odd_split(SphereFun.random(9, rng))
    u = random_unit(rng, 10_000)
    assert np.abs(width(Hedgehog(fo + 5.0), u) - 10.0).max() < 1e-10


# ---------------------------------------------------------------------------
# curvature and convexification
# ---------------------------------------------------------------------------


def test_curvature_operator_matches_homogeneous_hessian(rng):
    # Hessian of |x| f(x/|x|) by central differences, restricted to the tangent plane
    f = SphereFun.random(5, rng)

    def ext(x):
        r = np.linalg.norm(x)
        return r * f(x / r)

    h = 1e-4
    for u in random_unit(rng, 5):
        T1, T2 = tangent_basis(u)
        T = [T1[0], T2[0]]
        fd = np.empty((2, 2))
        for a in range(2):
            for b in range(2):
                p, q = h * T[a], h * T[b]
                fd[a, b] = (ext(u + p + q) - ext(u + p - q) - ext(u - p + q) + ext(u - p - q)) / (4 * h * h)
        assert np.allclose(curvature_operator(f, u)[0], fd, atol=1e-5)


def test_min_eigenvalue_closed_form(rng):
    f = SphereFun.random(5, rng)
    u = random_unit(rng, 100)
    ref = np.linalg.eigvalsh(curvature_operator(f, u))[:, 0]
    assert np.allclose(min_curvature_eigenvalue(f, u), ref, atol=1e-12)


def test_sphere_curvature_is_identity(rng):
    C = curvature_operator(SphereFun.constant(2.0, 3), random_unit(rng, 10))
    assert np.allclose(C, 2.0 * np.eye(2), atol=1e-13)


def test_convexify_linear_and_constant():
    assert convexify_constant(SphereFun.linear(V)) < 1e-14
    assert convexify_constant(SphereFun.constant(1.0)) == 0.0


def test_convexify_degree_three_matches_oracle():
    c = np.zeros(16)
    c[lm_index(3, 0)] = 1.0
    f = SphereFun(3, c)
    r = convexify_constant(f)
    assert r > 0
    assert r == pytest.approx(convexify_oracle(f), abs=1e-6)


def test_convexified_function_is_psd(rng):
    f = SphereFun.random(5, rng)
    C, h = convexify(f, margin=0.0)
    dense = icosphere_grid(5)
    assert min_curvature_eigenvalue(h, dense.directions).min() >= -1e-8
    assert C == convexify_constant(f)
    _, h1 = convexify(f)
    assert h1.coeffs[0] == pytest.approx(h.coeffs[0] + np.sqrt(4 * np.pi))


def test_convexify_shift_property(rng):
    f = SphereFun.random(4, rng)
    r = convexify_constant(f)
    for c in (0.0, 0.3 * r, r, 2.0 * r):
        assert convexify_constant(f + c) == pytest.approx(max(r - c, 0.0), abs=1e-9)


# ---------------------------------------------------------------------------
# rigid motions
# ---------------------------------------------------------------------------


def test_transform_identity(H):
    assert np.allclose(transform_support(H, np.eye(3), np.zeros(3)).support.coeffs, H.support.coeffs, atol=1e-12)


def test_transform_translation_moves_envelope(H, rng):
    moved = transform_support(H, np.eye(3), V)
    u = random_unit(rng, 50)
    assert np.allclose(envelope_point(moved, u), envelope_point(H, u) + V, atol=1e-12)


def test_transform_equivariance(H, rng):
    rot = random_rotation(rng)
    a = rng.standard_normal(3)
    moved = transform_support(H, rot, a)
    u = random_unit(rng, 100)
    expected = envelope_point(H, u @ rot) @ rot.T + a
    assert np.allclose(envelope_point(moved, u), expected, atol=1e-8)
    assert moved.support.degree_max == H.support.degree_max


def test_transform_composition(H, rng):
    r1, r2 = random_rotation(rng), random_rotation(rng)
    a1, a2 = rng.standard_normal(3), rng.standard_normal(3)
    two_step = transform_support(transform_support(H, r1, a1), r2, a2)
    direct = transform_support(H, r2 @ r1, r2 @ a1 + a2)
    assert np.abs(two_step.support.coeffs - direct.support.coeffs).max() < 1e-9


def test_transform_rejects_non_orthogonal(H):
    with pytest.raises(ValueError):
        transform_support(H, np.diag([1.0, 1.0, 1.0 + 1e-9]), np.zeros(3))


def test_hedgehog_promotes_constant_support():
    assert Hedgehog(SphereFun.constant(1.0)).support.degree_max == 1


# ---------------------------------------------------------------------------
# mesh export
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("n", [3, 8, 17])
def test_mesh_counts(n):
    mesh = export_mesh(Hedgehog(SphereFun.constant(1.0)), n)
    assert len(mesh.vertices) == mesh_vertex_count(n) == 2 * n * (n - 1) + 2
    assert len(mesh.faces) == 4 * n * (n - 1)
    assert mesh.faces.min() == 0 and mesh.faces.max() == len(mesh.vertices) - 1


def test_mesh_of_unit_sphere():
    mesh = export_mesh(Hedgehog(SphereFun.constant(1.0)), 12)
    assert np.abs(np.linalg.norm(mesh.vertices, axis=1) - 1).max() < 1e-10


def test_mesh_of_translated_sphere():
    mesh = export_mesh(Hedgehog(SphereFun.linear(V) + 1.0), 12)
    assert np.abs(np.linalg.norm(mesh.vertices - V, axis=1) - 1).max() < 1e-10


def test_mesh_faces_outward_on_sphere():
    mesh = export_mesh(Hedgehog(SphereFun.constant(1.0)), 6)
    P = mesh.vertices[mesh.faces]
    normals = np.cross(P[:, 1] - P[:, 0], P[:, 2] - P[:, 0])
    assert np.all(np.sum(normals * P.mean(axis=1), axis=1) > 0)


def test_mesh_rejects_small_resolution():
    with pytest.raises(ValueError):
        export_mesh(Hedgehog(SphereFun.constant(1.0)), 2)


def test_obj_text(H):
    mesh = export_mesh(H, 4)
    lines = mesh.to_obj().splitlines()
    v = [ln for ln in lines if ln.startswith("v ")]
    f = [ln for ln in lines if ln.startswith("f ")]
    assert len(v) == len(mesh.vertices) and len(f) == len(mesh.faces)
    assert np.array_equal(np.array([ln.split()[1:] for ln in v], dtype=float), mesh.vertices)
    assert min(int(t) for ln in f for t in ln.split()[1:]) == 1
