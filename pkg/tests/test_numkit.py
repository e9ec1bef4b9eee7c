import numpy as np
import pytest
from numpy.testing import assert_allclose

from ftsband import numkit
from ftsband.errors import (
    DegenerateHullError,
    DimensionError,
    DomainError,
    NotPsdError,
    RankZeroError,
    SingularSystemError,
)


class TestSymEigen:
    def test_identity(self):
        eig = numkit.sym_eigen(np.eye(3))
        assert_allclose(eig.values, [1.0, 1.0, 1.0])
        assert_allclose(eig.vectors @ eig.vectors.T, np.eye(3), atol=1e-12)

    def test_diagonal(self):
        eig = numkit.sym_eigen(np.diag([2.0, 5.0]))
        assert_allclose(eig.values, [5.0, 2.0])
        # axis aligned, up to sign
        assert_allclose(np.abs(eig.vectors), [[0.0, 1.0], [1.0, 0.0]], atol=1e-12)

    def test_2x2_hand_solve(self):
        # characteristic polynomial of [[2,1],[1,2]]: (2-l)^2 - 1 = 0
        eig = numkit.sym_eigen(np.array([[2.0, 1.0], [1.0, 2.0]]))
        assert_allclose(eig.values, [3.0, 1.0], atol=1e-12)
        s = 1.0 / np.sqrt(2.0)
        assert_allclose(np.abs(eig.vectors[:, 0]), [s, s], atol=1e-12)
        assert_allclose(np.abs(eig.vectors[:, 1]), [s, s], atol=1e-12)
        assert np.sign(eig.vectors[0, 1]) != np.sign(eig.vectors[1, 1])

    def test_non_square_rejected(self):
        with pytest.raises(DimensionError):
            numkit.sym_eigen(np.ones((2, 3)))

    def test_round_trip_random(self):
        rng = np.random.default_rng(7)
        for n in (3, 17, 64):
            a = rng.standard_normal((n, n))
            m = a + a.T
            eig = numkit.sym_eigen(m)
            recon = eig.vectors @ np.diag(eig.values) @ eig.vectors.T
            rel = np.linalg.norm(recon - m) / np.linalg.norm(m)
            assert rel <= 1e-6
            assert np.all(np.diff(eig.values) <= 0)
            assert_allclose(eig.vectors.T @ eig.vectors, np.eye(n), atol=1e-8)


class TestSolveLinear:
    def test_identity(self):
        assert_allclose(numkit.solve_linear(np.eye(2), [1.0, 2.0]), [1.0, 2.0])

    def test_diagonal(self):
        x = numkit.solve_linear(np.diag([2.0, 4.0]), [2.0, 8.0])
        assert_allclose(x, [1.0, 2.0])

    def test_hand_elimination(self):
        x = numkit.solve_linear([[2.0, 1.0], [1.0, 2.0]], [3.0, 3.0])
        assert_allclose(x, [1.0, 1.0], atol=1e-12)

    def test_residual_bound(self):
        rng = np.random.default_rng(11)
        a = rng.standard_normal((20, 20)) + 20 * np.eye(20)
        b = rng.standard_normal(20)
        x = numkit.solve_linear(a, b)
        assert np.linalg.norm(a @ x - b) <= 1e-8 * (1 + np.linalg.norm(b))

    def test_singular_rejected(self):
        with pytest.raises(SingularSystemError):
            numkit.solve_linear([[1.0, 1.0], [1.0, 1.0]], [1.0, 2.0])


class TestPseudoInverse:
    def test_diagonal_inverse(self):
        assert_allclose(
            numkit.pseudo_inverse(np.diag([4.0, 1.0]), 1e-10),
            np.diag([0.25, 1.0]),
            atol=1e-12,
        )

    def test_rank_deficient_truncation(self):
        assert_allclose(
            numkit.pseudo_inverse(np.diag([4.0, 0.0]), 1e-10),
            np.diag([0.25, 0.0]),
            atol=1e-12,
        )

    def test_2x2_closed_form(self):
        inv = numkit.pseudo_inverse(np.array([[2.0, 1.0], [1.0, 2.0]]), 1e-10)
        assert_allclose(inv, [[2 / 3, -1 / 3], [-1 / 3, 2 / 3]], atol=1e-12)

    def test_all_below_threshold(self):
        with pytest.raises(RankZeroError):
            numkit.pseudo_inverse(np.zeros((3, 3)), 1e-10)


class TestPsdSqrt:
    def test_diagonal(self):
        assert_allclose(numkit.psd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-12)

    def test_identity(self):
        assert_allclose(numkit.psd_sqrt(np.eye(4)), np.eye(4), atol=1e-12)

    def test_square_check(self):
        a = np.array([[2.0, 1.0], [1.0, 2.0]])
        s = numkit.psd_sqrt(a)
        assert_allclose(s, s.T, atol=1e-12)
        assert np.linalg.norm(s @ s - a) / np.linalg.norm(a) <= 1e-8

    def test_mild_negative_clipped(self):
        a = np.diag([1.0, -1e-12])
        s = numkit.psd_sqrt(a)
        assert s[1, 1] == 0.0

    def test_not_psd_rejected(self):
        with pytest.raises(NotPsdError):
            numkit.psd_sqrt(np.diag([1.0, -0.5]))

    def test_sqrt_round_trip(self):
        rng = np.random.default_rng(3)
        for n in (2, 5, 12):
            b = rng.standard_normal((n, n))
            a = b @ b.T
            s = numkit.psd_sqrt(a)
            s2 = numkit.psd_sqrt(s @ s)
            assert_allclose(s2 @ s2, s @ s, atol=1e-8 * max(1, np.linalg.norm(a)))


class TestConvexHull:
    def test_triangle(self):
        h = numkit.convex_hull([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])
        assert h.vertices.shape == (3, 2)
        assert {tuple(v) for v in h.vertices} == {(0, 0), (1, 0), (0, 1)}

    def test_interior_point_dropped(self):
        pts = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.5, 0.5)]
        h = numkit.convex_hull(pts)
        assert h.vertices.shape == (4, 2)
        assert (0.5, 0.5) not in {tuple(v) for v in h.vertices}

    def test_random_disk_membership(self):
        rng = np.random.default_rng(42)
        r = np.sqrt(rng.uniform(size=100))
        th = rng.uniform(0, 2 * np.pi, size=100)
        pts = np.column_stack([r * np.cos(th), r * np.sin(th)])
        h = numkit.convex_hull(pts)
        for p in pts:
            assert numkit.hull_contains(h, p, slack=1e-9)

    def test_hull_of_hull_is_fixed_point(self):
        rng = np.random.default_rng(5)
        pts = rng.standard_normal((40, 2))
        h = numkit.convex_hull(pts)
        h2 = numkit.convex_hull(h.vertices)
        assert {tuple(v) for v in h.vertices} == {tuple(v) for v in h2.vertices}

    def test_degenerate_inputs(self):
        with pytest.raises(DegenerateHullError):
            numkit.convex_hull([(0.0, 0.0), (1.0, 1.0)])
        with pytest.raises(DegenerateHullError):
            numkit.convex_hull([(0.0, 0.0), (0.5, 0.5), (1.0, 1.0)])  # collinear

    def test_ccw_orientation(self):
        rng = np.random.default_rng(9)
        v = numkit.convex_hull(rng.standard_normal((30, 2))).vertices
        n = v.shape[0]
        for i in range(n):
            o, a, b = v[i], v[(i + 1) % n], v[(i + 2) % n]
            cross = (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
            assert cross >= -1e-12


class TestHullContains:
    def setup_method(self):
        self.square = numkit.convex_hull(
            [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
        )

    def test_inside(self):
        assert numkit.hull_contains(self.square, (0.5, 0.5))

    def test_outside(self):
        assert not numkit.hull_contains(self.square, (2.0, 0.0))

    def test_vertex_with_slack(self):
        for v in self.square.vertices:
            assert numkit.hull_contains(self.square, v, slack=1e-9)

    def test_vectorized_matches_scalar(self):
        rng = np.random.default_rng(21)
        pts = rng.uniform(-0.5, 1.5, size=(200, 2))
        got = numkit.hull_contains_many(self.square, pts)
        want = np.array([numkit.hull_contains(self.square, p) for p in pts])
        assert np.array_equal(got, want)


class TestHullBoundsAt:
    def test_square_midline(self):
        h = numkit.convex_hull([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
        assert numkit.hull_bounds_at(h, 0.5) == (0.0, 1.0)

    def test_triangle_interpolation(self):
        # edges from (0,0) and (1,0) up to the apex both pass through y=0.5
        # at t=0.25 / t=0.75; at t=0.5 the apex itself gives the upper bound
        h = numkit.convex_hull([(0.0, 0.0), (1.0, 0.0), (0.5, 1.0)])
        assert numkit.hull_bounds_at(h, 0.5) == (0.0, 1.0)
        lo, up = numkit.hull_bounds_at(h, 0.25)
        assert lo == 0.0
        assert_allclose(up, 0.5)

    def test_leftmost_degenerate_slice(self):
        h = numkit.convex_hull([(0.0, 0.5), (1.0, 0.0), (1.0, 1.0)])
        lo, up = numkit.hull_bounds_at(h, 0.0)
        assert lo == up == 0.5

    def test_outside_range_rejected(self):
        h = numkit.convex_hull([(0.0, 0.0), (1.0, 0.0), (0.5, 1.0)])
        with pytest.raises(DomainError):
            numkit.hull_bounds_at(h, 1.5)

    def test_upper_concave_lower_convex(self):
        rng = np.random.default_rng(13)
        h = numkit.convex_hull(rng.standard_normal((60, 2)))
        tmin, tmax = h.t_range
        ts = np.linspace(tmin, tmax, 100)
        bounds = np.array([numkit.hull_bounds_at(h, t) for t in ts])
        lo, up = bounds[:, 0], bounds[:, 1]
        # sampled midpoint inequalities on the uniform abscissae
        assert np.all(up[1:-1] >= 0.5 * (up[:-2] + up[2:]) - 1e-9)
        assert np.all(lo[1:-1] <= 0.5 * (lo[:-2] + lo[2:]) + 1e-9)
