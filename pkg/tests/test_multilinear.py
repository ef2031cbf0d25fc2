"""Pointwise tensor algebra, eigensolving and the wedge-map rank."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weakf.errors import (AmbiguousSpectrum, DegenerateMetric, DegreeError,
                          NotSelfAdjoint, ShapeError)
from weakf.multilinear import (KForm, PointTensor, apply, basis_two_form,
                               check_cluster_gaps, g_inner, lefschetz_rank,
                               sym_eigen, wedge)


class TestApply:
    def test_identity(self):
        op = PointTensor("ud", np.eye(3))
        assert np.array_equal(apply(op, np.array([1.0, 2.0, 3.0])), [1.0, 2.0, 3.0])

    def test_rotation_squares_to_minus_id(self):
        J = PointTensor("ud", np.array([[0.0, -1.0], [1.0, 0.0]]))
        e1 = np.array([1.0, 0.0])
        assert np.allclose(apply(J, apply(J, e1)), -e1)

    def test_shape_mismatch(self):
        op = PointTensor("ud", np.eye(3))
        with pytest.raises(ShapeError):
            apply(op, np.array([1.0, 2.0]))


class TestGInner:
    def test_euclidean(self):
        g = np.eye(3)
        e1, e2 = np.eye(3)[0], np.eye(3)[1]
        assert g_inner(g, e1, e1) == 1.0
        assert g_inner(g, e1, e2) == 0.0

    def test_degenerate_rejected(self):
        with pytest.raises(DegenerateMetric):
            g_inner(np.diag([1.0, -1.0]), np.ones(2), np.ones(2))

    def test_symmetric_bilinear(self):
        rng = np.random.default_rng(7)
        A = rng.standard_normal((4, 4))
        g = A @ A.T + 4 * np.eye(4)
        u, v = rng.standard_normal(4), rng.standard_normal(4)
        assert np.isclose(g_inner(g, u, v), g_inner(g, v, u))


class TestSymEigen:
    def test_zero_operator(self):
        spec = sym_eigen(np.zeros((5, 5)), np.eye(5))
        assert len(spec.clusters) == 1
        assert spec.clusters[0][0] == 0.0 and spec.clusters[0][1] == 5

    def test_exact_diagonal_clusters(self):
        op = np.diag([-4.0, -4.0, -1.0, -1.0, 0.0])
        spec = sym_eigen(op, np.eye(5), cluster_tol=1e-6)
        assert spec.multiplicities == [1, 2, 2]
        assert np.allclose(spec.centers, [0.0, -1.0, -4.0])

    def test_non_self_adjoint_rejected(self):
        op = np.array([[0.0, 1.0], [0.0, 0.0]])
        with pytest.raises(NotSelfAdjoint):
            sym_eigen(op, np.eye(2))

    def test_g_orthonormal_eigenbasis_and_reconstruction(self):
        rng = np.random.default_rng(3)
        d = 6
        A0 = rng.standard_normal((d, d))
        g = A0 @ A0.T + d * np.eye(d)
        S = rng.standard_normal((d, d))
        sym = 0.5 * (S + S.T)
        A = np.linalg.inv(g) @ sym            # g-self-adjoint by construction
        spec = sym_eigen(A, g, cluster_tol=1e-8)
        recon = sum(c * P for (c, _, _), P in
                    zip(spec.clusters, spec.projectors(g)))
        assert np.abs(A - recon).max() <= 1e-9
        for (_, _, U) in spec.clusters:
            gram = U.T @ g @ U
            assert np.abs(gram - np.eye(U.shape[1])).max() <= 1e-10

    def test_deterministic_frames(self):
        g = np.eye(4)
        A = np.diag([2.0, 2.0, 1.0, 1.0])
        s1 = sym_eigen(A, g)
        s2 = sym_eigen(A, g)
        for (c1, m1, U1), (c2, m2, U2) in zip(s1.clusters, s2.clusters):
            assert c1 == c2 and m1 == m2 and np.array_equal(U1, U2)

    def test_gap_check(self):
        with pytest.raises(AmbiguousSpectrum):
            check_cluster_gaps(np.array([0.0, 1.5e-6]), 1e-6)
        check_cluster_gaps(np.array([0.0, -1.0]), 1e-6)


class TestWedge:
    def d_basis(self, d, i):
        comp = {(i,): 1.0}
        return KForm(1, d, comp)

    def test_self_wedge_is_zero(self):
        dx = self.d_basis(3, 0)
        assert wedge(dx, dx).max_abs() == 0.0

    def test_orientation(self):
        dx, dy = self.d_basis(2, 0), self.d_basis(2, 1)
        form = wedge(dx, dy)
        e1, e2 = np.eye(2)
        assert form.evaluate([e1, e2]) == 1.0
        assert form.evaluate([e2, e1]) == -1.0

    def test_top_degree_product(self):
        d = 4
        ab = wedge(self.d_basis(d, 0), self.d_basis(d, 1))
        cd = wedge(self.d_basis(d, 2), self.d_basis(d, 3))
        top = wedge(ab, cd)
        assert top.evaluate(list(np.eye(d))) == 1.0

    def test_graded_commutativity(self):
        d = 5
        rng = np.random.default_rng(11)
        one = KForm(1, d, {(i,): rng.standard_normal() for i in range(d)})
        two = KForm(2, d, {idx: rng.standard_normal()
                           for idx in itertools.combinations(range(d), 2)})
        ab = wedge(one, two)
        ba = wedge(two, one)
        # (-1)^{1*2} = +1
        for key in set(ab.components) | set(ba.components):
            assert np.isclose(ab.coefficient(key), ba.coefficient(key))

    def test_degree_overflow(self):
        d = 3
        two = basis_two_form(0, 1, d)
        with pytest.raises(DegreeError):
            wedge(two, two)


@given(st.integers(0, 100))
@settings(max_examples=30, deadline=None)
def test_wedge_bilinear_and_associative(seed):
    d = 6
    rng = np.random.default_rng(seed)
    def rand_form(k):
        return KForm(k, d, {idx: rng.standard_normal()
                            for idx in itertools.combinations(range(d), k)})
    a, b, c = rand_form(1), rand_form(2), rand_form(1)
    s = rng.standard_normal()
    scaled = KForm(1, d, {k: s * v for k, v in a.components.items()})
    left = wedge(scaled, b)
    right = wedge(a, b)
    for key in left.components:
        assert abs(left.coefficient(key) - s * right.coefficient(key)) <= 1e-13 * max(1, abs(s))
    assoc_l = wedge(wedge(a, b), c)
    assoc_r = wedge(a, wedge(b, c))
    for key in set(assoc_l.components) | set(assoc_r.components):
        assert abs(assoc_l.coefficient(key) - assoc_r.coefficient(key)) <= 1e-13


def symplectic_form(d, blocks):
    comps = {}
    for k in range(blocks):
        comps[(2 * k, 2 * k + 1)] = 1.0
    return KForm(2, d, comps)


class TestLefschetzRank:
    def test_three_blocks_in_dim7_full(self):
        omega = symplectic_form(7, 3)
        rank, full = lefschetz_rank(omega, 7)
        assert rank == 21 and full

    def test_two_blocks_in_dim5_not_full(self):
        omega = symplectic_form(5, 2)
        rank, full = lefschetz_rank(omega, 5)
        assert rank <= 5 and not full

    def test_zero_form(self):
        rank, full = lefschetz_rank(KForm(2, 6, {}), 6)
        assert rank == 0 and not full

    def test_rank_invariant_under_basis_change(self):
        """Oracle: the rank of the assembled matrix is basis independent."""
        d = 6
        omega = symplectic_form(d, 3)
        rng = np.random.default_rng(5)
        B = rng.standard_normal((d, d))
        while abs(np.linalg.det(B)) < 0.1:
            B = rng.standard_normal((d, d))
        # pull back omega through B: omega'(u, v) = omega(B u, B v)
        arr = np.zeros((d, d))
        for (i, j), v in omega.components.items():
            arr[i, j] = v
            arr[j, i] = -v
        arr2 = B.T @ arr @ B
        pulled = KForm.from_array(arr2, 2)
        r1, _ = lefschetz_rank(omega, d)
        r2, _ = lefschetz_rank(pulled, d)
        assert r1 == r2
