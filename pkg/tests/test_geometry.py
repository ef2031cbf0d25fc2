"""Connection, curvature and derivative operators on explicit charts."""

import numpy as np
import pytest

from weakf.errors import CrossCheckMismatch, NotKilling, ShapeError
from weakf.geometry import (ChartManifold, Domain, TensorField, christoffel,
                            constant_field, covariant_derivative,
                            d_squared_residual, exterior_derivative,
                            fd_christoffel, fd_riemann, killing_residual,
                            killing_curvature_residual, riemann,
                            second_covariant_derivative, sectional_curvature,
                            _check_routes)
from weakf.jets import Expr


def euclidean_chart(d):
    metric = np.empty((d, d), dtype=object)
    for i in range(d):
        for j in range(d):
            metric[i, j] = Expr.const(1.0 if i == j else 0.0)
    return ChartManifold(f"euclid{d}", n=d // 2, s=d - 2 * (d // 2), metric=metric,
                         domain=Domain("box", 2.0))


def polar_chart():
    r = Expr.coord(0)
    metric = np.empty((2, 2), dtype=object)
    metric[0, 0] = Expr.const(1.0)
    metric[0, 1] = metric[1, 0] = Expr.const(0.0)
    metric[1, 1] = r * r
    return ChartManifold("polar", n=1, s=0, metric=metric,
                         domain=Domain("box", 0.9, (2.0, 0.0)))


def round_sphere_chart(n, radius=1.5):
    """Stereographic chart of the unit n-sphere: g = 4/(1+|u|^2)^2 * id."""
    u2 = Expr.add(*[Expr.coord(k) * Expr.coord(k) for k in range(n)])
    w = Expr.const(1.0) + u2
    conf = Expr.const(4.0) / (w * w)
    metric = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            metric[i, j] = conf if i == j else Expr.const(0.0)
    return ChartManifold(f"s{n}-chart", n=n // 2, s=n - 2 * (n // 2),
                         metric=metric, domain=Domain("ball", radius))


class TestChristoffel:
    def test_euclidean_vanishes(self):
        m = euclidean_chart(3)
        conn = christoffel(m, np.array([0.3, -0.4, 1.0]))
        assert np.abs(conn.gamma).max() == 0.0

    def test_polar_values(self):
        m = polar_chart()
        conn = christoffel(m, np.array([2.0, 0.3]))
        # Gamma^r_{theta theta} = -r, Gamma^theta_{r theta} = 1/r
        assert np.isclose(conn.gamma[0, 1, 1], -2.0, atol=1e-12)
        assert np.isclose(conn.gamma[1, 0, 1], 0.5, atol=1e-12)
        assert np.isclose(conn.gamma[1, 1, 0], 0.5, atol=1e-12)

    def test_polar_against_fd_oracle(self):
        m = polar_chart()
        p = np.array([2.0, 0.3])
        jet = christoffel(m, p).gamma
        fd = fd_christoffel(m, p, step=1e-4)
        assert np.abs(jet - fd).max() <= 1e-6

    def test_sphere_chart_origin(self):
        m = round_sphere_chart(4)
        conn = christoffel(m, np.zeros(4))
        assert np.abs(conn.gamma).max() <= 1e-14
        fd = fd_christoffel(m, np.zeros(4), step=1e-4)
        assert np.abs(fd).max() <= 1e-8

    def test_symmetry_in_lower_indices(self):
        m = round_sphere_chart(5)
        p = np.array([0.3, -0.2, 0.5, 0.1, -0.4])
        conn = christoffel(m, p)
        assert np.array_equal(conn.gamma, conn.gamma.transpose(0, 2, 1))


class TestRiemann:
    def test_euclidean_flat(self):
        m = euclidean_chart(4)
        curv = riemann(m, np.array([0.1, 0.2, 0.3, 0.4]))
        assert np.abs(curv.riem).max() == 0.0
        assert np.abs(curv.ricci).max() == 0.0

    def test_round_s6_sectional_curvature_one(self):
        m = round_sphere_chart(6)
        rng = np.random.default_rng(0)
        p = m.sample_points(rng, 1)[0]
        curv = riemann(m, p)
        g = m.metric_values(p[None, :])[0]
        for _ in range(6):
            X = rng.standard_normal(6)
            Y = rng.standard_normal(6)
            assert abs(sectional_curvature(curv, g, X, Y) - 1.0) <= 1e-8

    def test_round_s5_ricci(self):
        m = round_sphere_chart(5)
        p = np.array([0.2, -0.1, 0.4, 0.0, 0.3])
        curv = riemann(m, p)
        g = m.metric_values(p[None, :])[0]
        assert np.abs(curv.ricci - 4.0 * g).max() <= 1e-8

    def test_symmetries_and_bianchi(self):
        m = round_sphere_chart(5)
        p = np.array([0.5, 0.1, -0.3, 0.2, 0.0])
        curv = riemann(m, p)
        assert curv.symmetry_residual <= 1e-10
        assert curv.bianchi_residual <= 1e-10

    def test_fd_oracle_riemann(self):
        m = round_sphere_chart(4)
        p = np.array([0.3, -0.2, 0.1, 0.4])
        jet = riemann(m, p).riem
        fd = fd_riemann(m, p, step=1e-4)
        assert np.abs(jet - fd).max() <= 1e-5


class TestCovariantDerivative:
    def test_constant_vector_euclidean(self):
        m = euclidean_chart(3)
        field = constant_field("u", np.array([1.0, 2.0, 3.0]))
        out = covariant_derivative(m, field, np.array([1.0, 0.0, 0.0]),
                                   np.array([0.1, 0.2, 0.3]))
        assert np.abs(out.components).max() == 0.0

    def test_metricity(self):
        for chart in (polar_chart(), round_sphere_chart(4)):
            field = TensorField("dd", chart.metric)
            rng = np.random.default_rng(1)
            p = chart.sample_points(rng, 1)[0]
            X = rng.standard_normal(chart.dim)
            out = covariant_derivative(chart, field, X, p)
            assert np.abs(out.components).max() <= 1e-10

    def test_second_derivative_linear_field_euclidean(self):
        m = euclidean_chart(3)
        comps = np.empty(3, dtype=object)
        comps[0] = Expr.coord(1)
        comps[1] = Expr.coord(2) * Expr.const(2.0)
        comps[2] = Expr.coord(0) - Expr.coord(1)
        field = TensorField("u", comps)
        out = second_covariant_derivative(m, field, np.array([1.0, 1.0, 0.0]),
                                          np.array([0.0, 1.0, 2.0]),
                                          np.array([0.2, 0.1, -0.3]))
        assert np.abs(out.components).max() == 0.0

    def test_extension_independence(self):
        """nabla^2_{X,Y} agrees with an explicit two-stage computation that
        extends Y as a linearly varying field."""
        m = round_sphere_chart(3)
        rng = np.random.default_rng(4)
        p = m.sample_points(rng, 1)[0]
        X = rng.standard_normal(3)
        Y0 = rng.standard_normal(3)
        L = rng.standard_normal((3, 3))

        comps = np.empty(3, dtype=object)
        for a in range(3):
            terms = [Expr.const(Y0[a])]
            for b in range(3):
                terms.append(Expr.const(L[a, b]) * (Expr.coord(b) - Expr.const(p[b])))
            comps[a] = Expr.add(*terms)
        Yfield = TensorField("u", comps)

        zcomp = np.empty(3, dtype=object)
        zcomp[0] = Expr.sin(Expr.coord(1)) + Expr.coord(0)
        zcomp[1] = Expr.coord(2) * Expr.coord(0)
        zcomp[2] = Expr.exp(Expr.const(0.2) * Expr.coord(1))
        T = TensorField("u", zcomp)

        direct = second_covariant_derivative(m, T, X, Y0, p).components

        # route 2: finite differences of the field V(x) = (nabla_{Y(x)} T)(x)
        def V(point):
            vals, nabla = __import__("weakf.geometry", fromlist=["covariant_derivative_components"]).\
                covariant_derivative_components(m, T, point)
            yv = Yfield.values(point[None, :])[0]
            return np.einsum("ca,c->a", nabla, yv)

        h = 1e-5
        dV = np.zeros((3, 3))
        for c in range(3):
            e = np.zeros(3); e[c] = h
            dV[c] = (V(p + e) - V(p - e)) / (2 * h)
        conn = christoffel(m, p)
        Vp = V(p)
        nablaX_V = np.einsum("ca,c->a", dV, X) + np.einsum("acm,c,m->a", conn.gamma, X, Vp)
        # nabla_X Y at p for the linear extension
        nablaX_Y = L @ X + np.einsum("acm,c,m->a", conn.gamma, X, Y0)
        _, nablaT = __import__("weakf.geometry", fromlist=["covariant_derivative_components"]).\
            covariant_derivative_components(m, T, p)
        correction = np.einsum("ca,c->a", nablaT, nablaX_Y)
        indirect = nablaX_V - correction
        assert np.abs(direct - indirect).max() <= 1e-6


class TestKilling:
    def test_translation_field(self):
        m = euclidean_chart(2)
        field = constant_field("u", np.array([1.0, 0.0]))
        r = killing_residual(m, field, np.array([0.3, 0.4]),
                             np.array([1.0, 0.0]), np.array([0.0, 1.0]))
        assert r == 0.0

    def test_radial_field(self):
        m = euclidean_chart(1)
        comps = np.empty(1, dtype=object)
        comps[0] = Expr.coord(0)
        field = TensorField("u", comps)
        r = killing_residual(m, field, np.array([0.7]),
                             np.array([1.0]), np.array([1.0]))
        assert np.isclose(r, 2.0)

    def test_radial_field_not_killing(self):
        m = euclidean_chart(2)
        comps = np.empty(2, dtype=object)
        comps[0] = Expr.coord(0)
        comps[1] = Expr.coord(1)
        field = TensorField("u", comps)
        with pytest.raises(NotKilling):
            killing_curvature_residual(m, field, np.array([0.1, 0.2]),
                                       np.eye(2)[0], np.eye(2)[1])

    def test_euclidean_rotation(self):
        m = euclidean_chart(2)
        comps = np.empty(2, dtype=object)
        comps[0] = Expr.neg(Expr.coord(1))
        comps[1] = Expr.coord(0)
        field = TensorField("u", comps)
        out = killing_curvature_residual(m, field, np.array([0.5, -0.2]),
                                         np.eye(2)[0], np.eye(2)[1])
        assert np.abs(out).max() <= 1e-12


class TestExteriorDerivative:
    def test_d_of_x_dy(self):
        m = euclidean_chart(2)
        comps = np.empty(2, dtype=object)
        comps[0] = Expr.const(0.0)
        comps[1] = Expr.coord(0)      # omega = x dy
        form = TensorField("d", comps)
        out = exterior_derivative(form, m, np.array([0.4, 0.9]))
        assert np.isclose(out.coefficient((0, 1)), 1.0)

    def test_d_squared_zero(self):
        m = round_sphere_chart(3)
        comps = np.empty(3, dtype=object)
        comps[0] = Expr.sin(Expr.coord(1)) * Expr.coord(2)
        comps[1] = Expr.exp(Expr.coord(0))
        comps[2] = Expr.coord(0) * Expr.coord(1)
        form = TensorField("d", comps)
        p = np.array([0.2, -0.3, 0.5])
        assert d_squared_residual(form, m, p) <= 1e-9

    def test_exact_form_closed(self):
        # omega = d(x^2 y) = 2xy dx + x^2 dy has d(omega) = 0
        m = euclidean_chart(2)
        comps = np.empty(2, dtype=object)
        comps[0] = Expr.const(2.0) * Expr.coord(0) * Expr.coord(1)
        comps[1] = Expr.coord(0) * Expr.coord(0)
        form = TensorField("d", comps)
        out = exterior_derivative(form, m, np.array([0.7, -0.4]))
        assert out.max_abs() <= 1e-10

    def test_two_form(self):
        # Phi = x^3 dy^dz (as a dd field); dPhi = 3x^2 dx^dy^dz
        m = euclidean_chart(3)
        comps = np.empty((3, 3), dtype=object)
        zero = Expr.const(0.0)
        for i in range(3):
            for j in range(3):
                comps[i, j] = zero
        cube = Expr.pow(Expr.coord(0), 3.0)
        comps[1, 2] = cube
        comps[2, 1] = Expr.neg(cube)
        form = TensorField("dd", comps)
        out = exterior_derivative(form, m, np.array([2.0, 0.0, 0.0]))
        assert np.isclose(out.coefficient((0, 1, 2)), 12.0)

    def test_cross_check_guard(self):
        with pytest.raises(CrossCheckMismatch):
            _check_routes(np.array([0.0]), np.array([1.0]), 1e-10, "test")
