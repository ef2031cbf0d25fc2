"""Jet arithmetic against closed forms and the finite-difference oracle."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weakf.errors import InvalidPoint, SingularEvaluation
from weakf.jets import (Expr, Jet2, fd_gradient, fd_hessian, jet_arith,
                        jet_unary, parse_sexpr, seed_point, seed_points)

x = Expr.coord(0)
y = Expr.coord(1)


def eval_at(expr, p):
    return expr.evaluate(seed_point(np.asarray(p, float), len(p)))


class TestSeeding:
    def test_seed_origin(self):
        jets = seed_point([0.0, 0.0], 2)
        assert jets[0].value == 0.0 and jets[1].value == 0.0
        assert np.array_equal(jets[0].gradient, [1.0, 0.0])
        assert np.array_equal(jets[1].gradient, [0.0, 1.0])
        assert not jets[0].hessian.any()

    def test_seed_middle_coordinate(self):
        jets = seed_point([1.0, 2.0, 3.0], 3)
        assert jets[1].value == 2.0
        assert np.array_equal(jets[1].gradient, [0.0, 1.0, 0.0])

    def test_seed_one_dim(self):
        (j,) = seed_point([np.pi], 1)
        assert j.value == np.pi and j.gradient[0] == 1.0 and j.hessian[0, 0] == 0.0

    def test_nonfinite_rejected(self):
        with pytest.raises(InvalidPoint):
            seed_point([np.nan], 1)
        with pytest.raises(InvalidPoint):
            seed_points(np.array([[1.0, np.inf]]))


class TestArithmetic:
    def test_square(self):
        j = eval_at(x * x, [3.0])
        assert j.value == 9.0 and j.gradient[0] == 6.0 and j.hessian[0, 0] == 2.0

    def test_difference_of_squares(self):
        j = eval_at((x + y) * (x - y), [2.0, 1.0])
        assert j.value == 3.0
        assert np.allclose(j.gradient, [4.0, -2.0])
        assert np.allclose(j.hessian, np.diag([2.0, -2.0]))

    def test_reciprocal(self):
        j = eval_at(Expr.const(1.0) / x, [2.0])
        assert j.value == 0.5 and j.gradient[0] == -0.25 and j.hessian[0, 0] == 0.25

    def test_jet_arith_wrappers(self):
        a, = seed_point([3.0], 1)
        prod = jet_arith(a, a, "*")
        assert prod.value == 9.0 and prod.gradient[0] == 6.0

    def test_guarded_division(self):
        with pytest.raises(SingularEvaluation):
            eval_at(Expr.const(1.0) / x, [1e-13])


class TestUnary:
    def test_sin_at_zero(self):
        j = eval_at(Expr.sin(x), [0.0])
        assert j.value == 0.0 and j.gradient[0] == 1.0 and j.hessian[0, 0] == 0.0

    def test_exp_at_zero(self):
        j = eval_at(Expr.exp(x), [0.0])
        assert j.value == 1.0 and j.gradient[0] == 1.0 and j.hessian[0, 0] == 1.0

    def test_sqrt_at_four(self):
        j = eval_at(Expr.sqrt(x), [4.0])
        assert j.value == 2.0 and j.gradient[0] == 0.25
        assert np.isclose(j.hessian[0, 0], -1.0 / 32.0)

    def test_sqrt_guard(self):
        with pytest.raises(SingularEvaluation):
            eval_at(Expr.sqrt(x), [-1.0])

    def test_jet_unary_power(self):
        a, = seed_point([2.0], 1)
        j = jet_unary(a, "power", 3)
        assert j.value == 8.0 and j.gradient[0] == 12.0 and j.hessian[0, 0] == 12.0


CATALOG_FIELDS = [
    (x * x + Expr.sin(y) * x, [0.4, -0.7]),
    (Expr.exp(x * Expr.const(0.3)) / (Expr.const(1.0) + y * y), [0.9, 1.2]),
    (Expr.sqrt(Expr.const(4.0) + x * x + y * y), [0.5, -0.3]),
    (Expr.pow(Expr.const(1.0) + x * x, -2.0), [0.8, 0.0]),
    (Expr.cos(x) * Expr.cos(y) + Expr.const(2.0), [1.1, 0.2]),
]


@pytest.mark.parametrize("expr,point", CATALOG_FIELDS)
def test_fd_oracle_gradient_and_hessian(expr, point):
    """Jet derivatives match central differences within the documented bound."""
    p = np.asarray(point)
    jet = eval_at(expr, p)
    step = 1e-4
    scale = max(1.0, abs(jet.value))
    assert np.abs(jet.gradient - fd_gradient(expr, p, step)).max() <= 10 * step**2 * scale * 100
    assert np.abs(jet.hessian - fd_hessian(expr, p, step)).max() <= 1e-5 * scale


def test_batched_matches_single():
    expr = Expr.exp(x) * Expr.sin(y) + x / (y + Expr.const(3.0))
    pts = np.array([[0.1, 0.2], [1.0, -0.5], [0.0, 0.0]])
    batched = expr.evaluate(seed_points(pts))
    for i, p in enumerate(pts):
        single = eval_at(expr, p)
        assert np.array_equal(batched.value[i], single.value)
        assert np.array_equal(batched.gradient[i], single.gradient)
        assert np.array_equal(batched.hessian[i], single.hessian)


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
@settings(max_examples=100, deadline=None)
def test_value_associativity(a, b, c):
    """Algebraically equal trees evaluate equal within 1e-14 relative."""
    ea, eb, ec = Expr.const(a), Expr.const(b), Expr.const(c)
    p = np.array([0.5])
    left = eval_at((x + ea) + (eb + ec) * x, p).value
    right = eval_at(x + (ea + eb * x) + ec * x, p).value
    assert abs(left - right) <= 1e-14 * max(1.0, abs(left))


def test_hessian_exactly_symmetric():
    expr = Expr.sin(x * y) * Expr.exp(x) / (Expr.const(2.0) + y * y)
    j = eval_at(expr, [0.7, -0.4])
    assert np.array_equal(j.hessian, j.hessian.T)


class TestSexpr:
    def test_roundtrip(self):
        expr = Expr.mul(Expr.coord(0), Expr.sin(Expr.coord(1)))
        text = expr.to_sexpr()
        assert text == "(mul (coord 0) (sin (coord 1)))"
        back = parse_sexpr(text)
        assert back == expr

    def test_roundtrip_evaluates_identically(self):
        expr = (Expr.const(4.0) / Expr.pow(Expr.const(1.0) + x * x + y * y, 2.0)
                - Expr.sqrt(Expr.const(2.0) + x))
        back = parse_sexpr(expr.to_sexpr())
        p = np.array([0.3, -0.8])
        a, b = eval_at(expr, p), eval_at(back, p)
        assert np.array_equal(a.value, b.value)
        assert np.array_equal(a.gradient, b.gradient)
        assert np.array_equal(a.hessian, b.hessian)

    def test_parse_errors(self):
        for bad in ["(", "(frob (coord 0))", "(add)", "(coord 0) junk"]:
            with pytest.raises(ValueError):
                parse_sexpr(bad)

    def test_hashable(self):
        a = Expr.add(x, y)
        b = parse_sexpr("(add (coord 0) (coord 1))")
        assert hash(a) == hash(b) and a == b

    def test_remap_coords(self):
        expr = x * Expr.sin(y)
        shifted = expr.remap_coords({0: 2, 1: 3})
        p = np.array([9.0, 9.0, 0.4, -0.7])
        orig = eval_at(expr, [0.4, -0.7])
        new = shifted.evaluate(seed_point(p, 4))
        assert np.isclose(new.value, orig.value)


def test_determinism_bit_identical():
    expr = Expr.exp(x) / (Expr.const(1.0) + y * y) + Expr.sin(x * y)
    p = np.array([0.37, -1.21])
    a, b = eval_at(expr, p), eval_at(expr, p)
    assert np.array_equal(a.value, b.value)
    assert np.array_equal(a.gradient, b.gradient)
    assert np.array_equal(a.hessian, b.hessian)
