"""Order-2 forward-mode jet arithmetic and serializable scalar fields.

A :class:`Jet2` carries a value together with its exact gradient and Hessian
with respect to the chart coordinates.  Every smooth field in the package
(metric entries, structure tensors, characteristic vector fields) is an
expression tree (:class:`Expr`) evaluated into jets, so first and second
partial derivatives are exact up to floating-point roundoff.  Second order is
all the downstream geometry ever needs: Christoffel symbols consume one
derivative of the metric and the curvature tensor consumes two.

Jets may be batched: a value of shape ``(N,)`` with gradient ``(N, d)`` and
Hessian ``(N, d, d)`` evaluates a field at ``N`` points in one tree walk.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidPoint, SingularEvaluation

# Absolute guard band around the singular sets of div and sqrt.  Sampling
# domains in the catalog stay far away from chart singularities, so hitting
# the band indicates a misconfigured domain rather than a numerical accident.
GUARD_BAND = 1e-12

_UNARY_OPS = ("neg", "sin", "cos", "exp", "sqrt")
_BINARY_OPS = ("sub", "div")
_NARY_OPS = ("add", "mul")


class Jet2:
    """Value, gradient and Hessian of a scalar with respect to d coordinates.

    The Hessian stays exactly symmetric because every arithmetic rule below
    preserves symmetry; no explicit symmetrization is ever applied.
    """

    __slots__ = ("value", "gradient", "hessian")

    def __init__(self, value, gradient, hessian):
        self.value = np.asarray(value, dtype=float)
        self.gradient = np.asarray(gradient, dtype=float)
        self.hessian = np.asarray(hessian, dtype=float)

    @property
    def dim(self) -> int:
        return self.gradient.shape[-1]

    @staticmethod
    def constant(c: float, d: int, batch_shape: tuple = ()) -> "Jet2":
        value = np.full(batch_shape, float(c))
        gradient = np.zeros(batch_shape + (d,))
        hessian = np.zeros(batch_shape + (d, d))
        return Jet2(value, gradient, hessian)

    # -- ring operations -------------------------------------------------

    def __add__(self, other: "Jet2") -> "Jet2":
        return Jet2(self.value + other.value,
                    self.gradient + other.gradient,
                    self.hessian + other.hessian)

    def __sub__(self, other: "Jet2") -> "Jet2":
        return Jet2(self.value - other.value,
                    self.gradient - other.gradient,
                    self.hessian - other.hessian)

    def __neg__(self) -> "Jet2":
        return Jet2(-self.value, -self.gradient, -self.hessian)

    def __mul__(self, other: "Jet2") -> "Jet2":
        va = self.value[..., None]
        vb = other.value[..., None]
        grad = self.gradient * vb + other.gradient * va
        cross = (self.gradient[..., :, None] * other.gradient[..., None, :]
                 + other.gradient[..., :, None] * self.gradient[..., None, :])
        hess = (self.hessian * vb[..., None]
                + other.hessian * va[..., None] + cross)
        return Jet2(self.value * other.value, grad, hess)

    def __truediv__(self, other: "Jet2") -> "Jet2":
        if np.any(np.abs(other.value) <= GUARD_BAND):
            raise SingularEvaluation("division within guard band of zero")
        inv = 1.0 / other.value
        inv2 = inv * inv
        inv3 = inv2 * inv
        value = self.value * inv
        grad = (self.gradient * other.value[..., None]
                - other.gradient * self.value[..., None]) * inv2[..., None]
        sym = (self.gradient[..., :, None] * other.gradient[..., None, :]
               + other.gradient[..., :, None] * self.gradient[..., None, :])
        bb = other.gradient[..., :, None] * other.gradient[..., None, :]
        hess = (self.hessian * inv[..., None, None]
                - other.hessian * (self.value * inv2)[..., None, None]
                - sym * inv2[..., None, None]
                + 2.0 * bb * (self.value * inv3)[..., None, None])
        return Jet2(value, grad, hess)

    # -- smooth univariate composition -----------------------------------

    def _chain(self, s0, s1, s2) -> "Jet2":
        grad = self.gradient * s1[..., None]
        outer = self.gradient[..., :, None] * self.gradient[..., None, :]
        hess = self.hessian * s1[..., None, None] + outer * s2[..., None, None]
        return Jet2(s0, grad, hess)

    def sin(self) -> "Jet2":
        s, c = np.sin(self.value), np.cos(self.value)
        return self._chain(s, c, -s)

    def cos(self) -> "Jet2":
        s, c = np.sin(self.value), np.cos(self.value)
        return self._chain(c, -s, -c)

    def exp(self) -> "Jet2":
        e = np.exp(self.value)
        return self._chain(e, e, e)

    def sqrt(self) -> "Jet2":
        if np.any(self.value <= GUARD_BAND):
            raise SingularEvaluation("sqrt within guard band of the nonpositive axis")
        root = np.sqrt(self.value)
        return self._chain(root, 0.5 / root, -0.25 / (root * self.value))

    def power(self, r: float) -> "Jet2":
        r = float(r)
        if r == int(r) and r >= 0:
            n = int(r)
            if n == 0:
                return Jet2.constant(1.0, self.dim, self.value.shape)
            s0 = np.power(self.value, n)
            s1 = n * np.power(self.value, n - 1)
            s2 = (0.0 * s0) if n == 1 else n * (n - 1) * np.power(self.value, n - 2)
            return self._chain(s0, s1, s2)
        if np.any(self.value <= GUARD_BAND):
            raise SingularEvaluation("fractional/negative power within guard band")
        s0 = np.power(self.value, r)
        s1 = r * np.power(self.value, r - 1.0)
        s2 = r * (r - 1.0) * np.power(self.value, r - 2.0)
        return self._chain(s0, s1, s2)


def seed_point(p: Sequence[float], d: int) -> list[Jet2]:
    """Seed coordinate jets at a single chart point.

    Entry ``k`` has value ``p[k]``, gradient ``e_k`` and zero Hessian.
    """
    p = np.asarray(p, dtype=float)
    if d < 1 or p.shape != (d,):
        raise InvalidPoint(f"expected a point with {d} entries, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise InvalidPoint("point has non-finite entries")
    return [Jet2(p[k], np.eye(d)[k], np.zeros((d, d))) for k in range(d)]


def seed_points(points: np.ndarray) -> list[Jet2]:
    """Seed batched coordinate jets for an ``(N, d)`` array of points."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] < 1:
        raise InvalidPoint(f"expected an (N, d) array, got shape {points.shape}")
    if not np.all(np.isfinite(points)):
        raise InvalidPoint("points have non-finite entries")
    n, d = points.shape
    jets = []
    for k in range(d):
        grad = np.zeros((n, d))
        grad[:, k] = 1.0
        jets.append(Jet2(points[:, k], grad, np.zeros((n, d, d))))
    return jets


def jet_arith(a: Jet2, b: Jet2, op: str) -> Jet2:
    """Binary jet arithmetic for op in {+, -, *, /}."""
    table = {"+": Jet2.__add__, "-": Jet2.__sub__,
             "*": Jet2.__mul__, "/": Jet2.__truediv__}
    if op not in table:
        raise ValueError(f"unknown arithmetic op {op!r}")
    return table[op](a, b)


def jet_unary(a: Jet2, fn: str, exponent: float | None = None) -> Jet2:
    """Unary jet composition for fn in {sin, cos, exp, sqrt, power}."""
    if fn == "power":
        if exponent is None:
            raise ValueError("power requires an exponent")
        return a.power(exponent)
    table = {"sin": Jet2.sin, "cos": Jet2.cos, "exp": Jet2.exp,
             "sqrt": Jet2.sqrt, "neg": Jet2.__neg__}
    if fn not in table:
        raise ValueError(f"unknown unary op {fn!r}")
    return table[fn](a)


class Expr:
    """Immutable scalar-field expression tree.

    Nodes are one of::

        (const c) (coord k) (neg e) (sub a b) (div a b)
        (add a b ...) (mul a b ...) (sin e) (cos e) (exp e) (sqrt e)
        (pow e r)

    Trees serialize to the prefix s-expression form above, are hashable by
    their serialization, and evaluate deterministically: the same point in
    gives a bit-identical jet out.
    """

    __slots__ = ("op", "args", "payload", "_sexpr", "_hash")

    def __init__(self, op: str, args: tuple = (), payload=None):
        self.op = op
        self.args = args
        self.payload = payload
        self._sexpr = None
        self._hash = None

    # -- constructors with light, deterministic simplification ------------

    @staticmethod
    def const(c: float) -> "Expr":
        return Expr("const", (), float(c))

    @staticmethod
    def coord(k: int) -> "Expr":
        if k < 0:
            raise ValueError("coordinate index must be nonnegative")
        return Expr("coord", (), int(k))

    @staticmethod
    def add(*terms: "Expr") -> "Expr":
        flat: list[Expr] = []
        const_acc = 0.0
        for t in terms:
            if t.op == "add":
                inner = t.args
            else:
                inner = (t,)
            for u in inner:
                if u.op == "const":
                    const_acc += u.payload
                else:
                    flat.append(u)
        if const_acc != 0.0 or not flat:
            flat.append(Expr.const(const_acc))
        if len(flat) == 1:
            return flat[0]
        return Expr("add", tuple(flat))

    @staticmethod
    def mul(*factors: "Expr") -> "Expr":
        flat: list[Expr] = []
        const_acc = 1.0
        for t in factors:
            if t.op == "mul":
                inner = t.args
            else:
                inner = (t,)
            for u in inner:
                if u.op == "const":
                    const_acc *= u.payload
                else:
                    flat.append(u)
        if const_acc == 0.0:
            return Expr.const(0.0)
        if const_acc != 1.0 or not flat:
            flat.insert(0, Expr.const(const_acc))
        if len(flat) == 1:
            return flat[0]
        return Expr("mul", tuple(flat))

    @staticmethod
    def sub(a: "Expr", b: "Expr") -> "Expr":
        if b.op == "const" and b.payload == 0.0:
            return a
        if a.op == "const" and b.op == "const":
            return Expr.const(a.payload - b.payload)
        return Expr("sub", (a, b))

    @staticmethod
    def div(a: "Expr", b: "Expr") -> "Expr":
        if a.op == "const" and a.payload == 0.0:
            return a
        if b.op == "const" and b.payload == 1.0:
            return a
        return Expr("div", (a, b))

    @staticmethod
    def neg(a: "Expr") -> "Expr":
        if a.op == "const":
            return Expr.const(-a.payload)
        if a.op == "neg":
            return a.args[0]
        return Expr("neg", (a,))

    @staticmethod
    def sin(a: "Expr") -> "Expr":
        return Expr("sin", (a,))

    @staticmethod
    def cos(a: "Expr") -> "Expr":
        return Expr("cos", (a,))

    @staticmethod
    def exp(a: "Expr") -> "Expr":
        return Expr("exp", (a,))

    @staticmethod
    def sqrt(a: "Expr") -> "Expr":
        return Expr("sqrt", (a,))

    @staticmethod
    def pow(a: "Expr", r: float) -> "Expr":
        r = float(r)
        if r == 1.0:
            return a
        if r == 0.0:
            return Expr.const(1.0)
        return Expr("pow", (a,), r)

    # -- operator sugar ----------------------------------------------------

    def _as_expr(self, other):
        if isinstance(other, Expr):
            return other
        return Expr.const(other)

    def __add__(self, other):
        return Expr.add(self, self._as_expr(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Expr.sub(self, self._as_expr(other))

    def __rsub__(self, other):
        return Expr.sub(self._as_expr(other), self)

    def __mul__(self, other):
        return Expr.mul(self, self._as_expr(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Expr.div(self, self._as_expr(other))

    def __rtruediv__(self, other):
        return Expr.div(self._as_expr(other), self)

    def __neg__(self):
        return Expr.neg(self)

    # -- evaluation --------------------------------------------------------

    def evaluate(self, coord_jets: Sequence[Jet2], cache: dict | None = None) -> Jet2:
        """Evaluate into a jet given seeded coordinate jets.

        Shared subtrees are evaluated once per cache; pass one cache across
        many fields of the same structure to amortize common subexpressions.
        """
        if cache is None:
            cache = {}
        key = id(self)
        hit = cache.get(key)
        if hit is not None:
            return hit
        op = self.op
        if op == "const":
            ref = coord_jets[0]
            out = Jet2.constant(self.payload, ref.dim, ref.value.shape)
        elif op == "coord":
            if self.payload >= len(coord_jets):
                raise InvalidPoint(
                    f"coordinate {self.payload} out of range for dimension {len(coord_jets)}")
            out = coord_jets[self.payload]
        elif op == "add":
            out = self.args[0].evaluate(coord_jets, cache)
            for t in self.args[1:]:
                out = out + t.evaluate(coord_jets, cache)
        elif op == "mul":
            out = self.args[0].evaluate(coord_jets, cache)
            for t in self.args[1:]:
                out = out * t.evaluate(coord_jets, cache)
        elif op == "sub":
            out = self.args[0].evaluate(coord_jets, cache) - self.args[1].evaluate(coord_jets, cache)
        elif op == "div":
            out = self.args[0].evaluate(coord_jets, cache) / self.args[1].evaluate(coord_jets, cache)
        elif op == "neg":
            out = -self.args[0].evaluate(coord_jets, cache)
        elif op == "sin":
            out = self.args[0].evaluate(coord_jets, cache).sin()
        elif op == "cos":
            out = self.args[0].evaluate(coord_jets, cache).cos()
        elif op == "exp":
            out = self.args[0].evaluate(coord_jets, cache).exp()
        elif op == "sqrt":
            out = self.args[0].evaluate(coord_jets, cache).sqrt()
        elif op == "pow":
            out = self.args[0].evaluate(coord_jets, cache).power(self.payload)
        else:
            raise ValueError(f"unknown node op {op!r}")
        cache[key] = out
        return out

    def evaluate_value(self, points: np.ndarray, cache: dict | None = None) -> np.ndarray:
        """Value-only evaluation at points of shape ``(N, d)``.

        Used by the finite-difference oracle, which must not touch the jet
        derivative rules it is checking.
        """
        points = np.asarray(points, dtype=float)
        if cache is None:
            cache = {}
        key = id(self)
        hit = cache.get(key)
        if hit is not None:
            return hit
        op = self.op
        if op == "const":
            out = np.full(points.shape[0], self.payload)
        elif op == "coord":
            out = points[:, self.payload]
        elif op == "add":
            out = sum(t.evaluate_value(points, cache) for t in self.args)
        elif op == "mul":
            out = self.args[0].evaluate_value(points, cache).copy()
            for t in self.args[1:]:
                out = out * t.evaluate_value(points, cache)
        elif op == "sub":
            out = self.args[0].evaluate_value(points, cache) - self.args[1].evaluate_value(points, cache)
        elif op == "div":
            den = self.args[1].evaluate_value(points, cache)
            if np.any(np.abs(den) <= GUARD_BAND):
                raise SingularEvaluation("division within guard band of zero")
            out = self.args[0].evaluate_value(points, cache) / den
        elif op == "neg":
            out = -self.args[0].evaluate_value(points, cache)
        elif op == "sin":
            out = np.sin(self.args[0].evaluate_value(points, cache))
        elif op == "cos":
            out = np.cos(self.args[0].evaluate_value(points, cache))
        elif op == "exp":
            out = np.exp(self.args[0].evaluate_value(points, cache))
        elif op == "sqrt":
            v = self.args[0].evaluate_value(points, cache)
            if np.any(v <= GUARD_BAND):
                raise SingularEvaluation("sqrt within guard band of the nonpositive axis")
            out = np.sqrt(v)
        elif op == "pow":
            out = np.power(self.args[0].evaluate_value(points, cache), self.payload)
        else:
            raise ValueError(f"unknown node op {op!r}")
        cache[key] = out
        return out

    # -- serialization -----------------------------------------------------

    def to_sexpr(self) -> str:
        if self._sexpr is None:
            op = self.op
            if op == "const":
                self._sexpr = f"(const {self.payload!r})"
            elif op == "coord":
                self._sexpr = f"(coord {self.payload})"
            elif op == "pow":
                self._sexpr = f"(pow {self.args[0].to_sexpr()} {self.payload!r})"
            else:
                inner = " ".join(a.to_sexpr() for a in self.args)
                self._sexpr = f"({op} {inner})"
        return self._sexpr

    def __repr__(self) -> str:
        return f"Expr{self.to_sexpr()}"

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.to_sexpr())
        return self._hash

    def __eq__(self, other):
        return isinstance(other, Expr) and self.to_sexpr() == other.to_sexpr()

    def remap_coords(self, mapping: dict[int, int]) -> "Expr":
        """Rewrite coordinate indices; used when charts are stacked into products."""
        if self.op == "coord":
            return Expr.coord(mapping[self.payload])
        if self.op == "const":
            return self
        args = tuple(a.remap_coords(mapping) for a in self.args)
        return Expr(self.op, args, self.payload)


ZERO = Expr.const(0.0)
ONE = Expr.const(1.0)


def parse_sexpr(text: str) -> Expr:
    """Parse the prefix s-expression grammar documented in the README."""
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def parse() -> Expr:
        nonlocal pos
        if pos >= len(tokens):
            raise ValueError("unexpected end of expression")
        tok = tokens[pos]
        pos += 1
        if tok != "(":
            raise ValueError(f"expected '(', got {tok!r}")
        if pos >= len(tokens):
            raise ValueError("unexpected end of expression")
        op = tokens[pos]
        pos += 1
        if op == "const":
            value = float(tokens[pos]); pos += 1
            node = Expr.const(value)
        elif op == "coord":
            idx = int(tokens[pos]); pos += 1
            node = Expr.coord(idx)
        elif op in _UNARY_OPS:
            arg = parse()
            node = getattr(Expr, op)(arg)
        elif op in _BINARY_OPS:
            a = parse(); b = parse()
            node = getattr(Expr, op)(a, b)
        elif op in _NARY_OPS:
            args = []
            while pos < len(tokens) and tokens[pos] == "(":
                args.append(parse())
            if len(args) < 1:
                raise ValueError(f"{op} needs at least one argument")
            node = getattr(Expr, op)(*args)
        elif op == "pow":
            a = parse()
            r = float(tokens[pos]); pos += 1
            node = Expr.pow(a, r)
        else:
            raise ValueError(f"unknown operator {op!r}")
        if pos >= len(tokens) or tokens[pos] != ")":
            raise ValueError(f"missing ')' after {op}")
        pos += 1
        return node

    node = parse()
    if pos != len(tokens):
        raise ValueError("trailing tokens after expression")
    return node


# ScalarField is the contract name for an expression tree used as a field.
ScalarField = Expr


def fd_gradient(field: Expr, p: np.ndarray, step: float = 1e-4) -> np.ndarray:
    """Central-difference gradient oracle (independent of the jet rules)."""
    p = np.asarray(p, dtype=float)
    d = p.shape[0]
    out = np.zeros(d)
    for k in range(d):
        e = np.zeros(d); e[k] = step
        plus = field.evaluate_value((p + e)[None, :])[0]
        minus = field.evaluate_value((p - e)[None, :])[0]
        out[k] = (plus - minus) / (2.0 * step)
    return out


def fd_hessian(field: Expr, p: np.ndarray, step: float = 1e-4) -> np.ndarray:
    """Second-difference Hessian oracle using the standard 4-point stencil."""
    p = np.asarray(p, dtype=float)
    d = p.shape[0]
    out = np.zeros((d, d))
    f0 = field.evaluate_value(p[None, :])[0]
    for i in range(d):
        ei = np.zeros(d); ei[i] = step
        fp = field.evaluate_value((p + ei)[None, :])[0]
        fm = field.evaluate_value((p - ei)[None, :])[0]
        out[i, i] = (fp - 2.0 * f0 + fm) / step**2
        for j in range(i + 1, d):
            ej = np.zeros(d); ej[j] = step
            fpp = field.evaluate_value((p + ei + ej)[None, :])[0]
            fpm = field.evaluate_value((p + ei - ej)[None, :])[0]
            fmp = field.evaluate_value((p - ei + ej)[None, :])[0]
            fmm = field.evaluate_value((p - ei - ej)[None, :])[0]
            out[i, j] = out[j, i] = (fpp - fpm - fmp + fmm) / (4.0 * step**2)
    return out
