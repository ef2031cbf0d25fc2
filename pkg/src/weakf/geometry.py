"""Chart-level Riemannian geometry from exact second-order jets.

A chart carries a symmetric matrix of scalar-field expressions for the
metric.  Christoffel symbols come from one exact derivative of the metric,
the curvature tensor from two; nothing here ever uses finite differences
except the explicitly-named oracle functions, which exist to check the jet
path and therefore only consume metric *values*.

Curvature sign convention (recorded in every report):
    R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z
    Riem(X,Y,Z,V) = g(R(X,Y)Z, V)
    K(X,Y) = g(R(X,Y)Y, X) / (|X|^2 |Y|^2 - g(X,Y)^2)
With this convention the unit round sphere has K = +1 and Ric = (d-1) g.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CrossCheckMismatch, DegenerateMetric, InvalidPoint, NotKilling, ShapeError
from .jets import Expr, Jet2, seed_points
from .multilinear import PointTensor, cholesky_spd

CONVENTION = "R(X,Y)Z = [nabla_X,nabla_Y]Z - nabla_[X,Y]Z; K>0 on round spheres"


@dataclass(frozen=True)
class Domain:
    """Sampling domain descriptor: a centered ball or box in chart coordinates."""

    kind: str          # "ball" | "box"
    radius: float
    center: tuple = ()

    def sample(self, rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
        center = np.asarray(self.center if self.center else np.zeros(dim))
        if self.kind == "box":
            return center + rng.uniform(-self.radius, self.radius, size=(count, dim))
        if self.kind == "ball":
            u = rng.standard_normal((count, dim))
            u /= np.linalg.norm(u, axis=1, keepdims=True)
            r = self.radius * rng.random(count) ** (1.0 / dim)
            return center + u * r[:, None]
        raise ValueError(f"unknown domain kind {self.kind!r}")


class ChartManifold:
    """A single coordinate chart of dimension 2n+s with a metric field."""

    def __init__(self, name: str, n: int, s: int, metric, domain: Domain,
                 check_spd: bool = True):
        self.name = name
        self.n = int(n)
        self.s = int(s)
        self.dim = 2 * self.n + self.s
        metric = np.asarray(metric, dtype=object)
        if metric.shape != (self.dim, self.dim):
            raise ShapeError(f"metric must be {self.dim}x{self.dim}")
        # store the upper triangle once and mirror, so symmetry is structural
        sym = np.empty((self.dim, self.dim), dtype=object)
        for i in range(self.dim):
            for j in range(i, self.dim):
                sym[i, j] = metric[i, j]
                sym[j, i] = metric[i, j]
        self.metric = sym
        self.domain = domain
        if check_spd:
            pts = self.domain.sample(np.random.default_rng(0), 4, self.dim)
            for g in self.metric_values(pts):
                cholesky_spd(g)

    def sample_points(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return self.domain.sample(rng, count, self.dim)

    def contains(self, p: np.ndarray) -> bool:
        p = np.asarray(p, dtype=float)
        c = np.asarray(self.domain.center if self.domain.center else np.zeros(self.dim))
        if self.domain.kind == "ball":
            return bool(np.linalg.norm(p - c) <= self.domain.radius + 1e-9)
        return bool(np.all(np.abs(p - c) <= self.domain.radius + 1e-9))

    # -- field evaluation helpers (batched over points) --------------------

    def metric_values(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        cache: dict = {}
        d = self.dim
        out = np.zeros((points.shape[0], d, d))
        for i in range(d):
            for j in range(i, d):
                v = self.metric[i, j].evaluate_value(points, cache)
                out[:, i, j] = v
                out[:, j, i] = v
        return out

    def metric_jets(self, points: np.ndarray):
        """Return (g, dg, d2g) with dg[n,c,i,j] = d_c g_ij, d2g[n,c,e,i,j]."""
        points = np.asarray(points, dtype=float)
        N, d = points.shape
        jets = seed_points(points)
        cache: dict = {}
        g = np.zeros((N, d, d))
        dg = np.zeros((N, d, d, d))
        d2g = np.zeros((N, d, d, d, d))
        for i in range(d):
            for j in range(i, d):
                jet = self.metric[i, j].evaluate(jets, cache)
                g[:, i, j] = g[:, j, i] = jet.value
                dg[:, :, i, j] = dg[:, :, j, i] = jet.gradient
                d2g[:, :, :, i, j] = d2g[:, :, :, j, i] = jet.hessian
        return g, dg, d2g


@dataclass(frozen=True)
class TensorField:
    """Tensor field given componentwise by expression trees.

    variance: one char per index, 'u' up / 'd' down; comps is an object array
    of Expr with matching rank.
    """

    variance: str
    comps: np.ndarray

    def __post_init__(self):
        comps = np.asarray(self.comps, dtype=object)
        object.__setattr__(self, "comps", comps)
        if comps.ndim != len(self.variance):
            raise ShapeError("component rank does not match variance")

    @property
    def rank(self) -> int:
        return len(self.variance)

    def jets(self, points: np.ndarray, cache: dict | None = None):
        """Evaluate all components: (vals, grads, hesss) with batch axis first.

        grads[n, c, ...] = d_c T[...]; hesss[n, c, e, ...] = d_c d_e T[...].
        """
        points = np.asarray(points, dtype=float)
        N, d = points.shape
        jets = seed_points(points)
        if cache is None:
            cache = {}
        shape = self.comps.shape
        vals = np.zeros((N,) + shape)
        grads = np.zeros((N, d) + shape)
        hesss = np.zeros((N, d, d) + shape)
        for idx in np.ndindex(*shape) if shape else [()]:
            jet = self.comps[idx].evaluate(jets, cache)
            vals[(slice(None),) + idx] = jet.value
            grads[(slice(None), slice(None)) + idx] = jet.gradient
            hesss[(slice(None), slice(None), slice(None)) + idx] = jet.hessian
        return vals, grads, hesss

    def values(self, points: np.ndarray, cache: dict | None = None) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        if cache is None:
            cache = {}
        shape = self.comps.shape
        out = np.zeros((points.shape[0],) + shape)
        for idx in np.ndindex(*shape) if shape else [()]:
            out[(slice(None),) + idx] = self.comps[idx].evaluate_value(points, cache)
        return out

    def remap_coords(self, mapping: dict[int, int]) -> "TensorField":
        remapped = np.empty(self.comps.shape, dtype=object)
        for idx in np.ndindex(*self.comps.shape):
            remapped[idx] = self.comps[idx].remap_coords(mapping)
        return TensorField(self.variance, remapped)


def constant_field(variance: str, array: np.ndarray) -> TensorField:
    array = np.asarray(array, dtype=float)
    comps = np.empty(array.shape, dtype=object)
    for idx in np.ndindex(*array.shape):
        comps[idx] = Expr.const(array[idx])
    return TensorField(variance, comps)


# -- connection and curvature ----------------------------------------------

@dataclass(frozen=True)
class ConnectionData:
    """Christoffel symbols and metric data at one point.

    gamma[k, i, j] = Gamma^k_ij, exactly symmetric in (i, j) by construction.
    """

    point: np.ndarray
    gamma: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray


@dataclass(frozen=True)
class CurvatureData:
    """Riemann and Ricci tensors at one point.

    riem[i,j,k,l] = g(R(e_i, e_j) e_k, e_l);  rop[i,j,k,l] is the operator
    form, R(e_i,e_j)e_k = rop[i,j,k,l] e_l.  Residuals of the pair
    symmetries and the first Bianchi identity are recorded on construction.
    """

    point: np.ndarray
    riem: np.ndarray
    rop: np.ndarray
    ricci: np.ndarray
    symmetry_residual: float
    bianchi_residual: float


def _metric_bracket(dg):
    # bracket[n,i,j,l] = d_i g_jl + d_j g_il - d_l g_ij; dg[n,c,a,b] = d_c g_ab
    return (np.einsum("nijl->nijl", dg)
            + np.einsum("njil->nijl", dg)
            - np.einsum("nlij->nijl", dg))


def _christoffel_arrays(g, dg):
    g_inv = np.linalg.inv(g)
    # Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
    gamma = 0.5 * np.einsum("nkl,nijl->nkij", g_inv, _metric_bracket(dg))
    gamma = 0.5 * (gamma + gamma.transpose(0, 1, 3, 2))
    return g_inv, gamma


def _christoffel_derivative(g_inv, dg, d2g, gamma):
    # d_c Gamma^k_ij from d_c g^{kl} = -g^{km} d_c g_mn g^{nl} and metric Hessians
    dginv = -np.einsum("nkm,ncmq,nql->nckl", g_inv, dg, g_inv)
    bracket = _metric_bracket(dg)
    # d2g[n,c,e,a,b] = d_c d_e g_ab
    dbracket = (np.einsum("ncijl->ncijl", d2g)
                + np.einsum("ncjil->ncijl", d2g)
                - np.einsum("nclij->ncijl", d2g))
    dgamma = (0.5 * np.einsum("nckl,nijl->nckij", dginv, bracket)
              + 0.5 * np.einsum("nkl,ncijl->nckij", g_inv, dbracket))
    return dgamma


def connection_batch(m: ChartManifold, points: np.ndarray):
    """Batched (g, g_inv, gamma, dgamma) for internal consumers."""
    g, dg, d2g = m.metric_jets(points)
    for gi in g:
        cholesky_spd(gi)
    g_inv, gamma = _christoffel_arrays(g, dg)
    dgamma = _christoffel_derivative(g_inv, dg, d2g, gamma)
    return g, g_inv, gamma, dgamma


def christoffel(m: ChartManifold, p: np.ndarray) -> ConnectionData:
    """Levi-Civita Christoffel symbols at a point."""
    p = np.asarray(p, dtype=float)
    if not m.contains(p):
        raise InvalidPoint(f"point outside the sampling domain of {m.name}")
    g, dg, _ = m.metric_jets(p[None, :])
    cholesky_spd(g[0])
    g_inv, gamma = _christoffel_arrays(g, dg)
    return ConnectionData(p, gamma[0], g[0], g_inv[0])


def curvature_batch(g, g_inv, gamma, dgamma):
    """Riemann (operator and (0,4)) plus Ricci from Christoffel data."""
    # R(e_i,e_j)e_k = (d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik) e_l
    term1 = np.einsum("niljk->nijkl", dgamma)
    term2 = np.einsum("njlik->nijkl", dgamma)
    term3 = np.einsum("nlim,nmjk->nijkl", gamma, gamma)
    term4 = np.einsum("nljm,nmik->nijkl", gamma, gamma)
    rop = term1 - term2 + term3 - term4
    riem = np.einsum("nijkm,nml->nijkl", rop, g)
    ricci = np.einsum("nijki->njk", rop)
    return rop, riem, ricci


def riemann(m: ChartManifold, p: np.ndarray) -> CurvatureData:
    """Riemann and Ricci tensors at a point, with symmetry residuals."""
    p = np.asarray(p, dtype=float)
    if not m.contains(p):
        raise InvalidPoint(f"point outside the sampling domain of {m.name}")
    g, g_inv, gamma, dgamma = connection_batch(m, p[None, :])
    rop, riem, ricci = curvature_batch(g, g_inv, gamma, dgamma)
    R = riem[0]
    sym = max(np.abs(R + R.transpose(1, 0, 2, 3)).max(),
              np.abs(R + R.transpose(0, 1, 3, 2)).max(),
              np.abs(R - R.transpose(2, 3, 0, 1)).max())
    bianchi = np.abs(R + R.transpose(1, 2, 0, 3) + R.transpose(2, 0, 1, 3)).max()
    return CurvatureData(p, R, rop[0], ricci[0], float(sym), float(bianchi))


def sectional_curvature(curv: CurvatureData, g: np.ndarray,
                        X: np.ndarray, Y: np.ndarray) -> float:
    num = np.einsum("ijkl,i,j,k,l->", curv.riem, X, Y, Y, X)
    den = (X @ g @ X) * (Y @ g @ Y) - (X @ g @ Y) ** 2
    if abs(den) < 1e-14:
        raise ShapeError("degenerate plane for sectional curvature")
    return float(num / den)


# -- covariant derivatives of tensor fields ----------------------------------

def _covariant_correct(vals, partial, gamma, variance):
    """Add the one-Gamma-per-index corrections to a partial derivative array.

    partial[c, ...] = d_c T[...]; returns nabla[c, ...].
    """
    nabla = partial.copy()
    for slot, var in enumerate(variance):
        ax = slot + 1  # account for the derivative axis in front
        moved = np.moveaxis(vals, slot, -1)
        if var == "u":
            corr = np.einsum("acm,...m->c...a", gamma, moved)
        else:
            corr = -np.einsum("mca,...m->c...a", gamma, moved)
        corr = np.moveaxis(corr, -1, ax)
        nabla = nabla + corr
    return nabla


def covariant_derivative_components(m: ChartManifold, field: TensorField,
                                    p: np.ndarray):
    """(vals, nabla) at p with nabla[c, ...] = (nabla_c T)[...]."""
    p = np.asarray(p, dtype=float)
    g, dg, _ = m.metric_jets(p[None, :])
    g_inv, gamma = _christoffel_arrays(g, dg)
    vals, grads, _ = field.jets(p[None, :])
    nabla = _covariant_correct(vals[0], grads[0], gamma[0], field.variance)
    return vals[0], nabla


def covariant_derivative(m: ChartManifold, field: TensorField,
                         direction: np.ndarray, p: np.ndarray) -> PointTensor:
    """nabla_X T at p for a coordinate-constant direction X."""
    direction = np.asarray(direction, dtype=float)
    vals, nabla = covariant_derivative_components(m, field, p)
    comps = np.einsum("c...,c->...", nabla, direction)
    return PointTensor(field.variance, comps, np.asarray(p, dtype=float))


def second_covariant_derivative_components(m: ChartManifold, field: TensorField,
                                           p: np.ndarray):
    """(vals, nabla, nabla2) with nabla2[c, e, ...] = (nabla^2_{c,e} T)[...].

    nabla^2_{X,Y} := nabla_X nabla_Y - nabla_{nabla_X Y}; the component form
    treats nabla T as a tensor with one extra covariant slot, which matches
    that definition for any (in particular coordinate-constant) extension of
    X and Y because the result is tensorial in both arguments.
    """
    p = np.asarray(p, dtype=float)
    g, dg, d2g = m.metric_jets(p[None, :])
    g_inv, gamma = _christoffel_arrays(g, dg)
    dgamma = _christoffel_derivative(g_inv, dg, d2g, gamma)
    vals, grads, hesss = field.jets(p[None, :])
    vals, grads, hesss = vals[0], grads[0], hesss[0]
    gamma, dgamma = gamma[0], dgamma[0]
    variance = field.variance

    nabla = _covariant_correct(vals, grads, gamma, variance)

    # d_c (nabla_e T): Hessian term plus derivative of each Gamma correction
    dnabla = hesss.copy()  # [c, e, ...]
    for slot, var in enumerate(variance):
        ax = slot + 2
        moved_v = np.moveaxis(vals, slot, -1)
        moved_g = np.moveaxis(grads, slot + 1, -1)  # [c, ..., m]
        if var == "u":
            corr = (np.einsum("caem,...m->ce...a", dgamma, moved_v)
                    + np.einsum("aem,c...m->ce...a", gamma, moved_g))
        else:
            corr = -(np.einsum("cmea,...m->ce...a", dgamma, moved_v)
                     + np.einsum("mea,c...m->ce...a", gamma, moved_g))
        corr = np.moveaxis(corr, -1, ax)
        dnabla = dnabla + corr

    # covariant-correct the (e + tensor) slots of nabla T in direction c
    nabla2 = dnabla - np.einsum("mce,m...->ce...", gamma, nabla)
    for slot, var in enumerate(variance):
        ax = slot + 2
        moved = np.moveaxis(nabla, slot + 1, -1)  # [e, ..., m]
        if var == "u":
            corr = np.einsum("acm,e...m->ce...a", gamma, moved)
        else:
            corr = -np.einsum("mca,e...m->ce...a", gamma, moved)
        corr = np.moveaxis(corr, -1, ax)
        nabla2 = nabla2 + corr
    return vals, nabla, nabla2


def second_covariant_derivative(m: ChartManifold, field: TensorField,
                                X: np.ndarray, Y: np.ndarray,
                                p: np.ndarray) -> PointTensor:
    """nabla^2_{X,Y} T at p."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    _, _, nabla2 = second_covariant_derivative_components(m, field, p)
    comps = np.einsum("ce...,c,e->...", nabla2, X, Y)
    return PointTensor(field.variance, comps, np.asarray(p, dtype=float))


# -- Killing diagnostics ------------------------------------------------------

def killing_residual(m: ChartManifold, zeta: TensorField, p: np.ndarray,
                     X: np.ndarray, Y: np.ndarray) -> float:
    """(Lie_zeta g)(X, Y) = g(nabla_X zeta, Y) + g(nabla_Y zeta, X)."""
    if zeta.variance != "u":
        raise ShapeError("zeta must be a vector field")
    p = np.asarray(p, dtype=float)
    g = m.metric_values(p[None, :])[0]
    _, nabla = covariant_derivative_components(m, zeta, p)
    # nabla[c, a] = (nabla_c zeta)^a
    gradX = np.einsum("ca,c->a", nabla, np.asarray(X, dtype=float))
    gradY = np.einsum("ca,c->a", nabla, np.asarray(Y, dtype=float))
    return float(gradX @ g @ np.asarray(Y, float) + gradY @ g @ np.asarray(X, float))


def killing_matrix_residual(m: ChartManifold, zeta: TensorField, p: np.ndarray) -> float:
    """max over basis pairs of the Killing residual; 0 iff zeta is Killing at p."""
    p = np.asarray(p, dtype=float)
    g = m.metric_values(p[None, :])[0]
    _, nabla = covariant_derivative_components(m, zeta, p)
    M = np.einsum("ca,ab->cb", nabla, g)  # M[c,b] = g(nabla_c zeta, e_b)
    return float(np.abs(M + M.T).max())


KILLING_TOL = 1e-8


def killing_curvature_residual(m: ChartManifold, zeta: TensorField, p: np.ndarray,
                               X: np.ndarray, Y: np.ndarray,
                               tol: float = KILLING_TOL) -> np.ndarray:
    """Difference nabla^2_{X,Y} zeta - R(X, zeta) Y for a Killing field zeta."""
    p = np.asarray(p, dtype=float)
    resid = killing_matrix_residual(m, zeta, p)
    if resid > tol:
        raise NotKilling(f"Killing residual {resid:.3e} exceeds {tol:.1e} at {p}")
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    lhs = second_covariant_derivative(m, zeta, X, Y, p).components
    curv = riemann(m, p)
    zval = zeta.values(p[None, :])[0]
    rhs = np.einsum("ijkl,i,j,k->l", curv.rop, X, zval, Y)
    return lhs - rhs


# -- exterior derivative -------------------------------------------------------

CROSS_CHECK_TOL = 1e-10


def _check_routes(a: np.ndarray, b: np.ndarray, tol: float, what: str) -> None:
    diff = np.abs(a - b).max() if a.size else 0.0
    if diff > tol:
        raise CrossCheckMismatch(f"{what}: routes differ by {diff:.3e} (> {tol:.1e})")


def exterior_derivative(form: TensorField, m: ChartManifold, p: np.ndarray,
                        tol: float = CROSS_CHECK_TOL):
    """Exterior derivative of a 1- or 2-form field at p as a KForm.

    Computed two independent ways (partial-derivative antisymmetrization and
    the covariant coboundary formula) and cross-checked; Levi-Civita torsion
    freedom makes them agree identically, so a mismatch flags a broken field.
    """
    from .multilinear import KForm

    p = np.asarray(p, dtype=float)
    vals, grads, _ = form.jets(p[None, :])
    vals, grads = vals[0], grads[0]
    g, dg, _ = m.metric_jets(p[None, :])
    _, gamma = _christoffel_arrays(g, dg)
    nabla = _covariant_correct(vals, grads, gamma[0], form.variance)
    if form.variance == "d":
        partial = grads - grads.transpose(1, 0)
        covar = nabla - nabla.transpose(1, 0)
        _check_routes(partial, covar, tol, "d(1-form)")
        return KForm.from_array(partial, 2, p)
    if form.variance == "dd":
        skew = np.abs(vals + vals.T).max()
        if skew > 1e-10:
            raise ShapeError(f"2-form field is not antisymmetric (residual {skew:.2e})")
        partial = (grads
                   + grads.transpose(1, 2, 0)
                   + grads.transpose(2, 0, 1))
        covar = (nabla
                 + nabla.transpose(1, 2, 0)
                 + nabla.transpose(2, 0, 1))
        _check_routes(partial, covar, tol, "d(2-form)")
        arr = partial
        out = {}
        d = m.dim
        import itertools as _it
        for idx in _it.combinations(range(d), 3):
            out[idx] = float(arr[idx])
        return KForm(3, d, out, p)
    raise ShapeError("exterior_derivative expects a 1-form ('d') or 2-form ('dd')")


def d_squared_residual(form: TensorField, m: ChartManifold, p: np.ndarray) -> float:
    """Max component of d(d form) for a 1-form field; zero by Hessian symmetry."""
    if form.variance != "d":
        raise ShapeError("d^2 check implemented for 1-form fields")
    p = np.asarray(p, dtype=float)
    _, _, hesss = form.jets(p[None, :])
    H = hesss[0]  # H[c, e, a] = d_c d_e omega_a
    ddo = (H.transpose(0, 1, 2) - H.transpose(0, 2, 1)
           + H.transpose(1, 2, 0) - H.transpose(1, 0, 2)
           + H.transpose(2, 0, 1) - H.transpose(2, 1, 0))
    return float(np.abs(ddo).max())


# -- finite-difference oracle --------------------------------------------------

def fd_christoffel(m: ChartManifold, p: np.ndarray, step: float = 1e-4) -> np.ndarray:
    """Christoffel symbols from central differences of metric values only."""
    p = np.asarray(p, dtype=float)
    d = m.dim
    stencil = np.vstack([p + step * np.eye(d), p - step * np.eye(d)])
    gs = m.metric_values(stencil)
    dgs = (gs[:d] - gs[d:]) / (2.0 * step)          # dgs[c, i, j] = d_c g_ij
    g0 = m.metric_values(p[None, :])[0]
    g_inv = np.linalg.inv(g0)
    # bracket[i, j, l] = d_i g_jl + d_j g_il - d_l g_ij
    bracket = np.einsum("ijl->ijl", dgs) + np.einsum("jil->ijl", dgs) \
        - np.einsum("lij->ijl", dgs)
    gamma = 0.5 * np.einsum("kl,ijl->kij", g_inv, bracket)
    return 0.5 * (gamma + gamma.transpose(0, 2, 1))


def fd_riemann(m: ChartManifold, p: np.ndarray, step: float = 1e-4) -> np.ndarray:
    """(0,4) curvature from nested central differences of metric values."""
    p = np.asarray(p, dtype=float)
    d = m.dim
    dgamma = np.zeros((d, d, d, d))  # [c, k, i, j]
    for c in range(d):
        e = np.zeros(d); e[c] = step
        gp = fd_christoffel(m, p + e, step)
        gm = fd_christoffel(m, p - e, step)
        dgamma[c] = (gp - gm) / (2.0 * step)
    gamma = fd_christoffel(m, p, step)
    g0 = m.metric_values(p[None, :])[0]
    term1 = np.einsum("iljk->ijkl", dgamma)
    term2 = np.einsum("jlik->ijkl", dgamma)
    term3 = np.einsum("lim,mjk->ijkl", gamma, gamma)
    term4 = np.einsum("ljm,mik->ijkl", gamma, gamma)
    rop = term1 - term2 + term3 - term4
    return np.einsum("ijkm,ml->ijkl", rop, g0)
