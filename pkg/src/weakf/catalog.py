"""Constructors for every concrete structure the suites verify.

Spheres are realized in a single stereographic chart (projection from the
north pole), where the round metric is conformal: g = 4/(1+|u|^2)^2 id.
Ambient tensors pull back through the chart differential D; conformality
gives D^T D = c * id, so the pullback of an ambient operator A is simply
(1/c) D^T A D, and every component stays a closed-form expression tree.

The almost-complex structure on the six-sphere is J(x) v = x * v with the
seven-dimensional cross product derived from the octonions; the positively
oriented multiplication triples (e1 e2 = e3 convention) are::

    (1,2,3) (1,4,5) (2,4,6) (3,4,7) (2,5,7) (3,6,5) (1,7,6)

The five-sphere sits inside the six-sphere as the slice x7 = 0; its
structure comes from the unit normal e7: xi = x * e7 and f = the tangential
part of J.

Constant-field entries derive Q from the computed f (Q = sum eta (x) xi - f^2)
so their axiom residuals are exactly zero in floating point, not merely tiny.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameter
from .geometry import ChartManifold, Domain, TensorField, constant_field
from .jets import Expr
from .fstructure import WeakMetricFStructureField

# Global sampling seed recorded in every report.
DEFAULT_SEED = 0x5EED

# -- seven-dimensional cross product ------------------------------------------

CROSS_TRIPLES = [(1, 2, 3), (1, 4, 5), (2, 4, 6), (3, 4, 7),
                 (2, 5, 7), (3, 6, 5), (1, 7, 6)]

_PAIR_TABLE: dict[tuple[int, int], tuple[int, int]] = {}
for (_i, _j, _k) in CROSS_TRIPLES:
    for (a, b, c) in [(_i, _j, _k), (_j, _k, _i), (_k, _i, _j)]:
        _PAIR_TABLE[(a - 1, b - 1)] = (c - 1, +1)
        _PAIR_TABLE[(b - 1, a - 1)] = (c - 1, -1)


def cross7(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Cross product on R^7; satisfies x*(x*v) = -|x|^2 v + <x,v> x."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.zeros(7)
    for (a, b), (c, sign) in _PAIR_TABLE.items():
        out[c] += sign * x[a] * y[b]
    return out


# -- stereographic chart machinery --------------------------------------------

def _stereo_embedding(chart_dim: int, ambient_dim: int):
    """Embedding of the unit sphere S^chart_dim into R^ambient_dim.

    Returns (psi, dpsi, conf): the embedding components, its differential
    and the conformal factor c = 4/(1+|u|^2)^2 with D^T D = c id.
    Ambient components beyond chart_dim+1 are identically zero.
    """
    coords = [Expr.coord(k) for k in range(chart_dim)]
    u2 = Expr.add(*[c * c for c in coords])
    w = Expr.const(1.0) + u2
    w2 = w * w
    conf = Expr.const(4.0) / w2
    psi = []
    for a in range(ambient_dim):
        if a < chart_dim:
            psi.append(Expr.const(2.0) * coords[a] / w)
        elif a == chart_dim:
            psi.append((u2 - Expr.const(1.0)) / w)
        else:
            psi.append(Expr.const(0.0))
    dpsi = np.empty((ambient_dim, chart_dim), dtype=object)
    for a in range(ambient_dim):
        for b in range(chart_dim):
            if a < chart_dim:
                term = Expr.const(-4.0) * coords[a] * coords[b] / w2
                if a == b:
                    term = term + Expr.const(2.0) / w
                dpsi[a, b] = term
            elif a == chart_dim:
                dpsi[a, b] = Expr.const(4.0) * coords[b] / w2
            else:
                dpsi[a, b] = Expr.const(0.0)
    return psi, dpsi, conf


def _sphere_metric(chart_dim: int, conf: Expr) -> np.ndarray:
    metric = np.empty((chart_dim, chart_dim), dtype=object)
    for i in range(chart_dim):
        for j in range(chart_dim):
            metric[i, j] = conf if i == j else Expr.const(0.0)
    return metric


def _ambient_j(psi: list) -> np.ndarray:
    """Ambient matrix of v -> x(u) * v as expression trees (7x7)."""
    J = np.empty((7, 7), dtype=object)
    for a in range(7):
        for b in range(7):
            J[a, b] = Expr.const(0.0)
    for (c, b), (a, sign) in _PAIR_TABLE.items():
        # e_c * e_b = sign e_a, so column b picks up sign*x_c in row a
        J[a, b] = J[a, b] + Expr.const(float(sign)) * psi[c]
    return J


def _pullback_operator(dpsi: np.ndarray, conf: Expr, amb: np.ndarray,
                       chart_dim: int, ambient_dim: int) -> np.ndarray:
    out = np.empty((chart_dim, chart_dim), dtype=object)
    for i in range(chart_dim):
        for j in range(chart_dim):
            terms = []
            for a in range(ambient_dim):
                for b in range(ambient_dim):
                    entry = amb[a, b]
                    if entry.op == "const" and entry.payload == 0.0:
                        continue
                    terms.append(Expr.mul(dpsi[a, i], entry, dpsi[b, j]))
            total = Expr.add(*terms) if terms else Expr.const(0.0)
            out[i, j] = Expr.div(total, conf) if total.op != "const" else total
    return out


def _pullback_vector(dpsi: np.ndarray, conf: Expr, amb: list,
                     chart_dim: int, ambient_dim: int) -> np.ndarray:
    out = np.empty(chart_dim, dtype=object)
    for i in range(chart_dim):
        terms = []
        for a in range(ambient_dim):
            entry = amb[a]
            if entry.op == "const" and entry.payload == 0.0:
                continue
            terms.append(Expr.mul(dpsi[a, i], entry))
        total = Expr.add(*terms) if terms else Expr.const(0.0)
        out[i] = Expr.div(total, conf) if total.op != "const" else total
    return out


def _pullback_oneform(dpsi: np.ndarray, amb: list,
                      chart_dim: int, ambient_dim: int) -> np.ndarray:
    out = np.empty(chart_dim, dtype=object)
    for i in range(chart_dim):
        terms = []
        for a in range(ambient_dim):
            entry = amb[a]
            if entry.op == "const" and entry.payload == 0.0:
                continue
            terms.append(Expr.mul(dpsi[a, i], entry))
        out[i] = Expr.add(*terms) if terms else Expr.const(0.0)
    return out


def _identity_exprs(d: int) -> np.ndarray:
    out = np.empty((d, d), dtype=object)
    for i in range(d):
        for j in range(d):
            out[i, j] = Expr.const(1.0 if i == j else 0.0)
    return out


# -- constructors --------------------------------------------------------------

def flat_model(n: int, s: int, block_scales) -> WeakMetricFStructureField:
    """Euclidean R^{2n+s} with constant block structure.

    f rotates the j-th contact plane scaled by sqrt(lambda_j); Q is derived
    from f so the structure equations hold bitwise.  With all scales 1 this
    is the classical flat model; otherwise a genuinely weak one.
    """
    scales = [float(x) for x in np.atleast_1d(block_scales)]
    if n < 1 or s < 0:
        raise InvalidParameter("flat model needs n >= 1 and s >= 0")
    if len(scales) != n:
        raise InvalidParameter(f"need {n} block scales, got {len(scales)}")
    if any(x <= 0 for x in scales):
        raise InvalidParameter("block scales must be positive")
    d = 2 * n + s
    fmat = np.zeros((d, d))
    for j, lam in enumerate(scales):
        r = math.sqrt(lam)
        fmat[2 * j + 1, 2 * j] = r
        fmat[2 * j, 2 * j + 1] = -r
    ximat = np.zeros((s, d))
    for i in range(s):
        ximat[i, 2 * n + i] = 1.0
    outer = sum(np.outer(ximat[i], ximat[i]) for i in range(s)) if s else np.zeros((d, d))
    Qmat = outer - fmat @ fmat
    chart = ChartManifold(f"flat(n={n},s={s})", n, s, _identity_exprs(d),
                          Domain("box", 1.0))
    return WeakMetricFStructureField(
        name=f"flat:n={n},s={s},scales={','.join(repr(x) for x in scales)}",
        host=chart,
        f=constant_field("ud", fmat),
        Q=constant_field("ud", Qmat),
        xi=[constant_field("u", ximat[i]) for i in range(s)],
        eta=[constant_field("d", ximat[i]) for i in range(s)])


def s6_nearly_kahler(radius: float = 1.5) -> WeakMetricFStructureField:
    """The six-sphere with J(x) v = x * v; an s = 0 host for products."""
    chart_dim, ambient = 6, 7
    psi, dpsi, conf = _stereo_embedding(chart_dim, ambient)
    metric = _sphere_metric(chart_dim, conf)
    J = _pullback_operator(dpsi, conf, _ambient_j(psi), chart_dim, ambient)
    chart = ChartManifold("s6", n=3, s=0, metric=metric, domain=Domain("ball", radius))
    return WeakMetricFStructureField(
        name="s6", host=chart,
        f=TensorField("ud", J),
        Q=TensorField("ud", _identity_exprs(chart_dim)),
        xi=[], eta=[])


def s6_rotation_killing_field(i: int, j: int) -> TensorField:
    """Ambient rotation generator in the (e_i, e_j) plane pulled back to the chart."""
    chart_dim, ambient = 6, 7
    psi, dpsi, conf = _stereo_embedding(chart_dim, ambient)
    amb = [Expr.const(0.0)] * ambient
    amb[i] = Expr.neg(psi[j])
    amb[j] = psi[i]
    return TensorField("u", _pullback_vector(dpsi, conf, amb, chart_dim, ambient))


def s5_nearly_cosymplectic(radius: float = 1.5) -> WeakMetricFStructureField:
    """The five-sphere as the x7 = 0 slice of the six-sphere.

    xi = x * e7, f = tangential part of J, eta = g(xi, .), Q = Id.
    """
    chart_dim, ambient = 5, 7
    psi, dpsi, conf = _stereo_embedding(chart_dim, ambient)
    metric = _sphere_metric(chart_dim, conf)
    f = _pullback_operator(dpsi, conf, _ambient_j(psi), chart_dim, ambient)
    # xi_amb = x * e7: component a gets sign * x_c where e_c * e7 = sign e_a
    xi_amb = [Expr.const(0.0)] * ambient
    for c in range(7):
        if c == 6:
            continue
        a, sign = _PAIR_TABLE[(c, 6)]
        xi_amb[a] = xi_amb[a] + Expr.const(float(sign)) * psi[c]
    xi = _pullback_vector(dpsi, conf, xi_amb, chart_dim, ambient)
    eta = _pullback_oneform(dpsi, xi_amb, chart_dim, ambient)
    chart = ChartManifold("s5", n=2, s=1, metric=metric, domain=Domain("ball", radius))
    return WeakMetricFStructureField(
        name="s5", host=chart,
        f=TensorField("ud", f),
        Q=TensorField("ud", _identity_exprs(chart_dim)),
        xi=[TensorField("u", xi)],
        eta=[TensorField("d", eta)])


def scale_structure(S: WeakMetricFStructureField, lam: float) -> WeakMetricFStructureField:
    """f -> lam f and Q -> lam^2 Id + (1 - lam^2) eta (x) xi.

    Defined for single-Reeb structures with Q = Id (the hypersurface shape);
    preserves all structure axioms and the nearly-type condition but breaks
    Q-parallelism on curved charts as soon as lam != 1.
    """
    lam = float(lam)
    if lam <= 0:
        raise InvalidParameter("scaling factor must be positive")
    if S.s != 1:
        raise InvalidParameter("scaling is defined for s = 1 structures")
    probe = S.host.sample_points(np.random.default_rng(1), 4)
    Qvals = S.Q.values(probe)
    if np.abs(Qvals - np.eye(S.dim)).max() > 1e-10:
        raise InvalidParameter("scaling requires Q = Id")
    d = S.dim
    lam2 = lam * lam
    fnew = np.empty((d, d), dtype=object)
    Qnew = np.empty((d, d), dtype=object)
    for a in range(d):
        for b in range(d):
            fnew[a, b] = Expr.const(lam) * S.f.comps[a, b]
            term = Expr.const(1.0 - lam2) * S.xi[0].comps[a] * S.eta[0].comps[b]
            if a == b:
                term = term + Expr.const(lam2)
            Qnew[a, b] = term
    return WeakMetricFStructureField(
        name=f"{S.name}-scaled:lambda={lam!r}", host=S.host,
        f=TensorField("ud", fnew), Q=TensorField("ud", Qnew),
        xi=list(S.xi), eta=list(S.eta))


def perturb_structure(S: WeakMetricFStructureField,
                      eps: float = 0.01) -> WeakMetricFStructureField:
    """Negative control: inject a g-symmetric part eps*(Id - xi (x) eta) into f.

    Breaks skewness of f and, on curved charts, the nearly-type condition by
    an amount of order eps; used to show the tolerances are falsifiable.
    """
    if S.s != 1:
        raise InvalidParameter("perturbation helper expects s = 1")
    d = S.dim
    fnew = np.empty((d, d), dtype=object)
    for a in range(d):
        for b in range(d):
            bump = Expr.const(-eps) * S.xi[0].comps[a] * S.eta[0].comps[b]
            if a == b:
                bump = bump + Expr.const(eps)
            fnew[a, b] = S.f.comps[a, b] + bump
    return WeakMetricFStructureField(
        name=f"{S.name}-perturbed:eps={eps!r}", host=S.host,
        f=TensorField("ud", fnew), Q=S.Q, xi=list(S.xi), eta=list(S.eta))


# Documented rotated pair on R^5: f1 is the standard two-block rotation, f2
# conjugates f1 by a quarter-turn in the (e2, e3) plane.  The anticommutator
# psi = f1 f2 + f2 f1 has eigenvalues {-sqrt(2) x4, 0}, so Q = Id - sin t cos t psi
# stays positive definite for every t in (0, pi/2).
def _default_rotated_pair() -> tuple[np.ndarray, np.ndarray]:
    f1 = np.zeros((5, 5))
    f1[1, 0] = 1.0; f1[0, 1] = -1.0
    f1[3, 2] = 1.0; f1[2, 3] = -1.0
    alpha = math.pi / 4.0
    R = np.eye(5)
    R[1, 1] = R[2, 2] = math.cos(alpha)
    R[1, 2] = -math.sin(alpha)
    R[2, 1] = math.sin(alpha)
    f2 = R @ f1 @ R.T
    return f1, f2


def rotate_two_structures(t: float, f1: np.ndarray | None = None,
                          f2: np.ndarray | None = None) -> WeakMetricFStructureField:
    """Trigonometric mix of two constant structures sharing the Reeb data.

    f = cos(t) f1 + sin(t) f2 with Q derived from f, so f^2 + Q - eta (x) xi
    vanishes bitwise; the closed form Q = Id - sin t cos t (f1 f2 + f2 f1)
    is checked against it to 1e-13 and positive definiteness is enforced.
    """
    t = float(t)
    if not (0.0 <= t < math.pi / 2):
        raise InvalidParameter("t must lie in [0, pi/2)")
    if f1 is None or f2 is None:
        f1, f2 = _default_rotated_pair()
    f1 = np.asarray(f1, dtype=float)
    f2 = np.asarray(f2, dtype=float)
    d = f1.shape[0]
    s = 1
    n = (d - s) // 2
    psi = f1 @ f2 + f2 @ f1
    if np.abs(psi).max() <= 1e-12:
        raise InvalidParameter("the chosen pair anticommutes (psi = 0); "
                               "the mixed structure would not be weak")
    fmat = math.cos(t) * f1 + math.sin(t) * f2
    xivec = np.zeros(d); xivec[d - 1] = 1.0
    Qmat = np.outer(xivec, xivec) - fmat @ fmat
    closed_form = np.eye(d) - math.sin(t) * math.cos(t) * psi
    if np.abs(Qmat - closed_form).max() > 1e-13:
        raise InvalidParameter("derived Q deviates from Id - sin t cos t psi")
    if np.linalg.eigvalsh(Qmat).min() <= 1e-10:
        raise InvalidParameter(f"Q is not positive definite at t={t}")
    chart = ChartManifold(f"rotated(t={t})", n, s, _identity_exprs(d),
                          Domain("box", 1.0))
    return WeakMetricFStructureField(
        name=f"rotated:t={t!r}", host=chart,
        f=constant_field("ud", fmat), Q=constant_field("ud", Qmat),
        xi=[constant_field("u", xivec)], eta=[constant_field("d", xivec)])


def product_with_euclidean(base: WeakMetricFStructureField,
                           s: int) -> WeakMetricFStructureField:
    """Riemannian product of an s = 0 host with flat R^s.

    xi_i = d/dy^i, eta^i = dy^i, f acts as the base f on the base factor and
    kills the Euclidean directions; Q extends by the identity.
    """
    if s < 1:
        raise InvalidParameter("product needs s >= 1")
    if base.s != 0:
        raise InvalidParameter("base must be an s = 0 (Hermitian-type) structure")
    db = base.dim
    d = db + s
    zero = Expr.const(0.0)
    metric = np.empty((d, d), dtype=object)
    fmat = np.empty((d, d), dtype=object)
    Qmat = np.empty((d, d), dtype=object)
    for a in range(d):
        for b in range(d):
            if a < db and b < db:
                metric[a, b] = base.host.metric[a, b]
                fmat[a, b] = base.f.comps[a, b]
                Qmat[a, b] = base.Q.comps[a, b]
            else:
                metric[a, b] = Expr.const(1.0 if a == b else 0.0)
                fmat[a, b] = zero
                Qmat[a, b] = Expr.const(1.0 if a == b else 0.0)
    ximat = np.zeros((s, d))
    for i in range(s):
        ximat[i, db + i] = 1.0
    radius = base.host.domain.radius
    chart = ChartManifold(f"{base.host.name}xR{s}", n=db // 2, s=s,
                          metric=metric, domain=Domain("ball", radius))
    return WeakMetricFStructureField(
        name=f"product-rs:base={base.name},s={s}", host=chart,
        f=TensorField("ud", fmat), Q=TensorField("ud", Qmat),
        xi=[constant_field("u", ximat[i]) for i in range(s)],
        eta=[constant_field("d", ximat[i]) for i in range(s)])


def product_b5_times_nk(lam: float = 1.0) -> WeakMetricFStructureField:
    """Product of the five-sphere structure with a flat scaled-Kahler R^4.

    f acts as lam * f_B on the sphere factor and as the constant J_N with
    J_N^2 = -lam^2 Id on the flat factor; xi and eta lift from the sphere;
    Q = lam^2 Id + (1 - lam^2) eta (x) xi.  For lam = 1 this realizes the
    split shape the classifier is meant to recognize; for lam > 1 the
    Q-parallel condition fails on the curved factor by design.
    """
    lam = float(lam)
    if lam <= 0:
        raise InvalidParameter("lambda must be positive")
    base = s5_nearly_cosymplectic()
    db, dn = 5, 4
    d = db + dn
    lam2 = lam * lam
    zero = Expr.const(0.0)
    metric = np.empty((d, d), dtype=object)
    fmat = np.empty((d, d), dtype=object)
    for a in range(d):
        for b in range(d):
            if a < db and b < db:
                metric[a, b] = base.host.metric[a, b]
                fmat[a, b] = Expr.const(lam) * base.f.comps[a, b]
            elif a >= db and b >= db:
                metric[a, b] = Expr.const(1.0 if a == b else 0.0)
                fmat[a, b] = zero
            else:
                metric[a, b] = zero
                fmat[a, b] = zero
    jn = np.zeros((dn, dn))
    jn[1, 0] = lam; jn[0, 1] = -lam
    jn[3, 2] = lam; jn[2, 3] = -lam
    for a in range(dn):
        for b in range(dn):
            fmat[db + a, db + b] = Expr.const(jn[a, b])
    xic = np.empty(d, dtype=object)
    etac = np.empty(d, dtype=object)
    for a in range(d):
        xic[a] = base.xi[0].comps[a] if a < db else zero
        etac[a] = base.eta[0].comps[a] if a < db else zero
    Qmat = np.empty((d, d), dtype=object)
    for a in range(d):
        for b in range(d):
            term = Expr.const(1.0 - lam2) * xic[a] * etac[b]
            if a == b:
                term = term + Expr.const(lam2)
            Qmat[a, b] = term
    chart = ChartManifold(f"s5xR4(lambda={lam})", n=4, s=1, metric=metric,
                          domain=Domain("ball", 1.5))
    return WeakMetricFStructureField(
        name=f"product-b5-nk:lambda={lam!r}", host=chart,
        f=TensorField("ud", fmat), Q=TensorField("ud", Qmat),
        xi=[TensorField("u", xic)], eta=[TensorField("d", etac)])


# -- registry ------------------------------------------------------------------

@dataclass
class CatalogEntry:
    """A named structure plus its machine-readable expected-property manifest.

    manifest keys:
      constant_fields: residuals of constant-field checks must be exactly 0
      suites: expected outcome per suite ("pass" | "fail" | "n/a"),
              classify maps to a verdict name, fkcontact may be
              "hypothesis-failed"
      entry_overrides: per-identity expected status ("fail" | "skipped");
              anything not listed is expected to pass, and identities gated
              on an expected-fail condition are expected to be skipped
      spectrum: expected clustered Spec(h_i^2) as [[center, multiplicity]..]
    """

    name: str
    params: dict
    structure: WeakMetricFStructureField
    manifest: dict = field(default_factory=dict)


def _manifest(constant_fields=False, classify=None, fkcontact=None,
              spectrum=None, overrides=None, suites=None):
    out = {
        "constant_fields": constant_fields,
        "suites": {"axioms": "pass", "reeb": "pass", "lemmas": "pass",
                   "spectral": "pass", "distributions": "pass"},
        "classify": classify,
        "fkcontact": fkcontact,
        "spectrum": spectrum,
        "entry_overrides": overrides or {},
    }
    if suites:
        out["suites"].update(suites)
    return out


def _parse_params(text: str) -> dict:
    params = {}
    if not text:
        return params
    for chunk in text.split(","):
        if "=" not in chunk:
            raise InvalidParameter(f"malformed parameter {chunk!r}")
        key, value = chunk.split("=", 1)
        params.setdefault(key.strip(), []).append(value.strip())
    return {k: v if len(v) > 1 else v[0] for k, v in params.items()}


def build_entry(name: str) -> CatalogEntry:
    """Resolve a catalog selector like ``s5-scaled:lambda=2`` into an entry."""
    kind, _, rest = name.partition(":")
    params = _parse_params(rest)

    if kind == "flat":
        n = int(params.get("n", 2))
        s = int(params.get("s", 1))
        scales = params.get("scales", ["1"] * n)
        scales = [float(x) for x in np.atleast_1d(scales)]
        S = flat_model(n, s, scales)
        weak = any(abs(x - 1.0) > 0 for x in scales)
        d = 2 * n + s
        return CatalogEntry(S.name, {"n": n, "s": s, "scales": scales}, S, _manifest(
            constant_fields=True, classify="PRODUCT_WITH_RS",
            fkcontact="hypothesis-failed", spectrum=[[0.0, d]]))

    if kind == "s6":
        S = s6_nearly_kahler()
        return CatalogEntry(S.name, {}, S, _manifest(
            suites={"reeb": "n/a", "spectral": "n/a", "distributions": "n/a"},
            classify=None, fkcontact=None))

    if kind == "s5":
        S = s5_nearly_cosymplectic()
        return CatalogEntry(S.name, {}, S, _manifest(
            classify="NO_SPLIT_DETECTED", fkcontact="pass",
            spectrum=[[0.0, 1], [-1.0, 4]]))

    if kind == "s5-scaled":
        lam = float(params.get("lambda", 2))
        S = scale_structure(s5_nearly_cosymplectic(), lam)
        overrides = {}
        if abs(lam - 1.0) > 1e-12:
            overrides["cond.q-parallel"] = "fail"
            overrides["cond.q-parallel-companion"] = "fail"
        return CatalogEntry(S.name, {"lambda": lam}, S, _manifest(
            classify="NO_SPLIT_DETECTED", fkcontact="pass",
            spectrum=[[0.0, 1], [-1.0, 4]], overrides=overrides))

    if kind == "s5-perturbed":
        eps = float(params.get("eps", 0.01))
        S = perturb_structure(s5_nearly_cosymplectic(), eps)
        return CatalogEntry(S.name, {"eps": eps}, S, _manifest(
            suites={"axioms": "fail", "lemmas": "fail",
                    "spectral": "n/a", "distributions": "n/a"},
            overrides={"axiom.f-skew": "fail", "axiom.f-squared": "fail",
                       "axiom.metric-compatibility": "fail",
                       "defn.nearly-c": "fail"}))

    if kind == "rotated":
        t = float(params.get("t", 0.1))
        S = rotate_two_structures(t)
        return CatalogEntry(S.name, {"t": t}, S, _manifest(
            constant_fields=True, classify="PRODUCT_WITH_RS",
            fkcontact="hypothesis-failed", spectrum=[[0.0, 5]]))

    if kind == "product-rs":
        base_name = params.get("base", "s6")
        s = int(params.get("s", 1))
        if base_name == "s6":
            base = s6_nearly_kahler()
            constant = False
        elif base_name == "flatk":
            base = flat_model(2, 0, [2.0, 3.0])
            constant = True
        else:
            raise InvalidParameter(f"unknown product base {base_name!r}")
        S = product_with_euclidean(base, s)
        d = S.dim
        return CatalogEntry(S.name, {"base": base_name, "s": s}, S, _manifest(
            constant_fields=constant, classify="PRODUCT_WITH_RS",
            fkcontact="hypothesis-failed", spectrum=[[0.0, d]]))

    if kind == "product-b5-nk":
        lam = float(params.get("lambda", 1))
        S = product_b5_times_nk(lam)
        overrides = {}
        classify = "B4S_TIMES_NK_CANDIDATE"
        if abs(lam - 1.0) > 1e-12:
            overrides["cond.q-parallel"] = "fail"
            overrides["cond.q-parallel-companion"] = "fail"
            classify = "NO_SPLIT_DETECTED"
        return CatalogEntry(S.name, {"lambda": lam}, S, _manifest(
            classify=classify, fkcontact="hypothesis-failed",
            spectrum=[[0.0, 5], [-1.0, 4]], overrides=overrides))

    raise InvalidParameter(f"unknown catalog entry {name!r}")


DEFAULT_CATALOG = [
    "flat:n=2,s=1,scales=1,1",
    "flat:n=2,s=1,scales=2,3",
    "flat:n=3,s=2,scales=1,4,9",
    "s6",
    "s5",
    "s5-scaled:lambda=2",
    "s5-perturbed",
    "rotated:t=0.1",
    "product-rs:s=1",
    "product-rs:s=2",
    "product-rs:base=flatk,s=1",
    "product-b5-nk:lambda=1",
    "product-b5-nk:lambda=2",
]
