"""Weak metric f-structures as field objects, with residual diagnostics.

A structure is the quintuple (f, Q, xi_1..xi_s, eta^1..eta^s, g) over one
chart; s = 0 hosts (skew f with negative-definite square) are allowed so
that product constructions can consume them.  Everything evaluated here is
exact up to roundoff: fields are expression trees, derivatives come from
order-2 jets, and all residual norms are taken in g-orthonormal frames so
they mean the same thing on curved charts as on flat ones.

The derived tensor h_i = nabla xi_i, the twist Q~ = Q - Id, the fundamental
forms Phi^(k) and the curvature defect

    delta(X,Y,Z,V) = g(R_{X,Y} Q~Z, V) + g(R_{X,Y} Z, Q~V)
                     - g(R_{Q~X,Y} Z, V) - g(R_{X,Q~Y} Z, V)

all live on the per-point :class:`StructureFrame`, which the verification
suites share so each sample point is evaluated once.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError
from .geometry import (ChartManifold, TensorField, _christoffel_arrays,
                       _christoffel_derivative, curvature_batch)
from .jets import seed_points
from .multilinear import PointTensor, cholesky_spd

RANK_REL_THRESHOLD = 1e-8


class ResidualRecord:
    """Ordered named residuals with a single pass/fail verdict."""

    def __init__(self):
        self.entries: list[tuple[str, float]] = []

    def add(self, name: str, value: float) -> None:
        self.entries.append((name, float(value)))

    def merge(self, other: "ResidualRecord") -> "ResidualRecord":
        self.entries.extend(other.entries)
        return self

    def max_residual(self) -> float:
        return max((v for _, v in self.entries), default=0.0)

    def passes(self, tol: float) -> bool:
        return all(v <= tol for _, v in self.entries)

    def as_dict(self) -> dict:
        return dict(self.entries)

    def __getitem__(self, name: str) -> float:
        for k, v in self.entries:
            if k == name:
                return v
        raise KeyError(name)

    def __repr__(self):
        body = ", ".join(f"{k}={v:.3e}" for k, v in self.entries)
        return f"ResidualRecord({body})"


@dataclass
class StructureFrame:
    """All pointwise data the suites need, evaluated once per sample point.

    Index conventions: operators are A[a, b] with A(e_b) = A[a, b] e_a;
    partial arrays carry the derivative axis first (df[c, a, b] = d_c f^a_b);
    nabla arrays likewise (nabla_f[c, a, b] = (nabla_c f)^a_b).  h[i] is
    nabla xi_i with h[i][a, b] = (nabla_b xi_i)^a.
    """

    point: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray
    L: np.ndarray                    # lower Cholesky factor of g
    gamma: np.ndarray
    rop: np.ndarray                  # R(e_i,e_j)e_k = rop[i,j,k,l] e_l
    riem: np.ndarray                 # riem[i,j,k,l] = g(R(e_i,e_j)e_k, e_l)
    ricci: np.ndarray
    f: np.ndarray
    df: np.ndarray
    nabla_f: np.ndarray
    Q: np.ndarray
    dQ: np.ndarray
    nabla_Q: np.ndarray
    xi: np.ndarray                   # (s, d)
    dxi: np.ndarray                  # (s, c, a)
    eta: np.ndarray                  # (s, d)
    deta_partial: np.ndarray         # (s, c, a) = d_c eta_a
    h: np.ndarray                    # (s, d, d)
    dh: np.ndarray                   # (s, c, a, b) = d_c h^a_b
    nabla_h: np.ndarray              # (s, c, a, b)
    dg: np.ndarray                   # (c, i, j)

    @property
    def dim(self) -> int:
        return self.g.shape[0]

    @property
    def s(self) -> int:
        return self.xi.shape[0]

    # -- metric helpers -----------------------------------------------------

    def inner(self, u, v) -> float:
        return float(np.asarray(u) @ self.g @ np.asarray(v))

    def gnorm(self, v) -> float:
        v = np.asarray(v)
        return float(np.sqrt(max(v @ self.g @ v, 0.0)))

    def normalize(self, v) -> np.ndarray:
        n = self.gnorm(v)
        if n < 1e-12:
            raise ShapeError("cannot g-normalize a near-zero vector")
        return np.asarray(v) / n

    def to_gframe(self, A: np.ndarray) -> np.ndarray:
        """Matrix of a (1,1) operator in a g-orthonormal frame."""
        return self.L.T @ A @ np.linalg.inv(self.L).T

    def op_gnorm(self, A: np.ndarray) -> float:
        return float(np.linalg.norm(self.to_gframe(A), 2))

    def bilinear_gnorm(self, B: np.ndarray) -> float:
        Linv = np.linalg.inv(self.L)
        return float(np.linalg.norm(Linv @ B @ Linv.T, 2))

    # -- derived structure tensors -------------------------------------------

    @property
    def Qt(self) -> np.ndarray:
        return self.Q - np.eye(self.dim)

    @property
    def proj_contact(self) -> np.ndarray:
        """Projector onto the contact distribution: Id - sum xi_i (x) eta^i."""
        P = np.eye(self.dim)
        for i in range(self.s):
            P = P - np.outer(self.xi[i], self.eta[i])
        return P

    def fundamental_form(self) -> np.ndarray:
        """Phi(X, Y) = g(X, f Y) as a matrix Phi[a, b]."""
        return self.g @ self.f

    def phi_k(self, i: int, k: int) -> np.ndarray:
        """Phi^(k)_i(X, Y) = g(f h_i^k X, Y)."""
        op = self.f.copy()
        for _ in range(k):
            op = op @ self.h[i]
        return op.T @ self.g

    def phi_1_pair(self, i: int, j: int) -> np.ndarray:
        """Phi^(1)_{i,j}(X, Y) = g(f h_i h_j X, Y)."""
        return (self.f @ self.h[i] @ self.h[j]).T @ self.g

    def deta(self, i: int) -> np.ndarray:
        """(d eta^i)(e_a, e_b) from partial derivatives of the 1-form field."""
        d = self.deta_partial[i]
        return d - d.T

    def curv4(self, X, Y, Z, V) -> float:
        """g(R(X, Y) Z, V)."""
        return float(np.einsum("ijkl,i,j,k,l->", self.riem, X, Y, Z, V))

    def curv_op(self, X, Y, Z) -> np.ndarray:
        """R(X, Y) Z as a vector."""
        return np.einsum("ijkl,i,j,k->l", self.rop, X, Y, Z)

    def delta(self, X, Y, Z, V) -> float:
        """Curvature defect combining Q~-twisted slots; zero whenever Q = Id."""
        Qt = self.Qt
        return (self.curv4(X, Y, Qt @ Z, V) + self.curv4(X, Y, Z, Qt @ V)
                - self.curv4(Qt @ X, Y, Z, V) - self.curv4(X, Qt @ Y, Z, V))

    def nabla_f_dir(self, X) -> np.ndarray:
        """(nabla_X f) as a matrix."""
        return np.einsum("cab,c->ab", self.nabla_f, X)

    def nabla_Q_dir(self, X) -> np.ndarray:
        return np.einsum("cab,c->ab", self.nabla_Q, X)

    def nabla_h_dir(self, i: int, X) -> np.ndarray:
        return np.einsum("cab,c->ab", self.nabla_h[i], X)

    def jacobi_operator(self, i: int) -> np.ndarray:
        """X -> R(X, xi_i) xi_i as a matrix in the chart basis."""
        xi = self.xi[i]
        return np.einsum("ijkl,j,k->li", self.rop, xi, xi)


def _covariant_op(partial, vals, gamma):
    """nabla of a (1,1) field: nabla[c,a,b] = d_c A^a_b + G^a_cm A^m_b - G^m_cb A^a_m."""
    return (partial
            + np.einsum("acm,mb->cab", gamma, vals)
            - np.einsum("mcb,am->cab", gamma, vals))


def build_frames(S: "WeakMetricFStructureField", points: np.ndarray) -> list[StructureFrame]:
    """Evaluate the structure and its geometry at many points in one pass."""
    points = np.asarray(points, dtype=float)
    N, d = points.shape
    m = S.host
    g, dg, d2g = m.metric_jets(points)
    g_inv, gamma = _christoffel_arrays(g, dg)
    dgamma = _christoffel_derivative(g_inv, dg, d2g, gamma)
    rop, riem, ricci = curvature_batch(g, g_inv, gamma, dgamma)

    jets = seed_points(points)
    cache: dict = {}

    def eval_op(fieldmat):
        vals = np.zeros((N, d, d))
        grads = np.zeros((N, d, d, d))
        for a in range(d):
            for b in range(d):
                jet = fieldmat[a, b].evaluate(jets, cache)
                vals[:, a, b] = jet.value
                grads[:, :, a, b] = jet.gradient
        return vals, grads

    def eval_vec(comps):
        vals = np.zeros((N, d))
        grads = np.zeros((N, d, d))
        hess = np.zeros((N, d, d, d))
        for a in range(d):
            jet = comps[a].evaluate(jets, cache)
            vals[:, a] = jet.value
            grads[:, :, a] = jet.gradient
            hess[:, :, :, a] = jet.hessian
        return vals, grads, hess

    fv, dfv = eval_op(S.f.comps)
    Qv, dQv = eval_op(S.Q.comps)
    s = S.s
    xiv = np.zeros((N, s, d)); dxiv = np.zeros((N, s, d, d)); d2xiv = np.zeros((N, s, d, d, d))
    etav = np.zeros((N, s, d)); detav = np.zeros((N, s, d, d))
    for i in range(s):
        v, gr, he = eval_vec(S.xi[i].comps)
        xiv[:, i], dxiv[:, i], d2xiv[:, i] = v, gr, he
        ev = np.zeros((N, d)); egr = np.zeros((N, d, d))
        for a in range(d):
            jet = S.eta[i].comps[a].evaluate(jets, cache)
            ev[:, a] = jet.value
            egr[:, :, a] = jet.gradient
        etav[:, i], detav[:, i] = ev, egr

    frames = []
    for nidx in range(N):
        gm = g[nidx]
        L = cholesky_spd(gm)
        gam = gamma[nidx]
        dgam = dgamma[nidx]
        nabla_f = _covariant_op(dfv[nidx], fv[nidx], gam)
        nabla_Q = _covariant_op(dQv[nidx], Qv[nidx], gam)
        h = np.zeros((s, d, d)); dh = np.zeros((s, d, d, d)); nabla_h = np.zeros((s, d, d, d))
        for i in range(s):
            # h^a_b = d_b xi^a + G^a_bm xi^m
            h[i] = dxiv[nidx, i].T + np.einsum("abm,m->ab", gam, xiv[nidx, i])
            # d_c h^a_b = d_c d_b xi^a + d_c G^a_bm xi^m + G^a_bm d_c xi^m
            dh_i = (np.einsum("cba->cab", d2xiv[nidx, i])
                    + np.einsum("cabm,m->cab", dgam, xiv[nidx, i])
                    + np.einsum("abm,cm->cab", gam, dxiv[nidx, i]))
            dh[i] = dh_i
            nabla_h[i] = _covariant_op(dh_i, h[i], gam)
        frames.append(StructureFrame(
            point=points[nidx], g=gm, g_inv=g_inv[nidx], L=L, gamma=gam,
            rop=rop[nidx], riem=riem[nidx], ricci=ricci[nidx],
            f=fv[nidx], df=dfv[nidx], nabla_f=nabla_f,
            Q=Qv[nidx], dQ=dQv[nidx], nabla_Q=nabla_Q,
            xi=xiv[nidx], dxi=dxiv[nidx], eta=etav[nidx],
            deta_partial=detav[nidx], h=h, dh=dh, nabla_h=nabla_h,
            dg=dg[nidx]))
    return frames


class WeakMetricFStructureField:
    """The structure quintuple as smooth fields over one chart."""

    def __init__(self, name: str, host: ChartManifold, f: TensorField,
                 Q: TensorField, xi: list[TensorField], eta: list[TensorField]):
        if f.variance != "ud" or Q.variance != "ud":
            raise ShapeError("f and Q must be (1,1) tensor fields")
        if len(xi) != len(eta):
            raise ShapeError("need as many eta as xi")
        if len(xi) != host.s:
            raise ShapeError(f"host has s={host.s} but {len(xi)} Reeb fields given")
        for v in xi:
            if v.variance != "u":
                raise ShapeError("xi entries must be vector fields")
        for w in eta:
            if w.variance != "d":
                raise ShapeError("eta entries must be 1-form fields")
        self.name = name
        self.host = host
        self.f = f
        self.Q = Q
        self.xi = list(xi)
        self.eta = list(eta)

    @property
    def dim(self) -> int:
        return self.host.dim

    @property
    def n(self) -> int:
        return self.host.n

    @property
    def s(self) -> int:
        return self.host.s

    def frame(self, p: np.ndarray) -> StructureFrame:
        return build_frames(self, np.asarray(p, dtype=float)[None, :])[0]

    def frames(self, points: np.ndarray) -> list[StructureFrame]:
        return build_frames(self, points)

    # -- pointwise diagnostics ---------------------------------------------

    def validate_axioms(self, p: np.ndarray) -> ResidualRecord:
        return axiom_residuals(self.frame(p), self.n, self.s)

    def reeb_conditions(self, p: np.ndarray,
                        sample_vectors: np.ndarray | None = None) -> ResidualRecord:
        return reeb_residuals(self.frame(p))

    def nearly_c_residual(self, p: np.ndarray, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        fr = self.frame(p)
        return nearly_c_vector(fr, np.asarray(X, float), np.asarray(Y, float))

    def h_tensor(self, i: int, p: np.ndarray) -> tuple[PointTensor, float]:
        fr = self.frame(p)
        M = fr.g @ fr.h[i]
        skew = float(np.abs(M + M.T).max())
        return PointTensor("ud", fr.h[i], fr.point), skew

    def delta_tensor(self, p: np.ndarray, X, Y, Z, V) -> float:
        return self.frame(p).delta(np.asarray(X, float), np.asarray(Y, float),
                                   np.asarray(Z, float), np.asarray(V, float))

    def q_parallel_residual(self, p: np.ndarray, X, Y) -> ResidualRecord:
        return q_parallel_record(self.frame(p), np.asarray(X, float),
                                 np.asarray(Y, float))

    def curvature_invariance_residual(self, p: np.ndarray, X, Y, Z) -> ResidualRecord:
        return curvature_invariance_record(self.frame(p), np.asarray(X, float),
                                           np.asarray(Y, float), np.asarray(Z, float))


# -- frame-level residual builders (shared with the verification suites) ------

def axiom_residuals(fr: StructureFrame, n: int, s: int) -> ResidualRecord:
    rec = ResidualRecord()
    d = fr.dim
    gf = fr.g @ fr.f
    rec.add("axiom.f-skew", np.abs(gf + gf.T).max())
    gQ = fr.g @ fr.Q
    rec.add("axiom.q-selfadjoint", np.abs(gQ - gQ.T).max())
    B = fr.to_gframe(fr.Q)
    sv = np.linalg.svd(B, compute_uv=False)
    rec.add("axiom.q-nonsingular", 0.0 if sv[-1] > 1e-8 * max(1.0, sv[0]) else 1.0)
    Bf = fr.to_gframe(fr.f)
    fsv = np.linalg.svd(Bf, compute_uv=False)
    rank = int(np.sum(fsv > RANK_REL_THRESHOLD * max(fsv[0], 1e-30)))
    rec.add("axiom.f-rank", float(abs(rank - 2 * n)))
    outer = sum(np.outer(fr.xi[i], fr.eta[i]) for i in range(s)) if s else 0.0
    rec.add("axiom.f-squared", np.abs(fr.f @ fr.f + fr.Q - outer).max())
    if s:
        duality = np.array([[fr.eta[i] @ fr.xi[j] for j in range(s)] for i in range(s)])
        rec.add("axiom.eta-xi-duality", np.abs(duality - np.eye(s)).max())
        rec.add("axiom.q-fixes-xi",
                max(np.abs(fr.Q @ fr.xi[i] - fr.xi[i]).max() for i in range(s)))
    lhs22 = fr.f.T @ fr.g @ fr.f
    rhs22 = fr.g @ fr.Q
    if s:
        rhs22 = rhs22 - sum(np.outer(fr.eta[i], fr.eta[i]) for i in range(s))
    rec.add("axiom.metric-compatibility", np.abs(lhs22 - rhs22).max())
    if s:
        rec.add("axiom.eta-metric-dual",
                max(np.abs(fr.eta[i] - fr.g @ fr.xi[i]).max() for i in range(s)))
        gram = np.array([[fr.inner(fr.xi[i], fr.xi[j]) for j in range(s)] for i in range(s)])
        rec.add("axiom.xi-orthonormal", np.abs(gram - np.eye(s)).max())
        rec.add("axiom.f-kills-xi",
                max(np.abs(fr.f @ fr.xi[i]).max() for i in range(s)))
        rec.add("axiom.eta-kills-f",
                max(np.abs(fr.eta[i] @ fr.f).max() for i in range(s)))
        rec.add("axiom.eta-q-invariant",
                max(np.abs(fr.eta[i] @ fr.Q - fr.eta[i]).max() for i in range(s)))
    rec.add("axiom.qf-commute", np.abs(fr.Q @ fr.f - fr.f @ fr.Q).max())
    if s:
        P = fr.proj_contact
        rec.add("axiom.proj-idempotent", np.abs(P @ P - P).max())
    return rec


def reeb_residuals(fr: StructureFrame) -> ResidualRecord:
    rec = ResidualRecord()
    s, d = fr.s, fr.dim
    if s == 0:
        return rec
    bracket = 0.0
    for i in range(s):
        for j in range(s):
            lie = (np.einsum("c,ca->a", fr.xi[i], fr.dxi[j])
                   - np.einsum("c,ca->a", fr.xi[j], fr.dxi[i]))
            bracket = max(bracket, fr.gnorm(lie))
    rec.add("cond.reeb-bracket", bracket)
    Linv_T = np.linalg.inv(fr.L).T
    mixed = 0.0
    for i in range(s):
        Bh = fr.L.T @ fr.h[i] @ Linv_T
        for j in range(s):
            w = fr.L.T @ fr.xi[j]
            mixed = max(mixed, np.abs(w @ Bh).max())
    rec.add("cond.reeb-mixed", mixed)
    vertical = 0.0
    for i in range(s):
        for j in range(s):
            v = fr.h[j] @ fr.xi[i]          # nabla_{xi_i} xi_j
            for k in range(s):
                vertical = max(vertical, abs(fr.eta[k] @ v))
    rec.add("cond.reeb-vertical", vertical)
    return rec


def nearly_c_vector(fr: StructureFrame, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    return fr.nabla_f_dir(X) @ Y + fr.nabla_f_dir(Y) @ X


def q_parallel_record(fr: StructureFrame, X: np.ndarray, Y: np.ndarray) -> ResidualRecord:
    rec = ResidualRecord()
    P = fr.proj_contact
    Yd = P @ Y
    rec.add("cond.q-parallel", fr.gnorm(fr.nabla_Q_dir(X) @ Yd))
    companion = fr.nabla_Q_dir(X) @ Y
    for i in range(fr.s):
        companion = companion + (fr.eta[i] @ Y) * (fr.Qt @ (fr.h[i] @ X))
    rec.add("cond.q-parallel-companion", fr.gnorm(companion))
    return rec


def curvature_invariance_record(fr: StructureFrame, X, Y, Z) -> ResidualRecord:
    rec = ResidualRecord()
    P = fr.proj_contact
    Xd, Yd, Zd = P @ X, P @ Y, P @ Z
    weak = fr.curv_op(fr.Qt @ Xd, Yd, Zd)
    rec.add("cond.curv-invariance",
            sum(abs(fr.eta[i] @ weak) for i in range(fr.s)) if fr.s else 0.0)
    classical = fr.curv_op(Xd, Yd, Zd)
    rec.add("diag.curv-invariance-classical",
            sum(abs(fr.eta[i] @ classical) for i in range(fr.s)) if fr.s else 0.0)
    xiff = 0.0
    for j in range(fr.s):
        xiff = max(xiff, abs(fr.curv4(fr.xi[j], Zd, fr.f @ Xd, fr.f @ Yd)))
    rec.add("diag.curv-reeb-ff", xiff)
    return rec
