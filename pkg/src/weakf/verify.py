"""Verification suites: identity residuals, spectra, splittings, reconstructions.

Every identity in the registry maps to exactly one formula string (the
traceability table in the README mirrors :data:`FORMULAS`).  Identities whose
hypotheses fail on a given structure are reported SKIPPED with the failing
condition named, never silently passed: the scaled catalog entries exist
precisely to exercise that path.

All residual norms are taken in g-orthonormal frames.  Vector draws are
normalized standard Gaussians in the chart basis, g-normalized, and projected
onto the contact distribution where an identity requires it.  A fixed seed
makes every run reproducible.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field, asdict

import numpy as np

from .errors import AmbiguousSpectrum, HypothesisFailed, ShapeError
from .fstructure import (StructureFrame, WeakMetricFStructureField,
                         axiom_residuals, build_frames, nearly_c_vector)
from .multilinear import KForm, check_cluster_gaps, lefschetz_rank, sym_eigen

DISCLAIMER = ("verdicts summarize local numerical evidence at sampled points; "
              "they are not certificates of a global isometric splitting")


@dataclass
class Tolerances:
    """All tunable thresholds; override via CLI --tol name=value."""

    axioms: float = 1e-10
    connection: float = 1e-10
    identity: float = 1e-7
    gate: float = 1e-7
    cluster: float = 1e-6
    drift: float = 1e-6
    diagnostics: float = 1e-7
    hnorm: float = 1e-9
    fkcontact: float = 1e-6
    oracle: float = 1e-5
    oracle_step: float = 1e-4
    rank_rel: float = 1e-8

    def as_dict(self) -> dict:
        return asdict(self)

    def override(self, name: str, value: float) -> None:
        if not hasattr(self, name):
            raise KeyError(f"unknown tolerance {name!r}")
        if value <= 0:
            raise ValueError(f"tolerance {name} must be positive")
        setattr(self, name, float(value))


PASS, FAIL, SKIPPED = "PASS", "FAIL", "SKIPPED"


@dataclass
class Entry:
    """One identity's outcome over all samples."""

    id: str
    formula: str
    residual: float | None
    samples: int
    status: str
    reason: str = ""

    def to_dict(self) -> dict:
        return {"id": self.id, "formula": self.formula,
                "residual": self.residual, "samples": self.samples,
                "status": self.status, "reason": self.reason}


@dataclass
class SuiteReport:
    structure: str
    suite: str
    seed: int
    tolerances: dict
    entries: list = field(default_factory=list)
    wall_time_s: float = 0.0
    convention: str = ""

    def entry(self, eid: str) -> Entry:
        for e in self.entries:
            if e.id == eid:
                return e
        raise KeyError(eid)

    def passed(self) -> bool:
        return all(e.status != FAIL for e in self.entries)

    def to_dict(self) -> dict:
        return {"structure": self.structure, "suite": self.suite,
                "seed": self.seed, "tolerances": self.tolerances,
                "entries": [e.to_dict() for e in self.entries],
                "convention": self.convention}


FORMULAS = {
    # structural conditions (gates)
    "cond.reeb-bracket": "[xi_i, xi_j] = 0",
    "cond.reeb-mixed": "g(nabla_X xi_i, xi_j) = 0",
    "cond.reeb-vertical": "eta^k(nabla_{xi_i} xi_j) = 0",
    "cond.q-parallel": "(nabla_X Q) Y = 0  (Y in D)",
    "cond.q-parallel-companion":
        "(nabla_X Q) Y = - sum_i eta^i(Y) (Q - Id) nabla_X xi_i",
    "cond.curv-invariance": "R_{(Q-Id)X, Y} Z in D  (X,Y,Z in D)",
    "diag.curv-invariance-classical": "R_{X,Y} Z in D  (X,Y,Z in D)",
    "diag.curv-reeb-ff": "g(R_{xi_j, Z} f X, f Y) = 0",
    # defining condition
    "defn.nearly-c": "(nabla_X f) Y + (nabla_Y f) X = 0",
    # first derived block
    "lemma.dh-reeb": "(nabla_X h_i) xi_j = - h_i h_j X",
    "lemma.df-reeb": "(nabla_X f) xi_i = - f h_i X",
    "lemma.hf-anticommute": "h_i f + f h_i = 0",
    "lemma.hq-commute": "h_i Q = Q h_i",
    # gradient-of-f exchange rules
    "lemma.grad-f-swap-inner":
        "g((nabla_X f) f Y, Z) = g((nabla_X f) Y, f Z)"
        " + sum_i [eta^i(Y) g(h_i X, Z) + eta^i(Z) g(h_i X, Q Y)]",
    "lemma.grad-f-swap-direction":
        "g((nabla_{fX} f) Y, Z) = g((nabla_X f) Y, f Z)"
        " + sum_i [eta^i(X) g(h_i Z, Y) + eta^i(Z) g(h_i X, Q Y)]",
    "lemma.grad-f-double-swap":
        "g((nabla_{fX} f) f Y, Z) = g((nabla_X f) Q Z, Y)"
        " + sum_i [eta^i(X) g(h_i Z, f Y) + eta^i(Y) g(h_i X, f Z)"
        " - eta^i(Z) g(f h_i X, (Q - Id) Y)]",
    # curvature identities
    "lemma.curv-f-cyclic":
        "g(R_{fX,Y}Z,V) + g(R_{X,fY}Z,V) + g(R_{X,Y}fZ,V) + g(R_{X,Y}Z,fV) = 0",
    "lemma.curv-reeb-pairs": "R_{xi_j, xi_k} = 0",
    "lemma.curv-reeb-ff": "g(R_{xi_j, Z} f X, f Y) = 0",
    "lemma.curv-reeb-dh": "R_{xi_i, X} Y = -(nabla_X h_i) Y",
    "lemma.dh-structure":
        "(nabla_X h_i) Y = sum_j [g(h_i h_j X, Y) xi_j - eta^j(Y) h_i h_j X]",
    "lemma.ricci-reeb": "Ric(xi_i, Z) = - sum_j eta^j(Z) tr(h_i h_j)",
    "lemma.h-parallel-reeb": "nabla_{xi_j} h_i = 0",
    "lemma.h-trace-constant": "tr(h_i^2) = const",
    "lemma.curv-ff-delta":
        "g(R_{fX,fY}Z,V) = g(R_{X,Y}fZ,fV) - 1/2 delta(X,Y,Z,V)",
    "lemma.curv-ffff-delta":
        "g(R_{fX,fY}fZ,fV) = g(R_{QX,QY}Z,V) + 1/2 delta(fX,fY,Z,V)"
        " + sum_i [eta^i(Y) g(R_{xi_i,QX}Z,V) - eta^i(X) g(R_{xi_i,QY}Z,V)]",
    "lemma.delta-symmetries":
        "delta(Y,X,Z,V) = delta(X,Y,V,Z) = delta(Z,V,X,Y) = -delta(X,Y,Z,V)",
    "lemma.delta-reeb-slots":
        "delta vanishes when any slot is xi_i",
    "diag.delta-f-reeb-slot": "delta(f X, f Y, Z, xi_j) = 0",
    "lemma.h-commute": "[h_i, h_j] = 0",
    "lemma.hh-selfadjoint": "h_i h_j is g-self-adjoint",
    "lemma.grad-f-h-pairing":
        "g((nabla_X f) Y, f h_j Z)"
        " = sum_i [eta^i(X) g(h_j Y, h_i Z) - eta^i(Y) g(h_j X, h_i Z)]",
    "lemma.deta-h": "d eta^i(X, Y) = 2 g(h_i X, Y)",
    "lemma.dphi0-law": "d Phi0 = 3 sum_j eta^j wedge Phi1_j",
    "lemma.dphi1-law": "d Phi1_i = 3 sum_j eta^j wedge Phi1_{i,j}",
    "lemma.deta-phi-sum": "sum_j d eta^j wedge Phi1_j = 0",
    # geometry-level invariants used by the axioms suite
    "geom.metricity": "nabla g = 0",
    "geom.riemann-symmetry": "pair symmetries of the curvature tensor",
    "geom.bianchi": "first Bianchi identity",
    "geom.d-squared-eta": "d(d eta^i) = 0",
}

REEB_GATES = ("cond.reeb-bracket", "cond.reeb-mixed")
FOUR_GATES = REEB_GATES + ("cond.q-parallel", "cond.curv-invariance")

GATES = {
    "lemma.grad-f-swap-inner": ("cond.q-parallel",),
    "lemma.grad-f-swap-direction": ("cond.q-parallel",),
    "lemma.grad-f-double-swap": ("cond.q-parallel",),
    "lemma.curv-reeb-pairs": ("cond.q-parallel", "cond.curv-invariance"),
    "lemma.curv-reeb-ff": ("cond.q-parallel", "cond.curv-invariance"),
    "lemma.curv-reeb-dh": FOUR_GATES,
    "lemma.dh-structure": FOUR_GATES,
    "lemma.ricci-reeb": FOUR_GATES,
    "lemma.h-parallel-reeb": FOUR_GATES,
    "lemma.h-trace-constant": FOUR_GATES,
    "lemma.curv-ff-delta": FOUR_GATES,
    "lemma.curv-ffff-delta": FOUR_GATES,
    "lemma.delta-reeb-slots": ("cond.q-parallel", "cond.curv-invariance"),
    "diag.delta-f-reeb-slot": ("cond.q-parallel", "cond.curv-invariance"),
    "lemma.h-commute": FOUR_GATES,
    "lemma.hh-selfadjoint": FOUR_GATES,
    "lemma.grad-f-h-pairing": FOUR_GATES,
    "lemma.dphi0-law": FOUR_GATES,
    "lemma.dphi1-law": FOUR_GATES,
    "lemma.deta-phi-sum": FOUR_GATES,
}


def _draw_vectors(rng: np.random.Generator, n_points: int, n_vectors: int,
                  d: int) -> np.ndarray:
    return rng.standard_normal((n_points, n_vectors, 4, d))


def _gunit(fr: StructureFrame, v: np.ndarray) -> np.ndarray:
    return v / fr.gnorm(v)


def _project_d(fr: StructureFrame, v: np.ndarray) -> np.ndarray | None:
    w = fr.proj_contact @ v
    n = fr.gnorm(w)
    if n < 1e-6:
        return None
    return w / n


def _wedge22(A: np.ndarray, B: np.ndarray, vs) -> float:
    """(alpha ^ beta)(v0..v3) for 2-forms given as matrices, shuffle convention."""
    def a(i, j):
        return float(vs[i] @ A @ vs[j])

    def b(i, j):
        return float(vs[i] @ B @ vs[j])

    return (a(0, 1) * b(2, 3) - a(0, 2) * b(1, 3) + a(0, 3) * b(1, 2)
            + b(0, 1) * a(2, 3) - b(0, 2) * a(1, 3) + b(0, 3) * a(1, 2))


def _wedge12(eta: np.ndarray, B: np.ndarray, vs) -> float:
    """(eta ^ beta)(v0, v1, v2) for a 1-form eta and 2-form matrix B."""
    def e(i):
        return float(eta @ vs[i])

    def b(i, j):
        return float(vs[i] @ B @ vs[j])

    return e(0) * b(1, 2) - e(1) * b(0, 2) + e(2) * b(0, 1)


# -- condition evaluation -------------------------------------------------------

def evaluate_conditions(frames: list[StructureFrame], draws: np.ndarray) -> dict:
    """Max residual of each structural condition over all points and draws."""
    out = {k: 0.0 for k in ("cond.reeb-bracket", "cond.reeb-mixed",
                            "cond.reeb-vertical", "cond.q-parallel",
                            "cond.q-parallel-companion", "cond.curv-invariance",
                            "diag.curv-invariance-classical", "diag.curv-reeb-ff")}
    for pidx, fr in enumerate(frames):
        s = fr.s
        if s == 0:
            continue
        Linv_T = np.linalg.inv(fr.L).T
        for i in range(s):
            for j in range(s):
                lie = (np.einsum("c,ca->a", fr.xi[i], fr.dxi[j])
                       - np.einsum("c,ca->a", fr.xi[j], fr.dxi[i]))
                out["cond.reeb-bracket"] = max(out["cond.reeb-bracket"], fr.gnorm(lie))
                w = fr.L.T @ fr.xi[j]
                Bh = fr.L.T @ fr.h[i] @ Linv_T
                out["cond.reeb-mixed"] = max(out["cond.reeb-mixed"],
                                             float(np.abs(w @ Bh).max()))
                v = fr.h[j] @ fr.xi[i]
                for k in range(s):
                    out["cond.reeb-vertical"] = max(out["cond.reeb-vertical"],
                                                    abs(fr.eta[k] @ v))
        P = fr.proj_contact
        Qt = fr.Qt
        for X, Y, Z, V in draws[pidx]:
            X = _gunit(fr, X); Y = _gunit(fr, Y); Z = _gunit(fr, Z)
            Xd = _project_d(fr, X); Yd = _project_d(fr, Y); Zd = _project_d(fr, Z)
            if Yd is not None:
                out["cond.q-parallel"] = max(
                    out["cond.q-parallel"], fr.gnorm(fr.nabla_Q_dir(X) @ Yd))
            companion = fr.nabla_Q_dir(X) @ Y
            for i in range(s):
                companion = companion + (fr.eta[i] @ Y) * (Qt @ (fr.h[i] @ X))
            out["cond.q-parallel-companion"] = max(
                out["cond.q-parallel-companion"], fr.gnorm(companion))
            if Xd is not None and Yd is not None and Zd is not None:
                weak = fr.curv_op(Qt @ Xd, Yd, Zd)
                out["cond.curv-invariance"] = max(
                    out["cond.curv-invariance"],
                    sum(abs(fr.eta[i] @ weak) for i in range(s)))
                classical = fr.curv_op(Xd, Yd, Zd)
                out["diag.curv-invariance-classical"] = max(
                    out["diag.curv-invariance-classical"],
                    sum(abs(fr.eta[i] @ classical) for i in range(s)))
                for j in range(s):
                    out["diag.curv-reeb-ff"] = max(
                        out["diag.curv-reeb-ff"],
                        abs(fr.curv4(fr.xi[j], Zd, fr.f @ Xd, fr.f @ Yd)))
    return out


# -- identity evaluation --------------------------------------------------------

def _nearly_c_max(fr: StructureFrame, vectors) -> float:
    worst = 0.0
    for X, Y, _, _ in vectors:
        X = _gunit(fr, X); Y = _gunit(fr, Y)
        worst = max(worst, fr.gnorm(nearly_c_vector(fr, X, Y)))
    # deterministic coverage: pairs from a g-orthonormal frame
    basis = np.linalg.inv(fr.L).T  # columns are g-orthonormal
    cols = [basis[:, a] for a in range(fr.dim)]
    for a in range(fr.dim):
        for b in range(a, fr.dim):
            worst = max(worst, fr.gnorm(nearly_c_vector(fr, cols[a], cols[b])))
    return worst


def evaluate_identities(frames: list[StructureFrame], draws: np.ndarray) -> dict:
    """Max residual per identity id over all points, draws and Reeb indices."""
    res: dict[str, float] = {}

    def bump(key, value):
        res[key] = max(res.get(key, 0.0), float(value))

    tr_ref = None
    for pidx, fr in enumerate(frames):
        s, d = fr.s, fr.dim
        vectors = [tuple(_gunit(fr, v) for v in quad) for quad in draws[pidx]]
        bump("defn.nearly-c", _nearly_c_max(fr, draws[pidx]))
        if s == 0:
            for X, Y, Z, V in vectors:
                lhs = (fr.curv4(fr.f @ X, Y, Z, V) + fr.curv4(X, fr.f @ Y, Z, V)
                       + fr.curv4(X, Y, fr.f @ Z, V) + fr.curv4(X, Y, Z, fr.f @ V))
                bump("lemma.curv-f-cyclic", abs(lhs))
                bump("lemma.delta-symmetries", _delta_symmetry_residual(fr, X, Y, Z, V))
            continue

        hh = [[fr.h[i] @ fr.h[j] for j in range(s)] for i in range(s)]
        phi1 = [(fr.f @ fr.h[j]).T @ fr.g for j in range(s)]
        for i in range(s):
            bump("lemma.hf-anticommute", fr.op_gnorm(fr.h[i] @ fr.f + fr.f @ fr.h[i]))
            bump("lemma.hq-commute", fr.op_gnorm(fr.h[i] @ fr.Q - fr.Q @ fr.h[i]))
            M = fr.deta(i) - 2.0 * (fr.g @ fr.h[i]).T
            bump("lemma.deta-h", fr.bilinear_gnorm(M))
            for j in range(s):
                bump("lemma.h-parallel-reeb",
                     fr.op_gnorm(fr.nabla_h_dir(i, fr.xi[j])))
                bump("lemma.h-commute", fr.op_gnorm(hh[i][j] - hh[j][i]))
                Msa = fr.g @ hh[i][j]
                bump("lemma.hh-selfadjoint", float(np.abs(Msa - Msa.T).max()))
                opRxi = np.einsum("abkl,a,b->lk", fr.rop, fr.xi[j], fr.xi[i])
                bump("lemma.curv-reeb-pairs", fr.op_gnorm(opRxi))

        traces = np.array([np.trace(hh[i][i]) for i in range(s)])
        if tr_ref is None:
            tr_ref = traces
        bump("lemma.h-trace-constant", np.abs(traces - tr_ref).max())

        for X, Y, Z, V in vectors:
            for i in range(s):
                for j in range(s):
                    bump("lemma.dh-reeb",
                         fr.gnorm(fr.nabla_h_dir(i, X) @ fr.xi[j] + hh[i][j] @ X))
                bump("lemma.df-reeb",
                     fr.gnorm(fr.nabla_f_dir(X) @ fr.xi[i] + fr.f @ (fr.h[i] @ X)))
                rhs = np.zeros(d)
                for j in range(s):
                    rhs = rhs + fr.inner(hh[i][j] @ X, Y) * fr.xi[j] \
                        - (fr.eta[j] @ Y) * (hh[i][j] @ X)
                bump("lemma.dh-structure",
                     fr.gnorm(fr.nabla_h_dir(i, X) @ Y - rhs))
                bump("lemma.curv-reeb-dh",
                     fr.gnorm(fr.curv_op(fr.xi[i], X, Y) + fr.nabla_h_dir(i, X) @ Y))
                ric = float(np.einsum("jk,j,k->", fr.ricci, fr.xi[i], Z))
                ric_rhs = -sum((fr.eta[j] @ Z) * np.trace(hh[i][j]) for j in range(s))
                bump("lemma.ricci-reeb", abs(ric - ric_rhs))
                bump("lemma.curv-reeb-ff",
                     abs(fr.curv4(fr.xi[i], Z, fr.f @ X, fr.f @ Y)))
                bump("diag.delta-f-reeb-slot",
                     abs(fr.delta(fr.f @ X, fr.f @ Y, Z, fr.xi[i])))
                bump("lemma.delta-reeb-slots",
                     max(abs(fr.delta(fr.xi[i], Y, Z, V)),
                         abs(fr.delta(X, fr.xi[i], Z, V)),
                         abs(fr.delta(X, Y, fr.xi[i], V)),
                         abs(fr.delta(X, Y, Z, fr.xi[i]))))

            nfX = fr.nabla_f_dir(X)
            nfY = fr.nabla_f_dir(Y)
            nf_fX = fr.nabla_f_dir(fr.f @ X)
            eta_vals = [(fr.eta[i] @ X, fr.eta[i] @ Y, fr.eta[i] @ Z) for i in range(s)]

            lhs = fr.inner(nfX @ (fr.f @ Y), Z)
            rhs = fr.inner(nfX @ Y, fr.f @ Z)
            for i in range(s):
                ex, ey, ez = eta_vals[i]
                rhs += ey * fr.inner(fr.h[i] @ X, Z) + ez * fr.inner(fr.h[i] @ X, fr.Q @ Y)
            bump("lemma.grad-f-swap-inner", abs(lhs - rhs))

            lhs = fr.inner(nf_fX @ Y, Z)
            rhs = fr.inner(nfX @ Y, fr.f @ Z)
            for i in range(s):
                ex, ey, ez = eta_vals[i]
                rhs += ex * fr.inner(fr.h[i] @ Z, Y) + ez * fr.inner(fr.h[i] @ X, fr.Q @ Y)
            bump("lemma.grad-f-swap-direction", abs(lhs - rhs))

            lhs = fr.inner(nf_fX @ (fr.f @ Y), Z)
            rhs = fr.inner(nfX @ (fr.Q @ Z), Y)
            for i in range(s):
                ex, ey, ez = eta_vals[i]
                rhs += (ex * fr.inner(fr.h[i] @ Z, fr.f @ Y)
                        + ey * fr.inner(fr.h[i] @ X, fr.f @ Z)
                        - ez * fr.inner(fr.f @ (fr.h[i] @ X), fr.Qt @ Y))
            bump("lemma.grad-f-double-swap", abs(lhs - rhs))

            lhs = (fr.curv4(fr.f @ X, Y, Z, V) + fr.curv4(X, fr.f @ Y, Z, V)
                   + fr.curv4(X, Y, fr.f @ Z, V) + fr.curv4(X, Y, Z, fr.f @ V))
            bump("lemma.curv-f-cyclic", abs(lhs))

            bump("lemma.delta-symmetries", _delta_symmetry_residual(fr, X, Y, Z, V))

            lhs = fr.curv4(fr.f @ X, fr.f @ Y, Z, V)
            rhs = fr.curv4(X, Y, fr.f @ Z, fr.f @ V) - 0.5 * fr.delta(X, Y, Z, V)
            bump("lemma.curv-ff-delta", abs(lhs - rhs))

            lhs = fr.curv4(fr.f @ X, fr.f @ Y, fr.f @ Z, fr.f @ V)
            rhs = (fr.curv4(fr.Q @ X, fr.Q @ Y, Z, V)
                   + 0.5 * fr.delta(fr.f @ X, fr.f @ Y, Z, V))
            for i in range(s):
                rhs += ((fr.eta[i] @ Y) * fr.curv4(fr.xi[i], fr.Q @ X, Z, V)
                        - (fr.eta[i] @ X) * fr.curv4(fr.xi[i], fr.Q @ Y, Z, V))
            bump("lemma.curv-ffff-delta", abs(lhs - rhs))

            for j in range(s):
                lhs = fr.inner(nfX @ Y, fr.f @ (fr.h[j] @ Z))
                rhs = 0.0
                for i in range(s):
                    rhs += ((fr.eta[i] @ X) * fr.inner(fr.h[j] @ Y, fr.h[i] @ Z)
                            - (fr.eta[i] @ Y) * fr.inner(fr.h[j] @ X, fr.h[i] @ Z))
                bump("lemma.grad-f-h-pairing", abs(lhs - rhs))

            # dPhi0 = 3 sum eta^j ^ Phi1_j on the sampled triple (X, Y, Z)
            lhs = (fr.inner(nfX @ Y, Z) + fr.inner(nfY @ Z, X)
                   + fr.inner(fr.nabla_f_dir(Z) @ X, Y))
            rhs = 3.0 * sum(_wedge12(fr.eta[j], phi1[j], (X, Y, Z)) for j in range(s))
            bump("lemma.dphi0-law", abs(lhs - rhs))

            # dPhi1_i = 3 sum_j eta^j ^ Phi1_{i,j} on the sampled triple
            for i in range(s):
                def nabla_phi1(W, A, B):
                    op = fr.nabla_f_dir(W) @ fr.h[i] + fr.f @ fr.nabla_h_dir(i, W)
                    return fr.inner(op @ A, B)
                lhs = (nabla_phi1(X, Y, Z) + nabla_phi1(Y, Z, X)
                       + nabla_phi1(Z, X, Y))
                rhs = 0.0
                for j in range(s):
                    phi_ij = (fr.f @ hh[i][j]).T @ fr.g
                    rhs += 3.0 * _wedge12(fr.eta[j], phi_ij, (X, Y, Z))
                bump("lemma.dphi1-law", abs(lhs - rhs))

            total = sum(_wedge22(fr.deta(j), phi1[j], (X, Y, Z, V)) for j in range(s))
            bump("lemma.deta-phi-sum", abs(total))

    return res


def _delta_symmetry_residual(fr: StructureFrame, X, Y, Z, V) -> float:
    base = fr.delta(X, Y, Z, V)
    return max(abs(fr.delta(Y, X, Z, V) + base),
               abs(fr.delta(X, Y, V, Z) + base),
               abs(fr.delta(Z, V, X, Y) + base))


LEMMA_ORDER = [
    "defn.nearly-c",
    "lemma.dh-reeb", "lemma.df-reeb", "lemma.hf-anticommute", "lemma.hq-commute",
    "lemma.grad-f-swap-inner", "lemma.grad-f-swap-direction",
    "lemma.grad-f-double-swap",
    "lemma.curv-f-cyclic",
    "lemma.curv-reeb-pairs", "lemma.curv-reeb-ff",
    "lemma.curv-reeb-dh", "lemma.dh-structure", "lemma.ricci-reeb",
    "lemma.h-parallel-reeb", "lemma.h-trace-constant",
    "lemma.curv-ff-delta", "lemma.curv-ffff-delta",
    "lemma.delta-symmetries", "lemma.delta-reeb-slots", "diag.delta-f-reeb-slot",
    "lemma.h-commute", "lemma.hh-selfadjoint",
    "lemma.grad-f-h-pairing",
    "lemma.deta-h", "lemma.dphi0-law", "lemma.dphi1-law", "lemma.deta-phi-sum",
]

CONDITION_ORDER = [
    "cond.reeb-bracket", "cond.reeb-mixed", "cond.reeb-vertical",
    "cond.q-parallel", "cond.q-parallel-companion", "cond.curv-invariance",
    "diag.curv-invariance-classical", "diag.curv-reeb-ff",
]

S0_IDENTITIES = {"defn.nearly-c", "lemma.curv-f-cyclic", "lemma.delta-symmetries"}


def run_lemma_suite(S: WeakMetricFStructureField, n_points: int = 64,
                    n_vectors: int = 8, tol: Tolerances | None = None,
                    seed: int = 0x5EED) -> SuiteReport:
    """Evaluate every identity with hypothesis gating over random samples."""
    tol = tol or Tolerances()
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    points = S.host.sample_points(rng, n_points)
    draws = _draw_vectors(rng, n_points, n_vectors, S.dim)
    frames = build_frames(S, points)
    conditions = evaluate_conditions(frames, draws)
    residuals = evaluate_identities(frames, draws)

    report = SuiteReport(S.name, "lemmas", seed, tol.as_dict(),
                         convention="R(X,Y)Z = [nabla_X,nabla_Y]Z - nabla_[X,Y]Z")
    nsamp = n_points * n_vectors
    for cid in CONDITION_ORDER:
        if S.s == 0:
            report.entries.append(Entry(cid, FORMULAS[cid], None, 0, SKIPPED,
                                        "not applicable: no Reeb fields (s = 0)"))
            continue
        value = conditions[cid]
        status = PASS if value <= tol.gate else FAIL
        report.entries.append(Entry(cid, FORMULAS[cid], value, nsamp, status))

    gate_failed = {cid for cid in CONDITION_ORDER
                   if S.s > 0 and conditions.get(cid, 0.0) > tol.gate}
    for iid in LEMMA_ORDER:
        formula = FORMULAS[iid]
        if S.s == 0 and iid not in S0_IDENTITIES:
            report.entries.append(Entry(iid, formula, None, 0, SKIPPED,
                                        "not applicable: no Reeb fields (s = 0)"))
            continue
        gates = GATES.get(iid, ())
        failing = sorted(set(gates) & gate_failed)
        if failing:
            report.entries.append(Entry(iid, formula, None, 0, SKIPPED,
                                        "hypothesis failed: " + ", ".join(failing)))
            continue
        value = residuals.get(iid, 0.0)
        status = PASS if value <= tol.identity else FAIL
        report.entries.append(Entry(iid, formula, value, nsamp, status))
    report.wall_time_s = time.perf_counter() - t0
    return report


def run_axioms_suite(S: WeakMetricFStructureField, n_points: int = 64,
                     tol: Tolerances | None = None,
                     seed: int = 0x5EED) -> SuiteReport:
    """Structure axioms plus connection-level geometry invariants."""
    tol = tol or Tolerances()
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    points = S.host.sample_points(rng, n_points)
    frames = build_frames(S, points)
    worst: dict[str, float] = {}
    geom = {"geom.metricity": 0.0, "geom.riemann-symmetry": 0.0,
            "geom.bianchi": 0.0, "geom.d-squared-eta": 0.0}
    for fr in frames:
        rec = axiom_residuals(fr, S.n, S.s)
        for k, v in rec.entries:
            worst[k] = max(worst.get(k, 0.0), v)
        nabla_g = (fr.dg
                   - np.einsum("mca,mb->cab", fr.gamma, fr.g)
                   - np.einsum("mcb,am->cab", fr.gamma, fr.g))
        geom["geom.metricity"] = max(geom["geom.metricity"],
                                     float(np.abs(nabla_g).max()))
        R = fr.riem
        sym = max(np.abs(R + R.transpose(1, 0, 2, 3)).max(),
                  np.abs(R + R.transpose(0, 1, 3, 2)).max(),
                  np.abs(R - R.transpose(2, 3, 0, 1)).max())
        geom["geom.riemann-symmetry"] = max(geom["geom.riemann-symmetry"], float(sym))
        bianchi = np.abs(R + R.transpose(1, 2, 0, 3) + R.transpose(2, 0, 1, 3)).max()
        geom["geom.bianchi"] = max(geom["geom.bianchi"], float(bianchi))
    if S.s > 0:
        from .geometry import d_squared_residual
        for p in points[: min(8, len(points))]:
            for i in range(S.s):
                geom["geom.d-squared-eta"] = max(
                    geom["geom.d-squared-eta"],
                    d_squared_residual(S.eta[i], S.host, p))
    report = SuiteReport(S.name, "axioms", seed, tol.as_dict())
    for k in sorted(worst):
        status = PASS if worst[k] <= tol.axioms else FAIL
        report.entries.append(Entry(k, k.replace("axiom.", "structure axiom: "),
                                    worst[k], n_points, status))
    for k, v in geom.items():
        cap = tol.connection if k != "geom.riemann-symmetry" else tol.connection
        status = PASS if v <= cap else FAIL
        report.entries.append(Entry(k, FORMULAS[k], v, n_points, status))
    report.wall_time_s = time.perf_counter() - t0
    return report


def run_reeb_suite(S: WeakMetricFStructureField, n_points: int = 64,
                   n_vectors: int = 8, tol: Tolerances | None = None,
                   seed: int = 0x5EED) -> SuiteReport:
    tol = tol or Tolerances()
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    points = S.host.sample_points(rng, n_points)
    draws = _draw_vectors(rng, n_points, n_vectors, S.dim)
    frames = build_frames(S, points)
    conditions = evaluate_conditions(frames, draws)
    report = SuiteReport(S.name, "reeb", seed, tol.as_dict())
    for cid in ("cond.reeb-bracket", "cond.reeb-mixed", "cond.reeb-vertical"):
        if S.s == 0:
            report.entries.append(Entry(cid, FORMULAS[cid], None, 0, SKIPPED,
                                        "not applicable: no Reeb fields (s = 0)"))
        else:
            v = conditions[cid]
            report.entries.append(Entry(cid, FORMULAS[cid], v,
                                        n_points * n_vectors,
                                        PASS if v <= tol.gate else FAIL))
    report.wall_time_s = time.perf_counter() - t0
    return report


# -- spectral analysis ----------------------------------------------------------

@dataclass
class SpectrumReport:
    structure: str
    seed: int
    per_reeb: list          # one dict per i with centers/multiplicities/drift
    commutator_norm: float
    simdiag_residual: float
    h_max: float
    deta_nullity: list      # numerical nullity of d eta^i per i (min over points)
    conditions: dict        # hypothesis residual statuses attached
    cluster_tol: float
    wall_time_s: float = 0.0

    def to_dict(self) -> dict:
        return {"structure": self.structure, "seed": self.seed,
                "per_reeb": self.per_reeb,
                "commutator_norm": self.commutator_norm,
                "simdiag_residual": self.simdiag_residual,
                "h_max": self.h_max, "deta_nullity": self.deta_nullity,
                "conditions": self.conditions, "cluster_tol": self.cluster_tol}


def _deta_nullity(fr: StructureFrame, i: int, rel: float) -> int:
    Linv = np.linalg.inv(fr.L)
    B = Linv @ fr.deta(i) @ Linv.T
    sv = np.linalg.svd(B, compute_uv=False)
    if sv[0] <= 1e-14:
        return fr.dim
    return int(np.sum(sv <= rel * sv[0]))


def spectral_report(S: WeakMetricFStructureField, n_points: int = 64,
                    tol: Tolerances | None = None,
                    seed: int = 0x5EED) -> SpectrumReport:
    """Clustered Spec(h_i^2) with multiplicities and cross-point drift."""
    if S.s == 0:
        raise HypothesisFailed("spectral analysis needs at least one Reeb field")
    tol = tol or Tolerances()
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    points = S.host.sample_points(rng, n_points)
    draws = _draw_vectors(rng, n_points, 4, S.dim)
    frames = build_frames(S, points)
    conditions = evaluate_conditions(frames, draws)

    per_reeb = []
    h_max = 0.0
    comm = 0.0
    simdiag = 0.0
    nullity = [S.dim] * S.s
    for i in range(S.s):
        ref = None
        drift = 0.0
        for fr in frames:
            spec = sym_eigen(fr.h[i] @ fr.h[i], fr.g, tol.cluster)
            centers = spec.centers
            if len(centers) > 1:
                check_cluster_gaps(centers, tol.cluster)
            if ref is None:
                ref = spec
            else:
                if spec.multiplicities != ref.multiplicities:
                    raise AmbiguousSpectrum(
                        f"cluster multiplicities vary across points for h_{i+1}^2: "
                        f"{ref.multiplicities} vs {spec.multiplicities}")
                drift = max(drift, float(np.abs(centers - ref.centers).max()))
            h_max = max(h_max, fr.op_gnorm(fr.h[i]))
            nullity[i] = min(nullity[i], _deta_nullity(fr, i, tol.rank_rel))
            for j in range(S.s):
                comm = max(comm, fr.op_gnorm(fr.h[i] @ fr.h[j] - fr.h[j] @ fr.h[i]))
                if j != i:
                    hj2 = fr.to_gframe(fr.h[j] @ fr.h[j])
                    # mass of h_j^2 crossing the cluster blocks of h_i^2
                    U = np.column_stack([u for (_, _, u) in ref.clusters])
                    Ug = fr.L.T @ U
                    M = Ug.T @ hj2 @ Ug
                    off = 0.0
                    r0 = 0
                    blocks = []
                    for (_, mult, _) in ref.clusters:
                        blocks.append((r0, r0 + mult))
                        r0 += mult
                    for (a0, a1) in blocks:
                        for (b0, b1) in blocks:
                            if (a0, a1) != (b0, b1):
                                off = max(off, float(np.abs(M[a0:a1, b0:b1]).max()))
                    simdiag = max(simdiag, off)
        mult0 = 0
        for c, mult, _ in ref.clusters:
            if abs(c) <= tol.cluster:
                mult0 = mult
        per_reeb.append({
            "centers": [float(c) for c in ref.centers],
            "multiplicities": ref.multiplicities,
            "drift": drift,
            "kernel_multiplicity": mult0,
            "kernel_pairs": max(0, (mult0 - S.s)) // 2,
        })
    cond_status = {k: {"residual": v, "passes": v <= tol.gate}
                   for k, v in conditions.items() if k.startswith("cond.")}
    return SpectrumReport(S.name, seed, per_reeb, comm, simdiag, h_max,
                          nullity, cond_status, tol.cluster,
                          time.perf_counter() - t0)


# -- distribution diagnostics ---------------------------------------------------

@dataclass
class DistributionDiagnostics:
    structure: str
    seed: int
    entries: list                  # per-candidate dicts
    uniform_coframe_residual: float
    common_kernel_residual: float
    wall_time_s: float = 0.0

    def passed(self, tol: float) -> bool:
        vals = [max(e["involutivity"], e["total_geodesy"])
                for e in self.entries if e.get("involutivity") is not None]
        return all(v <= tol for v in vals)

    def to_dict(self) -> dict:
        return {"structure": self.structure, "seed": self.seed,
                "entries": self.entries,
                "uniform_coframe_residual": self.uniform_coframe_residual,
                "common_kernel_residual": self.common_kernel_residual}


def _poly_projector_with_derivative(T: np.ndarray, dT: np.ndarray,
                                    centers: np.ndarray, which: int):
    """Spectral projector as a polynomial in T, plus its first derivatives.

    P = prod_{nu != mu} (T - nu)/(mu - nu); valid because the suites verify
    separately that the clustered spectrum is constant across points.
    dT has the derivative axis first.
    """
    d = T.shape[0]
    mu = centers[which]
    factors = []
    dfactors = []
    for k, nu in enumerate(centers):
        if k == which:
            continue
        den = mu - nu
        factors.append((T - nu * np.eye(d)) / den)
        dfactors.append(dT / den)
    if not factors:
        return np.eye(d), np.zeros_like(dT)
    P = factors[0]
    for F in factors[1:]:
        P = P @ F
    dP = np.zeros_like(dT)
    for k in range(len(factors)):
        left = np.eye(d)
        for F in factors[:k]:
            left = left @ F
        right = np.eye(d)
        for F in factors[k + 1:]:
            right = right @ F
        dP += np.einsum("am,cmn,nb->cab", left, dfactors[k], right)
    return P, dP


def _kerf_projector_with_derivative(fr: StructureFrame):
    d = fr.dim
    P = np.zeros((d, d))
    dP = np.zeros((d, d, d))
    for i in range(fr.s):
        P += np.outer(fr.xi[i], fr.eta[i])
        dP += (np.einsum("ca,b->cab", fr.dxi[i], fr.eta[i])
               + np.einsum("a,cb->cab", fr.xi[i], fr.deta_partial[i]))
    return P, dP


def _distribution_residuals(fr: StructureFrame, P: np.ndarray, dP: np.ndarray):
    """Involutivity and total-geodesy residuals for the distribution im P."""
    g = fr.g
    w, V = np.linalg.eigh(0.5 * (fr.to_gframe(P) + fr.to_gframe(P).T))
    Linv_T = np.linalg.inv(fr.L).T
    cols = [Linv_T @ V[:, k] for k in range(fr.dim) if w[k] > 0.5]
    if not cols:
        return None, None, 0
    comp = np.eye(fr.dim) - P
    inv_res = 0.0
    geo_res = 0.0
    for va in cols:
        for vb in cols:
            DXa = np.einsum("cab,b->ca", dP, va)   # d_c X_a^a'
            DXb = np.einsum("cab,b->ca", dP, vb)
            bracket = np.einsum("ca,c->a", DXb, va) - np.einsum("ca,c->a", DXa, vb)
            inv_res = max(inv_res, fr.gnorm(comp @ bracket))
            nab = (np.einsum("ca,c->a", DXb, va)
                   + np.einsum("acm,c,m->a", fr.gamma, va, vb))
            geo_res = max(geo_res, fr.gnorm(comp @ nab))
    return inv_res, geo_res, len(cols)


def distribution_diagnostics(S: WeakMetricFStructureField, n_points: int = 16,
                             tol: Tolerances | None = None,
                             seed: int = 0x5EED) -> DistributionDiagnostics:
    """Involutivity and total-geodesy residuals of the eigen-distributions.

    Candidates per Reeb index i: ker f + D_{i,j} for each negative cluster,
    ker f + D_{i,0}, D_{i,0} alone, ker f + (all negative clusters), and
    ker f itself (with a leaf-flatness residual).
    """
    if S.s == 0:
        raise HypothesisFailed("distribution diagnostics need Reeb fields")
    tol = tol or Tolerances()
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    points = S.host.sample_points(rng, n_points)
    frames = build_frames(S, points)

    entries = []
    uniform = 0.0
    common_kernel = 0.0
    for fr in frames:
        for i in range(S.s):
            for j in range(S.s):
                uniform = max(uniform, fr.op_gnorm(fr.h[i] - fr.h[j]))

    # subspace agreement of ker d eta^i across i (hypothesis of the leaf
    # statement, measured independently of the uniform-coframe residual)
    for fr in frames:
        if S.s > 1:
            kers = []
            for i in range(S.s):
                spec = sym_eigen(fr.h[i] @ fr.h[i], fr.g, tol.cluster)
                for c, mult, U in spec.clusters:
                    if abs(c) <= tol.cluster:
                        kers.append(U @ (U.T @ fr.g))
            for A in kers:
                for B in kers:
                    common_kernel = max(common_kernel,
                                        fr.op_gnorm((np.eye(S.dim) - B) @ A))

    def summarize(name, i, values, dim):
        inv = [v[0] for v in values if v[0] is not None]
        geo = [v[1] for v in values if v[1] is not None]
        entries.append({
            "distribution": name, "reeb_index": i, "dim": dim,
            "involutivity": max(inv) if inv else None,
            "total_geodesy": max(geo) if geo else None,
            "skipped": not inv,
            "reason": "" if inv else "empty eigendistribution",
        })

    for i in range(S.s):
        ref = sym_eigen(frames[0].h[i] @ frames[0].h[i], frames[0].g, tol.cluster)
        centers = ref.centers
        neg = [k for k, c in enumerate(centers) if c < -tol.cluster]
        zero = [k for k, c in enumerate(centers) if abs(c) <= tol.cluster]

        collect: dict[str, list] = {}
        dims: dict[str, int] = {}
        for fr in frames:
            T = fr.h[i] @ fr.h[i]
            dT = (np.einsum("cam,mb->cab", fr.dh[i], fr.h[i])
                  + np.einsum("am,cmb->cab", fr.h[i], fr.dh[i]))
            Pker, dPker = _kerf_projector_with_derivative(fr)
            spec = sym_eigen(T, fr.g, tol.cluster)
            cs = spec.centers
            for k in neg:
                Pj, dPj = _poly_projector_with_derivative(T, dT, cs, k)
                name = f"kerf+D[{i + 1},{k}]"
                res = _distribution_residuals(fr, Pker + Pj, dPker + dPj)
                collect.setdefault(name, []).append(res)
                dims[name] = S.s + ref.multiplicities[k]
            if zero:
                k0 = zero[0]
                P0, dP0 = _poly_projector_with_derivative(T, dT, cs, k0)
                res = _distribution_residuals(fr, P0, dP0)
                collect.setdefault(f"kerf+D[{i + 1},0]", []).append(res)
                dims[f"kerf+D[{i + 1},0]"] = ref.multiplicities[k0]
                if ref.multiplicities[k0] > S.s:
                    res = _distribution_residuals(fr, P0 - Pker, dP0 - dPker)
                    collect.setdefault(f"D[{i + 1},0]", []).append(res)
                    dims[f"D[{i + 1},0]"] = ref.multiplicities[k0] - S.s
                else:
                    collect.setdefault(f"D[{i + 1},0]", []).append((None, None, 0))
                    dims[f"D[{i + 1},0]"] = 0
                Pneg = np.eye(S.dim) - P0 + Pker
                dPneg = -dP0 + dPker
                res = _distribution_residuals(fr, Pneg, dPneg)
                collect.setdefault(f"kerf+D[{i + 1},neg]", []).append(res)
                dims[f"kerf+D[{i + 1},neg]"] = S.dim - ref.multiplicities[k0] + S.s
        for name, values in collect.items():
            summarize(name, i, values, dims[name])

    # ker f alone: flat totally geodesic leaves
    kerf_inv = 0.0
    kerf_geo = 0.0
    kerf_flat = 0.0
    for fr in frames:
        Pker, dPker = _kerf_projector_with_derivative(fr)
        res = _distribution_residuals(fr, Pker, dPker)
        if res[0] is not None:
            kerf_inv = max(kerf_inv, res[0])
            kerf_geo = max(kerf_geo, res[1])
        for i in range(S.s):
            for j in range(S.s):
                for k in range(S.s):
                    for l in range(S.s):
                        kerf_flat = max(kerf_flat, abs(fr.curv4(
                            fr.xi[i], fr.xi[j], fr.xi[k], fr.xi[l])))
    entries.append({"distribution": "kerf", "reeb_index": None, "dim": S.s,
                    "involutivity": kerf_inv, "total_geodesy": kerf_geo,
                    "leaf_flatness": kerf_flat, "skipped": False, "reason": ""})

    return DistributionDiagnostics(S.name, seed, entries, uniform,
                                   common_kernel, time.perf_counter() - t0)


# -- splitting classifier -------------------------------------------------------

PRODUCT_WITH_RS = "PRODUCT_WITH_RS"
B4S_TIMES_NK_CANDIDATE = "B4S_TIMES_NK_CANDIDATE"
NO_SPLIT_DETECTED = "NO_SPLIT_DETECTED"


@dataclass
class SplitVerdict:
    verdict: str
    evidence: dict
    disclaimer: str = DISCLAIMER

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "evidence": self.evidence,
                "disclaimer": self.disclaimer}


def splitting_classifier(S: WeakMetricFStructureField,
                         lemma_report: SuiteReport,
                         spectrum: SpectrumReport,
                         diagnostics: DistributionDiagnostics,
                         tol: Tolerances | None = None) -> SplitVerdict:
    """Classify the local product shape from the gathered numerical evidence."""
    tol = tol or Tolerances()
    conditions_ok = True
    cond_resid = {}
    for cid in CONDITION_ORDER:
        if not cid.startswith("cond."):
            continue
        try:
            e = lemma_report.entry(cid)
        except KeyError:
            continue
        cond_resid[cid] = e.residual
        if e.status == FAIL:
            conditions_ok = False
    evidence = {
        "h_max": spectrum.h_max,
        "uniform_coframe_residual": diagnostics.uniform_coframe_residual,
        "deta_nullity": spectrum.deta_nullity,
        "s": S.s,
        "conditions": cond_resid,
        "conditions_pass": conditions_ok,
        "diagnostics_pass": diagnostics.passed(tol.diagnostics),
    }
    if spectrum.h_max <= tol.hnorm:
        return SplitVerdict(PRODUCT_WITH_RS, evidence)
    uniform_ok = diagnostics.uniform_coframe_residual <= tol.diagnostics
    kernel_ok = all(nu > S.s for nu in spectrum.deta_nullity)
    if uniform_ok and kernel_ok and evidence["diagnostics_pass"] and conditions_ok:
        return SplitVerdict(B4S_TIMES_NK_CANDIDATE, evidence)
    return SplitVerdict(NO_SPLIT_DETECTED, evidence)


# -- induced structure reconstruction -------------------------------------------

@dataclass
class FkContactResult:
    hat_f: np.ndarray
    hat_Q: np.ndarray
    residuals: dict
    hat_f_vs_f: float       # recorded without interpretation

    def to_dict(self) -> dict:
        return {"residuals": self.residuals, "hat_f_vs_f": self.hat_f_vs_f}


def induced_fk_contact(S: WeakMetricFStructureField, p: np.ndarray, i: int = 0,
                       tol: Tolerances | None = None) -> FkContactResult:
    """Reconstruct (hat f, hat Q) = (-nabla xi_i, Jacobi operator of xi_i).

    Requires dim ker d eta^i = s and a positive-definite Jacobi operator on
    the contact distribution; raises HypothesisFailed otherwise.
    """
    tol = tol or Tolerances()
    if S.s == 0:
        raise HypothesisFailed("reconstruction needs a Reeb field")
    fr = S.frame(np.asarray(p, dtype=float))
    nullity = _deta_nullity(fr, i, tol.rank_rel)
    if nullity != S.s:
        raise HypothesisFailed(
            f"dim ker d eta^{i + 1} = {nullity} differs from s = {S.s}")
    P = fr.proj_contact
    jac = fr.jacobi_operator(i)
    w, V = np.linalg.eigh(0.5 * (fr.to_gframe(P) + fr.to_gframe(P).T))
    Linv_T = np.linalg.inv(fr.L).T
    cols = [Linv_T @ V[:, k] for k in range(fr.dim) if w[k] > 0.5]
    M = np.array([[fr.inner(jac @ u, v) for v in cols] for u in cols])
    eigs = np.linalg.eigvalsh(0.5 * (M + M.T))
    if eigs.min() <= 1e-10:
        raise HypothesisFailed(
            f"Jacobi operator is not positive definite on the contact "
            f"distribution (min eigenvalue {eigs.min():.3e})")

    hat_f = -fr.h[i]
    kerP = np.eye(fr.dim) - P
    hat_Q = jac @ P + kerP
    res = {}
    outer = sum(np.outer(fr.xi[k], fr.eta[k]) for k in range(S.s))
    res["fk.hat-f-squared"] = fr.op_gnorm(hat_f @ hat_f + hat_Q - outer)
    Mf = fr.g @ hat_f
    res["fk.hat-f-skew"] = float(np.abs(Mf + Mf.T).max())
    Mq = fr.g @ hat_Q
    res["fk.hat-q-selfadjoint"] = float(np.abs(Mq - Mq.T).max())
    res["fk.hat-q-positive"] = 0.0 if eigs.min() > 0 else 1.0
    res["fk.hat-q-vs-identity-on-D"] = fr.op_gnorm(P.T @ (hat_Q - np.eye(fr.dim)) @ P)
    # xi-sectional curvature law K(xi_i, X) = |h_i X|^2 on unit X in D
    rng = np.random.default_rng(0xA11CE)
    worst = 0.0
    for _ in range(16):
        X = _project_d(fr, rng.standard_normal(fr.dim))
        if X is None:
            continue
        K = fr.curv4(fr.xi[i], X, X, fr.xi[i])
        worst = max(worst, abs(K - fr.gnorm(fr.h[i] @ X) ** 2))
    res["fk.xi-sectional-law"] = worst
    return FkContactResult(hat_f, hat_Q, res, fr.op_gnorm(hat_f - fr.f))


def lefschetz_check(S: WeakMetricFStructureField, p: np.ndarray, i: int = 0,
                    tol: Tolerances | None = None) -> dict:
    """Rank of the wedge map beta -> d eta^i ^ beta on 2-forms at p."""
    tol = tol or Tolerances()
    if S.s == 0:
        raise HypothesisFailed("no d eta available on an s = 0 host")
    fr = S.frame(np.asarray(p, dtype=float))
    omega = KForm.from_array(fr.deta(i), 2, fr.point)
    rank, full = lefschetz_rank(omega, S.dim)
    nullity = _deta_nullity(fr, i, tol.rank_rel)
    expected_full = S.n >= 3 and nullity == S.s
    return {"rank": rank, "full": full, "expected_full": expected_full,
            "deta_nullity": nullity, "n": S.n, "s": S.s,
            "max_rank": S.dim * (S.dim - 1) // 2}
