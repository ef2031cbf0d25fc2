"""Pointwise linear and exterior algebra in the chart basis.

Dense storage throughout: every catalog chart has dimension at most 16, so
clarity wins over scale.  The g-self-adjoint eigensolver routes through a
Cholesky factor of the metric so eigenbases come out g-orthonormal, with a
deterministic ordering (descending eigenvalue, lexicographic tie-break after
sign normalization) so eigen-frames reproduce across runs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import (AmbiguousSpectrum, DegenerateMetric, DegreeError,
                     NotSelfAdjoint, ShapeError)

STRUCT_TAG_TOL = 1e-13


@dataclass(frozen=True)
class PointTensor:
    """A dense tensor value at a chart point.

    ``variance`` gives one character per index: 'u' (contravariant) or
    'd' (covariant); e.g. a (1,1) operator is "ud" with components A[a, b]
    meaning A(e_b) = A[a, b] e_a.
    """

    variance: str
    components: np.ndarray
    point: np.ndarray | None = None
    tag: str | None = None  # "skew" | "symmetric", validated on construction

    def __post_init__(self):
        comps = np.asarray(self.components, dtype=float)
        object.__setattr__(self, "components", comps)
        if comps.ndim != len(self.variance):
            raise ShapeError(
                f"variance {self.variance!r} expects rank {len(self.variance)}, "
                f"got array of rank {comps.ndim}")
        if comps.ndim > 0 and len(set(comps.shape)) > 1:
            raise ShapeError(f"non-cubical component array {comps.shape}")
        if self.tag is not None:
            if comps.ndim != 2:
                raise ShapeError("skew/symmetric tags apply to rank-2 tensors")
            sym = comps - comps.T if self.tag == "skew" else comps - comps.T
            resid = np.abs(comps + comps.T).max() if self.tag == "skew" \
                else np.abs(comps - comps.T).max()
            if resid > STRUCT_TAG_TOL:
                raise ShapeError(f"tensor violates {self.tag!r} tag by {resid:.2e}")

    @property
    def dim(self) -> int:
        return self.components.shape[0] if self.components.ndim else 0


def apply(op: PointTensor, v: np.ndarray) -> np.ndarray:
    """Apply a (1,1) operator to a vector: standard contraction."""
    if op.variance != "ud":
        raise ShapeError(f"apply expects a (1,1) operator, got variance {op.variance!r}")
    v = np.asarray(v, dtype=float)
    if v.shape != (op.dim,):
        raise ShapeError(f"vector shape {v.shape} does not match operator dim {op.dim}")
    return op.components @ v


def cholesky_spd(g: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor; raises DegenerateMetric if g is not SPD."""
    g = np.asarray(g, dtype=float)
    try:
        return np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise DegenerateMetric(f"metric is not positive definite: {exc}") from exc


def g_inner(g: PointTensor | np.ndarray, u: np.ndarray, v: np.ndarray) -> float:
    """Metric inner product g(u, v); checks SPD via Cholesky."""
    gm = g.components if isinstance(g, PointTensor) else np.asarray(g, dtype=float)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if gm.shape != (u.shape[0], v.shape[0]):
        raise ShapeError("metric/vector shape mismatch")
    cholesky_spd(gm)
    return float(u @ gm @ v)


@dataclass(frozen=True)
class SpectrumCluster:
    """Clustered spectrum of a g-self-adjoint operator.

    ``clusters`` is a list of (center, multiplicity, eigenbasis) with the
    eigenbasis columns g-orthonormal; multiplicities sum to the dimension.
    """

    clusters: list
    cluster_tol: float

    @property
    def centers(self) -> np.ndarray:
        return np.array([c[0] for c in self.clusters])

    @property
    def multiplicities(self) -> list[int]:
        return [c[1] for c in self.clusters]

    def projectors(self, g: np.ndarray) -> list[np.ndarray]:
        """g-orthogonal projector per cluster: P = U (U^T g)."""
        return [U @ (U.T @ g) for (_, _, U) in self.clusters]


def _sign_normalize(vectors: np.ndarray) -> np.ndarray:
    """Flip eigenvector signs so the first component above 1e-12 is positive."""
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        nz = np.nonzero(np.abs(col) > 1e-12)[0]
        if nz.size and col[nz[0]] < 0:
            out[:, j] = -col
    return out


SELF_ADJOINT_TOL = 1e-9


def sym_eigen(op: PointTensor | np.ndarray, g: PointTensor | np.ndarray,
              cluster_tol: float = 1e-6) -> SpectrumCluster:
    """Eigen-decompose a g-self-adjoint (1,1) operator with clustering.

    Solved via Cholesky of g followed by a symmetric eigensolve in the
    g-orthonormalized frame, so the returned eigenbases are g-orthonormal.
    """
    A = op.components if isinstance(op, PointTensor) else np.asarray(op, dtype=float)
    gm = g.components if isinstance(g, PointTensor) else np.asarray(g, dtype=float)
    d = A.shape[0]
    if A.shape != (d, d) or gm.shape != (d, d):
        raise ShapeError("operator and metric must be square of equal size")
    M = gm @ A
    resid = np.abs(M - M.T).max()
    if resid > SELF_ADJOINT_TOL:
        raise NotSelfAdjoint(f"g-self-adjointness residual {resid:.3e} exceeds "
                             f"{SELF_ADJOINT_TOL:.1e}")
    L = cholesky_spd(gm)
    B = L.T @ A @ np.linalg.inv(L).T
    B = 0.5 * (B + B.T)
    w, V = np.linalg.eigh(B)
    U = np.linalg.solve(L.T, V)          # g-orthonormal eigenvectors
    order = np.argsort(-w, kind="stable")
    w = w[order]
    U = _sign_normalize(U[:, order])
    # lexicographic tie-break inside near-degenerate runs keeps frames stable
    i = 0
    while i < d:
        j = i + 1
        while j < d and abs(w[j] - w[i]) <= 1e-12:
            j += 1
        if j - i > 1:
            cols = sorted(range(i, j), key=lambda c: tuple(U[:, c]))
            U[:, i:j] = U[:, cols]
        i = j
    clusters = []
    i = 0
    while i < d:
        j = i + 1
        while j < d and abs(w[j] - w[i]) <= cluster_tol:
            j += 1
        center = float(np.mean(w[i:j]))
        clusters.append((center, j - i, U[:, i:j].copy()))
        i = j
    for (c1, _, _), (c2, _, _) in zip(clusters, clusters[1:]):
        if abs(c1 - c2) <= cluster_tol:
            raise AmbiguousSpectrum(
                f"cluster centers {c1:.3e} and {c2:.3e} closer than tolerance")
    return SpectrumCluster(clusters, cluster_tol)


def check_cluster_gaps(centers: np.ndarray, cluster_tol: float) -> None:
    """Raise AmbiguousSpectrum when consecutive centers sit closer than 2*tol."""
    centers = np.sort(np.asarray(centers, dtype=float))[::-1]
    for a, b in zip(centers, centers[1:]):
        if abs(a - b) < 2.0 * cluster_tol:
            raise AmbiguousSpectrum(
                f"spectral gap {abs(a - b):.3e} below twice the cluster "
                f"tolerance {cluster_tol:.1e}")


# -- exterior algebra ------------------------------------------------------

@dataclass(frozen=True)
class KForm:
    """Alternating k-form stored on strictly increasing multi-indices.

    Uses the shuffle (determinant) convention: for a 1-form a and 1-form b,
    (a ^ b)(X, Y) = a(X) b(Y) - a(Y) b(X), with no factorial weights.
    """

    degree: int
    dim: int
    components: dict = field(default_factory=dict)  # multi-index tuple -> float
    point: np.ndarray | None = None

    @staticmethod
    def from_array(arr: np.ndarray, degree: int, point=None) -> "KForm":
        """Build from a fully antisymmetric dense array (degree 1 or 2 mostly)."""
        arr = np.asarray(arr, dtype=float)
        d = arr.shape[0]
        comps = {}
        for idx in itertools.combinations(range(d), degree):
            comps[idx] = float(arr[idx])
        return KForm(degree, d, comps, point)

    def coefficient(self, idx: tuple) -> float:
        return self.components.get(tuple(idx), 0.0)

    def as_vector(self) -> np.ndarray:
        """Dense coefficient vector over lexicographic increasing multi-indices."""
        basis = list(itertools.combinations(range(self.dim), self.degree))
        return np.array([self.components.get(I, 0.0) for I in basis])

    def evaluate(self, vectors) -> float:
        """Evaluate on k vectors via minors: F(v_1..v_k) = sum_I F[I] det(rows I)."""
        M = np.column_stack([np.asarray(v, dtype=float) for v in vectors])
        if M.shape != (self.dim, self.degree):
            raise ShapeError(f"need {self.degree} vectors of dim {self.dim}")
        total = 0.0
        for idx, coef in self.components.items():
            if coef != 0.0:
                total += coef * np.linalg.det(M[list(idx), :])
        return float(total)

    def max_abs(self) -> float:
        if not self.components:
            return 0.0
        return max(abs(v) for v in self.components.values())


def _merge_sign(I: tuple, J: tuple) -> int:
    """Sign of the permutation sorting the concatenation of two disjoint tuples."""
    seq = list(I) + list(J)
    sign = 1
    # counting inversions is fine at these sizes
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                sign = -sign
    return sign


def wedge(a: KForm, b: KForm) -> KForm:
    """Graded antisymmetric product in the shuffle convention."""
    if a.dim != b.dim:
        raise ShapeError("wedge operands live on different chart dimensions")
    if a.point is not None and b.point is not None and \
            not np.array_equal(a.point, b.point):
        raise ShapeError("wedge operands have different base points")
    k = a.degree + b.degree
    if k > a.dim:
        raise DegreeError(f"degree {k} exceeds dimension {a.dim}")
    out: dict = {}
    for I, ca in a.components.items():
        if ca == 0.0:
            continue
        for J, cb in b.components.items():
            if cb == 0.0 or set(I) & set(J):
                continue
            K = tuple(sorted(I + J))
            out[K] = out.get(K, 0.0) + _merge_sign(I, J) * ca * cb
    out = {K: v for K, v in out.items() if v != 0.0}
    return KForm(k, a.dim, out, a.point if a.point is not None else b.point)


def basis_two_form(i: int, j: int, d: int) -> KForm:
    """The coordinate 2-form dx^i ^ dx^j."""
    if i == j:
        return KForm(2, d, {})
    sign = 1.0
    if i > j:
        i, j = j, i
        sign = -1.0
    return KForm(2, d, {(i, j): sign})


def lefschetz_rank(omega: KForm, d: int) -> tuple[int, bool]:
    """Rank of the wedge map on 2-forms: beta -> omega ^ beta.

    Assembles the full C(d,4) x C(d,2) matrix over the increasing multi-index
    bases and reports whether the map is injective (rank equals C(d,2)).
    """
    if d < 4:
        raise ShapeError("the wedge map into 4-forms needs dimension >= 4")
    if omega.degree != 2 or omega.dim != d:
        raise ShapeError("omega must be a 2-form on the given dimension")
    basis2 = list(itertools.combinations(range(d), 2))
    basis4 = list(itertools.combinations(range(d), 4))
    pos4 = {K: r for r, K in enumerate(basis4)}
    M = np.zeros((len(basis4), len(basis2)))
    for col, J in enumerate(basis2):
        image = wedge(omega, KForm(2, d, {J: 1.0}))
        for K, v in image.components.items():
            M[pos4[K], col] = v
    rank = int(np.linalg.matrix_rank(M))
    return rank, rank == len(basis2)


def op_gnorm(A: np.ndarray, L: np.ndarray) -> float:
    """Spectral norm of a (1,1) operator in the g-orthonormal frame (g = L L^T)."""
    B = L.T @ A @ np.linalg.inv(L).T
    return float(np.linalg.norm(B, 2))


def bilinear_gnorm(B: np.ndarray, L: np.ndarray) -> float:
    """Sup of |B(X,Y)| over g-unit X, Y for a (0,2) tensor (g = L L^T)."""
    Linv = np.linalg.inv(L)
    return float(np.linalg.norm(Linv @ B @ Linv.T, 2))


def gram_schmidt_g(vectors: np.ndarray, g: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """g-orthonormalize the columns of ``vectors``; drops dependent columns."""
    out = []
    for j in range(vectors.shape[1]):
        v = vectors[:, j].astype(float)
        for u in out:
            v = v - (u @ g @ v) * u
        norm = np.sqrt(v @ g @ v)
        if norm > tol:
            out.append(v / norm)
    return np.column_stack(out) if out else np.zeros((vectors.shape[0], 0))
