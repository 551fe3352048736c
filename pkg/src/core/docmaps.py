"""Diagonal unitary and orthogonal covariant maps on d x d matrices.

A covariant map is fixed by the same (A, B, C) data as its Choi matrix:

    Phi(Z) = diag(A diag(Z)) + B~ . Z + C~ . Z^T

DUC maps have B = diag A, CDUC maps have C = diag A, DOC maps use all three.
"""

import logging
from dataclasses import dataclass
from typing import List, Literal, Optional, Sequence, Tuple, Union

import numpy as np

from src.config.parameters import FALSIFIER_BATCH
from src.core.cones import (
    CertificateReport,
    CheckResult,
    SufficiencyResult,
    certify_tcp,
    psd_test,
    tcp_necessary_battery,
)
from src.core.ldoi import (
    InvariantClass,
    LegPermutation,
    MatrixPair,
    MatrixTriple,
    bipartite_dimension,
    build,
    extract_triple,
    is_invariant,
    leg_permutation,
    rank_of,
    tightest_class,
)
from src.core.matcore import (
    Tolerance,
    as_matrix,
    as_square,
    diag_part,
    is_ewp,
    is_hermitian,
    max_abs,
    tilde,
)

logger = logging.getLogger("ldoi.maps")


@dataclass(frozen=True, eq=False)
class CovariantMap:
    """A DUC, CDUC or DOC map, tagged by the invariance class of its Choi matrix."""
    klass: InvariantClass
    triple: MatrixTriple

    def __post_init__(self):
        klass = InvariantClass.parse(self.klass) if isinstance(self.klass, str) else self.klass
        object.__setattr__(self, "klass", klass)
        t = self.triple
        D = diag_part(t.A)
        eps = Tolerance().threshold(max(max_abs(M) for M in t.matrices()))
        if klass is InvariantClass.LDUI and max_abs(t.B - D) > eps:
            raise ValueError("DUC maps need B = diag A")
        if klass is InvariantClass.CLDUI and max_abs(t.C - D) > eps:
            raise ValueError("CDUC maps need C = diag A")

    @property
    def d(self) -> int:
        return self.triple.d

    @property
    def map_name(self) -> str:
        return self.klass.map_name

    @classmethod
    def from_pair(cls, klass: InvariantClass, A, M) -> "CovariantMap":
        """DUC map from (A, C) or CDUC map from (A, B)."""
        return cls(klass, MatrixPair(A, M).to_triple(klass))


@dataclass(frozen=True, eq=False)
class KrausSet:
    """Phi(Z) = sum_i P_i Z Q_i^*."""
    left: Tuple[np.ndarray, ...]
    right: Tuple[np.ndarray, ...]
    d: int

    def __post_init__(self):
        if len(self.left) != len(self.right):
            raise ValueError(
                f"Kraus lists differ in length: {len(self.left)} left, {len(self.right)} right"
            )
        left = tuple(as_square(P, "P") for P in self.left)
        right = tuple(as_square(Q, "Q") for Q in self.right)
        for M in left + right:
            if M.shape != (self.d, self.d):
                raise ValueError(f"Kraus operator has shape {M.shape}, expected ({self.d}, {self.d})")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    @property
    def rank(self) -> int:
        return len(self.left)

    def apply(self, Z) -> np.ndarray:
        Z = as_square(Z, "Z")
        out = np.zeros((self.d, self.d), dtype=complex)
        for P, Q in zip(self.left, self.right):
            out += P @ Z @ Q.conj().T
        return out

    def choi(self) -> np.ndarray:
        """sum_i |vec P_i><vec Q_i| with row-major vec."""
        n = self.d * self.d
        J = np.zeros((n, n), dtype=complex)
        for P, Q in zip(self.left, self.right):
            J += np.outer(P.reshape(-1), Q.reshape(-1).conj())
        return J


@dataclass(frozen=True)
class MaxEntangled:
    """Omega = |psi><psi| with psi = sum_i |ii>, unnormalized."""
    d: int

    @property
    def vector(self) -> np.ndarray:
        psi = np.zeros(self.d * self.d)
        psi[np.arange(self.d) * (self.d + 1)] = 1.0
        return psi

    @property
    def projector(self) -> np.ndarray:
        return np.outer(self.vector, self.vector)

    @property
    def triple(self) -> MatrixTriple:
        d = self.d
        return MatrixTriple(np.eye(d), np.ones((d, d)), np.eye(d))


@dataclass(frozen=True)
class MapProperties:
    herm_preserving: bool
    cp: bool
    ccp: bool
    unital: bool
    trace_preserving: bool
    channel: bool
    eb: Literal["certified", "refuted", "inconclusive"]


@dataclass(frozen=True)
class FalsifierResult:
    found: bool
    samples: int
    v: Optional[np.ndarray] = None
    w: Optional[np.ndarray] = None
    value: Optional[complex] = None


def _apply_triple(t: MatrixTriple, Z: np.ndarray) -> np.ndarray:
    """Action on a stack (..., d, d) of matrices."""
    diag = np.einsum("...ii->...i", Z)
    out = tilde(t.B) * Z + tilde(t.C) * np.swapaxes(Z, -1, -2)
    idx = np.arange(t.d)
    out[..., idx, idx] += np.einsum("ab,...b->...a", t.A, diag)
    return out


def apply(m: CovariantMap, Z) -> np.ndarray:
    """Raises ValueError on a dimension mismatch."""
    Z = as_square(Z, "Z")
    if Z.shape[0] != m.d:
        raise ValueError(f"Input is {Z.shape[0]}x{Z.shape[0]}, map acts on d={m.d}")
    return _apply_triple(m.triple, Z)


def choi(m: CovariantMap) -> np.ndarray:
    return build(m.klass, m.triple)


def from_choi(X, tol: Tolerance = Tolerance()) -> CovariantMap:
    """Covariant map whose Choi matrix is X, tagged with the tightest class.

    Raises:
        ValueError: If X is not LDOI
    """
    X = as_square(X, "Choi matrix")
    if not is_invariant(X, InvariantClass.LDOI, tol):
        raise ValueError("Choi matrix is not invariant under any of the three classes")
    t = extract_triple(X)
    klass = tightest_class(t, tol)
    return CovariantMap(klass, t.promote(klass))


def choi_by_basis(apply_fn, d: int) -> np.ndarray:
    """J = sum_ij Phi(E_ij) (x) E_ij for any linear map given as a callable."""
    J = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            E = np.zeros((d, d), dtype=complex)
            E[i, j] = 1
            J += np.kron(apply_fn(E), E)
    return J


def map_properties(m: CovariantMap, tol: Tolerance = Tolerance()) -> MapProperties:
    t = m.triple
    A = t.A
    eps = tol.threshold(max_abs(A))
    herm = bool(max_abs(A.imag) <= eps and is_hermitian(t.B, tol) and is_hermitian(t.C, tol))
    cp = psd_test(t, tol).passed
    ccp = psd_test(leg_permutation(t, LegPermutation.GAMMA), tol).passed
    unital = bool(max_abs(A.sum(axis=1) - 1) <= eps)
    trace_preserving = bool(max_abs(A.sum(axis=0) - 1) <= eps)

    if not cp or not tcp_necessary_battery(t, tol).passed:
        eb = "refuted"
    elif certify_tcp(t, tol) is not None:
        eb = "certified"
    else:
        eb = "inconclusive"
    logger.debug("map_properties(%s, d=%d): cp=%s ccp=%s eb=%s", m.map_name, m.d, cp, ccp, eb)
    return MapProperties(herm, cp, ccp, unital, trace_preserving, cp and trace_preserving, eb)


def adjoint(m: CovariantMap) -> CovariantMap:
    """Hilbert-Schmidt adjoint: (A^*, conj B, C^*)."""
    A, B, C = m.triple.matrices()
    return CovariantMap(m.klass, MatrixTriple(A.conj().T, B.conj(), C.conj().T))


_TRANSPOSE_CLASS = {
    InvariantClass.LDUI: InvariantClass.CLDUI,
    InvariantClass.CLDUI: InvariantClass.LDUI,
    InvariantClass.LDOI: InvariantClass.LDOI,
}


def transpose_compose(m: CovariantMap, side: Literal["pre", "post"]) -> CovariantMap:
    """Phi(Z^T) ("pre") or Phi(Z)^T ("post"); DUC and CDUC swap, DOC stays DOC."""
    A, B, C = m.triple.matrices()
    if side == "pre":
        t = MatrixTriple(A, C, B)
    elif side == "post":
        t = MatrixTriple(A, C.T, B.T)
    else:
        raise ValueError(f"Unsupported side: {side}. Available: ['pre', 'post']")
    return CovariantMap(_TRANSPOSE_CLASS[m.klass], t)


def pairing(t1: MatrixTriple, t2: MatrixTriple, tol: Tolerance = Tolerance()) -> Union[float, complex]:
    """Tr[X(t1) X(t2)] = Tr(A D^T) + Tr(B~ E~) + Tr(C~ F~).

    Returns the real part when the imaginary part is negligible, else the
    complex value with a warning.
    """
    if t1.d != t2.d:
        raise ValueError(f"Dimension mismatch: {t1.d} vs {t2.d}")
    value = complex(
        np.sum(t1.A * t2.A)
        + np.trace(tilde(t1.B) @ tilde(t2.B))
        + np.trace(tilde(t1.C) @ tilde(t2.C))
    )
    scale = max(max_abs(M) for M in t1.matrices()) * max(max_abs(M) for M in t2.matrices())
    if abs(value.imag) <= tol.threshold(scale * t1.d ** 2):
        return value.real
    logger.warning("pairing is complex (imaginary part %.3e); inputs are not self-adjoint", value.imag)
    return value


def _pairwise_report(
    test: str, t: MatrixTriple, diag_weight: float, tol: Tolerance
) -> CertificateReport:
    A, B, C = t.matrices()
    checks = [
        CheckResult("A_entrywise_nonnegative", "pass" if is_ewp(A, tol) else "fail"),
        CheckResult("B_self_adjoint", "pass" if is_hermitian(B, tol) else "fail"),
        CheckResult("C_self_adjoint", "pass" if is_hermitian(C, tol) else "fail"),
    ]
    d = t.d
    if d == 1:
        checks.append(CheckResult("pairwise_bound", "not_applicable"))
        return CertificateReport(test, tuple(checks))
    Ar = np.clip(A.real, 0, None)
    dg = np.diag(Ar)
    bound = (
        np.sqrt(np.outer(dg, dg)) * diag_weight
        + np.sqrt(Ar * Ar.T)
        - np.abs(B)
        - np.abs(C)
    )
    margin = float(np.min(bound[~np.eye(d, dtype=bool)]))
    ok = margin >= -tol.threshold(max(max_abs(M) for M in t.matrices()))
    checks.append(CheckResult("pairwise_bound", "pass" if ok else "fail", margin))
    return CertificateReport(test, tuple(checks))


def positivity_necessary(t: MatrixTriple, tol: Tolerance = Tolerance()) -> CertificateReport:
    """Failure of any check certifies that the map is not positive."""
    return _pairwise_report("positivity_necessary", t, 1.0, tol)


def decomposable_sufficient(t: MatrixTriple, tol: Tolerance = Tolerance()) -> SufficiencyResult:
    """Certify decomposability (hence positivity) from the (d-1)-weighted pairwise bound."""
    weight = 1.0 / (t.d - 1) if t.d > 1 else 1.0
    report = _pairwise_report("decomposable_sufficient", t, weight, tol)
    margin = report.check("pairwise_bound").margin
    if report.passed:
        return SufficiencyResult("certified", "pairwise bound holds", "pairwise_bound", margin)
    return SufficiencyResult("inconclusive", f"failed checks: {report.failed}", "pairwise_bound", margin)


def positivity_falsifier(
    t: MatrixTriple,
    samples: int,
    seed: int = 0,
    tol: Tolerance = Tolerance(),
) -> FalsifierResult:
    """Search for product vectors with <X(t), |v><v| (x) |w><w|> < 0.

    The pairing with the extremal TCP triple of (v, w) evaluates to
    p^T A q + y^* B~ y + z^* C~ z with p = |v|^2, q = |w|^2, y = v.w, z = v.conj(w).
    Samples are drawn in batches from a seeded generator, so the first
    counterexample is deterministic per seed.
    """
    if samples < 0:
        raise ValueError(f"samples must be non-negative, got {samples}")
    rng = np.random.default_rng(seed)
    d = t.d
    A, Bt, Ct = t.A, tilde(t.B), tilde(t.C)
    eps = tol.threshold(max(max_abs(M) for M in t.matrices()))
    done = 0
    while done < samples:
        batch = min(FALSIFIER_BATCH, samples - done)
        v = rng.standard_normal((batch, d)) + 1j * rng.standard_normal((batch, d))
        w = rng.standard_normal((batch, d)) + 1j * rng.standard_normal((batch, d))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        w /= np.linalg.norm(w, axis=1, keepdims=True)
        p, q = np.abs(v) ** 2, np.abs(w) ** 2
        y, z = v * w, v * w.conj()
        values = (
            np.einsum("si,ij,sj->s", p, A, q)
            + np.einsum("si,ij,sj->s", y.conj(), Bt, y)
            + np.einsum("si,ij,sj->s", z.conj(), Ct, z)
        )
        bad = np.flatnonzero((values.real < -eps) | (np.abs(values.imag) > eps))
        if bad.size:
            k = int(bad[0])
            logger.debug("falsifier hit after %d samples: %s", done + k + 1, values[k])
            return FalsifierResult(True, done + k + 1, v[k], w[k], complex(values[k]))
        done += batch
    return FalsifierResult(False, done)


_COMPOSE_CLASS = {
    (InvariantClass.LDUI, InvariantClass.LDUI): InvariantClass.CLDUI,
    (InvariantClass.CLDUI, InvariantClass.CLDUI): InvariantClass.CLDUI,
    (InvariantClass.LDUI, InvariantClass.CLDUI): InvariantClass.LDUI,
    (InvariantClass.CLDUI, InvariantClass.LDUI): InvariantClass.LDUI,
}


def _compose_triples(t1: MatrixTriple, t2: MatrixTriple) -> MatrixTriple:
    if t1.d != t2.d:
        raise ValueError(f"Dimension mismatch: {t1.d} vs {t2.d}")
    A1, B1, C1 = t1.matrices()
    A2, B2, C2 = t2.matrices()
    AA = A1 @ A2
    D = np.diag(np.diag(AA))
    B = tilde(B1 * B2 + C1 * C2.T) + D
    C = tilde(B1 * C2 + C1 * B2.T) + D
    return MatrixTriple(AA, B, C)


def compose(m1: CovariantMap, m2: CovariantMap) -> CovariantMap:
    """The map Z -> m1(m2(Z))."""
    t = _compose_triples(m1.triple, m2.triple)
    klass = _COMPOSE_CLASS.get((m1.klass, m2.klass), InvariantClass.LDOI)
    return CovariantMap(klass, t.promote(klass))


def compose_pairs(p1: MatrixPair, p2: MatrixPair, kind: Literal[1, 2]) -> MatrixPair:
    """(A1 A2, B1 . B2^T) for kind 1, (A1 A2, B1 . B2) for kind 2, diagonals set to diag(A1 A2)."""
    if p1.d != p2.d:
        raise ValueError(f"Dimension mismatch: {p1.d} vs {p2.d}")
    AA = p1.A @ p2.A
    if kind == 1:
        B = p1.B * p2.B.T
    elif kind == 2:
        B = p1.B * p2.B
    else:
        raise ValueError(f"Unsupported composition kind: {kind}. Available: [1, 2]")
    return MatrixPair(AA, tilde(B) + np.diag(np.diag(AA)))


def partial_action(m: CovariantMap, t: MatrixTriple) -> MatrixTriple:
    """Triple of (Phi (x) id)(X(t))."""
    return _compose_triples(m.triple, t)


def apply_to_first_factor(m: CovariantMap, X) -> np.ndarray:
    """Dense (Phi (x) id)(X) for any d^2 x d^2 matrix X."""
    d = bipartite_dimension(X)
    if d != m.d:
        raise ValueError(f"Bipartite matrix has d={d}, map acts on d={m.d}")
    T = np.asarray(X, dtype=complex).reshape(d, d, d, d)
    stack = T.transpose(1, 3, 0, 2)
    out = _apply_triple(m.triple, stack)
    return out.transpose(2, 0, 3, 1).reshape(d * d, d * d)


def kraus_from_choi(J, d: int, tol: Tolerance = Tolerance()) -> KrausSet:
    """Minimal Kraus pairs with J = sum_i |vec P_i><vec Q_i|.

    Hermitian J uses its eigendecomposition (Q_i = sign(lambda_i) P_i);
    otherwise the SVD gives the full-rank factorization.
    """
    J = as_square(J, "Choi matrix")
    if J.shape[0] != d * d:
        raise ValueError(f"Choi matrix is {J.shape[0]}x{J.shape[0]}, expected {d * d}")
    if is_hermitian(J, tol):
        vals, vecs = np.linalg.eigh((J + J.conj().T) / 2)
        scale = float(np.max(np.abs(vals))) if vals.size else 0.0
        keep = np.flatnonzero(np.abs(vals) > tol.rel_eps * scale) if scale > 0 else []
        left = [np.sqrt(abs(vals[k])) * vecs[:, k].reshape(d, d) for k in keep]
        right = [np.sign(vals[k]) * P for k, P in zip(keep, left)]
    else:
        U, s, Vh = np.linalg.svd(J)
        keep = np.flatnonzero(s > tol.rel_eps * s[0]) if s[0] > 0 else []
        left = [np.sqrt(s[k]) * U[:, k].reshape(d, d) for k in keep]
        right = [np.sqrt(s[k]) * Vh[k].conj().reshape(d, d) for k in keep]
    return KrausSet(tuple(left), tuple(right), d)


def kraus_extract(m: CovariantMap, tol: Tolerance = Tolerance()) -> KrausSet:
    k = kraus_from_choi(choi(m), m.d, tol)
    logger.debug("kraus_extract(%s, d=%d): rank %d (block rank %d)", m.map_name, m.d, k.rank,
                 rank_of(m.triple, m.klass, tol))
    return k


def _covariance_generators(d: int, klass: InvariantClass) -> List[Tuple[np.ndarray, np.ndarray]]:
    """(L, R) such that P -> L P R maps a Kraus family of a covariant map into another one."""
    if klass is InvariantClass.LDOI:
        gens = []
        for k in range(d):
            O = np.eye(d)
            O[k, k] = -1
            gens.append((O, O))
        return gens
    order = 2 ** d + 1
    gens = []
    for t in (1, 2):
        U = np.diag(np.exp(2j * np.pi * t * 2.0 ** np.arange(d) / order))
        if klass is InvariantClass.LDUI:
            gens.append((U, U))
        else:
            gens.append((U.conj().T, U))
    return gens


def _family_columns(family: Sequence[np.ndarray]) -> np.ndarray:
    return np.column_stack([P.reshape(-1) for P in family])


def _family_residual(images: np.ndarray, target: np.ndarray, tol: Tolerance) -> bool:
    return float(np.linalg.norm(images - target)) <= tol.threshold(float(np.linalg.norm(target)))


def covariance_span_test(k: KrausSet, klass: InvariantClass, tol: Tolerance = Tolerance()) -> bool:
    """Check the Kraus covariance condition on the class generators.

    For each generator, solve L P_i R = sum_j Z_ij P_j for Z by least squares and
    require L Q_i R = sum_j W_ij Q_j with W = (Z^*)^{-1}. One Z moves both families,
    so the rebuilt Choi matrix is invariant under the generator.

    Raises:
        ValueError: If the Kraus set is not minimal
    """
    if k.rank == 0:
        return True
    J = k.choi()
    rank = int(np.linalg.matrix_rank(J, tol=tol.threshold(float(np.linalg.norm(J, 2)))))
    if rank != k.rank:
        raise ValueError(f"Kraus set is not minimal: {k.rank} pairs for Choi rank {rank}")
    P_cols = _family_columns(k.left)
    Q_cols = _family_columns(k.right)
    for L, R in _covariance_generators(k.d, klass):
        P_images = _family_columns([L @ P @ R for P in k.left])
        Q_images = _family_columns([L @ Q @ R for Q in k.right])
        # columns: P_images = P_cols @ Z^T
        Zt, *_ = np.linalg.lstsq(P_cols, P_images, rcond=None)
        if not _family_residual(P_cols @ Zt, P_images, tol):
            return False
        Z = Zt.T
        try:
            W = np.linalg.inv(Z.conj().T)
        except np.linalg.LinAlgError:
            return False
        if not _family_residual(Q_cols @ W.T, Q_images, tol):
            return False
    return True


def as_covariant_map(klass: Union[str, InvariantClass], A, B=None, C=None) -> CovariantMap:
    """Build a map from raw matrices; a missing B or C slot becomes diag A."""
    klass = InvariantClass.parse(klass) if isinstance(klass, str) else klass
    A = as_matrix(A, "A")
    D = diag_part(A)
    B = D if B is None else B
    C = D if C is None else C
    return CovariantMap(klass, MatrixTriple(A, B, C))
