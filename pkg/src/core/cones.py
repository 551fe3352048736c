"""Positivity, PPT, realignment and separability certificates for invariant triples.

Separability of an invariant matrix is equivalent to its triple being TCP
(pairs: PCP). Deciding that is hard in general, so this module exposes:
- Necessary tests whose failure certifies entanglement (PPT, realignment,
  the TCP property battery)
- Sufficient constructions that return an explicit (V, W) witness whenever
  one can be built, and named criteria (Gurvits ball, (d+1)) otherwise
- Witness verification and witness algebra (phase fixes, lifts, sums)
"""

import logging
from dataclasses import dataclass, field
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import block_diag

from src.core.ldoi import (
    InvariantClass,
    MatrixPair,
    MatrixTriple,
    build,
    extract_triple,
    is_invariant,
    realign,
    tightest_class,
)
from src.core.matcore import (
    Tolerance,
    as_matrix,
    as_square,
    as_vector,
    comparison_matrix,
    diag_part,
    hermitian_part,
    is_diagonally_dominant,
    is_ewp,
    is_psd,
    matrix_norm,
    max_abs,
    phase_split,
    tilde,
)

logger = logging.getLogger("ldoi.cones")

CheckStatus = Literal["pass", "fail", "not_applicable"]


@dataclass(frozen=True, eq=False)
class TcpWitness:
    """Factor pair (V, W) of equal shape d x d'."""
    V: np.ndarray
    W: np.ndarray

    def __post_init__(self):
        V = as_matrix(self.V, "V")
        W = as_matrix(self.W, "W")
        if V.shape != W.shape:
            raise ValueError(f"Witness shape mismatch: V{V.shape}, W{W.shape}")
        V = V.copy()
        W = W.copy()
        V.flags.writeable = False
        W.flags.writeable = False
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "W", W)

    @property
    def d(self) -> int:
        return self.V.shape[0]

    @property
    def width(self) -> int:
        return self.V.shape[1]

    def scale(self, factor: float) -> "TcpWitness":
        """Witness of factor * (A, B, C) for factor >= 0."""
        if factor < 0:
            raise ValueError(f"Witness scale must be non-negative, got {factor}")
        return TcpWitness(np.sqrt(factor) * self.V, self.W)


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: CheckStatus
    margin: Optional[float] = None
    detail: str = ""


@dataclass(frozen=True)
class CertificateReport:
    """Per-check verdicts with signed margins (negative margin = violation)."""
    test: str
    checks: Tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    @property
    def failed(self) -> List[str]:
        return [c.name for c in self.checks if c.status == "fail"]

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise ValueError(f"Unknown check: {name}. Available: {[c.name for c in self.checks]}")

    def worst_margin(self) -> Optional[float]:
        margins = [c.margin for c in self.checks if c.margin is not None]
        return min(margins) if margins else None


@dataclass(frozen=True)
class SufficiencyResult:
    """Outcome of a sufficient test: certified (possibly with witness) or inconclusive."""
    status: str
    reason: str
    route: str = ""
    margin: Optional[float] = None
    witness: Optional[TcpWitness] = None

    @property
    def certified(self) -> bool:
        return self.status != "inconclusive"


@dataclass(frozen=True)
class SeparabilityCertificate:
    """A successful sufficient construction for a triple."""
    name: str
    witness: Optional[TcpWitness] = None
    margin: Optional[float] = None
    notes: Tuple[str, ...] = field(default_factory=tuple)


def _scale(t: MatrixTriple) -> float:
    return max(max_abs(M) for M in t.matrices())


def _check(name: str, ok: bool, margin: Optional[float], detail: str = "") -> CheckResult:
    if margin is not None:
        margin = float(margin)
        if not np.isfinite(margin):
            raise RuntimeError(f"Non-finite margin in check {name}")
    return CheckResult(name, "pass" if ok else "fail", margin, detail)


def _ewp_check(name: str, A: np.ndarray, tol: Tolerance) -> CheckResult:
    imag = max_abs(A.imag)
    margin = float(np.min(A.real)) if imag <= tol.abs_eps else -imag
    return _check(name, is_ewp(A, tol), margin)


def _psd_check(name: str, M: np.ndarray, tol: Tolerance) -> CheckResult:
    asym = max_abs(M - M.conj().T)
    margin = float(np.linalg.eigvalsh(hermitian_part(M))[0]) - asym
    return _check(name, is_psd(M, tol), margin)


def _self_adjoint_check(name: str, M: np.ndarray, tol: Tolerance) -> CheckResult:
    asym = max_abs(M - M.conj().T)
    return _check(name, asym <= tol.threshold(max_abs(M)), -asym)


def _product_check(name: str, A: np.ndarray, M: np.ndarray, tol: Tolerance) -> CheckResult:
    d = A.shape[0]
    if d == 1:
        return CheckResult(name, "not_applicable")
    off = ~np.eye(d, dtype=bool)
    gaps = (A.real * A.real.T - np.abs(M) ** 2)[off]
    margin = float(np.min(gaps))
    scale = max(max_abs(A), max_abs(M)) ** 2
    return _check(name, margin >= -tol.threshold(scale), margin)


def psd_test(t: MatrixTriple, tol: Tolerance = Tolerance()) -> CertificateReport:
    """X(A, B, C) is PSD iff A is EWP, B PSD, C self-adjoint and A_ij A_ji >= |C_ij|^2."""
    A, B, C = t.matrices()
    return CertificateReport("psd", (
        _ewp_check("A_entrywise_nonnegative", A, tol),
        _psd_check("B_psd", B, tol),
        _self_adjoint_check("C_self_adjoint", C, tol),
        _product_check("AA_dominates_C", A, C, tol),
    ))


def ppt_test(t: MatrixTriple, tol: Tolerance = Tolerance()) -> CertificateReport:
    """PSD of X and of its partial transpose (the triple (A, C, B))."""
    A, B, C = t.matrices()
    return CertificateReport("ppt", psd_test(t, tol).checks + (
        _psd_check("C_psd", C, tol),
        _self_adjoint_check("B_self_adjoint", B, tol),
        _product_check("AA_dominates_B", A, B, tol),
    ))


def _realignment_margin(t: MatrixTriple) -> Tuple[float, float]:
    A, B, C = t.matrices()
    lhs = matrix_norm(A, "entrywise_one") - matrix_norm(A, "trace")
    upper = np.triu(np.maximum(np.abs(B), np.abs(C)), k=1)
    return lhs - 2 * float(upper.sum()), matrix_norm(A, "entrywise_one")


def realignment_test(t: MatrixTriple, tol: Tolerance = Tolerance()) -> CertificateReport:
    """||A||_1 - ||A||_Tr >= 2 sum_{i<j} max(|B_ij|, |C_ij|)."""
    margin, scale = _realignment_margin(t)
    return CertificateReport("realignment", (
        _check("realignment", margin >= -tol.threshold(scale), margin),
    ))


def quantum_state_test(t: MatrixTriple, tol: Tolerance = Tolerance()) -> bool:
    if not psd_test(t, tol).passed:
        return False
    return abs(complex(t.A.sum()) - 1) <= tol.threshold(1.0)


def _nuclear_gap(M: np.ndarray) -> float:
    return matrix_norm(M, "entrywise_one") - matrix_norm(M, "trace")


def tcp_necessary_battery(t: MatrixTriple, tol: Tolerance = Tolerance()) -> CertificateReport:
    """Properties every TCP triple has; any failure rules out TCP."""
    A, B, C = t.matrices()
    gap_a = _nuclear_gap(A)
    scale = matrix_norm(A, "entrywise_one")
    gap_b = gap_a - _nuclear_gap(B)
    gap_c = gap_a - _nuclear_gap(C)
    combined, _ = _realignment_margin(t)
    return CertificateReport("tcp_necessary", (
        _ewp_check("A_entrywise_nonnegative", A, tol),
        _psd_check("B_psd", B, tol),
        _psd_check("C_psd", C, tol),
        _product_check("AA_dominates_B", A, B, tol),
        _product_check("AA_dominates_C", A, C, tol),
        _check("nuclear_gap_B", gap_b >= -tol.threshold(scale), gap_b),
        _check("nuclear_gap_C", gap_c >= -tol.threshold(scale), gap_c),
        _check("realignment", combined >= -tol.threshold(scale), combined),
    ))


# Witness algebra

def triple_from_witness(w: TcpWitness) -> MatrixTriple:
    """A = (V.V*)(W.W*)^*, B = (V.W)(V.W)^*, C = (V.W*)(V.W*)^* with entrywise products."""
    V, W = w.V, w.W
    VW = V * W
    VWbar = V * W.conj()
    A = (np.abs(V) ** 2) @ (np.abs(W) ** 2).T
    return MatrixTriple(A.astype(complex), VW @ VW.conj().T, VWbar @ VWbar.conj().T)


def pair_from_witness(w: TcpWitness) -> MatrixPair:
    t = triple_from_witness(w)
    return MatrixPair(t.A, t.B)


def verify_tcp_witness(t: MatrixTriple, w: TcpWitness, tol: Tolerance = Tolerance()) -> bool:
    if w.d != t.d:
        return False
    gap = triple_from_witness(w).distance(t)
    return gap <= tol.threshold(_scale(t))


def verify_pcp_witness(p: MatrixPair, w: TcpWitness, tol: Tolerance = Tolerance()) -> bool:
    if w.d != p.d:
        return False
    q = pair_from_witness(w)
    gap = max(max_abs(q.A - p.A), max_abs(q.B - p.B))
    return gap <= tol.threshold(max(max_abs(p.A), max_abs(p.B)))


def combine_witnesses(items: Sequence[Tuple[float, TcpWitness]]) -> TcpWitness:
    """Witness of sum_k lambda_k t_k from witnesses of the t_k (lambda_k >= 0)."""
    if not items:
        raise ValueError("Need at least one witness to combine")
    scaled = [w.scale(lam) for lam, w in items]
    d = {w.d for w in scaled}
    if len(d) != 1:
        raise ValueError(f"Witness dimensions differ: {sorted(d)}")
    return TcpWitness(np.hstack([w.V for w in scaled]), np.hstack([w.W for w in scaled]))


def direct_sum_witness(w1: TcpWitness, w2: TcpWitness) -> TcpWitness:
    return TcpWitness(block_diag(w1.V, w2.V), block_diag(w1.W, w2.W))


def restrict_witness(w: TcpWitness, indices: Sequence[int]) -> TcpWitness:
    """Rows of the witness for a principal subtriple."""
    idx = list(indices)
    if not idx:
        raise ValueError("Index set must be non-empty")
    return TcpWitness(w.V[idx, :], w.W[idx, :])


def diagonal_witness(A, tol: Tolerance = Tolerance()) -> TcpWitness:
    """Witness of the diagonal triple (A, diag A, diag A) for entrywise non-negative A."""
    A = as_square(A, "A")
    if not is_ewp(A, tol):
        raise ValueError("Diagonal witness needs an entrywise non-negative A")
    d = A.shape[0]
    R = np.clip(A.real, 0, None)
    support = np.argwhere(R > 0)
    if len(support) == 0:
        return TcpWitness(np.zeros((d, 1)), np.zeros((d, 1)))
    V = np.zeros((d, len(support)))
    W = np.zeros((d, len(support)))
    for k, (i, j) in enumerate(support):
        V[i, k] = np.sqrt(R[i, j])
        W[j, k] = 1.0
    return TcpWitness(V, W)


def extremal_tcp_ray(v, w) -> Tuple[MatrixTriple, TcpWitness]:
    v = as_vector(v, "v")
    w = as_vector(w, "w")
    if v.shape != w.shape:
        raise ValueError(f"v and w must have equal length, got {v.size} and {w.size}")
    if not np.any(v) or not np.any(w):
        raise ValueError("Extremal rays need non-zero vectors")
    witness = TcpWitness(v[:, None], w[:, None])
    return triple_from_witness(witness), witness


def tcp_from_pcp_phasefix(
    p: MatrixPair,
    w: TcpWitness,
    variant: Literal["B", "B_transpose"] = "B",
    tol: Tolerance = Tolerance(),
) -> Tuple[MatrixTriple, TcpWitness]:
    """Turn a PCP witness of (A, B) into a TCP witness of (A, B, B) or (A, B, B^T).

    Raises:
        ValueError: If the witness does not certify the pair
    """
    if not verify_pcp_witness(p, w, tol):
        raise ValueError("Witness does not certify the pair")
    abs_v, phase_v = phase_split(w.V)
    abs_w, phase_w = phase_split(w.W)
    if variant == "B":
        return MatrixTriple(p.A, p.B, p.B), TcpWitness(w.V * phase_w, abs_w)
    if variant == "B_transpose":
        return MatrixTriple(p.A, p.B, p.B.T), TcpWitness(abs_v, w.W * phase_v)
    raise ValueError(f"Unsupported variant: {variant}. Available: ['B', 'B_transpose']")


def lift_pair_witness(
    p: MatrixPair,
    w: TcpWitness,
    klass: InvariantClass,
    tol: Tolerance = Tolerance(),
) -> Tuple[MatrixTriple, TcpWitness]:
    """TCP witness of the LDUI triple (A, diag A, C) or CLDUI triple (A, B, diag A).

    The pair witness is copied 2d-1 times with rows rotated by distinct phases,
    which cancels the off-diagonal part of the slot the class fixes to diag A.
    """
    if not verify_pcp_witness(p, w, tol):
        raise ValueError("Witness does not certify the pair")
    d = p.d
    copies = 2 * d - 1
    rows = np.arange(d)[:, None]
    V_parts, W_parts = [], []
    for t in range(copies):
        u = np.exp(2j * np.pi * t * rows / copies)
        V_parts.append(u * w.V / np.sqrt(copies))
        if klass is InvariantClass.LDUI:
            W_parts.append(u * w.W.conj())
        elif klass is InvariantClass.CLDUI:
            W_parts.append(u.conj() * w.W)
        else:
            raise ValueError("Pair witnesses lift only into LDUI or CLDUI")
    witness = TcpWitness(np.hstack(V_parts), np.hstack(W_parts))
    return p.to_triple(klass), witness


# Sufficient constructions

def _dominant_witness(A: np.ndarray, B: np.ndarray, tol: Tolerance) -> Optional[TcpWitness]:
    """Explicit PCP witness of (A, B) when B is Hermitian and diagonally dominant."""
    d = A.shape[0]
    A = A.real.astype(float)
    eps = tol.threshold(max(max_abs(A), max_abs(B)))
    used = np.zeros((d, d))
    V_cols, W_cols = [], []
    for i in range(d):
        for j in range(i + 1, d):
            b = abs(B[i, j])
            if b <= eps:
                continue
            if A[i, j] <= 0 or A[j, i] <= 0:
                return None
            t = b * np.sqrt(A[i, j] / A[j, i])
            v = np.zeros(d, dtype=complex)
            x = np.zeros(d, dtype=complex)
            v[i] = 1.0
            x[i] = np.sqrt(b)
            x[j] = np.sqrt(t)
            v[j] = np.sqrt(b) * np.conj(B[i, j] / b) / np.sqrt(t)
            # (v.x)(v.x)^* reproduces the 2x2 block [[b, B_ij], [conj B_ij, b]]
            V_cols.append(v)
            W_cols.append(x)
            used[i, i] += b
            used[j, j] += b
            used[i, j] += t
            used[j, i] += b * b / t
    remainder = A - used
    if np.min(remainder) < -eps:
        return None
    remainder = np.clip(remainder, 0, None)
    rest = diagonal_witness(remainder)
    if not V_cols:
        return rest
    pieces = TcpWitness(np.column_stack(V_cols), np.column_stack(W_cols))
    return TcpWitness(np.hstack([pieces.V, rest.V]), np.hstack([pieces.W, rest.W]))


def _scaling_vector(M: np.ndarray, tol: Tolerance) -> Optional[np.ndarray]:
    """Positive x with M x >= 0 for a PSD comparison matrix M, if one is found."""
    candidates = []
    try:
        candidates.append(np.linalg.solve(M, np.ones(M.shape[0])))
    except np.linalg.LinAlgError:
        pass
    _, vecs = np.linalg.eigh(M)
    candidates.append(np.abs(vecs[:, 0]))
    eps = tol.threshold(max_abs(M))
    for x in candidates:
        if np.all(np.isfinite(x)) and np.min(x) > eps and np.min(M @ x) >= -eps * np.max(x):
            return x / np.max(x)
    return None


def cp_factorization(A, tol: Tolerance = Tolerance()) -> Optional[np.ndarray]:
    """Entrywise non-negative N with A = N N^T, for two recognizable CP shapes.

    Handles non-negative diagonally dominant A, and A = m J + R with m the
    smallest off-diagonal entry and R non-negative diagonally dominant.
    Returns None when neither shape applies.
    """
    A = as_square(A, "A")
    eps = tol.threshold(max_abs(A))
    if max_abs(A - A.T) > eps or not is_ewp(A, tol):
        return None
    A = A.real
    d = A.shape[0]

    def dominant_factor(R: np.ndarray) -> Optional[np.ndarray]:
        slack = np.diag(R) - (R.sum(axis=1) - np.diag(R))
        if np.min(slack) < -eps:
            return None
        cols = []
        for i in range(d):
            for j in range(i + 1, d):
                if R[i, j] > 0:
                    col = np.zeros(d)
                    col[i] = col[j] = np.sqrt(R[i, j])
                    cols.append(col)
        cols.extend(np.sqrt(max(s, 0.0)) * np.eye(d)[i] for i, s in enumerate(slack) if s > 0)
        return np.column_stack(cols) if cols else np.zeros((d, 1))

    N = dominant_factor(A)
    if N is None and d > 1:
        m = float(np.min(A[~np.eye(d, dtype=bool)]))
        if m > 0:
            rest = dominant_factor(A - m)
            if rest is not None:
                N = np.hstack([np.sqrt(m) * np.ones((d, 1)), rest])
    if N is None or max_abs(N @ N.T - A) > eps:
        return None
    return N


def cp_to_tcp(A, N, tol: Tolerance = Tolerance()) -> Tuple[MatrixTriple, TcpWitness]:
    """Witness of (A, A, A) from a non-negative factorization A = N N^T.

    The witness is V = W = sqrt(N) entrywise, so that each Hadamard square
    |V|^2 |W|^2^T and (V.W)(V.W)^* reproduces N N^T.

    Raises:
        ValueError: If N has negative entries or does not factor A
    """
    A = as_square(A, "A")
    N = as_matrix(N, "N")
    if not is_ewp(N, tol):
        raise ValueError("Factor N must be entrywise non-negative")
    if N.shape[0] != A.shape[0]:
        raise ValueError(f"Factor N has {N.shape[0]} rows, expected {A.shape[0]}")
    NN = N @ N.T
    if max_abs(NN - A) > tol.threshold(max_abs(A)):
        raise ValueError(f"A differs from N N^T by {max_abs(NN - A):.3e}")
    root = np.sqrt(np.clip(N.real, 0, None))
    return MatrixTriple(A, A, A), TcpWitness(root, root)


def _cp_split_witness(p: MatrixPair, tol: Tolerance) -> Optional[TcpWitness]:
    """(A, B) = (B, B) + (A - B, 0) with B completely positive and A - B >= 0 off the diagonal."""
    N = cp_factorization(p.B, tol)
    if N is None:
        return None
    rest = tilde(p.A - p.B)
    if not is_ewp(rest, tol):
        return None
    _, cp_witness = cp_to_tcp(p.B.real, N, tol)
    return combine_witnesses([(1.0, cp_witness), (1.0, diagonal_witness(np.clip(rest.real, 0, None)))])


def _pair_preconditions(p: MatrixPair, tol: Tolerance) -> Optional[str]:
    if not is_ewp(p.A, tol):
        return "A is not entrywise non-negative"
    if not is_psd(p.B, tol):
        return "B is not positive semi-definite"
    if _product_check("AA_dominates_B", p.A, p.B, tol).status == "fail":
        return "A_ij A_ji < |B_ij|^2 for some pair"
    return None


def pcp_sufficient(p: MatrixPair, tol: Tolerance = Tolerance()) -> SufficiencyResult:
    """Certify (A, B) as PCP via diagonal dominance, a PSD comparison matrix or a CP split.

    Returns:
        SufficiencyResult with status "certified_pcp" (witness attached when it
        could be built and verified) or "inconclusive" with the reason
    """
    problem = _pair_preconditions(p, tol)
    if problem is not None:
        return SufficiencyResult("inconclusive", problem)

    A, B = np.asarray(p.A), np.asarray(p.B)
    M = comparison_matrix(B)
    m_min = float(np.linalg.eigvalsh(M)[0])

    if is_diagonally_dominant(B, tol):
        witness = _dominant_witness(A, B, tol)
        if witness is not None and verify_pcp_witness(p, witness, tol):
            return SufficiencyResult("certified_pcp", "B is diagonally dominant", "diagonal_dominance",
                                     m_min, witness)
        return SufficiencyResult("certified_pcp", "B is diagonally dominant", "diagonal_dominance", m_min)

    if is_psd(M, tol):
        x = _scaling_vector(M, tol)
        if x is not None:
            D = np.diag(x)
            witness = _dominant_witness(D @ A @ D, D @ B @ D, tol)
            if witness is not None:
                root = np.sqrt(x)[:, None]
                witness = TcpWitness(witness.V / root, witness.W / root)
                if verify_pcp_witness(p, witness, tol):
                    return SufficiencyResult("certified_pcp", "comparison matrix is PSD",
                                             "comparison_matrix", m_min, witness)
        logger.debug("comparison matrix PSD but no scaling witness found")
        return SufficiencyResult("certified_pcp", "comparison matrix is PSD", "comparison_matrix", m_min)

    witness = _cp_split_witness(p, tol)
    if witness is not None and verify_pcp_witness(p, witness, tol):
        return SufficiencyResult("certified_pcp", "B is completely positive and A - B >= 0", "cp_split",
                                 m_min, witness)

    return SufficiencyResult("inconclusive", "comparison matrix is not PSD", margin=m_min)


def a_equals_j_pcp(B, tol: Tolerance = Tolerance()) -> Tuple[MatrixPair, TcpWitness]:
    """PCP witness of (J, B) for a correlation matrix B: B = W W^*, V = all-ones.

    Raises:
        ValueError: If B is not a correlation matrix
    """
    B = as_square(B, "B")
    if not is_psd(B, tol) or max_abs(np.diag(B) - 1) > tol.threshold(1.0):
        raise ValueError("B must be a correlation matrix (PSD with unit diagonal)")
    vals, vecs = np.linalg.eigh(hermitian_part(B))
    keep = vals > tol.threshold(float(np.max(np.abs(vals))))
    W = vecs[:, keep] * np.sqrt(vals[keep])
    d = B.shape[0]
    return MatrixPair(np.ones((d, d)), B), TcpWitness(np.ones((d, W.shape[1])), W)


def a_equals_j_rank_one_tcp(b, c, tol: Tolerance = Tolerance()) -> Tuple[MatrixTriple, TcpWitness]:
    """Width-1 witness of (J, |b><b|, |c><c|) for unimodular b, c."""
    b = as_vector(b, "b")
    c = as_vector(c, "c")
    if b.shape != c.shape:
        raise ValueError(f"b and c must have equal length, got {b.size} and {c.size}")
    if max_abs(np.abs(b) - 1) > tol.abs_eps or max_abs(np.abs(c) - 1) > tol.abs_eps:
        raise ValueError("b and c must have unit-modulus entries")
    v = np.sqrt(b * c)
    w = b / v
    witness = TcpWitness(v[:, None], w[:, None])
    d = b.size
    return MatrixTriple(np.ones((d, d)), np.outer(b, b.conj()), np.outer(c, c.conj())), witness


def gurvits_ball_test(t: MatrixTriple, tol: Tolerance = Tolerance()) -> SufficiencyResult:
    """Separable ball around the normalized identity: Tr X^2 <= (Tr X)^2 / (d^2 - 1)."""
    if not psd_test(t, tol).passed:
        return SufficiencyResult("inconclusive", "triple is not PSD")
    d = t.d
    lhs = (
        float(np.sum(np.abs(t.A) ** 2))
        + float(np.sum(np.abs(tilde(t.B)) ** 2))
        + float(np.sum(np.abs(tilde(t.C)) ** 2))
    )
    trace = float(np.sum(t.A.real))
    rhs = trace ** 2 / (d * d - 1) if d > 1 else np.inf
    margin = float(rhs - lhs) if np.isfinite(rhs) else float(trace ** 2)
    if margin >= -tol.threshold(trace ** 2):
        return SufficiencyResult("certified_tcp", "inside the separable ball", "gurvits_ball", margin)
    return SufficiencyResult("inconclusive", "outside the separable ball", "gurvits_ball", margin)


def dplusone_test(
    t: MatrixTriple,
    side: Literal["row", "col"] = "row",
    tol: Tolerance = Tolerance(),
) -> SufficiencyResult:
    """(d+1) X >= A_row (x) I (row) or I (x) A_col (col), both PSD conditions on triples."""
    if not psd_test(t, tol).passed:
        return SufficiencyResult("inconclusive", "triple is not PSD")
    d = t.d
    ones = np.ones(d)
    if side == "row":
        R = np.outer(t.A.sum(axis=1), ones)
    elif side == "col":
        R = np.outer(ones, t.A.sum(axis=0))
    else:
        raise ValueError(f"Unsupported side: {side}. Available: ['row', 'col']")
    shifted = t.scale(d + 1) - MatrixTriple.diagonal(R)
    report = psd_test(shifted, tol)
    margin = report.worst_margin()
    if report.passed:
        return SufficiencyResult("certified_tcp", f"(d+1) criterion holds ({side})", f"dplusone_{side}", margin)
    return SufficiencyResult("inconclusive", f"(d+1) criterion fails ({side}): {report.failed}",
                             f"dplusone_{side}", margin)


def extremal_psd_ray(
    klass: InvariantClass,
    kind: Literal["ii", "pair", "diag", "offdiag"],
    d: int,
    i: int = 0,
    j: int = 1,
    x: Optional[Sequence[complex]] = None,
) -> MatrixTriple:
    """Unit-rank PSD generator of the class's PSD cone.

    Kinds:
        ii:      |ii><ii|
        pair:    |y><y| with y = x0|ij> + x1|ji>, i < j
        diag:    |y><y| with y = sum_k x_k |kk>
        offdiag: |ij><ij|, i != j
    """
    if d < 1:
        raise ValueError(f"d must be positive, got {d}")
    y = np.zeros(d * d, dtype=complex)
    if kind == "ii":
        if not 0 <= i < d:
            raise ValueError(f"Index {i} out of range for d={d}")
        y[i * d + i] = 1
    elif kind in ("pair", "offdiag"):
        if not (0 <= i < d and 0 <= j < d and i != j):
            raise ValueError(f"Need distinct indices in range for d={d}, got ({i}, {j})")
        if kind == "pair":
            if i > j:
                raise ValueError("pair rays need i < j")
            coeffs = as_vector(x if x is not None else (1, 1), "x")
            if coeffs.size != 2:
                raise ValueError("pair rays need a 2-vector x")
            y[i * d + j], y[j * d + i] = coeffs
        else:
            y[i * d + j] = 1
    elif kind == "diag":
        coeffs = as_vector(x if x is not None else np.ones(d), "x")
        if coeffs.size != d:
            raise ValueError(f"diag rays need a {d}-vector x")
        y[np.arange(d) * (d + 1)] = coeffs
    else:
        raise ValueError(f"Unsupported ray kind: {kind}. Available: ['ii', 'pair', 'diag', 'offdiag']")
    X = np.outer(y, y.conj())
    if not is_invariant(X, klass):
        raise ValueError(f"Ray kind {kind} does not lie in {klass.value}")
    return extract_triple(X)


def _verified(t: MatrixTriple, witness: Optional[TcpWitness], tol: Tolerance) -> Optional[TcpWitness]:
    if witness is not None and verify_tcp_witness(t, witness, tol):
        return witness
    return None


def _constant_a(t: MatrixTriple, tol: Tolerance) -> Optional[float]:
    c = float(t.A[0, 0].real)
    if c > tol.abs_eps and max_abs(t.A - c) <= tol.threshold(c):
        return c
    return None


def _rank_one_unimodular(M: np.ndarray, tol: Tolerance) -> Optional[np.ndarray]:
    z = M[:, 0] / np.sqrt(M[0, 0]) if M[0, 0].real > 0 else None
    if z is None or max_abs(np.abs(z) - 1) > tol.threshold(1.0):
        return None
    if max_abs(np.outer(z, z.conj()) - M) > tol.threshold(1.0):
        return None
    return z


def certify_tcp(t: MatrixTriple, tol: Tolerance = Tolerance()) -> Optional[SeparabilityCertificate]:
    """Run the sufficient constructions in fixed order and return the first success.

    Witness-producing routes run first (diagonal, pair certificates lifted to
    the class, PT-invariant phase fixes, A = J constructions); the Gurvits ball
    and (d+1) criteria, which certify without a witness, run last.
    """
    if not psd_test(t, tol).passed:
        return None
    A, B, C = t.matrices()
    D = diag_part(A)
    eps = tol.threshold(_scale(t))
    klass = tightest_class(t, tol)

    if max_abs(B - D) <= eps and max_abs(C - D) <= eps:
        witness = _verified(t, diagonal_witness(A, tol), tol)
        if witness is not None:
            return SeparabilityCertificate("diagonal", witness)

    if klass is not InvariantClass.LDOI:
        pair = t.pair(klass)
        result = pcp_sufficient(pair, tol)
        if result.certified:
            if result.witness is None:
                return SeparabilityCertificate(f"pcp_{result.route}", None, result.margin, (result.reason,))
            _, lifted = lift_pair_witness(pair, result.witness, klass, tol)
            witness = _verified(t, lifted, tol)
            if witness is not None:
                return SeparabilityCertificate(f"pcp_{result.route}", witness, result.margin, (result.reason,))

    for variant, partner in (("B", B), ("B_transpose", B.T)):
        if max_abs(C - partner) > eps:
            continue
        pair = MatrixPair(A, B)
        result = pcp_sufficient(pair, tol)
        if result.certified and result.witness is not None:
            _, fixed = tcp_from_pcp_phasefix(pair, result.witness, variant, tol)
            witness = _verified(t, fixed, tol)
            if witness is not None:
                return SeparabilityCertificate(f"pt_invariant_{result.route}", witness, result.margin,
                                               (result.reason,))
        elif result.certified:
            return SeparabilityCertificate(f"pt_invariant_{result.route}", None, result.margin, (result.reason,))

    c = _constant_a(t, tol)
    if c is not None:
        cert = _a_equals_j_certificate(t, c, klass, tol)
        if cert is not None:
            return cert

    for test in (gurvits_ball_test(t, tol), dplusone_test(t, "row", tol), dplusone_test(t, "col", tol)):
        if test.certified:
            return SeparabilityCertificate(test.route, None, test.margin, (test.reason,))
    return None


def _a_equals_j_certificate(
    t: MatrixTriple, c: float, klass: InvariantClass, tol: Tolerance
) -> Optional[SeparabilityCertificate]:
    unit = t.scale(1 / c)
    try:
        if klass is not InvariantClass.LDOI:
            pair, witness = a_equals_j_pcp(unit.pair(klass).B, tol)
            _, lifted = lift_pair_witness(pair, witness, klass, tol)
            witness = _verified(t, lifted.scale(c), tol)
        elif max_abs(unit.B - unit.C) <= tol.threshold(1.0):
            pair, witness = a_equals_j_pcp(unit.B, tol)
            _, fixed = tcp_from_pcp_phasefix(pair, witness, "B", tol)
            witness = _verified(t, fixed.scale(c), tol)
        else:
            b = _rank_one_unimodular(unit.B, tol)
            cc = _rank_one_unimodular(unit.C, tol)
            if b is None or cc is None:
                return None
            _, witness = a_equals_j_rank_one_tcp(b, cc, tol)
            witness = _verified(t, witness.scale(c), tol)
    except ValueError as e:
        logger.debug("A = J construction skipped: %s", e)
        return None
    if witness is None:
        return None
    return SeparabilityCertificate("a_equals_j", witness)


def dense_realignment_holds(t: MatrixTriple, tol: Tolerance = Tolerance()) -> bool:
    """||X^R||_Tr <= Tr X evaluated on the dense matrix."""
    X = build(InvariantClass.LDOI, t)
    lhs = matrix_norm(realign(X), "trace")
    trace = float(np.trace(X).real)
    return lhs <= trace + tol.threshold(abs(trace))
