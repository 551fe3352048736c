"""Local diagonal unitary / orthogonal invariant bipartite matrices.

An invariant matrix on C^d (x) C^d is fixed by a triple (A, B, C) of d x d
matrices with equal diagonals. With the row-major fusion r = i1*d + i2:

    X[(i,j),(i,j)] = A_ij        X[(i,i),(j,j)] = B_ij        X[(i,j),(j,i)] = C_ij

LDUI matrices have B = diag A, CLDUI matrices have C = diag A. This module
builds and reads such matrices, projects onto the invariant subspaces and
exposes the block, spectral and leg-permutation structure.
"""

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import block_diag

from src.config.parameters import EXACT_AVERAGE_MAX_DIM, MC_PHASE_BATCH
from src.core.matcore import (
    Tolerance,
    as_square,
    diag_part,
    is_hermitian,
    max_abs,
)

logger = logging.getLogger("ldoi.core")


class InvariantClass(str, Enum):
    """Invariance class of a bipartite matrix (and covariance class of its map)."""
    LDUI = "LDUI"
    CLDUI = "CLDUI"
    LDOI = "LDOI"

    @property
    def map_name(self) -> str:
        return _MAP_NAMES[self]

    @classmethod
    def parse(cls, name: str) -> "InvariantClass":
        """Accept either a matrix class (LDUI) or a map class (DUC)."""
        if isinstance(name, cls):
            return name
        key = str(name).strip().upper()
        if key in cls.__members__:
            return cls[key]
        for klass, map_name in _MAP_NAMES.items():
            if key == map_name:
                return klass
        available = list(cls.__members__) + list(_MAP_NAMES.values())
        raise ValueError(f"Unsupported class: {name}. Available: {available}")


_MAP_NAMES = {
    InvariantClass.LDUI: "DUC",
    InvariantClass.CLDUI: "CDUC",
    InvariantClass.LDOI: "DOC",
}


def _frozen(M: np.ndarray) -> np.ndarray:
    out = np.array(M, dtype=complex, copy=True)
    out.flags.writeable = False
    return out


def _check_diagonals(name: str, first: np.ndarray, second: np.ndarray) -> None:
    scale = max(max_abs(first), max_abs(second))
    gap = max_abs(np.diag(first) - np.diag(second))
    if gap > Tolerance().threshold(scale):
        raise ValueError(f"{name} diagonals differ by {gap:.3e}")


@dataclass(frozen=True, eq=False)
class MatrixTriple:
    """(A, B, C) with diag A = diag B = diag C."""
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        A = as_square(self.A, "A")
        B = as_square(self.B, "B")
        C = as_square(self.C, "C")
        if not (A.shape == B.shape == C.shape):
            raise ValueError(f"Triple dimension mismatch: A{A.shape}, B{B.shape}, C{C.shape}")
        _check_diagonals("A and B", A, B)
        _check_diagonals("A and C", A, C)
        object.__setattr__(self, "A", _frozen(A))
        object.__setattr__(self, "B", _frozen(B))
        object.__setattr__(self, "C", _frozen(C))

    @property
    def d(self) -> int:
        return self.A.shape[0]

    @classmethod
    def zeros(cls, d: int) -> "MatrixTriple":
        Z = np.zeros((d, d), dtype=complex)
        return cls(Z, Z, Z)

    @classmethod
    def diagonal(cls, A) -> "MatrixTriple":
        """The diagonal triple (A, diag A, diag A)."""
        A = as_square(A, "A")
        D = diag_part(A)
        return cls(A, D, D)

    def promote(self, klass: InvariantClass) -> "MatrixTriple":
        """Replace the slot the class ignores by diag A."""
        D = diag_part(self.A)
        if klass is InvariantClass.LDUI:
            return MatrixTriple(self.A, D, self.C)
        if klass is InvariantClass.CLDUI:
            return MatrixTriple(self.A, self.B, D)
        return self

    def pair(self, klass: InvariantClass) -> "MatrixPair":
        """(A, C) for LDUI, (A, B) for CLDUI."""
        if klass is InvariantClass.LDUI:
            return MatrixPair(self.A, self.C)
        if klass is InvariantClass.CLDUI:
            return MatrixPair(self.A, self.B)
        raise ValueError("Only LDUI and CLDUI triples reduce to a pair")

    def matrices(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.A, self.B, self.C

    def scale(self, factor: complex) -> "MatrixTriple":
        return MatrixTriple(factor * self.A, factor * self.B, factor * self.C)

    def __add__(self, other: "MatrixTriple") -> "MatrixTriple":
        return MatrixTriple(self.A + other.A, self.B + other.B, self.C + other.C)

    def __sub__(self, other: "MatrixTriple") -> "MatrixTriple":
        return MatrixTriple(self.A - other.A, self.B - other.B, self.C - other.C)

    def distance(self, other: "MatrixTriple") -> float:
        """Max-entry distance over the three matrices."""
        if self.d != other.d:
            return float("inf")
        return max(max_abs(x - y) for x, y in zip(self.matrices(), other.matrices()))

    def allclose(self, other: "MatrixTriple", atol: float = 1e-10) -> bool:
        return self.distance(other) <= atol


@dataclass(frozen=True, eq=False)
class MatrixPair:
    """(A, B) with diag A = diag B."""
    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = as_square(self.A, "A")
        B = as_square(self.B, "B")
        if A.shape != B.shape:
            raise ValueError(f"Pair dimension mismatch: A{A.shape}, B{B.shape}")
        _check_diagonals("A and B", A, B)
        object.__setattr__(self, "A", _frozen(A))
        object.__setattr__(self, "B", _frozen(B))

    @property
    def d(self) -> int:
        return self.A.shape[0]

    def to_triple(self, klass: InvariantClass) -> MatrixTriple:
        """LDUI: (A, diag A, B). CLDUI: (A, B, diag A)."""
        D = diag_part(self.A)
        if klass is InvariantClass.LDUI:
            return MatrixTriple(self.A, D, self.B)
        if klass is InvariantClass.CLDUI:
            return MatrixTriple(self.A, self.B, D)
        raise ValueError("A pair embeds only into LDUI or CLDUI")


def _index_grids(d: int):
    I, J = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    return I, J, I != J


def bipartite_dimension(X) -> int:
    """Local dimension d of a d^2 x d^2 matrix."""
    X = as_square(X, "bipartite matrix")
    n = X.shape[0]
    d = int(round(np.sqrt(n)))
    if d * d != n:
        raise ValueError(f"Bipartite matrix size {n} is not a perfect square")
    return d


def build(klass: InvariantClass, triple: MatrixTriple) -> np.ndarray:
    """Place the triple into a d^2 x d^2 matrix; all other entries are zero."""
    t = triple.promote(klass)
    d = t.d
    I, J, off = _index_grids(d)
    X = np.zeros((d * d, d * d), dtype=complex)
    matched = I * d + J
    X[matched, matched] = t.A
    X[(I * d + I)[off], (J * d + J)[off]] = t.B[off]
    X[matched[off], (J * d + I)[off]] = t.C[off]
    return X


def extract_triple(X) -> MatrixTriple:
    """Read (A, B, C) off the three invariant index patterns."""
    d = bipartite_dimension(X)
    X = np.asarray(X, dtype=complex)
    I, J, _ = _index_grids(d)
    A = X[I * d + J, I * d + J]
    B = X[I * d + I, J * d + J]
    C = X[I * d + J, J * d + I]
    return MatrixTriple(A, B, C)


def project(X, klass: InvariantClass) -> np.ndarray:
    """Orthogonal projection onto the class subspace."""
    return build(klass, extract_triple(X))


def _sign_factors(d: int) -> np.ndarray:
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=d)))
    return np.einsum("si,sj->sij", signs, signs).reshape(len(signs), d * d)


def _phase_factors(u: np.ndarray, klass: InvariantClass) -> np.ndarray:
    second = u if klass is InvariantClass.LDUI else u.conj()
    S, d = u.shape
    return np.einsum("si,sj->sij", u, second).reshape(S, d * d)


def _exact_phase_vectors(d: int) -> np.ndarray:
    # Exponents 2^k make every pair sum 2^a + 2^b unique, so averaging over the
    # cyclic group of order 2^d + 1 keeps exactly the invariant monomials.
    order = 2 ** d + 1
    weights = 2 ** np.arange(d)
    t = np.arange(order)[:, None]
    return np.exp(2j * np.pi * t * weights / order)


def average_oracle(
    X,
    klass: InvariantClass,
    mode: Literal["exact_sign", "mc_phase"] = "exact_sign",
    samples: int = 10_000,
    seed: int = 0,
) -> np.ndarray:
    """Group average of X over local diagonal signs (LDOI) or phases (LDUI/CLDUI).

    Args:
        X: d^2 x d^2 matrix
        klass: Invariance class to average over
        mode: "exact_sign" for the exact finite-group average, "mc_phase" for a
            seeded Monte-Carlo estimate
        samples: Sample count for mc_phase
        seed: Seed for mc_phase

    Returns:
        The averaged matrix

    Raises:
        ValueError: If d is too large for the exact mode or samples < 1
    """
    d = bipartite_dimension(X)
    X = np.asarray(X, dtype=complex)

    if mode == "exact_sign":
        if d > EXACT_AVERAGE_MAX_DIM:
            raise ValueError(
                f"Exact averaging supports d <= {EXACT_AVERAGE_MAX_DIM}, got d={d}"
            )
        if klass is InvariantClass.LDOI:
            F = _sign_factors(d)
        else:
            F = _phase_factors(_exact_phase_vectors(d), klass)
        weight = F.T @ F.conj() / F.shape[0]
        return X * weight

    if mode == "mc_phase":
        if samples < 1:
            raise ValueError(f"samples must be at least 1, got {samples}")
        rng = np.random.default_rng(seed)
        total = np.zeros((d * d, d * d), dtype=complex)
        remaining = samples
        while remaining > 0:
            batch = min(remaining, MC_PHASE_BATCH)
            if klass is InvariantClass.LDOI:
                signs = rng.choice((1.0, -1.0), size=(batch, d))
                F = np.einsum("si,sj->sij", signs, signs).reshape(batch, d * d)
            else:
                u = np.exp(2j * np.pi * rng.random((batch, d)))
                F = _phase_factors(u, klass)
            total += F.T @ F.conj()
            remaining -= batch
        return X * (total / samples)

    raise ValueError(f"Unsupported averaging mode: {mode}. Available: ['exact_sign', 'mc_phase']")


def is_invariant(X, klass: InvariantClass, tol: Tolerance = Tolerance()) -> bool:
    X = np.asarray(X, dtype=complex)
    gap = max_abs(X - project(X, klass))
    return gap <= tol.threshold(max_abs(X))


def tightest_class(triple: MatrixTriple, tol: Tolerance = Tolerance()) -> InvariantClass:
    """LDUI if B = diag A, else CLDUI if C = diag A, else LDOI."""
    scale = max(max_abs(M) for M in triple.matrices())
    D = diag_part(triple.A)
    if max_abs(triple.B - D) <= tol.threshold(scale):
        return InvariantClass.LDUI
    if max_abs(triple.C - D) <= tol.threshold(scale):
        return InvariantClass.CLDUI
    return InvariantClass.LDOI


@dataclass(frozen=True)
class Block:
    """A diagonal block of an invariant matrix with its |i1 i2> basis labels."""
    labels: Tuple[Tuple[int, int], ...]
    matrix: np.ndarray


def block_decomposition(triple: MatrixTriple, klass: InvariantClass) -> List[Block]:
    t = triple.promote(klass)
    d = t.d
    blocks: List[Block] = []

    if klass is InvariantClass.LDUI:
        blocks.extend(Block(((i, i),), t.A[i:i + 1, i:i + 1].copy()) for i in range(d))
    else:
        blocks.append(Block(tuple((i, i) for i in range(d)), t.B.copy()))

    for i in range(d):
        for j in range(i + 1, d):
            if klass is InvariantClass.CLDUI:
                blocks.append(Block(((i, j),), np.array([[t.A[i, j]]])))
                blocks.append(Block(((j, i),), np.array([[t.A[j, i]]])))
            else:
                blocks.append(Block(
                    ((i, j), (j, i)),
                    np.array([[t.A[i, j], t.C[i, j]], [t.C[j, i], t.A[j, i]]]),
                ))
    return blocks


def rank_of(triple: MatrixTriple, klass: InvariantClass, tol: Tolerance = Tolerance()) -> int:
    """Sum of block ranks; singular values count above rel_eps * largest singular value."""
    values = [np.linalg.svd(b.matrix, compute_uv=False) for b in block_decomposition(triple, klass)]
    sigma_max = max(float(np.max(s)) for s in values)
    if sigma_max == 0:
        return 0
    cutoff = tol.rel_eps * sigma_max
    rank = sum(int(np.sum(s > cutoff)) for s in values)
    logger.debug("rank_of(%s, d=%d) = %d", klass.value, triple.d, rank)
    return rank


def spectrum(triple: MatrixTriple, klass: InvariantClass) -> np.ndarray:
    """Eigenvalues with multiplicity (d^2 of them), gathered block by block."""
    return np.concatenate([np.linalg.eigvals(b.matrix) for b in block_decomposition(triple, klass)])


class LegPermutation(str, Enum):
    FXF = "FXF"
    TRANSPOSE = "transpose"
    DIAG_SWAP = "diag_swap"
    REALIGN = "realign"
    GAMMA = "gamma"
    GAMMA_LEFT = "gamma_left"
    F_LEFT = "F_left"
    F_RIGHT = "F_right"

    @classmethod
    def parse(cls, name: str) -> "LegPermutation":
        for member in cls:
            if member.value == name:
                return member
        raise ValueError(f"Unsupported permutation: {name}. Available: {[m.value for m in cls]}")


def leg_permutation(triple: MatrixTriple, which: LegPermutation) -> MatrixTriple:
    A, B, C = triple.matrices()
    rules = {
        LegPermutation.FXF: lambda: (A.T, B, C.T),
        LegPermutation.TRANSPOSE: lambda: (A, B.T, C.T),
        LegPermutation.DIAG_SWAP: lambda: (A.T, B.T, C),
        LegPermutation.REALIGN: lambda: (B, A, C),
        LegPermutation.GAMMA: lambda: (A, C, B),
        LegPermutation.GAMMA_LEFT: lambda: (A, C.T, B.T),
        LegPermutation.F_LEFT: lambda: (C.T, B, A.T),
        LegPermutation.F_RIGHT: lambda: (C, B, A),
    }
    return MatrixTriple(*rules[LegPermutation(which)]())


def conjugate_transpose(triple: MatrixTriple) -> MatrixTriple:
    """Triple of X* : (conj A, B*, C*)."""
    A, B, C = triple.matrices()
    return MatrixTriple(A.conj(), B.conj().T, C.conj().T)


# Dense index shuffles, independent of the triple formulas.

def _as_tensor(X) -> Tuple[np.ndarray, int]:
    d = bipartite_dimension(X)
    return np.asarray(X, dtype=complex).reshape(d, d, d, d), d


def flip_operator(d: int) -> np.ndarray:
    """F|ab> = |ba>."""
    F = np.zeros((d * d, d * d))
    for a in range(d):
        for b in range(d):
            F[b * d + a, a * d + b] = 1.0
    return F


def partial_transpose(X, leg: Literal["first", "second"] = "second") -> np.ndarray:
    T, d = _as_tensor(X)
    if leg == "second":
        return T.transpose(0, 3, 2, 1).reshape(d * d, d * d)
    if leg == "first":
        return T.transpose(2, 1, 0, 3).reshape(d * d, d * d)
    raise ValueError(f"Unsupported leg: {leg}. Available: ['first', 'second']")


def realign(X) -> np.ndarray:
    """|i><j| (x) |k><l|  ->  |i><k| (x) |j><l|."""
    T, d = _as_tensor(X)
    return T.transpose(0, 2, 1, 3).reshape(d * d, d * d)


def dense_leg_permutation(X, which: LegPermutation) -> np.ndarray:
    d = bipartite_dimension(X)
    X = np.asarray(X, dtype=complex)
    F = flip_operator(d)
    which = LegPermutation(which)
    if which is LegPermutation.FXF:
        return F @ X @ F
    if which is LegPermutation.TRANSPOSE:
        return X.T.copy()
    if which is LegPermutation.DIAG_SWAP:
        return F @ X.T @ F
    if which is LegPermutation.REALIGN:
        return realign(X)
    if which is LegPermutation.GAMMA:
        return partial_transpose(X, "second")
    if which is LegPermutation.GAMMA_LEFT:
        return partial_transpose(X, "first")
    if which is LegPermutation.F_LEFT:
        return F @ X
    return X @ F


def direct_sum(t1: MatrixTriple, t2: Optional[MatrixTriple]) -> MatrixTriple:
    """(A1 + A2, B1 + B2, C1 + C2) as block-diagonal sums; None acts as the empty triple."""
    if t2 is None:
        return t1
    return MatrixTriple(*(block_diag(x, y) for x, y in zip(t1.matrices(), t2.matrices())))


def bipartite_direct_sum(X1, X2) -> np.ndarray:
    """Embed X1 on indices < d1 and X2 on indices >= d1 of both legs."""
    T1, d1 = _as_tensor(X1)
    T2, d2 = _as_tensor(X2)
    d = d1 + d2
    T = np.zeros((d, d, d, d), dtype=complex)
    T[:d1, :d1, :d1, :d1] = T1
    T[d1:, d1:, d1:, d1:] = T2
    return T.reshape(d * d, d * d)


def principal_subtriple(t: MatrixTriple, indices: Sequence[int]) -> MatrixTriple:
    idx = list(indices)
    if not idx:
        raise ValueError("Index set must be non-empty")
    if min(idx) < 0 or max(idx) >= t.d:
        raise ValueError(f"Indices out of range for d={t.d}: {idx}")
    sel = np.ix_(idx, idx)
    return MatrixTriple(t.A[sel], t.B[sel], t.C[sel])


@dataclass(frozen=True)
class ConditionalExpectations:
    a_row: np.ndarray
    a_col: np.ndarray
    trace: complex
    id_diag: MatrixTriple
    id_trace_row: MatrixTriple
    id_trace_col: MatrixTriple


def conditional_expectations(t: MatrixTriple) -> ConditionalExpectations:
    """Partial traces and partial conditional expectations of X(A, B, C).

    ``id_trace_row`` is the triple of (id (x) trace)(X) = A_row (x) I/d, the
    diagonal triple whose A has row i constant and equal to A_row[i]/d;
    ``id_trace_col`` is the triple of (trace (x) id)(X) = I/d (x) A_col.
    """
    d = t.d
    row_sums = t.A.sum(axis=1)
    col_sums = t.A.sum(axis=0)
    ones = np.ones(d)
    return ConditionalExpectations(
        a_row=np.diag(row_sums),
        a_col=np.diag(col_sums),
        trace=complex(t.A.sum()),
        id_diag=MatrixTriple.diagonal(t.A),
        id_trace_row=MatrixTriple.diagonal(np.outer(row_sums, ones) / d),
        id_trace_col=MatrixTriple.diagonal(np.outer(ones, col_sums) / d),
    )


@dataclass(frozen=True)
class SymmetryFlags:
    self_adjoint: bool
    symmetric: bool
    bose_symmetric: bool


def symmetry_flags(t: MatrixTriple, tol: Tolerance = Tolerance()) -> SymmetryFlags:
    A, B, C = t.matrices()
    eps = tol.threshold(max(max_abs(M) for M in t.matrices()))
    self_adjoint = (
        max_abs(A.imag) <= eps and is_hermitian(B, tol) and is_hermitian(C, tol)
    )
    symmetric = max_abs(A - A.T) <= eps and max_abs(C - C.T) <= eps
    bose = symmetric and max_abs(A - C) <= eps
    return SymmetryFlags(bool(self_adjoint), bool(symmetric), bool(bose))


def triple_basis(d: int, klass: InvariantClass) -> List[MatrixTriple]:
    """Basis of the class's triple space: 3d^2-2d (LDOI) or 2d^2-d elements."""
    def unit(i: int, j: int) -> np.ndarray:
        E = np.zeros((d, d), dtype=complex)
        E[i, j] = 1
        return E

    Z = np.zeros((d, d), dtype=complex)
    basis = [MatrixTriple(unit(i, i), unit(i, i), unit(i, i)) for i in range(d)]
    for i, j in itertools.permutations(range(d), 2):
        basis.append(MatrixTriple(unit(i, j), Z, Z))
        if klass is not InvariantClass.LDUI:
            basis.append(MatrixTriple(Z, unit(i, j), Z))
        if klass is not InvariantClass.CLDUI:
            basis.append(MatrixTriple(Z, Z, unit(i, j)))
    return basis


def unit_rank_form(X, tol: Tolerance = Tolerance()) -> Optional[str]:
    """Classify a unit-rank invariant matrix.

    Returns:
        "diagonal" when B carries the rank-one part and A = C = diag B,
        "two_dim_support" when X lives on span{|ij>, |ji>} for one pair i != j,
        or None when X is not a unit-rank LDOI matrix
    """
    X = np.asarray(X, dtype=complex)
    if not is_invariant(X, InvariantClass.LDOI, tol):
        return None
    if np.linalg.matrix_rank(X, tol=tol.threshold(max_abs(X))) != 1:
        return None
    t = extract_triple(X)
    eps = tol.threshold(max_abs(X))
    D = diag_part(t.A)
    if max_abs(t.A - D) <= eps and max_abs(t.C - D) <= eps:
        return "diagonal"
    weight = np.abs(X).sum(axis=0) + np.abs(X).sum(axis=1)
    support = np.argwhere(weight > eps).ravel()
    d = t.d
    pairs = {tuple(sorted(divmod(int(r), d))) for r in support}
    if len(pairs) == 1 and len(support) <= 2:
        i, j = next(iter(pairs))
        if i != j:
            return "two_dim_support"
    return None

