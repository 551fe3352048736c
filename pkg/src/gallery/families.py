"""Named generators for invariant matrices, covariant maps and fixtures.

Matrix families return a ``MatrixTriple`` (promoted to the declared class),
map families return a ``CovariantMap``; ``stormer`` returns a bundle of both.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Mapping, Optional, Union

import numpy as np

from src.core.docmaps import CovariantMap
from src.core.ldoi import InvariantClass, MatrixPair, MatrixTriple, extract_triple, flip_operator
from src.core.matcore import Tolerance, as_square, as_vector, diag_part, max_abs, tilde

logger = logging.getLogger("ldoi.gallery")


@dataclass(frozen=True)
class StormerFixture:
    """Entangled PPT state of the one-parameter family and the map that detects it."""
    mu: float
    triple: MatrixTriple
    witness_map: CovariantMap


GalleryItem = Union[MatrixTriple, CovariantMap, StormerFixture]


@dataclass(frozen=True)
class FamilySpec:
    name: str
    builder: Callable[..., GalleryItem]
    kind: str
    klass: InvariantClass
    description: str
    example: Dict[str, Any] = field(default_factory=dict)


def _eye(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex)


def _ones(d: int) -> np.ndarray:
    return np.ones((d, d), dtype=complex)


def _check_dim(d: int, minimum: int = 1) -> int:
    d = int(d)
    if d < minimum:
        raise ValueError(f"d must be at least {minimum}, got {d}")
    return d


def _shift(d: int) -> np.ndarray:
    """Cyclic permutation S with S_ij = 1 iff i = j + 1 (mod d)."""
    return np.roll(np.eye(d), 1, axis=0)


# Matrix families

def diagonal(A) -> MatrixTriple:
    return MatrixTriple.diagonal(A)


def werner(a: float, b: float, d: int) -> MatrixTriple:
    """LDUI pair A = b I + a J, C = a I + b J."""
    d = _check_dim(d)
    return MatrixPair(b * _eye(d) + a * _ones(d), a * _eye(d) + b * _ones(d)).to_triple(InvariantClass.LDUI)


def isotropic(a: float, b: float, d: int) -> MatrixTriple:
    """CLDUI pair A = b I + a J, B = a I + b J."""
    d = _check_dim(d)
    return MatrixPair(b * _eye(d) + a * _ones(d), a * _eye(d) + b * _ones(d)).to_triple(InvariantClass.CLDUI)


def dicke(Y) -> MatrixTriple:
    """Mixture of Dicke states: LDUI pair (A, A) with A = diag Y + Y~/2."""
    Y = as_square(Y, "Y")
    if max_abs(Y.imag) > 0 or max_abs(Y - Y.T) > Tolerance().abs_eps:
        raise ValueError("Y must be real symmetric")
    A = diag_part(Y) + tilde(Y) / 2
    return MatrixPair(A, A).to_triple(InvariantClass.LDUI)


def pt_invariant(A, B, side: str = "second") -> MatrixTriple:
    """(A, B, B) is invariant under the second-leg partial transpose, (A, B, B^T) under the first."""
    B = as_square(B, "B")
    if side == "second":
        return MatrixTriple(A, B, B)
    if side == "first":
        return MatrixTriple(A, B, B.T)
    raise ValueError(f"Unsupported side: {side}. Available: ['first', 'second']")


def a_equals_j(B, C) -> MatrixTriple:
    B = as_square(B, "B")
    return MatrixTriple(_ones(B.shape[0]), B, C)


def canonical_npt(a: float, b: float, c: float, d: int) -> MatrixTriple:
    """a sum|ii><ii| + b sum psi-psi-* + c sum psi+psi+* as an LDUI triple."""
    d = _check_dim(d, 2)
    A = np.full((d, d), (c + b) / 2, dtype=complex)
    C = np.full((d, d), (c - b) / 2, dtype=complex)
    np.fill_diagonal(A, a)
    np.fill_diagonal(C, a)
    return MatrixPair(A, C).to_triple(InvariantClass.LDUI)


def edge_3x3(b: float, theta: float, eta, zeta, xi) -> MatrixTriple:
    """PPT edge states on C^3 (x) C^3.

    Raises:
        ValueError: If b <= 0, theta is outside (-pi/3, pi/3) or zero, the vectors
            do not have squared norm 2 cos(theta), or an overlap exceeds 1 in modulus
    """
    if b <= 0:
        raise ValueError(f"b must be positive, got {b}")
    if not (-np.pi / 3 < theta < np.pi / 3) or theta == 0:
        raise ValueError(f"theta must lie in (-pi/3, pi/3) without 0, got {theta}")
    eta, zeta, xi = (as_vector(v, name) for v, name in ((eta, "eta"), (zeta, "zeta"), (xi, "xi")))
    norm = 2 * np.cos(theta)
    for name, v in (("eta", eta), ("zeta", zeta), ("xi", xi)):
        if v.size != 3:
            raise ValueError(f"{name} must be a 3-vector")
        if abs(np.vdot(v, v).real - norm) > 1e-9:
            raise ValueError(f"<{name}|{name}> must equal 2 cos(theta) = {norm:.12g}")
    for (n1, v1), (n2, v2) in ((("eta", eta), ("xi", xi)), (("xi", xi), ("zeta", zeta)), (("zeta", zeta), ("eta", eta))):
        if abs(np.vdot(v1, v2)) > 1 + 1e-12:
            raise ValueError(f"|<{n1}|{n2}>| must not exceed 1")

    e = np.exp(1j * theta)
    A = np.array([
        [norm, 1 / b, b],
        [b, norm, 1 / b],
        [1 / b, b, norm],
    ], dtype=complex)
    B = np.array([
        [norm, -e, -e.conjugate()],
        [-e.conjugate(), norm, -e],
        [-e, -e.conjugate(), norm],
    ])
    C = np.array([
        [norm, np.vdot(eta, xi), np.vdot(zeta, xi)],
        [np.vdot(xi, eta), norm, np.vdot(zeta, eta)],
        [np.vdot(xi, zeta), np.vdot(eta, zeta), norm],
    ])
    return MatrixTriple(A, B, C)


def unit_rank_ldui(i: int, j: int, alpha: complex, beta: complex, gamma: complex, delta: complex,
                   d: int) -> MatrixTriple:
    """(alpha|ij> + beta|ji>)(gamma<ij| + delta<ji|) for i != j."""
    d = _check_dim(d, 2)
    if not (0 <= i < d and 0 <= j < d) or i == j:
        raise ValueError(f"Need distinct indices in range for d={d}, got ({i}, {j})")
    y = np.zeros(d * d, dtype=complex)
    z = np.zeros(d * d, dtype=complex)
    y[i * d + j], y[j * d + i] = alpha, beta
    z[i * d + j], z[j * d + i] = np.conj(gamma), np.conj(delta)
    return extract_triple(np.outer(y, z.conj()))


def maximally_entangled(d: int) -> MatrixTriple:
    d = _check_dim(d)
    return MatrixTriple(_eye(d), _ones(d), _eye(d))


def maximally_mixed(d: int) -> MatrixTriple:
    d = _check_dim(d)
    return MatrixTriple(_ones(d) / d ** 2, _eye(d) / d ** 2, _eye(d) / d ** 2)


def ppt_nontcp() -> MatrixTriple:
    """PPT triple that passes every pairwise TCP property yet is entangled."""
    A = np.array([[1, 0, 1], [0, 1, 1], [1, 1, 1]], dtype=complex)
    B = np.array([[1, 0, -1], [0, 1, 0], [-1, 0, 1]], dtype=complex)
    C = np.array([[1, 0, 0], [0, 1, -1], [0, -1, 1]], dtype=complex)
    return MatrixTriple(A, B, C)


# Map families

def identity(d: int) -> CovariantMap:
    d = _check_dim(d)
    return CovariantMap.from_pair(InvariantClass.CLDUI, _eye(d), _ones(d))


def transposition(d: int) -> CovariantMap:
    d = _check_dim(d)
    return CovariantMap.from_pair(InvariantClass.LDUI, _eye(d), _ones(d))


def choi_general(A) -> CovariantMap:
    """Z -> diag(A diag Z) - Z~, the CDUC map with B = diag A - J~."""
    A = as_square(A, "A")
    B = diag_part(A) - tilde(_ones(A.shape[0]))
    return CovariantMap.from_pair(InvariantClass.CLDUI, A, B)


def choi_cho(a: float, b: float, c: float) -> CovariantMap:
    return choi_general(np.array([[a, b, c], [c, a, b], [b, c, a]], dtype=complex))


def choi_kye(a: float, c1: float, c2: float, c3: float) -> CovariantMap:
    return choi_general(np.array([[a, 0, c1], [c2, a, 0], [0, c3, a]], dtype=complex))


def tau(d: int, k: int) -> CovariantMap:
    """tau_{d,k} with A = (d-k-1) I + sum_{j<=k} S^j."""
    d = _check_dim(d, 2)
    if not 1 <= k <= d - 1:
        raise ValueError(f"k must lie in [1, {d - 1}], got {k}")
    S = _shift(d)
    A = (d - k - 1) * np.eye(d) + sum(np.linalg.matrix_power(S, j) for j in range(1, k + 1))
    return choi_general(A)


def lambda_map(d: int) -> CovariantMap:
    """Positive non-decomposable DOC map Lambda_d."""
    d = _check_dim(d, 2)
    A = np.zeros((d, d), dtype=complex)
    A[: d - 1, : d - 1] = 1 / (d - 1)
    A[d - 1, d - 1] = 1
    r = 1 / np.sqrt(d - 1)
    C = diag_part(A)
    C[d - 1, d - 2] = C[d - 2, d - 1] = r
    B = diag_part(A)
    B[d - 1, : d - 2] = r
    B[: d - 2, d - 1] = r
    return CovariantMap(InvariantClass.LDOI, MatrixTriple(A, B, C))


def schur(S) -> CovariantMap:
    S = as_square(S, "S")
    return CovariantMap.from_pair(InvariantClass.CLDUI, diag_part(S), S)


def classical(A) -> CovariantMap:
    A = as_square(A, "A")
    return CovariantMap(InvariantClass.LDUI, MatrixTriple.diagonal(A))


def depolarizing(d: int) -> CovariantMap:
    """Z -> Tr(Z) I."""
    return classical(_ones(_check_dim(d)))


def dephasing(d: int) -> CovariantMap:
    """Z -> diag Z."""
    return classical(_eye(_check_dim(d)))


def uc(a: float, b: float, d: int) -> CovariantMap:
    """Unitary covariant map; its Choi matrix is Werner."""
    return CovariantMap(InvariantClass.LDUI, werner(a, b, d))


def cuc(a: float, b: float, d: int) -> CovariantMap:
    """Conjugate unitary covariant map; its Choi matrix is isotropic."""
    return CovariantMap(InvariantClass.CLDUI, isotropic(a, b, d))


def diag_preserving(X, Y) -> CovariantMap:
    """DOC (I, X~ + I, Y~ + I) for zero-diagonal X~, Y~."""
    X = as_square(X, "X")
    Y = as_square(Y, "Y")
    if max_abs(np.diag(X)) > 0 or max_abs(np.diag(Y)) > 0:
        raise ValueError("X and Y must have zero diagonals")
    d = X.shape[0]
    return CovariantMap(InvariantClass.LDOI, MatrixTriple(_eye(d), X + _eye(d), Y + _eye(d)))


def a_equals_j_map(B, C) -> CovariantMap:
    """Mixture of the depolarizing map, a Schur multiplier and the transposition."""
    return CovariantMap(InvariantClass.LDOI, a_equals_j(B, C))


def stormer(mu: float = 1.0) -> StormerFixture:
    """CLDUI triple (A(mu), 2 mu J, diag A(mu)), detected by choi_cho(1, mu, 0) for mu >= 1."""
    mu = float(mu)
    if mu <= 0:
        raise ValueError(f"mu must be positive, got {mu}")
    s, q = 2 * mu, 4 * mu * mu
    A = np.array([[s, q, 1], [1, s, q], [q, 1, s]], dtype=complex)
    triple = MatrixPair(A, s * _ones(3)).to_triple(InvariantClass.CLDUI)
    return StormerFixture(mu, triple, choi_cho(1.0, mu, 0.0))


_EXAMPLE_Y = [[1.0, 0.5, 0.2], [0.5, 2.0, 0.3], [0.2, 0.3, 1.5]]
_EXAMPLE_EDGE = {
    "b": 2.0,
    "theta": 0.3,
    "eta": [np.sqrt(2 * np.cos(0.3)), 0.0, 0.0],
    "zeta": [0.0, np.sqrt(2 * np.cos(0.3)), 0.0],
    "xi": [0.0, 0.0, np.sqrt(2 * np.cos(0.3))],
}

_FAMILIES: Dict[str, FamilySpec] = {spec.name: spec for spec in (
    FamilySpec("diagonal", diagonal, "matrix", InvariantClass.LDUI, "Diagonal matrices",
               {"A": [[1.0, 2.0], [0.5, 1.0]]}),
    FamilySpec("werner", werner, "matrix", InvariantClass.LDUI, "Werner matrices",
               {"a": 1.0, "b": 0.5, "d": 3}),
    FamilySpec("isotropic", isotropic, "matrix", InvariantClass.CLDUI, "Isotropic matrices",
               {"a": 1.0, "b": 0.5, "d": 3}),
    FamilySpec("dicke", dicke, "matrix", InvariantClass.LDUI, "Mixtures of Dicke states",
               {"Y": _EXAMPLE_Y}),
    FamilySpec("pt_invariant", pt_invariant, "matrix", InvariantClass.LDOI,
               "Partial-transpose invariant matrices",
               {"A": [[1.0, 1.0], [1.0, 1.0]], "B": [[1.0, 0.5], [0.5, 1.0]], "side": "second"}),
    FamilySpec("a_equals_j", a_equals_j, "matrix", InvariantClass.LDOI, "Triples with A = J",
               {"B": [[1.0, 0.2], [0.2, 1.0]], "C": [[1.0, -0.3], [-0.3, 1.0]]}),
    FamilySpec("canonical_npt", canonical_npt, "matrix", InvariantClass.LDUI,
               "Canonical NPT family of LDUI states", {"a": 0.2, "b": 0.5, "c": 0.3, "d": 3}),
    FamilySpec("edge_3x3", edge_3x3, "matrix", InvariantClass.LDOI, "3x3 PPT edge states", _EXAMPLE_EDGE),
    FamilySpec("unit_rank_ldui", unit_rank_ldui, "matrix", InvariantClass.LDUI,
               "Unit-rank LDUI matrices supported on |ij>, |ji>",
               {"i": 0, "j": 1, "alpha": 1.0, "beta": 2.0, "gamma": 1.0, "delta": 2.0, "d": 3}),
    FamilySpec("maximally_entangled", maximally_entangled, "matrix", InvariantClass.CLDUI,
               "Unnormalized maximally entangled projector", {"d": 3}),
    FamilySpec("maximally_mixed", maximally_mixed, "matrix", InvariantClass.LDUI,
               "Maximally mixed state", {"d": 3}),
    FamilySpec("ppt_nontcp", ppt_nontcp, "matrix", InvariantClass.LDOI,
               "PPT triple with every pairwise TCP property but not TCP", {}),
    FamilySpec("identity", identity, "map", InvariantClass.CLDUI, "Identity map", {"d": 3}),
    FamilySpec("transposition", transposition, "map", InvariantClass.LDUI, "Transposition map", {"d": 3}),
    FamilySpec("choi_general", choi_general, "map", InvariantClass.CLDUI, "General Choi-type maps",
               {"A": [[1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [1.0, 0.0, 1.0]]}),
    FamilySpec("choi_cho", choi_cho, "map", InvariantClass.CLDUI, "Choi-type maps on M3",
               {"a": 1.0, "b": 1.0, "c": 0.0}),
    FamilySpec("choi_kye", choi_kye, "map", InvariantClass.CLDUI, "Choi-type variant on M3",
               {"a": 1.0, "c1": 1.0, "c2": 1.0, "c3": 1.0}),
    FamilySpec("tau", tau, "map", InvariantClass.CLDUI, "Generalized Choi maps tau_{d,k}", {"d": 4, "k": 1}),
    FamilySpec("lambda", lambda_map, "map", InvariantClass.LDOI, "Positive non-decomposable Lambda_d",
               {"d": 3}),
    FamilySpec("schur", schur, "map", InvariantClass.CLDUI, "Schur multipliers",
               {"S": [[1.0, 0.5], [0.5, 1.0]]}),
    FamilySpec("classical", classical, "map", InvariantClass.LDUI, "Classical maps",
               {"A": [[0.5, 0.2], [0.5, 0.8]]}),
    FamilySpec("depolarizing", depolarizing, "map", InvariantClass.LDUI, "Completely depolarizing map",
               {"d": 3}),
    FamilySpec("dephasing", dephasing, "map", InvariantClass.LDUI, "Completely dephasing map", {"d": 3}),
    FamilySpec("uc", uc, "map", InvariantClass.LDUI, "Unitary covariant maps", {"a": 1.0, "b": 0.5, "d": 3}),
    FamilySpec("cuc", cuc, "map", InvariantClass.CLDUI, "Conjugate unitary covariant maps",
               {"a": 1.0, "b": 0.5, "d": 3}),
    FamilySpec("diag_preserving", diag_preserving, "map", InvariantClass.LDOI, "Diagonal-preserving maps",
               {"X": [[0.0, 0.3], [0.3, 0.0]], "Y": [[0.0, 0.2], [0.2, 0.0]]}),
    FamilySpec("a_equals_j_map", a_equals_j_map, "map", InvariantClass.LDOI,
               "Depolarizing + Schur + transposition mixtures",
               {"B": [[1.0, 0.2], [0.2, 1.0]], "C": [[1.0, -0.3], [-0.3, 1.0]]}),
    FamilySpec("stormer", stormer, "fixture", InvariantClass.CLDUI,
               "Entangled PPT family and its detecting Choi-type map", {"mu": 1.0}),
)}


def list_families(kind: Optional[str] = None) -> List[str]:
    return sorted(name for name, spec in _FAMILIES.items() if kind is None or spec.kind == kind)


def get_family(name: str) -> FamilySpec:
    if name not in _FAMILIES:
        raise ValueError(f"Unsupported family: {name}. Available: {list(_FAMILIES.keys())}")
    return _FAMILIES[name]


def generate(family: str, params: Optional[Mapping[str, Any]] = None) -> GalleryItem:
    """Build a family member from keyword parameters.

    Raises:
        ValueError: For unknown families, unknown or missing parameters, or
            parameters outside the family's domain
    """
    spec = get_family(family)
    params = dict(params or {})
    try:
        item = spec.builder(**params)
    except TypeError as e:
        raise ValueError(f"Invalid parameters for family {family}: {e}")
    logger.debug("generated %s with %s", family, sorted(params))
    return item


class ProjectorKind(str, Enum):
    SYMMETRIC = "symmetric_Ps"
    ANTISYMMETRIC = "antisymmetric_Pa"
    FLIP = "flip_F"
    MAXENT = "maxent_Pomega"
    EQUAL = "equal_Peq"


def projector(kind: Union[str, ProjectorKind], d: int) -> np.ndarray:
    """Canonical operators on C^d (x) C^d: F, P_s, P_a, P_eq and P_omega."""
    try:
        kind = ProjectorKind(kind)
    except ValueError:
        raise ValueError(f"Unsupported projector: {kind}. Available: {[k.value for k in ProjectorKind]}")
    d = _check_dim(d, 2)
    F = flip_operator(d).astype(complex)
    I = np.eye(d * d, dtype=complex)
    if kind is ProjectorKind.FLIP:
        return F
    if kind is ProjectorKind.SYMMETRIC:
        return (I + F) / 2
    if kind is ProjectorKind.ANTISYMMETRIC:
        return (I - F) / 2
    diag_idx = np.arange(d) * (d + 1)
    if kind is ProjectorKind.EQUAL:
        P = np.zeros((d * d, d * d), dtype=complex)
        P[diag_idx, diag_idx] = 1
        return P
    psi = np.zeros(d * d, dtype=complex)
    psi[diag_idx] = 1
    return np.outer(psi, psi) / d


def as_triple(item: GalleryItem) -> MatrixTriple:
    """The matrix triple behind any gallery output (a map's Choi triple, a fixture's state)."""
    if isinstance(item, StormerFixture):
        return item.triple
    if isinstance(item, CovariantMap):
        return item.triple
    return item
