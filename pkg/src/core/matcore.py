"""Complex-matrix predicates, norms and elementwise helpers.

Every other core module builds on these:
- Tolerance handling (absolute + relative thresholds)
- PSD / entrywise-non-negative / diagonal-dominance predicates
- Comparison matrices, tilde (zeroed diagonal) and phase splitting
- Norms and multiset matching for spectra
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Literal, Optional, Tuple

import numpy as np

from src.config.parameters import DEFAULT_ABS_EPS, DEFAULT_REL_EPS
from src.config.settings import Settings, get_settings

logger = logging.getLogger("ldoi.matcore")

NormKind = Literal["entrywise_one", "trace", "frobenius"]


@dataclass(frozen=True)
class Tolerance:
    """Absolute and relative tolerances used by every numerical predicate."""
    abs_eps: float = DEFAULT_ABS_EPS
    rel_eps: float = DEFAULT_REL_EPS

    def __post_init__(self):
        if not (self.abs_eps >= 0 and self.rel_eps >= 0):
            raise ValueError(
                f"Tolerances must be non-negative, got abs_eps={self.abs_eps}, rel_eps={self.rel_eps}"
            )

    def threshold(self, scale: float = 0.0) -> float:
        """Slack allowed for a quantity whose natural magnitude is ``scale``."""
        return self.abs_eps + self.rel_eps * abs(scale)

    @classmethod
    def from_settings(cls, settings: Optional[Settings] = None) -> "Tolerance":
        settings = settings or get_settings()
        return cls(abs_eps=settings.LDOI_TOL, rel_eps=settings.LDOI_REL_TOL)


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    """Coerce input to a finite 2-D complex array.

    Raises:
        ValueError: If the input is not two-dimensional or has non-finite entries
    """
    arr = np.asarray(M, dtype=complex)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be two-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def as_square(M, name: str = "matrix") -> np.ndarray:
    arr = as_matrix(M, name)
    if arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be square, got shape {arr.shape}")
    return arr


def as_vector(v, name: str = "vector") -> np.ndarray:
    arr = np.asarray(v, dtype=complex).reshape(-1)
    if arr.size == 0:
        raise ValueError(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def max_abs(M) -> float:
    arr = np.asarray(M)
    return float(np.max(np.abs(arr))) if arr.size else 0.0


def hermitian_part(M: np.ndarray) -> np.ndarray:
    return (M + M.conj().T) / 2


def is_hermitian(M, tol: Tolerance = Tolerance()) -> bool:
    M = as_square(M)
    return max_abs(M - M.conj().T) <= tol.threshold(max_abs(M))


def min_eigenvalue(M) -> float:
    """Smallest eigenvalue of the Hermitian part of ``M``."""
    M = as_square(M)
    return float(np.linalg.eigvalsh(hermitian_part(M))[0])


def is_psd(M, tol: Tolerance = Tolerance()) -> bool:
    """Check positive semi-definiteness.

    Args:
        M: Square complex matrix
        tol: Tolerance; the eigenvalue floor is relative to the spectral radius

    Returns:
        True if M is Hermitian within tolerance and its minimum eigenvalue is
        at least -(abs_eps + rel_eps * spectral_radius)

    Raises:
        ValueError: If M is not square
    """
    M = as_square(M)
    H = hermitian_part(M)
    if max_abs(H - M) > tol.abs_eps:
        return False
    eigs = np.linalg.eigvalsh(H)
    radius = float(np.max(np.abs(eigs)))
    return bool(eigs[0] >= -tol.threshold(radius))


def is_ewp(M, tol: Tolerance = Tolerance()) -> bool:
    """Entrywise non-negative: every entry real (within abs_eps) and >= -abs_eps."""
    M = as_matrix(M)
    return bool(np.all(np.abs(M.imag) <= tol.abs_eps) and np.all(M.real >= -tol.abs_eps))


def comparison_matrix(M) -> np.ndarray:
    """|M_ii| on the diagonal, -|M_ij| off it (real output)."""
    M = as_square(M)
    out = -np.abs(M)
    np.fill_diagonal(out, np.abs(np.diag(M)))
    return out


def is_diagonally_dominant(M, tol: Tolerance = Tolerance()) -> bool:
    """Row and column diagonal dominance against Re(M_ii)."""
    M = as_square(M)
    off = np.abs(tilde(M))
    diag = np.diag(M).real
    rows_ok = np.all(diag >= off.sum(axis=1) - tol.abs_eps)
    cols_ok = np.all(diag >= off.sum(axis=0) - tol.abs_eps)
    return bool(rows_ok and cols_ok)


def matrix_norm(M, kind: NormKind) -> float:
    M = as_matrix(M)
    if kind == "entrywise_one":
        return float(np.sum(np.abs(M)))
    if kind == "trace":
        return float(np.sum(np.linalg.svd(M, compute_uv=False)))
    if kind == "frobenius":
        return float(np.linalg.norm(M, "fro"))
    raise ValueError(f"Unsupported norm: {kind}. Available: ['entrywise_one', 'trace', 'frobenius']")


def phase_split(M) -> Tuple[np.ndarray, np.ndarray]:
    """Polar split of each entry; zero entries get phase 1."""
    M = as_matrix(M)
    magnitude = np.abs(M)
    phase = np.ones_like(M)
    nonzero = magnitude > 0
    phase[nonzero] = M[nonzero] / magnitude[nonzero]
    return magnitude.astype(complex), phase


def phase(M) -> np.ndarray:
    return phase_split(M)[1]


def tilde(M) -> np.ndarray:
    """Copy of M with its diagonal zeroed."""
    M = as_square(M)
    out = M.copy()
    np.fill_diagonal(out, 0)
    return out


def diag_part(M) -> np.ndarray:
    """Diagonal matrix with the diagonal of M."""
    M = as_square(M)
    return np.diag(np.diag(M))


def spectral_distance(first: Iterable[complex], second: Iterable[complex]) -> float:
    """Largest distance in a greedy nearest-pair matching of two multisets.

    Both sides are sorted by real then imaginary part and each value of the
    first multiset claims its nearest unclaimed partner.
    """
    a = sorted(np.asarray(list(first), dtype=complex), key=lambda z: (z.real, z.imag))
    b = sorted(np.asarray(list(second), dtype=complex), key=lambda z: (z.real, z.imag))
    if len(a) != len(b):
        return float("inf")
    remaining = list(b)
    worst = 0.0
    for z in a:
        distances = [abs(z - w) for w in remaining]
        k = int(np.argmin(distances))
        worst = max(worst, distances[k])
        remaining.pop(k)
    return worst
