"""
Seeded random generators for triples, witnesses and test vectors
"""
from typing import Optional

import numpy as np

from src.core.cones import TcpWitness, triple_from_witness
from src.core.ldoi import InvariantClass, MatrixTriple, extract_triple


def as_rng(seed_or_rng=None) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


def complex_gaussian(shape, rng=None) -> np.ndarray:
    rng = as_rng(rng)
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_witness(d: int, width: int, rng=None, real: bool = False) -> TcpWitness:
    rng = as_rng(rng)
    if real:
        return TcpWitness(np.abs(rng.standard_normal((d, width))), np.abs(rng.standard_normal((d, width))))
    return TcpWitness(complex_gaussian((d, width), rng), complex_gaussian((d, width), rng))


def random_tcp_triple(d: int, width: int, rng=None) -> MatrixTriple:
    """TCP triple of a random complex witness."""
    return triple_from_witness(random_witness(d, width, rng))


def random_triple(d: int, rng=None, klass: InvariantClass = InvariantClass.LDOI,
                  self_adjoint: bool = False) -> MatrixTriple:
    """Generic (not necessarily PSD) triple of the class."""
    rng = as_rng(rng)
    A = complex_gaussian((d, d), rng)
    B = complex_gaussian((d, d), rng)
    C = complex_gaussian((d, d), rng)
    if self_adjoint:
        A = A.real.astype(complex)
        B = (B + B.conj().T) / 2
        C = (C + C.conj().T) / 2
        np.fill_diagonal(A, np.abs(np.diag(A)))
    np.fill_diagonal(B, np.diag(A))
    np.fill_diagonal(C, np.diag(A))
    return MatrixTriple(A, B, C).promote(klass)


def random_psd_triple(d: int, rng=None, klass: InvariantClass = InvariantClass.LDOI) -> MatrixTriple:
    """Triple of a random PSD matrix averaged onto the class (Gram matrix of random vectors)."""
    rng = as_rng(rng)
    G = complex_gaussian((d * d, d * d), rng)
    return extract_triple(G @ G.conj().T).promote(klass)


def random_correlation(d: int, rank: Optional[int] = None, rng=None) -> np.ndarray:
    """Gram matrix of random unit vectors."""
    rng = as_rng(rng)
    vectors = complex_gaussian((d, rank or d), rng)
    vectors /= np.linalg.norm(vectors, axis=1, keepdims=True)
    return vectors @ vectors.conj().T


def random_unimodular(d: int, rng=None) -> np.ndarray:
    rng = as_rng(rng)
    return np.exp(2j * np.pi * rng.random(d))
