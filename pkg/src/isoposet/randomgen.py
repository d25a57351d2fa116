"""Seeded random fixtures: partial isometries and chains of the three modes."""

from __future__ import annotations

import numpy as np

from .linalg import DEFAULT_TOL, Tolerances
from .pisom import PartialIsometry, validate_partial_isometry
from .twonest import Chain, build_chain

NEST = "nest"
VIOLATING = "violating"
MIXED = "mixed"
CHAIN_MODES = (NEST, VIOLATING, MIXED)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def haar_unitary(dim: int, rng) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    rng = _rng(rng)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    # Fix the phases so the distribution is exactly Haar.
    phases = np.diag(r).copy()
    phases[np.abs(phases) == 0.0] = 1.0
    return q * (phases / np.abs(phases))


def random_partial_isometry(dim: int, rank: int, seed,
                            tol: Tolerances = DEFAULT_TOL) -> PartialIsometry:
    """Random partial isometry of exact rank: ``W1 diag(1..1,0..0) W2*``."""
    if not 0 <= rank <= dim:
        raise ValueError(f"rank must lie in [0, {dim}], got {rank}")
    rng = _rng(seed)
    w1 = haar_unitary(dim, rng)
    w2 = haar_unitary(dim, rng)
    diag = np.zeros(dim)
    diag[:rank] = 1.0
    return validate_partial_isometry((w1 * diag) @ w2.conj().T, tol)


def _increasing_ranks(dim: int, count: int, rng,
                      max_rank: int | None = None) -> list[int]:
    top = dim if max_rank is None else max_rank
    return sorted(rng.choice(np.arange(1, top + 1), size=count, replace=False))


def random_chain(dim: int, length: int, mode: str, seed,
                 tol: Tolerances = DEFAULT_TOL) -> Chain:
    """Random chain of ``length`` nonzero elements (plus the adjoined 0).

    ``nest``: orthogonal projections (initial equals final everywhere, so
    the algebra criterion passes). ``violating``: a shift-style chain whose
    elements move their initial spaces strictly off themselves, so every
    nonzero element violates the criterion. ``mixed``: restrictions of a
    random partial isometry to a nested family of initial subspaces.
    """
    if mode not in CHAIN_MODES:
        raise ValueError(f"mode must be one of {CHAIN_MODES}, got {mode!r}")
    if not 0 <= length <= dim:
        raise ValueError(f"length must lie in [0, {dim}], got {length}")
    rng = _rng(seed)
    if length == 0:
        return build_chain([], tol, dim=dim)

    if mode == NEST:
        w = haar_unitary(dim, rng)
        ranks = _increasing_ranks(dim, length, rng)
        members = []
        for r in ranks:
            cols = w[:, :r]
            members.append(validate_partial_isometry(cols @ cols.conj().T, tol))
        return build_chain(members, tol)

    if mode == VIOLATING:
        # Shift along a random orthonormal basis: w_i -> w_(i+1). The top
        # rank stays below dim so ran(E) falls outside ker(E)-perp at
        # every level; that caps the chain length at dim - 1.
        if dim < 2:
            raise ValueError("violating chains need dim >= 2")
        w = haar_unitary(dim, rng)
        ranks = _increasing_ranks(dim, min(length, dim - 1), rng,
                                  max_rank=dim - 1)
        members = []
        for r in ranks:
            v = w[:, 1 : r + 1] @ w[:, :r].conj().T
            members.append(validate_partial_isometry(v, tol))
        return build_chain(members, tol)

    # mixed: restrict one random partial isometry to nested subspaces of
    # its initial space.
    ranks = _increasing_ranks(dim, length, rng)
    top_rank = ranks[-1]
    w1 = haar_unitary(dim, rng)
    w2 = haar_unitary(dim, rng)
    diag = np.zeros(dim)
    diag[:top_rank] = 1.0
    top = (w1 * diag) @ w2.conj().T
    members = []
    for r in ranks:
        cols = w2[:, :r]
        members.append(validate_partial_isometry(top @ (cols @ cols.conj().T), tol))
    return build_chain(members, tol)
