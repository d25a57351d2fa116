"""Rank-one membership and constructive finite-rank decomposition.

The rank-one operator built from vectors ``e`` and ``f`` sends ``v`` to
``<v, e> f``; its matrix is ``outer(f, conj(e))``. A rank-one operator
belongs to the chain space exactly when ``e`` kills the top element, or
some element ``E`` has ``f`` in ran(E) while ``e`` kills the predecessor
of ``E``. Every rank-n member splits into n rank-one members.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DecompositionFailed, DimensionMismatch, NotAMember
from .linalg import (
    DEFAULT_TOL,
    Tolerances,
    _frozen,
    as_matrix,
    as_vector,
    spectral_norm,
)
from .pisom import PartialIsometry
from .twonest import Chain, membership


@dataclass(frozen=True, eq=False)
class RankOne:
    """Rank-one operator ``v -> <v, e> f`` with matrix ``outer(f, conj(e))``."""

    e: np.ndarray
    f: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "e", _frozen(as_vector(self.e)))
        object.__setattr__(self, "f", _frozen(as_vector(self.f)))

    @property
    def matrix(self) -> np.ndarray:
        return np.outer(self.f, self.e.conj())


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Rank-one terms summing to the decomposed operator."""

    terms: tuple[RankOne, ...]
    residual: float


def e_minus(chain: Chain, e_index: int) -> PartialIsometry:
    """Chain predecessor; the bottom element maps to itself (zero)."""
    if not 0 <= e_index < len(chain.elements):
        raise IndexError(f"index {e_index} out of range")
    return chain.elements[max(e_index - 1, 0)]


def rank_one_membership(e, f, chain: Chain,
                        tol: Tolerances = DEFAULT_TOL) -> bool:
    """Membership test for the rank-one operator built from ``e`` and ``f``.

    True when ``e`` is in ker of the chain supremum, or some element
    houses ``f`` in its range while ``e`` is in the kernel of the
    element's predecessor. Agrees with the direct residual test on the
    matrix realisation.
    """
    ev = as_vector(e)
    fv = as_vector(f)
    if ev.size != chain.dim or fv.size != chain.dim:
        raise DimensionMismatch(
            f"vector lengths {ev.size}, {fv.size}; chain dimension {chain.dim}"
        )
    ne = float(np.linalg.norm(ev))
    nf = float(np.linalg.norm(fv))
    if ne == 0.0 or nf == 0.0:
        return True
    if float(np.linalg.norm(chain.top.p @ ev)) <= tol.tol_member * ne:
        return True
    eye = np.eye(chain.dim, dtype=complex)
    for i, element in enumerate(chain.elements):
        f_in_range = (
            float(np.linalg.norm((eye - element.q) @ fv)) <= tol.tol_member * nf
        )
        if not f_in_range:
            continue
        pred = e_minus(chain, i)
        if float(np.linalg.norm(pred.p @ ev)) <= tol.tol_member * ne:
            return True
    return False


def canonical_rank_representation(r, tol: Tolerances = DEFAULT_TOL,
                                  scale: float = 0.0) -> list[RankOne]:
    """SVD-truncated representation with both vector families independent.

    Term ``i`` has ``e`` the i-th right singular vector and ``f`` the
    i-th left singular vector scaled by its singular value. ``scale``
    optionally floors the cutoff reference so that a remainder consisting
    of rounding noise (relative to the original operator) reads as zero.
    """
    a = as_matrix(r)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"matrix must be square, got {a.shape}")
    u, s, vh = np.linalg.svd(a)
    reference = max(float(s[0]) if s.size else 0.0, scale)
    if reference <= 0.0:
        return []
    keep = int(np.sum(s > tol.tol_rank * reference))
    return [RankOne(e=vh[i].conj(), f=s[i] * u[:, i]) for i in range(keep)]


def _dependence_index(ys: list[np.ndarray], chain: Chain,
                      tol: Tolerances) -> int | None:
    """Least chain index where ``{(I - Q_E) y_i}`` is linearly dependent.

    Dependence is decided by the smallest singular value of the stacked
    vectors against ``tol_rank`` times the largest (the Grammian
    determinant criterion is equivalent but underflows). The cutoff
    reference is floored at the scale of the unprojected vectors so that
    columns consisting of rounding noise count as zero.
    """
    eye = np.eye(chain.dim, dtype=complex)
    n = len(ys)
    base_scale = max(float(np.linalg.norm(y)) for y in ys)
    for idx, element in enumerate(chain.elements):
        cols = np.column_stack([(eye - element.q) @ y for y in ys])
        s = np.linalg.svd(cols, compute_uv=False)
        largest = max(float(s[0]) if s.size else 0.0, base_scale)
        smallest = float(s[min(n, s.size) - 1]) if s.size else 0.0
        if smallest <= tol.tol_rank * largest:
            return idx
    return None


def decompose_finite_rank(r, chain: Chain,
                          tol: Tolerances = DEFAULT_TOL) -> Decomposition:
    """Split a rank-n member into n rank-one members, constructively.

    Each round finds the least element ``U`` whose complementary ranges
    make the value vectors dependent, extracts the dependency
    coefficients from the null vector, peels off one rank-one member
    supported by ``U``, and recurses on the re-canonicalised remainder.
    If no such element exists, every argument vector already kills the
    chain supremum and the current terms are all members as they stand.
    """
    a = as_matrix(r)
    if a.shape != (chain.dim, chain.dim):
        raise DimensionMismatch(
            f"operator shape {a.shape}, chain dimension {chain.dim}"
        )
    report = membership(a, chain, tol)
    if not report.is_member:
        raise NotAMember(
            f"residual {report.residuals[report.worst_element]:.3e} at chain "
            f"element {report.worst_element}"
        )
    original = a.copy()
    scale = spectral_norm(a)
    terms: list[RankOne] = []
    current = canonical_rank_representation(a, tol)
    remaining = a
    rank_total = len(current)
    for _round in range(rank_total):
        if not current:
            break
        ys = [t.f for t in current]
        xs = [t.e for t in current]
        dep = _dependence_index(ys, chain, tol)
        if dep is None:
            # Argument vectors all kill the supremum; emit terms directly.
            for t in current:
                if not rank_one_membership(t.e, t.f, chain, tol):
                    raise DecompositionFailed(
                        "direct term failed the rank-one membership check"
                    )
                terms.append(t)
            current = []
            break
        u_el = chain.elements[dep]
        eye = np.eye(chain.dim, dtype=complex)
        cols = np.column_stack([(eye - u_el.q) @ y for y in ys])
        null_vec = np.linalg.svd(cols)[2][-1].conj()
        pivot = int(np.argmax(np.abs(null_vec)))
        alphas = {
            i: -null_vec[i] / null_vec[pivot]
            for i in range(len(ys))
            if i != pivot
        }
        combo = ys[pivot].astype(complex).copy()
        for i, alpha in alphas.items():
            combo = combo - alpha * ys[i]
        term = RankOne(e=xs[pivot], f=u_el.q @ combo)
        if not rank_one_membership(term.e, term.f, chain, tol):
            raise DecompositionFailed(
                f"split term at chain element {dep} failed the rank-one "
                "membership check"
            )
        terms.append(term)
        remaining = remaining - term.matrix
        rem_report = membership(remaining, chain, tol)
        if not rem_report.is_member:
            raise DecompositionFailed(
                "remainder left the chain space; worst residual "
                f"{rem_report.residuals[rem_report.worst_element]:.3e}"
            )
        current = canonical_rank_representation(remaining, tol, scale=scale)
        expected = rank_total - len(terms)
        if len(current) != expected:
            raise DecompositionFailed(
                f"remainder rank {len(current)} after {len(terms)} splits, "
                f"expected {expected}"
            )
    reconstruction = sum((t.matrix for t in terms), np.zeros_like(original))
    return Decomposition(
        terms=tuple(terms),
        residual=spectral_norm(original - reconstruction),
    )
