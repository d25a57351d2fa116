"""Partial isometries, the Halmos-McLaughlin order, and power invariants.

A partial isometry ``V`` acts isometrically on the orthogonal complement
of its kernel; equivalently ``V V* V == V``. Its initial projection is
``P = V* V`` and its final projection is ``Q = V V*``. In the
Halmos-McLaughlin (HM) order ``E <= F`` exactly when ``F`` agrees with
``E`` on the initial space of ``E``, i.e. ``F @ P_E == E``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    IncomparablePair,
    NoUpperBoundProvided,
    NotAPartialIsometry,
    NotAnUpperBound,
    NotTotallyOrdered,
)
from .linalg import (
    DEFAULT_TOL,
    Subspace,
    Tolerances,
    _frozen,
    as_matrix,
    matrix_eq,
    numerical_rank,
    orthonormal_range,
    spectral_norm,
    subspace_intersection,
)


@dataclass(frozen=True, eq=False)
class PartialIsometry:
    """A validated partial isometry with cached projections and spaces."""

    v: np.ndarray
    p: np.ndarray  # initial projection V* V
    q: np.ndarray  # final projection V V*
    initial_space: Subspace
    final_space: Subspace

    def __post_init__(self):
        for name in ("v", "p", "q"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    @property
    def dim(self) -> int:
        return self.v.shape[0]

    @property
    def rank(self) -> int:
        return self.initial_space.dim


def partial_isometry_residuals(m, tol: Tolerances = DEFAULT_TOL) -> dict[str, float]:
    """Residuals of the six classical equivalent characterisations.

    Keys: ``isometry_on_initial`` (V isometric on ker(V)-perp),
    ``coisometry_on_initial`` (same for V*), ``final_projection`` and
    ``initial_projection`` (V V* resp. V* V Hermitian idempotent),
    ``triple_product`` (V V* V = V), ``adjoint_triple_product``
    (V* V V* = V*). For a partial isometry all six vanish together.
    """
    v = as_matrix(m)
    if v.shape[0] != v.shape[1]:
        raise DimensionMismatch(f"matrix must be square, got {v.shape}")
    vh = v.conj().T
    p = vh @ v
    q = v @ vh

    def isometry_residual(w: np.ndarray) -> float:
        basis = orthonormal_range(w.conj().T, tol).basis  # ker(w)-perp
        if basis.shape[1] == 0:
            return 0.0
        img = w @ basis
        gram = img.conj().T @ img
        return spectral_norm(gram - np.eye(basis.shape[1], dtype=complex))

    def projection_residual(r: np.ndarray) -> float:
        return max(spectral_norm(r @ r - r), spectral_norm(r - r.conj().T))

    return {
        "isometry_on_initial": isometry_residual(v),
        "coisometry_on_initial": isometry_residual(vh),
        "final_projection": projection_residual(q),
        "initial_projection": projection_residual(p),
        "triple_product": spectral_norm(v @ vh @ v - v),
        "adjoint_triple_product": spectral_norm(vh @ v @ vh - vh),
    }


def validate_partial_isometry(m, tol: Tolerances = DEFAULT_TOL) -> PartialIsometry:
    """Validate ``m`` and wrap it with cached projections and spaces.

    Raises :class:`NotAPartialIsometry` when the triple-product residual
    ``||V V* V - V||`` exceeds ``tol_eq * (1 + ||V||)``.
    """
    v = as_matrix(m)
    if v.shape[0] != v.shape[1]:
        raise DimensionMismatch(f"matrix must be square, got {v.shape}")
    vh = v.conj().T
    scale = 1.0 + spectral_norm(v)
    residual = spectral_norm(v @ vh @ v - v)
    if residual > tol.tol_eq * scale:
        raise NotAPartialIsometry(
            f"||V V* V - V|| = {residual:.3e} exceeds {tol.tol_eq * scale:.3e}"
        )
    p = vh @ v
    p = (p + p.conj().T) / 2.0
    q = v @ vh
    q = (q + q.conj().T) / 2.0
    return PartialIsometry(
        v=v,
        p=p,
        q=q,
        initial_space=orthonormal_range(p, tol),
        final_space=orthonormal_range(q, tol),
    )


def zero_isometry(dim: int, tol: Tolerances = DEFAULT_TOL) -> PartialIsometry:
    """The zero operator, the bottom element of the HM order."""
    return validate_partial_isometry(np.zeros((dim, dim), dtype=complex), tol)


def hm_leq(e: PartialIsometry, f: PartialIsometry,
           tol: Tolerances = DEFAULT_TOL) -> bool:
    """Halmos-McLaughlin order: ``F`` agrees with ``E`` on ``E``'s initial space."""
    if e.dim != f.dim:
        raise DimensionMismatch(f"dimension {e.dim} vs {f.dim}")
    scale = 1.0 + spectral_norm(e.v)
    return spectral_norm(f.v @ e.p - e.v) <= tol.tol_eq * scale


def _check_same_dim(family: list[PartialIsometry]) -> int:
    d = family[0].dim
    for e in family[1:]:
        if e.dim != d:
            raise DimensionMismatch(f"dimension {e.dim} vs {d}")
    return d


def _sorted_unique(family: list[PartialIsometry],
                   tol: Tolerances) -> list[tuple[PartialIsometry, int]]:
    """Sort ascending under hm_leq and drop duplicates.

    Returns (element, original index) pairs; raises IncomparablePair when
    two distinct members fail to compare. Sorting by rank is sound because
    E < F strictly implies rank(E) < rank(F), and distinct elements of
    equal rank are never comparable.
    """
    order = sorted(range(len(family)), key=lambda i: family[i].rank)
    out: list[tuple[PartialIsometry, int]] = []
    for i in order:
        e = family[i]
        if out and matrix_eq(out[-1][0].v, e.v, tol):
            continue
        if out and not hm_leq(out[-1][0], e, tol):
            raise IncomparablePair(out[-1][1], i)
        out.append((e, i))
    return out


def infimum(family, tol: Tolerances = DEFAULT_TOL) -> PartialIsometry:
    """Greatest lower bound of an arbitrary non-empty family.

    Computed as the reference member restricted to the largest subspace
    of the common initial space on which all members agree. Agreement is
    decided by singular-value thresholding of stacked differences.
    """
    family = list(family)
    if not family:
        raise ValueError("infimum of an empty family is undefined")
    d = _check_same_dim(family)
    e0 = family[0]
    common = subspace_intersection([e.initial_space for e in family], tol)
    if common.dim == 0:
        return zero_isometry(d, tol)
    if len(family) > 1:
        stacked = np.vstack([(e.v - e0.v) @ common.basis for e in family[1:]])
        _, s, coeffs = np.linalg.svd(stacked, full_matrices=True)
        # Differences of contractions have natural scale <= 2; floor the
        # cutoff so a pure-noise difference reads as full agreement.
        reference = max(float(s[0]) if s.size else 0.0, 1.0)
        r = int(np.sum(s > tol.tol_rank * reference))
        agreement = Subspace.from_columns(
            common.basis @ coeffs[r:].conj().T, ambient_dim=d, tol=tol
        )
    else:
        agreement = common
    if agreement.dim == 0:
        return zero_isometry(d, tol)
    return validate_partial_isometry(e0.v @ agreement.projection(), tol)


def supremum(family, upper_bound: PartialIsometry | None = None,
             tol: Tolerances = DEFAULT_TOL) -> PartialIsometry:
    """Least upper bound of a chain, or of a bounded family.

    A totally ordered finite family attains its maximum. Otherwise an
    ``upper_bound`` must be given; it is verified, and the result is the
    bound restricted to the span of the union of the initial spaces.
    """
    family = list(family)
    if not family:
        raise ValueError("supremum of an empty family is undefined")
    d = _check_same_dim(family)
    if upper_bound is not None and upper_bound.dim != d:
        raise DimensionMismatch(f"dimension {upper_bound.dim} vs {d}")
    try:
        chain = _sorted_unique(family, tol)
    except IncomparablePair:
        chain = None
    if chain is not None:
        top = chain[-1][0]
        if upper_bound is not None and not hm_leq(top, upper_bound, tol):
            raise NotAnUpperBound("bound does not dominate the family maximum")
        return top
    if upper_bound is None:
        raise NoUpperBoundProvided(
            "family is not totally ordered and no upper bound was given"
        )
    for i, e in enumerate(family):
        if not hm_leq(e, upper_bound, tol):
            raise NotAnUpperBound(f"bound does not dominate element {i}")
    span = Subspace.from_columns(
        np.hstack([e.initial_space.basis for e in family]), ambient_dim=d, tol=tol
    )
    return validate_partial_isometry(upper_bound.v @ span.projection(), tol)


def complete_cover(family, tol: Tolerances = DEFAULT_TOL,
                   dim: int | None = None) -> list[PartialIsometry]:
    """Smallest complete totally ordered family containing the input.

    For finite input this is the sorted, deduplicated chain with the zero
    element adjoined: finite subsets attain their minima and maxima, so no
    new infima or suprema arise.
    """
    family = list(family)
    if not family:
        if dim is None:
            raise ValueError("dim is required for an empty family")
        return [zero_isometry(dim, tol)]
    d = _check_same_dim(family)
    try:
        chain = _sorted_unique(family, tol)
    except IncomparablePair as exc:
        raise NotTotallyOrdered(str(exc)) from exc
    elements = [e for e, _ in chain]
    if elements[0].rank > 0:
        elements.insert(0, zero_isometry(d, tol))
    return elements


@dataclass(frozen=True, eq=False)
class PowerPIReport:
    """Power partial isometry verdict and Halmos-Wallen invariants.

    ``rank_sequence[k]`` is the rank of ``V^k`` (including ``k = 0``).
    ``dim_unitary`` is the stabilised rank, the size of the unitary part;
    ``shift_multiplicities[k]`` counts truncated shifts of index ``k``,
    recovered from second differences of the rank sequence (the unitary
    part cancels). The multiplicities are meaningful only when ``is_ppi``.
    ``failure_power`` is the first power failing validation, if any.
    """

    is_ppi: bool
    horizon: int
    dim_unitary: int
    shift_multiplicities: dict[int, int]
    rank_sequence: tuple[int, ...]
    failure_power: int | None = None


def hw_invariants(v: PartialIsometry, tol: Tolerances = DEFAULT_TOL) -> PowerPIReport:
    """Check all powers up to ``2 * dim`` and report shift/unitary structure.

    The horizon ``2 * dim`` is a policy: ranks of powers stabilise within
    ``dim`` steps, and the extra steps guard against late failures.
    """
    d = v.dim
    horizon = 2 * d
    ranks = [d]
    is_ppi = True
    failure: int | None = None
    current = np.eye(d, dtype=complex)
    for k in range(1, horizon + 2):
        current = current @ v.v
        ranks.append(numerical_rank(current, tol))
        if k <= horizon and failure is None:
            ch = current.conj().T
            scale = 1.0 + spectral_norm(current)
            if spectral_norm(current @ ch @ current - current) > tol.tol_eq * scale:
                is_ppi = False
                failure = k
    multiplicities: dict[int, int] = {}
    if is_ppi:
        for k in range(1, horizon + 1):
            m_k = ranks[k - 1] - 2 * ranks[k] + ranks[k + 1]
            if m_k > 0:
                multiplicities[k] = m_k
    return PowerPIReport(
        is_ppi=is_ppi,
        horizon=horizon,
        dim_unitary=ranks[d],
        shift_multiplicities=multiplicities,
        rank_sequence=tuple(ranks[: horizon + 1]),
        failure_power=failure,
    )
