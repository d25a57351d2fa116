"""Chains of partial isometries and the operator space they determine.

A chain ``0 = E_0 < E_1 < ... < E_n`` determines the space of operators
``T`` with ``(I - Q_E) T P_E == 0`` for every element ``E``, i.e. the
operators mapping each initial space into the corresponding final space.
This module decides membership, decides when that space is an algebra
(equivalently a left ideal of the nest algebra of the final projections),
and constructs rank-one counterexamples when it is not.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    NonConvergence,
    PreconditionViolated,
)
from .linalg import (
    DEFAULT_TOL,
    Subspace,
    Tolerances,
    _frozen,
    as_matrix,
    matrix_eq,
    orthonormal_range,
    spectral_norm,
    subspace_intersection,
    subspace_leq,
)
from .pisom import (
    PartialIsometry,
    _check_same_dim,
    _sorted_unique,
    hw_invariants,
    zero_isometry,
)

#: Sweep cap for the cyclic projection routines.
PROJECTION_SWEEP_CAP = 10**5
#: Relative residual target for cyclic projections.
PROJECTION_RESIDUAL = 1e-12


@dataclass(frozen=True, eq=False)
class Chain:
    """Complete totally ordered family ``0 = E_0 < ... < E_n``.

    ``nest_p`` and ``nest_q`` are the derived nests of initial and final
    projections, each sorted ascending and containing 0 and I.
    """

    dim: int
    elements: tuple[PartialIsometry, ...]
    nest_p: tuple[np.ndarray, ...]
    nest_q: tuple[np.ndarray, ...]

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def top(self) -> PartialIsometry:
        return self.elements[-1]


def _projection_nest(projections: list[np.ndarray], dim: int,
                     tol: Tolerances) -> tuple[np.ndarray, ...]:
    candidates = projections + [np.eye(dim, dtype=complex)]
    candidates.sort(key=lambda p: float(np.real(np.trace(p))))
    nest: list[np.ndarray] = []
    for p in candidates:
        if nest and matrix_eq(nest[-1], p, tol):
            continue
        nest.append(_frozen(p))
    return tuple(nest)


def build_chain(family, tol: Tolerances = DEFAULT_TOL,
                dim: int | None = None) -> Chain:
    """Sort, deduplicate, adjoin 0, and derive the two projection nests.

    Raises :class:`IncomparablePair` (with the offending input indices)
    when two members fail to compare.
    """
    family = list(family)
    if not family:
        if dim is None:
            raise ValueError("dim is required for an empty family")
        elements = [zero_isometry(dim, tol)]
    else:
        dim = _check_same_dim(family)
        elements = [e for e, _ in _sorted_unique(family, tol)]
        if elements[0].rank > 0:
            elements.insert(0, zero_isometry(dim, tol))
    return Chain(
        dim=dim,
        elements=tuple(elements),
        nest_p=_projection_nest([e.p.copy() for e in elements], dim, tol),
        nest_q=_projection_nest([e.q.copy() for e in elements], dim, tol),
    )


def _chain_elements(chain) -> list[PartialIsometry]:
    if isinstance(chain, Chain):
        return list(chain.elements)
    return list(chain)


@dataclass(frozen=True)
class MembershipReport:
    """Per-element residuals ``||(I - Q_E) T P_E||`` and the verdict."""

    is_member: bool
    residuals: tuple[float, ...]
    worst_element: int


def membership(t, chain, tol: Tolerances = DEFAULT_TOL) -> MembershipReport:
    """Decide whether ``t`` maps every initial space into the final space.

    ``chain`` may be a :class:`Chain` or any iterable of validated
    partial isometries (the criterion does not need the chain structure).
    """
    elements = _chain_elements(chain)
    a = as_matrix(t)
    d = elements[0].dim if elements else a.shape[0]
    if a.shape != (d, d):
        raise DimensionMismatch(f"operator shape {a.shape}, chain dimension {d}")
    eye = np.eye(d, dtype=complex)
    residuals = tuple(
        spectral_norm((eye - e.q) @ a @ e.p) for e in elements
    )
    threshold = tol.tol_member * (1.0 + spectral_norm(a))
    worst = int(np.argmax(residuals)) if residuals else 0
    is_member = not residuals or residuals[worst] <= threshold
    return MembershipReport(is_member, residuals, worst)


RANGE_IN_INITIAL = "range_in_initial"
RANGE_FULL = "range_full"
VIOLATION = "violation"


@dataclass(frozen=True)
class AlgebraReport:
    """Outcome of the algebra / left-ideal criterion on a chain.

    The space is an algebra exactly when every element has its range
    inside its initial space or has full range; it is a nest algebra
    exactly when the identity is a member.
    """

    is_algebra: bool
    per_element_status: tuple[str, ...]
    is_nest_algebra: bool
    ppi_status: tuple[bool, ...]


def algebra_criterion(chain: Chain, tol: Tolerances = DEFAULT_TOL) -> AlgebraReport:
    """Classify every chain element and aggregate the criterion."""
    statuses = []
    for e in chain.elements:
        # Full range is tested first so unitaries at the tolerance edge do
        # not fall through to a spurious containment failure.
        if e.rank == chain.dim:
            statuses.append(RANGE_FULL)
        elif subspace_leq(e.final_space, e.initial_space, tol):
            statuses.append(RANGE_IN_INITIAL)
        else:
            statuses.append(VIOLATION)
    identity = np.eye(chain.dim, dtype=complex)
    return AlgebraReport(
        is_algebra=all(s != VIOLATION for s in statuses),
        per_element_status=tuple(statuses),
        is_nest_algebra=membership(identity, chain, tol).is_member,
        ppi_status=tuple(hw_invariants(e, tol).is_ppi for e in chain.elements),
    )


@dataclass(frozen=True, eq=False)
class XYWitness:
    """Vectors certifying that the chain space is not a left ideal.

    ``x`` has a nonzero component in ran(E) and ``y`` lies outside
    ran(E), while for every chain element V either ``x`` is in ker(V) or
    ``y`` is in ran(V); hence the rank-one operator sending z to
    ``<z, x> y`` is a member that does not leave ran(E) invariant.
    ``case`` records which construction produced ``y``.
    """

    x: np.ndarray
    y: np.ndarray
    case: str

    def __post_init__(self):
        object.__setattr__(self, "x", _frozen(_phase_fixed(self.x)))
        object.__setattr__(self, "y", _frozen(_phase_fixed(self.y)))


def _phase_fixed(vec: np.ndarray) -> np.ndarray:
    """Rotate so the largest-modulus entry is real positive (determinism)."""
    i = int(np.argmax(np.abs(vec)))
    pivot = vec[i]
    if np.abs(pivot) == 0.0:
        return vec
    return vec * (np.conj(pivot) / np.abs(pivot))


def _leading_right_singular(m: np.ndarray) -> tuple[float, np.ndarray]:
    _, s, vh = np.linalg.svd(m)
    return float(s[0]), _phase_fixed(vh[0].conj())


def _in_kernel(e: PartialIsometry, x: np.ndarray, tol: Tolerances) -> bool:
    nx = float(np.linalg.norm(x))
    if nx == 0.0:
        return True
    return float(np.linalg.norm(e.p @ x)) <= tol.tol_member * nx


def counterexample_xy(chain: Chain, e_index: int,
                      tol: Tolerances = DEFAULT_TOL) -> XYWitness:
    """Construct witness vectors for a violating chain element.

    The element at ``e_index`` must have range neither inside its initial
    space nor equal to the whole space. Free choices are resolved
    deterministically: the range vector with the largest kernel component
    is the leading singular direction of ``(I - P_E) Q_E``, and "any"
    vector of a prescribed subspace is its first basis vector.
    """
    elements = list(chain.elements)
    if not 0 <= e_index < len(elements):
        raise PreconditionViolated(f"index {e_index} out of range")
    e = elements[e_index]
    d = chain.dim
    if e.rank == d or subspace_leq(e.final_space, e.initial_space, tol):
        raise PreconditionViolated(
            f"element {e_index} does not violate the algebra criterion"
        )
    eye = np.eye(d, dtype=complex)
    sigma, z = _leading_right_singular((eye - e.p) @ e.q)
    # z in ran(E) with maximal kernel component; sigma > 0 by the violation.
    x = (eye - e.p) @ z
    kernel_mask = [_in_kernel(v, x, tol) for v in elements]

    if all(kernel_mask):
        y = e.final_space.complement().basis[:, 0]
        return XYWitness(x, y, "x_in_all_kernels")

    w_index = max(i for i, hit in enumerate(kernel_mask) if hit)
    if w_index > e_index:
        w = elements[w_index]
        gap = orthonormal_range(w.q - e.q, tol)
        return XYWitness(x, gap.basis[:, 0], "y_from_kernel_supremum")

    # From here on x is annihilated exactly by the elements up to E.
    for j in range(e_index + 1, len(elements)):
        v = elements[j]
        if not subspace_leq(e.final_space, v.initial_space, tol):
            # Some later element's initial space misses ran(E); replace x
            # by the kernel component relative to that element.
            _, z2 = _leading_right_singular((eye - v.p) @ e.q)
            x2 = (eye - v.p) @ z2
            mask2 = [_in_kernel(u, x2, tol) for u in elements]
            if all(mask2):
                y = e.final_space.complement().basis[:, 0]
            else:
                w2 = elements[max(i for i, hit in enumerate(mask2) if hit)]
                y = orthonormal_range(w2.q - e.q, tol).basis[:, 0]
            return XYWitness(x2, y, "x_replaced_later_element")

    # Every later element's initial space contains ran(E): pick a vector
    # in the common initial gap above ker(E)-perp and push it forward.
    later = [elements[j].initial_space for j in range(e_index + 1, len(elements))]
    caps = subspace_intersection(later, tol)
    gap = orthonormal_range(caps.projection() - e.p, tol)
    w_vec = gap.basis[:, 0]
    y = elements[e_index + 1].v @ w_vec
    return XYWitness(x, y, "y_from_common_initial_gap")


def _cyclic_project(t: np.ndarray, pairs: list[tuple[np.ndarray, np.ndarray]],
                    tol_rel: float = PROJECTION_RESIDUAL,
                    cap: int = PROJECTION_SWEEP_CAP) -> np.ndarray:
    """Cyclic orthogonal projections onto ``{X : (I - L) X R == 0}`` sets.

    Each step is the Frobenius-orthogonal projection onto one constraint
    subspace; cyclic projections onto finitely many subspaces converge to
    the projection onto their intersection.
    """
    d = t.shape[0]
    eye = np.eye(d, dtype=complex)
    scale = 1.0 + spectral_norm(t)
    target = tol_rel * scale
    for _ in range(cap):
        for left, right in pairs:
            t = t - (eye - left) @ t @ right
        worst = max(
            (spectral_norm((eye - left) @ t @ right) for left, right in pairs),
            default=0.0,
        )
        if worst <= target:
            return t
    raise NonConvergence(
        f"cyclic projection did not reach {target:.1e} within {cap} sweeps"
    )


def project_onto_space(t, chain: Chain, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Frobenius-orthogonal projection of ``t`` onto the chain space."""
    a = as_matrix(t)
    if a.shape != (chain.dim, chain.dim):
        raise DimensionMismatch(
            f"operator shape {a.shape}, chain dimension {chain.dim}"
        )
    pairs = [(e.q, e.p) for e in chain.elements]
    return _cyclic_project(a, pairs)


def project_onto_nest_algebra(t, chain: Chain,
                              tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Projection onto the nest algebra of the final projections.

    That algebra consists of the operators leaving every range in
    ``nest_q`` invariant: ``(I - Q) S Q == 0`` for all ``Q``.
    """
    a = as_matrix(t)
    if a.shape != (chain.dim, chain.dim):
        raise DimensionMismatch(
            f"operator shape {a.shape}, chain dimension {chain.dim}"
        )
    pairs = [(q, q) for q in chain.nest_q]
    return _cyclic_project(a, pairs)
