"""Minimal-norm solvers for ``T x = y`` and ``T* x = y`` in a chain space.

The optimal norm for ``T x = y`` is the supremum over the chain of
``||(I - Q_E) y|| / ||(I - P_E) x||`` (for ``T* x = y``, of
``||P_E y|| / ||Q_E x||``), with 0/0 ratios contributing zero and a
nonzero numerator over a zero denominator making the problem infeasible.
The solvers reduce to a triangular vector interpolation in the norms of
the orthogonal increments of ``x`` and ``y`` along the chain, solved by
alternating projections, and assemble the operator from rank-one blocks
that are members by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadZeroRequest,
    DimensionMismatch,
    HypothesisViolated,
    Infeasible,
    NonConvergence,
)
from .linalg import DEFAULT_TOL, Tolerances, as_vector, spectral_norm
from .twonest import Chain

#: Relative inflation of the spectral ball used by the alternating solver.
BALL_INFLATION = 1e-8
#: Alternation cap for the triangular solver.
DYKSTRA_CAP = 2 * 10**5


@dataclass(frozen=True, eq=False)
class TailData:
    """Optimal tail constant ``K`` for triangular interpolation.

    ``K`` is the largest ratio of trailing norms
    ``sqrt(sum_{i >= r} |y_i|^2) / sqrt(sum_{i >= r} |x_i|^2)`` and
    ``certificate_index`` is the 1-based ``r`` attaining it. A zero tail
    of ``x`` with a nonzero tail of ``y`` makes ``K`` infinite.
    """

    x: np.ndarray
    y: np.ndarray
    K: float
    certificate_index: int


def tail_constant(x, y) -> TailData:
    """Compute the tail constant; an infinite ``K`` is a value, not an error."""
    xv = as_vector(x)
    yv = as_vector(y)
    if xv.size != yv.size:
        raise DimensionMismatch(f"lengths {xv.size} vs {yv.size}")
    tail_x = np.cumsum(np.abs(xv[::-1]) ** 2)[::-1]
    tail_y = np.cumsum(np.abs(yv[::-1]) ** 2)[::-1]
    best = 0.0
    cert = 1
    for r in range(xv.size):
        if tail_x[r] == 0.0:
            ratio = 0.0 if tail_y[r] == 0.0 else math.inf
        else:
            ratio = math.sqrt(tail_y[r] / tail_x[r])
        if ratio > best:
            best = ratio
            cert = r + 1
    return TailData(x=xv, y=yv, K=float(best), certificate_index=cert)


@dataclass(frozen=True, eq=False)
class TriangularResult:
    """Solution of the triangular interpolation problem.

    ``a`` is upper-triangular-supported with ``a @ x == y`` exactly (the
    last step is an exact affine re-projection); ``bound`` is the tail
    constant, ``achieved_norm`` the spectral norm actually attained.
    When the alternation cap is hit ``converged`` is False and the best
    iterate is returned with its norm reported honestly.
    """

    a: np.ndarray
    bound: float
    achieved_norm: float
    iterations: int
    converged: bool


def _affine_projector(x: np.ndarray, y: np.ndarray, zero_rows: frozenset[int],
                      zero_cols: frozenset[int]):
    """Exact Frobenius projection onto the affine constraint set.

    The set: upper-triangular support, requested rows/columns zero, and
    ``A x == y`` row by row. Pattern and row constraints act on disjoint
    entries, so one pass is the exact projection.
    """
    n = x.size
    rows = []
    for i in range(n):
        if i in zero_rows:
            rows.append((i, None, None, None))
            continue
        free = np.array([j for j in range(i, n) if j not in zero_cols], dtype=int)
        xs = x[free]
        denom = float(np.sum(np.abs(xs) ** 2))
        rows.append((i, free, xs, denom))

    def project(c: np.ndarray) -> np.ndarray:
        a = np.zeros_like(c)
        for i, free, xs, denom in rows:
            if free is None or denom == 0.0:
                continue
            row = c[i, free]
            gap = (y[i] - row @ xs) / denom
            a[i, free] = row + gap * xs.conj()
        return a

    return project


def _ball_projector(radius: float):
    def project(c: np.ndarray) -> np.ndarray:
        u, s, vh = np.linalg.svd(c)
        return (u * np.minimum(s, radius)) @ vh

    return project


def triangular_interpolate(x, y, zero_rows=(), zero_cols=(),
                           tol: Tolerances = DEFAULT_TOL) -> TriangularResult:
    """Upper-triangular ``A`` with ``A x == y`` and ``||A|| <= K (1 + 1e-6)``.

    Alternates (Dykstra) between the affine set of exact solutions with
    the requested support and the spectral ball of radius
    ``K (1 + 1e-8)``; the intersection is non-empty whenever the tail
    constant ``K`` is finite. Requested zero rows must have ``y_p == 0``
    and zero columns ``x_q == 0``.
    """
    xv = as_vector(x)
    yv = as_vector(y)
    if xv.size != yv.size:
        raise DimensionMismatch(f"lengths {xv.size} vs {yv.size}")
    n = xv.size
    zr = frozenset(int(i) for i in zero_rows)
    zc = frozenset(int(j) for j in zero_cols)
    for p in zr:
        if not 0 <= p < n or yv[p] != 0.0:
            raise BadZeroRequest(f"row {p} requested zero but y[{p}] != 0")
    for q in zc:
        if not 0 <= q < n or xv[q] != 0.0:
            raise BadZeroRequest(f"column {q} requested zero but x[{q}] != 0")
    data = tail_constant(xv, yv)
    if math.isinf(data.K):
        raise Infeasible(
            f"infinite tail constant at position {data.certificate_index}"
        )
    if data.K == 0.0:
        a = np.zeros((n, n), dtype=complex)
        return TriangularResult(a, 0.0, 0.0, 0, True)
    radius = data.K * (1.0 + BALL_INFLATION)
    ball_slack = radius * 1e-12 + 1e-15
    project_affine = _affine_projector(xv, yv, zr, zc)
    project_ball = _ball_projector(radius)

    a = np.zeros((n, n), dtype=complex)
    p_corr = np.zeros_like(a)
    q_corr = np.zeros_like(a)
    best = None
    best_norm = math.inf
    converged = False
    iterations = 0
    for it in range(1, DYKSTRA_CAP + 1):
        iterations = it
        b = project_affine(a + p_corr)
        p_corr = a + p_corr - b
        a = project_ball(b + q_corr)
        q_corr = b + q_corr - a
        norm_b = spectral_norm(b)
        if norm_b < best_norm:
            best = b
            best_norm = norm_b
        if norm_b <= radius + ball_slack:
            converged = True
            break
    result = best if best is not None else np.zeros((n, n), dtype=complex)
    return TriangularResult(
        a=result,
        bound=data.K,
        achieved_norm=float(best_norm),
        iterations=iterations,
        converged=converged,
    )


def _ratio(num: float, den: float, num_zero: bool, den_zero: bool) -> float:
    if num_zero:
        return 0.0
    if den_zero:
        return math.inf
    return num / den


def chain_bound(x, y, chain: Chain,
                tol: Tolerances = DEFAULT_TOL) -> tuple[float, int]:
    """Optimal constant for ``T x = y`` and the chain index attaining it."""
    xv = as_vector(x)
    yv = as_vector(y)
    if xv.size != chain.dim or yv.size != chain.dim:
        raise DimensionMismatch(
            f"vector lengths {xv.size}, {yv.size}; chain dimension {chain.dim}"
        )
    nx = float(np.linalg.norm(xv))
    ny = float(np.linalg.norm(yv))
    eye = np.eye(chain.dim, dtype=complex)
    best = 0.0
    cert = 0
    for idx, e in enumerate(chain.elements):
        num = float(np.linalg.norm((eye - e.q) @ yv))
        den = float(np.linalg.norm((eye - e.p) @ xv))
        ratio = _ratio(num, den, num <= tol.tol_rank * ny, den <= tol.tol_rank * nx)
        if ratio > best:
            best = ratio
            cert = idx
    return float(best), cert


def adjoint_bound(x, y, chain: Chain,
                  tol: Tolerances = DEFAULT_TOL) -> tuple[float, int]:
    """Optimal constant for ``T* x = y`` and the chain index attaining it."""
    xv = as_vector(x)
    yv = as_vector(y)
    if xv.size != chain.dim or yv.size != chain.dim:
        raise DimensionMismatch(
            f"vector lengths {xv.size}, {yv.size}; chain dimension {chain.dim}"
        )
    nx = float(np.linalg.norm(xv))
    ny = float(np.linalg.norm(yv))
    best = 0.0
    cert = 0
    for idx, e in enumerate(chain.elements):
        num = float(np.linalg.norm(e.p @ yv))
        den = float(np.linalg.norm(e.q @ xv))
        ratio = _ratio(num, den, num <= tol.tol_rank * ny, den <= tol.tol_rank * nx)
        if ratio > best:
            best = ratio
            cert = idx
    return float(best), cert


@dataclass(eq=False)
class InterpolationWorkspace:
    """Orthogonal increments of the data along the chain.

    For ``T x = y`` the i-th increment pair is
    ``x_i = (P_{E_i} - P_{E_{i-1}}) x`` and ``y_i = (Q_{E_i} - Q_{E_{i-1}}) y``;
    the adjoint problem reverses the chain and swaps the projection roles.
    ``b`` is the triangular solution in the increment norms and ``a`` the
    coefficient matrix ``a_ij = b_ij / (t_j * s_i)`` (zero where ``b`` is).
    """

    x_vectors: list[np.ndarray]
    y_vectors: list[np.ndarray]
    x_norms: np.ndarray
    y_norms: np.ndarray
    b: np.ndarray | None = field(default=None)
    a: np.ndarray | None = field(default=None)


@dataclass(frozen=True, eq=False)
class InterpolationSolution:
    """Interpolating operator with its certified optimal constant.

    ``operator`` solves the equation within ``1e-9 (1 + ||y||)``, is a
    member of the chain space, and has spectral norm within
    ``1e-6``-relative of the optimal constant ``k``; ``certificate`` is
    the chain index attaining ``k``.
    """

    operator: np.ndarray
    k: float
    certificate: int
    achieved_norm: float
    iterations: int
    converged: bool
    workspace: InterpolationWorkspace


def _increments(vec: np.ndarray, projections: list[np.ndarray]) -> list[np.ndarray]:
    return [
        (projections[i] - projections[i - 1]) @ vec
        for i in range(1, len(projections))
    ]


def _coefficients(b: np.ndarray, t: np.ndarray, s: np.ndarray) -> np.ndarray:
    n = b.shape[0]
    a = np.zeros_like(b)
    for i in range(n):
        for j in range(i, n):
            if b[i, j] != 0.0:
                a[i, j] = b[i, j] / (t[j] * s[i])
    return a


def _detect_zeros(norms: np.ndarray, scale: float, tol: Tolerances) -> frozenset[int]:
    return frozenset(
        int(i) for i in range(norms.size) if norms[i] <= tol.tol_rank * scale
    )


def _zeroed(norms: np.ndarray, zeros: frozenset[int]) -> np.ndarray:
    out = norms.copy()
    for i in zeros:
        out[i] = 0.0
    return out


def chain_interpolate(x, y, chain: Chain,
                      tol: Tolerances = DEFAULT_TOL) -> InterpolationSolution:
    """Solve ``T x = y`` in the chain space with certified minimal norm.

    Requires ``x`` in some initial space and ``y`` in some final space of
    the chain, and a finite optimal constant.
    """
    xv = as_vector(x)
    yv = as_vector(y)
    if xv.size != chain.dim or yv.size != chain.dim:
        raise DimensionMismatch(
            f"vector lengths {xv.size}, {yv.size}; chain dimension {chain.dim}"
        )
    nx = float(np.linalg.norm(xv))
    ny = float(np.linalg.norm(yv))
    eye = np.eye(chain.dim, dtype=complex)
    if not any(
        float(np.linalg.norm((eye - e.p) @ xv)) <= tol.tol_member * nx
        for e in chain.elements
    ):
        raise HypothesisViolated("x lies in no initial space of the chain")
    if not any(
        float(np.linalg.norm((eye - e.q) @ yv)) <= tol.tol_member * ny
        for e in chain.elements
    ):
        raise HypothesisViolated("y lies in no final space of the chain")
    k, cert = chain_bound(xv, yv, chain, tol)
    if math.isinf(k):
        raise Infeasible(f"infinite constant at chain element {cert}")

    x_vecs = _increments(xv, [e.p for e in chain.elements])
    y_vecs = _increments(yv, [e.q for e in chain.elements])
    t = np.array([np.linalg.norm(v) for v in x_vecs])
    s = np.array([np.linalg.norm(v) for v in y_vecs])
    workspace = InterpolationWorkspace(x_vecs, y_vecs, t, s)
    if ny == 0.0 or not x_vecs:
        operator = np.zeros((chain.dim, chain.dim), dtype=complex)
        return InterpolationSolution(operator, k, cert, 0.0, 0, True, workspace)

    zero_rows = _detect_zeros(s, ny, tol)
    zero_cols = _detect_zeros(t, nx, tol)
    tri = triangular_interpolate(
        _zeroed(t, zero_cols), _zeroed(s, zero_rows), zero_rows, zero_cols, tol
    )
    a = _coefficients(tri.a, t, s)
    workspace.b = tri.a
    workspace.a = a
    n = t.size
    operator = np.zeros((chain.dim, chain.dim), dtype=complex)
    for i in range(n):
        for j in range(i, n):
            if a[i, j] != 0.0:
                operator += a[i, j] * np.outer(y_vecs[i], x_vecs[j].conj())
    residual = float(np.linalg.norm(operator @ xv - yv))
    if residual > 1e-9 * (1.0 + ny) or not tri.converged:
        raise NonConvergence(
            f"interpolation residual {residual:.3e} after {tri.iterations} "
            f"alternations (converged={tri.converged})"
        )
    return InterpolationSolution(
        operator=operator,
        k=k,
        certificate=cert,
        achieved_norm=spectral_norm(operator),
        iterations=tri.iterations,
        converged=tri.converged,
        workspace=workspace,
    )


def chain_interpolate_adjoint(x, y, chain: Chain,
                              tol: Tolerances = DEFAULT_TOL) -> InterpolationSolution:
    """Solve ``T* x = y`` in the chain space with certified minimal norm.

    Requires ``y`` in some initial space of the chain and a finite
    optimal constant; ``x`` is unrestricted.
    """
    xv = as_vector(x)
    yv = as_vector(y)
    if xv.size != chain.dim or yv.size != chain.dim:
        raise DimensionMismatch(
            f"vector lengths {xv.size}, {yv.size}; chain dimension {chain.dim}"
        )
    nx = float(np.linalg.norm(xv))
    ny = float(np.linalg.norm(yv))
    eye = np.eye(chain.dim, dtype=complex)
    if not any(
        float(np.linalg.norm((eye - e.p) @ yv)) <= tol.tol_member * ny
        for e in chain.elements
    ):
        raise HypothesisViolated("y lies in no initial space of the chain")
    k, cert = adjoint_bound(xv, yv, chain, tol)
    if math.isinf(k):
        raise Infeasible(f"infinite constant at chain element {cert}")

    # Reversed enumeration: increments are taken downward from the top.
    q_rev = [e.q for e in reversed(chain.elements)]
    p_rev = [e.p for e in reversed(chain.elements)]
    x_vecs = [
        (q_rev[i - 1] - q_rev[i]) @ xv for i in range(1, len(q_rev))
    ]
    y_vecs = [
        (p_rev[i - 1] - p_rev[i]) @ yv for i in range(1, len(p_rev))
    ]
    t = np.array([np.linalg.norm(v) for v in x_vecs])
    s = np.array([np.linalg.norm(v) for v in y_vecs])
    workspace = InterpolationWorkspace(x_vecs, y_vecs, t, s)
    if ny == 0.0 or not x_vecs:
        operator = np.zeros((chain.dim, chain.dim), dtype=complex)
        return InterpolationSolution(operator, k, cert, 0.0, 0, True, workspace)

    zero_rows = _detect_zeros(s, ny, tol)
    zero_cols = _detect_zeros(t, nx, tol)
    tri = triangular_interpolate(
        _zeroed(t, zero_cols), _zeroed(s, zero_rows), zero_rows, zero_cols, tol
    )
    a = _coefficients(tri.a, t, s)
    workspace.b = tri.a
    workspace.a = a
    n = t.size
    operator = np.zeros((chain.dim, chain.dim), dtype=complex)
    for i in range(n):
        for j in range(i, n):
            if a[i, j] != 0.0:
                operator += np.conj(a[i, j]) * np.outer(x_vecs[j], y_vecs[i].conj())
    residual = float(np.linalg.norm(operator.conj().T @ xv - yv))
    if residual > 1e-9 * (1.0 + ny) or not tri.converged:
        raise NonConvergence(
            f"adjoint interpolation residual {residual:.3e} after "
            f"{tri.iterations} alternations (converged={tri.converged})"
        )
    return InterpolationSolution(
        operator=operator,
        k=k,
        certificate=cert,
        achieved_norm=spectral_norm(operator),
        iterations=tri.iterations,
        converged=tri.converged,
        workspace=workspace,
    )
