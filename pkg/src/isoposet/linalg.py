"""Dense complex linear algebra substrate.

Every other module builds on the conventions fixed here:

* the inner product is linear in the FIRST argument and conjugate-linear
  in the second, ``inner(u, v) == v.conj() @ u``;
* rank decisions keep singular values with ``sigma > tol_rank * sigma_max``;
* matrix equality is the relative Frobenius test
  ``norm(a - b) <= tol_eq * (1 + max(norm(a), norm(b)))``;
* subspaces are stored with orthonormal columns and re-orthonormalised
  once after every construction, so chained operations do not drift.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch

#: Largest supported ambient dimension; enforced where files are parsed.
MAX_DIM = 64


@dataclass(frozen=True)
class Tolerances:
    """Relative tolerances used across the package.

    ``tol_rank``
        singular-value cutoff, relative to the largest singular value;
    ``tol_eq``
        matrix/operator equality, relative Frobenius;
    ``tol_member``
        membership residual, relative to ``1 + norm(T)``.
    """

    tol_rank: float = 1e-10
    tol_eq: float = 1e-9
    tol_member: float = 1e-8

    def __post_init__(self):
        for name in ("tol_rank", "tol_eq", "tol_member"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError(f"{name} must lie strictly in (0, 1), got {value!r}")


DEFAULT_TOL = Tolerances()


def as_matrix(m) -> np.ndarray:
    """Coerce to a finite complex 2-d array (at least 1 x 1)."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got array of ndim {a.ndim}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"matrix must be at least 1 x 1, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite (no NaN/Inf)")
    return a


def as_vector(v) -> np.ndarray:
    """Coerce to a finite complex 1-d array."""
    a = np.asarray(v, dtype=complex).reshape(-1)
    if a.size < 1:
        raise ValueError("vector must have at least one entry")
    if not np.all(np.isfinite(a)):
        raise ValueError("vector entries must be finite (no NaN/Inf)")
    return a


def inner(u, v) -> complex:
    """Inner product, linear in the first argument: ``<u, v> = v* u``."""
    return complex(np.vdot(np.asarray(v, dtype=complex), np.asarray(u, dtype=complex)))


def spectral_norm(m) -> float:
    """Largest singular value."""
    a = as_matrix(m)
    return float(np.linalg.svd(a, compute_uv=False)[0])


def frobenius_norm(m) -> float:
    return float(np.linalg.norm(np.asarray(m, dtype=complex)))


def matrix_eq(a, b, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Relative Frobenius equality test."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape {a.shape} vs {b.shape}")
    scale = 1.0 + max(frobenius_norm(a), frobenius_norm(b))
    return frobenius_norm(a - b) <= tol.tol_eq * scale


def svd_factor(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD ``m = u @ diag(s) @ vh`` with ``s`` non-increasing."""
    return np.linalg.svd(as_matrix(m), full_matrices=False)


def numerical_rank(m, tol: Tolerances = DEFAULT_TOL) -> int:
    """Number of singular values above the relative cutoff."""
    s = np.linalg.svd(as_matrix(m), compute_uv=False)
    if s.size == 0 or s[0] <= 0.0:
        return 0
    return int(np.sum(s > tol.tol_rank * s[0]))


def _orthonormal_columns(cols: np.ndarray, tol: Tolerances) -> np.ndarray:
    """Orthonormal basis of the column space; empty (d, 0) when rank 0."""
    d = cols.shape[0]
    if cols.shape[1] == 0:
        return np.zeros((d, 0), dtype=complex)
    u, s, _ = np.linalg.svd(cols, full_matrices=False)
    if s.size == 0 or s[0] <= 0.0:
        return np.zeros((d, 0), dtype=complex)
    r = int(np.sum(s > tol.tol_rank * s[0]))
    return u[:, :r]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Subspace:
    """Closed subspace of C^d, held as an orthonormal column basis.

    ``basis`` has shape ``(ambient_dim, dim)``; ``dim == 0`` encodes the
    zero subspace. Instances are immutable; arrays are marked read-only.
    """

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        if self.basis.ndim != 2 or self.basis.shape[0] != self.ambient_dim:
            raise ValueError(
                f"basis shape {self.basis.shape} does not match ambient "
                f"dimension {self.ambient_dim}"
            )
        object.__setattr__(self, "basis", _frozen(self.basis))

    @staticmethod
    def from_columns(cols, ambient_dim: int | None = None,
                     tol: Tolerances = DEFAULT_TOL) -> "Subspace":
        """Span of the given columns, re-orthonormalised."""
        cols = np.asarray(cols, dtype=complex)
        if cols.ndim == 1:
            cols = cols.reshape(-1, 1)
        d = cols.shape[0] if ambient_dim is None else ambient_dim
        return Subspace(d, _orthonormal_columns(cols, tol))

    @staticmethod
    def zero(ambient_dim: int) -> "Subspace":
        return Subspace(ambient_dim, np.zeros((ambient_dim, 0), dtype=complex))

    @staticmethod
    def full(ambient_dim: int) -> "Subspace":
        return Subspace(ambient_dim, np.eye(ambient_dim, dtype=complex))

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projection(self) -> np.ndarray:
        """Orthogonal projection matrix onto the subspace."""
        if self.dim == 0:
            return np.zeros((self.ambient_dim, self.ambient_dim), dtype=complex)
        return self.basis @ self.basis.conj().T

    def complement(self) -> "Subspace":
        """Orthogonal complement."""
        d, k = self.ambient_dim, self.dim
        if k == 0:
            return Subspace.full(d)
        u, _, _ = np.linalg.svd(self.basis, full_matrices=True)
        return Subspace(d, u[:, k:])

    def contains(self, vec, tol: Tolerances = DEFAULT_TOL) -> bool:
        """Whether the vector lies in the subspace (relative residual)."""
        v = as_vector(vec)
        nv = np.linalg.norm(v)
        if nv == 0.0:
            return True
        residual = np.linalg.norm(v - self.projection() @ v)
        return float(residual) <= tol.tol_eq * float(nv)


def orthonormal_range(m, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    """Orthonormal basis of the column space of ``m``."""
    a = as_matrix(m)
    return Subspace(a.shape[0], _orthonormal_columns(a, tol))


def orthonormal_kernel(m, tol: Tolerances = DEFAULT_TOL,
                       scale: float = 0.0) -> Subspace:
    """Orthonormal basis of the null space of ``m``.

    ``scale`` is an optional floor for the cutoff reference: singular
    values are kept when above ``tol_rank * max(sigma_max, scale)``.
    Callers whose input has a known natural scale (projections,
    differences of contractions) pass it so a matrix consisting of pure
    rounding noise is treated as zero rather than as full rank.
    """
    a = as_matrix(m)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    reference = max(float(s[0]) if s.size else 0.0, scale)
    if reference <= 0.0:
        r = 0
    else:
        r = int(np.sum(s > tol.tol_rank * reference))
    return Subspace(a.shape[1], vh[r:].conj().T)


def subspace_leq(a: Subspace, b: Subspace, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Whether ``a`` is contained in ``b`` (columnwise residual test)."""
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch(
            f"ambient dimension {a.ambient_dim} vs {b.ambient_dim}"
        )
    if a.dim == 0:
        return True
    residual = a.basis - b.projection() @ a.basis
    col_norms = np.linalg.norm(residual, axis=0)
    return bool(np.max(col_norms) <= tol.tol_eq)


def subspace_intersection(spaces, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    """Intersection, via the kernel of stacked complementary projections."""
    spaces = list(spaces)
    if not spaces:
        raise ValueError("need at least one subspace")
    d = spaces[0].ambient_dim
    for s in spaces:
        if s.ambient_dim != d:
            raise DimensionMismatch(
                f"ambient dimension {s.ambient_dim} vs {d}"
            )
    eye = np.eye(d, dtype=complex)
    stacked = np.vstack([eye - s.projection() for s in spaces])
    # Complementary projections have unit norm, so floor the cutoff there.
    return orthonormal_kernel(stacked, tol, scale=1.0)
