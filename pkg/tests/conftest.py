"""Shared fixtures and independent oracles for the test suite."""

import numpy as np
import pytest

import isoposet as ip


def unit(i: int, d: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[i] = 1.0
    return v


def gaussian(rng, *shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def validate(m) -> ip.PartialIsometry:
    return ip.validate_partial_isometry(np.asarray(m, dtype=complex))


def chain_of(*matrices) -> ip.Chain:
    return ip.build_chain([validate(m) for m in matrices])


def projection_nest_c2() -> ip.Chain:
    """The chain {0, e1 e1*, I} on C^2 (upper-triangular member space)."""
    return chain_of(np.diag([1.0, 0.0]), np.eye(2))


def shift_chain_c2() -> ip.Chain:
    """The chain {0, V} with V: e1 -> e2 on C^2 (violates the criterion)."""
    return chain_of(np.array([[0.0, 0.0], [1.0, 0.0]]))


def random_member(chain: ip.Chain, rng) -> np.ndarray:
    """Gaussian operator projected onto the chain space."""
    return ip.project_onto_space(gaussian(rng, chain.dim, chain.dim), chain)


def random_nest_member(chain: ip.Chain, rng) -> np.ndarray:
    """Gaussian operator projected onto the nest algebra of nest_q."""
    return ip.project_onto_nest_algebra(gaussian(rng, chain.dim, chain.dim), chain)


def random_annihilating_member(chain: ip.Chain, x: np.ndarray, rng,
                               adjoint: bool = False,
                               sweeps: int = 400) -> np.ndarray:
    """Member of the chain space annihilating x (or with Z* x = 0).

    Alternates the chain-space projection with the rank-one projection
    onto {Z x = 0} (both orthogonal in Frobenius geometry).
    """
    z = gaussian(rng, chain.dim, chain.dim)
    nx2 = float(np.vdot(x, x).real)
    if nx2 == 0.0:
        return ip.project_onto_space(z, chain)
    for _ in range(sweeps):
        z = ip.project_onto_space(z, chain)
        if adjoint:
            z = z - np.outer(x, x.conj() @ z) / nx2
            residual = float(np.linalg.norm(z.conj().T @ x))
        else:
            z = z - np.outer(z @ x, x.conj()) / nx2
            residual = float(np.linalg.norm(z @ x))
        member = ip.membership(z, chain)
        if residual <= 1e-12 and member.is_member:
            worst = max(member.residuals)
            if worst <= 1e-12 * (1.0 + ip.spectral_norm(z)):
                return z
    raise AssertionError("annihilating-member sampler did not converge")


def row_reduction_rank(m, tol: float = 1e-10) -> int:
    """Rank by Gaussian elimination with partial pivoting (SVD-free oracle)."""
    a = np.array(m, dtype=complex)
    rows, cols = a.shape
    scale = np.max(np.abs(a)) if a.size else 0.0
    if scale == 0.0:
        return 0
    rank = 0
    for col in range(cols):
        pivot = rank + int(np.argmax(np.abs(a[rank:, col])))
        if np.abs(a[pivot, col]) <= tol * scale:
            continue
        a[[rank, pivot]] = a[[pivot, rank]]
        factors = a[rank + 1:, col] / a[rank, col]
        a[rank + 1:] -= np.outer(factors, a[rank])
        rank += 1
        if rank == rows:
            break
    return rank


def spectral_norm_2x2(a, b, c):
    """Closed-form largest singular value of [[a, b], [0, c]] (vectorised)."""
    t = np.abs(a) ** 2 + np.abs(b) ** 2 + np.abs(c) ** 2
    det2 = np.abs(a * c) ** 2
    return np.sqrt((t + np.sqrt(np.maximum(t * t - 4.0 * det2, 0.0))) / 2.0)


def grid_min_norm_2x2(x, y, radius_hint: float) -> float:
    """Minimal spectral norm over triangular A with A x = y, by grid search.

    Requires both coordinates of x nonzero; the single free complex
    parameter b fixes a = (y1 - b x2) / x1 and c = y2 / x2. Three
    refinement stages give roughly 1e-4-relative accuracy.
    """
    x1, x2 = complex(x[0]), complex(x[1])
    y1, y2 = complex(y[0]), complex(y[1])
    assert x1 != 0 and x2 != 0
    c = y2 / x2
    centre = 0.0 + 0.0j
    span = 1.5 * max(radius_hint, 1e-6)
    best = np.inf
    for _ in range(3):
        re = np.linspace(centre.real - span, centre.real + span, 81)
        im = np.linspace(centre.imag - span, centre.imag + span, 81)
        bb = re[None, :] + 1j * im[:, None]
        aa = (y1 - bb * x2) / x1
        norms = spectral_norm_2x2(aa, bb, np.full_like(bb, c))
        idx = np.unravel_index(int(np.argmin(norms)), norms.shape)
        best = float(norms[idx])
        centre = complex(bb[idx])
        span = span / 15.0
    return best


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
