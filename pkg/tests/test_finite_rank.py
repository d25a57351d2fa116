"""Rank-one membership and the constructive finite-rank decomposition."""

import numpy as np
import pytest

import isoposet as ip
from isoposet.errors import NotAMember

from conftest import chain_of, gaussian, projection_nest_c2, shift_chain_c2, unit


def random_rank_one_member(chain, rng):
    """Rank-one member built straight from the membership characterisation."""
    d = chain.dim
    eye = np.eye(d, dtype=complex)
    top = chain.top
    routes = []
    if top.rank < d:
        routes.append("kernel")
    routes.extend("housed" for _ in range(2))
    route = routes[int(rng.integers(0, len(routes)))]
    if route == "kernel":
        e = (eye - top.p) @ gaussian(rng, d)
        f = gaussian(rng, d)
    else:
        idx = int(rng.integers(1, len(chain.elements)))
        f = chain.elements[idx].q @ gaussian(rng, d)
        pred = ip.e_minus(chain, idx)
        e = (eye - pred.p) @ gaussian(rng, d)
    return e, f


def random_member_operator(chain, rng, rank):
    """Sum of valid rank-one members with prescribed numerical rank."""
    d = chain.dim
    assert rank <= d
    for _ in range(500):
        r = np.zeros((d, d), dtype=complex)
        for _ in range(rank):
            e, f = random_rank_one_member(chain, rng)
            r += np.outer(f, e.conj())
        if ip.numerical_rank(r) == rank:
            return r
    raise AssertionError(f"could not hit rank {rank} on this chain")


def test_e_minus_conventions():
    chain = ip.random_chain(5, 2, "mixed", 3)
    assert ip.e_minus(chain, 2) is chain.elements[1]
    assert ip.e_minus(chain, 1) is chain.elements[0]
    assert ip.e_minus(chain, 0).rank == 0


def test_rank_one_membership_examples():
    shift = shift_chain_c2()
    # e2 lies in the kernel of the chain supremum.
    assert ip.rank_one_membership(unit(1, 2), unit(0, 2), shift)
    nest = projection_nest_c2()
    # No nest element houses f = e2 with e = e1 killing its predecessor.
    assert not ip.rank_one_membership(unit(0, 2), unit(1, 2), nest)
    assert ip.rank_one_membership(unit(0, 2), np.zeros(2), nest)
    assert ip.rank_one_membership(np.zeros(2), unit(0, 2), nest)


def test_canonical_rank_representation():
    assert ip.canonical_rank_representation(np.zeros((3, 3))) == []
    terms = ip.canonical_rank_representation(np.diag([1.0, 0.0]))
    assert len(terms) == 1
    assert np.allclose(terms[0].matrix, np.diag([1.0, 0.0]))

    rng = np.random.default_rng(5)
    r = np.zeros((6, 6), dtype=complex)
    for _ in range(3):
        r += np.outer(gaussian(rng, 6), gaussian(rng, 6))
    terms = ip.canonical_rank_representation(r)
    assert len(terms) == 3
    rebuilt = sum(t.matrix for t in terms)
    assert np.linalg.norm(r - rebuilt) <= 1e-10 * np.linalg.norm(r)
    # both vector families linearly independent
    es = np.column_stack([t.e for t in terms])
    fs = np.column_stack([t.f for t in terms])
    assert np.linalg.matrix_rank(es) == 3
    assert np.linalg.matrix_rank(fs) == 3


def test_decompose_rank_one_input():
    nest = projection_nest_c2()
    r = np.array([[0.0, 1.0], [0.0, 0.0]])  # e2 -> e1
    result = ip.decompose_finite_rank(r, nest)
    assert len(result.terms) == 1
    assert result.residual <= 1e-12
    t = result.terms[0]
    assert ip.rank_one_membership(t.e, t.f, nest)


def test_decompose_identity_on_projection_nest():
    nest = projection_nest_c2()
    result = ip.decompose_finite_rank(np.eye(2), nest)
    assert len(result.terms) == 2
    assert result.residual <= 1e-12
    matrices = sorted(
        (np.round(t.matrix.real, 9).tolist() for t in result.terms),
    )
    assert matrices == [
        [[0.0, 0.0], [0.0, 1.0]],
        [[1.0, 0.0], [0.0, 0.0]],
    ]
    for t in result.terms:
        assert ip.rank_one_membership(t.e, t.f, nest)


def test_decompose_shift_chain_c3_roundtrip():
    # V: e1 -> e2, e3 -> 0 on C^3; build a rank-2 member and split it.
    v = np.outer(unit(1, 3), unit(0, 3).conj())
    chain = chain_of(v)
    rng = np.random.default_rng(17)
    r = random_member_operator(chain, rng, 2)
    result = ip.decompose_finite_rank(r, chain)
    assert len(result.terms) == 2
    rebuilt = sum(t.matrix for t in result.terms)
    assert np.linalg.norm(r - rebuilt) <= 1e-8 * np.linalg.norm(r)
    for t in result.terms:
        assert ip.rank_one_membership(t.e, t.f, chain)


def test_decompose_rejects_non_member():
    with pytest.raises(NotAMember):
        ip.decompose_finite_rank(np.array([[0.0, 0.0], [1.0, 0.0]]),
                                 projection_nest_c2())


def test_decompose_zero_operator():
    result = ip.decompose_finite_rank(np.zeros((2, 2)), projection_nest_c2())
    assert result.terms == ()
    assert result.residual == 0.0


def test_decomposition_soundness_property(rng):
    modes = ("nest", "violating", "mixed")
    for trial in range(30):
        d = int(rng.integers(3, 11))
        n = int(rng.integers(1, min(3, d) + 1))
        chain = ip.random_chain(d, n, modes[trial % 3], rng)
        rank = int(rng.integers(1, min(5, d) + 1))
        r = random_member_operator(chain, rng, rank)
        assert ip.membership(r, chain).is_member
        result = ip.decompose_finite_rank(r, chain)
        assert len(result.terms) == rank
        assert result.residual <= 1e-8 * ip.spectral_norm(r)
        for t in result.terms:
            assert ip.rank_one_membership(t.e, t.f, chain)


def test_rank_one_membership_matches_realisation(rng):
    for trial in range(8):
        d = int(rng.integers(2, 7))
        mode = ("nest", "violating", "mixed")[trial % 3]
        chain = ip.random_chain(d, int(rng.integers(1, min(3, d) + 1)), mode, rng)
        for k in range(60):
            if k % 2 == 0:
                e = gaussian(rng, d)
                f = gaussian(rng, d)
            else:
                e, f = random_rank_one_member(chain, rng)
            direct = ip.membership(np.outer(f, e.conj()), chain).is_member
            assert ip.rank_one_membership(e, f, chain) == direct


def test_membership_residual_identity_and_negative_controls(rng):
    chain = ip.random_chain(6, 3, "mixed", rng)
    eye = np.eye(6, dtype=complex)
    for _ in range(10):
        r = random_member_operator(chain, rng, 3)
        report = ip.membership(r, chain)
        assert report.is_member
        for e, residual in zip(chain.elements, report.residuals):
            assert residual == pytest.approx(
                ip.spectral_norm((eye - e.q) @ r @ e.p), abs=1e-14
            )
    for _ in range(10):
        t = gaussian(rng, 6, 6)
        report = ip.membership(t, chain)
        if not report.is_member:
            threshold = 1e-8 * (1 + ip.spectral_norm(t))
            assert max(report.residuals) > threshold


def test_unit_ball_members_have_finite_rank(rng):
    # Degenerate density check: on C^d every operator has finite rank,
    # so the finite-rank part of the unit ball is the whole ball.
    chain = ip.random_chain(5, 2, "mixed", rng)
    t = ip.project_onto_space(gaussian(rng, 5, 5), chain)
    t /= ip.spectral_norm(t)
    assert ip.numerical_rank(t) <= 5
    assert ip.spectral_norm(t) <= 1.0 + 1e-12
    assert ip.membership(t, chain).is_member
