"""Partial isometry validation, the HM order, bounds, covers, power invariants."""

import numpy as np
import pytest

import isoposet as ip
from isoposet.errors import (
    IncomparablePair,
    NoUpperBoundProvided,
    NotAPartialIsometry,
    NotAnUpperBound,
    NotTotallyOrdered,
)

from conftest import gaussian, unit, validate

SHIFT_C2 = np.array([[0.0, 0.0], [1.0, 0.0]])  # e1 -> e2, e2 -> 0


def truncated_shift(k: int) -> np.ndarray:
    """e1 -> e2 -> ... -> ek -> 0."""
    m = np.zeros((k, k), dtype=complex)
    for i in range(k - 1):
        m[i + 1, i] = 1.0
    return m


def test_validate_shift_example():
    v = validate(SHIFT_C2)
    assert np.allclose(v.p, np.diag([1.0, 0.0]))
    assert np.allclose(v.q, np.diag([0.0, 1.0]))
    assert v.rank == 1


def test_validate_identity():
    v = validate(np.eye(3))
    assert np.allclose(v.p, np.eye(3))
    assert np.allclose(v.q, np.eye(3))


def test_validate_rejects_non_isometry():
    # V V* V = 2 V here, so the triple product residual is ||V|| = sqrt(2).
    with pytest.raises(NotAPartialIsometry):
        validate(np.array([[1.0, 1.0], [0.0, 0.0]]))


def test_six_characterisations_agree(rng):
    # Valid and invalid matrices must flip all six residuals together.
    for trial in range(60):
        d = int(rng.integers(1, 13))
        r = int(rng.integers(0, d + 1))
        v = ip.random_partial_isometry(d, r, rng)
        residuals = ip.partial_isometry_residuals(v.v)
        assert all(val <= 1e-10 for val in residuals.values()), residuals
    bad = np.array([[1.0, 1.0], [0.0, 0.0]])
    residuals = ip.partial_isometry_residuals(bad)
    assert all(val > 1e-6 for val in residuals.values())


def test_hm_leq_examples():
    d = 3
    v = ip.random_partial_isometry(d, 2, 7)
    zero = ip.zero_isometry(d)
    assert ip.hm_leq(zero, v)
    assert ip.hm_leq(v, v)
    # E: e1 -> e2 (others to 0); F: coordinate swap. F P_E = e2 e1* = E.
    e = validate(SHIFT_C2)
    f = validate(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(f.v @ e.p, e.v)
    assert ip.hm_leq(e, f)
    assert not ip.hm_leq(f, e)


def test_hm_leq_monotone_in_both_spaces(rng):
    for _ in range(20):
        chain = ip.random_chain(6, 3, "mixed", rng)
        elements = chain.elements
        for i in range(len(elements)):
            for j in range(i, len(elements)):
                assert ip.hm_leq(elements[i], elements[j])
                assert ip.subspace_leq(
                    elements[i].initial_space, elements[j].initial_space
                )
                assert ip.subspace_leq(
                    elements[i].final_space, elements[j].final_space
                )


def test_infimum_trivial_cases():
    v = ip.random_partial_isometry(4, 2, 3)
    zero = ip.zero_isometry(4)
    single = ip.infimum([v])
    assert ip.matrix_eq(single.v, v.v)
    with_zero = ip.infimum([v, zero])
    assert with_zero.rank == 0


def test_infimum_disagreeing_rank_ones():
    # E1 fixes e1, E2 sends e1 to e2; they agree only at 0.
    e1_proj = np.outer(unit(0, 2), unit(0, 2).conj())
    e2 = validate(SHIFT_C2)
    inf = ip.infimum([validate(e1_proj), e2])
    assert inf.rank == 0


def test_infimum_is_greatest_lower_bound(rng):
    for _ in range(10):
        d = 6
        top = ip.random_partial_isometry(d, 4, rng)
        # Restrictions of one operator to random subspaces of its initial
        # space all agree there, so the infimum is the common restriction.
        basis = top.initial_space.basis
        u = ip.haar_unitary(4, rng)
        members = []
        for k in (2, 3, 4):
            cols = basis @ u[:, :k]
            members.append(validate(top.v @ (cols @ cols.conj().T)))
        inf = ip.infimum(members)
        for m in members:
            assert ip.hm_leq(inf, m)
        assert inf.rank == 2
        # Any restriction to a sub-subspace of the agreement set is below.
        w_cols = inf.initial_space.basis[:, :1]
        w = validate(members[0].v @ (w_cols @ w_cols.conj().T))
        assert ip.hm_leq(w, inf)


def test_supremum_of_chain_is_maximum(rng):
    chain = ip.random_chain(5, 3, "mixed", rng)
    family = list(chain.elements)
    rng.shuffle(family)
    sup = ip.supremum(family)
    assert ip.matrix_eq(sup.v, chain.top.v)


def test_supremum_single_with_bound():
    f = ip.random_partial_isometry(4, 3, 11)
    cols = f.initial_space.basis[:, :2]
    e = validate(f.v @ (cols @ cols.conj().T))
    sup = ip.supremum([e], upper_bound=f)
    assert ip.matrix_eq(sup.v, e.v)


def test_supremum_bounded_incomparable_family():
    # Two orthogonal rank-one projections, bounded by the identity: the
    # supremum acts as the identity on their span.
    e1 = validate(np.diag([1.0, 0.0, 0.0]))
    e2 = validate(np.diag([0.0, 1.0, 0.0]))
    ident = validate(np.eye(3))
    sup = ip.supremum([e1, e2], upper_bound=ident)
    assert np.allclose(sup.v, np.diag([1.0, 1.0, 0.0]))
    with pytest.raises(NoUpperBoundProvided):
        ip.supremum([e1, e2])


def test_supremum_rejects_false_bound():
    e = validate(np.diag([1.0, 0.0]))
    not_bound = validate(SHIFT_C2)
    with pytest.raises(NotAnUpperBound):
        ip.supremum([e, validate(np.diag([0.0, 1.0]))], upper_bound=not_bound)


def test_complete_cover_examples():
    v = ip.random_partial_isometry(3, 2, 5)
    cover = ip.complete_cover([v])
    assert len(cover) == 2
    assert cover[0].rank == 0
    assert ip.matrix_eq(cover[1].v, v.v)

    chain = ip.random_chain(4, 2, "mixed", 9)
    already = ip.complete_cover(list(chain.elements))
    assert len(already) == len(chain.elements)
    for a, b in zip(already, chain.elements):
        assert ip.matrix_eq(a.v, b.v)

    unsorted_cover = ip.complete_cover(list(chain.elements[::-1]))
    for a, b in zip(unsorted_cover, chain.elements):
        assert ip.matrix_eq(a.v, b.v)


def test_complete_cover_rejects_incomparable():
    e1 = validate(np.diag([1.0, 0.0]))
    e2 = validate(SHIFT_C2)
    with pytest.raises(NotTotallyOrdered):
        ip.complete_cover([e1, e2])
    with pytest.raises(IncomparablePair) as info:
        ip.build_chain([e1, e2])
    assert {info.value.first, info.value.second} == {0, 1}


def test_hw_nilpotent_block():
    report = ip.hw_invariants(validate(truncated_shift(2)))
    assert report.is_ppi
    assert report.dim_unitary == 0
    assert report.shift_multiplicities == {2: 1}
    assert report.rank_sequence[:3] == (2, 1, 0)


def test_hw_unitary():
    report = ip.hw_invariants(validate(np.diag([1j, 1.0])))
    assert report.is_ppi
    assert report.dim_unitary == 2
    assert report.shift_multiplicities == {}


def test_hw_non_power_partial_isometry():
    # V: e1 -> (e1 + e2)/sqrt(2), e2 -> 0. V^2 has norm 1/sqrt(2) on e1,
    # so the square fails the triple-product identity.
    v = np.zeros((2, 2), dtype=complex)
    v[:, 0] = np.array([1.0, 1.0]) / np.sqrt(2)
    report = ip.hw_invariants(validate(v))
    assert not report.is_ppi
    assert report.failure_power == 2


def test_hw_dimension_identity_and_reconstruction(rng):
    for _ in range(10):
        du = int(rng.integers(0, 4))
        blocks = []
        expected = {}
        for k in (1, 2, 3):
            m_k = int(rng.integers(0, 3))
            if m_k:
                expected[k] = m_k
            blocks.extend([truncated_shift(k)] for _ in range(m_k))
        d = du + sum(k * m for k, m in expected.items())
        if d == 0:
            continue
        mats = []
        if du:
            mats.append(ip.haar_unitary(du, rng))
        for k, m in expected.items():
            mats.extend(truncated_shift(k) for _ in range(m))
        direct_sum = np.zeros((d, d), dtype=complex)
        at = 0
        for block in mats:
            b = block.shape[0]
            direct_sum[at:at + b, at:at + b] = block
            at += b
        report = ip.hw_invariants(validate(direct_sum))
        assert report.is_ppi
        assert report.dim_unitary == du
        assert report.shift_multiplicities == expected
        assert d == report.dim_unitary + sum(
            k * m for k, m in report.shift_multiplicities.items()
        )


def test_l_basic_property_random_isometries(rng):
    for _ in range(40):
        d = int(rng.integers(1, 9))
        r = int(rng.integers(0, d + 1))
        w1 = ip.haar_unitary(d, rng)
        w2 = ip.haar_unitary(d, rng)
        diag = np.zeros(d)
        diag[:r] = 1.0
        v = (w1 * diag) @ w2.conj().T
        residuals = ip.partial_isometry_residuals(v)
        assert max(residuals.values()) <= 1e-10
        wrapped = validate(v)
        assert wrapped.rank == r
        assert wrapped.initial_space.dim == wrapped.final_space.dim
