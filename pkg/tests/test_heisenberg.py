"""Heisenberg groups: construction, splitting, abelianization, and the
exact subgroup oracles.

The splitting oracles were read off by hand: in the order-27 group the
Z-section {(z, 0)} squares onto a 25-element set whose vertical slice is
the identity alone, and the genuine subgroups split with B = A cap H
on the nose.
"""

from fractions import Fraction

import pytest

from setgrowth.groups import construct_group, quotient_map, subgroup_closure
from setgrowth.setops import MSet, power_set, product_set, symmetrize
from setgrowth.structure import LedgerError
from setgrowth.heisenberg import (
    CANDIDATE_COVER_EXP,
    CANDIDATE_KS_EXP,
    HeisenbergGroup,
    build_heisenberg,
    exact_split_oracle,
    heisen_inverse,
    hull_tripling_bound,
    parse_pairing_spec,
    split_approximate,
    verify_inverse_converse,
    verify_subgroup_sandwich,
)
from setgrowth.constants import SPLIT_COUNT_EXP, SPLIT_NEST_EXP
from setgrowth.families import measured_tripling

H27 = construct_group("heisenberg(z=Zp^2,p=3;w=Zp^1,p=3;pairing=symplectic)")


# ------------------------------------------------------------ construction

def test_parse_round_trip():
    spec = parse_pairing_spec("z=Zp^2,p=3;w=Zp^1,p=3;pairing=symplectic")
    assert (spec.z_rank, spec.z_prime) == (2, 3)
    assert (spec.w_rank, spec.w_prime) == (1, 3)
    assert spec.kind == "symplectic"


def test_parse_rejects_malformed():
    for text in (
        "z=Zp^2,p=3;w=Zp^1,p=3",                      # missing pairing
        "z=Zp^2,p=3;w=Zp^1,p=3;pairing=twisted",      # unknown kind
        "z=Zp^1,p=5;w=Zp^1,p=5;pairing=symplectic",   # odd symplectic rank
        "z=Zp^2,p=3;w=Zp^1,p=5;pairing=symplectic",   # prime mismatch
        "z=Zp^2,p=4;w=Zp^1,p=4;pairing=zero",         # not a prime
    ):
        with pytest.raises(ValueError):
            parse_pairing_spec(text)


def test_build_p3():
    assert H27.order == 27
    assert H27.z_order == 9
    assert H27.w_order == 3
    assert H27.construction_ledger is not None
    assert H27.construction_ledger.hard_ok


def test_build_is_cached():
    again = construct_group("heisenberg(z=Zp^2,p=3;w=Zp^1,p=3;pairing=symplectic)")
    assert again is H27


def test_encode_decode():
    for a in range(H27.order):
        assert H27.encode(H27.z_of(a), H27.w_of(a)) == a
    zc, wc = H27.coords_of(H27.encode(5, 2))
    assert zc == (1, 2) and wc == (2,)


def test_pairing_is_antisymmetric():
    p = H27.spec.w_prime
    for z1 in range(H27.z_order):
        for z2 in range(H27.z_order):
            lhs = H27.pair(z1, z2)
            rhs = H27.pair(z2, z1)
            assert (lhs + rhs) % (p ** H27.spec.w_rank) == 0 or \
                H27.w_additive.mul(lhs, rhs) == 0


def test_commutator_of_axis_generators_is_central():
    # x = e1 horizontal, y = e2 horizontal; [x, y] lands in the center
    x = H27.encode(3, 0)
    y = H27.encode(1, 0)
    g = H27
    comm = g.mul(g.mul(x, y), g.inv(g.mul(y, x)))
    assert g.z_of(comm) == 0
    assert g.w_of(comm) != 0  # the symplectic form does not vanish here


def test_zero_pairing_is_abelian():
    g = construct_group("heisenberg(z=Zp^1,p=3;w=Zp^1,p=3;pairing=zero)")
    for a in range(g.order):
        for b in range(g.order):
            assert g.mul(a, b) == g.mul(b, a)


def test_vertical_view():
    v = H27.vertical
    assert v.members == frozenset(range(3))
    assert v.quotient.order == 9
    g = H27
    # central: every vertical element commutes with everything
    for w in range(1, 3):
        for a in range(g.order):
            assert g.mul(w, a) == g.mul(a, w)


def test_iota_moves_ids_to_the_additive_group():
    a = MSet.from_ids(H27, [0, 5, 7])
    out = H27.iota(a)
    assert out.ids() == (0, 5, 7)
    assert out.group is H27.additive_group()
    add = H27.additive_group()
    assert all(add.mul(x, y) == add.mul(y, x)
               for x in range(add.order) for y in range(add.order))


# ---------------------------------------------------------------- splitting

def test_split_z_section_oracle():
    a = MSet.from_ids(H27, range(0, 27, 3))
    assert power_set(a, 2).size == 25
    assert power_set(a, 3).size == 27
    sw = split_approximate(a, H27.vertical, Fraction(3))
    assert sw.c.size == 9
    assert (sw.b1.size, sw.b2.size, sw.b3.size) == (1, 3, 3)
    assert sw.exceptions == ()
    assert sw.ledger.hard_ok


def test_split_requires_symmetric_input():
    a = MSet.from_ids(H27, [0, 4])
    with pytest.raises(ValueError):
        split_approximate(a, H27.vertical, Fraction(27))


def test_split_count_and_nest_rows():
    a = MSet.from_ids(H27, range(0, 27, 3))
    sw = split_approximate(a, H27.vertical, Fraction(3))
    k = Fraction(3)
    assert sw.b3.size <= k ** SPLIT_NEST_EXP * sw.b1.size
    assert sw.b1.size * sw.c.size <= k ** SPLIT_COUNT_EXP * a.size


def test_split_on_cyclic_normal_view():
    g = construct_group("cyclic(12)")
    view = quotient_map(g, [4])
    a = MSet.from_ids(g, [0, 2, 4, 6, 8, 10])
    sw = split_approximate(a, view, measured_tripling(a))
    assert sw.ledger.hard_ok
    assert sw.b1 == a.intersect_bits(view.member_bits)


# ------------------------------------------------------------ exact oracle

def test_exact_split_cyclic12():
    g = construct_group("cyclic(12)")
    view = quotient_map(g, [4])
    a = MSet.from_ids(g, [0, 2, 4, 6, 8, 10])
    es = exact_split_oracle(a, view)
    assert es.passed
    assert es.b.ids() == (0, 4, 8)
    assert es.c.size == 2
    assert a.size == es.b.size * es.c.size


def test_exact_split_rejects_non_subgroup():
    g = construct_group("cyclic(12)")
    view = quotient_map(g, [4])
    with pytest.raises(ValueError):
        exact_split_oracle(MSet.from_ids(g, [0, 1]), view)


def test_exact_and_approximate_agree_on_subgroups():
    sub = MSet.from_ids(H27, sorted(subgroup_closure(H27, [H27.encode(3, 0),
                                                           H27.encode(0, 1)])))
    assert sub.size == 9
    es = exact_split_oracle(sub, H27.vertical)
    sw = split_approximate(sub, H27.vertical, Fraction(1))
    assert es.passed and sw.ledger.hard_ok
    expected = sub.intersect_bits(H27.vertical.member_bits)
    assert es.b == expected
    assert sw.b1 == expected and sw.b2 == expected and sw.b3 == expected


# ------------------------------------------------------------ abelianizing

def test_hull_tripling_bound_values():
    assert hull_tripling_bound(1) == 15
    assert hull_tripling_bound(Fraction(8, 3)) == Fraction(2545, 27)


def test_candidate_exponents():
    assert CANDIDATE_KS_EXP == 5 + SPLIT_NEST_EXP + SPLIT_COUNT_EXP == 167
    assert CANDIDATE_COVER_EXP == 187


def test_inverse_on_a_vertical_plus_line():
    g = construct_group("heisenberg(z=Zp^2,p=5;w=Zp^1,p=5;pairing=symplectic)")
    ids = [0, g.encode(5, 0), g.encode(20, 0), g.encode(1, 0),
           g.encode(4, 0), g.encode(6, 0)]
    a = MSet.from_ids(g, ids)
    k = measured_tripling(a)
    assert k == Fraction(44, 3)
    wit = heisen_inverse(a, k)
    assert wit.k_measured == 5
    assert wit.a_tilde.size == 125
    assert wit.x_tilde.size == 5
    assert wit.ledger.hard_ok
    # iota(A) is inside the abelian witness
    assert g.iota(a) <= wit.a_tilde


def test_inverse_converse_rows():
    g = construct_group("heisenberg(z=Zp^2,p=5;w=Zp^1,p=5;pairing=symplectic)")
    a = MSet.from_ids(g, [0, g.encode(5, 0), g.encode(20, 0), g.encode(0, 1),
                          g.encode(0, 4)])
    wit = heisen_inverse(a, measured_tripling(a))
    led = verify_inverse_converse(wit, a)
    assert led.hard_ok
    names = [r.name for r in led.rows]
    assert any("triple" in n or "absorbed" in n for n in names)


def test_inverse_rejects_two_torsion():
    g = construct_group("heisenberg(z=Zp^1,p=2;w=Zp^1,p=2;pairing=zero)")
    a = MSet.from_ids(g, [0, 1])
    with pytest.raises(ValueError):
        heisen_inverse(a, Fraction(4))


def test_inverse_rejects_non_heisenberg():
    g = construct_group("cyclic(12)")
    with pytest.raises(TypeError):
        heisen_inverse(MSet.from_ids(g, [0, 1]), Fraction(12))


# ---------------------------------------------------------------- sandwich

def test_sandwich_on_an_order_nine_subgroup():
    sub = MSet.from_ids(H27, sorted(subgroup_closure(H27, [H27.encode(3, 0),
                                                           H27.encode(0, 1)])))
    led = verify_subgroup_sandwich(sub)
    assert led.hard_ok


def test_sandwich_on_the_vertical():
    sub = MSet.from_ids(H27, range(3))
    led = verify_subgroup_sandwich(sub)
    assert led.hard_ok


def test_sandwich_rejects_non_heisenberg():
    g = construct_group("cyclic(9)")
    with pytest.raises(TypeError):
        verify_subgroup_sandwich(MSet.from_ids(g, [0, 3, 6]))


def test_sandwich_rejects_non_subgroup():
    with pytest.raises(ValueError):
        verify_subgroup_sandwich(MSet.from_ids(H27, [0, 4]))
