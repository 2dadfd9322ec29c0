"""Weak and full extraction pipelines plus the four-way energy walk.

The cyclic(16) worked instance is the anchor: E(A,B) = 44 was counted by
brute force over all 256 quadruples, and every downstream cardinality
below was read off an enumeration of the level sets done independently
of the pipeline code.
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from setgrowth.exact import ceil_isqrt
from setgrowth.groups import construct_group
from setgrowth.setops import MSet, energy, product_set
from setgrowth.bsg import bsg_extract, energy_equivalences, weak_bsg
from setgrowth.structure import LedgerError

G16 = construct_group("cyclic(16)")
G12 = construct_group("cyclic(12)")
A16 = MSet.from_ids(G16, [0, 1, 2, 3])


def inferred_k(a, b):
    """Smallest safe rational K with E(A,B) >= (|A||B|)^{3/2} / K."""
    e = energy(a, b).value
    nm = a.size * b.size
    return Fraction(ceil_isqrt(nm**3), e)


def random_sets(group, max_size=8):
    ids = st.integers(min_value=0, max_value=group.order - 1)
    return st.frozensets(ids, min_size=2, max_size=max_size).map(
        lambda s: MSet.from_ids(group, s))


# ------------------------------------------------------------- weak form

def test_weak_on_a_subgroup():
    h = MSet.from_ids(G12, [0, 2, 4, 6, 8, 10])
    res = weak_bsg(h, h, h, 1, kprime=1, eps=Fraction(1, 2))
    assert res.a_prime.size == 6
    assert res.d.size == 6
    assert res.chosen_b == 0
    assert res.omega_count == 0
    assert res.ledger.hard_ok


def test_weak_quotients_land_in_d():
    h = MSet.from_ids(G12, [0, 2, 4, 6, 8, 10])
    res = weak_bsg(h, h, h, 1, kprime=1, eps=Fraction(1, 2))
    g = h.group
    for x in res.a_prime.ids():
        for y in res.a_prime.ids():
            assert g.mul(x, g.inv(y)) in res.d


def test_weak_worked_instance_cyclic16():
    c = product_set(A16, A16)
    assert c.size == 7
    kprime_sq = Fraction(c.size**2, A16.size**2)
    res = weak_bsg(A16, A16, c, 1, eps=Fraction(1, 4), kprime_sq=kprime_sq)
    assert res.ledger.hard_ok
    assert res.a_prime <= A16
    assert 2 * res.a_prime.size**2 >= A16.size**2  # sqrt(2)K bound at K=1


def test_weak_rejects_bad_product_mass():
    # C misses most products, so the counting hypothesis fails
    c = MSet.from_ids(G16, [0])
    with pytest.raises((ValueError, LedgerError)):
        weak_bsg(A16, A16, c, 1, kprime=1, eps=Fraction(1, 2))


@settings(max_examples=40, deadline=None)
@given(random_sets(G16, 6), random_sets(G16, 6))
def test_weak_passes_with_measured_parameters(a, b):
    c = product_set(a, b)
    kprime_sq = Fraction(c.size**2, a.size * b.size)
    res = weak_bsg(a, b, c, 1, eps=Fraction(1, 2), kprime_sq=kprime_sq)
    assert res.ledger.hard_ok
    assert res.a_prime <= a
    # conclusion constants, re-checked outside the ledger
    assert 2 * res.a_prime.size**2 >= a.size**2
    assert Fraction(1, 2) * res.d.size <= 2 * kprime_sq * a.size


# ------------------------------------------------------------- full form

def test_extract_worked_instance():
    k = inferred_k(A16, A16)
    assert k == Fraction(16, 11)
    ex = bsg_extract(A16, A16, k)
    assert ex.c.size == 5
    assert ex.l == 1
    assert ex.a_prime.size == 4
    assert ex.a_second.size == 4
    assert ex.a_third.size == 4
    assert ex.b_third.size == 4
    assert ex.d.size == 7
    assert product_set(ex.a_third, ex.b_third).size == 7
    assert ex.ledger.hard_ok


def test_extract_trace_lines():
    ex = bsg_extract(A16, A16, inferred_k(A16, A16))
    lines = ex.trace_lines()
    assert lines[0] == "|C| = 5"
    assert lines[-1] == "|A'''·B'''| = 7"


def test_extract_size_conclusions():
    k = inferred_k(A16, A16)
    ex = bsg_extract(A16, A16, k)
    # |A'''| >= |A| / 8 sqrt(2) K, squared form; |B'''| >= |B| / 8K
    assert 128 * k**2 * ex.a_third.size**2 >= A16.size**2
    assert 8 * k * ex.b_third.size >= A16.size


def test_extract_rejects_low_energy():
    spread = MSet.from_ids(G16, [0, 3, 7, 12])
    with pytest.raises(ValueError):
        bsg_extract(spread, spread, Fraction(1))


@settings(max_examples=25, deadline=None)
@given(random_sets(G16, 8), random_sets(G16, 8))
def test_extract_always_passes_at_inferred_k(a, b):
    ex = bsg_extract(a, b, inferred_k(a, b))
    assert ex.ledger.hard_ok
    assert ex.a_third <= a
    assert ex.b_third <= b


# -------------------------------------------------------- energy walk

def test_equivalence_walk_from_energy():
    k = inferred_k(A16, A16)
    wit = energy_equivalences("i", A16, A16, k)
    assert wit.ledger.hard_ok
    assert set(wit.produced) == {"ii", "iii", "iv"}


def test_equivalence_walk_from_pair_set():
    pairs = [(x, y) for x in A16.ids() for y in A16.ids()]
    wit = energy_equivalences("ii", A16, A16, Fraction(4), pairs=pairs)
    assert wit.ledger.hard_ok


def test_equivalence_rejects_unknown_clause():
    with pytest.raises(ValueError):
        energy_equivalences("v", A16, A16, 1)


@settings(max_examples=15, deadline=None)
@given(random_sets(G16, 6))
def test_equivalence_cycle_on_random_sets(a):
    wit = energy_equivalences("i", a, a, inferred_k(a, a))
    assert wit.ledger.hard_ok
    assert wit.input_clause == "i"
