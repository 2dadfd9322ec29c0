"""Metric carriers, nets, separated sets, approximate energy, and the
entropy growth checks.

Circle oracles are hand-checkable: on a uniform n-point grid the greedy
net at radius eps keeps every ceil(2 eps n)-th point, and arc-union
measures reduce to interval bookkeeping in Fractions.
"""

from fractions import Fraction

import pytest

from setgrowth.entropy import (
    MetricCloud,
    QuaternionGroup,
    RegionSpec,
    TorusGroup,
    WordMetricGroup,
    approx_energy,
    arc_union_measure,
    build_entropy_report,
    covering_number,
    entropy_tripling_check,
    metric_profile_check,
    separated_set,
)
from setgrowth.groups import construct_group
from setgrowth.setops import MSet, energy

T1 = TorusGroup(1)


def grid_cloud(n):
    return MetricCloud(T1, T1.grid(n))


# --------------------------------------------------------------- carriers

def test_torus_point_normalization():
    assert T1.point(Fraction(7, 5)) == (Fraction(2, 5),)
    assert T1.inv((Fraction(1, 4),)) == (Fraction(3, 4),)
    assert T1.mul((Fraction(3, 4),), (Fraction(1, 2),)) == (Fraction(1, 4),)


def test_torus_distance_wraps():
    assert T1.distance_value((Fraction(9, 10),), (Fraction(1, 10),)) == Fraction(1, 5)
    t2 = TorusGroup(2)
    p = t2.point(Fraction(9, 10), 0)
    q = t2.point(Fraction(1, 10), 0)
    assert t2.distance_sq(p, q) == Fraction(1, 25)


def test_torus_rejects_bad_dimension():
    with pytest.raises(ValueError):
        TorusGroup(4)


def test_quaternion_norm_is_multiplicative():
    g = QuaternionGroup()
    p = g.point(1.0, 2.0, 0.5, -1.0)
    q = g.point(0.3, -1.0, 2.0, 0.7)
    r = g.mul(p, q)
    assert sum(c * c for c in r) == pytest.approx(1.0, abs=1e-12)
    assert g.distance_value(p, p) == 0.0


def test_word_metric_distances():
    g = construct_group("cyclic(60)")
    wg = WordMetricGroup(g, [1, 7])
    assert wg.distance_value(0, 7) == 1
    assert wg.distance_value(0, 8) == 2
    assert wg.distance_value(0, 2) == 2
    assert wg.diameter() == 6


def test_word_metric_needs_generators():
    g = construct_group("cyclic(60)")
    with pytest.raises(ValueError):
        WordMetricGroup(g, [0])


# ---------------------------------------------------------------- clouds

def test_cloud_dedupes_and_sorts():
    pts = [(Fraction(1, 2),), (Fraction(0),), (Fraction(1, 2),)]
    cloud = MetricCloud(T1, pts)
    assert cloud.points == ((Fraction(0),), (Fraction(1, 2),))


def test_cloud_region_membership_enforced():
    region = RegionSpec.ball((Fraction(0),), Fraction(1, 10))
    with pytest.raises(ValueError):
        MetricCloud(T1, [(Fraction(1, 2),)], region)


# --------------------------------------------------------- nets and seps

def test_grid_net_counts():
    cloud = grid_cloud(100)
    assert covering_number(cloud, Fraction(1, 20)).count == 20
    assert covering_number(cloud, Fraction(1, 40)).count == 33
    assert len(separated_set(cloud, Fraction(1, 10))) == 10


def test_net_centers_cover():
    cloud = grid_cloud(30)
    res = covering_number(cloud, Fraction(1, 10))
    for p in cloud:
        assert any(T1.within(c, p, Fraction(1, 10)) for c in res.centers)


def test_separated_set_is_separated():
    cloud = grid_cloud(30)
    pts = separated_set(cloud, Fraction(1, 10))
    for i, p in enumerate(pts):
        for q in pts[i + 1:]:
            assert not T1.closer_than(p, q, Fraction(1, 10))


def test_entropy_report_sandwich():
    report = build_entropy_report(grid_cloud(64), [Fraction(1, 8), Fraction(1, 16)])
    assert report.ledger.hard_ok
    names = [r.name for r in report.ledger.rows]
    assert "sandwich-low-0" in names and "sandwich-high-0" in names


# --------------------------------------------------------------- energy

def test_approx_energy_matches_discrete():
    g5 = construct_group("cyclic(5)")
    a = MSet.from_ids(g5, [0, 1, 2])
    cloud = MetricCloud(T1, [(Fraction(i, 5),) for i in range(3)])
    assert approx_energy(cloud, cloud, Fraction(1, 20)) == energy(a, a).value == 19


def test_approx_energy_grows_with_radius():
    cloud = MetricCloud(T1, [(Fraction(i, 5),) for i in range(3)])
    low = approx_energy(cloud, cloud, Fraction(1, 20))
    high = approx_energy(cloud, cloud, Fraction(1, 4))
    assert high >= low


# ----------------------------------------------------------- arc measure

def test_arc_measure_single_point():
    assert arc_union_measure([(Fraction(0),)], Fraction(1, 10)) == Fraction(1, 5)


def test_arc_measure_disjoint_arcs():
    pts = [(Fraction(0),), (Fraction(1, 2),)]
    assert arc_union_measure(pts, Fraction(1, 10)) == Fraction(2, 5)


def test_arc_measure_overlap_and_wraparound():
    pts = [(Fraction(0),), (Fraction(3, 100),)]
    assert arc_union_measure(pts, Fraction(1, 50)) == Fraction(7, 100)
    wrap = [(Fraction(0),), (Fraction(99, 100),)]
    assert arc_union_measure(wrap, Fraction(1, 50)) == Fraction(1, 20)


def test_arc_measure_ten_point_run():
    pts = [(Fraction(i, 100),) for i in range(10)]
    assert arc_union_measure(pts, Fraction(1, 100)) == Fraction(11, 100)
    assert arc_union_measure(pts, Fraction(1, 20)) == Fraction(19, 100)


# ------------------------------------------------------------- profiles

def test_torus_profile_hard_rows():
    rep = metric_profile_check(T1, seed=7, mc_samples=2000)
    assert rep.hard_ok


def test_word_profile_hard_rows():
    g = construct_group("cyclic(60)")
    rep = metric_profile_check(WordMetricGroup(g, [1, 7]), seed=7, mc_samples=2000)
    assert rep.hard_ok


def test_quaternion_profile_hard_rows():
    # the 5 percent doubling band is calibrated for the default sample
    # depth, so this one runs the full Monte-Carlo
    rep = metric_profile_check(QuaternionGroup(), seed=1729)
    assert rep.hard_ok


def test_tripling_check_on_an_arc():
    cloud = MetricCloud(T1, [(Fraction(i, 100),) for i in range(10)])
    rep = entropy_tripling_check(cloud, Fraction(1, 100))
    assert rep.hard_ok
    assert rep.net_base > 0
    assert rep.net_cubed >= rep.net_base
    assert rep.measured_tripling == Fraction(rep.net_cubed, rep.net_base)


def test_tripling_check_caps_blowup():
    # 2100^2 raw pairwise products exceed the guard
    cloud = MetricCloud(T1, T1.grid(2100))
    with pytest.raises(ValueError):
        entropy_tripling_check(cloud, Fraction(1, 10000))
