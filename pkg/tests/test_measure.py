import pytest

from graphlike import d_ell, d_f, dumbbell, edge_cut_for_delta, fat_cantor, gasket_edges, h_g_delta, hausdorff_estimate, hawaiian
from graphlike import intrinsic_distance
from graphlike.errors import BudgetExhausted, CutNotAchievable, NonSummable, StaleCut
from graphlike.measure import cut_value, f_weights
from graphlike.spaces import constant, gasket_corner, gasket_length


def test_cut_on_dumbbell():
    s = dumbbell()
    cut = edge_cut_for_delta(s, 0, 1.5)
    # removing the handle edge 3 alone leaves the whole graph (diam 3), so more is needed
    assert cut.edges[0] == 3
    assert all(d < 1.5 for d in cut.diameters)
    assert cut.value == pytest.approx(cut_value(s.refine(0), cut.edges))
    # every edge removed leaves single points, so any δ > 0 is reachable
    assert edge_cut_for_delta(s, 0, 1e-6).value == pytest.approx(4.0)
    partial = constant(s.refine(0), declared=[3])
    with pytest.raises(CutNotAchievable):
        edge_cut_for_delta(partial, 0, 0.5)


def test_cut_diameters_are_host_distances():
    s = hawaiian(lengths=[2.0])
    g = s.refine(1)
    cut = edge_cut_for_delta(s, 1, 10.0)
    assert cut.edges == ()
    assert cut.diameters == (pytest.approx(1.0),)
    assert g.total_length() == 2.0


def test_stale_cut():
    s = fat_cantor()
    cut = edge_cut_for_delta(s, 3, 0.2)
    assert h_g_delta(s, 3, cut) == pytest.approx(cut.value)
    with pytest.raises(StaleCut):
        h_g_delta(s, 4, cut)


def test_fat_cantor_bracket():
    est = hausdorff_estimate(fat_cantor(), 1e-3)
    assert est.gap <= 1e-3
    assert est.contains(1.5)
    assert est.h_g_delta is not None and est.h_g_delta <= est.upper + 1e-12


def test_budget():
    with pytest.raises(BudgetExhausted) as info:
        hausdorff_estimate(hawaiian(), 1e-9, n_max=5)
    assert info.value.best.n == 5


def test_gasket_bracket():
    s = gasket_edges()
    est = hausdorff_estimate(s, 0.4)  # tail shrinks like 0.75^n while edges grow like 3^n
    assert est.contains(gasket_length(200), tol=1e-12)


def test_d_ell_monotone_and_exact():
    s = gasket_edges()
    a, b = gasket_corner("", 0), gasket_corner("", 1)
    series = d_ell(s, a, b, 5)
    assert series.is_monotone()
    assert series.levels == tuple(range(6))
    # corner-to-corner geodesics in this gasket follow the original side
    assert series.values[0] == pytest.approx(s.refine(0).edge(0).length)


def test_d_f():
    s = fat_cantor()
    w = lambda rank, m: 2.0**-rank  # noqa: E731
    with pytest.raises(NonSummable):
        d_f(s, w, 0, 1, 3)
    series = d_f(s, w, 0, 1, 4, tail=lambda N: 2.0 ** -len(s.declared_members(N)))
    assert series.is_monotone()
    # generation k declares 2^(k-1) intervals and as many copies: 30 members by level 4
    assert len(s.declared_members(4)) == 30
    assert series.error == pytest.approx(2.0**-30)
    # at the lookahead level every member is present, so no weight is lost
    weights = f_weights(s, w, 4, 4)
    assert sum(weights.values()) == pytest.approx(sum(2.0**-k for k in range(1, 31)))
    # earlier, members split later spread over their ancestors; copies not yet added are absent
    early = f_weights(s, w, 1, 4)
    assert sum(early.values()) <= sum(weights.values())
    assert min(early.values()) >= 0


def test_intrinsic_distance():
    cv = intrinsic_distance(hawaiian(), "o", "a1", 0.05)
    assert cv.contains(0.5)
    assert cv.halfwidth <= 0.05
    cv = intrinsic_distance(fat_cantor(), 0, 1, 0.02)
    assert cv.contains(1.0)
