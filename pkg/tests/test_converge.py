import random

import pytest
from conftest import random_connected

from graphlike import certified_resistance, dumbbell, fat_cantor, hawaiian, invariance_suite, resistance_sequence
from graphlike.converge import default_threads
from graphlike.errors import BudgetExhausted, UnknownVertex
from graphlike.spaces import fat_cantor_resistance


def test_sequence_matches_closed_form():
    rows = resistance_sequence(fat_cantor(), 0, 1, range(0, 9))
    for n, r in rows:
        assert r == pytest.approx(fat_cantor_resistance(n), abs=1e-13)


def test_threads_give_same_rows(monkeypatch):
    serial = resistance_sequence(fat_cantor(), 0, 1, range(3, 9), threads=1)
    parallel = resistance_sequence(fat_cantor(), 0, 1, range(3, 9), threads=4)
    assert serial == parallel
    monkeypatch.setenv("GRAPHLIKE_THREADS", "3")
    assert default_threads() == 3
    monkeypatch.setenv("GRAPHLIKE_THREADS", "x")
    assert default_threads() == 1


@pytest.mark.parametrize("eps", [0.1, 0.01])
def test_certified_fat_cantor(eps):
    cv = certified_resistance(fat_cantor(), 0, 1, eps)
    assert cv.contains(0.75)
    assert cv.halfwidth == eps / 2
    d = cv.detail
    assert d["sum_delta"] + d["tail"] < eps / 4 and d["sum_leftover"] + d["tail"] < eps / 4


def test_certified_hawaiian_and_dumbbell():
    assert certified_resistance(hawaiian(), "o", "a1", 0.1).estimate == pytest.approx(0.25)
    assert certified_resistance(dumbbell(), "v0", "v3", 0.1).n_certified == 1


def test_budget_exhausted_carries_best():
    with pytest.raises(BudgetExhausted) as info:
        certified_resistance(fat_cantor(), 0, 1, 1e-4, n_max=6)
    assert info.value.best is None or info.value.best.n_certified <= 6
    with pytest.raises(ValueError):
        certified_resistance(fat_cantor(), 0, 1, 0.0)


def test_invariance():
    g = random_connected(random.Random(7), 8, 14)
    rep = invariance_suite(g, 0, 7, 30, seed=3)
    assert rep.trials == 30 and rep.passed()
    with pytest.raises(UnknownVertex):
        invariance_suite(g, 0, 99)
