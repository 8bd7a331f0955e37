import math

import pytest

from graphlike import SpaceSpec, by_name, distance, dumbbell, effective_resistance, fat_cantor, gasket_edges, hawaiian
from graphlike.errors import NonSummable
from graphlike.spaces import (
    cantor_gap_length,
    cantor_piece_length,
    fat_cantor_length,
    fat_cantor_resistance,
    gasket_corner,
    gasket_length,
)


class TestHawaiian:
    def test_levels(self):
        s = hawaiian()
        assert s.refine(0).num_edges == 0
        g = s.refine(3)
        assert g.num_edges == 6
        assert s.total_length(3) == pytest.approx(1.75)
        assert s.total_length(3) + s.tail(3) == pytest.approx(2.0)

    def test_loop_resistance(self):
        # loop of length l seen from opposite points: two l/2 halves in parallel
        s = hawaiian(first=1.0)
        for n in (1, 4, 8):
            assert effective_resistance(s.refine(n), "o", "a1") == pytest.approx(0.25, abs=1e-14)
        assert effective_resistance(s.refine(5), "o", "a2") == pytest.approx(0.125, abs=1e-14)

    def test_finite_and_callable_lengths(self):
        s = hawaiian(lengths=[1.0, 2.0])
        assert s.total_length(10) == 3.0 and s.tail(2) == 0.0
        with pytest.raises(NonSummable):
            hawaiian(lengths=lambda i: 1.0 / i)
        with pytest.raises(NonSummable):
            hawaiian(ratio=1.0)


class TestFatCantor:
    @pytest.mark.parametrize("n", range(0, 8))
    def test_closed_forms(self, n):
        s = fat_cantor()
        g = s.refine(n)
        assert g.total_length() == pytest.approx(fat_cantor_length(n), abs=1e-14)
        assert effective_resistance(g, 0, 1) == pytest.approx(fat_cantor_resistance(n), abs=1e-13)
        assert distance(g, 0, 1) == pytest.approx(1.0, abs=1e-14)
        assert s.tail(n) == pytest.approx(1.5 - fat_cantor_length(n))

    def test_layout(self):
        # pieces plus gaps fill the unit interval at every level
        for n in range(6):
            gaps = sum(2 ** (k - 1) * cantor_gap_length(k) for k in range(1, n + 1))
            assert 2**n * cantor_piece_length(n) + gaps == pytest.approx(1.0)

    def test_declared_edges_sum_to_one(self):
        s = fat_cantor()
        for n in range(1, 8):
            ell = s.refine(n).length_of(s.declared_edges(n))
            assert abs(ell - 1.0) <= 2.0**-n

    def test_depth_cap(self):
        s = fat_cantor(depth=2)
        assert s.refine(5) == s.refine(2)


class TestGasket:
    def test_counts_and_length(self):
        s = gasket_edges()
        g = s.refine(1)
        assert g.num_edges == 12 and g.num_vertices == 9
        for n in range(5):
            assert s.total_length(n) == pytest.approx(gasket_length(n), rel=1e-12)
            # ℓ + tail is the limit length, whichever level it is read at
            assert s.total_length(n) + s.tail(n) == pytest.approx(gasket_length(200), rel=1e-12)

    def test_corners(self):
        assert gasket_corner("", 2) == ("g", "", 2)
        assert gasket_corner("0", 0) == ("g", "", 0)
        assert gasket_corner("0", 1) == ("g", "", 0, 1)
        assert gasket_corner("01", 1) == gasket_corner("0", 1)

    def test_non_summable_ratio(self):
        with pytest.raises(NonSummable):
            gasket_edges(ratio=1 / 3)

    def test_symmetric_resistance(self):
        g = gasket_edges().refine(3)
        c = [gasket_corner("", i) for i in range(3)]
        r01 = effective_resistance(g, c[0], c[1])
        assert effective_resistance(g, c[1], c[2]) == pytest.approx(r01, rel=1e-12)


def test_dumbbell():
    s = dumbbell()
    g = s.refine(3)
    assert g.num_edges == 4 and g.total_length() == 4.0
    assert effective_resistance(g, "v0", "v3") == pytest.approx(2.5, abs=1e-14)
    assert s.declared_edges(0) == [3, 0, 1, 2]


def test_spec_round_trip():
    spec = SpaceSpec("hawaiian", {"first": 0.5, "ratio": 0.5}, {"H1": (1.0, "closed-form")})
    back = SpaceSpec.from_dict(spec.to_dict())
    assert back == spec
    assert back.build().total_length(4) == by_name("hawaiian", first=0.5).total_length(4)
    with pytest.raises(ValueError):
        SpaceSpec("moebius")
    with pytest.raises(ValueError):
        SpaceSpec("hawaiian", {"ratio": 2})
