import numpy as np
import pytest

from contourbench import (
    Tolerance,
    build_drawing,
    consensus_drawings,
    rasterize_strokes,
    stroke_match_fraction,
)
from conftest import brute_force_match

CANVAS = 30
EXACT = Tolerance(0.5)  # below inter-pixel distance: only exact overlaps match


def line_drawing(image_id, strokes, annotator=None):
    return build_drawing(image_id, CANVAS, CANVAS, list(enumerate(strokes)), annotator)


def jittered(drawing, rng, sigma=0.5):
    raw = []
    for s in drawing.strokes:
        pts = s.as_array() + rng.normal(0, sigma, size=(len(s.points), 2))
        raw.append((s.order_index, pts.tolist()))
    return build_drawing(drawing.image_id, drawing.width, drawing.height, raw)


class TestStrokeMatchFraction:
    def test_identical_stroke(self):
        d = line_drawing("a", [[(2, 5), (20, 5)], [(2, 10), (20, 10)]])
        assert stroke_match_fraction(d.strokes[0], d, EXACT) == 1.0

    def test_everything_out_of_tolerance(self):
        d0 = line_drawing("a", [[(0, 5), (9, 5)]])
        d1 = line_drawing("a", [[(0, 25), (9, 25)]])
        assert stroke_match_fraction(d0.strokes[0], d1, EXACT) == 0.0

    def test_half_overlap_verified_by_brute_force(self):
        # 10-pixel line versus a 5-pixel prefix: exactly half the pixels match
        s_owner = line_drawing("a", [[(0, 5), (9, 5)]])
        other = line_drawing("a", [[(0, 5), (4, 5)]])
        stroke_px = [(x, 5) for x in range(10)]
        other_px = [(x, 5) for x in range(5)]
        card, _ = brute_force_match(stroke_px, other_px, EXACT.d_max)
        assert card == 5
        assert stroke_match_fraction(s_owner.strokes[0], other, EXACT) == card / 10 == 0.5


class TestConsensus:
    def test_identical_drawings_keep_everything(self):
        d = line_drawing("a", [[(2, 5), (20, 5)], [(2, 10), (20, 10)], [(2, 15), (20, 15)]])
        ds = [d] * 5
        res = consensus_drawings(ds, EXACT)
        assert res.kept == tuple((0, 1, 2) for _ in range(5))
        assert len(res.consensus_drawing.strokes) == 3

    def test_extra_stroke_removed(self):
        base = [[(2, 5), (20, 5)], [(2, 10), (20, 10)]]
        extra = base + [[(2, 25), (20, 25)]]  # far from everything else
        ds = [line_drawing("a", base), line_drawing("a", extra), line_drawing("a", base)]
        res = consensus_drawings(ds, EXACT)
        assert res.kept[0] == (0, 1)
        assert res.kept[1] == (0, 1)  # index 2, the stray stroke, removed
        assert res.kept[2] == (0, 1)

    def test_partial_match_below_rho_removed(self):
        # stroke matches one peer at 0.9 and another at 0.5; rho 0.75 kills it
        target = [[(0, 5), (9, 5)]]  # 10 px
        peer_a = [[(0, 5), (8, 5)]]  # overlap 9 px -> 0.9
        peer_b = [[(0, 5), (4, 5)]]  # overlap 5 px -> 0.5
        ds = [line_drawing("a", target), line_drawing("a", peer_a), line_drawing("a", peer_b)]
        res = consensus_drawings(ds, EXACT, rho=0.75)
        frac = res.per_stroke_fractions[0]
        assert frac[0, 1] == pytest.approx(0.9)
        assert frac[0, 2] == pytest.approx(0.5)
        assert res.kept[0] == ()

        res_low = consensus_drawings(ds, EXACT, rho=0.5)
        assert res_low.kept[0] == (0,)

    def test_validation(self):
        d = line_drawing("a", [[(0, 5), (9, 5)]])
        with pytest.raises(ValueError, match="at least 2"):
            consensus_drawings([d], EXACT)
        with pytest.raises(ValueError, match="image_id"):
            consensus_drawings([d, line_drawing("b", [[(0, 5), (9, 5)]])], EXACT)
        with pytest.raises(ValueError, match="rho"):
            consensus_drawings([d, d], EXACT, rho=0.0)

    def test_idempotent_on_jittered_copies(self, np_rng):
        base = line_drawing(
            "a", [[(2, 5), (25, 5)], [(2, 12), (25, 15)], [(5, 20), (25, 28)]]
        )
        tol = Tolerance(3.0)
        ds = [base] + [jittered(base, np_rng) for _ in range(4)]
        res = consensus_drawings(ds, tol)
        kept_ds = res.kept_drawings(ds)
        assert all(len(k.strokes) > 0 for k in kept_ds)
        res2 = consensus_drawings(kept_ds, tol)
        assert all(
            len(res2.kept[i]) == len(kept_ds[i].strokes) for i in range(len(kept_ds))
        )

    def test_rho_monotonicity(self, np_rng):
        base = line_drawing("a", [[(2, 5), (25, 5)], [(2, 15), (25, 18)]])
        ds = [base] + [jittered(base, np_rng, sigma=1.0) for _ in range(3)]
        tol = Tolerance(2.0)
        previous = None
        for rho in (0.3, 0.5, 0.7, 0.9, 1.0):
            kept = consensus_drawings(ds, tol, rho=rho).kept
            flat = {(i, k) for i, idx in enumerate(kept) for k in idx}
            if previous is not None:
                assert flat <= previous
            previous = flat

    def test_dmax_monotonicity(self, np_rng):
        base = line_drawing("a", [[(2, 5), (25, 5)], [(2, 15), (25, 18)]])
        ds = [base] + [jittered(base, np_rng, sigma=1.0) for _ in range(3)]
        previous = None
        for d_max in (0.5, 1.0, 2.0, 4.0, 8.0):
            kept = consensus_drawings(ds, Tolerance(d_max), rho=0.75).kept
            flat = {(i, k) for i, idx in enumerate(kept) for k in idx}
            if previous is not None:
                assert flat >= previous
            previous = flat

    def test_kept_strokes_are_never_split(self, np_rng):
        base = line_drawing("a", [[(2, 5), (25, 5)], [(2, 15), (25, 18)]])
        ds = [base] + [jittered(base, np_rng) for _ in range(2)]
        res = consensus_drawings(ds, Tolerance(2.0))
        for i, idx in enumerate(res.kept):
            for k in idx:
                assert ds[i].strokes[k] in ds[i].strokes  # whole input strokes survive
        for s in res.consensus_drawing.strokes:
            assert s in ds[0].strokes

    def test_union_mode(self):
        d = line_drawing("a", [[(2, 5), (20, 5)]])
        res = consensus_drawings([d, d, d], EXACT, union=True)
        assert len(res.consensus_drawing.strokes) == 3  # one kept stroke per drawing
        assert [s.order_index for s in res.consensus_drawing.strokes] == [0, 1, 2]

    def test_short_stroke_kept_when_one_peer_matches(self):
        # 2-pixel stub: present in one peer only, still kept under unanimity relaxation
        stub = [(10, 10), (11, 10)]
        base = [[(2, 5), (20, 5)]]
        d0 = line_drawing("a", base + [stub])
        d1 = line_drawing("a", base + [stub])
        d2 = line_drawing("a", base)
        res = consensus_drawings([d0, d1, d2], EXACT)
        assert res.kept[0] == (0, 1)
        # but a stub matching nobody is still dropped
        stray = [(25, 25), (26, 25)]
        d3 = line_drawing("a", base + [stray])
        res2 = consensus_drawings([d3, d1, d2], EXACT)
        assert res2.kept[0] == (0,)

    def test_per_stroke_fractions_in_unit_interval(self, np_rng):
        base = line_drawing("a", [[(2, 5), (25, 5)], [(2, 15), (25, 18)]])
        ds = [base] + [jittered(base, np_rng) for _ in range(2)]
        res = consensus_drawings(ds, Tolerance(2.0))
        for mat in res.per_stroke_fractions:
            assert (mat >= 0).all() and (mat <= 1).all()
