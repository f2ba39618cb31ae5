import math

import numpy as np
import pytest

from contourbench import build_drawing


@pytest.fixture
def ref_drawing():
    """A geometric 'contour drawing' shared by game/bench style tests."""
    w = h = 200
    rect = [(30, 30), (170, 30), (170, 120), (30, 120), (30, 30)]
    diag = [(40, 180), (160, 140)]
    wave = [(20 + i * 8, 155 + 12 * math.sin(i * 0.9)) for i in range(20)]
    return build_drawing("fixture", w, h, [(0, rect), (1, diag), (2, wave)], "ref")


def brute_force_match(pred_pts, gt_pts, d_max):
    """Exhaustive lexicographic (max cardinality, min total distance) matching.

    Independent oracle for the assignment solver; exponential, keep sides <= 8.
    """
    pred_pts = [tuple(p) for p in pred_pts]
    gt_pts = [tuple(g) for g in gt_pts]
    edges = [
        [(j, math.dist(p, g)) for j, g in enumerate(gt_pts) if math.dist(p, g) <= d_max]
        for p in pred_pts
    ]
    best = (0, 0.0)

    def rec(i, used, card, cost):
        nonlocal best
        if i == len(pred_pts):
            if card > best[0] or (card == best[0] and cost < best[1] - 1e-12):
                best = (card, cost)
            return
        rec(i + 1, used, card, cost)
        for j, d in edges[i]:
            if j not in used:
                used.add(j)
                rec(i + 1, used, card + 1, cost + d)
                used.remove(j)

    rec(0, set(), 0, 0.0)
    return best


@pytest.fixture
def brute_match():
    return brute_force_match


def random_binary_map(rng, max_side=20, density=0.15):
    h = int(rng.integers(1, max_side + 1))
    w = int(rng.integers(1, max_side + 1))
    return rng.random((h, w)) < density


@pytest.fixture
def np_rng():
    return np.random.default_rng(0xC0FFEE)
