#!/usr/bin/env python3
"""Synthetic quality-control calibration: perfect tracers vs random scribblers.

Reports the score-fraction distributions of both populations and the
classification accuracy of the default cut-off.
"""

import argparse
import math

import numpy as np

from contourbench import GameParams, build_drawing
from contourbench.agents import separation_experiment


def default_reference():
    return build_drawing(
        "calibration",
        200,
        200,
        [
            (0, [(30, 30), (170, 30), (170, 120), (30, 120), (30, 30)]),
            (1, [(40, 180), (160, 140)]),
            (2, [(20 + i * 8, 155 + 12 * math.sin(i * 0.9)) for i in range(20)]),
        ],
    )


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-agents", type=int, default=50)
    ap.add_argument("--cutoff", type=float, default=0.5)
    ap.add_argument("--seed", type=int, default=3)
    args = ap.parse_args()

    result = separation_experiment(
        default_reference(), GameParams(), cutoff=args.cutoff,
        n_agents=args.n_agents, seed=args.seed,
    )
    t = np.array(result["tracer_fractions"])
    s = np.array(result["scribbler_fractions"])
    print(f"tracers:    fraction {t.mean():.3f} +/- {t.std():.3f} (min {t.min():.3f})")
    print(f"scribblers: fraction {s.mean():.3f} +/- {s.std():.3f} (max {s.max():.3f})")
    print(f"cutoff {args.cutoff}: accuracy {result['accuracy']:.1%} "
          f"(tracer accept {result['tracer_accept_rate']:.1%}, "
          f"scribbler reject {result['scribbler_reject_rate']:.1%})")


if __name__ == "__main__":
    main()
