#!/usr/bin/env python3
"""How well does each annotator score against the consensus of the others?

A small end-to-end exercise of the benchmark: every drawing is treated as a
prediction and evaluated against the consensus built from its peers.
"""

import argparse

from contourbench import Tolerance, aggregate, consensus_drawings, evaluate_prediction
from contourbench.dataset import list_image_ids, load_drawings, resolve_data_root


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data", default=None)
    ap.add_argument("--rho", type=float, default=0.75)
    args = ap.parse_args()
    root = resolve_data_root(args.data)

    per_image = []
    for image_id in list_image_ids(root):
        ds = load_drawings(root, image_id)
        tol = Tolerance.for_image(ds[0].width, ds[0].height)
        for held_out in range(len(ds)):
            peers = [d for i, d in enumerate(ds) if i != held_out]
            if len(peers) < 2:
                continue
            gt = consensus_drawings(peers, tol, rho=args.rho).consensus_drawing
            ev = evaluate_prediction(ds[held_out], gt, tol)
            row = ev.rows[0]
            print(
                f"{image_id} annotator {held_out}: P={row.precision:.3f} "
                f"R={row.recall:.3f} F1={row.f1:.3f}"
            )
            per_image.append(ev)
    if per_image:
        summary = aggregate(per_image)
        print(f"\noverall (micro): F1={summary.ods['f1']:.3f} "
              f"P={summary.ods['precision']:.3f} R={summary.ods['recall']:.3f}")


if __name__ == "__main__":
    main()
