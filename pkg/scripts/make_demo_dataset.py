#!/usr/bin/env python3
"""Build the synthetic demo dataset used by the CLI examples and the game."""

import argparse

from contourbench.demo import build_demo_dataset


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("root", help="output dataset root")
    ap.add_argument("--n-images", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    ids = build_demo_dataset(args.root, n_images=args.n_images, seed=args.seed)
    print(f"wrote {len(ids)} images with 5 drawings each under {args.root}: {', '.join(ids)}")


if __name__ == "__main__":
    main()
