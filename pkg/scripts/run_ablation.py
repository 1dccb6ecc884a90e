#!/usr/bin/env python
"""Sweep projection or bin counts over the synthetic suite.

Writes one CSV row per axis value with per-seed and mean AUCs; the same
sweep is available as `radonad ablate`.
"""

import argparse
import csv
import sys
from pathlib import Path

from radonad.config import load_config
from radonad.evaluation import run_ablation


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", type=Path, default=None)
    parser.add_argument("--axis", choices=("projections", "bins", "scheme", "distance"), required=True)
    parser.add_argument("--values", required=True, help="comma list, e.g. 5,25,100")
    parser.add_argument("--seeds", default="0,1,2,3,4", help="comma list of seeds")
    parser.add_argument("--n-train", type=int, default=6)
    parser.add_argument("--n-test", type=int, default=8)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--out", type=Path, required=True)
    args = parser.parse_args()

    cfg = load_config(args.config)
    cast = int if args.axis in ("projections", "bins") else str
    values = [cast(v.strip()) for v in args.values.split(",") if v.strip()]
    seeds = [int(s.strip()) for s in args.seeds.split(",") if s.strip()]
    rows = run_ablation(
        cfg,
        args.axis,
        values,
        seeds,
        n_train=args.n_train,
        n_test=args.n_test,
        threads=args.threads,
    )
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["axis", "value", "mean_auc"] + [f"auc_seed{i}" for i in range(len(seeds))])
        for row in rows:
            writer.writerow(
                [row["axis"], row["value"], f"{row['mean_auc']:.6f}"]
                + [f"{a:.6f}" for a in row["per_seed"]]
            )
    for row in rows:
        print(f"{args.axis}={row['value']}: mean_auc={row['mean_auc']:.4f}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
