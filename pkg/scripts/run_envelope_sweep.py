"""Sweep shared-terminal demand streams and report how far each online
session sits below its size envelope.

Example:
    python3 scripts/run_envelope_sweep.py --ns 50,100,200 --s-sizes 1,2,4,8
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
from dataclasses import dataclass, field

from reachkeep import bench_sweep, primary_rows, sourcewise_cells


@dataclass
class SweepConfig:
    ns: list[int] = field(default_factory=lambda: [50, 100, 200])
    s_sizes: list[int] = field(default_factory=lambda: [1, 2, 4, 8])
    pair_factor: int = 20
    density: float = 0.25
    constant: float = 16.0
    seed: int = 0
    as_json: bool = False


def parse_args(argv: list[str] | None) -> SweepConfig:
    base = SweepConfig()
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ns", default=",".join(map(str, base.ns)))
    ap.add_argument("--s-sizes", default=",".join(map(str, base.s_sizes)))
    ap.add_argument("--pair-factor", type=int, default=base.pair_factor)
    ap.add_argument("--density", type=float, default=base.density)
    ap.add_argument("--constant", type=float, default=base.constant)
    ap.add_argument("--seed", type=int, default=base.seed)
    ap.add_argument("--json", action="store_true", dest="as_json")
    ns = ap.parse_args(argv)
    return SweepConfig(
        ns=[int(x) for x in ns.ns.split(",") if x],
        s_sizes=[int(x) for x in ns.s_sizes.split(",") if x],
        pair_factor=ns.pair_factor,
        density=ns.density,
        constant=ns.constant,
        seed=ns.seed,
        as_json=ns.as_json,
    )


def main(argv: list[str] | None = None) -> int:
    cfg = parse_args(argv)
    cells = sourcewise_cells(
        cfg.ns,
        cfg.s_sizes,
        pair_factor=cfg.pair_factor,
        seed=cfg.seed,
        density=cfg.density,
    )
    rows = primary_rows(bench_sweep(cells, constant=cfg.constant))
    if cfg.as_json:
        json.dump(rows, sys.stdout, indent=2)
        print()
        return 0

    header = f"{'n':>5} {'|S|':>4} {'p':>6} {'mode':>4} {'edges':>7} {'envelope':>10} {'ratio':>7}"
    print(header)
    print("-" * len(header))
    ratios = []
    for row in rows:
        if "error" in row:
            print(f"{row['n']:>5} {'-':>4} {'-':>6} {row['mode']:>4} error: {row['error']}")
            continue
        ratio = row["envelope_ratio"]
        if ratio is not None:
            ratios.append(ratio)
        print(
            f"{row['n']:>5} {row['sigma']:>4} {row['p']:>6} {row['mode']:>4} "
            f"{row['edges_h']:>7} {row['envelope']:>10.0f} "
            f"{ratio if ratio is None else format(ratio, '.3f'):>7}"
        )
    if ratios:
        print(
            f"\n{len(ratios)} cells, envelope ratio "
            f"median {statistics.median(ratios):.3f}, max {max(ratios):.3f}"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
