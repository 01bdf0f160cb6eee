"""Drive the online Steiner-network simulator over random digraphs and
print route profiles, output sizes, and lower-bound ratios.

Example:
    python3 scripts/run_udsn_experiment.py --ns 60,150,300 --seeds 0,1 --T 10
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from reachkeep import InstanceFamily, UdsnParams, UdsnSession, generate


@dataclass
class ExperimentConfig:
    ns: list[int] = field(default_factory=lambda: [60, 150, 300])
    seeds: list[int] = field(default_factory=lambda: [0, 1, 2])
    pair_factor: float = 0.7
    tau: int | None = None
    T: int | None = None
    as_json: bool = False

    def density_for(self, n: int) -> float:
        # keep expected out-degree near 3 as n grows
        return min(0.5, 3.0 / max(1, n - 1))


def parse_args(argv: list[str] | None) -> ExperimentConfig:
    base = ExperimentConfig()
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ns", default=",".join(map(str, base.ns)))
    ap.add_argument("--seeds", default=",".join(map(str, base.seeds)))
    ap.add_argument("--pair-factor", type=float, default=base.pair_factor)
    ap.add_argument("--tau", type=int, default=None)
    ap.add_argument("--T", type=int, default=None)
    ap.add_argument("--json", action="store_true", dest="as_json")
    ns = ap.parse_args(argv)
    return ExperimentConfig(
        ns=[int(x) for x in ns.ns.split(",") if x],
        seeds=[int(x) for x in ns.seeds.split(",") if x],
        pair_factor=ns.pair_factor,
        tau=ns.tau,
        T=ns.T,
        as_json=ns.as_json,
    )


def run_one(cfg: ExperimentConfig, n: int, seed: int) -> dict[str, object]:
    pairs = max(10, int(cfg.pair_factor * n))
    family = InstanceFamily(
        kind="random-digraph",
        n=n,
        seed=seed,
        density=cfg.density_for(n),
        pairs=pairs,
    )
    g, stream = generate(family)
    base = UdsnParams.defaults_for(n)
    params = UdsnParams(
        tau=base.tau if cfg.tau is None else cfg.tau,
        T=base.T if cfg.T is None else cfg.T,
    )
    session = UdsnSession(g, params, seed=seed)
    for s, t in stream:
        session.serve(s, t)
    summary = session.summary()
    summary["n"] = n
    summary["seed"] = seed
    summary["edges_in"] = g.edge_count
    summary["tau"] = params.tau
    summary["T"] = params.T
    return summary


def main(argv: list[str] | None = None) -> int:
    cfg = parse_args(argv)
    summaries = [run_one(cfg, n, seed) for n in cfg.ns for seed in cfg.seeds]
    if cfg.as_json:
        json.dump(summaries, sys.stdout, indent=2)
        print()
        return 0

    header = (
        f"{'n':>5} {'seed':>4} {'tau':>4} {'T':>4} {'pairs':>6} "
        f"{'routes t/f/h/th':>16} {'out':>6} {'lb':>4} {'ratio':>7} {'cert':>5}"
    )
    print(header)
    print("-" * len(header))
    for s in summaries:
        profile = s["handler_profile"]
        routes = "/".join(
            str(profile.get(k, 0)) for k in ("trivial", "firstT", "hit", "thin")
        )
        ratio = s["ratio"]
        print(
            f"{s['n']:>5} {s['seed']:>4} {s['tau']:>4} {s['T']:>4} "
            f"{s['pairs_served']:>6} {routes:>16} {s['output_edges']:>6} "
            f"{s['opt_lower_bound']:>4} "
            f"{'-' if ratio is None else format(ratio, '.2f'):>7} "
            f"{'yes' if s['ratio_certified'] else 'no':>5}"
        )
        if s["sampling_failures"]:
            print(f"      sampling failures: {s['sampling_failures']} pair(s)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
