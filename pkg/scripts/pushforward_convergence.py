"""Total-variation distance of averaged leaf pushforwards to the equilibrium measure.

Writes one CSV row per (fixture, algebra depth, t).  Only constant-roof fixtures apply.
"""
from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass

import numpy as np

from carathedyn.config import fixture
from carathedyn.oracle import flow_pressure
from carathedyn.pushforward import LeafPushforward, convergence_table


@dataclass
class Config:
    times: tuple[float, ...] = (5.0, 10.0, 20.0, 40.0, 80.0, 160.0)
    depths: tuple[int, ...] = (1, 2, 3)
    cutoff_T: float = 18.0
    seed: int = 0


def main(cfg: Config, names) -> None:
    out = csv.writer(sys.stdout)
    out.writerow(["fixture", "depth", "t", "tv_distance", "t_times_tv"])
    for name in names:
        system = fixture(name)
        x = system.random_point(np.random.default_rng(cfg.seed))
        lp = LeafPushforward(system, flow_pressure(system), x, cfg.cutoff_T)
        for d in cfg.depths:
            for row in convergence_table(lp, cfg.times, d):
                out.writerow([name, d, row["t"], f"{row['tv_distance']:.6g}", f"{row['t'] * row['tv_distance']:.4g}"])


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("fixtures", nargs="*", default=["FULL2", "GOLD", "BERN13", "SRB3"])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    main(Config(seed=args.seed), args.fixtures)
