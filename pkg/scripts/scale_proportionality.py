"""Exploratory: are leaf measures built at different symbolic radii k_r proportional?

For each fixture, m^u of every forward cylinder of depth <= 4 on a few leaves is
computed at k_r = 0, 1, 2, and the ratio to the k_r = 0 value is summarized.
A spread of zero means the two scales give proportional measures on that leaf.
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass

from carathedyn.caratheodory import LeafProblem, cover_value, reference_points
from carathedyn.config import FIXTURE_NAMES, fixture
from carathedyn.oracle import flow_pressure
from carathedyn.system import completions


@dataclass
class Config:
    radii: tuple[int, ...] = (1, 2)
    depth: int = 4
    cutoff_T: float = 14.0
    depth_cap: int = 34


def leaf_values(system, x, P, cfg):
    out = {}
    for d in range(1, cfg.depth + 1):
        for w in completions(system.sft, {0: x.symbol(0)}, 0, d):
            cons = dict(enumerate(w[1:], 1))
            out[w] = cover_value(LeafProblem(system, x, -1), cons, P, cfg.cutoff_T, cfg.depth_cap).value
    return out


def main(cfg: Config, names) -> None:
    print(f"{'fixture':<8}{'leaf':>6}{'k_r':>5}{'ratio min':>12}{'ratio max':>12}{'spread':>11}")
    for name in names:
        base = fixture(name)
        P = flow_pressure(base)
        for x in reference_points(base)[:2]:
            ref = leaf_values(base, x, P, cfg)
            for k in cfg.radii:
                vals = leaf_values(base.with_k_r(k), x, P, cfg)
                ratios = [vals[w] / ref[w] for w in ref]
                lo, hi = min(ratios), max(ratios)
                print(f"{name:<8}{''.join(map(str, x.word(-1, 0))):>6}{k:>5}{lo:>12.6f}{hi:>12.6f}{hi / lo - 1:>11.2e}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("fixtures", nargs="*", default=list(FIXTURE_NAMES))
    main(Config(), ap.parse_args().fixtures)
