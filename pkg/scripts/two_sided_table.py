"""Two-sided cover measure: flow invariance per split rule, and the Gibbs-star constant versus s + t."""
from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from carathedyn.config import fixture
from carathedyn.oracle import flow_pressure
from carathedyn.system import CylinderSet
from carathedyn.twosided import MeasureM, default_cap, flow_invariance_check, gibbs_star_ratio


@dataclass
class Config:
    cutoff_T: float = 10.0
    taus: tuple[float, ...] = (0.1, 0.25, 0.5, 1.0, 2.5)
    spans: tuple[float, ...] = (4.0, 8.0, 12.0, 16.0, 20.0, 24.0)
    samples: int = 20
    seed: int = 0


def main(cfg: Config, name: str) -> None:
    system = fixture(name)
    P = flow_pressure(system)
    r0 = system.roof.values[(0,)]
    Z = CylinderSet(0, (0,), (0.0, r0 / 2))
    split = {False: MeasureM(system, P, cfg.cutoff_T), True: MeasureM(system, P, cfg.cutoff_T, symmetric=True)}
    print(f"{name}: flow invariance m(f_tau Z)/m(Z), Z = [a] x [0, {r0 / 2:g})")
    print(f"{'tau':>6}{'greedy':>12}{'symmetric':>12}")
    for tau in cfg.taus:
        vals = [flow_invariance_check(split[s], Z, tau).ratio for s in (False, True)]
        print(f"{tau:>6g}{vals[0]:>12.6f}{vals[1]:>12.6f}")
    rng = np.random.default_rng(cfg.seed)
    print(f"\nGibbs-star constant max(rho, 1/rho) over {cfg.samples} samples")
    print(f"{'s+t':>6}{'worst':>10}{'median rho':>12}")
    for span in cfg.spans:
        rhos = []
        for _ in range(cfg.samples):
            x = system.random_point(rng, radius=int(span) + 4)
            r = system.roof.at(x)
            x = x.with_fiber(float(rng.uniform(0.05 * r, 0.95 * r)))
            s = float(rng.uniform(2, span - 2))
            m, n = int(s / system.min_roof) + 2, int((span - s) / system.min_roof) + 2
            cap = max(default_cap(system, cfg.cutoff_T), m + system.k_r + 3, n + system.k_r + 3)
            rhos.append(gibbs_star_ratio(MeasureM(system, P, cfg.cutoff_T, cap), x, s, span - s))
        worst = max(max(rhos), 1 / min(rhos))
        print(f"{span:>6g}{worst:>10.3f}{float(np.median(rhos)):>12.3f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("fixture", nargs="?", default="GOLD")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    main(Config(seed=args.seed), args.fixture)
