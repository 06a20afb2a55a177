"""Critical value of the leaf cover against the transfer-operator pressure, per cutoff."""
from __future__ import annotations

import argparse
from dataclasses import dataclass

from carathedyn.caratheodory import critical_value
from carathedyn.config import FIXTURE_NAMES, fixture
from carathedyn.oracle import flow_pressure


@dataclass
class Config:
    cutoffs: tuple[float, ...] = (6.0, 10.0, 14.0, 18.0)
    depth_cap: int = 40
    alpha_tol: float = 1e-9


def main(cfg: Config, names) -> None:
    print(f"{'fixture':<8}{'T':>6}{'critical':>14}{'oracle':>14}{'error':>11}")
    for name in names:
        system = fixture(name)
        P = flow_pressure(system)
        for T in cfg.cutoffs:
            a = critical_value(system, [T], cfg.depth_cap, cfg.alpha_tol).alpha_star
            print(f"{name:<8}{T:>6g}{a:>14.9f}{P:>14.9f}{abs(a - P):>11.2e}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("fixtures", nargs="*", default=list(FIXTURE_NAMES))
    ap.add_argument("--depth-cap", type=int, default=Config.depth_cap)
    args = ap.parse_args()
    main(Config(depth_cap=args.depth_cap), args.fixtures)
