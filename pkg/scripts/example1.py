"""Run the order-formula chain for y^2 = x^3 - x + 1/4 over every fixture twist.

One row per D: norm index, delta (with its provenance), H^1, the two
exactness-conditional Ker(trans) orders, the verdict and Ost_c.
"""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

from ostrowski.cli import ASSERTED, run_ostc
from ostrowski.datastore import load_fixtures


@dataclass
class Example1Config:
    label: str = "37a1-short"
    data: str = ASSERTED
    fixtures: str | None = None


def rows(cfg: Example1Config):
    fx = load_fixtures(cfg.fixtures)
    for pair in sorted(fx.pairs, key=lambda p: (abs(p.D), p.D)):
        if pair.curve != cfg.label:
            continue
        t0 = time.perf_counter()
        rep = run_ostc(fx, cfg.label, pair.D, cfg.data)
        yield pair.D, rep, time.perf_counter() - t0


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--data", default=ASSERTED, choices=("asserted", "fixture"))
    ap.add_argument("--fixtures")
    a = ap.parse_args()
    cfg = Example1Config(data=a.data, fixtures=a.fixtures)
    print(f"{'D':>6} {'idx':>4} {'delta':>12} {'H1':>3} {'t1':>3} {'t2':>3} {'verdict':>8}  Ost_c     ms")
    for D, rep, dt in rows(cfg):
        i = rep.inputs
        delta = f"{i.delta} ({'bs' if i.delta_provenance != 'table' else 'tab'})"
        print(
            f"{D:>6} {i.norm_index:>4} {delta:>12} {rep.h1_global_order:>3} {rep.t1!s:>3} {rep.t2!s:>3} "
            f"{rep.ecbrz_exact:>8}  {rep.ostc_structure:<8} {1000 * dt:5.1f}"
        )


if __name__ == "__main__":
    main()
