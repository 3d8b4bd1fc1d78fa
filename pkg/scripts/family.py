"""Legendre-type family y^2 = x^3 - x twisted by primes p = 1 mod 8.

Runs each prime twice, once on the asserted family inputs and once on fixture
data alone, and flags the primes where the two disagree on rank or on the
path through the chain (saturation bound used or not).
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

from sympy import primerange

from ostrowski.cli import ASSERTED, FAMILIES, FIXTURE, run_ostc
from ostrowski.datastore import load_fixtures


@dataclass
class FamilyConfig:
    pmax: int = 200
    family: str = "legendre-pmod8"
    fixtures: str | None = None


def compare(cfg: FamilyConfig):
    ainvs, mod, res, claim = FAMILIES[cfg.family]
    fx = load_fixtures(cfg.fixtures)
    for p in primerange(3, cfg.pmax + 1):
        if p % mod != res:
            continue
        a = run_ostc(fx, "32a2", p, ASSERTED, claim)
        f = run_ostc(fx, "32a2", p, FIXTURE, claim)
        sat = any(s["formula"] == "saturation" for s in f.derivation)
        yield p, a, f, sat


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pmax", type=int, default=FamilyConfig.pmax)
    ap.add_argument("--fixtures")
    a = ap.parse_args()
    print(f"{'p':>5}  {'asserted':<22}  {'fixture data':<22}  r_D  saturation")
    for p, ra, rf, sat in compare(FamilyConfig(a.pmax, fixtures=a.fixtures)):
        flag = "  <- rank differs" if ra.inputs.r_DF != rf.inputs.r_DF else ""
        print(
            f"{p:>5}  {ra.ostc_structure + ', ' + ra.ecbrz_exact:<22}  "
            f"{rf.ostc_structure + ', ' + rf.ecbrz_exact:<22}  {rf.inputs.r_DF:>3}  {str(sat).lower()}{flag}"
        )


if __name__ == "__main__":
    main()
