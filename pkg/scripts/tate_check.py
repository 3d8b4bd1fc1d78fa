"""Compare Tate's algorithm with the vendored local data and record conductors."""

from __future__ import annotations

import argparse
import re
from collections import Counter
from dataclasses import dataclass

from ostrowski.datastore import load_fixtures, load_tate_rows
from ostrowski.ellcurve import EllipticCurve
from ostrowski.localred import conductor, tate_algorithm


@dataclass
class TateConfig:
    fixtures: str | None = None
    verbose: bool = False


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--fixtures")
    ap.add_argument("-v", "--verbose", action="store_true")
    a = ap.parse_args()
    cfg = TateConfig(a.fixtures, a.verbose)

    path = None if cfg.fixtures is None else f"{cfg.fixtures}/tate.jsonl"
    rows = load_tate_rows(path)
    kinds, bad = Counter(), []
    for r in rows:
        loc = tate_algorithm(EllipticCurve.from_ainvs(r["a_invariants"]), r["p"])
        kinds[re.sub(r"\d+", "n", loc.kodaira)] += 1
        ok = (loc.kodaira, loc.tamagawa) == (r["kodaira"], r["tamagawa"])
        if not ok:
            bad.append(r["label"])
        if cfg.verbose or not ok:
            print(f"{r['label']:>10} p={r['p']:<4} {loc.kodaira:>5} c={loc.tamagawa}  fixture {r['kodaira']} c={r['tamagawa']}")
    print(f"local rows: {len(rows) - len(bad)}/{len(rows)} agree; Kodaira types seen: {dict(sorted(kinds.items()))}")

    fx = load_fixtures(cfg.fixtures)
    cond_bad = [rec.label for rec in fx.curves.values() if conductor(rec.curve) != rec.conductor]
    print(f"conductors (Ogg): {len(fx.curves) - len(cond_bad)}/{len(fx.curves)} agree" + (f", mismatches {cond_bad}" if cond_bad else ""))


if __name__ == "__main__":
    main()
