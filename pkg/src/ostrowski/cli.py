"""Command line: ``ostrowski polya | ostc | family``.

    ostrowski polya --d -5
    ostrowski polya --scan -200 -1 --jobs 4
    ostrowski ostc --curve 0,0,0,-1,1/4 --D -7
    ostrowski ostc --curve 32a2 --D 17 --json
    ostrowski family --family legendre-pmod8 --pmax 100

Exit status is 0 when every item computed and verified, 1 when a computation
failed or a verification did not hold, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from pathlib import Path

from sympy import primerange

from . import datastore
from .classgroup import MAX_ABS_DISC
from .ellcurve import EllipticCurve, MordellWeilData, torsion_subgroup, twist
from .errors import MissingGenerators, OstrowskiError
from .polya import brz_verify
from .quadfield import QuadraticField, is_squarefree
from .shaengine import INCONSISTENT, NO, YES, ShaInput, ostc_report, prepare_inputs

# base curve, modulus, residue, and what the family statement asserts for every member
FAMILIES = {
    "legendre-pmod8": (
        (0, 0, 0, -1, 0), 8, 1,
        {"rank_E": 0, "rank_ED": 0, "sha_E": "0", "norm_index": 4,
         "source": "family statement (Qiu, Theorem 3.3)"},
    ),
}
ASSERTED, FIXTURE = "asserted", "fixture"


@dataclass
class CliConfig:
    max_abs_disc: int = MAX_ABS_DISC
    max_prime: int = 10**5
    fixtures: Path | None = None
    store: Path | None = None
    json: bool = False
    jobs: int = 1
    data: str = ASSERTED

    def __post_init__(self):
        if self.max_abs_disc < 1 or self.max_prime < 1:
            raise ValueError("scan caps must be positive")
        if self.jobs < 1:
            raise ValueError("--jobs must be positive")
        if self.data not in (ASSERTED, FIXTURE):
            raise ValueError(f"unknown data mode {self.data!r}")


# --- shared pipeline --------------------------------------------------------------


def parse_curve_arg(text: str):
    """A label, or comma/space separated a-invariants (2 or 5 of them)."""
    body = text.strip().strip("[]()")
    parts = [p for p in body.replace(",", " ").split() if p]
    if len(parts) in (2, 5):
        try:
            return tuple(Fraction(p) for p in parts)
        except (ValueError, ZeroDivisionError):
            pass
    return text.strip()


def find_curve(fx: datastore.Fixtures, which) -> tuple[EllipticCurve, datastore.CurveRecord | None]:
    if isinstance(which, str):
        rec = fx.curves.get(which)
        if rec is None:
            raise MissingGenerators(f"no fixture record with label {which!r}")
        return rec.curve, rec
    E = EllipticCurve.from_ainvs(which)
    return E, fx.by_ainvs(E.ainvs)


def assemble(fx: datastore.Fixtures, which, D: int, data: str = ASSERTED, default_asserted=None):
    """OstcInputs for (E, D) from fixture records; asserted values win in ``asserted`` mode.

    ``default_asserted`` stands in for a missing pair record, and in ``fixture`` mode is
    used only when the twist has no record at all.
    """
    E, rec = find_curve(fx, which)
    if rec is None:
        raise MissingGenerators(f"no fixture record for {list(map(str, E.ainvs))}")
    pair = fx.pair(rec.label, D)
    tw = fx.curves.get(pair.twist) if pair else None
    if tw is None:
        tw = fx.by_ainvs(twist(E, D).ainvs)
    notes = []
    if data == ASSERTED:
        asserted = (pair.asserted if pair else None) or default_asserted or {}
    elif tw is None and default_asserted:
        asserted = default_asserted
        notes.append("no fixture record for the twist; using asserted values")
    else:
        asserted = {}
    if tw is not None:
        mw_twist = tw.mordell_weil()
        sha_ED = tw.sha_analytic
        prov_ED = f"fixture {tw.label}"
    elif "rank_ED" in asserted:
        ED = twist(E, D)
        mw_twist = MordellWeilData(
            ED, asserted["rank_ED"], [], torsion_subgroup(ED).torsion_generators, "asserted rank"
        )
        sha_ED, prov_ED = None, "unknown"
    else:
        raise MissingGenerators(f"no fixture record for the {D}-twist of {rec.label}")
    mw_F = rec.mordell_weil()
    prov = {"sha_E_F": f"fixture {rec.label}", "sha_ED_F": prov_ED, "sha_E_K": "unknown"}
    sha_E, sha_EK = rec.sha_analytic, pair.sha_E_K if pair else None
    if pair and pair.sha_E_K is not None:
        prov["sha_E_K"] = pair.sha_E_K_source or "fixture"
    src = asserted.get("source", "")
    for key, name in (("sha_E", "sha_E_F"), ("sha_ED", "sha_ED_F"), ("sha_E_K", "sha_E_K")):
        if key in asserted:
            v = datastore.sha_order(asserted[key], notes, key)
            if name == "sha_E_F":
                sha_E = v
            elif name == "sha_ED_F":
                sha_ED = v
            else:
                sha_EK = v
            prov[name] = f"asserted: {src}"
    ranks = None
    if "rank_E" in asserted and "rank_ED" in asserted:
        ranks = (asserted["rank_E"], asserted["rank_ED"])
        if ranks != (mw_F.rank, mw_twist.rank):
            notes.append(
                f"asserted ranks {ranks} differ from fixture ranks {(mw_F.rank, mw_twist.rank)}"
            )
    extra = pair.k_points(E) if pair else []
    inp = prepare_inputs(
        E, D, mw_F, mw_twist, ShaInput(sha_E, sha_ED, sha_EK, prov),
        label=rec.label, ranks=ranks, extra_points=extra,
    )
    if "norm_index" in asserted and asserted["norm_index"] != inp.norm_index:
        notes.append(f"asserted norm index {asserted['norm_index']} but computed {inp.norm_index}")
    return inp, notes


def run_ostc(fx, which, D, data=ASSERTED, default_asserted=None):
    inp, notes = assemble(fx, which, D, data, default_asserted)
    report = ostc_report(inp)
    report.warnings.extend(f"note: {n}" for n in notes)
    return report


EXACT_WORDS = {YES: "exact", NO: "not exact", INCONSISTENT: "inconsistent data"}


def summary_line(report) -> str:
    s = report.ostc_structure
    ost = "Ost_c = 0" if s == "0" else f"Ost_c ≅ {s}"
    return f"{ost}, EC-BRZ: {EXACT_WORDS.get(report.ecbrz_exact, report.ecbrz_exact)}"


def report_text(report) -> list[str]:
    inp = report.inputs
    lines = [
        f"curve {inp.label}, D = {inp.D}: r = {inp.r_F}, r_D = {inp.r_DF}, "
        f"idx = {inp.norm_index} [{inp.saturation_flag}], delta = {inp.delta}",
    ]
    for s in report.derivation:
        lines.append(f"  {s['anchor']}  =>  {s['step']}")
    for w in report.warnings:
        lines.append(f"  {w}" if w.startswith("note: ") else f"  warning: {w}")
    lines.append(summary_line(report))
    return lines


def report_failed(report) -> bool:
    return report.ecbrz_exact == INCONSISTENT or report.sha_check == "inconsistent"


# --- workers (module level so they pickle) ---------------------------------------------


def _polya_item(d: int):
    return brz_verify(QuadraticField(d))


def _family_item(args):
    fixtures_dir, family, p, data = args
    ainvs, _, _, claim = FAMILIES[family]
    fx = _load(fixtures_dir)
    which = tuple(Fraction(a) for a in ainvs)
    if fx.by_ainvs(which) is None:
        raise MissingGenerators(f"no fixture record for the base curve of {family}")
    return p, run_ostc(fx, which, p, data, default_asserted=claim)


_FX_CACHE: dict = {}


def _load(directory):
    # key on the resolved directory so a changed environment is picked up
    key = str(Path(directory) if directory is not None else datastore.fixture_dir())
    if key not in _FX_CACHE:
        _FX_CACHE[key] = datastore.load_fixtures(key)
    return _FX_CACHE[key]


def _map(fn, items, jobs):
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


# --- commands ----------------------------------------------------------------------------


def _emit(cfg: CliConfig, out, text_lines, doc):
    if cfg.json:
        out.write(json.dumps(doc, sort_keys=True, default=str) + "\n")
    else:
        for line in text_lines:
            out.write(line + "\n")


def _store(cfg, report):
    if cfg.store is not None:
        datastore.store_report(report, cfg.store)


def cmd_polya(args, cfg: CliConfig, out) -> int:
    if args.d is not None:
        ds = [args.d]
    else:
        lo, hi = args.scan
        if lo > hi:
            raise _Usage("--scan needs min <= max")
        ds = [d for d in range(lo, hi + 1) if d not in (0, 1) and is_squarefree(d)]
    for d in ds:
        if abs(d if d % 4 == 1 else 4 * d) > cfg.max_abs_disc:
            raise _Usage(f"d={d} exceeds the discriminant cap {cfg.max_abs_disc}")
    failed = 0
    for rep in _map(_polya_item, ds, cfg.jobs):
        rec = rep.as_record()
        failed += not rep.identity_holds
        text = (
            f"d={rep.d} disc={rep.disc} h={rep.h} polya_order={rep.polya_order} "
            f"h1_units={rep.h1_units_order} s={rep.s} brz_holds={str(rep.identity_holds).lower()}"
        )
        _emit(cfg, out, [text], rec)
        _store(cfg, rep)
    if not cfg.json and len(ds) > 1:
        out.write(f"{len(ds)} fields, {len(ds) - failed} with brz_holds=true\n")
    return 1 if failed else 0


def cmd_ostc(args, cfg: CliConfig, out) -> int:
    fx = _load(cfg.fixtures)
    report = run_ostc(fx, parse_curve_arg(args.curve), args.D, cfg.data)
    _emit(cfg, out, report_text(report), report.as_dict())
    _store(cfg, report)
    return 1 if report_failed(report) else 0


def cmd_family(args, cfg: CliConfig, out) -> int:
    if args.pmax > cfg.max_prime:
        raise _Usage(f"--pmax exceeds the cap {cfg.max_prime}")
    _, mod, res, _ = FAMILIES[args.family]
    primes = [p for p in primerange(3, args.pmax + 1) if p % mod == res]
    items = [(cfg.fixtures, args.family, p, cfg.data) for p in primes]
    zero, failed = 0, 0
    for p, report in _map(_family_item, items, cfg.jobs):
        zero += report.ostc_structure == "0"
        failed += report_failed(report)
        _emit(cfg, out, [f"p = {p}"] + report_text(report), {"p": p, **report.as_dict()})
        _store(cfg, report)
    if not cfg.json:
        out.write(f"family {args.family}, pmax = {args.pmax}: {len(primes)} primes, Ost_c = 0 for {zero}\n")
    return 1 if failed else 0


class _Usage(Exception):
    pass


def _squarefree_d(text: str) -> int:
    try:
        d = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from exc
    if d in (0, 1) or not is_squarefree(d):
        raise argparse.ArgumentTypeError(f"d={d} is not a squarefree integer other than 0, 1")
    return d


def _nonsquare_D(text: str) -> int:
    try:
        D = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from exc
    if D == 0 or (D > 0 and isqrt(D) ** 2 == D):
        raise argparse.ArgumentTypeError(f"D={D} is zero or a square")
    return D


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="one JSON document per line")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for batch items")
    common.add_argument("--fixtures", type=Path, help=f"fixture directory (default ${datastore.FIXTURE_ENV} or bundled data)")
    common.add_argument("--store", type=Path, help="append reports to this JSON-lines file")
    common.add_argument("--max-disc", type=int, default=MAX_ABS_DISC, help="cap on |disc|")
    common.add_argument("--max-prime", type=int, default=10**5, help="cap on family primes")
    common.add_argument(
        "--data", choices=(ASSERTED, FIXTURE), default=ASSERTED,
        help="prefer values asserted by a source over fixture values (default) or not",
    )

    ap = argparse.ArgumentParser(prog="ostrowski", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("polya", parents=[common], help="Polya group and the BRZ order identity")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--d", type=_squarefree_d)
    g.add_argument("--scan", nargs=2, type=int, metavar=("MIN", "MAX"))

    p = sub.add_parser("ostc", parents=[common], help="order-formula chain for (E, D)")
    p.add_argument("--curve", required=True, help="fixture label or a-invariants a1,a2,a3,a4,a6")
    p.add_argument("--D", required=True, type=_nonsquare_D)

    p = sub.add_parser("family", parents=[common], help="batch over a twist family")
    p.add_argument("--family", choices=sorted(FAMILIES), default="legendre-pmod8")
    p.add_argument("--pmax", required=True, type=int)
    return ap


COMMANDS = {"polya": cmd_polya, "ostc": cmd_ostc, "family": cmd_family}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = CliConfig(args.max_disc, args.max_prime, args.fixtures, args.store, args.json, args.jobs, args.data)
    except ValueError as exc:
        ap.error(str(exc))
    try:
        return COMMANDS[args.command](args, cfg, out)
    except _Usage as exc:
        ap.error(str(exc))
    except OstrowskiError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0  # pragma: no cover


if __name__ == "__main__":
    sys.exit(main())
