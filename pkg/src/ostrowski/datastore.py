"""Curve records and computed reports as newline-delimited JSON.

Fixture lines carry the CurveRecord fields; every record is checked on load
(nonsingular model, generators on the curve, torsion structure equal to the
Lutz-Nagell recomputation). Reports are appended one JSON object per line.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .ellcurve import EllipticCurve, KPoint, MordellWeilData, torsion_subgroup
from .errors import ParseError, ValidationError
from .polya import BrzReport
from .quadfield import make_field, squarefree_part
from .shaengine import OstcInputs, OstcReport, ShaInput

FIXTURE_ENV = "OSTROWSKI_FIXTURES"

CURVE_FIELDS = (
    "label", "a_invariants", "conductor", "rank", "generators", "torsion_structure",
    "sha_analytic", "local_data", "source", "retrieved_at",
)
PAIR_FIELDS = ("curve", "D", "twist", "sha_E_K", "sha_E_K_source", "k_torsion", "asserted")


def fixture_dir() -> Path:
    """Directory holding curves.jsonl / pairs.jsonl / tate.jsonl."""
    env = os.environ.get(FIXTURE_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("ostrowski") / "data"))


def sha_order(value, notes: list | None = None, what: str = "Sha"):
    """Multiplicative order of a Sha group; a source's 0 (trivial group) becomes 1."""
    if value is None:
        return None
    n = Fraction(str(value))
    if n.denominator != 1 or n < 0:
        raise ValueError(f"{what} = {value!r} is not an order")
    if n == 0:
        if notes is not None:
            notes.append(f"{what} given as 0 (trivial group); stored as order 1")
        return 1
    return int(n)


@dataclass
class CurveRecord:
    label: str
    a_invariants: tuple
    conductor: int
    rank: int
    generators: list
    torsion_structure: list
    sha_analytic: int | None
    local_data: list
    source: str
    retrieved_at: str
    notes: list = field(default_factory=list, compare=False)

    @property
    def curve(self) -> EllipticCurve:
        return EllipticCurve.from_ainvs(self.a_invariants)

    def points(self) -> list[KPoint]:
        E = self.curve
        return [KPoint(E, x, y) for x, y in self.generators]

    def mordell_weil(self, provenance: str | None = None) -> MordellWeilData:
        tors = torsion_subgroup(self.curve)
        return MordellWeilData(
            self.curve, self.rank, self.points(), tors.torsion_generators,
            provenance or self.source,
        )

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "a_invariants": [str(a) for a in self.a_invariants],
            "conductor": self.conductor,
            "rank": self.rank,
            "generators": [[str(x), str(y)] for x, y in self.generators],
            "torsion_structure": list(self.torsion_structure),
            "sha_analytic": self.sha_analytic,
            "local_data": [list(t) for t in self.local_data],
            "source": self.source,
            "retrieved_at": self.retrieved_at,
        }


@dataclass
class TwistPair:
    """Data attached to (E, D) beyond the two curve records."""

    curve: str
    D: int
    twist: str
    sha_E_K: int | None
    sha_E_K_source: str | None
    k_torsion: list  # points of E(K) as [[a, b], [a, b]] for a + b sqrt d
    asserted: dict | None
    notes: list = field(default_factory=list, compare=False)

    @property
    def d(self) -> int:
        return squarefree_part(self.D)[0]

    def k_points(self, E: EllipticCurve) -> list[KPoint]:
        K = make_field(self.d)
        return [KPoint(E, K.elem(*x), K.elem(*y), self.d) for x, y in self.k_torsion]


def _rational(v, line, what) -> Fraction:
    try:
        return Fraction(str(v))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(line, f"{what}: {v!r} is not a rational number") from exc


def _int(v, line, what, allow_none=False):
    if v is None and allow_none:
        return None
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError(line, f"{what}: expected an integer, got {v!r}")
    return v


def _json_lines(path):
    with open(path, encoding="utf-8") as fh:
        for n, raw in enumerate(fh, 1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ParseError(n, f"invalid JSON: {exc.msg}") from exc
            if not isinstance(obj, dict):
                raise ParseError(n, "expected a JSON object")
            yield n, obj


def _require(obj, names, line):
    missing = [k for k in names if k not in obj]
    if missing:
        raise ParseError(line, f"missing field(s) {', '.join(missing)}")


def parse_curve(obj: dict, line: int = 0) -> CurveRecord:
    _require(obj, CURVE_FIELDS, line)
    label = obj["label"]
    ainvs = obj["a_invariants"]
    if not isinstance(ainvs, list) or len(ainvs) != 5:
        raise ParseError(line, "a_invariants must list 5 rationals")
    ainvs = tuple(_rational(a, line, "a_invariants") for a in ainvs)
    gens = []
    for P in obj["generators"]:
        if not isinstance(P, list) or len(P) != 2:
            raise ParseError(line, f"generator {P!r} is not a coordinate pair")
        gens.append((_rational(P[0], line, "generator"), _rational(P[1], line, "generator")))
    local = []
    for t in obj["local_data"]:
        if not isinstance(t, list) or len(t) != 3 or not isinstance(t[1], str):
            raise ParseError(line, f"local_data entry {t!r} is not (p, kodaira, tamagawa)")
        local.append((_int(t[0], line, "local p"), t[1], _int(t[2], line, "tamagawa")))
    notes: list = []
    try:
        sha = sha_order(obj["sha_analytic"], notes, "sha_analytic")
    except ValueError as exc:
        raise ParseError(line, str(exc)) from exc
    tors = obj["torsion_structure"]
    if not isinstance(tors, list):
        raise ParseError(line, "torsion_structure must be a list")
    return CurveRecord(
        label, ainvs, _int(obj["conductor"], line, "conductor"), _int(obj["rank"], line, "rank"),
        gens, [_int(n, line, "torsion") for n in tors], sha, local,
        str(obj["source"]), str(obj["retrieved_at"]), notes,
    )


def validate(rec: CurveRecord, line: int | None = None) -> None:
    """Raise ValidationError unless the record is consistent with its curve."""
    try:
        E = rec.curve
    except ValueError as exc:
        raise ValidationError(rec.label, f"singular model: {exc}", line) from exc
    if rec.rank < 0:
        raise ValidationError(rec.label, "negative rank", line)
    for x, y in rec.generators:
        if not E.on_curve(x, y):
            raise ValidationError(rec.label, f"generator ({x}, {y}) is not on the curve", line)
    have = sorted(n for n in rec.torsion_structure if n > 1)
    computed = sorted(n for n in torsion_subgroup(E).torsion.invariants if n > 1)
    if have != computed:
        raise ValidationError(
            rec.label, f"torsion structure {have} but Lutz-Nagell gives {computed}", line
        )


def load_records(path) -> list[CurveRecord]:
    out, seen = [], {}
    for n, obj in _json_lines(path):
        rec = parse_curve(obj, n)
        validate(rec, n)
        if rec.label in seen:
            raise ValidationError(rec.label, f"duplicate label (first on line {seen[rec.label]})", n)
        seen[rec.label] = n
        out.append(rec)
    return out


def load_pairs(path, curves: dict[str, CurveRecord] | None = None) -> list[TwistPair]:
    out = []
    for n, obj in _json_lines(path):
        _require(obj, PAIR_FIELDS, n)
        notes: list = []
        try:
            shaK = sha_order(obj["sha_E_K"], notes, "sha_E_K")
        except ValueError as exc:
            raise ParseError(n, str(exc)) from exc
        pts = obj["k_torsion"]
        if not isinstance(pts, list):
            raise ParseError(n, "k_torsion must be a list")
        coords = []
        for P in pts:
            try:
                (xa, xb), (ya, yb) = P
            except (TypeError, ValueError) as exc:
                raise ParseError(n, f"k_torsion entry {P!r} is malformed") from exc
            coords.append(tuple(tuple(_rational(v, n, "k_torsion") for v in c) for c in ((xa, xb), (ya, yb))))
        pair = TwistPair(
            str(obj["curve"]), _int(obj["D"], n, "D"), str(obj["twist"]), shaK,
            obj["sha_E_K_source"], coords, obj["asserted"], notes,
        )
        if curves is not None:
            for lab in (pair.curve, pair.twist):
                if lab not in curves:
                    raise ValidationError(pair.curve, f"pair references unknown curve {lab}", n)
            try:
                pair.k_points(curves[pair.curve].curve)
            except ValueError as exc:
                raise ValidationError(pair.curve, f"K-point off the curve: {exc}", n) from exc
        out.append(pair)
    return out


@dataclass
class Fixtures:
    curves: dict[str, CurveRecord]
    pairs: list[TwistPair]

    def by_ainvs(self, ainvs) -> CurveRecord | None:
        key = tuple(Fraction(a) for a in ainvs)
        for rec in self.curves.values():
            if tuple(rec.a_invariants) == key:
                return rec
        return None

    def pair(self, label: str, D: int) -> TwistPair | None:
        for p in self.pairs:
            if p.curve == label and p.D == D:
                return p
        return None


def load_fixtures(directory=None) -> Fixtures:
    root = Path(directory) if directory is not None else fixture_dir()
    curves = {r.label: r for r in load_records(root / "curves.jsonl")}
    pairs_path = root / "pairs.jsonl"
    pairs = load_pairs(pairs_path, curves) if pairs_path.exists() else []
    return Fixtures(curves, pairs)


def load_tate_rows(path=None) -> list[dict]:
    path = Path(path) if path is not None else fixture_dir() / "tate.jsonl"
    rows = []
    for n, obj in _json_lines(path):
        _require(obj, ("label", "a_invariants", "p", "kodaira", "tamagawa"), n)
        obj["a_invariants"] = [_rational(a, n, "a_invariants") for a in obj["a_invariants"]]
        rows.append(obj)
    return rows


# --- reports --------------------------------------------------------------------------


def _kind(report) -> str:
    if isinstance(report, OstcReport):
        return "ostc"
    if isinstance(report, BrzReport):
        return "brz"
    raise TypeError(f"cannot store {type(report).__name__}")


def report_document(report) -> dict:
    kind = _kind(report)
    return {"kind": kind, "report": report.as_dict() if kind == "ostc" else asdict(report)}


def dumps_report(report) -> str:
    """Canonical JSON for a report; equal reports give equal strings."""
    return json.dumps(report_document(report), sort_keys=True, default=str)


def store_report(report, path, recorded_at: str | None = None) -> None:
    doc = report_document(report)
    doc["recorded_at"] = recorded_at or datetime.now(timezone.utc).isoformat(timespec="seconds")
    line = json.dumps(doc, sort_keys=True, default=str)
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(line + "\n")


def _ostc_from(d: dict) -> OstcReport:
    inp = dict(d["inputs"])
    inp.pop("delta", None)
    inp["sha"] = ShaInput(**inp["sha"])
    inp["local"] = [tuple(t) for t in inp["local"]]
    return OstcReport(**{**d, "inputs": OstcInputs(**inp)})


def report_from_document(doc: dict):
    if doc.get("kind") == "ostc":
        return _ostc_from(doc["report"])
    if doc.get("kind") == "brz":
        return BrzReport(**doc["report"])
    raise ValueError(f"unknown report kind {doc.get('kind')!r}")


def load_reports(path) -> list:
    out = []
    for n, doc in _json_lines(path):
        try:
            out.append(report_from_document(doc))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(n, f"not a stored report: {exc}") from exc
    return out


__all__ = [
    "CurveRecord",
    "Fixtures",
    "TwistPair",
    "dumps_report",
    "fixture_dir",
    "load_fixtures",
    "load_pairs",
    "load_records",
    "load_reports",
    "load_tate_rows",
    "sha_order",
    "store_report",
    "validate",
]
