"""Order formulas for E over a quadratic field K = Q(sqrt D), chained into a
verdict on the global-to-local exact sequence and the size of Ost_c(E, K/Q).

Notation: r = rank E(Q), r_D = rank E_D(Q), idx = (E(Q) : N E(K)), h1 = #H^1(G, E(K)),
2^delta = product of the local H^1 orders. Every numeric step is appended to the
derivation with a formula id from ``ANCHORS``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction

from . import localred
from .cohomology import mw_module, tate_cohomology
from .ellcurve import EllipticCurve, MordellWeilData, base_change, norm_index, twist_embed
from .errors import InconsistentRanks, NonIntegralOrder, UnsupportedLocalCase
from .quadfield import field_of_discriminant

YES, NO, UNDETERMINED, INCONSISTENT = "yes", "no", "undetermined", "inconsistent-data"

ANCHORS = {
    "qiu_i": "Qiu (i): #H^1(G,E(K)) = 2^(r_D - r) * idx",
    "qiu_ii1": "Qiu (ii-1): #Sha(E/Q) #Sha(E_D/Q) / #Sha(E/K) = 2^(r_D - r - delta) * idx^2",
    "qiu_ii2": "Qiu (ii-2): product of local #H^1(G_w, E(K_w)) = 2^delta, delta = delta_inf + delta_f",
    "backsolve": "Qiu (ii-1) solved for delta; unresolved local indices take the remainder",
    "t1": "Ker(trans) under exactness: #Sha(E/K) * idx / #Sha(E_D/Q)",
    "t2": "Ker(trans) under exactness: 2^(r + delta - r_D) * #Sha(E/Q) / idx",
    "ker_F": "Ker(F) = Ker(Res~) is a subgroup of Sha(E/Q)",
    "coker_F": "#Coker(F) = 2^delta * #Ker(F) / #H^1(G,E(K))",
    "ker_trans": "Ker(trans) is a subgroup of Sha(E/K)^G",
    "main_seq": "0 -> Ker(trans)/Im(Res~) -> Ost_c -> dual of completed E(Q); #Ost_c = kernel part * image part",
    "yu_bound": "Yu: #Im(I) = #Im(F_0) <= #H^0(G,E(K)) = idx",
    "norm_surjective": "norm map E(K) -> E(Q) surjective (idx = 1) implies exactness",
    "image_zero": "exactness holds iff the image part Im(I) is zero",
    "saturation": "true index bounded by 2^(delta + r - r_D) when H^1 must embed into the local sum",
    "verdict": "verdict from the criteria above",
}


@dataclass
class ShaInput:
    sha_E_F: int | None
    sha_ED_F: int | None
    sha_E_K: int | None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("sha_E_F", "sha_ED_F", "sha_E_K"):
            v = getattr(self, name)
            if v is not None and (int(v) != v or v < 1):
                raise ValueError(f"{name} must be a positive integer, got {v}")

    @property
    def complete(self) -> bool:
        return None not in (self.sha_E_F, self.sha_ED_F, self.sha_E_K)


@dataclass
class OstcInputs:
    """Everything the formula chain consumes; plain data so a report can be replayed."""

    label: str
    D: int
    disc_sign: int
    r_F: int
    r_DF: int
    norm_index: int
    saturation_flag: str
    delta_inf: int
    delta_f: int
    delta_provenance: str
    local: list  # (place, log2 index, provenance)
    sha: ShaInput
    h1_module: int | None = None

    @property
    def delta(self) -> int:
        return self.delta_inf + self.delta_f


@dataclass
class OstcReport:
    inputs: OstcInputs
    h1_global_order: int
    sha_check: str
    ker_trans_order: object  # int, or [lo, hi]
    t1: object
    t2: object
    ecbrz_exact: str
    kernel_part_order: object
    image_part_order: object
    ostc_order: object
    ostc_structure: str
    derivation: list
    warnings: list = field(default_factory=list)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["inputs"]["delta"] = self.inputs.delta
        return d


# --- the individual formulas --------------------------------------------------------


def _log2(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise ValueError(f"{n} is not a power of 2")
    return n.bit_length() - 1


def _pow2(e: int) -> Fraction:
    return Fraction(2) ** e


def h1_global(r_F: int, r_DF: int, idx: int) -> int:
    v = _pow2(r_DF - r_F) * idx
    if v.denominator != 1 or v < 1:
        raise InconsistentRanks(f"2^({r_DF}-{r_F})*{idx} = {v} is not a positive integer")
    return int(v)


def sha_ratio_check(r_F: int, r_DF: int, delta: int, idx: int, sha: ShaInput):
    """('consistent' | 'inconsistent' | 'incomplete', residual lhs/rhs)."""
    rhs = _pow2(r_DF - r_F - delta) * idx * idx
    if not sha.complete:
        return "incomplete", None
    lhs = Fraction(sha.sha_E_F * sha.sha_ED_F, sha.sha_E_K)
    if lhs == rhs:
        return "consistent", Fraction(1)
    return "inconsistent", lhs / rhs


def ker_trans_two_ways(sha: ShaInput, idx: int, r_F: int, r_DF: int, delta: int):
    """(t1, t2): the two expressions for #Ker(trans) valid under exactness; None if unknown."""
    t1 = t2 = None
    if sha.sha_E_K is not None and sha.sha_ED_F is not None:
        t1 = Fraction(sha.sha_E_K * idx, sha.sha_ED_F)
    if sha.sha_E_F is not None:
        t2 = _pow2(r_F + delta - r_DF) * sha.sha_E_F / idx
    for name, t in (("t1", t1), ("t2", t2)):
        if t is not None and t.denominator != 1:
            raise NonIntegralOrder(f"{name} = {t} is not an integer")
    return (None if t1 is None else int(t1)), (None if t2 is None else int(t2))


def exactness_verdict(sha: ShaInput, t1, t2, idx: int, ostc_order=None, kernel_part=None) -> tuple[str, str]:
    """(verdict, reason)."""
    if t1 is not None and t2 is not None and t1 != t2:
        return INCONSISTENT, f"t1 = {t1} and t2 = {t2} differ, so the inputs violate Qiu (ii-1)"
    if idx == 1:
        return YES, "norm map surjective"
    if sha.sha_E_K == 1:
        for name, t in (("t1", t1), ("t2", t2)):
            if t is not None and t != 1:
                return NO, f"Sha(E/K) = 1 forces Ker(trans) = 0, but exactness would give {name} = {t}"
    if ostc_order is not None:
        if ostc_order == 1:
            return YES, "Ost_c = 0, so the image part vanishes"
        if kernel_part is not None and ostc_order > kernel_part:
            return NO, f"#Ost_c = {ostc_order} exceeds the kernel part {kernel_part}"
    return UNDETERMINED, "no criterion applies"


def structure_name(order) -> str:
    if isinstance(order, int):
        if order == 1:
            return "0"
        if order == 2:
            return "Z/2Z"
        return f"order {order}, exponent <= 2"
    lo, hi = order
    if lo == hi:
        return structure_name(lo)
    return f"order in [{lo}, {hi}], exponent <= 2"


# --- input preparation ------------------------------------------------------------------


def back_solve_delta(r_F, r_DF, idx, sha: ShaInput) -> int:
    """delta from Qiu (ii-1) given all three Sha orders."""
    if not sha.complete:
        raise UnsupportedLocalCase("back-solving delta needs all three Sha orders")
    ratio = Fraction(sha.sha_E_F * sha.sha_ED_F, sha.sha_E_K)
    if ratio.denominator != 1 or ratio.numerator & (ratio.numerator - 1):
        raise InconsistentRanks(f"Sha ratio {ratio} is not a power of 2")
    return r_DF - r_F + 2 * _log2(idx) - _log2(ratio.numerator)


def prepare_inputs(
    E: EllipticCurve,
    D: int,
    mw_F: MordellWeilData,
    mw_twist: MordellWeilData,
    sha: ShaInput,
    label: str = "",
    overrides: dict | None = None,
    allow_backsolve: bool = True,
    ranks: tuple[int, int] | None = None,
    extra_points=(),
) -> OstcInputs:
    """Compute idx and delta; fall back to back-solving unsupported local places from (ii-1).

    ``ranks`` replaces the ranks of ``mw_F`` / ``mw_twist`` (e.g. ranks asserted by a
    source when generator data describe a different rank). ``extra_points`` are further
    points of E(K) (e.g. K-rational torsion) added to the subgroup whose norms give idx.
    """
    r_F, r_DF = ranks if ranks is not None else (mw_F.rank, mw_twist.rank)
    ni = norm_index(E, D, mw_F, mw_twist, extra_points=extra_points)
    idx = ni.index
    d_inf = localred.delta_infty(E, D)
    provenance = "table"
    try:
        br = localred.delta(E, D, overrides)
        local = [(p, c, _prov(br, p)) for p, c in br.contributions if p != localred.INF]
        d_f = br.delta_f
    except UnsupportedLocalCase as exc:
        if not allow_backsolve:
            raise
        total = back_solve_delta(r_F, r_DF, idx, sha)
        _, S0 = localred.bad_sets(E, D)
        known, local = 0, []
        for p in S0:
            if p in exc.places:
                continue
            loc = localred.local_norm_index(E, p, D, overrides)
            c = _log2(loc.h1_local_order)
            known += c
            local.append((p, c, loc.index_provenance))
        remainder = total - d_inf - known
        if remainder < 0 or (remainder and len(exc.places) > 1):
            raise UnsupportedLocalCase(
                f"back-solved remainder {remainder} cannot be assigned to {list(exc.places)}",
                exc.places,
            ) from exc
        for i, p in enumerate(exc.places):
            local.append((p, remainder if i == 0 else 0, "back-solved"))
        local.sort()
        d_f = total - d_inf
        provenance = "back-solved"
    h1_mod = _h1_from_module(E, D, mw_F, mw_twist, extra_points)
    return OstcInputs(
        label, D, 1 if E.disc > 0 else -1, r_F, r_DF, idx, ni.saturation_flag,
        d_inf, d_f, provenance, local, sha, h1_mod,
    )


def _prov(br, p):
    for loc in br.places:
        if loc.p == p:
            return loc.index_provenance
    return "table"


def _h1_from_module(E, D, mw_F, mw_twist, extra_points=()) -> int | None:
    """H^1(G, E') of the generated subgroup E', computed from its presentation."""
    d = field_of_discriminant(D).d
    free = [base_change(P, d) for P in mw_F.free_generators]
    free += [twist_embed(P, D, E) for P in mw_twist.free_generators]
    tors = [base_change(P, d) for P in mw_F.torsion_generators]
    tors += [twist_embed(P, D, E) for P in mw_twist.torsion_generators]
    tors += list(extra_points)
    try:
        return tate_cohomology(mw_module(free, tors)).h1_order
    except Exception:
        return None


# --- the chain ----------------------------------------------------------------------------


def ostc_report(inp: OstcInputs) -> OstcReport:
    steps, warnings = [], []
    sha = inp.sha
    r, rD, idx, delta = inp.r_F, inp.r_DF, inp.norm_index, inp.delta

    def step(fid, text):
        steps.append({"formula": fid, "anchor": ANCHORS[fid], "step": text})

    h1 = h1_global(r, rD, idx)
    step("qiu_i", f"2^({rD}-{r}) * {idx} = {h1}")
    if inp.delta_provenance != "table":
        ratio = Fraction(sha.sha_E_F * sha.sha_ED_F, sha.sha_E_K)
        solved = [f"{p}: 2^{c}" for p, c, prov in inp.local if prov == inp.delta_provenance]
        step(
            "backsolve",
            f"delta = {rD}-{r}+2*log2({idx})-log2({ratio}) = {delta}; assigned {', '.join(solved)}",
        )
    step("qiu_ii2", f"delta = {inp.delta_inf} + {inp.delta_f} = {delta} [{inp.delta_provenance}]")
    if inp.h1_module is not None and inp.h1_module != h1:
        warnings.append(
            f"saturation: H^1 of the generated subgroup is {inp.h1_module}, formula gives {h1}"
        )

    status, residual = sha_ratio_check(r, rD, delta, idx, sha)
    if inp.delta_provenance != "table" and status == "consistent":
        status = "consistent (by construction: delta back-solved)"
    rhs = _pow2(rD - r - delta) * idx * idx
    if sha.complete:
        step("qiu_ii1", f"{sha.sha_E_F}*{sha.sha_ED_F}/{sha.sha_E_K} vs {rhs}: {status}")
    else:
        implied = []
        if sha.sha_E_F is not None and sha.sha_ED_F is not None:
            v = Fraction(sha.sha_E_F * sha.sha_ED_F) / rhs
            implied.append(f"Sha(E/K) = {v}")
        step("qiu_ii1", f"rhs = {rhs}; Sha data incomplete" + (f", implies {implied[0]}" if implied else ""))

    # Ker(F) and Coker(F)
    ker_F = 1 if sha.sha_E_F == 1 else None
    coker = None
    if ker_F is not None:
        step("ker_F", "Sha(E/Q) = 1 so Ker(F) = 0")
        if h1 > 2**delta:
            # H^1 injects into the local sum; the generated-subgroup index must be too large
            bound = _pow2(delta + r - rD)
            warnings.append(f"saturation: H^1 = {h1} exceeds 2^delta = {2**delta}; true idx <= {bound}")
            step("saturation", f"idx <= 2^({delta}+{r}-{rD}) = {bound}")
            if bound.denominator != 1:
                raise InconsistentRanks("no index is compatible with the given ranks and delta")
            idx = int(bound)
            h1 = h1_global(r, rD, idx)
            step("qiu_i", f"with idx = {idx}: 2^({rD}-{r}) * {idx} = {h1}")
        c = Fraction(2**delta * ker_F, h1)
        if c.denominator != 1:
            raise NonIntegralOrder(f"#Coker(F) = {c} is not an integer")
        coker = int(c)
        step("coker_F", f"2^{delta} * 1 / {h1} = {coker}")

    try:
        t1, t2 = ker_trans_two_ways(sha, idx, r, rD, delta)
    except NonIntegralOrder as exc:
        t1 = t2 = None
        warnings.append(str(exc))
    if t1 is not None:
        step("t1", f"{sha.sha_E_K} * {idx} / {sha.sha_ED_F} = {t1}")
    if t2 is not None:
        step("t2", f"2^({r}+{delta}-{rD}) * {sha.sha_E_F} / {idx} = {t2}")

    # Ker(trans) and the kernel part Ker(trans)/Im(Res~)
    if sha.sha_E_K == 1:
        ker_trans = 1
        step("ker_trans", "Sha(E/K) = 1 so Ker(trans) = 0")
    elif sha.sha_E_K is not None:
        ker_trans = [1, sha.sha_E_K]
    else:
        ker_trans = None
    kernel_part = 1 if ker_trans == 1 else None
    if kernel_part is None and ker_F is not None and sha.sha_E_F == 1 and isinstance(ker_trans, int):
        kernel_part = ker_trans

    verdict, reason = exactness_verdict(sha, t1, t2, idx, coker, kernel_part)
    if verdict == YES and idx == 1:
        step("norm_surjective", "idx = 1")
    step("verdict", f"{verdict}: {reason}")

    # image part and Ost_c
    if verdict == YES:
        image_part = 1
        step("image_zero", "Im(I) = 0")
        if coker is not None:
            kernel_part = coker
        elif t1 is not None:
            kernel_part = t1
    elif coker is not None and kernel_part is not None:
        image_part = coker // kernel_part
    else:
        image_part = [1, idx] if verdict != NO else [2, idx]
        step("yu_bound", f"#Im(I) <= {idx}")
    if isinstance(image_part, int) and image_part > idx:
        warnings.append(f"image part {image_part} exceeds the bound idx = {idx}")

    if coker is not None:
        ostc = coker
    elif isinstance(kernel_part, int) and isinstance(image_part, int):
        ostc = kernel_part * image_part
    else:
        klo, khi = (kernel_part, kernel_part) if isinstance(kernel_part, int) else (1, None)
        ilo, ihi = image_part if isinstance(image_part, list) else (image_part, image_part)
        ostc = [klo * ilo, None if khi is None else khi * ihi]
    if isinstance(ostc, int):
        step("main_seq", f"#Ost_c = {kernel_part} * {image_part} = {ostc}")
    else:
        step("main_seq", f"#Ost_c in [{ostc[0]}, {ostc[1]}]")
    if isinstance(ostc, list) and ostc[1] is None:
        structure = f"order >= {ostc[0]}, exponent <= 2"
    else:
        structure = structure_name(ostc)

    return OstcReport(
        inp, h1, status, ker_trans, t1, t2, verdict, kernel_part, image_part, ostc,
        structure, steps, warnings,
    )


def replay(report: OstcReport) -> bool:
    """Re-run the chain from the recorded inputs and compare derivations."""
    again = ostc_report(report.inputs)
    return again.derivation == report.derivation and again.ecbrz_exact == report.ecbrz_exact
