"""Flag maps on P^n(F_q) and the exhaustive sweeps built on them.

A map is a flag map when some full chain of nested subspaces exists on
whose difference strata the map is constant (values may repeat across
non-adjacent strata; the constant map is a flag map through any chain).
The line criterion - constant off at most one point on every line - is
checked independently, and the sweeps compare the two verdicts over
entire map spaces rather than assuming the equivalence.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import fqlin
from .errors import InvalidInput, SizeBound
from .ff import FiniteField
from .projspace import ProjGeometry, geometry


@dataclass(frozen=True)
class FlagVerdict:
    """Either an accepted stratum chain or a violation report.

    chain: strata (point, line minus point, ..., complement) as point
    index tuples.  witness_line is a line on which the map takes two or
    more values off every single point; when the chain search fails but
    every line is fine individually, witness_line is None and note says
    so (the two criteria genuinely diverge on such maps).
    """

    is_flag: bool
    chain: tuple[tuple[int, ...], ...] | None = None
    witness_line: tuple[int, ...] | None = None
    note: str = ""


def _constant_on(values, stratum) -> bool:
    first = values[stratum[0]]
    return all(values[i] == first for i in stratum[1:])


def is_flag_map(geom: ProjGeometry, values) -> FlagVerdict:
    """Decide the flag property by exhaustive chain search."""
    if len(values) != len(geom.points):
        raise InvalidInput("value list does not match the point count")
    for chain in geom.chains:
        if all(_constant_on(values, s) for s in chain):
            return FlagVerdict(True, chain=chain)
    bad = line_criterion_witness(geom, values)
    if bad is not None:
        return FlagVerdict(False, witness_line=bad)
    return FlagVerdict(
        False, note="line criterion holds but no stratum chain exists"
    )


def _line_ok(values, line) -> bool:
    # constant off at most one point
    for skip in range(len(line)):
        rest = [values[p] for i, p in enumerate(line) if i != skip]
        if all(v == rest[0] for v in rest[1:]):
            return True
    return False


def line_criterion(geom: ProjGeometry, values) -> bool:
    return line_criterion_witness(geom, values) is None


def line_criterion_witness(geom: ProjGeometry, values):
    """First line (in canonical order) violating constant-off-one-point."""
    if geom.n == 1:
        lines = [tuple(range(len(geom.points)))]
    else:
        lines = geom.lines
    for line in lines:
        if not _line_ok(values, line):
            return line
    return None


def is_flag_subset(geom: ProjGeometry, subset: frozenset[int]) -> bool:
    values = [1 if i in subset else 0 for i in range(len(geom.points))]
    return is_flag_map(geom, values).is_flag


# -- Example census ---------------------------------------------------

FAMILIES = (
    "point",
    "line",
    "punctured-line",
    "plane-minus-point",
    "plane-minus-line",
    "plane-minus-punctured-line",
)


def subset_family(geom: ProjGeometry, s: frozenset[int]) -> str | None:
    """Which of the six structural families a subset of P^2 belongs to."""
    npts = len(geom.points)
    q = geom.q
    lines = [frozenset(L) for L in geom.lines]
    comp = frozenset(range(npts)) - s
    if len(s) == 1:
        return "point"
    if s in lines:
        return "line"
    if len(s) == q and any(s < L for L in lines):
        return "punctured-line"
    if len(comp) == 1:
        return "plane-minus-point"
    if comp in lines:
        return "plane-minus-line"
    if len(comp) == q and any(comp < L for L in lines):
        return "plane-minus-punctured-line"
    return None


@dataclass
class FlagCensus:
    q: int
    counts: dict[str, int]
    total: int
    mismatches: list  # subsets where flag verdict and family disagree


def classify_flag_subsets(q: int) -> FlagCensus:
    """Exhaustive census of nonempty proper flag subsets of P^2(F_q).

    Every subset is judged twice: by chain search on its characteristic
    function and by structural shape; the two must agree.
    """
    geom = geometry(2, q)
    npts = len(geom.points)
    if npts > 16:
        raise SizeBound(f"2^{npts} subsets is beyond the census window")
    counts = {f: 0 for f in FAMILIES}
    mismatches = []
    for code in range(1, (1 << npts) - 1):
        s = frozenset(i for i in range(npts) if code >> i & 1)
        fam = subset_family(geom, s)
        flag = is_flag_subset(geom, s)
        if flag != (fam is not None):
            mismatches.append((sorted(s), fam, flag))
        if fam is not None:
            counts[fam] += 1
    return FlagCensus(q, counts, sum(counts.values()), mismatches)


def flag_subset_table(q: int) -> set[frozenset[int]]:
    """All nonempty proper flag subsets, as a lookup set."""
    geom = geometry(2, q)
    npts = len(geom.points)
    out = set()
    for code in range(1, (1 << npts) - 1):
        s = frozenset(i for i in range(npts) if code >> i & 1)
        if is_flag_subset(geom, s):
            out.add(s)
    return out


# -- decomposition lemma ----------------------------------------------


@dataclass(frozen=True)
class LemmaVerdict:
    kind: str  # "holds" | "hypothesis-fails" | "counterexample-candidate"
    flag_parts: tuple[int, ...] = ()       # indices among all parts
    flag_parts_rest: tuple[int, ...] = ()  # indices excluding the distinguished part
    witness_line: tuple[int, ...] | None = None


def check_decomposition_lemma(
    geom: ProjGeometry,
    parts: list[frozenset[int]],
    flag_table: set[frozenset[int]] | None = None,
) -> LemmaVerdict:
    """Check one partition (distinguished part first) of P^2(F_q).

    Hypothesis: every line lies in parts[0] with a single other part,
    or avoids parts[0] entirely.  When it holds, every part is tested
    for flaghood; both the any-part and the non-distinguished statistics
    are reported since the source statement is ambiguous about S_1.
    """
    npts = len(geom.points)
    if any(not p for p in parts) or len(parts) < 3:
        raise InvalidInput("need >= 3 nonempty parts")
    union = set()
    total = 0
    for p in parts:
        union |= p
        total += len(p)
    if union != set(range(npts)) or total != npts:
        raise InvalidInput("parts must partition the point set")
    for line in geom.lines:
        lset = set(line)
        if not (lset & parts[0]):
            continue
        if not any(lset <= (parts[0] | parts[j]) for j in range(1, len(parts))):
            return LemmaVerdict("hypothesis-fails", witness_line=line)

    def flag(p: frozenset[int]) -> bool:
        if flag_table is not None:
            return p in flag_table
        return is_flag_subset(geom, p)

    flag_parts = tuple(k for k, p in enumerate(parts) if flag(p))
    rest = tuple(k for k in flag_parts if k != 0)
    if flag_parts:
        return LemmaVerdict("holds", flag_parts=flag_parts, flag_parts_rest=rest)
    return LemmaVerdict("counterexample-candidate")


def set_partitions(n: int):
    """All set partitions of range(n) via restricted growth strings."""
    rgs = [0] * n

    def rec(i: int, top: int):
        if i == n:
            blocks: list[list[int]] = [[] for _ in range(top + 1)]
            for j, b in enumerate(rgs):
                blocks[b].append(j)
            yield [frozenset(b) for b in blocks]
            return
        for b in range(top + 2):
            rgs[i] = b
            yield from rec(i + 1, max(top, b))

    yield from rec(1, 0)


def sweep_decomposition_lemma(q: int = 2) -> dict:
    """Exhaustive sweep over all >=3-part colorings of P^2(F_q).

    Each set partition is examined once per choice of distinguished
    part.  Counterexample candidates (no flag part at all) are the
    violations; partitions where only the distinguished part is flag
    are tallied separately as the strict-reading statistic.
    """
    geom = geometry(2, q)
    npts = len(geom.points)
    if npts != 7:
        raise SizeBound("the exhaustive lemma sweep is sized for q = 2")
    table = flag_subset_table(q)
    cases = 0
    hypothesis_held = 0
    holds = 0
    strict_gap = 0  # hypothesis held, flag part exists, but none among the S_j
    candidates = []
    for blocks in set_partitions(npts):
        if len(blocks) < 3:
            continue
        for s1 in range(len(blocks)):
            parts = [blocks[s1]] + [b for k, b in enumerate(blocks) if k != s1]
            cases += 1
            v = check_decomposition_lemma(geom, parts, table)
            if v.kind == "hypothesis-fails":
                continue
            hypothesis_held += 1
            if v.kind == "holds":
                holds += 1
                if not v.flag_parts_rest:
                    strict_gap += 1
            else:
                candidates.append([sorted(p) for p in parts])
    return {
        "cases_total": cases,
        "hypothesis_held": hypothesis_held,
        "holds": holds,
        "strict_gap": strict_gap,
        "counterexample_candidates": candidates,
    }


# -- two-character model ----------------------------------------------


@dataclass(frozen=True)
class StarMap:
    """Map P^2(F_p) -> R x R given pointwise, R = Z/modulus."""

    p: int
    modulus: int
    pairs: tuple[tuple[int, int], ...]


def star_condition(m: StarMap, with_witness: bool = False):
    """True when every line's image lies on an affine line over R.

    Equivalent to every (value, value, 1) row matrix having rank <= 2
    over F_modulus; any nonzero kernel vector then has a nonzero linear
    part automatically, so no separate nontriviality check is needed.
    """
    geom = geometry(2, m.p)
    R = FiniteField(m.modulus)
    if len(m.pairs) != len(geom.points):
        raise InvalidInput("pair list does not match the point count")
    for line in geom.lines:
        rows = [[m.pairs[i][0] % m.modulus, m.pairs[i][1] % m.modulus, 1] for i in line]
        if fqlin.rank(R, rows) > 2:
            return (False, line) if with_witness else False
    return (True, None) if with_witness else True


@dataclass
class CollineationReport:
    p: int
    mode: str
    maps_examined: int
    star_maps: int
    max_image_size: int
    image_size_counts: dict[int, int]
    image_size_violations: list  # maps with (*) and image size > 3
    no_flag_combo_maps: int
    first_no_flag_combo: list | None  # explicit witness map (value per point)
    flag_combo_violations: list  # p > 2 only: (*) maps without any flag combination
    non_flag_star_maps: int  # (*) maps not globally flag despite being flag on lines
    first_non_flag_star: list | None  # the p = 2 model-failure exhibit


def _chain_masks(geom: ProjGeometry) -> list[list[int]]:
    out = []
    for chain in geom.chains:
        masks = []
        for stratum in chain:
            msk = 0
            for i in stratum:
                msk |= 1 << i
            masks.append(msk)
        out.append(masks)
    return out


def _is_flag_f2(chain_masks: list[list[int]], ones_mask: int) -> bool:
    for masks in chain_masks:
        if all((ones_mask & s) == 0 or (ones_mask & s) == s for s in masks):
            return True
    return False


def _is_flag_pair(chain_masks: list[list[int]], m1: int, m2: int) -> bool:
    # flag as a map into the 4-element target: both bits constant per stratum
    for masks in chain_masks:
        if all(
            ((m1 & s) == 0 or (m1 & s) == s) and ((m2 & s) == 0 or (m2 & s) == s)
            for s in masks
        ):
            return True
    return False


def _greedy_point_order(geom: ProjGeometry) -> tuple[list[int], list[list[int]]]:
    """Point order that completes lines early, plus per-position lists of
    lines whose last point sits at that position."""
    lines = [tuple(L) for L in geom.lines]
    remaining = {i: set(L) for i, L in enumerate(lines)}
    unplaced = set(range(len(geom.points)))
    order: list[int] = []
    completed_at: list[list[int]] = []
    done: set[int] = set()
    while unplaced:
        best = min(
            unplaced,
            key=lambda pt: (
                -sum(1 for i, r in remaining.items() if i not in done and r == {pt}),
                min((len(r) for i, r in remaining.items() if i not in done and pt in r), default=99),
                pt,
            ),
        )
        order.append(best)
        unplaced.discard(best)
        newly = []
        for i, r in remaining.items():
            if i in done:
                continue
            r.discard(best)
            if not r:
                newly.append(i)
                done.add(i)
        completed_at.append(newly)
    return order, completed_at


def collineation_analyze(
    p: int, mode: str = "exhaustive", samples: int = 0, seed: int | None = None
) -> CollineationReport:
    """Sweep maps P^2(F_p) -> A^2(F_2) for the (*) line condition.

    Exhaustive for p in {2, 3} (4^7 and 4^13 maps, pruned on the first
    line with three distinct image points).  For every (*) map the
    image size and the existence of a flag F_2-combination of the two
    coordinate maps are recorded.
    """
    geom = geometry(2, p)
    npts = len(geom.points)
    cmasks = _chain_masks(geom)
    lines = [tuple(L) for L in geom.lines]

    star_values: "list[list[int]]" = []
    examined = 0

    if mode == "exhaustive":
        if p not in (2, 3):
            raise SizeBound("exhaustive collineation sweep supports p in {2, 3}")
        order, completed_at = _greedy_point_order(geom)
        vals = [0] * npts
        line_pts = [tuple(L) for L in lines]

        def dfs(pos: int):
            nonlocal examined
            if pos == npts:
                examined += 1
                star_values.append(list(vals))
                return
            pt = order[pos]
            for v in range(4):
                vals[pt] = v
                ok = True
                for li in completed_at[pos]:
                    seen = 0
                    for q_ in line_pts[li]:
                        seen |= 1 << vals[q_]
                    if bin(seen).count("1") > 2:
                        ok = False
                        break
                if ok:
                    dfs(pos + 1)
            vals[pt] = 0

        dfs(0)
        star_count = len(star_values)
        maps_examined = 4**npts
    elif mode == "sampled":
        if seed is None:
            raise InvalidInput("sampled mode requires a seed")
        rng = np.random.Generator(np.random.PCG64(seed))
        maps_examined = samples
        for _ in range(samples):
            vals = [int(v) for v in rng.integers(0, 4, npts)]
            ok = True
            for L in lines:
                seen = 0
                for q_ in L:
                    seen |= 1 << vals[q_]
                if bin(seen).count("1") > 2:
                    ok = False
                    break
            if ok:
                star_values.append(vals)
        star_count = len(star_values)
    else:
        raise InvalidInput(f"unknown mode {mode!r}")

    image_size_counts: dict[int, int] = {}
    image_viol = []
    no_combo = 0
    first_no_combo = None
    combo_viol = []
    non_flag_star = 0
    first_non_flag = None
    for vals in star_values:
        img = len(set(vals))
        image_size_counts[img] = image_size_counts.get(img, 0) + 1
        if img > 3:
            image_viol.append(list(vals))
        m1 = 0
        m2 = 0
        for i, v in enumerate(vals):
            if v & 1:
                m1 |= 1 << i
            if v >> 1 & 1:
                m2 |= 1 << i
        has_combo = (
            _is_flag_f2(cmasks, m1)
            or _is_flag_f2(cmasks, m2)
            or _is_flag_f2(cmasks, m1 ^ m2)
        )
        if not has_combo:
            no_combo += 1
            if first_no_combo is None:
                first_no_combo = list(vals)
            if p != 2:
                combo_viol.append(list(vals))
        if not _is_flag_pair(cmasks, m1, m2):
            non_flag_star += 1
            if first_non_flag is None:
                first_non_flag = list(vals)
    return CollineationReport(
        p=p,
        mode=mode,
        maps_examined=maps_examined,
        star_maps=star_count,
        max_image_size=max(image_size_counts, default=0),
        image_size_counts=image_size_counts,
        image_size_violations=image_viol,
        no_flag_combo_maps=no_combo,
        first_no_flag_combo=first_no_combo,
        flag_combo_violations=combo_viol,
        non_flag_star_maps=non_flag_star,
        first_non_flag_star=first_non_flag,
    )


# -- bulk equivalence sweeps ------------------------------------------


def _line_ok_bulk(geom: ProjGeometry, vals: np.ndarray) -> np.ndarray:
    """Per-row line criterion over a (rows, points) value matrix."""
    ok = np.ones(len(vals), dtype=bool)
    for line in geom.lines:
        line_any = np.zeros(len(vals), dtype=bool)
        for skip in range(len(line)):
            rest = [p for i, p in enumerate(line) if i != skip]
            eq = np.ones(len(vals), dtype=bool)
            for a, b in zip(rest, rest[1:]):
                eq &= vals[:, a] == vals[:, b]
            line_any |= eq
        ok &= line_any
    return ok


def _chain_flag_bulk(geom: ProjGeometry, vals: np.ndarray) -> np.ndarray:
    """Per-row chain-flag verdict over a (rows, points) value matrix."""
    flag = np.zeros(len(vals), dtype=bool)
    for chain in geom.chains:
        this = np.ones(len(vals), dtype=bool)
        for stratum in chain:
            for a, b in zip(stratum, stratum[1:]):
                this &= vals[:, a] == vals[:, b]
        flag |= this
    return flag


def prop_equivalence_exhaustive_q2() -> dict:
    """All 3^7 maps P^2(F_2) -> {0,1,2}: chain verdict vs line criterion."""
    geom = geometry(2, 2)
    n = len(geom.points)
    total = 3**n
    codes = np.arange(total)
    vals = np.empty((total, n), dtype=np.int8)
    for i in range(n):
        vals[:, i] = codes % 3
        codes = codes // 3
    line_ok = _line_ok_bulk(geom, vals)
    chain_ok = _chain_flag_bulk(geom, vals)
    mism = np.nonzero(line_ok != chain_ok)[0]
    witnesses = [[int(x) for x in vals[i]] for i in mism[:5]]
    return {
        "cases_total": total,
        "line_ok": int(line_ok.sum()),
        "chain_flag": int(chain_ok.sum()),
        "mismatches": int(len(mism)),
        "mismatch_direction_line_only": int((line_ok & ~chain_ok).sum()),
        "mismatch_direction_chain_only": int((chain_ok & ~line_ok).sum()),
        "witnesses": witnesses,
    }


def prop_equivalence_random(n: int, q: int, count: int, seed: int) -> dict:
    """Random maps P^n(F_q) -> {0,1,2}: chain verdict vs line criterion."""
    geom = geometry(n, q)
    rng = np.random.Generator(np.random.PCG64(seed))
    vals = rng.integers(0, 3, size=(count, len(geom.points)), dtype=np.int8)
    line_ok = _line_ok_bulk(geom, vals)
    chain_ok = _chain_flag_bulk(geom, vals)
    mism = np.nonzero(line_ok != chain_ok)[0]
    witnesses = [[int(x) for x in vals[i]] for i in mism[:5]]
    return {
        "cases_total": count,
        "line_ok": int(line_ok.sum()),
        "chain_flag": int(chain_ok.sum()),
        "mismatches": int(len(mism)),
        "mismatch_direction_line_only": int((line_ok & ~chain_ok).sum()),
        "mismatch_direction_chain_only": int((chain_ok & ~line_ok).sum()),
        "witnesses": witnesses,
    }
