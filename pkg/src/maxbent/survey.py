"""Classification of x^(2^r) Tr^n_m(L(x)) over all normalized linearized permutations L.

Each member's spectra are computed through H(x) = x^(2^r) L(x) on GF(2^m), batched with
numpy.  A deterministic sample is re-checked on the full GF(2^n) function.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .certify import CertReport, certify_profile
from .differential import render_coset_counts
from .family import FamilyProfile, batch_signatures, build, profile_direct, profile_via_H, verify_walsh_reduction
from .field import TowerCtx, make_tower
from .linpoly import LinearizedPoly, gl_order, iter_normalized_permutation_blocks
from .walsh import ConsistencyError, render_spectrum

log = logging.getLogger(__name__)

# Published tables, as (walsh levels, {s: off-subfield count}, member count).
# the m = 5 category 8 row prints its {0, 2} entry without a count; None marks that gap.
REFERENCE_TABLES: dict[int, list[tuple[dict[int, int], dict[int, Optional[int]], int]]] = {
    4: [
        ({4: 10, 6: 5}, {1: 240}, 2),
        ({4: 8, 6: 7}, {1: 192, 2: 48}, 180),
        ({4: 6, 6: 9}, {1: 144, 2: 96}, 750),
        ({4: 12, 6: 2, 8: 1}, {1: 192, 2: 48}, 15),
        ({4: 8, 6: 6, 8: 1}, {1: 96, 2: 144}, 280),
        ({4: 12, 8: 3}, {2: 240}, 11),
        ({6: 14, 8: 1}, {1: 128, 3: 112}, 105),
        ({8: 15}, {4: 240}, 1),
    ],
    5: [
        ({6: 31}, {1: 992}, 4),
        ({6: 29, 8: 2}, {1: 800, 2: 192}, 4650),
        ({6: 28, 8: 3}, {1: 704, 2: 288}, 43400),
        ({6: 27, 8: 4}, {1: 608, 2: 384}, 116000),
        ({6: 26, 8: 5}, {1: 512, 2: 480}, 77748),
        ({6: 25, 8: 6}, {1: 416, 2: 576}, 28210),
        ({6: 24, 8: 7}, {1: 768, 3: 224}, 2170),
        ({6: 30, 10: 1}, {1: None, 4: 240}, 4092),
        ({6: 24, 8: 6, 10: 1}, {1: 384, 2: 384, 3: 224}, 9300),
        ({8: 30, 10: 1}, {1: 512, 4: 480}, 465),
        ({8: 9, 10: 22}, {1: 576, 2: 192, 3: 224}, 40920),
        ({10: 31}, {5: 992}, 1),
    ],
}


@dataclass
class SurveyConfig:
    m: int
    r: int = 1
    normalization: str = "monic"
    base_modulus: Optional[int] = None
    ext_modulus: Optional[int] = None
    workers: int = 1
    witnesses: int = 4
    revalidate_rate: float = 0.01
    seed: int = 0
    block: Optional[int] = None        # members per batch; default keeps batches near 32 MB
    out: Optional[str] = None
    fmt: str = "text"

    def __post_init__(self):
        if not 2 <= self.m <= 6:
            raise ValueError("full enumeration supports 2 <= m <= 6")
        if self.normalization != "monic":
            raise ValueError("only monic normalization is implemented")
        if not 0 <= self.revalidate_rate <= 1:
            raise ValueError("revalidation rate must be in [0, 1]")


@dataclass
class Category:
    walsh: tuple[tuple[int, int], ...]         # F plateau level -> multiplicity
    diff: tuple[tuple[int, int], ...]          # (2^s, number of a outside the subfield)
    members: int
    witnesses: list[tuple[int, ...]] = field(default_factory=list)
    by_top: dict[int, int] = field(default_factory=dict)   # top index of L -> count
    index: int = 0
    ref_cat: Optional[int] = None
    ref_count: Optional[int] = None
    profile: Optional[FamilyProfile] = None
    certs: list[CertReport] = field(default_factory=list)

    @property
    def max_level(self) -> int:
        return max((lvl for lvl, _ in self.walsh), default=0)

    def walsh_text(self) -> str:
        return render_spectrum(dict(self.walsh))

    def diff_text(self) -> str:
        return ", ".join(f"{{0, {d}}}_{c}" for d, c in self.diff)


@dataclass
class SurveyResult:
    config: SurveyConfig
    tower: TowerCtx
    categories: list[Category]
    total: int
    revalidated: int
    revalidation_failures: list[str]

    @property
    def expected_total(self) -> int:
        return gl_order(self.config.m) // ((1 << self.config.m) - 1)


# --- batched profile computation ----------------------------------------------

def _survey_block(args):
    coeffs, r, m, base_mod, ext_mod = args
    tower = make_tower(m, base_mod, ext_mod)
    lvl, s = batch_signatures(coeffs, r, tower.base)
    return lvl, s


def _signature_from_hist(m: int, lvl_row, s_row):
    walsh = []
    for i, c in enumerate(lvl_row):
        if c:
            walsh.append((m + i, int(c)))
    diff = tuple((1 << i, int(c) << m) for i, c in enumerate(s_row) if c)
    return tuple(walsh), diff


def _top_index(row) -> int:
    nz = np.nonzero(row)[0]
    return int(nz[-1]) if nz.size else -1


def category_sort_key(cat: Category, m: int):
    # max level first; within it, more weight on lower levels comes first
    top = cat.max_level
    vec = [dict(cat.walsh).get(i, 0) for i in range(m, top + 1)]
    return (top, [-c for c in vec], cat.diff)


def match_reference(categories: list[Category], m: int) -> None:
    table = REFERENCE_TABLES.get(m)
    if not table:
        return
    for cat in categories:
        for no, (walsh, diff, count) in enumerate(table, start=1):
            if dict(cat.walsh) != walsh:
                continue
            ours = {int(np.log2(d)): c for d, c in cat.diff}
            if set(ours) != set(diff):
                continue
            if all(v is None or ours[s] == v for s, v in diff.items()):
                cat.ref_cat, cat.ref_count = no, count


def reference_discrepancies(result: SurveyResult) -> list[str]:
    """Human-readable differences between the survey and the published table."""
    m = result.config.m
    table = REFERENCE_TABLES.get(m)
    if not table or result.config.r != 1:
        return []
    out = []
    matched = {c.ref_cat for c in result.categories if c.ref_cat}
    for no, (walsh, diff, count) in enumerate(table, start=1):
        if no not in matched:
            out.append(f"published category {no} {render_spectrum(walsh)} has no exact match")
        if any(v is None for v in diff.values()):
            out.append(f"published category {no} prints a differential entry without a count")
    for c in result.categories:
        if c.ref_cat is None:
            out.append(f"category {c.index} {c.walsh_text()} {c.diff_text()} is not in the published table")
        elif c.ref_count != c.members:
            out.append(f"category {c.index} (published {c.ref_cat}): count {c.members} vs published "
                       f"{c.ref_count} (delta {c.members - c.ref_count:+d})")
    ref_total = sum(cnt for _, _, cnt in table)
    if ref_total != result.total:
        out.append(f"total {result.total} vs published {ref_total} (delta {result.total - ref_total:+d})")
    return out


def _revalidation_sample(total: int, rate: float, seed: int) -> set[int]:
    if rate <= 0 or total == 0:
        return set()
    size = max(1, int(round(total * rate)))
    rng = np.random.default_rng(seed)
    return set(rng.choice(total, size=min(size, total), replace=False).tolist())


def revalidate(fm, predicted: FamilyProfile) -> Optional[str]:
    """Recompute the member directly on GF(2^n); returns a failure message or None."""
    try:
        verify_walsh_reduction(fm)
        direct = profile_direct(fm)
    except ConsistencyError as exc:
        return f"{fm.describe()}: {exc}"
    if (direct.bent_count, direct.levels, direct.A) != (predicted.bent_count, predicted.levels, predicted.A):
        return f"{fm.describe()}: direct {direct.levels}/{direct.A} vs reduced {predicted.levels}/{predicted.A}"
    return None


def run_survey(cfg: SurveyConfig) -> SurveyResult:
    tower = make_tower(cfg.m, cfg.base_modulus, cfg.ext_modulus)
    base = tower.base
    r = cfg.r % cfg.m
    size = cfg.block or max(256, 1 << (22 - 2 * cfg.m))
    blocks = []
    for blk in iter_normalized_permutation_blocks(cfg.m, base):
        for lo in range(0, blk.shape[0], size):
            blocks.append(blk[lo:lo + size])
    total = sum(b.shape[0] for b in blocks)
    log.info("m=%d r=%d: %d normalized permutations in %d blocks", cfg.m, r, total, len(blocks))

    jobs = [(b, r, cfg.m, base.modulus, tower.ext.modulus) for b in blocks]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as ex:
            results = list(ex.map(_survey_block, jobs))
    else:
        results = [_survey_block(j) for j in jobs]

    cats: dict[tuple, Category] = {}
    offset = 0
    for b, (lvl, s) in zip(blocks, results):
        keys = np.concatenate([lvl, s], axis=1)
        uniq, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
        inverse = inverse.ravel()
        tops = np.array([_top_index(row) for row in b])
        for u, row in enumerate(uniq):
            sig = _signature_from_hist(cfg.m, row[:cfg.m + 1], row[cfg.m + 1:])
            idx = np.nonzero(inverse == u)[0]
            cat = cats.get(sig)
            if cat is None:
                cat = cats[sig] = Category(sig[0], sig[1], 0)
            cat.members += idx.size
            for t_idx, c in zip(*np.unique(tops[idx], return_counts=True)):
                cat.by_top[int(t_idx)] = cat.by_top.get(int(t_idx), 0) + int(c)
            room = cfg.witnesses - len(cat.witnesses)
            for i in idx[:max(room, 0)]:
                cat.witnesses.append(tuple(int(c) for c in b[i]))
        offset += b.shape[0]

    categories = sorted(cats.values(), key=lambda c: category_sort_key(c, cfg.m))
    for i, cat in enumerate(categories, start=1):
        cat.index = i
        cat.by_top = dict(sorted(cat.by_top.items()))
        # one representative profile per category; certifiers read it
        fm = build(r, LinearizedPoly(cfg.m, cat.witnesses[0]), tower)
        prof = profile_via_H(fm)
        if (prof.walsh_signature(), prof.diff_signature()) != (cat.walsh, cat.diff):
            raise ConsistencyError(f"batched and scalar profiles disagree for {fm.describe()}")
        cat.profile = prof
        cat.certs = certify_profile(prof, by_top=cat.by_top, members=cat.members)
    match_reference(categories, cfg.m)

    # deterministic sample re-checked on the full function
    sample = _revalidation_sample(total, cfg.revalidate_rate, cfg.seed)
    failures = []
    if sample:
        flat = np.concatenate(blocks)
        for i in sorted(sample):
            lam = LinearizedPoly(cfg.m, tuple(int(c) for c in flat[i]))
            fm = build(r, lam, tower)
            err = revalidate(fm, profile_via_H(fm))
            if err:
                failures.append(err)
        log.info("revalidated %d members, %d failures", len(sample), len(failures))

    if sum(c.members for c in categories) != total:
        raise ConsistencyError("category counts do not add up")
    return SurveyResult(cfg, tower, categories, total, len(sample), failures)


def category_certs(result: SurveyResult) -> list[CertReport]:
    return [c for cat in result.categories for c in cat.certs]


def violated(result: SurveyResult) -> list[CertReport]:
    return [c for c in category_certs(result) if c.verdict == "violated"]


def witness_text(result: SurveyResult, coeffs: tuple[int, ...]) -> str:
    lam = LinearizedPoly(result.config.m, coeffs)
    return f"r={result.config.r % result.config.m};L={lam.render(result.tower.base)}"


def report_header(result: SurveyResult) -> dict:
    t = result.tower
    return {
        "tool": "maxbent",
        "version": __version__,
        "m": t.m,
        "n": t.n,
        "r": result.config.r % t.m,
        "r_requested": result.config.r,
        "normalization": result.config.normalization,
        "base_field": {"degree": t.m, "modulus": t.base.modulus, "modulus_hex": hex(t.base.modulus),
                       "generator": t.base.generator},
        "ext_field": {"degree": t.n, "modulus": t.ext.modulus, "modulus_hex": hex(t.ext.modulus),
                      "generator": t.ext.generator},
        "embedding_root": t.root,
        "r_convention": "r reduced mod m (x^(2^(r+m)) Tr(L) is the 2^m-th power of x^(2^r) Tr(L))",
    }


def render_coset_text(cat: Category) -> str:
    return render_coset_counts({int(np.log2(d)): c for d, c in cat.diff})


# --- reports -------------------------------------------------------------------

def survey_csv(result: SurveyResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, quoting=csv.QUOTE_NONNUMERIC, lineterminator="\n")
    w.writerow(["category", "walsh", "differential", "count", "witness"])
    for c in result.categories:
        w.writerow([c.index, c.walsh_text(), c.diff_text(), c.members, witness_text(result, c.witnesses[0])])
    return buf.getvalue()


def _profile_dict(p: FamilyProfile) -> dict:
    return {
        "bent_count": p.bent_count,
        "levels": {str(k): v for k, v in sorted(p.levels.items())},
        "exponents": {str(k): v for k, v in sorted(p.A.items())},
        "H_bent": p.H_bent,
        "H_levels": {str(k): v for k, v in sorted(p.H_levels.items())},
        "H_uniformity": p.H_uniformity,
        "plateaued": p.plateaued,
    }


def survey_dict(result: SurveyResult) -> dict:
    m = result.config.m
    cats = []
    for c in result.categories:
        cats.append({
            "category": c.index,
            "walsh": c.walsh_text(),
            "differential": c.diff_text(),
            "walsh_levels": {str(lvl): cnt for lvl, cnt in c.walsh},
            "off_subfield": {str(d): cnt for d, cnt in c.diff},
            "subfield_row": {"delta": 1 << m, "count": (1 << m) - 1},
            "count": c.members,
            "members_by_top_index": {str(t): cnt for t, cnt in c.by_top.items()},
            "witnesses": [witness_text(result, w) for w in c.witnesses],
            "witness_coeffs": [list(w) for w in c.witnesses],
            "published_category": c.ref_cat,
            "published_count": c.ref_count,
            "profile": _profile_dict(c.profile) if c.profile else None,
            "certificates": [r.to_dict() for r in c.certs],
        })
    table = REFERENCE_TABLES.get(m) if result.config.r % m == 1 else None
    return {
        "header": report_header(result),
        "total": result.total,
        "published_total": sum(cnt for _, _, cnt in table) if table else None,
        "categories": cats,
        "discrepancies": reference_discrepancies(result),
        "revalidation": {"rate": result.config.revalidate_rate, "seed": result.config.seed,
                         "checked": result.revalidated, "failures": result.revalidation_failures},
        "violated": len(violated(result)),
    }


def survey_json(result: SurveyResult) -> str:
    return json.dumps(survey_dict(result), indent=2, sort_keys=True) + "\n"


def survey_text(result: SurveyResult) -> str:
    t = result.tower
    h = report_header(result)
    lines = [
        f"m={t.m} n={t.n} r={h['r']} (requested {h['r_requested']}), {h['normalization']} normalization",
        f"GF(2^{t.m}) modulus {hex(t.base.modulus)} generator {t.base.generator}; "
        f"GF(2^{t.n}) modulus {hex(t.ext.modulus)} generator {t.ext.generator}; embedding root {t.root}",
        "",
    ]
    rows = [("Cat.", "Walsh spectrum", "Differential spectrum", "#", "published", "witness")]
    for c in result.categories:
        pub = f"{c.ref_cat}:{c.ref_count}" if c.ref_cat else "-"
        rows.append((str(c.index), c.walsh_text(), c.diff_text(), str(c.members), pub,
                     witness_text(result, c.witnesses[0])))
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    for r in rows:
        lines.append("  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip())
    lines.append("")
    lines.append(f"total {result.total} (|GL({t.m},2)|/(2^{t.m}-1) = {result.expected_total})")
    lines.append(f"revalidated {result.revalidated} members on GF(2^{t.n}), "
                 f"{len(result.revalidation_failures)} failures")
    for msg in result.revalidation_failures:
        lines.append(f"  FAIL {msg}")
    disc = reference_discrepancies(result)
    if disc:
        lines.append("differences from the published table:")
        lines.extend(f"  {d}" for d in disc)
    verdicts: dict[str, int] = {}
    for rep in category_certs(result):
        verdicts[rep.verdict] = verdicts.get(rep.verdict, 0) + 1
    lines.append("certificates: " + ", ".join(f"{k} {v}" for k, v in sorted(verdicts.items())))
    for rep in violated(result):
        lines.append(f"  VIOLATED {rep.line()}")
    return "\n".join(lines) + "\n"


RENDERERS = {"csv": survey_csv, "json": survey_json, "text": survey_text}


def emit_reports(result: SurveyResult, outdir: str) -> list[str]:
    """Write CSV, JSON and text reports into ``outdir``; returns the paths."""
    stem = f"survey_m{result.config.m}_r{result.config.r % result.config.m}"
    paths = []
    try:
        os.makedirs(outdir, exist_ok=True)
        for ext, fmt in (("csv", "csv"), ("json", "json"), ("txt", "text")):
            path = os.path.join(outdir, f"{stem}.{ext}")
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(RENDERERS[fmt](result))
            paths.append(path)
    except OSError as exc:
        raise OSError(f"cannot write reports to {outdir}: {exc}") from exc
    return paths
