"""Command line front-end: ``maxbent <command> [options]``.

Exit status: 0 on success, 1 if any certificate is violated (or a scan finds a
counterexample), 2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time

from . import __version__
from .certify import (
    CertReport, VIOLATED, certify_profile, check_allbest, check_cor1_bounds, check_prop3,
    dump_json, dump_log, verify_named_examples,
)
from .differential import diff_profile
from .family import (
    binomial_scan, build, monomial_scan, profile_direct, profile_via_H, verify_diff_reduction,
    verify_walsh_reduction,
)
from .field import make_tower
from .linpoly import is_permutation, parse_lambda
from .survey import RENDERERS, SurveyConfig, emit_reports, run_survey, violated
from .walsh import ConsistencyError, render_spectrum, spectrum_profile

OK, FAIL, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _int(text: str) -> int:
    return int(text, 0)


def read_config(path: str) -> dict[str, str]:
    """``key=value`` lines; ``#`` starts a comment.  Keys use flag spelling (dashes or underscores)."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for no, line in enumerate(fh, start=1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{no}: expected key=value")
                k, v = line.split("=", 1)
                out[k.strip().replace("-", "_")] = v.strip()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    return out


def _common(p: argparse.ArgumentParser, m_default=None):
    p.add_argument("--m", type=int, default=m_default, help="half dimension, n = 2m")
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--modulus", type=_int, default=None, help="GF(2^m) modulus bitmask, e.g. 0x13")
    p.add_argument("--ext-modulus", type=_int, default=None, help="GF(2^n) modulus bitmask")
    p.add_argument("--out", default=None, help="directory (survey) or file for the report")
    p.add_argument("--format", choices=("csv", "json", "text"), default="text")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=0, help="seed for sampled revalidation")
    p.add_argument("--config", default=None, help="key=value file; flags override it")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="maxbent", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"maxbent {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("survey", help="classify every normalized linearized permutation L")
    _common(p, 4)
    p.add_argument("--witnesses", type=int, default=4)
    p.add_argument("--revalidate", type=float, default=0.01, help="fraction re-checked on GF(2^n)")

    p = sub.add_parser("certify", help="run the certifiers over a survey or one member")
    _common(p, 4)
    p.add_argument("--lambda", dest="lam", default=None)
    p.add_argument("--gamma", type=_int, default=None, help="element read as g in --lambda")
    p.add_argument("--revalidate", type=float, default=0.0)

    p = sub.add_parser("member", help="analyse one (r, L)")
    _common(p, 4)
    p.add_argument("--lambda", dest="lam", required=True,
                   help='coeff:index terms, e.g. "g^52:5,0x1f:3,1:0"')
    p.add_argument("--gamma", type=_int, default=None,
                   help="element read as g in --lambda (default: the field generator)")
    p.add_argument("--fast", action="store_true", help="skip the direct GF(2^n) computation")

    p = sub.add_parser("monomial-scan", help="bent-component counts of x^d on GF(2^n)")
    _common(p)
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("examples", help="gamma search for the worked m = 6 examples")
    _common(p)

    p = sub.add_parser("bino", help="L = x^(2^3r) + beta x^(2^r) for every beta, m = 2 mod 4")
    _common(p, 6)
    p.add_argument("--direct", action="store_true", help="profile on GF(2^n) instead of via H")
    return ap


def parse(argv) -> argparse.Namespace:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.config:
        conf = read_config(args.config)
        sub = ap._subparsers._group_actions[0].choices[args.command]
        known = {a.dest: a for a in sub._actions}
        defaults = {}
        for k, v in conf.items():
            if k not in known or k in ("config", "help"):
                raise UsageError(f"unknown config key {k!r} for {args.command}")
            act = known[k]
            if act.type is not None:
                try:
                    v = act.type(v)
                except ValueError as exc:
                    raise UsageError(f"bad value for {k}: {v!r}") from exc
            elif isinstance(act, argparse._StoreTrueAction):
                v = v.lower() in ("1", "true", "yes", "on")
            defaults[k] = v
        sub.set_defaults(**defaults)
        args = ap.parse_args(argv)
    return args


def _write(text: str, path):
    if path:
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc}") from exc
    else:
        sys.stdout.write(text)


def _tower(args):
    if args.m is None:
        raise UsageError("--m is required")
    try:
        return make_tower(args.m, args.modulus, args.ext_modulus)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _survey_config(args, rate) -> SurveyConfig:
    try:
        return SurveyConfig(m=args.m, r=args.r, base_modulus=args.modulus, ext_modulus=args.ext_modulus,
                            workers=args.workers, witnesses=getattr(args, "witnesses", 4),
                            revalidate_rate=rate, seed=args.seed, out=args.out, fmt=args.format)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_survey(args) -> int:
    cfg = _survey_config(args, args.revalidate)
    _tower(args)
    t0 = time.perf_counter()
    result = run_survey(cfg)
    logging.getLogger(__name__).info("survey took %.1f s", time.perf_counter() - t0)
    if args.out:
        for path in emit_reports(result, args.out):
            print(path, file=sys.stderr)
    sys.stdout.write(RENDERERS[args.format](result))
    return FAIL if violated(result) or result.revalidation_failures else OK


def _render_reports(reports: list[CertReport], fmt: str, extra: dict | None = None) -> str:
    if fmt == "json":
        if extra is None:
            return dump_json(reports) + "\n"
        return json.dumps({**extra, "certificates": [r.to_dict() for r in reports]},
                          indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, quoting=csv.QUOTE_NONNUMERIC, lineterminator="\n")
        w.writerow(["claim", "instance", "lhs", "rhs", "verdict", "notes"])
        for r in reports:
            w.writerow([r.claim, r.instance, r.lhs or "", r.rhs or "", r.verdict, "; ".join(r.notes)])
        return buf.getvalue()
    head = ""
    if extra:
        head = "".join(f"{k}: {v}\n" for k, v in extra.items())
    return head + dump_log(reports)


def _member(args):
    t = _tower(args)
    gamma = args.gamma
    if gamma is not None and not 0 < gamma < t.base.size:
        raise UsageError(f"gamma {gamma} is not a nonzero element of GF(2^{t.m})")
    try:
        lam = parse_lambda(args.lam, t.base, gamma)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return build(args.r, lam, t)


def _non_permutation_report(fm):
    """L is not a permutation: F is not max-bent; give the plain spectra of F and the general checks."""
    prof = spectrum_profile(fm.F, fm.tower.ext)
    dp = diff_profile(fm.F)
    extra = {
        "member": fm.describe(),
        "note": "L is not a permutation, so F does not have the maximal number of bent components",
        "bent_count": prof.bent_count,
        "walsh": render_spectrum(prof.levels) + (f" irregular {prof.irregular}" if prof.irregular else ""),
        "differential_uniformity": dp.uniformity,
    }
    reports = [check_prop3(prof, dp.uniformity, fm.describe()),
               check_cor1_bounds(prof, dp.uniformity, fm.describe())]
    return reports, extra


def _member_reports(fm, direct: bool):
    if not is_permutation(fm.lam, fm.tower.base):
        return _non_permutation_report(fm)
    fast = profile_via_H(fm)
    prof = fast
    reports = []
    extra = {
        "member": fm.describe(),
        "walsh": render_spectrum(fast.levels),
        "differential": ", ".join(f"{{0, {d}}}_{c}" for d, c in fast.diff_signature()),
        "H_bent": fast.H_bent,
        "H_levels": render_spectrum(fast.H_levels),
        "H_uniformity": fast.H_uniformity,
    }
    if direct:
        prof = profile_direct(fm)
        walsh_rep = verify_walsh_reduction(fm, strict=False)
        diff_rep = verify_diff_reduction(fm, strict=False)
        for rep in (walsh_rep, diff_rep):
            reports.append(CertReport(rep.claim, rep.member, str(rep.mismatches), "0",
                                      "holds" if rep.ok else VIOLATED, rep.notes + [f"{rep.checked} points"]))
        if (prof.levels, prof.A) != (fast.levels, fast.A):
            reports.append(CertReport("direct-vs-H", fm.describe(), verdict=VIOLATED,
                                      notes=[f"direct {prof.levels}/{prof.A}"]))
    reports.extend(certify_profile(prof, by_top={fm.lam.top_index: 1}))
    return reports, extra


def cmd_member(args) -> int:
    fm = _member(args)
    reports, extra = _member_reports(fm, not args.fast)
    _write(_render_reports(reports, args.format, extra), args.out)
    return FAIL if any(r.failed for r in reports) else OK


def cmd_certify(args) -> int:
    if args.lam:
        fm = _member(args)
        reports, extra = _member_reports(fm, True)
    else:
        cfg = _survey_config(args, args.revalidate)
        result = run_survey(cfg)
        reports = [c for cat in result.categories for c in cat.certs]
        if args.m <= 5:
            reports.append(check_allbest(args.m, base=result.tower.base))
        extra = {"survey": f"m={args.m};r={args.r % args.m}", "members": result.total}
        if result.revalidation_failures:
            reports.append(CertReport("revalidation", extra["survey"], verdict=VIOLATED,
                                      notes=result.revalidation_failures))
    _write(_render_reports(reports, args.format, extra), args.out)
    return FAIL if any(r.failed for r in reports) else OK


def cmd_monomial(args) -> int:
    try:
        scan = monomial_scan(args.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    m = args.n // 2
    if args.format == "json":
        text = json.dumps({"n": scan.n, "attaining": scan.attaining, "violations": scan.violations,
                           "orbit_mismatches": scan.orbit_mismatches,
                           "target": (1 << args.n) - (1 << m)}, indent=2, sort_keys=True) + "\n"
    elif args.format == "csv":
        text = "d,t,bent_count\n" + "".join(
            f"{d},{d // ((1 << m) + 1)},{scan.bent_counts[d]}\n" for d in scan.attaining)
    else:
        text = (f"n={args.n}: {len(scan.attaining)} exponents with {(1 << args.n) - (1 << m)} bent components\n"
                f"d: {' '.join(map(str, scan.attaining))}\n"
                f"not of the form t(2^{m}+1), gcd(t, 2^{m}-1)=1: {scan.violations or 'none'}\n")
    _write(text, args.out)
    return OK if scan.ok else FAIL


def cmd_examples(args) -> int:
    moduli = [args.modulus] if args.modulus else None
    reports = verify_named_examples(moduli)
    _write(_render_reports(reports, args.format), args.out)
    return FAIL if any(r.failed for r in reports) else OK


def cmd_bino(args) -> int:
    t = _tower(args)
    if args.m % 4 != 2:
        raise UsageError("the binomial construction needs m = 2 mod 4")
    rows = binomial_scan(args.m, args.r % args.m, t, direct=args.direct)
    reports = []
    for beta, prof in rows:
        inst = f"m={args.m};r={args.r % args.m};beta=g^{t.base.dlog(beta)}"
        if prof is None:
            reports.append(CertReport("bino", inst, verdict="not applicable",
                                      notes=[f"beta is a (2^{2 * args.r}-1)-th power, rejected"]))
            continue
        expect_levels = {args.m + 2: (1 << args.m) - 1}
        ok = (prof.bent_count == (1 << (2 * args.m)) - (1 << args.m) and prof.levels == expect_levels
              and set(prof.A) == {2})
        reports.append(CertReport("bino", inst, render_spectrum(prof.levels),
                                  render_spectrum(expect_levels), "holds" if ok else VIOLATED,
                                  [f"exponents {prof.A}"]))
    _write(_render_reports(reports, args.format), args.out)
    return FAIL if any(r.failed for r in reports) else OK


COMMANDS = {
    "survey": cmd_survey, "certify": cmd_certify, "member": cmd_member,
    "monomial-scan": cmd_monomial, "examples": cmd_examples, "bino": cmd_bino,
}


def cli(argv=None) -> int:
    try:
        args = parse(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE
    except UsageError as exc:
        print(f"maxbent: {exc}", file=sys.stderr)
        return USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"maxbent: {exc}", file=sys.stderr)
        return USAGE
    except OSError as exc:
        print(f"maxbent: {exc}", file=sys.stderr)
        return USAGE
    except ConsistencyError as exc:
        print(f"maxbent: internal consistency check failed: {exc}", file=sys.stderr)
        return FAIL


def main():
    sys.exit(cli())
