"""The family F(x) = x^(2^r) Tr^n_m(L(x)) on GF(2^n) and its shadow H(x) = x^(2^r) L(x) on GF(2^m)."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

import numpy as np

from .differential import coset_profile, diff_profile, kernel_exponents
from .field import FieldCtx, TowerCtx, make_field, make_tower
from .linpoly import LinearizedPoly, eval_table, is_permutation
from .walsh import (
    BoolFn,
    ConsistencyError,
    VectorialFn,
    component_tables,
    component_walsh_stats,
    spectrum_profile,
    fwht,
    walsh_naive,
    walsh_rows,
)


class ReductionMismatch(ConsistencyError):
    pass


@dataclass(frozen=True, eq=False)
class FamilyMember:
    r: int
    lam: LinearizedPoly
    tower: TowerCtx
    F: VectorialFn
    H: VectorialFn
    r_requested: int | None = None

    @property
    def m(self) -> int:
        return self.tower.m

    @property
    def n(self) -> int:
        return self.tower.n

    def describe(self) -> str:
        return f"r={self.r};L={self.lam.render(self.tower.base)}"

    @property
    def deg_H(self) -> int:
        """Polynomial degree of x^(2^r) L(x)."""
        t = self.lam.top_index
        return 0 if t < 0 else (1 << self.r) + (1 << t)


def build(r: int, lam: LinearizedPoly, t: TowerCtx) -> FamilyMember:
    """Materialise F and H.  r is reduced mod m: x^(2^(r+m)) Tr(L(x)) is the 2^m-th power of
    x^(2^r) Tr(L(x)), so the reduced member is linear-equivalent."""
    if lam.m != t.m:
        raise ValueError("polynomial degree does not match the tower")
    if r < 0:
        raise ValueError("r must be non-negative")
    m = t.m
    rr = r % m
    ext, base = t.ext, t.base
    x = ext.elements()
    lam_x = eval_table(lam, t)
    F = ext.mul_vec(ext.frob_vec(x, rr), t.rel_trace_vec(lam_x))
    y = base.elements()
    H = base.mul_vec(base.frob_vec(y, rr), eval_table(lam, base))
    return FamilyMember(rr, lam, t, VectorialFn(t.n, F), VectorialFn(m, H),
                        r_requested=None if r == rr else r)


@dataclass
class FamilyProfile:
    """Walsh/differential summary of a family member."""

    m: int
    r: int
    coeffs: tuple[int, ...]
    bent_count: int                  # |S_0| of F
    levels: dict[int, int]           # F plateau level -> |S_i|, i >= 1
    A: dict[int, int]                # s -> |A_s|
    deg_H: int
    H_bent: int
    H_levels: dict[int, int]
    H_uniformity: int                # 2^sigma; counts over the whole of H's derivative rows
    plateaued: bool = True

    @property
    def n(self) -> int:
        return 2 * self.m

    @property
    def max_level(self) -> int:
        return max(self.levels, default=0)

    @property
    def sigma(self) -> int:
        return max(self.A, default=0)

    def walsh_signature(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.levels.items()))

    def diff_signature(self) -> tuple[tuple[int, int], ...]:
        """(2^s, number of off-subfield a) pairs."""
        return tuple((1 << s, c << self.m) for s, c in sorted(self.A.items()))

    def level_count(self, i: int) -> int:
        return self.bent_count if i == 0 else self.levels.get(i, 0)


def profile_via_H(fm: FamilyMember) -> FamilyProfile:
    """Spectra of F predicted from H: bent off the subfield, level m + i where H has level i,
    and off-subfield exponent s = dim ker of H's derivative at z = Tr(a)."""
    m = fm.m
    base = fm.tower.base
    if not is_permutation(fm.lam, base):
        raise ValueError(f"{fm.describe()}: L is not a permutation, the reductions do not apply")
    hprof = spectrum_profile(fm.H, base)
    levels = {m + i: c for i, c in hprof.levels.items()}
    if hprof.bent_count:
        levels[m] = levels.get(m, 0) + hprof.bent_count
    s = kernel_exponents(fm.H)
    A: dict[int, int] = {}
    for v in s[1:].tolist():
        A[v] = A.get(v, 0) + 1
    return FamilyProfile(
        m, fm.r, fm.lam.coeffs, (1 << fm.n) - (1 << m), dict(sorted(levels.items())),
        dict(sorted(A.items())), fm.deg_H, hprof.bent_count, hprof.levels,
        1 << max(A), hprof.all_plateaued)


def profile_direct(fm: FamilyMember) -> FamilyProfile:
    """Same summary computed on F over GF(2^n) without using the reductions."""
    ext = fm.tower.ext
    prof = spectrum_profile(fm.F, ext)
    cp = coset_profile(fm.F, fm.tower, diff_profile(fm.F).row_exponent)
    hprof = spectrum_profile(fm.H, fm.tower.base)
    A = cp.A
    return FamilyProfile(
        fm.m, fm.r, fm.lam.coeffs, prof.bent_count, dict(sorted(prof.levels.items())),
        A, fm.deg_H, hprof.bent_count, hprof.levels, 1 << max(A), prof.all_plateaued)


def batch_signatures(coeffs: np.ndarray, r: int, base: FieldCtx) -> tuple[np.ndarray, np.ndarray]:
    """For each row of L coefficients: histogram of H's component levels (index i = H level,
    bent at 0) and histogram of derivative kernel dimensions s over z != 0."""
    m, q = base.k, base.size
    x = base.elements()
    lam = np.zeros((coeffs.shape[0], q), dtype=np.int64)
    for i in range(m):
        lam ^= base.mul_vec(coeffs[:, i:i + 1], base.frob_vec(x, i)[None, :])
    H = base.mul_vec(base.frob_vec(x, r)[None, :], lam)

    v = np.arange(1, q)
    comp = base.trace_table[base.mul_vec(v[None, :, None], H[:, None, :])]
    w = np.abs(fwht(1 - 2 * comp.astype(np.int32)))
    mx = w.max(axis=2)
    if not np.all((w == 0) | (w == mx[:, :, None])):
        raise ConsistencyError("quadratic H has a non-plateaued component")
    e = np.log2(mx).astype(np.int64)
    if np.any((1 << e) != mx):
        raise ConsistencyError("max |W| is not a power of two")
    lvl = 2 * e - m
    lvl_hist = np.stack([(lvl == i).sum(axis=1) for i in range(m + 1)], axis=1)

    z = v
    d = (H[:, x[None, :] ^ z[:, None]] ^ H[:, None, :] ^ H[:, z][:, :, None] ^ H[:, :1][:, :, None])
    cnt = (d == 0).sum(axis=2)
    s = np.log2(cnt).astype(np.int64)
    if np.any((1 << s) != cnt):
        raise ConsistencyError("derivative kernel of H is not a subspace")
    s_hist = np.stack([(s == i).sum(axis=1) for i in range(m + 1)], axis=1)
    return lvl_hist, s_hist


@dataclass
class ReductionReport:
    claim: str
    member: str
    checked: int
    mismatches: int
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.mismatches == 0


def walsh_F_subfield(fm: FamilyMember, method: str = "fwht") -> np.ndarray:
    """W_F(alpha, beta) for alpha in GF(2^m)^* (rows, base encoding order) and all beta."""
    t = fm.tower
    alphas = t.embed[1:]
    if method == "naive":
        return np.array([walsh_naive(BoolFn(t.n, component_tables(fm.F, [a], t.ext)[0]), t.ext)
                         for a in alphas])
    return walsh_rows(component_tables(fm.F, alphas, t.ext), t.ext)


def walsh_H(fm: FamilyMember, method: str = "fwht") -> np.ndarray:
    base = fm.tower.base
    alphas = np.arange(1, base.size)
    if method == "naive":
        return np.array([walsh_naive(BoolFn(base.k, component_tables(fm.H, [a], base)[0]), base)
                         for a in alphas])
    return walsh_rows(component_tables(fm.H, alphas, base), base)


def verify_walsh_reduction(fm: FamilyMember, method: str = "fwht", strict: bool = True) -> ReductionReport:
    """W_F(a, b) = 2^m W_H(a, b) for b in the subfield and 0 otherwise, a in GF(2^m)^*."""
    t = fm.tower
    wf = walsh_F_subfield(fm, method)
    wh = walsh_H(fm, method)
    expected = np.zeros_like(wf)
    expected[:, t.embed] = wh << t.m
    bad = int(np.count_nonzero(wf != expected))
    rep = ReductionReport("walsh-reduction", fm.describe(), wf.size, bad)
    if strict and bad:
        raise ReductionMismatch(f"Walsh reduction fails for {fm.describe()} at {bad} points")
    return rep


def verify_diff_reduction(fm: FamilyMember, strict: bool = True) -> ReductionReport:
    """Per-coset exponent of F (counted directly) equals the exponent of delta_H(z, .)."""
    t = fm.tower
    try:
        cp = coset_profile(fm.F, t)
    except ConsistencyError as exc:
        if strict:
            raise
        return ReductionReport("diff-reduction", fm.describe(), 0, 1, [str(exc)])
    # delta_H(z, .) counted directly, independent of the kernel shortcut
    hrows = diff_profile(fm.H).row_exponent
    bad = sum(1 for z, s in cp.exponent.items() if hrows[z] != s)
    rep = ReductionReport("diff-reduction", fm.describe(), len(cp.exponent), bad)
    if strict and bad:
        raise ReductionMismatch(f"differential reduction fails for {fm.describe()} on {bad} cosets")
    return rep


def gold_walsh_spectrum(m: int, r: int) -> set[int]:
    """Predicted W_F(alpha, beta) values of x^(2^r) Tr^n_m(x), alpha in GF(2^m)^*."""
    n = 2 * m
    d = gcd(m, r)
    if (m // d) % 2:
        e = n + m + d
        if e % 2:
            raise ValueError("odd exponent")
        return {0, 1 << (e // 2), -(1 << (e // 2))}
    lo, hi = (n + m) // 2, (n + m + 2 * d) // 2
    return {0, 1 << lo, -(1 << lo), 1 << hi, -(1 << hi)}


def is_power_residue(ctx: FieldCtx, beta: int, e: int) -> bool:
    """Is beta in the image of x -> x^e?"""
    if beta == 0:
        return True
    return ctx.dlog(beta) % gcd(e, ctx.order) == 0


def binomial_lambda(m: int, r: int, beta: int) -> LinearizedPoly:
    return LinearizedPoly.from_terms(m, {3 * r: 1, r: beta})


def binomial_member(m: int, r: int, beta: int, t: TowerCtx) -> FamilyMember:
    """L(x) = x^(2^3r) + beta x^(2^r) with m = 2 mod 4 and beta not a (2^2r - 1)-th power."""
    if m % 4 != 2:
        raise ValueError("binomial construction needs m = 2 mod 4")
    if is_power_residue(t.base, beta, (1 << (2 * r)) - 1):
        raise ValueError(f"beta={beta} is a (2^{2 * r}-1)-th power; L is not a permutation")
    lam = binomial_lambda(m, r, beta)
    if not is_permutation(lam, t.base):
        raise ConsistencyError("binomial L unexpectedly not a permutation")
    return build(r, lam, t)


def maiorana_mcfarland(base: FieldCtx) -> VectorialFn:
    """(y, z) -> y z, a vectorial bent map GF(2^m)^2 -> GF(2^m); x = y + 2^m z."""
    m = base.k
    x = np.arange(1 << (2 * m))
    y, z = x & ((1 << m) - 1), x >> m
    return VectorialFn(2 * m, base.mul_vec(y, z))


def trivial_extension(bentF: VectorialFn, affines: list[BoolFn]) -> VectorialFn:
    """Stack affine coordinates above an m-bit vectorial bent map: (f_1..f_m, a_1..a_k)."""
    n = bentF.k
    m = n // 2
    if len(affines) > m:
        raise ValueError("at most m affine coordinates")
    table = bentF.table.copy()
    for i, a in enumerate(affines):
        if a.k != n:
            raise ValueError("affine coordinate has wrong dimension")
        table |= a.tt.astype(np.int64) << (m + i)
    return VectorialFn(n, table)


def affine_boolfn(k: int, mask: int, const: int = 0) -> BoolFn:
    x = np.arange(1 << k)
    bits = np.zeros(1 << k, dtype=np.int64)
    for i in range(k):
        if (mask >> i) & 1:
            bits ^= (x >> i) & 1
    return BoolFn(k, bits ^ const)


@dataclass
class MonomialScan:
    n: int
    bent_counts: dict[int, int]
    attaining: list[int]
    violations: list[int]          # attaining d not of the form t(2^m+1), gcd(t, 2^m-1) = 1
    orbit_mismatches: list[int]    # d whose count is not a multiple of |Im(x^d)^*|

    @property
    def ok(self) -> bool:
        return not self.violations and not self.orbit_mismatches


def monomial_condition(n: int, d: int) -> bool:
    m = n // 2
    q = (1 << m) + 1
    return d % q == 0 and gcd(d // q, (1 << m) - 1) == 1


def monomial_scan(n: int, ctx: FieldCtx | None = None) -> MonomialScan:
    if n % 2 or n > 12:
        raise ValueError("n must be even and at most 12")
    ctx = ctx or make_field(n)
    m = n // 2
    target = (1 << n) - (1 << m)
    bent_max = 1 << m
    x = ctx.elements()
    counts: dict[int, int] = {}
    orbit_bad = []
    for d in range(1, (1 << n) - 1):
        F = VectorialFn(n, ctx.pow_vec(x, d))
        maxabs, _ = component_walsh_stats(F, ctx)
        c = int(np.count_nonzero(maxabs == bent_max))
        counts[d] = c
        if c % (ctx.order // gcd(ctx.order, d)):
            orbit_bad.append(d)
    attaining = [d for d, c in counts.items() if c == target]
    viol = [d for d in attaining if not monomial_condition(n, d)]
    return MonomialScan(n, counts, attaining, viol, orbit_bad)


def binomial_scan(m: int, r: int, t: TowerCtx | None = None, direct: bool = False):
    """Every beta != 0: (beta, None) when rejected as a power residue, else (beta, profile)."""
    t = t or make_tower(m)
    out = []
    for beta in range(1, t.base.size):
        try:
            fm = binomial_member(m, r, beta, t)
        except ValueError:
            out.append((beta, None))
            continue
        out.append((beta, profile_direct(fm) if direct else profile_via_H(fm)))
    return out
