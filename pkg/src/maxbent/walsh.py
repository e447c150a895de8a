"""Walsh spectra, plateau levels, nonlinearity and the bent-component census.

Inner products: when a :class:`FieldCtx` is supplied, <u, x> = Tr(u x); otherwise the
plain dot product of bit vectors is used (handy for multivariate fixtures).  All
arithmetic is exact integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .field import FieldCtx


class ConsistencyError(AssertionError):
    """An internal mathematical invariant failed; indicates a bug, not bad input."""


@dataclass(frozen=True, eq=False)
class BoolFn:
    k: int
    tt: np.ndarray

    def __post_init__(self):
        tt = np.asarray(self.tt, dtype=np.uint8)
        if tt.shape != (1 << self.k,):
            raise ValueError(f"truth table must have length 2^{self.k}")
        object.__setattr__(self, "tt", tt)


@dataclass(frozen=True, eq=False)
class VectorialFn:
    k: int
    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.int64)
        if t.shape != (1 << self.k,):
            raise ValueError(f"value table must have length 2^{self.k}")
        object.__setattr__(self, "table", t)

    @classmethod
    def from_callable(cls, k: int, fn) -> "VectorialFn":
        return cls(k, np.array([fn(x) for x in range(1 << k)], dtype=np.int64))


@dataclass
class SpectrumProfile:
    k: int
    bent_count: int
    levels: dict[int, int]
    max_abs_walsh: int
    all_plateaued: bool
    # components whose max |W| is not a power of two, keyed by that max
    irregular: dict[int, int] = field(default_factory=dict)

    def signature(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.levels.items()))

    @property
    def max_level(self) -> int:
        return max(self.levels, default=0)

    def level_count(self, i: int) -> int:
        return self.bent_count if i == 0 else self.levels.get(i, 0)


def fwht(values: np.ndarray) -> np.ndarray:
    """Unnormalised Walsh-Hadamard transform along the last axis (dot-product indexing)."""
    values = np.asarray(values)
    n = values.shape[-1]
    if n & (n - 1):
        raise ValueError("length must be a power of two")
    # |W| <= n, so int32 is exact for every supported dimension
    a = np.array(values, dtype=np.int32 if n <= 1 << 30 else np.int64, copy=True)
    lead = a.shape[:-1]
    h = 1
    while h < n:
        v = a.reshape(*lead, n // (2 * h), 2, h)
        x, y = v[..., 0, :], v[..., 1, :]
        tmp = x.copy()
        x += y
        tmp -= y
        y[...] = tmp
        h *= 2
    return a.astype(np.int64)


def signs(tt) -> np.ndarray:
    return 1 - 2 * np.asarray(tt, dtype=np.int64)


def walsh_rows(tts: np.ndarray, ctx: FieldCtx | None = None) -> np.ndarray:
    """Walsh transforms of a stack of truth tables (last axis = x)."""
    w = fwht(signs(tts))
    if ctx is not None:
        w = w[..., ctx.dual]
    return w


def walsh_all(f: BoolFn, ctx: FieldCtx | None = None) -> np.ndarray:
    """W_f(u) for every u."""
    return walsh_rows(f.tt, ctx)


def walsh_naive(f: BoolFn, ctx: FieldCtx | None = None) -> np.ndarray:
    q = 1 << f.k
    x = np.arange(q)
    out = np.zeros(q, dtype=np.int64)
    for u in range(q):
        if ctx is not None:
            ip = ctx.trace_vec(ctx.mul_vec(u, x))
        else:
            ip = np.array([bin(u & v).count("1") & 1 for v in range(q)])
        out[u] = int(np.sum(1 - 2 * ((f.tt.astype(np.int64) + ip) & 1)))
    return out


def component(F: VectorialFn, v: int, ctx: FieldCtx | None = None) -> BoolFn:
    """x -> <v, F(x)>.  The zero component is rejected."""
    if v == 0:
        raise ValueError("the zero component is excluded")
    return BoolFn(F.k, component_tables(F, np.array([v]), ctx)[0])


def component_tables(F: VectorialFn, vs, ctx: FieldCtx | None = None) -> np.ndarray:
    vs = np.asarray(vs, dtype=np.int64)
    if ctx is not None:
        prod = ctx.mul_vec(vs[:, None], F.table[None, :])
        return ctx.trace_table[prod]
    return _parity(vs[:, None] & F.table[None, :]).astype(np.uint8)


def _parity(a: np.ndarray) -> np.ndarray:
    a = a.copy()
    shift = 32
    while shift:
        a ^= a >> shift
        shift >>= 1
    return a & 1


def _exact_log2(v: int) -> int | None:
    if v > 0 and v & (v - 1) == 0:
        return v.bit_length() - 1
    return None


def level_from_max(max_abs: int, k: int) -> int | None:
    """Plateau level i with max|W| = 2^((k+i)/2), or None when max|W| is not of that form."""
    e = _exact_log2(int(max_abs))
    if e is None:
        return None
    return 2 * e - k


def plateau_from_walsh(w: np.ndarray, k: int) -> tuple[bool, int | None]:
    mags = set(np.unique(np.abs(w)).tolist()) - {0}
    if len(mags) != 1:
        return False, None
    s = level_from_max(mags.pop(), k)
    if s is None or (s - k) % 2:
        return False, None
    return True, s


def plateau_level(f: BoolFn, ctx: FieldCtx | None = None) -> tuple[bool, int | None]:
    return plateau_from_walsh(walsh_all(f, ctx), f.k)


def _chunks(total: int, size: int):
    for s in range(0, total, size):
        yield s, min(total, s + size)


def component_walsh_stats(F: VectorialFn, ctx: FieldCtx | None = None, chunk: int | None = None):
    """Per nonzero component v: (max |W|, plateaued?) arrays indexed by v-1."""
    q = 1 << F.k
    if chunk is None:
        chunk = max(1, (1 << 22) // q)
    maxabs = np.zeros(q - 1, dtype=np.int64)
    plateaued = np.zeros(q - 1, dtype=bool)
    for lo, hi in _chunks(q - 1, chunk):
        vs = np.arange(lo + 1, hi + 1)
        w = np.abs(walsh_rows(component_tables(F, vs, ctx)))
        mx = w.max(axis=1)
        maxabs[lo:hi] = mx
        plateaued[lo:hi] = np.all((w == 0) | (w == mx[:, None]), axis=1)
    return maxabs, plateaued


def profile_from_stats(k: int, maxabs: np.ndarray, plateaued: np.ndarray) -> SpectrumProfile:
    levels: dict[int, int] = {}
    irregular: dict[int, int] = {}
    bent = 0
    vals, counts = np.unique(maxabs, return_counts=True)
    for v, c in zip(vals.tolist(), counts.tolist()):
        lvl = level_from_max(v, k)
        if lvl is None or lvl < 0:
            irregular[v] = irregular.get(v, 0) + c
        elif lvl == 0:
            bent += c
        else:
            levels[lvl] = levels.get(lvl, 0) + c
    all_plat = bool(plateaued.all()) and not irregular and all((i - k) % 2 == 0 for i in levels)
    return SpectrumProfile(k, bent, levels, int(maxabs.max(initial=0)), all_plat, irregular)


def spectrum_profile(F: VectorialFn, ctx: FieldCtx | None = None) -> SpectrumProfile:
    maxabs, plat = component_walsh_stats(F, ctx)
    prof = profile_from_stats(F.k, maxabs, plat)
    if prof.bent_count + sum(prof.levels.values()) + sum(prof.irregular.values()) != (1 << F.k) - 1:
        raise ConsistencyError("component census does not add up")
    return prof


def nonlinearity(F: VectorialFn, ctx: FieldCtx | None = None) -> int:
    maxabs, _ = component_walsh_stats(F, ctx)
    return nonlinearity_from_max(F.k, int(maxabs.max()))


def nonlinearity_from_max(k: int, max_abs: int) -> int:
    # max|W| is even for k >= 1, so this stays integral
    return (1 << (k - 1)) - max_abs // 2


def nonlinearity_from_level(k: int, level: int) -> int:
    return nonlinearity_from_max(k, 1 << ((k + level) // 2))


def sum_of_square(f: BoolFn, ctx: FieldCtx | None = None) -> int:
    """nu(f) = 2^-k sum_u W_f(u)^4."""
    w = walsh_all(f, ctx)
    s = int(np.sum(w.astype(object) ** 4))
    if s % (1 << f.k):
        raise ConsistencyError("fourth moment not divisible by 2^k")
    return s >> f.k


def sum_of_square_by_derivatives(f: BoolFn) -> int:
    """nu(f) = sum_a (sum_x (-1)^(f(x+a)+f(x)))^2, straight from the definition."""
    q = 1 << f.k
    x = np.arange(q)
    s = signs(f.tt)
    return int(sum(int(np.dot(s[x ^ a], s)) ** 2 for a in range(q)))


def bent_census(F: VectorialFn, ctx: FieldCtx | None = None) -> tuple[int, frozenset[int]]:
    """Number of bent components and the set of non-bent nonzero components.

    When the count is maximal (2^k - 2^(k/2)) the non-bent set together with 0 must be
    a subspace; a violation raises :class:`ConsistencyError`.
    """
    if F.k % 2:
        raise ValueError("bent components need an even dimension")
    maxabs, _ = component_walsh_stats(F, ctx)
    bent_max = 1 << (F.k // 2)
    nonbent = frozenset(int(v) + 1 for v in np.nonzero(maxabs != bent_max)[0])
    count = (1 << F.k) - 1 - len(nonbent)
    if count == (1 << F.k) - (1 << (F.k // 2)):
        span = nonbent | {0}
        if any((a ^ b) not in span for a in nonbent for b in nonbent):
            raise ConsistencyError("non-bent components of a max-bent function are not a subspace")
    return count, nonbent


def render_spectrum(levels: dict[int, int]) -> str:
    """``(4^10, 6^5)``"""
    return "(" + ", ".join(f"{i}^{c}" for i, c in sorted(levels.items()) if c) + ")"
