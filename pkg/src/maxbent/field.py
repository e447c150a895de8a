"""Binary field arithmetic GF(2^k) in a polynomial basis, and the tower GF(2^m) < GF(2^2m).

Elements are k-bit integers, bit i holding the coefficient of x^i.  Scalar
operations work on Python ints; the ``*_vec`` helpers take numpy arrays and
go through the log/antilog tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

MAX_DEGREE = 16


def clmul(a: int, b: int) -> int:
    """Carry-less product of two bit polynomials."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def poly_mod(a: int, mod: int) -> int:
    dm = mod.bit_length() - 1
    while a.bit_length() - 1 >= dm:
        a ^= mod << (a.bit_length() - 1 - dm)
    return a


def poly_mulmod(a: int, b: int, mod: int) -> int:
    return poly_mod(clmul(a, b), mod)


def poly_powmod(a: int, e: int, mod: int) -> int:
    r = 1
    a = poly_mod(a, mod)
    while e:
        if e & 1:
            r = poly_mulmod(r, a, mod)
        a = poly_mulmod(a, a, mod)
        e >>= 1
    return r


def poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, poly_mod(a, b)
    return a


def prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(f: int) -> bool:
    """Rabin's test over GF(2)."""
    k = f.bit_length() - 1
    if k < 1:
        return False
    if k == 1:
        return True
    # x^(2^k) == x mod f, and gcd(x^(2^(k/p)) - x, f) == 1 for every prime p | k
    if poly_powmod(2, 1 << k, f) != 2:
        return False
    for p in prime_factors(k):
        h = poly_powmod(2, 1 << (k // p), f) ^ 2
        if poly_gcd(f, h) != 1:
            return False
    return True


def is_primitive(f: int) -> bool:
    k = f.bit_length() - 1
    if not is_irreducible(f):
        return False
    order = (1 << k) - 1
    if k == 1:
        return True
    return all(poly_powmod(2, order // p, f) != 1 for p in prime_factors(order))


def primitive_polynomials(k: int) -> list[int]:
    """All primitive polynomials of degree k, ascending by integer encoding."""
    return [f for f in range((1 << k) | 1, 1 << (k + 1), 2) if is_primitive(f)]


@lru_cache(maxsize=None)
def smallest_primitive_polynomial(k: int) -> int:
    for f in range((1 << k) | 1, 1 << (k + 1), 2):
        if is_primitive(f):
            return f
    raise ValueError(f"no primitive polynomial of degree {k}")


@dataclass(frozen=True, eq=False)
class FieldCtx:
    """GF(2^k) with a fixed primitive modulus, generator and log tables."""

    k: int
    modulus: int
    generator: int
    exp: np.ndarray = field(repr=False)   # exp[i] = g^i, length 2(2^k - 1) to skip a modulo
    log: np.ndarray = field(repr=False)   # log[0] is a sentinel, never read for nonzero input
    trace_table: np.ndarray = field(repr=False)
    dual: np.ndarray = field(repr=False)  # dual[u] = bitmask of (Tr(u e_i))_i

    @property
    def size(self) -> int:
        return 1 << self.k

    @property
    def order(self) -> int:
        return (1 << self.k) - 1

    def __repr__(self) -> str:
        return f"GF(2^{self.k}) mod {self.modulus:#x} gen {self.generator}"

    def __eq__(self, other):
        return isinstance(other, FieldCtx) and (self.k, self.modulus, self.generator) == (
            other.k, other.modulus, other.generator)

    def __hash__(self):
        return hash((self.k, self.modulus, self.generator))

    # scalar arithmetic

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[int(self.log[a]) + int(self.log[b])])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return int(self.exp[(self.order - int(self.log[a])) % self.order])

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            return 1 if e == 0 else 0
        return int(self.exp[(int(self.log[a]) * e) % self.order])

    def gpow(self, e: int) -> int:
        """generator^e"""
        return int(self.exp[e % self.order])

    def frob(self, a: int, j: int) -> int:
        return self.pow(a, 1 << (j % self.k))

    def abs_trace(self, a: int) -> int:
        return int(self.trace_table[a])

    def dlog(self, a: int) -> int:
        if a == 0:
            raise ValueError("log of 0")
        return int(self.log[a])

    # vectorised arithmetic

    def mul_vec(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = self.exp[self.log[a] + self.log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def pow_vec(self, a, e: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        out = self.exp[(self.log[a] * e) % self.order]
        if e == 0:
            return np.ones_like(a)
        return np.where(a == 0, 0, out)

    def frob_vec(self, a, j: int) -> np.ndarray:
        return self.pow_vec(a, 1 << (j % self.k))

    def trace_vec(self, a) -> np.ndarray:
        return self.trace_table[np.asarray(a, dtype=np.int64)]

    def elements(self) -> np.ndarray:
        return np.arange(self.size, dtype=np.int64)


def _trace_by_frobenius(k: int, modulus: int, a: int) -> int:
    t, y = 0, a
    for _ in range(k):
        t ^= y
        y = poly_mulmod(y, y, modulus)
    return t


@lru_cache(maxsize=None)
def make_field(k: int, modulus: int | None = None) -> FieldCtx:
    """Build GF(2^k).  The default modulus is the smallest primitive polynomial."""
    if not 1 <= k <= MAX_DEGREE:
        raise ValueError(f"degree {k} outside 1..{MAX_DEGREE}")
    if modulus is None:
        modulus = smallest_primitive_polynomial(k)
    if modulus.bit_length() - 1 != k or not is_primitive(modulus):
        raise ValueError(f"{modulus:#x} is not a primitive polynomial of degree {k}")
    q, order = 1 << k, (1 << k) - 1

    # x is a generator when the modulus is primitive; keep the general search anyway
    pf = prime_factors(order) if order > 1 else []
    gen = next(g for g in range(1, q)
               if all(poly_powmod(g, order // p, modulus) != 1 for p in pf))

    exp = np.zeros(2 * order, dtype=np.int64)
    log = np.zeros(q, dtype=np.int64)
    y = 1
    for i in range(order):
        exp[i] = y
        log[y] = i
        y = poly_mulmod(y, gen, modulus)
    exp[order:] = exp[:order]

    basis_tr = [_trace_by_frobenius(k, modulus, 1 << i) for i in range(k)]
    if any(t not in (0, 1) for t in basis_tr):
        raise AssertionError("trace left the prime field")
    idx = np.arange(q, dtype=np.int64)
    tr = np.zeros(q, dtype=np.int64)
    for i, t in enumerate(basis_tr):
        if t:
            tr ^= (idx >> i) & 1
    ctx = FieldCtx(k, modulus, gen, exp, log, tr.astype(np.uint8), np.zeros(0))
    # dual[u] bit i = Tr(u * x^i), so Tr(u v) = <dual[u], v>
    dual = np.zeros(q, dtype=np.int64)
    for i in range(k):
        dual |= ctx.trace_vec(ctx.mul_vec(idx, 1 << i)).astype(np.int64) << i
    object.__setattr__(ctx, "dual", dual)
    for arr in (exp, log, ctx.trace_table, dual):
        arr.setflags(write=False)
    return ctx


def mul(ctx: FieldCtx, a: int, b: int) -> int:
    return ctx.mul(a, b)


def frob(ctx: FieldCtx, a: int, j: int) -> int:
    return ctx.frob(a, j)


def abs_trace(ctx: FieldCtx, a: int) -> int:
    return ctx.abs_trace(a)


@dataclass(frozen=True, eq=False)
class TowerCtx:
    """GF(2^m) embedded in GF(2^2m) via a root of the base modulus."""

    base: FieldCtx
    ext: FieldCtx
    embed: np.ndarray = field(repr=False)
    root: int = 0
    unembed: dict = field(default_factory=dict, repr=False)

    @property
    def m(self) -> int:
        return self.base.k

    @property
    def n(self) -> int:
        return self.ext.k

    def embed_elem(self, a: int) -> int:
        return int(self.embed[a])

    def to_base(self, a: int) -> int:
        """Inverse of embed; raises KeyError off the subfield."""
        return self.unembed[int(a)]

    def in_subfield(self, a: int) -> bool:
        return int(a) in self.unembed

    def rel_trace(self, a: int) -> int:
        return a ^ self.ext.frob(a, self.m)

    def rel_trace_vec(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        return a ^ self.ext.frob_vec(a, self.m)

    def subfield_mask(self) -> np.ndarray:
        mask = np.zeros(self.ext.size, dtype=bool)
        mask[self.embed] = True
        return mask

    def __repr__(self) -> str:
        return f"Tower({self.base!r} < {self.ext!r}, root {self.root})"


@lru_cache(maxsize=None)
def make_tower(m: int, base_modulus: int | None = None, ext_modulus: int | None = None) -> TowerCtx:
    base = make_field(m, base_modulus)
    ext = make_field(2 * m, ext_modulus)
    # smallest root of the base modulus in the extension
    root = None
    for y in range(ext.size):
        acc = 0
        for i in range(m + 1):
            if (base.modulus >> i) & 1:
                acc ^= ext.pow(y, i)
        if acc == 0:
            root = y
            break
    if root is None:
        raise AssertionError("base modulus has no root in the extension")
    powers = [ext.pow(root, i) for i in range(m)]
    embed = np.zeros(base.size, dtype=np.int64)
    for a in range(base.size):
        v = 0
        for i in range(m):
            if (a >> i) & 1:
                v ^= powers[i]
        embed[a] = v
    embed.setflags(write=False)
    unembed = {int(v): a for a, v in enumerate(embed)}
    return TowerCtx(base, ext, embed, root, unembed)


def rel_trace(t: TowerCtx, a: int) -> int:
    return t.rel_trace(a)
