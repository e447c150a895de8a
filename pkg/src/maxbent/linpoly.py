"""Linearized polynomials L(x) = sum c_i x^(2^i) over GF(2^m)."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .field import FieldCtx, TowerCtx


@dataclass(frozen=True)
class LinearizedPoly:
    m: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.m:
            raise ValueError(f"expected {self.m} coefficients, got {len(self.coeffs)}")
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    @classmethod
    def from_terms(cls, m: int, terms: dict[int, int]) -> "LinearizedPoly":
        """Build from {i: c_i}; indices are reduced mod m (x^(2^m) = x on the field)."""
        c = [0] * m
        for i, v in terms.items():
            c[i % m] ^= v
        return cls(m, tuple(c))

    @classmethod
    def identity(cls, m: int) -> "LinearizedPoly":
        return cls.from_terms(m, {0: 1})

    @property
    def top_index(self) -> int:
        """Index of the highest nonzero coefficient, -1 for the zero polynomial."""
        for i in range(self.m - 1, -1, -1):
            if self.coeffs[i]:
                return i
        return -1

    @property
    def degree(self) -> int:
        t = self.top_index
        return 0 if t < 0 else 1 << t

    def is_normalized(self) -> bool:
        t = self.top_index
        return t >= 0 and self.coeffs[t] == 1

    def normalize(self, ctx: FieldCtx) -> "LinearizedPoly":
        t = self.top_index
        if t < 0:
            raise ValueError("zero polynomial cannot be normalized")
        s = ctx.inv(self.coeffs[t])
        return LinearizedPoly(self.m, tuple(ctx.mul(s, c) for c in self.coeffs))

    def scale(self, ctx: FieldCtx, c: int) -> "LinearizedPoly":
        return LinearizedPoly(self.m, tuple(ctx.mul(c, a) for a in self.coeffs))

    def render(self, ctx: FieldCtx | None = None) -> str:
        """e.g. ``g^52*x^32 + g^40*x^16 + x``.  Without a field, coefficients print in hex."""
        parts = []
        for i in range(self.m - 1, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            mono = "x" if i == 0 else f"x^{1 << i}"
            if c == 1:
                parts.append(mono)
            elif ctx is not None:
                parts.append(f"g^{ctx.dlog(c)}*{mono}")
            else:
                parts.append(f"{c:#x}*{mono}")
        return " + ".join(parts) if parts else "0"

    def __str__(self) -> str:
        return self.render()


_TERM = re.compile(r"^\s*(g\^-?\d+|0x[0-9a-fA-F]+|\d+)\s*:\s*(\d+)\s*$")


def parse_lambda(text: str, ctx: FieldCtx, gamma: int | None = None) -> LinearizedPoly:
    """Parse ``"g^52:5,g^40:4,1:0"`` (coefficient:index) into a polynomial over ``ctx``.

    A coefficient is ``g^e``, a hex literal or a decimal integer encoding.  ``g`` is the
    field generator unless another element ``gamma`` is given.
    """
    terms: dict[int, int] = {}
    for chunk in text.split(","):
        if not chunk.strip():
            continue
        mt = _TERM.match(chunk)
        if not mt:
            raise ValueError(f"bad term {chunk!r}; expected coeff:index")
        coef, idx = mt.group(1), int(mt.group(2))
        if coef.startswith("g^"):
            e = int(coef[2:])
            val = ctx.gpow(e) if gamma is None else ctx.pow(gamma, e % ctx.order)
        else:
            val = int(coef, 0)
        if not 0 <= val < ctx.size:
            raise ValueError(f"coefficient {coef} outside GF(2^{ctx.k})")
        if idx >= ctx.k:
            raise ValueError(f"index {idx} must be < {ctx.k}")
        terms[idx] = terms.get(idx, 0) ^ val
    return LinearizedPoly.from_terms(ctx.k, terms)


def eval_poly(lam: LinearizedPoly, a: int, ctx: FieldCtx | TowerCtx) -> int:
    """L(a).  With a tower, ``a`` lives in the extension and coefficients are embedded."""
    if isinstance(ctx, TowerCtx):
        f, coeffs = ctx.ext, [ctx.embed_elem(c) for c in lam.coeffs]
    else:
        f, coeffs = ctx, lam.coeffs
    acc = 0
    for i, c in enumerate(coeffs):
        if c:
            acc ^= f.mul(c, f.frob(a, i))
    return acc


def eval_table(lam: LinearizedPoly, ctx: FieldCtx | TowerCtx) -> np.ndarray:
    """Value table of L over the whole field (the extension, for a tower)."""
    if isinstance(ctx, TowerCtx):
        f, coeffs = ctx.ext, [ctx.embed_elem(c) for c in lam.coeffs]
    else:
        f, coeffs = ctx, lam.coeffs
    x = f.elements()
    acc = np.zeros(f.size, dtype=np.int64)
    for i, c in enumerate(coeffs):
        if c:
            acc ^= f.mul_vec(c, f.frob_vec(x, i))
    return acc


def to_matrix(lam: LinearizedPoly, ctx: FieldCtx) -> np.ndarray:
    """m x m matrix over GF(2): column j holds the bits of L(x^j)."""
    m = ctx.k
    mat = np.zeros((m, m), dtype=np.uint8)
    for j in range(m):
        v = eval_poly(lam, 1 << j, ctx)
        for i in range(m):
            mat[i, j] = (v >> i) & 1
    return mat


def gf2_rank(rows: list[int]) -> int:
    """Rank of a GF(2) matrix given as row bitmasks."""
    rank, rows = 0, list(rows)
    while rows:
        pivot = rows.pop()
        if pivot:
            rank += 1
            low = pivot & -pivot
            rows = [r ^ pivot if r & low else r for r in rows]
    return rank


def rank_of_images(images) -> int:
    """Rank of the linear map whose basis images are ``images`` (ints)."""
    return gf2_rank([int(v) for v in images])


def is_permutation(lam: LinearizedPoly, ctx: FieldCtx) -> bool:
    cols = [eval_poly(lam, 1 << j, ctx) for j in range(ctx.k)]
    return rank_of_images(cols) == ctx.k


# --- bulk enumeration ------------------------------------------------------

def _basis_images(coeffs: np.ndarray, ctx: FieldCtx) -> np.ndarray:
    """coeffs: (N, m) array -> (N, m) array of L(x^j)."""
    m = ctx.k
    out = np.zeros((coeffs.shape[0], m), dtype=np.int64)
    for j in range(m):
        xj = 1 << j
        for i in range(m):
            out[:, j] ^= ctx.mul_vec(coeffs[:, i], ctx.frob(xj, i))
    return out


def _full_rank_mask(images: np.ndarray, m: int) -> np.ndarray:
    """Vectorised Gaussian elimination; True where the m basis images are independent."""
    rows = images.copy()
    ok = np.ones(rows.shape[0], dtype=bool)
    for bit in range(m):
        sel = (rows >> bit) & 1
        has = sel.astype(bool)
        # first column holding this bit becomes the pivot
        piv_idx = np.where(has.any(axis=1), has.argmax(axis=1), -1)
        ok &= piv_idx >= 0
        piv = np.where(piv_idx >= 0, rows[np.arange(len(rows)), np.maximum(piv_idx, 0)], 0)
        rows = np.where(has, rows ^ piv[:, None], rows)
        # the pivot cleared itself; drop the bit from the pivot column entirely
        rows[np.arange(len(rows)), np.maximum(piv_idx, 0)] = np.where(
            piv_idx >= 0, 0, rows[np.arange(len(rows)), np.maximum(piv_idx, 0)])
    return ok


def normalized_candidates(m: int, top: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Coefficient rows with c_top = 1, c_i = 0 above, and (c_0..c_{top-1}) ranging over
    the lexicographic block [start, stop) of encodings (c_0 most significant)."""
    q = 1 << m
    total = q ** top
    stop = total if stop is None else min(stop, total)
    idx = np.arange(start, stop, dtype=np.int64)
    coeffs = np.zeros((idx.size, m), dtype=np.int64)
    for i in range(top):
        coeffs[:, i] = (idx // q ** (top - 1 - i)) % q
    coeffs[:, top] = 1
    return coeffs


def iter_normalized_permutation_blocks(m: int, ctx: FieldCtx, block: int = 1 << 16) -> Iterator[np.ndarray]:
    """Yield (N, m) arrays of normalized linearized permutations in enumeration order.

    Order: by top index ascending, then lexicographically on (c_0, ..., c_{top-1}).
    """
    if ctx.k != m:
        raise ValueError("field degree must equal m")
    q = 1 << m
    for top in range(m):
        total = q ** top
        for start in range(0, total, block):
            cand = normalized_candidates(m, top, start, start + block)
            keep = _full_rank_mask(_basis_images(cand, ctx), m)
            if keep.any():
                yield cand[keep]


def normalized_permutation_array(m: int, ctx: FieldCtx) -> np.ndarray:
    blocks = list(iter_normalized_permutation_blocks(m, ctx))
    return np.concatenate(blocks) if blocks else np.zeros((0, m), dtype=np.int64)


def enumerate_normalized_permutations(m: int, ctx: FieldCtx) -> Iterator[LinearizedPoly]:
    for blk in iter_normalized_permutation_blocks(m, ctx):
        for row in blk:
            yield LinearizedPoly(m, tuple(int(c) for c in row))


def gl_order(m: int) -> int:
    out = 1
    for i in range(m):
        out *= (1 << m) - (1 << i)
    return out
