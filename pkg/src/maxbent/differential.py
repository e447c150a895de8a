"""Differential counts delta_F(a, b), spectra, and the per-coset profile of family members."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .field import TowerCtx
from .linpoly import rank_of_images
from .walsh import ConsistencyError, VectorialFn


class NotQuadraticError(ValueError):
    pass


@dataclass
class DiffProfile:
    k: int
    uniformity: int
    spectrum: dict[int, int]            # delta value -> frequency over a != 0, all b
    row_exponent: np.ndarray            # per a (index a, entry 0 unused): s if row is {0, 2^s}, else -1
    _rows: np.ndarray | None = field(default=None, repr=False)

    def mu(self, a: int, i: int) -> int:
        """Number of b with delta(a, b) = i."""
        if self._rows is None:
            raise ValueError("profile was built without row data")
        return int(np.count_nonzero(self._rows[a] == i))


@dataclass
class CosetDiffProfile:
    m: int
    exponent: dict[int, int]            # z in GF(2^m)^* -> s
    A: dict[int, int]                   # s -> |A_s|

    def off_subfield_counts(self) -> dict[int, int]:
        """s -> number of a outside the subfield with exponent s (2^m a per z)."""
        return {s: c << self.m for s, c in sorted(self.A.items())}


def delta(F: VectorialFn, a: int, b: int) -> int:
    if a == 0:
        raise ValueError("a must be nonzero")
    t = F.table
    x = np.arange(1 << F.k)
    return int(np.count_nonzero((t[x ^ a] ^ t) == b))


def delta_row(F: VectorialFn, a: int) -> np.ndarray:
    """delta(a, b) for all b, by histogramming D_aF."""
    t = F.table
    x = np.arange(1 << F.k)
    return np.bincount(t[x ^ a] ^ t, minlength=1 << F.k)


def delta_rows(F: VectorialFn, a_values, chunk: int = 256) -> np.ndarray:
    q = 1 << F.k
    a_values = np.asarray(a_values, dtype=np.int64)
    out = np.zeros((a_values.size, q), dtype=np.int64)
    x = np.arange(q)
    t = F.table
    for lo in range(0, a_values.size, chunk):
        aa = a_values[lo:lo + chunk]
        d = t[x[None, :] ^ aa[:, None]] ^ t[None, :]
        flat = d + (np.arange(aa.size) * q)[:, None]
        out[lo:lo + aa.size] = np.bincount(flat.ravel(), minlength=aa.size * q).reshape(aa.size, q)
    return out


def row_exponents(rows: np.ndarray) -> np.ndarray:
    """s where a row of delta values is {0, 2^s}-valued, -1 otherwise."""
    mx = rows.max(axis=1)
    two_valued = np.all((rows == 0) | (rows == mx[:, None]), axis=1)
    pow2 = (mx > 0) & ((mx & (mx - 1)) == 0)
    s = np.log2(np.maximum(mx, 1)).astype(np.int64)
    return np.where(two_valued & pow2, s, -1)


def derivative_kernel_dim(F: VectorialFn, a: int) -> int:
    """dim ker of x -> F(x+a) + F(x) + F(a) + F(0), after checking it is GF(2)-linear."""
    t = F.table
    q = 1 << F.k
    x = np.arange(q)
    d = t[x ^ a] ^ t ^ t[a] ^ t[0]
    images = [int(d[1 << i]) for i in range(F.k)]
    # linear extension of the basis images must reproduce the table
    lin = np.zeros(q, dtype=np.int64)
    for i, v in enumerate(images):
        lin ^= np.where((x >> i) & 1, v, 0)
    if not np.array_equal(lin, d):
        raise NotQuadraticError(f"derivative at a={a} is not affine")
    return F.k - rank_of_images(images)


def delta_quadratic(F: VectorialFn, a: int) -> int:
    """Exponent s with delta(a, .) in {0, 2^s}, for quadratic F."""
    if a == 0:
        raise ValueError("a must be nonzero")
    return derivative_kernel_dim(F, a)


def diff_profile(F: VectorialFn, keep_rows: bool = False) -> DiffProfile:
    q = 1 << F.k
    spectrum: dict[int, int] = {}
    expo = np.full(q, -1, dtype=np.int64)
    full = np.zeros((q, q), dtype=np.int64) if keep_rows else None
    step = max(1, (1 << 20) // q)
    for lo in range(1, q, step):
        a = np.arange(lo, min(q, lo + step))
        rows = delta_rows(F, a)
        if np.any(rows & 1):
            raise ConsistencyError("odd differential count")
        if np.any(rows.sum(axis=1) != q):
            raise ConsistencyError("differential row does not sum to 2^k")
        vals, counts = np.unique(rows, return_counts=True)
        for v, c in zip(vals.tolist(), counts.tolist()):
            spectrum[v] = spectrum.get(v, 0) + c
        expo[a] = row_exponents(rows)
        if full is not None:
            full[a] = rows
    return DiffProfile(F.k, max(spectrum), dict(sorted(spectrum.items())), expo, full)


def coset_profile(F: VectorialFn, t: TowerCtx, rows_exponent: np.ndarray | None = None) -> CosetDiffProfile:
    """Group the off-subfield exponents of F by z = Tr^n_m(a); checks constancy per coset."""
    if rows_exponent is None:
        rows_exponent = diff_profile(F).row_exponent
    q = 1 << t.n
    a = np.arange(1, q)
    z_ext = t.rel_trace_vec(a)
    exponent: dict[int, int] = {}
    for ai, ze, s in zip(a.tolist(), z_ext.tolist(), rows_exponent[1:].tolist()):
        if s < 0:
            raise ConsistencyError(f"row a={ai} is not of shape {{0, 2^s}}")
        if ze == 0:
            if s != t.m:
                raise ConsistencyError(f"subfield row a={ai} has exponent {s}, expected {t.m}")
            continue
        z = t.to_base(ze)
        if exponent.setdefault(z, s) != s:
            raise ConsistencyError(f"exponent not constant on coset Tr(a) = {z}")
    A: dict[int, int] = {}
    for s in exponent.values():
        A[s] = A.get(s, 0) + 1
    return CosetDiffProfile(t.m, dict(sorted(exponent.items())), dict(sorted(A.items())))


def kernel_exponents(H: VectorialFn) -> np.ndarray:
    """For quadratic H: s_z = log2 #{x : H(x+z)+H(x)+H(z)+H(0) = 0} for every z (index 0 unused)."""
    q = 1 << H.k
    x = np.arange(q)
    t = H.table
    z = np.arange(1, q)
    d = t[x[None, :] ^ z[:, None]] ^ t[None, :] ^ t[z][:, None] ^ t[0]
    cnt = np.count_nonzero(d == 0, axis=1)
    s = np.zeros(q, dtype=np.int64)
    s[1:] = np.log2(cnt).astype(np.int64)
    if np.any((1 << s[1:]) != cnt):
        raise NotQuadraticError("derivative kernel size is not a power of two")
    return s


def render_coset_counts(counts: dict[int, int]) -> str:
    """``{0, 2}_192, {0, 4}_48`` from s -> number of a."""
    return ", ".join(f"{{0, {1 << s}}}_{c}" for s, c in sorted(counts.items()) if c)
