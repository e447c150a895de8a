import numpy as np
import pytest

from maxbent.differential import (
    NotQuadraticError, coset_profile, delta, delta_quadratic, delta_row, diff_profile,
    kernel_exponents, render_coset_counts, row_exponents,
)
from maxbent.family import build
from maxbent.field import make_field, make_tower
from maxbent.linpoly import LinearizedPoly
from maxbent.walsh import VectorialFn
from oracles import delta_brute, uniformity_brute

rng = np.random.default_rng(11)


def test_delta_matches_brute():
    F = VectorialFn(4, rng.integers(0, 16, 16))
    for a in range(1, 16):
        row = delta_row(F, a)
        for b in range(16):
            assert row[b] == delta(F, a, b) == delta_brute(F.table, a, b)


def test_delta_rejects_zero():
    with pytest.raises(ValueError):
        delta(VectorialFn(2, np.arange(4)), 0, 1)


@pytest.mark.parametrize("k,d,apn", [(5, 3, True), (5, 5, True), (6, 3, True), (4, 5, False)])
def test_gold_uniformity(k, d, apn):
    ctx = make_field(k)
    F = VectorialFn(k, ctx.pow_vec(ctx.elements(), d))
    dp = diff_profile(F)
    assert dp.uniformity == uniformity_brute(F.table)
    assert (dp.uniformity == 2) == apn


def test_spectrum_totals():
    F = VectorialFn(5, rng.integers(0, 32, 32))
    dp = diff_profile(F, keep_rows=True)
    assert sum(dp.spectrum.values()) == 31 * 32
    assert sum(v * c for v, c in dp.spectrum.items()) == 31 * 32
    assert dp.mu(3, 0) == int(np.count_nonzero(delta_row(F, 3) == 0))


def test_row_exponents():
    rows = np.array([[2, 0, 2, 0], [4, 0, 0, 0], [2, 2, 0, 0], [3, 1, 0, 0]])
    assert row_exponents(rows).tolist() == [1, 2, 1, -1]


def test_quadratic_fast_path_matches_counting():
    ctx = make_field(6)
    F = VectorialFn(6, ctx.pow_vec(ctx.elements(), 5))
    expo = diff_profile(F).row_exponent
    for a in range(1, 64):
        assert 1 << delta_quadratic(F, a) == delta_row(F, a).max()
        assert delta_quadratic(F, a) == expo[a]


def test_fast_path_rejects_cubic():
    ctx = make_field(5)
    F = VectorialFn(5, ctx.pow_vec(ctx.elements(), 7))
    with pytest.raises(NotQuadraticError):
        delta_quadratic(F, 1)


def test_coset_profile_of_gold_member():
    t = make_tower(4)
    fm = build(1, LinearizedPoly.identity(4), t)
    cp = coset_profile(fm.F, t)
    assert cp.A == {1: 15}
    assert cp.off_subfield_counts() == {1: 240}
    assert render_coset_counts(cp.off_subfield_counts()) == "{0, 2}_240"
    # the same exponents come from H's derivative kernels
    assert kernel_exponents(fm.H)[1:].tolist() == [cp.exponent[z] for z in range(1, 16)]
