import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maxbent.field import (
    clmul, is_irreducible, is_primitive, make_field, make_tower, primitive_polynomials,
    smallest_primitive_polynomial,
)
from oracles import gf_mul_bitserial, trace_bitserial


@pytest.mark.parametrize("k,mod", [(2, 0x7), (3, 0xb), (4, 0x13), (5, 0x25), (6, 0x43), (8, 0x11d)])
def test_smallest_primitive(k, mod):
    assert smallest_primitive_polynomial(k) == mod
    assert make_field(k).modulus == mod


def test_primitive_counts():
    # phi(2^k - 1) / k primitive polynomials
    assert len(primitive_polynomials(4)) == 2
    assert len(primitive_polynomials(5)) == 6
    assert len(primitive_polynomials(6)) == 6


def test_irreducible_not_primitive():
    # x^4 + x^3 + x^2 + x + 1 divides x^5 - 1
    assert is_irreducible(0x1f)
    assert not is_primitive(0x1f)
    with pytest.raises(ValueError):
        make_field(4, 0x1f)


def test_clmul():
    assert clmul(0b11, 0b11) == 0b101
    assert clmul(0, 123) == 0


@pytest.mark.parametrize("k", [3, 4, 5, 6])
def test_mul_matches_bitserial(k):
    ctx = make_field(k)
    for a in range(ctx.size):
        for b in range(ctx.size):
            assert ctx.mul(a, b) == gf_mul_bitserial(a, b, ctx.modulus, k)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 255), st.integers(0, 255), st.integers(0, 255))
def test_field_axioms_gf256(a, b, c):
    f = make_field(8)
    assert f.mul(a, f.mul(b, c)) == f.mul(f.mul(a, b), c)
    assert f.mul(a, b ^ c) == f.mul(a, b) ^ f.mul(a, c)
    if a:
        assert f.mul(a, f.inv(a)) == 1
    assert f.frob(a ^ b, 3) == f.frob(a, 3) ^ f.frob(b, 3)


@pytest.mark.parametrize("k", [4, 5, 8])
def test_trace_and_dual(k):
    ctx = make_field(k)
    x = ctx.elements()
    for a in range(ctx.size):
        assert ctx.abs_trace(a) == trace_bitserial(a, ctx.modulus, k)
    # Tr(u x) equals the dot product of dual[u] with x
    for u in range(ctx.size):
        lhs = ctx.trace_vec(ctx.mul_vec(u, x))
        rhs = np.array([bin(int(ctx.dual[u]) & int(v)).count("1") & 1 for v in x])
        assert np.array_equal(lhs, rhs)
    assert sorted(ctx.dual.tolist()) == list(range(ctx.size))


def test_generator_has_full_order():
    ctx = make_field(6)
    seen = {ctx.gpow(e) for e in range(ctx.order)}
    assert len(seen) == 63 and 0 not in seen


def test_vectorised_matches_scalar():
    ctx = make_field(5)
    x = ctx.elements()
    for e in (0, 1, 3, 7, 30):
        assert ctx.pow_vec(x, e).tolist() == [ctx.pow(int(a), e) for a in x]


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_tower_embedding_is_homomorphism(m):
    t = make_tower(m)
    b, e = t.base, t.ext
    for x in range(b.size):
        for y in range(b.size):
            assert t.embed_elem(b.mul(x, y)) == e.mul(t.embed_elem(x), t.embed_elem(y))
            assert t.embed_elem(x ^ y) == t.embed_elem(x) ^ t.embed_elem(y)
    # the image is exactly the fixed field of x -> x^(2^m)
    fixed = {a for a in range(e.size) if e.frob(a, m) == a}
    assert fixed == set(t.embed.tolist())


def test_tower_root_and_rel_trace():
    t = make_tower(4)
    assert t.root == 78
    z = t.rel_trace_vec(t.ext.elements())
    assert set(z.tolist()) == set(t.embed.tolist())
    # kernel of the relative trace is the subfield
    assert set(np.nonzero(z == 0)[0].tolist()) == set(t.embed.tolist())
    with pytest.raises(KeyError):
        t.to_base(3)
