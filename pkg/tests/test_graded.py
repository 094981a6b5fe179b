from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ainfty import linalg
from ainfty.graded import (
    BasisMismatch,
    DegreeError,
    Element,
    GradedBasis,
    MultiMap,
    apply_coderivation,
    contract,
    identity_map,
    insert,
    koszul_sign,
    plug,
)
from ainfty.scalars import GaussianRational, as_scalar, format_scalar, parse_scalar

from helpers import MIXED, random_map

rationals = st.fractions(max_denominator=50).filter(lambda q: abs(q.numerator) < 10**6)


# -- scalars ------------------------------------------------------------------


@given(rationals, rationals)
def test_scalar_text_round_trip(re, im):
    x = as_scalar(GaussianRational(re, im))
    assert parse_scalar(format_scalar(x)) == x


@pytest.mark.parametrize(
    "text, value",
    [
        ("3", Fraction(3)),
        ("-2/6", Fraction(-1, 3)),
        ("i", GaussianRational(0, 1)),
        ("-i", GaussianRational(0, -1)),
        ("1/2+3/4 i", GaussianRational(Fraction(1, 2), Fraction(3, 4))),
        ("2-i", GaussianRational(2, -1)),
        ("5+0 i", Fraction(5)),
    ],
)
def test_parse_scalar(text, value):
    assert parse_scalar(text) == value


@pytest.mark.parametrize("bad", ["", "1/0", "x", "1.5", "2+3j"])
def test_parse_scalar_rejects(bad):
    with pytest.raises(ValueError):
        parse_scalar(bad)


def test_floats_are_refused():
    with pytest.raises(TypeError):
        as_scalar(0.5)


@given(rationals, rationals, rationals, rationals)
def test_gaussian_field_axioms(a, b, c, d):
    x, y = GaussianRational(a, b), GaussianRational(c, d)
    assert x * y == y * x
    assert (x + y) - y == as_scalar(x)
    if y != 0:
        assert (x / y) * y == as_scalar(x)
    assert GaussianRational(0, 1) * GaussianRational(0, 1) == -1
    assert isinstance(as_scalar(GaussianRational(a, 0)), Fraction)


# -- Koszul signs and tensors --------------------------------------------------


@pytest.mark.parametrize("degrees, op, sign", [((), 1, 1), ((1,), 1, -1), ((1, 1), 1, 1), ((1,), 2, 1), ((-1, 0), -1, -1)])
def test_koszul_sign(degrees, op, sign):
    assert koszul_sign(degrees, op) == sign


def test_degree_homogeneity_enforced():
    b = GradedBasis(("a", "b"), (0, 1))
    with pytest.raises(DegreeError, match=r"\(a,a\) -> a"):
        MultiMap(b, b, 2, 1, {((0, 0), 0): 1})
    with pytest.raises(DegreeError):
        Element(b, {0: 1, 1: 1}, declared_degree=0)


def test_basis_validation():
    with pytest.raises(ValueError):
        GradedBasis(("a", "a"), (0, 0))
    with pytest.raises(ValueError):
        GradedBasis(("a",), (0, 1))


def _oracle_insert(f: MultiMap, slot: int, g: MultiMap, word: tuple[int, ...]) -> Element:
    """Evaluate ``f(x_1..g(x_{slot+1}..)..)`` on basis letters with an explicit Koszul sign."""
    degs = g.source.degrees
    before = word[:slot]
    inner = contract(g, [Element.unit(g.source, i) for i in word[slot:slot + g.arity]])
    rest = word[slot + g.arity:]
    args = [Element.unit(f.source, i) for i in before] + [inner] + [Element.unit(f.source, i) for i in rest]
    sign = -1 if (g.degree * sum(degs[i] for i in before)) % 2 else 1
    return contract(f, args).scale(sign)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3), st.integers(1, 2), st.integers(-1, 1))
def test_insert_matches_pointwise_oracle(seed, k, l, dg):
    rng = random.Random(seed)
    f = random_map(MIXED, k, 1, rng, 0.5)
    g = random_map(MIXED, l, dg, rng, 0.5)
    slot = rng.randrange(k)
    composed = insert(f, slot, g)
    for word in itertools.product(range(MIXED.dim), repeat=k + l - 1):
        got = contract(composed, [Element.unit(MIXED, i) for i in word])
        assert got == _oracle_insert(f, slot, g, word)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3), st.integers(-1, 1))
def test_plug_with_identities_is_insert(seed, k, dg):
    rng = random.Random(seed)
    f = random_map(MIXED, k, 1, rng)
    g = random_map(MIXED, 2, dg, rng)
    slot = rng.randrange(k)
    inners = [identity_map(MIXED)] * k
    inners[slot] = g
    assert plug(f, inners) == insert(f, slot, g)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.integers(-1, 1))
def test_coderivation_lift_oracle(seed, dg):
    rng = random.Random(seed)
    g = random_map(MIXED, 2, dg, rng, 0.6)
    word = tuple(rng.randrange(MIXED.dim) for _ in range(4))
    want: dict[tuple[int, ...], Fraction] = {}
    for p in range(3):
        s = koszul_sign([MIXED.degrees[i] for i in word[:p]], dg)
        for j in range(MIXED.dim):
            c = g.get(word[p:p + 2], j)
            if c:
                key = word[:p] + (j,) + word[p + 2:]
                want[key] = want.get(key, 0) + s * c
    assert apply_coderivation(g, word) == {k: v for k, v in want.items() if v}


def test_map_arithmetic_and_mismatch():
    rng = random.Random(2)
    f = random_map(MIXED, 2, 1, rng)
    assert (f + f.scale(-1)).is_zero()
    assert (f - f).is_zero()
    other = GradedBasis(("a",), (0,))
    with pytest.raises(BasisMismatch):
        insert(f, 0, identity_map(other))
    with pytest.raises(IndexError):
        insert(f, 2, identity_map(MIXED))


# -- exact linear algebra --------------------------------------------------------

small_matrices = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n), min_size=1, max_size=5))


@given(small_matrices)
def test_rank_nullity(rows):
    a = [[Fraction(x) for x in r] for r in rows]
    n = len(a[0])
    ker = linalg.nullspace(a)
    assert linalg.rank(a) + len(ker) == n
    for v in ker:
        assert all(sum(r[j] * v[j] for j in range(n)) == 0 for r in a)


@given(small_matrices)
def test_solve_returns_solutions(rows):
    a = [[Fraction(x) for x in r] for r in rows]
    b = [[sum(r)] for r in a]  # consistent: x = (1, ..., 1)
    x = linalg.solve(a, b)
    assert x is not None
    assert linalg.matmul(a, x) == b


@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(st.integers(-2, 2), min_size=n, max_size=n),
                                                   min_size=n, max_size=n)))
def test_group_inverse_when_it_exists(rows):
    a = [[Fraction(x) for x in r] for r in rows]
    try:
        g = linalg.group_inverse(a)
    except ValueError:
        a2 = linalg.matmul(a, a)
        assert linalg.rank(a2) < linalg.rank(a)
        return
    mm = linalg.matmul
    assert mm(mm(a, g), a) == a
    assert mm(mm(g, a), g) == g
    assert mm(a, g) == mm(g, a)
