"""Random generators and independent oracles shared by the test modules."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import sympy

from ainfty.algebra import AInfinity
from ainfty.graded import Element, GradedBasis, MultiMap, contract
from ainfty.ncgeom import NCForm, Substitution
from ainfty.poly import NCPoly

# an odd symplectic plane pair: omega(q, p) = -1, omega(r, s) = 1
MIXED = GradedBasis(("q", "p", "r", "s"), (0, 1, -1, 2))


def random_map(basis: GradedBasis, arity: int, degree: int, rng: random.Random,
               density: float = 0.4, span: int = 3) -> MultiMap:
    entries = {}
    for ins in itertools.product(range(basis.dim), repeat=arity):
        want = sum(basis.degrees[i] for i in ins) + degree
        for j in range(basis.dim):
            if basis.degrees[j] == want and rng.random() < density:
                entries[(ins, j)] = rng.randint(-span, span)
    return MultiMap(basis, basis, arity, degree, entries)


def random_cyclic(basis: GradedBasis, length: int, degree: int, rng: random.Random,
                  density: float = 0.4) -> NCPoly:
    """Random cyclic function of word length ``length`` and function degree ``degree``."""
    terms = {}
    for w in itertools.product(range(basis.dim), repeat=length):
        if -sum(basis.degrees[i] for i in w) == degree and rng.random() < density:
            terms[w] = rng.randint(-3, 3)
    return NCPoly(basis, terms).cyclic_symmetrize()


def random_form(basis: GradedBasis, length: int, n_d: int, degree: int, rng: random.Random,
                density: float = 0.3) -> NCForm:
    """Random cyclic form with ``n_d`` differentials; ``degree`` counts only the letters."""
    terms = {}
    for w in itertools.product(range(basis.dim), repeat=length):
        if -sum(basis.degrees[i] for i in w) != degree:
            continue
        for shape in itertools.combinations(range(length), n_d):
            if rng.random() < density:
                terms[tuple((i, int(p in shape)) for p, i in enumerate(w))] = rng.randint(-3, 3)
    return NCForm(basis, terms).cyclic_symmetrize()


def random_gauge(basis: GradedBasis, order: int, rng: random.Random, arities=(0, 1, 2),
                 density: float = 0.4) -> dict[tuple[int, int], MultiMap]:
    """``alpha = sum hbar^o alpha_{o,k}`` with degree -1 components for ``1 <= o < order``."""
    return {(o, k): random_map(basis, k, -1, rng, density, 2) for o in range(1, order) for k in arities}


def frac(text: str) -> Fraction:
    return Fraction(text)


# bracket strings of the eleven terms in the displayed four-input product formula
DISPLAYED_M4 = [
    "(••••)",
    "((••)••)", "(•(••)•)", "(••(••))",
    "((•••)•)", "(•(•••))",
    "(((••)•)•)", "(•((••)•))", "((••)(••))", "((•(••))•)", "(•(•(••)))",
]


def massey_oracle(A: AInfinity, split, a: int, b: int, c: int) -> Element:
    """``pi m2(h m2(a, b), c) + (-1)^{|a|} pi m2(a, h m2(b, c))`` with ``h = -Q^+``, pointwise."""
    basis = A.basis
    m2, qp = A.m(2), split.qplus
    harm = split.harmonic

    def h(e: Element) -> Element:
        return contract(qp, [e]).scale(-1)

    ea, eb, ec = (Element.unit(basis, i) for i in (a, b, c))
    left = contract(m2, [h(contract(m2, [ea, eb])), ec])
    right = contract(m2, [ea, h(contract(m2, [eb, ec]))])
    sign = -1 if basis.degrees[a] % 2 else 1
    return contract(harm.pi, [left + right.scale(sign)])


def oracle_pullback(sub: Substitution, form: NCForm, max_length: int) -> NCForm:
    """Expand the substitution with sympy noncommutative symbols, then reduce cyclically."""
    dim = sub.basis.dim
    phi = [sympy.Symbol(f"p{i}", commutative=False) for i in range(dim)]
    dphi = [sympy.Symbol(f"d{i}", commutative=False) for i in range(dim)]
    index = {**{phi[i]: (i, 0) for i in range(dim)}, **{dphi[i]: (i, 1) for i in range(dim)}}

    def letters(term) -> list:
        out = []
        for f in term.args_cnc()[1]:
            base, exp = f.as_base_exp()
            out += [index[base]] * int(exp)
        return out

    def truncated(expr):
        return sympy.Add(*[t for t in sympy.Add.make_args(sympy.expand(expr)) if len(letters(t)) <= max_length])

    images = {}
    for i in range(dim):
        img = sympy.Integer(0)
        dimg = sympy.Integer(0)
        for word, c in sub.image(i).items():
            coeff = sympy.Rational(c.numerator, c.denominator)
            img += coeff * sympy.Mul(*[phi[k] for k in word])
            for p in range(len(word)):
                dimg += coeff * sympy.Mul(*[dphi[k] if q == p else phi[k] for q, k in enumerate(word)])
        images[(i, 0)] = img
        images[(i, 1)] = dimg
    raw: dict = {}
    for word, c in form.terms.items():
        if len(word) > max_length:
            continue
        acc = sympy.Rational(c.numerator, c.denominator * len(word))
        room = max_length - len(word)
        for letter in word:
            # a piece longer than 1 + room cannot survive the truncation
            piece = sympy.Add(*[t for t in sympy.Add.make_args(images[letter]) if len(letters(t)) <= 1 + room])
            acc = truncated(acc * piece)
        for term in sympy.Add.make_args(acc):
            if term == 0:
                continue
            coeff = sympy.Mul(*term.args_cnc()[0])
            key = tuple(letters(term))
            raw[key] = raw.get(key, 0) + Fraction(int(coeff.p), int(coeff.q))
    return NCForm(sub.basis, raw).quotient()
