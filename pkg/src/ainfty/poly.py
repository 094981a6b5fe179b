"""Noncommutative polynomials in the dual coordinates and their cyclic quotient.

A word ``(i_1, ..., i_k)`` stands for the coefficient slot ``a_{i_1...i_k}``.  The
coordinate ``phi^i`` has degree ``-deg(e_i)``; only parities enter signs, so the
rotation sign below is written with basis degrees.

Cyclic functions are stored as their full cyclic coefficient tensor ``a``; the
function it represents is ``(1/k) a(Phi, ..., Phi)``.  The graded rotation is

    (R a)_{i_1 i_2 ... i_k} = (-1)^{|i_1| (|i_2|+...+|i_k|)} a_{i_2 ... i_k i_1},

a cyclic tensor is a fixed point of ``R`` and the quotient map sends any
tensor ``b`` to ``sum_r R^r b``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .graded import BasisMismatch, GradedBasis
from .scalars import Scalar, as_scalar, format_scalar

__all__ = ["NCPoly", "rotation_orbit"]

Word = tuple[int, ...]


def rotation_orbit(word: Word, degrees: tuple[int, ...]) -> Iterator[tuple[Word, int]]:
    """Yield ``(w_r, s_r)`` with ``a_word = s_r * a_{w_r}`` for a cyclic ``a``.

    ``w_r = word[r:] + word[:r]`` for ``r = 0..k-1``.
    """
    k = len(word)
    total = sum(degrees[i] for i in word)
    s = 1
    w = word
    for r in range(k):
        yield w, s
        if r == k - 1:
            break
        d = degrees[w[0]]
        if d % 2 and (total - d) % 2:
            s = -s
        w = w[1:] + w[:1]


class NCPoly:
    """Sparse noncommutative polynomial ``{word: coefficient}`` on a basis."""

    __slots__ = ("basis", "terms")

    def __init__(self, basis: GradedBasis, terms: Mapping[Word, object] | None = None) -> None:
        clean: dict[Word, Scalar] = {}
        for w, c in (terms or {}).items():
            c = as_scalar(c)
            if c != 0:
                clean[tuple(w)] = clean.get(tuple(w), 0) + c
                if clean[tuple(w)] == 0:
                    del clean[tuple(w)]
        self.basis = basis
        self.terms = clean

    # -- basic algebra ---------------------------------------------------------
    @classmethod
    def zero(cls, basis: GradedBasis) -> "NCPoly":
        return cls(basis, {})

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "NCPoly") -> None:
        if other.basis != self.basis:
            raise BasisMismatch("polynomials on different bases")

    def __add__(self, other: "NCPoly") -> "NCPoly":
        self._check(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            v = out.get(w, 0) + c
            if v == 0:
                out.pop(w, None)
            else:
                out[w] = v
        return NCPoly(self.basis, out)

    def __neg__(self) -> "NCPoly":
        return NCPoly(self.basis, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "NCPoly") -> "NCPoly":
        return self + (-other)

    def scale(self, s) -> "NCPoly":
        s = as_scalar(s)
        return NCPoly(self.basis, {w: s * c for w, c in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NCPoly):
            return NotImplemented
        return self.basis == other.basis and self.terms == other.terms

    def __hash__(self) -> int:  # pragma: no cover
        return hash(tuple(sorted(self.terms.items())))

    def __getitem__(self, word: Iterable[int]) -> Scalar:
        return self.terms.get(tuple(word), Fraction(0))

    # -- gradings ----------------------------------------------------------------
    def homogeneous(self, length: int) -> "NCPoly":
        return NCPoly(self.basis, {w: c for w, c in self.terms.items() if len(w) == length})

    def lengths(self) -> list[int]:
        return sorted({len(w) for w in self.terms})

    def function_degree(self, word: Word) -> int:
        """Degree of the monomial ``phi^{i_k}...phi^{i_1}`` (``-sum deg e``)."""
        return -sum(self.basis.degrees[i] for i in word)

    def degrees(self) -> set[int]:
        return {self.function_degree(w) for w in self.terms}

    # -- cyclic structure ------------------------------------------------------
    def rotate(self) -> "NCPoly":
        """The graded rotation ``R``."""
        degs = self.basis.degrees
        out: dict[Word, Scalar] = {}
        for w, c in self.terms.items():
            # (R a)_v = sign(v) a_{v[1:]+v[:1]}; the source word w = v[1:]+v[:1]
            v = w[-1:] + w[:-1]
            d = degs[v[0]]
            rest = sum(degs[i] for i in v[1:])
            s = -1 if (d % 2 and rest % 2) else 1
            out[v] = out.get(v, 0) + s * c
        return NCPoly(self.basis, out)

    def is_cyclic(self) -> bool:
        return self.rotate() == self

    def cyclic_defect_witness(self) -> Word | None:
        diff = self.rotate() - self
        return min(diff.terms) if diff.terms else None

    def quotient(self) -> "NCPoly":
        """Sum over all graded rotations of each homogeneous part (``sum_r R^r``)."""
        degs = self.basis.degrees
        out: dict[Word, Scalar] = {}
        for w, c in self.terms.items():
            for v, s in rotation_orbit(w, degs):
                # a_w contributes to slot v with a_v = s^{-1} a_w relation
                out[v] = out.get(v, 0) + s * c
        return NCPoly(self.basis, out)

    def cyclic_symmetrize(self) -> "NCPoly":
        """Projector ``(1/k) sum_r R^r`` on each word-length component."""
        q = self.quotient()
        return NCPoly(self.basis, {w: c / len(w) if w else c for w, c in q.terms.items()})

    def __repr__(self) -> str:
        if not self.terms:
            return "NCPoly(0)"
        names = self.basis.names
        parts = [f"{format_scalar(c)}*[{' '.join(names[i] for i in w)}]" for w, c in sorted(self.terms.items())]
        return "NCPoly(" + " + ".join(parts) + ")"
