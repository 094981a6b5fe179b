"""Formal Maurer-Cartan theory: defects, order-by-order solving, pushforward and gauge action.

``hbar`` is a bookkeeping grading.  A :class:`FormalSeries` stores one element
of ``H`` per positive order and everything is truncated at a fixed order ``N``.
Gauge transformations act through the truncated tensor coalgebra: words are
paired with an ``hbar`` order, ``e^Phi`` is expanded explicitly and the
exponential of the coderivation ``[m, alpha]`` is applied term by term.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Mapping

from .algebra import AInfinity, Morphism
from .combinat import compositions
from .graded import (
    BasisMismatch,
    DegreeError,
    Element,
    GradedBasis,
    MultiMap,
    apply_coderivation,
    contract,
    identity_map,
    insert,
    plug,
)
from .scalars import Scalar
from .splitting import Splitting

__all__ = [
    "FormalSeries",
    "GaugeError",
    "apply_cohomomorphism",
    "conjugate_gauge",
    "gauge_apply",
    "group_like",
    "mc_defect",
    "mc_solve",
    "pushforward",
    "twisted_defect",
    "twisted_structure",
]

Word = tuple[int, ...]
CoElement = dict[tuple[Word, int], Scalar]  # (word, hbar order) -> coefficient
Gauge = Mapping[tuple[int, int], MultiMap]  # (hbar order, arity) -> degree -1 map


class GaugeError(ValueError):
    """The gauge parameter would not truncate."""


@dataclass
class FormalSeries:
    """``sum_{n>=1} hbar^n Phi_n`` truncated at ``order``."""

    basis: GradedBasis
    terms: dict[int, Element] = field(default_factory=dict)
    order: int = 1
    degree: int | None = 0

    def __post_init__(self) -> None:
        clean = {}
        for n, e in self.terms.items():
            if n < 1:
                raise ValueError("formal series start at order hbar^1")
            if e.basis != self.basis:
                raise BasisMismatch("series term on a different basis")
            if n > self.order or e.is_zero():
                continue
            if self.degree is not None:
                for i in e.coeffs:
                    if self.basis.degrees[i] != self.degree:
                        raise DegreeError(f"order {n} term is not of degree {self.degree}")
            clean[n] = e
        self.terms = clean

    @classmethod
    def from_dict(cls, basis: GradedBasis, data: Mapping[int, Mapping[int, object]], order: int,
                  degree: int | None = 0) -> "FormalSeries":
        return cls(basis, {n: Element(basis, c) for n, c in data.items()}, order, degree)

    def __getitem__(self, n: int) -> Element:
        return self.terms.get(n, Element.zero(self.basis))

    def is_zero(self) -> bool:
        return not self.terms

    def first_nonzero(self) -> int | None:
        return min(self.terms) if self.terms else None

    def truncate(self, order: int) -> "FormalSeries":
        return FormalSeries(self.basis, {n: e for n, e in self.terms.items() if n <= order}, order, self.degree)

    def __add__(self, other: "FormalSeries") -> "FormalSeries":
        order = min(self.order, other.order)
        terms = {n: self[n] + other[n] for n in set(self.terms) | set(other.terms)}
        return FormalSeries(self.basis, terms, order, self.degree if self.degree == other.degree else None)

    def __sub__(self, other: "FormalSeries") -> "FormalSeries":
        neg = FormalSeries(other.basis, {n: -e for n, e in other.terms.items()}, other.order, other.degree)
        return self + neg

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FormalSeries):
            return NotImplemented
        return self.basis == other.basis and self.terms == other.terms

    def __repr__(self) -> str:
        inner = ", ".join(f"hbar^{n}: {e!r}" for n, e in sorted(self.terms.items()))
        return f"FormalSeries({inner}; O(hbar^{self.order + 1}))"


def _apply_family(maps, series_terms: Mapping[int, Element], order: int, basis: GradedBasis,
                  target: GradedBasis, max_arity: int, start: int = 1) -> dict[int, Element]:
    """Order-``n`` parts of ``sum_{k>=start} maps(k)(Phi, ..., Phi)``."""
    out: dict[int, Element] = {}
    for n in range(1, order + 1):
        acc = Element.zero(target)
        for k in range(start, min(n, max_arity) + 1):
            mk = maps(k)
            if mk.is_zero():
                continue
            for comp in compositions(n, k):
                args = [series_terms.get(c) for c in comp]
                if any(a is None or a.is_zero() for a in args):
                    continue
                acc = acc + contract(mk, args)
        if not acc.is_zero():
            out[n] = acc
    return out


def mc_defect(A: AInfinity, phi: FormalSeries, N: int | None = None) -> FormalSeries:
    """``sum_k m_k(Phi, ..., Phi)`` order by order through ``hbar^N``."""
    N = phi.order if N is None else N
    terms = _apply_family(A.m, phi.terms, N, A.basis, A.basis, A.max_arity)
    return FormalSeries(A.basis, terms, N, degree=None)


def mc_solve(A: AInfinity, split: Splitting, seed: FormalSeries, N: int) -> tuple[FormalSeries, FormalSeries]:
    """Solve ``Phi = seed - Q^+ sum_{k>=2} m_k(Phi)``; the obstruction is ``P sum_{k>=2} m_k(Phi)``.

    Returns ``(Phi, obstruction)``.  When the obstruction vanishes through
    ``N`` the defect of ``Phi`` is checked to vanish as well.
    """
    pmat = split.proj
    for n, e in seed.terms.items():
        if contract(pmat, [e]) != e:
            raise ValueError(f"seed term at order {n} is not in the image of P")
    phi: dict[int, Element] = {}
    obstruction: dict[int, Element] = {}
    for n in range(1, N + 1):
        acc = Element.zero(A.basis)
        for k in range(2, min(n, A.max_arity) + 1):
            mk = A.m(k)
            if mk.is_zero():
                continue
            for comp in compositions(n, k):
                args = [phi.get(c) for c in comp]
                if any(a is None for a in args):
                    continue
                acc = acc + contract(mk, args)
        term = seed[n] - contract(split.qplus, [acc])
        if not term.is_zero():
            phi[n] = term
        ob = contract(pmat, [acc])
        if not ob.is_zero():
            obstruction[n] = ob
    result = FormalSeries(A.basis, phi, N, seed.degree)
    obs = FormalSeries(A.basis, obstruction, N, degree=None)
    if obs.is_zero() and not mc_defect(A, result, N).is_zero():
        raise AssertionError("unobstructed solution has a nonzero Maurer-Cartan defect")
    return result, obs


def pushforward(F: Morphism, phi: FormalSeries, N: int | None = None) -> FormalSeries:
    """``sum_n f_n(Phi, ..., Phi)`` through ``hbar^N``."""
    if phi.basis != F.source:
        raise BasisMismatch("series does not live on the morphism's source")
    N = phi.order if N is None else N
    terms = _apply_family(F.f, phi.terms, N, F.source, F.target, F.max_arity)
    return FormalSeries(F.target, terms, N, phi.degree)


# ---------------------------------------------------------------------------
# twisting by a Maurer-Cartan element
# ---------------------------------------------------------------------------


def _constant_map(basis: GradedBasis, e: Element) -> MultiMap:
    return MultiMap(basis, basis, 0, 0, {((), i): c for i, c in e.coeffs.items()}, check=False)


def twisted_structure(A: AInfinity, phi: FormalSeries, N: int | None = None) -> dict[int, dict[int, MultiMap]]:
    """``m^Phi_k = sum_n m_{k+n}`` with ``Phi`` inserted in ``n`` slots, per ``hbar`` order.

    Returns ``{order: {arity: map}}`` including arity 0, where ``m^Phi_0`` is the
    Maurer-Cartan defect.
    """
    N = phi.order if N is None else N
    basis = A.basis
    ident = identity_map(basis)
    consts = {o: _constant_map(basis, e) for o, e in phi.terms.items()}
    out: dict[int, dict[int, MultiMap]] = {}
    for p in range(0, N + 1):
        level: dict[int, MultiMap] = {}
        for k in range(0, A.max_arity + 1):
            acc = MultiMap.zero(basis, basis, k, 1)
            for n in range(0, p + 1):
                total = k + n
                if total < 1 or total > A.max_arity:
                    continue
                m = A.m(total)
                if m.is_zero():
                    continue
                orders = compositions(p, n) if n else (((),) if p == 0 else ())
                for slots in itertools.combinations(range(total), n):
                    for comp in orders:
                        inners = []
                        it = iter(comp)
                        ok = True
                        for s in range(total):
                            if s in slots:
                                c = consts.get(next(it))
                                if c is None:
                                    ok = False
                                    break
                                inners.append(c)
                            else:
                                inners.append(ident)
                        if ok:
                            acc = acc + plug(m, inners)
            if not acc.is_zero():
                level[k] = MultiMap(basis, basis, k, 1, acc.entries, check=False)
        out[p] = level
    return out


def twisted_defect(structure: Mapping[int, Mapping[int, MultiMap]], basis: GradedBasis, n: int,
                   p: int) -> MultiMap:
    """Stasheff tensor at arity ``n`` and ``hbar`` order ``p`` of an order-graded structure with ``m_0``."""
    acc = MultiMap.zero(basis, basis, n, 2)
    for p1 in range(0, p + 1):
        outer_level = structure.get(p1, {})
        inner_level = structure.get(p - p1, {})
        for l in range(0, n + 1):
            k = n + 1 - l
            mk, ml = outer_level.get(k), inner_level.get(l)
            if mk is None or ml is None:
                continue
            for j in range(k):
                acc = acc + insert(mk, j, ml)
    return acc


# ---------------------------------------------------------------------------
# gauge transformations in the truncated tensor coalgebra
# ---------------------------------------------------------------------------


def _add(acc: CoElement, key, c) -> None:
    v = acc.get(key, 0) + c
    if v == 0:
        acc.pop(key, None)
    else:
        acc[key] = v


def group_like(phi: FormalSeries, N: int) -> CoElement:
    """``e^Phi = sum_n Phi^{(x)n}`` with words labelled by total ``hbar`` order ``<= N``."""
    out: CoElement = {((), 0): Fraction(1)}
    layer: CoElement = {((), 0): Fraction(1)}
    letters = [(o, i, c) for o, e in phi.terms.items() for i, c in e.coeffs.items()]
    while layer:
        nxt: CoElement = {}
        for (w, o), c in layer.items():
            for o2, i, c2 in letters:
                if o + o2 <= N:
                    _add(nxt, (w + (i,), o + o2), c * c2)
        for key, c in nxt.items():
            _add(out, key, c)
        layer = nxt
    return out


def _apply_coderivations(family: Mapping[tuple[int, int], MultiMap], x: CoElement, N: int) -> CoElement:
    out: CoElement = {}
    for (w, o), c in x.items():
        for (order, _k), m in family.items():
            if o + order > N:
                continue
            for w2, c2 in apply_coderivation(m, w).items():
                _add(out, (w2, o + order), c * c2)
    return out


def _check_gauge(alpha: Gauge, basis: GradedBasis) -> None:
    for (order, k), a in alpha.items():
        if order < 1:
            raise GaugeError("every gauge component needs at least one power of hbar")
        if a.arity != k or a.source != basis or a.target != basis:
            raise GaugeError(f"gauge component at arity {k} has the wrong shape")
        if a.degree != -1 and not a.is_zero():
            raise GaugeError("gauge parameters have degree -1")


def _structure_family(A: AInfinity) -> dict[tuple[int, int], MultiMap]:
    return {(0, k): m for k, m in A.maps.items()}


def gauge_apply(A: AInfinity, alpha: Gauge, phi: FormalSeries, N: int | None = None,
                check: bool = True) -> FormalSeries:
    """Apply ``e^{[m, alpha]}`` to ``e^Phi`` and read off the new single-letter part.

    ``alpha`` maps ``(hbar order, arity) -> degree -1 map``; arity 0 is allowed.
    """
    N = phi.order if N is None else N
    _check_gauge(alpha, A.basis)
    m_fam = _structure_family(A)

    def bracket(x: CoElement) -> CoElement:
        # [m, alpha] = m alpha + alpha m for degrees +1 and -1
        y = _apply_coderivations(m_fam, _apply_coderivations(alpha, x, N), N)
        for key, c in _apply_coderivations(alpha, _apply_coderivations(m_fam, x, N), N).items():
            _add(y, key, c)
        return y

    current = group_like(phi, N)
    total: CoElement = dict(current)
    for j in range(1, N + 1):
        current = bracket(current)
        if not current:
            break
        inv = Fraction(1, factorial(j))
        for key, c in current.items():
            _add(total, key, c * inv)
    terms: dict[int, dict[int, Scalar]] = {}
    for (w, o), c in total.items():
        if len(w) == 1 and o >= 1:
            terms.setdefault(o, {})[w[0]] = c
    result = FormalSeries.from_dict(A.basis, terms, N, degree=None)
    if check:
        again = group_like(result, N)
        if again != total:
            raise AssertionError("gauge image is not group-like")
        if mc_defect(A, phi, N).is_zero() and not mc_defect(A, result, N).is_zero():
            raise AssertionError("gauge transformation broke the Maurer-Cartan equation")
    return result


def apply_cohomomorphism(F: Morphism, x: CoElement) -> CoElement:
    """``F`` on the tensor coalgebra: sum over splittings of each word into consecutive blocks."""
    out: CoElement = {}
    for (w, o), c in x.items():
        n = len(w)
        if n == 0:
            _add(out, ((), o), c)
            continue
        for parts in range(1, n + 1):
            for comp in compositions(n, parts):
                pos = 0
                partial = [((), c)]
                for size in comp:
                    block = w[pos:pos + size]
                    pos += size
                    rows = F.f(size).by_input().get(block)
                    if not rows:
                        partial = []
                        break
                    partial = [(pw + (j,), pc * rc) for pw, pc in partial for j, rc in rows]
                for pw, pc in partial:
                    _add(out, (pw, o), pc)
    return out


def conjugate_gauge(F: Morphism, G: Morphism, alpha: Gauge, N: int, max_arity: int) -> dict[tuple[int, int], MultiMap]:
    """Components of the coderivation ``F alpha G`` for mutually inverse ``F`` and ``G``.

    Evaluated on all basis words of length ``<= max_arity``; the result is the
    gauge parameter transported along ``F``.
    """
    basis = G.source
    out: dict[tuple[int, int], dict] = {}
    for k in range(0, max_arity + 1):
        for w in itertools.product(range(basis.dim), repeat=k):
            x = apply_cohomomorphism(G, {(w, 0): Fraction(1)})
            y = apply_cohomomorphism(F, _apply_coderivations(alpha, x, N))
            for (w2, o), c in y.items():
                if len(w2) == 1:
                    out.setdefault((o, k), {})[(w, w2[0])] = c
    return {key: MultiMap(basis, basis, key[1], -1, ent) for key, ent in out.items()}
