"""Graded bases, sparse elements, multilinear maps and the Koszul sign rule.

A :class:`MultiMap` of arity ``k`` and degree ``d`` stores structure constants
``c^j_{i_1...i_k}`` as a sparse dict keyed by ``((i_1, ..., i_k), j)``.  All the
tensor calculus of the package (insertion, plugging, composition) lives here and
generates Koszul signs mechanically from operator degrees.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .scalars import Scalar, as_scalar, format_scalar

__all__ = [
    "BasisMismatch",
    "DegreeError",
    "Element",
    "GradedBasis",
    "MultiMap",
    "apply_coderivation",
    "contract",
    "identity_map",
    "insert",
    "koszul_sign",
    "plug",
    "word_degree",
]


class DegreeError(ValueError):
    """An entry violates degree homogeneity."""


class BasisMismatch(ValueError):
    """Operands live on different graded bases."""


def koszul_sign(degrees: Iterable[int], op_degree: int) -> int:
    """``(-1)**(op_degree * sum(degrees))``: an operator passing graded letters."""
    if op_degree % 2 == 0:
        return 1
    return -1 if sum(degrees) % 2 else 1


@dataclass(frozen=True)
class GradedBasis:
    """Ordered basis with integer degrees; the order fixes index semantics."""

    names: tuple[str, ...]
    degrees: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.names) != len(self.degrees):
            raise ValueError("names and degrees differ in length")
        if len(set(self.names)) != len(self.names):
            raise ValueError("basis names must be unique")
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(self.names)})

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, int]]) -> "GradedBasis":
        pairs = list(pairs)
        return cls(tuple(p[0] for p in pairs), tuple(int(p[1]) for p in pairs))

    @property
    def dim(self) -> int:
        return len(self.names)

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]  # type: ignore[attr-defined]
        except KeyError:
            raise KeyError(f"unknown basis element {name!r}") from None

    def degree(self, i: int) -> int:
        return self.degrees[i]

    def indices_of_degree(self, d: int) -> list[int]:
        return [i for i, g in enumerate(self.degrees) if g == d]

    def sub(self, indices: Sequence[int]) -> "GradedBasis":
        return GradedBasis(tuple(self.names[i] for i in indices), tuple(self.degrees[i] for i in indices))


def word_degree(basis: GradedBasis, word: Sequence[int]) -> int:
    return sum(basis.degrees[i] for i in word)


class Element:
    """Sparse vector on a graded basis; zero coefficients are never stored."""

    __slots__ = ("basis", "coeffs", "declared_degree")

    def __init__(
        self,
        basis: GradedBasis,
        coeffs: Mapping[int, object] | None = None,
        declared_degree: int | None = None,
    ) -> None:
        clean: dict[int, Scalar] = {}
        for i, c in (coeffs or {}).items():
            c = as_scalar(c)
            if c != 0:
                if not 0 <= i < basis.dim:
                    raise IndexError(f"basis index {i} out of range")
                clean[i] = c
        if declared_degree is not None:
            for i in clean:
                if basis.degrees[i] != declared_degree:
                    raise DegreeError(
                        f"component {basis.names[i]} has degree {basis.degrees[i]}, expected {declared_degree}"
                    )
        self.basis = basis
        self.coeffs = clean
        self.declared_degree = declared_degree

    @classmethod
    def unit(cls, basis: GradedBasis, i: int) -> "Element":
        return cls(basis, {i: 1})

    @classmethod
    def zero(cls, basis: GradedBasis) -> "Element":
        return cls(basis, {})

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int | None:
        """Common degree of the support, ``None`` if zero or inhomogeneous."""
        degs = {self.basis.degrees[i] for i in self.coeffs}
        return degs.pop() if len(degs) == 1 else None

    def __add__(self, other: "Element") -> "Element":
        if other.basis != self.basis:
            raise BasisMismatch("adding elements of different bases")
        out = dict(self.coeffs)
        for i, c in other.coeffs.items():
            out[i] = out.get(i, 0) + c
        return Element(self.basis, out)

    def __neg__(self) -> "Element":
        return Element(self.basis, {i: -c for i, c in self.coeffs.items()})

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def scale(self, s) -> "Element":
        s = as_scalar(s)
        return Element(self.basis, {i: s * c for i, c in self.coeffs.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Element):
            return NotImplemented
        return self.basis == other.basis and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.basis, tuple(sorted(self.coeffs.items()))))

    def __getitem__(self, i: int) -> Scalar:
        return self.coeffs.get(i, Fraction(0))

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = [f"{format_scalar(c)}*{self.basis.names[i]}" for i, c in sorted(self.coeffs.items())]
        return " + ".join(terms)


Key = tuple[tuple[int, ...], int]


class MultiMap:
    """Degree-``d`` multilinear map ``source^{(x)k} -> target`` in structure constants.

    Entries are checked for degree homogeneity at construction.  Instances are
    treated as immutable; the lookup tables are built lazily and cached.
    """

    __slots__ = ("source", "target", "arity", "degree", "entries", "_by_out", "_by_in")

    def __init__(
        self,
        source: GradedBasis,
        target: GradedBasis | None,
        arity: int,
        degree: int,
        entries: Mapping[Key, object] | None = None,
        *,
        check: bool = True,
    ) -> None:
        target = source if target is None else target
        if arity < 0:
            raise ValueError("arity must be non-negative")
        clean: dict[Key, Scalar] = {}
        for key, c in (entries or {}).items():
            c = as_scalar(c) if check else c
            if c == 0:
                continue
            if check:
                ins, out = key
                if len(ins) != arity:
                    raise ValueError(f"entry {key} has wrong arity")
                want = sum(source.degrees[i] for i in ins) + degree
                if target.degrees[out] != want:
                    names = ",".join(source.names[i] for i in ins)
                    raise DegreeError(
                        f"entry ({names}) -> {target.names[out]} violates degree homogeneity "
                        f"(map degree {degree})"
                    )
            clean[key] = c
        self.source = source
        self.target = target
        self.arity = arity
        self.degree = degree
        self.entries = clean
        self._by_out = None
        self._by_in = None

    # -- construction helpers -------------------------------------------------
    @classmethod
    def zero(cls, source: GradedBasis, target: GradedBasis | None, arity: int, degree: int) -> "MultiMap":
        return cls(source, target, arity, degree, {}, check=False)

    @classmethod
    def from_matrix(cls, basis: GradedBasis, mat: Sequence[Sequence[object]], degree: int,
                    target: GradedBasis | None = None) -> "MultiMap":
        """Arity-1 map whose column ``i`` is the image of ``e_i`` (``mat[j][i] = c^j_i``)."""
        target = basis if target is None else target
        ent = {((i,), j): mat[j][i] for j in range(target.dim) for i in range(basis.dim) if mat[j][i] != 0}
        return cls(basis, target, 1, degree, ent)

    def to_matrix(self) -> list[list[Scalar]]:
        if self.arity != 1:
            raise ValueError("to_matrix needs an arity-1 map")
        mat = [[Fraction(0)] * self.source.dim for _ in range(self.target.dim)]
        for ((i,), j), c in self.entries.items():
            mat[j][i] = c
        return mat

    # -- lookups --------------------------------------------------------------
    def by_output(self) -> dict[int, list[tuple[tuple[int, ...], Scalar]]]:
        if self._by_out is None:
            d: dict[int, list] = {}
            for (ins, out), c in self.entries.items():
                d.setdefault(out, []).append((ins, c))
            self._by_out = d
        return self._by_out

    def by_input(self) -> dict[tuple[int, ...], list[tuple[int, Scalar]]]:
        if self._by_in is None:
            d: dict[tuple, list] = {}
            for (ins, out), c in self.entries.items():
                d.setdefault(ins, []).append((out, c))
            self._by_in = d
        return self._by_in

    def get(self, ins: Sequence[int], out: int) -> Scalar:
        return self.entries.get((tuple(ins), out), Fraction(0))

    # -- linear structure -------------------------------------------------------
    def _compatible(self, other: "MultiMap") -> None:
        if (self.source, self.target, self.arity) != (other.source, other.target, other.arity):
            raise BasisMismatch("maps have different shapes")
        if self.degree != other.degree and self.entries and other.entries:
            raise DegreeError("adding maps of different degrees")

    def __add__(self, other: "MultiMap") -> "MultiMap":
        self._compatible(other)
        out = dict(self.entries)
        for k, c in other.entries.items():
            v = out.get(k, 0) + c
            if v == 0:
                out.pop(k, None)
            else:
                out[k] = v
        deg = self.degree if self.entries else other.degree
        return MultiMap(self.source, self.target, self.arity, deg, out, check=False)

    def __neg__(self) -> "MultiMap":
        return MultiMap(self.source, self.target, self.arity, self.degree,
                        {k: -c for k, c in self.entries.items()}, check=False)

    def __sub__(self, other: "MultiMap") -> "MultiMap":
        return self + (-other)

    def scale(self, s) -> "MultiMap":
        s = as_scalar(s)
        if s == 0:
            return MultiMap.zero(self.source, self.target, self.arity, self.degree)
        return MultiMap(self.source, self.target, self.arity, self.degree,
                        {k: s * c for k, c in self.entries.items()}, check=False)

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiMap):
            return NotImplemented
        same_shape = (self.source, self.target, self.arity) == (other.source, other.target, other.arity)
        return same_shape and self.entries == other.entries

    def __hash__(self) -> int:  # pragma: no cover - maps are rarely hashed
        return hash((self.arity, self.degree, tuple(sorted(self.entries.items()))))

    def sorted_entries(self) -> list[tuple[Key, Scalar]]:
        return sorted(self.entries.items())

    def first_entry(self) -> tuple[Key, Scalar] | None:
        """Lexicographically smallest nonzero entry (defect witness)."""
        if not self.entries:
            return None
        key = min(self.entries)
        return key, self.entries[key]

    def restrict_inputs(self, allowed: set[int]) -> "MultiMap":
        return MultiMap(self.source, self.target, self.arity, self.degree,
                        {k: c for k, c in self.entries.items() if all(i in allowed for i in k[0])},
                        check=False)

    def __repr__(self) -> str:
        return f"MultiMap(arity={self.arity}, degree={self.degree}, nnz={len(self.entries)})"

    def __iter__(self) -> Iterator[tuple[Key, Scalar]]:
        return iter(self.entries.items())


def identity_map(basis: GradedBasis) -> MultiMap:
    return MultiMap(basis, basis, 1, 0, {((i,), i): Fraction(1) for i in range(basis.dim)}, check=False)


def contract(m: MultiMap, args: Sequence[Element]) -> Element:
    """Multilinear evaluation ``m(x_1, ..., x_k)`` on sparse elements."""
    if len(args) != m.arity:
        raise ValueError(f"map of arity {m.arity} applied to {len(args)} arguments")
    for a in args:
        if a.basis != m.source:
            raise BasisMismatch("argument basis differs from map source")
    out: dict[int, Scalar] = {}
    supports = [list(a.coeffs.items()) for a in args]
    by_in = m.by_input()
    for combo in itertools.product(*supports):
        ins = tuple(i for i, _ in combo)
        rows = by_in.get(ins)
        if not rows:
            continue
        w = Fraction(1)
        for _, c in combo:
            w = w * c
        for j, c in rows:
            out[j] = out.get(j, 0) + w * c
    return Element(m.target, out)


def apply_coderivation(m: MultiMap, word: Sequence[int]) -> dict[tuple[int, ...], Scalar]:
    """Coderivation lift of ``m`` on the tensor word ``e_{i_1}...e_{i_n}``.

    ``sum_p (-1)^{d (|e_{i_1}|+...+|e_{i_{p-1}}|)} e_{i_1}..m(e_{i_p},..)..e_{i_n}`` with
    ``d`` the degree of ``m``.  Words shorter than the arity give an empty result.
    """
    word = tuple(word)
    k = m.arity
    n = len(word)
    out: dict[tuple[int, ...], Scalar] = {}
    if n < k:
        return out
    by_in = m.by_input()
    degs = m.source.degrees
    for p in range(n - k + 1):
        rows = by_in.get(word[p:p + k])
        if not rows:
            continue
        s = koszul_sign((degs[i] for i in word[:p]), m.degree)
        for j, c in rows:
            w = word[:p] + (j,) + word[p + k:]
            v = out.get(w, 0) + s * c
            if v == 0:
                out.pop(w, None)
            else:
                out[w] = v
    return out


def insert(outer: MultiMap, slot: int, inner: MultiMap) -> MultiMap:
    """``outer o (1^{slot} (x) inner (x) 1^{k-slot-1})`` with its Koszul sign.

    The sign is ``(-1)^{|inner| (|o_1|+...+|o_slot|)}`` for the inputs preceding
    the inserted operator.  ``slot`` is 0-based.
    """
    if inner.target != outer.source:
        raise BasisMismatch("inner map does not land in the outer map's source")
    k, l = outer.arity, inner.arity
    if not 0 <= slot < k:
        raise IndexError("slot out of range")
    degs = inner.source.degrees
    out: dict[Key, Scalar] = {}
    inner_by_out = inner.by_output()
    for (ins, j), c in outer.entries.items():
        rows = inner_by_out.get(ins[slot])
        if not rows:
            continue
        pre = ins[:slot]
        post = ins[slot + 1:]
        s = koszul_sign((degs[i] for i in pre), inner.degree)
        for sub, c2 in rows:
            key = (pre + sub + post, j)
            v = out.get(key, 0) + s * c * c2
            if v == 0:
                out.pop(key, None)
            else:
                out[key] = v
    return MultiMap(inner.source, outer.target, k + l - 1, outer.degree + inner.degree, out, check=False)


def plug(outer: MultiMap, inners: Sequence[MultiMap]) -> MultiMap:
    """``outer o (g_1 (x) ... (x) g_k)`` with Koszul signs from each ``g_a``'s degree."""
    if len(inners) != outer.arity:
        raise ValueError("need one inner map per input slot")
    if not inners:
        return outer
    src = inners[0].source
    for g in inners:
        if g.target != outer.source or g.source != src:
            raise BasisMismatch("inner maps do not match the outer source")
    degs = src.degrees
    tables = [g.by_output() for g in inners]
    gdeg = [g.degree for g in inners]
    out: dict[Key, Scalar] = {}
    total_arity = sum(g.arity for g in inners)
    odd_any = any(d % 2 for d in gdeg)
    for (ins, j), c in outer.entries.items():
        choices = []
        for a, i in enumerate(ins):
            rows = tables[a].get(i)
            if not rows:
                break
            choices.append(rows)
        else:
            for combo in itertools.product(*choices):
                w = c
                word: tuple[int, ...] = ()
                s = 1
                passed = 0
                for a, (sub, c2) in enumerate(combo):
                    if odd_any and gdeg[a] % 2 and passed % 2:
                        s = -s
                    w = w * c2
                    word = word + sub
                    if odd_any:
                        passed += sum(degs[t] for t in sub)
                key = (word, j)
                v = out.get(key, 0) + (w if s == 1 else -w)
                if v == 0:
                    out.pop(key, None)
                else:
                    out[key] = v
    return MultiMap(src, outer.target, total_arity, outer.degree + sum(gdeg), out, check=False)
