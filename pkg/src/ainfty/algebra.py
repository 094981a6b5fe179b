"""A-infinity structures, morphisms, cyclic structures and homotopies of morphisms.

Conventions (suspended): every product ``m_k`` has degree +1, morphism components
``f_k`` degree 0, homotopy components ``h_k`` degree -1, and the symplectic form
``omega`` degree -1 (``omega_ij != 0`` only when ``deg e_i + deg e_j = 1``).

All identities are computed as structure-constant tensors so that a failure is
located by its lexicographically smallest nonzero entry.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from . import linalg
from .combinat import compositions
from .graded import (
    BasisMismatch,
    DegreeError,
    GradedBasis,
    MultiMap,
    identity_map,
    insert,
    plug,
)
from .poly import NCPoly
from .scalars import Scalar, as_scalar, format_scalar

__all__ = [
    "AInfinity",
    "Morphism",
    "MorphismHomotopy",
    "Report",
    "SymplecticForm",
    "compose",
    "cyclic_vertex",
    "homotopy_defect",
    "identity_morphism",
    "invert",
    "linear_morphism",
    "morphism_defect",
    "pullback_structure",
    "stasheff_defect",
    "standard_homotopy",
    "structure_from_action",
    "verify_ainfty",
    "verify_cyclic_morphism",
    "verify_cyclicity",
]


@dataclass
class Report:
    """Outcome of an identity check: pass flag, count of checks, first witness."""

    passed: bool
    checked: int = 0
    witness: tuple | None = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.passed

    def summary(self) -> str:
        head = "PASS" if self.passed else "FAIL"
        text = f"{head} ({self.checked} identities checked)"
        if self.witness is not None:
            text += f"; first witness {self.witness}"
        if self.message:
            text += f"; {self.message}"
        return text


# ---------------------------------------------------------------------------
# algebraic objects
# ---------------------------------------------------------------------------


class AInfinity:
    """``(H, {m_k})`` truncated at ``max_arity``; ``m_k`` beyond it are zero."""

    def __init__(self, basis: GradedBasis, maps: Mapping[int, MultiMap], max_arity: int | None = None) -> None:
        if max_arity is None:
            max_arity = max(maps, default=1)
        if 0 in maps:
            raise ValueError("m_0 is not supported (weak structures are out of scope)")
        for k, m in maps.items():
            if k < 1:
                raise ValueError("arity must be positive")
            if m.arity != k:
                raise ValueError(f"map stored at arity {k} has arity {m.arity}")
            if m.degree != 1 and not m.is_zero():
                raise DegreeError(f"m_{k} must have degree +1")
            if m.source != basis or m.target != basis:
                raise BasisMismatch(f"m_{k} lives on a different basis")
            if k > max_arity and not m.is_zero():
                raise ValueError(f"m_{k} exceeds max arity {max_arity}")
        self.basis = basis
        self.maps = {k: m for k, m in maps.items() if not m.is_zero()}
        self.max_arity = max_arity

    def m(self, k: int) -> MultiMap:
        got = self.maps.get(k)
        if got is None:
            return MultiMap.zero(self.basis, self.basis, k, 1)
        return got

    @property
    def differential(self) -> MultiMap:
        return self.m(1)

    def with_maps(self, maps: Mapping[int, MultiMap], max_arity: int | None = None) -> "AInfinity":
        return AInfinity(self.basis, maps, self.max_arity if max_arity is None else max_arity)

    def truncate(self, k: int) -> "AInfinity":
        return AInfinity(self.basis, {a: m for a, m in self.maps.items() if a <= k}, k)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AInfinity):
            return NotImplemented
        return self.basis == other.basis and self.maps == other.maps

    def __repr__(self) -> str:
        return f"AInfinity(dim={self.basis.dim}, arities={sorted(self.maps)}, max_arity={self.max_arity})"


class SymplecticForm:
    """Odd constant symplectic form ``omega(e_i, e_j) = omega_ij`` of degree -1."""

    def __init__(self, basis: GradedBasis, entries: Mapping[tuple[int, int], object]) -> None:
        clean: dict[tuple[int, int], Scalar] = {}
        for (i, j), c in entries.items():
            c = as_scalar(c)
            if c == 0:
                continue
            if basis.degrees[i] + basis.degrees[j] != 1:
                raise DegreeError(f"omega({basis.names[i]},{basis.names[j]}) violates degree -1")
            clean[(i, j)] = c
        for (i, j), c in clean.items():
            if clean.get((j, i), 0) != -c:
                raise ValueError(f"omega is not skew at ({basis.names[i]},{basis.names[j]})")
        self.basis = basis
        self.entries = clean
        if linalg.rank(self.matrix) != basis.dim:
            raise ValueError("omega is degenerate")

    @classmethod
    def from_pairs(cls, basis: GradedBasis, pairs: Mapping[tuple[int, int], object]) -> "SymplecticForm":
        """Build from ``(i, j) -> omega_ij`` given for one ordering of each pair."""
        full: dict[tuple[int, int], Scalar] = {}
        for (i, j), c in pairs.items():
            c = as_scalar(c)
            full[(i, j)] = c
            full[(j, i)] = -c
        return cls(basis, full)

    @cached_property
    def matrix(self) -> list[list[Scalar]]:
        n = self.basis.dim
        mat = linalg.zeros(n, n)
        for (i, j), c in self.entries.items():
            mat[i][j] = c
        return mat

    @cached_property
    def inverse(self) -> list[list[Scalar]]:
        """``omega^{ij}``, the entries of the inverse matrix."""
        return linalg.inverse(self.matrix)

    def __call__(self, i: int, j: int) -> Scalar:
        return self.entries.get((i, j), Fraction(0))

    def pair(self, x: Mapping[int, Scalar], y: Mapping[int, Scalar]) -> Scalar:
        total: Scalar = Fraction(0)
        for (i, j), c in self.entries.items():
            a, b = x.get(i, 0), y.get(j, 0)
            if a and b:
                total = total + c * a * b
        return total

    def restrict(self, vectors: Sequence[Mapping[int, Scalar]], basis: GradedBasis) -> "SymplecticForm":
        """Pull back along the inclusion sending the new basis vector ``a`` to ``vectors[a]``."""
        ent = {}
        for a, va in enumerate(vectors):
            for b, vb in enumerate(vectors):
                v = self.pair(va, vb)
                if v != 0:
                    ent[(a, b)] = v
        return SymplecticForm(basis, ent)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SymplecticForm):
            return NotImplemented
        return self.basis == other.basis and self.entries == other.entries

    def __repr__(self) -> str:
        return f"SymplecticForm(nnz={len(self.entries)})"


class Morphism:
    """A-infinity morphism components ``f_k : source^{(x)k} -> target`` of degree 0."""

    def __init__(self, source: GradedBasis, target: GradedBasis, components: Mapping[int, MultiMap],
                 max_arity: int | None = None) -> None:
        if max_arity is None:
            max_arity = max(components, default=1)
        for k, f in components.items():
            if k < 1:
                raise ValueError("f_0 is not supported")
            if f.arity != k or f.source != source or f.target != target:
                raise BasisMismatch(f"component f_{k} has the wrong shape")
            if f.degree != 0 and not f.is_zero():
                raise DegreeError(f"f_{k} must have degree 0")
        self.source = source
        self.target = target
        self.components = {k: f for k, f in components.items() if not f.is_zero()}
        self.max_arity = max_arity

    def f(self, k: int) -> MultiMap:
        got = self.components.get(k)
        if got is None:
            return MultiMap.zero(self.source, self.target, k, 0)
        return got

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Morphism):
            return NotImplemented
        return (self.source, self.target, self.components) == (other.source, other.target, other.components)

    def agrees_with(self, other: "Morphism", upto: int) -> bool:
        return all(self.f(k) == other.f(k) for k in range(1, upto + 1))

    def __repr__(self) -> str:
        return f"Morphism(arities={sorted(self.components)}, max_arity={self.max_arity})"


def identity_morphism(basis: GradedBasis, max_arity: int = 1) -> Morphism:
    return Morphism(basis, basis, {1: identity_map(basis)}, max_arity)


def linear_morphism(f1: MultiMap, max_arity: int = 1) -> Morphism:
    return Morphism(f1.source, f1.target, {1: f1}, max_arity)


@dataclass
class MorphismHomotopy:
    """Components ``h_n`` (``n >= 0``) of degree -1 lifted as ``sum F (x) h_n (x) G``."""

    source: GradedBasis
    target: GradedBasis
    components: dict[int, MultiMap] = field(default_factory=dict)

    def h(self, n: int) -> MultiMap:
        got = self.components.get(n)
        if got is None:
            return MultiMap.zero(self.source, self.target, n, -1)
        return got

    def is_zero(self) -> bool:
        return all(h.is_zero() for h in self.components.values())


# ---------------------------------------------------------------------------
# Stasheff identities and morphisms
# ---------------------------------------------------------------------------


def _sum(maps: Iterable[MultiMap], zero: MultiMap) -> MultiMap:
    acc = zero
    for m in maps:
        if not m.is_zero():
            acc = acc + m
    return acc


def stasheff_defect(A: AInfinity, n: int) -> MultiMap:
    """``sum_{k+l=n+1} sum_j m_k(o_1..o_j, m_l(..), ..)`` with Koszul signs."""
    if n < 1:
        raise ValueError("arity must be at least 1")
    zero = MultiMap.zero(A.basis, A.basis, n, 2)
    terms = []
    for l in range(1, n + 1):
        k = n + 1 - l
        mk, ml = A.m(k), A.m(l)
        if mk.is_zero() or ml.is_zero():
            continue
        for j in range(k):
            terms.append(insert(mk, j, ml))
    return _sum(terms, zero)


def verify_ainfty(A: AInfinity, n_max: int) -> Report:
    checked = 0
    for n in range(1, n_max + 1):
        d = stasheff_defect(A, n)
        checked += 1
        if not d.is_zero():
            (ins, out), c = d.first_entry()
            names = tuple(A.basis.names[i] for i in ins)
            return Report(False, checked, (n, names, A.basis.names[out]),
                          f"Stasheff identity fails at arity {n} with coefficient {format_scalar(c)}")
    return Report(True, checked)


def _plug_sum(outer_family, inner_family, n: int, src: GradedBasis, tgt: GradedBasis,
              degree: int, max_outer: int | None = None) -> MultiMap:
    """``sum_i sum_{k_1+..+k_i=n} outer_i(inner_{k_1} (x) ... (x) inner_{k_i})``."""
    zero = MultiMap.zero(src, tgt, n, degree)
    terms = []
    top = n if max_outer is None else min(n, max_outer)
    for i in range(1, top + 1):
        outer = outer_family(i)
        if outer.is_zero():
            continue
        for comp in compositions(n, i):
            inners = [inner_family(k) for k in comp]
            if any(g.is_zero() for g in inners):
                continue
            terms.append(plug(outer, inners))
    return _sum(terms, zero)


def morphism_defect(F: Morphism, A: AInfinity, A2: AInfinity, n: int) -> MultiMap:
    """``(m' F)_n - (F m)_n`` for ``F : (A.basis, m) -> (A2.basis, m')``."""
    if F.source != A.basis or F.target != A2.basis:
        raise BasisMismatch("morphism does not match the given algebras")
    left = _plug_sum(A2.m, F.f, n, F.source, F.target, 1)
    terms = []
    for l in range(1, n + 1):
        k = n + 1 - l
        fk, ml = F.f(k), A.m(l)
        if fk.is_zero() or ml.is_zero():
            continue
        for j in range(k):
            terms.append(insert(fk, j, ml))
    right = _sum(terms, MultiMap.zero(F.source, F.target, n, 1))
    return left - right


def verify_morphism(F: Morphism, A: AInfinity, A2: AInfinity, n_max: int) -> Report:
    for n in range(1, n_max + 1):
        d = morphism_defect(F, A, A2, n)
        if not d.is_zero():
            (ins, out), _ = d.first_entry()
            return Report(False, n, (n, tuple(A.basis.names[i] for i in ins), A2.basis.names[out]),
                          f"morphism identity fails at arity {n}")
    return Report(True, n_max)


__all__.append("verify_morphism")


def compose(F: Morphism, G: Morphism) -> Morphism:
    """``F o G``; components ``sum f_i(g_{k_1} (x) ... (x) g_{k_i})``."""
    if G.target != F.source:
        raise BasisMismatch("cannot compose: G's target is not F's source")
    K = min(F.max_arity, G.max_arity)
    comps = {n: _plug_sum(F.f, G.f, n, G.source, F.target, 0) for n in range(1, K + 1)}
    return Morphism(G.source, F.target, comps, K)


def _linear_inverse(f1: MultiMap) -> MultiMap:
    mat = f1.to_matrix()
    if len(mat) != len(mat[0]) or linalg.rank(mat) != len(mat):
        raise ValueError("linear part is not invertible")
    return MultiMap.from_matrix(f1.target, linalg.inverse(mat), 0, target=f1.source)


def invert(F: Morphism) -> Morphism:
    """Inverse A-infinity isomorphism ``G`` with ``F o G = Id`` through ``F.max_arity``."""
    g1 = _linear_inverse(F.f(1))
    comps: dict[int, MultiMap] = {1: g1}
    for n in range(2, F.max_arity + 1):
        partial = Morphism(F.target, F.source, comps, n - 1)
        rest = _plug_sum(lambda i: F.f(i) if i >= 2 else MultiMap.zero(F.source, F.target, 1, 0),
                         partial.f, n, F.target, F.target, 0)
        comps[n] = plug(g1, [rest]).scale(-1) if not rest.is_zero() else MultiMap.zero(F.target, F.source, n, 0)
    return Morphism(F.target, F.source, comps, F.max_arity)


def pullback_structure(F: Morphism, A: AInfinity) -> AInfinity:
    """The unique structure ``m'`` on ``F.source`` making ``F : (source, m') -> A`` a morphism.

    Requires an invertible linear part.  Solved arity by arity from
    ``f_1 m'_n = (m F)_n - sum_{k >= 2} f_k(.., m'_l, ..)``.
    """
    if F.target != A.basis:
        raise BasisMismatch("morphism target is not the algebra's basis")
    f1inv = _linear_inverse(F.f(1))
    K = F.max_arity
    new: dict[int, MultiMap] = {}
    src = F.source
    for n in range(1, K + 1):
        acc = _plug_sum(A.m, F.f, n, src, F.target, 1)
        for l in range(1, n):
            k = n + 1 - l
            fk, ml = F.f(k), new.get(l)
            if ml is None or fk.is_zero():
                continue
            for j in range(k):
                acc = acc - insert(fk, j, ml)
        mn = plug(f1inv, [acc]) if not acc.is_zero() else MultiMap.zero(src, src, n, 1)
        new[n] = MultiMap(src, src, n, 1, mn.entries)
    return AInfinity(src, new, K)


# ---------------------------------------------------------------------------
# cyclic structures
# ---------------------------------------------------------------------------


def cyclic_vertex(omega: SymplecticForm, A: AInfinity, k: int) -> NCPoly:
    """``V_{k+1}(o_1, ..., o_{k+1}) = (-1)^{o_1} omega(o_1, m_k(o_2, ..., o_{k+1}))``."""
    if k < 1:
        raise ValueError("k must be positive")
    basis = A.basis
    degs = basis.degrees
    by_second: dict[int, list[tuple[int, Scalar]]] = {}
    for (i, j), c in omega.entries.items():
        by_second.setdefault(j, []).append((i, c))
    terms: dict[tuple[int, ...], Scalar] = {}
    for (ins, j), c in A.m(k).entries.items():
        for i, w in by_second.get(j, ()):
            v = w * c if degs[i] % 2 == 0 else -w * c
            key = (i,) + ins
            terms[key] = terms.get(key, 0) + v
    return NCPoly(basis, terms)


def structure_from_action(omega: SymplecticForm, vertices: Mapping[int, NCPoly] | NCPoly,
                          max_arity: int | None = None) -> AInfinity:
    """Raise one index: ``c^j_{i_1..i_k} = sum_m (-1)^{deg e_m} omega^{jm} V_{m i_1..i_k}``.

    ``vertices`` is either one polynomial (all word lengths) or a mapping
    ``k -> V_{k+1}``.
    """
    basis = omega.basis
    if isinstance(vertices, NCPoly):
        polys = [vertices]
    else:
        polys = list(vertices.values())
    inv = omega.inverse
    degs = basis.degrees
    col: dict[int, list[tuple[int, Scalar]]] = {}
    for j in range(basis.dim):
        for m in range(basis.dim):
            if inv[j][m] != 0:
                col.setdefault(m, []).append((j, inv[j][m]))
    maps: dict[int, dict] = {}
    for poly in polys:
        for word, v in poly.terms.items():
            if len(word) < 2:
                raise ValueError("vertices need at least two legs")
            m, ins = word[0], word[1:]
            s = v if degs[m] % 2 == 0 else -v
            ent = maps.setdefault(len(ins), {})
            for j, w in col.get(m, ()):
                key = (ins, j)
                ent[key] = ent.get(key, 0) + s * w
    built = {k: MultiMap(basis, basis, k, 1, ent) for k, ent in maps.items()}
    top = max(built, default=1) if max_arity is None else max_arity
    return AInfinity(basis, built, top)


def verify_cyclicity(omega: SymplecticForm, A: AInfinity, n_max: int) -> Report:
    """Cyclic symmetry of every ``V_{k+1}`` with ``k <= n_max``."""
    if omega.basis != A.basis:
        raise BasisMismatch("omega and the algebra use different bases")
    checked = 0
    for k in range(1, n_max + 1):
        v = cyclic_vertex(omega, A, k)
        checked += 1
        w = v.cyclic_defect_witness()
        if w is not None:
            return Report(False, checked, (k, tuple(A.basis.names[i] for i in w)),
                          f"V_{k + 1} is not cyclically symmetric")
    return Report(True, checked)


def cyclic_morphism_defect(F: Morphism, omega: SymplecticForm, omega2: SymplecticForm, n: int) -> NCPoly:
    """For ``n = 2``: ``omega'(f_1, f_1) - omega``; for ``n >= 3``: ``sum_{k+l=n} omega'(f_k, f_l)``."""
    if omega.basis != F.source or omega2.basis != F.target:
        raise BasisMismatch("forms do not match the morphism")
    terms: dict[tuple[int, ...], Scalar] = {}
    for k in range(1, n):
        fk, fl = F.f(k), F.f(n - k)
        if fk.is_zero() or fl.is_zero():
            continue
        lo = fl.by_output()
        for (ins_a, a), ca in fk.entries.items():
            for (x, b), w in omega2.entries.items():
                if x != a:
                    continue
                for ins_b, cb in lo.get(b, ()):
                    key = ins_a + ins_b
                    terms[key] = terms.get(key, 0) + w * ca * cb
    if n == 2:
        for (i, j), c in omega.entries.items():
            terms[(i, j)] = terms.get((i, j), 0) - c
    return NCPoly(F.source, terms)


def verify_cyclic_morphism(F: Morphism, omega: SymplecticForm, omega2: SymplecticForm, n_max: int) -> Report:
    checked = 0
    for n in range(2, n_max + 1):
        d = cyclic_morphism_defect(F, omega, omega2, n)
        checked += 1
        if not d.is_zero():
            w = min(d.terms)
            return Report(False, checked, (n, tuple(F.source.names[i] for i in w)),
                          "symplectic structures are not preserved")
    return Report(True, checked)


__all__ += ["cyclic_morphism_defect"]


# ---------------------------------------------------------------------------
# homotopies between morphisms
# ---------------------------------------------------------------------------


def homotopy_defect(F: Morphism, G: Morphism, H: MorphismHomotopy, A: AInfinity, A2: AInfinity,
                    n: int) -> MultiMap:
    """``G_n - F_n - (m' H)_n - (H m)_n`` on the single-letter output."""
    if not (F.source == G.source == A.basis == H.source and F.target == G.target == A2.basis == H.target):
        raise BasisMismatch("homotopy data on inconsistent bases")
    src, tgt = A.basis, A2.basis
    out = G.f(n) - F.f(n)
    # m'_i(f.., h_j, g..)
    for i in range(1, n + 2):
        mi = A2.m(i)
        if mi.is_zero():
            continue
        for p in range(i):
            # parts: p morphism slots from F, one h slot, i-p-1 slots from G
            for hj in range(0, n + 1):
                hmap = H.h(hj)
                if hmap.is_zero():
                    continue
                rest = n - hj
                before, after = p, i - p - 1
                if before + after > rest:
                    continue
                for comp in compositions(rest, before + after):
                    fs = [F.f(k) for k in comp[:before]]
                    gs = [G.f(k) for k in comp[before:]]
                    inners = fs + [hmap] + gs
                    if any(x.is_zero() for x in inners):
                        continue
                    out = out - plug(mi, inners)
    # h_{n-l+1}(.., m_l, ..)
    for l in range(1, n + 1):
        h = H.h(n - l + 1)
        ml = A.m(l)
        if h.is_zero() or ml.is_zero():
            continue
        for j in range(n - l + 1):
            out = out - insert(h, j, ml)
    return MultiMap(src, tgt, n, 0, out.entries, check=False)


def standard_homotopy(split) -> tuple[MorphismHomotopy, Morphism, Morphism]:
    """The homotopy ``Id (x) (-Q^+) (x) P`` from ``Id`` to the projection ``P``.

    Returns ``(H, F, G)`` with ``F = Id`` and ``G`` the linear morphism ``P``.  It is
    a homotopy for any structure whose higher products live on the ``P``-image.
    """
    basis = split.basis
    comps = {}
    if not split.qplus.is_zero():
        comps[1] = split.qplus.scale(-1)
    return (MorphismHomotopy(basis, basis, comps), identity_morphism(basis), linear_morphism(split.proj))
