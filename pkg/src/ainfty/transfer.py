"""Homotopy transfer to the minimal model, decomposition, cyclic transfer and tree amplitudes.

Tree maps attach ``m_k`` to vertices and ``-Q^+`` to internal edges; the minimal
products are ``pi o sum_Gamma m_Gamma o iota^{(x)k}`` and the quasi-isomorphism is
``sum_Gamma f_Gamma o iota^{(x)k}``.  The recursive formula and the tree sum are
both implemented and compared.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import (
    AInfinity,
    Morphism,
    SymplecticForm,
    compose,
    cyclic_vertex,
    identity_morphism,
    pullback_structure,
)
from .combinat import compositions
from .graded import GradedBasis, MultiMap, identity_map, insert, plug
from .poly import NCPoly
from .splitting import Splitting, verify_split
from .trees import PlanarTree, cyclic_classes, enumerate_trees

__all__ = [
    "AmplitudeReport",
    "TransferError",
    "TransferResult",
    "amplitude",
    "cyclic_transfer",
    "decompose",
    "effective_action",
    "pullback_action",
    "projection_p",
    "tensor_differential",
    "transfer",
    "transfer_full",
    "transfer_inverse",
    "tree_map_f",
    "tree_map_m",
    "word_homotopy",
]


class TransferError(ValueError):
    """Inputs are inconsistent with the requested transfer."""


@dataclass
class TransferResult:
    minimal: AInfinity
    morphism: Morphism
    split: Splitting
    omega_p: SymplecticForm | None = None
    checks: dict[str, bool] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# tree maps
# ---------------------------------------------------------------------------


class _TreeEvaluator:
    """Memoized ``f_Gamma`` / ``m_Gamma`` on the full space for one (A, split)."""

    def __init__(self, A: AInfinity, split: Splitting) -> None:
        self.A = A
        self.split = split
        self.neg_qplus = split.qplus.scale(-1)
        self._f: dict[PlanarTree, MultiMap] = {}
        self._m: dict[PlanarTree, MultiMap] = {}

    def m(self, t: PlanarTree) -> MultiMap:
        got = self._m.get(t)
        if got is not None:
            return got
        if t.is_leaf:
            out = self.A.m(1)
        else:
            r = len(t.children)
            mr = self.A.m(r)
            subs = [self.f(c) for c in t.children]
            if mr.is_zero() or any(s.is_zero() for s in subs):
                out = MultiMap.zero(self.A.basis, self.A.basis, t.leaves, 1)
            else:
                out = plug(mr, subs)
        self._m[t] = out
        return out

    def f(self, t: PlanarTree) -> MultiMap:
        got = self._f.get(t)
        if got is not None:
            return got
        if t.is_leaf:
            out = identity_map(self.A.basis)
        else:
            mt = self.m(t)
            if mt.is_zero():
                out = MultiMap.zero(self.A.basis, self.A.basis, t.leaves, 0)
            else:
                out = plug(self.neg_qplus, [mt])
        self._f[t] = out
        return out


def tree_map_f(tree: PlanarTree, A: AInfinity, split: Splitting) -> MultiMap:
    """``f_Gamma``: identity on the bare edge, ``-Q^+ m_k(f_{Gamma_1}, ...)`` otherwise."""
    return _TreeEvaluator(A, split).f(tree)


def tree_map_m(tree: PlanarTree, A: AInfinity, split: Splitting) -> MultiMap:
    """``m_Gamma``: ``Q`` on the bare edge, ``m_k(f_{Gamma_1}, ...)`` otherwise."""
    return _TreeEvaluator(A, split).m(tree)


def _restrict(t: MultiMap, iota: MultiMap, pi: MultiMap | None) -> MultiMap:
    out = plug(t, [iota] * t.arity) if not t.is_zero() else MultiMap.zero(iota.source, t.target, t.arity, t.degree)
    if pi is not None:
        out = plug(pi, [out]) if not out.is_zero() else MultiMap.zero(iota.source, pi.target, t.arity, t.degree)
    return out


def _check_inputs(A: AInfinity, split: Splitting) -> None:
    if split.basis != A.basis:
        raise TransferError("splitting lives on a different basis")
    rep = verify_split(split, A, side_conditions=False)
    if not rep.passed:
        raise TransferError(f"invalid splitting: {rep.summary()}")


def _recursive(A: AInfinity, split: Splitting, K: int, start: MultiMap, project: MultiMap | None,
               domain: GradedBasis):
    """``f_k = -Q^+ sum_{i>=2} m_i(f..)``, ``m_k = project(sum_{i>=2} m_i(f..))`` from ``f_1 = start``."""
    fs: dict[int, MultiMap] = {1: start}
    ms: dict[int, MultiMap] = {}
    negq = split.qplus.scale(-1)
    for k in range(2, K + 1):
        acc = MultiMap.zero(domain, A.basis, k, 1)
        for i in range(2, k + 1):
            mi = A.m(i)
            if mi.is_zero():
                continue
            for comp in compositions(k, i):
                inner = [fs[c] for c in comp]
                if any(g.is_zero() for g in inner):
                    continue
                acc = acc + plug(mi, inner)
        fs[k] = plug(negq, [acc]) if not acc.is_zero() else MultiMap.zero(domain, A.basis, k, 0)
        if project is None:
            ms[k] = acc
        else:
            ms[k] = plug(project, [acc]) if not acc.is_zero() else MultiMap.zero(domain, project.target, k, 1)
    return fs, ms


def transfer(A: AInfinity, split: Splitting, K: int | None = None, *, method: str = "both") -> TransferResult:
    """Minimal model on ``H^p`` with its quasi-isomorphism into ``A``.

    ``method`` is ``"recursion"``, ``"trees"`` or ``"both"`` (compute both and
    require entrywise agreement).
    """
    _check_inputs(A, split)
    K = A.max_arity if K is None else K
    harm = split.harmonic
    hp = harm.basis
    rec = tree = None
    if method in ("recursion", "both"):
        rec = _recursive(A, split, K, harm.iota, harm.pi, hp)
    if method in ("trees", "both"):
        ev = _TreeEvaluator(A, split)
        fs = {1: harm.iota}
        ms = {}
        for k in range(2, K + 1):
            fk = MultiMap.zero(hp, A.basis, k, 0)
            mk = MultiMap.zero(hp, hp, k, 1)
            for t in enumerate_trees(k):
                fk = fk + _restrict(ev.f(t), harm.iota, None)
                mk = mk + _restrict(ev.m(t), harm.iota, harm.pi)
            fs[k], ms[k] = fk, mk
        tree = (fs, ms)
    checks: dict[str, bool] = {}
    if rec is not None and tree is not None:
        agree = all(rec[0][k] == tree[0][k] for k in rec[0]) and all(
            MultiMap(hp, hp, k, 1, rec[1][k].entries, check=False) == tree[1][k] for k in rec[1])
        checks["recursion_equals_tree_sum"] = agree
        if not agree:
            raise TransferError("recursive and tree-sum transfer disagree")
    fs, ms = rec if rec is not None else tree
    minimal = AInfinity(hp, {k: MultiMap(hp, hp, k, 1, m.entries) for k, m in ms.items()}, K)
    morphism = Morphism(hp, A.basis, {k: MultiMap(hp, A.basis, k, 0, f.entries) for k, f in fs.items()}, K)
    return TransferResult(minimal, morphism, split, None, checks)


def transfer_full(A: AInfinity, split: Splitting, K: int | None = None) -> tuple[AInfinity, Morphism]:
    """Transfer on all of ``H``: ``f_1 = Id``, ``m_1 = Q``, ``m_k = P sum_Gamma m_Gamma``.

    The returned morphism maps the new structure to ``A``.
    """
    _check_inputs(A, split)
    K = A.max_arity if K is None else K
    fs, ms = _recursive(A, split, K, identity_map(A.basis), split.proj, A.basis)
    maps = {1: A.m(1)}
    maps.update({k: MultiMap(A.basis, A.basis, k, 1, m.entries) for k, m in ms.items()})
    return AInfinity(A.basis, maps, K), Morphism(A.basis, A.basis, fs, K)


def transfer_inverse(A: AInfinity, split: Splitting, K: int | None = None) -> Morphism:
    """Explicit inverse of the full transfer morphism: ``g_1 = Id``, ``g_k = Q^+ m_k``."""
    K = A.max_arity if K is None else K
    comps = {1: identity_map(A.basis)}
    for k in range(2, K + 1):
        mk = A.m(k)
        if not mk.is_zero():
            comps[k] = plug(split.qplus, [mk])
    return Morphism(A.basis, A.basis, comps, K)


# ---------------------------------------------------------------------------
# word homotopy and decomposition
# ---------------------------------------------------------------------------


def tensor_differential(t: MultiMap, split_or_q) -> MultiMap:
    """``D t = Q o t - (-1)^{|t|} t o Q_hat`` with ``Q_hat`` the coderivation lift."""
    q = split_or_q if isinstance(split_or_q, MultiMap) else None
    if q is None:
        raise TypeError("pass the differential as a MultiMap")
    out = plug(q, [t]) if not t.is_zero() else MultiMap.zero(t.source, t.target, t.arity, t.degree + 1)
    for j in range(t.arity):
        term = insert(t, j, q)
        out = out - term if t.degree % 2 == 0 else out + term
    return MultiMap(t.source, t.target, t.arity, t.degree + 1, out.entries, check=False)


def projection_p(t: MultiMap, split: Splitting) -> MultiMap:
    """``P o t o P^{(x)n}``: the part of ``t`` living on ``H^p`` in every slot."""
    if t.is_zero():
        return t
    out = plug(split.proj, [plug(t, [split.proj] * t.arity)])
    return MultiMap(t.source, t.target, t.arity, t.degree, out.entries, check=False)


def word_homotopy(t: MultiMap, split: Splitting) -> MultiMap:
    """``K t = Q^+ o t + (-1)^{|t|} P o t o h_hat`` with ``h_hat = sum_j P^{(x)j} (x) Q^+ (x) 1``.

    Satisfies ``D K + K D = Id - P o (.) o P^{(x)n}`` entrywise.
    """
    n = t.arity
    deg = t.degree - 1
    if t.is_zero():
        return MultiMap.zero(t.source, t.target, n, deg)
    out = plug(split.qplus, [t])
    pt = plug(split.proj, [t])
    if not pt.is_zero():
        ident = identity_map(t.source)
        for j in range(n):
            inners = [split.proj] * j + [split.qplus] + [ident] * (n - j - 1)
            term = plug(pt, inners)
            out = out + term if t.degree % 2 == 0 else out - term
    return MultiMap(t.source, t.target, n, deg, out.entries, check=False)


def decompose(A: AInfinity, split: Splitting, K: int | None = None) -> tuple[AInfinity, Morphism]:
    """Isomorphic structure ``m'`` with ``m'_1 = Q`` and ``m'_k = P m'_k P^{(x)k}`` for ``k >= 2``.

    Arity by arity the exact part of ``m_{l+1}`` is removed by the coordinate
    change ``Id - K(m_{l+1})``.  Returns ``(m', F)`` with ``F : (H, m') -> A``.
    """
    _check_inputs(A, split)
    K = A.max_arity if K is None else K
    cur = A.truncate(K) if A.max_arity > K else AInfinity(A.basis, A.maps, K)
    total = identity_morphism(A.basis, K)
    for k in range(2, K + 1):
        g = word_homotopy(cur.m(k), split)
        if g.is_zero():
            continue
        step = Morphism(A.basis, A.basis, {1: identity_map(A.basis), k: g.scale(-1)}, K)
        cur = pullback_structure(step, cur)
        total = compose(total, step)
    return cur, total


# ---------------------------------------------------------------------------
# cyclic transfer, amplitudes and actions
# ---------------------------------------------------------------------------


def cyclic_transfer(A: AInfinity, omega: SymplecticForm, split: Splitting, K: int | None = None) -> TransferResult:
    """Transfer with the restricted symplectic form ``omega(iota, iota)``; needs a compatible splitting."""
    rep = verify_split(split, A, omega)
    if not rep.passed:
        raise TransferError(f"splitting is not omega-compatible: {rep.summary()}")
    res = transfer(A, split, K)
    harm = split.harmonic
    res.omega_p = omega.restrict(harm.vectors, harm.basis)
    return res


def effective_action(result: TransferResult) -> NCPoly:
    """Cyclic coefficient tensors ``V_{k+1}`` of the minimal action (function ``sum V/(k+1)``)."""
    if result.omega_p is None:
        raise TransferError("effective action needs a cyclic transfer result")
    acc = NCPoly.zero(result.minimal.basis)
    for k in range(2, result.minimal.max_arity + 1):
        acc = acc + cyclic_vertex(result.omega_p, result.minimal, k)
    return acc


def _vertex_of_map(omega: SymplecticForm, m: MultiMap) -> NCPoly:
    """``(-1)^{o_1} omega(o_1, m(o_2, ...))`` for any map into ``omega``'s space."""
    degs = omega.basis.degrees
    by_second: dict[int, list] = {}
    for (i, j), c in omega.entries.items():
        by_second.setdefault(j, []).append((i, c))
    terms: dict[tuple[int, ...], object] = {}
    for (ins, j), c in m.entries.items():
        for i, w in by_second.get(j, ()):
            v = w * c if degs[i] % 2 == 0 else -w * c
            terms[(i,) + ins] = terms.get((i,) + ins, 0) + v
    return NCPoly(m.source, terms)


def _restrict_poly(p: NCPoly, vectors, basis: GradedBasis) -> NCPoly:
    """``p o iota^{(x)n}`` where ``iota(e'_a) = vectors[a]``."""
    terms: dict[tuple[int, ...], object] = {}
    support: dict[int, list[tuple[int, object]]] = {}
    for a, v in enumerate(vectors):
        for i, c in v.items():
            support.setdefault(i, []).append((a, c))
    for word, c in p.terms.items():
        partial = [((), c)]
        for i in word:
            nxt = []
            for w, acc in partial:
                for a, ca in support.get(i, ()):
                    nxt.append((w + (a,), acc * ca))
            partial = nxt
            if not partial:
                break
        for w, v in partial:
            terms[w] = terms.get(w, 0) + v
    return NCPoly(basis, terms)


@dataclass
class AmplitudeReport:
    n: int
    tree_sum: NCPoly
    class_sum: NCPoly
    tree_sum_p: NCPoly
    class_sum_p: NCPoly
    minimal_vertex: NCPoly
    full_space_equal: bool
    restricted_equal: bool
    minimal_equal: bool

    @property
    def passed(self) -> bool:
        return self.restricted_equal and self.minimal_equal


def amplitude(A: AInfinity, omega: SymplecticForm, split: Splitting, n: int) -> AmplitudeReport:
    """Tree amplitude ``V_n``: sum over ``G_{n-1}``, sum over cyclic classes, and the minimal vertex.

    The class sum weights ``sum_r R^r V_{rep}`` by the symmetric factor of each
    class.  All three are compared after restriction to ``H^p``.
    """
    if n < 3:
        raise ValueError("amplitudes start at n = 3")
    rep = verify_split(split, A, omega)
    if not rep.passed:
        raise TransferError(f"splitting is not omega-compatible: {rep.summary()}")
    ev = _TreeEvaluator(A, split)
    tree_sum = NCPoly.zero(A.basis)
    for t in enumerate_trees(n - 1):
        tree_sum = tree_sum + _vertex_of_map(omega, ev.m(t))
    class_sum = NCPoly.zero(A.basis)
    for cls in cyclic_classes(n):
        v = _vertex_of_map(omega, ev.m(cls.representative))
        orbit = NCPoly.zero(A.basis)
        cur = v
        for _ in range(n):
            orbit = orbit + cur
            cur = cur.rotate()
        class_sum = class_sum + orbit.scale(cls.symmetric_factor)
    harm = split.harmonic
    res = transfer(A, split, n - 1, method="recursion")
    omega_p = omega.restrict(harm.vectors, harm.basis)
    minimal_vertex = cyclic_vertex(omega_p, res.minimal, n - 1)
    tp = _restrict_poly(tree_sum, harm.vectors, harm.basis)
    cp = _restrict_poly(class_sum, harm.vectors, harm.basis)
    return AmplitudeReport(n, tree_sum, class_sum, tp, cp, minimal_vertex,
                           tree_sum == class_sum, tp == cp, tp == minimal_vertex)


def pullback_action(omega: SymplecticForm, A: AInfinity, F: Morphism, length: int) -> NCPoly:
    """Coefficient tensor of ``S o F`` at word length ``length``, projected by ``sum_r R^r``.

    ``S = sum_k V_k(Phi^k)/k`` and ``Phi = sum_n f_n(Phi'^n)``; the result is the
    cyclic tensor of the pulled-back function.
    """
    if F.target != A.basis or omega.basis != A.basis:
        raise TransferError("action and morphism do not match")
    acc = NCPoly.zero(F.source)
    for k in range(2, length + 1):
        vk = cyclic_vertex(omega, A, k - 1)
        if vk.is_zero():
            continue
        table = _poly_as_map(vk)
        for comp in compositions(length, k):
            inners = [F.f(c) for c in comp]
            if any(g.is_zero() for g in inners):
                continue
            t = plug(table, inners)
            acc = acc + NCPoly(F.source, {w: c for (w, _), c in t.entries.items()}).scale(Fraction(1, k))
    return acc.quotient()


def _poly_as_map(p: NCPoly) -> MultiMap:
    """View a homogeneous-length tensor as a map into a one-dimensional scalar space."""
    lengths = p.lengths()
    if len(lengths) != 1:
        raise ValueError("expected a single word length")
    scalar = GradedBasis(("1",), (0,))
    return MultiMap(p.basis, scalar, lengths[0], 0, {(w, 0): c for w, c in p.terms.items()}, check=False)
