"""Small named test algebras used by the tests, demos and shipped fixture files."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import TYPE_CHECKING, Mapping

from .algebra import AInfinity, SymplecticForm
from .graded import GradedBasis, MultiMap

if TYPE_CHECKING:
    from .ncgeom import NCForm

__all__ = [
    "contractible",
    "darboux_pair",
    "darboux_plane",
    "exterior_product",
    "from_dga",
    "heisenberg",
    "heisenberg_omega",
    "matrix_units",
    "obstructed",
    "quiver",
    "shipped_specs",
    "write_shipped",
]


def contractible() -> AInfinity:
    """``{u (0), t (1)}`` with ``Q u = t``: the smallest linear contractible algebra."""
    basis = GradedBasis(("u", "t"), (0, 1))
    q = MultiMap(basis, basis, 1, 1, {((0,), 1): 1})
    return AInfinity(basis, {1: q}, 1)


def darboux_pair(kinetic: Fraction | int = 1) -> tuple[AInfinity, SymplecticForm, list[int], list[int]]:
    """Four-dimensional Darboux example ``{u, t, t*, u*}`` with ``Q u = t``, ``Q t* = u*``.

    ``kinetic`` scales both differential entries; fields are ``(u, t*)`` with
    antifields ``(u*, t)``.  Returns ``(A, omega, fields, antifields)``.
    """
    basis = GradedBasis(("u", "t", "ts", "us"), (0, 1, 0, 1))
    k = Fraction(kinetic)
    q = MultiMap(basis, basis, 1, 1, {((0,), 1): k, ((2,), 3): k})
    omega = SymplecticForm.from_pairs(basis, {(0, 3): -1, (2, 1): -1})
    return AInfinity(basis, {1: q}, 1), omega, [0, 2], [3, 1]


def matrix_units() -> AInfinity:
    """Suspension of the associative algebra spanned by the matrix units ``e11, e12``."""
    basis = GradedBasis(("e11", "e12"), (-1, -1))
    # e11 e11 = e11, e11 e12 = e12, e12 e11 = 0 = e12 e12
    m2 = MultiMap(basis, basis, 2, 1, {((0, 0), 0): 1, ((0, 1), 1): 1})
    return AInfinity(basis, {2: m2}, 2)


def from_dga(names: tuple[str, ...], degrees: tuple[int, ...], d: Mapping[int, Mapping[int, object]],
             product: Mapping[tuple[int, int], Mapping[int, object]], max_arity: int = 2) -> AInfinity:
    """Suspend a dga: degrees shift by -1, ``m_1(sa) = -s(da)``, ``m_2(sa, sb) = (-1)^{|a|} s(ab)``.

    ``d[i]`` and ``product[(i, j)]`` are sparse images in the unsuspended basis.
    These sign rules are the ones under which the Stasheff identities follow
    from ``d^2 = 0``, the Leibniz rule and associativity.
    """
    basis = GradedBasis(tuple(names), tuple(g - 1 for g in degrees))
    m1 = {((i,), j): -Fraction(c) for i, img in d.items() for j, c in img.items()}
    m2 = {}
    for (i, j), img in product.items():
        s = -1 if degrees[i] % 2 else 1
        for k, c in img.items():
            m2[((i, j), k)] = s * Fraction(c)
    maps = {1: MultiMap(basis, basis, 1, 1, m1), 2: MultiMap(basis, basis, 2, 1, m2)}
    return AInfinity(basis, maps, max_arity)


def exterior_product(generators: tuple[str, ...]):
    """Monomial basis and wedge product table of the exterior algebra on ``generators``.

    Returns ``(names, degrees, monomials, product)`` with monomials as sorted
    index tuples and ``product[(a, b)] = {c: sign}``.
    """
    g = len(generators)
    monos = [m for r in range(g + 1) for m in combinations(range(g), r)]
    names = tuple("".join(generators[i] for i in m) or "1" for m in monos)
    degrees = tuple(len(m) for m in monos)
    index = {m: a for a, m in enumerate(monos)}
    product: dict[tuple[int, int], dict[int, int]] = {}
    for a, ma in enumerate(monos):
        for b, mb in enumerate(monos):
            if set(ma) & set(mb):
                continue
            word = list(ma + mb)
            inversions = sum(1 for p in range(len(word)) for q in range(p + 1, len(word)) if word[p] > word[q])
            product[(a, b)] = {index[tuple(sorted(word))]: -1 if inversions % 2 else 1}
    return names, degrees, monos, product


def heisenberg(max_arity: int = 2) -> AInfinity:
    """Chevalley-Eilenberg algebra of the Heisenberg Lie algebra: ``dz = xy`` on ``Lambda(x, y, z)``."""
    names, degrees, monos, product = exterior_product(("x", "y", "z"))
    index = {m: a for a, m in enumerate(monos)}
    gen_d = {2: {index[(0, 1)]: 1}}  # dz = x y
    d: dict[int, dict[int, int]] = {}
    # extend as a derivation: d(a b) = da b + (-1)^|a| a db on monomials
    for a, m in enumerate(monos):
        img: dict[int, int] = {}
        for pos, gidx in enumerate(m):
            if gidx not in gen_d:
                continue
            sign = -1 if pos % 2 else 1
            for gimg, c in gen_d[gidx].items():
                left = index[m[:pos]]
                right = index[m[pos + 1:]]
                for k1, s1 in product.get((left, gimg), {}).items():
                    for k2, s2 in product.get((k1, right), {}).items():
                        img[k2] = img.get(k2, 0) + sign * c * s1 * s2
        img = {k: v for k, v in img.items() if v}
        if img:
            d[a] = img
    return from_dga(names, degrees, d, product, max_arity)


def heisenberg_omega(A: AInfinity | None = None) -> SymplecticForm:
    """``omega(sa, sb) = (-1)^{|a|} integral(a b)`` with ``integral(xyz) = 1``."""
    names, degrees, monos, product = exterior_product(("x", "y", "z"))
    basis = (A or heisenberg()).basis
    top = len(monos) - 1
    ent = {}
    for (a, b), img in product.items():
        c = img.get(top)
        if c:
            ent[(a, b)] = c if degrees[a] % 2 == 0 else -c
    return SymplecticForm(basis, ent)


def quiver(max_arity: int = 2) -> AInfinity:
    """Path algebra of ``1 -a-> 2 -b-> 3`` plus an arrow ``c : 1 -> 3`` with ``dc = ab``.

    Vertices have degree 0, arrows degree 1 and the path ``ab`` degree 2.  Its
    Maurer-Cartan set in degree one is the quadric ``gamma = +-alpha beta``.
    """
    names = ("e1", "e2", "e3", "a", "b", "c", "ab")
    degrees = (0, 0, 0, 1, 1, 1, 2)
    e1, e2, e3, a, b, c, ab = range(7)
    product = {
        (e1, e1): {e1: 1}, (e2, e2): {e2: 1}, (e3, e3): {e3: 1},
        (e1, a): {a: 1}, (a, e2): {a: 1},
        (e2, b): {b: 1}, (b, e3): {b: 1},
        (e1, c): {c: 1}, (c, e3): {c: 1},
        (a, b): {ab: 1}, (e1, ab): {ab: 1}, (ab, e3): {ab: 1},
    }
    return from_dga(names, degrees, {c: {ab: 1}}, product, max_arity)


def obstructed() -> AInfinity:
    """``a`` (degree 0), ``b`` (degree 1), ``m_2(a, a) = b`` and nothing else: ``hbar a`` is obstructed."""
    basis = GradedBasis(("a", "b"), (0, 1))
    return AInfinity(basis, {2: MultiMap(basis, basis, 2, 1, {((0, 0), 1): 1})}, 2)


def darboux_plane() -> tuple[SymplecticForm, "NCForm"]:
    """``{x (0), xi (1)}`` with ``omega(x, xi) = 1`` and the closed two-form ``Omega_0 + d[x x d xi]``."""
    from .ncgeom import NCForm, constant_form, ext_d

    basis = GradedBasis(("x", "xi"), (0, 1))
    omega = SymplecticForm.from_pairs(basis, {(0, 1): 1})
    alpha = NCForm(basis, {((0, 0), (0, 0), (1, 1)): 1}).quotient()
    return omega, constant_form(omega) + ext_d(alpha)


def shipped_specs() -> dict:
    """The fixture files shipped in ``ainfty/data`` as :class:`~ainfty.ais.SpecFile` objects."""
    from . import ais
    from .maurer_cartan import FormalSeries
    from .graded import Element
    from .ncgeom import action_from_structure
    from .poly import NCPoly

    h = heisenberg()
    hw = heisenberg_omega(h)
    q = quiver()
    dp, dpw, _, _ = darboux_pair()
    pw, pform = darboux_plane()
    seed = FormalSeries(q.basis, {1: Element(q.basis, {q.basis.index("a"): 1, q.basis.index("b"): 2})}, 1)
    ob = obstructed()
    ob_seed = FormalSeries(ob.basis, {1: Element(ob.basis, {0: 1})}, 1)
    x, xi = 0, 1
    polys = {
        "A": NCPoly(pw.basis, {(x, x, xi): 1}).quotient(),
        "B": NCPoly(pw.basis, {(x, xi): 1}).quotient(),
    }
    return {
        "contractible": ais.SpecFile(contractible(), name="contractible"),
        "matrix_units": ais.SpecFile(matrix_units(), name="matrix_units"),
        "heisenberg": ais.SpecFile(h, name="heisenberg", omega=hw,
                                   polys={"S": action_from_structure(hw, h)}),
        "darboux_pair": ais.SpecFile(dp, name="darboux_pair", omega=dpw),
        "quiver": ais.SpecFile(q, name="quiver", mc_seed=seed),
        "obstructed": ais.SpecFile(ob, name="obstructed", mc_seed=ob_seed),
        "plane": ais.SpecFile(AInfinity(pw.basis, {}, 1), name="plane", omega=pw, polys=polys, two_form=pform),
    }


def write_shipped(directory: str) -> list[str]:
    """Regenerate the shipped fixture files; returns the written paths."""
    import os

    from . import ais

    paths = []
    for name, spec in shipped_specs().items():
        path = os.path.join(directory, f"{name}.ais")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(ais.dumps(spec))
        paths.append(path)
    return paths
