"""Noncommutative symplectic geometry on cyclic words.

Functions are :class:`~ainfty.poly.NCPoly` cyclic tensors, vector fields are
families of multilinear maps ``c^j_{i_1..i_k}`` acting on coordinate slots as
derivations, and forms are :class:`NCForm` cyclic tensors over letters
``(i, 0) = phi^i`` and ``(i, 1) = d phi^i``.

Conventions (all checked by the test suite):

* ``(A, B) = X_B(A)`` where ``X_B`` raises the first index of ``B``
  with ``(-1)^{(|B|+1) deg e_m} omega^{jm}``;
* the bracket is graded antisymmetric,
  ``(A, B) = -(-1)^{(|A|+1)(|B|+1)} (B, A)``, and satisfies
  ``(A, (B, C)) = ((A, B), C) + (-1)^{(|A|+1)(|B|+1)} (B, (A, C))``;
* a letter has bidegree ``(|e_i|, sharp)``; rotation and ``d`` use the sign
  ``(-1)^{|a||b| + sharp(a) sharp(b)}``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .algebra import AInfinity, Report, SymplecticForm
from .graded import BasisMismatch, GradedBasis, MultiMap, identity_map, insert, plug
from .poly import NCPoly
from .scalars import Scalar, as_scalar, format_scalar

__all__ = [
    "CovariantSymplectic",
    "CyclicDecomposition",
    "DarbouxResult",
    "NCForm",
    "NCGeometryError",
    "Substitution",
    "action_from_structure",
    "apply_vector_field",
    "constant_form",
    "contract_form",
    "covariant_field",
    "Bullet",
    "bullet_bracket",
    "const_bracket",
    "cyclic_symmetrize",
    "cov_bracket",
    "cyclic_decompose",
    "darboux",
    "ext_d",
    "ext_d_inv",
    "hamiltonian_vf",
    "hamiltonian_field",
    "jacobi_defect",
    "lie_derivative",
    "lower_map",
    "master_defect",
    "pullback_form",
    "solve_contraction",
    "symplectomorphism_flow",
    "verify_master",
]

_POINT = GradedBasis(("1",), (0,))

Letter = tuple[int, int]
FWord = tuple[Letter, ...]


class NCGeometryError(ValueError):
    """Raised for inputs outside the domain of a construction."""


def _parity(x: int) -> int:
    return x & 1


# ---------------------------------------------------------------------------
# functions and vector fields
# ---------------------------------------------------------------------------


def _split_by_degree(a: NCPoly) -> dict[tuple[int, int], NCPoly]:
    """Homogeneous pieces keyed by ``(length, function degree)``."""
    parts: dict[tuple[int, int], dict] = {}
    for word, c in a.terms.items():
        parts.setdefault((len(word), a.function_degree(word)), {})[word] = c
    return {k: NCPoly(a.basis, v) for k, v in parts.items()}


def _as_map(a: NCPoly, length: int, degree: int) -> MultiMap:
    return MultiMap(a.basis, _POINT, length, -degree,
                    {(w, 0): c for w, c in a.terms.items() if len(w) == length}, check=False)


def _from_map(m: MultiMap) -> NCPoly:
    return NCPoly(m.source, {ins: c for (ins, _), c in m.entries.items()})


def lower_map(omega: SymplecticForm, m: MultiMap) -> NCPoly:
    """``(-1)^{d o_1} omega(o_1, m(o_2, ..))`` for a map of degree ``d``.

    For ``d = 1`` this is the cyclic vertex of an A-infinity operation; the
    result is a plain tensor and need not be cyclic.
    """
    degs = omega.basis.degrees
    by_second: dict[int, list[tuple[int, Scalar]]] = {}
    for (i, j), c in omega.entries.items():
        by_second.setdefault(j, []).append((i, c))
    odd = _parity(m.degree)
    terms: dict[tuple[int, ...], Scalar] = {}
    for (ins, j), c in m.entries.items():
        for i, w in by_second.get(j, ()):
            v = -w * c if odd and degs[i] & 1 else w * c
            key = (i,) + ins
            terms[key] = terms.get(key, 0) + v
    return NCPoly(omega.basis, terms)


def hamiltonian_field(omega: SymplecticForm, b: NCPoly) -> list[MultiMap]:
    """Components of ``X_B``: ``c^j_K = sum_m (-1)^{(|B|+1) deg e_m} omega^{jm} b_{mK}``.

    One map per ``(arity, degree)``; the degree of ``X_B`` is ``|B| + 1``.
    Words of length one give arity-zero components.
    """
    if b.basis != omega.basis:
        raise BasisMismatch("polynomial and form live on different bases")
    degs = omega.basis.degrees
    inv = omega.inverse
    col: dict[int, list[tuple[int, Scalar]]] = {}
    for j in range(omega.basis.dim):
        for m in range(omega.basis.dim):
            if inv[j][m] != 0:
                col.setdefault(m, []).append((j, inv[j][m]))
    groups: dict[tuple[int, int], dict] = {}
    for word, v in b.terms.items():
        m, rest = word[0], word[1:]
        fd = b.function_degree(word)
        s = -v if _parity((fd + 1) * degs[m]) else v
        ent = groups.setdefault((len(rest), fd + 1), {})
        for j, w in col.get(m, ()):
            key = (rest, j)
            ent[key] = ent.get(key, 0) + s * w
    return [MultiMap(omega.basis, omega.basis, k, d, e) for (k, d), e in sorted(groups.items())]


def apply_vector_field(fields: Iterable[MultiMap], a: NCPoly) -> NCPoly:
    """The derivation with components ``fields`` applied to the cyclic function ``a``."""
    fields = list(fields)
    out: dict[tuple[int, ...], Scalar] = {}
    for (length, degree), piece in _split_by_degree(a).items():
        amap = _as_map(piece, length, degree)
        for c in fields:
            if c.arity == 0 and length == 0:
                continue
            acc = None
            for slot in range(length):
                t = insert(amap, slot, c)
                acc = t if acc is None else acc + t
            if acc is None:
                continue
            q = _from_map(acc).quotient()
            for w, v in q.terms.items():
                out[w] = out.get(w, 0) + Fraction(1, length) * v
    return NCPoly(a.basis, out)


def cyclic_symmetrize(p: NCPoly) -> NCPoly:
    """Projector onto cyclic tensors: ``(1/k) sum_r R^r`` on words of length ``k``."""
    return p.cyclic_symmetrize()


def const_bracket(omega: SymplecticForm, a: NCPoly, b: NCPoly) -> NCPoly:
    """The necklace bracket ``(A, B)`` of a constant odd symplectic form."""
    return apply_vector_field(hamiltonian_field(omega, b), a)


def action_from_structure(omega: SymplecticForm, A: AInfinity) -> NCPoly:
    """``S = sum_k V_{k+1}`` as one cyclic tensor (the function ``sum 1/(k+1) V_{k+1}(Phi..)``)."""
    out = NCPoly.zero(A.basis)
    for k in range(1, A.max_arity + 1):
        m = A.m(k)
        if not m.is_zero():
            out = out + lower_map(omega, m)
    return out


def hamiltonian_vf(omega: SymplecticForm, s: NCPoly, max_arity: int | None = None) -> AInfinity:
    """The operations ``m_k`` encoded by an action, i.e. the components of ``(., S)``.

    ``S`` must have degree zero and no constant or linear part.
    """
    if any(len(w) < 2 for w in s.terms):
        raise NCGeometryError("action has a constant or linear term; the vector field would have m_0")
    if s.degrees() - {0}:
        raise NCGeometryError(f"action must have degree 0, found {sorted(s.degrees())}")
    if not s.is_cyclic():
        raise NCGeometryError("action is not a cyclic tensor")
    maps = {m.arity: m for m in hamiltonian_field(omega, s)}
    top = max_arity if max_arity is not None else max(maps, default=1)
    return AInfinity(omega.basis, {k: v for k, v in maps.items() if k <= top}, top)


def master_defect(omega: SymplecticForm, s: NCPoly) -> NCPoly:
    """``(S, S)``; by duality it is the lowered Stasheff defect, up to the factor 2 per length."""
    return const_bracket(omega, s, s)


def verify_master(omega: SymplecticForm, s: NCPoly, max_length: int | None = None) -> Report:
    """Check ``(S, S) = 0`` through word length ``max_length``.

    The witness is the shortest word of a nonzero coefficient.
    """
    d = master_defect(omega, s)
    lengths = [L for L in d.lengths() if max_length is None or L <= max_length]
    for L in sorted(lengths):
        piece = d.homogeneous(L)
        if not piece.is_zero():
            word = min(piece.terms)
            names = tuple(omega.basis.names[i] for i in word)
            return Report(False, L, (L, names), f"(S,S) has coefficient {format_scalar(piece[word])} at {names}")
    return Report(True, max_length or 0, None, "")


# ---------------------------------------------------------------------------
# flows and the cyclic decomposition
# ---------------------------------------------------------------------------


def _check_generator(eps: NCPoly) -> None:
    if any(len(w) <= 2 for w in eps.terms):
        raise NCGeometryError("flow generator needs word length >= 3")
    if eps.degrees() - {-1}:
        raise NCGeometryError("flow generator must have degree -1")


def symplectomorphism_flow(omega: SymplecticForm, eps: NCPoly, a, max_length: int):
    """``exp((., eps)) A = sum_k (1/k!) (., eps)^k A`` truncated at word length ``max_length``.

    ``a`` may be a cyclic function, a :class:`Bullet` product or an
    :class:`NCForm` (acted on by the Lie derivative).  ``eps`` must have
    degree -1 and only words of length at least three, so every application
    raises the word length and the series terminates.
    """
    _check_generator(eps)
    field = hamiltonian_field(omega, eps)
    if isinstance(a, NCForm):
        step = lambda t: lie_derivative(field, t).truncate(max_length)  # noqa: E731
        total = a.truncate(max_length)
    elif isinstance(a, Bullet):
        step = lambda t: t.derive(field).truncate(max_length)  # noqa: E731
        total = a.truncate(max_length)
    else:
        step = lambda t: _truncate(apply_vector_field(field, t), max_length)  # noqa: E731
        total = _truncate(a, max_length)
    term = total
    k = 1
    while True:
        term = step(term).scale(Fraction(1, k))
        if term.is_zero():
            return total
        total = total + term
        k += 1


def _truncate(a: NCPoly, max_length: int) -> NCPoly:
    return NCPoly(a.basis, {w: c for w, c in a.terms.items() if len(w) <= max_length})


def _tensor_homotopy(split, v: NCPoly) -> NCPoly:
    """``v o h_hat`` with ``h_hat = sum_j P^{(j)} (x) Q+ (x) 1^{(n-j-1)}`` (Koszul signs)."""
    basis = v.basis
    ident = identity_map(basis)
    out = NCPoly.zero(basis)
    for (length, degree), piece in _split_by_degree(v).items():
        vm = _as_map(piece, length, degree)
        for j in range(length):
            inners = [split.proj] * j + [split.qplus] + [ident] * (length - j - 1)
            out = out + _from_map(plug(vm, inners))
    return out


def _project_harmonic(split, v: NCPoly) -> NCPoly:
    """``v o P^{(x)n}``."""
    out = NCPoly.zero(v.basis)
    for (length, degree), piece in _split_by_degree(v).items():
        out = out + _from_map(plug(_as_map(piece, length, degree), [split.proj] * length))
    return out


class CyclicDecomposition:
    """``S' = exp(..) S`` whose words of length >= 3 are harmonic; ``minimal`` lives on ``H^p``."""

    def __init__(self, action: NCPoly, minimal: NCPoly, generators: list[NCPoly]) -> None:
        self.action = action
        self.minimal = minimal
        self.generators = generators


def cyclic_decompose(omega: SymplecticForm, s: NCPoly, split, max_length: int) -> CyclicDecomposition:
    """Flow ``S`` so that every word of length >= 3 is fixed by ``P``.

    ``split`` must be omega-compatible.  At each length ``L`` the generator is
    ``eps_L = cyclic_symmetrize(S_L o h_hat)``; the flow by ``eps_L`` removes
    the non-harmonic part of ``S_L`` and otherwise only touches longer words.
    """
    from .transfer import _restrict_poly

    if not getattr(split, "omega_compatible", False):
        raise NCGeometryError("cyclic decomposition needs an omega-compatible splitting")
    current = _truncate(s, max_length)
    gens: list[NCPoly] = []
    for L in range(3, max_length + 1):
        piece = current.homogeneous(L)
        eps = _tensor_homotopy(split, piece).cyclic_symmetrize()
        if eps.is_zero():
            continue
        gens.append(eps)
        current = symplectomorphism_flow(omega, eps, current, max_length)
        rest = current.homogeneous(L)
        if _project_harmonic(split, rest) != rest:  # pragma: no cover - guarded by tests
            raise AssertionError(f"length {L} still has non-harmonic words")
    high = NCPoly(s.basis, {w: c for w, c in current.terms.items() if len(w) >= 3})
    harm = split.harmonic
    return CyclicDecomposition(current, _restrict_poly(high, harm.vectors, harm.basis), gens)


# ---------------------------------------------------------------------------
# forms
# ---------------------------------------------------------------------------


def _letter_sign(degs: Sequence[int], a: Letter, b: Letter) -> int:
    return -1 if _parity(degs[a[0]] * degs[b[0]] + a[1] * b[1]) else 1


class NCForm:
    """Cyclic noncommutative differential form stored as a full cyclic tensor.

    Letters are ``(i, 0)`` for ``phi^i`` and ``(i, 1)`` for ``d phi^i``.  The
    empty word is the constant ``1``.
    """

    __slots__ = ("basis", "terms")

    def __init__(self, basis: GradedBasis, terms: Mapping[FWord, object] | None = None) -> None:
        clean: dict[FWord, Scalar] = {}
        for w, c in (terms or {}).items():
            w = tuple((int(i), int(s)) for i, s in w)
            for i, s in w:
                if not 0 <= i < basis.dim or s not in (0, 1):
                    raise ValueError(f"bad letter {(i, s)}")
            v = as_scalar(c)
            if v != 0:
                clean[w] = clean.get(w, 0) + v
        self.basis = basis
        self.terms = {w: c for w, c in clean.items() if c != 0}

    @classmethod
    def zero(cls, basis: GradedBasis) -> "NCForm":
        return cls(basis)

    @classmethod
    def from_function(cls, a: NCPoly) -> "NCForm":
        return cls(a.basis, {tuple((i, 0) for i in w): c for w, c in a.terms.items()})

    def to_function(self) -> NCPoly:
        if any(s for w in self.terms for _, s in w):
            raise NCGeometryError("form has d-letters")
        return NCPoly(self.basis, {tuple(i for i, _ in w): c for w, c in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "NCForm") -> "NCForm":
        if other.basis != self.basis:
            raise BasisMismatch("forms on different bases")
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return NCForm(self.basis, out)

    def __neg__(self) -> "NCForm":
        return self.scale(-1)

    def __sub__(self, other: "NCForm") -> "NCForm":
        return self + (-other)

    def scale(self, s) -> "NCForm":
        s = as_scalar(s)
        return NCForm(self.basis, {w: c * s for w, c in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NCForm):
            return NotImplemented
        return self.basis == other.basis and self.terms == other.terms

    def __hash__(self) -> int:  # pragma: no cover
        return hash(frozenset(self.terms.items()))

    def __getitem__(self, word: Iterable[Letter]) -> Scalar:
        return self.terms.get(tuple(tuple(x) for x in word), 0)

    def form_degrees(self) -> set[int]:
        return {sum(s for _, s in w) for w in self.terms}

    def lengths(self) -> list[int]:
        return sorted({len(w) for w in self.terms})

    def homogeneous(self, length: int) -> "NCForm":
        return NCForm(self.basis, {w: c for w, c in self.terms.items() if len(w) == length})

    def truncate(self, max_length: int) -> "NCForm":
        return NCForm(self.basis, {w: c for w, c in self.terms.items() if len(w) <= max_length})

    def rotate(self) -> "NCForm":
        """``(R a)_{l_1 l_2 .. l_k} = sign(l_1, l_2..l_k) a_{l_2 .. l_k l_1}``."""
        degs = self.basis.degrees
        out: dict[FWord, Scalar] = {}
        for w, c in self.terms.items():
            if not w:
                out[w] = out.get(w, 0) + c
                continue
            new = (w[-1],) + w[:-1]
            s = 1
            for x in w[:-1]:
                s *= _letter_sign(degs, w[-1], x)
            out[new] = out.get(new, 0) + s * c
        return NCForm(self.basis, out)

    def quotient(self) -> "NCForm":
        out = NCForm.zero(self.basis)
        for L in self.lengths():
            piece = self.homogeneous(L)
            acc = piece
            cur = piece
            for _ in range(max(L, 1) - 1):
                cur = cur.rotate()
                acc = acc + cur
            out = out + acc
        return out

    def cyclic_symmetrize(self) -> "NCForm":
        out = NCForm.zero(self.basis)
        for L in self.lengths():
            out = out + self.homogeneous(L).quotient().scale(Fraction(1, max(L, 1)))
        return out

    def is_cyclic(self) -> bool:
        return self.rotate() == self

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        names = self.basis.names
        parts = []
        for w, c in sorted(self.terms.items()):
            word = " ".join(("d" if s else "") + names[i] for i, s in w) or "1"
            parts.append(f"{format_scalar(c)}*[{word}]")
        return " + ".join(parts)


def _letterwise(form: NCForm, src: int, dst: int) -> NCForm:
    """Sum over letters of sharpness ``src`` replaced by ``dst``, sign ``(-1)^{sharp before}``."""
    out: dict[FWord, Scalar] = {}
    for w, c in form.terms.items():
        sharp = 0
        for p, (i, s) in enumerate(w):
            if s == src:
                new = w[:p] + ((i, dst),) + w[p + 1:]
                v = -c if sharp & 1 else c
                out[new] = out.get(new, 0) + v
            sharp += s
    return NCForm(form.basis, out)


def ext_d(form: NCForm) -> NCForm:
    """Exterior derivative, letterwise ``phi^i -> d phi^i``."""
    return _letterwise(form, 0, 1)


def ext_d_inv(form: NCForm) -> NCForm:
    """Homotopy ``d^{-1} = (1/k) iota_E`` on words of length ``k`` (``iota_E d phi = phi``).

    ``d d^{-1} + d^{-1} d`` is the identity on words of positive length.
    """
    out = NCForm.zero(form.basis)
    for L in form.lengths():
        if L == 0:
            continue
        out = out + _letterwise(form.homogeneous(L), 1, 0).scale(Fraction(1, L))
    return out


# ---------------------------------------------------------------------------
# contraction and substitution
# ---------------------------------------------------------------------------


def _field_entries(fields: Iterable[MultiMap]) -> dict[int, list[tuple[tuple[int, ...], Scalar, int]]]:
    out: dict[int, list] = {}
    for c in fields:
        for (ins, j), v in c.entries.items():
            out.setdefault(j, []).append((ins, v, c.degree))
    return out


def contract_form(fields: Iterable[MultiMap], form: NCForm) -> NCForm:
    """``iota_X`` of a cyclic form: each ``d phi^j`` is replaced by ``X(phi^j)``.

    The sign is ``(-1)^{|X| |before| + sharp(before)}``; the result is
    projected back to a cyclic tensor.
    """
    degs = form.basis.degrees
    comp = _field_entries(fields)
    raw: dict[FWord, Scalar] = {}
    for w, c in form.terms.items():
        L = len(w)
        deg_before = 0
        sharp_before = 0
        for p, (i, s) in enumerate(w):
            if s == 1:
                for ins, v, xd in comp.get(i, ()):
                    sign = -1 if _parity(xd * deg_before + sharp_before) else 1
                    new = w[:p] + tuple((k, 0) for k in ins) + w[p + 1:]
                    raw[new] = raw.get(new, 0) + Fraction(sign, L) * c * v
            deg_before += degs[i]
            sharp_before += s
    return NCForm(form.basis, raw).quotient()


def lie_derivative(fields: Sequence[MultiMap], form: NCForm) -> NCForm:
    """``L_X = d iota_X + iota_X d`` for an even vector field ``X``."""
    return ext_d(contract_form(fields, form)) + contract_form(fields, ext_d(form))


class Substitution:
    """A formal coordinate change ``phi^i -> phi^i + f^i(phi)``.

    ``f[i]`` maps words (tuples of coordinate indices, length >= 2) to
    coefficients; words are plain, not cyclic.
    """

    def __init__(self, basis: GradedBasis, f: Mapping[int, Mapping[tuple[int, ...], object]] | None = None) -> None:
        self.basis = basis
        self.f: dict[int, dict[tuple[int, ...], Scalar]] = {}
        for i, poly in (f or {}).items():
            clean = {tuple(w): as_scalar(c) for w, c in poly.items() if as_scalar(c) != 0}
            for w in clean:
                if len(w) < 2:
                    raise NCGeometryError("substitutions must start at word length 2")
                if sum(basis.degrees[k] for k in w) != basis.degrees[i]:
                    raise NCGeometryError(f"f^{basis.names[i]} is not homogeneous of the coordinate's degree")
            if clean:
                self.f[i] = clean

    @classmethod
    def identity(cls, basis: GradedBasis) -> "Substitution":
        return cls(basis)

    def image(self, i: int) -> dict[tuple[int, ...], Scalar]:
        out: dict[tuple[int, ...], Scalar] = {(i,): 1}
        out.update(self.f.get(i, {}))
        return out

    def after(self, inner: "Substitution", max_length: int) -> "Substitution":
        """``self o inner``: first substitute by ``self``, then by ``inner``."""
        f: dict[int, dict] = {}
        for i in range(self.basis.dim):
            res: dict[tuple[int, ...], Scalar] = {}
            for word, c in self.image(i).items():
                for w2, c2 in _substitute_word(inner, word, max_length).items():
                    res[w2] = res.get(w2, 0) + c * c2
            res.pop((i,), None)
            f[i] = {w: c for w, c in res.items() if c != 0 and len(w) <= max_length}
        return Substitution(self.basis, f)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Substitution):
            return NotImplemented
        return self.basis == other.basis and self.f == other.f

    def __repr__(self) -> str:
        names = self.basis.names
        rows = []
        for i, poly in sorted(self.f.items()):
            body = " + ".join(f"{format_scalar(c)}*{'.'.join(names[k] for k in w)}" for w, c in sorted(poly.items()))
            rows.append(f"{names[i]} -> {names[i]} + {body}")
        return "; ".join(rows) or "id"


def _substitute_word(sub: Substitution, word: tuple[int, ...], max_length: int) -> dict[tuple[int, ...], Scalar]:
    acc: dict[tuple[int, ...], Scalar] = {(): 1}
    for i in word:
        nxt: dict[tuple[int, ...], Scalar] = {}
        for w, c in acc.items():
            for piece, v in sub.image(i).items():
                new = w + piece
                if len(new) <= max_length:
                    nxt[new] = nxt.get(new, 0) + c * v
        acc = nxt
    return acc


def _d_image(sub: Substitution, i: int) -> dict[FWord, Scalar]:
    """``d(phi^i + f^i)`` as letter words (``f^i`` has no d-letters, so no signs)."""
    out: dict[FWord, Scalar] = {}
    for w, c in sub.image(i).items():
        for p in range(len(w)):
            key = tuple((k, 1 if q == p else 0) for q, k in enumerate(w))
            out[key] = out.get(key, 0) + c
    return out


def pullback_form(sub: Substitution, form: NCForm, max_length: int) -> NCForm:
    """Substitute letterwise; every image has the bidegree of its letter, so no signs arise."""
    images: dict[Letter, dict[FWord, Scalar]] = {}
    for i in range(sub.basis.dim):
        images[(i, 0)] = {tuple((k, 0) for k in w): c for w, c in sub.image(i).items()}
        images[(i, 1)] = _d_image(sub, i)
    raw: dict[FWord, Scalar] = {}
    for w, c in form.terms.items():
        L = len(w)
        acc: dict[FWord, Scalar] = {(): Fraction(1, max(L, 1)) * c}
        for letter in w:
            nxt: dict[FWord, Scalar] = {}
            for u, v in acc.items():
                for piece, x in images[letter].items():
                    new = u + piece
                    if len(new) <= max_length:
                        nxt[new] = nxt.get(new, 0) + v * x
            acc = nxt
        for u, v in acc.items():
            raw[u] = raw.get(u, 0) + v
    return NCForm(form.basis, raw).quotient()


# ---------------------------------------------------------------------------
# covariant symplectic forms
# ---------------------------------------------------------------------------


def constant_form(omega: SymplecticForm) -> NCForm:
    """The cyclic two-form with ``[d phi^i d phi^j]`` coefficient ``omega_ij``."""
    return NCForm(omega.basis, {((i, 1), (j, 1)): c for (i, j), c in omega.entries.items()})


class CovariantSymplectic:
    """A two-form ``Omega`` whose length-two part is a constant symplectic form.

    The entries ``omega_{ij,IJ}`` are the coefficients of the words
    ``d phi^i phi^I d phi^j phi^J``.  Closedness is not required here;
    :meth:`is_closed` reports it.
    """

    def __init__(self, form: NCForm) -> None:
        if form.form_degrees() - {2}:
            raise NCGeometryError("not a two-form")
        if not form.is_cyclic():
            raise NCGeometryError("two-form is not cyclic")
        if any(len(w) < 2 for w in form.terms):
            raise NCGeometryError("two-form has words shorter than two letters")
        basis = form.basis
        const = {(w[0][0], w[1][0]): c for w, c in form.terms.items() if len(w) == 2}
        self.form = form
        self.basis = basis
        self.constant = SymplecticForm(basis, const)
        if any(sum(basis.degrees[i] for i, _ in w) != 1 for w in form.terms):
            raise NCGeometryError("two-form must have degree -1 throughout")

    @classmethod
    def from_entries(cls, omega: SymplecticForm, entries: Mapping[tuple[int, int, tuple[int, ...], tuple[int, ...]], object]) -> "CovariantSymplectic":
        """Build ``Omega`` from ``omega`` plus coefficients of ``d i I d j J`` (cyclically symmetrized)."""
        raw: dict[FWord, Scalar] = {}
        for (i, j, I, J), c in entries.items():
            w = ((i, 1),) + tuple((k, 0) for k in I) + ((j, 1),) + tuple((k, 0) for k in J)
            raw[w] = raw.get(w, 0) + as_scalar(c)
        return cls(constant_form(omega) + NCForm(omega.basis, raw).cyclic_symmetrize())

    def entry(self, i: int, j: int, I: Sequence[int], J: Sequence[int]) -> Scalar:
        w = ((i, 1),) + tuple((k, 0) for k in I) + ((j, 1),) + tuple((k, 0) for k in J)
        return self.form[w]

    def is_closed(self) -> bool:
        return ext_d(self.form).is_zero()

    def closedness_witness(self) -> FWord | None:
        dd = ext_d(self.form)
        return min(dd.terms) if dd.terms else None

    def max_length(self) -> int:
        return max(self.form.lengths())


def _constant_block(omega: SymplecticForm, rest: tuple[int, ...]) -> list[list[Scalar]]:
    """``M[m][j]``: coefficient of ``d phi^m phi^K`` in ``iota_X Omega_0`` for ``X(phi^j) = phi^K``."""
    basis = omega.basis
    degs = basis.degrees
    omega0 = constant_form(omega)
    dim = basis.dim
    M = [[Fraction(0)] * dim for _ in range(dim)]
    K = tuple((k, 0) for k in rest)
    for j in range(dim):
        xd = degs[j] - sum(degs[k] for k in rest)
        unit = MultiMap(basis, basis, len(rest), xd, {(rest, j): 1}, check=False)
        beta = contract_form([unit], omega0)
        for m in range(dim):
            M[m][j] = beta[((m, 1),) + K]
    return M


def solve_contraction(omega: SymplecticForm, beta: NCForm) -> list[MultiMap]:
    """The vector field ``X`` with ``iota_X Omega_0 = beta`` for a cyclic one-form ``beta``.

    ``beta`` is read at its words ``d phi^m phi^K``; one small linear solve
    per ``K`` inverts the contraction exactly.
    """
    from .linalg import solve

    basis = omega.basis
    degs = basis.degrees
    rows: dict[tuple[int, ...], list[Scalar]] = {}
    for w, c in beta.terms.items():
        if any(s for _, s in w[1:]) or w[0][1] != 1:
            if sum(s for _, s in w) != 1:
                raise NCGeometryError("expected a one-form")
            continue
        rest = tuple(k for k, _ in w[1:])
        rows.setdefault(rest, [Fraction(0)] * basis.dim)[w[0][0]] = c
    groups: dict[tuple[int, int], dict] = {}
    for rest, rhs in sorted(rows.items()):
        M = _constant_block(omega, rest)
        x = solve(M, [[v] for v in rhs])
        if x is None:
            raise NCGeometryError("contraction with the constant form is not invertible")
        for j in range(basis.dim):
            v = x[j][0]
            if v != 0:
                xd = degs[j] - sum(degs[k] for k in rest)
                groups.setdefault((len(rest), xd), {})[(rest, j)] = v
    return [MultiMap(basis, basis, k, d, e) for (k, d), e in sorted(groups.items())]


def _one_form_d(b: NCPoly) -> NCForm:
    return ext_d(NCForm.from_function(b))


def covariant_field(Omega: CovariantSymplectic, b: NCPoly, max_length: int) -> list[MultiMap]:
    """Hamiltonian field ``theta_B`` with ``iota_theta Omega = -d B``, solved word length by length.

    The sign makes ``theta_B`` agree with :func:`hamiltonian_field` when
    ``Omega`` is constant.

    Only the part of ``theta_B`` that influences brackets through word length
    ``max_length`` is computed.
    """
    omega = Omega.constant
    db = -_one_form_d(b)
    higher = Omega.form - constant_form(omega)
    solved: list[MultiMap] = []
    for ell in range(1, max_length + 1):
        rhs = db.homogeneous(ell)
        for L in higher.lengths():
            n = ell + 1 - L
            if n < 0:
                continue
            part = [c for c in solved if c.arity == n]
            if part:
                rhs = rhs - contract_form(part, higher.homogeneous(L)).homogeneous(ell)
        if rhs.is_zero():
            continue
        solved.extend(solve_contraction(omega, rhs))
    return solved


def cov_bracket(Omega: CovariantSymplectic, a: NCPoly, b: NCPoly, max_length: int) -> NCPoly:
    """``(A, B)_Omega = theta_B(A)`` through word length ``max_length``.

    The Jacobi identity holds exactly when ``Omega`` is closed.
    """
    if a.basis != Omega.basis or b.basis != Omega.basis:
        raise BasisMismatch("bracket arguments on a different basis")
    field = covariant_field(Omega, b, max_length)
    return _truncate(apply_vector_field(field, a), max_length)


def jacobi_defect(bracket, a: NCPoly, b: NCPoly, c: NCPoly) -> NCPoly:
    """``(A,(B,C)) - ((A,B),C) - (-1)^{(|A|+1)(|B|+1)} (B,(A,C))`` for homogeneous ``A, B``."""
    da = _single_degree(a)
    db = _single_degree(b)
    s = -1 if _parity((da + 1) * (db + 1)) else 1
    return bracket(a, bracket(b, c)) - bracket(bracket(a, b), c) - bracket(b, bracket(a, c)).scale(s)


def _single_degree(a: NCPoly) -> int:
    degs = a.degrees()
    if len(degs) > 1:
        raise NCGeometryError("element is not homogeneous")
    return degs.pop() if degs else 0


def _field_to_substitution(basis: GradedBasis, fields: Iterable[MultiMap]) -> Substitution:
    f: dict[int, dict[tuple[int, ...], Scalar]] = {}
    for c in fields:
        if c.degree != 0:
            raise NCGeometryError("coordinate changes come from degree-0 vector fields")
        for (ins, j), v in c.entries.items():
            f.setdefault(j, {})[ins] = f.get(j, {}).get(ins, 0) + v
    return Substitution(basis, f)


class DarbouxResult:
    """Output of :func:`darboux`: ``substitution`` pulls ``Omega`` back to ``pulled``."""

    def __init__(self, substitution: Substitution, pulled: NCForm, steps: list[Substitution], max_length: int) -> None:
        self.substitution = substitution
        self.pulled = pulled
        self.steps = steps
        self.max_length = max_length

    def is_constant(self) -> bool:
        return all(len(w) == 2 for w in self.pulled.terms)

    def __repr__(self) -> str:
        return f"DarbouxResult({self.substitution!r}, through length {self.max_length})"


def darboux(Omega: CovariantSymplectic, max_length: int) -> DarbouxResult:
    """Coordinates in which a closed ``Omega`` is constant through word length ``max_length``.

    At length ``L`` the lowest nonconstant piece is exact, ``Omega_L = d alpha``
    with ``alpha = d^{-1} Omega_L``; the substitution ``phi -> phi + X(phi)``
    with ``iota_X Omega_0 = -alpha`` removes it.
    """
    if not Omega.is_closed():
        word = Omega.closedness_witness()
        names = " ".join(("d" if sh else "") + basis_name for basis_name, sh in
                         ((Omega.basis.names[i], sh) for i, sh in word))
        raise NCGeometryError(f"two-form is not closed at word length {len(word)}: d Omega contains [{names}]")
    omega = Omega.constant
    basis = Omega.basis
    current = Omega.form.truncate(max_length)
    total = Substitution.identity(basis)
    steps: list[Substitution] = []
    for L in range(3, max_length + 1):
        piece = current.homogeneous(L)
        if piece.is_zero():
            continue
        alpha = ext_d_inv(piece)
        step = _field_to_substitution(basis, solve_contraction(omega, -alpha))
        steps.append(step)
        current = pullback_form(step, current, max_length)
        if not current.homogeneous(L).is_zero():  # pragma: no cover - guarded by tests
            raise AssertionError(f"Darboux step failed to clear length {L}")
        total = total.after(step, max_length)
    return DarbouxResult(total, current, steps, max_length)


# ---------------------------------------------------------------------------
# the bullet product
# ---------------------------------------------------------------------------


def _canonical_word(word: tuple[int, ...], degrees: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
    """Least rotation of ``word`` and the sign with ``[word] = sign [least]``; sign 0 if the class vanishes."""
    from .poly import rotation_orbit

    best = None
    seen: dict[tuple[int, ...], int] = {}
    for w, s in rotation_orbit(word, degrees):
        if w in seen and seen[w] != s:
            return word, 0
        seen[w] = s
        if best is None or w < best[0]:
            best = (w, s)
    assert best is not None
    return best


class Bullet:
    """Graded-commutative products of cyclic words (the bullet product on cyclic functions).

    A monomial is a sorted tuple of least-rotation words; the coefficient
    absorbs rotation and reordering signs.  Only what the Leibniz and
    algebra-map checks need is implemented.
    """

    __slots__ = ("basis", "terms")

    def __init__(self, basis: GradedBasis, terms: Mapping[tuple[tuple[int, ...], ...], object] | None = None) -> None:
        self.basis = basis
        out: dict[tuple[tuple[int, ...], ...], Scalar] = {}
        for mono, c in (terms or {}).items():
            key, s = self._normalize(mono)
            if s:
                out[key] = out.get(key, 0) + s * as_scalar(c)
        self.terms = {k: v for k, v in out.items() if v != 0}

    def _fdeg(self, word: tuple[int, ...]) -> int:
        return -sum(self.basis.degrees[i] for i in word)

    def _normalize(self, mono) -> tuple[tuple[tuple[int, ...], ...], int]:
        degs = self.basis.degrees
        sign = 1
        words = []
        for w in mono:
            cw, s = _canonical_word(tuple(w), degs)
            if s == 0:
                return (), 0
            sign *= s
            words.append(cw)
        # insertion sort with Koszul signs for adjacent swaps
        for i in range(1, len(words)):
            j = i
            while j > 0 and words[j - 1] > words[j]:
                if _parity(self._fdeg(words[j - 1]) * self._fdeg(words[j])):
                    sign = -sign
                words[j - 1], words[j] = words[j], words[j - 1]
                j -= 1
        for a, b in zip(words, words[1:]):
            if a == b and _parity(self._fdeg(a)):
                return (), 0
        return tuple(words), sign

    @classmethod
    def of(cls, a: NCPoly) -> "Bullet":
        """A cyclic function as a one-factor element."""
        return cls(a.basis, {(w,): Fraction(c, len(w)) if w else c for w, c in a.terms.items()})

    def __add__(self, other: "Bullet") -> "Bullet":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return Bullet(self.basis, out)

    def __neg__(self) -> "Bullet":
        return self.scale(-1)

    def __sub__(self, other: "Bullet") -> "Bullet":
        return self + (-other)

    def scale(self, s) -> "Bullet":
        s = as_scalar(s)
        return Bullet(self.basis, {k: v * s for k, v in self.terms.items()})

    def __mul__(self, other: "Bullet") -> "Bullet":
        out: dict = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                key = k1 + k2
                out[key] = out.get(key, 0) + v1 * v2
        return Bullet(self.basis, out)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Bullet):
            return NotImplemented
        return self.basis == other.basis and self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    def truncate(self, max_length: int) -> "Bullet":
        return Bullet(self.basis, {k: v for k, v in self.terms.items() if sum(map(len, k)) <= max_length})

    def derive(self, fields: Sequence[MultiMap]) -> "Bullet":
        """Extend a vector field to products: ``X(B C) = X(B) C + (-1)^{|X||B|} B X(C)``."""
        out = Bullet(self.basis)
        for mono, c in self.terms.items():
            for p, w in enumerate(mono):
                before = sum(self._fdeg(x) for x in mono[:p])
                for field in fields:
                    image = apply_vector_field([field], _orbit_tensor(w, self.basis))
                    s = -1 if _parity(field.degree * before) else 1
                    left = Bullet(self.basis, {mono[:p]: 1})
                    right = Bullet(self.basis, {mono[p + 1:]: 1})
                    out = out + (left * Bullet.of(image) * right).scale(s * c)
        return out

    def __repr__(self) -> str:
        names = self.basis.names
        parts = [f"{format_scalar(v)}*" + "•".join("[" + " ".join(names[i] for i in w) + "]" for w in k)
                 for k, v in sorted(self.terms.items())]
        return " + ".join(parts) or "0"


def _orbit_tensor(word: tuple[int, ...], basis: GradedBasis) -> NCPoly:
    """Cyclic tensor whose function is the class ``[word]``."""
    return NCPoly(basis, {word: 1}).quotient()


def bullet_bracket(omega: SymplecticForm, a: Bullet, b: NCPoly) -> Bullet:
    """``(X, B)`` for a product ``X`` in the first slot: the derivation ``X_B`` applied to ``X``."""
    return a.derive(hamiltonian_field(omega, b))
