"""The ``.ais`` algebra specification format: JSON text with string-encoded exact scalars.

A file holds a basis, the operations ``m_k`` and optional extras (symplectic
form, homotopy ``Q+``, a morphism into a nested target algebra, a
Maurer-Cartan seed, named cyclic polynomials and a two-form).  Serialization
is canonical: entries are sorted by basis order, scalars are reduced and the
layout is fixed, so parsing and re-serializing a canonical file reproduces it
byte for byte.

Cyclic polynomials and forms are written one entry per rotation class, with
the coefficient of the function itself (the ``1/k`` of the tensor convention
already applied).
"""

from __future__ import annotations

import json
import dataclasses
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .algebra import AInfinity, Morphism, SymplecticForm
from .graded import DegreeError, Element, GradedBasis, MultiMap
from .linalg import identity, matmul
from .maurer_cartan import FormalSeries
from .ncgeom import NCForm, _canonical_word
from .poly import NCPoly
from .scalars import GaussianRational, Scalar, format_scalar, parse_scalar
from .splitting import Splitting

__all__ = ["SpecError", "SpecFile", "dumps", "loads", "splitting_from_qplus"]

FORMAT = "ais-1"
FIELDS = ("rational", "gaussian-rational")


class SpecError(ValueError):
    """Malformed input; ``location`` is a JSON path or a line/column pair."""

    def __init__(self, location: str, message: str) -> None:
        super().__init__(f"{location}: {message}")
        self.location = location
        self.message = message


@dataclass
class SpecFile:
    algebra: AInfinity
    field: str = "rational"
    name: str | None = None
    omega: SymplecticForm | None = None
    qplus: MultiMap | None = None
    morphism: Morphism | None = None
    target: "SpecFile | None" = None
    mc_seed: FormalSeries | None = None
    polys: dict[str, NCPoly] = dataclasses.field(default_factory=dict)
    two_form: NCForm | None = None

    @property
    def basis(self) -> GradedBasis:
        return self.algebra.basis

    def splitting(self) -> Splitting | None:
        if self.qplus is None:
            return None
        return splitting_from_qplus(self.algebra, self.qplus)


def splitting_from_qplus(A: AInfinity, qplus: MultiMap) -> Splitting:
    """``P = 1 - Q Q+ - Q+ Q`` for a supplied homotopy; verification is the caller's job."""
    q = A.m(1).to_matrix()
    h = qplus.to_matrix()
    n = A.basis.dim
    qh = matmul(q, h)
    hq = matmul(h, q)
    ident = identity(n)
    pmat = [[ident[i][j] - qh[i][j] - hq[i][j] for j in range(n)] for i in range(n)]
    return Splitting(A.basis, qplus, MultiMap.from_matrix(A.basis, pmat, 0))


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


def _expect(cond: bool, loc: str, msg: str) -> None:
    if not cond:
        raise SpecError(loc, msg)


def _scalar(value: Any, loc: str, fld: str) -> Scalar:
    _expect(isinstance(value, str), loc, "coefficients must be strings such as \"3/4\"")
    try:
        c = parse_scalar(value)
    except ValueError as exc:
        raise SpecError(loc, str(exc)) from None
    if fld == "rational" and isinstance(c, GaussianRational):
        raise SpecError(loc, "imaginary coefficient in a rational file")
    return c


def _name(basis: GradedBasis, value: Any, loc: str) -> int:
    _expect(isinstance(value, str), loc, "basis names must be strings")
    try:
        return basis.index(value)
    except (KeyError, ValueError):
        raise SpecError(loc, f"unknown basis element {value!r}") from None


def _basis(data: Any, loc: str) -> GradedBasis:
    _expect(isinstance(data, list) and data, loc, "basis must be a non-empty list")
    names, degs = [], []
    for i, item in enumerate(data):
        here = f"{loc}[{i}]"
        _expect(isinstance(item, dict) and set(item) == {"name", "degree"}, here,
                "basis entries are {\"name\", \"degree\"}")
        nm, dg = item["name"], item["degree"]
        _expect(isinstance(nm, str) and nm and not any(ch.isspace() or ch in "()" for ch in nm), here,
                "names are non-empty strings without spaces or parentheses")
        _expect(isinstance(dg, int) and not isinstance(dg, bool), here, "degree must be an integer")
        _expect(nm not in names, here, f"duplicate name {nm!r}")
        names.append(nm)
        degs.append(dg)
    return GradedBasis(tuple(names), tuple(degs))


def _entries(data: Any, loc: str, source: GradedBasis, target: GradedBasis, arity: int, degree: int,
             fld: str) -> MultiMap:
    _expect(isinstance(data, list), loc, "expected a list of entries")
    ent: dict = {}
    for i, item in enumerate(data):
        here = f"{loc}[{i}]"
        _expect(isinstance(item, dict) and set(item) == {"in", "out", "coeff"}, here,
                "entries are {\"in\", \"out\", \"coeff\"}")
        _expect(isinstance(item["in"], list) and len(item["in"]) == arity, here, f"expected {arity} inputs")
        ins = tuple(_name(source, x, f"{here}.in") for x in item["in"])
        out = _name(target, item["out"], f"{here}.out")
        c = _scalar(item["coeff"], f"{here}.coeff", fld)
        _expect((ins, out) not in ent, here, "duplicate entry")
        want = sum(source.degrees[k] for k in ins) + degree
        if target.degrees[out] != want:
            raise SpecError(here, f"degree-inhomogeneous entry ({', '.join(item['in'])}) -> {item['out']}: "
                                  f"output degree {target.degrees[out]}, expected {want}")
        ent[(ins, out)] = c
    try:
        return MultiMap(source, target, arity, degree, ent)
    except DegreeError as exc:  # pragma: no cover - caught above
        raise SpecError(loc, str(exc)) from None


def _arity_table(data: Any, loc: str) -> dict[int, Any]:
    _expect(isinstance(data, dict), loc, "expected an object keyed by arity")
    out = {}
    for key, val in data.items():
        _expect(key.isdigit() and int(key) >= 1 and str(int(key)) == key, f"{loc}.{key}",
                "keys are positive integers")
        out[int(key)] = val
    return out


def _cyclic_poly(data: Any, loc: str, basis: GradedBasis, fld: str) -> NCPoly:
    _expect(isinstance(data, list), loc, "expected a list of {\"word\", \"coeff\"}")
    acc = NCPoly.zero(basis)
    for i, item in enumerate(data):
        here = f"{loc}[{i}]"
        _expect(isinstance(item, dict) and set(item) == {"word", "coeff"}, here, "entries are {\"word\", \"coeff\"}")
        _expect(isinstance(item["word"], list) and item["word"], here, "word must be a non-empty list")
        word = tuple(_name(basis, x, f"{here}.word") for x in item["word"])
        c = _scalar(item["coeff"], f"{here}.coeff", fld)
        _, s = _canonical_word(word, basis.degrees)
        _expect(s != 0, here, "this word's cyclic class is zero (odd rotation symmetry)")
        acc = acc + NCPoly(basis, {word: 1}).quotient().scale(c)
    return acc


def _letter(basis: GradedBasis, value: Any, loc: str) -> tuple[int, int]:
    _expect(isinstance(value, str), loc, "letters are strings \"x\" or \"d(x)\"")
    if value.startswith("d(") and value.endswith(")"):
        return _name(basis, value[2:-1], loc), 1
    return _name(basis, value, loc), 0


def _form(data: Any, loc: str, basis: GradedBasis, fld: str) -> NCForm:
    _expect(isinstance(data, list), loc, "expected a list of {\"word\", \"coeff\"}")
    acc = NCForm.zero(basis)
    for i, item in enumerate(data):
        here = f"{loc}[{i}]"
        _expect(isinstance(item, dict) and set(item) == {"word", "coeff"}, here, "entries are {\"word\", \"coeff\"}")
        _expect(isinstance(item["word"], list) and item["word"], here, "word must be a non-empty list")
        word = tuple(_letter(basis, x, f"{here}.word") for x in item["word"])
        c = _scalar(item["coeff"], f"{here}.coeff", fld)
        q = NCForm(basis, {word: 1}).quotient()
        _expect(not q.is_zero(), here, "this word's cyclic class is zero (odd rotation symmetry)")
        acc = acc + q.scale(c)
    return acc


_TOP_KEYS = {"format", "name", "field", "basis", "max-arity", "maps", "omega", "splitting", "morphism",
             "mc-seed", "polys", "two-form"}


def _from_obj(obj: Any, loc: str = "$", nested: bool = False) -> SpecFile:
    _expect(isinstance(obj, dict), loc, "top level must be an object")
    unknown = set(obj) - _TOP_KEYS
    _expect(not unknown, loc, f"unknown keys {sorted(unknown)}")
    if not nested:
        _expect(obj.get("format") == FORMAT, f"{loc}.format", f"expected \"{FORMAT}\"")
    fld = obj.get("field", "rational")
    _expect(fld in FIELDS, f"{loc}.field", f"field must be one of {FIELDS}")
    name = obj.get("name")
    _expect(name is None or isinstance(name, str), f"{loc}.name", "name must be a string")
    basis = _basis(obj.get("basis"), f"{loc}.basis")
    max_arity = obj.get("max-arity")
    _expect(isinstance(max_arity, int) and not isinstance(max_arity, bool) and max_arity >= 1,
            f"{loc}.max-arity", "max-arity must be a positive integer")
    maps = {}
    for k, data in _arity_table(obj.get("maps", {}), f"{loc}.maps").items():
        _expect(k <= max_arity, f"{loc}.maps.{k}", f"arity exceeds max-arity {max_arity}")
        maps[k] = _entries(data, f"{loc}.maps.{k}", basis, basis, k, 1, fld)
    A = AInfinity(basis, maps, max_arity)
    spec = SpecFile(A, fld, name)
    if "omega" in obj:
        here = f"{loc}.omega"
        data = obj["omega"]
        _expect(isinstance(data, list), here, "expected a list of {\"in\": [a, b], \"coeff\"}")
        ent = {}
        for i, item in enumerate(data):
            at = f"{here}[{i}]"
            _expect(isinstance(item, dict) and set(item) == {"in", "coeff"}, at, "entries are {\"in\", \"coeff\"}")
            _expect(isinstance(item["in"], list) and len(item["in"]) == 2, at, "omega entries take two inputs")
            a, b = (_name(basis, x, f"{at}.in") for x in item["in"])
            ent[(a, b)] = _scalar(item["coeff"], f"{at}.coeff", fld)
        try:
            spec.omega = SymplecticForm(basis, ent)
        except ValueError as exc:
            raise SpecError(here, str(exc)) from None
    if "splitting" in obj:
        here = f"{loc}.splitting"
        data = obj["splitting"]
        _expect(isinstance(data, dict) and set(data) == {"qplus"}, here, "splitting is {\"qplus\": [...]}")
        spec.qplus = _entries(data["qplus"], f"{here}.qplus", basis, basis, 1, -1, fld)
    if "morphism" in obj:
        here = f"{loc}.morphism"
        data = obj["morphism"]
        _expect(isinstance(data, dict) and set(data) == {"target", "components"}, here,
                "morphism is {\"target\", \"components\"}")
        target = _from_obj(data["target"], f"{here}.target", nested=True)
        comps = {}
        for k, v in _arity_table(data["components"], f"{here}.components").items():
            _expect(k <= max_arity, f"{here}.components.{k}", f"arity exceeds max-arity {max_arity}")
            comps[k] = _entries(v, f"{here}.components.{k}", basis, target.basis, k, 0, fld)
        spec.target = target
        spec.morphism = Morphism(basis, target.basis, comps, max_arity)
    if "mc-seed" in obj:
        here = f"{loc}.mc-seed"
        terms = {}
        for n, data in _arity_table(obj["mc-seed"], here).items():
            _expect(isinstance(data, list), f"{here}.{n}", "expected a list of {\"name\", \"coeff\"}")
            coeffs = {}
            for i, item in enumerate(data):
                at = f"{here}.{n}[{i}]"
                _expect(isinstance(item, dict) and set(item) == {"name", "coeff"}, at,
                        "entries are {\"name\", \"coeff\"}")
                idx = _name(basis, item["name"], f"{at}.name")
                _expect(basis.degrees[idx] == 0, at, "seed components must have degree 0")
                coeffs[idx] = _scalar(item["coeff"], f"{at}.coeff", fld)
            terms[n] = Element(basis, coeffs)
        spec.mc_seed = FormalSeries(basis, terms, max(terms, default=1))
    if "polys" in obj:
        here = f"{loc}.polys"
        _expect(isinstance(obj["polys"], dict), here, "polys is an object of named polynomials")
        spec.polys = {k: _cyclic_poly(v, f"{here}.{k}", basis, fld) for k, v in obj["polys"].items()}
    if "two-form" in obj:
        spec.two_form = _form(obj["two-form"], f"{loc}.two-form", basis, fld)
    return spec


def loads(text: str | bytes) -> SpecFile:
    """Parse and validate; raises :class:`SpecError` with a location on any problem."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SpecError(f"byte {exc.start}", "input is not UTF-8") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    return _from_obj(obj)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _map_entries(m: MultiMap) -> list[dict]:
    src, tgt = m.source.names, m.target.names
    return [{"coeff": format_scalar(c), "in": [src[i] for i in ins], "out": tgt[out]}
            for (ins, out), c in sorted(m.entries.items())]


def _poly_entries(p: NCPoly) -> list[dict]:
    classes: dict[tuple[int, ...], Scalar] = {}
    for w, c in p.terms.items():
        rep, s = _canonical_word(w, p.basis.degrees)
        if s == 0:
            continue
        classes[rep] = classes.get(rep, 0) + s * Fraction(1, len(w)) * c
    names = p.basis.names
    return [{"coeff": format_scalar(c), "word": [names[i] for i in w]}
            for w, c in sorted(classes.items()) if c != 0]


def _form_entries(f: NCForm) -> list[dict]:
    names = f.basis.names
    out = []
    for L in f.lengths():
        piece = f.homogeneous(L)
        seen: set = set()
        for w in sorted(piece.terms):
            if w in seen:
                continue
            orbit = []
            cur = w
            for _ in range(L):
                orbit.append(cur)
                cur = cur[1:] + cur[:1]
            seen.update(orbit)
            rep = min(orbit)
            # coefficient of the class [rep] in (1/L) sum_w f_w [w]
            c = piece[rep] * Fraction(len(set(orbit)), L)
            if c != 0:
                letters = [f"d({names[i]})" if s else names[i] for i, s in rep]
                out.append((rep, {"coeff": format_scalar(c), "word": letters}))
    return [e for _, e in sorted(out, key=lambda t: (len(t[0]), t[0]))]


def _to_obj(spec: SpecFile, nested: bool = False) -> dict:
    A = spec.algebra
    obj: dict[str, Any] = {}
    if not nested:
        obj["format"] = FORMAT
    if spec.name is not None:
        obj["name"] = spec.name
    obj["field"] = spec.field
    obj["basis"] = [{"degree": d, "name": n} for n, d in zip(A.basis.names, A.basis.degrees)]
    obj["max-arity"] = A.max_arity
    obj["maps"] = {str(k): _map_entries(A.m(k)) for k in sorted(A.maps)}
    if spec.omega is not None:
        names = A.basis.names
        obj["omega"] = [{"coeff": format_scalar(c), "in": [names[i], names[j]]}
                        for (i, j), c in sorted(spec.omega.entries.items())]
    if spec.qplus is not None:
        obj["splitting"] = {"qplus": _map_entries(spec.qplus)}
    if spec.morphism is not None:
        if spec.target is None:
            raise ValueError("a morphism needs its target algebra to be serialized")
        F = spec.morphism
        obj["morphism"] = {
            "components": {str(k): _map_entries(F.f(k)) for k in range(1, F.max_arity + 1) if not F.f(k).is_zero()},
            "target": _to_obj(spec.target, nested=True),
        }
    if spec.mc_seed is not None:
        names = A.basis.names
        obj["mc-seed"] = {str(n): [{"coeff": format_scalar(c), "name": names[i]} for i, c in sorted(e.coeffs.items())]
                          for n, e in sorted(spec.mc_seed.terms.items())}
    if spec.polys:
        obj["polys"] = {k: _poly_entries(v) for k, v in sorted(spec.polys.items())}
    if spec.two_form is not None:
        obj["two-form"] = _form_entries(spec.two_form)
    return obj


def _leaf(x: Any) -> bool:
    if isinstance(x, dict):
        return all(not isinstance(v, (dict, list)) or (isinstance(v, list) and all(not isinstance(u, (dict, list)) for u in v))
                   for v in x.values())
    return not isinstance(x, list)


def _emit(x: Any, indent: int) -> str:
    pad = "  " * (indent + 1)
    if isinstance(x, dict):
        if not x:
            return "{}"
        items = [f"{pad}{json.dumps(k, ensure_ascii=False)}: {_emit(v, indent + 1)}" for k, v in sorted(x.items())]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(x, list):
        if not x:
            return "[]"
        if all(_leaf(v) for v in x):
            if all(not isinstance(v, dict) for v in x):
                return json.dumps(x, ensure_ascii=False, separators=(", ", ": "))
            lines = [pad + json.dumps(v, ensure_ascii=False, sort_keys=True, separators=(", ", ": ")) for v in x]
            return "[\n" + ",\n".join(lines) + "\n" + "  " * indent + "]"
        lines = [pad + _emit(v, indent + 1) for v in x]
        return "[\n" + ",\n".join(lines) + "\n" + "  " * indent + "]"
    return json.dumps(x, ensure_ascii=False)


def dumps(spec: SpecFile) -> str:
    """Canonical text: sorted keys, one entry per line, trailing newline."""
    return _emit(_to_obj(spec), 0) + "\n"


def load_path(path: str) -> SpecFile:
    with open(path, "rb") as fh:
        return loads(fh.read())


__all__ += ["load_path", "FORMAT"]
