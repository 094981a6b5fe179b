"""Hodge-Kodaira splittings ``Q Q^+ + Q^+ Q + P = Id`` of a complex ``(H, Q)``.

Three constructors are provided: a plain one by deterministic elimination, an
``omega``-compatible one, and the BV propagator built from a Darboux splitting
into fields and antifields.  Every constructor checks its own output.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from . import linalg
from .algebra import AInfinity, Report, SymplecticForm
from .graded import GradedBasis, MultiMap
from .scalars import Scalar

__all__ = [
    "Harmonic",
    "Splitting",
    "SplittingError",
    "build_splitting",
    "omega_compatible_splitting",
    "propagator_splitting",
    "verify_split",
]


class SplittingError(ValueError):
    """The input does not admit the requested splitting."""


@dataclass(frozen=True)
class Harmonic:
    """The summand ``H^p = im P`` with inclusion ``iota`` and projection ``pi``."""

    basis: GradedBasis
    iota: MultiMap  # H^p -> H
    pi: MultiMap  # H -> H^p
    vectors: tuple[dict[int, Scalar], ...]


@dataclass(frozen=True)
class Splitting:
    basis: GradedBasis
    qplus: MultiMap
    proj: MultiMap
    omega_compatible: bool = False

    @cached_property
    def harmonic(self) -> Harmonic:
        pmat = self.proj.to_matrix()
        _, piv = linalg.rref(pmat) if pmat else ([], ())
        cols = [[row[p] for row in pmat] for p in piv]
        sub = self.basis.sub(list(piv))
        n = self.basis.dim
        if cols:
            v = linalg.transpose(cols)  # n x r
            pi_mat = linalg.solve(v, pmat)
            assert pi_mat is not None
        else:
            v = [[] for _ in range(n)]
            pi_mat = []
        iota = MultiMap(sub, self.basis, 1, 0,
                        {((a,), i): v[i][a] for a in range(len(piv)) for i in range(n) if v[i][a] != 0})
        pi = MultiMap(self.basis, sub, 1, 0,
                      {((i,), a): pi_mat[a][i] for a in range(len(piv)) for i in range(n) if pi_mat[a][i] != 0})
        vectors = tuple({i: v[i][a] for i in range(n) if v[i][a] != 0} for a in range(len(piv)))
        return Harmonic(sub, iota, pi, vectors)

    def dims_by_degree(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for d in self.harmonic.basis.degrees:
            out[d] = out.get(d, 0) + 1
        return out


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _block(mat, rows: Sequence[int], cols: Sequence[int]):
    return [[mat[r][c] for c in cols] for r in rows]


def _embed(vec: Sequence[Scalar], idx: Sequence[int], n: int) -> list[Scalar]:
    out = [Fraction(0)] * n
    for a, i in enumerate(idx):
        out[i] = vec[a]
    return out


def _extend(chosen: list[list[Scalar]], candidates: Sequence[list[Scalar]]) -> list[list[Scalar]]:
    """Greedily append candidates that raise the rank (first candidate first)."""
    picked = []
    r = linalg.rank(linalg.transpose(chosen)) if chosen else 0
    for c in candidates:
        trial = chosen + picked + [c]
        rk = linalg.rank(linalg.transpose(trial))
        if rk > r:
            picked.append(c)
            r = rk
    return picked


def _unit(n: int, i: int) -> list[Scalar]:
    v = [Fraction(0)] * n
    v[i] = Fraction(1)
    return v


def _matrix_q(A: AInfinity):
    return A.m(1).to_matrix()


def _decomposition(A: AInfinity):
    """Per-degree bases of ``im Q``, a complement ``H^p`` in ``ker Q`` and a complement ``U``."""
    basis = A.basis
    n = basis.dim
    q = _matrix_q(A)
    images: list[list[Scalar]] = []
    harm: list[list[Scalar]] = []
    comp: list[list[Scalar]] = []
    for d in sorted(set(basis.degrees)):
        idx = basis.indices_of_degree(d)
        up = basis.indices_of_degree(d + 1)
        down = basis.indices_of_degree(d - 1)
        ker_local = linalg.nullspace(_block(q, up, idx), ncols=len(idx)) if up else [
            _unit(len(idx), a) for a in range(len(idx))]
        ker = [_embed(v, idx, n) for v in ker_local]
        img = []
        if down:
            img_local = linalg.column_space(_block(q, idx, down))
            img = [_embed(v, idx, n) for v in img_local]
        images += img
        harm += _extend(img, ker)
        comp += _extend(ker, [_unit(n, i) for i in idx])
    return images, harm, comp


def _assemble(A: AInfinity, harm: list[list[Scalar]], comp: list[list[Scalar]],
              omega_compatible: bool = False) -> Splitting:
    basis = A.basis
    n = basis.dim
    q = _matrix_q(A)
    qu = [[sum((q[r][c] * u[c] for c in range(n) if u[c] != 0), Fraction(0)) for r in range(n)] for u in comp]
    cols = qu + comp + harm
    if len(cols) != n:
        raise SplittingError("complements do not span H")
    b = linalg.transpose(cols)
    binv = linalg.inverse(b)
    t, u = len(qu), len(comp)
    dq = linalg.zeros(n, n)  # Q u_a <- sends column a (in Hᵗ) to column t + a (in U)
    dp = linalg.zeros(n, n)
    for a in range(t):
        dq[t + a][a] = Fraction(1)
    for a in range(t + u, n):
        dp[a][a] = Fraction(1)
    qplus = linalg.matmul(b, linalg.matmul(dq, binv))
    proj = linalg.matmul(b, linalg.matmul(dp, binv))
    return Splitting(basis, MultiMap.from_matrix(basis, qplus, -1), MultiMap.from_matrix(basis, proj, 0),
                     omega_compatible)


def _require_differential(A: AInfinity) -> None:
    q = _matrix_q(A)
    if any(x != 0 for row in linalg.matmul(q, q) for x in row):
        raise SplittingError("Q^2 != 0: not a complex")


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def build_splitting(A: AInfinity) -> Splitting:
    """Deterministic splitting: ``H^p`` from kernel vectors, ``U`` from unit vectors."""
    _require_differential(A)
    _, harm, comp = _decomposition(A)
    split = _assemble(A, harm, comp)
    _assert_ok(verify_split(split, A))
    return split


def _assert_ok(rep: Report) -> None:
    if not rep.passed:
        raise SplittingError(f"constructed splitting failed verification: {rep.summary()}")


def omega_compatible_splitting(A: AInfinity, omega: SymplecticForm) -> Splitting:
    """Splitting with ``omega(H^p, H^u) = 0`` and ``omega(H^u, H^u) = 0``."""
    if omega.basis != A.basis:
        raise SplittingError("omega lives on a different basis")
    _require_differential(A)
    n = A.basis.dim
    q = _matrix_q(A)
    w = omega.matrix
    # arity-one cyclicity: omega(Q x, y) = -(-1)^x omega(x, Q y)
    wq = linalg.matmul(w, q)
    qtw = linalg.matmul(linalg.transpose(q), w)
    for i in range(n):
        for j in range(n):
            s = -1 if A.basis.degrees[i] % 2 == 0 else 1
            if qtw[i][j] != s * wq[i][j]:
                raise SplittingError("omega(., Q .) is not graded symmetric")
    images, harm, comp = _decomposition(A)

    def pair(x, y):
        return sum((x[i] * w[i][j] * y[j] for i in range(n) if x[i] != 0 for j in range(n) if y[j] != 0),
                   Fraction(0))

    # shift U by H^p so that omega(H^p, U) = 0
    if harm and comp:
        wpp = [[pair(p1, p2) for p2 in harm] for p1 in harm]
        rhs = [[pair(p1, u) for u in comp] for p1 in harm]
        c = linalg.solve(wpp, rhs)
        if c is None:
            raise SplittingError("omega is degenerate on H^p")
        comp = [[u[i] - sum((c[a][k] * harm[a][i] for a in range(len(harm))), Fraction(0)) for i in range(n)]
                for k, u in enumerate(comp)]
    # shift U by im Q so that omega(U, U) = 0
    if comp:
        qu = [[sum((q[r][c2] * u[c2] for c2 in range(n) if u[c2] != 0), Fraction(0)) for r in range(n)]
              for u in comp]
        wtu = [[pair(t, u) for u in comp] for t in qu]
        wuu = [[pair(u1, u2) for u2 in comp] for u1 in comp]
        # X wtu = -1/2 wuu, i.e. wtu^T X^T = -1/2 wuu^T
        xt = linalg.solve(linalg.transpose(wtu), [[-r / 2 for r in row] for row in linalg.transpose(wuu)])
        if xt is None:
            raise SplittingError("omega pairs im Q degenerately with the complement")
        x = linalg.transpose(xt)
        comp = [[u[i] + sum((x[k][a] * qu[a][i] for a in range(len(qu))), Fraction(0)) for i in range(n)]
                for k, u in enumerate(comp)]
    split = _assemble(A, harm, comp, omega_compatible=True)
    _assert_ok(verify_split(split, A, omega))
    return split


def propagator_splitting(A: AInfinity, omega: SymplecticForm, fields: Sequence[int],
                         antifields: Sequence[int]) -> Splitting:
    """The BV propagator splitting for a Darboux partition ``fields[a] <-> antifields[a]``.

    Darboux form means ``omega(field_a, antifield_b) = -delta_ab`` with both
    Lagrangian blocks isotropic.  Properness asks for a symplectic change of
    basis ``T = 1 + N`` (``N`` sends antifields to fields) bringing ``Q`` to the
    block form with only the field-to-antifield block ``c3``; the propagator is
    the group inverse of ``c3`` conjugated back by ``T``.
    """
    basis = A.basis
    n = basis.dim
    fields, antifields = list(fields), list(antifields)
    if len(fields) != len(antifields) or sorted(fields + antifields) != list(range(n)):
        raise SplittingError("fields and antifields must partition the basis")
    r = len(fields)
    for a in range(r):
        for b in range(r):
            want = Fraction(-1) if a == b else Fraction(0)
            if omega(fields[a], antifields[b]) != want:
                raise SplittingError("omega is not in Darboux form for this partition")
            if omega(fields[a], fields[b]) != 0 or omega(antifields[a], antifields[b]) != 0:
                raise SplittingError("omega is not in Darboux form for this partition")
    _require_differential(A)
    order = fields + antifields
    q = _matrix_q(A)
    qb = [[q[i][j] for j in order] for i in order]  # Q in the (fields, antifields) basis
    c1 = [row[:r] for row in qb[:r]]
    c2 = [row[r:] for row in qb[:r]]
    c3 = [row[:r] for row in qb[r:]]
    c4 = [row[r:] for row in qb[r:]]
    degs = basis.degrees
    # unknowns N[b][a] = component of T(antifield_a) on field_b, degree-preserving only
    unknowns = [(b, a) for b in range(r) for a in range(r) if degs[fields[b]] == degs[antifields[a]]]
    pos = {u: k for k, u in enumerate(unknowns)}
    rows: list[list[Scalar]] = []
    rhs: list[Scalar] = []

    def eq(coeffs: dict[int, Scalar], value: Scalar) -> None:
        row = [Fraction(0)] * len(unknowns)
        for k, c in coeffs.items():
            row[k] += c
        rows.append(row)
        rhs.append(value)

    for i in range(r):
        for j in range(r):
            # c1 + N c3 = 0
            co: dict[int, Scalar] = {}
            for k in range(r):
                if (i, k) in pos and c3[k][j] != 0:
                    co[pos[(i, k)]] = co.get(pos[(i, k)], 0) + c3[k][j]
            eq(co, -c1[i][j])
            # c2 + N c4 = 0
            co = {}
            for k in range(r):
                if (i, k) in pos and c4[k][j] != 0:
                    co[pos[(i, k)]] = co.get(pos[(i, k)], 0) + c4[k][j]
            eq(co, -c2[i][j])
            # c4 = c3 N
            co = {}
            for k in range(r):
                if (k, j) in pos and c3[i][k] != 0:
                    co[pos[(k, j)]] = co.get(pos[(k, j)], 0) + c3[i][k]
            eq(co, c4[i][j])
            # omega(N a*, b*) + omega(a*, N b*) = 0 with omega(f_b, a*) = -delta
            co = {}
            if (j, i) in pos:
                co[pos[(j, i)]] = co.get(pos[(j, i)], 0) - 1
            if (i, j) in pos:
                co[pos[(i, j)]] = co.get(pos[(i, j)], 0) + 1
            eq(co, Fraction(0))
    if unknowns:
        sol = linalg.solve(rows, [[v] for v in rhs])
    else:
        sol = [] if all(v == 0 for v in rhs) else None
    if sol is None:
        raise SplittingError("not proper: no symplectic gauge-fixing transformation exists")
    nmat = linalg.zeros(r, r)
    for (b, a), k in pos.items():
        nmat[b][a] = sol[k][0]
    try:
        x = linalg.group_inverse(c3) if r else []
    except ValueError as exc:
        raise SplittingError("not proper: kernel and image of the kinetic block intersect") from exc
    # assemble in the (fields, antifields) basis, then conjugate back
    tb = linalg.identity(n)
    tinv = linalg.identity(n)
    for b in range(r):
        for a in range(r):
            tb[b][r + a] = nmat[b][a]
            tinv[b][r + a] = -nmat[b][a]
    qplus_b = linalg.zeros(n, n)
    for b in range(r):
        for a in range(r):
            qplus_b[b][r + a] = x[b][a]
    qplus_b = linalg.matmul(tinv, linalg.matmul(qplus_b, tb))
    qplus = linalg.zeros(n, n)
    for i in range(n):
        for j in range(n):
            qplus[order[i]][order[j]] = qplus_b[i][j]
    qq = linalg.matmul(q, qplus)
    qpq = linalg.matmul(qplus, q)
    proj = [[(Fraction(int(i == j)) - qq[i][j] - qpq[i][j]) for j in range(n)] for i in range(n)]
    split = Splitting(basis, MultiMap.from_matrix(basis, qplus, -1), MultiMap.from_matrix(basis, proj, 0), True)
    _assert_ok(verify_split(split, A, omega))
    return split


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


def verify_split(split: Splitting, A: AInfinity, omega: SymplecticForm | None = None,
                 side_conditions: bool = True) -> Report:
    """Entrywise check of the splitting identities (and omega-compatibility if given)."""
    if split.basis != A.basis or (omega is not None and omega.basis != A.basis):
        raise SplittingError("splitting, algebra and omega must share one basis")
    n = A.basis.dim
    names = A.basis.names
    q = _matrix_q(A)
    qp = split.qplus.to_matrix()
    p = split.proj.to_matrix()
    mm = linalg.matmul
    eye = linalg.identity(n)
    zero = linalg.zeros(n, n)
    qqp = mm(q, qp)
    qpq = mm(qp, q)
    checks = [
        ("QQ+ + Q+Q + P = Id", [[qqp[i][j] + qpq[i][j] + p[i][j] for j in range(n)] for i in range(n)], eye),
        ("P^2 = P", mm(p, p), p),
        ("QP = 0", mm(q, p), zero),
        ("PQ = 0", mm(p, q), zero),
        ("QQ+Q = Q", mm(qqp, q), q),
        ("Q+QQ+ = Q+", mm(qpq, qp), qp),
    ]
    if side_conditions:
        checks += [
            ("Q+Q+ = 0", mm(qp, qp), zero),
            ("Q+P = 0", mm(qp, p), zero),
            ("PQ+ = 0", mm(p, qp), zero),
        ]
    if omega is not None:
        w = omega.matrix
        degs = A.basis.degrees
        # omega o (1 (x) Q+) (x, y) = (-1)^x omega(x, Q+ y); omega o (Q+ (x) 1) (x, y) = omega(Q+ x, y)
        left = mm(w, qp)
        right = mm(linalg.transpose(qp), w)
        signed = [[left[i][j] if degs[i] % 2 == 0 else -left[i][j] for j in range(n)] for i in range(n)]
        checks.append(("omega(1 (x) Q+) = omega(Q+ (x) 1)", signed, right))
        checks.append(("omega(1 (x) P) = omega(P (x) 1)", mm(w, p), mm(linalg.transpose(p), w)))
    count = 0
    for label, got, want in checks:
        for i in range(n):
            for j in range(n):
                count += 1
                if got[i][j] != want[i][j]:
                    return Report(False, count, (label, names[i], names[j]), f"{label} fails")
    return Report(True, count)
