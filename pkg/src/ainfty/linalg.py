"""Exact dense linear algebra over Q or Q(i).

Thin adapters around :class:`sympy.polys.matrices.DomainMatrix`; matrices are
plain lists of rows holding canonical scalars.  Pivoting is the deterministic
leftmost-column rule of reduced row echelon form.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from sympy import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix

from .scalars import GaussianRational, Scalar, canonical

__all__ = [
    "Matrix",
    "column_space",
    "group_inverse",
    "identity",
    "inverse",
    "matmul",
    "nullspace",
    "rank",
    "rref",
    "solve",
    "transpose",
    "zeros",
]

Matrix = list[list[Scalar]]


def zeros(rows: int, cols: int) -> Matrix:
    return [[Fraction(0)] * cols for _ in range(rows)]


def identity(n: int) -> Matrix:
    out = zeros(n, n)
    for i in range(n):
        out[i][i] = Fraction(1)
    return out


def transpose(a: Matrix) -> Matrix:
    return [list(r) for r in zip(*a)] if a else []


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    out = zeros(len(a), cols)
    for i, row in enumerate(a):
        for k in range(inner):
            x = row[k]
            if x == 0:
                continue
            bk = b[k]
            for j in range(cols):
                if bk[j] != 0:
                    out[i][j] = out[i][j] + x * bk[j]
    return out


def _is_gaussian(rows: Sequence[Sequence[Scalar]]) -> bool:
    return any(isinstance(x, GaussianRational) for r in rows for x in r)


def _to_dm(rows: Sequence[Sequence[Scalar]], ncols: int | None = None) -> DomainMatrix:
    nrows = len(rows)
    ncols = len(rows[0]) if rows else (ncols or 0)
    if _is_gaussian(rows):
        dom = QQ_I

        def conv(x):
            if isinstance(x, GaussianRational):
                return QQ_I(QQ(x.re.numerator, x.re.denominator), QQ(x.im.numerator, x.im.denominator))
            q = Fraction(x)
            return QQ_I(QQ(q.numerator, q.denominator), QQ(0))

    else:
        dom = QQ

        def conv(x):
            q = Fraction(x)
            return QQ(q.numerator, q.denominator)

    return DomainMatrix([[conv(x) for x in r] for r in rows], (nrows, ncols), dom)


def _from_elem(x) -> Scalar:
    if hasattr(x, "x") and hasattr(x, "y"):
        re = Fraction(int(x.x.numerator), int(x.x.denominator))
        im = Fraction(int(x.y.numerator), int(x.y.denominator))
        return canonical(GaussianRational(re, im))
    return Fraction(int(x.numerator), int(x.denominator))


def _from_dm(m: DomainMatrix) -> Matrix:
    return [[_from_elem(x) for x in row] for row in m.to_list()]


def rref(a: Matrix) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row echelon form and pivot columns."""
    if not a:
        return [], ()
    r, piv = _to_dm(a).rref()
    return _from_dm(r), tuple(piv)


def rank(a: Matrix) -> int:
    if not a or not a[0]:
        return 0
    return len(rref(a)[1])


def nullspace(a: Matrix, ncols: int | None = None) -> list[list[Scalar]]:
    """Basis of ``{x : a x = 0}`` (one vector per free column, in column order)."""
    n = len(a[0]) if a else (ncols or 0)
    if not a:
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    r, piv = rref(a)
    free = [j for j in range(n) if j not in piv]
    basis = []
    for f in free:
        v: list[Scalar] = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, p in enumerate(piv):
            v[p] = -r[row][f]
        basis.append(v)
    return basis


def column_space(a: Matrix) -> list[list[Scalar]]:
    """Pivot columns of ``a`` (a basis of its image, deterministic)."""
    if not a:
        return []
    _, piv = rref(a)
    return [[row[p] for row in a] for p in piv]


def inverse(a: Matrix) -> Matrix:
    if not a:
        return []
    return _from_dm(_to_dm(a).inv())


def solve(a: Matrix, b: Matrix) -> Matrix | None:
    """A particular solution ``x`` of ``a x = b`` (free variables zero), or None."""
    rows = len(a)
    n = len(a[0]) if rows else 0
    k = len(b[0]) if b else 0
    aug = [list(a[i]) + list(b[i]) for i in range(rows)]
    if not aug:
        return zeros(n, k)
    r, piv = rref(aug)
    if any(p >= n for p in piv):
        return None
    x = zeros(n, k)
    for row, p in enumerate(piv):
        for j in range(k):
            x[p][j] = r[row][n + j]
    return x


def group_inverse(a: Matrix) -> Matrix:
    """Group inverse ``a#`` with ``a a# = a# a`` the projector onto im(a) along ker(a).

    Raises ``ValueError`` when im(a) and ker(a) intersect (index > 1).
    """
    n = len(a)
    if n == 0:
        return []
    img = column_space(a)
    ker = nullspace(a)
    basis_cols = img + ker
    if len(basis_cols) != n or rank(transpose(basis_cols)) != n:
        raise ValueError("image and kernel are not complementary")
    b = transpose(basis_cols)
    binv = inverse(b)
    k = len(img)
    # a restricted to im(a), written in the image basis
    coords = matmul(binv, matmul(a, transpose(img))) if k else []
    block = [row[:k] for row in coords[:k]]
    inv_block = inverse(block) if k else []
    d = zeros(n, n)
    for i in range(k):
        for j in range(k):
            d[i][j] = inv_block[i][j]
    return matmul(b, matmul(d, binv))
