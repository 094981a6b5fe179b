"""Minimal model of the Heisenberg Chevalley-Eilenberg algebra, step by step."""

from __future__ import annotations

from ainfty.algebra import verify_ainfty, verify_morphism
from ainfty.fixtures import heisenberg
from ainfty.graded import Element, contract
from ainfty.splitting import build_splitting, verify_split
from ainfty.transfer import transfer

# Lambda(x, y, z) with dz = xy, suspended so every m_k has degree +1
A = heisenberg()
print("basis:", dict(zip(A.basis.names, A.basis.degrees)))
print("stasheff up to arity 5:", verify_ainfty(A, 5).summary())

# Q Q+ + Q+ Q + P = 1; the image of P is the cohomology
split = build_splitting(A)
print("splitting:", verify_split(split, A).summary())
print("harmonic part:", split.harmonic.basis.names)

# sum over planar trees, -Q+ on internal edges; recursion and tree sum are compared internally
res = transfer(A, split, 4)
print("recursion = tree sum:", res.checks)
M = res.minimal
print("minimal model m1 vanishes:", M.m(1).is_zero())
print("minimal stasheff:", verify_ainfty(M, 4).summary())
print("quasi-isomorphism:", verify_morphism(res.morphism, M, A, 4).summary())

# the triple product sees the Massey product <x, y, y>
hp = M.basis
unit = lambda s: Element.unit(hp, hp.index(s))  # noqa: E731
for word in (("x", "y", "y"), ("x", "x", "y"), ("y", "x", "y")):
    print(f"m3{word} =", contract(M.m(3), [unit(s) for s in word]))
