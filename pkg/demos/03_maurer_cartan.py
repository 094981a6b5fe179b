"""Solving the Maurer-Cartan equation order by order, and moving solutions by gauge."""

from __future__ import annotations

import random

from ainfty.fixtures import heisenberg, heisenberg_omega, obstructed, quiver
from ainfty.graded import GradedBasis, MultiMap
from ainfty.maurer_cartan import FormalSeries, gauge_apply, mc_defect, mc_solve, pushforward
from ainfty.splitting import build_splitting, omega_compatible_splitting
from ainfty.transfer import transfer


def seed(basis: GradedBasis, data: dict, order: int) -> FormalSeries:
    return FormalSeries.from_dict(basis, {o: {basis.index(n): c for n, c in t.items()} for o, t in data.items()}, order)


# the quiver 1 -a-> 2 -b-> 3 with dc = ab: a first-order seed forces a correction in c
Q = quiver()
phi, ob = mc_solve(Q, build_splitting(Q), seed(Q.basis, {1: {"a": 1, "b": 2}}, 4), 4)
for n in range(1, 5):
    print(f"quiver hbar^{n}: Phi = {phi[n]}   obstruction = {ob[n]}")

# m2(a, a) = b with nothing to cancel it
B = obstructed()
phi, ob = mc_solve(B, build_splitting(B), seed(B.basis, {1: {"a": 1}}, 3), 3)
print("\nobstructed: first obstruction at hbar^%s" % ob.first_nonzero(), "->", ob[ob.first_nonzero()])

# on the Heisenberg model every cohomology seed extends, and the solution is F_*(seed)
H = heisenberg()
split = omega_compatible_splitting(H, heisenberg_omega(H))
res = transfer(H, split, 5)
data = {1: {"x": 1, "y": -1}, 2: {"y": 2}}
phi, ob = mc_solve(H, split, seed(H.basis, data, 5), 5)
pushed = pushforward(res.morphism, seed(res.minimal.basis, data, 5), 5)
print("\nheisenberg obstruction zero:", ob.is_zero(), " defect zero:", mc_defect(H, phi).is_zero())
print("pushforward agrees:", all(pushed[n] == phi[n] for n in range(1, 6)))

# gauge: alpha = sum hbar^o alpha_{o,k} with degree -1 components
rng = random.Random(7)
Q = quiver()
phi, _ = mc_solve(Q, build_splitting(Q), seed(Q.basis, {1: {"a": 1, "b": 2}}, 4), 4)
alpha = {(1, 1): MultiMap(Q.basis, Q.basis, 1, -1, {((Q.basis.index("c"),), Q.basis.index("e1")): rng.randint(1, 3)}),
         (1, 0): MultiMap(Q.basis, Q.basis, 0, -1, {})}
moved = gauge_apply(Q, alpha, phi, 4, check=False)
print("\ngauge moved Phi:", moved != phi, " still MC:", mc_defect(Q, moved, 4).is_zero())
