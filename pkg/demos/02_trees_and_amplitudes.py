"""Planar trees, their cyclic classes, and tree amplitudes on the Heisenberg model."""

from __future__ import annotations

from ainfty.fixtures import heisenberg, heisenberg_omega
from ainfty.splitting import omega_compatible_splitting
from ainfty.transfer import amplitude
from ainfty.trees import cyclic_classes, enumerate_trees

for k in range(1, 7):
    print(f"{k} leaves: {len(enumerate_trees(k))} planar trees")

print("\nthe eleven 4-leaf trees:")
for t in enumerate_trees(4):
    print("  ", t.bracket(), "vertices", t.vertices)

# forgetting the root: each class weighs 1/|automorphisms|
for n in (3, 4, 5, 6):
    print(f"\n{n} legs:")
    for c in cyclic_classes(n):
        print(f"   {c.representative.bracket():<16} fiber {len(c.fiber)}  factor {c.symmetric_factor}")

A = heisenberg()
w = heisenberg_omega(A)
split = omega_compatible_splitting(A, w)

for n in (3, 4, 5):
    rep = amplitude(A, w, split, n)
    print(f"\namplitude n={n}: three computations agree -> {rep.passed}")
    print("  ", rep.minimal_vertex)
