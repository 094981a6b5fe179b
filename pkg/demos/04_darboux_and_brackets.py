"""Noncommutative forms, the covariant bracket, and Darboux coordinates on a plane."""

from __future__ import annotations

from ainfty.fixtures import darboux_plane, heisenberg, heisenberg_omega
from ainfty.ncgeom import (
    CovariantSymplectic,
    action_from_structure,
    const_bracket,
    constant_form,
    cov_bracket,
    darboux,
    ext_d,
    ext_d_inv,
    master_defect,
    pullback_form,
)
from ainfty.poly import NCPoly
from ainfty.scalars import format_scalar

w, Om = darboux_plane()
x, xi = 0, 1
print("two-form:", Om)
print("closed:", ext_d(Om).is_zero(), "  d d^-1 Om = Om:", ext_d(ext_d_inv(Om)) == Om)

A = NCPoly(w.basis, {(x, x, xi): 1}).quotient()
B = NCPoly(w.basis, {(x, xi): 1}).quotient()
print("\nconstant bracket (A, B):", const_bracket(w, A, B))
form = CovariantSymplectic(Om)
print("covariant bracket (A, B) through length 5:", cov_bracket(form, A, B, 5))

res = darboux(form, 4)
print("\nDarboux substitution:")
for i, name in enumerate(w.basis.names):
    terms = sorted(res.substitution.image(i).items(), key=lambda t: (len(t[0]), t[0]))
    print(f"  {name} ->", " + ".join(f"{format_scalar(c)} {'.'.join(w.basis.names[k] for k in word)}"
                                     for word, c in terms))
print("pullback constant:", pullback_form(res.substitution, Om, 4) == constant_form(w))

# the classical master equation (S, S) = 0 is the Stasheff identities in disguise
H = heisenberg(3)
hw = heisenberg_omega(H)
S = action_from_structure(hw, H)
print("\nHeisenberg action terms:", len(S.terms), "  (S, S) = 0:", master_defect(hw, S).is_zero())
