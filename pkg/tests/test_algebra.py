from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ainfty.algebra import (
    AInfinity,
    Morphism,
    SymplecticForm,
    compose,
    cyclic_vertex,
    identity_morphism,
    invert,
    morphism_defect,
    pullback_structure,
    stasheff_defect,
    structure_from_action,
    verify_ainfty,
    verify_cyclic_morphism,
    verify_cyclicity,
    verify_morphism,
)
from ainfty.fixtures import (
    contractible,
    darboux_pair,
    exterior_product,
    from_dga,
    heisenberg,
    heisenberg_omega,
    matrix_units,
    obstructed,
    quiver,
)
from ainfty.graded import DegreeError, GradedBasis, MultiMap

from helpers import random_map

FIXTURES = {
    "contractible": contractible,
    "matrix_units": matrix_units,
    "heisenberg": heisenberg,
    "quiver": quiver,
    "obstructed": obstructed,
    "darboux_pair": lambda: darboux_pair()[0],
}


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_fixtures_satisfy_stasheff(name):
    rep = verify_ainfty(FIXTURES[name](), 5)
    assert rep.passed, rep.summary()
    assert rep.checked == 5


def test_exterior_algebra_zero_differential():
    names, degrees, _, product = exterior_product(("x", "y"))
    assert verify_ainfty(from_dga(names, degrees, {}, product), 5).passed


def test_broken_associativity_is_reported_at_arity_three():
    b = GradedBasis(("a", "b"), (-1, -1))
    # (ab)a = b a = a but a(ba) = a a = 0
    m2 = MultiMap(b, b, 2, 1, {((0, 1), 1): 1, ((1, 0), 0): 1})
    rep = verify_ainfty(AInfinity(b, {2: m2}), 4)
    assert not rep.passed
    assert rep.witness[0] == 3


def test_non_derivation_differential_fails_leibniz():
    names, degrees, _, product = exterior_product(("x", "y", "z"))
    # d(yz) should be -y xy = 0; setting it to xyz keeps d^2 = 0 but breaks Leibniz
    d = {names.index("z"): {names.index("xy"): 1}, names.index("yz"): {names.index("xyz"): 1}}
    bad = from_dga(names, degrees, d, product)
    rep = verify_ainfty(bad, 3)
    assert not rep.passed and rep.witness[0] == 2


def test_m0_and_wrong_degree_rejected():
    b = GradedBasis(("a",), (0,))
    with pytest.raises(ValueError):
        AInfinity(b, {0: MultiMap(b, b, 0, 1, {})})
    with pytest.raises(DegreeError):
        AInfinity(b, {1: MultiMap(b, b, 1, 0, {((0,), 0): 1})})


def _perturbation_sites(A: AInfinity, k: int):
    for ins_out in [(ins, j) for ins in __import__("itertools").product(range(A.basis.dim), repeat=k)
                    for j in range(A.basis.dim)]:
        ins, j = ins_out
        if A.basis.degrees[j] == sum(A.basis.degrees[i] for i in ins) + 1:
            yield ins, j


HEIS_SITES = list(_perturbation_sites(heisenberg(), 2))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(HEIS_SITES), st.sampled_from([1, -1, 2]))
def test_single_entry_perturbation_localizes(site, c):
    """Perturbing one structure constant only disturbs identities touching that entry."""
    A = heisenberg(3)
    ins, j = site
    delta = MultiMap(A.basis, A.basis, 2, 1, {(ins, j): c})
    B = A.with_maps({**A.maps, 2: A.m(2) + delta})
    touched = False
    for n in (2, 3):
        d = stasheff_defect(B, n)
        for (word, out), _ in d.entries.items():
            touched = True
            contains = any(word[p:p + 2] == ins for p in range(len(word) - 1))
            assert contains or out == j, (site, n, word, out)
    rep = verify_ainfty(B, 3)
    assert rep.passed == (not touched)
    if not rep.passed:
        n, word, out = rep.witness
        idx = tuple(A.basis.index(x) for x in word)
        assert any(idx[p:p + 2] == ins for p in range(len(idx) - 1)) or A.basis.index(out) == j


def test_some_perturbation_is_detected():
    A = heisenberg(3)
    x, y, xy = (A.basis.index(s) for s in ("x", "y", "xy"))
    B = A.with_maps({**A.maps, 2: A.m(2) + MultiMap(A.basis, A.basis, 2, 1, {((x, x), xy): 1})})
    assert not verify_ainfty(B, 3).passed


# -- morphisms ---------------------------------------------------------------------


def _random_automorphism(A: AInfinity, seed: int, K: int = 4) -> Morphism:
    rng = random.Random(seed)
    comps = {1: MultiMap.from_matrix(A.basis, [[int(i == j) for j in range(A.basis.dim)] for i in range(A.basis.dim)], 0)}
    for k in range(2, K + 1):
        comps[k] = random_map(A.basis, k, 0, rng, 0.15, 2)
    return Morphism(A.basis, A.basis, comps, K)


@settings(max_examples=6, deadline=None)
@given(st.integers(0, 10**6))
def test_pullback_structure_makes_a_morphism(seed):
    A = quiver(2)
    F = _random_automorphism(A, seed)
    B = pullback_structure(F, A)
    assert verify_ainfty(B, 4).passed
    assert verify_morphism(F, B, A, 4).passed


@settings(max_examples=6, deadline=None)
@given(st.integers(0, 10**6))
def test_inverse_and_composition(seed):
    A = quiver(2)
    F = _random_automorphism(A, seed)
    G = invert(F)
    ident = identity_morphism(A.basis, 4)
    assert compose(F, G).agrees_with(ident, 4)
    assert compose(G, F).agrees_with(ident, 4)
    B = pullback_structure(F, A)
    assert verify_morphism(G, A, B, 4).passed


def test_morphism_defect_detects_non_morphism():
    A = heisenberg()
    F = identity_morphism(A.basis, 2)
    zero = A.with_maps({1: A.m(1)})
    assert not morphism_defect(F, A, zero, 2).is_zero()
    assert verify_morphism(F, A, A, 3).passed


# -- cyclic structures -------------------------------------------------------------


def test_heisenberg_is_cyclic():
    A = heisenberg(2)
    w = heisenberg_omega(A)
    assert verify_cyclicity(w, A, 5).passed
    assert verify_cyclic_morphism(identity_morphism(A.basis, 3), w, w, 3).passed


def test_vertices_round_trip_through_structure_from_action():
    A = heisenberg(2)
    w = heisenberg_omega(A)
    vertices = {k: cyclic_vertex(w, A, k) for k in (1, 2)}
    back = structure_from_action(w, vertices, 2)
    assert back.m(1) == A.m(1) and back.m(2) == A.m(2)


def test_cyclicity_failure_has_witness():
    A, w, _, _ = darboux_pair()
    b = A.basis
    # a product that pairs nonsymmetrically: m2(u, u) = t
    bad = A.with_maps({**A.maps, 2: MultiMap(b, b, 2, 1, {((0, 0), 1): 1})}, 2)
    rep = verify_cyclicity(w, bad, 2)
    assert not rep.passed and rep.witness[0] == 2


def test_symplectic_form_degree_checked():
    b = GradedBasis(("a", "b"), (0, 0))
    with pytest.raises((DegreeError, ValueError)):
        SymplecticForm.from_pairs(b, {(0, 1): 1})
