import itertools
import json
import random

import numpy as np
import pytest

from higherop.operads import (
    BudgetExceededError,
    FinBase,
    FinSetMorphism,
    OperadMorphism,
    OperadTable,
    OrdBase,
    base_from_json,
    base_morphisms,
    base_to_json,
    cardinality_morphism,
    check_operad_axioms,
    compose_operad_morphisms,
    desymmetrize,
    endomorphism_operad,
    enumerate_algebras,
    enumerate_operad_morphisms,
    finset_compose,
    finset_fiber_elements,
    finset_restrict,
    is_operad_morphism,
    make_ass,
    operad_from_json,
    operad_to_json,
    restrict_suspension,
    tables_equal,
)
from higherop.ordinals import ordinal

from oracles import count_monoids


@pytest.fixture(scope="module")
def end2_k3():
    return endomorphism_operad((0, 1), 3)


@pytest.fixture(scope="module")
def des1_end(end2_k3):
    return desymmetrize(end2_k3, 1)


# ---------------------------------------------------------------------------
# finite-set morphisms


def test_finset_morphism_basics():
    f = FinSetMorphism(3, 2, (0, 0, 1))
    assert finset_fiber_elements(f, 0) == (0, 1)
    g = FinSetMorphism(2, 1, (0, 0))
    assert finset_compose(g, f).map == (0, 0, 0)
    with pytest.raises(ValueError):
        FinSetMorphism(2, 1, (0, 1))
    with pytest.raises(ValueError):
        finset_compose(f, g)


def test_finset_restrict():
    sigma = FinSetMorphism(4, 3, (0, 1, 1, 2))
    omega = FinSetMorphism(3, 2, (0, 0, 1))
    rho = finset_restrict(sigma, omega, 0)
    assert (rho.source, rho.target) == (3, 2)
    assert rho.map == (0, 1, 1)


def test_cardinality_morphism():
    f = ordinal(2, 1, 0)
    from higherop.ordinals import OrdinalMorphism

    m = OrdinalMorphism(f, ordinal(2, 0), (0, 0, 1))
    assert cardinality_morphism(m) == FinSetMorphism(3, 2, (0, 0, 1))


# ---------------------------------------------------------------------------
# terminal operads


@pytest.mark.parametrize("n", [1, 2, 3])
def test_ass_components_and_axioms(n):
    A = make_ass(OrdBase(n), 3)
    assert all(len(labs) == 1 for labs in A.components.values())
    assert check_operad_axioms(A).ok


def test_ass_suspension_compatibility():
    for n in (1, 2):
        for p in range(n + 1):
            big = make_ass(OrdBase(n + 1), 3)
            small = make_ass(OrdBase(n), 3)
            assert tables_equal(restrict_suspension(big, p), small)


def test_ass_over_finset_is_terminal_symmetric_operad():
    A = make_ass(FinBase(), 3)
    assert check_operad_axioms(A).ok
    assert [len(A.components[k]) for k in range(4)] == [1, 1, 1, 1]
    pulled = desymmetrize(A, 1)
    assert all(len(labs) == 1 for labs in pulled.components.values())


# ---------------------------------------------------------------------------
# endomorphism operads


def test_end_component_sizes(end2_k3):
    assert len(end2_k3.components[0]) == 2
    assert len(end2_k3.components[1]) == 4
    assert len(end2_k3.components[2]) == 16
    assert len(end2_k3.components[3]) == 256


def test_end_axioms_k2():
    rep = check_operad_axioms(endomorphism_operad((0, 1), 2))
    assert rep.ok, rep.violations


def test_end_unit_is_identity_function(end2_k3):
    assert end2_k3.unit == "01"


def test_end_budget():
    with pytest.raises(BudgetExceededError):
        endomorphism_operad((0, 1, 2), 3)


def test_end_substitution_semantics(end2_k3):
    # m_f(h; g_0, g_1) for f = id_2 is plain substitution in both slots
    f = FinSetMorphism(2, 2, (0, 1))
    neg = "10"  # negation at arity 1
    and_ = "0001"
    got = end2_k3.value(f, and_, (neg, neg))
    inputs = list(itertools.product((0, 1), repeat=2))
    expected = "".join(str(int(and_[2 * (1 - x) + (1 - y)])) for x, y in inputs)
    assert got == expected


# ---------------------------------------------------------------------------
# desymmetrisation and suspension restriction


def test_des_component_sizes(end2_k3):
    d2 = desymmetrize(end2_k3, 2)
    for T in OrdBase(2).objects(3):
        assert d2.components[T] == end2_k3.components[T.size]
    assert len(d2.components[ordinal(2, 0)]) == 16
    assert len(d2.components[ordinal(2, 1)]) == 16


def test_des_preserves_validity_k2():
    end = endomorphism_operad((0, 1), 2)
    for n in (1, 2):
        rep = check_operad_axioms(desymmetrize(end, n))
        assert rep.ok, rep.violations


@pytest.mark.parametrize("n", [0, 1, 2])
def test_strict_triangle_identity(n, end2_k3):
    des_up = desymmetrize(end2_k3, n + 1)
    des_n = desymmetrize(end2_k3, n)
    for p in range(n + 1):
        assert tables_equal(restrict_suspension(des_up, p), des_n)


def test_restrict_suspension_rejects_bad_p(end2_k3):
    d2 = desymmetrize(end2_k3, 2)
    with pytest.raises(ValueError):
        restrict_suspension(d2, 2)


def test_restrict_suspension_preserves_validity():
    end = endomorphism_operad((0, 1), 2)
    d2 = desymmetrize(end, 2)
    for p in (0, 1):
        rep = check_operad_axioms(restrict_suspension(d2, p))
        assert rep.ok, rep.violations


def test_constant_free_endomorphism_of_empty_set():
    end = endomorphism_operad((), 2, constant_free=True)
    assert all(len(labs) == 1 for labs in end.components.values())
    assert check_operad_axioms(end).ok
    with pytest.raises(ValueError):
        endomorphism_operad((), 2)


# ---------------------------------------------------------------------------
# the axiom checker on corrupted tables


def _corrupted(A, sigma, flat, new_value):
    mult = dict(A.mult)
    tab = mult[sigma].copy()
    tab.flat[flat] = new_value
    mult[sigma] = tab
    return OperadTable(A.base, A.K, A.components, A.unit, mult, A.name + "+corrupt")


def test_corrupted_unit_entry_is_reported():
    A = make_ass(OrdBase(1), 2)
    ident = OrdBase(1).identity(ordinal(1, 0))
    bad = _corrupted(A, ident, 0, 5)  # out of range: singleton component
    rep = check_operad_axioms(bad)
    assert not rep.ok
    assert any("out-of-range" in v or "shape" in v for v in rep.violations)


def test_corrupted_end_unit_diagram_names_the_morphism(des1_end):
    base = des1_end.base
    T = ordinal(1, 0)
    ident = base.identity(T)
    tab = des1_end.mult[ident]
    unit_idx = des1_end.unit_index()
    flat = int(np.ravel_multi_index((3, unit_idx, unit_idx), tab.shape))
    bad = _corrupted(des1_end, ident, flat, 0)
    rep = check_operad_axioms(bad, units_only=True)
    assert not rep.ok
    assert any("unit diagram" in v for v in rep.violations)


def test_missing_unit_is_reported():
    A = make_ass(OrdBase(1), 2)
    broken = OperadTable(A.base, A.K, A.components, "nope", A.mult)
    rep = check_operad_axioms(broken)
    assert not rep.ok and "missing unit" in rep.violations[0]


def test_single_corruption_fuzz_k2():
    end = endomorphism_operad((0, 1), 2)
    A = desymmetrize(end, 1)
    rng = random.Random(4242)
    sigmas = sorted(A.mult, key=str)
    for _ in range(25):
        while True:
            s = rng.choice(sigmas)
            tab = A.mult[s]
            if tab.size and len(A.components[s.source]) >= 2:
                break
        flat = rng.randrange(tab.size)
        old = int(tab.flat[flat])
        new = rng.randrange(len(A.components[s.source]) - 1)
        if new >= old:
            new += 1
        rep = check_operad_axioms(_corrupted(A, s, flat, new))
        assert not rep.ok


# ---------------------------------------------------------------------------
# morphism and algebra enumeration


def test_hom_ass_to_ass_is_singleton():
    A = make_ass(OrdBase(2), 3)
    assert len(enumerate_operad_morphisms(A, A)) == 1


def test_hom_ass1_to_des_end_matches_monoid_oracle(des1_end):
    A = make_ass(OrdBase(1), 3)
    homs = enumerate_operad_morphisms(A, des1_end)
    assert len(homs) == count_monoids(2) == 4


def test_algebras_examples(des1_end):
    A = make_ass(OrdBase(1), 3)
    assert len(enumerate_algebras(A, (0, 1))) == 4
    assert len(enumerate_algebras(A, (0,))) == 1


def test_algebra_with_missing_unit_has_no_morphisms(des1_end):
    A = make_ass(OrdBase(1), 3)
    broken = OperadTable(A.base, A.K, A.components, None, A.mult)
    assert enumerate_operad_morphisms(broken, des1_end) == []


def test_empty_source_component_imposes_nothing(des1_end):
    # a collection-like operad with an empty binary component still maps in
    base = OrdBase(1)
    A = make_ass(base, 2)
    comps = dict(A.components)
    comps[ordinal(1, 0)] = ()
    mult = {}
    for sigma in base_morphisms(base, 2):
        shape = tuple(
            len(comps[F])
            for F in [sigma.target]
            + [base.fiber(sigma, i) for i in range(sigma.target.size)]
        )
        mult[sigma] = np.zeros(shape, dtype=np.int32)
    A2 = OperadTable(base, 2, comps, "*", mult)
    end = endomorphism_operad((0, 1), 2)
    B = desymmetrize(end, 1)
    homs = enumerate_operad_morphisms(A2, B)
    # unit forced, nullary free: |End(0)| = 2 choices and no other constraint
    assert len(homs) == 2


def test_morphism_search_budget(des1_end):
    A = make_ass(OrdBase(1), 3)
    with pytest.raises(BudgetExceededError):
        enumerate_operad_morphisms(A, des1_end, max_nodes=3)


def test_enumeration_is_deterministic(des1_end):
    A = make_ass(OrdBase(1), 3)
    first = enumerate_operad_morphisms(A, des1_end)
    second = enumerate_operad_morphisms(A, des1_end)
    assert first == second


def test_algebra_morphism_composition(des1_end):
    # conjugating by the swap of {0,1} is an operad automorphism of des(End);
    # composing it with algebra structures permutes them
    A = make_ass(OrdBase(1), 3)
    algebras = enumerate_operad_morphisms(A, des1_end)
    swap_maps = []
    for T, labs in sorted(
        des1_end.components.items(), key=lambda kv: (kv[0].size, kv[0].profile)
    ):
        k = T.size
        imgs = []
        for lab in labs:
            outs = [int(c) for c in lab]
            conj = [0] * len(outs)
            for rank, x in enumerate(itertools.product((0, 1), repeat=k)):
                flipped = tuple(1 - v for v in x)
                flipped_rank = sum(v << (k - 1 - i) for i, v in enumerate(flipped))
                conj[rank] = 1 - outs[flipped_rank]
            conj_lab = "".join(map(str, conj))
            imgs.append(labs.index(conj_lab))
        swap_maps.append((T, tuple(imgs)))
    tau = OperadMorphism(des1_end.name, des1_end.name, tuple(swap_maps))
    assert is_operad_morphism(des1_end, des1_end, tau)
    composed = {compose_operad_morphisms(tau, phi).components for phi in algebras}
    assert composed == {phi.components for phi in algebras}
    for phi in algebras:
        assert is_operad_morphism(A, des1_end, phi)
        assert is_operad_morphism(A, des1_end, compose_operad_morphisms(tau, phi))


# ---------------------------------------------------------------------------
# constant-free bases


def test_constant_free_base_objects_and_maps():
    base = OrdBase(1, constant_free=True)
    assert all(T.size >= 1 for T in base.objects(3))
    for sigma in base_morphisms(base, 3):
        assert set(sigma.map) == set(range(sigma.target.size))


def test_constant_free_ass_axioms():
    for base in (OrdBase(1, constant_free=True), FinBase(constant_free=True)):
        rep = check_operad_axioms(make_ass(base, 3))
        assert rep.ok, rep.violations


# ---------------------------------------------------------------------------
# serialisation


def test_base_json_round_trip():
    for base in (OrdBase(2), OrdBase(1, constant_free=True), FinBase(), FinBase(True)):
        assert base_from_json(json.loads(json.dumps(base_to_json(base)))) == base


def test_operad_json_round_trip():
    A = make_ass(OrdBase(2), 2)
    back = operad_from_json(json.loads(json.dumps(operad_to_json(A))))
    assert tables_equal(A, back)
    end = endomorphism_operad((0, 1), 1)
    back = operad_from_json(json.loads(json.dumps(operad_to_json(end))))
    assert tables_equal(end, back)


def test_operad_json_budget(des1_end):
    with pytest.raises(BudgetExceededError):
        operad_to_json(des1_end, max_entries=10)


def test_value_lookup(des1_end):
    T = ordinal(1, 0)
    ident = des1_end.base.identity(T)
    assert des1_end.value(ident, "0110", ("01", "01")) == "0110"
