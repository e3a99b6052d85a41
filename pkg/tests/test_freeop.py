import itertools
import json

import pytest

from higherop.freeop import (
    Collection,
    PolynomialData,
    TreeTerm,
    check_monad_laws,
    corolla,
    enumerate_trees,
    eval_polynomial,
    free_operad,
    graft,
    insert,
    node_object,
    subtree_at,
    target,
    tree_cardinality,
    tree_from_json,
    tree_label,
    tree_polynomial,
    tree_to_dot,
    tree_to_json,
    trivial,
    validate_tree,
    vertex_count,
    vertices,
)
from higherop.operads import (
    BudgetExceededError,
    FinBase,
    OrdBase,
    check_operad_axioms,
    desymmetrize,
    endomorphism_operad,
    enumerate_operad_morphisms,
)
from higherop.ordinals import OrdinalMorphism, ordinal, terminal_ordinal

from oracles import catalan

BASE1 = OrdBase(1)
BASE2 = OrdBase(2)


def chain(k):
    return ordinal(1, *([0] * (k - 1)))


# ---------------------------------------------------------------------------
# polynomial evaluation


def test_eval_polynomial_product():
    P = PolynomialData(
        operations=lambda i: ["b"] if i == "i" else [],
        arity=lambda b: ["e1", "e2"],
        source=lambda e: {"e1": "j1", "e2": "j2"}[e],
    )
    X = {"j1": [0, 1], "j2": ["a", "b", "c"]}
    out = eval_polynomial(P, X, ["i"])
    assert len(out["i"]) == 6


def test_eval_polynomial_empty_and_nullary():
    P = PolynomialData(lambda i: [], lambda b: [], lambda e: None)
    assert eval_polynomial(P, {}, ["i"]) == {"i": []}
    P2 = PolynomialData(lambda i: ["b"], lambda b: [], lambda e: None)
    assert eval_polynomial(P2, {}, ["i"]) == {"i": [("b", ())]}


def test_eval_polynomial_budget():
    P = PolynomialData(lambda i: itertools.count(), lambda b: [], lambda e: None)
    with pytest.raises(BudgetExceededError):
        eval_polynomial(P, {}, ["i"], max_operations=10)


# ---------------------------------------------------------------------------
# terms, targets, grafting


def test_target_examples():
    assert target(trivial(BASE2)) == terminal_ordinal(2)
    S = ordinal(2, 1)
    assert target(corolla(BASE2, S)) == S
    assert node_object(corolla(BASE2, S)) == S


def test_trivial_validation():
    with pytest.raises(ValueError):
        TreeTerm()
    with pytest.raises(ValueError):
        TreeTerm(trivial_target=terminal_ordinal(1), decoration="x")


def test_graft_units():
    T = chain(3)
    t = corolla(BASE1, T)
    bang = OrdinalMorphism(T, terminal_ordinal(1), (0, 0, 0))
    assert graft(trivial(BASE1), bang, [t], BASE1) == t
    ident = BASE1.identity(T)
    trivs = [trivial(BASE1)] * 3
    assert graft(t, ident, trivs, BASE1) == t


def test_graft_right_comb():
    x = corolla(BASE1, chain(2))
    sigma = OrdinalMorphism(chain(3), chain(2), (0, 1, 1))
    comb = graft(x, sigma, [trivial(BASE1), corolla(BASE1, chain(2))], BASE1)
    assert target(comb) == chain(3)
    assert vertex_count(comb) == 2
    assert comb.sigma == sigma
    assert comb.children[0].is_trivial
    assert not comb.children[1].is_trivial
    validate_tree(comb, BASE1)


def test_graft_shape_errors():
    x = corolla(BASE1, chain(2))
    sigma = OrdinalMorphism(chain(3), chain(2), (0, 1, 1))
    with pytest.raises(ValueError):
        graft(x, sigma, [trivial(BASE1)], BASE1)
    with pytest.raises(ValueError):
        graft(x, sigma, [corolla(BASE1, chain(2)), trivial(BASE1)], BASE1)


# ---------------------------------------------------------------------------
# insertion


def test_insert_examples():
    T = chain(3)
    x = corolla(BASE1, T)
    assert insert(x, (), corolla(BASE1, T), BASE1) == x

    sigma = OrdinalMorphism(chain(3), chain(2), (0, 1, 1))
    comb = graft(corolla(BASE1, chain(2)), sigma, [trivial(BASE1), corolla(BASE1, chain(2))], BASE1)
    for addr, S_v in vertices(comb):
        assert insert(comb, addr, corolla(BASE1, S_v), BASE1) == comb


def test_insert_vertex_counts_add():
    for T in (chain(2), chain(3)):
        for x in enumerate_trees(T, 3, 3, True, BASE1):
            for addr, S_v in vertices(x):
                for y in enumerate_trees(S_v, 2, 3, True, BASE1):
                    got = insert(x, addr, y, BASE1)
                    assert vertex_count(got) == vertex_count(x) + vertex_count(y) - 1


def test_insert_errors():
    x = corolla(BASE1, chain(2))
    with pytest.raises(ValueError):
        insert(x, (5,), corolla(BASE1, chain(2)), BASE1)
    with pytest.raises(ValueError):
        insert(x, (), corolla(BASE1, chain(3)), BASE1)
    with pytest.raises(ValueError):
        insert(trivial(BASE1), (), corolla(BASE1, chain(2)), BASE1)
    with pytest.raises(ValueError):
        subtree_at(x, (0,))


# ---------------------------------------------------------------------------
# enumeration


def test_catalan_tree_counts():
    for k in range(1, 6):
        trees = enumerate_trees(chain(k), vmax=k - 1, kmax=2, regular=True, base=BASE1)
        assert len(trees) == catalan(k - 1)


def test_trivial_enumeration():
    assert enumerate_trees(terminal_ordinal(2), 0, 3, True, BASE2) == [trivial(BASE2)]
    assert enumerate_trees(ordinal(2, 0), 0, 3, True, BASE2) == []


def test_kmax_monotonicity_nonregular():
    small = enumerate_trees(chain(2), 2, 1, regular=False, base=BASE1)
    large = enumerate_trees(chain(2), 2, 2, regular=False, base=BASE1)
    assert set(small) <= set(large)
    assert len(small) < len(large)


def test_enumerated_trees_validate():
    for T in (ordinal(2, 0), ordinal(2, 1), terminal_ordinal(2)):
        for t in enumerate_trees(T, 2, 2, regular=False, base=BASE2):
            validate_tree(t, BASE2)


# ---------------------------------------------------------------------------
# cardinality push-down


def test_tree_cardinality_commutes():
    for T in (chain(2), chain(3), terminal_ordinal(1)):
        for x in enumerate_trees(T, 3, 3, True, BASE1):
            cx = tree_cardinality(x)
            validate_tree(cx, FinBase())
            assert target(cx) == target(x).size
            for addr, S_v in vertices(x):
                for y in enumerate_trees(S_v, 2, 3, True, BASE1):
                    assert tree_cardinality(insert(x, addr, y, BASE1)) == insert(
                        tree_cardinality(x), addr, tree_cardinality(y), FinBase()
                    )


def test_tree_cardinality_rejects_finset_trees():
    with pytest.raises(ValueError):
        tree_cardinality(tree_cardinality(corolla(BASE1, chain(2))))


# ---------------------------------------------------------------------------
# free operads


def binary_collection(K=3):
    return Collection(BASE1, K, {chain(2): ("m",)})


def test_free_operad_catalan():
    coll = Collection(BASE1, 5, {chain(2): ("m",)})
    res = free_operad(coll, vmax=4, kmax=2)
    sizes = [len(res.operad.components[chain(k)]) for k in range(1, 6)]
    assert sizes == [1, 1, 2, 5, 14]
    assert res.holes == 0


def test_free_operad_empty_collection():
    from higherop.ordinals import empty_ordinal

    coll = Collection(BASE1, 3, {})
    res = free_operad(coll, vmax=3, kmax=3)
    assert res.operad.components[terminal_ordinal(1)] == ("triv",)
    for T in (empty_ordinal(1), chain(2), chain(3)):
        assert res.operad.components[T] == ()


def test_free_operad_axioms():
    res = free_operad(binary_collection(), vmax=3, kmax=3)
    assert res.holes == 0
    rep = check_operad_axioms(res.operad)
    assert rep.ok, rep.violations


def test_free_operad_universal_property():
    res = free_operad(binary_collection(), vmax=3, kmax=3)
    end = endomorphism_operad((0, 1), 3)
    B = desymmetrize(end, 1)
    homs = enumerate_operad_morphisms(res.operad, B)
    # collection maps: one choice per image of the binary generator
    assert len(homs) == len(B.components[chain(2)]) == 16
    gen = res.operad.components[chain(2)].index(tree_label(
        next(iter(res.trees[chain(2)]))
    ))
    images = {dict(phi.components)[chain(2)][gen] for phi in homs}
    assert len(images) == 16


def test_free_operad_truncation_holes_are_marked():
    coll = Collection(BASE1, 2, {terminal_ordinal(1): ("u",), chain(2): ("m",)})
    res = free_operad(coll, vmax=2, kmax=2)
    assert res.holes > 0
    rep = check_operad_axioms(res.operad)
    assert rep.ok, rep.violations
    assert rep.skipped_holes > 0


def test_polynomial_matches_free_operad():
    coll = binary_collection()
    P = tree_polynomial(1, vmax=3, kmax=2)
    X = {T: list(coll.labels(T)) for T in BASE1.objects(3)}
    out = eval_polynomial(P, X, BASE1.objects(3))
    res = free_operad(Collection(BASE1, 3, dict(coll.components)), vmax=3, kmax=2)
    for T in BASE1.objects(3):
        assert len(out[T]) == len(res.operad.components[T])


# ---------------------------------------------------------------------------
# monad laws


def test_monad_laws_pass():
    rep = check_monad_laws(1, 3, 3)
    assert rep.ok, rep.violations[:3]
    rep = check_monad_laws(2, 2, 2)
    assert rep.ok, rep.violations[:3]


def test_monad_laws_nonregular():
    rep = check_monad_laws(1, 2, 2, regular=False)
    assert rep.ok, rep.violations[:3]


def _broken_graft(x, sigma, ys, base):
    ys = tuple(ys)
    if x.is_trivial:
        return ys[0] if ys else trivial(base)
    inner = x.sigma
    new_children = []
    for j in range(len(x.children)):
        rho = base.restrict(sigma, inner, j)
        elems = [e for e, v in enumerate(inner.map) if v == j]
        new_children.append(_broken_graft(x.children[j], rho, [ys[e] for e in elems], base))
    # drops the composition with sigma
    return TreeTerm(inner, tuple(new_children), x.decoration)


def _broken_insert(outer, address, inner, base):
    address = tuple(address)
    if not address:
        return _broken_graft(inner, outer.sigma, outer.children, base)
    i, rest = address[0], address[1:]
    children = list(outer.children)
    children[i] = _broken_insert(children[i], rest, inner, base)
    return TreeTerm(outer.sigma, tuple(children), outer.decoration)


def test_mutated_graft_is_caught():
    rep = check_monad_laws(1, 2, 2, insert_impl=_broken_insert)
    assert not rep.ok
    rep = check_monad_laws(2, 2, 2, insert_impl=_broken_insert)
    assert not rep.ok


# ---------------------------------------------------------------------------
# serialisation


def test_tree_json_round_trip():
    sigma = OrdinalMorphism(chain(3), chain(2), (0, 1, 1))
    comb = graft(corolla(BASE1, chain(2), "m"), sigma,
                 [trivial(BASE1), corolla(BASE1, chain(2), "m")], BASE1)
    data = json.loads(json.dumps(tree_to_json(comb)))
    assert tree_from_json(data, BASE1) == comb
    assert tree_from_json("trivial", BASE1) == trivial(BASE1)
    fintree = tree_cardinality(comb)
    data = json.loads(json.dumps(tree_to_json(fintree)))
    assert tree_from_json(data, FinBase()) == fintree


def test_tree_dot():
    sigma = OrdinalMorphism(chain(3), chain(2), (0, 1, 1))
    comb = graft(corolla(BASE1, chain(2)), sigma,
                 [trivial(BASE1), corolla(BASE1, chain(2))], BASE1)
    dot = tree_to_dot(comb)
    assert dot.startswith("digraph")
    assert dot.count("->") == 4  # two vertices, three leaves, one leaf edge each
    assert tree_to_dot(trivial(BASE1)).count("trivial") == 1
