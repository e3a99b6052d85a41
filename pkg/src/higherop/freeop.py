"""Finitary polynomials and the tree term model of the insertion monads.

The operations of the insertion monad over a base (ordinals for the
level-aware case, finite sets for the symmetric case) are rooted terms:
either the trivial tree, or a node carrying a base morphism
sigma: T -> S together with one subtree per element of S, the i-th
subtree living over fiber(sigma, i).  The target of a node is the
source of its morphism; the trivial tree sits over the terminal object.

Grafting (the free-operad multiplication) and vertex insertion (the
monad multiplication) are defined structurally, so the unit laws hold
on the nose and associativity is the content of check_monad_laws.
A vertex address is the root path of child indices.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

import numpy as np

from .ordinals import OrdinalMorphism, morphism_to_json
from .operads import (
    BudgetExceededError,
    FinBase,
    FinSetMorphism,
    OperadTable,
    OrdBase,
    _target_size,
    base_morphisms,
)


@dataclass(frozen=True)
class TreeTerm:
    """A term of the tree monad: trivial, or a morphism-labeled node."""

    sigma: object | None = None
    children: tuple["TreeTerm", ...] = ()
    decoration: str | None = None
    trivial_target: object | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "children", tuple(self.children))
        if self.sigma is None:
            if self.children or self.decoration is not None:
                raise ValueError("the trivial tree has no children or decoration")
            if self.trivial_target is None:
                raise ValueError("a trivial tree needs its terminal target")
        elif self.trivial_target is not None:
            raise ValueError("only trivial trees carry an explicit target")

    @property
    def is_trivial(self) -> bool:
        return self.sigma is None


def trivial(base) -> TreeTerm:
    return TreeTerm(trivial_target=base.terminal())


def corolla(base, S, decoration: str | None = None) -> TreeTerm:
    """One vertex over S with trivial subtrees: the image of a generator."""
    return TreeTerm(
        base.identity(S), tuple(trivial(base) for _ in range(base.size(S))), decoration
    )


def target(tree: TreeTerm):
    """The object a term is an operation over."""
    return tree.trivial_target if tree.is_trivial else tree.sigma.source


def node_object(tree: TreeTerm):
    """The object whose operations may decorate the root vertex."""
    if tree.is_trivial:
        raise ValueError("the trivial tree has no vertex")
    return tree.sigma.target


def validate_tree(tree: TreeTerm, base) -> None:
    """Check the fiber conditions at every node (raises on failure)."""
    if tree.is_trivial:
        if tree.trivial_target != base.terminal():
            raise ValueError("trivial tree over a non-terminal object")
        return
    sigma = tree.sigma
    if len(tree.children) != _target_size(sigma):
        raise ValueError("child count differs from the morphism target size")
    for i, child in enumerate(tree.children):
        want = base.fiber(sigma, i)
        if target(child) != want:
            raise ValueError(
                f"child {i} has target {target(child)}, expected the fiber {want}"
            )
        validate_tree(child, base)


def vertices(tree: TreeTerm) -> list[tuple[tuple[int, ...], object]]:
    """Depth-first list of (address, vertex object sigma.target)."""
    if tree.is_trivial:
        return []
    out = [((), tree.sigma.target)]
    for i, child in enumerate(tree.children):
        out.extend(((i,) + addr, obj) for addr, obj in vertices(child))
    return out


def vertex_count(tree: TreeTerm) -> int:
    if tree.is_trivial:
        return 0
    return 1 + sum(vertex_count(c) for c in tree.children)


def subtree_at(tree: TreeTerm, address: tuple[int, ...]) -> TreeTerm:
    for i in address:
        if tree.is_trivial or i >= len(tree.children):
            raise ValueError(f"bad vertex address {address}")
        tree = tree.children[i]
    if tree.is_trivial:
        raise ValueError(f"address {address} points at a trivial subtree")
    return tree


def graft(x: TreeTerm, sigma, ys, base) -> TreeTerm:
    """Free-operad multiplication: compose x over S along sigma: T -> S.

    ys supplies one tree per element of S, the i-th over fiber(sigma, i);
    the result is a term over T.  Grafting onto the trivial tree returns
    the unique subtree, so the unit laws hold structurally.
    """
    ys = tuple(ys)
    if len(ys) != _target_size(sigma):
        raise ValueError("wrong number of trees to graft")
    if target(x) != sigma.target:
        raise ValueError("outer tree does not sit over the target of sigma")
    for i, y in enumerate(ys):
        if target(y) != base.fiber(sigma, i):
            raise ValueError(f"graft input {i} does not sit over the fiber")
    if x.is_trivial:
        # sigma: T -> terminal has a single fiber, the whole of T
        return ys[0] if ys else trivial(base)
    inner = x.sigma  # S -> S''
    new_children = []
    for j in range(len(x.children)):
        rho = base.restrict(sigma, inner, j)
        elems = [e for e, v in enumerate(inner.map) if v == j]
        new_children.append(graft(x.children[j], rho, [ys[e] for e in elems], base))
    return TreeTerm(base.compose(inner, sigma), tuple(new_children), x.decoration)


def insert(outer: TreeTerm, address: tuple[int, ...], inner: TreeTerm, base) -> TreeTerm:
    """Monad multiplication: replace the vertex at the address by a tree.

    The inserted tree must sit over the vertex object; its leaves pick up
    the vertex's subtrees by grafting.
    """
    address = tuple(address)
    if outer.is_trivial:
        raise ValueError("the trivial tree has no vertex to replace")
    if not address:
        if target(inner) != outer.sigma.target:
            raise ValueError(
                f"inserted tree sits over {target(inner)}, vertex needs {outer.sigma.target}"
            )
        return graft(inner, outer.sigma, outer.children, base)
    i, rest = address[0], address[1:]
    if i >= len(outer.children):
        raise ValueError(f"bad vertex address {address}")
    children = list(outer.children)
    children[i] = insert(children[i], rest, inner, base)
    return TreeTerm(outer.sigma, tuple(children), outer.decoration)


# ---------------------------------------------------------------------------
# enumeration


def _split_budget(total: int, parts: int):
    """All ways to spread a vertex budget over the children."""
    if parts == 0:
        yield ()
        return
    for head in range(total + 1):
        for rest in _split_budget(total - head, parts - 1):
            yield (head,) + rest


def _surjective(sigma) -> bool:
    return set(sigma.map) == set(range(_target_size(sigma)))


def enumerate_trees(
    T, vmax: int, kmax: int, regular: bool = True, base=None
) -> list[TreeTerm]:
    """All undecorated terms over T within the stated bounds.

    vmax bounds the vertex count, kmax the size of every vertex object;
    regular restricts node morphisms to surjections (no empty fibers, so
    no stumps).  Deterministic order.
    """
    if base is None:
        base = OrdBase(T.n)
    if vmax < 0 or kmax < 0:
        raise ValueError("bounds must be nonnegative")
    return list(_enum_trees(T, vmax, kmax, regular, base))


@functools.lru_cache(maxsize=None)
def _enum_trees(T, budget: int, kmax: int, regular: bool, base) -> tuple:
    out = []
    if T == base.terminal():
        out.append(trivial(base))
    if budget >= 1:
        for k in range(kmax + 1):
            for S in _objects_of_size(base, k):
                for sigma in base.morphisms(T, S):
                    if regular and not _surjective(sigma):
                        continue
                    fibers = [base.fiber(sigma, i) for i in range(k)]
                    child_lists = []
                    feasible = True
                    for F in fibers:
                        opts = _enum_trees(F, budget - 1, kmax, regular, base)
                        if not opts:
                            feasible = False
                            break
                        child_lists.append(opts)
                    if not feasible:
                        continue
                    for combo in itertools.product(*child_lists):
                        if 1 + sum(vertex_count(c) for c in combo) <= budget:
                            out.append(TreeTerm(sigma, combo))
    return tuple(out)


def _objects_of_size(base, k: int):
    if isinstance(base, FinBase):
        return [k] if (k >= 1 or not base.constant_free) else []
    from .ordinals import enumerate_ordinals

    if base.constant_free and k == 0:
        return []
    return enumerate_ordinals(base.n, k)


def tree_cardinality(tree: TreeTerm) -> TreeTerm:
    """Push a tree over ordinals down to a tree over finite sets."""
    if tree.is_trivial:
        return trivial(FinBase())
    sigma = tree.sigma
    if not isinstance(sigma, OrdinalMorphism):
        raise ValueError("tree is already over finite sets")
    return TreeTerm(
        FinSetMorphism(sigma.source.size, sigma.target.size, sigma.map),
        tuple(tree_cardinality(c) for c in tree.children),
        tree.decoration,
    )


# ---------------------------------------------------------------------------
# collections and the free operad


@dataclass
class Collection:
    """Labels per object with no unit and no multiplication."""

    base: object
    K: int
    components: dict

    def labels(self, T) -> tuple[str, ...]:
        return self.components.get(T, ())


def _decorate(tree: TreeTerm, coll: Collection):
    """All ways to decorate every vertex from the collection."""
    if tree.is_trivial:
        yield tree
        return
    S = tree.sigma.target
    child_choices = [list(_decorate(c, coll)) for c in tree.children]
    for lab in coll.labels(S):
        for combo in itertools.product(*child_choices):
            yield TreeTerm(tree.sigma, combo, lab)


def tree_label(tree: TreeTerm) -> str:
    """Canonical string form, used as the operation label in free operads."""
    if tree.is_trivial:
        return "triv"
    dec = tree.decoration if tree.decoration is not None else ""
    inner = ",".join(tree_label(c) for c in tree.children)
    return f"({_sigma_label(tree.sigma)}|{dec}|{inner})"


def _sigma_label(sigma) -> str:
    if isinstance(sigma, OrdinalMorphism):
        prof = "".join(map(str, sigma.target.profile))
        return f"{''.join(map(str, sigma.map))}>{prof}:{sigma.target.size}"
    return f"{''.join(map(str, sigma.map))}>{sigma.target}"


@dataclass
class FreeOperadResult:
    operad: OperadTable
    trees: dict  # object -> tuple of decorated TreeTerms, parallel to labels
    holes: int


def free_operad(
    coll: Collection, vmax: int, kmax: int, regular: bool = True
) -> FreeOperadResult:
    """Free operad on a collection, truncated to the stored tree bounds.

    Components are the decorated trees over each object; the unit is the
    trivial tree and multiplication is grafting.  A graft whose result
    leaves the vertex bound becomes a truncation hole (entry -1), counted
    in the result.
    """
    base, K = coll.base, coll.K
    trees = {}
    components = {}
    for T in base.objects(K):
        decorated = []
        for t in enumerate_trees(T, vmax, kmax, regular, base):
            decorated.extend(_decorate(t, coll))
        trees[T] = tuple(decorated)
        components[T] = tuple(tree_label(t) for t in decorated)
    index = {
        T: {lab: i for i, lab in enumerate(labs)} for T, labs in components.items()
    }
    holes = 0
    mult = {}
    for sigma in base_morphisms(base, K):
        fibers = [base.fiber(sigma, i) for i in range(_target_size(sigma))]
        shape = (len(components[sigma.target]),) + tuple(
            len(components[F]) for F in fibers
        )
        tab = np.empty(shape, dtype=np.int32)
        for b_i, x in enumerate(trees[sigma.target]):
            for a_idx in itertools.product(*(range(len(trees[F])) for F in fibers)):
                ys = [trees[F][a] for F, a in zip(fibers, a_idx)]
                res = graft(x, sigma, ys, base)
                lab = tree_label(res)
                slot = index[sigma.source].get(lab)
                if slot is None:
                    holes += 1
                    slot = -1
                tab[(b_i,) + a_idx] = slot
        mult[sigma] = tab
    operad = OperadTable(base, K, components, "triv", mult, "Free")
    return FreeOperadResult(operad, trees, holes)


# ---------------------------------------------------------------------------
# generic polynomial evaluation


@dataclass
class PolynomialData:
    """A finitary polynomial presented by enumeration callbacks.

    operations(i) lists the b with t(b) = i; arity(b) lists the e in the
    finite fiber p^{-1}(b); source(e) gives s(e) in J.
    """

    operations: object  # callable: i -> iterable of b
    arity: object  # callable: b -> sequence of e
    source: object  # callable: e -> j


def eval_polynomial(P: PolynomialData, X: dict, i_values, max_operations: int = 100000):
    """Sum over operations of the product of inputs: P(X)_i, tagged by b.

    X maps each index j to a finite list; the result maps each requested i
    to the list of (b, tuple of chosen elements).  Refuses to return
    partial data if an operation fiber enumeration exceeds the budget.
    """
    out = {}
    for i in i_values:
        elems = []
        count = 0
        for b in P.operations(i):
            count += 1
            if count > max_operations:
                raise BudgetExceededError(
                    f"more than {max_operations} operations over index {i}"
                )
            pools = [X[P.source(e)] for e in P.arity(b)]
            for combo in itertools.product(*pools):
                elems.append((b, combo))
        out[i] = elems
    return out


def tree_polynomial(n: int, vmax: int, kmax: int, regular: bool = True) -> PolynomialData:
    """The polynomial whose operations over T are the bounded trees over T.

    Arities are marked vertices; the source of a marked vertex is its
    vertex object, so evaluating on a collection counts decorated trees.
    """
    base = OrdBase(n)

    def operations(T):
        return enumerate_trees(T, vmax, kmax, regular, base)

    def arity(tree):
        return [(tree, addr, obj) for addr, obj in vertices(tree)]

    def source(e):
        return e[2]

    return PolynomialData(operations, arity, source)


# ---------------------------------------------------------------------------
# monad laws


@dataclass
class LawReport:
    ok: bool
    violations: list
    unit_instances: int = 0
    assoc_instances: int = 0

    def summary(self) -> str:
        status = "pass" if self.ok else f"FAIL ({len(self.violations)} violations)"
        return (
            f"{status}: {self.unit_instances} unit instances, "
            f"{self.assoc_instances} associativity instances"
        )


def _tag_vertices(tree: TreeTerm, prefix: str, counter) -> TreeTerm:
    if tree.is_trivial:
        return tree
    tag = f"{prefix}{next(counter)}"
    return TreeTerm(
        tree.sigma,
        tuple(_tag_vertices(c, prefix, counter) for c in tree.children),
        tag,
    )


def _find_decoration(tree: TreeTerm, tag: str, addr=()):
    if tree.is_trivial:
        return None
    if tree.decoration == tag:
        return addr
    for i, c in enumerate(tree.children):
        found = _find_decoration(c, tag, addr + (i,))
        if found is not None:
            return found
    return None


def check_monad_laws(
    n: int, vmax: int, kmax: int, regular: bool = True, insert_impl=None
) -> LawReport:
    """Unit and associativity laws for insertion, exhaustive within bounds.

    Unit laws run over every enumerated tree: replacing any vertex by the
    corolla over its object is the identity, and inserting into the unique
    vertex of a corolla returns the inserted tree.  Associativity runs
    over every two-level insertion whose flattened result still fits the
    vertex bound (so all instances that land in the enumerated world):
    inserting y at v and then z at a vertex w coming from y agrees with
    inserting insert(y, w, z) at v directly.  Vertices are tracked through
    the surgery by unique decorations.  Independent vertices are also
    checked to commute.  An alternative insert_impl can be passed in to
    prove the checker catches broken implementations.
    """
    base = OrdBase(n)
    ins = insert_impl if insert_impl is not None else insert
    rep = LawReport(ok=True, violations=[])

    all_objects = [T for k in range(kmax + 1) for T in _objects_of_size(base, k)]
    trees_by_target = {
        T: enumerate_trees(T, vmax, kmax, regular, base) for T in all_objects
    }

    for T in all_objects:
        for x in trees_by_target[T]:
            for addr, S_v in vertices(x):
                rep.unit_instances += 1
                if ins(x, addr, corolla(base, S_v), base) != x:
                    rep.violations.append(
                        f"unit fails: replacing vertex {addr} of {tree_label(x)} "
                        "by its corolla changed the tree"
                    )
        for t in trees_by_target[T]:
            rep.unit_instances += 1
            if ins(corolla(base, T), (), t, base) != t:
                rep.violations.append(
                    f"unit fails: inserting {tree_label(t)} into the corolla over {T}"
                )
    if rep.violations:
        rep.ok = False
        return rep

    for T in all_objects:
        for x_raw in trees_by_target[T]:
            nx = vertex_count(x_raw)
            x = _tag_vertices(x_raw, "x", itertools.count())
            for v_addr, S_v in vertices(x):
                for y_raw in trees_by_target.get(S_v, ()):
                    ny = vertex_count(y_raw)
                    if nx + ny - 1 > vmax:
                        continue
                    y = _tag_vertices(y_raw, "y", itertools.count())
                    xy = ins(x, v_addr, y, base)
                    for w_addr, S_w in vertices(y):
                        w_tag = subtree_at(y, w_addr).decoration
                        w_in_xy = _find_decoration(xy, w_tag)
                        if w_in_xy is None:
                            rep.violations.append(
                                f"vertex {w_tag} vanished when inserting at {v_addr}"
                            )
                            continue
                        for z_raw in trees_by_target.get(S_w, ()):
                            if nx + ny + vertex_count(z_raw) - 2 > vmax:
                                continue
                            z = _tag_vertices(z_raw, "z", itertools.count())
                            rep.assoc_instances += 1
                            lhs = ins(x, v_addr, ins(y, w_addr, z, base), base)
                            rhs = ins(xy, w_in_xy, z, base)
                            if lhs != rhs:
                                rep.violations.append(
                                    "associativity fails: "
                                    f"x={tree_label(x)} v={v_addr} "
                                    f"y={tree_label(y)} w={w_addr} z={tree_label(z)}"
                                )
                            if len(rep.violations) >= 10:
                                rep.ok = False
                                return rep
                # independent vertices commute
                for w_addr, S_w in vertices(x):
                    if w_addr[: len(v_addr)] == v_addr or v_addr[: len(w_addr)] == w_addr:
                        continue
                    if w_addr < v_addr:
                        continue  # each unordered pair once
                    for y_raw in trees_by_target.get(S_v, ()):
                        for z_raw in trees_by_target.get(S_w, ()):
                            if nx + vertex_count(y_raw) + vertex_count(z_raw) - 2 > vmax:
                                continue
                            y = _tag_vertices(y_raw, "y", itertools.count())
                            z = _tag_vertices(z_raw, "z", itertools.count())
                            rep.assoc_instances += 1
                            one = ins(ins(x, v_addr, y, base), w_addr, z, base)
                            other = ins(ins(x, w_addr, z, base), v_addr, y, base)
                            if one != other:
                                rep.violations.append(
                                    "independent insertions do not commute: "
                                    f"x={tree_label(x)} v={v_addr} w={w_addr}"
                                )
                            if len(rep.violations) >= 10:
                                rep.ok = False
                                return rep
    rep.ok = not rep.violations
    return rep


# ---------------------------------------------------------------------------
# serialisation


def tree_to_json(tree: TreeTerm):
    if tree.is_trivial:
        return "trivial"
    if isinstance(tree.sigma, OrdinalMorphism):
        sig = morphism_to_json(tree.sigma)
    else:
        sig = {
            "source": tree.sigma.source,
            "target": tree.sigma.target,
            "map": list(tree.sigma.map),
        }
    return {
        "node": {
            "sigma": sig,
            "decoration": tree.decoration,
            "children": [tree_to_json(c) for c in tree.children],
        }
    }


def tree_from_json(data, base) -> TreeTerm:
    if data == "trivial":
        return trivial(base)
    node = data["node"]
    if isinstance(base, OrdBase):
        from .ordinals import morphism_from_json

        sigma = morphism_from_json(node["sigma"])
    else:
        s = node["sigma"]
        sigma = FinSetMorphism(s["source"], s["target"], tuple(s["map"]))
    return TreeTerm(
        sigma,
        tuple(tree_from_json(c, base) for c in node["children"]),
        node["decoration"],
    )


def tree_to_dot(tree: TreeTerm) -> str:
    """Deterministic DOT drawing with one node per vertex."""
    lines = ["digraph tree {"]
    if tree.is_trivial:
        lines.append('  t [label="trivial", shape=none];')
    else:

        def walk(t: TreeTerm, name: str) -> None:
            dec = f" {t.decoration}" if t.decoration else ""
            lines.append(f'  {name} [label="{_sigma_label(t.sigma)}{dec}"];')
            for i, c in enumerate(t.children):
                if c.is_trivial:
                    leaf = f"{name}_{i}"
                    lines.append(f'  {leaf} [label="leaf", shape=none];')
                    lines.append(f"  {leaf} -> {name};")
                else:
                    child = f"{name}_{i}"
                    walk(c, child)
                    lines.append(f"  {child} -> {name};")

        walk(tree, "v")
    lines.append("}")
    return "\n".join(lines) + "\n"
