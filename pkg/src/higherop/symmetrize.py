"""Labeled-ordinal posets and the symmetrisation quotient.

An ordinal structure on the concrete set {1..k} is stored as the tuple
of labels in canonical order plus the canonical profile.  For two such
structures the identity map of {1..k} is a morphism exactly when, pair
by pair, the level weakly increases and strictly increases whenever the
pair changes orientation; this single comparison defines the arrow
relation of the classifier poset at arity k.

Symmetrising an operad over Ord(n) quotients the disjoint union of its
components over all labelings at each arity by the relations
(T, m_sigma(b; units)) ~ (S, b), one for every arrow sigma: T -> S.
The quotient is computed by union-find.  For operads whose components
are single points the relations carry no data, so the quotient only
needs a generating family of arrows: profile increments inside one
labeling, plus, for each source and each target labeling, the arrow to
the componentwise-least structure above it.  Every arrow factors as one
such minimal arrow followed by increments, and the general path (all
arrows, with the transported elements) cross-checks the fast one in the
tests.

Poset construction is independent per object pair and safe to farm out;
the union-find runs single-worker per arity, and every returned value
is immutable afterwards.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

import numpy as np

from .ordinals import NOrdinal, OrdinalMorphism, terminal_ordinal
from .operads import (
    BudgetExceededError,
    FinBase,
    FinSetMorphism,
    OperadTable,
    OrdBase,
    base_morphisms,
    desymmetrize,
    endomorphism_operad,
    enumerate_operad_morphisms,
)


class WellDefinednessError(RuntimeError):
    """Two members of the same classes multiplied into different classes."""


@dataclass(frozen=True)
class LabeledOrdinal:
    """An ordinal structure on {1..k}: labels in canonical order + profile."""

    n: int
    labels: tuple[int, ...]
    profile: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "profile", tuple(self.profile))
        k = len(self.labels)
        if sorted(self.labels) != list(range(1, k + 1)):
            raise ValueError("labels must be a permutation of 1..k")
        if len(self.profile) != max(k - 1, 0):
            raise ValueError("profile length does not match the label count")
        if any(not 0 <= l < self.n for l in self.profile):
            raise ValueError("profile level out of range")

    @property
    def k(self) -> int:
        return len(self.labels)

    def shape(self) -> NOrdinal:
        """The underlying canonical ordinal (labels forgotten)."""
        return NOrdinal(self.n, self.profile, self.k)

    def position(self, label: int) -> int:
        return self.labels.index(label)


def labeled_objects(n: int, k: int) -> list[LabeledOrdinal]:
    """All labeled structures at arity k: permutation-major, profile-lex."""
    if k == 0:
        return [LabeledOrdinal(n, (), ())]
    out = []
    for perm in itertools.permutations(range(1, k + 1)):
        for prof in itertools.product(range(n), repeat=k - 1):
            out.append(LabeledOrdinal(n, perm, prof))
    return out


def pair_state(T: LabeledOrdinal) -> dict:
    """(a, b) -> (a_before_b, level) for every label pair a < b."""
    pos = {lab: p for p, lab in enumerate(T.labels)}
    out = {}
    for a in range(1, T.k + 1):
        for b in range(a + 1, T.k + 1):
            pa, pb = pos[a], pos[b]
            lo, hi = (pa, pb) if pa < pb else (pb, pa)
            out[(a, b)] = (pa < pb, min(T.profile[lo:hi]) if T.k > 1 else 0)
    return out


def arrow_leq(T: LabeledOrdinal, S: LabeledOrdinal) -> bool:
    """Is the identity of {1..k} a morphism T -> S?"""
    if T.n != S.n or T.k != S.k:
        raise ValueError("labeled structures are not comparable")
    tS = pair_state(S)
    for pair, (orient, lvl) in pair_state(T).items():
        o2, l2 = tS[pair]
        if l2 < lvl + (0 if orient == o2 else 1):
            return False
    return True


def arrow_morphism(T: LabeledOrdinal, S: LabeledOrdinal) -> OrdinalMorphism:
    """The identity-carried arrow as a morphism of canonical ordinals."""
    pos_s = {lab: p for p, lab in enumerate(S.labels)}
    return OrdinalMorphism(
        T.shape(), S.shape(), tuple(pos_s[lab] for lab in T.labels)
    )


def relabel(T: LabeledOrdinal, rho: dict) -> LabeledOrdinal:
    """Rename every label by rho; the canonical shape is unchanged."""
    return LabeledOrdinal(T.n, tuple(rho[lab] for lab in T.labels), T.profile)


@dataclass
class ClassifierPoset:
    """All labeled structures at one arity with all identity-carried arrows."""

    n: int
    k: int
    objects: tuple
    arrows: tuple  # (source index, target index), strict only

    def object_index(self, T: LabeledOrdinal) -> int:
        return self.objects.index(T)


def build_classifier(n: int, k: int, max_objects: int = 20000) -> ClassifierPoset:
    """The arity-k classifier poset with its full arrow relation."""
    if n < 1 or k < 0:
        raise ValueError("need n >= 1 and k >= 0")
    count = 1 if k == 0 else _factorial(k) * n ** (k - 1)
    if count > max_objects:
        raise BudgetExceededError(
            f"classifier at (n={n}, k={k}) has {count} objects "
            f"(budget {max_objects})"
        )
    objects = tuple(labeled_objects(n, k))
    states = [pair_state(T) for T in objects]
    arrows = []
    pairs = [(a, b) for a in range(1, k + 1) for b in range(a + 1, k + 1)]
    for i, si in enumerate(states):
        for j, sj in enumerate(states):
            if i == j:
                continue
            ok = True
            for p in pairs:
                oi, li = si[p]
                oj, lj = sj[p]
                if lj < li + (0 if oi == oj else 1):
                    ok = False
                    break
            if ok:
                arrows.append((i, j))
    return ClassifierPoset(n, k, objects, tuple(arrows))


def _factorial(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def classifier_dot(P: ClassifierPoset) -> str:
    """DOT digraph; nodes are labeled by permutation and profile."""
    lines = ["digraph classifier {"]
    for i, T in enumerate(P.objects):
        labs = "".join(map(str, T.labels))
        prof = "".join(map(str, T.profile))
        lines.append(f'  o{i} [label="{labs}|{prof}"];')
    for i, j in P.arrows:
        lines.append(f"  o{i} -> o{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# union-find


class UnionFind:
    """Plain union-find with path compression and union by size."""

    def __init__(self, size: int):
        self.parent = list(range(size))
        self.size = [1] * size

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return
        if self.size[ri] < self.size[rj]:
            ri, rj = rj, ri
        self.parent[rj] = ri
        self.size[ri] += self.size[rj]

    def classes(self) -> list[list[int]]:
        groups: dict[int, list[int]] = {}
        for i in range(len(self.parent)):
            groups.setdefault(self.find(i), []).append(i)
        return sorted(groups.values())


# ---------------------------------------------------------------------------
# the symmetrisation quotient


@dataclass
class SymArity:
    k: int
    object_count: int
    element_count: int
    classes: tuple  # tuple of tuples of (object index, label index)
    class_of: dict  # (object index, label index) -> class index


@dataclass
class SymResult:
    n: int
    K: int
    arities: dict
    operad: OperadTable | None = None
    action: dict | None = None  # arity -> {transposition: tuple of class images}
    welldef_checked: int = 0

    def class_counts(self) -> dict:
        return {k: len(ar.classes) for k, ar in sorted(self.arities.items())}


_FAST_CUTOFF = 600  # object count above which singleton operads use the fast path


def symmetrize(
    A: OperadTable,
    K: int | None = None,
    build_operad: bool = True,
    verify: bool = True,
    max_elements: int = 200000,
    shuffle_seed: int | None = None,
    force_path: str | None = None,
) -> SymResult:
    """Quotient A's components by the labeled-ordinal arrow relations.

    Returns, per arity up to K, the classes of pairs (labeling, element)
    under (T, m_sigma(b; units)) ~ (S, b) for arrows sigma: T -> S, with
    lexicographically least representatives.  When build_operad is set
    the induced symmetric operad (components per arity, relabeling
    action, substitution multiplication) is constructed; verify runs the
    exhaustive well-definedness check over all class members within the
    truncation and raises WellDefinednessError on failure.
    shuffle_seed permutes the merge order (the result must not change).
    """
    if not isinstance(A.base, OrdBase):
        raise ValueError("symmetrize expects an operad over Ord(n)")
    n = A.base.n
    if K is None:
        K = A.K
    if K > A.K:
        raise ValueError("cannot symmetrize beyond the stored truncation")
    arities = {}
    lo = 1 if A.base.constant_free else 0
    for k in range(lo, K + 1):
        arities[k] = _symmetrize_arity(A, n, k, max_elements, shuffle_seed, force_path)
    result = SymResult(n, K, arities)
    if build_operad:
        result.operad = _sym_operad(A, result)
        result.action = _sym_action(A, result)
        if verify:
            result.welldef_checked = _verify_well_defined(A, result)
    return result


def _component_labels(A: OperadTable, shape: NOrdinal):
    return A.components.get(shape, ())


def _symmetrize_arity(A, n, k, max_elements, shuffle_seed, force_path):
    shapes = {prof: NOrdinal(n, prof, k) for prof in _profiles(n, k)}
    sizes = {prof: len(_component_labels(A, s)) for prof, s in shapes.items()}
    singleton = all(v == 1 for v in sizes.values())
    object_count = (1 if k == 0 else _factorial(k) * n ** max(k - 1, 0))
    total = object_count if k == 0 else _factorial(k) * sum(sizes.values())
    if k == 0:
        total = sizes.get((), 0)
    if total > max_elements:
        raise BudgetExceededError(
            f"symmetrisation at arity {k} has {total} elements "
            f"(budget {max_elements})"
        )
    path = force_path or ("fast" if singleton and object_count > _FAST_CUTOFF else "general")
    if path == "fast":
        if not singleton:
            raise ValueError("the fast path needs one-point components")
        classes = _fast_singleton_classes(n, k, shuffle_seed)
        classes = tuple(tuple((obj, 0) for obj in cls) for cls in classes)
    else:
        classes = _general_classes(A, n, k, sizes, shuffle_seed)
    class_of = {}
    for ci, members in enumerate(classes):
        for m in members:
            class_of[m] = ci
    return SymArity(k, object_count, sum(len(c) for c in classes), classes, class_of)


def _profiles(n: int, k: int):
    if k == 0:
        return [()]
    return list(itertools.product(range(n), repeat=k - 1))


def _general_classes(A, n, k, sizes, shuffle_seed):
    objects = labeled_objects(n, k)
    offsets = []
    acc = 0
    for T in objects:
        offsets.append(acc)
        acc += sizes[T.profile]
    uf = UnionFind(acc)
    singleton = all(v == 1 for v in sizes.values())
    unit_idx = A.unit_index() if not singleton else 0
    merges = []
    states = [pair_state(T) for T in objects]
    pairs = [(a, b) for a in range(1, k + 1) for b in range(a + 1, k + 1)]
    for i, T in enumerate(objects):
        for j, S in enumerate(objects):
            if i == j:
                continue
            ok = True
            for p in pairs:
                oi, li = states[i][p]
                oj, lj = states[j][p]
                if lj < li + (0 if oi == oj else 1):
                    ok = False
                    break
            if not ok:
                continue
            if singleton:
                # one-point components force the transported element
                merges.append((offsets[i], offsets[j]))
                continue
            sigma = arrow_morphism(T, S)
            tab = A.mult[sigma]
            for b in range(sizes[S.profile]):
                pulled = int(tab[(b,) + (unit_idx,) * k])
                merges.append((offsets[i] + pulled, offsets[j] + b))
    if shuffle_seed is not None:
        import random

        random.Random(shuffle_seed).shuffle(merges)
    for x, y in merges:
        uf.union(x, y)
    elem_of = []
    for i, T in enumerate(objects):
        for lab in range(sizes[T.profile]):
            elem_of.append((i, lab))
    return tuple(
        tuple(sorted(elem_of[m] for m in cls)) for cls in uf.classes()
    )


def _fast_singleton_classes(n, k, shuffle_seed):
    """Object-level quotient from a generating family of arrows.

    Generators: +1 on one profile entry (same labeling), and for every
    object and every other labeling the arrow to the least structure
    above it with that labeling.  Composites of these reach every arrow.
    """
    if k == 0:
        return [[0]]
    perms = list(itertools.permutations(range(k)))  # positions -> 0-based labels
    n_perm, n_prof = len(perms), n ** (k - 1)
    total = n_perm * n_prof
    pairs = [(a, b) for a in range(k) for b in range(a + 1, k)]
    n_pairs = len(pairs)

    profiles = np.empty((n_prof, max(k - 1, 1)), dtype=np.int16)
    codes = np.arange(n_prof, dtype=np.int64)
    for m in range(k - 2, -1, -1):
        profiles[:, m] = codes % n
        codes //= n

    # per permutation: orientation bit and position span of every pair
    orient = np.empty((n_perm, n_pairs), dtype=np.int16)
    spans = []
    for r, perm in enumerate(perms):
        pos = {lab: p for p, lab in enumerate(perm)}
        row_spans = []
        for t, (a, b) in enumerate(pairs):
            pa, pb = pos[a], pos[b]
            orient[r, t] = 1 if pa < pb else 0
            row_spans.append((min(pa, pb), max(pa, pb)))
        spans.append(row_spans)

    # pair levels per profile, per permutation: min over the position span
    levels = np.empty((n_perm, n_prof, n_pairs), dtype=np.int16)
    for r in range(n_perm):
        for t, (lo, hi) in enumerate(spans[r]):
            levels[r, :, t] = profiles[:, lo:hi].min(axis=1)

    # pairs crossing each consecutive position, per permutation
    crossing = [
        [[t for t, (lo, hi) in enumerate(spans[r]) if lo <= m < hi]
         for m in range(k - 1)]
        for r in range(n_perm)
    ]

    strides = np.array([n ** (k - 2 - m) for m in range(k - 1)], dtype=np.int64)

    merges = []
    prof_codes = np.arange(n_prof, dtype=np.int64)
    for m in range(k - 1):
        mask = profiles[:, m] < n - 1
        below = prof_codes[mask]
        for r in range(n_perm):
            base_id = r * n_prof
            for c in below:
                merges.append((base_id + int(c), base_id + int(c) + int(strides[m])))

    for r in range(n_perm):
        lv = levels[r]  # (n_prof, n_pairs)
        for r2 in range(n_perm):
            if r2 == r:
                continue
            flip = (orient[r] != orient[r2]).astype(np.int16)
            bounds = lv + flip[None, :]
            target_digits = np.zeros((n_prof, k - 1), dtype=np.int64)
            for m in range(k - 1):
                cols = crossing[r2][m]
                target_digits[:, m] = bounds[:, cols].max(axis=1)
            valid = (target_digits <= n - 1).all(axis=1)
            t_codes = target_digits @ strides
            src = r * n_prof + prof_codes[valid]
            dst = r2 * n_prof + t_codes[valid]
            merges.extend(zip(src.tolist(), dst.tolist()))

    if shuffle_seed is not None:
        import random

        random.Random(shuffle_seed).shuffle(merges)
    uf = UnionFind(total)
    for x, y in merges:
        uf.union(x, y)
    return uf.classes()


def terminal_class_counts(
    n: int, kmax: int, max_elements: int = 200000, shuffle_seed: int | None = None
) -> dict:
    """Class counts of the symmetrised one-point operad, arity by arity.

    Works directly on labelings (one element per labeling), so no
    multiplication tables are materialised; this is the route for arities
    whose full table would not fit the budget.  Cross-checked against
    symmetrize(make_ass(...)) in the tests.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    counts = {}
    for k in range(kmax + 1):
        total = 1 if k == 0 else _factorial(k) * n ** (k - 1)
        if total > max_elements:
            raise BudgetExceededError(
                f"arity {k} has {total} labelings (budget {max_elements})"
            )
        counts[k] = len(_fast_singleton_classes(n, k, shuffle_seed))
    return counts


# ---------------------------------------------------------------------------
# the induced symmetric operad


def _zero_pull(A: OperadTable, T: LabeledOrdinal, label_idx: int):
    """Transport an element down to the all-zero profile over the same labels."""
    if T.k <= 1 or all(l == 0 for l in T.profile):
        return T, label_idx
    flat = LabeledOrdinal(T.n, T.labels, (0,) * (T.k - 1))
    zeta = OrdinalMorphism(flat.shape(), T.shape(), tuple(range(T.k)))
    tab = A.mult[zeta]
    pulled = int(tab[(label_idx,) + (A.unit_index(),) * T.k])
    return flat, pulled


def _substitute(A, result: SymResult, f: FinSetMorphism, outer, args):
    """One multiplication instance from explicit member choices.

    outer is (LabeledOrdinal at arity m, label index); args[i] is the
    member (LabeledOrdinal at arity |fiber i|, label index).  Returns the
    class of the composite at arity k.
    """
    k, m = f.source, f.target
    n = result.n
    S, b_idx = _zero_pull(A, *outer)
    fiber_elems = [tuple(x for x in range(k) if f.map[x] == i) for i in range(m)]

    # relations on {1..k}: within a group from the argument, across from S
    pos_s = {lab: p for p, lab in enumerate(S.labels)}
    arg_pos = []
    for i in range(m):
        Ti = args[i][0]
        arg_pos.append({Ti.labels[p]: p for p in range(Ti.k)})

    def before(x: int, y: int) -> bool:
        i, j = f.map[x - 1], f.map[y - 1]
        if i == j:
            Ti = args[i][0]
            rx = fiber_elems[i].index(x - 1) + 1
            ry = fiber_elems[i].index(y - 1) + 1
            return Ti.position(rx) < Ti.position(ry)
        return pos_s[i + 1] < pos_s[j + 1]

    order = sorted(
        range(1, k + 1),
        key=functools.cmp_to_key(lambda x, y: -1 if before(x, y) else 1),
    )

    def pair_level(x: int, y: int) -> int:
        i, j = f.map[x - 1], f.map[y - 1]
        if i != j:
            return 0
        Ti = args[i][0]
        rx = fiber_elems[i].index(x - 1) + 1
        ry = fiber_elems[i].index(y - 1) + 1
        px, py = Ti.position(rx), Ti.position(ry)
        lo, hi = min(px, py), max(px, py)
        return min(Ti.profile[lo:hi])

    profile = tuple(
        pair_level(order[p], order[p + 1]) for p in range(k - 1)
    )
    R = LabeledOrdinal(n, tuple(order), profile)

    sigma = OrdinalMorphism(
        R.shape(), S.shape(), tuple(pos_s[f.map[lab - 1] + 1] for lab in order)
    )
    a_indices = tuple(args[S.labels[q] - 1][1] for q in range(m))
    value = int(A.mult[sigma][(b_idx,) + a_indices])
    arity = result.arities[k]
    _, index = _labeled_index(n, k)
    return arity.class_of[(index[R], value)]


@functools.lru_cache(maxsize=None)
def _labeled_index(n: int, k: int):
    objs = tuple(labeled_objects(n, k))
    return objs, {T: i for i, T in enumerate(objs)}


def _sym_operad(A: OperadTable, result: SymResult) -> OperadTable:
    """Assemble the symmetric operad structure on the classes."""
    n = result.n
    base = FinBase(constant_free=A.base.constant_free)
    K = result.K
    components = {}
    for k, arity in result.arities.items():
        components[k] = tuple(f"c{j}" for j in range(len(arity.classes)))
    reps = {
        k: [cls[0] for cls in arity.classes]
        for k, arity in result.arities.items()
    }
    objects_cache = {k: _labeled_index(n, k)[0] for k in result.arities}
    mult = {}
    for f in base_morphisms(base, K):
        k, m = f.source, f.target
        fib_sizes = [len([x for x in f.map if x == i]) for i in range(m)]
        shape = (len(components[m]),) + tuple(len(components[s]) for s in fib_sizes)
        tab = np.empty(shape, dtype=np.int32)
        for b_c in range(shape[0]):
            b_obj, b_lab = reps[m][b_c]
            outer = (objects_cache[m][b_obj], b_lab)
            for a_cs in itertools.product(*(range(s) for s in shape[1:])):
                args = []
                for i, c in enumerate(a_cs):
                    o_idx, lab = reps[fib_sizes[i]][c]
                    args.append((objects_cache[fib_sizes[i]][o_idx], lab))
                tab[(b_c,) + a_cs] = _substitute(A, result, f, outer, args)
        mult[f] = tab
    unit_arity = result.arities[1]
    ident = labeled_objects(n, 1)[0]
    unit_class = unit_arity.class_of[(0, A.label_index(terminal_ordinal(n), A.unit))]
    return OperadTable(
        base, K, components, components[1][unit_class], mult, f"sym_{n}({A.name})"
    )


def _sym_action(A: OperadTable, result: SymResult) -> dict:
    """Class-level relabeling action, verified well-defined member by member."""
    action = {}
    for k, arity in result.arities.items():
        if k < 2:
            continue
        objects, obj_index = _labeled_index(result.n, k)
        table = {}
        for rho in itertools.permutations(range(1, k + 1)):
            renaming = {x: rho[x - 1] for x in range(1, k + 1)}
            images = [None] * len(arity.classes)
            for ci, members in enumerate(arity.classes):
                for o_idx, lab in members:
                    image = arity.class_of[
                        (obj_index[relabel(objects[o_idx], renaming)], lab)
                    ]
                    if images[ci] is None:
                        images[ci] = image
                    elif images[ci] != image:
                        raise WellDefinednessError(
                            f"relabeling {rho} splits class {ci} at arity {k}"
                        )
            table[rho] = tuple(images)
        action[k] = table
    return action


def _verify_well_defined(A: OperadTable, result: SymResult) -> int:
    """Recompute every multiplication entry from every member combination."""
    base = result.operad.base
    checked = 0
    objects_cache = {k: _labeled_index(result.n, k)[0] for k in result.arities}
    for f in base_morphisms(base, result.K):
        k, m = f.source, f.target
        fib_sizes = [len([x for x in f.map if x == i]) for i in range(m)]
        tab = result.operad.mult[f]
        for b_c in range(tab.shape[0]):
            b_members = result.arities[m].classes[b_c]
            for a_cs in itertools.product(*(range(s) for s in tab.shape[1:])):
                expected = int(tab[(b_c,) + a_cs])
                for b_obj, b_lab in b_members:
                    outer = (objects_cache[m][b_obj], b_lab)
                    for arg_members in itertools.product(
                        *(result.arities[fib_sizes[i]].classes[a_cs[i]]
                          for i in range(m))
                    ):
                        args = [
                            (objects_cache[fib_sizes[i]][o], lab)
                            for i, (o, lab) in enumerate(arg_members)
                        ]
                        got = _substitute(A, result, f, outer, args)
                        checked += 1
                        if got != expected:
                            raise WellDefinednessError(
                                f"multiplication along {f} is not constant on "
                                f"classes: entry {(b_c,) + a_cs} with members "
                                f"outer={outer} args={args} gave class {got}, "
                                f"the representatives gave {expected}"
                            )
    return checked


# ---------------------------------------------------------------------------
# adjunction and algebras


def sym_result_to_json(result: SymResult) -> dict:
    """Partitions of the symmetrisation, arity by arity.

    Members are pairs [labeling index, element index]; labeling indices
    refer to the permutation-major, profile-lexicographic enumeration.
    """
    return {
        "n": result.n,
        "K": result.K,
        "arities": {
            str(k): {
                "object_count": ar.object_count,
                "element_count": ar.element_count,
                "classes": [[list(member) for member in cls] for cls in ar.classes],
            }
            for k, ar in sorted(result.arities.items())
        },
    }


@dataclass
class AdjunctionReport:
    sym_hom_count: int
    des_hom_count: int
    bijection: bool

    @property
    def ok(self) -> bool:
        return self.sym_hom_count == self.des_hom_count and self.bijection


def unit_insertion(A: OperadTable, result: SymResult):
    """The comparison map: an element of A(T) to its class at arity |T|.

    Returns a dict T -> tuple of class indices, one per label of A(T);
    T is labeled by the identity labeling of {1..|T|}.
    """
    out = {}
    for T in A.base.objects(result.K):
        k = T.size
        if k not in result.arities:
            continue
        _, index = _labeled_index(result.n, k)
        ident = LabeledOrdinal(result.n, tuple(range(1, k + 1)), T.profile)
        o_idx = index[ident]
        out[T] = tuple(
            result.arities[k].class_of[(o_idx, lab)]
            for lab in range(len(A.components[T]))
        )
    return out


def _transfer(A: OperadTable, result: SymResult, B: OperadTable, g) -> tuple:
    """Compose a morphism sym(A) -> B with the unit insertion A -> des(sym A)."""
    from .operads import _object_order

    eta = unit_insertion(A, result)
    g_maps = dict(g.components)
    comps = []
    for T in _object_order(A.base, A.base.objects(result.K)):
        comps.append((T, tuple(g_maps[T.size][c] for c in eta[T])))
    return tuple(comps)


def check_adjunction(
    A: OperadTable, B: OperadTable, max_nodes: int = 2_000_000
) -> AdjunctionReport:
    """Count morphisms on both sides of sym -| des and verify the bijection.

    Every morphism sym(A) -> B transfers along the unit insertion to a
    morphism A -> des(B); the transfer must be injective and hit every
    morphism on the des side.
    """
    if not isinstance(A.base, OrdBase) or not isinstance(B.base, FinBase):
        raise ValueError("expected A over Ord(n) and B over FinSet")
    n = A.base.n
    result = symmetrize(A, A.K)
    sym_homs = enumerate_operad_morphisms(result.operad, B, max_nodes=max_nodes)
    des_homs = enumerate_operad_morphisms(A, desymmetrize(B, n), max_nodes=max_nodes)
    transferred = [_transfer(A, result, B, g) for g in sym_homs]
    des_set = {phi.components for phi in des_homs}
    bijection = (
        len(set(transferred)) == len(transferred)
        and set(transferred) == des_set
    )
    return AdjunctionReport(len(sym_homs), len(des_homs), bijection)


@dataclass
class AlgebraEquivalenceReport:
    direct_count: int
    symmetrized_count: int
    bijection: bool

    @property
    def ok(self) -> bool:
        return self.direct_count == self.symmetrized_count and self.bijection


def algebra_equivalence(
    A: OperadTable, X, max_nodes: int = 2_000_000
) -> AlgebraEquivalenceReport:
    """Compare algebra structures on X before and after symmetrisation."""
    if not isinstance(A.base, OrdBase):
        raise ValueError("expected an operad over Ord(n)")
    n = A.base.n
    end = endomorphism_operad(tuple(X), A.K, constant_free=A.base.constant_free)
    result = symmetrize(A, A.K)
    sym_algs = enumerate_operad_morphisms(result.operad, end, max_nodes=max_nodes)
    direct = enumerate_operad_morphisms(A, desymmetrize(end, n), max_nodes=max_nodes)
    transferred = [_transfer(A, result, end, g) for g in sym_algs]
    direct_set = {phi.components for phi in direct}
    bijection = (
        len(set(transferred)) == len(transferred)
        and set(transferred) == direct_set
    )
    return AlgebraEquivalenceReport(len(direct), len(sym_algs), bijection)
