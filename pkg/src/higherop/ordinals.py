"""Canonical n-ordinals, their morphisms, fibers and suspensions.

An n-ordinal is a finite set carrying n complementary antireflexive
relations <_0, ..., <_{n-1} such that every pair of distinct elements is
related at exactly one level and a <_p b, b <_q c force a <_{min(p,q)} c.
The union of the relations is a total order, so after renaming the
underlying set to {0, ..., k-1} in that order the whole structure is
determined by the levels of consecutive elements:

    profile[i] = the unique p with i <_p i+1,

and level(i, j) = min(profile[i:j]) for any i < j.  This module stores
ordinals in that canonical form, which is the linearised pruned-tree
picture: leaves are the elements, and leaves i, i+1 branch off each
other exactly below height profile[i].

The empty ordinal (size 0) and the one-element terminal ordinal both
have an empty profile, so the element count is kept explicitly.

Everything here is immutable and every operation is a pure function;
the enumeration caches are internal and safe for concurrent readers.
"""

from __future__ import annotations

import functools
import itertools
import json
from dataclasses import dataclass


@dataclass(frozen=True)
class NOrdinal:
    """Canonical n-ordinal: element count plus consecutive levels."""

    n: int
    profile: tuple[int, ...]
    size: int = -1  # -1 means "derive from the profile"

    def __post_init__(self) -> None:
        if self.size == -1:
            object.__setattr__(self, "size", len(self.profile) + 1)
        object.__setattr__(self, "profile", tuple(self.profile))
        if self.n < 0:
            raise ValueError(f"negative number of levels: {self.n}")
        if self.size < 0:
            raise ValueError(f"negative size: {self.size}")
        expected = max(self.size - 1, 0)
        if len(self.profile) != expected:
            raise ValueError(
                f"profile length {len(self.profile)} does not match size {self.size}"
            )
        for l in self.profile:
            if not 0 <= l <= self.n - 1:
                raise ValueError(f"profile level {l} outside [0, {self.n - 1}]")

    def __repr__(self) -> str:
        if self.size == 0:
            return f"NOrdinal(n={self.n}, empty)"
        return f"NOrdinal(n={self.n}, profile={self.profile})"


@dataclass(frozen=True)
class InfOrdinal:
    """Ordinal with levels in the nonpositive integers (the n -> oo limit)."""

    profile: tuple[int, ...]
    size: int = -1

    def __post_init__(self) -> None:
        if self.size == -1:
            object.__setattr__(self, "size", len(self.profile) + 1)
        object.__setattr__(self, "profile", tuple(self.profile))
        if len(self.profile) != max(self.size - 1, 0):
            raise ValueError("profile length does not match size")
        if any(l > 0 for l in self.profile):
            raise ValueError("levels of an infinite-type ordinal must be <= 0")


def ordinal(n: int, *profile: int) -> NOrdinal:
    """Shorthand constructor from explicit consecutive levels."""
    return NOrdinal(n, tuple(profile))


def empty_ordinal(n: int) -> NOrdinal:
    """The initial n-ordinal (no elements, degenerate root-only tree)."""
    return NOrdinal(n, (), 0)


def terminal_ordinal(n: int) -> NOrdinal:
    """The one-element terminal n-ordinal (linear tree with n levels)."""
    return NOrdinal(n, (), 1)


def cardinality(T: NOrdinal) -> int:
    """Number of elements of the underlying set."""
    return T.size


def level(T, i: int, j: int) -> int:
    """The unique p with i <_p j, namely min(profile[i:j]).

    Works for both NOrdinal and InfOrdinal values.

    >>> level(ordinal(2, 1, 0, 1, 1), 0, 2)
    0
    >>> level(ordinal(2, 1, 0, 1, 1), 0, 1)
    1
    """
    if not 0 <= i < j < T.size:
        raise ValueError(f"need 0 <= i < j < {T.size}, got ({i}, {j})")
    return min(T.profile[i:j])


def relations(T: NOrdinal) -> tuple[tuple[int, int, int], ...]:
    """All relations of T as triples (i, p, j) meaning i <_p j."""
    out = []
    for i in range(T.size):
        for j in range(i + 1, T.size):
            out.append((i, level(T, i, j), j))
    return tuple(out)


def enumerate_ordinals(n: int, k: int) -> list[NOrdinal]:
    """All canonical n-ordinals with k elements, in lexicographic profile order.

    There are n**(k-1) of them for k >= 1 and exactly one for k = 0.  For
    n = 0 no relations exist, so only k in {0, 1} produce anything.
    """
    if n < 0 or k < 0:
        raise ValueError("n and k must be nonnegative")
    if k == 0:
        return [empty_ordinal(n)]
    if n == 0:
        return [terminal_ordinal(0)] if k == 1 else []
    return [NOrdinal(n, p) for p in itertools.product(range(n), repeat=k - 1)]


def is_morphism(f, T, S) -> bool:
    """Check the three morphism conditions for a candidate map f: T -> S.

    For every i <_p j in T one of the following must hold:
    f(i) <_r f(j) with r >= p, f(i) = f(j), or f(j) <_r f(i) with r > p
    (the reversal condition is strict).
    """
    f = tuple(f)
    if len(f) != T.size:
        raise ValueError(f"map length {len(f)} != source size {T.size}")
    if any(not 0 <= v < S.size for v in f):
        raise ValueError("map value outside the target")
    for i in range(T.size):
        for j in range(i + 1, T.size):
            p = min(T.profile[i:j])
            fi, fj = f[i], f[j]
            if fi == fj:
                continue
            if fi < fj:
                if min(S.profile[fi:fj]) < p:
                    return False
            else:
                if min(S.profile[fj:fi]) <= p:
                    return False
    return True


@dataclass(frozen=True)
class OrdinalMorphism:
    """A validated morphism of n-ordinals in canonical form."""

    source: NOrdinal
    target: NOrdinal
    map: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "map", tuple(self.map))
        if self.source.n != self.target.n:
            raise ValueError("source and target live over different n")
        if not is_morphism(self.map, self.source, self.target):
            raise ValueError(
                f"{self.map} is not a morphism {self.source} -> {self.target}"
            )

    def __call__(self, i: int) -> int:
        return self.map[i]


def identity(T: NOrdinal) -> OrdinalMorphism:
    return OrdinalMorphism(T, T, tuple(range(T.size)))


def to_terminal(T: NOrdinal) -> OrdinalMorphism:
    """The unique morphism T -> U_n."""
    return OrdinalMorphism(T, terminal_ordinal(T.n), (0,) * T.size)


def _trusted_morphism(T: NOrdinal, S: NOrdinal, m: tuple[int, ...]) -> OrdinalMorphism:
    # bypasses revalidation; callers must have checked the map already
    f = object.__new__(OrdinalMorphism)
    object.__setattr__(f, "source", T)
    object.__setattr__(f, "target", S)
    object.__setattr__(f, "map", m)
    return f


_VECTOR_ENUM_THRESHOLD = 512  # candidate maps above which numpy filters


@functools.lru_cache(maxsize=None)
def _morphisms_cached(T: NOrdinal, S: NOrdinal) -> tuple[OrdinalMorphism, ...]:
    if T.size == 0:
        return (OrdinalMorphism(T, S, ()),)
    total = S.size ** T.size
    if total == 0:
        return ()
    if total <= _VECTOR_ENUM_THRESHOLD:
        return tuple(
            OrdinalMorphism(T, S, f)
            for f in itertools.product(range(S.size), repeat=T.size)
            if is_morphism(f, T, S)
        )
    import numpy as np

    cand = np.empty((total, T.size), dtype=np.int16)
    codes = np.arange(total, dtype=np.int64)
    for pos in range(T.size - 1, -1, -1):
        cand[:, pos] = codes % S.size
        codes //= S.size
    # level lookup for the target, padded so fancy indexing stays in range
    lvl = np.zeros((S.size, S.size), dtype=np.int16)
    for a in range(S.size):
        for b in range(a + 1, S.size):
            lvl[a, b] = min(S.profile[a:b])
    ok = np.ones(total, dtype=bool)
    for i in range(T.size):
        for j in range(i + 1, T.size):
            p = min(T.profile[i:j])
            fi, fj = cand[:, i].astype(np.int64), cand[:, j].astype(np.int64)
            lo = np.minimum(fi, fj)
            hi = np.maximum(fi, fj)
            lv = lvl[lo, hi]
            cond = (fi == fj) | ((fi < fj) & (lv >= p)) | ((fi > fj) & (lv > p))
            ok &= cond
    rows = cand[ok]
    return tuple(
        _trusted_morphism(T, S, tuple(int(v) for v in row)) for row in rows
    )


def enumerate_morphisms(T: NOrdinal, S: NOrdinal) -> list[OrdinalMorphism]:
    """All morphisms T -> S in lexicographic order of the underlying map."""
    if T.n != S.n:
        raise ValueError("source and target live over different n")
    return list(_morphisms_cached(T, S))


@functools.lru_cache(maxsize=None)
def compose(g: OrdinalMorphism, f: OrdinalMorphism) -> OrdinalMorphism:
    """The composite g after f."""
    if f.target != g.source:
        raise ValueError("target of f differs from source of g")
    return OrdinalMorphism(f.source, g.target, tuple(g.map[v] for v in f.map))


@functools.lru_cache(maxsize=None)
def fiber(f: OrdinalMorphism, i: int) -> NOrdinal:
    """Preimage of target element i with its induced ordinal structure.

    Consecutive preimage elements a < b contribute the level min over the
    whole interval [a, b) in the source.
    """
    if not 0 <= i < f.target.size:
        raise ValueError(f"target index {i} out of range")
    elems = [a for a, v in enumerate(f.map) if v == i]
    if not elems:
        return empty_ordinal(f.source.n)
    prof = tuple(
        min(f.source.profile[elems[t] : elems[t + 1]])
        for t in range(len(elems) - 1)
    )
    return NOrdinal(f.source.n, prof)


def fiber_elements(f: OrdinalMorphism, i: int) -> tuple[int, ...]:
    """Source positions mapping to target element i, ascending."""
    return tuple(a for a, v in enumerate(f.map) if v == i)


@functools.lru_cache(maxsize=None)
def restrict_to_fiber(
    sigma: OrdinalMorphism, omega: OrdinalMorphism, i: int
) -> OrdinalMorphism:
    """Restriction of sigma: T -> S over target element i of omega: S -> R.

    Returns the induced morphism fiber(omega o sigma, i) -> fiber(omega, i)
    with both sides renumbered canonically.
    """
    if sigma.target != omega.source:
        raise ValueError("sigma and omega are not composable")
    comp = compose(omega, sigma)
    src_elems = fiber_elements(comp, i)
    tgt_elems = fiber_elements(omega, i)
    tgt_rank = {e: r for r, e in enumerate(tgt_elems)}
    return OrdinalMorphism(
        fiber(comp, i), fiber(omega, i), tuple(tgt_rank[sigma.map[a]] for a in src_elems)
    )


def suspend_p(T: NOrdinal, p: int) -> NOrdinal:
    """The p-suspension: an (n+1)-ordinal with level p freed up.

    Levels below p are kept, levels >= p are shifted up by one; the
    underlying set is unchanged.
    """
    if not 0 <= p <= T.n:
        raise ValueError(f"suspension index {p} outside [0, {T.n}]")
    return NOrdinal(T.n + 1, tuple(l if l < p else l + 1 for l in T.profile), T.size)


def suspend_morphism(f: OrdinalMorphism, p: int) -> OrdinalMorphism:
    """Apply the p-suspension to a morphism (same underlying map)."""
    return OrdinalMorphism(suspend_p(f.source, p), suspend_p(f.target, p), f.map)


def suspend_inf(T: NOrdinal) -> InfOrdinal:
    """Stable suspension: the top level n-1 is renormalised to 0.

    Level l becomes l - (n - 1), so iterating vertical suspensions first
    does not change the result.
    """
    if T.n == 0:
        return InfOrdinal((), T.size)
    return InfOrdinal(tuple(l - (T.n - 1) for l in T.profile), T.size)


# ---------------------------------------------------------------------------
# rendering and serialisation


def _blocks(profile, lo: int, hi: int, h: int):
    """Split [lo, hi) at the positions where consecutive elements branch at height h."""
    cuts = [i for i in range(lo, hi - 1) if profile[i] == h]
    bounds = [lo] + [c + 1 for c in cuts] + [hi]
    return list(zip(bounds[:-1], bounds[1:]))


def _ascii_block(T: NOrdinal, lo: int, hi: int, h: int) -> str:
    if h == T.n:
        return str(lo)
    inner = ",".join(_ascii_block(T, a, b, h + 1) for a, b in _blocks(T.profile, lo, hi, h))
    return f"[{inner}]"


def render(T: NOrdinal, format: str = "ascii") -> str:
    """Deterministic rendering of the pruned tree ("ascii" or "dot").

    The ascii form is the nested-bracket linearisation: brackets nest n
    deep and the leaves are the elements in canonical order.
    """
    if format == "ascii":
        if T.size == 0:
            return "[]"
        return _ascii_block(T, 0, T.size, 0)
    if format == "dot":
        lines = ["digraph ordinal {", '  rankdir="BT";']
        lines.append('  root [label="", shape=point];')

        def walk(lo: int, hi: int, h: int, parent: str) -> None:
            if h == T.n:
                name = f"leaf{lo}"
                lines.append(f'  {name} [label="{lo}", shape=none];')
                lines.append(f"  {name} -> {parent};")
                return
            for a, b in _blocks(T.profile, lo, hi, h):
                name = f"v{h + 1}_{a}_{b}"
                lines.append(f'  {name} [label="", shape=point];')
                lines.append(f"  {name} -> {parent};")
                walk(a, b, h + 1, name)

        if T.size > 0:
            walk(0, T.size, 0, "root")
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown render format: {format!r}")


def ordinal_to_json(T: NOrdinal) -> dict:
    """JSON object for an ordinal; "size" disambiguates the empty ordinal."""
    return {"n": T.n, "profile": list(T.profile), "size": T.size}


def ordinal_from_json(data: dict) -> NOrdinal:
    profile = tuple(data["profile"])
    size = data.get("size", len(profile) + 1)
    return NOrdinal(data["n"], profile, size)


def morphism_to_json(f: OrdinalMorphism) -> dict:
    return {
        "source": ordinal_to_json(f.source),
        "target": ordinal_to_json(f.target),
        "map": list(f.map),
    }


def morphism_from_json(data: dict) -> OrdinalMorphism:
    return OrdinalMorphism(
        ordinal_from_json(data["source"]),
        ordinal_from_json(data["target"]),
        tuple(data["map"]),
    )


def ordinal_key(T: NOrdinal) -> str:
    """Canonical JSON string, used as a dictionary key in serialised tables."""
    return json.dumps(ordinal_to_json(T), sort_keys=True, separators=(",", ":"))
