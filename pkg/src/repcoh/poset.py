"""Finite posets, chains, components and interval enumeration.

Subsets of a poset are Python ints used as bitmasks: bit ``i`` set means
element ``i`` is a member.  The order is stored as one up-set mask per
element, so ``a <= b`` is a single shift.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .errors import (
    CyclicInput, DuplicateElement, IndexOutOfRange, IntervalExplosion,
    PosetSyntaxError, UnknownName,
)

DEFAULT_INTERVAL_CAP = 5_000_000

Chain = tuple  # tuple[int, ...] of element indices, weakly increasing


def bits(mask: int) -> list[int]:
    """Indices of the set bits of ``mask``, ascending."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def to_mask(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def interval_cap(cap: int | None = None) -> int:
    """Resolve the interval cap: explicit value, then env override, then default."""
    if cap is not None:
        return cap
    env = os.environ.get("REPCOH_INTERVAL_CAP")
    return int(env) if env else DEFAULT_INTERVAL_CAP


@dataclass(frozen=True)
class Poset:
    """A finite poset on ``0..m-1``.

    ``up[a]`` is the mask of all ``b`` with ``a <= b`` (reflexive).  Use
    :meth:`from_relations` to build one from arbitrary relations.
    """
    names: tuple
    up: tuple
    down: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        m = len(self.names)
        down = [0] * m
        for a, u in enumerate(self.up):
            for b in bits(u):
                down[b] |= 1 << a
        object.__setattr__(self, "down", tuple(down))

    @classmethod
    def from_relations(cls, names: Sequence[str], pairs: Iterable[tuple[int, int]]) -> "Poset":
        """Reflexive-transitive closure of ``pairs`` (``a < b``)."""
        m = len(names)
        succ = [set() for _ in range(m)]
        indeg = [0] * m
        for a, b in pairs:
            if a == b:
                raise CyclicInput(f"relation {names[a]} < {names[a]}")
            if b not in succ[a]:
                succ[a].add(b)
                indeg[b] += 1
        order = [x for x in range(m) if indeg[x] == 0]
        for x in order:
            for y in succ[x]:
                indeg[y] -= 1
                if indeg[y] == 0:
                    order.append(y)
        if len(order) < m:
            stuck = sorted(names[x] for x in range(m) if indeg[x] > 0)
            raise CyclicInput("directed cycle among " + ", ".join(stuck))
        up = [0] * m
        for x in reversed(order):
            u = 1 << x
            for y in succ[x]:
                u |= up[y]
            up[x] = u
        return cls(tuple(names), tuple(up))

    @property
    def m(self) -> int:
        return len(self.names)

    def __len__(self):
        return len(self.names)

    def leq(self, a: int, b: int) -> bool:
        return bool(self.up[a] >> b & 1)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownName(name) from None

    @cached_property
    def _index(self):
        return {n: i for i, n in enumerate(self.names)}

    @cached_property
    def covers(self) -> tuple[tuple[int, int], ...]:
        """Cover pairs ``(a, b)``, sorted: ``a < b`` with nothing strictly between."""
        out = []
        for a in range(self.m):
            above = self.up[a] & ~(1 << a)
            for b in bits(above):
                if not (above & self.down[b] & ~(1 << b)):
                    out.append((a, b))
        return tuple(out)

    @cached_property
    def hasse(self) -> tuple[int, ...]:
        """Mask of Hasse-diagram neighbours of each element."""
        nb = [0] * self.m
        for a, b in self.covers:
            nb[a] |= 1 << b
            nb[b] |= 1 << a
        return tuple(nb)

    @cached_property
    def comparable(self) -> tuple[int, ...]:
        return tuple(u | d for u, d in zip(self.up, self.down))

    def strict_pairs(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(self.m) for b in bits(self.up[a]) if a != b]

    def leq_pairs(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(self.m) for b in bits(self.up[a])]

    @property
    def full(self) -> int:
        return (1 << self.m) - 1

    def _check(self, i: int):
        if not 0 <= i < self.m:
            raise IndexOutOfRange(f"element {i} not in 0..{self.m - 1}")


# -- file format ---------------------------------------------------------

def parse_poset(text: str, strict: bool = False) -> Poset:
    """Parse the line format::

        # comment
        element a
        rel a b        # a < b

    Names used in ``rel`` without a declaration are declared on first use,
    unless ``strict`` is set, in which case they raise :class:`UnknownName`.
    """
    names: list[str] = []
    index: dict[str, int] = {}
    pairs = []

    def declare(name):
        index[name] = len(names)
        names.append(name)

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        if tok[0] == "element":
            if len(tok) != 2:
                raise PosetSyntaxError(lineno, "expected 'element NAME'")
            if tok[1] in index:
                raise DuplicateElement(f"line {lineno}: {tok[1]!r} declared twice")
            declare(tok[1])
        elif tok[0] == "rel":
            if len(tok) != 3:
                raise PosetSyntaxError(lineno, "expected 'rel A B'")
            for name in tok[1:]:
                if name not in index:
                    if strict:
                        raise UnknownName(f"line {lineno}: {name!r} not declared")
                    declare(name)
            pairs.append((index[tok[1]], index[tok[2]]))
        else:
            raise PosetSyntaxError(lineno, f"unknown directive {tok[0]!r}")
    return Poset.from_relations(names, pairs)


def serialize_poset(p: Poset) -> str:
    lines = [f"element {n}" for n in p.names]
    lines += [f"rel {p.names[a]} {p.names[b]}" for a, b in p.covers]
    return "\n".join(lines) + "\n"


# -- chains --------------------------------------------------------------

def enumerate_chains(p: Poset, n: int, allow_repeats: bool) -> list[Chain]:
    """All ``(n+1)``-tuples increasing under the order, lexicographically.

    Weakly increasing if ``allow_repeats`` else strictly increasing.
    """
    if n < 0:
        raise IndexOutOfRange("chain length must be non-negative")
    out: list[Chain] = []
    nexts = [
        bits(p.up[a] if allow_repeats else p.up[a] & ~(1 << a)) for a in range(p.m)
    ]

    def grow(prefix):
        if len(prefix) == n + 1:
            out.append(tuple(prefix))
            return
        for b in nexts[prefix[-1]]:
            prefix.append(b)
            grow(prefix)
            prefix.pop()

    for a in range(p.m):
        grow([a])
    return out


def is_strict(c: Chain) -> bool:
    return all(a != b for a, b in zip(c, c[1:]))


def composition_length(p: Poset) -> int:
    """Number of cover steps in a longest chain (0 for an antichain or empty poset)."""
    height = [0] * p.m
    # a < b implies |down(a)| < |down(b)|, so this is a topological order
    for b in sorted(range(p.m), key=lambda x: p.down[x].bit_count()):
        below = p.down[b] & ~(1 << b)
        if below:
            height[b] = 1 + max(height[a] for a in bits(below))
    return max(height, default=0)


# -- connectivity and convexity -----------------------------------------

def component_masks(p: Poset, mask: int) -> list[int]:
    """Split ``mask`` into components of the comparability graph.

    Returned in order of smallest member.
    """
    comp_of = p.comparable
    out = []
    while mask:
        seed = mask & -mask
        comp = frontier = seed
        while frontier:
            reach = 0
            for x in bits(frontier):
                reach |= comp_of[x]
            frontier = reach & mask & ~comp
            comp |= frontier
        out.append(comp)
        mask &= ~comp
    return out


def connected_components(p: Poset, subset: Iterable[int]) -> list[tuple[int, ...]]:
    subset = list(subset)
    for i in subset:
        p._check(i)
    return [tuple(bits(c)) for c in component_masks(p, to_mask(subset))]


def hull_masks(p: Poset, mask: int) -> tuple[int, int]:
    """Union of the up-sets and union of the down-sets of the members."""
    u = d = 0
    for x in bits(mask):
        u |= p.up[x]
        d |= p.down[x]
    return u, d


def is_convex(p: Poset, mask: int) -> bool:
    u, d = hull_masks(p, mask)
    return u & d == mask


def is_interval(p: Poset, mask: int) -> bool:
    return mask != 0 and is_convex(p, mask) and len(component_masks(p, mask)) == 1


@dataclass(frozen=True)
class Interval:
    """Connected convex nonempty subset of ``ambient``."""
    support: tuple
    ambient: Poset = field(repr=False)

    @property
    def mask(self) -> int:
        return to_mask(self.support)

    def __len__(self):
        return len(self.support)


def interval_masks(p: Poset, cap: int | None = None) -> list[int]:
    """All intervals of ``p`` as masks, unordered.

    Intervals are grown from their smallest-index element ``s``: add one
    Hasse neighbour ``x``, then close.  If ``S`` is convex with up-set union
    ``U`` and down-set union ``D``, then
    ``S | {x} | (up[x] & D) | (down[x] & U)`` is the convex hull of
    ``S | {x}``.  Growth that would pull in an index below ``s`` is dropped,
    since that interval belongs to a smaller seed.  Each seed's results are
    deduplicated with a set.
    """
    cap = interval_cap(cap)
    up, down, hasse = p.up, p.down, p.hasse
    out: list[int] = []
    for s in range(p.m):
        low = (1 << s) - 1
        start = 1 << s
        seen = {start}
        stack = [(start, up[s], down[s], hasse[s])]
        while stack:
            S, U, D, N = stack.pop()
            for x in bits(N & ~S & ~low):
                T = S | (1 << x) | (up[x] & D) | (down[x] & U)
                if T & low or T in seen:
                    continue
                seen.add(T)
                if len(seen) + len(out) > cap:
                    raise IntervalExplosion(cap)
                N2 = N
                for y in bits(T & ~S):
                    N2 |= hasse[y]
                stack.append((T, U | up[x], D | down[x], N2))
        out.extend(seen)
    if len(out) > cap:
        raise IntervalExplosion(cap)
    return out


def support_key(mask: int) -> tuple[int, ...]:
    return tuple(bits(mask))


def enumerate_intervals(p: Poset, cap: int | None = None) -> list[Interval]:
    """Every interval once, sorted lexicographically by support."""
    keys = sorted(support_key(m) for m in interval_masks(p, cap))
    return [Interval(k, p) for k in keys]


def chain_poset(n: int) -> Poset:
    """The chain ``0 < 1 < ... < n``."""
    names = [str(i) for i in range(n + 1)]
    return Poset.from_relations(names, [(i, i + 1) for i in range(n)])


def chain_label(p: Poset, c: Chain) -> str:
    return ",".join(p.names[x] for x in c)

