"""Level posets of the four envelope variants and their structure maps.

Objects at level ``n`` are chains ``(x0, ..., xn)`` of the base poset; weak
chains for the simplicial (tilde) variants, strict chains for the
semi-simplicial (check) ones.  Two orders are used:

* G-rule: ``u <= v`` iff ``u == v`` or ``last(u) <= first(v)``.
* E-rule: ``u <= v`` iff ``u[i] <= v[i]`` for every ``i``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property, lru_cache

from .errors import DegeneracyOnSemiSimplicial, IndexOutOfRange, OrderViolation
from .poset import Chain, Poset, bits, chain_label, enumerate_chains


class Variant(enum.Enum):
    TILDE_E = "tildeE"
    TILDE_G = "tildeG"
    CHECK_E = "E"
    CHECK_G = "G"

    @property
    def simplicial(self) -> bool:
        return self in (Variant.TILDE_E, Variant.TILDE_G)

    @property
    def rule(self) -> str:
        return "E" if self in (Variant.TILDE_E, Variant.CHECK_E) else "G"

    @classmethod
    def parse(cls, s: str) -> "Variant":
        key = s.strip().lower().replace("_", "").replace("-", "")
        table = {
            "e": cls.CHECK_E, "checke": cls.CHECK_E,
            "g": cls.CHECK_G, "checkg": cls.CHECK_G,
            "tildee": cls.TILDE_E, "tildeg": cls.TILDE_G,
        }
        if key not in table:
            raise ValueError(f"unknown variant {s!r}; expected E, G, tildeE or tildeG")
        return table[key]


def face(c: Chain, i: int) -> Chain:
    """Delete vertex ``i``."""
    if len(c) < 2 or not 0 <= i < len(c):
        raise IndexOutOfRange(f"face {i} of a chain with {len(c)} vertices")
    return c[:i] + c[i + 1:]


def degeneracy(c: Chain, i: int) -> Chain:
    """Repeat vertex ``i``."""
    if not 0 <= i < len(c):
        raise IndexOutOfRange(f"degeneracy {i} of a chain with {len(c)} vertices")
    return c[:i + 1] + c[i:]


def audit_order(p: Poset):
    """Raise :class:`OrderViolation` unless ``p.up`` is a partial order."""
    for x in range(p.m):
        if not p.up[x] >> x & 1:
            raise OrderViolation(f"{p.names[x]} not reflexive")
        if p.up[x] & p.down[x] != 1 << x:
            raise OrderViolation(f"antisymmetry fails at {p.names[x]}")
        for y in bits(p.up[x]):
            if p.up[y] & ~p.up[x]:
                raise OrderViolation(f"transitivity fails at {p.names[x]} <= {p.names[y]}")


class LevelPoset:
    """Level ``n`` of ``variant`` over ``base``.

    ``order`` is a :class:`Poset` on the indices of ``objects``.
    """

    def __init__(self, base: Poset, variant: Variant, n: int):
        self.base, self.variant, self.level = base, variant, n
        self.objects: list[Chain] = enumerate_chains(base, n, variant.simplicial)
        self.index = {c: k for k, c in enumerate(self.objects)}
        up = _g_order(base, self.objects) if variant.rule == "G" else _e_order(base, self.objects, n)
        self.order = Poset(tuple(chain_label(base, c) for c in self.objects), tuple(up))
        audit_order(self.order)

    @property
    def key(self):
        """Identifies the level; rebuilt instances with the same key are interchangeable."""
        return self.base, self.variant, self.level

    def __len__(self):
        return len(self.objects)

    def __repr__(self):
        return f"LevelPoset({self.variant.value}, level={self.level}, size={len(self)})"

    def leq(self, u: Chain, v: Chain) -> bool:
        return self.order.leq(self.index[u], self.index[v])

    @property
    def covers(self) -> list[tuple[Chain, Chain]]:
        return [(self.objects[a], self.objects[b]) for a, b in self.order.covers]

    def mask(self, chains) -> int:
        m = 0
        for c in chains:
            m |= 1 << self.index[c]
        return m

    def chains(self, mask: int) -> list[Chain]:
        return [self.objects[k] for k in bits(mask)]


def _g_order(base: Poset, objects: list[Chain]) -> list[int]:
    first_ge = [0] * base.m  # objects whose first vertex is >= a
    for k, c in enumerate(objects):
        for a in bits(base.down[c[0]]):
            first_ge[a] |= 1 << k
    return [(1 << k) | first_ge[c[-1]] for k, c in enumerate(objects)]


def _e_order(base: Poset, objects: list[Chain], n: int) -> list[int]:
    ge = [[0] * base.m for _ in range(n + 1)]  # ge[i][a]: objects with c[i] >= a
    for k, c in enumerate(objects):
        for i, x in enumerate(c):
            row = ge[i]
            for a in bits(base.down[x]):
                row[a] |= 1 << k
    full = (1 << len(objects)) - 1
    up = []
    for c in objects:
        u = full
        for i, x in enumerate(c):
            u &= ge[i][x]
        up.append(u)
    return up


@lru_cache(maxsize=512)
def level_poset(base: Poset, variant: Variant, n: int) -> LevelPoset:
    if n < 0:
        raise IndexOutOfRange("level must be non-negative")
    return LevelPoset(base, variant, n)


# -- structure maps ------------------------------------------------------

@dataclass(frozen=True)
class Face:
    i: int


@dataclass(frozen=True)
class Degeneracy:
    i: int


@dataclass(frozen=True)
class Front:
    p: int


@dataclass(frozen=True)
class Back:
    q: int


@dataclass(frozen=True, eq=False)
class ObjectMap:
    """A map of objects ``source -> target``; ``map[k]`` is a target index."""
    source: LevelPoset
    target: LevelPoset
    map: tuple

    @cached_property
    def fibres(self) -> tuple[int, ...]:
        """``fibres[y]`` is the mask of source objects sent to ``y``."""
        pre = [0] * len(self.target)
        for k, y in enumerate(self.map):
            pre[y] |= 1 << k
        return tuple(pre)

    def preimage(self, mask: int) -> int:
        pre = self.fibres
        out = 0
        for y in bits(mask):
            out |= pre[y]
        return out

    def audit_monotone(self):
        tgt = self.target.order
        for a, b in self.source.order.covers:
            if not tgt.leq(self.map[a], self.map[b]):
                raise OrderViolation(
                    f"{self.source.objects[a]} <= {self.source.objects[b]} not preserved"
                )


def _check_range(i, lo, hi, what):
    if not lo <= i <= hi:
        raise IndexOutOfRange(f"{what} index {i} outside {lo}..{hi}")


@lru_cache(maxsize=4096)
def structure_map(base: Poset, variant: Variant, kind, n: int) -> ObjectMap:
    """Object map for ``kind`` with source level ``n``, or ``n+1`` for a face.

    Face i: level n+1 -> n.  Degeneracy i: n -> n+1.  Front p, Back q:
    n -> p and n -> q, keeping the first p+1 or last q+1 vertices.
    """
    if isinstance(kind, Face):
        _check_range(kind.i, 0, n + 1, "face")
        src, tgt = level_poset(base, variant, n + 1), level_poset(base, variant, n)
        fn = lambda c: face(c, kind.i)  # noqa: E731
    elif isinstance(kind, Degeneracy):
        if not variant.simplicial:
            raise DegeneracyOnSemiSimplicial(f"{variant.value} has no degeneracies")
        _check_range(kind.i, 0, n, "degeneracy")
        src, tgt = level_poset(base, variant, n), level_poset(base, variant, n + 1)
        fn = lambda c: degeneracy(c, kind.i)  # noqa: E731
    elif isinstance(kind, Front):
        _check_range(kind.p, 0, n, "front")
        src, tgt = level_poset(base, variant, n), level_poset(base, variant, kind.p)
        fn = lambda c: c[:kind.p + 1]  # noqa: E731
    elif isinstance(kind, Back):
        _check_range(kind.q, 0, n, "back")
        src, tgt = level_poset(base, variant, n), level_poset(base, variant, kind.q)
        fn = lambda c: c[len(c) - kind.q - 1:]  # noqa: E731
    else:
        raise TypeError(f"not a structure map kind: {kind!r}")
    idx = tgt.index
    return ObjectMap(src, tgt, tuple(idx[fn(c)] for c in src.objects))
