"""Named posets used throughout the tables."""
from __future__ import annotations

from .errors import BadParams, UnknownFamily
from .poset import Poset, chain_poset


def _ints(name, params, count):
    if len(params) != count:
        raise BadParams(f"{name} takes {count} integer parameter(s), got {len(params)}")
    try:
        vals = [int(p) for p in params]
    except ValueError:
        raise BadParams(f"{name}: parameters must be integers, got {params}") from None
    if any(v < 0 for v in vals):
        raise BadParams(f"{name}: parameters must be non-negative")
    return vals


def dandelion(n: int) -> Poset:
    """Elements ``0..n+1`` with ``0 < 1 < j`` for every ``j >= 2``."""
    names = [str(i) for i in range(n + 2)]
    return Poset.from_relations(names, [(0, 1)] + [(1, j) for j in range(2, n + 2)])


def corolla(n: int) -> Poset:
    """A root ``0`` below leaves ``1..n``."""
    names = [str(i) for i in range(n + 1)]
    return Poset.from_relations(names, [(0, j) for j in range(1, n + 1)])


def pseudo_circle() -> Poset:
    return Poset.from_relations(["a", "b", "c", "d"], [(0, 2), (0, 3), (1, 2), (1, 3)])


def antichain(m: int) -> Poset:
    return Poset.from_relations([str(i) for i in range(m)], [])


def tree(edges: list[tuple[int, int]]) -> Poset:
    """Poset whose Hasse diagram is the given forest; ``(a, b)`` means ``a < b``.

    Elements are ``0..max`` over all endpoints.
    """
    if not edges:
        raise BadParams("tree needs at least one cover pair")
    m = 1 + max(max(e) for e in edges)
    parent = list(range(m))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra == rb:
            raise BadParams(f"cover {a} {b} closes a cycle; tree covers must form a forest")
        parent[ra] = rb
    return Poset.from_relations([str(i) for i in range(m)], edges)


def family(name: str, params=()) -> Poset:
    """Build a named poset.

    >>> len(family("chain", [3]))
    4
    """
    params = list(params)
    key = name.lower().replace("-", "_")
    if key == "chain":
        (n,) = _ints(key, params, 1)
        return chain_poset(n)
    if key == "dandelion":
        (n,) = _ints(key, params, 1)
        return dandelion(n)
    if key == "corolla":
        (n,) = _ints(key, params, 1)
        return corolla(n)
    if key in ("pseudo_circle", "pseudocircle"):
        _ints(key, params, 0)
        return pseudo_circle()
    if key == "antichain":
        (m,) = _ints(key, params, 1)
        return antichain(m)
    if key == "tree":
        vals = _ints(key, params, len(params))
        if len(vals) % 2:
            raise BadParams("tree takes cover pairs: a1 b1 a2 b2 ...")
        return tree(list(zip(vals[::2], vals[1::2])))
    raise UnknownFamily(f"unknown family {name!r}")
