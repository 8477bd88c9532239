"""Interval classes, their cochain complexes, cup products and nerve oracles.

A class at level ``n`` is an integer combination of intervals of the level
poset, keyed by support mask.  The coface ``delta^i`` pulls an interval
back along the face map ``d_i``.  The preimage of an interval under a
monotone map is convex, so it splits into a sum of intervals, one per
connected component.  The coboundary is ``d = sum_i (-1)^i delta^i``.
"""
from __future__ import annotations

from collections import defaultdict
from typing import Iterable

from .errors import ConvexityViolation, DegeneracyOnSemiSimplicial, IntervalExplosion
from .homology import CochainComplex, IntegerMatrix
from .levels import (
    Back, Degeneracy, Face, Front, LevelPoset, ObjectMap, Variant, level_poset,
    structure_map,
)
from .poset import (
    Interval, Poset, bits, component_masks, composition_length, interval_cap, interval_masks,
    is_convex, is_strict, support_key,
)


def basis_key(mask: int):
    """Basis order: support size, then lexicographic support."""
    return (mask.bit_count(), support_key(mask))


def interval_basis(level: LevelPoset, cap: int | None = None) -> list[int]:
    """Intervals of a level poset as masks, in basis order.  Cached per level."""
    cached = getattr(level, "_interval_basis", None)
    if cached is None:
        cached = sorted(interval_masks(level.order, cap), key=basis_key)
        level._interval_basis = cached
        level._interval_index = {m: k for k, m in enumerate(cached)}
    elif len(cached) > interval_cap(cap):
        # levels are shared across calls, so a lower cap must still bite
        raise IntervalExplosion(interval_cap(cap))
    return cached


def interval_index(level: LevelPoset, cap: int | None = None) -> dict[int, int]:
    interval_basis(level, cap)
    return level._interval_index


class VirtualClass:
    """Integer combination of intervals of one level poset."""

    def __init__(self, level: LevelPoset, coeffs: dict[int, int] | None = None):
        self.level = level
        self.coeffs = {m: c for m, c in (coeffs or {}).items() if c}

    @classmethod
    def interval(cls, level: LevelPoset, chains: Iterable) -> "VirtualClass":
        return cls(level, {level.mask(chains): 1})

    @property
    def n(self) -> int:
        return self.level.level

    def terms(self) -> list[tuple[Interval, int]]:
        amb = self.level.order
        return [(Interval(support_key(m), amb), self.coeffs[m]) for m in sorted(self.coeffs, key=basis_key)]

    def support_counts(self) -> dict[int, int]:
        """Object index -> summed coefficient of intervals containing it."""
        out: dict[int, int] = defaultdict(int)
        for m, c in self.coeffs.items():
            for x in bits(m):
                out[x] += c
        return {x: c for x, c in out.items() if c}

    def _same(self, other):
        if self.level.key != other.level.key:
            raise ValueError("classes live on different level posets")

    def __add__(self, other: "VirtualClass") -> "VirtualClass":
        self._same(other)
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, 0) + c
        return VirtualClass(self.level, out)

    def __neg__(self):
        return VirtualClass(self.level, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, k: int):
        return VirtualClass(self.level, {m: k * c for m, c in self.coeffs.items()})

    def __eq__(self, other):
        return isinstance(other, VirtualClass) and self.level.key == other.level.key and self.coeffs == other.coeffs

    __hash__ = None

    def __bool__(self):
        return bool(self.coeffs)

    def __repr__(self):
        objs = self.level.objects
        parts = []
        for m in sorted(self.coeffs, key=basis_key):
            sup = "{" + " ".join("".join(map(str, objs[k])) for k in bits(m)) + "}"
            parts.append(f"{self.coeffs[m]:+d}{sup}")
        return f"VirtualClass(level={self.n}: {' '.join(parts) or '0'})"

    def vector(self, cap: int | None = None) -> dict[int, int]:
        """Coordinates in the level's interval basis."""
        idx = interval_index(self.level, cap)
        return {idx[m]: c for m, c in self.coeffs.items()}

    @classmethod
    def from_vector(cls, level: LevelPoset, vec: dict[int, int], cap: int | None = None):
        basis = interval_basis(level, cap)
        return cls(level, {basis[k]: c for k, c in vec.items()})


# -- pullbacks -----------------------------------------------------------

def split_pullback(f: ObjectMap, mask: int) -> list[int]:
    """Components of ``f^-1(mask)``, each checked to be convex."""
    src = f.source.order
    comps = component_masks(src, f.preimage(mask))
    for c in comps:
        if not is_convex(src, c):
            raise ConvexityViolation(f"non-convex pullback component {support_key(c)}")
    return comps


def pullback_class(q: Interval | int, f: ObjectMap) -> VirtualClass:
    """The class of the restriction of an interval module along ``f``."""
    mask = q.mask if isinstance(q, Interval) else q
    return VirtualClass(f.source, {c: 1 for c in split_pullback(f, mask)})


def pullback(x: VirtualClass, f: ObjectMap) -> VirtualClass:
    out: dict[int, int] = defaultdict(int)
    for m, c in x.coeffs.items():
        for comp in split_pullback(f, m):
            out[comp] += c
    return VirtualClass(f.source, out)


def coboundary(x: VirtualClass) -> VirtualClass:
    lv = x.level
    n = lv.level
    out: dict[int, int] = defaultdict(int)
    for i in range(n + 2):
        f = structure_map(lv.base, lv.variant, Face(i), n)
        sign = -1 if i % 2 else 1
        for m, c in x.coeffs.items():
            for comp in split_pullback(f, m):
                out[comp] += sign * c
    return VirtualClass(level_poset(lv.base, lv.variant, n + 1), out)


def _map_matrix(f: ObjectMap, cap=None) -> IntegerMatrix:
    """Matrix of pullback along ``f`` from target intervals to source intervals."""
    cols_basis = interval_basis(f.target, cap)
    rows = interval_index(f.source, cap)
    cols = [{rows[c]: 1 for c in split_pullback(f, m)} for m in cols_basis]
    return IntegerMatrix(len(rows), len(cols_basis), cols)


def coface_matrix(base: Poset, variant: Variant, i: int, n: int, cap=None) -> IntegerMatrix:
    """``delta^i`` from level ``n`` to level ``n+1`` in interval bases."""
    return _map_matrix(structure_map(base, variant, Face(i), n), cap)


def codegeneracy_matrix(base: Poset, variant: Variant, i: int, n: int, cap=None) -> IntegerMatrix:
    """``sigma^i`` from level ``n+1`` to level ``n``: pullback along ``s_i``."""
    if not variant.simplicial:
        raise DegeneracyOnSemiSimplicial(f"{variant.value} has no degeneracies")
    return _map_matrix(structure_map(base, variant, Degeneracy(i), n), cap)


def coboundary_matrix(base: Poset, variant: Variant, n: int, cap=None) -> IntegerMatrix:
    """``d[n] = sum_i (-1)^i delta^i`` between full interval bases."""
    c = build_complex(base, variant, n, cap=cap, full_top=True)
    return c.d[n]


def _top_level(base: Poset, variant: Variant) -> int | None:
    """Highest nonempty level, or None when levels never run out."""
    if variant.simplicial:
        return None if base.m else -1
    return composition_length(base) if base.m else -1


def build_complex(base: Poset, variant: Variant, max_dim: int, cap: int | None = None,
                  full_top: bool = False) -> CochainComplex:
    """Interval cochain complex with levels ``0..max_dim+1``.

    Cohomology is determined through degree ``max_dim``.  Level
    ``max_dim+1`` only needs to receive ``d[max_dim]``, so unless
    ``full_top`` is set its basis holds just the intervals that actually
    occur in that image.  Omitting zero rows does not change any rank.

    ``meta["split_pullbacks"]`` counts face pullbacks with more than one
    component.
    """
    if max_dim < 0:
        raise ValueError("max_dim must be non-negative")
    L = max_dim
    top = _top_level(base, variant)
    levels = [level_poset(base, variant, n) for n in range(L + 2)]
    bases = [interval_basis(levels[n], cap) for n in range(L + 1)]
    split = 0
    d = []
    top_basis = None
    for n in range(L + 1):
        src_basis = bases[n]
        if n < L or full_top:
            row_index = interval_index(levels[n + 1], cap)
            lazy = False
        else:
            row_index = {}
            lazy = True
        faces = [structure_map(base, variant, Face(i), n) for i in range(n + 2)] if len(levels[n + 1]) else []
        cols = []
        for m in src_basis:
            col: dict[int, int] = defaultdict(int)
            for i, f in enumerate(faces):
                sign = -1 if i % 2 else 1
                comps = split_pullback(f, m)
                if len(comps) > 1:
                    split += 1
                for comp in comps:
                    r = row_index.get(comp)
                    if r is None:
                        if not lazy:
                            raise ConvexityViolation(f"pullback component {support_key(comp)} is not an interval")
                        r = row_index[comp] = len(row_index)
                    col[r] += sign
            cols.append(col)
        if lazy:
            order = sorted(row_index, key=basis_key)
            remap = {row_index[m]: k for k, m in enumerate(order)}
            cols = [{remap[r]: v for r, v in c.items()} for c in cols]
            top_basis = order
        d.append(IntegerMatrix(len(row_index), len(src_basis), cols))
    if top_basis is None:
        top_basis = interval_basis(levels[L + 1], cap)
    all_bases = bases + [top_basis]
    cx = CochainComplex(
        dims=[len(b) for b in all_bases], d=d, basis=all_bases, max_dim=L,
        vanishes_above=top is not None and L >= top,
        meta={
            "variant": variant, "base": base, "levels": levels, "kind": "intervals",
            "partial_top": not full_top, "split_pullbacks": split,
        },
    )
    cx.check_shapes()
    return cx


def complex_class(c: CochainComplex, n: int, vec: dict[int, int]) -> VirtualClass:
    """Turn a coordinate vector of an interval complex into a class."""
    basis = c.basis[n]
    return VirtualClass(c.meta["levels"][n], {basis[k]: v for k, v in vec.items()})


# -- singleton and nerve complexes ---------------------------------------

def _strict_faces_matrix(base: Poset, n: int, src: list, tgt_index: dict) -> IntegerMatrix:
    """Nerve coboundary on strict chains, built row by row from faces of targets."""
    cols: list[dict] = [defaultdict(int) for _ in src]
    src_index = {c: k for k, c in enumerate(src)}
    for r, w in enumerate(tgt_index):
        for i in range(len(w)):
            v = w[:i] + w[i + 1:]
            cols[src_index[v]][r] += -1 if i % 2 else 1
    return IntegerMatrix(len(tgt_index), len(src), cols)


def nerve_complex(base: Poset, max_dim: int) -> CochainComplex:
    """Simplicial cochains of the nerve on strict chains (the normalized complex)."""
    L = max_dim
    levels = [level_poset(base, Variant.CHECK_G, n) for n in range(L + 2)]
    chains = [lv.objects for lv in levels]
    d = [_strict_faces_matrix(base, n, chains[n], {c: k for k, c in enumerate(chains[n + 1])})
         for n in range(L + 1)]
    top = composition_length(base) if base.m else -1
    cx = CochainComplex(
        dims=[len(c) for c in chains], d=d, basis=chains, max_dim=L,
        vanishes_above=L >= top, meta={"base": base, "kind": "nerve"},
    )
    cx.check_shapes()
    return cx


def singleton_complex(base: Poset, max_dim: int, reduced: bool = False) -> CochainComplex:
    """The singleton subcomplex of the tilde-G interval complex.

    Basis at level ``n``: singleton intervals on chains with at least one
    strict step.  With ``reduced`` only strict chains are kept.  Their
    coboundaries are computed in the full complex, and the coefficients on
    degenerate chains are checked to cancel.
    """
    L = max_dim
    variant = Variant.TILDE_G
    levels = [level_poset(base, variant, n) for n in range(L + 2)]
    keep = (lambda c: len(c) > 1 and is_strict(c)) if reduced else (lambda c: len(set(c)) > 1)
    chains = [[c for c in lv.objects if keep(c)] for lv in levels]
    d = []
    for n in range(L + 1):
        tgt = levels[n + 1]
        row_index = {tgt.index[c]: k for k, c in enumerate(chains[n + 1])}
        faces = [structure_map(base, variant, Face(i), n) for i in range(n + 2)]
        cols = []
        for v in chains[n]:
            y = levels[n].index[v]
            col: dict[int, int] = defaultdict(int)
            for i, f in enumerate(faces):
                for comp in split_pullback(f, 1 << y):
                    if comp & (comp - 1):
                        raise ConvexityViolation(f"preimage of singleton {v} is not discrete")
                    w = comp.bit_length() - 1
                    col[w] += -1 if i % 2 else 1
            out = {}
            for w, coeff in col.items():
                if not coeff:
                    continue
                if w not in row_index:
                    raise ArithmeticError(f"coefficient {coeff} on dropped chain {tgt.objects[w]}")
                out[row_index[w]] = coeff
            cols.append(out)
        d.append(IntegerMatrix(len(chains[n + 1]), len(chains[n]), cols))
    cx = CochainComplex(
        dims=[len(c) for c in chains], d=d, basis=chains, max_dim=L, vanishes_above=False,
        meta={"base": base, "kind": "singletons-reduced" if reduced else "singletons"},
    )
    cx.check_shapes()
    return cx


def nerve_comparison(base: Poset, max_dim: int) -> dict[int, IntegerMatrix]:
    """Identity-on-strict-chains maps from the reduced singleton complex to nerve cochains.

    Returns one matrix per level ``1..max_dim+1`` after checking that they
    commute with the coboundaries in degrees ``1..max_dim``.
    """
    red = singleton_complex(base, max_dim, reduced=True)
    nrv = nerve_complex(base, max_dim)
    comp = {}
    for n in range(1, max_dim + 2):
        idx = {c: k for k, c in enumerate(nrv.basis[n])}
        comp[n] = IntegerMatrix(nrv.dims[n], red.dims[n], [{idx[c]: 1} for c in red.basis[n]])
    for n in range(1, max_dim + 1):
        if comp[n + 1] @ red.d[n] != nrv.d[n] @ comp[n]:
            raise ArithmeticError(f"comparison is not a cochain map in degree {n}")
    return comp


def restriction_to_nerve(base: Poset, variant: Variant, max_dim: int, cap=None) -> dict[int, IntegerMatrix]:
    """Restriction to the discrete subcategory: an interval goes to the indicator of its support.

    For the check variants the target is the nerve complex on strict chains.
    Raises if the maps fail to commute with the coboundaries.
    """
    if variant.simplicial:
        raise ValueError("restriction to strict-chain cochains needs a check variant")
    cx = build_complex(base, variant, max_dim, cap=cap, full_top=True)
    nrv = nerve_complex(base, max_dim)
    maps = {}
    for n in range(max_dim + 2):
        maps[n] = IntegerMatrix(nrv.dims[n], cx.dims[n], [{k: 1 for k in bits(m)} for m in cx.basis[n]])
    for n in range(max_dim + 1):
        if maps[n + 1] @ cx.d[n] != nrv.d[n] @ maps[n]:
            raise ArithmeticError(f"restriction is not a cochain map in degree {n}")
    return maps


# -- products and invariants ---------------------------------------------

def unit(base: Poset, variant: Variant) -> VirtualClass:
    """Level-0 sum of the whole-component intervals (the constant module)."""
    lv = level_poset(base, variant, 0)
    return VirtualClass(lv, {c: 1 for c in component_masks(lv.order, lv.order.full)})


def cup(a: VirtualClass, b: VirtualClass) -> VirtualClass:
    """Cup product: intersect the front-p preimage of A with the back-q preimage of B."""
    la, lb = a.level, b.level
    if la.base != lb.base or la.variant != lb.variant:
        raise ValueError("cup of classes from different contexts")
    base, variant, p, q = la.base, la.variant, a.n, b.n
    front = structure_map(base, variant, Front(p), p + q)
    back = structure_map(base, variant, Back(q), p + q)
    tgt = front.source
    out: dict[int, int] = defaultdict(int)
    pre_b = {m: back.preimage(m) for m in b.coeffs}
    for ma, ca in a.coeffs.items():
        fa = front.preimage(ma)
        for mb, cb in b.coeffs.items():
            for comp in component_masks(tgt.order, fa & pre_b[mb]):
                if not is_convex(tgt.order, comp):
                    raise ConvexityViolation(f"non-convex product component {support_key(comp)}")
                out[comp] += ca * cb
    return VirtualClass(tgt, out)


def rank_invariant(x: VirtualClass) -> dict[tuple[int, int], int]:
    """Rank on each relation ``a <= b``: summed coefficients of intervals containing both."""
    if x.n != 0:
        raise ValueError("rank invariant is defined on level-0 classes")
    p = x.level.order
    out = {}
    for a, b in p.leq_pairs():
        pair = (1 << a) | (1 << b)
        out[(a, b)] = sum(c for m, c in x.coeffs.items() if m & pair == pair)
    return out


def morphism_components(base: Poset, rule: str) -> list[list[tuple]]:
    """Components of strict 1-chains under the Line (G) or Square (E) order."""
    variant = {"line": Variant.CHECK_G, "square": Variant.CHECK_E}[rule.lower()]
    lv = level_poset(base, variant, 1)
    return [lv.chains(c) for c in component_masks(lv.order, lv.order.full)]
