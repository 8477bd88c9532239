import random

import pytest
from hypothesis import given, settings

from oracles import (
    brute_intervals, dandelion, naive_components, naive_level_leq, naive_pullback,
    posets, random_interval, rational_rank,
)
from repcoh.complex import (
    VirtualClass, build_complex, coboundary, codegeneracy_matrix, coface_matrix,
    complex_class, cup, interval_basis, morphism_components, nerve_comparison,
    nerve_complex, pullback, pullback_class, rank_invariant, restriction_to_nerve,
    singleton_complex, split_pullback, unit,
)
from repcoh.errors import IntervalExplosion
from repcoh.families import pseudo_circle
from repcoh.homology import IntegerMatrix, cohomology_range, identity, integer_kernel, rank
from repcoh.levels import Degeneracy, Face, Variant, level_poset, structure_map
from repcoh.poset import Interval, bits, chain_poset, interval_masks, is_interval

BUDGET = 3000


def budget_levels(p, v, top=4, budget=BUDGET):
    """Largest L <= top with levels 0..L within the interval budget."""
    L = -1
    for n in range(top + 1):
        try:
            interval_masks(level_poset(p, v, n).order, cap=budget)
        except IntervalExplosion:
            break
        L = n
    return L


def singleton(lv, chain):
    return VirtualClass(lv, {1 << lv.index[chain]: 1})


# -- pullbacks ------------------------------------------------------------

def test_pullback_splits_into_two_singletons():
    base = chain_poset(1)
    f = structure_map(base, Variant.TILDE_G, Face(1), 1)
    q = Interval((f.target.index[(0, 1)],), f.target.order)
    got = pullback_class(q, f)
    src = f.source
    assert got == singleton(src, (0, 0, 1)) + singleton(src, (0, 1, 1))
    assert not src.leq((0, 0, 1), (0, 1, 1))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_pullback_face0_formula(n):
    base = chain_poset(n)
    f = structure_map(base, Variant.TILDE_G, Face(0), 1)
    for i in range(n + 1):
        for j in range(i + 1, n + 1):
            got = pullback_class(1 << f.target.index[(i, j)], f)
            want = {1 << f.source.index[(a, i, j)]: 1 for a in range(i + 1)}
            assert got.coeffs == want


def test_pullback_whole_level():
    for v in Variant:
        for n in range(2):
            f = structure_map(dandelion(2), v, Face(0), n)
            whole = pullback_class(f.target.order.full, f)
            comps = naive_components(range(len(f.source)), f.source.order.leq)
            assert sorted(whole.coeffs) == sorted(sum(1 << x for x in c) for c in comps)


@settings(max_examples=30, deadline=None)
@given(posets(max_size=6))
def test_pullback_matches_naive(p):
    rng = random.Random(p.m)
    for v in Variant:
        leq = naive_level_leq(p, v.rule)
        for n in range(2):
            for i in range(n + 2):
                f = structure_map(p, v, Face(i), n)
                if not len(f.target) or not len(f.source):
                    continue
                for _ in range(5):
                    m = random_interval(f.target.order, rng)
                    support = {f.target.objects[k] for k in bits(m)}
                    want = naive_pullback(support, lambda c: c[:i] + c[i + 1:], f.source.objects, leq)
                    got = [frozenset(f.source.objects[k] for k in bits(c)) for c in split_pullback(f, m)]
                    assert sorted(got, key=sorted) == sorted(
                        (frozenset(w) for w in want), key=sorted)


# -- coboundary examples -------------------------------------------------

@pytest.mark.parametrize("n", [2, 3, 4])
def test_tilde_g_d1_singleton_formula(n):
    base = chain_poset(n)
    lv1 = level_poset(base, Variant.TILDE_G, 1)
    lv2 = level_poset(base, Variant.TILDE_G, 2)
    for i in range(n + 1):
        for j in range(i + 1, n + 1):
            want = VirtualClass(lv2, {})
            for a in range(i):
                want = want + singleton(lv2, (a, i, j))
            for b in range(i + 1, j):
                want = want - singleton(lv2, (i, b, j))
            for c in range(j + 1, n + 1):
                want = want + singleton(lv2, (i, j, c))
            assert coboundary(singleton(lv1, (i, j))) == want


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_t_class_is_a_cocycle(n):
    lv = level_poset(chain_poset(n), Variant.CHECK_G, 0)

    def J(a, b):
        return VirtualClass(lv, {sum(1 << k for k in range(a, b + 1)): 1})

    t = J(0, n - 1) + J(1, n) - J(1, n - 1)
    assert not coboundary(t)
    assert not coboundary(J(0, n))
    assert coboundary(J(1, n - 1))


# -- complex-wide properties --------------------------------------------

SMALL = [chain_poset(3), chain_poset(4), dandelion(3), pseudo_circle()]


def _complex_props(p, v, L):
    cx = build_complex(p, v, L, cap=BUDGET * 10, full_top=True)
    for n in range(L):
        assert (cx.d[n + 1] @ cx.d[n]).is_zero()
    if v is Variant.TILDE_E:
        assert cx.meta["split_pullbacks"] == 0
    return cx


@settings(max_examples=40, deadline=None)
@given(posets(max_size=12))
def test_d_squared_zero(p):
    for v in Variant:
        L = budget_levels(p, v) - 1
        if L >= 0:
            _complex_props(p, v, L)


@pytest.mark.parametrize("p", SMALL, ids=["c3", "c4", "d3", "pc"])
@pytest.mark.parametrize("v", list(Variant), ids=lambda v: v.value)
def test_d_squared_zero_named(p, v):
    L = budget_levels(p, v, budget=30000) - 1
    _complex_props(p, v, L)


def _cosimplicial(p, v, top):
    for n in range(top - 1):
        for j in range(n + 3):
            dj = coface_matrix(p, v, j, n + 1)
            for i in range(j):
                lhs = dj @ coface_matrix(p, v, i, n)
                rhs = coface_matrix(p, v, i, n + 1) @ coface_matrix(p, v, j - 1, n)
                assert lhs == rhs
    if v.simplicial:
        for n in range(top):
            for i in range(n + 1):
                prod = codegeneracy_matrix(p, v, i, n) @ coface_matrix(p, v, i, n)
                assert prod == identity(prod.rows)
                prod = codegeneracy_matrix(p, v, i, n) @ coface_matrix(p, v, i + 1, n)
                assert prod == identity(prod.rows)


@settings(max_examples=25, deadline=None)
@given(posets(max_size=12))
def test_cosimplicial_identities(p):
    for v in Variant:
        _cosimplicial(p, v, budget_levels(p, v, budget=1500))


@pytest.mark.parametrize("v", list(Variant), ids=lambda v: v.value)
def test_cosimplicial_identities_named(v):
    for p in (chain_poset(3), dandelion(2), pseudo_circle()):
        _cosimplicial(p, v, budget_levels(p, v, top=3, budget=30000))


@settings(max_examples=40, deadline=None)
@given(posets(max_size=12))
def test_tilde_e_pullbacks_connected_and_conserve_multiplicity(p):
    rng = random.Random(p.m * 7 + len(p.covers))
    for v in Variant:
        for n in range(3 if v.simplicial and p.m <= 6 else 2):
            for i in range(n + 2):
                f = structure_map(p, v, Face(i), n)
                if not len(f.target):
                    continue
                for _ in range(8):
                    m = random_interval(f.target.order, rng, steps=rng.randint(0, 8))
                    comps = split_pullback(f, m)
                    if v is Variant.TILDE_E:
                        assert len(comps) == 1
                    for c in comps:
                        assert is_interval(f.source.order, c)
                    total = sum(comps)
                    assert total == sum(1 << k for k in range(len(f.source)) if m >> f.map[k] & 1)


def test_tilde_e_all_intervals_connected():
    # exhaustive over every interval, not just sampled ones
    for p in (chain_poset(3), dandelion(2), pseudo_circle()):
        for n in range(2):
            lv = level_poset(p, Variant.TILDE_E, n)
            for i in range(n + 2):
                f = structure_map(p, Variant.TILDE_E, Face(i), n)
                for m in interval_basis(lv):
                    assert len(split_pullback(f, m)) == 1


# -- independent full-complex oracle ------------------------------------

def naive_cohomology(p, v, L):
    """Free ranks from brute-force intervals, set-based pullbacks and Fraction ranks."""
    leq = naive_level_leq(p, v.rule)
    levels = [level_poset(p, v, n).objects for n in range(L + 2)]
    bases = [brute_intervals(objs, leq) for objs in levels]
    mats = []
    for n in range(L + 1):
        idx = {b: k for k, b in enumerate(bases[n + 1])}
        M = [[0] * len(bases[n]) for _ in bases[n + 1]]
        for col, q in enumerate(bases[n]):
            for i in range(n + 2):
                for comp in naive_pullback(q, lambda c: c[:i] + c[i + 1:], levels[n + 1], leq):
                    M[idx[comp]][col] += (-1) ** i
        mats.append(M)
    ranks = [rational_rank(M) for M in mats]
    return [len(bases[n]) - ranks[n] - (ranks[n - 1] if n else 0) for n in range(L + 1)]


@settings(max_examples=20, deadline=None)
@given(posets(max_size=4))
def test_cohomology_matches_naive_oracle(p):
    for v in Variant:
        L = 1 if v.simplicial else 2
        if v.simplicial and len(level_poset(p, v, L + 1)) > 12:
            L = 0
        cx = build_complex(p, v, L)
        got = [g.free_rank for g in cohomology_range(cx, L)]
        assert got == naive_cohomology(p, v, L)


def test_basis_order_and_lazy_top():
    cx = build_complex(chain_poset(3), Variant.CHECK_E, 1)
    for b in cx.basis[:2]:
        keys = [(m.bit_count(), tuple(bits(m))) for m in b]
        assert keys == sorted(keys)
    full = build_complex(chain_poset(3), Variant.CHECK_E, 1, full_top=True)
    assert cx.dims[:2] == full.dims[:2]
    assert cx.dims[2] <= full.dims[2]
    assert rank(cx.d[1]) == rank(full.d[1])


def test_check_variant_vanishes_above_composition_length():
    cx = build_complex(chain_poset(2), Variant.CHECK_G, 2)
    assert cx.vanishes_above
    assert [g.free_rank for g in cohomology_range(cx, 5)] == [3, 0, 0, 0, 0, 0]
    cx = build_complex(chain_poset(4), Variant.CHECK_G, 1)
    assert not cx.vanishes_above


# -- cup products --------------------------------------------------------

def test_cup_examples():
    base = chain_poset(2)
    lv1 = level_poset(base, Variant.TILDE_G, 1)
    lv2 = level_poset(base, Variant.TILDE_G, 2)
    assert cup(singleton(lv1, (0, 1)), singleton(lv1, (1, 2))) == singleton(lv2, (0, 1, 2))
    assert not cup(singleton(lv1, (0, 1)), singleton(lv1, (0, 1)))


def test_unit_laws_exhaustive_chain3():
    base = chain_poset(3)
    u = unit(base, Variant.CHECK_G)
    for n in range(4):
        lv = level_poset(base, Variant.CHECK_G, n)
        for m in interval_basis(lv):
            x = VirtualClass(lv, {m: 1})
            assert cup(u, x) == x == cup(x, u)


PRODUCT_BASES = [chain_poset(3), chain_poset(4), dandelion(3)]


def _random_class(p, v, n, rng):
    lv = level_poset(p, v, n)
    if not len(lv):
        return None
    return VirtualClass(lv, {random_interval(lv.order, rng, steps=rng.randint(0, 6)): 1})


def _max_deg(p, v):
    from repcoh.poset import composition_length
    return 3 if v.simplicial else composition_length(p)


@pytest.mark.parametrize("v", list(Variant), ids=lambda v: v.value)
def test_leibniz_unit_associativity(v):
    rng = random.Random(2024 + hash(v.value) % 1000)
    pairs = triples = 0
    for p in PRODUCT_BASES:
        top = _max_deg(p, v)
        u = unit(p, v)
        for _ in range(80):
            pdeg = rng.randint(0, top)
            qdeg = rng.randint(0, top - pdeg)
            a, b = _random_class(p, v, pdeg, rng), _random_class(p, v, qdeg, rng)
            if a is None or b is None:
                continue
            lhs = coboundary(cup(a, b))
            rhs = cup(coboundary(a), b) + (-1) ** pdeg * cup(a, coboundary(b))
            assert lhs == rhs
            assert cup(u, a) == a == cup(a, u)
            pairs += 1
            rdeg = rng.randint(0, top - pdeg - qdeg)
            c = _random_class(p, v, rdeg, rng)
            if c is not None:
                assert cup(cup(a, b), c) == cup(a, cup(b, c))
                triples += 1
    assert pairs >= 200 and triples >= 200


def test_cup_bilinear():
    rng = random.Random(5)
    p = chain_poset(3)
    v = Variant.CHECK_E
    for _ in range(30):
        a1, a2 = _random_class(p, v, 1, rng), _random_class(p, v, 1, rng)
        b = _random_class(p, v, 1, rng)
        assert cup(a1 + 2 * a2, b) == cup(a1, b) + 2 * cup(a2, b)


# -- rank invariants and line components ---------------------------------

def test_rank_invariant_examples():
    base = chain_poset(3)
    lv = level_poset(base, Variant.CHECK_G, 0)
    whole = VirtualClass(lv, {lv.order.full: 1})
    assert set(rank_invariant(whole).values()) == {1}
    s = VirtualClass(lv, {1 << k: 1 for k in range(4)})
    r = rank_invariant(s)
    assert all(r[(a, b)] == (1 if a == b else 0) for a, b in r)

    def J(a, b):
        return VirtualClass(lv, {sum(1 << k for k in range(a, b + 1)): 1})

    t = J(0, 2) + J(1, 3) - J(1, 2)
    assert rank_invariant(t)[(1, 2)] == 1
    with pytest.raises(ValueError):
        rank_invariant(singleton(level_poset(base, Variant.CHECK_G, 1), (0, 1)))


def test_morphism_components_examples():
    def names(comps):
        return sorted(sorted("".join(map(str, c)) for c in comp) for comp in comps)

    assert names(morphism_components(chain_poset(3), "Line")) == [["01", "02", "12", "13", "23"], ["03"]]
    assert names(morphism_components(chain_poset(2), "Line")) == [["01", "12"], ["02"]]
    assert names(morphism_components(chain_poset(2), "Square")) == [["01", "02", "12"]]
    from repcoh.families import corolla
    assert names(morphism_components(corolla(2), "Line")) == [["01"], ["02"]]


def _rank_constancy(p):
    cx = build_complex(p, Variant.CHECK_G, 0)
    lines = morphism_components(p, "Line")
    for vec in integer_kernel(cx.d[0]):
        r = rank_invariant(complex_class(cx, 0, vec))
        for comp in lines:
            strict_vals = {r[c] for c in comp}
            assert len(strict_vals) == 1
            objs = {x for c in comp for x in c}
            assert len({r[(x, x)] for x in objs}) == 1


@pytest.mark.parametrize("p", [chain_poset(n) for n in range(1, 6)] + [dandelion(n) for n in range(2, 6)] + [pseudo_circle()])
def test_rank_constancy_named(p):
    _rank_constancy(p)


@settings(max_examples=40, deadline=None)
@given(posets(max_size=12))
def test_rank_constancy(p):
    if budget_levels(p, Variant.CHECK_G, top=1) < 1:
        return
    _rank_constancy(p)


# -- singleton and nerve complexes --------------------------------------

@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_singleton_kernel_rank(n):
    s = singleton_complex(chain_poset(n), 1)
    assert s.dims[0] == 0
    assert s.dims[1] - rank(s.d[1]) == n


def test_reduced_singleton_basis_level1():
    s = singleton_complex(chain_poset(2), 1, reduced=True)
    assert s.basis[1] == [(0, 1), (0, 2), (1, 2)]
    assert s.dims[0] == 0
    assert nerve_complex(chain_poset(2), 1).dims[1] == 3


@pytest.mark.parametrize("p", [chain_poset(3), dandelion(2), pseudo_circle(), chain_poset(4)])
def test_nerve_comparison_is_cochain_map(p):
    comp = nerve_comparison(p, 3)
    assert set(comp) == {1, 2, 3, 4}


def test_nerve_examples():
    for n in range(1, 5):
        gs = cohomology_range(nerve_complex(chain_poset(n), 3), 3)
        assert [g.free_rank for g in gs] == [1, 0, 0, 0]
    gs = cohomology_range(nerve_complex(pseudo_circle(), 2), 2)
    assert [g.free_rank for g in gs] == [1, 1, 0]
    from repcoh.poset import Poset
    two = Poset.from_relations(list("abcd"), [(0, 1), (2, 3)])
    assert cohomology_range(nerve_complex(two, 1), 0)[0].free_rank == 2


@settings(max_examples=25, deadline=None)
@given(posets(max_size=8))
def test_nerve_ranks_match_fraction_rref(p):
    cx = nerve_complex(p, 3)
    ranks = [rational_rank(m.to_dense()) for m in cx.d]
    for n, g in enumerate(cohomology_range(cx, 3)):
        assert g.free_rank == cx.dims[n] - ranks[n] - (ranks[n - 1] if n else 0)


@pytest.mark.parametrize("v", [Variant.CHECK_G, Variant.CHECK_E], ids=["G", "E"])
@pytest.mark.parametrize("p", [chain_poset(3), dandelion(2), pseudo_circle()], ids=["c3", "d2", "pc"])
def test_restriction_to_nerve_is_cochain_map(p, v):
    maps = restriction_to_nerve(p, v, 2)
    assert isinstance(maps[0], IntegerMatrix)


# -- class-level identities: no basis enumeration, so every generated
# poset reaches high levels regardless of its interval count ------------

def chain_count(p, n, weak):
    ends = [1] * p.m
    for _ in range(n):
        ends = [sum(ends[a] for a in bits(p.down[b]) if weak or a != b) for b in range(p.m)]
    return sum(ends)


def class_levels(p, v, top=4, objects=1200):
    L = 0
    for n in range(1, top + 1):
        if chain_count(p, n, v.simplicial) > objects:
            break
        L = n
    return L


def coface(x, i):
    return pullback(x, structure_map(x.level.base, x.level.variant, Face(i), x.n))


def codegeneracy(y, i):
    return pullback(y, structure_map(y.level.base, y.level.variant, Degeneracy(i), y.n - 1))


@settings(max_examples=60, deadline=None)
@given(posets(max_size=12))
def test_class_level_identities(p):
    rng = random.Random(len(p.covers) * 31 + p.m)
    for v in Variant:
        L = class_levels(p, v)
        for n in range(L + 1):
            lv = level_poset(p, v, n)
            if not len(lv):
                break
            for _ in range(3):
                x = VirtualClass(lv, {random_interval(lv.order, rng, steps=rng.randint(0, 6)): 1})
                if n + 2 <= L:
                    assert not coboundary(coboundary(x))
                    for j in range(n + 3):
                        for i in range(j):
                            assert coface(coface(x, i), j) == coface(coface(x, j - 1), i)
                if v.simplicial and n + 1 <= L:
                    for i in range(n + 1):
                        assert codegeneracy(coface(x, i), i) == x
                        assert codegeneracy(coface(x, i + 1), i) == x
