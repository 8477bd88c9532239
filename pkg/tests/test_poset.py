import pytest
from hypothesis import given, settings

from oracles import brute_intervals, leq_set, naive_chains, posets
from repcoh.errors import (
    CyclicInput, DuplicateElement, IndexOutOfRange, IntervalExplosion,
    PosetSyntaxError, UnknownName,
)
from repcoh.families import dandelion, pseudo_circle
from repcoh.poset import (
    Poset, chain_poset, component_masks, composition_length, connected_components,
    enumerate_chains, enumerate_intervals, interval_masks, parse_poset,
    serialize_poset,
)


def test_parse_closure():
    p = parse_poset("rel 0 1\nrel 1 2")
    assert p == chain_poset(2)
    assert p.leq(0, 2) and not p.leq(2, 0)
    assert p.covers == ((0, 1), (1, 2))


def test_parse_d2():
    p = parse_poset("rel 0 1\nrel 1 2\nrel 1 3")
    assert p.covers == ((0, 1), (1, 2), (1, 3))
    assert p.leq(0, 2) and p.leq(0, 3) and not p.leq(2, 3)


def test_parse_relations_need_not_be_covers():
    p = parse_poset("rel 0 2\nrel 0 1\nrel 1 2")
    assert p.names == ("0", "2", "1")
    assert [p.names[a] + p.names[b] for a, b in p.covers] == ["01", "12"]


def test_parse_errors():
    with pytest.raises(CyclicInput):
        parse_poset("rel 0 1\nrel 1 0")
    with pytest.raises(CyclicInput):
        parse_poset("rel a b\nrel b c\nrel c a")
    with pytest.raises(CyclicInput):
        parse_poset("rel a a")
    with pytest.raises(DuplicateElement):
        parse_poset("element a\nelement a")
    with pytest.raises(PosetSyntaxError) as e:
        parse_poset("# fine\nelement a\nrel a\n")
    assert e.value.lineno == 3
    with pytest.raises(PosetSyntaxError):
        parse_poset("edge a b")
    with pytest.raises(UnknownName):
        parse_poset("element a\nrel a b", strict=True)


def test_parse_declaration_order_and_comments():
    p = parse_poset("# x\n\nelement z\nrel a z\nelement q\n")
    assert p.names == ("z", "a", "q")
    assert p.covers == ((1, 0),)


def test_round_trip_examples():
    for p in (chain_poset(4), dandelion(3), pseudo_circle(), parse_poset("element x\nelement y")):
        assert parse_poset(serialize_poset(p)) == p


@settings(max_examples=60, deadline=None)
@given(posets())
def test_round_trip(p):
    assert parse_poset(serialize_poset(p)) == p


@settings(max_examples=40, deadline=None)
@given(posets(max_size=8))
def test_closure_and_covers_match_naive(p):
    leq = leq_set(p)
    assert {(a, b) for a in range(p.m) for b in range(p.m) if p.leq(a, b)} == leq
    strict = {(a, b) for a, b in leq if a != b}
    reduction = {(a, b) for a, b in strict if not any((a, c) in strict and (c, b) in strict for c in range(p.m))}
    assert set(p.covers) == reduction


def test_chains_examples():
    p = chain_poset(3)
    assert enumerate_chains(p, 1, False) == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    weak = enumerate_chains(p, 1, True)
    assert len(weak) == 10 and {(0, 0), (1, 1), (2, 2), (3, 3)} <= set(weak)
    assert enumerate_chains(p, 3, False) == [(0, 1, 2, 3)]
    assert enumerate_chains(p, 4, False) == []
    with pytest.raises(IndexOutOfRange):
        enumerate_chains(p, -1, True)


@settings(max_examples=40, deadline=None)
@given(posets(max_size=7))
def test_chains_match_naive(p):
    for n in range(4):
        for weak in (True, False):
            assert enumerate_chains(p, n, weak) == naive_chains(p, n, weak)
        assert (enumerate_chains(p, n, False) == []) == (n > composition_length(p))


def test_components_examples():
    from repcoh.levels import Variant, level_poset

    lv = level_poset(chain_poset(3), Variant.CHECK_G, 1)
    comps = [sorted(lv.objects[k] for k in c) for c in connected_components(lv.order, range(6))]
    assert comps == [[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)], [(0, 3)]]
    assert connected_components(chain_poset(5), range(6)) == [tuple(range(6))]
    pc = pseudo_circle()
    assert connected_components(pc, [2, 3]) == [(2,), (3,)]
    with pytest.raises(IndexOutOfRange):
        connected_components(pc, [7])


def test_intervals_chain2():
    got = [iv.support for iv in enumerate_intervals(chain_poset(2))]
    assert got == [(0,), (0, 1), (0, 1, 2), (1,), (1, 2), (2,)]


def test_interval_counts_derived():
    # frozen from the exhaustive subset check in oracles.brute_intervals
    assert len(enumerate_intervals(pseudo_circle())) == 13
    assert len(enumerate_intervals(dandelion(2))) == 11
    pc = pseudo_circle()
    assert len(brute_intervals(range(4), pc.leq)) == 13


@pytest.mark.parametrize("n", range(8))
def test_chain_interval_count(n):
    assert len(enumerate_intervals(chain_poset(n))) == (n + 1) * (n + 2) // 2


@settings(max_examples=60, deadline=None)
@given(posets(max_size=12))
def test_intervals_match_exhaustive_check(p):
    # every returned set passes the independent checker, and a full sweep
    # of subsets finds nothing else
    got = {frozenset(iv.support) for iv in enumerate_intervals(p)}
    assert len(got) == len(enumerate_intervals(p))
    leq = leq_set(p)
    assert got == set(brute_intervals(range(p.m), lambda a, b: (a, b) in leq))


def test_intervals_sorted_lexicographically():
    ivs = [iv.support for iv in enumerate_intervals(dandelion(3))]
    assert ivs == sorted(ivs)


def test_interval_cap(monkeypatch):
    with pytest.raises(IntervalExplosion):
        interval_masks(chain_poset(4), cap=14)
    assert len(interval_masks(chain_poset(4), cap=15)) == 15
    monkeypatch.setenv("REPCOH_INTERVAL_CAP", "5")
    with pytest.raises(IntervalExplosion):
        enumerate_intervals(chain_poset(3))


def test_composition_length():
    assert [composition_length(chain_poset(n)) for n in range(5)] == [0, 1, 2, 3, 4]
    assert composition_length(dandelion(5)) == 2
    assert composition_length(pseudo_circle()) == 1
    assert composition_length(Poset.from_relations(["a", "b"], [])) == 0


def test_component_masks_order():
    p = Poset.from_relations(list("abcde"), [(3, 4), (0, 2)])
    assert component_masks(p, p.full) == [0b00101, 0b00010, 0b11000]
