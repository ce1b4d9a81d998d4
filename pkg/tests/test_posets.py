import pytest

from main.config import override_limits
from main.errors import CycleError, FormatError, SizeGuard
from main.services.posets import (PosetMap, automorphisms, enumerate_posets, identity_map, is_p_morphism, iter_bits,
                                  mask_of, poset_coproduct, poset_morphisms, upset_masks, validate_poset)


def test_masks():
    assert mask_of([0, 2]) == 0b101
    assert list(iter_bits(0b1010)) == [1, 3]


def test_chain_upsets_and_covers():
    chain = validate_poset(3, [[0, 1], [1, 2]])
    assert chain.le(0, 2)
    assert not chain.le(2, 0)
    assert chain.covers() == [(0, 1), (1, 2)]
    assert upset_masks(chain) == (0b000, 0b100, 0b110, 0b111)


def test_cycle_is_rejected():
    with pytest.raises(CycleError):
        validate_poset(2, [[0, 1], [1, 0]])


def test_out_of_range_pair():
    with pytest.raises(FormatError):
        validate_poset(2, [[0, 2]])


@pytest.mark.parametrize('n, count', [(1, 1), (2, 2), (3, 5), (4, 16)])
def test_poset_counts(n, count):
    assert len(enumerate_posets(n)) == count


def test_enumerated_posets_are_naturally_labelled():
    for poset in enumerate_posets(3):
        for i, j in poset.covers():
            assert i < j


def test_enumeration_cap():
    with pytest.raises(SizeGuard):
        enumerate_posets(9)


def test_cached_results_still_respect_tighter_caps():
    chain = validate_poset(2, [[0, 1]])
    assert len(enumerate_posets(2)) == 2
    assert upset_masks(chain) == (0b00, 0b10, 0b11)
    assert poset_morphisms(chain, chain)
    with override_limits(max_enum_size=1):
        with pytest.raises(SizeGuard):
            enumerate_posets(2)
    with override_limits(max_subset_scan=2):
        with pytest.raises(SizeGuard):
            upset_masks(chain)
    with override_limits(max_maps=3):
        with pytest.raises(SizeGuard):
            poset_morphisms(chain, chain)
    assert len(enumerate_posets(2)) == 2


def test_p_morphisms_between_chains():
    chain = validate_poset(2, [[0, 1]])
    # (0, 0) is monotone but misses the successor 1 of f(0)
    assert poset_morphisms(chain, chain) == ((0, 1), (1, 1))
    assert poset_morphisms(chain, chain, surjective=True) == ((0, 1),)


def test_p_morphism_back_condition():
    chain = validate_poset(2, [[0, 1]])
    point = validate_poset(1)
    assert is_p_morphism(PosetMap(chain, point, (0, 0)))
    # the point 0 maps to the bottom of the chain but has no successor over the top
    assert not is_p_morphism(PosetMap(point, chain, (0,)))
    assert is_p_morphism(identity_map(chain))


def test_coproduct_places_blocks_side_by_side():
    chain = validate_poset(2, [[0, 1]])
    union, injections = poset_coproduct([chain, chain])
    assert union.size == 4
    assert [f.graph for f in injections] == [(0, 1), (2, 3)]
    assert not union.le(0, 3)


def test_automorphisms_of_antichain():
    antichain = validate_poset(2)
    assert sorted(automorphisms(antichain)) == [(0, 1), (1, 0)]
