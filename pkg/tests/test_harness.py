import json

import pytest

from main.config import override_limits
from main.constants.axioms import AUDIT_AXIOMS
from main.constants.fixtures import B1
from main.errors import SizeGuard
from main.services.frames import check_frame_conditions, frame_certificate, validate_frame
from main.services.harness import (CHECKS, audit_closure, build_universe, corpus, fr_class, fr_dataframe,
                                   sample_frames, validity_table)
from main.services.syntax import Bot, parse, parse_any


def axioms(name):
    kind, texts = AUDIT_AXIOMS[name]
    return [parse_any(text, kind) for text in texts]


@pytest.mark.parametrize('kind, n, count', [('box', 1, 2), ('box', 2, 18), ('si', 1, 2), ('im', 1, 3), ('cin', 1, 16)])
def test_universe_counts(kind, n, count):
    assert len(build_universe(kind, n)) == count


def test_universe_members_are_valid_and_distinct(small_universes):
    for universe in small_universes.values():
        for frame in universe.frames:
            check_frame_conditions(frame)
        assert len({frame_certificate(frame) for frame in universe.frames}) == len(universe)


def test_universe_caps():
    with pytest.raises(SizeGuard):
        build_universe('box', 5)
    with pytest.raises(SizeGuard):
        build_universe('cin', 4)


def test_cin_universe_of_size_three_needs_sampling():
    with override_limits(max_universe=300):
        with pytest.raises(SizeGuard):
            build_universe('cin', 3)
        universe = build_universe('cin', 3, sample=4, seed=0)
        again = build_universe('cin', 3, sample=4, seed=0)
    assert universe.sampled
    assert {frame.size for frame in universe.frames} == {1, 2, 3}
    for frame in universe.frames:
        check_frame_conditions(frame)
    assert again.frames == universe.frames
    assert len({frame_certificate(frame) for frame in universe.frames}) == len(universe)
    # the one-point poset stays exhaustive
    assert universe.frames[:16] == build_universe('cin', 1).frames


@pytest.mark.slow
def test_cin_universe_of_size_three_under_default_caps():
    universe = build_universe('cin', 3, sample=3, seed=1)
    exhaustive = build_universe('cin', 2)
    assert not exhaustive.sampled
    assert universe.sampled
    assert universe.frames[:len(exhaustive)] == exhaustive.frames
    assert max(frame.size for frame in universe.frames) == 3


def test_sampled_universe_audit_falls_back_to_axioms():
    box_top = [parse('box T', 'cin')]
    with override_limits(max_universe=20):
        universe = build_universe('cin', 2, sample=3, seed=0)
        report = audit_closure(fr_class(box_top, universe), universe, axioms=box_top)
    assert universe.sampled
    assert report.sampled and report.to_dict()['sampled'] is True
    assert report.checks['disjoint_unions'].examined > 0
    assert report.passed


def test_index_of_finds_isomorphic_members(box_universe):
    assert box_universe.index_of(validate_frame(B1)) is not None
    relabelled = validate_frame({'kind': 'box', 'size': 2, 'leq': [[1, 0]], 'rel': [[1, 0], [0, 0]]})
    assert box_universe.index_of(relabelled) == box_universe.index_of(validate_frame(B1))


def test_sound_axioms_hold_everywhere(box_universe):
    assert fr_class(axioms('normality'), box_universe) == list(range(len(box_universe)))


def test_bottom_holds_nowhere(box_universe):
    assert fr_class([Bot()], box_universe) == []


def test_reflexivity_class_matches_direct_check(box_universe):
    members = fr_class(axioms('reflexivity'), box_universe)
    direct = [i for i, frame in enumerate(box_universe.frames)
              if all(frame.successors(x) >> x & 1 for x in range(frame.size))]
    assert members == direct
    assert len(members) == 6


def test_upward_axiom_holds_on_every_im_frame(small_universes):
    universe = small_universes['im']
    assert fr_class(axioms('upward'), universe) == list(range(len(universe)))


def test_worker_pool_keeps_row_order(box_universe):
    formulas = [parse('box p -> p', 'box')]
    serial = validity_table(formulas, box_universe)
    with override_limits(workers=2):
        pooled = validity_table(formulas, box_universe)
    assert pooled == serial


def test_fr_dataframe(box_universe):
    table = fr_dataframe(axioms('reflexivity'), box_universe)
    assert list(table.columns) == ['frame', 'size', 'box p -> p', 'in_class']
    assert int(table['in_class'].sum()) == 6


def test_sampling_is_seeded(box_universe):
    assert sample_frames(box_universe, 5, seed=1) == sample_frames(box_universe, 5, seed=1)
    assert sample_frames(box_universe, None) == list(range(len(box_universe)))


def test_audit_of_axiomatic_class_passes(box_universe):
    members = fr_class(axioms('reflexivity'), box_universe)
    report = audit_closure(members, box_universe, axioms=axioms('reflexivity'))
    assert report.passed
    assert not report.partial
    assert report.checks['generated_subframes'].examined > 0
    assert report.checks['p_morphic_images'].examined > 0


def test_audit_of_normality_class_passes(box_universe):
    report = audit_closure(list(range(len(box_universe))), box_universe)
    assert report.passed


def test_audit_of_single_frame_fails_on_unions(box_universe):
    b1 = box_universe.index_of(validate_frame(B1))
    report = audit_closure([b1], box_universe, check_size=4)
    assert not report.passed
    assert report.checks['disjoint_unions'].failures == [{'frames': [b1, b1], 'size': 4}]


def test_audit_of_im_class_passes(small_universes):
    universe = small_universes['im']
    members = fr_class(axioms('upward'), universe)
    assert audit_closure(members, universe, axioms=axioms('upward')).passed


def test_budget_flags_partial_results(box_universe):
    report = audit_closure([0, 1], box_universe, budget=1)
    assert report.partial


def test_report_serialisation(box_universe):
    report = audit_closure(fr_class(axioms('reflexivity'), box_universe), box_universe)
    data = json.loads(report.to_json())
    assert sorted(data['checks']) == sorted(CHECKS)
    assert report.to_json() == report.to_json()
    assert list(report.to_dataframe()['check']) == list(CHECKS)


def test_corpus_is_deterministic():
    first, second = (corpus('box', seed=0, max_size=2, depth=1, letter_names=('p',)) for _ in range(2))
    assert first.formulas == second.formulas
    assert first.frames == second.frames
    assert len(first.formulas) == 33
    for frame in first.frames:
        check_frame_conditions(frame)
    assert len(list(first.valuations(first.frames[0]))) == 2
