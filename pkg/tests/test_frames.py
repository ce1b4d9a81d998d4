import pytest

from main.constants.fixtures import B1
from main.errors import (CycleError, FormatError, FrameConditionError, KindMismatch, MissingLetterError,
                         SignatureError, ValuationError)
from main.services.frames import (are_isomorphic, check_frame_morphism, disjoint_union, frame_certificate,
                                  frame_validates, functor_action, generate_subframe, generated_subframe_check,
                                  is_frame_morphism, lifting_naturality, make_model, modal_operator,
                                  p_morphic_image_check, pullback_valuation, relabel_frame, satisfies, truth_set,
                                  upset_reduct, upward_valuation, validate_frame)
from main.services.harness import corpus
from main.services.posets import PosetMap, validate_poset
from main.services.syntax import Letter, Tri, parse


def test_b1_is_a_box_frame(b1):
    assert b1.size == 2
    assert b1.relation_pairs() == [(0, 1), (1, 1)]


def test_box_closure_violation_has_witness():
    raw = {'kind': 'box', 'size': 2, 'leq': [[0, 1]], 'rel': [[1, 0]]}
    with pytest.raises(FrameConditionError) as e:
        validate_frame(raw)
    assert e.value.witness == (0, 1, 0)


def test_successors_must_be_upsets():
    raw = {'kind': 'box', 'size': 2, 'leq': [[0, 1]], 'rel': [[0, 0]]}
    # 0 R 0 <= 1 needs 0 R 1
    with pytest.raises(FrameConditionError):
        validate_frame(raw)


def test_si_frames_only_need_antitone_relations():
    raw = {'kind': 'si', 'size': 2, 'leq': [[0, 1]], 'rel': [[0, 0]]}
    frame = validate_frame(raw)
    assert frame.successors(0) == 0b01


def test_json_errors_report_paths():
    with pytest.raises(FormatError) as e:
        validate_frame({'kind': 'box', 'size': 2, 'leq': [], 'rel': [[0, 5]]})
    assert e.value.path.startswith('$.rel[0]')
    with pytest.raises(FormatError) as e:
        validate_frame({'kind': 'kripke', 'size': 1})
    assert e.value.path == '$.kind'
    with pytest.raises(FormatError) as e:
        validate_frame({'kind': 'im', 'size': 1, 'leq': []})
    assert e.value.path == '$.nbhd'
    with pytest.raises(CycleError):
        validate_frame({'kind': 'box', 'size': 2, 'leq': [[0, 1], [1, 0]], 'rel': []})


def test_im_neighbourhoods_are_up_closed(im_point):
    assert im_point.gamma(0) == frozenset({0b1})
    frame = validate_frame({'kind': 'im', 'size': 2, 'leq': [], 'nbhd': [[[0]], []]})
    assert frame.gamma(0) == frozenset({0b01, 0b11})
    with pytest.raises(FrameConditionError):
        validate_frame({'kind': 'im', 'size': 2, 'leq': [[0, 1]], 'nbhd': [[[0]], []]})


def test_cin_box_neighbourhoods_grow_upwards():
    raw = {'kind': 'cin', 'size': 2, 'leq': [[0, 1]], 'nbox': [[[0]], []], 'ndia': [[], []]}
    with pytest.raises(FrameConditionError):
        validate_frame(raw)


def test_valuations_assign_upsets(b1):
    with pytest.raises(ValuationError):
        make_model(b1, {'p': 0b01})


def test_truth_sets(b1):
    model = make_model(b1, {'p': 0b10})
    assert truth_set(model, parse('box p', 'box')) == 0b11
    assert truth_set(model, parse('p -> F', 'box')) == 0b00
    assert satisfies(model, 1, parse('box p', 'box'))
    with pytest.raises(MissingLetterError):
        truth_set(model, parse('q', 'box'))


def test_operators_per_kind(im_point, cin_point, si_chain):
    assert modal_operator(im_point, 'tri', 0b1) == 0b1
    assert modal_operator(im_point, 'tri', 0b0) == 0b0
    assert modal_operator(cin_point, 'box', 0b1) == 0b0
    assert modal_operator(cin_point, 'dia', 0b0) == 0b1
    # both successor sets meet {1}
    assert modal_operator(si_chain, 'sto', 0b10, 0b00) == 0b00
    assert modal_operator(si_chain, 'sto', 0b00, 0b00) == 0b11


def test_validity(b1, reflexive_point, irreflexive_point):
    assert frame_validates(reflexive_point, parse('box p -> p', 'box')).valid
    # 0 sees only 1
    verdict = frame_validates(b1, parse('box p -> p', 'box'))
    assert (verdict.valid, verdict.counterexample, verdict.state) == (False, {'p': 0b10}, 0)
    assert frame_validates(b1, parse('box T <-> T', 'box')).valid
    verdict = frame_validates(irreflexive_point, parse('box p -> p', 'box'))
    assert not verdict.valid
    assert verdict.counterexample == {'p': 0}
    assert verdict.state == 0
    with pytest.raises(SignatureError):
        frame_validates(b1, Tri(Letter('p')))


def test_validity_per_kind(im_point, cin_point):
    assert frame_validates(im_point, parse('tri T', 'im')).valid
    assert not frame_validates(im_point, parse('tri F', 'im')).valid
    assert frame_validates(im_point, parse('tri p -> tri (p | q)', 'im')).valid
    assert not frame_validates(cin_point, parse('box T', 'cin')).valid
    assert frame_validates(cin_point, parse('dia F', 'cin')).valid


def test_disjoint_union_injections_are_generated_subframes(b1):
    union, injections = disjoint_union([b1, b1])
    assert union.size == 4
    for f in injections:
        assert generated_subframe_check(f, b1, union)


def test_disjoint_union_preserves_validity():
    frames = corpus('box', max_size=1, depth=1, letter_names=('p',)).frames
    formulas = corpus('box', max_size=1, depth=1, letter_names=('p',)).formulas
    for first in frames:
        for second in frames:
            union, _ = disjoint_union([first, second])
            for formula in formulas:
                expected = frame_validates(first, formula).valid and frame_validates(second, formula).valid
                assert frame_validates(union, formula).valid == expected


def test_disjoint_union_of_im_frames(im_point):
    union, injections = disjoint_union([im_point, im_point])
    assert union.gamma(0) == frozenset({0b01, 0b11})
    assert all(is_frame_morphism(f, im_point, union) for f in injections)


def test_collapse_is_a_p_morphic_image(b1):
    union, _ = disjoint_union([b1, b1])
    collapse = PosetMap(union.base, b1.base, (0, 1, 0, 1))
    assert p_morphic_image_check(collapse, union, b1)


def test_morphisms_preserve_truth(b1):
    union, _ = disjoint_union([b1, b1])
    collapse = PosetMap(union.base, b1.base, (0, 1, 0, 1))
    for formula in corpus('box', max_size=1, depth=1, letter_names=('p',)).formulas:
        for mask in (0b00, 0b10, 0b11):
            valuation = {'p': mask}
            upstairs = make_model(union, pullback_valuation(collapse, valuation))
            downstairs = make_model(b1, valuation)
            assert truth_set(upstairs, formula) == collapse.preimage(truth_set(downstairs, formula))


def test_upward_valuation_closes_images(b1):
    point = validate_poset(1)
    f = PosetMap(point, b1.base, (0,))
    assert upward_valuation(f, {'p': 0b1}) == {'p': 0b11}


def test_back_condition_failure(irreflexive_point, reflexive_point):
    f = PosetMap(irreflexive_point.base, reflexive_point.base, (0,))
    failure = check_frame_morphism(f, irreflexive_point, reflexive_point)
    assert failure is not None
    assert failure[0].startswith('back')
    with pytest.raises(KindMismatch):
        check_frame_morphism(f, irreflexive_point, validate_frame({'kind': 'si', 'size': 1, 'rel': []}))


def test_generated_subframe(b1):
    sub, inclusion = generate_subframe(b1, 0b10)
    assert sub.size == 1
    assert sub.relation_pairs() == [(0, 0)]
    assert inclusion.graph == (1,)
    assert generated_subframe_check(inclusion, sub, b1)
    whole, _ = generate_subframe(b1, 0b01)
    assert whole == b1


def test_generate_subframe_needs_a_relation(im_point):
    with pytest.raises(KindMismatch):
        generate_subframe(im_point, 0b1)


@pytest.mark.parametrize('kind', ['box', 'si', 'im', 'cin'])
def test_liftings_are_natural(kind):
    antichain, point = validate_poset(2), validate_poset(1)
    assert lifting_naturality(kind, PosetMap(antichain, point, (0, 0))) is None


def test_functor_action_on_im_values():
    antichain, point = validate_poset(2), validate_poset(1)
    f = PosetMap(antichain, point, (0, 0))
    # {0, 1} is the preimage of {0}; nothing pulls back to the empty set in {{0, 1}}
    assert functor_action('im', f, frozenset({0b11})) == frozenset({0b1})


def test_certificates_identify_relabellings():
    frame = validate_frame({'kind': 'box', 'size': 3, 'leq': [[0, 1]], 'rel': [[0, 1], [1, 1]]})
    moved = relabel_frame(frame, (2, 0, 1))
    assert frame_certificate(frame) == frame_certificate(moved)
    assert are_isomorphic(frame, moved)
    assert not are_isomorphic(frame, validate_frame({'kind': 'box', 'size': 3, 'leq': [[0, 1]], 'rel': []}))


def test_upset_reduct_drops_invisible_neighbourhoods():
    raw = {'kind': 'cin', 'size': 2, 'leq': [[0, 1]], 'nbox': [[[0]], [[0]]], 'ndia': [[[1]], [[1]]]}
    frame = validate_frame(raw)
    reduct = upset_reduct(frame)
    # {0} is not an upset, and neither is the complement of {1}
    assert reduct.gamma(0) == (frozenset(), frozenset())
    assert upset_reduct(validate_frame(B1)) == validate_frame(B1)
