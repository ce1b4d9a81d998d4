import json

import pytest

from main.constants.fixtures import B1
from main.errors import FormatError, UsageError, ValuationError
from main.services.algebras import complex_algebra, product, two_element_algebra
from main.services.dot_export import frame_to_dot
from main.services.frame_io import (algebra_from_json, algebra_to_json, frame_to_json, load_json, map_from_json,
                                    read_frame, valuation_from_json, valuation_to_json)
from main.services.frames import validate_frame


def test_frames_reread_identically(small_universes):
    for universe in small_universes.values():
        for frame in universe.frames:
            assert validate_frame(json.loads(json.dumps(frame_to_json(frame)))) == frame


def test_b1_json(b1):
    assert frame_to_json(b1) == {'kind': 'box', 'size': 2, 'leq': [[0, 1]], 'rel': [[0, 1], [1, 1]]}


def test_im_json_lists_minimal_neighbourhoods():
    frame = validate_frame({'kind': 'im', 'size': 2, 'leq': [], 'nbhd': [[[0], [0, 1]], []]})
    assert frame_to_json(frame)['nbhd'] == [[[0]], []]


def test_read_frame(tmp_path):
    path = tmp_path / 'b1.json'
    path.write_text(json.dumps(B1))
    assert read_frame(str(path)) == validate_frame(B1)


def test_load_errors(tmp_path):
    with pytest.raises(UsageError):
        load_json(str(tmp_path / 'missing.json'))
    broken = tmp_path / 'broken.json'
    broken.write_text('{"kind": ')
    with pytest.raises(FormatError) as e:
        load_json(str(broken))
    assert e.value.path == '$'


def test_valuations(b1):
    model = valuation_from_json({'p': [1]}, b1)
    assert model.assignment == {'p': 0b10}
    assert valuation_to_json(model.assignment) == {'p': [1]}
    with pytest.raises(ValuationError):
        valuation_from_json({'p': [0]}, b1)
    with pytest.raises(FormatError):
        valuation_from_json({'p': [7]}, b1)


def test_algebras_reread_identically(b1, si_chain, cin_point):
    for algebra in (complex_algebra(b1), complex_algebra(si_chain), complex_algebra(cin_point),
                    product(two_element_algebra('box'), two_element_algebra('box'))):
        data = json.loads(json.dumps(algebra_to_json(algebra)))
        restored = algebra_from_json(data)
        assert restored == algebra
        assert restored.base.labels == algebra.base.labels


def test_complex_algebra_json_names_upsets(b1):
    data = algebra_to_json(complex_algebra(b1))
    assert data['upsets'] == [[], [1], [0, 1]]
    assert data['ops'] == {'box': [0, 2, 2]}


def test_algebra_json_errors(b1):
    data = algebra_to_json(complex_algebra(b1))
    del data['ops']['box']
    with pytest.raises(FormatError) as e:
        algebra_from_json(data)
    assert e.value.path == '$.ops.box'


def test_maps(b1):
    f = map_from_json({'map': [1, 1]}, b1.base, b1.base)
    assert f.graph == (1, 1)
    assert map_from_json([0, 1], b1.base, b1.base).graph == (0, 1)
    with pytest.raises(FormatError):
        map_from_json([0, 2], b1.base, b1.base)


def test_dot_output(b1, im_point):
    dot = frame_to_dot(b1)
    assert dot.startswith('digraph box {')
    assert '"s0" -> "s1" ;' in dot
    assert '"s0" -> "s1" [style=dashed, label="R", constraint=false] ;' in dot
    neighbourhoods = frame_to_dot(im_point)
    assert '"m1" [label="{0}", shape=box, fillcolor=lightgrey] ;' in neighbourhoods
    assert 'label="N"' in neighbourhoods
