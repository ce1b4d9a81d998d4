import pytest

from main import create_app
from main.config import Limits
from main.constants.fixtures import B1, POINT_IRREFLEXIVE


@pytest.fixture
def client():
    app = create_app(Limits())
    app.config['TESTING'] = True
    with app.test_client() as client:
        yield client


def test_health(client):
    response = client.get('/health')
    assert response.status_code == 200
    assert response.get_data(as_text=True) == 'OK'


def test_valid(client):
    response = client.post('/valid', json={'frame': B1, 'formula': 'box T <-> T'})
    assert response.status_code == 200
    assert response.get_json() == {'output': 'valid', 'exit_code': 0}


def test_invalid_is_422(client):
    response = client.post('/valid', json={'frame': POINT_IRREFLEXIVE, 'formula': 'box p -> p'})
    assert response.status_code == 422
    assert response.get_json()['exit_code'] == 1


def test_bad_frame_is_422(client):
    bad = {'kind': 'box', 'size': 2, 'leq': [[0, 1]], 'rel': [[1, 0]]}
    response = client.post('/check-frame', json={'frame': bad})
    assert response.status_code == 422
    body = response.get_json()
    assert body['exit_code'] == 1
    assert '(0, 1, 0)' in body['error']


def test_missing_field_is_400(client):
    response = client.post('/parse', json={'sig': 'box'})
    assert response.status_code == 400
    assert response.get_json()['error'] == "missing field 'formula'"
    assert client.post('/parse', data='not json').status_code == 400


def test_parse_error_is_400(client):
    response = client.post('/parse', json={'sig': 'box', 'formula': 'p & '})
    assert response.status_code == 400
    assert 'position 4' in response.get_json()['error']


def test_model_check(client):
    response = client.post('/mc', json={'frame': B1, 'valuation': {'p': [1]}, 'formula': 'box p'})
    assert response.status_code == 200
    assert response.get_json()['result'] == {'formula': 'box p', 'truth_set': [0, 1]}


def test_complex_algebra_and_pe(client):
    response = client.post('/ca', json={'frame': B1})
    assert response.get_json()['result']['ops'] == {'box': [0, 2, 2]}
    response = client.post('/pe', json={'frame': B1, 'variant': 'sigma'})
    assert response.status_code == 400


def test_enum_size_guard_is_413(client):
    response = client.post('/enum', json={'kind': 'box', 'n': 5})
    assert response.status_code == 413
    assert response.get_json()['exit_code'] == 3


def test_app_limits_apply_to_requests():
    app = create_app(Limits(universe_caps={'box': 1, 'si': 1, 'im': 1, 'cin': 1}))
    with app.test_client() as client:
        assert client.post('/enum', json={'kind': 'box', 'n': 2}).status_code == 413
        response = client.post('/enum', json={'kind': 'box', 'n': 1})
        assert response.status_code == 200
        assert response.get_json()['result']['count'] == 2


def test_fr_and_audit(client):
    response = client.post('/fr', json={'kind': 'box', 'n': 2, 'axioms': ['box p -> p']})
    assert response.status_code == 200
    assert response.get_json()['result']['count'] == 6
    response = client.post('/audit', json={'kind': 'box', 'n': 2, 'axioms': 'reflexivity'})
    assert response.status_code == 200
    assert response.get_json()['result']['passed'] is True


def test_axioms_are_never_read_from_server_files(client, tmp_path):
    path = tmp_path / 'axioms.txt'
    path.write_text('box p -> p\n')
    for route in ('/fr', '/audit'):
        response = client.post(route, json={'kind': 'box', 'n': 1, 'axioms': str(path)})
        assert response.status_code == 400
        assert 'box p' not in response.get_json()['error']
    assert client.post('/fr', json={'kind': 'box', 'n': 1, 'axioms': 7}).status_code == 400


def test_fr_accepts_a_universe_sample():
    client = create_app(Limits(max_universe=20)).test_client()
    body = {'kind': 'cin', 'n': 2, 'axioms': ['box T']}
    assert client.post('/fr', json=body).status_code == 413
    response = client.post('/fr', json=dict(body, universe_sample=2))
    assert response.status_code == 200
    assert response.get_json()['result']['universe_sampled'] is True


def test_dot(client):
    response = client.post('/dot', json={'frame': B1})
    assert response.get_json()['output'].startswith('digraph box {')
