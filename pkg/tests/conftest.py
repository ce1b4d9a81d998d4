import pytest

from main.constants.fixtures import B1, CIN_POINT_EMPTY, IM_POINT, POINT_IRREFLEXIVE, POINT_REFLEXIVE, SI_CHAIN
from main.services.frames import validate_frame
from main.services.harness import build_universe


@pytest.fixture
def b1():
    return validate_frame(B1)


@pytest.fixture
def reflexive_point():
    return validate_frame(POINT_REFLEXIVE)


@pytest.fixture
def irreflexive_point():
    return validate_frame(POINT_IRREFLEXIVE)


@pytest.fixture
def im_point():
    return validate_frame(IM_POINT)


@pytest.fixture
def cin_point():
    return validate_frame(CIN_POINT_EMPTY)


@pytest.fixture
def si_chain():
    return validate_frame(SI_CHAIN)


@pytest.fixture(scope='session')
def box_universe():
    return build_universe('box', 2)


@pytest.fixture(scope='session')
def small_universes():
    """Exhaustive universes small enough for per-frame property sweeps"""
    return {
        'box': build_universe('box', 2),
        'si': build_universe('si', 2),
        'im': build_universe('im', 2),
        'cin': build_universe('cin', 1),
    }
