import pytest

from main.config import override_limits
from main.errors import KindError, SizeGuard, UsageError
from main.services.algebras import two_element_algebra
from main.services.duality import FreeDLOracle
from main.services.heyting import up_algebra
from main.services.posets import validate_poset
from main.services.sweeps import SWEEPS, make_scope, run_sweep

SMALL = dict(max_size=2, depth=1, letters=('p',), formula_limit=12, frame_limit=12)


@pytest.mark.parametrize('name', list(SWEEPS))
@pytest.mark.parametrize('kind', ['box', 'im'])
def test_small_sweeps_pass(name, kind):
    table = run_sweep(name, make_scope(kind, **SMALL))
    assert len(table) > 0
    assert table['ok'].all()


@pytest.mark.parametrize('name', ['complex-algebra', 'truth-lemma', 'duality', 'preservation', 'hsp'])
def test_small_si_sweeps_pass(name):
    table = run_sweep(name, make_scope('si', **SMALL))
    assert len(table) > 0
    assert table['ok'].all()


@pytest.mark.parametrize('name', ['complex-algebra', 'truth-lemma', 'duality', 'right-inverse', 'theta-prime',
                                  'naturality', 'oracle'])
def test_small_cin_sweeps_pass(name):
    table = run_sweep(name, make_scope('cin', **dict(SMALL, max_size=1)))
    assert len(table) > 0
    assert table['ok'].all()


def test_sweep_arguments_are_checked():
    with pytest.raises(UsageError):
        run_sweep('frobnicate', make_scope('box'))
    with pytest.raises(KindError):
        run_sweep('right-inverse', make_scope('si'))


def test_sweeps_are_deterministic():
    scope = make_scope('box', **SMALL)
    assert run_sweep('hsp', scope).equals(run_sweep('hsp', scope))


def test_preservation_covers_every_construction():
    table = run_sweep('preservation', make_scope('box', **SMALL))
    assert set(table['construction']) == {'disjoint-union', 'generated-subframe', 'p-morphic-image'}


@pytest.mark.parametrize('poset', [
    validate_poset(1),
    validate_poset(2, [[0, 1]]),
    validate_poset(2),
    validate_poset(3, [[0, 1], [1, 2]]),
    validate_poset(3, [[0, 1], [0, 2]]),
    validate_poset(3),
])
def test_box_oracle_on_upset_algebras(poset):
    assert FreeDLOracle('box', up_algebra(poset)).agrees_with_points()


def test_oracle_caps_per_kind():
    assert FreeDLOracle('im', up_algebra(validate_poset(2))).agrees_with_points()
    assert FreeDLOracle('cin', two_element_algebra('cin').base).agrees_with_points()
    # the free distributive lattice on six generators is already far too large
    chain = up_algebra(validate_poset(2, [[0, 1]]))
    with pytest.raises(SizeGuard):
        FreeDLOracle('cin', chain)
    with pytest.raises(SizeGuard):
        FreeDLOracle('im', up_algebra(validate_poset(3)))


def test_oracle_sweep_reaches_the_caps():
    table = run_sweep('oracle', make_scope('box'))
    assert table['algebra_size'].max() == 8
    assert table['ok'].all()
    table = run_sweep('oracle', make_scope('im'))
    assert table['algebra_size'].max() == 4
    assert table['ok'].all()


def test_universe_sampling_reaches_cin_size_three():
    with override_limits(max_universe=300):
        table = run_sweep('duality', make_scope('cin', max_size=3, universe_sample=2))
    assert table['size'].max() == 3
    assert table['ok'].all()


# Full-scale sweeps: frames up to three points, formulas of depth two over p and q

FULL_SCALE = dict(max_size=3, depth=2, letters=('p', 'q'), formula_limit=25, frame_limit=60)


@pytest.mark.slow
@pytest.mark.parametrize('name', ['complex-algebra', 'truth-lemma', 'duality', 'preservation', 'hsp'])
@pytest.mark.parametrize('kind', ['box', 'im', 'si'])
def test_full_scale_frame_sweeps(name, kind):
    table = run_sweep(name, make_scope(kind, **FULL_SCALE))
    assert table['ok'].all(), table.loc[~table['ok']].head()


@pytest.mark.slow
@pytest.mark.parametrize('name', ['right-inverse', 'theta-prime', 'naturality', 'oracle'])
@pytest.mark.parametrize('kind', ['box', 'im'])
def test_full_scale_algebra_sweeps(name, kind):
    table = run_sweep(name, make_scope(kind, **FULL_SCALE))
    assert table['ok'].all(), table.loc[~table['ok']].head()


@pytest.mark.slow
@pytest.mark.parametrize('name', list(SWEEPS))
def test_full_scale_cin_sweeps(name):
    scope = make_scope('cin', **dict(FULL_SCALE, universe_sample=3, frame_limit=30, algebra_limit=6))
    table = run_sweep(name, scope)
    assert table['ok'].all(), table.loc[~table['ok']].head()
