import pytest

from main.constants.signatures import Kind
from main.errors import AlgebraConditionError, KindError
from main.services.algebras import complex_algebra, modal_homomorphisms, product, projection, two_element_algebra
from main.services.duality import (FreeDLOracle, LDualPoint, check_tau_naturality, check_theta_prime_morphism,
                                   direct_pfe, dual_frame, duality_unit_is_isomorphism, l_dual_points, pfe,
                                   pfe_model, prime_filter_extension, right_inverse_witness, sigma, tau,
                                   tau_naturality_witness, tau_sigma_disagreement)
from main.services.frames import are_isomorphic, is_frame_isomorphism, make_model, truth_set, validate_frame, valuations
from main.services.syntax import enumerate_formulas


def test_pfe_of_b1_is_isomorphic_to_b1(b1):
    extension, unit = prime_filter_extension(b1)
    assert are_isomorphic(extension, b1)
    assert is_frame_isomorphism(unit, b1, extension)


@pytest.mark.parametrize('kind', ['box', 'si', 'im', 'cin'])
def test_unit_is_an_isomorphism(small_universes, kind):
    for frame in small_universes[kind].frames:
        assert duality_unit_is_isomorphism(frame)


@pytest.mark.parametrize('kind', ['box', 'im', 'cin'])
def test_direct_extension_matches_dual_frame(small_universes, kind):
    for frame in small_universes[kind].frames:
        assert direct_pfe(frame) == pfe(frame)


def test_tau_and_sigma_extensions_coincide_on_im_frames(small_universes):
    for frame in small_universes['im'].frames:
        assert pfe(frame, 'sigma') == pfe(frame, 'tau')
        assert tau_sigma_disagreement(complex_algebra(frame).base) is None
        assert duality_unit_is_isomorphism(frame, 'sigma')


def test_sigma_is_only_for_im(b1, si_chain):
    with pytest.raises(KindError):
        pfe(b1, 'sigma')
    with pytest.raises(KindError):
        pfe(si_chain, 'sigma')
    with pytest.raises(KindError):
        dual_frame(complex_algebra(si_chain))


def test_box_dual_points_are_principal_filters(b1):
    base = complex_algebra(b1).base
    poset, points = l_dual_points('box', base)
    assert len(points) == base.size
    assert poset.size == base.size


@pytest.mark.parametrize('kind', ['box', 'im', 'cin'])
def test_rho_flat_inverts_tau(small_universes, kind):
    for frame in small_universes[kind].frames:
        assert right_inverse_witness(kind, complex_algebra(frame).base) is None


def test_rho_flat_inverts_sigma(small_universes):
    for frame in small_universes['im'].frames:
        assert right_inverse_witness('im', complex_algebra(frame).base, variant='sigma') is None


def test_dia_reading_against_box_family_fails():
    base = two_element_algebra('cin').base
    assert right_inverse_witness('cin', base, dia_reading='w2') is None
    assert right_inverse_witness('cin', base, dia_reading='w1') == LDualPoint(Kind.CIN, (0, 0))


def test_tau_values_for_cin_point():
    base = two_element_algebra('cin').base
    _, points = l_dual_points('cin', base)
    assert len(points) == 16
    boxes, dias = tau('cin', base, points[0])
    assert boxes == frozenset()
    assert dias == frozenset({0b0, 0b1})


def test_sigma_for_generated_families(im_point):
    base = complex_algebra(im_point).base
    _, points = l_dual_points('im', base)
    for point in points:
        assert sigma(base, point) == tau('im', base, point)


def test_oracle_agrees_with_dual_points(b1):
    base = complex_algebra(b1).base
    assert FreeDLOracle('box', base).agrees_with_points()
    assert FreeDLOracle('im', base).agrees_with_points()
    assert FreeDLOracle('cin', two_element_algebra('cin').base).agrees_with_points()


@pytest.mark.parametrize('kind', ['box', 'im', 'cin'])
def test_theta_prime_is_a_morphism(small_universes, kind):
    for frame in small_universes[kind].frames:
        assert check_theta_prime_morphism(complex_algebra(frame))


def test_tau_is_natural_along_projections():
    two = two_element_algebra('box')
    square = product(two, two)
    for index in (0, 1):
        assert check_tau_naturality(projection(two, two, index), square, two)
    with pytest.raises(AlgebraConditionError):
        check_tau_naturality((0, 0, 0, 0), square, two)


def test_tau_is_natural_for_im_projections(im_point):
    algebra = complex_algebra(im_point)
    square = product(algebra, algebra)
    for index in (0, 1):
        assert check_tau_naturality(projection(algebra, algebra, index), square, algebra)
    for h in modal_homomorphisms(algebra, square):
        assert check_tau_naturality(h, algebra, square)


def test_cin_naturality_holds_on_visible_neighbourhoods(cin_point):
    # x < y and an isolated z; restricting to z is a surjective, non-injective homomorphism
    frame = validate_frame({'kind': 'cin', 'size': 3, 'leq': [[0, 1]], 'nbox': [[], [], []],
                            'ndia': [[], [], []]})
    source, target = complex_algebra(frame), complex_algebra(cin_point)
    h = tuple(target.base.index_of(label >> 2 & 1) for label in source.base.labels)
    assert check_tau_naturality(h, source, target)
    # T f also picks up {z, x} and {x}, which are not upsets
    assert not check_tau_naturality(h, source, target, visible_only=False)
    assert tau_naturality_witness(h, source, target, visible_only=False) is not None


@pytest.mark.parametrize('kind', ['box', 'im', 'cin'])
def test_tau_is_natural_along_every_small_homomorphism(small_universes, kind):
    algebras = []
    for frame in small_universes[kind].frames:
        algebra = complex_algebra(frame)
        if algebra.size <= 4 and algebra not in algebras:
            algebras.append(algebra)
    algebras = algebras[:8]
    checked = 0
    for source in algebras:
        for target in algebras:
            for h in modal_homomorphisms(source, target):
                assert check_tau_naturality(h, source, target)
                checked += 1
    assert checked >= len(algebras)


@pytest.mark.parametrize('kind, max_size', [('box', 2), ('si', 1), ('im', 1), ('cin', 1)])
def test_truth_lemma(small_universes, kind, max_size):
    formulas = enumerate_formulas(kind, 1, ['p'])
    for frame in small_universes[kind].frames:
        if frame.size > max_size:
            continue
        algebra = complex_algebra(frame)
        theta = algebra.base.spectrum.theta
        for valuation in valuations(frame.base, ['p']):
            model = make_model(frame, valuation)
            extended = pfe_model(model)
            for formula in formulas:
                denotation = truth_set(model, formula)
                assert truth_set(extended, formula) == theta[algebra.base.index_of(denotation)]
