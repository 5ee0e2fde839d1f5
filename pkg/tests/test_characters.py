import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hankel_lab.characters import (STANDARD_PSI, AdditiveCharacter, DomainError, LogGrid,
                                   MultiplicativeCharacter, TorusHalfDensity, combine, evaluate_additive,
                                   evaluate_mult, interpolate, mesh_points, modular_character_gln,
                                   padic_valuation)

nonzero = st.floats(-1e3, 1e3).filter(lambda x: abs(x) > 1e-6)


@pytest.mark.parametrize("sign,x,want", [(1, 0.0, 1.0), (1, 0.25, 1j), (-1, 0.25, -1j)])
def test_evaluate_additive_examples(sign, x, want):
    assert abs(evaluate_additive(AdditiveCharacter(2 * np.pi, sign), x) - want) < 1e-15


def test_additive_character_validation_and_measure():
    with pytest.raises(DomainError):
        AdditiveCharacter(0.0)
    with pytest.raises(DomainError):
        AdditiveCharacter(1.0, 2)
    assert STANDARD_PSI.self_dual_measure_factor == 1.0
    assert AdditiveCharacter(8 * np.pi).self_dual_measure_factor == pytest.approx(2.0)


def test_rescaled_character():
    psi = STANDARD_PSI.rescaled(-3.0)
    x = np.linspace(-2, 2, 9)
    assert np.allclose(psi(x), STANDARD_PSI(-3.0 * x))
    with pytest.raises(DomainError):
        STANDARD_PSI.rescaled(0.0)


@pytest.mark.parametrize("eps,z,want", [(0, 0, 1.0), (1, 0, -1.0), (0, 2, 9.0)])
def test_evaluate_mult_examples(eps, z, want):
    assert evaluate_mult(MultiplicativeCharacter(eps, z), -3.0) == pytest.approx(want, abs=1e-13)


def test_evaluate_mult_at_zero_is_domain_error():
    with pytest.raises(DomainError):
        evaluate_mult(MultiplicativeCharacter(0, 1.0), 0.0)


def test_character_field_validation():
    with pytest.raises(DomainError):
        MultiplicativeCharacter(2, 0)
    with pytest.raises(DomainError):
        MultiplicativeCharacter(1, 0, prime=3)


def test_inverse_and_unitarity_flags():
    chi = MultiplicativeCharacter(1, 0.3 + 2j)
    assert chi.inverse() == MultiplicativeCharacter(1, -0.3 - 2j)
    assert not chi.is_unitary
    assert MultiplicativeCharacter(0, 1.5j).is_unitary


def test_half_power_of_odd_character_refused():
    with pytest.raises(DomainError):
        MultiplicativeCharacter(1, 0.5j).power(0.5)
    assert MultiplicativeCharacter(1, 0.5j).power(2) == MultiplicativeCharacter(0, 1j)


@given(x=nonzero, t=st.floats(-10, 10), eps=st.integers(0, 1))
def test_unitary_modulus_one(x, t, eps):
    assert abs(abs(evaluate_mult(MultiplicativeCharacter(eps, 1j * t), x)) - 1) < 1e-12


@given(x=nonzero, re=st.floats(-3, 3), im=st.floats(-3, 3), eps=st.integers(0, 1))
def test_character_times_inverse(x, re, im, eps):
    chi = MultiplicativeCharacter(eps, complex(re, im))
    assert abs(evaluate_mult(chi, x) * evaluate_mult(chi.inverse(), x) - 1) < 1e-11


def test_padic_character_and_valuation():
    assert padic_valuation(12.0, 2) == 2
    assert padic_valuation(1 / 9, 3) == -2
    chi = MultiplicativeCharacter(0, 1.0, prime=2)
    assert evaluate_mult(chi, 8.0) == pytest.approx(1 / 8)


@pytest.mark.parametrize("a,want", [((1, 1), 1.0), ((4, 1), 4.0), ((2, 1, 0.5), 16.0)])
def test_modular_character_examples(a, want):
    assert modular_character_gln(a) == pytest.approx(want)


def test_modular_character_zero_entry():
    with pytest.raises(DomainError):
        modular_character_gln((1.0, 0.0))


@given(st.lists(nonzero, min_size=1, max_size=5))
def test_modular_character_reverse_inverts(a):
    assert modular_character_gln(a) * modular_character_gln(a[::-1]) == pytest.approx(1.0, rel=1e-9)


def test_log_grid_layout():
    g = LogGrid(2.0, 5)
    assert g.step == 1.0
    assert np.allclose(g.points[:5], np.exp([-2, -1, 0, 1, 2]))
    assert np.allclose(g.points[5:], -g.points[:5])
    assert np.all(g.points != 0)
    assert g.weights.sum() == pytest.approx(2 * 4.0)
    assert g.index(1.0) == 2 and g.index(-np.e) == 8
    assert not g.contains(1.5) and not g.contains(0.0)
    with pytest.raises(DomainError):
        g.index(1.5)
    with pytest.raises(DomainError):
        LogGrid(1.0, 1)


def test_log_grid_with_spacing():
    g = LogGrid.with_spacing(0.3, 1.0)
    assert g.step == pytest.approx(0.3)
    assert g.radius >= 1.0


def test_half_density_shape_and_sampler():
    grids = (LogGrid(1.0, 5), LogGrid(2.0, 3))
    f = TorusHalfDensity.from_function(lambda p: p[..., 0] * p[..., 1], grids)
    assert f.shape == (10, 6) and f.values().size == (2 * 5) * (2 * 3)
    m = mesh_points(grids)
    assert m.shape == (10, 6, 2)
    assert np.allclose(f.values(), m[..., 0] * m[..., 1])
    assert f.evaluate(np.array([[2.0, -3.0]]))[0] == pytest.approx(-6.0)
    with pytest.raises(DomainError):
        TorusHalfDensity(grids, np.zeros((3, 3)))
    with pytest.raises(DomainError):
        TorusHalfDensity(grids)


def test_lazy_half_density_and_combine():
    grids = (LogGrid(1.0, 5),)
    f = TorusHalfDensity.from_function(lambda p: np.exp(-np.log(np.abs(p[..., 0])) ** 2), grids, lazy=True)
    assert f.coefficients is None
    g = combine([(2.0, f), (-1.0, f)])
    assert np.allclose(g.evaluate(np.array([[0.5]])), f.evaluate(np.array([[0.5]])))
    z = TorusHalfDensity.zeros(grids)
    assert np.all((f + z).values() == f.values())
    with pytest.raises(DomainError):
        combine([(1.0, f), (1.0, TorusHalfDensity.zeros((LogGrid(2.0, 5),)))])


def test_interpolation_matches_smooth_function():
    grids = (LogGrid.with_spacing(0.05, 3.0),)

    def fn(p):
        t = np.log(np.abs(p[..., 0]))
        return np.exp(-t ** 2) * np.where(p[..., 0] > 0, 1.0, 2.0)

    f = TorusHalfDensity(grids, fn(mesh_points(grids)))
    q = np.array([[0.7], [-1.9], [2.3], [-0.4]])
    assert np.allclose(interpolate(f, q), fn(q), atol=1e-6)
    assert interpolate(f, np.array([[1e3]]))[0] == 0


def test_interpolation_two_axes():
    grids = (LogGrid.with_spacing(0.05, 2.0),) * 2

    def fn(p):
        return np.exp(-np.log(np.abs(p[..., 0])) ** 2 - np.log(np.abs(p[..., 1])) ** 2) * np.sign(p[..., 1])

    f = TorusHalfDensity(grids, fn(mesh_points(grids)))
    q = np.array([[0.7, -1.3], [-1.1, 0.9]])
    assert np.allclose(interpolate(f, q), fn(q), atol=1e-5)
