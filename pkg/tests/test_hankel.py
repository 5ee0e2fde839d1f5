import numpy as np
import pytest

from hankel_lab.characters import DomainError, LogGrid, TorusHalfDensity
from hankel_lab.hankel import (direct_first_step, fused_first_step, hankel_direct, hankel_points, hankel_std,
                               verify_commuting_square)
from hankel_lab.orbital import orbital_half_density
from hankel_lab.packets import GaussianWavePacket, SparsePoly

PHI1 = GaussianWavePacket.create(1, center=[0.2], phase=[0.1])
PHI2 = GaussianWavePacket.create(4, center=[0.1, 0.2, -0.1, 0.3], phase=[0.2, 0.0, 0.1, -0.3])


def zero_packet(d):
    return GaussianWavePacket.create(d, poly=SparsePoly.constant(d, 0.0))


@pytest.mark.parametrize("a1,b2", [(1.0, 1.0), (0.7, -1.4), (-2.0, 0.5)])
def test_fused_first_step_matches_numeric_y(a1, b2):
    fused = fused_first_step(PHI2, np.array(a1), b2)
    direct = direct_first_step(PHI2, a1, b2)
    assert abs(fused - direct.value) <= 1e-12 * abs(direct.value) + direct.error


def test_n1_commuting_square():
    pts = np.array([[0.5], [-0.5], [1.0], [-1.3], [2.0], [-2.5]])
    for sq in verify_commuting_square(PHI1, pts, 1):
        assert sq.abs_error <= 1e-4 and not sq.inconclusive


def test_n1_direct_matches_chain():
    f = orbital_half_density(PHI1, [LogGrid.with_spacing(0.05, 4.0)])
    pts = np.array([[0.8], [-1.5]])
    chain = hankel_points(f, pts).values
    direct = hankel_points(f, pts, mode="direct").values
    assert np.max(np.abs(chain - direct)) <= 1e-6


def test_zero_input_gives_zero():
    g = LogGrid.with_spacing(0.1, 3.0)
    out = hankel_points(TorusHalfDensity.zeros((g,)), np.array([[1.0], [-0.4]]))
    assert np.all(out.values == 0)
    for sq in verify_commuting_square(zero_packet(1), [[1.0]], 1):
        assert sq.lhs == 0 and sq.rhs == 0
    assert hankel_direct(zero_packet(4), (1.0, 1.0)).value == 0


def test_n2_direct_point():
    sq = verify_commuting_square(PHI2, [[1.0, 1.0]], 2, mode="direct")[0]
    assert sq.rel_error <= 1e-3


def test_domain_errors():
    g = LogGrid.with_spacing(0.1, 3.0)
    f = orbital_half_density(PHI1, [g])
    with pytest.raises(DomainError):
        hankel_points(f, np.array([[1.0, 1.0]]))
    with pytest.raises(DomainError):
        hankel_points(f, np.array([[1.0]]), mode="nope")
    with pytest.raises(DomainError):
        hankel_points(TorusHalfDensity.zeros((g,)), np.array([[1.0]]), mode="direct")
    with pytest.raises(DomainError):
        hankel_points(orbital_half_density(PHI1, [g], side="dual"), np.array([[1.0]]), mode="direct")
    with pytest.raises(DomainError):
        hankel_direct(PHI2, (1.0, 0.0))
    with pytest.raises(DomainError):
        hankel_direct(PHI2, (1.0,))
    with pytest.raises(DomainError):
        hankel_direct(GaussianWavePacket.standard(9), (1.0, 1.0, 1.0))


def test_square_refused_beyond_gl2():
    with pytest.raises(NotImplementedError):
        verify_commuting_square(GaussianWavePacket.standard(9), [[1.0, 1.0, 1.0]], 3)


def test_hankel_std_lazy_and_eager_agree():
    f = orbital_half_density(PHI1, [LogGrid.with_spacing(0.05, 4.0)])
    f = TorusHalfDensity(f.grids, f.values())
    pts = np.array([[0.7], [-1.1]])
    assert np.allclose(hankel_std(f).evaluate(pts), hankel_points(f, pts).values)
    coarse = TorusHalfDensity.from_function(f.evaluate, (LogGrid.with_spacing(0.5, 1.0),))
    eager = hankel_std(coarse, lazy=False)
    lazy = hankel_std(coarse)
    assert np.allclose(eager.values(), lazy.values())
