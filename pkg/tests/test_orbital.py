import numpy as np
import pytest

from hankel_lab.characters import STANDARD_PSI, DomainError, LogGrid
from hankel_lab.orbital import (SlowFlagRequired, adaptive_line, bruhat_matrix, kuznetsov_orbital,
                                orbital_half_density, orbital_n2_direct, orbital_n2_reduced, unipotent)
from hankel_lab.packets import GaussianWavePacket, SparsePoly
from hankel_lab.quadrature import QuadratureSpec

STD2 = GaussianWavePacket.standard(4)


def zero_packet(d):
    return GaussianWavePacket.create(d, poly=SparsePoly.constant(d, 0.0))


def test_bruhat_matrix_n2():
    a1, a2, x, y = 1.5, -0.7, 0.3, -1.2
    m = bruhat_matrix((a1, a2), [x], [y])
    assert np.allclose(m, [[x * a1, x * a1 * y + a2], [a1, a1 * y]])
    assert np.allclose(unipotent(3, [1.0, 2.0, 3.0]), [[1, 1, 2], [0, 1, 3], [0, 0, 1]])


def test_n1_is_point_evaluation():
    phi = GaussianWavePacket.create(1, center=[0.3], phase=[0.2])
    for a in (-2.0, 0.5, 1.7):
        assert kuznetsov_orbital(phi, [a]).value == phi(np.array([[a]]))[0]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_zero_packet_gives_zero(n):
    assert kuznetsov_orbital(zero_packet(n * n), np.ones(n)).value == 0


def test_domain_errors():
    with pytest.raises(DomainError):
        kuznetsov_orbital(STD2, (1.0, 0.0))
    with pytest.raises(DomainError):
        kuznetsov_orbital(STD2, (1.0, 1.0, 1.0))
    with pytest.raises(SlowFlagRequired):
        kuznetsov_orbital(GaussianWavePacket.standard(9), (1.0, 1.0, 1.0))
    with pytest.raises(DomainError):
        kuznetsov_orbital(GaussianWavePacket.standard(16), np.ones(4))
    with pytest.raises(DomainError):
        kuznetsov_orbital(STD2, (1.0, 1.0), mode="nope")
    with pytest.raises(DomainError):
        orbital_half_density(STD2, [LogGrid(1.0, 4)] * 2, side="left")
    with pytest.raises(DomainError):
        orbital_half_density(STD2, [LogGrid(1.0, 4)])


def test_adaptive_line_gaussian():
    r = adaptive_line(lambda y: np.exp(-np.pi * y ** 2 + 2j * np.pi * y), 0.5, 2.0)
    assert abs(r.value - np.exp(-np.pi)) < 1e-14 and not r.flagged


def test_n2_two_resolutions_agree():
    reduced = orbital_n2_reduced(STD2, (1.0, 1.0))
    direct = orbital_n2_direct(STD2, (1.0, 1.0))
    doubled = orbital_n2_direct(STD2, (1.0, 1.0), q=QuadratureSpec(radius=14.0, width=14.0, nodes_per_axis=896,
                                                                     stages=2))
    assert abs(direct.value - doubled.value) <= 1e-4
    assert abs(reduced.value - doubled.value) <= 1e-4
    assert reduced.error < 1e-8


def test_n2_modular_normalization():
    a = (2.0, 0.5)
    raw = orbital_n2_reduced(STD2, a).value
    assert abs(kuznetsov_orbital(STD2, a).value - np.sqrt(4.0) * raw) < 1e-14


def test_n2_equivariance():
    rng = np.random.default_rng(4)
    phi = GaussianWavePacket.create(4, center=rng.normal(size=4) * 0.2, phase=rng.normal(size=4) * 0.2)
    a = (1.3, -0.8)
    base = kuznetsov_orbital(phi, a).value
    for _ in range(5):
        s, t = rng.normal(size=2)
        u, v = unipotent(2, [s]), unipotent(2, [t])
        # Phi'(g) = Phi(u g v) in row-major coordinates
        moved = phi.pullback(np.kron(u, v.T), np.zeros(4))
        want = STANDARD_PSI(s + t) * base
        assert abs(kuznetsov_orbital(moved, a).value - want) <= 1e-8 * abs(base)


def test_half_density_sides():
    phi = GaussianWavePacket.create(1, center=[0.2])
    g = [LogGrid(1.0, 5)]
    f = orbital_half_density(phi, g)
    x = g[0].points
    assert np.allclose(f.values(), np.sqrt(np.abs(x)) * phi(x[:, None]))
    fd = orbital_half_density(phi, g, side="dual")
    assert np.allclose(fd.values(), np.abs(x) ** -0.5 * phi.fourier()(1 / x[:, None]))
