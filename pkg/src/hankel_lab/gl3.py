"""GL_3 Kuznetsov orbital integrals (slow path).

Unipotent coordinates are ordered (12, 13, 23) for both n_1 and n_2. Writing
n_1 = u_1 n'_1 and n_2 = n'_2 u_2, with u_1 in the last-column group, n'_1 the
upper-left GL_2 unipotent, n'_2 the lower-right one and u_2 the first-row
group, gives

    O_a(Phi) = int_{n'_1, n'_2} Phi_1(n'_1 w diag(a_2, a_3) n'_2) psi^{-1}(...)

with Phi_1 the integral over (u_1, u_2). For fixed (x_12; y_12, y_13) the
matrix n_1 w a n_2 is affine in the remaining coordinates (x_13, x_23, y_23),
so that part of the six-dimensional integral is Gaussian in closed form and the
two-step evaluation is a three-dimensional trapezoid sum. The direct path is a
six-dimensional tensor trapezoid sum at two resolutions.
"""
from __future__ import annotations

import itertools
from typing import Optional

import numpy as np

from .characters import STANDARD_PSI, AdditiveCharacter, DomainError
from .conventions import ORBITAL_TWIST_SIGN
from .packets import GaussianWavePacket, affine_gaussian_integral
from .quadrature import QuadratureSpec, QuadResult


def _bruhat3(a, u, v):
    from .orbital import bruhat_matrix

    return bruhat_matrix(a, u, v)


def _inner_closed_form(phi: GaussianWavePacket, a, x12, y12, y13, freq: float):
    """int Phi(n_1 w a n_2) psi^{-1}(x_23 + y_23) dx_13 dx_23 dy_23 for arrays of (x12, y12, y13)."""
    sh = np.shape(x12)

    def M(x13, x23, y23):
        u = np.stack(np.broadcast_arrays(x12, np.full(sh, x13), np.full(sh, x23)), -1)
        v = np.stack(np.broadcast_arrays(y12, y13, np.full(sh, y23)), -1)
        return _bruhat3(a, u, v).reshape(sh + (9,))

    t = M(0.0, 0.0, 0.0)
    A = np.stack([M(1.0, 0.0, 0.0) - t, M(0.0, 1.0, 0.0) - t, M(0.0, 0.0, 1.0) - t], -1)
    lin = np.zeros(sh + (3,), complex)
    lin[..., 1] = lin[..., 2] = 1j * ORBITAL_TWIST_SIGN * freq
    return affine_gaussian_integral(phi, A, t, lin)


def _twostep_sum(phi, a, psi, h, half):
    freq = psi.frequency
    g = h * np.arange(-int(np.ceil(half / h)), int(np.ceil(half / h)) + 1)
    Y12, Y13 = np.meshgrid(g, g, indexing="ij")
    total = 0j
    ends = 0.0
    for x in g:
        X = np.full(Y12.shape, x)
        vals = _inner_closed_form(phi, a, X, Y12, Y13, freq) * np.exp(1j * ORBITAL_TWIST_SIGN * freq * (X + Y12))
        total += np.sum(vals)
        face = np.abs(vals) if x in (g[0], g[-1]) else np.abs(np.concatenate([vals[[0, -1]].ravel(),
                                                                              vals[:, [0, -1]].ravel()]))
        ends = max(ends, float(np.max(face)))
    return h ** 3 * total, ends


def twostep_orbital_n3(phi: GaussianWavePacket, a, psi: AdditiveCharacter = STANDARD_PSI,
                       q: Optional[QuadratureSpec] = None) -> QuadResult:
    """Undecorated O_a at n = 3: three coordinates in closed form, three by trapezoid sums.

    `q.radius` sets the half-width of the trapezoid box (default from the packet
    widths); the error estimate compares steps 0.3 and 0.2 and adds the
    boundary mass.
    """
    a = np.asarray(a, dtype=float)
    if len(a) != 3 or phi.dim != 9:
        raise DomainError("twostep_orbital_n3 takes a packet on Mat_3 and a point of the 3-torus")
    if np.any(a == 0):
        raise DomainError("torus coordinates must be nonzero")
    if phi.poly.is_zero():
        return QuadResult(0j, 0.0)
    lo = float(np.min(np.linalg.eigvalsh(phi.L.real)))
    c = float(np.max(np.abs(phi.center)))
    scale = max(1.0, 1.0 / np.min(np.abs(a)))
    half = q.radius if q is not None else (7.0 / np.sqrt(lo) + c) * np.sqrt(scale) + 1.0
    coarse, _ = _twostep_sum(phi, a, psi, 0.3, half)
    fine, ends = _twostep_sum(phi, a, psi, 0.2, half)
    err = abs(fine - coarse) + ends * (2 * half) ** 3 + 1e-14 * abs(fine)
    return QuadResult(complex(fine), float(err), bool(err > 1e-3 * abs(fine)), (coarse, fine))


def _direct_sum(phi, a, psi, h, half):
    g = h * np.arange(-int(np.ceil(half / h)), int(np.ceil(half / h)) + 1)
    G4 = np.stack(np.meshgrid(g, g, g, g, indexing="ij"), -1).reshape(-1, 4)
    freq = psi.frequency
    total = 0j
    for x, y in itertools.product(g, g):
        u = np.column_stack([np.full(len(G4), x), G4[:, 0], G4[:, 1]])
        v = np.column_stack([np.full(len(G4), y), G4[:, 2], G4[:, 3]])
        m = _bruhat3(a, u, v).reshape(-1, 9)
        ph = np.exp(1j * ORBITAL_TWIST_SIGN * freq * (u[:, 0] + u[:, 2] + v[:, 0] + v[:, 2]))
        total += np.sum(phi(m) * ph)
    return h ** 6 * total


def direct_orbital_n3(phi: GaussianWavePacket, a, psi: AdditiveCharacter = STANDARD_PSI,
                      half: float = 3.3, steps=(0.3, 0.25)) -> QuadResult:
    """Undecorated O_a at n = 3 by six-dimensional trapezoid sums (minutes of runtime)."""
    a = np.asarray(a, dtype=float)
    if np.any(a == 0):
        raise DomainError("torus coordinates must be nonzero")
    vals = [_direct_sum(phi, a, psi, h, half) for h in steps]
    err = abs(vals[-1] - vals[0]) + 1e-14 * abs(vals[-1])
    return QuadResult(complex(vals[-1]), float(err), False, tuple(vals))


def gl3_checks(cfg):
    """Slow suite: two-step against direct quadrature at a = (1, 1, 1)."""
    from .report import Timer, compare

    phi = GaussianWavePacket.standard(9)
    a = (1.0, 1.0, 1.0)
    with Timer() as t1:
        two = twostep_orbital_n3(phi, a)
    with Timer() as t2:
        direct = direct_orbital_n3(phi, a)
    rec = compare("hankel.n3.twostep_vs_direct.a=(1,1,1)", {"twostep_error": two.error,
                                                              "direct_error": direct.error},
                  two.value, direct.value, 1e-2, runtime_ms=t1.ms + t2.ms)
    return [rec], {}
