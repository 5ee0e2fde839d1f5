"""Kuznetsov orbital integrals of Gaussian wave packets on Mat_n.

For a torus point a the orbital integral is

    O_a(Phi) = int_{N x N} Phi(n1 w a n2) psi^{-1}(sum of superdiagonal entries of n1, n2) dn1 dn2

with Lebesgue measure in the strictly upper triangular coordinates. Returned
values are normalized as delta^{1/2}(a) O_a, the coefficient of the twisted
push-forward against the Haar half-density on the torus.

At n = 2 the Bruhat-cell matrix is [[x a1, x a1 y + a2], [a1, a1 y]]. It is
affine in x for fixed y, so the x-integral is a one-dimensional Gaussian
integral in closed form; the "reduced" mode integrates the remaining y-line
numerically, the "direct" mode runs the two-dimensional oscillatory
quadrature on (x, y).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .characters import (STANDARD_PSI, AdditiveCharacter, DomainError, LogGrid,
                         TorusHalfDensity, mesh_points, modular_character_gln)
from .conventions import ORBITAL_TWIST_SIGN, antidiagonal, superdiagonal_positions, unipotent_index
from .packets import GaussianWavePacket, affine_gaussian_integral, fourier_matn
from .quadrature import OscillatoryIntegrand, QuadratureSpec, QuadResult, oscillatory_integral


class SlowFlagRequired(DomainError):
    """The computation is only enabled behind the slow flag."""


def _check_point(phi: GaussianWavePacket, a) -> np.ndarray:
    a = np.asarray(a, dtype=float).ravel()
    n = len(a)
    if phi.dim != n * n:
        raise DomainError(f"packet on R^{phi.dim} does not live on Mat_{n}")
    if np.any(a == 0):
        raise DomainError("torus coordinates must be nonzero")
    return a


def unipotent(n: int, coords) -> np.ndarray:
    """Upper unitriangular matrices from strictly upper coordinates (row-major), batched."""
    coords = np.asarray(coords, dtype=float)
    out = np.broadcast_to(np.eye(n), coords.shape[:-1] + (n, n)).copy()
    for k, (i, j) in enumerate(unipotent_index(n)):
        out[..., i, j] = coords[..., k]
    return out


def bruhat_matrix(a, u1, u2) -> np.ndarray:
    """n1 w diag(a) n2 with n1, n2 given by coordinates, batched over leading axes."""
    a = np.asarray(a, dtype=float)
    n = len(a)
    wa = antidiagonal(n) @ np.diag(a)
    return unipotent(n, u1) @ wa @ unipotent(n, u2)


def twist_phase(n: int, u1, u2, psi: AdditiveCharacter):
    """psi^ORBITAL_TWIST_SIGN of the superdiagonal sums of (n1, n2)."""
    sup = superdiagonal_positions(n)
    s = np.sum(np.asarray(u1)[..., sup], axis=-1) + np.sum(np.asarray(u2)[..., sup], axis=-1)
    return psi.power(ORBITAL_TWIST_SIGN)(s)


# ---------------------------------------------------------------------------
# adaptive trapezoid on a line


def adaptive_line(fn, step: float, half_width: float, tol: float = 1e-12,
                  max_refine: int = 5, max_extend: int = 8) -> QuadResult:
    """Trapezoid sum of a vectorized analytic integrand over R on a symmetric grid.

    The range is doubled until the end samples are negligible, then the step
    is halved until the even-node sum agrees with the full sum. The error
    estimate is that agreement plus the end-sample mass.
    """
    L, h = float(half_width), float(step)
    for _ in range(max_extend):
        K = 2 * int(np.ceil(L / (2 * h)))
        v = fn(h * np.arange(-K, K + 1))
        peak = np.max(np.abs(v))
        ends = max(np.max(np.abs(v[:4])), np.max(np.abs(v[-4:])))
        if ends <= 1e-17 * max(peak, 1e-300):
            break
        L *= 2
    for _ in range(max_refine + 1):
        K = 2 * int(np.ceil(L / (2 * h)))
        v = fn(h * np.arange(-K, K + 1))
        full = h * np.sum(v)
        coarse = 2 * h * np.sum(v[::2])
        mag = h * np.sum(np.abs(v))
        diff = abs(full - coarse)
        if diff <= tol * max(mag, 1e-300):
            break
        h /= 2
    ends = max(np.max(np.abs(v[:4])), np.max(np.abs(v[-4:])))
    err = diff + ends * L + 1e-15 * mag
    return QuadResult(complex(full), float(err), bool(err > 1e-8 * max(abs(full), 1e-300)))


def _widths(phi: GaussianWavePacket):
    lam = np.linalg.eigvalsh(phi.L.real)
    return float(np.min(lam)), float(np.max(lam))


# ---------------------------------------------------------------------------
# n = 2


def _x_integral_n2(phi: GaussianWavePacket, a, y, sign: float, freq: float):
    """int Phi(M(x, y)) psi^sign(x) dx for an array of y values."""
    a1, a2 = a
    y = np.asarray(y, dtype=float)
    A = np.zeros(y.shape + (4, 1))
    A[..., 0, 0] = a1
    A[..., 1, 0] = a1 * y
    t = np.zeros(y.shape + (4,))
    t[..., 1] = a2
    t[..., 2] = a1
    t[..., 3] = a1 * y
    lin = np.full(y.shape + (1,), 1j * sign * freq)
    return affine_gaussian_integral(phi, A, t, lin)


def orbital_n2_reduced(phi: GaussianWavePacket, a, psi: AdditiveCharacter = STANDARD_PSI,
                       tol: float = 1e-12) -> QuadResult:
    """Undecorated O_a at n = 2: x in closed form, y by adaptive trapezoid."""
    a1, a2 = a
    sign = ORBITAL_TWIST_SIGN
    freq = psi.frequency
    lo, hi = _widths(phi)
    c = float(np.max(np.abs(phi.center))) if phi.dim else 0.0
    ratio = abs(a2 / a1)
    half = (7.0 / np.sqrt(lo) + c) / abs(a1) + 7.0 * np.sqrt(ratio) + 8.0
    step = min(0.1, 0.5 / (abs(freq) * (1 + ratio) + 1), 0.5 / (abs(a1) * np.sqrt(hi) + 1e-300))

    def fn(y):
        return _x_integral_n2(phi, (a1, a2), y, sign, freq) * np.exp(1j * sign * freq * y)

    return adaptive_line(fn, step, half, tol)


def _default_direct_spec(phi, a) -> QuadratureSpec:
    lo, _ = _widths(phi)
    c = float(np.max(np.abs(phi.center)))
    r = (4.5 / np.sqrt(lo) + c) / min(abs(a[0]), 1.0) + 4.0 * np.sqrt(abs(a[1] / a[0]))
    return QuadratureSpec(radius=r, width=r, nodes_per_axis=int(32 * np.ceil(r)), stages=2, tolerance=1e-6)


def orbital_n2_direct(phi: GaussianWavePacket, a, psi: AdditiveCharacter = STANDARD_PSI,
                      q: Optional[QuadratureSpec] = None) -> QuadResult:
    """Undecorated O_a at n = 2 by 2-D oscillatory quadrature in (x, y)."""
    a = np.asarray(a, dtype=float)
    q = _default_direct_spec(phi, a) if q is None else q

    def amp(p):
        x, y = p[:, 0], p[:, 1]
        m = np.stack([x * a[0], x * a[0] * y + a[1], np.full_like(x, a[0]), a[0] * y], axis=-1)
        return phi(m) * twist_phase(2, x[:, None], y[:, None], psi)

    return oscillatory_integral(OscillatoryIntegrand(amp, None, 2), q)


# ---------------------------------------------------------------------------
# public interface


def kuznetsov_orbital(phi: GaussianWavePacket, a, psi: AdditiveCharacter = STANDARD_PSI,
                      q: Optional[QuadratureSpec] = None, mode: str = "reduced",
                      slow: bool = False) -> QuadResult:
    """delta^{1/2}(a) O_a(Phi) with an error estimate; n in {1, 2}, n = 3 behind `slow`."""
    a = _check_point(phi, a)
    n = len(a)
    scale = np.sqrt(modular_character_gln(a))
    if phi.poly.is_zero():
        return QuadResult(0j, 0.0)
    if n == 1:
        return QuadResult(complex(phi(a[None, :])[0]), 0.0)
    if n == 2:
        if mode == "reduced":
            r = orbital_n2_reduced(phi, a, psi)
        elif mode == "direct":
            r = orbital_n2_direct(phi, a, psi, q)
        else:
            raise DomainError(f"unknown orbital mode {mode!r}")
    elif n == 3:
        if not slow:
            raise SlowFlagRequired("GL_3 orbital integrals need the slow flag")
        from .gl3 import twostep_orbital_n3

        r = twostep_orbital_n3(phi, a, psi, q)
    else:
        raise DomainError("orbital integrals are implemented for n <= 3")
    return QuadResult(scale * r.value, scale * r.error, r.flagged, (), r.message)


@dataclass(frozen=True)
class OrbitalHalfDensity(TorusHalfDensity):
    """Push-forward half-density of a packet, remembering the packet.

    side "primal": f(a) = |det a|^{n/2} delta^{1/2}(a) O_a(Phi, psi).
    side "dual":   f*(b) = |det b|^{-n/2} delta^{1/2}(b') O_{b'}(F Phi, psi^{-1}),
    b' = (1/b_n, ..., 1/b_1), which is the matrix-space side read through g -> g^{-1}.
    """

    packet: Optional[GaussianWavePacket] = None
    psi: AdditiveCharacter = STANDARD_PSI
    side: str = "primal"


def _point_values(phi, pts, psi, side, mode, slow):
    pts = np.asarray(pts, dtype=float)
    flat = pts.reshape(-1, pts.shape[-1])
    n = flat.shape[1]
    out = np.empty(len(flat), dtype=complex)
    if n == 1:
        x = flat[:, 0]
        if side == "primal":
            out[:] = np.abs(x) ** 0.5 * phi(flat)
        else:
            out[:] = np.abs(x) ** -0.5 * phi(1 / flat)
        return out.reshape(pts.shape[:-1])
    for k, p in enumerate(flat):
        det = abs(np.prod(p))
        if side == "primal":
            out[k] = det ** (n / 2) * kuznetsov_orbital(phi, p, psi, mode=mode, slow=slow).value
        else:
            bp = 1 / p[::-1]
            out[k] = det ** (-n / 2) * kuznetsov_orbital(phi, bp, psi.inverse(), mode=mode, slow=slow).value
    return out.reshape(pts.shape[:-1])


def orbital_half_density(phi: GaussianWavePacket, grids: Sequence[LogGrid], psi: AdditiveCharacter = STANDARD_PSI,
                         side: str = "primal", mode: str = "reduced", lazy: bool = True,
                         slow: bool = False) -> OrbitalHalfDensity:
    """The torus half-density of Phi (primal) or of its matrix Fourier transform (dual)."""
    if side not in ("primal", "dual"):
        raise DomainError("side must be 'primal' or 'dual'")
    grids = tuple(grids)
    n = len(grids)
    if phi.dim != n * n:
        raise DomainError("grid count does not match the packet dimension")
    src = phi if side == "primal" else fourier_matn(phi, n, psi)

    def sampler(p):
        return _point_values(src, p, psi, side, mode, slow)

    coeffs = None if lazy else sampler(mesh_points(grids))
    return OrbitalHalfDensity(grids, coeffs, sampler, (), phi, psi, side)
