"""Numerical Tate zeta integrals Z(phi, chi, s) = int phi(x) chi(x) |x|^s d^x x.

This is the convention oracle for the closed-form gamma factors. Near 0 the test
function is replaced by its Taylor jet, whose contribution is integrated in
closed form; this both continues Z analytically to Re(s + z) <= 0 and avoids
the slowly decaying log-coordinate tail when Re(s + z) is small.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .characters import DomainError, MultiplicativeCharacter
from .packets import GaussianWavePacket
from .quadrature import QuadResult, gauss_legendre_panels


@dataclass(frozen=True)
class TateZetaSpec:
    phi: GaussianWavePacket
    chi: MultiplicativeCharacter
    s: complex
    jet_degree: int = 14
    jet_radius: float = 0.05
    panel: float = 0.25
    order: int = 24


def _taylor_coefficients(phi: GaussianWavePacket, degree: int):
    out = []
    d = phi
    zero = np.zeros((1, 1))
    for j in range(degree + 2):
        out.append(complex(d(zero)[0]) / factorial(j))
        d = d.derivative(0)
    return out


def _outer_limit(phi: GaussianWavePacket) -> float:
    lam = float(np.min(np.linalg.eigvalsh(phi.L.real)))
    c = abs(float(np.atleast_1d(phi.center)[0]))
    scale = max((abs(v) for v in phi.poly.terms.values()), default=1.0)
    deg = phi.poly.degree
    r = c + np.sqrt((60.0 + np.log1p(scale) + 2.0 * deg) / lam)
    return max(r, 2.0)


def _sum_outer(phi, parity, u, lo, hi, panel, order):
    t, w = gauss_legendre_panels(lo, hi, panel, order)
    x = np.exp(t)
    pos = phi(x[:, None])
    neg = phi(-x[:, None])
    sgn = -1.0 if parity else 1.0
    return np.sum(w * (pos + sgn * neg) * np.exp(u * t))


def tate_zeta_numeric(spec: TateZetaSpec) -> QuadResult:
    """Value and error estimate of Z(phi, chi, s) for a one-variable packet."""
    phi, chi = spec.phi, spec.chi
    if phi.dim != 1:
        raise DomainError("Tate integrals take one-variable test functions")
    if chi.prime is not None:
        raise DomainError("only the real place is integrated numerically")
    u = complex(spec.s) + chi.z
    eps = chi.parity
    if all(v == 0 for v in phi.poly.terms.values()):
        return QuadResult(0j, 0.0)
    delta = spec.jet_radius
    coeffs = _taylor_coefficients(phi, spec.jet_degree)
    jet = 0j
    for j, c in enumerate(coeffs[:-1]):
        if (j + eps) % 2:
            continue
        if c == 0:
            continue
        if abs(u + j) < 1e-12:
            return QuadResult(complex(np.inf), np.inf, True, message=f"pole at u = {-j}")
        jet += 2 * c * delta ** (j + u) / (j + u)
    # first neglected jet term bounds the remainder on |x| <= delta
    nxt = spec.jet_degree + 1
    rem = 2 * abs(coeffs[-1]) * delta ** (nxt + u.real) / max(abs(nxt + u), 1e-300)
    hi = np.log(_outer_limit(phi))
    lo = np.log(delta)
    outer = _sum_outer(phi, eps, u, lo, hi, spec.panel, spec.order)
    coarse = _sum_outer(phi, eps, u, lo, hi, spec.panel, max(8, spec.order * 2 // 3))
    value = jet + outer
    err = max(abs(outer - coarse), rem, 1e-15 * (abs(jet) + abs(outer)))
    return QuadResult(complex(value), float(err), bool(err > 1e-8 * max(1.0, abs(value))))


def zeta_ratio(phi: GaussianWavePacket, chi: MultiplicativeCharacter, s, psi=None) -> complex:
    """Z(1-s, chi^-1, F phi) / Z(s, chi, phi): the oracle value of gamma(chi, s, psi)."""
    from .characters import STANDARD_PSI

    psi = STANDARD_PSI if psi is None else psi
    phihat = phi.fourier(psi)
    num = tate_zeta_numeric(TateZetaSpec(phihat, chi.inverse(), 1 - complex(s)))
    den = tate_zeta_numeric(TateZetaSpec(phi, chi, complex(s)))
    return num.value / den.value
