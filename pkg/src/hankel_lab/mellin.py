"""Mellin pairings and multiplicative Fourier convolutions on signed log-grids.

A multiplicative Fourier convolution along one torus axis is

    g(a) = int phi(a_i x) |x|^kappa psi^sign(x) d^x x      (or phi(a_i / x))

The x-line is split by a smooth partition of unity blending over 1 <= |x| <= 4
(in units of the psi period). The inner piece is a trapezoid sum in t = log|x|, which handles
the |x|^kappa singularity and the slow decay towards 0. The outer piece is a
linear trapezoid sum multiplied by a smooth bump at radii R, 2R, 4R, which
turns conditionally convergent oscillatory tails into absolutely convergent
ones. Both pieces vanish to all orders at their ends, so the trapezoid sums
converge spectrally.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .characters import (STANDARD_PSI, AdditiveCharacter, DomainError,
                         MultiplicativeCharacter, TorusHalfDensity, mesh_points)
from .quadrature import QuadratureSpec, bump, smooth_step

FAR_DEFAULT = QuadratureSpec(radius=24.0, width=24.0, nodes_per_axis=3072, stages=3, tolerance=1e-8)


@dataclass(frozen=True)
class MellinResult:
    value: complex
    boundary_mass: float
    flagged: bool


def mellin_numeric(f: TorusHalfDensity, chi: MultiplicativeCharacter, full: bool = False,
                   tolerance: float = 1e-8):
    """int f(x) chi^{-1}(x) d^x x as a trapezoid sum over the grid of a one-axis half-density.

    The boundary mass is the largest integrand modulus at the four sheet ends;
    it is flagged when it exceeds `tolerance` times the sum of moduli, which is
    what happens when Re z leaves the strip resolved by the grid.
    """
    if f.n != 1:
        raise DomainError("mellin_numeric takes a one-axis half-density")
    g = f.grids[0]
    x = g.points
    vals = f.values() * chi.inverse()(x)
    terms = g.weights * vals
    value = complex(np.sum(terms))
    ends = np.abs(vals[[0, g.nodes - 1, g.nodes, 2 * g.nodes - 1]])
    mass = float(np.max(ends))
    flagged = bool(mass > tolerance * max(np.sum(np.abs(terms)), 1e-300))
    if full:
        return MellinResult(value, mass, flagged)
    return value


@dataclass(frozen=True)
class ConvolutionSpec:
    """Kernel |x|^kappa psi^psi_sign(x) d^x x and quadrature budget.

    ``far`` fixes the outer linear sum: radius/width of the first cutoff stage,
    node count over [-(R + w), R + w] (so the spacing is 2 (R + w) / nodes) and
    the number of doubling stages. Lengths are in units of the psi period.
    """

    kappa: complex = 0.5
    psi_sign: int = -1
    reciprocal: bool = False
    far: QuadratureSpec = FAR_DEFAULT
    log_step: float = 0.01
    near_depth: float = 40.0
    split: float = 1.0
    blend: float = 3.0
    chunk: int = 400_000

    def __post_init__(self):
        if self.psi_sign not in (1, -1):
            raise DomainError("psi_sign must be +1 or -1")
        if min(self.log_step, self.near_depth, self.split, self.blend) <= 0:
            raise DomainError("log_step, near_depth, split and blend must be positive")


@dataclass(frozen=True)
class ConvolutionResult:
    values: np.ndarray
    errors: np.ndarray
    tolerance: float

    @property
    def flagged(self) -> np.ndarray:
        return self.errors > self.tolerance * np.maximum(1.0, np.abs(self.values))


@dataclass(frozen=True)
class _Nodes:
    near_t: np.ndarray
    near_w: np.ndarray          # includes h, partition weight, |x|^kappa
    far_x: np.ndarray
    far_w: np.ndarray           # (stages, M): h, 1 - partition, bump, |x|^(kappa - 1)
    coarse_near: np.ndarray     # boolean masks for half-resolution sums
    coarse_far: np.ndarray


def _nodes(spec: ConvolutionSpec) -> _Nodes:
    x0 = spec.split
    h = spec.log_step
    x1 = x0 + spec.blend
    top = np.log(x1)
    J = int(np.ceil((spec.near_depth + top - np.log(x0)) / h))
    t = top - h * np.arange(J + 1)
    beta = smooth_step((np.exp(t) - x0) / spec.blend)
    kap = complex(spec.kappa)
    near_w = h * beta * np.exp(kap * t)
    near_w[-1] *= 0.5
    q = spec.far
    last = 2 ** (q.stages - 1)
    L = (q.radius + q.width) * last
    step = 2 * (q.radius + q.width) / q.axis_nodes(1)[0]
    M = int(np.ceil((L - x0) / step)) + 1
    x = x0 + step * np.arange(M)
    part = 1 - smooth_step((x - x0) / spec.blend)
    far_w = np.empty((q.stages, M), dtype=complex)
    for s in range(q.stages):
        sc = 2 ** s
        far_w[s] = step * part * bump(x, q.radius * sc, q.width * sc) * x ** (kap - 1)
    return _Nodes(t, near_w, x, far_w, np.arange(J + 1) % 2 == 0, np.arange(M) % 2 == 0)


def convolve_points(phi: Callable[[np.ndarray], np.ndarray], points, axis: int = 0,
                    spec: ConvolutionSpec = ConvolutionSpec(),
                    psi: AdditiveCharacter = STANDARD_PSI) -> ConvolutionResult:
    """g(a) = int phi(a with a_axis -> a_axis x or a_axis / x) |x|^kappa psi^sign(x) d^x x.

    `phi` maps arrays of shape (..., n) to values of shape (...); `points` has
    shape (B, n). The summation order is fixed, so results are reproducible.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    B, n = pts.shape
    if np.any(pts[:, axis] == 0):
        raise DomainError("torus coordinates must be nonzero")
    k = spec.psi_sign * psi.frequency
    scale = 2 * np.pi / abs(k)
    sgn = 1.0 if k > 0 else -1.0
    nd = _nodes(spec)
    near_x = np.exp(nd.near_t)
    # both sheets of x: columns [+ near, - near, + far, - far]
    xs = np.concatenate([near_x, -near_x, nd.far_x, -nd.far_x])
    osc = np.exp(2j * np.pi * sgn * xs)
    Jn, Mf = len(near_x), len(nd.far_x)
    a = pts[:, axis] * (1 / scale if spec.reciprocal else scale)
    pref = scale ** complex(spec.kappa)
    values = np.empty(B, dtype=complex)
    errors = np.empty(B)
    per = max(1, spec.chunk // len(xs))
    for start in range(0, B, per):
        sl = slice(start, min(B, start + per))
        arg = a[sl, None] / xs[None, :] if spec.reciprocal else a[sl, None] * xs[None, :]
        full = np.repeat(pts[sl, None, :], len(xs), axis=1)
        full[..., axis] = arg
        vals = np.asarray(phi(full), dtype=complex) * osc[None, :]
        if not np.all(np.isfinite(vals)):
            raise DomainError("non-finite samples in multiplicative convolution")
        vn = vals[:, :Jn] + vals[:, Jn:2 * Jn]
        vf = vals[:, 2 * Jn:2 * Jn + Mf] + vals[:, 2 * Jn + Mf:]
        near = vn @ nd.near_w
        near_c = 2 * (vn[:, nd.coarse_near] @ nd.near_w[nd.coarse_near])
        stages = vf @ nd.far_w.T
        far_c = 2 * (vf[:, nd.coarse_far] @ nd.far_w[-1][nd.coarse_far])
        far = stages[:, -1]
        stage_err = np.abs(stages[:, -1] - stages[:, -2]) if stages.shape[1] > 1 else 0.0
        lost = np.abs(vn[:, -1] * nd.near_w[-1]) * 2
        mag = np.abs(vn) @ np.abs(nd.near_w) + np.abs(vf) @ np.abs(nd.far_w[-1])
        err = (np.abs(near - near_c) + np.maximum(stage_err, np.abs(far - far_c)) + lost
               + 1e-15 * mag)
        values[sl] = pref * (near + far)
        errors[sl] = abs(pref) * err
    return ConvolutionResult(values, errors, spec.far.tolerance)


def mult_fourier_convolution(f: TorusHalfDensity, axis: int = 0, spec: ConvolutionSpec = ConvolutionSpec(),
                             psi: AdditiveCharacter = STANDARD_PSI, lazy: bool = False) -> TorusHalfDensity:
    """The convolution of `convolve_points` as a half-density on the grid of f.

    The default kernel |x|^{1/2} psi^{-1}(x) d^x x is the one-axis Fourier
    convolution used by the Hankel transform. Eager results carry a flag
    counting nodes whose error estimate exceeds the tolerance.
    """
    if not 0 <= axis < f.n:
        raise DomainError("axis out of range")

    def sampler(p):
        p = np.asarray(p, dtype=float)
        flat = p.reshape(-1, p.shape[-1])
        return convolve_points(f.evaluate, flat, axis, spec, psi).values.reshape(p.shape[:-1])

    if lazy:
        return TorusHalfDensity(f.grids, None, sampler, f.flags)
    mesh = mesh_points(f.grids)
    res = convolve_points(f.evaluate, mesh.reshape(-1, f.n), axis, spec, psi)
    flags = f.flags
    bad = int(np.count_nonzero(res.flagged))
    if bad:
        flags = flags + (f"accuracy-loss:{bad}",)
    return TorusHalfDensity(f.grids, res.values.reshape(f.shape), sampler, flags)


def kernel_multiplier(chi: MultiplicativeCharacter, kappa, psi_sign: int = 1, reciprocal: bool = False,
                      psi: AdditiveCharacter = STANDARD_PSI):
    """Closed-form Mellin multiplier of the kernel |x|^kappa psi^sign(x) d^x x at chi.

    For phi(a x) the multiplier is int |x|^kappa psi^sign(x) chi(x) d^x x, for
    phi(a / x) it is the same integral at chi^{-1}; both are
    K(eta, u) = eta(-1) gamma(eta^{-1}, 1 - u, psi^sign) with eta |.|^u the
    total character (divided by the self-dual measure factor of psi).
    """
    from .gamma import GammaPole, gamma_real

    eta = chi.inverse() if reciprocal else chi
    eta = MultiplicativeCharacter(eta.parity, eta.z + complex(kappa))
    kern = psi.power(psi_sign)
    g = gamma_real(MultiplicativeCharacter(eta.parity, 0), 1 - eta.z, kern)
    if isinstance(g, GammaPole):
        return g
    # gamma uses the self-dual measure, the kernel uses d^x x
    return (-1) ** eta.parity * g / kern.self_dual_measure_factor
