"""Oscillatory quadrature with smooth cutoffs and radius extrapolation.

Every integral here is a uniform trapezoid sum of an integrand multiplied by a
C-infinity bump that equals 1 on |x| <= R and vanishes for |x| >= R + w. The sum
is repeated at radii R, 2R, 4R (the width and node count scale with the
radius so the spacing is fixed) and the error estimate combines the stage
disagreement, a half-resolution comparison and a rounding floor.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence, Union

import numpy as np


class QuadratureError(RuntimeError):
    """Non-finite integrand values."""


@dataclass(frozen=True)
class QuadratureSpec:
    radius: float = 6.0
    width: Optional[float] = None          # transition width; defaults to the radius
    nodes_per_axis: Union[int, Sequence[int]] = 256
    stages: int = 3
    tolerance: float = 1e-8

    def __post_init__(self):
        w = self.radius if self.width is None else self.width
        object.__setattr__(self, "width", float(w))
        nodes = self.nodes_per_axis
        if np.ndim(nodes) == 0:
            ok = int(nodes) >= 16
        else:
            ok = all(int(k) >= 16 for k in nodes)
        if self.radius <= 0 or self.width <= 0 or not ok or self.tolerance <= 0 or self.stages < 1:
            raise ValueError("QuadratureSpec needs R > 0, w > 0, nodes >= 16, tolerance > 0, stages >= 1")

    def axis_nodes(self, k: int):
        if np.ndim(self.nodes_per_axis) == 0:
            return [int(self.nodes_per_axis)] * k
        nodes = [int(v) for v in self.nodes_per_axis]
        if len(nodes) != k:
            raise ValueError("per-axis node list has the wrong length")
        return nodes

    def updated(self, **kw) -> "QuadratureSpec":
        return replace(self, **kw)


@dataclass(frozen=True)
class OscillatoryIntegrand:
    """amplitude(x) * exp(i phase(x)); callables take arrays of shape (M, k)."""

    amplitude: Callable[[np.ndarray], np.ndarray]
    phase: Optional[Callable[[np.ndarray], np.ndarray]] = None
    dim: int = 1


@dataclass(frozen=True)
class QuadResult:
    value: complex
    error: float
    flagged: bool = False
    stage_values: tuple = ()
    message: str = ""

    def __complex__(self):
        return complex(self.value)


def smooth_step(t):
    """C-infinity step: 1 for t <= 0, 0 for t >= 1."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(t < 1, np.exp(-1.0 / np.maximum(1 - t, 1e-300)), 0.0)
        b = np.where(t > 0, np.exp(-1.0 / np.maximum(t, 1e-300)), 0.0)
    return a / (a + b)


def bump(x, radius: float, width: float):
    """1 on |x| <= radius, 0 on |x| >= radius + width, smooth in between."""
    return smooth_step((np.abs(x) - radius) / width)


def _axis(radius, width, nodes):
    L = radius + width
    x = np.linspace(-L, L, nodes + 1)
    return x, x[1] - x[0]


def _trapezoid_tensor(f: OscillatoryIntegrand, axes, cut, chunk=2_000_000):
    """Trapezoid sum over a tensor grid; returns (full sum, even-subgrid sum, abs sum)."""
    k = len(axes)
    shape = [len(a) for a in axes]
    h = np.prod([a[1] - a[0] for a in axes])
    weights = [c.copy() for c in cut]
    total = 0j
    coarse = 0j
    mag = 0.0
    # iterate over the first axis in blocks, the rest vectorized
    inner = int(np.prod(shape[1:])) if k > 1 else 1
    block = max(1, chunk // max(inner, 1))
    rest = np.meshgrid(*axes[1:], indexing="ij") if k > 1 else []
    rest_flat = [r.ravel() for r in rest]
    rest_w = np.ones(inner)
    rest_even = np.ones(inner, dtype=bool)
    if k > 1:
        wmesh = np.meshgrid(*weights[1:], indexing="ij")
        rest_w = np.prod([wm.ravel() for wm in wmesh], axis=0)
        emesh = np.meshgrid(*[np.arange(len(a)) % 2 == 0 for a in axes[1:]], indexing="ij")
        rest_even = np.all([e.ravel() for e in emesh], axis=0)
    idx0 = np.arange(shape[0])
    for start in range(0, shape[0], block):
        sl = idx0[start:start + block]
        w0 = weights[0][sl]
        keep = w0 != 0
        if not np.any(keep):
            continue
        sl = sl[keep]
        w0 = w0[keep]
        x0 = np.repeat(axes[0][sl], inner)
        pts = np.column_stack([x0] + [np.tile(r, len(sl)) for r in rest_flat]) if k > 1 else x0[:, None]
        wts = np.repeat(w0, inner) * np.tile(rest_w, len(sl))
        nz = wts != 0
        pts = pts[nz]
        amp = np.asarray(f.amplitude(pts), dtype=complex)
        if not np.all(np.isfinite(amp)):
            bad = pts[~np.isfinite(amp)][0]
            raise QuadratureError(f"non-finite amplitude at {bad}")
        if f.phase is not None:
            amp = amp * np.exp(1j * np.asarray(f.phase(pts), dtype=float))
        vals = amp * wts[nz]
        total += vals.sum()
        mag += np.abs(vals).sum()
        even = (np.repeat(sl % 2 == 0, inner) & np.tile(rest_even, len(sl)))[nz]
        coarse += vals[even].sum()
    return total * h, coarse * h * 2 ** k, mag * h


def oscillatory_integral(f: OscillatoryIntegrand, q: QuadratureSpec, center=None) -> QuadResult:
    """int amplitude(x) exp(i phase(x)) dx over R^k with smooth truncation and extrapolation.

    The bump is centred at `center` (default 0). The returned value is the
    widest stage; the error estimate is the larger of the last stage difference
    and the half-resolution difference, floored at rounding level.
    """
    k = f.dim
    c = np.zeros(k) if center is None else np.asarray(center, dtype=float)
    nodes = q.axis_nodes(k)
    values = []
    coarse_diff = 0.0
    mag = 0.0
    for stage in range(q.stages):
        scale = 2 ** stage
        R, w = q.radius * scale, q.width * scale
        axes, cut = [], []
        for j in range(k):
            x, _ = _axis(R, w, nodes[j] * scale)
            axes.append(x + c[j])
            cut.append(bump(x, R, w))
        val, coarse, mag = _trapezoid_tensor(f, axes, cut)
        values.append(val)
        coarse_diff = abs(val - coarse)
    value = values[-1]
    stage_err = abs(values[-1] - values[-2]) if len(values) > 1 else 0.0
    err = max(stage_err, coarse_diff, 1e-15 * mag)
    flagged = err > q.tolerance
    msg = "" if not flagged else f"error estimate {err:.3g} exceeds tolerance {q.tolerance:.3g}"
    return QuadResult(complex(value), float(err), flagged, tuple(values), msg)


def trapezoid_line(fn, lo, hi, step):
    """Plain trapezoid for a vectorized fn over [lo, hi] with about the given spacing."""
    n = max(2, int(np.ceil((hi - lo) / step)) + 1)
    x = np.linspace(lo, hi, n)
    y = fn(x)
    h = x[1] - x[0]
    return h * (y.sum(axis=-1) - 0.5 * (y[..., 0] + y[..., -1]))


def gauss_legendre_panels(lo, hi, panel, order=24):
    """Composite Gauss-Legendre nodes and weights on [lo, hi]."""
    npan = max(1, int(np.ceil((hi - lo) / panel)))
    edges = np.linspace(lo, hi, npan + 1)
    x, w = np.polynomial.legendre.leggauss(order)
    mids = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mids[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights
