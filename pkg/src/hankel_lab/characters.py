"""Additive and multiplicative characters of the reals, and sampled torus half-densities."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .conventions import DEFAULT_HBAR, TWO_PI


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of an operation."""


@dataclass(frozen=True)
class AdditiveCharacter:
    """psi(x) = exp(i * sign * hbar * x)."""

    hbar: float = DEFAULT_HBAR
    sign: int = 1

    def __post_init__(self):
        if self.hbar == 0:
            raise DomainError("hbar must be nonzero")
        if self.sign not in (1, -1):
            raise DomainError("sign must be +1 or -1")

    @property
    def self_dual_measure_factor(self) -> float:
        return float(np.sqrt(abs(self.hbar) / TWO_PI))

    @property
    def frequency(self) -> float:
        """Signed frequency k with psi(x) = exp(i k x)."""
        return self.sign * self.hbar

    def __call__(self, x):
        return np.exp(1j * self.frequency * np.asarray(x, dtype=float))

    def inverse(self) -> "AdditiveCharacter":
        return AdditiveCharacter(self.hbar, -self.sign)

    def power(self, sign: int) -> "AdditiveCharacter":
        return self if sign == 1 else self.inverse()

    def rescaled(self, a: float) -> "AdditiveCharacter":
        """The character x -> psi(a x)."""
        if a == 0:
            raise DomainError("rescaling factor must be nonzero")
        return AdditiveCharacter(self.hbar * abs(a), self.sign * int(np.sign(a)))

    def scale_relative_to_standard(self) -> float:
        """a with psi = psi_std(a .), psi_std(x) = exp(2 pi i x)."""
        return self.frequency / TWO_PI


STANDARD_PSI = AdditiveCharacter()


def evaluate_additive(psi: AdditiveCharacter, x):
    """exp(i * sign * hbar * x)."""
    return psi(x)


@dataclass(frozen=True)
class MultiplicativeCharacter:
    """chi(x) = sgn(x)^parity |x|^z on the reals, or |x|_p^z when a prime is set."""

    parity: int = 0
    z: complex = 0.0
    prime: Optional[int] = None

    def __post_init__(self):
        if self.parity not in (0, 1):
            raise DomainError("parity must be 0 or 1")
        if self.prime is not None and (self.parity != 0 or self.prime < 2):
            raise DomainError("p-adic characters are unramified with parity 0")
        object.__setattr__(self, "z", complex(self.z))

    @property
    def is_unitary(self) -> bool:
        return self.z.real == 0

    def inverse(self) -> "MultiplicativeCharacter":
        return MultiplicativeCharacter(self.parity, -self.z, self.prime)

    def shifted(self, s) -> "MultiplicativeCharacter":
        """chi |.|^s."""
        return MultiplicativeCharacter(self.parity, self.z + complex(s), self.prime)

    def power(self, c) -> "MultiplicativeCharacter":
        """chi^c for a rational c; odd characters only admit integral c."""
        c = Fraction(c)
        if c.denominator != 1:
            if self.parity:
                raise DomainError("non-integral power of an odd character is undefined")
            return MultiplicativeCharacter(0, float(c) * self.z, self.prime)
        return MultiplicativeCharacter((self.parity * c.numerator) % 2, float(c) * self.z, self.prime)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x == 0):
            raise DomainError("multiplicative character evaluated at 0")
        if self.prime is not None:
            return np.exp(-self.z * padic_valuation(x, self.prime) * np.log(self.prime))
        val = np.exp(self.z * np.log(np.abs(x)))
        if self.parity:
            val = val * np.sign(x)
        return val


def padic_valuation(x, p: int):
    """p-adic valuation of nonzero rationals given as floats (integral powers and integers)."""
    arr = np.asarray(x, dtype=float)
    out = np.zeros(arr.shape, dtype=float)
    for i, v in np.ndenumerate(arr):
        fr = Fraction(float(v)).limit_denominator(10**12)
        k = 0
        num, den = abs(fr.numerator), fr.denominator
        while num % p == 0:
            num //= p
            k += 1
        while den % p == 0:
            den //= p
            k -= 1
        out[i] = k
    return out


def evaluate_mult(chi: MultiplicativeCharacter, x):
    """sgn(x)^parity |x|^z; x = 0 is a domain error."""
    out = chi(x)
    return out[()] if np.ndim(out) == 0 else out


def modular_character_gln(a: Sequence[float]) -> float:
    """prod_{i<j} |a_i / a_j| for the upper triangular Borel of GL_n."""
    a = np.asarray(a, dtype=float)
    if np.any(a == 0):
        raise DomainError("torus coordinates must be nonzero")
    n = len(a)
    # prod_{i<j} |a_i/a_j| = prod_i |a_i|^{n - 1 - 2i}
    return float(np.prod(np.abs(a) ** (n - 1 - 2 * np.arange(n))))


# ---------------------------------------------------------------------------
# signed logarithmic grids and sampled half-densities


@dataclass(frozen=True)
class LogGrid:
    """One axis of a signed log-grid: N nodes per sign sheet at log|x| in [-R, R].

    Nodes are log|x| = -R + 2R (k-1)/(N-1), k = 1..N, on the + sheet followed by
    the same magnitudes on the - sheet.
    """

    radius: float
    nodes: int

    def __post_init__(self):
        if self.radius <= 0 or self.nodes < 2:
            raise DomainError("LogGrid needs radius > 0 and at least 2 nodes")

    @classmethod
    def with_spacing(cls, step: float, radius: float) -> "LogGrid":
        """Grid whose spacing is exactly `step` and whose radius is a multiple of it."""
        k = int(np.ceil(radius / step))
        return cls(k * step, 2 * k + 1)

    @property
    def step(self) -> float:
        return 2 * self.radius / (self.nodes - 1)

    @property
    def logs(self) -> np.ndarray:
        return np.linspace(-self.radius, self.radius, self.nodes)

    @property
    def points(self) -> np.ndarray:
        e = np.exp(self.logs)
        return np.concatenate([e, -e])

    @property
    def weights(self) -> np.ndarray:
        """Trapezoid weights for d^x a on both sheets."""
        w = np.full(self.nodes, self.step)
        w[0] *= 0.5
        w[-1] *= 0.5
        return np.concatenate([w, w])

    def contains(self, x: float, tol: float = 1e-9) -> bool:
        if x == 0:
            return False
        t = np.log(abs(x))
        k = (t + self.radius) / self.step
        return abs(k - round(k)) < tol and 0 <= round(k) < self.nodes

    def index(self, x: float) -> int:
        t = np.log(abs(x))
        k = int(round((t + self.radius) / self.step))
        if not self.contains(x):
            raise DomainError(f"{x} is not a grid node")
        return k if x > 0 else k + self.nodes


Sampler = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class TorusHalfDensity:
    """Coefficients against |d^x a_1 ... d^x a_n|^{1/2} sampled on a signed log-grid.

    The coefficient array has shape (2N_1, ..., 2N_n); along every axis the + sheet
    comes first. A sampler, when present, evaluates the same coefficient function
    at arbitrary points (..., n) and is used in preference to interpolation.
    Coefficients may be left uncomputed (lazy) when only a sampler is supplied.
    """

    grids: tuple
    coefficients: Optional[np.ndarray] = None
    sampler: Optional[Sampler] = None
    flags: tuple = field(default_factory=tuple)

    def __post_init__(self):
        grids = tuple(self.grids)
        object.__setattr__(self, "grids", grids)
        if self.coefficients is None and self.sampler is None:
            raise DomainError("need coefficients or a sampler")
        if self.coefficients is not None:
            c = np.asarray(self.coefficients, dtype=complex)
            if c.shape != self.shape:
                raise DomainError(f"coefficient shape {c.shape} != grid shape {self.shape}")
            object.__setattr__(self, "coefficients", c)

    @property
    def n(self) -> int:
        return len(self.grids)

    @property
    def shape(self) -> tuple:
        return tuple(2 * g.nodes for g in self.grids)

    @classmethod
    def from_function(cls, fn: Sampler, grids: Sequence[LogGrid], lazy: bool = False):
        grids = tuple(grids)
        if lazy:
            return cls(grids, None, fn)
        return cls(grids, fn(mesh_points(grids)), fn)

    @classmethod
    def zeros(cls, grids: Sequence[LogGrid]):
        grids = tuple(grids)
        shape = tuple(2 * g.nodes for g in grids)
        return cls(grids, np.zeros(shape, complex), lambda p: np.zeros(np.shape(p)[:-1], complex))

    def values(self) -> np.ndarray:
        """Coefficient array, computing it through the sampler when lazy."""
        if self.coefficients is None:
            object.__setattr__(self, "coefficients",
                               np.asarray(self.sampler(mesh_points(self.grids)), dtype=complex))
        return self.coefficients

    def evaluate(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        if points.ndim == 1 and self.n > 1:
            points = points[None, :]
        if points.ndim == 1:
            points = points[:, None]
        if self.sampler is not None:
            return np.asarray(self.sampler(points), dtype=complex)
        return interpolate(self, points)

    def with_flags(self, *flags) -> "TorusHalfDensity":
        return TorusHalfDensity(self.grids, self.coefficients, self.sampler, self.flags + tuple(flags))

    def __add__(self, other):
        return combine([(1.0, self), (1.0, other)])

    def scaled(self, c) -> "TorusHalfDensity":
        return combine([(c, self)])


def combine(terms):
    """Linear combination sum c_k f_k of half-densities on a common grid."""
    grids = terms[0][1].grids
    for _, f in terms:
        if f.grids != grids:
            raise DomainError("half-densities live on different grids")
    coeffs = None
    if all(f.coefficients is not None for _, f in terms):
        coeffs = sum(c * f.coefficients for c, f in terms)
    sampler = None
    if all(f.sampler is not None for _, f in terms):
        def sampler(p, terms=tuple(terms)):
            return sum(c * f.sampler(p) for c, f in terms)
    if coeffs is None and sampler is None:
        coeffs = sum(c * f.values() if f.sampler is not None else c * f.coefficients for c, f in terms)
    flags = tuple(fl for _, f in terms for fl in f.flags)
    return TorusHalfDensity(grids, coeffs, sampler, flags)


def mesh_points(grids: Sequence[LogGrid]) -> np.ndarray:
    """All grid nodes as an array of shape (2N_1, ..., 2N_n, n), row-major."""
    axes = [g.points for g in grids]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack(mesh, axis=-1)


def interpolate(f: TorusHalfDensity, points: np.ndarray) -> np.ndarray:
    """Cubic interpolation in log|a| on each sheet; zero outside the grid."""
    from scipy.interpolate import RegularGridInterpolator

    vals = f.values()
    out = np.zeros(points.shape[:-1], complex)
    if f.n == 1 and f.grids[0].nodes >= 4:
        return _interpolate_line(f.grids[0], vals, points[..., 0])
    logs = [g.logs for g in f.grids]
    sheets = np.where(points >= 0, 0, 1)
    logp = np.log(np.abs(np.where(points == 0, np.nan, points)))
    n = f.n
    for code in range(2 ** n):
        pattern = [(code >> (n - 1 - k)) & 1 for k in range(n)]
        mask = np.all(sheets == np.array(pattern), axis=-1)
        if not np.any(mask):
            continue
        sl = tuple(slice(0, g.nodes) if s == 0 else slice(g.nodes, 2 * g.nodes)
                   for g, s in zip(f.grids, pattern))
        block = vals[sl]
        method = "cubic" if min(g.nodes for g in f.grids) >= 4 else "linear"
        re = RegularGridInterpolator(logs, block.real, method=method, bounds_error=False, fill_value=0.0)
        im = RegularGridInterpolator(logs, block.imag, method=method, bounds_error=False, fill_value=0.0)
        q = logp[mask]
        out[mask] = re(q) + 1j * im(q)
    return out


def _interpolate_line(g: LogGrid, vals: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Not-a-knot cubic spline in log|x| on each sheet; zero outside the grid."""
    from scipy.interpolate import CubicSpline

    out = np.zeros(x.shape, complex)
    with np.errstate(divide="ignore"):
        t = np.log(np.abs(x))
    inside = np.abs(t) <= g.radius * (1 + 1e-12)
    for sheet, mask in ((0, inside & (x > 0)), (1, inside & (x < 0))):
        if np.any(mask):
            block = vals[sheet * g.nodes:(sheet + 1) * g.nodes]
            out[mask] = CubicSpline(g.logs, block)(t[mask])
    return out
