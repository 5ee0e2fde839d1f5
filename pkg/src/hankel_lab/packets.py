"""Gaussian wave packets: polynomial x Gaussian x linear phase, closed under Fourier transform.

Internally a packet on R^d is stored in canonical form

    phi(x) = p(x) * exp(-x^T L x + b^T x + g0)

with L complex symmetric (positive definite real part), b a complex vector and
g0 a complex constant. The usual parameters (width L, center c, phase mu) map to
b = 2 L c + i hbar mu and g0 = -c^T L c. Complex L appears only after partial
Fourier transforms; full transforms of real-width packets stay real-width.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .characters import STANDARD_PSI, AdditiveCharacter, DomainError
from .conventions import DEFAULT_HBAR, FOURIER_KERNEL_SIGN

Monomial = Tuple[int, ...]


class SparsePoly:
    """Multivariate polynomial as {exponent tuple: complex coefficient}."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Optional[Dict[Monomial, complex]] = None):
        self.nvars = nvars
        self.terms = {}
        for k, v in (terms or {}).items():
            if len(k) != nvars:
                raise DomainError("monomial length mismatch")
            if v != 0:
                self.terms[tuple(int(e) for e in k)] = complex(v)

    @classmethod
    def constant(cls, nvars, c=1.0):
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars, i, c=1.0):
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): c})

    @classmethod
    def linear(cls, coeffs, const=0.0):
        coeffs = np.asarray(coeffs)
        n = len(coeffs)
        out = {(0,) * n: const}
        for i, c in enumerate(coeffs):
            if c != 0:
                e = [0] * n
                e[i] = 1
                out[tuple(e)] = c
        return cls(n, out)

    @property
    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def copy(self):
        return SparsePoly(self.nvars, dict(self.terms))

    def __add__(self, other):
        if not isinstance(other, SparsePoly):
            other = SparsePoly.constant(self.nvars, other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return SparsePoly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return SparsePoly(self.nvars, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, SparsePoly) else -other)

    def __mul__(self, other):
        if not isinstance(other, SparsePoly):
            return SparsePoly(self.nvars, {k: v * other for k, v in self.terms.items()})
        out: Dict[Monomial, complex] = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, 0) + v1 * v2
        return SparsePoly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = SparsePoly.constant(self.nvars)
        for _ in range(e):
            out = out * self
        return out

    def derivative(self, i: int) -> "SparsePoly":
        out = {}
        for k, v in self.terms.items():
            if k[i] > 0:
                kk = list(k)
                kk[i] -= 1
                out[tuple(kk)] = out.get(tuple(kk), 0) + v * k[i]
        return SparsePoly(self.nvars, out)

    def substitute_affine(self, A, t) -> "SparsePoly":
        """q(z) = p(A z + t) for A of shape (nvars, m)."""
        A = np.asarray(A, dtype=complex)
        t = np.asarray(t, dtype=complex)
        m = A.shape[1]
        lin = [SparsePoly.linear(A[i], t[i]) for i in range(self.nvars)]
        cache = {}
        out = SparsePoly(m)
        for k, v in self.terms.items():
            term = SparsePoly.constant(m, v)
            for i, e in enumerate(k):
                if e:
                    key = (i, e)
                    if key not in cache:
                        cache[key] = lin[i] ** e
                    term = term * cache[key]
            out = out + term
        return out

    def __call__(self, x):
        """Evaluate at points x of shape (..., nvars); complex points are allowed."""
        x = np.asarray(x)
        res = np.zeros(x.shape[:-1], dtype=complex)
        if not self.terms:
            return res
        deg = self.degree
        powers = [[None] * (deg + 1) for _ in range(self.nvars)]
        for k, v in self.terms.items():
            mono = np.full(x.shape[:-1], v, dtype=complex)
            for i, e in enumerate(k):
                if e:
                    if powers[i][e] is None:
                        powers[i][e] = x[..., i] ** e
                    mono = mono * powers[i][e]
            res = res + mono
        return res

    def coefficient_distance(self, other: "SparsePoly") -> float:
        keys = set(self.terms) | set(other.terms)
        return max((abs(self.terms.get(k, 0) - other.terms.get(k, 0)) for k in keys), default=0.0)

    def __repr__(self):
        return f"SparsePoly({self.nvars}, {self.terms})"


def _complex_sym_factor(S):
    """L with L L^T = S for complex symmetric S (no conjugation), batched over leading axes."""
    S = np.asarray(S, dtype=complex)
    m = S.shape[-1]
    L = np.zeros_like(S)
    for j in range(m):
        d = S[..., j, j] - np.sum(L[..., j, :j] ** 2, axis=-1)
        L[..., j, j] = np.sqrt(d)
        for i in range(j + 1, m):
            L[..., i, j] = (S[..., i, j] - np.sum(L[..., i, :j] * L[..., j, :j], axis=-1)) / L[..., j, j]
    return L


def _sqrt_det(L):
    """det(L)^{1/2} on the branch continuous from real positive definite matrices."""
    ev = np.linalg.eigvals(L)
    return np.prod(np.sqrt(ev), axis=-1)


def hermite_rule(order: int):
    """Nodes and weights integrating polynomials against the standard normal density."""
    x, w = np.polynomial.hermite_e.hermegauss(order)
    return x, w / np.sqrt(2 * np.pi)


def gaussian_moment(poly: SparsePoly, mean, cov):
    """E[poly(X)] for X ~ N(mean, cov) with complex mean/cov (formal analytic continuation).

    Batched: mean has shape (..., d), cov shape (..., d, d). Exact via tensor
    Gauss-Hermite of sufficient order.
    """
    mean = np.asarray(mean, dtype=complex)
    d = mean.shape[-1]
    deg = poly.degree
    if deg == 0:
        return np.full(mean.shape[:-1], poly.terms.get((0,) * d, 0), dtype=complex)
    order = deg // 2 + 1
    nodes, weights = hermite_rule(order)
    L = _complex_sym_factor(cov)
    acc = np.zeros(mean.shape[:-1], dtype=complex)
    for idx in itertools.product(range(order), repeat=d):
        eta = nodes[list(idx)]
        w = np.prod(weights[list(idx)])
        x = mean + np.einsum("...ij,j->...i", L, eta)
        acc = acc + w * poly(x)
    return acc


def gaussian_integral(poly: SparsePoly, L, b, g0=0.0):
    """int p(x) exp(-x^T L x + b^T x + g0) dx in closed form (batched over leading axes)."""
    L = np.asarray(L, dtype=complex)
    b = np.asarray(b, dtype=complex)
    d = L.shape[-1]
    Linv = np.linalg.inv(L)
    m = 0.5 * np.einsum("...ij,...j->...i", Linv, b)
    expo = 0.25 * np.einsum("...i,...ij,...j->...", b, Linv, b) + g0
    norm = np.pi ** (d / 2) / _sqrt_det(L)
    mom = gaussian_moment(poly, m, 0.5 * Linv)
    return norm * np.exp(expo) * mom


def affine_gaussian_integral(phi: "GaussianWavePacket", A, t, lin=None, quad=None):
    """int phi(A z + t) exp(lin^T z - z^T Q z) dz over R^m, batched over leading axes.

    A has shape (..., d, m), t (..., d), lin (..., m) and Q (..., m, m) with Q
    complex symmetric; the real part of A^T L A + Q must be positive definite.
    The polynomial amplitude is integrated by Gauss-Hermite rules at the
    complex mean, which is exact for its degree.
    """
    A = np.asarray(A, dtype=complex)
    t = np.asarray(t, dtype=complex)
    m = A.shape[-1]
    At = np.swapaxes(A, -1, -2)
    L = At @ phi.L @ A
    if quad is not None:
        L = L + np.asarray(quad, dtype=complex)
    b = np.einsum("...ij,...j->...i", At, phi.b - 2 * np.einsum("ij,...j->...i", phi.L, t))
    if lin is not None:
        b = b + np.asarray(lin, dtype=complex)
    g0 = phi.g0 - np.einsum("...i,ij,...j->...", t, phi.L, t) + t @ phi.b
    Linv = np.linalg.inv(L)
    mean = 0.5 * np.einsum("...ij,...j->...i", Linv, b)
    expo = 0.5 * np.einsum("...i,...i->...", b, mean) + g0
    norm = np.pi ** (m / 2) / _sqrt_det(L)
    deg = phi.poly.degree
    if deg == 0:
        mom = phi.poly.terms.get((0,) * phi.dim, 0)
    else:
        order = deg // 2 + 1
        nodes, weights = hermite_rule(order)
        F = _complex_sym_factor(0.5 * Linv)
        mom = 0j
        for idx in itertools.product(range(order), repeat=m):
            z = mean + np.einsum("...ij,j->...i", F, nodes[list(idx)])
            x = np.einsum("...ij,...j->...i", A, z) + t
            mom = mom + np.prod(weights[list(idx)]) * phi.poly(x)
    return norm * np.exp(expo) * mom


@dataclass(frozen=True)
class GaussianWavePacket:
    """p(x) exp(-x^T L x + b^T x + g0) on R^d (canonical form; see module docstring)."""

    poly: SparsePoly
    L: np.ndarray
    b: np.ndarray
    g0: complex = 0.0
    hbar: float = DEFAULT_HBAR

    def __post_init__(self):
        L = np.asarray(self.L, dtype=complex)
        d = L.shape[0]
        if L.shape != (d, d) or not np.allclose(L, L.T, atol=1e-13):
            raise DomainError("width matrix must be symmetric")
        if np.min(np.linalg.eigvalsh(L.real)) <= 0:
            raise DomainError("width matrix must have positive definite real part")
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "b", np.asarray(self.b, dtype=complex).reshape(d))
        object.__setattr__(self, "g0", complex(self.g0))
        if self.poly.nvars != d:
            raise DomainError("polynomial has the wrong number of variables")

    @classmethod
    def create(cls, d, poly=None, width=None, center=None, phase=None, prefactor=1.0,
               hbar=DEFAULT_HBAR):
        """p(x) exp(-(x-c)^T L (x-c)) exp(i hbar mu^T x); default L = pi * I."""
        L = np.pi * np.eye(d) if width is None else np.asarray(width, dtype=float)
        c = np.zeros(d) if center is None else np.asarray(center, dtype=float)
        mu = np.zeros(d) if phase is None else np.asarray(phase, dtype=float)
        if np.min(np.linalg.eigvalsh(L)) <= 0:
            raise DomainError("width matrix must be positive definite")
        p = SparsePoly.constant(d) if poly is None else poly
        b = 2 * L @ c + 1j * hbar * mu
        g0 = -c @ L @ c
        return cls(p * prefactor, L, b, g0, hbar)

    @classmethod
    def standard(cls, d, hbar=DEFAULT_HBAR):
        """exp(-pi |x|^2) (self-dual for hbar = 2 pi)."""
        return cls.create(d, hbar=hbar, width=(hbar / 2) * np.eye(d))

    @property
    def dim(self) -> int:
        return self.L.shape[0]

    @property
    def center(self):
        return np.linalg.solve(self.L.real, self.b.real) / 2

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        q = -np.einsum("...i,ij,...j->...", x, self.L, x) + x @ self.b + self.g0
        return self.poly(x) * np.exp(q)

    def scaled(self, c) -> "GaussianWavePacket":
        return GaussianWavePacket(self.poly * c, self.L, self.b, self.g0, self.hbar)

    def derivative(self, i: int) -> "GaussianWavePacket":
        """d/dx_i, staying in the class."""
        # d/dx_i of the exponent is -2 (L x)_i + b_i
        dq = SparsePoly.linear(-2 * self.L[i], self.b[i])
        return GaussianWavePacket(self.poly.derivative(i) + self.poly * dq, self.L, self.b, self.g0, self.hbar)

    def integral(self) -> complex:
        """Lebesgue integral over R^d."""
        return complex(gaussian_integral(self.poly, self.L, self.b, self.g0))

    def pullback(self, A, t) -> "GaussianWavePacket":
        """z -> phi(A z + t) for injective A of shape (d, m)."""
        A = np.asarray(A, dtype=float)
        t = np.asarray(t, dtype=float)
        L = A.T @ self.L @ A
        b = A.T @ self.b - 2 * A.T @ self.L @ t
        g0 = self.g0 - t @ self.L @ t + self.b @ t
        return GaussianWavePacket(self.poly.substitute_affine(A, t), L, b, g0, self.hbar)

    def fourier(self, psi: AdditiveCharacter = STANDARD_PSI, pairing=None) -> "GaussianWavePacket":
        """F(phi)(y) = int phi(x) psi(-<x, y>) dmu(x) with <x, y> = x^T P y, self-dual dmu."""
        return partial_fourier(self, list(range(self.dim)), psi, pairing)

    def coefficient_distance(self, other: "GaussianWavePacket") -> float:
        """Max difference of canonical parameters, with the constant absorbed into the polynomial."""
        p1 = self.poly * np.exp(self.g0)
        p2 = other.poly * np.exp(other.g0)
        return max(np.max(np.abs(self.L - other.L)), np.max(np.abs(self.b - other.b)),
                   p1.coefficient_distance(p2))


def partial_fourier(phi: GaussianWavePacket, axes: Sequence[int], psi: AdditiveCharacter = STANDARD_PSI,
                    pairing=None) -> GaussianWavePacket:
    """Fourier transform in the coordinates `axes`; the others are parameters.

    The output coordinates replace the transformed ones in place. The pairing
    matrix P (len(axes) square) defines <u, v> = u^T P v; the kernel is
    psi(FOURIER_KERNEL_SIGN <u, v>) and the measure is self-dual for psi.
    """
    d = phi.dim
    axes = list(axes)
    rest = [i for i in range(d) if i not in axes]
    k = len(axes)
    P = np.eye(k) if pairing is None else np.asarray(pairing, dtype=float)
    freq = FOURIER_KERNEL_SIGN * psi.frequency   # kernel exp(i freq u^T P v)
    # joint exponent in (u, v, r): -x^T L x + b^T x + i freq u^T P v, with x = (u, r) placed back
    perm = axes + rest
    Lp = phi.L[np.ix_(perm, perm)]
    bp = phi.b[perm]
    Luu = Lp[:k, :k]
    Lur = Lp[:k, k:]
    Lrr = Lp[k:, k:]
    # treat u as integration variable, (v, r) as outer variables z = (v, r)
    # exponent = -u^T Luu u + u^T B z + c^T z - z^T D z + b_u^T u
    m = d  # outer dimension: k v-coordinates + (d-k) rest coordinates
    B = np.zeros((k, m), dtype=complex)
    B[:, :k] = 1j * freq * P
    B[:, k:] = -2 * Lur
    D = np.zeros((m, m), dtype=complex)
    D[k:, k:] = Lrr
    cz = np.zeros(m, dtype=complex)
    cz[k:] = bp[k:]
    bu = bp[:k]
    # int exp(-u^T Luu u + (bu + B z)^T u) du = pi^{k/2} det^{-1/2} exp((bu+Bz)^T Luu^{-1} (bu+Bz)/4)
    Linv = np.linalg.inv(Luu)
    newL = D - 0.25 * B.T @ Linv @ B
    newb = cz + 0.5 * B.T @ Linv @ bu
    newg0 = phi.g0 + 0.25 * bu @ Linv @ bu
    norm = (np.pi ** (k / 2) / _sqrt_det(Luu)) * psi.self_dual_measure_factor ** k
    # polynomial: E over u ~ N(Luu^{-1}(bu + Bz)/2, Luu^{-1}/2) of p(u, r)
    # write u = M z + u0 + xi with xi ~ N(0, Luu^{-1}/2)
    Mz = 0.5 * Linv @ B
    u0 = 0.5 * Linv @ bu
    # polynomial in variables (z, eta) where xi = F eta, F F^T = Luu^{-1}/2
    F = _complex_sym_factor(0.5 * Linv)
    nv = m + k
    A = np.zeros((d, nv), dtype=complex)
    t = np.zeros(d, dtype=complex)
    # original coordinate order: x[axes[j]] = u_j, x[rest[j]] = r_j = z[k + j]
    for j, ax in enumerate(axes):
        A[ax, :m] = Mz[j]
        A[ax, m:] = F[j]
        t[ax] = u0[j]
    for j, ax in enumerate(rest):
        A[ax, k + j] = 1.0
    q = phi.poly.substitute_affine(A, t)
    poly = _normal_expectation(q, m, k)
    # reorder outer variables z = (v, r) back into positions (axes -> v, rest -> r)
    inv = np.empty(d, dtype=int)
    inv[axes] = np.arange(k)
    inv[rest] = k + np.arange(d - k)
    newL = newL[np.ix_(inv, inv)]
    newb = newb[inv]
    poly = SparsePoly(d, {tuple(mono[inv[i]] for i in range(d)): c for mono, c in poly.terms.items()})
    return GaussianWavePacket(poly * norm, newL, newb, newg0, phi.hbar)


def _normal_expectation(q: SparsePoly, m: int, k: int) -> SparsePoly:
    """Integrate out the last k variables of q against the standard normal law."""
    out: Dict[Monomial, complex] = {}
    for mono, c in q.terms.items():
        mom = 1.0
        for e in mono[m:]:
            if e % 2:
                mom = 0.0
                break
            mom *= _double_factorial(e - 1)
        if mom:
            key = mono[:m]
            out[key] = out.get(key, 0) + c * mom
    return SparsePoly(m, out)


def _double_factorial(n: int) -> int:
    return 1 if n <= 0 else n * _double_factorial(n - 2)


def matrix_pairing(n: int) -> np.ndarray:
    """P with vec(A)^T P vec(B) = trace(A B) for row-major vec on Mat_n."""
    P = np.zeros((n * n, n * n))
    for i in range(n):
        for j in range(n):
            P[i * n + j, j * n + i] = 1.0
    return P


def fourier_matn(phi: GaussianWavePacket, n: int, psi: AdditiveCharacter = STANDARD_PSI) -> GaussianWavePacket:
    """Fourier transform Mat_n -> Mat_n^* with kernel psi(-trace(A B)), exact."""
    if phi.dim != n * n:
        raise DomainError("packet dimension must be n^2")
    return phi.fourier(psi, matrix_pairing(n))


def standard_matrix_gaussian(n: int, hbar=DEFAULT_HBAR) -> GaussianWavePacket:
    """exp(-pi trace(A^T A)) on Mat_n, row-major coordinates."""
    return GaussianWavePacket.standard(n * n, hbar)
