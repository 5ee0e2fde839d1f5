"""Conventions shared by every module.

All sign choices that could silently differ between the two sides of a
verification live here, so that a single mistake cannot hide in two places.

* Additive character: psi(x) = exp(i * sign * hbar * x), default hbar = 2*pi.
* Fourier transform: F(phi)(y) = int phi(x) psi(-x*y) dmu(x), with dmu the
  self-dual measure sqrt(|hbar|/2pi) dx. On matrices the pairing is
  <A, B> = trace(A @ B).
* Torus half-densities are stored as coefficients against the Haar half-density
  |d^x a_1 ... d^x a_n|^{1/2}, where d^x a = da / |a|.
* w is the all-ones antidiagonal permutation matrix; the torus point a sits in
  the Bruhat cell as w @ diag(a).
* The dual side of the commuting square is read through g -> g^{-1}: the value
  at b uses the matrix (n1 w diag(b) n2)^{-1}.
"""
import numpy as np

TWO_PI = 2.0 * np.pi

DEFAULT_HBAR = TWO_PI

# sign of the exponent in the Fourier kernel psi(FOURIER_KERNEL_SIGN * x * y)
FOURIER_KERNEL_SIGN = -1

# exponent of the character used for the unipotent twist in orbital integrals:
# the integrand carries psi^{ORBITAL_TWIST_SIGN}(superdiagonal sums)
ORBITAL_TWIST_SIGN = -1

# Haar (d^x a) reference on tori: coefficient = Lebesgue coefficient * prod |a_i|^{1/2}
TORUS_REFERENCE = "haar"


def antidiagonal(n):
    """All-ones antidiagonal permutation matrix of size n."""
    return np.fliplr(np.eye(n))


def weyl_torus_matrix(a):
    """The Bruhat-cell torus representative w @ diag(a)."""
    a = np.asarray(a, dtype=float)
    return antidiagonal(len(a)) @ np.diag(a)


def unipotent_index(n):
    """Strictly upper triangular positions (i, j), row-major."""
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def superdiagonal_positions(n):
    """Indices into unipotent_index(n) of the superdiagonal entries."""
    idx = unipotent_index(n)
    return [k for k, (i, j) in enumerate(idx) if j == i + 1]
