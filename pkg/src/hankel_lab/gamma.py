"""Abelian local gamma factors and formal products of them.

A ``GammaAtom`` is gamma(chi o lam, s, psi^sign): the spectral character chi of a
split torus is composed with a rational cocharacter lam, then the one-variable
gamma factor is taken at shift s against psi or its inverse. Products carry a
scalar prefactor and the record of every psi-rescaling applied to them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Number
from typing import Sequence, Tuple, Union

import numpy as np
from scipy import special

from .characters import (STANDARD_PSI, AdditiveCharacter, DomainError,
                         MultiplicativeCharacter)

POLE_TOL = 1e-12


@dataclass(frozen=True)
class GammaPole:
    """Result marker for evaluation at a pole: total order and offending u = s + z."""

    order: int
    location: complex

    def __bool__(self):
        return False


class GammaRefusal(DomainError):
    """Evaluation refused: a non-integral cocharacter applied to an odd character."""


def _near_int(x, tol=POLE_TOL):
    return abs(x.imag) < tol and abs(x.real - round(x.real)) < tol


def _gamma_real_standard(parity: int, u: complex):
    """gamma(sgn^parity, u, psi_std) with psi_std(x) = exp(2 pi i x)."""
    u = complex(u)
    if parity == 0:
        # poles of Gamma((1-u)/2): u = 1, 3, 5, ...
        if _near_int(u) and round(u.real) >= 1 and round(u.real) % 2 == 1:
            return GammaPole(1, u)
        return complex(np.pi ** (u - 0.5) * special.gamma((1 - u) / 2) * special.rgamma(u / 2))
    # poles of Gamma(1 - u/2): u = 2, 4, 6, ...
    if _near_int(u) and round(u.real) >= 2 and round(u.real) % 2 == 0:
        return GammaPole(1, u)
    return complex(-1j * np.pi ** (u - 0.5) * special.gamma(1 - u / 2) * special.rgamma((u + 1) / 2))


def gamma_real(chi: MultiplicativeCharacter, s, psi: AdditiveCharacter = STANDARD_PSI):
    """Real gamma factor, normalized by Z(1-s, chi^-1, F phi) = gamma * Z(s, chi, phi).

    F is the Fourier transform with kernel psi(-x y) and the self-dual measure.
    Returns a GammaPole at poles.
    """
    if chi.prime is not None:
        raise DomainError("use gamma_padic_unramified for p-adic characters")
    u = complex(s) + chi.z
    base = _gamma_real_standard(chi.parity, u)
    if isinstance(base, GammaPole):
        return base
    # psi = psi_std(a .): gamma picks up chi(a) |a|^{s - 1/2}
    a = psi.scale_relative_to_standard()
    if a == 1.0:
        return base
    return base * complex(chi(a)) * abs(a) ** (complex(s) - 0.5)


def gamma_padic_unramified(p: int, z, s):
    """(1 - p^{-(s+z)}) / (1 - p^{-(1-s-z)}) for psi of conductor zero."""
    u = complex(s) + complex(z)
    den = 1 - p ** (-(1 - u))
    if abs(den) < POLE_TOL:
        return GammaPole(1, u)
    return complex((1 - p ** (-u)) / den)


# ---------------------------------------------------------------------------
# formal products

Rational = Union[int, Fraction]


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, (float, np.floating)):
        fr = Fraction(float(x)).limit_denominator(10**6)
        if abs(float(fr) - float(x)) < 1e-12:
            return fr
    return complex(x)


def _shift(x):
    """Shifts are kept as exact Fractions when rational, else as complex."""
    if isinstance(x, complex) and x.imag != 0:
        return x
    if isinstance(x, complex):
        x = x.real
    return _frac(x)


@dataclass(frozen=True)
class GammaAtom:
    """gamma(chi o coch, shift, psi^psi_sign)."""

    coch: Tuple[Fraction, ...]
    shift: Union[Fraction, complex]
    psi_sign: int = 1

    def __post_init__(self):
        coch = self.coch
        if isinstance(coch, (Number, str, Fraction)):
            coch = (coch,)
        object.__setattr__(self, "coch", tuple(_frac(c) for c in coch))
        object.__setattr__(self, "shift", _shift(self.shift))
        if self.psi_sign not in (1, -1):
            raise DomainError("psi_sign must be +1 or -1")

    def partner(self) -> "GammaAtom":
        """The atom cancelled by this one under the inversion identity."""
        return GammaAtom(tuple(-c for c in self.coch), 1 - self.shift, -self.psi_sign)

    def character(self, chi: Sequence[MultiplicativeCharacter]) -> MultiplicativeCharacter:
        """chi o coch, refusing half-integral powers of odd characters."""
        chi = _as_tuple(chi)
        if len(chi) != len(self.coch):
            raise DomainError("spectral character has the wrong rank")
        parity, z, prime = 0, 0j, chi[0].prime
        for c, ch in zip(self.coch, chi):
            if c == 0:
                continue
            try:
                pw = ch.power(c)
            except DomainError as exc:
                raise GammaRefusal(str(exc)) from None
            parity = (parity + pw.parity) % 2
            z += pw.z
        return MultiplicativeCharacter(parity, z, prime)

    def evaluate(self, chi, psi: AdditiveCharacter = STANDARD_PSI):
        ch = self.character(chi)
        s = complex(self.shift)
        if ch.prime is not None:
            return gamma_padic_unramified(ch.prime, ch.z, s)
        return gamma_real(ch, s, psi.power(self.psi_sign))

    def __str__(self):
        lam = ",".join(str(c) for c in self.coch)
        ps = "psi" if self.psi_sign == 1 else "psi^-1"
        return f"gamma(chi, [{lam}], {self.shift}, {ps})"


def _as_tuple(chi):
    if isinstance(chi, MultiplicativeCharacter):
        return (chi,)
    return tuple(chi)


@dataclass(frozen=True)
class GammaProduct:
    """prefactor * prod_i atom_i, all atoms taken against the base character psi.

    ``twists`` records psi-rescalings: each (a, coch) contributes (chi o coch)(a).
    """

    atoms: Tuple[GammaAtom, ...] = ()
    prefactor: complex = 1.0
    psi: AdditiveCharacter = STANDARD_PSI
    twists: Tuple[Tuple[float, Tuple[Fraction, ...]], ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "prefactor", complex(self.prefactor))

    @property
    def rank(self):
        if self.atoms:
            return len(self.atoms[0].coch)
        if self.twists:
            return len(self.twists[0][1])
        return None

    def __mul__(self, other: "GammaProduct") -> "GammaProduct":
        if other.psi != self.psi:
            raise DomainError("products refer to different base characters")
        return GammaProduct(self.atoms + other.atoms, self.prefactor * other.prefactor,
                            self.psi, self.twists + other.twists)

    def evaluate(self, chi, psi: AdditiveCharacter = None):
        """Numeric value at the spectral character chi; GammaPole if any atom has a pole."""
        psi = self.psi if psi is None else psi
        chi = _as_tuple(chi)
        val = self.prefactor
        poles = []
        for atom in self.atoms:
            g = atom.evaluate(chi, psi)
            if isinstance(g, GammaPole):
                poles.append(g)
                continue
            val *= g
        for a, coch in self.twists:
            val *= complex(GammaAtom(coch, 0).character(chi)(a))
        if poles:
            return GammaPole(sum(p.order for p in poles), poles[0].location)
        return val

    def __str__(self):
        body = " * ".join(str(a) for a in self.atoms) or "1"
        return f"{self.prefactor:.6g} * {body}"


def product(atoms, prefactor=1.0, psi=STANDARD_PSI) -> GammaProduct:
    return GammaProduct(tuple(atoms), prefactor, psi)


def simplify(prod: GammaProduct) -> GammaProduct:
    """Cancel inverse pairs gamma(chi,s,psi) gamma(chi^-1,1-s,psi^-1) and merge trivial twists."""
    remaining = list(prod.atoms)
    changed = True
    while changed:
        changed = False
        for i, atom in enumerate(remaining):
            partner = atom.partner()
            for j in range(i + 1, len(remaining)):
                if remaining[j] == partner:
                    del remaining[j]
                    del remaining[i]
                    changed = True
                    break
            if changed:
                break
    twists = tuple((a, c) for a, c in prod.twists if any(x != 0 for x in c))
    atoms = tuple(sorted(remaining, key=_atom_key))
    return GammaProduct(atoms, prod.prefactor, prod.psi, twists)


def _atom_key(atom: GammaAtom):
    sh = atom.shift
    sh_key = (float(sh.real), float(sh.imag)) if isinstance(sh, complex) else (float(sh), 0.0)
    return (tuple(float(c) for c in atom.coch), sh_key, atom.psi_sign)


def rescale_psi(obj, a: float) -> GammaProduct:
    """The product with psi replaced by psi(a .), rewritten against the original psi.

    Each atom contributes (chi o coch)(a) |a|^{s - 1/2}: the character part is
    kept as a twist record, the |a| part is folded into the prefactor. The
    result, evaluated at the original base character, equals the input
    evaluated at psi(a .).
    """
    if a == 0:
        raise DomainError("rescaling by zero")
    prod = GammaProduct((obj,)) if isinstance(obj, GammaAtom) else obj
    if not prod.atoms:
        return prod
    rank = prod.rank
    total = [Fraction(0)] * rank
    expo = 0j
    for atom in prod.atoms:
        for k, c in enumerate(atom.coch):
            total[k] += c
        expo += complex(atom.shift) - 0.5
    prefactor = prod.prefactor * abs(a) ** expo
    twists = prod.twists
    if any(t != 0 for t in total):
        twists = twists + ((float(a), tuple(total)),)
    return GammaProduct(prod.atoms, prefactor, prod.psi, twists)
