"""Rank-one case data, scattering scalars and transfer operators.

The case table and the example identities are shipped as data files under
``hankel_lab/data``; the groups themselves are never constructed. Spectral
characters of A_X are written in the coordinate of the normalized coroot, so
gamma_check/2 has cocharacter coefficient 1/2.
"""
from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Dict, Optional, Tuple

import numpy as np

from .characters import (STANDARD_PSI, AdditiveCharacter, DomainError, LogGrid,
                         MultiplicativeCharacter, TorusHalfDensity)
from .gamma import GammaAtom, GammaPole, GammaProduct, gamma_real, simplify
from .mellin import ConvolutionSpec, kernel_multiplier, mult_fourier_convolution
from .packets import GaussianWavePacket, SparsePoly
from .tate import zeta_ratio

FAMILY_DEFAULTS = {"An": 2, "Bn": 3, "Cn": 3, "Dn": 3}


class DataIntegrityError(RuntimeError):
    """Inconsistent shipped case data."""


_TERM = re.compile(r"([+-]?)(\d+)?(n)?(?:/(\d+))?")


def parse_linear(expr: str, n: Optional[int] = None) -> Fraction:
    """Evaluate a rational-linear expression in n such as 'n/2', 'n-3/2', '4n-4'."""
    s = expr.replace(" ", "")
    if not s:
        raise DataIntegrityError("empty parameter")
    total = Fraction(0)
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise DataIntegrityError(f"cannot parse parameter {expr!r}")
        sign, num, var, den = m.groups()
        c = Fraction(int(num) if num else 1, int(den) if den else 1)
        if var:
            if n is None:
                raise DataIntegrityError(f"parameter {expr!r} needs the family index n")
            c *= n
        elif not num:
            raise DataIntegrityError(f"cannot parse parameter {expr!r}")
        total += -c if sign == "-" else c
        pos = m.end()
    return total


@dataclass(frozen=True)
class RankOneCase:
    label: str
    dual: str                      # "SL2" or "PGL2"
    s1: Optional[Fraction] = None
    s2: Optional[Fraction] = None
    s0: Optional[Fraction] = None
    dim_X: int = 0
    coordinate: str = "xi"
    n: Optional[int] = None
    doc: Dict[str, str] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.dual not in ("SL2", "PGL2"):
            raise DataIntegrityError(f"{self.label}: unknown dual group {self.dual}")
        if self.dual == "SL2" and (self.s1 is None or self.s2 is None or self.s1 < self.s2):
            raise DataIntegrityError(f"{self.label}: SL2-type rows need s1 >= s2")
        if self.dual == "PGL2" and self.s0 is None:
            raise DataIntegrityError(f"{self.label}: PGL2-type rows need s0")

    @property
    def name(self) -> str:
        if self.n is None:
            return self.label
        return self.label[:-1] + str(self.n)


def load_cases(family_n: Optional[Dict[str, int]] = None) -> Dict[str, RankOneCase]:
    """All ten table rows, families instantiated at the given (or default) n."""
    family_n = {**FAMILY_DEFAULTS, **(family_n or {})}
    text = resources.files("hankel_lab").joinpath("data/cases.tsv").read_text()
    rows = [line for line in text.splitlines() if line and not line.startswith("#")]
    out = {}
    for rec in csv.DictReader(rows, delimiter="\t"):
        fam = rec["family"] == "1"
        n = family_n[rec["label"]] if fam else None

        def par(key):
            v = rec[key]
            return None if v == "-" else parse_linear(v, n)

        dim = par("dim_X")
        if dim is None or dim.denominator != 1:
            raise DataIntegrityError(f"{rec['label']}: dim X must be an integer")
        doc = {k: rec[k] for k in ("X", "spherical_root", "L_value")}
        out[rec["label"]] = RankOneCase(rec["label"], rec["dual"], par("s1"), par("s2"), par("s0"),
                                        int(dim), rec["coordinate"], n, doc)
    if len(out) != 10:
        raise DataIntegrityError(f"expected 10 cases, found {len(out)}")
    return out


def get_case(label: str, n: Optional[int] = None) -> RankOneCase:
    cases = load_cases({label: n} if n is not None else None)
    if label not in cases:
        raise DomainError(f"unknown case {label!r}; known: {sorted(cases)}")
    return cases[label]


def mu_X(case: RankOneCase, psi: AdditiveCharacter = STANDARD_PSI) -> GammaProduct:
    """Scattering scalar as a gamma product in the spectral character of A_X."""
    if case.dual == "SL2":
        atoms = (GammaAtom((Fraction(1, 2),), 1 - case.s1, -1),
                 GammaAtom((Fraction(1, 2),), 1 - case.s2, 1),
                 GammaAtom((Fraction(-1),), 0, 1))
    else:
        atoms = (GammaAtom((Fraction(1),), 1 - case.s0, 1),
                 GammaAtom((Fraction(-1),), 0, 1))
    return GammaProduct(atoms, 1.0, psi)


def mu_basic_ext(psi: AdditiveCharacter = STANDARD_PSI) -> GammaProduct:
    """Scattering scalar for the torus of GL2, in the coordinates (eps1, eps2)."""
    atoms = (GammaAtom((1, 0), Fraction(1, 2), -1),
             GammaAtom((0, -1), Fraction(1, 2), 1),
             GammaAtom((-1, 1), 0, 1))
    return GammaProduct(atoms, 1.0, psi)


def psi_covariance_exponent(case: RankOneCase) -> Fraction:
    """(dim X - 1)/2, checked against the L-value parameters in exact arithmetic."""
    s = Fraction(case.dim_X - 1, 2)
    other = case.s1 + case.s2 - Fraction(1, 2) if case.dual == "SL2" else case.s0
    if s != other:
        raise DataIntegrityError(f"{case.name}: (dim X - 1)/2 = {s} but L-value parameters give {other}")
    return s


# ---------------------------------------------------------------------------
# transfer operators


def _kernels(case: RankOneCase):
    """(kernel exponents c with kernel |x|^c psi(x) dx, outer power of |xi|)."""
    if case.dual == "SL2":
        return (Fraction(1, 2) - case.s2, Fraction(1, 2) - case.s1), case.s1 - Fraction(1, 2)
    return (1 - case.s0,), case.s0 - 1


def transfer_spec(c, base: ConvolutionSpec = ConvolutionSpec()) -> ConvolutionSpec:
    """Convolution spec for the kernel |x|^c psi(x) dx = |x|^{c+1} psi(x) d^x x."""
    from dataclasses import replace

    return replace(base, kappa=float(c) + 1.0, psi_sign=1, reciprocal=True)


def transfer_apply(case: RankOneCase, f: TorusHalfDensity, psi: AdditiveCharacter = STANDARD_PSI,
                   spec: ConvolutionSpec = ConvolutionSpec(), order: Optional[Tuple[int, ...]] = None
                   ) -> TorusHalfDensity:
    """T f: successive multiplicative convolutions with |x|^c psi(x) dx, then |xi|^power.

    `order` permutes the kernels (they commute); intermediate results are
    resampled on the grid of f and interpolated by the next step.
    """
    if f.n != 1:
        raise DomainError("transfer operators act on one-axis half-densities")
    cs, power = _kernels(case)
    if order is not None:
        cs = tuple(cs[i] for i in order)
    g = f
    flags = list(f.flags)
    for c in cs:
        g = mult_fourier_convolution(g, 0, transfer_spec(c, spec), psi)
        flags.extend(g.flags)
        g = TorusHalfDensity(g.grids, g.coefficients)
    x = f.grids[0].points
    vals = g.coefficients * np.abs(x) ** float(power)
    return TorusHalfDensity(f.grids, vals, None, tuple(flags))


def transfer_multiplier(case: RankOneCase, chi: MultiplicativeCharacter, psi: AdditiveCharacter = STANDARD_PSI,
                        oracle: bool = False):
    """Predicted Mellin multiplier m with M[T f](chi) = m * M[f](chi |.|^{-power}).

    The closed form uses gamma factors; with oracle=True each kernel integral
    is computed instead as a ratio of numerical Tate zeta integrals.
    """
    cs, power = _kernels(case)
    shifted = chi.shifted(-float(power))
    m = 1.0 + 0j
    for c in cs:
        k = kernel_oracle(shifted, float(c) + 1, psi) if oracle else kernel_multiplier(
            shifted, float(c) + 1, 1, True, psi)
        if isinstance(k, GammaPole):
            return k
        m *= k
    return m


def kernel_oracle(chi: MultiplicativeCharacter, kappa, psi: AdditiveCharacter = STANDARD_PSI) -> complex:
    """int |x|^kappa psi(x) chi^{-1}(x) d^x x from Tate zeta integrals of Gaussian-class functions.

    With eta = chi^{-1} |.|^kappa = sgn^e |.|^u the integral equals
    eta(-1) Z(F phi, sgn^e, u) / Z(phi, sgn^e, 1 - u) / c_psi, where c_psi is the
    self-dual measure factor and phi is x^e exp(-pi x^2).
    """
    eps = chi.parity
    u = -chi.z + complex(kappa)
    poly = SparsePoly.variable(1, 0) if eps else SparsePoly.constant(1)
    phi = GaussianWavePacket.create(1, poly=poly)
    g = zeta_ratio(phi, MultiplicativeCharacter(eps, 0), 1 - u, psi)
    return (-1) ** eps * g / psi.self_dual_measure_factor


def log_gaussian(grid: LogGrid, width: float = 1.0, center: float = 0.0, odd: bool = False) -> TorusHalfDensity:
    """exp(-((log|x| - center)/width)^2), optionally times sgn(x)."""
    def fn(p):
        x = p[..., 0]
        out = np.exp(-((np.log(np.abs(x)) - center) / width) ** 2)
        return out * np.sign(x) if odd else out

    return TorusHalfDensity.from_function(fn, [grid])


# ---------------------------------------------------------------------------
# example identities


def _atoms(spec) -> Tuple[GammaAtom, ...]:
    return tuple(GammaAtom((Fraction(c),), Fraction(s), int(sg)) for c, s, sg in spec)


@dataclass(frozen=True)
class ExampleIdentity:
    id: str
    factors: Dict[str, GammaProduct]
    rhs: GammaProduct
    intermediates: Dict[str, Tuple[Tuple[str, ...], GammaProduct]]
    case_label: str
    n: Optional[int]
    reconstructed: bool

    @property
    def lhs(self) -> GammaProduct:
        out = GammaProduct()
        for p in self.factors.values():
            out = out * p
        return out


def load_examples() -> Dict[str, ExampleIdentity]:
    data = json.loads(resources.files("hankel_lab").joinpath("data/examples.json").read_text())
    out = {}
    for key, rec in data["identities"].items():
        factors = {k: GammaProduct(_atoms(v)) for k, v in rec["factors"].items()}
        inter = {k: (tuple(v["factors"]), GammaProduct(_atoms(v["value"])))
                 for k, v in rec["intermediates"].items()}
        out[key] = ExampleIdentity(key, factors, GammaProduct(_atoms(rec["rhs"])), inter,
                                   rec["case"], rec["n"], bool(rec["reconstructed"]))
    return out


def even_unitary_points(trials: int, seed: int, t_max: float = 3.0, t_min: float = 0.05):
    """Seeded even unitary characters |.|^{it} with t_min <= |t| <= t_max."""
    rng = np.random.default_rng(seed)
    t = rng.uniform(t_min, t_max, trials) * rng.choice([-1.0, 1.0], trials)
    return [MultiplicativeCharacter(0, 1j * v) for v in t]


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def verify_example(ex: ExampleIdentity, trials: int = 20, seed: int = 0) -> dict:
    """Max relative LHS/RHS discrepancy over seeded even unitary-line points.

    Also checks that the right side agrees with mu_X of the associated case,
    that the stated intermediates hold, and that simplify reduces the left
    side to the right side formally.
    """
    pts = even_unitary_points(trials, seed)
    lhs, rhs = ex.lhs, ex.rhs
    worst, used = 0.0, 0
    inter_worst = 0.0
    for chi in pts:
        a, b = lhs.evaluate(chi), rhs.evaluate(chi)
        if isinstance(a, GammaPole) or isinstance(b, GammaPole):
            continue
        used += 1
        worst = max(worst, _rel(a, b))
        for names, value in ex.intermediates.values():
            part = GammaProduct()
            for nm in names:
                part = part * ex.factors[nm]
            inter_worst = max(inter_worst, _rel(part.evaluate(chi), value.evaluate(chi)))
    case = get_case(ex.case_label, ex.n)
    formal = simplify(lhs).atoms == simplify(rhs).atoms
    matches_mu = simplify(rhs).atoms == simplify(mu_X(case)).atoms
    return {"id": ex.id, "points": used, "max_rel": worst, "intermediate_max_rel": inter_worst,
            "formal": formal, "matches_mu_X": matches_mu, "reconstructed": ex.reconstructed,
            "inconclusive": used == 0}
