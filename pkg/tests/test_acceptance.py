"""Acceptance criteria A1-A10 (A11 behind --slow). Each test prints one PASS/FAIL line."""
import time
from fractions import Fraction

import numpy as np
import pytest

from hankel_lab.characters import STANDARD_PSI, MultiplicativeCharacter
from hankel_lab.gamma import GammaAtom, GammaPole, gamma_padic_unramified, gamma_real, rescale_psi
from hankel_lab.report import RunConfig
from hankel_lab.suites import (fe_points, fe_test_function, functional_equation_residual, _hankel_n1,
                               _hankel_n2, symplectic_sample, transfer_suite, weil_inputs)
from hankel_lab.transfer import (even_unitary_points, load_cases, load_examples, mu_basic_ext, mu_X,
                                 psi_covariance_exponent, verify_example)


def _rel(a, b):
    return abs(a - b) / abs(b)


def _records_ok(recs, prefix, tol):
    sel = [r for r in recs if r.check_id.startswith(prefix)]
    worst = max((r.rel_error for r in sel), default=np.inf)
    return sel, worst, all(r.status == "pass" for r in sel) and worst <= tol


def test_a1_tate_functional_equation(criterion):
    t0 = time.perf_counter()
    pts, rng = fe_points(0, 20)
    worst, flagged, on_line = 0.0, 0, 0
    for eps, t, s in pts:
        chi = MultiplicativeCharacter(eps, 1j * t)
        phi = fe_test_function(rng, eps)
        lhs, rhs, flag = functional_equation_residual(phi, chi, s)
        worst = max(worst, _rel(lhs, rhs))
        flagged += flag
        on_line += s.real == 0.5
    dt = time.perf_counter() - t0
    ok = worst <= 1e-6 and not flagged and 0 < on_line < 20 and dt <= 10
    criterion("A1 Tate functional equation", ok, f"max rel {worst:.2e} over 20 points, {dt:.1f}s")


def test_a2_gamma_inversion(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(11)
    worst = {"real": 0.0, "p-adic": 0.0}
    counts = {"real": 0, "p-adic": 0}
    while sum(counts.values()) < 50:
        s = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        if counts["real"] < 30:
            chi = MultiplicativeCharacter(int(rng.integers(0, 2)), complex(rng.uniform(-2, 2), rng.uniform(-3, 3)))
            a, b, key = gamma_real(chi, s), gamma_real(chi.inverse(), 1 - s, STANDARD_PSI.inverse()), "real"
        else:
            p, z = int(rng.choice([2, 3, 5, 7])), complex(rng.uniform(-1, 1), rng.uniform(-3, 3))
            a, b, key = gamma_padic_unramified(p, z, s), gamma_padic_unramified(p, -z, 1 - s), "p-adic"
        if isinstance(a, GammaPole) or isinstance(b, GammaPole):
            continue
        worst[key] = max(worst[key], abs(a * b - 1))
        counts[key] += 1
    dt = time.perf_counter() - t0
    ok = max(worst.values()) <= 1e-10 and dt <= 1
    criterion("A2 gamma inversion", ok,
              f"real {worst['real']:.1e}, p-adic {worst['p-adic']:.1e} at {counts} points, {dt:.2f}s")


def test_a3_psi_rescaling(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(12)
    worst = 0.0
    for _ in range(20):
        a = float(rng.uniform(0.2, 5.0) * rng.choice([-1, 1]))
        atom = GammaAtom((Fraction(int(rng.choice([1, -1, 2]))),), complex(rng.uniform(-1.5, 1.5), rng.uniform(-2, 2)),
                         int(rng.choice([1, -1])))
        chi = MultiplicativeCharacter(int(rng.integers(0, 2)), 1j * rng.uniform(-3, 3))
        worst = max(worst, _rel(rescale_psi(atom, a).evaluate(chi), atom.evaluate(chi, STANDARD_PSI.rescaled(a))))
    dt = time.perf_counter() - t0
    criterion("A3 psi rescaling", worst <= 1e-10 and dt <= 1, f"max rel {worst:.1e}, {dt:.2f}s")


def test_a4_mu_covariance(criterion):
    t0 = time.perf_counter()
    cases = load_cases()
    rng = np.random.default_rng(13)
    worst, exact = 0.0, True
    for case in cases.values():
        s = psi_covariance_exponent(case)
        exact &= isinstance(s, Fraction) and 2 * s == case.dim_X - 1
        mu = mu_X(case)
        for chi in even_unitary_points(3, int(rng.integers(1 << 30))):
            a = float(rng.uniform(0.2, 5.0) * rng.choice([-1, 1]))
            pred = abs(a) ** (-(case.dim_X - 1) / 2)
            worst = max(worst, _rel(rescale_psi(mu, a).prefactor, pred),
                        _rel(mu.evaluate(chi, STANDARD_PSI.rescaled(a)) / mu.evaluate(chi), pred))
    dt = time.perf_counter() - t0
    ok = len(cases) == 10 and exact and worst <= 1e-10 and dt <= 1
    criterion("A4 mu_X psi-covariance", ok, f"{len(cases)} cases, exact={exact}, max rel {worst:.1e}, {dt:.2f}s")


def test_a5_example_identities(criterion):
    t0 = time.perf_counter()
    res = {k: verify_example(ex, 20, 0) for k, ex in sorted(load_examples().items())}
    dt = time.perf_counter() - t0
    worst = max(r["max_rel"] for r in res.values())
    ok = (set(res) == {"A2", "C3", "F4"} and worst <= 1e-9 and dt <= 1
          and all(r["points"] == 20 and not r["inconclusive"] for r in res.values()))
    criterion("A5 example identities", ok, f"max rel {worst:.1e} over {sorted(res)}, {dt:.2f}s")


def test_a6_basic_case_specialization(criterion):
    t0 = time.perf_counter()
    ext, a1 = mu_basic_ext(), mu_X(load_cases()["A1"])
    rng = np.random.default_rng(14)
    worst = 0.0
    for _ in range(10):
        chi1 = MultiplicativeCharacter(0, complex(rng.uniform(-0.3, 0.3), rng.uniform(-3, 3)))
        worst = max(worst, _rel(ext.evaluate((chi1, chi1.inverse())),
                                a1.evaluate(MultiplicativeCharacter(0, 2 * chi1.z))))
    dt = time.perf_counter() - t0
    criterion("A6 basic case specialization", worst <= 1e-9 and dt <= 1, f"max rel {worst:.1e}, {dt:.2f}s")


def test_a7_transfer_multipliers(criterion):
    t0 = time.perf_counter()
    recs, _ = transfer_suite(RunConfig(suites=("transfer",)))
    dt = time.perf_counter() - t0
    a1, wa, oka = _records_ok(recs, "transfer.A1.multiplier", 1e-3)
    d2, wd, okd = _records_ok(recs, "transfer.D2.multiplier", 1e-3)
    ok = oka and okd and len(a1) == len(d2) == 8 and dt <= 60
    criterion("A7 transfer Mellin multipliers", ok, f"A1 {wa:.1e}, D2 {wd:.1e} at |t|<=2, {dt:.1f}s")


def test_a8_gl1_hankel(criterion):
    t0 = time.perf_counter()
    recs, _ = _hankel_n1(RunConfig(suites=("hankel",), n=1))
    dt = time.perf_counter() - t0
    sq, ws, oks = _records_ok(recs, "hankel.n1.square", 1e-4)
    mu, wm, okm = _records_ok(recs, "hankel.n1.multiplier", 1e-4)
    ok = oks and okm and len(sq) == 6 and len(mu) == 8 and dt <= 10
    criterion("A8 GL1 Hankel triangle", ok, f"square {ws:.1e} at 6 points, multiplier {wm:.1e}, {dt:.1f}s")


def test_a9_gl2_commuting_square(criterion):
    t0 = time.perf_counter()
    recs, _ = _hankel_n2(RunConfig(suites=("hankel",), n=2))
    dt = time.perf_counter() - t0
    ch, wc, okc = _records_ok(recs, "hankel.n2.chain.square", 1e-3)
    di, wd, okd = _records_ok(recs, "hankel.n2.direct.square", 1e-3)
    agree = [r for r in recs if r.check_id.startswith("hankel.n2.modes_agree")]
    ok = (okc and okd and len(ch) == len(di) == len(agree) == 9 and dt <= 600
          and all(r.status == "pass" for r in agree))
    criterion("A9 GL2 commuting square", ok, f"chain {wc:.1e}, direct {wd:.1e}, modes agree, {dt:.1f}s")


def test_a10_symplectic(criterion):
    from hankel_lab.symplectic import pullback_omega_check, volume_factorization_check, weil_formula_check

    t0 = time.perf_counter()
    pb = pullback_omega_check(symplectic_sample(0, 8))
    vf = volume_factorization_check(symplectic_sample(1, 20))
    rng = np.random.default_rng(2)
    weil = []
    for name, phi in weil_inputs(0):
        a1, b2 = rng.uniform(0.4, 2.5, 2) * rng.choice([-1, 1], 2)
        weil.append(weil_formula_check(phi, a1, b2)["coefficient_discrepancy"])
    dt = time.perf_counter() - t0
    ok = (pb["residual"] <= 1e-6 and pb["order_ratio"] >= 3.0 and vf["leaves"] == 20
          and vf["haar_spread"] <= 1e-12 and len(weil) == 5 and max(weil) <= 1e-10 and dt <= 5)
    criterion("A10 symplectic checks", ok,
              f"sympJ {pb['residual']:.1e} (order ratio {pb['order_ratio']:.2f}), "
              f"volume spread {vf['haar_spread']:.1e}, Weil {max(weil):.1e}, {dt:.2f}s")


@pytest.mark.slow
def test_a11_gl3_twostep_vs_direct(criterion):
    from hankel_lab.gl3 import direct_orbital_n3, twostep_orbital_n3
    from hankel_lab.packets import GaussianWavePacket

    t0 = time.perf_counter()
    phi = GaussianWavePacket.standard(9)
    two = twostep_orbital_n3(phi, (1.0, 1.0, 1.0))
    direct = direct_orbital_n3(phi, (1.0, 1.0, 1.0))
    err = _rel(two.value, direct.value)
    dt = time.perf_counter() - t0
    criterion("A11 GL3 twostep vs direct", err <= 1e-2 and dt <= 7200, f"rel {err:.1e}, {dt:.0f}s")


@pytest.mark.slow
def test_a11_gl3_commuting_square(criterion):
    from hankel_lab.hankel import verify_commuting_square
    from hankel_lab.packets import GaussianWavePacket

    try:
        sp, = verify_commuting_square(GaussianWavePacket.standard(9), [(1.0, 1.0, 1.0)], 3)
        ok, detail = sp.rel_error <= 1e-2, f"rel {sp.rel_error:.1e}"
    except NotImplementedError as exc:
        ok, detail = False, f"not attainable: {exc}"
    criterion("A11 GL3 commuting square", ok, detail)
