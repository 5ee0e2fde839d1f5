"""GL_2 phase-space coordinates: the N x N orbit parametrization and its symplectic checks.

Points of M = End(V) + End(V*) are pairs (A, B) of 2 x 2 matrices with the
pairing <A, B> = trace(A B) and omega_M((dA, dB), (dA', dB')) = tr(dA dB') - tr(dA' dB).
Writing A = w X and B = Y w, the pairing is tr(X Y), so the coordinates
(A, B, C, D) of X and (A', B', C', D') of Y pair as (A, A'), (B, C'),
(C, B'), (D, D').
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import List, Sequence, Tuple

import numpy as np

from .characters import STANDARD_PSI, AdditiveCharacter, DomainError
from .conventions import antidiagonal
from .packets import GaussianWavePacket, fourier_matn, partial_fourier

W2 = antidiagonal(2)


@dataclass(frozen=True)
class LeafParameters:
    a1: float
    a2: float
    b1: float
    b2: float
    x: float = 0.0
    y: float = 0.0

    def __post_init__(self):
        if 0 in (self.a1, self.a2, self.b1, self.b2):
            raise DomainError("a_1, a_2, b_1, b_2 must be nonzero")

    def as_array(self) -> np.ndarray:
        return np.array([self.a1, self.a2, self.b1, self.b2, self.x, self.y], dtype=float)


@dataclass(frozen=True)
class PhaseSpacePoint:
    A: np.ndarray
    B: np.ndarray

    def vector(self) -> np.ndarray:
        return np.concatenate([self.A.ravel(), self.B.ravel()])


def _orbit_matrices(a1, a2, b1, b2, x, y):
    X = np.array([[a1, a1 * x], [-a1 * y, a2 - a1 * x * y]])
    Y = np.array([[b1 + 1 / (a1 ** 2 * b2) - (x - y) / a1 - b2 * x * y, 1 / a1 - x * b2],
                  [1 / a1 + y * b2, b2]])
    return W2 @ X, Y @ W2


def nn_orbit_point(p: LeafParameters) -> PhaseSpacePoint:
    """The point of the N x N orbit over (a, b) with unipotent parameters (x, y)."""
    A, B = _orbit_matrices(p.a1, p.a2, p.b1, p.b2, p.x, p.y)
    return PhaseSpacePoint(A, B)


def act(m: PhaseSpacePoint, x: float, y: float) -> PhaseSpacePoint:
    """Right action of (n(y), n(x)): A -> n(-y) A n(x), B -> n(-x) B n(y)."""
    def n(t):
        return np.array([[1.0, t], [0.0, 1.0]])

    return PhaseSpacePoint(n(-y) @ m.A @ n(x), n(-x) @ m.B @ n(y))


def omega_matrix() -> np.ndarray:
    """Gram matrix of omega_M in the coordinates (vec A, vec B), row-major."""
    n = 4
    P = np.zeros((n, n))
    for i in range(2):
        for j in range(2):
            P[i * 2 + j, j * 2 + i] = 1.0      # tr(dA dB') = vec(dA)^T P vec(dB')
    Om = np.zeros((8, 8))
    Om[:4, 4:] = P
    Om[4:, :4] = -P.T
    return Om


def _orbit_vector(q):
    A, B = _orbit_matrices(*q)
    return np.concatenate([A.ravel(), B.ravel()])


def _jacobian(q, step):
    q = np.asarray(q, dtype=float)
    cols = []
    for k in range(len(q)):
        e = np.zeros(len(q))
        e[k] = step * max(1.0, abs(q[k]))
        cols.append((_orbit_vector(q + e) - _orbit_vector(q - e)) / (2 * e[k]))
    return np.array(cols).T


def sympj_matrix(a1: float, b2: float) -> np.ndarray:
    """The reduced form in the order (a1, a2, b1, b2): W[i, j] = omega_J(d_i, d_j).

    With omega_M = sum dT_j ^ dT_j^* (A-coordinates first) the pullback along
    the section x = y = 0 is -db1^da1 - db2^da2 + a1^-2 b2^-2 db2^da1. The
    sign of the last term relative to the first two does not depend on the
    orientation chosen for omega_M.
    """
    W = np.zeros((4, 4))
    for (i, j), c in {(2, 0): -1.0, (3, 1): -1.0, (3, 0): 1 / (a1 * b2) ** 2}.items():
        W[i, j] += c
        W[j, i] -= c
    return W


def pfaffian4(W) -> float:
    return W[0, 1] * W[2, 3] - W[0, 2] * W[1, 3] + W[0, 3] * W[1, 2]


def pullback_omega(p: LeafParameters, step: float) -> np.ndarray:
    """Central-difference pullback of omega_M to (a1, a2, b1, b2, x, y)."""
    J = _jacobian(p.as_array(), step)
    return J.T @ omega_matrix() @ J


def pullback_omega_check(sample: Sequence[LeafParameters], step: float = 1e-4) -> dict:
    """Residuals of the pulled-back form against omega_J at step h and h/2.

    Also reports whether the (x, y) directions are null for the restricted
    form, their pairing rank against all of M, and the Pfaffian of omega_J
    (omega_J^omega_J / 2 = Pf * da1^da2^db1^db2). The (x, y) directions pair
    trivially with the whole orbit family and with rank 2 against M, i.e.
    only with the moment-map directions.
    """
    res_h, res_h2, xy_xy, xy_leaf, rank_xy, pf = [], [], [], [], [], []
    for p in sample:
        target = sympj_matrix(p.a1, p.b2)
        for h, bucket in ((step, res_h), (step / 2, res_h2)):
            G = pullback_omega(p, h)
            bucket.append(float(np.max(np.abs(G[:4, :4] - target))))
        G = pullback_omega(p, step)
        xy_xy.append(float(np.max(np.abs(G[4:, 4:]))))
        xy_leaf.append(float(np.max(np.abs(G[4:, :4]))))
        J = _jacobian(p.as_array(), step)
        rank_xy.append(int(np.linalg.matrix_rank(J[:, 4:].T @ omega_matrix(), tol=1e-8)))
        pf.append(float(pfaffian4(target)))
    r1, r2 = max(res_h), max(res_h2)
    return {"points": len(sample), "residual": r1, "residual_half_step": r2,
            "order_ratio": r1 / max(r2, 1e-300), "xy_isotropy": max(xy_xy), "xy_vs_orbit_coordinates": max(xy_leaf),
            "xy_pairing_rank": min(rank_xy), "pfaffian": pf}


# ---------------------------------------------------------------------------
# volume forms on a leaf M_{a1, b2}


def leaf_point(a1, b2, a2, b1, x, y) -> np.ndarray:
    """Point of the affine leaf M_{a1, b2} in the coordinates (vec A, vec B)."""
    X = np.array([[a1, a1 * x], [-a1 * y, a2]])
    Y = np.array([[b1, 1 / a1 - x * b2], [1 / a1 + y * b2, b2]])
    return np.concatenate([(W2 @ X).ravel(), (Y @ W2).ravel()])


def _xy_coordinates():
    """Matrix taking (vec A, vec B) to (vec X, vec Y) with X = w^-1 A, Y = B w^-1 (row-major vec)."""
    Winv = np.linalg.inv(W2)
    S = np.zeros((8, 8))
    S[:4, :4] = np.kron(Winv, np.eye(2))
    S[4:, 4:] = np.kron(np.eye(2), Winv.T)
    return S


def _leaf_frame(a1, b2):
    """Columns d/d(b1), d/d(a2), d/dx, d/dy of the leaf (exact: the leaf is affine)."""
    base = leaf_point(a1, b2, 0, 0, 0, 0)
    cols = [leaf_point(a1, b2, 0, 1, 0, 0), leaf_point(a1, b2, 1, 0, 0, 0),
            leaf_point(a1, b2, 0, 0, 1, 0), leaf_point(a1, b2, 0, 0, 0, 1)]
    return np.array([c - base for c in cols]).T


def eta_f_covectors(a1, b2) -> np.ndarray:
    """dA, dD', d(b2 B + a1 B'), d(b2 C + a1 C') as rows, in the coordinates (vec A, vec B)."""
    S = _xy_coordinates()
    XA, XB, XC, XD, YA, YB, YC, YD = S
    return np.array([XA, YD, b2 * XB + a1 * YB, b2 * XC + a1 * YC])


def symplectic_dual(covectors: np.ndarray, Om: np.ndarray) -> np.ndarray:
    """Vectors v with omega(v, .) = alpha, one column per covector row."""
    return np.linalg.solve(Om.T, covectors.T)


def _wedge_coefficient(vectors: np.ndarray, frame: np.ndarray):
    """Express each vector in the frame and return (det of coefficients, tangency residual)."""
    C, *_ = np.linalg.lstsq(frame, vectors, rcond=None)
    resid = float(np.max(np.abs(frame @ C - vectors)))
    return float(np.linalg.det(C)), resid


def _contract_norm(covectors: np.ndarray, v: np.ndarray) -> float:
    """Size of the contraction of alpha_1 ^ ... ^ alpha_k with v (all minors of the (k-1)-form)."""
    k, dim = covectors.shape
    vals = covectors @ v
    best = 0.0
    for cols in combinations(range(dim), k - 1):
        tot = 0.0
        for i in range(k):
            rest = np.delete(covectors, i, axis=0)[:, cols]
            tot += (-1) ** i * vals[i] * np.linalg.det(rest)
        best = max(best, abs(tot))
    return best


def volume_factorization_check(sample: Sequence[LeafParameters]) -> dict:
    """Symplectic duals of eta_F on M and eta_G on J against db1^da2^dx^dy and db1^da2.

    For each sample leaf (a1, b2) the omega_M-duals of the four covectors of
    eta_F are tangent to the leaf, and their wedge is a scalar multiple of
    d/db1 ^ d/da2 ^ d/dx ^ d/dy. The omega_J-duals of da1 and db2 wedge to a
    multiple of d/db1 ^ d/da2. The ratio is the Haar constant on N x N.
    """
    Om = omega_matrix()
    f_scalars, g_scalars, tangency = [], [], []
    for p in sample:
        vecs = symplectic_dual(eta_f_covectors(p.a1, p.b2), Om)
        det_f, res = _wedge_coefficient(vecs, _leaf_frame(p.a1, p.b2))
        tangency.append(res)
        WJ = sympj_matrix(p.a1, p.b2)
        cov = np.array([[1.0, 0, 0, 0], [0, 0, 0, 1.0]])    # da1, db2
        vg = symplectic_dual(cov, WJ)
        frame_g = np.array([[0, 0, 1.0, 0], [0, 1.0, 0, 0]]).T   # d/db1, d/da2
        det_g, res_g = _wedge_coefficient(vg, frame_g)
        tangency.append(res_g)
        f_scalars.append(det_f)
        g_scalars.append(det_g)
    ratio = np.array(f_scalars) / np.array(g_scalars)
    # contraction pattern of db1^da2^dx^dy on the coordinates (a1, a2, b1, b2, x, y)
    eta = np.zeros((4, 6))
    eta[0, 2] = eta[1, 1] = eta[2, 4] = eta[3, 5] = 1.0
    e = np.eye(6)
    contractions = {name: _contract_norm(eta, e[k]) for k, name in enumerate(["a1", "a2", "b1", "b2", "x", "y"])}
    return {"leaves": len(sample), "eta_f_scalar": f_scalars, "eta_g_scalar": g_scalars,
            "haar_constant": float(np.mean(ratio)), "haar_spread": float(np.max(ratio) - np.min(ratio)),
            "tangency_residual": max(tangency), "contractions": contractions}


# ---------------------------------------------------------------------------
# Weil's formula on the Gaussian class


def _permute(phi: GaussianWavePacket, rows) -> GaussianWavePacket:
    """New variable k is the old coordinate rows[k]."""
    d = phi.dim
    A = np.zeros((d, d))
    for k, r in enumerate(rows):
        A[r, k] = 1.0
    return phi.pullback(A, np.zeros(d))


def _times_phase(phi: GaussianWavePacket, i: int, j: int, c: float) -> GaussianWavePacket:
    """phi * exp(i c x_i x_j)."""
    L = phi.L.copy()
    L[i, j] -= 0.5j * c
    L[j, i] -= 0.5j * c
    return GaussianWavePacket(phi.poly, L, phi.b, phi.g0, phi.hbar)


def leaf_integral_from_horizontal(phi: GaussianWavePacket, a1: float, b2: float,
                                  psi: AdditiveCharacter = STANDARD_PSI) -> GaussianWavePacket:
    """Integral of the section of phi along the linear foliation through M_{a1, b2}.

    Output: the section, in the trivialization Phi, on the transversal
    (A, B, C, D'), as a packet in those coordinates. The measure |omega|^{3/2}
    on the 3-dimensional leaf quotient is |a1| da2 dx dy.
    """
    s = psi.frequency
    K = b2 / a1
    # substitute beta = B + a1 x, gamma = C - a1 y: X' = [[A, beta], [gamma, a2]]
    t = _permute(phi, [2, 3, 0, 1])                  # w X' = (gamma, a2, A, beta)
    t = _times_phase(t, 1, 2, s * K)
    r = partial_fourier(t, [1, 2, 3], psi, np.diag([K, K, 1.0]))   # -> (A, C, B, D')
    r = _times_phase(r, 1, 2, s * K)
    return _permute(r, [0, 2, 1, 3]).scaled(abs(a1) / a1 ** 2)


def leaf_integral_from_vertical(phihat: GaussianWavePacket, a1: float, b2: float,
                                psi: AdditiveCharacter = STANDARD_PSI) -> GaussianWavePacket:
    """The same leaf integral starting from a function of B (a vertical section).

    The measure on the leaf quotient is |b2| db1 dx dy.
    """
    s = psi.frequency
    g = _times_phase(phihat, 0, 3, -s * a1 / b2)       # B w^-1 entries (xi, b1, D', eta)
    r = partial_fourier(g, [1, 0, 3], psi.inverse())   # -> (C, A, D', B)
    return _permute(r, [1, 3, 0, 2]).scaled(abs(b2) / b2 ** 2)


def weil_formula_check(phi: GaussianWavePacket, a1: float = 1.0, b2: float = 1.0,
                       psi: AdditiveCharacter = STANDARD_PSI) -> dict:
    """Direct leaf integral of phi vs Fourier transform followed by the complementary one.

    phi is a packet on End(V) = Mat_2 (4 variables), or on M = R^8, in which
    case its restriction to B = 0 is used.
    """
    if a1 == 0 or b2 == 0:
        raise DomainError("leaf labels must be nonzero")
    if phi.dim == 8:
        E = np.zeros((8, 4))
        E[:4, :4] = np.eye(4)
        phi = phi.pullback(E, np.zeros(8))
    if phi.dim != 4:
        raise DomainError("expected a packet on Mat_2 or on M = R^8")
    direct = leaf_integral_from_horizontal(phi, a1, b2, psi)
    composite = leaf_integral_from_vertical(fourier_matn(phi, 2, psi), a1, b2, psi)
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(8, 4))
    vals = np.max(np.abs(direct(pts) - composite(pts)) / np.maximum(np.abs(composite(pts)), 1e-300))
    return {"a1": a1, "b2": b2, "coefficient_discrepancy": float(direct.coefficient_distance(composite)),
            "value_discrepancy": float(vals)}
