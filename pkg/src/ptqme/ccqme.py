"""Canonically corrected second-order master equation.

The plain second-order dissipator relaxes the populations to the bare
Gibbs distribution regardless of coupling strength.  The canonical
correction map C2 fixes this: propagating

    d rho/dt = -i[H, rho] + R[(1 - C2) rho]

drives the state to the coupling-corrected (mean-force) equilibrium at
second order, at the cost of nothing more than assembling one extra
N^2 x N^2 matrix.

C2 has three structurally distinct pieces:

* a coherence block, (C2 rho)_nm = (R rho)_nm / (i d_nm) for n != m,
  obtained by inverting the free commutator on the off-diagonal sector;
* a GKSL-type population block with jump operators |n><l| weighted by
  the derivative of the imaginary part of the relaxation kernel;
* a population "energy-derivative" block, Im T(d_ln) weighted rows of a
  linear map approximating d rho_nn / d E_n through the zeroth-order
  detailed-balance ratios.

``two_level`` re-derives every intermediate for N = 2 from the explicit
closed-form matrix elements rather than Kronecker assembly; it exists as
an independent cross-check of the general-N path and is exercised
heavily by the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bath import BathSpec, tunneling_rate, tunneling_rate_derivative
from .generators import (
    Superoperator,
    convolution_operator,
    redfield_superoperator,
    secularize,
    unitary_liouvillian,
    vec_index,
)
from .system import NLevelSystem, bohr_frequencies

__all__ = ["CanonicalMap", "canonical_map", "ccqme_generator", "two_level"]


@dataclass(frozen=True)
class CanonicalMap:
    """The correction map and its three building blocks (all N^2 x N^2)."""

    matrix: np.ndarray
    coherence: np.ndarray
    gksl: np.ndarray
    derivative: np.ndarray

    @property
    def superoperator(self) -> Superoperator:
        return Superoperator(self.matrix, kind="canonical")


def canonical_map(
    sys: NLevelSystem, bath: BathSpec, secular: bool = False
) -> CanonicalMap:
    """Assemble the second-order canonical correction map.

    With ``secular=True`` the coherence block is built from the
    secularised dissipator (it then annihilates diagonal states); the
    population blocks are unaffected, being diagonal-sector maps by
    construction.
    """
    n = sys.n_levels
    n2 = n * n
    if bath.gamma == 0.0:
        zero = np.zeros((n2, n2), dtype=complex)
        return CanonicalMap(zero, zero.copy(), zero.copy(), zero.copy())

    delta = bohr_frequencies(sys)
    kernel_vals = tunneling_rate(bath, delta)
    kernel_deriv = tunneling_rate_derivative(bath, delta)
    q2 = sys.coupling**2
    np.fill_diagonal(q2, 0.0)

    # Coherence block: scale the off-diagonal rows of R by 1/(i*d_nm).
    r = redfield_superoperator(sys, convolution_operator(sys, bath))
    if secular:
        r = secularize(r, sys)
    inv_gap = np.zeros(n2, dtype=complex)
    off = ~np.eye(n, dtype=bool)
    inv_gap[off.reshape(-1)] = 1.0 / (1.0j * delta[off])
    coherence = inv_gap[:, None] * r.matrix

    # GKSL-type population block: sum over ordered pairs (n, l), n != l,
    # of |q_nl|^2 * d Im T / dd (d_nl) times the projected dissipator of
    # the jump |n><l|, which maps rho_ll to (e_n - e_l).
    gksl = np.zeros((n2, n2), dtype=complex)
    g = q2 * kernel_deriv.imag
    for i in range(n):
        for l in range(n):
            if i == l:
                continue
            gksl[vec_index(i, i, n), vec_index(l, l, n)] += g[i, l]
            gksl[vec_index(l, l, n), vec_index(l, l, n)] -= g[i, l]

    # Energy-derivative population block.  The derivative map acting on
    # the instantaneous populations is
    #   (d rho)_n = sum_l [ |q_nl|^2 dReT(d_nl) rho_ll
    #                     + |q_nl|^2 dReT(d_ln) rho_nn ] / denom_n,
    #   denom_n = sum_l |q_ln|^2 ReT(d_ln),
    # and enters with weight w_n = sum_l |q_nl|^2 Im T(d_ln).
    derivative = np.zeros((n2, n2), dtype=complex)
    re_kernel = kernel_vals.real
    re_deriv = kernel_deriv.real
    for i in range(n):
        denom = float(np.sum(q2[:, i] * re_kernel[:, i]))
        if denom == 0.0:
            # level i is uncoupled: no zeroth-order balance to differentiate
            continue
        w = float(np.sum(q2[i, :] * kernel_vals[:, i].imag))
        row = np.zeros(n)
        row[i] = float(np.sum(q2[i, :] * re_deriv[:, i]))
        for l in range(n):
            if l != i:
                row[l] = q2[i, l] * re_deriv[i, l]
        for l in range(n):
            derivative[vec_index(i, i, n), vec_index(l, l, n)] += w * row[l] / denom
    matrix = coherence + gksl + derivative
    return CanonicalMap(matrix, coherence, gksl, derivative)


def ccqme_generator(
    sys: NLevelSystem,
    bath: BathSpec,
    secular: bool = True,
    secular_coherence_correction: bool = False,
) -> Superoperator:
    """Full canonically corrected generator L = L_unitary + R (1 - C2).

    In the secular variant the dissipator is secular-projected, composed
    with the full correction map, and the composite is secular-projected
    again; ``secular_coherence_correction`` additionally builds the
    coherence block of C2 from the secularised dissipator.  For a
    nondegenerate spectrum the toggle is provably inert inside the
    doubly-projected secular composite (the final projection retains
    only the diagonal kernel element, which both variants share); it
    matters for the non-secular generator.
    """
    lu = unitary_liouvillian(sys)
    r = redfield_superoperator(sys, convolution_operator(sys, bath))
    c = canonical_map(sys, bath, secular=secular_coherence_correction)
    one = np.eye(r.matrix.shape[0])
    if secular:
        r = secularize(r, sys)
        composite = Superoperator(r.matrix @ (one - c.matrix), kind="composite")
        composite = secularize(composite, sys)
    else:
        composite = Superoperator(r.matrix @ (one - c.matrix), kind="composite")
    return Superoperator(lu.matrix + composite.matrix, kind="composite")


def two_level(
    e0: float,
    e1: float,
    q00: float,
    q11: float,
    q01: float,
    bath: BathSpec,
    rho: np.ndarray,
) -> dict:
    """Explicit closed-form two-level construction of every intermediate.

    Returns the memory kernel and its adjoint, the four dissipator
    products A = K rho q, B = q rho K^+, C = q K rho, D = rho K^+ q, the
    dissipator R = A + B - C - D, the canonical corrections (coherence
    parts, the population-derivative terms, and the diagonal entries
    Q00/Q11), the corrected state rho' = (1 - C2) rho, and the complete
    right-hand side of the corrected master equation.

    All expressions are written element by element; no Kronecker
    machinery from the rest of the package is used.
    """
    if e1 <= e0:
        raise ValueError("two_level expects e1 > e0")
    rho = np.asarray(rho, dtype=complex)
    d = e1 - e0  # positive gap
    t0 = tunneling_rate(bath, 0.0)
    tp = tunneling_rate(bath, d)
    tm = tunneling_rate(bath, -d)
    t0c, tpc, tmc = np.conj(t0), np.conj(tp), np.conj(tm)
    qq = q01

    kernel = np.array([[q00 * t0, q01 * tm], [q01 * tp, q11 * t0]])
    kernel_dag = np.array(
        [[q00 * t0c, q01 * tpc], [q01 * tmc, q11 * t0c]]
    )

    def products(state):
        """The four closed-form products for an arbitrary 2x2 state."""
        r00, r01, r10, r11 = state[0, 0], state[0, 1], state[1, 0], state[1, 1]
        a = np.array(
            [
                [
                    t0 * (q00**2 * r00 + q00 * qq * r01)
                    + tm * (qq * q00 * r10 + qq**2 * r11),
                    t0 * (q00 * qq * r00 + q00 * q11 * r01)
                    + tm * (qq**2 * r10 + qq * q11 * r11),
                ],
                [
                    tp * (qq * q00 * r00 + qq**2 * r01)
                    + t0 * (q11 * q00 * r10 + q11 * qq * r11),
                    tp * (qq**2 * r00 + qq * q11 * r01)
                    + t0 * (q11 * qq * r10 + q11**2 * r11),
                ],
            ]
        )
        b = np.array(
            [
                [
                    t0c * (q00**2 * r00 + qq * q00 * r10)
                    + tmc * (qq * q00 * r01 + qq**2 * r11),
                    tpc * (qq * q00 * r00 + qq**2 * r10)
                    + t0c * (q00 * q11 * r01 + qq * q11 * r11),
                ],
                [
                    t0c * (qq * q00 * r00 + q00 * q11 * r10)
                    + tmc * (qq**2 * r01 + qq * q11 * r11),
                    tpc * (qq**2 * r00 + qq * q11 * r10)
                    + t0c * (qq * q11 * r01 + q11**2 * r11),
                ],
            ]
        )
        c = np.array(
            [
                [
                    t0 * (q00**2 * r00 + qq * q11 * r10)
                    + tp * qq**2 * r00
                    + tm * qq * q00 * r10,
                    t0 * (q00**2 * r01 + qq * q11 * r11)
                    + tp * qq**2 * r01
                    + tm * qq * q00 * r11,
                ],
                [
                    t0 * (qq * q00 * r00 + q11**2 * r10)
                    + tp * qq * q11 * r00
                    + tm * qq**2 * r10,
                    t0 * (qq * q00 * r01 + q11**2 * r11)
                    + tp * qq * q11 * r01
                    + tm * qq**2 * r11,
                ],
            ]
        )
        dd = np.array(
            [
                [
                    t0c * (q00**2 * r00 + qq * q11 * r01)
                    + tpc * qq**2 * r00
                    + tmc * qq * q00 * r01,
                    t0c * (qq * q00 * r00 + q11**2 * r01)
                    + tpc * qq * q11 * r00
                    + tmc * qq**2 * r01,
                ],
                [
                    t0c * (q00**2 * r10 + qq * q11 * r11)
                    + tpc * qq**2 * r10
                    + tmc * qq * q00 * r11,
                    t0c * (qq * q00 * r10 + q11**2 * r11)
                    + tpc * qq * q11 * r10
                    + tmc * qq**2 * r11,
                ],
            ]
        )
        return a, b, c, dd

    a, b, c, dd = products(rho)
    r_mat = a + b - c - dd
    r00, r01, r10, r11 = rho[0, 0], rho[0, 1], rho[1, 0], rho[1, 1]

    # coherence corrections: inverse free commutator on the off-diagonals
    c2_01 = -r_mat[0, 1] / (1.0j * d)
    c2_10 = +r_mat[1, 0] / (1.0j * d)

    dtp = tunneling_rate_derivative(bath, d)
    dtm = tunneling_rate_derivative(bath, -d)

    # population-derivative maps on the instantaneous populations
    de0 = (dtm.real * r11 + dtp.real * r00) / tp.real
    de1 = (dtp.real * r00 + dtm.real * r11) / tm.real

    q_sq = qq**2
    q00_corr = q_sq * (dtm.imag * r11 - dtp.imag * r00 + tp.imag * de0)
    q11_corr = q_sq * (dtp.imag * r00 - dtm.imag * r11 + tm.imag * de1)

    rho_prime = np.array(
        [
            [r00 - q00_corr, r01 + r_mat[0, 1] / (1.0j * d)],
            [r10 - r_mat[1, 0] / (1.0j * d), r11 - q11_corr],
        ]
    )

    ap, bp, cp, dp = products(rho_prime)
    r_prime = ap + bp - cp - dp
    rhs = np.array(
        [
            [r_prime[0, 0], 1.0j * d * r01 + r_prime[0, 1]],
            [-1.0j * d * r10 + r_prime[1, 0], r_prime[1, 1]],
        ]
    )

    return {
        "K": kernel,
        "K_dag": kernel_dag,
        "A": a,
        "B": b,
        "C": c,
        "D": dd,
        "R": r_mat,
        "C2_01": c2_01,
        "C2_10": c2_10,
        "dE0": de0,
        "dE1": de1,
        "Q00": q00_corr,
        "Q11": q11_corr,
        "rho_prime": rho_prime,
        "ccqme_rhs": rhs,
    }
