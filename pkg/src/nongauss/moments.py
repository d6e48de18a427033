"""First and second moments of Fock states.

Quadratures are q = (a + a^+)/sqrt(2), p = (a - a^+)/(i sqrt(2)), collected
as R = (q_1, p_1, ..., q_n, p_n).  The covariance matrix is the symmetrized
second moment, sigma_kj = <{R_k, R_j}>/2 - <R_k><R_j>; the vacuum has
sigma = I/2.

Expectations are read off shifted diagonals of the (reduced) density
matrices; no ladder matrices are ever embedded into the product space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericIntegrityError
from .fock import FockState, check_trace_budget, partial_trace

SYMMETRY_TOL = 1e-10
UNCERTAINTY_SLACK = 1e-8


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal form with 2x2 blocks [[0, 1], [-1, 0]]."""
    J = np.array([[0.0, 1.0], [-1.0, 0.0]])
    out = np.zeros((2 * n_modes, 2 * n_modes))
    for k in range(n_modes):
        out[2 * k:2 * k + 2, 2 * k:2 * k + 2] = J
    return out


@dataclass(frozen=True)
class Moments:
    """Mean vector X (length 2n) and covariance matrix sigma (2n x 2n)."""

    mean: np.ndarray
    cov: np.ndarray

    @property
    def n_modes(self) -> int:
        return len(self.mean) // 2

    def mode_amplitudes(self) -> np.ndarray:
        """Complex displacement per mode, alpha_k = (X_q + i X_p)/sqrt(2)."""
        return (self.mean[0::2] + 1j * self.mean[1::2]) / np.sqrt(2.0)


def _check_residue(value: float, what: str):
    if abs(value) > SYMMETRY_TOL:
        raise NumericIntegrityError(f"{what} carries imaginary residue {value:.3e}")


def _single_expectations(red: np.ndarray):
    """(<a>, <a^2>, <a^+ a>) from one single-mode density matrix."""
    d = red.shape[0]
    ks = np.arange(d)
    diag = np.diagonal(red)
    _check_residue(float(np.abs(diag.imag).max()), "<a^+ a>")
    n_mean = float((diag.real * ks).sum())
    sub1 = np.diagonal(red, offset=-1)                     # red[i+1, i]
    a_exp = complex((np.sqrt(ks[1:]) * sub1).sum())
    sub2 = np.diagonal(red, offset=-2)                     # red[i+2, i]
    i2 = np.arange(d - 2)
    a2_exp = complex((np.sqrt((i2 + 1.0) * (i2 + 2.0)) * sub2).sum())
    return a_exp, a2_exp, n_mean


def _pair_expectations(t: np.ndarray):
    """(<a_1 a_2>, <a_1^+ a_2>) from a two-mode tensor t[r1, r2, c1, c2]."""
    d1, d2 = t.shape[0], t.shape[1]
    w = np.sqrt(np.arange(1, d1))[:, None] * np.sqrt(np.arange(1, d2))[None, :]
    both_down = np.einsum("abab->ab", t[1:, 1:, :-1, :-1])
    aa = complex((w * both_down).sum())
    exchange = np.einsum("abab->ab", t[:-1, 1:, 1:, :-1])
    ada = complex((w * exchange).sum())
    return aa, ada


def _reduced(state: FockState, keep):
    others = [m for m in range(state.n_modes) if m not in keep]
    if not others:
        return state.matrix
    return partial_trace(state, others).matrix


def mean_vector(state: FockState) -> np.ndarray:
    """X_j = <R_j>, exactly real after residue check."""
    check_trace_budget(state)
    X = np.empty(2 * state.n_modes)
    for k in range(state.n_modes):
        a_exp, _, _ = _single_expectations(_reduced(state, (k,)))
        X[2 * k] = np.sqrt(2.0) * a_exp.real
        X[2 * k + 1] = np.sqrt(2.0) * a_exp.imag
    return X


def covariance_matrix(state: FockState) -> np.ndarray:
    return moments(state).cov


def moments(state: FockState) -> Moments:
    """Both moments in one pass over per-mode and per-pair expectations.

    Second moments are assembled from <a_k a_j> and <a_k^+ a_j>; with the
    quadrature scaling above this gives sigma[vacuum] = I/2.
    """
    check_trace_budget(state)
    n = state.n_modes
    X = np.empty(2 * n)
    cov = np.empty((2 * n, 2 * n))
    for k in range(n):
        a_exp, a2_exp, n_mean = _single_expectations(_reduced(state, (k,)))
        X[2 * k] = np.sqrt(2.0) * a_exp.real
        X[2 * k + 1] = np.sqrt(2.0) * a_exp.imag
        qq = a2_exp.real + n_mean + 0.5 - X[2 * k] ** 2
        pp = -a2_exp.real + n_mean + 0.5 - X[2 * k + 1] ** 2
        qp = a2_exp.imag - X[2 * k] * X[2 * k + 1]
        cov[2 * k, 2 * k] = qq
        cov[2 * k + 1, 2 * k + 1] = pp
        cov[2 * k, 2 * k + 1] = cov[2 * k + 1, 2 * k] = qp
    for k in range(n):
        for j in range(k + 1, n):
            pair = _reduced(state, (k, j))
            dk, dj = state.cutoffs[k], state.cutoffs[j]
            aa, ada = _pair_expectations(pair.reshape(dk, dj, dk, dj))
            qq = aa.real + ada.real - X[2 * k] * X[2 * j]
            pp = -aa.real + ada.real - X[2 * k + 1] * X[2 * j + 1]
            qp = aa.imag + ada.imag - X[2 * k] * X[2 * j + 1]
            pq = aa.imag - ada.imag - X[2 * k + 1] * X[2 * j]
            cov[2 * k, 2 * j] = cov[2 * j, 2 * k] = qq
            cov[2 * k + 1, 2 * j + 1] = cov[2 * j + 1, 2 * k + 1] = pp
            cov[2 * k, 2 * j + 1] = cov[2 * j + 1, 2 * k] = qp
            cov[2 * k + 1, 2 * j] = cov[2 * j, 2 * k + 1] = pq
    return Moments(mean=X, cov=cov)


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Moduli of the eigenvalues of i Omega sigma, one per mode, descending."""
    cov = np.asarray(cov, dtype=float)
    n = cov.shape[0] // 2
    if cov.shape != (2 * n, 2 * n) or cov.shape[0] % 2:
        raise DomainError(f"covariance must be 2n x 2n, got {cov.shape}")
    ev = np.linalg.eigvals(1j * symplectic_form(n) @ cov)
    nus = np.sort(np.abs(ev))[::2]
    return nus[::-1].copy()


def check_uncertainty(cov: np.ndarray, slack: float = UNCERTAINTY_SLACK):
    """Raise DomainError unless all symplectic eigenvalues are >= 1/2 - slack."""
    nus = symplectic_eigenvalues(cov)
    if nus.min() < 0.5 - slack:
        raise DomainError(
            f"unphysical covariance: symplectic eigenvalue {nus.min():.8f} < 1/2"
        )
    return nus
