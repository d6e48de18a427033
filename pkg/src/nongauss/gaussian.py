"""Reference Gaussian states: symplectic factorizations and Fock synthesis.

Any physical covariance matrix factors as sigma = S D S^T (Williamson) with
S symplectic and D = diag(nu_1, nu_1, ..., nu_n, nu_n).  S in turn factors
as passive * squeeze * passive (Euler).  The Gaussian state with moments
(X, sigma) is then synthesized on the Fock space as

    tau = D(alpha) P1 Sq(r) P2  [thermal product]  P2^+ Sq^+ P1^+ D^+

where the thermal occupations are n_k = nu_k - 1/2.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import block_diag, expm, schur, sqrtm

from .errors import DomainError, NumericIntegrityError, SynthesisError, TruncationWarning
from .fock import (
    FockOperator,
    FockState,
    annihilation,
    coherent_cutoff,
    embed,
    squeeze,
    squeezed_cutoff,
    thermal_cutoff,
    thermal_state,
    tensor,
)
from .moments import Moments, check_uncertainty, moments, symplectic_form

SYMPLECTIC_TOL = 1e-8
EULER_RESIDUAL_TOL = 1e-7
MOMENT_MATCH_WARN = 1e-6
MOMENT_MATCH_FAIL = 1e-5


@dataclass(frozen=True)
class SymplecticFactorization:
    """sigma = S diag(nu_1, nu_1, ...) S^T with S^T Omega S = Omega."""

    S: np.ndarray
    nus: np.ndarray

    def reconstruct(self) -> np.ndarray:
        d = np.repeat(self.nus, 2)
        return (self.S * d[None, :]) @ self.S.T


@dataclass(frozen=True)
class GaussianSpec:
    """Moments plus the synthesis recipe realizing them."""

    mean: np.ndarray
    cov: np.ndarray
    alphas: np.ndarray          # complex displacement per mode
    passive_out: np.ndarray     # n x n unitary, applied last before displacement
    squeezes: np.ndarray        # real r_k >= 0
    passive_in: np.ndarray      # n x n unitary, applied to the thermal product
    thermal_ns: np.ndarray      # n_k = nu_k - 1/2

    @property
    def n_modes(self) -> int:
        return len(self.alphas)

    def purity(self) -> float:
        """Exact purity of the ideal (untruncated) Gaussian state."""
        return float(np.prod(1.0 / (2.0 * self.thermal_ns + 1.0)))


# ---------------------------------------------------------------------------
# symplectic linear algebra


def williamson(cov: np.ndarray) -> SymplecticFactorization:
    """Williamson normal form of a physical covariance matrix.

    Pairs are ordered by descending symplectic eigenvalue; within each
    2x2 Schur block the column pair is swapped and sign-fixed so the
    result is deterministic for a given input.
    """
    cov = np.asarray(cov, dtype=float)
    n = cov.shape[0] // 2
    if cov.shape[0] % 2 or cov.shape[0] != cov.shape[1]:
        raise DomainError(f"covariance must be 2n x 2n, got {cov.shape}")
    if np.abs(cov - cov.T).max() > 1e-10:
        raise DomainError("covariance matrix is not symmetric")
    w, V = np.linalg.eigh(cov)
    if w.min() <= 0:
        raise DomainError(f"covariance not positive definite (min eig {w.min():.3e})")
    check_uncertainty(cov)
    root = (V * np.sqrt(w)) @ V.T
    omega = symplectic_form(n)
    M = root @ omega @ root
    T, Q = schur(M, output="real")
    nus = np.empty(n)
    for k in range(n):
        b = T[2 * k, 2 * k + 1]
        if b < 0:
            Q[:, [2 * k, 2 * k + 1]] = Q[:, [2 * k + 1, 2 * k]]
            b = -b
        nus[k] = b
    order = np.argsort(-nus, kind="stable")
    nus = nus[order]
    cols = np.empty_like(Q)
    for i, k in enumerate(order):
        pair = Q[:, 2 * k:2 * k + 2]
        # rotate the (q, p) pair by pi when needed to fix an overall sign
        lead = pair[np.argmax(np.abs(pair[:, 0])), 0]
        if lead < 0:
            pair = -pair
        cols[:, 2 * i:2 * i + 2] = pair
    S = root @ cols / np.sqrt(np.repeat(nus, 2))[None, :]
    fact = SymplecticFactorization(S=S, nus=nus)
    resid = np.abs(fact.reconstruct() - cov).max()
    symp = np.abs(S.T @ omega @ S - omega).max()
    if resid > SYMPLECTIC_TOL or symp > SYMPLECTIC_TOL:
        raise NumericIntegrityError(
            f"Williamson residuals too large (reconstruction {resid:.2e}, "
            f"symplectic {symp:.2e})"
        )
    return fact


def unitary_to_symplectic(u: np.ndarray) -> np.ndarray:
    """Real 2n x 2n representation of a passive (unitary) mode transformation."""
    u = np.asarray(u, dtype=complex)
    n = u.shape[0]
    O = np.zeros((2 * n, 2 * n))
    O[0::2, 0::2] = u.real
    O[0::2, 1::2] = -u.imag
    O[1::2, 0::2] = u.imag
    O[1::2, 1::2] = u.real
    return O


def symplectic_to_unitary(O: np.ndarray) -> np.ndarray:
    """Inverse of unitary_to_symplectic for orthogonal-symplectic input."""
    u = O[0::2, 0::2] + 1j * O[1::2, 0::2]
    back = unitary_to_symplectic(u)
    if np.abs(back - O).max() > 1e-8:
        raise DomainError("matrix is not orthogonal-symplectic in this convention")
    return u


def _mode_blocks(S: np.ndarray):
    """Complex pair (E, F) of a symplectic matrix: a' = E a + F a^+."""
    A = S[0::2, 0::2]
    B = S[0::2, 1::2]
    C = S[1::2, 0::2]
    D = S[1::2, 1::2]
    E = 0.5 * ((A + D) + 1j * (C - B))
    F = 0.5 * ((A - D) + 1j * (C + B))
    return E, F


def takagi(M: np.ndarray, tol: float = 1e-10):
    """Symmetric factorization M = W diag(s) W^T of a complex symmetric matrix.

    Singular values come back descending; degenerate groups are handled with
    a matrix square root on the subspace.
    """
    M = np.asarray(M, dtype=complex)
    if np.abs(M - M.T).max() > 1e-8 * max(1.0, np.abs(M).max()):
        raise DomainError("takagi input must be (complex) symmetric")
    v, s, wh = np.linalg.svd(M)
    w = wh.conj().T
    groups = []
    start = 0
    for i in range(1, len(s) + 1):
        if i == len(s) or abs(s[i] - s[start]) > tol * max(1.0, s[start]):
            groups.append((start, i))
            start = i
    blocks = []
    for a, b in groups:
        if s[a] < tol:
            blocks.append(np.eye(b - a, dtype=complex))
        else:
            blocks.append(sqrtm(v[:, a:b].T @ w[:, a:b]))
    W = v @ np.conj(block_diag(*blocks))
    return s, W


def euler_decompose(S: np.ndarray, tol: float = SYMPLECTIC_TOL):
    """Factor a symplectic matrix as O1 * diag(e^r, e^-r, ...) * O2.

    O1 and O2 are orthogonal-symplectic (passive); r_k >= 0 descending.
    Works through the complex (E, F) pair: an SVD of E fixes the squeeze
    magnitudes, and a Takagi factorization inside each degenerate singular
    group aligns the two passive factors with F.
    """
    S = np.asarray(S, dtype=float)
    n = S.shape[0] // 2
    omega = symplectic_form(n)
    if np.abs(S.T @ omega @ S - omega).max() > tol:
        raise DomainError("input is not symplectic within tolerance")
    E, F = _mode_blocks(S)
    uE, sc, vEh = np.linalg.svd(E)
    vE = vEh.conj().T
    G = uE.conj().T @ F @ vE.conj()
    W = np.eye(n, dtype=complex)
    start = 0
    groups = []
    for i in range(1, n + 1):
        if i == n or abs(sc[i] - sc[start]) > 1e-8 * max(1.0, sc[start]):
            groups.append((start, i))
            start = i
    for a, b in groups:
        if sc[a] ** 2 - 1.0 < 1e-10:
            continue
        _, Wb = takagi(G[a:b, a:b])
        W[a:b, a:b] = Wb
    uL = uE @ W
    uR = (vE @ W).conj().T
    rs = np.arccosh(np.maximum(sc, 1.0))
    O1 = unitary_to_symplectic(uL)
    O2 = unitary_to_symplectic(uR)
    z = np.repeat(rs, 2)
    z[1::2] *= -1.0
    resid = np.abs(O1 @ (np.exp(z)[:, None] * O2) - S).max()
    if resid > EULER_RESIDUAL_TOL:
        raise NumericIntegrityError(f"Euler factorization residual {resid:.2e}")
    return O1, rs, O2


def squeeze_symplectic(zeta: complex) -> np.ndarray:
    """Phase-space action of the single-mode squeezer S(zeta)."""
    r = abs(zeta)
    th = np.angle(zeta) if r > 0 else 0.0
    c, s = np.cosh(r), np.sinh(r)
    return np.array([[c + s * np.cos(th), s * np.sin(th)],
                     [s * np.sin(th), c - s * np.cos(th)]])


def beam_splitter_symplectic(theta: float) -> np.ndarray:
    u = np.array([[np.cos(theta), 1j * np.sin(theta)],
                  [1j * np.sin(theta), np.cos(theta)]])
    return unitary_to_symplectic(u)


# ---------------------------------------------------------------------------
# Fock-space synthesis


def _occupations(cutoffs):
    """Occupation tuple per basis index, shape (n_modes, dim)."""
    return np.indices(tuple(cutoffs)).reshape(len(cutoffs), -1)


def _passive_generator(h: np.ndarray, cutoffs) -> np.ndarray:
    """Dense sum h_kj a_k^+ a_j assembled entry-wise (no operator products)."""
    n = len(cutoffs)
    dim = math.prod(cutoffs)
    occ = _occupations(cutoffs)
    strides = np.ones(n, dtype=int)
    for k in range(n - 2, -1, -1):
        strides[k] = strides[k + 1] * cutoffs[k + 1]
    g = np.zeros((dim, dim), dtype=complex)
    cols = np.arange(dim)
    for k in range(n):
        for j in range(n):
            if h[k, j] == 0:
                continue
            if k == j:
                g[cols, cols] += h[k, k] * occ[k]
                continue
            ok = (occ[j] >= 1) & (occ[k] <= cutoffs[k] - 2)
            rows = cols[ok] + strides[k] - strides[j]
            val = np.sqrt(occ[j][ok] * (occ[k][ok] + 1.0))
            g[rows, cols[ok]] += h[k, j] * val
    return g


def _number_sectors(cutoffs):
    """Basis indices grouped by total occupation (ascending)."""
    total = _occupations(cutoffs).sum(axis=0)
    order = np.argsort(total, kind="stable")
    sectors = []
    start = 0
    sorted_tot = total[order]
    for i in range(1, len(order) + 1):
        if i == len(order) or sorted_tot[i] != sorted_tot[start]:
            sectors.append(order[start:i])
            start = i
    return sectors


def passive_unitary(u: np.ndarray, cutoffs) -> FockOperator:
    """Fock unitary with U^+ a U = u a, built from exp(i sum h_kj a_k^+ a_j).

    The generator conserves the total photon number, so the exponential is
    taken sector by sector.
    """
    u = np.asarray(u, dtype=complex)
    n = u.shape[0]
    if n != len(cutoffs):
        raise DomainError("unitary size does not match mode count")
    evals, evecs = np.linalg.eig(u)
    h = (evecs * np.angle(evals)) @ np.linalg.inv(evecs)
    h = 0.5 * (h + h.conj().T)
    if n == 1:
        return FockOperator(np.diag(np.exp(1j * h[0, 0].real * np.arange(cutoffs[0]))),
                            tuple(cutoffs))
    g = _passive_generator(h, cutoffs)
    out = np.zeros_like(g)
    for idx in _number_sectors(cutoffs):
        block = np.ix_(idx, idx)
        out[block] = expm(1j * g[block]) if len(idx) > 1 else np.exp(1j * g[block])
    return FockOperator(out, tuple(cutoffs))


def synthesis_cutoff(nu: float, r: float, alpha: complex, floor: int = 2,
                     moment_tol: float = 3e-7) -> int:
    """Per-mode cutoff for a displaced squeezed thermal component.

    Two tail budgets are added: a geometric one for the undisplaced core
    (ratio q tail perturbs <n> by about q^D (D + 1/(1-q))), and a
    displacement shift |alpha|^2 + 6 |alpha| sqrt(2 v_max) + 10 whose cross
    term accounts for occupation fluctuations along the stretched quadrature
    of variance v_max = nu e^(2r).
    """
    v_max = nu * math.exp(2.0 * r)
    n_eff = max(v_max - 0.5, 0.0)
    if n_eff <= 1e-12:
        tail = 2
    else:
        q = n_eff / (1.0 + n_eff)
        log_q = -math.log(q)
        inv = 1.0 / (1.0 - q)
        d = thermal_cutoff(n_eff)
        for _ in range(3):
            d = math.log((d + inv) / moment_tol) / log_q
        tail = math.ceil(d)
    a = abs(alpha)
    shift = math.ceil(a * a + 6.0 * a * math.sqrt(2.0 * max(v_max, 0.5)) + 10.0)
    return max(floor, shift + max(squeezed_cutoff(r) - 10, tail))


def _conjugate(rho, rho_is_diag, factor, cutoffs):
    """Apply rho -> F rho F^+ for one synthesis factor.

    Factors: ('diag', vec) diagonal in the number basis, ('mode', k, mat)
    local to one mode (applied axis-wise on the reshaped tensor), and
    ('sector', mat) conserving the total photon number (applied block by
    block).  rho may enter as a diagonal vector.
    """
    kind = factor[0]
    n = len(cutoffs)
    dim = math.prod(cutoffs)
    if kind == "diag":
        f = factor[1]
        if rho_is_diag:
            return np.abs(f) ** 2 * rho, True
        return (f[:, None] * rho) * f.conj()[None, :], False
    if rho_is_diag:
        rho = np.diag(rho).astype(complex)
    if kind == "mode":
        _, k, mat = factor
        t = rho.reshape(tuple(cutoffs) * 2)
        t = np.moveaxis(np.tensordot(mat, t, axes=([1], [k])), 0, k)
        t = np.moveaxis(np.tensordot(mat.conj(), t, axes=([1], [n + k])), 0, n + k)
        return t.reshape(dim, dim), False
    _, mat = factor
    out = np.empty_like(rho)
    sectors = _number_sectors(cutoffs)
    blocks = [mat[np.ix_(idx, idx)] for idx in sectors]
    for bi, idx_i in enumerate(sectors):
        for bj, idx_j in enumerate(sectors):
            sub = rho[np.ix_(idx_i, idx_j)]
            out[np.ix_(idx_i, idx_j)] = blocks[bi] @ sub @ blocks[bj].conj().T
    return out, False


def gaussian_state(mean, cov, cutoffs=None, max_cutoff: int = 2048):
    """Synthesize the Gaussian state with the given moments.

    Returns (GaussianSpec, FockState).  When ``cutoffs`` is omitted a
    per-mode cutoff is chosen from the recipe parameters so that the
    truncated tail stays inside the tail budget.  Diagonal factors (thermal
    core, single-mode phases) are applied as scalings; displacements use the
    closed-form matrix elements.
    """
    from .phasespace import displacement_matrix  # closed-form path, avoids a cycle

    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(cov, dtype=float)
    n = len(mean) // 2
    fact = williamson(cov)
    O1, rs, O2 = euler_decompose(fact.S)
    u1 = symplectic_to_unitary(O1)
    u2 = symplectic_to_unitary(O2)
    nts = np.maximum(fact.nus - 0.5, 0.0)
    alphas = (mean[0::2] + 1j * mean[1::2]) / np.sqrt(2.0)
    spec = GaussianSpec(mean=mean, cov=cov, alphas=alphas, passive_out=u1,
                        squeezes=rs, passive_in=u2, thermal_ns=nts)
    if cutoffs is None:
        # the passive factors spread occupation across modes, so every mode
        # gets the budget of the worst (nu, r, alpha) combination
        nu_top = float(fact.nus.max())
        r_top = float(rs.max()) if len(rs) else 0.0
        a_top = float(np.abs(alphas).max()) if len(alphas) else 0.0
        d = min(max_cutoff, synthesis_cutoff(nu_top, r_top, a_top))
        cutoffs = (d,) * n
    else:
        cutoffs = tuple(int(c) for c in cutoffs)
    thermal = tensor(*[thermal_state(nts[k], cutoffs[k]) for k in range(n)])

    def passive_factor(u):
        op = passive_unitary(u, cutoffs).matrix
        return ("diag", np.diag(op).copy()) if n == 1 else ("sector", op)

    chain = []
    if np.abs(u2 - np.eye(n)).max() >= 1e-14:
        chain.append(passive_factor(u2))
    for k in range(n):
        if rs[k] > 1e-14:
            chain.append(("mode", k, squeeze(rs[k], cutoffs[k]).matrix))
    if np.abs(u1 - np.eye(n)).max() >= 1e-14:
        chain.append(passive_factor(u1))
    for k in range(n):
        if abs(alphas[k]) > 1e-14:
            chain.append(("mode", k, displacement_matrix(alphas[k], cutoffs[k])))
    rho = np.diag(thermal.matrix).real.copy()
    is_diag = True
    for factor in chain:
        rho, is_diag = _conjugate(rho, is_diag, factor, cutoffs)
    if is_diag:
        rho = np.diag(rho)
    rho = rho.astype(complex)
    rho = 0.5 * (rho + rho.conj().T)
    return spec, FockState(rho, cutoffs=cutoffs, flags=thermal.flags)


def reference_gaussian(state: FockState, cutoffs=None, max_cutoff: int = 2048):
    """Moment-matched Gaussian reference of an arbitrary state.

    Returns (GaussianSpec, FockState).  The synthesized state is verified
    to reproduce the input moments; a mismatch above 1e-5 raises
    SynthesisError, above 1e-6 it is reported as a warning flag.
    """
    m = moments(state)
    if cutoffs is None:
        lo = state.cutoffs
    else:
        lo = tuple(int(c) for c in cutoffs)
    spec, tau = gaussian_state(m.mean, m.cov, cutoffs=cutoffs, max_cutoff=max_cutoff)
    if cutoffs is None and any(t < s for t, s in zip(tau.cutoffs, lo)):
        # never synthesize below the input's own cutoffs
        spec, tau = gaussian_state(m.mean, m.cov,
                                   cutoffs=tuple(max(t, s) for t, s in zip(tau.cutoffs, lo)))
    mt = moments(tau)
    gap = max(np.abs(mt.mean - m.mean).max(), np.abs(mt.cov - m.cov).max())
    if gap > MOMENT_MATCH_FAIL:
        raise SynthesisError(
            f"synthesized reference misses the target moments by {gap:.2e}"
        )
    if gap > MOMENT_MATCH_WARN:
        warnings.warn(f"reference moments off by {gap:.2e}", TruncationWarning,
                      stacklevel=2)
        tau = tau.with_flags("moment-mismatch")
    return spec, tau


def single_mode_params(m: Moments):
    """(alpha, zeta, n_t) of the general single-mode Gaussian state.

    The state is D(alpha) S(zeta) nu(n_t) S^+ D^+ with n_t = sqrt(det sigma) - 1/2.
    """
    if m.n_modes != 1:
        raise DomainError("single-mode moments required")
    cov = m.cov
    det = float(np.linalg.det(cov))
    if det < 0.25 - 1e-8:
        raise DomainError(f"det sigma = {det:.8f} < 1/4 is unphysical")
    nu = math.sqrt(max(det, 0.25))
    n_t = max(nu - 0.5, 0.0)
    M = cov / nu
    w, V = np.linalg.eigh(M)
    root = (V * np.sqrt(np.maximum(w, 0.0))) @ V.T
    c = 0.5 * (root[0, 0] + root[1, 1])
    r = float(np.arccosh(max(c, 1.0)))
    if r < 1e-12:
        zeta = 0.0 + 0.0j
    else:
        theta = math.atan2(2.0 * root[0, 1], root[0, 0] - root[1, 1])
        zeta = r * np.exp(1j * theta)
    alpha = complex(m.mean[0], m.mean[1]) / np.sqrt(2.0)
    return alpha, zeta, n_t
