"""Loss (Gaussifying) and photon-subtraction (de-Gaussifying) channels."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import lil_matrix
from scipy.sparse.linalg import expm_multiply

from .errors import ConditioningError, DomainError, NumericIntegrityError
from .fock import FockState, squeeze, squeezed_cutoff

CLICK_FLOOR = 1e-12
IPS_CUTOFF_CAP = 192


# ---------------------------------------------------------------------------
# loss


def loss_kraus(eta: float, cutoff: int):
    """Kraus operators V_m = sqrt((1-eta)^m / m!) a^m eta^((n-m)/2), m < cutoff.

    Matrix elements reduce to V_m[k-m, k] = sqrt(C(k, m) (1-eta)^m eta^(k-m)),
    so on a truncated space the family still resolves the identity exactly and
    the channel is trace preserving.
    """
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"eta must lie in [0, 1], got {eta}")
    ops = []
    for m in range(cutoff):
        v = np.zeros((cutoff, cutoff), dtype=complex)
        for k in range(m, cutoff):
            v[k - m, k] = math.sqrt(math.comb(k, m) * (1.0 - eta) ** m * eta ** (k - m))
        ops.append(v)
    return ops


def loss_apply(state: FockState, eta: float) -> FockState:
    """Zero-temperature damping: rho -> sum_m V_m rho V_m^+.

    The Kraus sum is evaluated by the recursion
    T_0 = eta^(n/2) rho eta^(n/2),  T_m = (a T_{m-1} a^+) (1-eta)/(eta m),
    which costs O(cutoff^3) overall and is exact on the truncated space.
    """
    if state.n_modes != 1:
        raise DomainError("loss channel is single-mode")
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"eta must lie in [0, 1], got {eta}")
    if eta == 1.0:
        return state
    d = state.cutoffs[0]
    rho = state.matrix
    if eta == 0.0:
        out = np.zeros_like(rho)
        out[0, 0] = np.trace(rho)
        return FockState(out, cutoffs=state.cutoffs, flags=state.flags)
    half = eta ** (0.5 * np.arange(d))
    work = (half[:, None] * rho) * half[None, :]
    out = work.copy()
    ratio = (1.0 - eta) / eta
    for m in range(1, d):
        side = d - m
        low = np.sqrt(np.arange(1, side + 1))
        work = (low[:, None] * work[1:, 1:]) * low[None, :] * (ratio / m)
        out[:side, :side] += work
    result = FockState(out, cutoffs=state.cutoffs, flags=state.flags)
    if abs(result.trace() - state.trace()) > 1e-9:
        raise NumericIntegrityError(
            f"loss channel changed the trace by {result.trace() - state.trace():.2e}"
        )
    return result


def loss_fock_diagonal(p: int, eta: float) -> np.ndarray:
    """Binomial populations of a number state after loss: C(p,l)(1-eta)^(p-l) eta^l."""
    if p < 0:
        raise DomainError("p must be a nonnegative integer")
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"eta must lie in [0, 1], got {eta}")
    return np.array([math.comb(p, l) * (1.0 - eta) ** (p - l) * eta ** l
                     for l in range(p + 1)])


@dataclass(frozen=True)
class LossChannel:
    eta: float

    def apply(self, state: FockState) -> FockState:
        return loss_apply(state, self.eta)


@dataclass(frozen=True)
class IdentityChannel:
    def apply(self, state: FockState) -> FockState:
        return state


# ---------------------------------------------------------------------------
# inconclusive photon subtraction


def _mixer_generator(theta: float, cutoffs):
    """Sparse generator i theta (a1^+ a2 + a2^+ a1) on the two-mode space."""
    d1, d2 = cutoffs
    g = lil_matrix((d1 * d2, d1 * d2), dtype=complex)
    for n1 in range(d1):
        for n2 in range(d2):
            i = n1 * d2 + n2
            if n1 + 1 < d1 and n2 >= 1:
                g[(n1 + 1) * d2 + (n2 - 1), i] += 1j * theta * math.sqrt((n1 + 1) * n2)
            if n1 >= 1 and n2 + 1 < d2:
                g[(n1 - 1) * d2 + (n2 + 1), i] += 1j * theta * math.sqrt(n1 * (n2 + 1))
    return g.tocsr()


def no_click_weights(efficiency: float, cutoff: int) -> np.ndarray:
    """Diagonal of the on-click element: 1 - (1 - eps)^n."""
    return 1.0 - (1.0 - efficiency) ** np.arange(cutoff)


def subtraction_kraus(transmissivity: float, cutoff: int):
    """Operators B_k = <k|_2 BS |0>_2 of mixing with vacuum, one per click count."""
    if not 0.0 <= transmissivity <= 1.0:
        raise DomainError("transmissivity must lie in [0, 1]")
    s = math.sqrt(1.0 - transmissivity)
    ops = []
    ns = np.arange(cutoff)
    log_fact = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, cutoff)))))
    for k in range(cutoff):
        b = np.zeros((cutoff, cutoff), dtype=complex)
        nn = ns[k:]
        logc = 0.5 * (log_fact[nn] - log_fact[nn - k] - log_fact[k])
        amp = np.exp(logc + 0.5 * (nn - k) *
                     (math.log(transmissivity) if transmissivity > 0 else -np.inf))
        if transmissivity == 0.0:
            amp = np.where(nn == k, 1.0, 0.0)
        b[nn - k, nn] = amp * (1j * s) ** k
        ops.append(b)
    return ops


def ips_apply(state: FockState, transmissivity: float, efficiency: float):
    """Conditional photon subtraction of an arbitrary single-mode state.

    Uses the vacuum-ancilla Kraus form of the beam-splitter construction
    (verified against the explicit two-mode route).  Returns the normalized
    conditional state and the click probability.
    """
    if state.n_modes != 1:
        raise DomainError("photon subtraction acts on a single mode here")
    if not 0.0 < efficiency <= 1.0:
        raise DomainError("efficiency must lie in (0, 1]")
    d = state.cutoffs[0]
    weights = no_click_weights(efficiency, d)
    rho = state.matrix
    out = np.zeros_like(rho)
    for k, b in enumerate(subtraction_kraus(transmissivity, d)):
        if weights[k] == 0.0:
            continue
        out += weights[k] * (b @ rho @ b.conj().T)
    p_click = float(np.trace(out).real)
    if p_click <= CLICK_FLOOR:
        raise ConditioningError(f"click probability {p_click:.3e} below floor")
    return FockState(out / p_click, cutoffs=state.cutoffs, flags=state.flags), p_click


def ips_state(r: float, transmissivity: float, efficiency: float, cutoff=None):
    """The conditional state of photon-subtracted squeezed vacuum.

    Builds S(r)|0> tensor |0>, mixes the modes at a beam splitter of the
    given transmissivity (applied to the pure vector with a sparse matrix
    exponential), projects the reflected mode on the on-click element and
    traces it out, then renormalizes by the click probability.

    Returns (FockState, click probability).
    """
    if r < 0:
        raise DomainError("squeezing r must be >= 0")
    if not 0.0 <= transmissivity <= 1.0:
        raise DomainError("transmissivity must lie in [0, 1]")
    if not 0.0 < efficiency <= 1.0:
        raise DomainError("efficiency must lie in (0, 1]")
    if cutoff is None:
        cutoff = min(squeezed_cutoff(r), IPS_CUTOFF_CAP)
    theta = math.acos(math.sqrt(transmissivity))
    psi_in = squeeze(r, cutoff).matrix[:, 0]
    vec = np.zeros(cutoff * cutoff, dtype=complex)
    vec[:: cutoff] = psi_in  # tensor with the vacuum of the reflected mode
    if theta != 0.0:
        vec = expm_multiply(_mixer_generator(theta, (cutoff, cutoff)), vec)
    psi = vec.reshape(cutoff, cutoff)
    weights = no_click_weights(efficiency, cutoff)
    unnorm = (psi * weights[None, :]) @ psi.conj().T
    p_click = float(np.trace(unnorm).real)
    if p_click <= CLICK_FLOOR:
        raise ConditioningError(f"click probability {p_click:.3e} below floor")
    return FockState(unnorm / p_click, cutoffs=(cutoff,)), p_click


@dataclass(frozen=True)
class IpsChannel:
    transmissivity: float
    efficiency: float

    def apply(self, state: FockState) -> FockState:
        out, _ = ips_apply(state, self.transmissivity, self.efficiency)
        return out
