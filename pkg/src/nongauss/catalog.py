"""Constructors for the states under study, plus the random-state sampler."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError
from .fock import (
    FockState,
    basis_state,
    coherent_cutoff,
    displacement,
    fock_cutoff,
    squeeze,
    squeezed_cutoff,
    thermal_cutoff,
    thermal_state,
)

RANDOM_DIM_MAX = 20


def cat_cutoff(alpha: float) -> int:
    """Default truncation for coherent superpositions, with extra headroom."""
    a = abs(alpha)
    return max(2, math.ceil(a * a + 6.0 * a + 15.0))


def make_fock(p: int, cutoff: Optional[int] = None) -> FockState:
    if p < 0:
        raise DomainError("photon number must be >= 0")
    d = cutoff if cutoff is not None else fock_cutoff(p)
    return basis_state((p,), (d,))


def make_coherent(alpha: complex, cutoff: Optional[int] = None) -> FockState:
    d = cutoff if cutoff is not None else coherent_cutoff(alpha)
    op = displacement(alpha, d)
    return FockState(vector=op.matrix[:, 0], flags=op.flags)


def make_squeezed_vacuum(r: float, cutoff: Optional[int] = None) -> FockState:
    d = cutoff if cutoff is not None else squeezed_cutoff(r)
    op = squeeze(r, d)
    return FockState(vector=op.matrix[:, 0], flags=op.flags)


def make_thermal(n_t: float, cutoff: Optional[int] = None) -> FockState:
    d = cutoff if cutoff is not None else thermal_cutoff(n_t)
    return thermal_state(n_t, d)


def make_cat(alpha: float, phi: float, cutoff: Optional[int] = None) -> FockState:
    """Normalized cos(phi)|alpha> + sin(phi)|-alpha>.

    The normalization 1 + sin(2 phi) exp(-2 alpha^2) is the analytic one;
    any residual norm deficit is truncation and stays on the state.
    """
    if alpha <= 0:
        raise DomainError("cat amplitude must be positive")
    d = cutoff if cutoff is not None else cat_cutoff(alpha)
    op = displacement(alpha, d)
    plus = op.matrix[:, 0]
    minus = op.matrix.conj().T[:, 0]  # D(-alpha) = D(alpha)^+
    norm = 1.0 + math.sin(2.0 * phi) * math.exp(-2.0 * alpha * alpha)
    vec = (math.cos(phi) * plus + math.sin(phi) * minus) / math.sqrt(norm)
    return FockState(vector=vec, flags=op.flags)


def make_bell_like(kind: str, phi: float, cutoffs=None) -> FockState:
    """Two-mode superpositions cos(phi)|0,0> + sin(phi)|1,1>  (kind='phi')
    or cos(phi)|0,1> + sin(phi)|1,0>  (kind='psi')."""
    if cutoffs is None:
        cutoffs = (2, 2)
    c1, c2 = cutoffs
    if c1 < 2 or c2 < 2:
        raise DomainError("bell-like states need cutoffs >= 2 in each mode")
    kind = kind.lower()
    if kind == "phi":
        lo, hi = (0, 0), (1, 1)
    elif kind == "psi":
        lo, hi = (0, 1), (1, 0)
    else:
        raise DomainError(f"unknown bell-like kind {kind!r}")
    v = (math.cos(phi) * basis_state(lo, cutoffs).vector
         + math.sin(phi) * basis_state(hi, cutoffs).vector)
    return FockState(vector=v, cutoffs=cutoffs)


# ---------------------------------------------------------------------------
# random states


def _as_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def haar_unitary(dim: int, seed=None) -> np.ndarray:
    """Haar-distributed unitary via a complex-normal matrix and QR with
    the R-diagonal phase correction."""
    rng = _as_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    z /= math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))[None, :]


def simplex_point(dim: int, seed=None) -> np.ndarray:
    """Uniform point on the probability simplex (normalized exponentials)."""
    rng = _as_rng(seed)
    e = rng.exponential(size=dim)
    return e / e.sum()


def random_state(d: int, seed=None) -> FockState:
    """Random density matrix on span{|0>, ..., |d>}: U Lambda U^+ with
    Lambda uniform on the simplex and U Haar on dimension d + 1."""
    if d < 0 or d > RANDOM_DIM_MAX:
        raise DomainError(f"random-state photon number must lie in [0, {RANDOM_DIM_MAX}]")
    if d == 0:
        return basis_state((0,), (2,))
    rng = _as_rng(seed)
    lam = simplex_point(d + 1, rng)
    u = haar_unitary(d + 1, rng)
    rho = (u * lam[None, :]) @ u.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return FockState(rho)


def sample_streams(seed: int, count: int):
    """Independent child generators for reproducible parallel sampling."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


# ---------------------------------------------------------------------------
# one entry point for the CLI


@dataclass(frozen=True)
class CatalogSpec:
    """Family tag plus parameters, as parsed from the command line."""

    family: str
    p: int = 0
    n: int = 1
    alpha: float = 1.0
    phi: float = 0.0
    r: float = 0.5
    n_t: float = 1.0
    d: int = 2
    seed: Optional[int] = None
    cutoff: Optional[int] = None

    def build(self) -> FockState:
        f = self.family.lower()
        if f == "fock":
            return make_fock(self.p, self.cutoff)
        if f == "coherent":
            return make_coherent(self.alpha, self.cutoff)
        if f == "squeezed":
            return make_squeezed_vacuum(self.r, self.cutoff)
        if f == "thermal":
            return make_thermal(self.n_t, self.cutoff)
        if f == "cat":
            return make_cat(self.alpha, self.phi, self.cutoff)
        if f in ("bell-phi", "bell-psi"):
            cutoffs = (self.cutoff, self.cutoff) if self.cutoff else None
            return make_bell_like(f.split("-")[1], self.phi, cutoffs)
        if f == "random":
            return random_state(self.d, self.seed)
        raise DomainError(f"unknown state family {self.family!r}")
