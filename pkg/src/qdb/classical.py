"""Classical Markov chains, their balance conditions and the quantum embedding.

Probabilities are compared with an absolute tolerance of 1e-12; inputs are
expected to be exact rationals from JSON. Zero probabilities are allowed
everywhere except in the reverse chain and the dual-consistency check, which
need the pushed-forward distribution to be strictly positive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .balance import dual_channel
from .channel import Channel, DensityMatrix
from .errors import DimensionMismatch, NonInvolutive, ZeroSigmaComponent
from .linalg import frobenius
from .tolerances import DEFAULT_TOLS, ToleranceConfig


@dataclass(frozen=True)
class MarkovChain:
    """Row-stochastic transition matrix tau with a start distribution rho."""

    tau: np.ndarray
    rho: np.ndarray

    @classmethod
    def create(cls, tau, rho, tols: ToleranceConfig = DEFAULT_TOLS) -> "MarkovChain":
        tau = np.asarray(tau, dtype=float)
        rho = np.asarray(rho, dtype=float)
        if tau.ndim != 2 or rho.ndim != 1 or tau.shape[0] != rho.shape[0]:
            raise DimensionMismatch(
                f"tau {tau.shape} and rho {rho.shape} are inconsistent"
            )
        t = tols.classical_tol
        if tau.min(initial=0.0) < -t or rho.min(initial=0.0) < -t:
            raise DimensionMismatch("negative probabilities")
        if np.max(np.abs(tau.sum(axis=1) - 1.0)) > t:
            raise DimensionMismatch("tau rows must sum to 1")
        if abs(rho.sum() - 1.0) > t:
            raise DimensionMismatch("rho must sum to 1")
        return cls(tau=tau, rho=rho)

    @property
    def n_from(self) -> int:
        return self.tau.shape[0]

    @property
    def n_to(self) -> int:
        return self.tau.shape[1]

    def pushforward(self) -> np.ndarray:
        return self.rho @ self.tau


@dataclass(frozen=True)
class ClassicalVerdict:
    passed: bool
    max_violation: float
    worst_pair: tuple[int, int] | None


def check_classical_db(
    mc: MarkovChain, tols: ToleranceConfig = DEFAULT_TOLS
) -> ClassicalVerdict:
    """rho_i tau_ij = rho_j tau_ji for all pairs, within classical_tol."""
    if mc.n_from != mc.n_to:
        raise DimensionMismatch("detailed balance needs a square chain")
    flow = mc.rho[:, None] * mc.tau
    gap = np.abs(flow - flow.T)
    worst = np.unravel_index(int(np.argmax(gap)), gap.shape)
    max_violation = float(gap[worst])
    passed = max_violation <= tols.classical_tol
    return ClassicalVerdict(
        passed=passed,
        max_violation=max_violation,
        worst_pair=None if passed else (int(worst[0]), int(worst[1])),
    )


def check_classical_db_parity(
    mc: MarkovChain, pi, tols: ToleranceConfig = DEFAULT_TOLS
) -> ClassicalVerdict:
    """rho_i tau_ij = rho_pi(j) tau_pi(j)pi(i) for an involutive permutation pi."""
    if mc.n_from != mc.n_to:
        raise DimensionMismatch("detailed balance needs a square chain")
    pi = list(pi)
    if len(pi) != mc.n_from:
        raise DimensionMismatch("permutation length does not match the chain")
    for i in range(len(pi)):
        if pi[pi[i]] != i:
            raise NonInvolutive("permutation must be its own inverse")
    flow = mc.rho[:, None] * mc.tau
    reversed_flow = np.empty_like(flow)
    for i in range(mc.n_from):
        for j in range(mc.n_from):
            reversed_flow[i, j] = flow[pi[j], pi[i]]
    gap = np.abs(flow - reversed_flow)
    worst = np.unravel_index(int(np.argmax(gap)), gap.shape)
    max_violation = float(gap[worst])
    passed = max_violation <= tols.classical_tol
    return ClassicalVerdict(
        passed=passed,
        max_violation=max_violation,
        worst_pair=None if passed else (int(worst[0]), int(worst[1])),
    )


def embed(mc: MarkovChain, tols: ToleranceConfig = DEFAULT_TOLS) -> Channel:
    """Quantum channel with E(|i><j|) = delta_ij sum_k tau_jk |k><k|."""
    m, n = mc.n_from, mc.n_to
    choi4 = np.zeros((m, n, m, n), dtype=complex)
    for i in range(m):
        for k in range(n):
            choi4[i, k, i, k] = mc.tau[i, k]
    return Channel(
        dim_in=m,
        dim_out=n,
        choi_std=choi4.reshape(m * n, m * n),
        trace_preserving=True,
    )


def state_of(mc: MarkovChain, tols: ToleranceConfig = DEFAULT_TOLS) -> DensityMatrix:
    """The start distribution as a diagonal density matrix."""
    return DensityMatrix.from_matrix(np.diag(mc.rho.astype(complex)), tols)


def reverse_chain(mc: MarkovChain, tols: ToleranceConfig = DEFAULT_TOLS) -> MarkovChain:
    """Reverse transition matrix tau'_kj = (rho_j / sigma_k) tau_jk.

    The reversed chain runs from the pushed-forward distribution sigma back
    to rho; sigma_k tau'_kj = rho_j tau_jk holds exactly by construction.
    """
    sigma = mc.pushforward()
    if sigma.min(initial=np.inf) <= tols.classical_tol:
        raise ZeroSigmaComponent(
            f"pushed-forward distribution has a (near-)zero entry {sigma.min():.3e}"
        )
    tau_rev = (mc.rho[None, :] * mc.tau.T) / sigma[:, None]
    return MarkovChain.create(tau=tau_rev, rho=sigma, tols=tols)


@dataclass(frozen=True)
class DualConsistency:
    passed: bool
    residual: float


def verify_classical_dual_consistency(
    mc: MarkovChain, tols: ToleranceConfig = DEFAULT_TOLS
) -> DualConsistency:
    """The quantum dual of the embedded chain equals the embedded reverse chain."""
    if mc.rho.min(initial=np.inf) <= tols.classical_tol:
        raise ZeroSigmaComponent("rho must be strictly positive for the dual")
    reversed_embedded = embed(reverse_chain(mc, tols), tols)
    dual = dual_channel(embed(mc, tols), state_of(mc, tols), tols)
    residual = frobenius(dual.choi_std - reversed_embedded.choi_std)
    return DualConsistency(passed=residual <= tols.consistency_tol, residual=residual)
