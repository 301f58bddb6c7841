"""Detailed-balance checks and the reversed, Accardi-Cecchini and KMS duals.

The balance condition itself is always evaluated through the swap invariance
of the state-relative Choi matrix, R kappa R = kappa, never by hunting for a
witnessing decomposition (incomplete decompositions make the latter
unreliable). The reversed dual is built at the kappa level and the AC dual
from its closed form; the two independently coded routes are cross-asserted
on every call, so the identity between them is exercised as a regression
check rather than assumed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import (
    Channel,
    DensityMatrix,
    RelativeChoi,
    _is_trace_preserving,
    adjoint,
    apply,
    channel_from_map,
    cj_invert,
    cj_relative,
    reductions,
)
from .errors import (
    ConsistencyError,
    DimensionMismatch,
    EtdbNotSatisfied,
    NonInvertibleSigma,
)
from .linalg import (
    HermEigen,
    as_complex,
    dagger,
    eigenvalue_clusters,
    frobenius,
    herm_eig,
    swap_operator,
)
from .tolerances import DEFAULT_TOLS, ToleranceConfig
from .transitions import CJDecomposition, ElementaryTransition, decompose


@dataclass(frozen=True)
class CheckOutcome:
    """Verdict plus the residuals it is a pure function of."""

    kind: str
    passed: bool
    residuals: dict[str, float]
    tolerances: dict[str, float]
    basis_source: str = "canonical"
    basis: np.ndarray | None = None
    warnings: tuple[str, ...] = ()
    extras: dict = field(default_factory=dict)


@dataclass(frozen=True)
class BalanceReport:
    """Bundle of the individual check outcomes for one channel/state pair."""

    outcomes: list[CheckOutcome]

    def verdicts(self) -> dict[str, bool]:
        return {o.kind: o.passed for o in self.outcomes}


def check_invariance(
    ch: Channel, rho: DensityMatrix, tols: ToleranceConfig = DEFAULT_TOLS
) -> CheckOutcome:
    """Residual of E(rho) = rho."""
    if ch.dim_in != ch.dim_out:
        raise DimensionMismatch("invariance needs a channel from a system to itself")
    residual = frobenius(apply(ch, rho.matrix) - rho.matrix)
    return CheckOutcome(
        kind="invariance",
        passed=residual <= tols.inv_tol,
        residuals={"invariance": residual},
        tolerances={"inv_tol": tols.inv_tol},
    )


def check_etdb(
    ch: Channel,
    rho: DensityMatrix,
    basis=None,
    tols: ToleranceConfig = DEFAULT_TOLS,
) -> CheckOutcome:
    """Balance of elementary transitions: residual of R kappa R = kappa."""
    if ch.dim_in != ch.dim_out:
        raise DimensionMismatch("the balance check needs a square channel")
    rc = cj_relative(ch, rho, basis=basis, tols=tols)
    r = swap_operator(rc.dim_in, rc.dim_out)
    residual = frobenius(r @ rc.kappa @ dagger(r) - rc.kappa)
    return CheckOutcome(
        kind="etdb",
        passed=residual <= tols.etdb_tol,
        residuals={"etdb": residual},
        tolerances={"etdb_tol": tols.etdb_tol},
        basis_source="canonical" if basis is None else "supplied",
        basis=rc.basis,
    )


@dataclass(frozen=True)
class EtdbDecomposition:
    """Swap-adapted decompositions of a balanced channel.

    ``fixed`` lists transitions that are each their own reverse; ``paired``
    recombines opposite-sign swap eigenvectors into pairs of distinct
    transitions mapped onto each other by the reversal, mirroring the
    classical pairing of a transition with its opposite.
    """

    fixed: CJDecomposition
    paired: CJDecomposition
    paired_partners: list[int]


def etdb_decomposition(
    ch: Channel,
    rho: DensityMatrix,
    basis=None,
    tols: ToleranceConfig = DEFAULT_TOLS,
) -> EtdbDecomposition:
    """Decomposition adapted to the reversal, available once balance holds.

    Every eigenvalue cluster of kappa is swap-invariant, so each eigenspace
    splits into +1/-1 swap eigenvectors; those give the self-reversed form,
    and normalized sums/differences give the explicitly paired form.
    """
    outcome = check_etdb(ch, rho, basis=basis, tols=tols)
    if not outcome.passed:
        raise EtdbNotSatisfied(
            f"R kappa R differs from kappa by {outcome.residuals['etdb']:.3e}"
        )
    rc = cj_relative(ch, rho, basis=basis, tols=tols)
    m = rc.dim_in
    r = swap_operator(m, m)
    eig = herm_eig(rc.kappa, tols)
    cutoff = tols.rank_tol(float(eig.values[0])) if eig.dim else 0.0
    ctol = tols.cluster_tol(frobenius(rc.kappa))

    fixed_items: list[ElementaryTransition] = []
    paired_items: list[ElementaryTransition] = []
    partners: list[int] = []
    for sl in eigenvalue_clusters(eig.values, ctol):
        lam = float(np.mean(eig.values[sl]))
        if lam <= cutoff:
            continue
        block = eig.vectors[:, sl]
        restricted = dagger(block) @ r @ block
        sub = herm_eig(restricted, tols)
        vecs = block @ sub.vectors
        plus = [vecs[:, k] for k in range(vecs.shape[1]) if sub.values[k] > 0]
        minus = [vecs[:, k] for k in range(vecs.shape[1]) if sub.values[k] <= 0]
        for v in plus + minus:
            fixed_items.append(ElementaryTransition(psi=v.copy(), probability=lam))
        for a, b in zip(plus, minus):
            psi = (a + b) / np.sqrt(2.0)
            omega = (a - b) / np.sqrt(2.0)
            base = len(paired_items)
            paired_items.append(ElementaryTransition(psi=psi, probability=lam))
            paired_items.append(ElementaryTransition(psi=omega, probability=lam))
            partners.extend([base + 1, base])
        leftover = plus[len(minus):] + minus[len(plus):]
        for v in leftover:
            partners.append(len(paired_items))
            paired_items.append(ElementaryTransition(psi=v.copy(), probability=lam))
    fixed = CJDecomposition(items=fixed_items, dim_in=m, dim_out=m, source=rc)
    paired = CJDecomposition(items=paired_items, dim_in=m, dim_out=m, source=rc)
    return EtdbDecomposition(fixed=fixed, paired=paired, paired_partners=partners)


def _sigma_spectral(
    ch: Channel, rho: DensityMatrix, tols: ToleranceConfig
) -> tuple[np.ndarray, HermEigen]:
    sigma = apply(ch, rho.matrix)
    eig = herm_eig(sigma, tols)
    cutoff = tols.rank_tol(float(eig.values[0]))
    if float(eig.values[-1]) <= cutoff:
        raise NonInvertibleSigma(
            f"E(rho) has eigenvalue {eig.values[-1]:.3e} at or below rank cutoff"
        )
    return sigma, eig


def dual_channel(
    ch: Channel,
    rho: DensityMatrix,
    tols: ToleranceConfig = DEFAULT_TOLS,
    basis_in=None,
    basis_out=None,
) -> Channel:
    """The reversed channel: every elementary transition replaced by its opposite.

    Built at the kappa level: kappa' = R kappa R is read as the relative Choi
    matrix of the dual with respect to sigma = E(rho), then inverted. Expert
    bases may be supplied for the rho (``basis_in``) and sigma (``basis_out``)
    eigenbasis choices.
    """
    sigma, sig_eig = _sigma_spectral(ch, rho, tols)
    rc = cj_relative(ch, rho, basis=basis_in, tols=tols)
    r = swap_operator(rc.dim_in, rc.dim_out)
    kappa_rev = r @ rc.kappa @ dagger(r)
    sigma_dm = DensityMatrix(matrix=sigma, spectral=sig_eig)
    if basis_out is None:
        basis_out = sig_eig.vectors
        probs = sig_eig.values
    else:
        basis_out = as_complex(basis_out)
        in_basis = dagger(basis_out) @ sigma @ basis_out
        probs = np.diag(in_basis).real.copy()
    rc_rev = RelativeChoi(
        kappa=kappa_rev,
        rho=sigma_dm,
        basis=basis_out,
        probs=probs,
        dim_in=rc.dim_out,
        dim_out=rc.dim_in,
    )
    return cj_invert(rc_rev, tols)


def _transpose_in_basis(x: np.ndarray, basis: np.ndarray) -> np.ndarray:
    return basis @ (dagger(basis) @ x @ basis).T @ dagger(basis)


def _ac_dual_formula(
    ch: Channel,
    rho: DensityMatrix,
    tols: ToleranceConfig,
    basis_in=None,
    basis_out=None,
) -> Channel:
    """Closed-form dual: rho^1/2 [E_adj(sigma^-1/2 Y^T sigma^-1/2)]^T rho^1/2."""
    sigma, sig_eig = _sigma_spectral(ch, rho, tols)
    v = rho.spectral.vectors if basis_in is None else as_complex(basis_in)
    w = sig_eig.vectors if basis_out is None else as_complex(basis_out)
    rho_half = (rho.spectral.vectors * np.sqrt(np.maximum(rho.spectral.values, 0.0))) @ dagger(
        rho.spectral.vectors
    )
    sig_inv_half = (sig_eig.vectors * (1.0 / np.sqrt(sig_eig.values))) @ dagger(sig_eig.vectors)
    adj = adjoint(ch, tols)

    def acted(y):
        inner = sig_inv_half @ _transpose_in_basis(y, w) @ sig_inv_half
        return rho_half @ _transpose_in_basis(apply(adj, inner), v) @ rho_half

    return channel_from_map(acted, dim_in=ch.dim_out, dim_out=ch.dim_in, tols=tols)


def ac_dual(
    ch: Channel, rho: DensityMatrix, tols: ToleranceConfig = DEFAULT_TOLS
) -> Channel:
    """Accardi-Cecchini dual, computed from its closed form.

    Cross-asserted against the independently coded kappa-level reversed dual
    on every call; disagreement beyond ``consistency_tol`` raises.
    """
    formula = _ac_dual_formula(ch, rho, tols)
    reversed_route = dual_channel(ch, rho, tols)
    gap = frobenius(formula.choi_std - reversed_route.choi_std)
    if gap > tols.consistency_tol:
        raise ConsistencyError(
            f"closed-form dual and reversed dual disagree by {gap:.3e}"
        )
    return formula


def kms_dual(
    ch: Channel, rho: DensityMatrix, tols: ToleranceConfig = DEFAULT_TOLS
) -> Channel:
    """KMS dual (recovery map): rho^1/2 E_adj(sigma^-1/2 Y sigma^-1/2) rho^1/2.

    Basis-free; equals the AC dual with both basis transpositions cancelled.
    """
    _, sig_eig = _sigma_spectral(ch, rho, tols)
    rho_half = (rho.spectral.vectors * np.sqrt(np.maximum(rho.spectral.values, 0.0))) @ dagger(
        rho.spectral.vectors
    )
    sig_inv_half = (sig_eig.vectors * (1.0 / np.sqrt(sig_eig.values))) @ dagger(sig_eig.vectors)
    adj = adjoint(ch, tols)

    def acted(y):
        return rho_half @ apply(adj, sig_inv_half @ y @ sig_inv_half) @ rho_half

    return channel_from_map(acted, dim_in=ch.dim_out, dim_out=ch.dim_in, tols=tols)


def check_sqdb(
    ch: Channel, rho: DensityMatrix, tols: ToleranceConfig = DEFAULT_TOLS
) -> CheckOutcome:
    """Standard detailed balance: E(rho) = rho and the AC dual equals E."""
    if ch.dim_in != ch.dim_out:
        raise DimensionMismatch("the balance check needs a square channel")
    inv = check_invariance(ch, rho, tols)
    dual = ac_dual(ch, rho, tols)
    residual = frobenius(dual.choi_std - ch.choi_std)
    passed = inv.passed and residual <= tols.sqdb_tol
    return CheckOutcome(
        kind="sqdb",
        passed=passed,
        residuals={"sqdb": residual, "invariance": inv.residuals["invariance"]},
        tolerances={"sqdb_tol": tols.sqdb_tol, "inv_tol": tols.inv_tol},
    )


def kappa_reductions_gap(ch: Channel, rho: DensityMatrix, tols: ToleranceConfig = DEFAULT_TOLS) -> float:
    """|| Tr_1 kappa - Tr_2 kappa ||_F, the one-line invariance witness."""
    rc = cj_relative(ch, rho, tols=tols)
    to_a, to_b = reductions(rc)
    return frobenius(to_a - to_b)
