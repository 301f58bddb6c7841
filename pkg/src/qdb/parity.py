"""Parity and reversing operations, and the balance checks that use them.

An (anti)unitary involution is held as a matrix plus a conjugation flag: the
antiunitary operator with matrix M acts on vectors as v -> M conj(v). The
operator-level conjugation Theta X Theta then reads M conj(X) conj(M), which
is derived once here and exercised against the vector-level action in the
test suite.

A reversing operation theta acts as theta(X) = Theta X^dagger Theta. Given a
basis that diagonalizes Theta (with real +-1 diagonal), theta factorizes into
the transposition in that basis composed with a parity conjugation; the
parity carries all the physics, the transposition belongs to the duality
theory itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .balance import CheckOutcome, check_invariance, dual_channel, kms_dual, _sigma_spectral, _transpose_in_basis
from .channel import (
    Channel,
    DensityMatrix,
    apply,
    adjoint,
    channel_from_map,
    cj_relative,
)
from .errors import (
    ConsistencyError,
    DimensionMismatch,
    NonInvolutive,
    NotDiagonalizedJointly,
    ThetaStateMismatch,
)
from .linalg import (
    as_complex,
    dagger,
    eigenvalue_clusters,
    frobenius,
    herm_eig,
    require_square,
    swap_operator,
    tensor,
)
from .tolerances import DEFAULT_TOLS, ToleranceConfig


@dataclass(frozen=True)
class ParityOp:
    """(Anti)unitary involution acting by conjugation, X -> P X P."""

    matrix: np.ndarray
    antiunitary: bool

    @classmethod
    def identity(cls, d: int) -> "ParityOp":
        return cls(matrix=np.eye(d, dtype=complex), antiunitary=False)

    @classmethod
    def conjugation(cls, d: int) -> "ParityOp":
        return cls(matrix=np.eye(d, dtype=complex), antiunitary=True)

    @classmethod
    def permutation(cls, perm, antiunitary: bool = False) -> "ParityOp":
        perm = list(perm)
        d = len(perm)
        for i in range(d):
            if perm[perm[i]] != i:
                raise NonInvolutive("permutation must be its own inverse")
        p = np.zeros((d, d), dtype=complex)
        for i, j in enumerate(perm):
            p[j, i] = 1.0
        return cls(matrix=p, antiunitary=antiunitary)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def validate(self, tols: ToleranceConfig = DEFAULT_TOLS) -> "ParityOp":
        m = self.matrix
        d = require_square(m, "parity matrix")
        eye = np.eye(d)
        if frobenius(dagger(m) @ m - eye) > tols.involution_tol:
            raise NonInvolutive("parity matrix is not unitary")
        square = m @ m.conj() if self.antiunitary else m @ m
        if frobenius(square - eye) > tols.involution_tol:
            raise NonInvolutive("parity operator does not square to the identity")
        return self


@dataclass(frozen=True)
class ReversingOp:
    """(Anti)unitary involution Theta defining theta(X) = Theta X^dagger Theta."""

    matrix: np.ndarray
    antiunitary: bool

    @classmethod
    def transposition(cls, d: int) -> "ReversingOp":
        return cls(matrix=np.eye(d, dtype=complex), antiunitary=True)

    @classmethod
    def hermitian_adjoint(cls, d: int) -> "ReversingOp":
        return cls(matrix=np.eye(d, dtype=complex), antiunitary=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def validate(self, tols: ToleranceConfig = DEFAULT_TOLS) -> "ReversingOp":
        ParityOp(matrix=self.matrix, antiunitary=self.antiunitary).validate(tols)
        return self


def _conjugate(matrix: np.ndarray, antiunitary: bool, x: np.ndarray) -> np.ndarray:
    if antiunitary:
        return matrix @ np.conj(x) @ np.conj(matrix)
    return matrix @ x @ matrix


def apply_parity(p: ParityOp, x) -> np.ndarray:
    """P X P, with conjugation of the argument in the antiunitary case."""
    x = as_complex(x)
    if x.shape != (p.dim, p.dim):
        raise DimensionMismatch(f"operand must be {p.dim}x{p.dim}, got {x.shape}")
    return _conjugate(p.matrix, p.antiunitary, x)


def apply_parity_vector(p: ParityOp, v) -> np.ndarray:
    v = as_complex(np.asarray(v)).ravel()
    return p.matrix @ (np.conj(v) if p.antiunitary else v)


def apply_reversing(th: ReversingOp, x) -> np.ndarray:
    """theta(X) = Theta X^dagger Theta."""
    x = as_complex(x)
    if x.shape != (th.dim, th.dim):
        raise DimensionMismatch(f"operand must be {th.dim}x{th.dim}, got {x.shape}")
    if th.antiunitary:
        return th.matrix @ x.T @ np.conj(th.matrix)
    return th.matrix @ dagger(x) @ th.matrix


def q_map(p: ParityOp, m: int) -> ParityOp:
    """The reversal-with-parity operator on the doubled system.

    Realized as the involution with matrix R (P (x) P) and the parity's
    conjugation flag; acting by conjugation it sends X (x) Y to P(Y) (x) P(X).
    """
    if p.dim != m:
        raise DimensionMismatch("parity dimension does not match system size")
    r = swap_operator(m, m)
    return ParityOp(matrix=r @ tensor(p.matrix, p.matrix), antiunitary=p.antiunitary)


def check_etdb_p(
    ch: Channel,
    rho: DensityMatrix,
    p: ParityOp,
    basis=None,
    tols: ToleranceConfig = DEFAULT_TOLS,
) -> CheckOutcome:
    """Balance of elementary transitions under a parity: residual of Q(kappa) = kappa.

    The raw check runs for any involution; when the parity does not commute
    with rho a warning is attached, since invariance of the state and the
    dual characterization are only available in the commuting case.
    """
    if ch.dim_in != ch.dim_out:
        raise DimensionMismatch("the balance check needs a square channel")
    p.validate(tols)
    rc = cj_relative(ch, rho, basis=basis, tols=tols)
    q = q_map(p, ch.dim_in)
    residual = frobenius(apply_parity(q, rc.kappa) - rc.kappa)
    warnings = ()
    commute_gap = frobenius(
        _conjugate(p.matrix, p.antiunitary, rho.matrix) - rho.matrix
    )
    if commute_gap > tols.theta_state_tol:
        warnings = (
            f"parity does not commute with rho (gap {commute_gap:.3e}); "
            "invariance and the dual characterization do not apply",
        )
    return CheckOutcome(
        kind="etdb-p",
        passed=residual <= tols.etdb_tol,
        residuals={"etdb_p": residual, "parity_state_commutator": commute_gap},
        tolerances={"etdb_tol": tols.etdb_tol},
        basis_source="canonical" if basis is None else "supplied",
        basis=rc.basis,
        warnings=warnings,
    )


def _parity_conjugated_channel(
    ch: Channel, pre: ParityOp, post: ParityOp, tols: ToleranceConfig
) -> Channel:
    """The (linear) composite post o E o pre as a Channel."""
    if pre.antiunitary != post.antiunitary:
        raise DimensionMismatch("parities must share the conjugation flag")

    def acted(x):
        return apply_parity(post, apply(ch, apply_parity(pre, x)))

    return channel_from_map(acted, dim_in=ch.dim_in, dim_out=ch.dim_out, tols=tols)


def parity_dual(
    ch: Channel,
    rho: DensityMatrix,
    p_a: ParityOp,
    p_b: ParityOp | None = None,
    tols: ToleranceConfig = DEFAULT_TOLS,
) -> Channel:
    """Dual with parity built in: P_A o E' o P_B with E' in the original bases.

    Consistency-asserted against the direct construction that reads
    Q(kappa) as the relative Choi matrix of the dual in the parity-rotated
    eigenbases.
    """
    if p_b is None:
        p_b = p_a
    if p_a.antiunitary != p_b.antiunitary:
        raise DimensionMismatch("parities must share the conjugation flag")
    p_a.validate(tols)
    p_b.validate(tols)
    prime = dual_channel(ch, rho, tols)
    route1 = _parity_conjugated_channel(prime, pre=p_b, post=p_a, tols=tols)

    # direct route: dual of P_B o E o P_A relative to P_A(rho), taken in the
    # parity-rotated rho/sigma eigenbases
    sandwiched = _parity_conjugated_channel(ch, pre=p_a, post=p_b, tols=tols)
    rho_p = DensityMatrix.from_matrix(apply_parity(p_a, rho.matrix), tols)
    _, sig_eig = _sigma_spectral(ch, rho, tols)
    basis_in = np.column_stack(
        [apply_parity_vector(p_a, rho.spectral.vectors[:, i]) for i in range(rho.dim)]
    )
    basis_out = np.column_stack(
        [apply_parity_vector(p_b, sig_eig.vectors[:, k]) for k in range(sig_eig.dim)]
    )
    route2 = dual_channel(
        sandwiched, rho_p, tols, basis_in=basis_in, basis_out=basis_out
    )
    gap = frobenius(route1.choi_std - route2.choi_std)
    if gap > tols.consistency_tol:
        raise ConsistencyError(
            f"parity dual routes disagree by {gap:.3e}"
        )
    return route1


def joint_diagonalize(
    rho: DensityMatrix, th: ReversingOp, tols: ToleranceConfig = DEFAULT_TOLS
) -> np.ndarray:
    """Unitary whose columns diagonalize rho and bring Theta to +-1 diagonal.

    Requires Theta rho = rho Theta. Within each rho eigenspace a unitary
    Theta restricts to a Hermitian involution and is diagonalized; an
    antiunitary restriction is a conjugation, for which an orthonormal basis
    of fixed vectors is grown from v + Theta v seeds (falling back to
    i v + Theta(i v) when a seed cancels).
    """
    th.validate(tols)
    if th.dim != rho.dim:
        raise DimensionMismatch("reversing operation does not match state dimension")
    n = th.matrix
    theta_rho_gap = frobenius(apply_reversing(th, rho.matrix) - rho.matrix)
    if theta_rho_gap > tols.theta_state_tol:
        raise ThetaStateMismatch(
            f"theta(rho) differs from rho by {theta_rho_gap:.3e}"
        )
    values = rho.spectral.values
    vectors = rho.spectral.vectors
    ctol = tols.cluster_tol(frobenius(rho.matrix))
    columns = []
    for sl in eigenvalue_clusters(values, ctol):
        block = vectors[:, sl]
        k = block.shape[1]
        if not th.antiunitary:
            restricted = dagger(block) @ n @ block
            leak = frobenius(n @ block - block @ restricted)
            if leak > 1e-8:
                raise ThetaStateMismatch(
                    f"Theta does not preserve a rho eigenspace (leak {leak:.3e})"
                )
            sub = herm_eig(restricted, tols)
            columns.append(block @ sub.vectors)
        else:
            restricted = dagger(block) @ n @ np.conj(block)
            leak = frobenius(n @ np.conj(block) - block @ restricted)
            if leak > 1e-8:
                raise ThetaStateMismatch(
                    f"Theta does not preserve a rho eigenspace (leak {leak:.3e})"
                )
            fixed: list[np.ndarray] = []
            for j in range(k):
                if len(fixed) == k:
                    break
                for seed in (np.eye(k)[:, j], 1j * np.eye(k)[:, j]):
                    if len(fixed) == k:
                        break
                    w = seed + restricted @ np.conj(seed)
                    for u in fixed:
                        w = w - u * np.real(np.vdot(u, w))
                    nw = np.linalg.norm(w)
                    if nw > 1e-8:
                        fixed.append(w / nw)
            if len(fixed) != k:
                raise NotDiagonalizedJointly(
                    "could not build a fixed-vector basis for the conjugation"
                )
            columns.append(block @ np.column_stack(fixed))
    return np.column_stack(columns)


def factor_theta(
    th: ReversingOp, basis, tols: ToleranceConfig = DEFAULT_TOLS
) -> ParityOp:
    """Split a reversing operation into transposition times a parity.

    ``basis`` must bring Theta to real +-1 diagonal form (as produced by
    ``joint_diagonalize``). The parity is Theta with its conjugation toggled:
    antiunitary Theta yields a unitary parity and vice versa. The
    factorization theta = T o parity = parity o T (transposes taken in the
    supplied basis) is re-asserted on the matrix units before returning.
    """
    th.validate(tols)
    basis = as_complex(basis)
    d = th.dim
    if basis.shape != (d, d) or frobenius(dagger(basis) @ basis - np.eye(d)) > 1e-9:
        raise NotDiagonalizedJointly("basis must be a unitary of matching dimension")
    if th.antiunitary:
        coords = dagger(basis) @ th.matrix @ np.conj(basis)
    else:
        coords = dagger(basis) @ th.matrix @ basis
    off = coords - np.diag(np.diag(coords))
    if frobenius(off) > 1e-8:
        raise NotDiagonalizedJointly("Theta is not diagonal in the supplied basis")
    diag = np.diag(coords)
    if np.max(np.abs(diag.imag)) > 1e-8 or np.max(np.abs(np.abs(diag.real) - 1.0)) > 1e-8:
        raise NotDiagonalizedJointly(
            "Theta must be +-1 diagonal in the supplied basis; rephase the basis"
        )
    signs = np.sign(diag.real)
    if th.antiunitary:
        parity = ParityOp(
            matrix=basis @ np.diag(signs).astype(complex) @ dagger(basis),
            antiunitary=False,
        )
    else:
        parity = ParityOp(
            matrix=basis @ np.diag(signs).astype(complex) @ basis.T,
            antiunitary=True,
        )
    parity.validate(tols)

    worst = 0.0
    for i in range(d):
        for j in range(d):
            unit = np.zeros((d, d), dtype=complex)
            unit[i, j] = 1.0
            lhs = apply_reversing(th, unit)
            mid1 = _transpose_in_basis(apply_parity(parity, unit), basis)
            mid2 = apply_parity(parity, _transpose_in_basis(unit, basis))
            worst = max(worst, frobenius(lhs - mid1), frobenius(lhs - mid2))
    if worst > tols.consistency_tol:
        raise ConsistencyError(
            f"factorization of theta fails on matrix units by {worst:.3e}"
        )
    return parity


def check_sqdb_theta(
    ch: Channel,
    rho: DensityMatrix,
    th: ReversingOp,
    tols: ToleranceConfig = DEFAULT_TOLS,
) -> CheckOutcome:
    """Standard detailed balance with a reversing operation.

    Evaluates theta o E_kms o theta = E and, independently, the factorized
    form parity o E_ac o parity = E with the parity from ``factor_theta``
    (transposes in the joint rho/Theta eigenbasis); the two evaluations are
    asserted to agree. Passes iff the residual clears ``sqdb_tol`` and the
    state is invariant.
    """
    if ch.dim_in != ch.dim_out:
        raise DimensionMismatch("the balance check needs a square channel")
    theta_rho_gap = frobenius(apply_reversing(th, rho.matrix) - rho.matrix)
    if theta_rho_gap > tols.theta_state_tol:
        raise ThetaStateMismatch(
            f"theta(rho) differs from rho by {theta_rho_gap:.3e}"
        )
    basis = joint_diagonalize(rho, th, tols)
    parity = factor_theta(th, basis, tols)

    kms = kms_dual(ch, rho, tols)

    def kms_form(y):
        return apply_reversing(th, apply(kms, apply_reversing(th, y)))

    d1 = channel_from_map(kms_form, ch.dim_in, ch.dim_out, tols)

    _, sig_eig = _sigma_spectral(ch, rho, tols)
    rho_half = (rho.spectral.vectors * np.sqrt(np.maximum(rho.spectral.values, 0.0))) @ dagger(
        rho.spectral.vectors
    )
    sig_inv_half = (sig_eig.vectors * (1.0 / np.sqrt(sig_eig.values))) @ dagger(sig_eig.vectors)
    adj = adjoint(ch, tols)

    def ac_joint(y):
        inner = sig_inv_half @ _transpose_in_basis(y, basis) @ sig_inv_half
        return rho_half @ _transpose_in_basis(apply(adj, inner), basis) @ rho_half

    def ac_form(y):
        return apply_parity(parity, ac_joint(apply_parity(parity, y)))

    d2 = channel_from_map(ac_form, ch.dim_in, ch.dim_out, tols)

    agreement = frobenius(d1.choi_std - d2.choi_std)
    if agreement > tols.consistency_tol:
        raise ConsistencyError(
            f"KMS-form and factorized AC-form evaluations disagree by {agreement:.3e}"
        )
    residual = frobenius(d1.choi_std - ch.choi_std)
    inv = check_invariance(ch, rho, tols)
    return CheckOutcome(
        kind="sqdb-theta",
        passed=residual <= tols.sqdb_tol and inv.passed,
        residuals={
            "sqdb_theta": residual,
            "invariance": inv.residuals["invariance"],
            "form_agreement": agreement,
        },
        tolerances={"sqdb_tol": tols.sqdb_tol, "inv_tol": tols.inv_tol},
        basis_source="joint",
        basis=basis,
    )


def shift_clock(m: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Cyclic shift U, clock V = diag(1, r, ..., r^(m-1)) and the DFT matrix F.

    r = exp(2 pi i / m); the pair satisfies V U = r U V and V = F^dagger U F
    with F[k, l] = r^(-kl) / sqrt(m). Componentwise conjugation in this basis
    negates the clock: C V C = V^dagger.
    """
    if m < 2:
        raise DimensionMismatch("shift/clock pair needs m >= 2")
    r = np.exp(2j * np.pi / m)
    u = np.zeros((m, m), dtype=complex)
    for i in range(m):
        u[(i + 1) % m, i] = 1.0
    v = np.diag(r ** np.arange(m))
    k, l = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    f = r ** (-(k * l)) / np.sqrt(m)
    return u, v, f
