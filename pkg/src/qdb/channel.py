"""Channels and the state-relative Choi duality.

A channel from an m-dimensional system A to an n-dimensional system B is
stored as its standard Choi matrix

    choi_std = sum_ij |i><j| (x) E(|i><j|)

on H_A (x) H_B (computational basis, no 1/m normalization). Complete
positivity is always verified on construction; trace preservation is
detected and recorded as a flag, since positive non-trace-preserving maps
are first-class citizens of the duality theory.

The state-relative representation ``RelativeChoi`` carries

    kappa = sum_ij p_i^(1/2) p_j^(1/2) |v_i><v_j| (x) E(|v_i><v_j|)

for an eigenbasis {v_i} of the state rho with eigenvalues p_i. By default
the canonical basis from ``linalg.herm_eig`` is used so that kappa is
reproducible even for degenerate rho; an explicit basis can be supplied
through the expert entry points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatch,
    NonInvertibleState,
    NotPositiveSemidefinite,
)
from .linalg import HermEigen, as_complex, dagger, frobenius, herm_eig
from .tolerances import DEFAULT_TOLS, ToleranceConfig


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian PSD trace-one matrix with cached spectral data."""

    matrix: np.ndarray
    spectral: HermEigen

    @classmethod
    def from_matrix(cls, m, tols: ToleranceConfig = DEFAULT_TOLS) -> "DensityMatrix":
        m = as_complex(m)
        spectral = herm_eig(m, tols)  # also enforces Hermiticity
        top = float(spectral.values[0])
        if float(spectral.values[-1]) < -tols.psd_tol * max(1.0, top):
            raise NotPositiveSemidefinite(
                f"state has eigenvalue {spectral.values[-1]:.3e}"
            )
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > tols.trace_tol:
            raise DimensionMismatch(f"state trace {tr} is not 1")
        return cls(matrix=m, spectral=spectral)

    @classmethod
    def maximally_mixed(cls, d: int) -> "DensityMatrix":
        return cls.from_matrix(np.eye(d) / d)

    @classmethod
    def diagonal(cls, probs) -> "DensityMatrix":
        return cls.from_matrix(np.diag(np.asarray(probs, dtype=float)))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def min_eigenvalue(self) -> float:
        return float(self.spectral.values[-1])

    def is_invertible(self, tols: ToleranceConfig = DEFAULT_TOLS) -> bool:
        return self.min_eigenvalue() > tols.rank_tol(float(self.spectral.values[0]))


@dataclass(frozen=True)
class Channel:
    """Completely positive linear map held as its standard Choi matrix."""

    dim_in: int
    dim_out: int
    choi_std: np.ndarray
    trace_preserving: bool

    @property
    def choi_tensor(self) -> np.ndarray:
        """choi_std reshaped to [i, a, j, b] with E(|i><j|)[a, b] blocks."""
        m, n = self.dim_in, self.dim_out
        return self.choi_std.reshape(m, n, m, n)

    def __post_init__(self):
        d = self.dim_in * self.dim_out
        if self.choi_std.shape != (d, d):
            raise DimensionMismatch(
                f"choi_std must be {d}x{d}, got {self.choi_std.shape}"
            )


def _check_choi_psd(choi: np.ndarray, tols: ToleranceConfig) -> None:
    eig = herm_eig(choi, tols)
    top = float(eig.values[0]) if eig.dim else 0.0
    if eig.dim and float(eig.values[-1]) < -tols.psd_tol * max(1.0, top):
        raise NotPositiveSemidefinite(
            f"Choi matrix has eigenvalue {eig.values[-1]:.3e}; map is not CP"
        )


def _is_trace_preserving(choi4: np.ndarray, tols: ToleranceConfig) -> bool:
    m = choi4.shape[0]
    reduced = np.einsum("iaja->ij", choi4)
    return frobenius(reduced - np.eye(m)) <= tols.tp_tol


def from_choi(
    choi, dim_in: int, dim_out: int, tols: ToleranceConfig = DEFAULT_TOLS
) -> Channel:
    """Build a channel from a standard Choi matrix, verifying the Choi criterion."""
    choi = as_complex(choi)
    ch = Channel(
        dim_in=dim_in,
        dim_out=dim_out,
        choi_std=choi,
        trace_preserving=_is_trace_preserving(
            choi.reshape(dim_in, dim_out, dim_in, dim_out), tols
        ),
    )
    _check_choi_psd(choi, tols)
    return ch


def from_kraus(ops, tols: ToleranceConfig = DEFAULT_TOLS) -> Channel:
    """Channel from Kraus operators (all n x m)."""
    ops = [as_complex(k) for k in ops]
    if not ops:
        raise DimensionMismatch("need at least one Kraus operator")
    n, m = ops[0].shape
    for k in ops:
        if k.shape != (n, m):
            raise DimensionMismatch("inconsistent Kraus operator shapes")
    stack = np.stack(ops)
    choi4 = np.einsum("kai,kbj->iajb", stack, stack.conj())
    total = np.einsum("kai,kab->ib", stack.conj(), stack)
    tp = frobenius(total - np.eye(m)) <= tols.tp_tol
    return Channel(
        dim_in=m, dim_out=n, choi_std=choi4.reshape(m * n, m * n), trace_preserving=tp
    )


def identity_channel(d: int) -> Channel:
    choi4 = np.einsum("ia,jb->iajb", np.eye(d, dtype=complex), np.eye(d, dtype=complex))
    # E(|i><j|) = |i><j|: choi4[i, a, j, b] = delta_ia delta_jb
    return Channel(dim_in=d, dim_out=d, choi_std=choi4.reshape(d * d, d * d), trace_preserving=True)


def apply(ch: Channel, x) -> np.ndarray:
    """Evaluate E(X) by contracting X against the Choi tensor."""
    x = as_complex(x)
    if x.shape != (ch.dim_in, ch.dim_in):
        raise DimensionMismatch(
            f"operator must be {ch.dim_in}x{ch.dim_in}, got {x.shape}"
        )
    return np.einsum("ij,iajb->ab", x, ch.choi_tensor)


def kraus_ops(ch: Channel, tols: ToleranceConfig = DEFAULT_TOLS) -> list[np.ndarray]:
    """Kraus operators derived on demand from the Choi eigendecomposition."""
    eig = herm_eig(ch.choi_std, tols)
    cutoff = tols.rank_tol(float(eig.values[0]))
    out = []
    for lam, vec in zip(eig.values, eig.vectors.T):
        if lam <= cutoff:
            continue
        out.append(np.sqrt(lam) * vec.reshape(ch.dim_in, ch.dim_out).T)
    return out


def adjoint(ch: Channel, tols: ToleranceConfig = DEFAULT_TOLS) -> Channel:
    """Hilbert-Schmidt adjoint, Tr(X E_adj(Y)) = Tr(E(X) Y)."""
    # pairing identity on matrix units: E_adj(|a><b|)[j, i] = E(|i><j|)[b, a]
    adj4 = ch.choi_tensor.transpose(3, 2, 1, 0)
    d = ch.dim_in * ch.dim_out
    return Channel(
        dim_in=ch.dim_out,
        dim_out=ch.dim_in,
        choi_std=adj4.reshape(d, d),
        trace_preserving=_is_trace_preserving(adj4, tols),
    )


@dataclass(frozen=True)
class RelativeChoi:
    """State-relative Choi matrix kappa with the state and eigenbasis used."""

    kappa: np.ndarray
    rho: DensityMatrix
    basis: np.ndarray
    probs: np.ndarray
    dim_in: int
    dim_out: int

    @property
    def kappa_tensor(self) -> np.ndarray:
        return self.kappa.reshape(self.dim_in, self.dim_out, self.dim_in, self.dim_out)


def _resolve_basis(
    rho: DensityMatrix, basis, tols: ToleranceConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Eigenbasis columns and matching eigenvalues, canonical unless supplied."""
    if basis is None:
        return rho.spectral.vectors, rho.spectral.values
    basis = as_complex(basis)
    m = rho.dim
    if basis.shape != (m, m):
        raise DimensionMismatch("basis must be a square unitary matching rho")
    if frobenius(dagger(basis) @ basis - np.eye(m)) > 1e-9:
        raise DimensionMismatch("supplied basis is not unitary")
    in_basis = dagger(basis) @ rho.matrix @ basis
    off = in_basis - np.diag(np.diag(in_basis))
    if frobenius(off) > max(tols.cj_tol, 1e-9):
        raise DimensionMismatch("supplied basis does not diagonalize rho")
    return basis, np.diag(in_basis).real.copy()


def cj_relative(
    ch: Channel,
    rho: DensityMatrix,
    basis=None,
    tols: ToleranceConfig = DEFAULT_TOLS,
) -> RelativeChoi:
    """State-relative Choi matrix of a channel.

    Uses the canonical eigenbasis of ``rho`` unless ``basis`` (a unitary whose
    columns diagonalize rho) is supplied. Trace preservation is not required.
    """
    if rho.dim != ch.dim_in:
        raise DimensionMismatch("state dimension does not match channel input")
    v, p = _resolve_basis(rho, basis, tols)
    m, n = ch.dim_in, ch.dim_out
    # E on the v-basis matrix units
    e_v = np.einsum("xi,yj,xayb->iajb", v, v.conj(), ch.choi_tensor)
    weights = np.sqrt(np.maximum(p, 0.0))
    w_outer = np.einsum("i,j->ij", weights, weights)
    kappa4 = np.einsum("ij,xi,yj,iajb->xayb", w_outer, v, v.conj(), e_v)
    kappa = kappa4.reshape(m * n, m * n)
    kappa = (kappa + dagger(kappa)) / 2.0
    return RelativeChoi(
        kappa=kappa, rho=rho, basis=v, probs=p, dim_in=m, dim_out=n
    )


def cj_invert(rc: RelativeChoi, tols: ToleranceConfig = DEFAULT_TOLS) -> Channel:
    """Invert the state-relative Choi representation back to the channel.

    Requires every eigenvalue of rho to clear the rank cutoff; block (i, j)
    of kappa in the stored eigenbasis equals p_i^(1/2) p_j^(1/2) E(|v_i><v_j|).
    """
    p = rc.probs
    cutoff = tols.rank_tol(float(np.max(p)))
    if np.min(p) <= cutoff:
        raise NonInvertibleState(
            f"rho eigenvalue {np.min(p):.3e} at or below rank cutoff {cutoff:.3e}"
        )
    v = rc.basis
    m, n = rc.dim_in, rc.dim_out
    k4 = np.einsum("xi,xayb,yj->iajb", v.conj(), rc.kappa_tensor, v)
    inv_w = 1.0 / np.sqrt(p)
    e_v = np.einsum("i,j,iajb->iajb", inv_w, inv_w, k4)
    choi4 = np.einsum("xi,yj,iajb->xayb", v.conj(), v, e_v)
    choi = choi4.reshape(m * n, m * n)
    choi = (choi + dagger(choi)) / 2.0
    return Channel(
        dim_in=m,
        dim_out=n,
        choi_std=choi,
        trace_preserving=_is_trace_preserving(choi4, tols),
    )


def reductions(rc: RelativeChoi) -> tuple[np.ndarray, np.ndarray]:
    """(Tr_2 kappa, Tr_1 kappa): the reductions to A and to B."""
    to_a = linalg.partial_trace(rc.kappa, rc.dim_in, rc.dim_out, "second")
    to_b = linalg.partial_trace(rc.kappa, rc.dim_in, rc.dim_out, "first")
    return to_a, to_b


def channel_from_map(fn, dim_in: int, dim_out: int, tols: ToleranceConfig = DEFAULT_TOLS) -> Channel:
    """Assemble a Channel from a callable acting on matrices.

    The callable must be linear overall (antilinear pieces are allowed as
    long as the composite is linear); it is evaluated on all matrix units.
    """
    choi4 = np.empty((dim_in, dim_out, dim_in, dim_out), dtype=complex)
    for i in range(dim_in):
        for j in range(dim_in):
            choi4[i, :, j, :] = fn(linalg.matrix_unit(dim_in, i, j))
    choi = choi4.reshape(dim_in * dim_out, dim_in * dim_out)
    return Channel(
        dim_in=dim_in,
        dim_out=dim_out,
        choi_std=choi,
        trace_preserving=_is_trace_preserving(choi4, tols),
    )
