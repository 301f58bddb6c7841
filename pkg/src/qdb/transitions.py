"""Decompositions of a channel into elementary transitions.

An elementary transition is a pure state of the doubled system H_A (x) H_B;
the spectral decomposition of the state-relative Choi matrix kappa expresses
the channel as a probabilistic mixture of such transitions. Two transitions
count as equal when their rank-one projectors match, which removes all phase
ambiguity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import Channel, DensityMatrix, RelativeChoi, _resolve_basis
from .errors import DimensionMismatch, NonInvertibleState
from .linalg import as_complex, herm_eig
from .tolerances import DEFAULT_TOLS, ToleranceConfig


@dataclass(frozen=True)
class ElementaryTransition:
    """Unit vector on the doubled system together with its probability."""

    psi: np.ndarray
    probability: float

    def projector(self) -> np.ndarray:
        return np.outer(self.psi, self.psi.conj())


@dataclass(frozen=True)
class CJDecomposition:
    items: list[ElementaryTransition]
    dim_in: int
    dim_out: int
    source: RelativeChoi | None = None

    def weights(self) -> np.ndarray:
        return np.array([it.probability for it in self.items])

    def reconstruct(self) -> np.ndarray:
        d = self.dim_in * self.dim_out
        out = np.zeros((d, d), dtype=complex)
        for it in self.items:
            out += it.probability * it.projector()
        return out

    @classmethod
    def from_vectors(
        cls, probs, vectors, dim_in: int, dim_out: int, source=None
    ) -> "CJDecomposition":
        items = []
        for p, v in zip(probs, vectors):
            v = as_complex(np.asarray(v)).ravel()
            nv = np.linalg.norm(v)
            if abs(nv - 1.0) > 1e-12:
                raise DimensionMismatch(f"transition vector norm {nv} is not 1")
            if not p > 0:
                raise DimensionMismatch("transition probabilities must be positive")
            items.append(ElementaryTransition(psi=v, probability=float(p)))
        return cls(items=items, dim_in=dim_in, dim_out=dim_out, source=source)


def decompose(rc: RelativeChoi, tols: ToleranceConfig = DEFAULT_TOLS) -> CJDecomposition:
    """Spectral decomposition of kappa into elementary transitions.

    Only eigenvalues above the rank cutoff contribute; ties are resolved by
    the canonical eigenbasis rules of ``herm_eig``.
    """
    eig = herm_eig(rc.kappa, tols)
    cutoff = tols.rank_tol(float(eig.values[0])) if eig.dim else 0.0
    items = [
        ElementaryTransition(psi=vec.copy(), probability=float(lam))
        for lam, vec in zip(eig.values, eig.vectors.T)
        if lam > cutoff
    ]
    return CJDecomposition(items=items, dim_in=rc.dim_in, dim_out=rc.dim_out, source=rc)


def elementary_map(
    et: ElementaryTransition,
    rho: DensityMatrix,
    basis=None,
    tols: ToleranceConfig = DEFAULT_TOLS,
) -> Channel:
    """The completely positive map carried by one elementary transition.

    Unnormalized: the channel is recovered as sum_a p_a eps_a. Never flagged
    trace preserving since an individual transition may be trace increasing.
    """
    v, p = _resolve_basis(rho, basis, tols)
    m = rho.dim
    if len(et.psi) % m != 0:
        raise DimensionMismatch("transition vector incompatible with rho dimension")
    n = len(et.psi) // m
    cutoff = tols.rank_tol(float(np.max(p)))
    if np.min(p) <= cutoff:
        raise NonInvertibleState(
            f"rho eigenvalue {np.min(p):.3e} at or below rank cutoff"
        )
    kappa4 = np.outer(et.psi, et.psi.conj()).reshape(m, n, m, n)
    k4 = np.einsum("xi,xayb,yj->iajb", v.conj(), kappa4, v)
    inv_w = 1.0 / np.sqrt(p)
    e_v = np.einsum("i,j,iajb->iajb", inv_w, inv_w, k4)
    choi4 = np.einsum("xi,yj,iajb->xayb", v.conj(), v, e_v)
    return Channel(
        dim_in=m,
        dim_out=n,
        choi_std=choi4.reshape(m * n, m * n),
        trace_preserving=False,
    )


def reverse_transition(et: ElementaryTransition) -> ElementaryTransition:
    """Exchange the two copies of the system: psi -> R psi, same probability."""
    d2 = len(et.psi)
    m = int(round(np.sqrt(d2)))
    if m * m != d2:
        raise DimensionMismatch(
            "reversal needs a square system (vector length must be m^2)"
        )
    reversed_psi = et.psi.reshape(m, m).T.ravel().copy()
    return ElementaryTransition(psi=reversed_psi, probability=et.probability)


def _projector_match(psi: np.ndarray, others: list[np.ndarray], tol: float) -> int | None:
    """Index of the vector whose projector equals |psi><psi|, if any.

    For unit vectors ||P - Q||_F = sqrt(2) * s with s the norm of the
    component of psi orthogonal to phi; s is evaluated directly, which is
    stable where 1 - |<phi|psi>|^2 would cancel.
    """
    bound = tol / np.sqrt(2.0)
    for idx, phi in enumerate(others):
        s = np.linalg.norm(psi - phi * np.vdot(phi, psi))
        if s <= bound:
            return idx
    return None


@dataclass(frozen=True)
class CompletenessReport:
    complete: bool
    partners: list[int | None]
    witness: int | None


def is_complete(dec: CJDecomposition, tols: ToleranceConfig = DEFAULT_TOLS) -> CompletenessReport:
    """Whether the set of transitions is closed under reversal.

    Each reversed vector must either match a member projector or be
    orthogonal to every member, in which case it lives in the kernel of
    kappa and the decomposition can be closed with zero-probability items.
    The kernel-side reversed vectors are additionally verified to be
    pairwise orthogonal. The first failing index is returned as witness.
    """
    if dec.dim_in != dec.dim_out:
        raise DimensionMismatch("completeness is defined for a square system")
    vectors = [it.psi for it in dec.items]
    partners: list[int | None] = []
    kernel_side: list[np.ndarray] = []
    witness = None
    for idx, it in enumerate(dec.items):
        rpsi = reverse_transition(it).psi
        match = _projector_match(rpsi, vectors, tols.proj_tol)
        if match is not None:
            partners.append(match)
            continue
        overlaps = [abs(np.vdot(phi, rpsi)) for phi in vectors]
        if max(overlaps, default=0.0) <= tols.proj_tol:
            partners.append(None)
            kernel_side.append(rpsi)
            continue
        partners.append(None)
        if witness is None:
            witness = idx
    if witness is not None:
        return CompletenessReport(complete=False, partners=partners, witness=witness)
    for i in range(len(kernel_side)):
        for j in range(i + 1, len(kernel_side)):
            if abs(np.vdot(kernel_side[i], kernel_side[j])) > tols.proj_tol:
                return CompletenessReport(complete=False, partners=partners, witness=i)
    return CompletenessReport(complete=True, partners=partners, witness=None)
