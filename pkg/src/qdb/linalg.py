"""Dense complex matrix kernel.

Plain ``numpy`` complex arrays in row-major layout throughout; every function
is pure. The eigensolver is a cyclic Jacobi iteration for Hermitian matrices:
at the dimensions this package targets (up to ~64) robustness and bitwise
reproducibility matter more than speed. On top of it sits a deterministic
canonicalization of eigenbases (clustering, in-order Gram-Schmidt against the
standard basis, and a global phase fix) so that degenerate spectra always
yield the same basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    EigensolverError,
    NonHermitianInput,
    NotInvertible,
    NotPositiveSemidefinite,
)
from .tolerances import DEFAULT_TOLS, ToleranceConfig

_MAX_SWEEPS = 100
_GS_NORM_CUTOFF = 1e-8
_PHASE_CUTOFF = 1e-8


def as_complex(a) -> np.ndarray:
    return np.asarray(a, dtype=complex)


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def frobenius(a) -> float:
    return float(np.linalg.norm(a))


def require_square(a: np.ndarray, what: str = "matrix") -> int:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{what} must be square, got shape {a.shape}")
    return a.shape[0]


def tensor(a, b) -> np.ndarray:
    """Kronecker product with (i_A i_B) row-major index convention."""
    return np.kron(as_complex(a), as_complex(b))


def matrix_unit(d: int, i: int, j: int) -> np.ndarray:
    out = np.zeros((d, d), dtype=complex)
    out[i, j] = 1.0
    return out


def _as_bipartite(x, dim_a: int, dim_b: int) -> np.ndarray:
    x = as_complex(x)
    d = dim_a * dim_b
    if x.shape != (d, d):
        raise DimensionMismatch(
            f"expected a {d}x{d} matrix for dims ({dim_a},{dim_b}), got {x.shape}"
        )
    return x.reshape(dim_a, dim_b, dim_a, dim_b)


def partial_trace(x, dim_a: int, dim_b: int, which: str = "second") -> np.ndarray:
    """Trace out one tensor factor of an operator on H_A (x) H_B."""
    t = _as_bipartite(x, dim_a, dim_b)
    if which == "second":
        return np.einsum("iaja->ij", t)
    if which == "first":
        return np.einsum("iaib->ab", t)
    raise ValueError("which must be 'first' or 'second'")


def partial_transpose(x, dim_a: int, dim_b: int, which: str = "first") -> np.ndarray:
    """Transpose the indicated tensor factor in the computational basis."""
    t = _as_bipartite(x, dim_a, dim_b)
    if which == "first":
        t = t.transpose(2, 1, 0, 3)
    elif which == "second":
        t = t.transpose(0, 3, 2, 1)
    else:
        raise ValueError("which must be 'first' or 'second'")
    d = dim_a * dim_b
    return t.reshape(d, d)


def swap_operator(m: int, n: int) -> np.ndarray:
    """Unitary R: H_A (x) H_B -> H_B (x) H_A with R(e_i (x) f_j) = f_j (x) e_i.

    For m == n this is the self-adjoint involution implementing the reversal
    of elementary transitions.
    """
    r = np.zeros((n * m, m * n), dtype=complex)
    for i in range(m):
        for j in range(n):
            r[j * m + i, i * n + j] = 1.0
    return r


@dataclass(frozen=True)
class HermEigen:
    """Spectral data: eigenvalues descending, canonical orthonormal columns."""

    values: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.values)

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ dagger(self.vectors)


def _jacobi_rotate(b: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    """Zero b[p,q] by a unitary plane rotation, updating b and v in place."""
    beta = b[p, q]
    alpha = b[p, p].real
    gamma = b[q, q].real
    absb = abs(beta)
    w = beta / absb
    theta = (gamma - alpha) / (2.0 * absb)
    sign = 1.0 if theta >= 0.0 else -1.0
    t = sign / (abs(theta) + math.hypot(1.0, theta))
    c = 1.0 / math.sqrt(1.0 + t * t)
    s = t * c
    # V2 = diag(1, conj(w)) @ [[c, s], [-s, c]]
    v2 = np.array([[c, s], [-s * np.conj(w), c * np.conj(w)]], dtype=complex)

    cols = b[:, [p, q]] @ v2
    b[:, p] = cols[:, 0]
    b[:, q] = cols[:, 1]
    rows = dagger(v2) @ b[[p, q], :]
    b[p, :] = rows[0]
    b[q, :] = rows[1]
    b[p, q] = 0.0
    b[q, p] = 0.0
    b[p, p] = b[p, p].real
    b[q, q] = b[q, q].real

    vcols = v[:, [p, q]] @ v2
    v[:, p] = vcols[:, 0]
    v[:, q] = vcols[:, 1]


def _off_norm(b: np.ndarray) -> float:
    off = b - np.diag(np.diag(b))
    return frobenius(off)


def _first_significant(u: np.ndarray) -> int:
    cutoff = _PHASE_CUTOFF * max(float(np.max(np.abs(u))), 1e-300)
    for i, x in enumerate(u):
        if abs(x) > cutoff:
            return i
    return int(np.argmax(np.abs(u)))


def _fix_phase(u: np.ndarray) -> np.ndarray:
    i = _first_significant(u)
    z = u[i]
    if abs(z) == 0.0:
        return u
    return u * (np.conj(z) / abs(z))


def _canonical_cluster_basis(cols: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of span(cols).

    Projects the standard basis vectors onto the cluster eigenspace in index
    order, Gram-Schmidts them, and fixes each global phase so the first
    significant component is real positive.
    """
    n, k = cols.shape
    proj = cols @ dagger(cols)
    built: list[np.ndarray] = []
    for j in range(n):
        if len(built) == k:
            break
        w = proj[:, j].copy()
        for u in built:
            w -= u * (np.conj(u) @ w)
        nw = np.linalg.norm(w)
        if nw > _GS_NORM_CUTOFF:
            built.append(_fix_phase(w / nw))
    # near-exhausted Gram-Schmidt: keep the raw columns, still deterministic
    for j in range(k):
        if len(built) == k:
            break
        w = cols[:, j].copy()
        for u in built:
            w -= u * (np.conj(u) @ w)
        nw = np.linalg.norm(w)
        if nw > 1e-12:
            built.append(_fix_phase(w / nw))
    return np.column_stack(built)


def eigenvalue_clusters(values: np.ndarray, cluster_tol: float) -> list[slice]:
    """Slices of consecutive (descending) eigenvalues within cluster_tol."""
    clusters = []
    start = 0
    for k in range(1, len(values)):
        if values[k - 1] - values[k] > cluster_tol:
            clusters.append(slice(start, k))
            start = k
    clusters.append(slice(start, len(values)))
    return clusters


def herm_eig(a, tols: ToleranceConfig = DEFAULT_TOLS) -> HermEigen:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns eigenvalues sorted descending with a canonical eigenbasis:
    within each eigenvalue cluster the basis is rebuilt from the standard
    basis in index order and phased so the first significant component of
    every eigenvector is real positive. Raises ``NonHermitianInput`` if
    ``a`` is not Hermitian within ``herm_tol`` and ``EigensolverError``
    if the sweep limit is hit.
    """
    a = as_complex(a)
    n = require_square(a, "eigensolver input")
    na = frobenius(a)
    if frobenius(a - dagger(a)) > tols.herm_tol * max(1.0, na):
        raise NonHermitianInput(
            f"matrix is not Hermitian within {tols.herm_tol} (relative)"
        )

    b = (a + dagger(a)) / 2.0
    v = np.eye(n, dtype=complex)
    if n > 1 and na > 0.0:
        target = tols.eig_tol * na
        skip = target / (2.0 * n)
        for _ in range(_MAX_SWEEPS):
            if _off_norm(b) <= target:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    if abs(b[p, q]) > skip:
                        _jacobi_rotate(b, v, p, q)
        else:
            raise EigensolverError(
                f"Jacobi sweeps exhausted; off-norm {_off_norm(b):.3e} > {target:.3e}"
            )

    values = np.diag(b).real.copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = v[:, order]

    ctol = tols.cluster_tol(na)
    canon = np.empty_like(vectors)
    for sl in eigenvalue_clusters(values, ctol):
        canon[:, sl] = _canonical_cluster_basis(vectors[:, sl])
    return HermEigen(values=values, vectors=canon)


def psd_power(
    a,
    exponent: float,
    kernel_policy: str = "reject",
    tols: ToleranceConfig = DEFAULT_TOLS,
) -> np.ndarray:
    """Functional calculus A^exponent for a PSD matrix.

    Eigenvalues below the rank cutoff count as kernel. Under ``reject`` a
    kernel eigenvalue combined with a negative exponent raises
    ``NotInvertible``; under ``pseudo`` kernel directions map to zero.
    """
    if kernel_policy not in ("reject", "pseudo"):
        raise ValueError("kernel_policy must be 'reject' or 'pseudo'")
    eig = herm_eig(a, tols)
    top = float(eig.values[0]) if eig.dim else 0.0
    if eig.dim and float(eig.values[-1]) < -tols.psd_tol * max(1.0, top):
        raise NotPositiveSemidefinite(
            f"most negative eigenvalue {eig.values[-1]:.3e} below -psd_tol"
        )
    cutoff = tols.rank_tol(top)
    kernel = eig.values <= cutoff
    if kernel.any() and exponent < 0 and kernel_policy == "reject":
        raise NotInvertible(
            "negative power of a singular PSD matrix (use kernel_policy='pseudo')"
        )
    clipped = np.maximum(eig.values, 0.0)
    with np.errstate(divide="ignore"):
        powered = np.where(kernel, 0.0, np.power(clipped, exponent, where=~kernel))
    out = (eig.vectors * powered) @ dagger(eig.vectors)
    return (out + dagger(out)) / 2.0
