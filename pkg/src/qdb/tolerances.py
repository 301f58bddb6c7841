"""Single tolerance record threaded through every top-level operation."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical tolerances, overridable per call.

    Factors (``cluster_factor``, ``rank_factor``) scale with the matrix at
    hand; everything else is an absolute Frobenius-norm bound unless noted.
    """

    herm_tol: float = 1e-9        # relative Hermiticity defect allowed on input
    psd_tol: float = 1e-9         # most negative eigenvalue tolerated
    eig_tol: float = 1e-11        # relative off-diagonal target of the eigensolver
    cluster_factor: float = 1e-8  # eigenvalue clustering: tol = factor*max(1, ||A||_F)
    rank_factor: float = 1e-10    # invertibility cutoff: tol = factor*max eigenvalue
    trace_tol: float = 1e-9
    tp_tol: float = 1e-9          # trace-preservation detection
    cj_tol: float = 1e-9          # Choi reconstruction / round-trip agreement
    inv_tol: float = 1e-9         # invariance ||E(rho)-rho||
    etdb_tol: float = 1e-9        # ||R kappa R - kappa||
    sqdb_tol: float = 1e-9        # dual-vs-channel Choi distance
    proj_tol: float = 1e-9        # projector equality / completeness matching
    classical_tol: float = 1e-12  # classical probability comparisons
    theta_state_tol: float = 1e-9     # theta(rho) = rho precondition
    involution_tol: float = 1e-10     # P^2 = I style checks
    consistency_tol: float = 1e-10    # cross-asserted independent code paths

    def replace(self, **overrides) -> "ToleranceConfig":
        for name in overrides:
            if name not in {f.name for f in dataclasses.fields(self)}:
                raise ValueError(f"unknown tolerance {name!r}")
            if not overrides[name] > 0:
                raise ValueError(f"tolerance {name} must be positive")
        return dataclasses.replace(self, **overrides)

    def cluster_tol(self, norm: float) -> float:
        return self.cluster_factor * max(1.0, norm)

    def rank_tol(self, max_eigenvalue: float) -> float:
        return self.rank_factor * max(max_eigenvalue, 0.0)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


DEFAULT_TOLS = ToleranceConfig()
