"""Central numeric-policy record.

Every tolerance used by the numerical routines lives here so that a single
object can be swapped in to tighten or relax the whole stack.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class NumericPolicy:
    # symmetric eigen / linear algebra
    symmetry_tol: float = 1e-10
    eigen_recon_rtol: float = 1e-6
    solve_residual_rtol: float = 1e-8
    max_condition: float = 1e12
    # pseudo-inverse / rank retention
    pinv_rel_tol: float = 1e-8
    rank_rel_tol: float = 1e-10
    # PSD handling
    psd_clip_floor: float = -1e-10
    psd_reject_floor: float = -1e-6
    innovation_psd_floor: float = -1e-8
    # geometry
    hull_cross_tol: float = 1e-12
    hull_slack: float = 1e-9


DEFAULT_POLICY = NumericPolicy()
