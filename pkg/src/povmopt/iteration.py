"""Monotone fixed-point improvement of a measurement.

Each step picks the outcome whose defect matrix has the largest
positive-part trace t, moves measurement weight toward it along the
positive eigenspace of that defect, and is guaranteed to raise the success
probability by at least t^2. An optional exact line search replaces the
fixed step size by the vertex of the (exactly quadratic) success
probability in the step size. The loop stops once max_k t_k falls below a
tolerance and attaches a two-sided gap certificate to the result.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import PreconditionError
from .model import (
    Ensemble,
    Povm,
    success_probability,
    uniform_povm,
    validate_ensemble,
    validate_povm,
)
from .optimality import (
    GapCertificate,
    ResidualReport,
    gap_upper_bound,
    residuals,
)

TOLERANCE_MET = "tolerance_met"
MAX_ITERS = "max_iters"
THEORY_BOUND_EXHAUSTED = "theory_bound_exhausted"

# Slack allowed on the per-step guaranteed increment (float round-off only).
STEP_TOL = 1e-9

# Completeness drift above which the element sum is symmetrically renormalized.
COMPLETENESS_DRIFT_TOL = 1e-10

# PSD tolerance for admissibility of the update direction.
X_BOUNDS_TOL = 1e-10

# Hard cap on the default iteration budget.
MAX_ITERS_CAP = 10**6

# Below this curvature the line-search quadratic is treated as degenerate.
_CURVATURE_TOL = 1e-14


@dataclass(frozen=True)
class StepRecord:
    """One improvement step. ``t_max`` is the residual before the step;
    ``line_search`` records whether the quadratic-vertex step size was used
    (false when the fixed rule ran or the quadratic was degenerate)."""

    step_index: int
    p_succ_before: float
    p_succ_after: float
    ell: int
    t_max: float
    alpha_used: float
    line_search: bool
    wall_time: float


@dataclass(frozen=True)
class IterationConfig:
    """Loop controls. ``max_iters=None`` uses the self-budgeting default
    ceil(tol^-2) capped at 10^6, which provably suffices to drive the
    residual below tol in exact arithmetic."""

    tol: float = 1e-8
    max_iters: int | None = None
    line_search: bool = True
    p_grid: tuple | None = None

    def theory_budget(self) -> int:
        return min(MAX_ITERS_CAP, int(math.ceil(self.tol ** -2)))


@dataclass(eq=False)
class IterationTrace:
    config: IterationConfig
    records: list
    final_povm: Povm
    final_report: ResidualReport
    certificate: GapCertificate
    termination_reason: str
    theory_budget: int

    @property
    def final_p_succ(self) -> float:
        return self.final_report.p_succ

    @property
    def final_t_max(self) -> float:
        return self.final_report.t_max

    def first_step_at_or_below(self, delta: float):
        """Index of the first iterate whose residual max_k t_k is <= delta.

        Step records store the residual of the iterate they acted on; the
        final iterate (index ``len(records)``) is checked last. Returns
        None if the run never got below ``delta``.
        """
        for record in self.records:
            if record.t_max <= delta:
                return record.step_index
        if self.final_t_max <= delta:
            return len(self.records)
        return None


def bc_modification(povm: Povm, direction, ell: int) -> Povm:
    """Weight-transfer update of a measurement toward outcome ``ell``.

    For an update operator X with 0 <= X <= 2*identity, every element is
    conjugated by (1 - X) and outcome ``ell`` additionally receives
    2X - X^2; the element sum is identity again algebraically, so the
    output is a POVM whenever the input is.
    """
    x = linalg.as_complex_matrix(direction)
    if x.shape != (povm.dim, povm.dim):
        raise PreconditionError(
            f"update operator has shape {x.shape}, expected ({povm.dim}, {povm.dim})"
        )
    if not 0 <= ell < povm.n_outcomes:
        raise IndexError(f"outcome index {ell} out of range [0, {povm.n_outcomes})")
    if not linalg.is_psd(x, X_BOUNDS_TOL):
        raise PreconditionError("update operator must be positive semidefinite")
    two_minus = 2.0 * np.eye(povm.dim, dtype=np.complex128) - x
    if not linalg.is_psd(two_minus, X_BOUNDS_TOL):
        raise PreconditionError("update operator must satisfy X <= 2*identity")

    contraction = np.eye(povm.dim, dtype=np.complex128) - x
    gain = linalg.real_part(2.0 * x - x @ x)
    elements = []
    for k, element in enumerate(povm.elements):
        updated = linalg.real_part(contraction @ element @ contraction)
        if k == ell:
            updated = updated + gain
        elements.append(updated)
    return Povm(dim=povm.dim, elements=elements)


def _control_drift(povm: Povm) -> Povm:
    """Renormalize S^(-1/2) M_k S^(-1/2) if the element sum drifted off identity."""
    total = povm.element_sum()
    drift = linalg.operator_norm(total - np.eye(povm.dim))
    if drift <= COMPLETENESS_DRIFT_TOL:
        return povm
    dec = linalg.eigh(total)
    if float(dec.eigenvalues[-1]) <= 0.0:
        raise PreconditionError("element sum is singular; cannot renormalize")
    inv_sqrt = (dec.eigenvectors * dec.eigenvalues ** -0.5) @ dec.eigenvectors.conj().T
    inv_sqrt = (inv_sqrt + inv_sqrt.conj().T) / 2.0
    elements = [linalg.real_part(inv_sqrt @ m @ inv_sqrt) for m in povm.elements]
    return Povm(dim=povm.dim, elements=elements)


def _line_search_size(ensemble: Ensemble, povm: Povm, ell: int, defect, projector):
    """Vertex of the exact quadratic beta -> p_succ(update(beta)), in [0, 2].

    p(beta) = p(0) + a*beta - b*beta^2 with a = 2 Tr(P D) and
    b = Tr(P rho_ell) - sum_k Tr(P M_k P rho_k). Returns None when the
    curvature b is not usefully positive (degenerate quadratic).
    """
    linear = 2.0 * float(np.trace(projector @ defect).real)
    curvature = float(np.trace(projector @ ensemble.states[ell]).real)
    for element, state in zip(povm.elements, ensemble.states):
        curvature -= float(np.trace(projector @ element @ projector @ state).real)
    if curvature <= _CURVATURE_TOL:
        return None
    return min(max(linear / (2.0 * curvature), 0.0), 2.0)


def _apply_step(
    ensemble: Ensemble,
    povm: Povm,
    report: ResidualReport,
    line_search: bool,
    step_index: int,
):
    start = time.perf_counter()
    ell = report.argmax_ell
    defect = report.defects[ell]
    projector = linalg.positive_projection(defect)
    t_ell = float(report.t[ell])
    # Exact arithmetic guarantees t <= 1; the clip only absorbs round-off.
    alpha = min(t_ell, 1.0)
    used_line_search = False
    if line_search:
        beta = _line_search_size(ensemble, povm, ell, defect, projector)
        if beta is not None:
            alpha = beta
            used_line_search = True
    updated = bc_modification(povm, alpha * projector, ell)
    updated = _control_drift(updated)
    p_after = success_probability(ensemble, updated)
    record = StepRecord(
        step_index=step_index,
        p_succ_before=report.p_succ,
        p_succ_after=p_after,
        ell=ell,
        t_max=report.t_max,
        alpha_used=alpha,
        line_search=used_line_search,
        wall_time=time.perf_counter() - start,
    )
    return updated, record


def iterate_step(ensemble: Ensemble, povm: Povm, line_search: bool = False):
    """One improvement step; returns ``(new_povm, record)``.

    With ``line_search`` off the step size is min(t_ell, 1), which raises
    the success probability by at least t_ell^2; the line search never does
    worse. An optimal input is an exact fixed point.
    """
    report = residuals(ensemble, povm)
    return _apply_step(ensemble, povm, report, line_search, step_index=0)


def run(
    ensemble: Ensemble,
    initial: Povm | None = None,
    config: IterationConfig | None = None,
) -> IterationTrace:
    """Iterate to convergence from ``initial`` (default: uniform measurement).

    Stops when max_k t_k <= tol (``tolerance_met``), when an explicit
    ``max_iters`` is hit (``max_iters``), or when the self-budgeting
    ceil(tol^-2) step allowance runs out without meeting the tolerance
    (``theory_bound_exhausted`` -- impossible in exact arithmetic, so it
    flags numerical trouble). The returned trace carries per-step records
    and a final two-sided gap certificate.
    """
    config = config or IterationConfig()
    if config.tol <= 0.0:
        raise ValueError("tol must be positive")
    if config.max_iters is not None and config.max_iters < 0:
        raise ValueError("max_iters must be nonnegative")

    ensemble_report = validate_ensemble(ensemble)
    if not ensemble_report.ok:
        raise PreconditionError(
            "invalid ensemble:\n" + ensemble_report.summary()
        )
    povm = initial if initial is not None else uniform_povm(ensemble.dim, ensemble.n_states)
    povm_report = validate_povm(povm)
    if not povm_report.ok:
        raise PreconditionError("invalid starting POVM:\n" + povm_report.summary())

    budget = config.theory_budget()
    cap = budget if config.max_iters is None else config.max_iters

    records = []
    report = residuals(ensemble, povm)
    while True:
        if report.t_max <= config.tol:
            reason = TOLERANCE_MET
            break
        if len(records) >= cap:
            reason = MAX_ITERS if config.max_iters is not None else THEORY_BOUND_EXHAUSTED
            break
        povm, record = _apply_step(
            ensemble, povm, report, config.line_search, len(records)
        )
        records.append(record)
        report = residuals(ensemble, povm)

    certificate = gap_upper_bound(ensemble, report, p_grid=config.p_grid)
    return IterationTrace(
        config=config,
        records=records,
        final_povm=povm,
        final_report=report,
        certificate=certificate,
        termination_reason=reason,
        theory_budget=budget,
    )
